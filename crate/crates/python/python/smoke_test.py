"""Smoke test for the theoria extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`,
then run `python crates/python/python/smoke_test.py`.
"""

import theoria

AUDITED = "do__audits_auditor1_client1__sc"
EQ2 = "holds(enforces_preferred_treatment(A, nonopportunistic), S)"


def test_h1b_query_and_proof():
    model = theoria.Model.scenario("principles_based", "principles_oriented")
    answers = model.query(EQ2, proofs=True)
    assert len(answers) == 1, answers
    assert answers[0]["bindings"] == {"A": "auditor1", "S": AUDITED}
    assert answers[0]["proofs"][0]["rule"] == "h1b"

    proof = model.prove(
        f"holds(enforces_preferred_treatment(auditor1, nonopportunistic), {AUDITED})"
    )
    assert proof["rule"] == "h1b"
    assert len(proof["premises"]) == 6
    assert model.prove("holds(enforces_preferred_treatment(auditor1, nonopportunistic), sc)") is None

    derived = model.saturate(AUDITED)
    assert "holds(deliberate_theory_reference(ifrs), " + AUDITED + ")" in derived


def test_design_has_one_true_cell():
    rows = theoria.run_design()
    assert len(rows) == 6
    true_cells = [r["scenario"]["name"] for r in rows if r["enforces_nonopportunistic"]]
    assert true_cells == ["principles_based/principles_oriented/opportunistic"]


def test_competency_and_rules_based_contrast():
    report = theoria.Model.scenario("principles_based", "principles_oriented").competency()
    assert all(r["passed"] for r in report["results"])
    rb = theoria.Model.scenario("rules_based", "principles_oriented").competency()
    assert [r["name"] for r in rb["results"] if not r["passed"]] == ["eq2"]


def test_store_building_and_isolation():
    onto = theoria.Ontology.builtin("auditor")
    assert onto.axioms == ["bridge_standard", "bridge_orientation", "bridge_preference", "h1b"]
    model = theoria.Model(onto)
    model.add_situation("sigma1")
    model.add_situation("sigma2")
    fact = "enforces_preferred_treatment(john_jones, nonopportunistic)"
    assert model.assert_fact(f"holds({fact}, sigma1)")
    assert model.query(f"holds({fact}, sigma1)") == [{"bindings": {}, "situation": "sigma1"}]
    assert model.query(f"holds({fact}, sigma2)") == []

    added = model.ingest_csv("name\nIFRS\nUS GAAP\n", "standards:accounting_standard:name")
    assert added == 2
    names = sorted(a["bindings"]["X"] for a in model.query("holds(accounting_standard(X), sc)"))
    assert names == ["ifrs", "us_gaap"]


def test_errors_raise_theoria_error():
    for bad in (
        lambda: theoria.Ontology.parse("fact holds(p, ."),
        lambda: theoria.Model.scenario("brules", "principles_oriented"),
        lambda: theoria.Model(theoria.Ontology.builtin("auditor")).query("holds(nope(X), S)"),
    ):
        try:
            bad()
        except theoria.TheoriaError:
            pass
        else:
            raise AssertionError("expected TheoriaError")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok {name}")
