//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use theoria_core::dsl::{parse_program, parse_query_body, print_program};
use theoria_core::engine::{saturate, Engine, Model};
use theoria_core::kernel::{Atom, Fact, Situation, Term};
use theoria_core::library::{
    self, build_scenario, enforcement_fact, run_design, AuditorOrientation, ClientPreference,
    Scenario, StandardType,
};
use theoria_core::store::FactStore;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const RANDOM_PROGRAMS: u64 = 250;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const H1B_BUDGET: Duration = Duration::from_secs(1);
const FUZZED_ROUND_TRIPS: u64 = 100;

fn c(s: &str) -> Term {
    Term::constant(s)
}

fn auditor() -> theoria_core::kernel::Ontology {
    library::load_builtin("auditor").expect("bundled ontology loads")
}

fn audited() -> Situation {
    let sc = Situation::base(library::BASE_SITUATION).unwrap();
    Situation::successor(library::audit_action(), &sc).unwrap()
}

fn rules_based() -> Scenario {
    Scenario::new(
        StandardType::RulesBased,
        AuditorOrientation::PrinciplesOriented,
        ClientPreference::Opportunistic,
    )
}

fn criterion_1() -> Outcome {
    let onto = auditor();
    let target = audited();
    let expected = Fact::holds(
        Atom::new(
            "enforces_preferred_treatment",
            vec![c("auditor1"), c("nonopportunistic")],
        ),
        target.id(),
    );
    ensure!(
        target.id().as_str() == "do__audits_auditor1_client1__sc",
        "unexpected situation id {}",
        target.id()
    );

    let start = Instant::now();
    let mut store = build_scenario(&Scenario::h1b());
    let first = saturate(&mut store, &onto, target.id()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(first.contains(&expected), "{expected} not derived");
    ensure!(elapsed < H1B_BUDGET, "took {elapsed:?}");

    let engine = Engine::new(&onto).map_err(|e| e.to_string())?;
    let a = engine
        .compute(&build_scenario(&Scenario::h1b()))
        .map_err(|e| e.to_string())?;
    let b = engine
        .compute(&build_scenario(&Scenario::h1b()))
        .map_err(|e| e.to_string())?;
    ensure!(
        a.derivation_order() == b.derivation_order(),
        "derivation order differs"
    );
    let again = saturate(&mut build_scenario(&Scenario::h1b()), &onto, target.id())
        .map_err(|e| e.to_string())?;
    ensure!(first == again, "derived sets differ between runs");
    Ok(format!("{expected} derived in {elapsed:?}"))
}

fn criterion_2() -> Outcome {
    let rows = run_design(&auditor()).map_err(|e| e.to_string())?;
    ensure!(rows.len() == 6, "{} design cells", rows.len());
    let truthy: Vec<&str> = rows
        .iter()
        .filter(|r| r.enforces_nonopportunistic)
        .map(|r| r.scenario.name.as_str())
        .collect();
    ensure!(
        truthy == ["principles_based/principles_oriented/opportunistic"],
        "true cells: {truthy:?}"
    );
    Ok(format!("true only in {}", truthy[0]))
}

fn criterion_3() -> Outcome {
    let onto = auditor();
    let engine = Engine::new(&onto).map_err(|e| e.to_string())?;
    let h1b = build_scenario(&Scenario::h1b());
    let report = engine
        .model(&h1b)
        .map_err(|e| e.to_string())?
        .check_competency(onto.questions());
    for name in ["eq1", "eq2"] {
        let r = report.get(name).ok_or(format!("no question {name}"))?;
        ensure!(r.passed && r.answers > 0, "{name} on H1b: {r:?}");
    }
    // The transcriptions themselves, independent of the named questions.
    let model = engine.model(&h1b).map_err(|e| e.to_string())?;
    for text in [
        "holds(accounting_standard(ifrs), S)",
        "holds(enforces_preferred_treatment(A, nonopportunistic), S)",
    ] {
        let body = parse_query_body(text).map_err(|e| e.to_string())?;
        let answers = model.query(&body).map_err(|e| e.to_string())?;
        ensure!(!answers.is_empty(), "{text} unsat on H1b");
    }

    let rb = build_scenario(&rules_based());
    let report = engine
        .model(&rb)
        .map_err(|e| e.to_string())?
        .check_competency(onto.questions());
    let eq2 = report.get("eq2").ok_or("no question eq2")?;
    ensure!(
        eq2.answers == 0 && !eq2.passed,
        "eq2 on rules_based: {eq2:?}"
    );
    Ok("eq1, eq2 sat on H1b; eq2 unsat on rules_based".into())
}

fn criterion_4() -> Outcome {
    let onto = auditor();
    let s = audited();
    let mut store = build_scenario(&Scenario::h1b());
    let derived = saturate(&mut store, &onto, s.id()).map_err(|e| e.to_string())?;
    let reference = Fact::holds(
        Atom::new("deliberate_theory_reference", vec![c("ifrs")]),
        s.id(),
    );
    let desire = Fact::holds(Atom::new("desire", vec![c("principles_oriented")]), s.id());
    ensure!(derived.contains(&reference), "missing {reference}");
    ensure!(derived.contains(&desire), "missing {desire}");

    // One has_evidence fact is derived in the audited situation itself and
    // one is inherited from `sc`; each carries its own Skolem belief.
    let evidence: Vec<&Fact> = derived
        .iter()
        .filter(|f| f.atom.predicate == "has_evidence")
        .collect();
    ensure!(!evidence.is_empty(), "no has_evidence fact");
    for f in &evidence {
        let belief = &f.atom.args[0];
        ensure!(
            belief.functor().is_some_and(|name| name.starts_with("sk_")),
            "belief term {belief} is not a Skolem term"
        );
        ensure!(
            f.atom.args[1..] == [c("client_preferred_treatment"), c("opportunistic")],
            "{f}"
        );
    }
    let expected_belief = Term::compound(
        "sk_bridge_preference_B",
        vec![c("client1"), c("opportunistic"), s.term().clone()],
    );
    let e = evidence
        .iter()
        .find(|f| f.atom.args[0] == expected_belief)
        .ok_or(format!("no belief {expected_belief} among {evidence:?}"))?;
    Ok(format!("{reference}, {desire}, {e}"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut facts = 0;
    for seed in 0..RANDOM_PROGRAMS {
        let case = common::case(seed);
        let engine = Engine::new(&case.ontology).map_err(|e| format!("seed {seed}: {e}"))?;
        let fast = engine
            .compute(&case.store)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        let slow = engine
            .naive(&case.store)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        for sit in case.store.situations() {
            let id = sit.id();
            let a: std::collections::BTreeSet<Fact> = fast.derived_in(id).collect();
            let b = slow.get(id).cloned().unwrap_or_default();
            ensure!(
                a == b,
                "seed {seed}, situation {id}: {a:?} vs {b:?}\n{}",
                case.text
            );
        }
        facts += fast.len();
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < ORACLE_BUDGET, "took {elapsed:?}");
    Ok(format!(
        "{RANDOM_PROGRAMS} programs, {facts} derived facts, {elapsed:?}"
    ))
}

fn criterion_6() -> Outcome {
    let onto = auditor();
    let engine = Engine::new(&onto).map_err(|e| e.to_string())?;
    let mut store = FactStore::for_ontology(&onto);
    let sigma1 = store
        .add_base_situation("sigma1")
        .map_err(|e| e.to_string())?;
    let sigma2 = store
        .add_base_situation("sigma2")
        .map_err(|e| e.to_string())?;
    ensure!(sigma1 != sigma2, "situations coincide");
    let atom = Atom::new(
        "enforces_preferred_treatment",
        vec![c("john_jones"), c("nonopportunistic")],
    );
    store
        .assert_fact(Fact::holds(atom.clone(), &sigma1))
        .map_err(|e| e.to_string())?;
    let model = engine.model(&store).map_err(|e| e.to_string())?;
    ensure!(
        model.holds(&Fact::holds(atom.clone(), &sigma1)),
        "false in sigma1"
    );
    ensure!(
        !model.holds(&Fact::holds(atom.clone(), &sigma2)),
        "true in sigma2"
    );

    let both = parse_query_body(
        "holds(enforces_preferred_treatment(john_jones, nonopportunistic), sigma1) \
         & not holds(enforces_preferred_treatment(john_jones, nonopportunistic), sigma2)",
    )
    .map_err(|e| e.to_string())?;
    let answers = model.query(&both).map_err(|e| e.to_string())?;
    ensure!(
        answers.len() == 1 && answers[0].to_string() == "true",
        "conjunction answers: {answers:?}"
    );
    Ok("true in sigma1, false in sigma2".into())
}

fn round_trip(label: &str, text: &str) -> Result<(), String> {
    let p1 = parse_program(text).map_err(|e| format!("{label}: {e}"))?;
    let printed = print_program(&p1);
    let p2 = parse_program(&printed).map_err(|e| format!("{label} reprinted: {e}"))?;
    ensure!(p1 == p2, "{label}: programs differ after printing");
    ensure!(
        print_program(&p2) == printed,
        "{label}: printing is not a fixpoint"
    );
    Ok(())
}

fn criterion_7() -> Outcome {
    for name in library::BUNDLES {
        let files = library::builtin_files(name).ok_or(format!("no bundle {name}"))?;
        let text: String = files.iter().map(|(_, t)| *t).collect::<Vec<_>>().join("\n");
        round_trip(name, &text)?;
    }
    for seed in 0..FUZZED_ROUND_TRIPS {
        let text = common::random_program(&mut common::rng(10_000 + seed));
        round_trip(&format!("fuzz seed {}", 10_000 + seed), &text)?;
    }
    Ok(format!(
        "{} bundles, {FUZZED_ROUND_TRIPS} fuzzed programs",
        library::BUNDLES.len()
    ))
}

fn check_proofs(model: &Model<'_>) -> Result<usize, String> {
    let mut n = 0;
    for fact in model.saturation().derivation_order() {
        let proof = model.prove(fact).ok_or(format!("no proof for {fact}"))?;
        let term = model
            .store()
            .term_of(&fact.situation)
            .ok_or(format!("unknown situation of {fact}"))?;
        ensure!(
            proof.conclusion == fact.to_literal(term.clone()),
            "proof concludes {}",
            proof.conclusion
        );
        model.replay(&proof).map_err(|e| format!("{fact}: {e}"))?;
        n += 1;
    }
    Ok(n)
}

fn criterion_8() -> Outcome {
    let onto = auditor();
    let engine = Engine::new(&onto).map_err(|e| e.to_string())?;
    let mut scenarios = Scenario::design(ClientPreference::Opportunistic);
    scenarios.push(rules_based());
    let mut n = 0;
    for scenario in &scenarios {
        let store = build_scenario(scenario);
        let model = engine.model(&store).map_err(|e| e.to_string())?;
        n += check_proofs(&model).map_err(|e| format!("{}: {e}", scenario.name))?;
    }
    let h1b = build_scenario(&Scenario::h1b());
    let model = engine.model(&h1b).map_err(|e| e.to_string())?;
    ensure!(
        model.prove(&enforcement_fact(audited().id())).is_some(),
        "no proof of the H1b conclusion"
    );
    Ok(format!("{n} proofs replayed"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("H1b reproduction", criterion_1),
        ("design contrast", criterion_2),
        ("competency suite", criterion_3),
        ("bridge derivations", criterion_4),
        ("oracle equivalence", criterion_5),
        ("situation isolation", criterion_6),
        ("round-trip", criterion_7),
        ("proof soundness", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
