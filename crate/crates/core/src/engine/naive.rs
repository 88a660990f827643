//! Brute-force reference evaluator. Every rule is grounded over all terms
//! in the current model, round after round, until nothing changes. It shares
//! no matching code with the semi-naive evaluator and is meant for
//! differential testing only.

use std::collections::{BTreeMap, BTreeSet};

use super::compile::{CompiledRule, Program};
use super::eval::{check_skolem_nesting, clips_atom};
use super::EngineError;
use crate::kernel::{
    canonical_situation_id, Apply, Atom, Fact, Literal, LiteralKind, Modality, PredicateKind,
    SituationId, Substitution, Term, CLIPS,
};
use crate::store::FactStore;

type GroundFact = (Modality, Atom, Term);

struct Edge {
    child: Term,
    action: Atom,
    parent: Term,
}

pub(crate) fn naive_saturate(
    program: &Program,
    store: &FactStore,
) -> Result<BTreeMap<SituationId, BTreeSet<Fact>>, EngineError> {
    let sits: BTreeSet<Term> = store.situations().map(|s| s.term().clone()).collect();
    let edges: Vec<Edge> = store
        .situations()
        .filter_map(|s| {
            let action = s.action()?.clone();
            let parent = store.term_of(s.parent()?)?.clone();
            Some(Edge {
                child: s.term().clone(),
                action,
                parent,
            })
        })
        .collect();
    let base: BTreeSet<GroundFact> = store
        .all_base_facts()
        .map(|f| {
            let term = store
                .term_of(&f.situation)
                .expect("known situation")
                .clone();
            (f.modality, f.atom.clone(), term)
        })
        .collect();

    let mut facts = base.clone();
    for stratum in 0..program.strata {
        let rules: Vec<&CompiledRule> = program.rules_in(stratum).collect();
        loop {
            let domain = domain(&facts, &sits);
            let mut new: BTreeSet<GroundFact> = BTreeSet::new();
            for rule in &rules {
                ground_rule(rule, &domain, &facts, &sits, &mut new)?;
            }
            for (m, atom, sit) in &facts {
                if *m != Modality::Holds || program.stratum_of(&atom.predicate) != stratum {
                    continue;
                }
                match program.kind_of(&atom.predicate) {
                    Some(PredicateKind::Fluent) if atom.predicate != CLIPS => {
                        for e in edges.iter().filter(|e| &e.parent == sit) {
                            let clips = clips_atom(&e.action, &atom.predicate);
                            if !facts.contains(&(Modality::Holds, clips, sit.clone())) {
                                new.insert((Modality::Holds, atom.clone(), e.child.clone()));
                            }
                        }
                    }
                    Some(PredicateKind::Rigid) => {
                        for s in &sits {
                            new.insert((Modality::Holds, atom.clone(), s.clone()));
                        }
                    }
                    _ => {}
                }
            }
            let before = facts.len();
            facts.extend(new);
            if facts.len() == before {
                break;
            }
        }
    }

    let mut out: BTreeMap<SituationId, BTreeSet<Fact>> = BTreeMap::new();
    for (m, atom, sit) in facts.difference(&base) {
        let id = canonical_situation_id(sit)?;
        out.entry(id.clone()).or_default().insert(Fact {
            modality: *m,
            atom: atom.clone(),
            situation: id,
        });
    }
    Ok(out)
}

/// Every subterm of every fact argument, plus all situation terms and the
/// subterms of their actions.
fn domain(facts: &BTreeSet<GroundFact>, sits: &BTreeSet<Term>) -> Vec<Term> {
    let mut out: BTreeSet<Term> = BTreeSet::new();
    for (_, atom, _) in facts {
        for a in &atom.args {
            a.for_each_subterm(&mut |t| {
                out.insert(t.clone());
            });
        }
    }
    for s in sits {
        s.for_each_subterm(&mut |t| {
            out.insert(t.clone());
        });
    }
    out.into_iter().collect()
}

fn ground_rule(
    rule: &CompiledRule,
    domain: &[Term],
    facts: &BTreeSet<GroundFact>,
    sits: &BTreeSet<Term>,
    new: &mut BTreeSet<GroundFact>,
) -> Result<(), EngineError> {
    let mut s = Substitution::new();
    assign(rule, 0, domain, facts, sits, &mut s, new)
}

fn assign(
    rule: &CompiledRule,
    k: usize,
    domain: &[Term],
    facts: &BTreeSet<GroundFact>,
    sits: &BTreeSet<Term>,
    s: &mut Substitution,
    new: &mut BTreeSet<GroundFact>,
) -> Result<(), EngineError> {
    // Prune as soon as some fully instantiated body literal is false.
    for lit in &rule.body {
        let g = lit.apply(s);
        if g.is_ground() && !ground_literal_true(&g, facts, sits) {
            return Ok(());
        }
    }
    let Some(var) = rule.universals.get(k) else {
        check_skolem_nesting(rule, s)?;
        let head = rule.head.apply(s);
        let atom = head.atom().expect("holds head").clone();
        let sit = head.situation().expect("holds head").clone();
        if sits.contains(&sit) {
            new.insert((Modality::Holds, atom, sit));
        }
        return Ok(());
    };
    for value in domain {
        let mut next = s.clone();
        next.bind(var, value.clone())?;
        assign(rule, k + 1, domain, facts, sits, &mut next, new)?;
    }
    Ok(())
}

fn ground_literal_true(lit: &Literal, facts: &BTreeSet<GroundFact>, sits: &BTreeSet<Term>) -> bool {
    match lit.kind() {
        LiteralKind::Equality { lhs, rhs } => lhs == rhs && sits.contains(lhs),
        LiteralKind::Holds { atom, situation } | LiteralKind::Occurs { atom, situation } => {
            let m = lit.modality().expect("modal literal");
            let present = facts.contains(&(m, atom.clone(), situation.clone()));
            present != lit.is_negated()
        }
    }
}
