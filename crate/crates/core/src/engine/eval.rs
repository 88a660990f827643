use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::compile::{CompiledRule, Program};
use super::EngineError;
use crate::kernel::{
    unify_atoms_with, unify_with, Apply, Atom, Fact, Literal, LiteralKind, Modality, PredicateKind,
    SituationId, Substitution, Term, CLIPS, SKOLEM_PREFIX,
};
use crate::store::FactStore;

/// Why a derived fact holds. Each fact keeps the first justification found,
/// so following premises always reaches base facts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Rule {
        rule: String,
        substitution: Substitution,
        /// One premise per body literal, in written order.
        premises: Vec<Premise>,
    },
    /// Inherited from the parent situation; `clips` is the negated literal
    /// that was checked.
    Frame { from: Fact, clips: Literal },
    /// Copied from another situation because the predicate is rigid.
    Rigid { from: Fact },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Premise {
    Fact(Fact),
    /// A satisfied equality, both sides instantiated.
    Equality {
        lhs: Term,
        rhs: Term,
    },
    /// A ground negated literal whose positive form is not derivable.
    Absent(Literal),
}

/// Facts indexed by predicate and by predicate plus situation, in
/// insertion order.
#[derive(Debug, Clone, Default)]
pub(crate) struct Db {
    set: HashSet<Fact>,
    order: Vec<Fact>,
    by_pred: HashMap<(Modality, String), Vec<Fact>>,
    by_pred_sit: HashMap<(Modality, String, SituationId), Vec<Fact>>,
}

impl Db {
    pub fn insert(&mut self, f: Fact) -> bool {
        if !self.set.insert(f.clone()) {
            return false;
        }
        self.by_pred
            .entry((f.modality, f.atom.predicate.clone()))
            .or_default()
            .push(f.clone());
        self.by_pred_sit
            .entry((f.modality, f.atom.predicate.clone(), f.situation.clone()))
            .or_default()
            .push(f.clone());
        self.order.push(f);
        true
    }

    pub fn contains(&self, f: &Fact) -> bool {
        self.set.contains(f)
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fact> {
        self.order.iter()
    }

    fn has_predicate(&self, m: Modality, pred: &str) -> bool {
        self.by_pred.contains_key(&(m, pred.to_string()))
    }

    fn candidates(&self, m: Modality, pred: &str, sit: Option<&SituationId>) -> &[Fact] {
        let found = match sit {
            Some(s) => self.by_pred_sit.get(&(m, pred.to_string(), s.clone())),
            None => self.by_pred.get(&(m, pred.to_string())),
        };
        found.map_or(&[], Vec::as_slice)
    }
}

/// The outcome of saturating a store: derived facts per situation with their
/// justifications. Base facts are not included.
#[derive(Debug, Clone, Default)]
pub struct Saturation {
    fingerprint: u64,
    derived: BTreeMap<SituationId, BTreeSet<Fact>>,
    justifications: HashMap<Fact, Justification>,
    order: Vec<Fact>,
    /// Base and derived facts together.
    pub(crate) all: Db,
}

impl Saturation {
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Derived facts located in `sit`.
    pub fn derived_in(&self, sit: &SituationId) -> impl Iterator<Item = Fact> + '_ {
        self.derived.get(sit).into_iter().flatten().cloned()
    }

    pub fn derived(&self) -> &BTreeMap<SituationId, BTreeSet<Fact>> {
        &self.derived
    }

    /// Derived facts in the order they were found.
    pub fn derivation_order(&self) -> &[Fact] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn justification(&self, f: &Fact) -> Option<&Justification> {
        self.justifications.get(f)
    }

    /// True for base and derived facts alike.
    pub fn holds(&self, f: &Fact) -> bool {
        self.all.contains(f)
    }

    fn record(&mut self, f: Fact, j: Justification) {
        self.derived
            .entry(f.situation.clone())
            .or_default()
            .insert(f.clone());
        self.justifications.insert(f.clone(), j);
        self.order.push(f.clone());
        self.all.insert(f);
    }
}

type Emit<'e> = dyn FnMut(&Substitution, &[Option<Premise>]) -> Result<(), EngineError> + 'e;

/// Conjunctive matching of a body against a fact database.
pub(crate) struct Matcher<'a> {
    pub store: &'a FactStore,
    pub db: &'a Db,
}

impl Matcher<'_> {
    /// Calls `emit` for every solution of `body`, evaluated in `plan` order.
    /// With `delta = Some((i, d))`, literal `i` only matches facts in `d`.
    pub fn solve(
        &self,
        body: &[Literal],
        plan: &[usize],
        delta: Option<(usize, &Db)>,
        emit: &mut Emit<'_>,
    ) -> Result<(), EngineError> {
        let mut premises = vec![None; body.len()];
        self.step(
            body,
            plan,
            0,
            delta,
            &Substitution::new(),
            &mut premises,
            emit,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn step(
        &self,
        body: &[Literal],
        plan: &[usize],
        k: usize,
        delta: Option<(usize, &Db)>,
        s: &Substitution,
        premises: &mut Vec<Option<Premise>>,
        emit: &mut Emit<'_>,
    ) -> Result<(), EngineError> {
        let Some(&i) = plan.get(k) else {
            return emit(s, premises);
        };
        let lit = &body[i];
        match lit.kind() {
            LiteralKind::Equality { lhs, rhs } => {
                let mut s2 = s.clone();
                if !unify_with(lhs, rhs, &mut s2) {
                    return Ok(());
                }
                let l = lhs.apply(&s2);
                if !l.is_ground() {
                    return Err(EngineError::NonGround(lit.apply(&s2).to_string()));
                }
                if self.store.lookup(&l).is_none() {
                    return Ok(());
                }
                premises[i] = Some(Premise::Equality {
                    lhs: l,
                    rhs: rhs.apply(&s2),
                });
                self.step(body, plan, k + 1, delta, &s2, premises, emit)
            }
            LiteralKind::Holds { atom, situation } | LiteralKind::Occurs { atom, situation }
                if lit.is_negated() =>
            {
                let atom = atom.apply(s);
                let sit = situation.apply(s);
                if !atom.is_ground() || !sit.is_ground() {
                    return Err(EngineError::NonGround(lit.apply(s).to_string()));
                }
                let present = match self.store.lookup(&sit) {
                    Some(id) => self.db.contains(&Fact {
                        modality: lit.modality().expect("modal literal"),
                        atom,
                        situation: id.clone(),
                    }),
                    None => false,
                };
                if present {
                    return Ok(());
                }
                premises[i] = Some(Premise::Absent(lit.apply(s)));
                self.step(body, plan, k + 1, delta, s, premises, emit)
            }
            LiteralKind::Holds { atom, situation } | LiteralKind::Occurs { atom, situation } => {
                let modality = lit.modality().expect("modal literal");
                let source = match delta {
                    Some((d, facts)) if d == i => facts,
                    _ => self.db,
                };
                let sit = situation.apply(s);
                let sit_id = if sit.is_ground() {
                    match self.store.lookup(&sit) {
                        Some(id) => Some(id),
                        None => return Ok(()),
                    }
                } else {
                    None
                };
                for f in source.candidates(modality, &atom.predicate, sit_id) {
                    let mut s2 = s.clone();
                    let term = self
                        .store
                        .term_of(&f.situation)
                        .expect("facts live in known situations");
                    if unify_atoms_with(atom, &f.atom, &mut s2) && unify_with(&sit, term, &mut s2) {
                        premises[i] = Some(Premise::Fact(f.clone()));
                        self.step(body, plan, k + 1, delta, &s2, premises, emit)?;
                    }
                }
                premises[i] = None;
                Ok(())
            }
        }
    }
}

/// Fails if a Skolemized rule would wrap one Skolem term in another.
pub(crate) fn check_skolem_nesting(
    rule: &CompiledRule,
    s: &Substitution,
) -> Result<(), EngineError> {
    if !rule.skolemized {
        return Ok(());
    }
    for u in &rule.universals {
        if let Some(v) = s.get(u) {
            if contains_skolem(v) {
                return Err(EngineError::NestedSkolem {
                    axiom: rule.name.clone(),
                    term: v.to_string(),
                });
            }
        }
    }
    Ok(())
}

pub(crate) fn contains_skolem(t: &Term) -> bool {
    let mut found = false;
    t.for_each_subterm(&mut |x| {
        if let Term::Compound(f, _) | Term::Constant(f) = x {
            found |= f.starts_with(SKOLEM_PREFIX);
        }
    });
    found
}

/// The clips check guarding inheritance of `pred` across `action`.
pub(crate) fn clips_atom(action: &Atom, pred: &str) -> Atom {
    Atom::new(CLIPS, vec![action.to_term(), Term::constant(pred)])
}

struct Saturator<'a> {
    program: &'a Program,
    store: &'a FactStore,
    sat: Saturation,
    pending: Vec<(Fact, Justification)>,
}

impl Saturator<'_> {
    fn fire(
        &mut self,
        rule: &CompiledRule,
        delta: Option<(usize, &Db)>,
    ) -> Result<(), EngineError> {
        let store = self.store;
        let matcher = Matcher {
            store,
            db: &self.sat.all,
        };
        let pending = &mut self.pending;
        let all = &self.sat.all;
        matcher.solve(&rule.body, &rule.plan, delta, &mut |s, premises| {
            check_skolem_nesting(rule, s)?;
            let head = rule.head.apply(s);
            if !head.is_ground() {
                return Err(EngineError::NonGround(head.to_string()));
            }
            let Some(sit) = store.lookup(head.situation().expect("holds head")) else {
                return Ok(());
            };
            let fact = Fact::holds(head.atom().expect("holds head").clone(), sit);
            if !all.contains(&fact) {
                pending.push((
                    fact,
                    Justification::Rule {
                        rule: rule.name.clone(),
                        substitution: s.restrict(&rule.universals),
                        premises: premises.iter().cloned().map(Option::unwrap).collect(),
                    },
                ));
            }
            Ok(())
        })
    }

    /// Frame inheritance to child situations and rigid copying.
    fn propagate(&mut self, f: &Fact) {
        if f.modality != Modality::Holds {
            return;
        }
        let pred = f.predicate();
        match self.program.kind_of(pred) {
            Some(PredicateKind::Fluent) if pred != CLIPS => {
                let parent_term = self.store.term_of(&f.situation).expect("known situation");
                for child in self.store.children(&f.situation) {
                    let action = self
                        .store
                        .situation(child)
                        .and_then(|c| c.action())
                        .expect("children are successors");
                    let clips = clips_atom(action, pred);
                    if self
                        .sat
                        .all
                        .contains(&Fact::holds(clips.clone(), &f.situation))
                    {
                        continue;
                    }
                    let inherited = Fact::holds(f.atom.clone(), child);
                    if !self.sat.all.contains(&inherited) {
                        self.pending.push((
                            inherited,
                            Justification::Frame {
                                from: f.clone(),
                                clips: Literal::not_holds(clips, parent_term.clone()),
                            },
                        ));
                    }
                }
            }
            Some(PredicateKind::Rigid) => {
                for sit in self.store.situations() {
                    let copy = Fact::holds(f.atom.clone(), sit.id());
                    if !self.sat.all.contains(&copy) {
                        self.pending
                            .push((copy, Justification::Rigid { from: f.clone() }));
                    }
                }
            }
            _ => {}
        }
    }

    /// Moves pending facts into the model; returns the new ones.
    fn commit(&mut self) -> Db {
        let mut delta = Db::default();
        for (f, j) in std::mem::take(&mut self.pending) {
            if !self.sat.all.contains(&f) {
                delta.insert(f.clone());
                self.sat.record(f, j);
            }
        }
        delta
    }
}

/// Stratified semi-naive saturation of every situation in the store.
pub(crate) fn saturate_store(
    program: &Program,
    store: &FactStore,
    fingerprint: u64,
) -> Result<Saturation, EngineError> {
    let mut sat = Saturation {
        fingerprint,
        ..Saturation::default()
    };
    for f in store.all_base_facts() {
        sat.all.insert(f.clone());
    }
    let mut run = Saturator {
        program,
        store,
        sat,
        pending: Vec::new(),
    };
    for stratum in 0..program.strata {
        let rules: Vec<&CompiledRule> = program.rules_in(stratum).collect();
        for rule in &rules {
            run.fire(rule, None)?;
        }
        let seeds: Vec<Fact> = run
            .sat
            .all
            .iter()
            .filter(|f| program.stratum_of(f.predicate()) == stratum)
            .cloned()
            .collect();
        for f in &seeds {
            run.propagate(f);
        }
        loop {
            let delta = run.commit();
            if delta.is_empty() {
                break;
            }
            for rule in &rules {
                for (i, lit) in rule.body.iter().enumerate() {
                    if !lit.is_positive_modal() {
                        continue;
                    }
                    let m = lit.modality().expect("modal literal");
                    let pred = &lit.atom().expect("modal literal").predicate;
                    if delta.has_predicate(m, pred) {
                        run.fire(rule, Some((i, &delta)))?;
                    }
                }
            }
            for f in delta.iter() {
                run.propagate(f);
            }
        }
    }
    Ok(run.sat)
}
