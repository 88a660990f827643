//! The populated model: ground facts per situation, the situation forest and
//! tabular ingestion.

mod ingest;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

pub use ingest::{normalize_cell, parse_mapping_file, IngestionMapping, Table};

use crate::engine::Saturation;
use crate::kernel::{
    canonical_situation_id, split_do, Atom, Fact, KernelError, Literal, Modality, Ontology,
    Signature, Situation, SituationId, Term,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StoreError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("unknown situation `{0}`")]
    UnknownSituation(SituationId),
    #[error("situation id `{id}` already names {existing}, cannot reuse it for {new}")]
    IdCollision {
        id: SituationId,
        existing: String,
        new: String,
    },
    #[error("table `{table}` has no column `{column}`")]
    MissingColumn { table: String, column: String },
    #[error("mapping for {predicate} lists {found} columns but the predicate has arity {arity}")]
    MappingArity {
        predicate: String,
        arity: usize,
        found: usize,
    },
    #[error("table `{table}` row {row}, column `{column}`: `{value}` is not a valid instance")]
    InvalidCell {
        table: String,
        row: usize,
        column: String,
        value: String,
    },
    #[error("table `{table}` row {row}: unknown situation `{value}`")]
    UnknownRowSituation {
        table: String,
        row: usize,
        value: String,
    },
    #[error("invalid mapping line `{0}` (expected table:predicate:col1,col2[:sitcol])")]
    InvalidMapping(String),
    #[error("csv: {0}")]
    Csv(String),
}

/// Ground facts partitioned by situation, plus the derived facts of the last
/// saturation. Every mutation drops the derived facts.
#[derive(Debug, Clone)]
pub struct FactStore {
    signature: Signature,
    situations: BTreeMap<SituationId, Situation>,
    children: BTreeMap<SituationId, BTreeSet<SituationId>>,
    by_term: BTreeMap<Term, SituationId>,
    base: BTreeMap<SituationId, BTreeSet<Fact>>,
    derived: Option<Arc<Saturation>>,
}

impl PartialEq for FactStore {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature
            && self.situations == other.situations
            && self.base == other.base
    }
}

impl FactStore {
    pub fn new(signature: Signature) -> Self {
        FactStore {
            signature,
            situations: BTreeMap::new(),
            children: BTreeMap::new(),
            by_term: BTreeMap::new(),
            base: BTreeMap::new(),
            derived: None,
        }
    }

    /// An empty store over the ontology's terminology.
    pub fn for_ontology(ontology: &Ontology) -> Self {
        Self::new(ontology.signature().clone())
    }

    /// A store over the ontology's terminology, populated with its facts.
    pub fn from_ontology(ontology: &Ontology) -> Result<Self, StoreError> {
        let mut store = Self::for_ontology(ontology);
        store.load_facts(ontology.facts())?;
        Ok(store)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Adds a base situation; existing ones are returned unchanged.
    pub fn add_base_situation(&mut self, name: &str) -> Result<SituationId, StoreError> {
        let sit = Situation::base(name)?;
        let id = sit.id().clone();
        if !self.situations.contains_key(&id) {
            self.insert_situation(sit)?;
        }
        Ok(id)
    }

    fn insert_situation(&mut self, sit: Situation) -> Result<(), StoreError> {
        let id = sit.id().clone();
        if let Some(existing) = self.situations.get(&id) {
            if existing != &sit {
                return Err(StoreError::IdCollision {
                    id,
                    existing: existing.term().to_string(),
                    new: sit.term().to_string(),
                });
            }
            return Ok(());
        }
        if let Some(parent) = sit.parent() {
            self.children
                .entry(parent.clone())
                .or_default()
                .insert(id.clone());
        }
        self.by_term.insert(sit.term().clone(), id.clone());
        self.base.entry(id.clone()).or_default();
        self.situations.insert(id, sit);
        self.derived = None;
        Ok(())
    }

    /// Creates (or returns) `do(action, parent)` and records
    /// `occurs(action, parent)` in the parent.
    pub fn successor(
        &mut self,
        action: Atom,
        parent: &SituationId,
    ) -> Result<SituationId, StoreError> {
        self.signature.check_action(&action)?;
        let parent_sit = self
            .situations
            .get(parent)
            .ok_or_else(|| StoreError::UnknownSituation(parent.clone()))?;
        let sit = Situation::successor(action.clone(), parent_sit)?;
        let id = sit.id().clone();
        self.insert_situation(sit)?;
        if self
            .base
            .entry(parent.clone())
            .or_default()
            .insert(Fact::occurs(action, parent))
        {
            self.derived = None;
        }
        Ok(id)
    }

    /// Resolves a ground situation term, creating base situations and
    /// successors along the way.
    pub fn ensure_situation(&mut self, term: &Term) -> Result<SituationId, StoreError> {
        if let Some(id) = self.by_term.get(term) {
            return Ok(id.clone());
        }
        match term {
            Term::Constant(name) => self.add_base_situation(name),
            _ => {
                let (action, parent) =
                    split_do(term).ok_or_else(|| KernelError::NotASituation(term.to_string()))?;
                let action = Atom::from_term(action)
                    .ok_or_else(|| KernelError::NotASituation(term.to_string()))?;
                if !action.is_ground() {
                    return Err(KernelError::NonGroundAction(action.to_string()).into());
                }
                let parent = self.ensure_situation(parent)?;
                self.successor(action, &parent)
            }
        }
    }

    /// Adds a ground fact to an existing situation. Returns `false` if it was
    /// already present. Asserting `occurs(a, s)` also creates `do(a, s)`.
    pub fn assert_fact(&mut self, fact: Fact) -> Result<bool, StoreError> {
        let sit = self
            .situations
            .get(&fact.situation)
            .ok_or_else(|| StoreError::UnknownSituation(fact.situation.clone()))?;
        let lit = fact.to_literal(sit.term().clone());
        if !lit.is_ground() {
            return Err(KernelError::NonGroundFact(lit.to_string()).into());
        }
        self.signature.check_literal(&lit)?;
        if fact.modality == Modality::Occurs {
            let before = self.base_count();
            self.successor(fact.atom, &fact.situation.clone())?;
            return Ok(self.base_count() > before);
        }
        let inserted = self
            .base
            .entry(fact.situation.clone())
            .or_default()
            .insert(fact);
        if inserted {
            self.derived = None;
        }
        Ok(inserted)
    }

    /// Asserts a ground literal whose situation term is resolved (and created
    /// if needed) in the store.
    pub fn assert_literal(&mut self, lit: &Literal) -> Result<bool, StoreError> {
        let (modality, atom, situation) = match (lit.modality(), lit.atom(), lit.situation()) {
            (Some(m), Some(a), Some(s)) if !lit.is_negated() => (m, a, s),
            _ => return Err(KernelError::InvalidFact(lit.to_string()).into()),
        };
        if !lit.is_ground() {
            return Err(KernelError::NonGroundFact(lit.to_string()).into());
        }
        self.signature.check_literal(lit)?;
        let sit = self.ensure_situation(situation)?;
        self.assert_fact(Fact {
            modality,
            atom: atom.clone(),
            situation: sit,
        })
    }

    pub fn load_facts<'a>(
        &mut self,
        facts: impl IntoIterator<Item = &'a Literal>,
    ) -> Result<usize, StoreError> {
        let mut n = 0;
        for f in facts {
            if self.assert_literal(f)? {
                n += 1;
            }
        }
        Ok(n)
    }

    /// Base facts plus derived facts of the cached saturation, if any.
    pub fn facts_in(&self, sit: &SituationId) -> Result<BTreeSet<Fact>, StoreError> {
        let mut out = self.base_facts(sit)?.clone();
        if let Some(sat) = &self.derived {
            out.extend(sat.derived_in(sit));
        }
        Ok(out)
    }

    pub fn base_facts(&self, sit: &SituationId) -> Result<&BTreeSet<Fact>, StoreError> {
        self.base
            .get(sit)
            .ok_or_else(|| StoreError::UnknownSituation(sit.clone()))
    }

    pub fn is_base_fact(&self, fact: &Fact) -> bool {
        self.base
            .get(&fact.situation)
            .is_some_and(|s| s.contains(fact))
    }

    /// Every base fact across all situations, in situation order.
    pub fn all_base_facts(&self) -> impl Iterator<Item = &Fact> {
        self.base.values().flatten()
    }

    pub fn base_count(&self) -> usize {
        self.base.values().map(BTreeSet::len).sum()
    }

    pub fn situations(&self) -> impl Iterator<Item = &Situation> {
        self.situations.values()
    }

    pub fn situation(&self, id: &SituationId) -> Option<&Situation> {
        self.situations.get(id)
    }

    pub fn contains_situation(&self, id: &SituationId) -> bool {
        self.situations.contains_key(id)
    }

    pub fn situation_count(&self) -> usize {
        self.situations.len()
    }

    pub fn children(&self, id: &SituationId) -> impl Iterator<Item = &SituationId> {
        self.children.get(id).into_iter().flatten()
    }

    /// The id of a ground situation term, if that situation exists.
    pub fn lookup(&self, term: &Term) -> Option<&SituationId> {
        self.by_term.get(term)
    }

    /// The id of a situation term that must exist.
    pub fn resolve(&self, term: &Term) -> Result<SituationId, StoreError> {
        let id = canonical_situation_id(term)?;
        match self.by_term.get(term) {
            Some(found) => Ok(found.clone()),
            None => Err(StoreError::UnknownSituation(id)),
        }
    }

    pub fn term_of(&self, id: &SituationId) -> Option<&Term> {
        self.situations.get(id).map(Situation::term)
    }

    /// True when `descendant` is reachable from `ancestor` through `do`
    /// links (or is the same situation).
    pub fn is_descendant(&self, descendant: &SituationId, ancestor: &SituationId) -> bool {
        let mut cur = Some(descendant);
        while let Some(id) = cur {
            if id == ancestor {
                return true;
            }
            cur = self.situations.get(id).and_then(Situation::parent);
        }
        false
    }

    pub fn ingest_table(
        &mut self,
        table: &Table,
        mapping: &IngestionMapping,
    ) -> Result<usize, StoreError> {
        ingest::ingest_table(self, table, mapping)
    }

    /// The cached saturation, if it is still valid.
    pub fn cached_saturation(&self) -> Option<&Arc<Saturation>> {
        self.derived.as_ref()
    }

    pub(crate) fn install_saturation(&mut self, sat: Arc<Saturation>) {
        self.derived = Some(sat);
    }

    /// Drops derived facts; they are recomputed on the next saturation.
    pub fn invalidate(&mut self) {
        self.derived = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Declaration, PredicateKind};

    fn sig() -> Signature {
        let mut s = Signature::new();
        for (n, a, k) in [
            ("auditor", 1, PredicateKind::Fluent),
            ("has_auditor_orientation", 2, PredicateKind::Fluent),
            ("enforces_preferred_treatment", 2, PredicateKind::Fluent),
            ("audits", 2, PredicateKind::Action),
        ] {
            s.declare(Declaration::new(n, a, k)).unwrap();
        }
        s
    }

    fn c(s: &str) -> Term {
        Term::constant(s)
    }

    fn orientation() -> Atom {
        Atom::new(
            "has_auditor_orientation",
            vec![c("john_jones"), c("principles_oriented")],
        )
    }

    #[test]
    fn assert_and_read_back() {
        let mut store = FactStore::new(sig());
        let s0 = store.add_base_situation("sigma0").unwrap();
        assert!(store.facts_in(&s0).unwrap().is_empty());
        let fact = Fact::holds(orientation(), s0.clone());
        assert!(store.assert_fact(fact.clone()).unwrap());
        let once = store.clone();
        assert!(!store.assert_fact(fact.clone()).unwrap());
        assert_eq!(store, once);
        assert_eq!(store.facts_in(&s0).unwrap(), BTreeSet::from([fact.clone()]));
    }

    #[test]
    fn assert_errors() {
        let mut store = FactStore::new(sig());
        let s0 = store.add_base_situation("sigma0").unwrap();
        let unknown = Fact::holds(orientation(), "nowhere");
        assert!(matches!(
            store.assert_fact(unknown),
            Err(StoreError::UnknownSituation(_))
        ));
        let non_ground = Fact::holds(Atom::new("auditor", vec![Term::variable("X")]), s0.clone());
        assert!(store.assert_fact(non_ground).is_err());
        let undeclared = Fact::holds(Atom::new("client", vec![c("a")]), s0.clone());
        assert!(store.assert_fact(undeclared).is_err());

        // `auditor` declared as an action cannot appear inside holds.
        let mut s = Signature::new();
        s.declare(Declaration::new("auditor", 1, PredicateKind::Action))
            .unwrap();
        let mut store = FactStore::new(s);
        let s0 = store.add_base_situation("sigma0").unwrap();
        let err = store
            .assert_fact(Fact::holds(Atom::new("auditor", vec![c("ifrs")]), s0))
            .unwrap_err();
        assert!(matches!(
            err,
            StoreError::Kernel(KernelError::KindMismatch { .. })
        ));
    }

    #[test]
    fn successor_creates_situation_and_occurs_fact() {
        let mut store = FactStore::new(sig());
        let s0 = store.add_base_situation("sigma0").unwrap();
        let audits = Atom::new("audits", vec![c("john_jones"), c("acme")]);
        let s1 = store.successor(audits.clone(), &s0).unwrap();
        assert_eq!(s1.as_str(), "do__audits_john_jones_acme__sigma0");
        assert!(store
            .facts_in(&s0)
            .unwrap()
            .contains(&Fact::occurs(audits.clone(), s0.clone())));
        let again = store.successor(audits, &s0).unwrap();
        assert_eq!(again, s1);
        assert_eq!(store.situation_count(), 2);
        assert!(store.is_descendant(&s1, &s0));
        assert!(!store.is_descendant(&s0, &s1));

        let fluent = Atom::new("auditor", vec![c("x")]);
        assert!(store.successor(fluent, &s0).is_err());
        let open = Atom::new("audits", vec![Term::variable("A"), c("acme")]);
        assert!(store.successor(open, &s0).is_err());
        let ghost = Atom::new("audits", vec![c("a"), c("b")]);
        assert!(matches!(
            store.successor(ghost, &SituationId::from("ghost")),
            Err(StoreError::UnknownSituation(_))
        ));
    }

    #[test]
    fn occurs_fact_implies_successor() {
        let mut store = FactStore::new(sig());
        let s0 = store.add_base_situation("sc").unwrap();
        let audits = Atom::new("audits", vec![c("a"), c("b")]);
        store
            .assert_fact(Fact::occurs(audits.clone(), s0.clone()))
            .unwrap();
        assert_eq!(store.situation_count(), 2);
        assert_eq!(store.children(&s0).count(), 1);
    }

    #[test]
    fn id_collisions_are_detected() {
        let mut s = sig();
        s.declare(Declaration::new("act", 2, PredicateKind::Action))
            .unwrap();
        let mut store = FactStore::new(s);
        let s0 = store.add_base_situation("s0").unwrap();
        store
            .successor(Atom::new("act", vec![c("a_b"), c("c")]), &s0)
            .unwrap();
        let err = store
            .successor(Atom::new("act", vec![c("a"), c("b_c")]), &s0)
            .unwrap_err();
        assert!(matches!(err, StoreError::IdCollision { .. }));
    }

    #[test]
    fn sibling_situations_are_isolated() {
        let mut store = FactStore::new(sig());
        let s1 = store.add_base_situation("sigma1").unwrap();
        let s2 = store.add_base_situation("sigma2").unwrap();
        let enforces = Atom::new(
            "enforces_preferred_treatment",
            vec![c("john_jones"), c("nonopportunistic")],
        );
        store
            .assert_fact(Fact::holds(enforces.clone(), s1.clone()))
            .unwrap();
        assert!(store
            .facts_in(&s1)
            .unwrap()
            .contains(&Fact::holds(enforces.clone(), s1.clone())));
        assert!(store.facts_in(&s2).unwrap().is_empty());
    }

    #[test]
    fn literal_assertion_builds_situations() {
        let mut store = FactStore::new(sig());
        let lit = Literal::holds(
            Atom::new("auditor", vec![c("a")]),
            crate::kernel::do_term(&Atom::new("audits", vec![c("a"), c("b")]), c("sc")),
        );
        assert!(store.assert_literal(&lit).unwrap());
        assert_eq!(store.situation_count(), 2);
        let id = store.resolve(lit.situation().unwrap()).unwrap();
        assert_eq!(id.as_str(), "do__audits_a_b__sc");
        assert_eq!(store.base_count(), 2);
    }
}
