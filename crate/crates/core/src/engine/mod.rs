//! Inference over a populated store: Skolemization, stratification, the
//! built-in frame rule, semi-naive saturation, queries and proofs.
//!
//! Saturation covers the whole situation forest at once; per-situation
//! results are slices of it. A saturation is cached in the store and dropped
//! when the store changes.

mod compile;
mod eval;
mod naive;
mod proof;
mod query;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

pub use compile::{skolemize, stratify, CompiledRule, Program};
pub use eval::{Justification, Premise, Saturation};
pub use proof::{ProofJson, ProofNode, BASE_FACT, EQUALITY, FRAME, NEGATION, RIGID};
pub use query::{Answer, AnswerJson, AnswersJson, CompetencyReport, QuestionResult};

use crate::kernel::{Fact, KernelError, Literal, Ontology, SituationId};
use crate::store::{FactStore, StoreError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("negative cycle: {}", .0.join(", "))]
    NegativeCycle(Vec<String>),
    #[error("unknown situation `{0}`")]
    UnknownSituation(SituationId),
    #[error("axiom {axiom}: a Skolem term would be nested inside another ({term})")]
    NestedSkolem { axiom: String, term: String },
    #[error("axiom {axiom}: head term `{term}` does not occur in a positive body literal")]
    UnboundedHeadTerm { axiom: String, term: String },
    #[error("`{0}` is not ground")]
    NonGround(String),
}

/// Compiled rules of one ontology.
#[derive(Debug, Clone)]
pub struct Engine {
    program: Program,
    fingerprint: u64,
}

impl Engine {
    pub fn new(ontology: &Ontology) -> Result<Self, EngineError> {
        Ok(Engine {
            program: Program::compile(ontology)?,
            fingerprint: ontology.rules_fingerprint(),
        })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    /// Computes the saturation of `store` without caching it.
    pub fn compute(&self, store: &FactStore) -> Result<Saturation, EngineError> {
        eval::saturate_store(&self.program, store, self.fingerprint)
    }

    /// Saturates `store`, reusing its cached result when still valid.
    pub fn saturate(&self, store: &mut FactStore) -> Result<Arc<Saturation>, EngineError> {
        if let Some(sat) = self.cached(store) {
            return Ok(sat);
        }
        let sat = Arc::new(self.compute(store)?);
        store.install_saturation(sat.clone());
        Ok(sat)
    }

    fn cached(&self, store: &FactStore) -> Option<Arc<Saturation>> {
        store
            .cached_saturation()
            .filter(|s| s.fingerprint() == self.fingerprint)
            .cloned()
    }

    /// A read-only view of base and derived facts. Uses the store's cached
    /// saturation when valid and computes a fresh one otherwise.
    pub fn model<'a>(&'a self, store: &'a FactStore) -> Result<Model<'a>, EngineError> {
        let sat = match self.cached(store) {
            Some(s) => s,
            None => Arc::new(self.compute(store)?),
        };
        Ok(Model {
            engine: self,
            store,
            sat,
        })
    }

    /// Reference evaluation by brute-force grounding; derived facts only.
    pub fn naive(
        &self,
        store: &FactStore,
    ) -> Result<BTreeMap<SituationId, BTreeSet<Fact>>, EngineError> {
        naive::naive_saturate(&self.program, store)
    }
}

/// Base and derived facts of one store under one engine.
#[derive(Debug, Clone)]
pub struct Model<'a> {
    engine: &'a Engine,
    store: &'a FactStore,
    sat: Arc<Saturation>,
}

impl<'a> Model<'a> {
    pub fn store(&self) -> &'a FactStore {
        self.store
    }

    pub fn saturation(&self) -> &Saturation {
        &self.sat
    }

    pub fn holds(&self, fact: &Fact) -> bool {
        self.sat.holds(fact)
    }

    pub fn derived_in(&self, sit: &SituationId) -> Result<BTreeSet<Fact>, EngineError> {
        if !self.store.contains_situation(sit) {
            return Err(EngineError::UnknownSituation(sit.clone()));
        }
        Ok(self.sat.derived_in(sit).collect())
    }

    /// Base and derived facts in `sit`.
    pub fn facts_in(&self, sit: &SituationId) -> Result<BTreeSet<Fact>, EngineError> {
        let mut out = self.store.base_facts(sit)?.clone();
        out.extend(self.sat.derived_in(sit));
        Ok(out)
    }

    fn proof_builder(&self) -> proof::ProofBuilder<'_> {
        proof::ProofBuilder {
            store: self.store,
            sat: &self.sat,
        }
    }

    /// A proof of `fact`, or `None` if it is not derivable.
    pub fn prove(&self, fact: &Fact) -> Option<ProofNode> {
        self.proof_builder().fact(fact)
    }

    /// A proof of a ground `holds`/`occurs` literal.
    pub fn prove_literal(&self, lit: &Literal) -> Result<Option<ProofNode>, EngineError> {
        let fact = self.fact_of(lit)?;
        Ok(fact.and_then(|f| self.prove(&f)))
    }

    fn fact_of(&self, lit: &Literal) -> Result<Option<Fact>, EngineError> {
        if !lit.is_ground() {
            return Err(EngineError::NonGround(lit.to_string()));
        }
        let (Some(modality), Some(atom), Some(sit)) = (lit.modality(), lit.atom(), lit.situation())
        else {
            return Err(KernelError::InvalidFact(lit.to_string()).into());
        };
        if lit.is_negated() {
            return Err(KernelError::InvalidFact(lit.to_string()).into());
        }
        self.engine.program.signature.check_literal(lit)?;
        Ok(self.store.lookup(sit).map(|id| Fact {
            modality,
            atom: atom.clone(),
            situation: id.clone(),
        }))
    }

    /// Re-checks a proof tree step by step against the rules and this model.
    pub fn replay(&self, proof: &ProofNode) -> Result<(), String> {
        proof::Replayer {
            program: &self.engine.program,
            store: self.store,
            sat: &self.sat,
        }
        .replay(proof)
    }
}

/// Saturates the store and returns the facts derived in `sit`.
pub fn saturate(
    store: &mut FactStore,
    ontology: &Ontology,
    sit: &SituationId,
) -> Result<BTreeSet<Fact>, EngineError> {
    if !store.contains_situation(sit) {
        return Err(EngineError::UnknownSituation(sit.clone()));
    }
    let engine = Engine::new(ontology)?;
    let sat = engine.saturate(store)?;
    Ok(sat.derived_in(sit).collect())
}

/// Brute-force counterpart of [`saturate`].
pub fn naive_saturate(
    store: &FactStore,
    ontology: &Ontology,
    sit: &SituationId,
) -> Result<BTreeSet<Fact>, EngineError> {
    if !store.contains_situation(sit) {
        return Err(EngineError::UnknownSituation(sit.clone()));
    }
    let mut all = Engine::new(ontology)?.naive(store)?;
    Ok(all.remove(sit).unwrap_or_default())
}

pub fn query(
    store: &mut FactStore,
    ontology: &Ontology,
    body: &[Literal],
) -> Result<Vec<Answer>, EngineError> {
    let engine = Engine::new(ontology)?;
    engine.saturate(store)?;
    let model = engine.model(store)?;
    model.query(body)
}

/// Proof of a ground literal; `Ok(None)` when it is not derivable.
pub fn prove(
    store: &mut FactStore,
    ontology: &Ontology,
    lit: &Literal,
) -> Result<Option<ProofNode>, EngineError> {
    let engine = Engine::new(ontology)?;
    engine.saturate(store)?;
    let model = engine.model(store)?;
    model.prove_literal(lit)
}

/// Runs the ontology's competency questions against the store.
pub fn check_competency(
    store: &mut FactStore,
    ontology: &Ontology,
) -> Result<CompetencyReport, EngineError> {
    let engine = Engine::new(ontology)?;
    engine.saturate(store)?;
    let model = engine.model(store)?;
    Ok(model.check_competency(ontology.questions()))
}
