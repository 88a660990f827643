use thiserror::Error;

use super::ontology::PredicateKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("occurs check: {var} cannot be bound to {term}")]
    OccursCheck { var: String, term: String },
    #[error("variable {var} is already bound to {existing}")]
    ConflictingBinding { var: String, existing: String },
    #[error("only holds literals can be negated: {0}")]
    NegatedNonHolds(String),
    #[error("successor situations require a ground action, got {0}")]
    NonGroundAction(String),
    #[error("not a situation term: {0}")]
    NotASituation(String),
    #[error("invalid base situation name `{0}`")]
    InvalidSituationName(String),
    #[error("axiom {0} has an empty body")]
    EmptyBody(String),
    #[error("axiom {axiom}: head must be a positive holds literal")]
    InvalidHead { axiom: String },
    #[error("axiom {axiom}: head situation must be a variable or a base situation name")]
    SuccessorInHead { axiom: String },
    #[error("axiom {axiom}: existential variable {var} appears in the body")]
    ExistentialInBody { axiom: String, var: String },
    #[error("axiom {axiom}: variable {var} is quantified twice")]
    DuplicateQuantifier { axiom: String, var: String },
    #[error("{context}: variable {var} is not quantified")]
    UnquantifiedVariable { context: String, var: String },
    #[error("{context}: variable {var} is not range-restricted (it must appear in a positive holds/occurs literal)")]
    NotRangeRestricted { context: String, var: String },
    #[error("undeclared predicate {name}/{arity}")]
    UndeclaredPredicate { name: String, arity: usize },
    #[error("predicate {name} declared with arity {declared}, used with arity {found}")]
    ArityMismatch {
        name: String,
        declared: usize,
        found: usize,
    },
    #[error("predicate {name} declared with two kinds ({first} and {second})")]
    KindConflict {
        name: String,
        first: PredicateKind,
        second: PredicateKind,
    },
    #[error("predicate {name} is declared {kind} and cannot appear inside {context}")]
    KindMismatch {
        name: String,
        kind: PredicateKind,
        context: &'static str,
    },
    #[error("`{0}` is a reserved name")]
    ReservedName(String),
    #[error("duplicate axiom name {0}")]
    DuplicateAxiom(String),
    #[error("duplicate query name {0}")]
    DuplicateQuery(String),
    #[error("fact must be ground: {0}")]
    NonGroundFact(String),
    #[error("facts must be positive holds/occurs literals: {0}")]
    InvalidFact(String),
}
