//! Core domain types: terms, atoms, literals, axioms, situations,
//! ontologies and substitutions.
//!
//! All values here are plain owned data: immutable once built and `Send + Sync`.

mod axiom;
mod error;
mod fact;
mod literal;
mod ontology;
mod situation;
mod subst;
mod term;

pub use axiom::{check_query_range_restricted, variables_of, Axiom};
pub use error::KernelError;
pub use fact::Fact;
pub use literal::{Atom, Literal, LiteralKind, Modality};
pub use ontology::{
    Declaration, Expectation, NamedQuery, Ontology, PredicateKind, Signature, CLIPS,
};
pub use situation::{
    canonical_situation_id, do_term, is_situation_term, split_do, Origin, Situation, SituationId,
    DO,
};
pub use subst::{unify, unify_atoms, unify_atoms_with, unify_with, Apply, Substitution};
pub use term::{is_constant_symbol, is_skolem_symbol, is_variable_name, Term, SKOLEM_PREFIX};
