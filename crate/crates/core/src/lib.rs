//! Situation-calculus ontology engine.
//!
//! Theories are written as quantified axioms over `holds`/`occurs`
//! literals, populated from facts or tables, saturated to a fixpoint and
//! interrogated with competency questions that come back with proof trees.

pub mod dsl;
pub mod engine;
pub mod kernel;
pub mod library;
pub mod store;
