use std::fmt;

use super::literal::{Atom, Literal, Modality};
use super::situation::SituationId;
use super::term::Term;

/// A ground, positive `holds`/`occurs` atom located in a situation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub modality: Modality,
    pub atom: Atom,
    pub situation: SituationId,
}

impl Fact {
    pub fn holds(atom: Atom, situation: impl Into<SituationId>) -> Self {
        Fact {
            modality: Modality::Holds,
            atom,
            situation: situation.into(),
        }
    }

    pub fn occurs(atom: Atom, situation: impl Into<SituationId>) -> Self {
        Fact {
            modality: Modality::Occurs,
            atom,
            situation: situation.into(),
        }
    }

    /// The fact as a literal, given the term form of its situation.
    pub fn to_literal(&self, situation_term: Term) -> Literal {
        Literal::modal(self.modality, self.atom.clone(), situation_term)
    }

    pub fn predicate(&self) -> &str {
        &self.atom.predicate
    }
}

impl From<String> for SituationId {
    fn from(s: String) -> Self {
        SituationId::new(s)
    }
}

impl From<&SituationId> for SituationId {
    fn from(s: &SituationId) -> Self {
        s.clone()
    }
}

/// Renders with the situation id in place of its term: `holds(auditor(a), sc)`.
impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({}, {})",
            self.modality.keyword(),
            self.atom,
            self.situation
        )
    }
}
