use std::borrow::Borrow;
use std::fmt;

use super::error::KernelError;
use super::literal::Atom;
use super::term::{is_constant_symbol, Term};

/// Functor of successor situation terms: `do(action, parent)`.
pub const DO: &str = "do";

/// Canonical, human-readable situation identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SituationId(String);

impl SituationId {
    pub fn new(id: impl Into<String>) -> Self {
        SituationId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SituationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SituationId {
    fn from(s: &str) -> Self {
        SituationId(s.to_string())
    }
}

impl Borrow<str> for SituationId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Base(String),
    Do { action: Atom, parent: SituationId },
}

/// A situational context: a named base situation or the result of
/// performing a ground action in a parent situation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Situation {
    id: SituationId,
    origin: Origin,
    term: Term,
}

impl Situation {
    pub fn base(name: &str) -> Result<Self, KernelError> {
        if !is_constant_symbol(name) || name == DO || name.starts_with("do__") {
            return Err(KernelError::InvalidSituationName(name.to_string()));
        }
        Ok(Situation {
            id: SituationId::new(name),
            origin: Origin::Base(name.to_string()),
            term: Term::constant(name),
        })
    }

    pub fn successor(action: Atom, parent: &Situation) -> Result<Self, KernelError> {
        if !action.is_ground() {
            return Err(KernelError::NonGroundAction(action.to_string()));
        }
        let term = do_term(&action, parent.term.clone());
        let id = successor_id(&action, &parent.id);
        Ok(Situation {
            id,
            origin: Origin::Do {
                action,
                parent: parent.id.clone(),
            },
            term,
        })
    }

    pub fn id(&self) -> &SituationId {
        &self.id
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    /// The situation as a ground term: `sc` or `do(audits(a, c), sc)`.
    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn parent(&self) -> Option<&SituationId> {
        match &self.origin {
            Origin::Base(_) => None,
            Origin::Do { parent, .. } => Some(parent),
        }
    }

    pub fn action(&self) -> Option<&Atom> {
        match &self.origin {
            Origin::Base(_) => None,
            Origin::Do { action, .. } => Some(action),
        }
    }
}

pub fn do_term(action: &Atom, parent: Term) -> Term {
    Term::compound(DO, vec![action.to_term(), parent])
}

/// Splits `do(action, parent)` into its parts.
pub fn split_do(term: &Term) -> Option<(&Term, &Term)> {
    match term {
        Term::Compound(f, args) if f == DO && args.len() == 2 => Some((&args[0], &args[1])),
        _ => None,
    }
}

/// True for terms of the shape `Var | name | do(action, sit)`.
pub fn is_situation_term(term: &Term) -> bool {
    match term {
        Term::Variable(_) => true,
        Term::Constant(c) => c != DO,
        Term::Compound(..) => match split_do(term) {
            Some((action, parent)) => !action.is_variable() && is_situation_term(parent),
            None => false,
        },
    }
}

/// Canonical id of a ground situation term: a base name stays as is,
/// `do(audits(john_jones, acme), sigma0)` becomes
/// `do__audits_john_jones_acme__sigma0`.
pub fn canonical_situation_id(term: &Term) -> Result<SituationId, KernelError> {
    match term {
        Term::Constant(name) if name != DO => Ok(SituationId::new(name.clone())),
        Term::Variable(_) => Err(KernelError::NonGroundAction(term.to_string())),
        _ => {
            let (action, parent) =
                split_do(term).ok_or_else(|| KernelError::NotASituation(term.to_string()))?;
            if !action.is_ground() {
                return Err(KernelError::NonGroundAction(action.to_string()));
            }
            let action = Atom::from_term(action)
                .ok_or_else(|| KernelError::NotASituation(term.to_string()))?;
            let parent = canonical_situation_id(parent)?;
            Ok(successor_id(&action, &parent))
        }
    }
}

fn successor_id(action: &Atom, parent: &SituationId) -> SituationId {
    let mut out = String::from("do__");
    out.push_str(&action.predicate);
    for a in &action.args {
        out.push('_');
        flatten(a, &mut out);
    }
    out.push_str("__");
    out.push_str(parent.as_str());
    SituationId(out)
}

fn flatten(t: &Term, out: &mut String) {
    match t {
        Term::Constant(c) | Term::Variable(c) => out.push_str(c),
        Term::Compound(f, args) => {
            out.push_str(f);
            for a in args {
                out.push('_');
                flatten(a, out);
            }
        }
    }
}
