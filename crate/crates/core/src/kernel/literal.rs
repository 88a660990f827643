use std::fmt;

use super::error::KernelError;
use super::term::{write_args, Term};

/// A predicate applied to arguments: `accounting_standard(ifrs)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_variables(&self, out: &mut Vec<String>) {
        self.args.iter().for_each(|a| a.collect_variables(out));
    }

    /// The atom viewed as a term (used for actions inside `do(...)`).
    pub fn to_term(&self) -> Term {
        if self.args.is_empty() {
            Term::Constant(self.predicate.clone())
        } else {
            Term::Compound(self.predicate.clone(), self.args.clone())
        }
    }

    pub fn from_term(term: &Term) -> Option<Atom> {
        match term {
            Term::Constant(c) => Some(Atom::new(c.clone(), Vec::new())),
            Term::Compound(f, args) => Some(Atom::new(f.clone(), args.clone())),
            Term::Variable(_) => None,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            write_args(f, &self.args)?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Modality {
    Holds,
    Occurs,
}

impl Modality {
    pub fn keyword(self) -> &'static str {
        match self {
            Modality::Holds => "holds",
            Modality::Occurs => "occurs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LiteralKind {
    Holds { atom: Atom, situation: Term },
    Occurs { atom: Atom, situation: Term },
    Equality { lhs: Term, rhs: Term },
}

/// A signed, modal atomic formula. Only `holds` literals can be negated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    negated: bool,
    kind: LiteralKind,
}

impl Literal {
    pub fn holds(atom: Atom, situation: Term) -> Self {
        Literal {
            negated: false,
            kind: LiteralKind::Holds { atom, situation },
        }
    }

    pub fn occurs(atom: Atom, situation: Term) -> Self {
        Literal {
            negated: false,
            kind: LiteralKind::Occurs { atom, situation },
        }
    }

    pub fn modal(modality: Modality, atom: Atom, situation: Term) -> Self {
        match modality {
            Modality::Holds => Literal::holds(atom, situation),
            Modality::Occurs => Literal::occurs(atom, situation),
        }
    }

    pub fn equality(lhs: Term, rhs: Term) -> Self {
        Literal {
            negated: false,
            kind: LiteralKind::Equality { lhs, rhs },
        }
    }

    pub fn not_holds(atom: Atom, situation: Term) -> Self {
        Literal {
            negated: true,
            kind: LiteralKind::Holds { atom, situation },
        }
    }

    /// Flips the polarity; fails for anything but a `holds` literal.
    pub fn negate(self) -> Result<Self, KernelError> {
        match self.kind {
            LiteralKind::Holds { .. } => Ok(Literal {
                negated: !self.negated,
                kind: self.kind,
            }),
            _ => Err(KernelError::NegatedNonHolds(self.to_string())),
        }
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    pub fn is_positive_modal(&self) -> bool {
        !self.negated && self.modality().is_some()
    }

    pub fn kind(&self) -> &LiteralKind {
        &self.kind
    }

    pub fn into_kind(self) -> LiteralKind {
        self.kind
    }

    pub fn modality(&self) -> Option<Modality> {
        match self.kind {
            LiteralKind::Holds { .. } => Some(Modality::Holds),
            LiteralKind::Occurs { .. } => Some(Modality::Occurs),
            LiteralKind::Equality { .. } => None,
        }
    }

    pub fn atom(&self) -> Option<&Atom> {
        match &self.kind {
            LiteralKind::Holds { atom, .. } | LiteralKind::Occurs { atom, .. } => Some(atom),
            LiteralKind::Equality { .. } => None,
        }
    }

    pub fn situation(&self) -> Option<&Term> {
        match &self.kind {
            LiteralKind::Holds { situation, .. } | LiteralKind::Occurs { situation, .. } => {
                Some(situation)
            }
            LiteralKind::Equality { .. } => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match &self.kind {
            LiteralKind::Holds { atom, situation } | LiteralKind::Occurs { atom, situation } => {
                atom.is_ground() && situation.is_ground()
            }
            LiteralKind::Equality { lhs, rhs } => lhs.is_ground() && rhs.is_ground(),
        }
    }

    pub fn collect_variables(&self, out: &mut Vec<String>) {
        match &self.kind {
            LiteralKind::Holds { atom, situation } | LiteralKind::Occurs { atom, situation } => {
                atom.collect_variables(out);
                situation.collect_variables(out);
            }
            LiteralKind::Equality { lhs, rhs } => {
                lhs.collect_variables(out);
                rhs.collect_variables(out);
            }
        }
    }

    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    /// Variables that sit in a situation position (`S` in `holds(p, S)`,
    /// both sides of an equality, the parent inside `do(a, S)`).
    pub fn collect_situation_variables(&self, out: &mut Vec<String>) {
        fn walk(t: &Term, out: &mut Vec<String>) {
            match t {
                Term::Variable(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                Term::Compound(f, args) if f == "do" && args.len() == 2 => walk(&args[1], out),
                _ => {}
            }
        }
        match &self.kind {
            LiteralKind::Holds { situation, .. } | LiteralKind::Occurs { situation, .. } => {
                walk(situation, out)
            }
            LiteralKind::Equality { lhs, rhs } => {
                walk(lhs, out);
                walk(rhs, out);
            }
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        match &self.kind {
            LiteralKind::Holds { atom, situation } => write!(f, "holds({atom}, {situation})"),
            LiteralKind::Occurs { atom, situation } => write!(f, "occurs({atom}, {situation})"),
            LiteralKind::Equality { lhs, rhs } => write!(f, "{lhs} = {rhs}"),
        }
    }
}
