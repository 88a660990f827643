use std::collections::BTreeMap;
use std::fmt;

use super::error::KernelError;
use super::literal::{Atom, Literal, LiteralKind};
use super::term::Term;

/// A variable-to-term map kept in solved form: no bound variable occurs in
/// any binding's value, so applying it once is the same as applying it twice.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    bindings: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the idempotent closure of a set of bindings, e.g.
    /// `{X ↦ f(Y), Y ↦ a}` becomes `{X ↦ f(a), Y ↦ a}`.
    pub fn from_bindings<I, V>(pairs: I) -> Result<Self, KernelError>
    where
        I: IntoIterator<Item = (V, Term)>,
        V: Into<String>,
    {
        let mut s = Substitution::new();
        for (var, term) in pairs {
            let var = var.into();
            match s.bindings.get(&var).cloned() {
                Some(existing) => {
                    if !unify_with(&existing, &term, &mut s) {
                        return Err(KernelError::ConflictingBinding {
                            var,
                            existing: existing.to_string(),
                        });
                    }
                }
                None => s.bind(&var, term)?,
            }
        }
        Ok(s)
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.bindings.iter()
    }

    /// Binds an unbound variable, keeping the substitution in solved form.
    pub fn bind(&mut self, var: &str, term: Term) -> Result<(), KernelError> {
        let term = term.apply(self);
        if let Some(existing) = self.bindings.get(var) {
            if *existing == term {
                return Ok(());
            }
            return Err(KernelError::ConflictingBinding {
                var: var.to_string(),
                existing: existing.to_string(),
            });
        }
        if term == Term::Variable(var.to_string()) {
            return Ok(());
        }
        if term.occurs(var) {
            return Err(KernelError::OccursCheck {
                var: var.to_string(),
                term: term.to_string(),
            });
        }
        let single = Substitution {
            bindings: BTreeMap::from([(var.to_string(), term.clone())]),
        };
        for value in self.bindings.values_mut() {
            if value.occurs(var) {
                *value = value.apply(&single);
            }
        }
        self.bindings.insert(var.to_string(), term);
        Ok(())
    }

    /// Keeps only the bindings of `vars`.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a String>) -> Substitution {
        let mut out = Substitution::new();
        for v in vars {
            if let Some(t) = self.bindings.get(v) {
                out.bindings.insert(v.clone(), t.clone());
            }
        }
        out
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

pub trait Apply {
    fn apply(&self, s: &Substitution) -> Self;
}

impl Apply for Term {
    fn apply(&self, s: &Substitution) -> Term {
        match self {
            Term::Variable(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Constant(_) => self.clone(),
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| a.apply(s)).collect())
            }
        }
    }
}

impl Apply for Atom {
    fn apply(&self, s: &Substitution) -> Atom {
        Atom::new(
            self.predicate.clone(),
            self.args.iter().map(|a| a.apply(s)).collect(),
        )
    }
}

impl Apply for Literal {
    fn apply(&self, s: &Substitution) -> Literal {
        let lit = match self.kind() {
            LiteralKind::Holds { atom, situation } => {
                Literal::holds(atom.apply(s), situation.apply(s))
            }
            LiteralKind::Occurs { atom, situation } => {
                Literal::occurs(atom.apply(s), situation.apply(s))
            }
            LiteralKind::Equality { lhs, rhs } => Literal::equality(lhs.apply(s), rhs.apply(s)),
        };
        if self.is_negated() {
            lit.negate().expect("negated literals are holds literals")
        } else {
            lit
        }
    }
}

impl<T: Apply> Apply for Vec<T> {
    fn apply(&self, s: &Substitution) -> Vec<T> {
        self.iter().map(|x| x.apply(s)).collect()
    }
}

/// Most general unifier of two terms, with occurs check.
pub fn unify(a: &Term, b: &Term) -> Option<Substitution> {
    let mut s = Substitution::new();
    unify_with(a, b, &mut s).then_some(s)
}

/// Most general unifier of two atoms (same predicate and arity required).
pub fn unify_atoms(a: &Atom, b: &Atom) -> Option<Substitution> {
    let mut s = Substitution::new();
    unify_atoms_with(a, b, &mut s).then_some(s)
}

pub fn unify_atoms_with(a: &Atom, b: &Atom, s: &mut Substitution) -> bool {
    a.predicate == b.predicate
        && a.args.len() == b.args.len()
        && a.args.iter().zip(&b.args).all(|(x, y)| unify_with(x, y, s))
}

/// Extends `s` so that it also unifies `a` and `b`. On failure `s` may hold
/// partial bindings and should be discarded.
pub fn unify_with(a: &Term, b: &Term, s: &mut Substitution) -> bool {
    let a = resolve(a, s).clone();
    let b = resolve(b, s).clone();
    match (&a, &b) {
        (Term::Variable(x), Term::Variable(y)) if x == y => true,
        (Term::Variable(x), t) | (t, Term::Variable(x)) => s.bind(x, t.clone()).is_ok(),
        (Term::Constant(x), Term::Constant(y)) => x == y,
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify_with(x, y, s))
        }
        _ => false,
    }
}

fn resolve<'a>(t: &'a Term, s: &'a Substitution) -> &'a Term {
    match t {
        Term::Variable(v) => s.get(v).unwrap_or(t),
        _ => t,
    }
}
