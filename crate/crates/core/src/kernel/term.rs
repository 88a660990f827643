use std::fmt;

/// A first-order term.
///
/// Constants and functors are lowercase symbols (`ifrs`, `john_jones`),
/// variables start with a capital letter (`As`, `S`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Constant(String),
    Variable(String),
    Compound(String, Vec<Term>),
}

impl Term {
    pub fn constant(symbol: impl Into<String>) -> Self {
        Term::Constant(symbol.into())
    }

    pub fn variable(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn compound(functor: impl Into<String>, args: Vec<Term>) -> Self {
        Term::Compound(functor.into(), args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Constant(_) => true,
            Term::Variable(_) => false,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    /// The functor of a compound, or the symbol of a constant.
    pub fn functor(&self) -> Option<&str> {
        match self {
            Term::Constant(c) => Some(c),
            Term::Compound(f, _) => Some(f),
            Term::Variable(_) => None,
        }
    }

    /// True when `var` occurs anywhere inside this term.
    pub fn occurs(&self, var: &str) -> bool {
        match self {
            Term::Variable(v) => v == var,
            Term::Constant(_) => false,
            Term::Compound(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    /// Appends the variables of this term to `out` in first-occurrence order,
    /// skipping ones already present.
    pub fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            Term::Variable(v) => {
                if !out.iter().any(|x| x == v) {
                    out.push(v.clone());
                }
            }
            Term::Constant(_) => {}
            Term::Compound(_, args) => args.iter().for_each(|a| a.collect_variables(out)),
        }
    }

    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    /// Visits this term and every nested subterm, outermost first.
    pub fn for_each_subterm<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        if let Term::Compound(_, args) = self {
            for a in args {
                a.for_each_subterm(f);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Compound(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Constant(c) => f.write_str(c),
            Term::Variable(v) => f.write_str(v),
            Term::Compound(functor, args) => {
                write!(f, "{functor}(")?;
                write_args(f, args)?;
                f.write_str(")")
            }
        }
    }
}

pub(crate) fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

/// `[a-z][a-z0-9_]*`: the lexical form of instances, predicates and functors.
pub fn is_constant_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'))
}

/// `[A-Z][A-Za-z0-9_]*`: the lexical form of variables.
pub fn is_variable_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('A'..='Z')) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Prefix reserved for Skolem functors; user programs may not use it.
pub const SKOLEM_PREFIX: &str = "sk_";

pub fn is_skolem_symbol(s: &str) -> bool {
    s.starts_with(SKOLEM_PREFIX)
}
