use std::fmt;

use super::error::KernelError;
use super::literal::{Literal, LiteralKind};
use super::situation::split_do;
use super::term::Term;

/// A named, quantified implication:
/// `forall universals: body -> exists head_existentials: head`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Axiom {
    pub name: String,
    pub universals: Vec<String>,
    pub head_existentials: Vec<String>,
    pub body: Vec<Literal>,
    pub head: Literal,
}

impl Axiom {
    pub fn new(
        name: impl Into<String>,
        universals: Vec<String>,
        head_existentials: Vec<String>,
        body: Vec<Literal>,
        head: Literal,
    ) -> Result<Self, KernelError> {
        let axiom = Axiom {
            name: name.into(),
            universals,
            head_existentials,
            body,
            head,
        };
        axiom.validate()?;
        Ok(axiom)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        let name = &self.name;
        if self.body.is_empty() {
            return Err(KernelError::EmptyBody(name.clone()));
        }
        let head_situation = match self.head.kind() {
            LiteralKind::Holds { situation, .. } if !self.head.is_negated() => situation,
            _ => {
                return Err(KernelError::InvalidHead {
                    axiom: name.clone(),
                })
            }
        };
        if split_do(head_situation).is_some() {
            return Err(KernelError::SuccessorInHead {
                axiom: name.clone(),
            });
        }
        let mut seen: Vec<&String> = Vec::new();
        for v in self.universals.iter().chain(&self.head_existentials) {
            if seen.contains(&v) {
                return Err(KernelError::DuplicateQuantifier {
                    axiom: name.clone(),
                    var: v.clone(),
                });
            }
            seen.push(v);
        }
        let context = format!("axiom {name}");
        for lit in &self.body {
            for v in lit.variables() {
                if self.head_existentials.contains(&v) {
                    return Err(KernelError::ExistentialInBody {
                        axiom: name.clone(),
                        var: v,
                    });
                }
                if !self.universals.contains(&v) {
                    return Err(KernelError::UnquantifiedVariable { context, var: v });
                }
            }
        }
        let head_vars = self.head.variables();
        for v in &head_vars {
            if !self.universals.contains(v) && !self.head_existentials.contains(v) {
                return Err(KernelError::UnquantifiedVariable {
                    context,
                    var: v.clone(),
                });
            }
        }
        let mut must_bind: Vec<String> = head_vars
            .into_iter()
            .filter(|v| !self.head_existentials.contains(v))
            .collect();
        for lit in &self.body {
            if !lit.is_positive_modal() {
                lit.collect_variables(&mut must_bind);
            }
        }
        check_bound(&context, &self.body, &must_bind)
    }

    /// Variables bound by the positive `holds`/`occurs` literals of the body.
    pub fn positive_variables(&self) -> Vec<String> {
        positive_variables(&self.body)
    }
}

pub(crate) fn positive_variables(body: &[Literal]) -> Vec<String> {
    let mut out = Vec::new();
    for lit in body.iter().filter(|l| l.is_positive_modal()) {
        lit.collect_variables(&mut out);
    }
    out
}

fn check_bound(context: &str, body: &[Literal], vars: &[String]) -> Result<(), KernelError> {
    let bound = positive_variables(body);
    match vars.iter().find(|v| !bound.contains(v)) {
        Some(v) => Err(KernelError::NotRangeRestricted {
            context: context.to_string(),
            var: v.clone(),
        }),
        None => Ok(()),
    }
}

/// Range restriction for a conjunctive query: every variable of a negated or
/// equality literal is bound by some positive literal.
pub fn check_query_range_restricted(context: &str, body: &[Literal]) -> Result<(), KernelError> {
    let mut must_bind = Vec::new();
    for lit in body.iter().filter(|l| !l.is_positive_modal()) {
        lit.collect_variables(&mut must_bind);
    }
    check_bound(context, body, &must_bind)
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "axiom {}: forall {}:",
            self.name,
            self.universals.join(", ")
        )?;
        for (i, lit) in self.body.iter().enumerate() {
            if i == 0 {
                write!(f, "\n    {lit}")?;
            } else {
                write!(f, "\n    & {lit}")?;
            }
        }
        f.write_str("\n    -> ")?;
        if !self.head_existentials.is_empty() {
            write!(f, "exists {}: ", self.head_existentials.join(", "))?;
        }
        write!(f, "{}.", self.head)
    }
}

/// Collects every variable of a term list in first-occurrence order.
pub fn variables_of(terms: &[Term]) -> Vec<String> {
    let mut out = Vec::new();
    terms.iter().for_each(|t| t.collect_variables(&mut out));
    out
}
