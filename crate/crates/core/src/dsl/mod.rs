//! Surface language for ontologies (`.onto` files).
//!
//! ```text
//! % Terminology
//! decl accounting_standard/1 kind fluent.
//! decl audits/2 kind action.
//!
//! axiom bridge_standard: forall As, S:
//!     holds(accounting_standard(As), S)
//!     -> holds(deliberate_theory_reference(As), S).
//!
//! fact holds(accounting_standard(ifrs), sigma0).
//! query is_standard expect sat: holds(accounting_standard(ifrs), S).
//! ```
//!
//! Instances, predicates and functors are `[a-z][a-z0-9_]*`; variables are
//! `[A-Z][A-Za-z0-9_]*`; `%` starts a line comment. Successor situations are
//! written `do(action, situation)`.

mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

use crate::kernel::{
    Atom, Axiom, Declaration, KernelError, Literal, Modality, NamedQuery, Ontology,
};
use parser::Parser;

/// 1-based line/column of a token and its length in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
    pub len: usize,
}

impl Span {
    pub fn new(line: usize, column: usize, len: usize) -> Self {
        Span { line, column, len }
    }

    /// True when the 1-based position falls inside this span.
    pub fn covers(&self, line: usize, column: usize) -> bool {
        self.line == line && column >= self.column && column < self.column + self.len.max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("{}: {message}", location(path, span))]
    Syntax {
        path: String,
        span: Span,
        message: String,
        expected: Vec<String>,
    },
    #[error("{}: {error}", location(path, span))]
    Semantic {
        path: String,
        span: Span,
        error: KernelError,
    },
}

fn location(path: &str, span: &Span) -> String {
    if path.is_empty() {
        format!("{}:{}", span.line, span.column)
    } else {
        format!("{path}:{}:{}", span.line, span.column)
    }
}

impl DslError {
    pub fn span(&self) -> Span {
        match self {
            DslError::Syntax { span, .. } | DslError::Semantic { span, .. } => *span,
        }
    }

    /// Tokens the parser would have accepted at the error position.
    pub fn expected(&self) -> &[String] {
        match self {
            DslError::Syntax { expected, .. } => expected,
            DslError::Semantic { .. } => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Decl(Declaration),
    Axiom(Axiom),
    /// A ground `holds`/`occurs` literal; its situation term names the context.
    Fact(Literal),
    Query(NamedQuery),
}

/// A parsed `.onto` file (or several, merged), items in source order.
#[derive(Debug, Clone, Default)]
pub struct SourceProgram {
    pub path: String,
    items: Vec<(Item, Span, String)>,
}

impl PartialEq for SourceProgram {
    /// Structural equality: spans, paths and comments are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.items.len() == other.items.len()
            && self.items().zip(other.items()).all(|(a, b)| a == b)
    }
}

impl SourceProgram {
    pub fn new(path: &str) -> Self {
        SourceProgram {
            path: path.to_string(),
            items: Vec::new(),
        }
    }

    pub fn from_items(items: impl IntoIterator<Item = Item>) -> Self {
        let mut p = SourceProgram::new("");
        for item in items {
            p.push(item, Span::default());
        }
        p
    }

    pub fn push(&mut self, item: Item, span: Span) {
        let path = self.path.clone();
        self.items.push((item, span, path));
    }

    pub fn items(&self) -> impl Iterator<Item = &Item> {
        self.items.iter().map(|(i, _, _)| i)
    }

    pub fn spanned_items(&self) -> impl Iterator<Item = (&Item, Span)> {
        self.items.iter().map(|(i, s, _)| (i, *s))
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Appends another program's items, keeping their original file/span.
    pub fn extend(&mut self, other: SourceProgram) {
        self.items.extend(other.items);
    }

    /// Resolves the program into a validated ontology. Declarations are
    /// collected first, so a predicate may be used above its `decl` line or
    /// in a different file of the same program.
    pub fn to_ontology(&self) -> Result<Ontology, DslError> {
        let mut ontology = Ontology::new();
        let semantic = |item: &(Item, Span, String), error: KernelError| DslError::Semantic {
            path: item.2.clone(),
            span: item.1,
            error,
        };
        for entry in &self.items {
            if let Item::Decl(d) = &entry.0 {
                ontology
                    .declare(d.clone())
                    .map_err(|e| semantic(entry, e))?;
            }
        }
        for entry in &self.items {
            let result = match &entry.0 {
                Item::Decl(_) => Ok(()),
                Item::Axiom(a) => ontology.add_axiom(a.clone()),
                Item::Fact(f) => ontology.add_fact(f.clone()),
                Item::Query(q) => ontology.add_question(q.clone()),
            };
            result.map_err(|e| semantic(entry, e))?;
        }
        Ok(ontology)
    }
}

/// Parses without semantic validation.
pub fn parse_source(path: &str, text: &str) -> Result<SourceProgram, DslError> {
    Parser::new(path, text)?.program()
}

/// Parses and validates a single program text.
pub fn parse_program(text: &str) -> Result<SourceProgram, DslError> {
    let program = parse_source("", text)?;
    program.to_ontology()?;
    Ok(program)
}

/// Parses several files as one program and validates the whole.
pub fn parse_programs<'a>(
    sources: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<(SourceProgram, Ontology), DslError> {
    let mut program = SourceProgram::new("");
    for (path, text) in sources {
        program.extend(parse_source(path, text)?);
    }
    let ontology = program.to_ontology()?;
    Ok((program, ontology))
}

/// Parses and validates text into an ontology.
pub fn parse_ontology(text: &str) -> Result<Ontology, DslError> {
    parse_source("", text)?.to_ontology()
}

/// Parses a conjunctive query body (`holds(p(X), S) & ...`), with an optional
/// trailing `.`.
pub fn parse_query_body(text: &str) -> Result<Vec<Literal>, DslError> {
    let mut p = Parser::new("", text)?;
    let body = p.body()?;
    p.optional_dot();
    p.finish()?;
    Ok(body)
}

/// Parses a ground goal: `holds(atom)`, `occurs(atom)` or a bare atom.
pub fn parse_goal(text: &str) -> Result<(Modality, Atom), DslError> {
    let mut p = Parser::new("", text)?;
    let goal = p.goal()?;
    p.finish()?;
    Ok(goal)
}

/// Parses a single situation term such as `do(audits(a, c), sc)`.
pub fn parse_situation_term(text: &str) -> Result<crate::kernel::Term, DslError> {
    let mut p = Parser::new("", text)?;
    let t = p.sit_term()?;
    p.finish()?;
    Ok(t)
}

/// Canonical text: one item per line (axioms span several), `.`-terminated.
pub fn print_program(program: &SourceProgram) -> String {
    let mut out = String::new();
    let mut previous: Option<std::mem::Discriminant<Item>> = None;
    for item in program.items() {
        let d = std::mem::discriminant(item);
        if previous.is_some_and(|p| p != d || matches!(item, Item::Axiom(_))) {
            out.push('\n');
        }
        previous = Some(d);
        out.push_str(&print_item(item));
        out.push('\n');
    }
    out
}

pub fn print_item(item: &Item) -> String {
    match item {
        Item::Decl(d) => format!("decl {}/{} kind {}.", d.name, d.arity, d.kind),
        Item::Axiom(a) => a.to_string(),
        Item::Fact(f) => format!("fact {f}."),
        Item::Query(q) => print_query(q),
    }
}

fn print_query(q: &NamedQuery) -> String {
    let expect = q.expect.map(|e| format!(" expect {e}")).unwrap_or_default();
    format!("query {}{expect}: {}.", q.name, DisplayBody(&q.body))
}

/// Renders a conjunction joined by ` & `.
pub struct DisplayBody<'a>(pub &'a [Literal]);

impl fmt::Display for DisplayBody<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, lit) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{lit}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{LiteralKind, PredicateKind, Term};

    const TERMS: &str = "
        decl accounting_standard/1 kind fluent.
        decl accounting_standard_type/2.
        decl auditor/1.
        decl has_auditor_orientation/2.
        decl client_preferred_treatment/2.
        decl enforces_preferred_treatment/2.
        decl audits/2 kind action.
    ";

    const H1B: &str = "
        axiom h1b: forall A, As, S, C, Sc:
            holds(accounting_standard(As), S)
            & holds(accounting_standard_type(As, principles_based), S)
            & holds(auditor(A), S)
            & holds(has_auditor_orientation(A, principles_oriented), S)
            & holds(client_preferred_treatment(C, opportunistic), Sc)
            & S = do(audits(A, C), Sc)
            -> holds(enforces_preferred_treatment(A, nonopportunistic), S).
    ";

    #[test]
    fn fact_parses_to_ground_literal() {
        let p = parse_program(
            "decl accounting_standard/1.\nfact holds(accounting_standard(ifrs), sigma0).",
        )
        .unwrap();
        let items: Vec<_> = p.items().collect();
        assert_eq!(items.len(), 2);
        let Item::Fact(f) = items[1] else {
            panic!("expected fact")
        };
        assert_eq!(
            *f,
            Literal::holds(
                Atom::new("accounting_standard", vec![Term::constant("ifrs")]),
                Term::constant("sigma0")
            )
        );
    }

    #[test]
    fn empty_input_has_no_items() {
        assert!(parse_program("").unwrap().is_empty());
        assert!(parse_program("  % only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn h1b_axiom_shape() {
        let p = parse_program(&format!("{TERMS}{H1B}")).unwrap();
        let axiom = p
            .items()
            .find_map(|i| match i {
                Item::Axiom(a) => Some(a),
                _ => None,
            })
            .unwrap();
        assert_eq!(axiom.universals, vec!["A", "As", "S", "C", "Sc"]);
        let holds = axiom
            .body
            .iter()
            .filter(|l| matches!(l.kind(), LiteralKind::Holds { .. }))
            .count();
        let eqs = axiom
            .body
            .iter()
            .filter(|l| matches!(l.kind(), LiteralKind::Equality { .. }))
            .count();
        assert_eq!((holds, eqs), (5, 1));
        assert_eq!(
            axiom.head.to_string(),
            "holds(enforces_preferred_treatment(A, nonopportunistic), S)"
        );
    }

    #[test]
    fn default_kind_is_fluent() {
        let p = parse_program("decl p/2.").unwrap();
        let Some(Item::Decl(d)) = p.items().next() else {
            panic!()
        };
        assert_eq!(d.kind, PredicateKind::Fluent);
    }

    #[test]
    fn variable_in_fact_is_a_lexical_violation() {
        let e = parse_program("decl auditor/1.\nfact holds(auditor(John), s0).").unwrap_err();
        assert_eq!(e.span(), Span::new(2, 20, 4));
        assert!(e.to_string().contains("John"));
    }

    #[test]
    fn syntax_error_reports_expected_tokens() {
        let e = parse_program("decl p/1.\nfact holds(p(a) s0).").unwrap_err();
        assert_eq!(e.span(), Span::new(2, 17, 2));
        assert_eq!(e.expected(), &["`,`".to_string()]);
        let e = parse_program("fcat holds(p(a), s0).").unwrap_err();
        assert_eq!(e.expected().len(), 4);
    }

    #[test]
    fn semantic_errors() {
        let e = parse_program("decl p/1.\nfact holds(p(a, b), s0).").unwrap_err();
        assert!(matches!(
            e,
            DslError::Semantic {
                error: KernelError::ArityMismatch { .. },
                span: Span { line: 2, .. },
                ..
            }
        ));
        let e = parse_program("fact holds(q(a), s0).").unwrap_err();
        assert!(matches!(
            e,
            DslError::Semantic {
                error: KernelError::UndeclaredPredicate { .. },
                ..
            }
        ));
        let dup = "decl p/1.\naxiom a: forall X, S: holds(p(X), S) -> holds(p(X), S).\n\
                   axiom a: forall X, S: holds(p(X), S) -> holds(p(X), S).";
        assert!(matches!(
            parse_program(dup).unwrap_err(),
            DslError::Semantic {
                error: KernelError::DuplicateAxiom(_),
                span: Span { line: 3, .. },
                ..
            }
        ));
    }

    #[test]
    fn declarations_resolve_program_wide() {
        assert!(parse_program("fact holds(p(a), s0).\ndecl p/1.").is_ok());
    }

    #[test]
    fn reserved_names_are_rejected() {
        assert!(parse_program("decl holds/1.").is_err());
        assert!(parse_program("decl sk_belief/1.").is_err());
        assert!(parse_program("decl p/1.\nfact holds(p(sk_b), s0).").is_err());
    }

    #[test]
    fn print_single_fact() {
        let p = parse_program("decl p/1. fact   holds( p(a),s0 ) .").unwrap();
        let facts_only = SourceProgram::from_items(p.items().skip(1).cloned());
        assert_eq!(print_program(&facts_only), "fact holds(p(a), s0).\n");
    }

    #[test]
    fn existential_head_prints_with_prefix() {
        let text = "decl client_preferred_treatment/2.\ndecl has_evidence/3.\n\
            axiom bdi_evidence: forall C, Cpt, S: holds(client_preferred_treatment(C, Cpt), S)\n\
            -> exists B: holds(has_evidence(B, client_preferred_treatment, Cpt), S).";
        let p = parse_program(text).unwrap();
        let printed = print_program(&p);
        assert!(printed.contains("-> exists B: holds(has_evidence("));
        assert_eq!(parse_program(&printed).unwrap(), p);
    }

    #[test]
    fn query_and_goal_helpers() {
        let body = parse_query_body("holds(p(X), S) & not holds(q(X), S).").unwrap();
        assert_eq!(body.len(), 2);
        assert!(body[1].is_negated());
        assert!(parse_query_body("occurs(a, S) & S = sc").is_ok());
        assert!(parse_query_body("not occurs(a, S)").is_err());
        let (m, atom) = parse_goal("occurs(audits(a, c))").unwrap();
        assert_eq!(
            (m, atom.to_string()),
            (Modality::Occurs, "audits(a, c)".into())
        );
        let (m, _) = parse_goal("auditor(a)").unwrap();
        assert_eq!(m, Modality::Holds);
        assert!(parse_goal("auditor(X)").is_err());
        assert_eq!(
            parse_situation_term("do(audits(a, c), sc)")
                .unwrap()
                .to_string(),
            "do(audits(a, c), sc)"
        );
    }
}
