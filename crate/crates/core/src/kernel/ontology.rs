use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use super::axiom::{check_query_range_restricted, Axiom};
use super::error::KernelError;
use super::literal::{Atom, Literal, LiteralKind};
use super::situation::{is_situation_term, split_do, DO};
use super::term::{is_skolem_symbol, Term};

/// Built-in fluent `clips(action, fluent_predicate)`: holding in a situation
/// blocks inertia of that fluent across that action.
pub const CLIPS: &str = "clips";

const RESERVED: &[&str] = &["holds", "occurs", DO, "not", CLIPS];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PredicateKind {
    /// Situation-dependent; appears inside `holds`.
    Fluent,
    /// Appears inside `occurs` and `do`.
    Action,
    /// Situation-independent; true in every situation once true in one.
    Rigid,
}

impl fmt::Display for PredicateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PredicateKind::Fluent => "fluent",
            PredicateKind::Action => "action",
            PredicateKind::Rigid => "rigid",
        })
    }
}

impl FromStr for PredicateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fluent" => Ok(PredicateKind::Fluent),
            "action" => Ok(PredicateKind::Action),
            "rigid" => Ok(PredicateKind::Rigid),
            other => Err(format!("unknown predicate kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Declaration {
    pub name: String,
    pub arity: usize,
    pub kind: PredicateKind,
}

impl Declaration {
    pub fn new(name: impl Into<String>, arity: usize, kind: PredicateKind) -> Self {
        Declaration {
            name: name.into(),
            arity,
            kind,
        }
    }
}

/// The terminology: every predicate with its arity and kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    decls: BTreeMap<String, Declaration>,
}

impl Default for Signature {
    fn default() -> Self {
        let mut decls = BTreeMap::new();
        decls.insert(
            CLIPS.to_string(),
            Declaration::new(CLIPS, 2, PredicateKind::Fluent),
        );
        Signature { decls }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Position {
    Holds,
    Occurs,
    Do,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a declaration. Re-declaring with identical arity and kind is a
    /// no-op, so one ontology can import another's terminology.
    pub fn declare(&mut self, decl: Declaration) -> Result<(), KernelError> {
        if RESERVED.contains(&decl.name.as_str()) || is_skolem_symbol(&decl.name) {
            return Err(KernelError::ReservedName(decl.name));
        }
        if let Some(existing) = self.decls.get(&decl.name) {
            if existing.arity != decl.arity {
                return Err(KernelError::ArityMismatch {
                    name: decl.name,
                    declared: existing.arity,
                    found: decl.arity,
                });
            }
            if existing.kind != decl.kind {
                return Err(KernelError::KindConflict {
                    name: decl.name,
                    first: existing.kind,
                    second: decl.kind,
                });
            }
            return Ok(());
        }
        self.decls.insert(decl.name.clone(), decl);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Declaration> {
        self.decls.get(name)
    }

    pub fn kind_of(&self, name: &str) -> Option<PredicateKind> {
        self.decls.get(name).map(|d| d.kind)
    }

    /// All declarations including built-ins, ordered by name.
    pub fn iter(&self) -> impl Iterator<Item = &Declaration> {
        self.decls.values()
    }

    /// Declarations introduced by users (built-ins excluded).
    pub fn user_declarations(&self) -> impl Iterator<Item = &Declaration> {
        self.decls.values().filter(|d| d.name != CLIPS)
    }

    pub fn merge(&mut self, other: &Signature) -> Result<(), KernelError> {
        for d in other.user_declarations() {
            self.declare(d.clone())?;
        }
        Ok(())
    }

    fn check_atom(&self, atom: &Atom, position: Position) -> Result<(), KernelError> {
        let decl =
            self.decls
                .get(&atom.predicate)
                .ok_or_else(|| KernelError::UndeclaredPredicate {
                    name: atom.predicate.clone(),
                    arity: atom.arity(),
                })?;
        if decl.arity != atom.arity() {
            return Err(KernelError::ArityMismatch {
                name: decl.name.clone(),
                declared: decl.arity,
                found: atom.arity(),
            });
        }
        let ok = match position {
            Position::Holds => decl.kind != PredicateKind::Action,
            Position::Occurs | Position::Do => decl.kind == PredicateKind::Action,
        };
        if !ok {
            return Err(KernelError::KindMismatch {
                name: decl.name.clone(),
                kind: decl.kind,
                context: match position {
                    Position::Holds => "holds",
                    Position::Occurs => "occurs",
                    Position::Do => "do",
                },
            });
        }
        atom.args.iter().try_for_each(|a| self.check_functors(a))
    }

    /// A compound whose functor names a declared predicate must use its arity.
    fn check_functors(&self, term: &Term) -> Result<(), KernelError> {
        if let Term::Compound(f, args) = term {
            if let Some(d) = self.decls.get(f) {
                if d.arity != args.len() {
                    return Err(KernelError::ArityMismatch {
                        name: f.clone(),
                        declared: d.arity,
                        found: args.len(),
                    });
                }
            }
            args.iter().try_for_each(|a| self.check_functors(a))?;
        }
        Ok(())
    }

    pub fn check_situation_term(&self, term: &Term) -> Result<(), KernelError> {
        if !is_situation_term(term) {
            return Err(KernelError::NotASituation(term.to_string()));
        }
        if let Some((action, parent)) = split_do(term) {
            let atom = Atom::from_term(action)
                .ok_or_else(|| KernelError::NotASituation(term.to_string()))?;
            self.check_atom(&atom, Position::Do)?;
            self.check_situation_term(parent)?;
        }
        Ok(())
    }

    pub fn check_literal(&self, lit: &Literal) -> Result<(), KernelError> {
        match lit.kind() {
            LiteralKind::Holds { atom, situation } => {
                self.check_atom(atom, Position::Holds)?;
                self.check_situation_term(situation)
            }
            LiteralKind::Occurs { atom, situation } => {
                self.check_atom(atom, Position::Occurs)?;
                self.check_situation_term(situation)
            }
            LiteralKind::Equality { lhs, rhs } => {
                self.check_situation_term(lhs)?;
                self.check_situation_term(rhs)
            }
        }
    }

    /// Checks an action atom used to create a successor situation.
    pub fn check_action(&self, action: &Atom) -> Result<(), KernelError> {
        self.check_atom(action, Position::Do)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Expectation {
    Sat,
    Unsat,
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expectation::Sat => "sat",
            Expectation::Unsat => "unsat",
        })
    }
}

impl FromStr for Expectation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sat" => Ok(Expectation::Sat),
            "unsat" => Ok(Expectation::Unsat),
            other => Err(format!("expected `sat` or `unsat`, got `{other}`")),
        }
    }
}

/// A formal competency question: a conjunctive query whose capitalized
/// identifiers are implicitly existential answer variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NamedQuery {
    pub name: String,
    pub expect: Option<Expectation>,
    pub body: Vec<Literal>,
}

impl NamedQuery {
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.body.iter().for_each(|l| l.collect_variables(&mut out));
        out
    }
}

/// Terminology, axioms, a populated model and competency questions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Ontology {
    signature: Signature,
    axioms: Vec<Axiom>,
    facts: Vec<Literal>,
    questions: Vec<NamedQuery>,
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn axiom(&self, name: &str) -> Option<&Axiom> {
        self.axioms.iter().find(|a| a.name == name)
    }

    /// Ground facts, each a positive `holds`/`occurs` literal whose situation
    /// term names the context it belongs to.
    pub fn facts(&self) -> &[Literal] {
        &self.facts
    }

    pub fn questions(&self) -> &[NamedQuery] {
        &self.questions
    }

    pub fn declare(&mut self, decl: Declaration) -> Result<(), KernelError> {
        self.signature.declare(decl)
    }

    pub fn add_axiom(&mut self, axiom: Axiom) -> Result<(), KernelError> {
        axiom.validate()?;
        if self.axioms.iter().any(|a| a.name == axiom.name) {
            return Err(KernelError::DuplicateAxiom(axiom.name));
        }
        if axiom.head.atom().is_some_and(|a| a.predicate == CLIPS) {
            return Err(KernelError::ReservedName(CLIPS.to_string()));
        }
        for lit in axiom.body.iter().chain(std::iter::once(&axiom.head)) {
            self.signature.check_literal(lit)?;
        }
        self.axioms.push(axiom);
        Ok(())
    }

    pub fn add_fact(&mut self, fact: Literal) -> Result<(), KernelError> {
        if fact.is_negated() || fact.modality().is_none() {
            return Err(KernelError::InvalidFact(fact.to_string()));
        }
        if !fact.is_ground() {
            return Err(KernelError::NonGroundFact(fact.to_string()));
        }
        self.signature.check_literal(&fact)?;
        if !self.facts.contains(&fact) {
            self.facts.push(fact);
        }
        Ok(())
    }

    pub fn add_question(&mut self, query: NamedQuery) -> Result<(), KernelError> {
        if self.questions.iter().any(|q| q.name == query.name) {
            return Err(KernelError::DuplicateQuery(query.name));
        }
        self.check_query(&query.name, &query.body)?;
        self.questions.push(query);
        Ok(())
    }

    /// Validates an ad-hoc query body against the terminology.
    pub fn check_query(&self, name: &str, body: &[Literal]) -> Result<(), KernelError> {
        for lit in body {
            self.signature.check_literal(lit)?;
        }
        check_query_range_restricted(&format!("query {name}"), body)
    }

    /// Adds everything from `other`; axiom and question names must stay unique.
    pub fn merge(&mut self, other: &Ontology) -> Result<(), KernelError> {
        self.signature.merge(&other.signature)?;
        for a in &other.axioms {
            self.add_axiom(a.clone())?;
        }
        for f in &other.facts {
            self.add_fact(f.clone())?;
        }
        for q in &other.questions {
            self.add_question(q.clone())?;
        }
        Ok(())
    }

    /// Hash of terminology and axioms; cached saturations are keyed by it.
    pub fn rules_fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.signature.hash(&mut h);
        self.axioms.hash(&mut h);
        h.finish()
    }
}
