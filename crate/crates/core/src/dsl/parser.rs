use std::str::FromStr;

use super::lexer::{tokenize, Tok, Token};
use super::{DslError, Item, SourceProgram, Span};
use crate::kernel::{
    Atom, Axiom, Declaration, Expectation, Literal, Modality, NamedQuery, PredicateKind, Term, DO,
};

pub(crate) struct Parser<'a> {
    path: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    /// Spans of variable tokens seen in the current item.
    var_spans: Vec<(String, Span)>,
}

type PResult<T> = Result<T, DslError>;

impl<'a> Parser<'a> {
    pub fn new(path: &'a str, text: &str) -> PResult<Self> {
        Ok(Parser {
            path,
            tokens: tokenize(path, text)?,
            pos: 0,
            var_spans: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> DslError {
        let found = self.peek().to_string();
        DslError::Syntax {
            path: self.path.to_string(),
            span: self.span(),
            message: format!("expected {}; found {found}", expected.join(" or ")),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn error_at(&self, span: Span, message: String) -> DslError {
        DslError::Syntax {
            path: self.path.to_string(),
            span,
            message,
            expected: Vec::new(),
        }
    }

    fn expect(&mut self, tok: Tok, desc: &str) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(self.error(&[desc]))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&format!("`{kw}`")]))
        }
    }

    fn ident(&mut self, desc: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&[desc])),
        }
    }

    fn var(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Var(s) => {
                let span = self.bump().span;
                self.var_spans.push((s.clone(), span));
                Ok(s)
            }
            _ => Err(self.error(&["variable"])),
        }
    }

    pub fn at_end(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn program(&mut self) -> PResult<SourceProgram> {
        let mut program = SourceProgram::new(self.path);
        while !self.at_end() {
            let span = self.span();
            let item = self.item()?;
            program.push(item, span);
        }
        Ok(program)
    }

    pub fn item(&mut self) -> PResult<Item> {
        self.var_spans.clear();
        match self.peek() {
            Tok::Ident(k) if k == "decl" => self.decl().map(Item::Decl),
            Tok::Ident(k) if k == "axiom" => self.axiom().map(Item::Axiom),
            Tok::Ident(k) if k == "fact" => self.fact().map(Item::Fact),
            Tok::Ident(k) if k == "query" => self.query().map(Item::Query),
            _ => Err(self.error(&["`decl`", "`axiom`", "`fact`", "`query`"])),
        }
    }

    fn decl(&mut self) -> PResult<Declaration> {
        self.keyword("decl")?;
        let name = self.ident("predicate name")?;
        self.expect(Tok::Slash, "`/`")?;
        let arity = match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                n
            }
            _ => return Err(self.error(&["arity"])),
        };
        let mut kind = PredicateKind::Fluent;
        if self.is_keyword("kind") {
            self.bump();
            let span = self.span();
            let k = self.ident("`fluent`, `action` or `rigid`")?;
            kind = PredicateKind::from_str(&k).map_err(|m| self.error_at(span, m))?;
        }
        self.expect(Tok::Dot, "`.`")?;
        Ok(Declaration::new(name, arity, kind))
    }

    fn varlist(&mut self) -> PResult<Vec<String>> {
        let mut vars = vec![self.var()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            vars.push(self.var()?);
        }
        Ok(vars)
    }

    fn axiom(&mut self) -> PResult<Axiom> {
        self.keyword("axiom")?;
        let name = self.ident("axiom name")?;
        self.expect(Tok::Colon, "`:`")?;
        self.keyword("forall")?;
        let universals = self.varlist()?;
        self.expect(Tok::Colon, "`:`")?;
        let body = self.body()?;
        self.expect(Tok::Arrow, "`->`")?;
        let mut head_existentials = Vec::new();
        if self.is_keyword("exists") {
            self.bump();
            head_existentials = self.varlist()?;
            self.expect(Tok::Colon, "`:`")?;
        }
        let head = self.holds_literal()?;
        self.expect(Tok::Dot, "`.`")?;
        Ok(Axiom {
            name,
            universals,
            head_existentials,
            body,
            head,
        })
    }

    fn fact(&mut self) -> PResult<Literal> {
        self.keyword("fact")?;
        let lit = if self.is_keyword("occurs") {
            self.occurs_literal()?
        } else if self.is_keyword("holds") {
            self.holds_literal()?
        } else {
            return Err(self.error(&["`holds`", "`occurs`"]));
        };
        if let Some((v, span)) = self.var_spans.first().cloned() {
            return Err(self.error_at(
                span,
                format!("facts are ground: `{v}` is a variable where an instance is required"),
            ));
        }
        self.expect(Tok::Dot, "`.`")?;
        Ok(lit)
    }

    fn query(&mut self) -> PResult<NamedQuery> {
        self.keyword("query")?;
        let name = self.ident("query name")?;
        let mut expect = None;
        if self.is_keyword("expect") {
            self.bump();
            let span = self.span();
            let e = self.ident("`sat` or `unsat`")?;
            expect = Some(Expectation::from_str(&e).map_err(|m| self.error_at(span, m))?);
        }
        self.expect(Tok::Colon, "`:`")?;
        let body = self.body()?;
        self.expect(Tok::Dot, "`.`")?;
        Ok(NamedQuery { name, expect, body })
    }

    pub fn body(&mut self) -> PResult<Vec<Literal>> {
        let mut lits = vec![self.literal()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            lits.push(self.literal()?);
        }
        Ok(lits)
    }

    fn literal(&mut self) -> PResult<Literal> {
        match self.peek() {
            Tok::Ident(k) if k == "not" => {
                self.bump();
                if !self.is_keyword("holds") {
                    return Err(self.error(&["`holds`"]));
                }
                let lit = self.holds_literal()?;
                Ok(lit.negate().expect("holds literal"))
            }
            Tok::Ident(k) if k == "holds" => self.holds_literal(),
            Tok::Ident(k) if k == "occurs" => self.occurs_literal(),
            Tok::Var(_) => {
                let lhs = Term::variable(self.var()?);
                self.expect(Tok::Eq, "`=`")?;
                let rhs = self.sit_term()?;
                Ok(Literal::equality(lhs, rhs))
            }
            _ => Err(self.error(&["`holds`", "`occurs`", "`not`", "variable"])),
        }
    }

    pub fn holds_literal(&mut self) -> PResult<Literal> {
        let (atom, sit) = self.modal("holds")?;
        Ok(Literal::holds(atom, sit))
    }

    fn occurs_literal(&mut self) -> PResult<Literal> {
        let (atom, sit) = self.modal("occurs")?;
        Ok(Literal::occurs(atom, sit))
    }

    fn modal(&mut self, kw: &str) -> PResult<(Atom, Term)> {
        self.keyword(kw)?;
        self.expect(Tok::LParen, "`(`")?;
        let atom = self.atom()?;
        self.expect(Tok::Comma, "`,`")?;
        let sit = self.sit_term()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok((atom, sit))
    }

    pub fn atom(&mut self) -> PResult<Atom> {
        let span = self.span();
        let name = self.ident("predicate")?;
        if ["holds", "occurs", "not", DO].contains(&name.as_str()) {
            return Err(self.error_at(span, format!("`{name}` cannot be used as a predicate")));
        }
        let args = if *self.peek() == Tok::LParen {
            self.args()?
        } else {
            Vec::new()
        };
        Ok(Atom::new(name, args))
    }

    fn args(&mut self) -> PResult<Vec<Term>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen, "`)` or `,`")?;
        Ok(args)
    }

    fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Var(_) => Ok(Term::variable(self.var()?)),
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    Ok(Term::compound(name, self.args()?))
                } else {
                    Ok(Term::constant(name))
                }
            }
            _ => Err(self.error(&["term"])),
        }
    }

    pub fn sit_term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Var(_) => Ok(Term::variable(self.var()?)),
            Tok::Ident(name) if name == DO && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let action = self.atom()?;
                self.expect(Tok::Comma, "`,`")?;
                let parent = self.sit_term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(crate::kernel::do_term(&action, parent))
            }
            Tok::Ident(name) if name != DO => {
                self.bump();
                Ok(Term::constant(name))
            }
            _ => Err(self.error(&["situation"])),
        }
    }

    /// `holds(atom)`, `occurs(atom)` or a bare atom (read as `holds`).
    pub fn goal(&mut self) -> PResult<(Modality, Atom)> {
        let modality = if self.is_keyword("holds") && *self.peek_at(1) == Tok::LParen {
            Some(Modality::Holds)
        } else if self.is_keyword("occurs") && *self.peek_at(1) == Tok::LParen {
            Some(Modality::Occurs)
        } else {
            None
        };
        let result = match modality {
            Some(m) => {
                self.bump();
                self.bump();
                let atom = self.atom()?;
                self.expect(Tok::RParen, "`)`")?;
                (m, atom)
            }
            None => (Modality::Holds, self.atom()?),
        };
        if let Some((v, span)) = self.var_spans.first().cloned() {
            return Err(self.error_at(span, format!("goal must be ground: `{v}` is a variable")));
        }
        Ok(result)
    }

    pub fn optional_dot(&mut self) {
        if *self.peek() == Tok::Dot {
            self.bump();
        }
    }

    pub fn finish(&self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }
}
