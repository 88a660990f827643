use serde::{Deserialize, Serialize};

use super::compile::Program;
use super::eval::{clips_atom, Justification, Premise, Saturation};
use crate::kernel::{
    Apply, Fact, Literal, LiteralKind, PredicateKind, SituationId, Substitution, CLIPS,
};
use crate::store::FactStore;

pub const BASE_FACT: &str = "base-fact";
pub const FRAME: &str = "frame";
pub const RIGID: &str = "rigid";
pub const EQUALITY: &str = "equality";
pub const NEGATION: &str = "negation-as-failure";

/// A derivation tree. Internal nodes name an axiom (or the frame or rigid
/// rule); leaves are base facts, satisfied equalities and absent facts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub conclusion: Literal,
    pub situation: Option<SituationId>,
    pub rule: String,
    pub premises: Vec<ProofNode>,
    pub substitution: Substitution,
}

impl ProofNode {
    fn leaf(conclusion: Literal, situation: Option<SituationId>, rule: &str) -> Self {
        ProofNode {
            conclusion,
            situation,
            rule: rule.to_string(),
            premises: Vec::new(),
            substitution: Substitution::new(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.premises.is_empty()
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(ProofNode::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .premises
            .iter()
            .map(ProofNode::depth)
            .max()
            .unwrap_or(0)
    }

    /// Pre-order walk over the tree.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a ProofNode)) {
        f(self);
        for p in &self.premises {
            p.walk(f);
        }
    }

    pub fn to_json(&self) -> ProofJson {
        ProofJson {
            fact: self.conclusion.to_string(),
            situation: self.situation.as_ref().map(ToString::to_string),
            rule: self.rule.clone(),
            premises: self.premises.iter().map(ProofNode::to_json).collect(),
        }
    }

    /// Indented text rendering, one node per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, indent: usize, out: &mut String) {
        out.push_str(&"  ".repeat(indent));
        out.push_str(&self.conclusion.to_string());
        out.push_str("  [");
        out.push_str(&self.rule);
        if !self.substitution.is_empty() {
            out.push(' ');
            out.push_str(&self.substitution.to_string());
        }
        out.push_str("]\n");
        for p in &self.premises {
            p.render_into(indent + 1, out);
        }
    }
}

/// Serialized proof tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofJson {
    pub fact: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub situation: Option<String>,
    pub rule: String,
    pub premises: Vec<ProofJson>,
}

pub(crate) struct ProofBuilder<'a> {
    pub store: &'a FactStore,
    pub sat: &'a Saturation,
}

impl ProofBuilder<'_> {
    fn literal_of(&self, f: &Fact) -> Literal {
        let term = self
            .store
            .term_of(&f.situation)
            .expect("facts live in known situations");
        f.to_literal(term.clone())
    }

    /// Proof of a fact in the model, or `None` when it is not derivable.
    pub fn fact(&self, f: &Fact) -> Option<ProofNode> {
        if self.store.is_base_fact(f) {
            return Some(ProofNode::leaf(
                self.literal_of(f),
                Some(f.situation.clone()),
                BASE_FACT,
            ));
        }
        let j = self.sat.justification(f)?;
        let (rule, substitution, premises) = match j {
            Justification::Rule {
                rule,
                substitution,
                premises,
            } => (
                rule.clone(),
                substitution.clone(),
                premises.iter().map(|p| self.premise(p)).collect(),
            ),
            Justification::Frame { from, clips } => (
                FRAME.to_string(),
                Substitution::new(),
                vec![self.fact(from)?, self.absent(clips)],
            ),
            Justification::Rigid { from } => (
                RIGID.to_string(),
                Substitution::new(),
                vec![self.fact(from)?],
            ),
        };
        Some(ProofNode {
            conclusion: self.literal_of(f),
            situation: Some(f.situation.clone()),
            rule,
            premises,
            substitution,
        })
    }

    pub fn premise(&self, p: &Premise) -> ProofNode {
        match p {
            Premise::Fact(f) => self.fact(f).expect("premises are in the model"),
            Premise::Equality { lhs, rhs } => ProofNode::leaf(
                Literal::equality(lhs.clone(), rhs.clone()),
                self.store.lookup(lhs).cloned(),
                EQUALITY,
            ),
            Premise::Absent(lit) => self.absent(lit),
        }
    }

    fn absent(&self, lit: &Literal) -> ProofNode {
        let sit = lit.situation().and_then(|t| self.store.lookup(t)).cloned();
        ProofNode::leaf(lit.clone(), sit, NEGATION)
    }
}

/// Checks a proof tree bottom-up against the rules and the model, without
/// consulting stored justifications.
pub(crate) struct Replayer<'a> {
    pub program: &'a Program,
    pub store: &'a FactStore,
    pub sat: &'a Saturation,
}

impl Replayer<'_> {
    pub fn replay(&self, node: &ProofNode) -> Result<(), String> {
        for p in &node.premises {
            self.replay(p)?;
        }
        let fail = |why: &str| Err(format!("{}: {why}", node.conclusion));
        match node.rule.as_str() {
            BASE_FACT => match self.fact_of(&node.conclusion) {
                Some(f) if node.premises.is_empty() && self.store.is_base_fact(&f) => Ok(()),
                _ => fail("not a base fact"),
            },
            EQUALITY => match node.conclusion.kind() {
                LiteralKind::Equality { lhs, rhs }
                    if lhs == rhs && self.store.lookup(lhs).is_some() =>
                {
                    Ok(())
                }
                _ => fail("equality does not hold"),
            },
            NEGATION => {
                if !node.conclusion.is_negated() || !node.conclusion.is_ground() {
                    return fail("not a ground negated literal");
                }
                let positive = Literal::modal(
                    node.conclusion.modality().expect("modal literal"),
                    node.conclusion.atom().expect("modal literal").clone(),
                    node.conclusion.situation().expect("modal literal").clone(),
                );
                match self.fact_of(&positive) {
                    Some(f) if self.sat.holds(&f) => fail("negated fact is derivable"),
                    _ => Ok(()),
                }
            }
            FRAME => self.replay_frame(node).or_else(|e| fail(&e)),
            RIGID => {
                let [from] = node.premises.as_slice() else {
                    return fail("rigid copy needs one premise");
                };
                let same_atom = from.conclusion.atom() == node.conclusion.atom();
                let rigid = node
                    .conclusion
                    .atom()
                    .and_then(|a| self.program.kind_of(&a.predicate))
                    == Some(PredicateKind::Rigid);
                if same_atom && rigid && self.fact_of(&node.conclusion).is_some() {
                    Ok(())
                } else {
                    fail("invalid rigid copy")
                }
            }
            name => {
                let Some(rule) = self.program.rule(name) else {
                    return fail("unknown rule");
                };
                if node.premises.len() != rule.body.len() {
                    return fail("premise count differs from the rule body");
                }
                for (lit, p) in rule.body.iter().zip(&node.premises) {
                    let inst = lit.apply(&node.substitution);
                    if !inst.is_ground() || inst != p.conclusion {
                        return fail(&format!("premise {} does not match {inst}", p.conclusion));
                    }
                }
                let head = rule.head.apply(&node.substitution);
                if head != node.conclusion {
                    return fail(&format!("rule yields {head}"));
                }
                Ok(())
            }
        }
    }

    fn replay_frame(&self, node: &ProofNode) -> Result<(), String> {
        let [from, clips] = node.premises.as_slice() else {
            return Err("frame step needs two premises".into());
        };
        let child = self
            .fact_of(&node.conclusion)
            .ok_or("conclusion is not in a known situation")?;
        let parent = self
            .fact_of(&from.conclusion)
            .ok_or("premise is not in a known situation")?;
        let sit = self
            .store
            .situation(&child.situation)
            .ok_or("unknown situation")?;
        if sit.parent() != Some(&parent.situation) || child.atom != parent.atom {
            return Err("premise is not the same fluent in the parent situation".into());
        }
        let pred = child.predicate();
        if pred == CLIPS || self.program.kind_of(pred) != Some(PredicateKind::Fluent) {
            return Err("only fluents are inherited".into());
        }
        let action = sit.action().expect("successor situation");
        let parent_term = self.store.term_of(&parent.situation).expect("known");
        let expected = Literal::not_holds(clips_atom(action, pred), parent_term.clone());
        if clips.conclusion != expected || clips.rule != NEGATION {
            return Err("missing clips check".into());
        }
        Ok(())
    }

    fn fact_of(&self, lit: &Literal) -> Option<Fact> {
        let sit = self.store.lookup(lit.situation()?)?.clone();
        Some(Fact {
            modality: lit.modality()?,
            atom: lit.atom()?.clone(),
            situation: sit,
        })
    }
}
