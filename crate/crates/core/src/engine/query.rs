use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::compile::join_plan;
use super::eval::Matcher;
use super::proof::{ProofJson, ProofNode};
use super::{EngineError, Model};
use crate::kernel::{
    check_query_range_restricted, Apply, Expectation, Literal, NamedQuery, SituationId,
    Substitution, Term,
};

/// One solution of a conjunctive query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    /// Restricted to the query's variables.
    pub bindings: Substitution,
    /// Situation of the first positive `holds`/`occurs` literal.
    pub situation: Option<SituationId>,
    /// One proof per query literal, in written order.
    pub proofs: Vec<ProofNode>,
    rendered: Vec<(String, String)>,
}

impl Answer {
    /// Bindings in first-occurrence order, situations shown by id.
    pub fn rendered_bindings(&self) -> &[(String, String)] {
        &self.rendered
    }

    pub fn to_json(&self, with_proofs: bool) -> AnswerJson {
        AnswerJson {
            bindings: self.rendered.iter().cloned().collect(),
            situation: self.situation.as_ref().map(ToString::to_string),
            proofs: with_proofs.then(|| self.proofs.iter().map(ProofNode::to_json).collect()),
        }
    }

    fn key(&self) -> String {
        self.rendered
            .iter()
            .map(|(v, t)| format!("{v}={t}"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rendered.is_empty() {
            return f.write_str("true");
        }
        let parts: Vec<String> = self
            .rendered
            .iter()
            .map(|(v, t)| format!("{v} = {t}"))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerJson {
    pub bindings: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub situation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proofs: Option<Vec<ProofJson>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswersJson {
    pub answers: Vec<AnswerJson>,
}

impl Model<'_> {
    /// All distinct answers to a conjunctive query, sorted by their rendered
    /// bindings.
    pub fn query(&self, body: &[Literal]) -> Result<Vec<Answer>, EngineError> {
        for lit in body {
            self.engine.program().signature.check_literal(lit)?;
        }
        check_query_range_restricted("query", body)?;
        for lit in body {
            let terms: Vec<&Term> = match lit.kind() {
                crate::kernel::LiteralKind::Equality { lhs, rhs } => vec![lhs, rhs],
                _ => lit.situation().into_iter().collect(),
            };
            for t in terms {
                if t.is_ground() && self.store.lookup(t).is_none() {
                    return Err(EngineError::UnknownSituation(
                        crate::kernel::canonical_situation_id(t)?,
                    ));
                }
            }
        }

        let vars: Vec<String> = {
            let mut out = Vec::new();
            body.iter().for_each(|l| l.collect_variables(&mut out));
            out
        };
        let sit_vars: BTreeSet<String> = {
            let mut out = Vec::new();
            body.iter()
                .for_each(|l| l.collect_situation_variables(&mut out));
            out.into_iter().collect()
        };
        let first_modal = body.iter().position(Literal::is_positive_modal);
        let plan = join_plan(body);
        let matcher = Matcher {
            store: self.store,
            db: &self.sat.all,
        };
        let builder = self.proof_builder();
        let mut found: BTreeMap<String, Answer> = BTreeMap::new();
        matcher.solve(body, &plan, None, &mut |s, premises| {
            let bindings = s.restrict(&vars);
            let rendered: Vec<(String, String)> = vars
                .iter()
                .filter_map(|v| {
                    let t = bindings.get(v)?;
                    let shown = match self.store.lookup(t) {
                        Some(id) if sit_vars.contains(v) => id.to_string(),
                        _ => t.to_string(),
                    };
                    Some((v.clone(), shown))
                })
                .collect();
            let situation = first_modal.and_then(|i| {
                let t = body[i].situation()?.apply(s);
                self.store.lookup(&t).cloned()
            });
            let mut answer = Answer {
                bindings,
                situation,
                proofs: Vec::new(),
                rendered,
            };
            if let std::collections::btree_map::Entry::Vacant(slot) = found.entry(answer.key()) {
                answer.proofs = premises
                    .iter()
                    .map(|p| builder.premise(p.as_ref().expect("complete match")))
                    .collect();
                slot.insert(answer);
            }
            Ok(())
        })?;
        Ok(found.into_values().collect())
    }

    /// Runs each named query and compares with its expectation.
    pub fn check_competency(&self, questions: &[NamedQuery]) -> CompetencyReport {
        let results = questions
            .iter()
            .map(|q| {
                let outcome = self.query(&q.body);
                let (answers, error) = match outcome {
                    Ok(a) => (a.len(), None),
                    Err(e) => (0, Some(e.to_string())),
                };
                let passed = error.is_none()
                    && match q.expect {
                        Some(Expectation::Sat) => answers > 0,
                        Some(Expectation::Unsat) => answers == 0,
                        None => true,
                    };
                QuestionResult {
                    name: q.name.clone(),
                    expect: q.expect,
                    answers,
                    passed,
                    error,
                }
            })
            .collect();
        CompetencyReport { results }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionResult {
    pub name: String,
    #[serde(with = "expectation_text")]
    pub expect: Option<Expectation>,
    pub answers: usize,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CompetencyReport {
    pub results: Vec<QuestionResult>,
}

impl CompetencyReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &QuestionResult> {
        self.results.iter().filter(|r| !r.passed)
    }

    pub fn get(&self, name: &str) -> Option<&QuestionResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

mod expectation_text {
    use std::str::FromStr;

    use serde::{Deserialize, Deserializer, Serializer};

    use crate::kernel::Expectation;

    pub fn serialize<S: Serializer>(e: &Option<Expectation>, s: S) -> Result<S::Ok, S::Error> {
        match e {
            Some(e) => s.serialize_str(&e.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Expectation>, D::Error> {
        let text: Option<String> = Option::deserialize(d)?;
        text.map(|t| Expectation::from_str(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}
