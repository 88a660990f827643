use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::EngineError;
use crate::kernel::{
    Axiom, Literal, LiteralKind, Ontology, PredicateKind, Signature, Term, SKOLEM_PREFIX,
};

/// An axiom ready for evaluation: existentials replaced by Skolem terms and a
/// fixed join order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledRule {
    pub name: String,
    pub universals: Vec<String>,
    /// Body literals in written order.
    pub body: Vec<Literal>,
    /// Evaluation order over `body` indices.
    pub plan: Vec<usize>,
    pub head: Literal,
    /// True when the head carries Skolem terms.
    pub skolemized: bool,
    pub stratum: usize,
}

impl CompiledRule {
    pub fn head_predicate(&self) -> &str {
        &self
            .head
            .atom()
            .expect("heads are holds literals")
            .predicate
    }
}

/// Replaces each head existential `V` of `axiom` with
/// `sk_<axiom>_<V>(U1, ..., Uk)` over the universals in declaration order.
/// Universals that never occur in the body are dropped.
pub fn skolemize(axiom: &Axiom) -> Result<CompiledRule, EngineError> {
    axiom.validate()?;
    let mut used = Vec::new();
    axiom
        .body
        .iter()
        .for_each(|l| l.collect_variables(&mut used));
    let names: Vec<String> = axiom
        .universals
        .iter()
        .filter(|u| used.contains(u))
        .cloned()
        .collect();
    let universals: Vec<Term> = names.iter().map(Term::variable).collect();
    let bindings = axiom.head_existentials.iter().map(|v| {
        let functor = format!("{SKOLEM_PREFIX}{}_{v}", axiom.name);
        let term = if universals.is_empty() {
            Term::constant(functor)
        } else {
            Term::compound(functor, universals.clone())
        };
        (v.clone(), term)
    });
    let s = crate::kernel::Substitution::from_bindings(bindings)?;
    use crate::kernel::Apply;
    let head = axiom.head.apply(&s);
    check_head_terms(axiom, &head)?;
    Ok(CompiledRule {
        name: axiom.name.clone(),
        universals: names,
        plan: join_plan(&axiom.body),
        body: axiom.body.clone(),
        head,
        skolemized: !axiom.head_existentials.is_empty(),
        stratum: 0,
    })
}

/// Non-ground compound head arguments must already occur in a positive body
/// literal, which keeps the set of derivable terms finite.
fn check_head_terms(axiom: &Axiom, head: &Literal) -> Result<(), EngineError> {
    let mut known: Vec<&Term> = Vec::new();
    for lit in axiom.body.iter().filter(|l| l.is_positive_modal()) {
        let atom = lit.atom().expect("modal literal");
        for a in &atom.args {
            a.for_each_subterm(&mut |t| known.push(t));
        }
        lit.situation()
            .expect("modal literal")
            .for_each_subterm(&mut |t| known.push(t));
    }
    let atom = head.atom().expect("holds head");
    for arg in &atom.args {
        let mut bad = None;
        arg.for_each_subterm(&mut |t| {
            if bad.is_none()
                && matches!(t, Term::Compound(f, _) if !f.starts_with(SKOLEM_PREFIX))
                && !t.is_ground()
                && !known.contains(&t)
            {
                bad = Some(t.to_string());
            }
        });
        if let Some(term) = bad {
            return Err(EngineError::UnboundedHeadTerm {
                axiom: axiom.name.clone(),
                term,
            });
        }
    }
    Ok(())
}

/// Positive literals left to right; equality and negation literals as soon
/// as their variables allow.
pub(crate) fn join_plan(body: &[Literal]) -> Vec<usize> {
    let mut plan = Vec::with_capacity(body.len());
    let mut bound: BTreeSet<String> = BTreeSet::new();
    let mut pending: Vec<usize> = Vec::new();

    fn ready(lit: &Literal, bound: &BTreeSet<String>) -> bool {
        let all_bound = |t: &Term| t.variables().iter().all(|v| bound.contains(v));
        match lit.kind() {
            LiteralKind::Equality { lhs, rhs } => all_bound(lhs) || all_bound(rhs),
            _ => lit.variables().iter().all(|v| bound.contains(v)),
        }
    }

    let flush = |plan: &mut Vec<usize>, pending: &mut Vec<usize>, bound: &mut BTreeSet<String>| {
        while let Some(pos) = pending.iter().position(|&i| ready(&body[i], bound)) {
            let i = pending.remove(pos);
            plan.push(i);
            bound.extend(body[i].variables());
        }
    };

    for (i, lit) in body.iter().enumerate() {
        if lit.is_positive_modal() {
            plan.push(i);
            bound.extend(lit.variables());
        } else {
            pending.push(i);
        }
        flush(&mut plan, &mut pending, &mut bound);
    }
    plan.extend(pending);
    plan
}

/// The compiled rules of an ontology together with predicate strata.
#[derive(Debug, Clone)]
pub struct Program {
    pub rules: Vec<CompiledRule>,
    pub strata: usize,
    pub signature: Signature,
    predicate_strata: BTreeMap<String, usize>,
}

impl Program {
    pub fn compile(ontology: &Ontology) -> Result<Self, EngineError> {
        let mut rules = ontology
            .axioms()
            .iter()
            .map(skolemize)
            .collect::<Result<Vec<_>, _>>()?;
        let predicate_strata = stratify(ontology.signature(), &rules)?;
        for r in &mut rules {
            r.stratum = predicate_strata[r.head_predicate()];
        }
        let strata = predicate_strata.values().max().map_or(1, |m| m + 1);
        Ok(Program {
            rules,
            strata,
            signature: ontology.signature().clone(),
            predicate_strata,
        })
    }

    pub fn stratum_of(&self, predicate: &str) -> usize {
        self.predicate_strata.get(predicate).copied().unwrap_or(0)
    }

    pub fn kind_of(&self, predicate: &str) -> Option<PredicateKind> {
        self.signature.kind_of(predicate)
    }

    pub fn rule(&self, name: &str) -> Option<&CompiledRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn rules_in(&self, stratum: usize) -> impl Iterator<Item = &CompiledRule> {
        self.rules.iter().filter(move |r| r.stratum == stratum)
    }
}

/// Minimal stratum per predicate, so that negative dependencies strictly
/// increase the stratum. Fails on a cycle through negation.
pub fn stratify(
    signature: &Signature,
    rules: &[CompiledRule],
) -> Result<BTreeMap<String, usize>, EngineError> {
    let mut graph: DiGraph<String, bool> = DiGraph::new();
    let mut nodes: BTreeMap<String, NodeIndex> = BTreeMap::new();
    let mut node = |g: &mut DiGraph<String, bool>, name: &str| -> NodeIndex {
        *nodes
            .entry(name.to_string())
            .or_insert_with(|| g.add_node(name.to_string()))
    };
    for d in signature.iter() {
        node(&mut graph, &d.name);
    }
    for r in rules {
        let head = node(&mut graph, r.head_predicate());
        for lit in &r.body {
            if let Some(atom) = lit.atom() {
                let body = node(&mut graph, &atom.predicate);
                graph.add_edge(body, head, lit.is_negated());
            }
        }
    }

    let sccs = tarjan_scc(&graph);
    let mut component = vec![0usize; graph.node_count()];
    for (ci, scc) in sccs.iter().enumerate() {
        for n in scc {
            component[n.index()] = ci;
        }
    }
    for scc in &sccs {
        let mut cyclic: BTreeSet<String> = BTreeSet::new();
        for &n in scc {
            for e in graph.edges(n) {
                use petgraph::visit::EdgeRef;
                if *e.weight() && component[e.target().index()] == component[n.index()] {
                    cyclic.extend(scc.iter().map(|m| graph[*m].clone()));
                }
            }
        }
        if !cyclic.is_empty() {
            return Err(EngineError::NegativeCycle(cyclic.into_iter().collect()));
        }
    }

    // tarjan_scc yields components in reverse topological order.
    let mut comp_stratum = vec![0usize; sccs.len()];
    for ci in (0..sccs.len()).rev() {
        let mut s = comp_stratum[ci];
        for &n in &sccs[ci] {
            for e in graph.edges_directed(n, petgraph::Direction::Incoming) {
                use petgraph::visit::EdgeRef;
                let src = component[e.source().index()];
                if src != ci {
                    s = s.max(comp_stratum[src] + usize::from(*e.weight()));
                }
            }
        }
        comp_stratum[ci] = s;
    }
    Ok(nodes
        .into_iter()
        .map(|(name, n)| (name, comp_stratum[component[n.index()]]))
        .collect())
}
