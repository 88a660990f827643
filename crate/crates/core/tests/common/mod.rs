//! Seeded generator of random stratified programs written in the DSL.
//!
//! Bounds: at most 6 predicates (one of them the action `act/1`), at most 8
//! constants and at most 10 rules. Predicates get a level and a rule may only
//! negate predicates of a strictly lower level, so every program stratifies.
//! Existential heads only target a predicate that no rule body reads, so
//! Skolem terms never nest.

#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use theoria_core::dsl::parse_ontology;
use theoria_core::kernel::Ontology;
use theoria_core::store::FactStore;

#[derive(Debug, Clone)]
struct Pred {
    name: String,
    arity: usize,
    kind: &'static str,
    level: usize,
}

pub struct Case {
    pub seed: u64,
    pub text: String,
    pub ontology: Ontology,
    pub store: FactStore,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn case(seed: u64) -> Case {
    let text = random_program(&mut rng(seed));
    let ontology = parse_ontology(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{text}"));
    let store =
        FactStore::from_ontology(&ontology).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{text}"));
    Case {
        seed,
        text,
        ontology,
        store,
    }
}

pub fn random_program(rng: &mut ChaCha8Rng) -> String {
    let n_preds = rng.random_range(2..=5);
    let n_consts = rng.random_range(1..=8);
    let n_rules = rng.random_range(0..=10);
    let consts: Vec<String> = (0..n_consts).map(|i| format!("c{i}")).collect();

    let mut preds: Vec<Pred> = (0..n_preds)
        .map(|i| Pred {
            name: format!("p{i}"),
            arity: rng.random_range(0..=2),
            kind: if rng.random_bool(0.2) {
                "rigid"
            } else {
                "fluent"
            },
            level: rng.random_range(0..=2),
        })
        .collect();
    // The last predicate may serve as the target of existential heads; it is
    // never read by a rule body.
    let sink = if n_preds >= 3 && rng.random_bool(0.5) {
        let p = preds.last_mut().unwrap();
        p.arity = p.arity.max(1);
        Some(p.name.clone())
    } else {
        None
    };

    let mut out = String::new();
    for p in &preds {
        out.push_str(&format!("decl {}/{} kind {}.\n", p.name, p.arity, p.kind));
    }
    out.push_str("decl act/1 kind action.\n");

    // Situation forest: s0, s1 and a few successors.
    let mut sits: Vec<String> = vec!["s0".into(), "s1".into()];
    let n_succ = rng.random_range(0..=3);
    for _ in 0..n_succ {
        let parent = sits.choose(rng).unwrap().clone();
        let c = consts.choose(rng).unwrap();
        let child = format!("do(act({c}), {parent})");
        if !sits.contains(&child) {
            out.push_str(&format!("fact occurs(act({c}), {parent}).\n"));
            sits.push(child);
        }
    }

    let n_facts = rng.random_range(0..=12);
    for _ in 0..n_facts {
        let p = preds.choose(rng).unwrap();
        let args: Vec<String> = (0..p.arity)
            .map(|_| consts.choose(rng).unwrap().clone())
            .collect();
        let sit = sits.choose(rng).unwrap();
        out.push_str(&format!("fact holds({}, {sit}).\n", atom(&p.name, &args)));
    }
    if n_succ > 0 && rng.random_bool(0.4) {
        let p = preds.choose(rng).unwrap();
        let c = consts.choose(rng).unwrap();
        let parent = sits.choose(rng).unwrap();
        out.push_str(&format!(
            "fact holds(clips(act({c}), {}), {parent}).\n",
            p.name
        ));
    }

    let readable: Vec<Pred> = preds
        .iter()
        .filter(|p| Some(&p.name) != sink.as_ref())
        .cloned()
        .collect();
    for r in 0..n_rules {
        if let Some(rule) = random_rule(rng, r, &preds, &readable, sink.as_deref(), &consts, &sits)
        {
            out.push_str(&rule);
        }
    }
    out
}

fn atom(name: &str, args: &[String]) -> String {
    if args.is_empty() {
        name.to_string()
    } else {
        format!("{name}({})", args.join(", "))
    }
}

fn random_rule(
    rng: &mut ChaCha8Rng,
    index: usize,
    preds: &[Pred],
    readable: &[Pred],
    sink: Option<&str>,
    consts: &[String],
    sits: &[String],
) -> Option<String> {
    let existential = sink.is_some() && rng.random_bool(0.3);
    let head = if existential {
        preds
            .iter()
            .find(|p| Some(p.name.as_str()) == sink)?
            .clone()
    } else {
        preds.choose(rng)?.clone()
    };
    let positives: Vec<&Pred> = readable.iter().filter(|p| p.level <= head.level).collect();
    let negatives: Vec<&Pred> = readable.iter().filter(|p| p.level < head.level).collect();
    if positives.is_empty() {
        return None;
    }

    let var_pool = ["X", "Y", "Z"];
    let transition = rng.random_bool(0.35);
    let mut body: Vec<String> = Vec::new();
    let mut bound: Vec<String> = Vec::new();

    let n_pos = rng.random_range(1..=3);
    for i in 0..n_pos {
        let p = positives.choose(rng).unwrap();
        let args: Vec<String> = (0..p.arity)
            .map(|_| {
                if rng.random_bool(0.75) {
                    let v = *var_pool.choose(rng).unwrap();
                    bind(v, &mut bound);
                    v.to_string()
                } else {
                    consts.choose(rng).unwrap().clone()
                }
            })
            .collect();
        let sit = if transition && i == 0 {
            "Sc".to_string()
        } else if rng.random_bool(0.1) {
            sits.choose(rng).unwrap().clone()
        } else {
            "S".to_string()
        };
        if sit == "S" || sit == "Sc" {
            bind(&sit, &mut bound);
        }
        body.push(format!("holds({}, {sit})", atom(&p.name, &args)));
    }
    if !bound.iter().any(|b| b == "S") {
        let p = positives.choose(rng).unwrap();
        let args: Vec<String> = (0..p.arity)
            .map(|_| consts.choose(rng).unwrap().clone())
            .collect();
        body.push(format!("holds({}, S)", atom(&p.name, &args)));
        bind("S", &mut bound);
    }
    let arg_vars: Vec<String> = bound
        .iter()
        .filter(|v| var_pool.contains(&v.as_str()))
        .cloned()
        .collect();

    if transition {
        let action_arg = match arg_vars.choose(rng) {
            Some(v) if rng.random_bool(0.6) => v.clone(),
            _ => consts.choose(rng).unwrap().clone(),
        };
        if rng.random_bool(0.3) {
            body.push(format!("occurs(act({action_arg}), Sc)"));
        }
        body.push(format!("S = do(act({action_arg}), Sc)"));
    }

    if !negatives.is_empty() && rng.random_bool(0.4) {
        let p = negatives.choose(rng).unwrap();
        let args: Vec<String> = (0..p.arity)
            .map(|_| match arg_vars.choose(rng) {
                Some(v) if rng.random_bool(0.7) => v.clone(),
                _ => consts.choose(rng).unwrap().clone(),
            })
            .collect();
        let sit = if transition && rng.random_bool(0.5) {
            "Sc"
        } else {
            "S"
        };
        let at = rng.random_range(0..=body.len());
        body.insert(at, format!("not holds({}, {sit})", atom(&p.name, &args)));
    }

    let mut head_args: Vec<String> = (0..head.arity)
        .map(|_| match arg_vars.choose(rng) {
            Some(v) if rng.random_bool(0.7) => v.clone(),
            _ => consts.choose(rng).unwrap().clone(),
        })
        .collect();
    let mut exists = String::new();
    if existential {
        let i = rng.random_range(0..head_args.len());
        head_args[i] = "B".to_string();
        exists = "exists B: ".to_string();
    }
    let head_sit = if transition && rng.random_bool(0.3) {
        "Sc"
    } else {
        "S"
    };

    let mut universals: Vec<String> = Vec::new();
    for lit in &body {
        for v in ["X", "Y", "Z", "S", "Sc"] {
            if mentions(lit, v) && !universals.iter().any(|u| u == v) {
                universals.push(v.to_string());
            }
        }
    }
    Some(format!(
        "axiom r{index}: forall {}:\n    {}\n    -> {exists}holds({}, {head_sit}).\n",
        universals.join(", "),
        body.join("\n    & "),
        atom(&head.name, &head_args)
    ))
}

fn bind(v: &str, bound: &mut Vec<String>) {
    if !bound.iter().any(|b| b == v) {
        bound.push(v.to_string());
    }
}

/// Whole-word occurrence of a variable in literal text.
fn mentions(text: &str, var: &str) -> bool {
    text.split(|c: char| !c.is_ascii_alphanumeric() && c != '_')
        .any(|w| w == var)
}
