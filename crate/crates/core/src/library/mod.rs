//! Bundled ontologies, the audit scenario fixture and the 2×3 design
//! harness (standard type × auditor orientation).

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::dsl::{parse_programs, DslError};
use crate::engine::{Engine, EngineError};
use crate::kernel::{Atom, Fact, Ontology, SituationId, Term};
use crate::store::FactStore;

pub const BDI_SOURCE: &str = include_str!("../../ontologies/bdi.onto");
pub const AUDITOR_SOURCE: &str = include_str!("../../ontologies/auditor.onto");
pub const SCENARIO_SOURCE: &str = include_str!("../../ontologies/scenario.onto");

/// Bundle names accepted by [`load_builtin`].
pub const BUNDLES: &[&str] = &["bdi", "auditor", "scenario"];

pub const AUDITOR: &str = "auditor1";
pub const CLIENT: &str = "client1";
pub const STANDARD: &str = "ifrs";
pub const BASE_SITUATION: &str = "sc";

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("unknown bundle `{0}` (expected one of: bdi, auditor, scenario)")]
    UnknownBundle(String),
    #[error(transparent)]
    Dsl(#[from] DslError),
}

/// The files making up a bundle, in load order.
pub fn builtin_files(name: &str) -> Option<Vec<(&'static str, &'static str)>> {
    let bdi = ("bdi.onto", BDI_SOURCE);
    let auditor = ("auditor.onto", AUDITOR_SOURCE);
    let scenario = ("scenario.onto", SCENARIO_SOURCE);
    match name {
        "bdi" => Some(vec![bdi]),
        "auditor" => Some(vec![bdi, auditor]),
        "scenario" => Some(vec![bdi, auditor, scenario]),
        _ => None,
    }
}

/// Parses and validates a bundle. `auditor` includes the BDI terminology;
/// `scenario` is the auditor bundle plus the scenario facts.
pub fn load_builtin(name: &str) -> Result<Ontology, LibraryError> {
    let files = builtin_files(name).ok_or_else(|| LibraryError::UnknownBundle(name.to_string()))?;
    let (_, ontology) = parse_programs(files)?;
    Ok(ontology)
}

fn auditor_ontology() -> &'static Ontology {
    static CELL: OnceLock<Ontology> = OnceLock::new();
    CELL.get_or_init(|| load_builtin("auditor").expect("bundled auditor ontology is valid"))
}

macro_rules! closed_enum {
    ($(#[$meta:meta])* $name:ident, $label:literal, { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];
            pub const NAMES: &'static [&'static str] = &[$($text),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!(
                        "invalid {} `{s}` (valid values: {})",
                        $label,
                        Self::NAMES.join(", ")
                    )),
                }
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }
    };
}

closed_enum!(StandardType, "standard type", {
    RulesBased => "rules_based",
    PrinciplesBased => "principles_based",
});

closed_enum!(AuditorOrientation, "auditor orientation", {
    RulesOriented => "rules_oriented",
    PrinciplesOriented => "principles_oriented",
    ClientOriented => "client_oriented",
});

closed_enum!(ClientPreference, "client preference", {
    Opportunistic => "opportunistic",
    Nonopportunistic => "nonopportunistic",
});

/// One cell of the experimental design.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Scenario {
    pub name: String,
    pub standard: StandardType,
    pub orientation: AuditorOrientation,
    pub preference: ClientPreference,
}

impl Scenario {
    pub fn new(
        standard: StandardType,
        orientation: AuditorOrientation,
        preference: ClientPreference,
    ) -> Self {
        Scenario {
            name: format!("{standard}/{orientation}/{preference}"),
            standard,
            orientation,
            preference,
        }
    }

    /// The principles-based, principles-oriented, opportunistic cell.
    pub fn h1b() -> Self {
        Scenario::new(
            StandardType::PrinciplesBased,
            AuditorOrientation::PrinciplesOriented,
            ClientPreference::Opportunistic,
        )
    }

    /// All six standard × orientation cells with one client preference.
    pub fn design(preference: ClientPreference) -> Vec<Scenario> {
        let mut out = Vec::new();
        for &s in StandardType::ALL {
            for &o in AuditorOrientation::ALL {
                out.push(Scenario::new(s, o, preference));
            }
        }
        out
    }
}

fn c(s: &str) -> Term {
    Term::constant(s)
}

/// The audit action of every scenario.
pub fn audit_action() -> Atom {
    Atom::new("audits", vec![c(AUDITOR), c(CLIENT)])
}

/// The fact whose derivability is the design's outcome.
pub fn enforcement_fact(sit: &SituationId) -> Fact {
    Fact::holds(
        Atom::new(
            "enforces_preferred_treatment",
            vec![c(AUDITOR), c("nonopportunistic")],
        ),
        sit,
    )
}

/// Adds a scenario's facts to a store whose signature covers the auditor
/// ontology. Returns the post-audit situation.
pub fn populate_scenario(
    store: &mut FactStore,
    scenario: &Scenario,
) -> Result<SituationId, crate::store::StoreError> {
    let sc = store.add_base_situation(BASE_SITUATION)?;
    store.assert_fact(Fact::holds(
        Atom::new(
            "client_preferred_treatment",
            vec![c(CLIENT), c(scenario.preference.as_str())],
        ),
        &sc,
    ))?;
    let s = store.successor(audit_action(), &sc)?;
    for atom in [
        Atom::new("accounting_standard", vec![c(STANDARD)]),
        Atom::new(
            "accounting_standard_type",
            vec![c(STANDARD), c(scenario.standard.as_str())],
        ),
        Atom::new("auditor", vec![c(AUDITOR)]),
        Atom::new(
            "has_auditor_orientation",
            vec![c(AUDITOR), c(scenario.orientation.as_str())],
        ),
    ] {
        store.assert_fact(Fact::holds(atom, &s))?;
    }
    Ok(s)
}

/// A fresh store holding one scenario: `sc` with the client preference and
/// `do(audits(auditor1, client1), sc)` with the audit facts.
pub fn build_scenario(scenario: &Scenario) -> FactStore {
    let mut store = FactStore::for_ontology(auditor_ontology());
    populate_scenario(&mut store, scenario).expect("scenario facts fit the auditor terminology");
    store
}

/// The post-audit situation id of every scenario store.
pub fn audited_situation() -> SituationId {
    let sc = crate::kernel::Situation::base(BASE_SITUATION).expect("valid name");
    crate::kernel::Situation::successor(audit_action(), &sc)
        .expect("ground action")
        .id()
        .clone()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DesignRow {
    pub scenario: Scenario,
    pub enforces_nonopportunistic: bool,
}

/// Runs the six standard × orientation cells with an opportunistic client.
pub fn run_design(ontology: &Ontology) -> Result<Vec<DesignRow>, EngineError> {
    run_design_with(ontology, ClientPreference::Opportunistic)
}

pub fn run_design_with(
    ontology: &Ontology,
    preference: ClientPreference,
) -> Result<Vec<DesignRow>, EngineError> {
    run_scenarios(ontology, &Scenario::design(preference))
}

/// Builds and saturates each scenario, recording whether the enforcement
/// fact is derived.
pub fn run_scenarios(
    ontology: &Ontology,
    scenarios: &[Scenario],
) -> Result<Vec<DesignRow>, EngineError> {
    let engine = Engine::new(ontology)?;
    scenarios
        .iter()
        .map(|scenario| {
            let mut store = build_scenario(scenario);
            engine.saturate(&mut store)?;
            let model = engine.model(&store)?;
            Ok(DesignRow {
                scenario: scenario.clone(),
                enforces_nonopportunistic: model.holds(&enforcement_fact(&audited_situation())),
            })
        })
        .collect()
}
