//! Python bindings: `theoria.Ontology`, `theoria.Model` and `theoria.run_design`.
//!
//! Structured results (answers, proofs, reports) cross the boundary as plain
//! dicts and lists built from the engine's JSON forms.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use theoria_core::dsl::{parse_ontology, parse_query_body};
use theoria_core::engine::{AnswersJson, Engine};
use theoria_core::kernel::{Fact, SituationId, Term};
use theoria_core::library::{self, ClientPreference, Scenario};
use theoria_core::store::{FactStore, IngestionMapping, Table};

create_exception!(theoria, TheoriaError, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    TheoriaError::new_err(e.to_string())
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A validated set of declarations, axioms, facts and competency questions.
#[pyclass(module = "theoria", frozen)]
struct Ontology {
    inner: theoria_core::kernel::Ontology,
}

#[pymethods]
impl Ontology {
    /// Parses program text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Ontology {
            inner: parse_ontology(text).map_err(err)?,
        })
    }

    /// One of the bundled ontologies: "bdi", "auditor" or "scenario".
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Ok(Ontology {
            inner: library::load_builtin(name).map_err(err)?,
        })
    }

    #[getter]
    fn axioms(&self) -> Vec<String> {
        self.inner.axioms().iter().map(|a| a.name.clone()).collect()
    }

    #[getter]
    fn questions(&self) -> Vec<String> {
        self.inner
            .questions()
            .iter()
            .map(|q| q.name.clone())
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Ontology(axioms={}, facts={}, questions={})",
            self.inner.axioms().len(),
            self.inner.facts().len(),
            self.inner.questions().len()
        )
    }
}

/// A populated store under one ontology.
#[pyclass(module = "theoria")]
struct Model {
    ontology: theoria_core::kernel::Ontology,
    engine: Engine,
    store: FactStore,
}

impl Model {
    fn build(ontology: theoria_core::kernel::Ontology, store: FactStore) -> PyResult<Self> {
        Ok(Model {
            engine: Engine::new(&ontology).map_err(err)?,
            ontology,
            store,
        })
    }

    fn situation(&self, text: &str) -> PyResult<SituationId> {
        let id = SituationId::new(text);
        if self.store.contains_situation(&id) {
            return Ok(id);
        }
        let term = theoria_core::dsl::parse_situation_term(text).map_err(err)?;
        self.store.resolve(&term).map_err(err)
    }

    fn saturated(&mut self) -> PyResult<theoria_core::engine::Model<'_>> {
        self.engine.saturate(&mut self.store).map_err(err)?;
        self.engine.model(&self.store).map_err(err)
    }
}

#[pymethods]
impl Model {
    /// A store holding the ontology's own facts.
    #[new]
    fn new(ontology: &Ontology) -> PyResult<Self> {
        let store = FactStore::from_ontology(&ontology.inner).map_err(err)?;
        Model::build(ontology.inner.clone(), store)
    }

    /// One design cell over the bundled auditor ontology.
    #[staticmethod]
    #[pyo3(signature = (standard, orientation, preference = "opportunistic"))]
    fn scenario(standard: &str, orientation: &str, preference: &str) -> PyResult<Self> {
        let scenario = Scenario::new(
            standard.parse().map_err(err)?,
            orientation.parse().map_err(err)?,
            preference.parse().map_err(err)?,
        );
        let ontology = library::load_builtin("auditor").map_err(err)?;
        Model::build(ontology, library::build_scenario(&scenario))
    }

    /// Adds a root situation and returns its id.
    fn add_situation(&mut self, name: &str) -> PyResult<String> {
        Ok(self
            .store
            .add_base_situation(name)
            .map_err(err)?
            .to_string())
    }

    /// Asserts a ground `holds(...)`/`occurs(...)` literal. Returns whether
    /// the fact was new.
    fn assert_fact(&mut self, text: &str) -> PyResult<bool> {
        let body = parse_query_body(text).map_err(err)?;
        let [lit] = &body[..] else {
            return Err(err(format!("expected one literal, got `{text}`")));
        };
        self.store.assert_literal(lit).map_err(err)
    }

    /// Ingests CSV text through a `table:predicate:cols[:sitcol]` mapping
    /// line. Returns the number of new facts.
    #[pyo3(signature = (csv, mapping, situation = "sc"))]
    fn ingest_csv(&mut self, csv: &str, mapping: &str, situation: &str) -> PyResult<usize> {
        let default = SituationId::new(situation);
        if !self.store.contains_situation(&default) {
            self.store.add_base_situation(situation).map_err(err)?;
        }
        let mapping = IngestionMapping::parse(mapping, &default).map_err(err)?;
        let table = Table::from_reader(&mapping.table, csv.as_bytes()).map_err(err)?;
        self.store.ingest_table(&table, &mapping).map_err(err)
    }

    fn situations(&self) -> Vec<String> {
        self.store
            .situations()
            .map(|s| s.id().to_string())
            .collect()
    }

    /// Derived (not asserted) facts in a situation, sorted.
    fn saturate(&mut self, situation: &str) -> PyResult<Vec<String>> {
        let id = self.situation(situation)?;
        let model = self.saturated()?;
        let derived = model.derived_in(&id).map_err(err)?;
        Ok(derived.iter().map(ToString::to_string).collect())
    }

    /// Answers as `{"bindings": {...}, "situation": ..., "proofs": [...]}` dicts.
    #[pyo3(signature = (text, proofs = false))]
    fn query<'py>(
        &mut self,
        py: Python<'py>,
        text: &str,
        proofs: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let body = parse_query_body(text).map_err(err)?;
        let answers = self.saturated()?.query(&body).map_err(err)?;
        let json = AnswersJson {
            answers: answers.iter().map(|a| a.to_json(proofs)).collect(),
        };
        to_py(py, &json)?.get_item("answers")
    }

    /// Proof tree of `holds(atom, situation)` as nested dicts, or None.
    fn prove<'py>(
        &mut self,
        py: Python<'py>,
        literal: &str,
    ) -> PyResult<Option<Bound<'py, PyAny>>> {
        let body = parse_query_body(literal).map_err(err)?;
        let [lit] = &body[..] else {
            return Err(err(format!("expected one literal, got `{literal}`")));
        };
        let (Some(modality), Some(atom), Some(sit)) = (lit.modality(), lit.atom(), lit.situation())
        else {
            return Err(err(format!(
                "expected holds(...) or occurs(...), got `{literal}`"
            )));
        };
        let situation = match sit {
            Term::Constant(c) => self.situation(c)?,
            other => self.store.resolve(other).map_err(err)?,
        };
        let fact = Fact {
            modality,
            atom: atom.clone(),
            situation,
        };
        let model = self.saturated()?;
        match model.prove(&fact) {
            Some(p) => Ok(Some(to_py(py, &p.to_json())?)),
            None => Ok(None),
        }
    }

    /// Runs the ontology's competency questions.
    fn competency<'py>(&mut self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let questions = self.ontology.questions().to_vec();
        let report = self.saturated()?.check_competency(&questions);
        to_py(py, &report)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(situations={}, facts={})",
            self.store.situation_count(),
            self.store.base_count()
        )
    }
}

/// The six standard × orientation cells for one client preference.
#[pyfunction]
#[pyo3(signature = (preference = "opportunistic"))]
fn run_design<'py>(py: Python<'py>, preference: &str) -> PyResult<Bound<'py, PyAny>> {
    let preference: ClientPreference = preference.parse().map_err(err)?;
    let ontology = library::load_builtin("auditor").map_err(err)?;
    let rows = library::run_design_with(&ontology, preference).map_err(err)?;
    to_py(py, &rows)
}

#[pymodule]
fn theoria(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Ontology>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(run_design, m)?)?;
    m.add("TheoriaError", m.py().get_type::<TheoriaError>())?;
    Ok(())
}
