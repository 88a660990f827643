//! Command-line front-end for the theoria engine.
//!
//! [`run`] takes its arguments and standard streams explicitly so the whole
//! surface can be driven from tests; `main` only wires in the process.

mod repl;

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use theoria_core::dsl::{
    parse_goal, parse_programs, parse_query_body, parse_situation_term, DslError,
};
use theoria_core::engine::{AnswersJson, Engine, EngineError, Model, ProofNode};
use theoria_core::kernel::{Fact, KernelError, Ontology, SituationId, Term};
use theoria_core::library::{
    self, AuditorOrientation, ClientPreference, DesignRow, Scenario, StandardType,
};
use theoria_core::store::{parse_mapping_file, FactStore, StoreError, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_EXPECTATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Environment variable that turns off styled output.
pub const NO_COLOR_VAR: &str = "THEORIA_NO_COLOR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Output(_) => EXIT_IO,
            _ => EXIT_USAGE,
        }
    }
}

type CliResult<T = i32> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "theoria",
    version,
    about = "Situation-calculus ontology engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate programs as one ontology.
    Check {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Answer a conjunctive query.
    Query {
        /// Query body, e.g. `holds(accounting_standard(X), S)`.
        query: String,
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        json: bool,
        /// Exit with status 1 unless the answer count matches.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
        /// Attach a proof of each query literal to every answer.
        #[arg(long)]
        proofs: bool,
    },
    /// Print the proof tree of a ground literal.
    Trace {
        /// `holds(atom, situation)`, or `atom @ situation`.
        literal: String,
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        json: bool,
    },
    /// Run the ontology's competency questions.
    Competency {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        json: bool,
    },
    /// Run cells of the standard × orientation design.
    Scenario {
        /// Ontology files to use instead of the bundled auditor ontology.
        programs: Vec<PathBuf>,
        /// Every standard and orientation (the default when no filter is given).
        #[arg(long, conflicts_with_all = ["standard", "auditor"])]
        all: bool,
        #[arg(long)]
        standard: Option<StandardType>,
        /// Auditor orientation.
        #[arg(long)]
        auditor: Option<AuditorOrientation>,
        /// Client preference (default: opportunistic).
        #[arg(long)]
        preference: Option<ClientPreference>,
        #[arg(long)]
        json: bool,
    },
    /// Print a bundled ontology, or write its files into a directory.
    ExportBuiltin {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(library::BUNDLES))]
        name: String,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Interactive session reading commands from standard input.
    Repl {
        #[command(flatten)]
        inputs: Inputs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Expect {
    Sat,
    Unsat,
}

/// Where the ontology and the populated model come from.
#[derive(Debug, Clone, Default, Args)]
pub struct Inputs {
    /// Program files, parsed together as one program.
    programs: Vec<PathBuf>,
    /// Include a bundled ontology (bdi, auditor, scenario).
    #[arg(long, value_name = "NAME",
          value_parser = clap::builder::PossibleValuesParser::new(library::BUNDLES))]
    builtin: Vec<String>,
    /// CSV table to ingest; its file stem names the mapping line to use.
    #[arg(long = "facts", value_name = "CSV")]
    facts: Vec<PathBuf>,
    /// Mapping file, one `table:predicate:col1,col2[:sitcol]` line per table.
    #[arg(long = "map", value_name = "FILE")]
    map: Option<PathBuf>,
    /// Situation for ingested rows without a situation column; for `query`,
    /// also restricts answers to this situation.
    #[arg(long, value_name = "ID")]
    situation: Option<String>,
    /// Populate a design cell: `h1b` or `standard/orientation/preference`.
    /// Implies the bundled auditor ontology when no program is given.
    #[arg(long, value_name = "CELL", value_parser = parse_scenario)]
    scenario: Option<Scenario>,
}

fn parse_scenario(text: &str) -> Result<Scenario, String> {
    if text == "h1b" {
        return Ok(Scenario::h1b());
    }
    let parts: Vec<&str> = text.split('/').collect();
    let [s, o, p] = parts[..] else {
        return Err(format!(
            "expected `h1b` or `standard/orientation/preference`, got `{text}`"
        ));
    };
    Ok(Scenario::new(s.parse()?, o.parse()?, p.parse()?))
}

/// Standard streams and terminal capabilities of one invocation.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
    pub color: bool,
    /// Show REPL prompts.
    pub interactive: bool,
}

impl Io<'_> {
    fn paint(&self, text: &str, ansi: &str) -> String {
        if self.color {
            format!("\x1b[{ansi}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn green(&self, text: &str) -> String {
        self.paint(text, "32")
    }

    fn red(&self, text: &str) -> String {
        self.paint(text, "31")
    }

    fn diagnostic(&mut self, err: &CliError) {
        let label = self.red("error");
        let _ = writeln!(self.stderr, "{label}: {err}");
    }
}

/// Styled output unless disabled by the environment or not on a terminal.
pub fn color_enabled(no_color: Option<OsString>, is_terminal: bool) -> bool {
    is_terminal && no_color.is_none()
}

/// Runs one invocation and returns its exit status.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { io.stderr } else { io.stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command, io) {
        Ok(code) => code,
        Err(err) => {
            io.diagnostic(&err);
            err.exit_code()
        }
    }
}

fn dispatch(command: Command, io: &mut Io<'_>) -> CliResult {
    match command {
        Command::Check { inputs } => cmd_check(&inputs, io),
        Command::Query {
            query,
            inputs,
            json,
            expect,
            proofs,
        } => cmd_query(&inputs, &query, json, expect, proofs, io),
        Command::Trace {
            literal,
            inputs,
            json,
        } => cmd_trace(&inputs, &literal, json, io),
        Command::Competency { inputs, json } => cmd_competency(&inputs, json, io),
        Command::Scenario {
            programs,
            all: _,
            standard,
            auditor,
            preference,
            json,
        } => cmd_scenario(&programs, standard, auditor, preference, json, io),
        Command::ExportBuiltin { name, out } => cmd_export(&name, out.as_deref(), io),
        Command::Repl { inputs } => repl::run(inputs, io),
    }
}

// ---- loading -------------------------------------------------------------

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// A validated ontology, its compiled rules and the populated store.
pub(crate) struct Loaded {
    pub ontology: Ontology,
    pub engine: Engine,
    pub store: FactStore,
}

impl Loaded {
    fn model(&self) -> CliResult<Model<'_>> {
        Ok(self.engine.model(&self.store)?)
    }
}

/// Program sources named by `inputs`, bundles first, in the order given.
fn sources(inputs: &Inputs) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut bundles = inputs.builtin.clone();
    if bundles.is_empty() && inputs.programs.is_empty() && inputs.scenario.is_some() {
        bundles.push("auditor".to_string());
    }
    for name in &bundles {
        let files = library::builtin_files(name)
            .ok_or_else(|| CliError::Usage(format!("unknown bundle `{name}`")))?;
        for (file, text) in files {
            // Bundles overlap (auditor includes bdi); keep each file once.
            if !out.iter().any(|(f, _)| f == file) {
                out.push((file.to_string(), text.to_string()));
            }
        }
    }
    for path in &inputs.programs {
        out.push((path.display().to_string(), read(path)?));
    }
    Ok(out)
}

pub(crate) fn load(inputs: &Inputs, extra: &[(String, String)]) -> CliResult<Loaded> {
    let mut all = sources(inputs)?;
    all.extend(extra.iter().cloned());
    if all.is_empty() {
        return Err(CliError::Usage(
            "no program given (pass .onto files or --builtin NAME)".into(),
        ));
    }
    let (_, ontology) = parse_programs(all.iter().map(|(p, t)| (p.as_str(), t.as_str())))?;
    let engine = Engine::new(&ontology)?;
    let mut store = FactStore::from_ontology(&ontology)?;
    if let Some(scenario) = &inputs.scenario {
        library::populate_scenario(&mut store, scenario)?;
    }
    ingest(inputs, &mut store)?;
    Ok(Loaded {
        ontology,
        engine,
        store,
    })
}

fn ingest(inputs: &Inputs, store: &mut FactStore) -> CliResult<()> {
    if inputs.facts.is_empty() {
        return Ok(());
    }
    let map_path = inputs
        .map
        .as_ref()
        .ok_or_else(|| CliError::Usage("--facts needs a --map file".into()))?;
    let default = SituationId::new(
        inputs
            .situation
            .clone()
            .unwrap_or_else(|| library::BASE_SITUATION.to_string()),
    );
    if !store.contains_situation(&default) {
        store.add_base_situation(default.as_str())?;
    }
    let mappings = parse_mapping_file(&read(map_path)?, &default)?;
    for path in &inputs.facts {
        let bytes = fs::read(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let table = Table::from_reader(&name, bytes.as_slice())?;
        let mut used = false;
        for mapping in mappings.iter().filter(|m| m.table == name) {
            store.ingest_table(&table, mapping)?;
            used = true;
        }
        if !used {
            return Err(CliError::Usage(format!(
                "{}: no mapping line for table `{name}`",
                map_path.display()
            )));
        }
    }
    Ok(())
}

/// Accepts a situation id (`do__audits_a_c__sc`) or term (`do(audits(a, c), sc)`).
pub(crate) fn resolve_situation(store: &FactStore, text: &str) -> CliResult<SituationId> {
    let id = SituationId::new(text.trim());
    if store.contains_situation(&id) {
        return Ok(id);
    }
    let term = parse_situation_term(text)?;
    Ok(store.resolve(&term)?)
}

/// Parses `holds(atom, sit)` / `occurs(atom, sit)` or `atom @ sit` into a
/// fact of the store.
pub(crate) fn parse_trace_target(loaded: &Loaded, text: &str) -> CliResult<Fact> {
    let (modality, atom, sit) = match text.rsplit_once('@') {
        Some((goal, sit)) => {
            let (modality, atom) = parse_goal(goal.trim())?;
            (modality, atom, resolve_situation(&loaded.store, sit)?)
        }
        None => {
            let body = parse_query_body(text)?;
            let [lit] = &body[..] else {
                return Err(CliError::Usage(format!(
                    "expected one literal, got `{text}`"
                )));
            };
            let (Some(modality), Some(atom), Some(sit), false) = (
                lit.modality(),
                lit.atom(),
                lit.situation(),
                lit.is_negated(),
            ) else {
                return Err(CliError::Usage(format!(
                    "expected holds(...) or occurs(...), got `{text}`"
                )));
            };
            let sit = match sit {
                Term::Constant(c) => resolve_situation(&loaded.store, c)?,
                other => loaded.store.resolve(other)?,
            };
            (modality, atom.clone(), sit)
        }
    };
    let fact = Fact {
        modality,
        atom,
        situation: sit,
    };
    let term = loaded
        .store
        .term_of(&fact.situation)
        .cloned()
        .ok_or_else(|| EngineError::UnknownSituation(fact.situation.clone()))?;
    let lit = fact.to_literal(term);
    if !lit.is_ground() {
        return Err(EngineError::NonGround(lit.to_string()).into());
    }
    loaded.ontology.signature().check_literal(&lit)?;
    Ok(fact)
}

// ---- commands ------------------------------------------------------------

fn write_json<T: Serialize>(io: &mut Io<'_>, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    writeln!(io.stdout, "{text}")?;
    Ok(())
}

fn cmd_check(inputs: &Inputs, io: &mut Io<'_>) -> CliResult {
    let loaded = load(inputs, &[])?;
    let o = &loaded.ontology;
    writeln!(
        io.stdout,
        "{}: {} declarations, {} axioms, {} facts, {} questions, {} strata, {} situations",
        io.green("ok"),
        o.signature().user_declarations().count(),
        o.axioms().len(),
        o.facts().len(),
        o.questions().len(),
        loaded.engine.program().strata,
        loaded.store.situation_count(),
    )?;
    Ok(EXIT_OK)
}

fn cmd_query(
    inputs: &Inputs,
    text: &str,
    json: bool,
    expect: Option<Expect>,
    with_proofs: bool,
    io: &mut Io<'_>,
) -> CliResult {
    let loaded = load(inputs, &[])?;
    let body = parse_query_body(text).map_err(|e| CliError::Usage(format!("query:{e}")))?;
    let model = loaded.model()?;
    let mut answers = model.query(&body)?;
    if let Some(sit) = &inputs.situation {
        let id = resolve_situation(&loaded.store, sit)?;
        answers.retain(|a| a.situation.as_ref() == Some(&id));
    }
    if json {
        let out = AnswersJson {
            answers: answers.iter().map(|a| a.to_json(with_proofs)).collect(),
        };
        write_json(io, &out)?;
    } else {
        for a in &answers {
            writeln!(io.stdout, "{a}")?;
            if with_proofs {
                for p in &a.proofs {
                    write!(io.stdout, "{}", indent(&p.render()))?;
                }
            }
        }
        if answers.is_empty() {
            writeln!(io.stderr, "no answers")?;
        }
    }
    let met = match expect {
        None => true,
        Some(Expect::Sat) => !answers.is_empty(),
        Some(Expect::Unsat) => answers.is_empty(),
    };
    Ok(if met { EXIT_OK } else { EXIT_EXPECTATION })
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}\n")).collect()
}

/// Writes a proof, or "not derivable". Returns whether a proof was found.
pub(crate) fn write_trace(
    proof: Option<&ProofNode>,
    json: bool,
    io: &mut Io<'_>,
) -> CliResult<bool> {
    match (proof, json) {
        (Some(p), true) => write_json(io, &p.to_json())?,
        (Some(p), false) => write!(io.stdout, "{}", p.render())?,
        (None, true) => writeln!(io.stdout, "null")?,
        (None, false) => writeln!(io.stdout, "not derivable")?,
    }
    Ok(proof.is_some())
}

fn cmd_trace(inputs: &Inputs, text: &str, json: bool, io: &mut Io<'_>) -> CliResult {
    let loaded = load(inputs, &[])?;
    let fact = parse_trace_target(&loaded, text)?;
    let model = loaded.model()?;
    let proof = model.prove(&fact);
    let found = write_trace(proof.as_ref(), json, io)?;
    Ok(if found { EXIT_OK } else { EXIT_EXPECTATION })
}

fn cmd_competency(inputs: &Inputs, json: bool, io: &mut Io<'_>) -> CliResult {
    let loaded = load(inputs, &[])?;
    let report = loaded
        .model()?
        .check_competency(loaded.ontology.questions());
    if json {
        write_json(io, &report)?;
    } else {
        for r in &report.results {
            let status = if r.passed {
                io.green("PASS")
            } else {
                io.red("FAIL")
            };
            let expect = match r.expect {
                Some(e) => format!("expect {e}, "),
                None => String::new(),
            };
            let plural = if r.answers == 1 { "" } else { "s" };
            write!(
                io.stdout,
                "{status} {} ({expect}{} answer{plural})",
                r.name, r.answers
            )?;
            match &r.error {
                Some(e) => writeln!(io.stdout, ": {e}")?,
                None => writeln!(io.stdout)?,
            }
        }
        let passed = report.results.iter().filter(|r| r.passed).count();
        writeln!(io.stdout, "{passed}/{} passed", report.results.len())?;
    }
    Ok(if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_EXPECTATION
    })
}

#[derive(Serialize)]
struct DesignJson<'a> {
    rows: &'a [DesignRow],
}

fn cmd_scenario(
    programs: &[PathBuf],
    standard: Option<StandardType>,
    auditor: Option<AuditorOrientation>,
    preference: Option<ClientPreference>,
    json: bool,
    io: &mut Io<'_>,
) -> CliResult {
    let ontology = if programs.is_empty() {
        library::load_builtin("auditor").map_err(|e| CliError::Usage(e.to_string()))?
    } else {
        let inputs = Inputs {
            programs: programs.to_vec(),
            ..Inputs::default()
        };
        load(&inputs, &[])?.ontology
    };
    let preference = preference.unwrap_or(ClientPreference::Opportunistic);
    let cells: Vec<Scenario> = Scenario::design(preference)
        .into_iter()
        .filter(|s| standard.is_none_or(|x| x == s.standard))
        .filter(|s| auditor.is_none_or(|x| x == s.orientation))
        .collect();
    let rows = library::run_scenarios(&ontology, &cells)?;
    if json {
        return write_json(io, &DesignJson { rows: &rows }).map(|_| EXIT_OK);
    }
    let headers = [
        "standard",
        "orientation",
        "preference",
        "enforces_nonopportunistic",
    ];
    let cell_text = |r: &DesignRow| {
        [
            r.scenario.standard.to_string(),
            r.scenario.orientation.to_string(),
            r.scenario.preference.to_string(),
            r.enforces_nonopportunistic.to_string(),
        ]
    };
    let mut widths = headers.map(str::len);
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(cell_text(r)) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: [String; 4]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    writeln!(io.stdout, "{}", line(headers.map(String::from)))?;
    for r in &rows {
        let mut text = line(cell_text(r));
        if r.enforces_nonopportunistic {
            text = io.green(&text);
        }
        writeln!(io.stdout, "{text}")?;
    }
    Ok(EXIT_OK)
}

fn cmd_export(name: &str, out: Option<&Path>, io: &mut Io<'_>) -> CliResult {
    let files = library::builtin_files(name)
        .ok_or_else(|| CliError::Usage(format!("unknown bundle `{name}`")))?;
    match out {
        None => {
            let texts: Vec<&str> = files.iter().map(|(_, t)| *t).collect();
            write!(io.stdout, "{}", texts.join("\n"))?;
        }
        Some(dir) => {
            let io_err = |source| CliError::Io {
                path: dir.to_path_buf(),
                source,
            };
            fs::create_dir_all(dir).map_err(io_err)?;
            for (file, text) in files {
                let path = dir.join(file);
                fs::write(&path, text).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                writeln!(io.stdout, "{}", path.display())?;
            }
        }
    }
    Ok(EXIT_OK)
}
