use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

use super::{FactStore, StoreError};
use crate::kernel::{is_constant_symbol, Atom, Fact, KernelError, SituationId, Term};

/// A header row plus data rows, as read from CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: Vec<String>, rows: Vec<Vec<String>>) -> Self {
        Table {
            name: name.into(),
            header,
            rows,
        }
    }

    pub fn from_reader(name: impl Into<String>, reader: impl Read) -> Result<Self, StoreError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::Headers)
            .from_reader(reader);
        let header = rdr
            .headers()
            .map_err(|e| StoreError::Csv(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| StoreError::Csv(e.to_string()))?;
            rows.push(rec.iter().map(str::to_string).collect());
        }
        Ok(Table::new(name, header, rows))
    }

    /// Reads a CSV file; the table is named after the file stem.
    pub fn from_path(path: &Path) -> Result<Self, StoreError> {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let file = std::fs::File::open(path)
            .map_err(|e| StoreError::Csv(format!("{}: {e}", path.display())))?;
        Self::from_reader(name, file)
    }

    fn column(&self, name: &str) -> Result<usize, StoreError> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| StoreError::MissingColumn {
                table: self.name.clone(),
                column: name.to_string(),
            })
    }
}

/// Maps the columns of a table onto the arguments of one predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestionMapping {
    pub table: String,
    pub predicate: String,
    pub columns: Vec<String>,
    pub situation_column: Option<String>,
    pub default_situation: SituationId,
}

impl IngestionMapping {
    pub fn new(
        table: impl Into<String>,
        predicate: impl Into<String>,
        columns: Vec<String>,
        default_situation: impl Into<SituationId>,
    ) -> Self {
        IngestionMapping {
            table: table.into(),
            predicate: predicate.into(),
            columns,
            situation_column: None,
            default_situation: default_situation.into(),
        }
    }

    pub fn with_situation_column(mut self, column: impl Into<String>) -> Self {
        self.situation_column = Some(column.into());
        self
    }

    /// Parses `table:predicate:col1,col2[:situation_column]`.
    pub fn parse(line: &str, default_situation: &SituationId) -> Result<Self, StoreError> {
        let bad = || StoreError::InvalidMapping(line.to_string());
        let parts: Vec<&str> = line.trim().split(':').map(str::trim).collect();
        if !(3..=4).contains(&parts.len()) || parts[..3].iter().any(|p| p.is_empty()) {
            return Err(bad());
        }
        let columns: Vec<String> = parts[2].split(',').map(|c| c.trim().to_string()).collect();
        if columns.iter().any(String::is_empty) {
            return Err(bad());
        }
        let mut m = IngestionMapping::new(parts[0], parts[1], columns, default_situation);
        if let Some(col) = parts.get(3) {
            if col.is_empty() {
                return Err(bad());
            }
            m.situation_column = Some(col.to_string());
        }
        Ok(m)
    }
}

/// One mapping per non-empty line; `%` starts a comment.
pub fn parse_mapping_file(
    text: &str,
    default_situation: &SituationId,
) -> Result<Vec<IngestionMapping>, StoreError> {
    text.lines()
        .map(|l| l.split('%').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| IngestionMapping::parse(l, default_situation))
        .collect()
}

/// Trim, lowercase, collapse each run of characters outside `[a-z0-9]` to
/// `_`, then strip leading and trailing `_`.
pub fn normalize_cell(cell: &str) -> String {
    let mut out = String::with_capacity(cell.len());
    let mut pending = false;
    for ch in cell.trim().to_lowercase().chars() {
        if ch.is_ascii_lowercase() || ch.is_ascii_digit() {
            if pending && !out.is_empty() {
                out.push('_');
            }
            pending = false;
            out.push(ch);
        } else {
            pending = true;
        }
    }
    out
}

pub(super) fn ingest_table(
    store: &mut FactStore,
    table: &Table,
    mapping: &IngestionMapping,
) -> Result<usize, StoreError> {
    let decl = store
        .signature()
        .get(&mapping.predicate)
        .ok_or_else(|| KernelError::UndeclaredPredicate {
            name: mapping.predicate.clone(),
            arity: mapping.columns.len(),
        })?
        .clone();
    if decl.arity != mapping.columns.len() {
        return Err(StoreError::MappingArity {
            predicate: mapping.predicate.clone(),
            arity: decl.arity,
            found: mapping.columns.len(),
        });
    }
    let cols = mapping
        .columns
        .iter()
        .map(|c| table.column(c))
        .collect::<Result<Vec<_>, _>>()?;
    let sit_col = mapping
        .situation_column
        .as_deref()
        .map(|c| table.column(c))
        .transpose()?;

    // Validate every row before touching the store.
    let mut facts = BTreeSet::new();
    for (i, row) in table.rows.iter().enumerate() {
        let row_no = i + 1;
        let cell = |j: usize| row.get(j).map(String::as_str).unwrap_or("");
        let mut args = Vec::with_capacity(cols.len());
        for (&j, name) in cols.iter().zip(&mapping.columns) {
            let value = normalize_cell(cell(j));
            if !is_constant_symbol(&value) || value == "do" {
                return Err(StoreError::InvalidCell {
                    table: table.name.clone(),
                    row: row_no,
                    column: name.clone(),
                    value: cell(j).to_string(),
                });
            }
            args.push(Term::constant(value));
        }
        let situation = match sit_col {
            Some(j) => {
                let raw = cell(j).trim();
                let id = SituationId::from(raw);
                if !store.contains_situation(&id) {
                    return Err(StoreError::UnknownRowSituation {
                        table: table.name.clone(),
                        row: row_no,
                        value: raw.to_string(),
                    });
                }
                id
            }
            None => mapping.default_situation.clone(),
        };
        facts.insert(Fact::holds(Atom::new(&mapping.predicate, args), situation));
    }
    if !store.contains_situation(&mapping.default_situation) && sit_col.is_none() {
        return Err(StoreError::UnknownSituation(
            mapping.default_situation.clone(),
        ));
    }
    if let Some(f) = facts.iter().next() {
        // Kind and signature errors surface before anything is inserted.
        let term = store
            .term_of(&f.situation)
            .cloned()
            .ok_or_else(|| StoreError::UnknownSituation(f.situation.clone()))?;
        store.signature().check_literal(&f.to_literal(term))?;
    }
    let mut added = 0;
    for f in facts {
        if store.assert_fact(f)? {
            added += 1;
        }
    }
    Ok(added)
}
