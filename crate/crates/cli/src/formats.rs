//! On-disk JSON formats.
//!
//! Every input file is a UTF-8 JSON document with a top-level `kind`
//! discriminator: `estimate-table`, `morph-system`, `graph` or
//! `snapshot-series`. Field names mirror the library types; numbers are
//! plain decimals. Parsing applies the structural validation of the matching
//! type and rejects a document carrying any violation.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use chokepoint::model::{render_report, MorphSystem};
use chokepoint::{EstimateTable64, Graph64, SnapshotSeries64};

use crate::CliError;

/// Any input document the tool accepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Document {
    EstimateTable(EstimateTable64),
    MorphSystem(MorphSystem),
    Graph(Graph64),
    SnapshotSeries(SnapshotSeries64),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::EstimateTable(_) => "estimate-table",
            Document::MorphSystem(_) => "morph-system",
            Document::Graph(_) => "graph",
            Document::SnapshotSeries(_) => "snapshot-series",
        }
    }
}

/// Parse a document and run its structural validation; any violation
/// rejects the file.
pub fn parse_document(path: &Path) -> Result<Document, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let doc: Document = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed {}: {e}", path.display())))?;
    let report = match &doc {
        Document::EstimateTable(table) => table.validate(),
        Document::MorphSystem(system) => system.validate(),
        Document::Graph(graph) => graph.validate(),
        Document::SnapshotSeries(series) => {
            series
                .validate()
                .map_err(|e| CliError::Input(format!("invalid {}: {e}", path.display())))?;
            series
                .states
                .iter()
                .flat_map(|s| match s {
                    chokepoint::predict::SystemState::MorphSystem(m) => m.validate(),
                    chokepoint::predict::SystemState::EstimateTable(t) => t.validate(),
                })
                .collect()
        }
    };
    if !report.is_empty() {
        return Err(CliError::Input(format!(
            "invalid {}:\n{}",
            path.display(),
            render_report(&report)
        )));
    }
    Ok(doc)
}

pub fn load_table(path: &Path) -> Result<EstimateTable64, CliError> {
    match parse_document(path)? {
        Document::EstimateTable(t) => Ok(t),
        other => Err(CliError::Input(format!(
            "{} holds a {}, expected an estimate-table",
            path.display(),
            other.kind()
        ))),
    }
}

pub fn load_morph(path: &Path) -> Result<MorphSystem, CliError> {
    match parse_document(path)? {
        Document::MorphSystem(m) => Ok(m),
        other => Err(CliError::Input(format!(
            "{} holds a {}, expected a morph-system",
            path.display(),
            other.kind()
        ))),
    }
}

pub fn load_graph(path: &Path) -> Result<Graph64, CliError> {
    match parse_document(path)? {
        Document::Graph(g) => Ok(g),
        other => Err(CliError::Input(format!(
            "{} holds a {}, expected a graph",
            path.display(),
            other.kind()
        ))),
    }
}

pub fn load_series(path: &Path) -> Result<SnapshotSeries64, CliError> {
    match parse_document(path)? {
        Document::SnapshotSeries(s) => Ok(s),
        other => Err(CliError::Input(format!(
            "{} holds a {}, expected a snapshot-series",
            path.display(),
            other.kind()
        ))),
    }
}
