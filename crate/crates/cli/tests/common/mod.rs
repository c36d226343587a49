//! Shared helpers for the CLI integration and acceptance suites.
#![allow(dead_code)] // each test binary uses its own subset

use std::collections::BTreeSet;
use std::path::PathBuf;

use chokepoint::EstimateTable64;
use chokepoint_cli::formats;

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .expect("workspace root exists")
        .to_path_buf()
}

pub fn fixture(name: &str) -> PathBuf {
    workspace_root().join("fixtures").join(name)
}

pub fn supercharger_table() -> EstimateTable64 {
    formats::load_table(&fixture("supercharger.json")).expect("bundled table parses")
}

pub fn set(ids: &[&str]) -> BTreeSet<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

/// Reference criticality layering for the supercharger table.
pub fn reference_layers() -> Vec<BTreeSet<String>> {
    vec![
        set(&["2", "4", "6.3", "6.8", "7.11"]),
        set(&["1.3", "5.3", "6.4", "7.5", "7.8"]),
        set(&[
            "1.1", "1.4", "3", "5.1", "5.2", "6.5", "6.6", "6.9", "7.4", "7.7", "8", "8.1",
        ]),
        set(&[
            "1.2", "6.1", "6.2", "6.7", "7.1", "7.2", "7.3", "7.6", "7.9", "7.10", "8.2", "8.3",
            "8.4",
        ]),
    ]
}

pub fn all_criteria(table: &EstimateTable64) -> Vec<String> {
    table.criteria.iter().map(|c| c.id.clone()).collect()
}
