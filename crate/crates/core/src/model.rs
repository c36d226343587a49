//! Shared domain types and structural validation.
//!
//! Validation is split in two: [`EstimateTable::validate`],
//! [`MorphSystem::validate`] and [`Graph::validate`] report invariant
//! violations as data (an empty report means the value is well-formed), while
//! detector operations return hard errors when a precondition fails.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// One part of the examined system. Ids are free-form tokens (`"4"`,
/// `"7.11"`); the optional parent link records the part hierarchy, which is
/// informational only — detectors treat the component list as flat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub id: String,
    #[serde(default)]
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
}

/// A criticality criterion with its outranking weight and optional admissible
/// value range. Direction is ascending by default: a higher estimate marks a
/// stronger bottleneck candidate. `ascending: false` flips the reading for
/// criteria where a low value is the critical one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: serde::Deserialize<'de>"))]
pub struct CriterionSpec<S> {
    pub id: String,
    pub weight: S,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_min: Option<S>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_max: Option<S>,
    #[serde(default = "default_true")]
    pub ascending: bool,
}

fn default_true() -> bool {
    true
}

/// Dense component × criterion estimate matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateTable<S> {
    pub components: Vec<ComponentRecord>,
    pub criteria: Vec<CriterionSpec<S>>,
    /// `values[i][j]` is the estimate of component `i` on criterion `j`.
    pub values: Vec<Vec<S>>,
}

/// One candidate implementation for a slot, with its ordinal priority
/// (1 = best, `quality_levels` = worst).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignAlternative {
    pub id: String,
    pub slot_id: String,
    pub priority: u8,
}

/// Compatibility estimate between two design alternatives from different
/// slots, on the ordinal scale `0..=compat_max` (0 = incompatible).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatEntry {
    pub a: String,
    pub b: String,
    pub w: u8,
}

/// A system frame for composite solutions: ordered slots, the design
/// alternatives available per slot, and the pairwise compatibility table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphSystem {
    pub slots: Vec<String>,
    pub alternatives: Vec<DesignAlternative>,
    pub compat: Vec<CompatEntry>,
    /// Number of priority levels `k` (priorities range over `1..=k`).
    pub quality_levels: u8,
    /// Best compatibility level `ν` (compatibilities range over `0..=ν`).
    pub compat_max: u8,
}

/// Quality vector `N = (w; η₁..η_k)` of a composite solution or subsystem:
/// `w` is the minimum pairwise compatibility among the picked alternatives
/// and `eta[r]` counts picks with priority `r + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QualityVector {
    pub w: u8,
    pub eta: Vec<u16>,
}

impl QualityVector {
    pub fn new(w: u8, eta: Vec<u16>) -> Self {
        Self { w, eta }
    }

    /// Total number of picks graded by this vector.
    pub fn total(&self) -> u32 {
        self.eta.iter().map(|&c| u32::from(c)).sum()
    }
}

impl fmt::Display for QualityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.w)?;
        for (i, c) in self.eta.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A fully assembled solution: one design alternative per slot, in slot
/// order, plus its quality vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeSolution {
    pub picks: Vec<String>,
    pub quality: QualityVector,
}

impl CompositeSolution {
    /// Canonical `A⋆B⋆C` rendering of the picks.
    pub fn label(&self) -> String {
        self.picks.join("*")
    }
}

/// Undirected graph with optional per-edge primary/secondary construction
/// costs (primary ≥ secondary ≥ 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph<S> {
    pub nodes: Vec<String>,
    pub edges: Vec<GraphEdge<S>>,
}

/// One undirected edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: serde::Deserialize<'de>"))]
pub struct GraphEdge<S> {
    pub a: String,
    pub b: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primary_cost: Option<S>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secondary_cost: Option<S>,
}

/// A single invariant violation found by a validation pass. Violations are
/// data, not errors: an empty report means the value is well-formed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Stable machine-readable code, e.g. `missing-compat-pair`.
    pub code: String,
    /// Human-readable description naming the offending slot/alternative/pair.
    pub detail: String,
}

impl Violation {
    fn new(code: &str, detail: String) -> Self {
        Self {
            code: code.to_string(),
            detail,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code, self.detail)
    }
}

/// Errors raised by model lookups shared across detector modules.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown component id {0:?}")]
    UnknownComponent(String),
    #[error("unknown criterion id {0:?}")]
    UnknownCriterion(String),
}

impl<S: Scalar> EstimateTable<S> {
    /// Look up a component's row index.
    pub fn component_index(&self, id: &str) -> Result<usize, ModelError> {
        self.components
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| ModelError::UnknownComponent(id.to_string()))
    }

    /// Look up a criterion's column index.
    pub fn criterion_index(&self, id: &str) -> Result<usize, ModelError> {
        self.criteria
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| ModelError::UnknownCriterion(id.to_string()))
    }

    /// Estimate of `component` on `criterion`.
    pub fn value(&self, component: &str, criterion: &str) -> Result<S, ModelError> {
        let i = self.component_index(component)?;
        let j = self.criterion_index(criterion)?;
        Ok(self.values[i][j])
    }

    /// Check table invariants: unique ids, acyclic parent links, well-formed
    /// criteria scales, a dense matrix, and every cell within its criterion's
    /// declared scale. Idempotent and side-effect free.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        let mut seen = HashSet::new();
        for c in &self.components {
            if !seen.insert(c.id.as_str()) {
                report.push(Violation::new(
                    "duplicate-component",
                    format!("component id {:?} declared more than once", c.id),
                ));
            }
        }
        for c in &self.components {
            if let Some(parent) = &c.parent_id {
                if !seen.contains(parent.as_str()) {
                    report.push(Violation::new(
                        "dangling-parent",
                        format!("component {:?} names unknown parent {:?}", c.id, parent),
                    ));
                }
            }
        }
        // Parent links must form a rooted forest: walk up from every node.
        let parent_of: HashMap<&str, &str> = self
            .components
            .iter()
            .filter_map(|c| c.parent_id.as_deref().map(|p| (c.id.as_str(), p)))
            .collect();
        for c in &self.components {
            let mut hops = 0usize;
            let mut cur = c.id.as_str();
            while let Some(&next) = parent_of.get(cur) {
                cur = next;
                hops += 1;
                if hops > self.components.len() {
                    report.push(Violation::new(
                        "parent-cycle",
                        format!("parent links from component {:?} form a cycle", c.id),
                    ));
                    break;
                }
            }
        }
        let mut crit_seen = HashSet::new();
        for spec in &self.criteria {
            if !crit_seen.insert(spec.id.as_str()) {
                report.push(Violation::new(
                    "duplicate-criterion",
                    format!("criterion id {:?} declared more than once", spec.id),
                ));
            }
            if spec.weight < S::zero() {
                report.push(Violation::new(
                    "negative-weight",
                    format!(
                        "criterion {:?} has negative weight {}",
                        spec.id, spec.weight
                    ),
                ));
            }
            if let (Some(lo), Some(hi)) = (spec.scale_min, spec.scale_max) {
                if lo >= hi {
                    report.push(Violation::new(
                        "bad-scale",
                        format!(
                            "criterion {:?} scale [{lo}, {hi}] is not increasing",
                            spec.id
                        ),
                    ));
                }
            }
        }
        if self.values.len() != self.components.len() {
            report.push(Violation::new(
                "matrix-shape",
                format!(
                    "{} value rows for {} components",
                    self.values.len(),
                    self.components.len()
                ),
            ));
        }
        for (i, row) in self.values.iter().enumerate() {
            let cid = self
                .components
                .get(i)
                .map(|c| c.id.as_str())
                .unwrap_or("<extra row>");
            if row.len() != self.criteria.len() {
                report.push(Violation::new(
                    "matrix-shape",
                    format!(
                        "component {:?} row has {} cells for {} criteria",
                        cid,
                        row.len(),
                        self.criteria.len()
                    ),
                ));
                continue;
            }
            for (j, &v) in row.iter().enumerate() {
                let spec = &self.criteria[j];
                if v.is_nan() {
                    report.push(Violation::new(
                        "nan-cell",
                        format!("cell ({cid:?}, {:?}) is NaN", spec.id),
                    ));
                    continue;
                }
                let below = spec.scale_min.is_some_and(|lo| v < lo);
                let above = spec.scale_max.is_some_and(|hi| v > hi);
                if below || above {
                    report.push(Violation::new(
                        "value-out-of-scale",
                        format!(
                            "cell ({cid:?}, {:?}) = {v} outside declared scale [{}, {}]",
                            spec.id,
                            spec.scale_min.map_or("-inf".to_string(), |x| x.to_string()),
                            spec.scale_max.map_or("+inf".to_string(), |x| x.to_string()),
                        ),
                    ));
                }
            }
        }
        report
    }
}

impl MorphSystem {
    /// Alternatives belonging to `slot`, in declaration order.
    pub fn slot_alternatives(&self, slot: &str) -> Vec<&DesignAlternative> {
        self.alternatives
            .iter()
            .filter(|da| da.slot_id == slot)
            .collect()
    }

    pub fn alternative(&self, id: &str) -> Option<&DesignAlternative> {
        self.alternatives.iter().find(|da| da.id == id)
    }

    /// Check system invariants: every slot populated, alternatives bound to
    /// declared slots with in-range priorities, and the compatibility table
    /// symmetric, in-range, free of same-slot pairs, and total over all
    /// cross-slot alternative pairs (a missing pair is an input error, not an
    /// implicit zero — implicit zeros would silently change `w`).
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        let slot_set: HashSet<&str> = self.slots.iter().map(|s| s.as_str()).collect();
        if slot_set.len() != self.slots.len() {
            report.push(Violation::new(
                "duplicate-slot",
                "slot ids are not unique".to_string(),
            ));
        }
        let mut da_seen = HashSet::new();
        for da in &self.alternatives {
            if !da_seen.insert(da.id.as_str()) {
                report.push(Violation::new(
                    "duplicate-alternative",
                    format!("alternative id {:?} declared more than once", da.id),
                ));
            }
            if !slot_set.contains(da.slot_id.as_str()) {
                report.push(Violation::new(
                    "unknown-slot",
                    format!(
                        "alternative {:?} names unknown slot {:?}",
                        da.id, da.slot_id
                    ),
                ));
            }
            if da.priority < 1 || da.priority > self.quality_levels {
                report.push(Violation::new(
                    "priority-out-of-range",
                    format!(
                        "alternative {:?} has priority {} outside 1..={}",
                        da.id, da.priority, self.quality_levels
                    ),
                ));
            }
        }
        for slot in &self.slots {
            if self.slot_alternatives(slot).is_empty() {
                report.push(Violation::new(
                    "empty-slot",
                    format!("slot {:?} has no design alternatives", slot),
                ));
            }
        }
        let by_id: HashMap<&str, &DesignAlternative> = self
            .alternatives
            .iter()
            .map(|da| (da.id.as_str(), da))
            .collect();
        let mut declared: HashMap<(String, String), u8> = HashMap::new();
        for entry in &self.compat {
            let (da_a, da_b) = match (by_id.get(entry.a.as_str()), by_id.get(entry.b.as_str())) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    report.push(Violation::new(
                        "unknown-alternative",
                        format!(
                            "compat pair ({:?}, {:?}) names an unknown alternative",
                            entry.a, entry.b
                        ),
                    ));
                    continue;
                }
            };
            if da_a.slot_id == da_b.slot_id {
                report.push(Violation::new(
                    "same-slot-pair",
                    format!(
                        "compat pair ({:?}, {:?}) joins two alternatives of slot {:?}",
                        entry.a, entry.b, da_a.slot_id
                    ),
                ));
                continue;
            }
            if entry.w > self.compat_max {
                report.push(Violation::new(
                    "compat-out-of-range",
                    format!(
                        "compat pair ({:?}, {:?}) = {} exceeds maximum {}",
                        entry.a, entry.b, entry.w, self.compat_max
                    ),
                ));
            }
            let key = canonical_pair(&entry.a, &entry.b);
            if let Some(&prev) = declared.get(&key) {
                if prev != entry.w {
                    report.push(Violation::new(
                        "asymmetric-compat",
                        format!(
                            "compat pair ({:?}, {:?}) declared with conflicting values {} and {}",
                            key.0, key.1, prev, entry.w
                        ),
                    ));
                }
            } else {
                declared.insert(key, entry.w);
            }
        }
        // Every cross-slot pair is reachable by some composition, so every
        // cross-slot pair must be declared.
        for (i, slot_a) in self.slots.iter().enumerate() {
            for slot_b in self.slots.iter().skip(i + 1) {
                for da_a in self.slot_alternatives(slot_a) {
                    for da_b in self.slot_alternatives(slot_b) {
                        let key = canonical_pair(&da_a.id, &da_b.id);
                        if !declared.contains_key(&key) {
                            report.push(Violation::new(
                                "missing-compat-pair",
                                format!(
                                    "no compatibility declared for pair ({:?}, {:?})",
                                    da_a.id, da_b.id
                                ),
                            ));
                        }
                    }
                }
            }
        }
        report
    }

    /// Build the symmetric pair → compatibility lookup used by detectors.
    pub(crate) fn compat_index(&self) -> HashMap<(String, String), u8> {
        self.compat
            .iter()
            .map(|e| (canonical_pair(&e.a, &e.b), e.w))
            .collect()
    }
}

pub(crate) fn canonical_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl<S: Scalar> Graph<S> {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == id)
    }

    /// Check graph invariants: unique node ids, known endpoints, no
    /// self-loops, no duplicate edges, and declared costs nonnegative with
    /// secondary ≤ primary.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        let mut seen = HashSet::new();
        for n in &self.nodes {
            if !seen.insert(n.as_str()) {
                report.push(Violation::new(
                    "duplicate-node",
                    format!("node id {n:?} declared more than once"),
                ));
            }
        }
        let mut edge_seen = BTreeSet::new();
        for e in &self.edges {
            if e.a == e.b {
                report.push(Violation::new(
                    "self-loop",
                    format!("edge ({:?}, {:?}) is a self-loop", e.a, e.b),
                ));
                continue;
            }
            for endpoint in [&e.a, &e.b] {
                if !seen.contains(endpoint.as_str()) {
                    report.push(Violation::new(
                        "unknown-endpoint",
                        format!(
                            "edge ({:?}, {:?}) names unknown node {endpoint:?}",
                            e.a, e.b
                        ),
                    ));
                }
            }
            if !edge_seen.insert(canonical_pair(&e.a, &e.b)) {
                report.push(Violation::new(
                    "duplicate-edge",
                    format!("edge ({:?}, {:?}) declared more than once", e.a, e.b),
                ));
            }
            if let Some(p) = e.primary_cost {
                if p < S::zero() || p.is_nan() {
                    report.push(Violation::new(
                        "negative-cost",
                        format!("edge ({:?}, {:?}) has invalid primary cost {p}", e.a, e.b),
                    ));
                }
            }
            if let Some(s) = e.secondary_cost {
                if s < S::zero() || s.is_nan() {
                    report.push(Violation::new(
                        "negative-cost",
                        format!("edge ({:?}, {:?}) has invalid secondary cost {s}", e.a, e.b),
                    ));
                }
            }
            if let (Some(p), Some(s)) = (e.primary_cost, e.secondary_cost) {
                if s > p {
                    report.push(Violation::new(
                        "cost-order",
                        format!(
                            "edge ({:?}, {:?}) has secondary cost {s} above primary cost {p}",
                            e.a, e.b
                        ),
                    ));
                }
            }
        }
        report
    }
}

/// Group a validation report for display.
pub fn render_report(report: &[Violation]) -> String {
    if report.is_empty() {
        return "ok".to_string();
    }
    let mut grouped: BTreeMap<&str, Vec<&Violation>> = BTreeMap::new();
    for v in report {
        grouped.entry(v.code.as_str()).or_default().push(v);
    }
    let mut out = String::new();
    for (_, vs) in grouped {
        for v in vs {
            out.push_str(&format!("{v}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(id: &str, weight: f64) -> CriterionSpec<f64> {
        CriterionSpec {
            id: id.into(),
            weight,
            scale_min: None,
            scale_max: None,
            ascending: true,
        }
    }

    fn record(id: &str, parent: Option<&str>) -> ComponentRecord {
        ComponentRecord {
            id: id.into(),
            label: String::new(),
            parent_id: parent.map(|p| p.to_string()),
        }
    }

    #[test]
    fn table_validation_flags_each_defect_once() {
        let table = EstimateTable {
            components: vec![
                record("a", None),
                record("a", None),
                record("b", Some("zz")),
            ],
            criteria: vec![spec("C1", -1.0)],
            values: vec![vec![1.0], vec![1.0], vec![f64::NAN]],
        };
        let report = table.validate();
        let codes: Vec<&str> = report.iter().map(|v| v.code.as_str()).collect();
        assert!(codes.contains(&"duplicate-component"));
        assert!(codes.contains(&"dangling-parent"));
        assert!(codes.contains(&"negative-weight"));
        assert!(codes.contains(&"nan-cell"));
    }

    #[test]
    fn parent_cycles_are_detected() {
        let table = EstimateTable::<f64> {
            components: vec![record("a", Some("b")), record("b", Some("a"))],
            criteria: vec![],
            values: vec![vec![], vec![]],
        };
        assert!(table.validate().iter().any(|v| v.code == "parent-cycle"));
    }

    #[test]
    fn forest_parents_are_accepted() {
        let table = EstimateTable::<f64> {
            components: vec![
                record("8", None),
                record("8.1", Some("8")),
                record("8.2", Some("8")),
            ],
            criteria: vec![spec("C1", 1.0)],
            values: vec![vec![0.0], vec![0.0], vec![0.0]],
        };
        assert!(table.validate().is_empty());
    }

    #[test]
    fn validation_is_idempotent() {
        let table = EstimateTable::<f64> {
            components: vec![record("a", None), record("a", None)],
            criteria: vec![spec("C1", 1.0)],
            values: vec![vec![1.0], vec![2.0]],
        };
        assert_eq!(table.validate(), table.validate());
    }

    fn da(id: &str, slot: &str, priority: u8) -> DesignAlternative {
        DesignAlternative {
            id: id.into(),
            slot_id: slot.into(),
            priority,
        }
    }

    #[test]
    fn system_validation_edge_cases() {
        let system = MorphSystem {
            slots: vec!["X".into(), "Y".into(), "Z".into()],
            alternatives: vec![
                da("X1", "X", 1),
                da("X2", "X", 9),
                da("Y1", "Y", 2),
                da("Q1", "Q", 1),
            ],
            compat: vec![
                CompatEntry {
                    a: "X1".into(),
                    b: "Y1".into(),
                    w: 2,
                },
                CompatEntry {
                    a: "Y1".into(),
                    b: "X1".into(),
                    w: 1,
                },
                CompatEntry {
                    a: "X1".into(),
                    b: "X2".into(),
                    w: 2,
                },
                CompatEntry {
                    a: "X2".into(),
                    b: "Y1".into(),
                    w: 7,
                },
            ],
            quality_levels: 3,
            compat_max: 3,
        };
        let report = system.validate();
        let codes: Vec<&str> = report.iter().map(|v| v.code.as_str()).collect();
        assert!(codes.contains(&"priority-out-of-range"), "X2 priority 9");
        assert!(codes.contains(&"unknown-slot"), "Q1 names slot Q");
        assert!(codes.contains(&"empty-slot"), "slot Z holds nothing");
        assert!(codes.contains(&"asymmetric-compat"), "conflicting (X1, Y1)");
        assert!(codes.contains(&"same-slot-pair"), "(X1, X2) share a slot");
        assert!(codes.contains(&"compat-out-of-range"), "(X2, Y1) = 7");
    }

    #[test]
    fn graph_validation_edge_cases() {
        let graph = Graph::<f64> {
            nodes: vec!["a".into(), "a".into(), "b".into()],
            edges: vec![
                GraphEdge {
                    a: "a".into(),
                    b: "a".into(),
                    primary_cost: None,
                    secondary_cost: None,
                },
                GraphEdge {
                    a: "a".into(),
                    b: "q".into(),
                    primary_cost: None,
                    secondary_cost: None,
                },
                GraphEdge {
                    a: "a".into(),
                    b: "b".into(),
                    primary_cost: Some(-1.0),
                    secondary_cost: None,
                },
                GraphEdge {
                    a: "b".into(),
                    b: "a".into(),
                    primary_cost: None,
                    secondary_cost: None,
                },
            ],
        };
        let report = graph.validate();
        let codes: Vec<&str> = report.iter().map(|v| v.code.as_str()).collect();
        assert!(codes.contains(&"duplicate-node"));
        assert!(codes.contains(&"self-loop"));
        assert!(codes.contains(&"unknown-endpoint"));
        assert!(codes.contains(&"negative-cost"));
        assert!(codes.contains(&"duplicate-edge"));
    }

    #[test]
    fn quality_vector_renders_compactly() {
        let q = QualityVector::new(2, vec![0, 1, 3]);
        assert_eq!(q.to_string(), "(2;0,1,3)");
        assert_eq!(q.total(), 4);
    }
}
