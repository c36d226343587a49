//! Estimate-table detectors: Pareto-chart thresholding, Pareto-efficient
//! selection, and outranking-based layer ranking.
//!
//! All comparisons run on *effective* values: the raw estimate for an
//! ascending criterion, its negation for a descending one, so that "larger
//! effective value" always means "more critical".

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{EstimateTable, ModelError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScreeningError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("criteria selection is empty")]
    EmptyCriteria,
    #[error("concordance/discordance compare a component with itself: {0:?}")]
    SameComponent(String),
    #[error("total criteria weight is zero")]
    ZeroTotalWeight,
    #[error("threshold {0} outside [0, 1]")]
    ThresholdOutOfRange(f64),
}

/// Components sorted by descending criticality on one criterion, with the
/// inclusive selection threshold applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoChart<S> {
    pub criterion: String,
    pub threshold: S,
    /// Sorted descending by effective value; ties by component id ascending.
    pub entries: Vec<ChartEntry<S>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartEntry<S> {
    pub component: String,
    pub value: S,
    pub selected: bool,
}

impl<S: Scalar> ParetoChart<S> {
    /// Ids of the components at or above the threshold.
    pub fn selected(&self) -> BTreeSet<String> {
        self.entries
            .iter()
            .filter(|e| e.selected)
            .map(|e| e.component.clone())
            .collect()
    }
}

/// Crisp outranking thresholds and optional per-criterion discordance
/// ranges. A missing range defaults to the observed spread of effective
/// values on that criterion; zero-spread criteria contribute no discordance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutrankParams<S> {
    pub concordance_threshold: S,
    pub discordance_threshold: S,
    #[serde(default = "BTreeMap::new", skip_serializing_if = "BTreeMap::is_empty")]
    pub ranges: BTreeMap<String, S>,
}

impl<S: Scalar> OutrankParams<S> {
    pub fn new(p: S, q: S) -> Self {
        Self {
            concordance_threshold: p,
            discordance_threshold: q,
            ranges: BTreeMap::new(),
        }
    }

    fn check(&self) -> Result<(), ScreeningError> {
        for t in [self.concordance_threshold, self.discordance_threshold] {
            if t < S::zero() || t > S::one() || t.is_nan() {
                return Err(ScreeningError::ThresholdOutOfRange(
                    t.to_f64().unwrap_or(f64::NAN),
                ));
            }
        }
        Ok(())
    }
}

/// Criticality layers: `layers[0]` holds the strongest bottleneck
/// candidates. Layers partition the component set and are nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerRanking {
    pub layers: Vec<BTreeSet<String>>,
}

fn effective<S: Scalar>(table: &EstimateTable<S>, row: usize, col: usize) -> S {
    let v = table.values[row][col];
    if table.criteria[col].ascending {
        v
    } else {
        -v
    }
}

/// Sort components by one criterion, most critical first, and select every
/// component at or above `threshold` (inclusive, so a component sitting
/// exactly on the threshold is selected). Ties in the ordering break by
/// component id ascending.
pub fn pareto_chart<S: Scalar>(
    table: &EstimateTable<S>,
    criterion: &str,
    threshold: S,
) -> Result<ParetoChart<S>, ScreeningError> {
    let col = table.criterion_index(criterion)?;
    let eff_threshold = if table.criteria[col].ascending {
        threshold
    } else {
        -threshold
    };
    let mut order: Vec<usize> = (0..table.components.len()).collect();
    order.sort_by(|&i, &j| {
        effective(table, j, col)
            .partial_cmp(&effective(table, i, col))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| table.components[i].id.cmp(&table.components[j].id))
    });
    let entries = order
        .into_iter()
        .map(|i| ChartEntry {
            component: table.components[i].id.clone(),
            value: table.values[i][col],
            selected: effective(table, i, col) >= eff_threshold,
        })
        .collect();
    Ok(ParetoChart {
        criterion: criterion.to_string(),
        threshold,
        entries,
    })
}

fn criteria_columns<S: Scalar>(
    table: &EstimateTable<S>,
    criteria: &[String],
) -> Result<Vec<usize>, ScreeningError> {
    if criteria.is_empty() {
        return Err(ScreeningError::EmptyCriteria);
    }
    criteria
        .iter()
        .map(|id| table.criterion_index(id).map_err(ScreeningError::from))
        .collect()
}

/// Components not criticality-dominated on the chosen criteria: `a`
/// dominates `b` when `a` is at least as critical on every chosen criterion
/// and strictly more critical on at least one. Components with identical
/// rows are incomparable ties and are all kept.
pub fn pareto_efficient<S: Scalar>(
    table: &EstimateTable<S>,
    criteria: &[String],
) -> Result<BTreeSet<String>, ScreeningError> {
    let cols = criteria_columns(table, criteria)?;
    let n = table.components.len();
    let dominated = |i: usize| {
        (0..n).any(|j| {
            j != i
                && cols
                    .iter()
                    .all(|&c| effective(table, j, c) >= effective(table, i, c))
                && cols
                    .iter()
                    .any(|&c| effective(table, j, c) > effective(table, i, c))
        })
    };
    Ok((0..n)
        .filter(|&i| !dominated(i))
        .map(|i| table.components[i].id.clone())
        .collect())
}

/// Weight share of the criteria on which `a` is at least as critical as `b`.
pub fn concordance<S: Scalar>(
    table: &EstimateTable<S>,
    a: &str,
    b: &str,
    criteria: &[String],
) -> Result<S, ScreeningError> {
    if a == b {
        return Err(ScreeningError::SameComponent(a.to_string()));
    }
    let cols = criteria_columns(table, criteria)?;
    let (ia, ib) = (table.component_index(a)?, table.component_index(b)?);
    let total: S = cols.iter().map(|&c| table.criteria[c].weight).sum();
    if total <= S::zero() {
        return Err(ScreeningError::ZeroTotalWeight);
    }
    let favour: S = cols
        .iter()
        .filter(|&&c| effective(table, ia, c) >= effective(table, ib, c))
        .map(|&c| table.criteria[c].weight)
        .sum();
    Ok(favour / total)
}

/// Strongest normalized opposition to "`a` outranks `b`": the maximum over
/// criteria of `b`'s advantage divided by the criterion's discordance range,
/// clamped to [0, 1]. Criteria with no spread are skipped.
pub fn discordance<S: Scalar>(
    table: &EstimateTable<S>,
    a: &str,
    b: &str,
    criteria: &[String],
    params: &OutrankParams<S>,
) -> Result<S, ScreeningError> {
    if a == b {
        return Err(ScreeningError::SameComponent(a.to_string()));
    }
    let cols = criteria_columns(table, criteria)?;
    let (ia, ib) = (table.component_index(a)?, table.component_index(b)?);
    let mut worst = S::zero();
    for &c in &cols {
        let range = match params.ranges.get(&table.criteria[c].id) {
            Some(&r) => r,
            None => observed_range(table, c),
        };
        if range <= S::zero() {
            continue;
        }
        let deficit = effective(table, ib, c) - effective(table, ia, c);
        if deficit > S::zero() {
            let opposition = (deficit / range).min(S::one());
            if opposition > worst {
                worst = opposition;
            }
        }
    }
    Ok(worst)
}

fn observed_range<S: Scalar>(table: &EstimateTable<S>, col: usize) -> S {
    let mut lo = S::infinity();
    let mut hi = S::neg_infinity();
    for row in 0..table.components.len() {
        let v = effective(table, row, col);
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    if table.components.is_empty() {
        S::zero()
    } else {
        hi - lo
    }
}

/// Rank components into criticality layers via crisp outranking: draw an
/// edge `a → b` when `concordance(a, b) ≥ p` and `discordance(a, b) ≤ q`,
/// condense strongly connected components, then repeatedly peel the source
/// set of the condensation. Components sharing a cycle share a layer.
pub fn electre_layers<S: Scalar>(
    table: &EstimateTable<S>,
    criteria: &[String],
    params: &OutrankParams<S>,
) -> Result<LayerRanking, ScreeningError> {
    params.check()?;
    let cols = criteria_columns(table, criteria)?;
    let n = table.components.len();
    if n == 0 {
        return Ok(LayerRanking { layers: Vec::new() });
    }
    let total: S = cols.iter().map(|&c| table.criteria[c].weight).sum();
    if total <= S::zero() {
        return Err(ScreeningError::ZeroTotalWeight);
    }
    let ranges: Vec<S> = cols
        .iter()
        .map(|&c| match params.ranges.get(&table.criteria[c].id) {
            Some(&r) => r,
            None => observed_range(table, c),
        })
        .collect();

    // outranks[a][b]: does a outrank b under (p, q)?
    let mut outranks = vec![vec![false; n]; n];
    #[allow(clippy::needless_range_loop)]
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let mut favour = S::zero();
            let mut worst = S::zero();
            for (k, &c) in cols.iter().enumerate() {
                let (va, vb) = (effective(table, a, c), effective(table, b, c));
                if va >= vb {
                    favour = favour + table.criteria[c].weight;
                } else if ranges[k] > S::zero() {
                    let opposition = ((vb - va) / ranges[k]).min(S::one());
                    if opposition > worst {
                        worst = opposition;
                    }
                }
            }
            outranks[a][b] = favour / total >= params.concordance_threshold
                && worst <= params.discordance_threshold;
        }
    }

    // Mutual reachability partitions the digraph into strongly connected
    // components; with n this small, BFS per node is plenty.
    let mut reach = vec![vec![false; n]; n];
    #[allow(clippy::needless_range_loop)]
    for s in 0..n {
        let mut stack = vec![s];
        reach[s][s] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if outranks[u][v] && !reach[s][v] {
                    reach[s][v] = true;
                    stack.push(v);
                }
            }
        }
    }
    let mut scc = vec![usize::MAX; n];
    let mut next_scc = 0;
    for i in 0..n {
        if scc[i] != usize::MAX {
            continue;
        }
        for j in i..n {
            if reach[i][j] && reach[j][i] {
                scc[j] = next_scc;
            }
        }
        next_scc += 1;
    }

    let mut remaining: BTreeSet<usize> = (0..n).collect();
    let mut layers = Vec::new();
    while !remaining.is_empty() {
        // A source is a whole strongly connected component none of whose
        // members is outranked from outside it; cycles stay in one layer.
        let mut blocked: std::collections::HashSet<usize> = std::collections::HashSet::new();
        for &i in &remaining {
            if remaining
                .iter()
                .any(|&j| scc[j] != scc[i] && outranks[j][i])
            {
                blocked.insert(scc[i]);
            }
        }
        let layer_members: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| !blocked.contains(&scc[i]))
            .collect();
        debug_assert!(!layer_members.is_empty(), "condensation has no source");
        let mut layer = BTreeSet::new();
        for i in layer_members {
            layer.insert(table.components[i].id.clone());
            remaining.remove(&i);
        }
        layers.push(layer);
    }
    Ok(LayerRanking { layers })
}

/// Result of a `(p, q)` grid search against a target layering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOutcome {
    pub concordance_threshold: f64,
    pub discordance_threshold: f64,
    /// Whether the calibrated layering reproduces the target layer 1 exactly.
    pub layer1_exact: bool,
    /// Jaccard similarity per target layer index (0 when the calibrated
    /// ranking has no layer at that index).
    pub layer_jaccard: Vec<f64>,
    pub mean_jaccard: f64,
    /// The layering produced by the calibrated thresholds.
    pub layers: Vec<BTreeSet<String>>,
}

fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count() as f64;
    let union = a.union(b).count() as f64;
    inter / union
}

/// Grid-search `(p, q)` over `p ∈ {0.50, 0.55, …, 1.00}` and
/// `q ∈ {0.10, 0.15, …, 1.00}`, scoring each candidate by exact layer-1
/// agreement with `target`, then layer-1 Jaccard, then mean Jaccard across
/// all target layers. Deterministic: candidates scan in ascending `(p, q)`
/// order and only a strictly better score replaces the incumbent.
pub fn calibrate_outranking<S: Scalar>(
    table: &EstimateTable<S>,
    criteria: &[String],
    target: &[BTreeSet<String>],
) -> Result<CalibrationOutcome, ScreeningError> {
    let mut best: Option<(CalibrationOutcome, (bool, f64, f64))> = None;
    for pi in 0..=10u32 {
        for qi in 0..=18u32 {
            let p = f64::from(50 + 5 * pi) / 100.0;
            let q = f64::from(10 + 5 * qi) / 100.0;
            let params = OutrankParams::new(
                S::from_f64(p).expect("threshold fits scalar"),
                S::from_f64(q).expect("threshold fits scalar"),
            );
            let ranking = electre_layers(table, criteria, &params)?;
            let layer_jaccard: Vec<f64> = target
                .iter()
                .enumerate()
                .map(|(i, t)| match ranking.layers.get(i) {
                    Some(l) => jaccard(l, t),
                    None => 0.0,
                })
                .collect();
            let layer1_exact = target
                .first()
                .is_some_and(|t| ranking.layers.first() == Some(t));
            let mean = layer_jaccard.iter().sum::<f64>() / layer_jaccard.len().max(1) as f64;
            let score = (
                layer1_exact,
                layer_jaccard.first().copied().unwrap_or(0.0),
                mean,
            );
            let outcome = CalibrationOutcome {
                concordance_threshold: p,
                discordance_threshold: q,
                layer1_exact,
                layer_jaccard,
                mean_jaccard: mean,
                layers: ranking.layers,
            };
            let better = match &best {
                None => true,
                Some((_, incumbent)) => {
                    score.0 & !incumbent.0
                        || (score.0 == incumbent.0
                            && (score.1 > incumbent.1
                                || (score.1 == incumbent.1 && score.2 > incumbent.2)))
                }
            };
            if better {
                best = Some((outcome, score));
            }
        }
    }
    Ok(best.expect("grid is nonempty").0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ComponentRecord, CriterionSpec};

    fn small_table() -> EstimateTable<f64> {
        EstimateTable {
            components: ["a", "b", "c"]
                .iter()
                .map(|id| ComponentRecord {
                    id: id.to_string(),
                    label: String::new(),
                    parent_id: None,
                })
                .collect(),
            criteria: vec![
                CriterionSpec {
                    id: "C1".into(),
                    weight: 1.0,
                    scale_min: None,
                    scale_max: None,
                    ascending: true,
                },
                CriterionSpec {
                    id: "C2".into(),
                    weight: 2.0,
                    scale_min: None,
                    scale_max: None,
                    ascending: true,
                },
            ],
            values: vec![vec![3.0, 5.0], vec![2.0, 5.0], vec![1.0, 1.0]],
        }
    }

    #[test]
    fn chart_orders_and_selects_inclusively() {
        let table = small_table();
        let chart = pareto_chart(&table, "C1", 2.0).unwrap();
        let ids: Vec<&str> = chart.entries.iter().map(|e| e.component.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert_eq!(chart.selected().into_iter().collect::<Vec<_>>(), ["a", "b"]);
    }

    #[test]
    fn chart_breaks_value_ties_by_id() {
        let mut table = small_table();
        table.values = vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0]];
        let chart = pareto_chart(&table, "C1", 5.0).unwrap();
        let ids: Vec<&str> = chart.entries.iter().map(|e| e.component.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert!(chart.selected().is_empty());
    }

    #[test]
    fn chart_empty_selection_above_max() {
        let table = small_table();
        let chart = pareto_chart(&table, "C1", 100.0).unwrap();
        assert!(chart.selected().is_empty());
    }

    #[test]
    fn chart_unknown_criterion_is_an_error() {
        let table = small_table();
        assert!(matches!(
            pareto_chart(&table, "C9", 1.0),
            Err(ScreeningError::Model(ModelError::UnknownCriterion(_)))
        ));
    }

    #[test]
    fn descending_criterion_flips_chart_and_dominance() {
        let mut table = small_table();
        table.criteria[0].ascending = false;
        // Lower C1 now means more critical; c (C1 = 1.0) tops the chart.
        let chart = pareto_chart(&table, "C1", 2.0).unwrap();
        assert_eq!(chart.entries[0].component, "c");
        assert_eq!(chart.selected().into_iter().collect::<Vec<_>>(), ["b", "c"]);
    }

    #[test]
    fn efficient_keeps_maximal_and_ties() {
        let table = small_table();
        let eff = pareto_efficient(&table, &["C1".into(), "C2".into()]).unwrap();
        assert_eq!(eff.into_iter().collect::<Vec<_>>(), ["a"]);

        let mut tied = small_table();
        tied.values = vec![vec![3.0, 5.0], vec![3.0, 5.0], vec![1.0, 1.0]];
        let eff = pareto_efficient(&tied, &["C1".into(), "C2".into()]).unwrap();
        assert_eq!(eff.into_iter().collect::<Vec<_>>(), ["a", "b"]);
    }

    #[test]
    fn efficient_singleton_and_empty_criteria() {
        let mut table = small_table();
        table.components.truncate(1);
        table.values.truncate(1);
        let eff = pareto_efficient(&table, &["C1".into()]).unwrap();
        assert_eq!(eff.into_iter().collect::<Vec<_>>(), ["a"]);
        assert!(matches!(
            pareto_efficient(&small_table(), &[]),
            Err(ScreeningError::EmptyCriteria)
        ));
    }

    #[test]
    fn concordance_counts_ties_for_both_orderings() {
        let mut table = small_table();
        table.values[0] = vec![2.0, 5.0];
        table.values[1] = vec![2.0, 5.0];
        let crits = vec!["C1".to_string(), "C2".to_string()];
        assert_eq!(concordance(&table, "a", "b", &crits).unwrap(), 1.0);
        assert_eq!(concordance(&table, "b", "a", &crits).unwrap(), 1.0);
    }

    #[test]
    fn concordance_single_criterion_defeat_is_zero() {
        let table = small_table();
        let crits = vec!["C1".to_string()];
        assert_eq!(concordance(&table, "b", "a", &crits).unwrap(), 0.0);
    }

    #[test]
    fn discordance_identical_rows_is_zero_and_full_range_is_one() {
        let mut table = small_table();
        table.values[0] = vec![2.0, 5.0];
        table.values[1] = vec![2.0, 5.0];
        let crits = vec!["C1".to_string(), "C2".to_string()];
        let params = OutrankParams::new(0.5, 0.5);
        assert_eq!(discordance(&table, "a", "b", &crits, &params).unwrap(), 0.0);

        let table = small_table();
        // c is the observed minimum of both criteria, a the maximum.
        assert_eq!(discordance(&table, "c", "a", &crits, &params).unwrap(), 1.0);
    }

    #[test]
    fn layers_of_componentwise_chain_are_singletons() {
        let mut table = small_table();
        // a > b > c strictly componentwise on (C1, C2).
        table.values = vec![vec![3.0, 5.0], vec![2.0, 4.0], vec![1.0, 1.0]];
        let params = OutrankParams::new(0.5, 1.0);
        let ranking = electre_layers(&table, &["C1".into(), "C2".into()], &params).unwrap();
        let as_vecs: Vec<Vec<&str>> = ranking
            .layers
            .iter()
            .map(|l| l.iter().map(|s| s.as_str()).collect())
            .collect();
        assert_eq!(as_vecs, vec![vec!["a"], vec!["b"], vec!["c"]]);
    }

    #[test]
    fn layers_single_component() {
        let mut table = small_table();
        table.components.truncate(1);
        table.values.truncate(1);
        let params = OutrankParams::new(0.8, 0.2);
        let ranking = electre_layers(&table, &["C1".into()], &params).unwrap();
        assert_eq!(ranking.layers.len(), 1);
        assert!(ranking.layers[0].contains("a"));
    }

    #[test]
    fn layers_partition_components() {
        let table = small_table();
        let params = OutrankParams::new(0.6, 0.4);
        let ranking = electre_layers(&table, &["C1".into(), "C2".into()], &params).unwrap();
        let mut all: Vec<&str> = ranking
            .layers
            .iter()
            .flat_map(|l| l.iter().map(|s| s.as_str()))
            .collect();
        all.sort_unstable();
        assert_eq!(all, ["a", "b", "c"]);
        assert!(ranking.layers.iter().all(|l| !l.is_empty()));
    }

    #[test]
    fn cycle_members_stay_in_one_layer() {
        // c0 and c2 outrank each other; c3 outranks c0 only. The whole
        // cycle must sink below c3, including c2, which has no direct
        // incoming edge.
        let table = EstimateTable {
            components: (0..5)
                .map(|i| ComponentRecord {
                    id: format!("c{i}"),
                    label: String::new(),
                    parent_id: None,
                })
                .collect(),
            criteria: [1.0, 0.2, 1.0]
                .iter()
                .enumerate()
                .map(|(j, &weight)| CriterionSpec {
                    id: format!("K{j}"),
                    weight,
                    scale_min: None,
                    scale_max: None,
                    ascending: true,
                })
                .collect(),
            values: vec![
                vec![2.0, 3.5, 0.0],
                vec![0.0, 10.0, 0.0],
                vec![2.0, 0.5, 1.0],
                vec![3.5, 0.0, 0.0],
                vec![0.0, 0.0, 3.5],
            ],
        };
        let crits: Vec<String> = (0..3).map(|j| format!("K{j}")).collect();
        let ranking = electre_layers(&table, &crits, &OutrankParams::new(0.5, 0.4)).unwrap();
        let as_vecs: Vec<Vec<&str>> = ranking
            .layers
            .iter()
            .map(|l| l.iter().map(|s| s.as_str()).collect())
            .collect();
        assert_eq!(as_vecs, vec![vec!["c1", "c3", "c4"], vec!["c0", "c2"]]);
    }

    #[test]
    fn bad_thresholds_rejected() {
        let table = small_table();
        let params = OutrankParams::new(1.2, 0.1);
        assert!(matches!(
            electre_layers(&table, &["C1".into()], &params),
            Err(ScreeningError::ThresholdOutOfRange(_))
        ));
    }
}
