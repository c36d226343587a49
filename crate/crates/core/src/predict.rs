//! Forecast-driven detection: extrapolate a snapshot series of system
//! states and re-run a detector on every snapshot plus the forecast state,
//! producing the bottleneck trajectory.
//!
//! Timestamps are abstract ordinals, not wall-clock times. The built-in
//! forecasters are baselines — hold-last and a least-squares linear trend
//! with half-away-from-zero rounding and clamping to each parameter's scale;
//! an externally produced forecast state can be supplied instead and is only
//! checked against the structural skeleton.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{canonical_pair, CompositeSolution, EstimateTable, MorphSystem};
use crate::morph::{self, MorphError, Subsystem};
use crate::scalar::Scalar;
use crate::screening::{self, LayerRanking, OutrankParams, ParetoChart, ScreeningError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PredictError {
    #[error("snapshot series is empty")]
    EmptySeries,
    #[error("timestamps must be strictly increasing")]
    TimestampsNotIncreasing,
    #[error("snapshots mix different state kinds")]
    MixedKinds,
    #[error("snapshot skeleton mismatch: {0}")]
    SkeletonMismatch(String),
    #[error("linear-trend forecasting needs at least 2 snapshots")]
    NeedsTwoSnapshots,
    #[error("forecast horizon must be at least 1")]
    HorizonZero,
    #[error("detector does not apply to this snapshot kind: {0}")]
    DetectorMismatch(String),
    #[error(transparent)]
    Morph(#[from] MorphError),
    #[error(transparent)]
    Screening(#[from] ScreeningError),
}

/// One system snapshot: either a composite-system frame or an estimate
/// table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemState<S> {
    MorphSystem(MorphSystem),
    EstimateTable(EstimateTable<S>),
}

impl<S: Scalar> SystemState<S> {
    fn kind(&self) -> &'static str {
        match self {
            SystemState::MorphSystem(_) => "morph-system",
            SystemState::EstimateTable(_) => "estimate-table",
        }
    }

    /// Same structural skeleton: identical slots, alternative ids and
    /// compatibility keys (morph), or identical component and criterion ids
    /// (estimates). Priorities, compatibilities and cell values may differ.
    fn same_skeleton(&self, other: &Self) -> Result<(), PredictError> {
        match (self, other) {
            (SystemState::MorphSystem(a), SystemState::MorphSystem(b)) => {
                if a.slots != b.slots {
                    return Err(PredictError::SkeletonMismatch("slot lists differ".into()));
                }
                let ids = |s: &MorphSystem| -> Vec<(String, String)> {
                    s.alternatives
                        .iter()
                        .map(|da| (da.id.clone(), da.slot_id.clone()))
                        .collect()
                };
                if ids(a) != ids(b) {
                    return Err(PredictError::SkeletonMismatch(
                        "design alternatives differ".into(),
                    ));
                }
                let keys = |s: &MorphSystem| -> BTreeSet<(String, String)> {
                    s.compat
                        .iter()
                        .map(|e| canonical_pair(&e.a, &e.b))
                        .collect()
                };
                if keys(a) != keys(b) {
                    return Err(PredictError::SkeletonMismatch(
                        "compatibility pairs differ".into(),
                    ));
                }
                if a.quality_levels != b.quality_levels || a.compat_max != b.compat_max {
                    return Err(PredictError::SkeletonMismatch("scales differ".into()));
                }
                Ok(())
            }
            (SystemState::EstimateTable(a), SystemState::EstimateTable(b)) => {
                let comp = |t: &EstimateTable<S>| -> Vec<String> {
                    t.components.iter().map(|c| c.id.clone()).collect()
                };
                let crit = |t: &EstimateTable<S>| -> Vec<String> {
                    t.criteria.iter().map(|c| c.id.clone()).collect()
                };
                if comp(a) != comp(b) {
                    return Err(PredictError::SkeletonMismatch("components differ".into()));
                }
                if crit(a) != crit(b) {
                    return Err(PredictError::SkeletonMismatch("criteria differ".into()));
                }
                Ok(())
            }
            _ => Err(PredictError::MixedKinds),
        }
    }
}

/// Time-indexed snapshots of one system skeleton.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSeries<S> {
    pub timestamps: Vec<u32>,
    pub states: Vec<SystemState<S>>,
}

impl<S: Scalar> SnapshotSeries<S> {
    pub fn validate(&self) -> Result<(), PredictError> {
        if self.states.is_empty() || self.timestamps.is_empty() {
            return Err(PredictError::EmptySeries);
        }
        if self.timestamps.len() != self.states.len() {
            return Err(PredictError::SkeletonMismatch(format!(
                "{} timestamps for {} states",
                self.timestamps.len(),
                self.states.len()
            )));
        }
        if !self.timestamps.windows(2).all(|w| w[0] < w[1]) {
            return Err(PredictError::TimestampsNotIncreasing);
        }
        for state in &self.states[1..] {
            self.states[0].same_skeleton(state)?;
        }
        Ok(())
    }
}

/// Forecasting method applied beyond the last snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum ForecastMethod<S> {
    HoldLast,
    LinearTrend,
    UserSupplied { state: Box<SystemState<S>> },
}

/// A forecasting method plus the number of steps past the final snapshot at
/// which the forecast state is placed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forecaster<S> {
    #[serde(flatten)]
    pub method: ForecastMethod<S>,
    pub horizon: u32,
}

impl<S: Scalar> Forecaster<S> {
    pub fn hold_last() -> Self {
        Self {
            method: ForecastMethod::HoldLast,
            horizon: 1,
        }
    }

    pub fn linear_trend(horizon: u32) -> Self {
        Self {
            method: ForecastMethod::LinearTrend,
            horizon,
        }
    }

    pub fn user_supplied(state: SystemState<S>) -> Self {
        Self {
            method: ForecastMethod::UserSupplied {
                state: Box::new(state),
            },
            horizon: 1,
        }
    }
}

/// Least-squares line through `(t, y)` evaluated at `t_star`.
fn linear_extrapolate<S: Scalar>(ts: &[S], ys: &[S], t_star: S) -> S {
    let n = S::from_usize(ts.len()).expect("series length fits scalar");
    let mean_t = ts.iter().copied().sum::<S>() / n;
    let mean_y = ys.iter().copied().sum::<S>() / n;
    let mut num = S::zero();
    let mut den = S::zero();
    for (&t, &y) in ts.iter().zip(ys) {
        num = num + (t - mean_t) * (y - mean_y);
        den = den + (t - mean_t) * (t - mean_t);
    }
    let slope = if den == S::zero() {
        S::zero()
    } else {
        num / den
    };
    mean_y + slope * (t_star - mean_t)
}

/// Extrapolate an ordinal parameter: least squares, round half away from
/// zero, clamp to `[lo, hi]`.
fn ordinal_trend<S: Scalar>(ts: &[S], ys: &[u8], t_star: S, lo: u8, hi: u8) -> u8 {
    let ysf: Vec<S> = ys
        .iter()
        .map(|&y| S::from_u8(y).expect("ordinal fits scalar"))
        .collect();
    let raw = linear_extrapolate(ts, &ysf, t_star)
        .round()
        .to_i64()
        .unwrap_or(i64::from(lo));
    raw.clamp(i64::from(lo), i64::from(hi)) as u8
}

/// Build the forecast state at `τ_k + horizon`.
pub fn forecast<S: Scalar>(
    series: &SnapshotSeries<S>,
    forecaster: &Forecaster<S>,
) -> Result<SystemState<S>, PredictError> {
    series.validate()?;
    if forecaster.horizon == 0 {
        return Err(PredictError::HorizonZero);
    }
    let last = series.states.last().expect("validated nonempty");
    match &forecaster.method {
        ForecastMethod::HoldLast => Ok(last.clone()),
        ForecastMethod::UserSupplied { state } => {
            series.states[0].same_skeleton(state)?;
            Ok((**state).clone())
        }
        ForecastMethod::LinearTrend => {
            if series.states.len() < 2 {
                return Err(PredictError::NeedsTwoSnapshots);
            }
            let ts: Vec<S> = series
                .timestamps
                .iter()
                .map(|&t| S::from_u32(t).expect("timestamp fits scalar"))
                .collect();
            let t_star = S::from_u32(series.timestamps.last().unwrap() + forecaster.horizon)
                .expect("timestamp fits scalar");
            match last {
                SystemState::MorphSystem(last_sys) => {
                    let systems: Vec<&MorphSystem> = series
                        .states
                        .iter()
                        .map(|s| match s {
                            SystemState::MorphSystem(m) => m,
                            SystemState::EstimateTable(_) => unreachable!("uniform kinds"),
                        })
                        .collect();
                    let mut out = last_sys.clone();
                    for (i, da) in out.alternatives.iter_mut().enumerate() {
                        let ys: Vec<u8> =
                            systems.iter().map(|s| s.alternatives[i].priority).collect();
                        da.priority = ordinal_trend(&ts, &ys, t_star, 1, last_sys.quality_levels);
                    }
                    let w_by_key: Vec<BTreeMap<(String, String), u8>> = systems
                        .iter()
                        .map(|s| {
                            s.compat
                                .iter()
                                .map(|e| (canonical_pair(&e.a, &e.b), e.w))
                                .collect()
                        })
                        .collect();
                    for entry in &mut out.compat {
                        let key = canonical_pair(&entry.a, &entry.b);
                        let ys: Vec<u8> = w_by_key.iter().map(|m| m[&key]).collect();
                        entry.w = ordinal_trend(&ts, &ys, t_star, 0, last_sys.compat_max);
                    }
                    Ok(SystemState::MorphSystem(out))
                }
                SystemState::EstimateTable(last_table) => {
                    let tables: Vec<&EstimateTable<S>> = series
                        .states
                        .iter()
                        .map(|s| match s {
                            SystemState::EstimateTable(t) => t,
                            SystemState::MorphSystem(_) => unreachable!("uniform kinds"),
                        })
                        .collect();
                    let mut out = last_table.clone();
                    for i in 0..out.values.len() {
                        for j in 0..out.values[i].len() {
                            let ys: Vec<S> = tables.iter().map(|t| t.values[i][j]).collect();
                            let mut v = linear_extrapolate(&ts, &ys, t_star);
                            let spec = &out.criteria[j];
                            if let Some(lo) = spec.scale_min {
                                v = v.max(lo);
                            }
                            if let Some(hi) = spec.scale_max {
                                v = v.min(hi);
                            }
                            out.values[i][j] = v;
                        }
                    }
                    Ok(SystemState::EstimateTable(out))
                }
            }
        }
    }
}

/// A detector re-run across a snapshot series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "detector", rename_all = "kebab-case")]
pub enum Detector<S> {
    /// Composite bottlenecks of the solution each snapshot depicts; the
    /// snapshots must carry exactly one alternative per slot.
    CompositeBottlenecks { size: usize },
    /// Pareto-efficient compositions of each snapshot frame.
    ParetoSolutions { budget: u64 },
    /// Pareto-chart thresholding on one criterion.
    ParetoChart { criterion: String, threshold: S },
    /// Pareto-efficient component selection.
    ParetoEfficient { criteria: Vec<String> },
    /// Outranking layer ranking.
    Layers {
        criteria: Vec<String>,
        params: OutrankParams<S>,
    },
}

/// Detector output for a single snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DetectionOutcome<S> {
    Subsystems { subsystems: Vec<Subsystem> },
    Solutions { solutions: Vec<CompositeSolution> },
    Chart { chart: ParetoChart<S> },
    Efficient { components: BTreeSet<String> },
    Layers { ranking: LayerRanking },
}

/// Detector result at one time point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEntry<S> {
    pub timestamp: u32,
    pub is_forecast: bool,
    pub outcome: DetectionOutcome<S>,
}

/// Detector results across all snapshots and the forecast point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BottleneckTrajectory<S> {
    pub entries: Vec<TrajectoryEntry<S>>,
}

fn run_detector<S: Scalar>(
    state: &SystemState<S>,
    detector: &Detector<S>,
) -> Result<DetectionOutcome<S>, PredictError> {
    match (detector, state) {
        (Detector::CompositeBottlenecks { size }, SystemState::MorphSystem(system)) => {
            let mut picks = Vec::with_capacity(system.slots.len());
            for slot in &system.slots {
                let alts = system.slot_alternatives(slot);
                if alts.len() != 1 {
                    return Err(PredictError::DetectorMismatch(format!(
                        "composite-bottlenecks needs exactly one alternative per slot, slot {slot:?} has {}",
                        alts.len()
                    )));
                }
                picks.push(alts[0].id.clone());
            }
            let solution = morph::compose(system, &picks)?;
            let subsystems = morph::composite_bottlenecks(system, &solution, *size)?;
            Ok(DetectionOutcome::Subsystems { subsystems })
        }
        (Detector::ParetoSolutions { budget }, SystemState::MorphSystem(system)) => {
            let solutions = morph::pareto_solutions_with_budget(system, *budget)?;
            Ok(DetectionOutcome::Solutions { solutions })
        }
        (
            Detector::ParetoChart {
                criterion,
                threshold,
            },
            SystemState::EstimateTable(table),
        ) => {
            let chart = screening::pareto_chart(table, criterion, *threshold)?;
            Ok(DetectionOutcome::Chart { chart })
        }
        (Detector::ParetoEfficient { criteria }, SystemState::EstimateTable(table)) => {
            let components = screening::pareto_efficient(table, criteria)?;
            Ok(DetectionOutcome::Efficient { components })
        }
        (Detector::Layers { criteria, params }, SystemState::EstimateTable(table)) => {
            let ranking = screening::electre_layers(table, criteria, params)?;
            Ok(DetectionOutcome::Layers { ranking })
        }
        (d, s) => Err(PredictError::DetectorMismatch(format!(
            "detector {:?} cannot run on {} snapshots",
            detector_name(d),
            s.kind()
        ))),
    }
}

fn detector_name<S>(d: &Detector<S>) -> &'static str {
    match d {
        Detector::CompositeBottlenecks { .. } => "composite-bottlenecks",
        Detector::ParetoSolutions { .. } => "pareto-solutions",
        Detector::ParetoChart { .. } => "chart",
        Detector::ParetoEfficient { .. } => "pareto",
        Detector::Layers { .. } => "rank",
    }
}

/// Run `detector` on every snapshot and on the forecast state; the
/// historical entries are exactly what running the detector directly on each
/// snapshot yields (no coupling across time).
pub fn predictive_bottlenecks<S: Scalar>(
    series: &SnapshotSeries<S>,
    forecaster: &Forecaster<S>,
    detector: &Detector<S>,
) -> Result<BottleneckTrajectory<S>, PredictError> {
    series.validate()?;
    let forecast_state = forecast(series, forecaster)?;
    let mut entries = Vec::with_capacity(series.states.len() + 1);
    for (&t, state) in series.timestamps.iter().zip(&series.states) {
        entries.push(TrajectoryEntry {
            timestamp: t,
            is_forecast: false,
            outcome: run_detector(state, detector)?,
        });
    }
    entries.push(TrajectoryEntry {
        timestamp: series.timestamps.last().unwrap() + forecaster.horizon,
        is_forecast: true,
        outcome: run_detector(&forecast_state, detector)?,
    });
    Ok(BottleneckTrajectory { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CompatEntry, DesignAlternative};

    /// Solution-form system over four slots with adjustable priorities and
    /// pair compatibilities.
    fn solution_state(
        priorities: [u8; 4],
        compat: [(u8, u8, u8, u8, u8, u8); 1],
    ) -> SystemState<f64> {
        let [px, py, pz, ph] = priorities;
        let (xy, xz, xh, yz, yh, zh) = (
            compat[0].0,
            compat[0].1,
            compat[0].2,
            compat[0].3,
            compat[0].4,
            compat[0].5,
        );
        let da = |id: &str, slot: &str, priority: u8| DesignAlternative {
            id: id.into(),
            slot_id: slot.into(),
            priority,
        };
        let pair = |a: &str, b: &str, w: u8| CompatEntry {
            a: a.into(),
            b: b.into(),
            w,
        };
        SystemState::MorphSystem(MorphSystem {
            slots: vec!["X".into(), "Y".into(), "Z".into(), "H".into()],
            alternatives: vec![
                da("X2", "X", px),
                da("Y2", "Y", py),
                da("Z2", "Z", pz),
                da("H2", "H", ph),
            ],
            compat: vec![
                pair("X2", "Y2", xy),
                pair("X2", "Z2", xz),
                pair("X2", "H2", xh),
                pair("Y2", "Z2", yz),
                pair("Y2", "H2", yh),
                pair("Z2", "H2", zh),
            ],
            quality_levels: 3,
            compat_max: 3,
        })
    }

    fn two_point_series() -> SnapshotSeries<f64> {
        SnapshotSeries {
            timestamps: vec![0, 1],
            states: vec![
                solution_state([3, 2, 3, 3], [(2, 3, 2, 3, 3, 3)]),
                solution_state([3, 2, 3, 2], [(3, 3, 2, 3, 3, 2)]),
            ],
        }
    }

    #[test]
    fn hold_last_is_a_fixed_point() {
        let series = two_point_series();
        let f = forecast(&series, &Forecaster::hold_last()).unwrap();
        assert_eq!(&f, series.states.last().unwrap());
    }

    #[test]
    fn constant_series_forecasts_to_itself() {
        let state = solution_state([3, 2, 3, 3], [(2, 3, 2, 3, 3, 3)]);
        let series = SnapshotSeries {
            timestamps: vec![0, 1, 2],
            states: vec![state.clone(), state.clone(), state.clone()],
        };
        for f in [Forecaster::hold_last(), Forecaster::linear_trend(1)] {
            assert_eq!(forecast(&series, &f).unwrap(), state);
        }
    }

    #[test]
    fn linear_trend_extrapolates_and_clamps_priorities() {
        let series = two_point_series();
        let f = forecast(&series, &Forecaster::linear_trend(1)).unwrap();
        let SystemState::MorphSystem(sys) = f else {
            panic!("morph series forecasts to a morph state")
        };
        let priority = |id: &str| {
            sys.alternatives
                .iter()
                .find(|da| da.id == id)
                .unwrap()
                .priority
        };
        // H: 3 then 2, slope -1, lands on the scale floor at the horizon.
        assert_eq!(priority("H2"), 1);
        assert_eq!(priority("X2"), 3);
        assert_eq!(priority("Y2"), 2);
        let w = |a: &str, b: &str| sys.compat.iter().find(|e| e.a == a && e.b == b).unwrap().w;
        // (X2, Y2): 2 then 3, slope +1, extrapolates to 4 and clamps to 3.
        assert_eq!(w("X2", "Y2"), 3);
        // (Z2, H2): 3 then 2 extrapolates to 1.
        assert_eq!(w("Z2", "H2"), 1);
    }

    #[test]
    fn linear_trend_clamps_to_scale_ceiling() {
        // Value 0 then 2 on a 0..=3 compatibility scale, horizon 2.
        let series = SnapshotSeries {
            timestamps: vec![0, 1],
            states: vec![
                solution_state([1, 1, 1, 1], [(0, 3, 3, 3, 3, 3)]),
                solution_state([1, 1, 1, 1], [(2, 3, 3, 3, 3, 3)]),
            ],
        };
        let f = forecast(&series, &Forecaster::linear_trend(2)).unwrap();
        let SystemState::MorphSystem(sys) = f else {
            panic!()
        };
        assert_eq!(
            sys.compat[0].w, 3,
            "raw extrapolation above the scale clamps"
        );
    }

    #[test]
    fn linear_trend_needs_history() {
        let series = SnapshotSeries {
            timestamps: vec![0],
            states: vec![solution_state([3, 2, 3, 3], [(2, 3, 2, 3, 3, 3)])],
        };
        assert!(matches!(
            forecast(&series, &Forecaster::linear_trend(1)),
            Err(PredictError::NeedsTwoSnapshots)
        ));
    }

    #[test]
    fn user_supplied_passes_skeleton_validation() {
        let series = two_point_series();
        let good = solution_state([3, 3, 3, 1], [(3, 3, 2, 3, 3, 2)]);
        let f = forecast(&series, &Forecaster::user_supplied(good.clone())).unwrap();
        assert_eq!(f, good);

        let SystemState::MorphSystem(mut broken) = good else {
            panic!()
        };
        broken.alternatives[0].id = "X9".into();
        broken.compat[0].a = "X9".into();
        broken.compat[1].a = "X9".into();
        broken.compat[2].a = "X9".into();
        let res = forecast(
            &series,
            &Forecaster::user_supplied(SystemState::MorphSystem(broken)),
        );
        assert!(matches!(res, Err(PredictError::SkeletonMismatch(_))));
    }

    #[test]
    fn single_snapshot_hold_last_trajectory_repeats() {
        let series = SnapshotSeries {
            timestamps: vec![0],
            states: vec![solution_state([3, 2, 3, 3], [(2, 3, 2, 3, 3, 3)])],
        };
        let trajectory = predictive_bottlenecks(
            &series,
            &Forecaster::hold_last(),
            &Detector::CompositeBottlenecks { size: 3 },
        )
        .unwrap();
        assert_eq!(trajectory.entries.len(), 2);
        assert_eq!(trajectory.entries[0].outcome, trajectory.entries[1].outcome);
        assert!(trajectory.entries[1].is_forecast);
        assert_eq!(trajectory.entries[1].timestamp, 1);
    }

    #[test]
    fn historical_entries_equal_direct_detection() {
        let series = two_point_series();
        let trajectory = predictive_bottlenecks(
            &series,
            &Forecaster::hold_last(),
            &Detector::CompositeBottlenecks { size: 3 },
        )
        .unwrap();
        for (entry, state) in trajectory.entries.iter().zip(&series.states) {
            let SystemState::MorphSystem(system) = state else {
                panic!()
            };
            let picks: Vec<String> = system.alternatives.iter().map(|da| da.id.clone()).collect();
            let solution = crate::morph::compose(system, &picks).unwrap();
            let direct = crate::morph::composite_bottlenecks(system, &solution, 3).unwrap();
            assert_eq!(
                entry.outcome,
                DetectionOutcome::Subsystems { subsystems: direct },
                "history must not couple across time"
            );
        }
    }

    #[test]
    fn detector_kind_mismatch_is_an_error() {
        let series = two_point_series();
        let res = predictive_bottlenecks(
            &series,
            &Forecaster::hold_last(),
            &Detector::ParetoChart {
                criterion: "C1".into(),
                threshold: 1.0,
            },
        );
        assert!(matches!(res, Err(PredictError::DetectorMismatch(_))));
    }
}
