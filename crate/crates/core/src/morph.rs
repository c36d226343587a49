//! Composite-solution analysis: compose solutions from one design
//! alternative per slot, grade them on the `(w; η)` poset, enumerate the
//! Pareto-efficient compositions, list improvement actions, and detect
//! composite bottlenecks as Pareto-efficient subsystems.
//!
//! Two orderings share the quality-vector poset. In *solution* mode the best
//! points have many high-priority picks and high compatibility. In
//! *bottleneck* mode the orientation of the priority counts flips: a
//! composite bottleneck is a group of low-quality picks held together by
//! strong compatibility, so low `η` mass at good priorities and high `w`
//! dominate.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::model::{canonical_pair, CompositeSolution, MorphSystem, QualityVector};

/// Default cap on the number of slot-wise combinations an exhaustive
/// enumeration may visit.
pub const DEFAULT_ENUM_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MorphError {
    #[error("no pick supplied for slot {0:?}")]
    MissingPick(String),
    #[error("pick {0:?} is not a declared design alternative")]
    UnknownPick(String),
    #[error("more than one pick supplied for slot {0:?}")]
    DuplicatePick(String),
    #[error("no compatibility declared for pair ({0:?}, {1:?})")]
    MissingCompatPair(String, String),
    #[error("quality vectors have mismatched shape: {0}")]
    ShapeMismatch(String),
    #[error("{combinations} combinations exceed the enumeration budget {budget}")]
    BudgetExceeded { combinations: u128, budget: u64 },
    #[error("subsystem size {size} outside 2..{slots}")]
    SizeOutOfRange { size: usize, slots: usize },
}

/// Orientation of the quality-vector partial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QualityOrdering {
    /// Best solutions: maximize compatibility and priority counts.
    Solution,
    /// Strongest composite bottlenecks: maximize compatibility, minimize
    /// priority counts.
    Bottleneck,
}

/// One way to improve a composed solution: lift a picked alternative to the
/// best priority, or lift a picked pair to the best compatibility.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImprovementAction {
    pub kind: ActionKind,
    pub from_level: u8,
    pub to_level: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "target")]
pub enum ActionKind {
    #[serde(rename = "alternative")]
    UpgradeAlternative { id: String, slot: String },
    #[serde(rename = "compatibility")]
    UpgradeCompatibility { a: String, b: String },
}

impl std::fmt::Display for ImprovementAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            ActionKind::UpgradeAlternative { id, .. } => {
                write!(f, "{id}: {} => {}", self.from_level, self.to_level)
            }
            ActionKind::UpgradeCompatibility { a, b } => {
                write!(f, "({a}, {b}): {} => {}", self.from_level, self.to_level)
            }
        }
    }
}

/// A slot subset of a composed solution with its own quality vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    pub slots: Vec<String>,
    pub picks: Vec<String>,
    pub quality: QualityVector,
}

impl Subsystem {
    pub fn label(&self) -> String {
        self.picks.join("*")
    }
}

/// True when `a` is at least as good as `b` on the priority-count poset:
/// every best-first cumulative count of `a` is at least `b`'s. Requires
/// vectors of equal length grading the same number of picks.
pub fn dominates_eta(a: &[u16], b: &[u16]) -> Result<bool, MorphError> {
    if a.len() != b.len() {
        return Err(MorphError::ShapeMismatch(format!(
            "eta lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (ta, tb): (u32, u32) = (
        a.iter().map(|&x| u32::from(x)).sum(),
        b.iter().map(|&x| u32::from(x)).sum(),
    );
    if ta != tb {
        return Err(MorphError::ShapeMismatch(format!(
            "eta totals {ta} and {tb}"
        )));
    }
    let mut cum_a = 0u32;
    let mut cum_b = 0u32;
    for (&xa, &xb) in a.iter().zip(b) {
        cum_a += u32::from(xa);
        cum_b += u32::from(xb);
        if cum_a < cum_b {
            return Ok(false);
        }
    }
    Ok(true)
}

impl QualityOrdering {
    /// True when `a` dominates (is at least as preferred as) `b`.
    pub fn dominates(self, a: &QualityVector, b: &QualityVector) -> Result<bool, MorphError> {
        let eta_ok = match self {
            QualityOrdering::Solution => dominates_eta(&a.eta, &b.eta)?,
            QualityOrdering::Bottleneck => dominates_eta(&b.eta, &a.eta)?,
        };
        Ok(a.w >= b.w && eta_ok)
    }

    /// Strict version of [`QualityOrdering::dominates`].
    pub fn dominates_strictly(
        self,
        a: &QualityVector,
        b: &QualityVector,
    ) -> Result<bool, MorphError> {
        Ok(self.dominates(a, b)? && !self.dominates(b, a)?)
    }
}

/// Convenience wrapper over [`QualityOrdering::dominates`].
pub fn dominates_quality(
    a: &QualityVector,
    b: &QualityVector,
    mode: QualityOrdering,
) -> Result<bool, MorphError> {
    mode.dominates(a, b)
}

struct PreparedSystem<'a> {
    system: &'a MorphSystem,
    /// Alternative indices grouped per slot, in declaration order.
    per_slot: Vec<Vec<usize>>,
    compat: HashMap<(String, String), u8>,
}

impl<'a> PreparedSystem<'a> {
    fn new(system: &'a MorphSystem) -> Self {
        let per_slot = system
            .slots
            .iter()
            .map(|slot| {
                system
                    .alternatives
                    .iter()
                    .enumerate()
                    .filter(|(_, da)| &da.slot_id == slot)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        Self {
            system,
            per_slot,
            compat: system.compat_index(),
        }
    }

    fn pair_w(&self, a: &str, b: &str) -> Result<u8, MorphError> {
        self.compat
            .get(&canonical_pair(a, b))
            .copied()
            .ok_or_else(|| MorphError::MissingCompatPair(a.to_string(), b.to_string()))
    }

    /// Quality of the picks at the given alternative indices (aligned with a
    /// subset of slots). `w` over an empty pair set (single-slot systems)
    /// defaults to the best level.
    fn quality_of(&self, picked: &[usize]) -> Result<QualityVector, MorphError> {
        let mut w = self.system.compat_max;
        for (i, &pa) in picked.iter().enumerate() {
            for &pb in picked.iter().skip(i + 1) {
                let pw = self.pair_w(
                    &self.system.alternatives[pa].id,
                    &self.system.alternatives[pb].id,
                )?;
                w = w.min(pw);
            }
        }
        let mut eta = vec![0u16; usize::from(self.system.quality_levels)];
        for &p in picked {
            let r = usize::from(self.system.alternatives[p].priority);
            if r >= 1 && r <= eta.len() {
                eta[r - 1] += 1;
            }
        }
        Ok(QualityVector::new(w, eta))
    }
}

/// Assemble a solution from one pick per slot (any pick order) and grade it:
/// `w` is the minimum pairwise compatibility among the picks, `η_r` the
/// number of picks at priority `r`.
pub fn compose(system: &MorphSystem, picks: &[String]) -> Result<CompositeSolution, MorphError> {
    let prepared = PreparedSystem::new(system);
    let mut by_slot: Vec<Option<usize>> = vec![None; system.slots.len()];
    for pick in picks {
        let idx = system
            .alternatives
            .iter()
            .position(|da| &da.id == pick)
            .ok_or_else(|| MorphError::UnknownPick(pick.clone()))?;
        let slot_pos = system
            .slots
            .iter()
            .position(|s| s == &system.alternatives[idx].slot_id)
            .ok_or_else(|| MorphError::UnknownPick(pick.clone()))?;
        if by_slot[slot_pos].is_some() {
            return Err(MorphError::DuplicatePick(system.slots[slot_pos].clone()));
        }
        by_slot[slot_pos] = Some(idx);
    }
    let picked: Vec<usize> = by_slot
        .iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| MorphError::MissingPick(system.slots[i].clone())))
        .collect::<Result<_, _>>()?;
    let quality = prepared.quality_of(&picked)?;
    Ok(CompositeSolution {
        picks: picked
            .into_iter()
            .map(|i| system.alternatives[i].id.clone())
            .collect(),
        quality,
    })
}

/// Keep the members whose quality vector no other member's quality vector
/// strictly dominates. Equal vectors are incomparable ties and all stay.
fn maximal_by_quality<T, F>(items: Vec<T>, quality: F, mode: QualityOrdering) -> Vec<T>
where
    F: Fn(&T) -> &QualityVector,
{
    // Dominance is decided on distinct quality vectors; the distinct count
    // stays small even when the item count is at the enumeration budget.
    let mut distinct: Vec<QualityVector> = Vec::new();
    let mut seen: HashSet<QualityVector> = HashSet::new();
    for item in &items {
        let q = quality(item);
        if seen.insert(q.clone()) {
            distinct.push(q.clone());
        }
    }
    let maximal: HashSet<QualityVector> = distinct
        .iter()
        .filter(|q| {
            !distinct.iter().any(|other| {
                mode.dominates_strictly(other, q)
                    .expect("uniform shapes inside one enumeration")
            })
        })
        .cloned()
        .collect();
    items
        .into_iter()
        .filter(|item| maximal.contains(quality(item)))
        .collect()
}

/// Exhaustively enumerate every slot-wise combination, drop infeasible ones
/// (any pick pair with compatibility 0), and return the maximal set under
/// solution-mode dominance, sorted by picks. Ties on quality are all kept.
pub fn pareto_solutions(system: &MorphSystem) -> Result<Vec<CompositeSolution>, MorphError> {
    pareto_solutions_with_budget(system, DEFAULT_ENUM_BUDGET)
}

/// [`pareto_solutions`] with an explicit enumeration budget.
pub fn pareto_solutions_with_budget(
    system: &MorphSystem,
    budget: u64,
) -> Result<Vec<CompositeSolution>, MorphError> {
    let prepared = PreparedSystem::new(system);
    let mut combinations: u128 = 1;
    for alts in &prepared.per_slot {
        combinations = combinations.saturating_mul(alts.len() as u128);
    }
    if combinations > u128::from(budget) {
        return Err(MorphError::BudgetExceeded {
            combinations,
            budget,
        });
    }
    let mut feasible = Vec::new();
    let mut counters = vec![0usize; system.slots.len()];
    if prepared.per_slot.iter().all(|alts| !alts.is_empty()) && !system.slots.is_empty() {
        loop {
            let picked: Vec<usize> = counters
                .iter()
                .enumerate()
                .map(|(slot, &i)| prepared.per_slot[slot][i])
                .collect();
            let quality = prepared.quality_of(&picked)?;
            if quality.w > 0 {
                feasible.push(CompositeSolution {
                    picks: picked
                        .into_iter()
                        .map(|i| system.alternatives[i].id.clone())
                        .collect(),
                    quality,
                });
            }
            // Odometer increment over slot positions, last slot fastest.
            let mut advanced = false;
            for slot in (0..system.slots.len()).rev() {
                counters[slot] += 1;
                if counters[slot] < prepared.per_slot[slot].len() {
                    advanced = true;
                    break;
                }
                counters[slot] = 0;
            }
            if !advanced {
                break;
            }
        }
    }
    let mut result = maximal_by_quality(feasible, |s| &s.quality, QualityOrdering::Solution);
    result.sort_by(|a, b| a.picks.cmp(&b.picks));
    Ok(result)
}

/// All single-step improvements of a composed solution: one upgrade to the
/// best priority per picked alternative that is not already there (in slot
/// order), then one upgrade to the best compatibility per picked pair below
/// it (pairs in slot order).
pub fn improvement_actions(
    system: &MorphSystem,
    solution: &CompositeSolution,
) -> Result<Vec<ImprovementAction>, MorphError> {
    let prepared = PreparedSystem::new(system);
    let mut actions = Vec::new();
    let das: Vec<_> = solution
        .picks
        .iter()
        .map(|p| {
            system
                .alternative(p)
                .ok_or_else(|| MorphError::UnknownPick(p.clone()))
        })
        .collect::<Result<_, _>>()?;
    for da in &das {
        if da.priority > 1 {
            actions.push(ImprovementAction {
                kind: ActionKind::UpgradeAlternative {
                    id: da.id.clone(),
                    slot: da.slot_id.clone(),
                },
                from_level: da.priority,
                to_level: 1,
            });
        }
    }
    for (i, da_a) in das.iter().enumerate() {
        for da_b in das.iter().skip(i + 1) {
            let w = prepared.pair_w(&da_a.id, &da_b.id)?;
            if w < system.compat_max {
                actions.push(ImprovementAction {
                    kind: ActionKind::UpgradeCompatibility {
                        a: da_a.id.clone(),
                        b: da_b.id.clone(),
                    },
                    from_level: w,
                    to_level: system.compat_max,
                });
            }
        }
    }
    Ok(actions)
}

/// Enumerate every slot subset of the given size, grade each as a
/// subsystem (`w` over the pairs inside the subset, `η` over its picks), and
/// return the maximal set under bottleneck-mode dominance, in subset order.
pub fn composite_bottlenecks(
    system: &MorphSystem,
    solution: &CompositeSolution,
    size: usize,
) -> Result<Vec<Subsystem>, MorphError> {
    let m = system.slots.len();
    if size < 2 || size >= m {
        return Err(MorphError::SizeOutOfRange { size, slots: m });
    }
    let prepared = PreparedSystem::new(system);
    let picked: Vec<usize> = solution
        .picks
        .iter()
        .map(|p| {
            system
                .alternatives
                .iter()
                .position(|da| &da.id == p)
                .ok_or_else(|| MorphError::UnknownPick(p.clone()))
        })
        .collect::<Result<_, _>>()?;
    if picked.len() != m {
        return Err(MorphError::ShapeMismatch(format!(
            "{} picks for {m} slots",
            picked.len()
        )));
    }
    let mut subsystems = Vec::new();
    let mut subset: Vec<usize> = (0..size).collect();
    loop {
        let sub_picked: Vec<usize> = subset.iter().map(|&s| picked[s]).collect();
        let quality = prepared.quality_of(&sub_picked)?;
        subsystems.push(Subsystem {
            slots: subset.iter().map(|&s| system.slots[s].clone()).collect(),
            picks: sub_picked
                .into_iter()
                .map(|i| system.alternatives[i].id.clone())
                .collect(),
            quality,
        });
        // Next lexicographic subset of slot positions.
        let mut advanced = false;
        for i in (0..size).rev() {
            if subset[i] < m - (size - i) {
                subset[i] += 1;
                for j in i + 1..size {
                    subset[j] = subset[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    Ok(maximal_by_quality(
        subsystems,
        |s| &s.quality,
        QualityOrdering::Bottleneck,
    ))
}
