//! Plain-text report rendering. Output is fully determined by the result
//! values: identical inputs produce byte-identical reports.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use chokepoint::model::CompositeSolution;
use chokepoint::morph::ImprovementAction;
use chokepoint::predict::{BottleneckTrajectory, DetectionOutcome};
use chokepoint::{LayerRanking, ParetoChart, SpanningTreeResult, Subsystem, TwoLevelDesign};

pub fn chart_text(chart: &ParetoChart<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "pareto chart on criterion {}, threshold {} (inclusive)",
        chart.criterion, chart.threshold
    );
    let _ = writeln!(
        out,
        "{:<6} {:<12} {:>10}  selected",
        "rank", "component", "value"
    );
    for (i, e) in chart.entries.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:<6} {:<12} {:>10}  {}",
            i + 1,
            e.component,
            e.value,
            if e.selected { "yes" } else { "" }
        );
    }
    let selected = chart.selected();
    let _ = writeln!(
        out,
        "selected ({}): {}",
        selected.len(),
        join(selected.iter())
    );
    out
}

pub fn chart_csv(chart: &ParetoChart<f64>) -> String {
    let mut out = String::from("component,value,selected\n");
    for e in &chart.entries {
        let _ = writeln!(out, "{},{},{}", e.component, e.value, e.selected);
    }
    out
}

pub fn efficient_text(criteria: &[String], components: &BTreeSet<String>) -> String {
    format!(
        "pareto-efficient components on criteria {}\nefficient ({}): {}\n",
        criteria.join(", "),
        components.len(),
        join(components.iter())
    )
}

pub fn layers_text(p: f64, q: f64, ranking: &LayerRanking) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "outranking layers (p = {p}, q = {q})");
    for (i, layer) in ranking.layers.iter().enumerate() {
        let _ = writeln!(
            out,
            "layer {} ({}): {}",
            i + 1,
            layer.len(),
            join(layer.iter())
        );
    }
    out
}

pub fn solutions_text(combinations: u128, solutions: &[CompositeSolution]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "combination space: {combinations}");
    let _ = writeln!(out, "pareto-efficient solutions ({}):", solutions.len());
    for s in solutions {
        let _ = writeln!(out, "  {}  N = {}", s.label(), s.quality);
    }
    out
}

pub fn actions_text(solution: &CompositeSolution, actions: &[ImprovementAction]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "solution {}  N = {}",
        solution.label(),
        solution.quality
    );
    let _ = writeln!(out, "improvement actions ({}):", actions.len());
    for (i, a) in actions.iter().enumerate() {
        let _ = writeln!(out, "  {}  {a}", i + 1);
    }
    out
}

pub fn bottlenecks_text(solution: &CompositeSolution, size: usize, subs: &[Subsystem]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "solution {}  N = {}",
        solution.label(),
        solution.quality
    );
    let _ = writeln!(
        out,
        "composite bottlenecks of size {size} ({}):",
        subs.len()
    );
    for s in subs {
        let _ = writeln!(out, "  {}  N = {}", s.label(), s.quality);
    }
    out
}

pub fn tree_text(method: &str, tree: &SpanningTreeResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "maximum-leaf spanning tree ({method})");
    let _ = writeln!(out, "leaf count: {}", tree.leaf_count());
    let _ = writeln!(
        out,
        "internal (bottleneck) nodes ({}): {}",
        tree.internal.len(),
        join(tree.internal.iter())
    );
    let _ = writeln!(out, "root: {}", tree.root);
    let edges: Vec<String> = tree.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
    let _ = writeln!(out, "edges: {}", edges.join(", "));
    let degrees: Vec<String> = tree
        .degrees
        .iter()
        .map(|(n, d)| format!("{n}:{d}"))
        .collect();
    let _ = writeln!(out, "degrees: {}", degrees.join(", "));
    out
}

pub fn cds_text(method: &str, members: &BTreeSet<String>) -> String {
    format!(
        "connected dominating set ({method}), size {}: {}\n",
        members.len(),
        join(members.iter())
    )
}

pub fn design_text(method: &str, design: &TwoLevelDesign<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "two-level network design ({method})");
    let _ = writeln!(
        out,
        "primary path ({} nodes): {}",
        design.primary_nodes.len(),
        design.primary_nodes.join(" - ")
    );
    let secondary: Vec<String> = design
        .secondary_edges
        .iter()
        .map(|(a, b)| format!("{a}-{b}"))
        .collect();
    let _ = writeln!(
        out,
        "secondary edges ({}): {}",
        secondary.len(),
        secondary.join(", ")
    );
    let _ = writeln!(out, "total cost: {}", design.total_cost);
    out
}

pub fn trajectory_text(heading: &str, trajectory: &BottleneckTrajectory<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "bottleneck trajectory: {heading}");
    for entry in &trajectory.entries {
        let marker = if entry.is_forecast { " (forecast)" } else { "" };
        let _ = writeln!(out, "t = {}{}", entry.timestamp, marker);
        match &entry.outcome {
            DetectionOutcome::Subsystems { subsystems } => {
                for s in subsystems {
                    let _ = writeln!(out, "  {}  N = {}", s.label(), s.quality);
                }
            }
            DetectionOutcome::Solutions { solutions } => {
                for s in solutions {
                    let _ = writeln!(out, "  {}  N = {}", s.label(), s.quality);
                }
            }
            DetectionOutcome::Chart { chart } => {
                let selected = chart.selected();
                let _ = writeln!(
                    out,
                    "  selected ({}): {}",
                    selected.len(),
                    join(selected.iter())
                );
            }
            DetectionOutcome::Efficient { components } => {
                let _ = writeln!(
                    out,
                    "  efficient ({}): {}",
                    components.len(),
                    join(components.iter())
                );
            }
            DetectionOutcome::Layers { ranking } => {
                for (i, layer) in ranking.layers.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "  layer {} ({}): {}",
                        i + 1,
                        layer.len(),
                        join(layer.iter())
                    );
                }
            }
        }
    }
    out
}

fn join<'a>(items: impl Iterator<Item = &'a String>) -> String {
    items.map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
}
