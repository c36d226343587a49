//! Command-line front end: parse JSON inputs, dispatch a detector, and emit
//! a plain-text or JSON report (plus CSV chart data for `screen chart`).
//!
//! Exit status: 0 on success, 1 on input/precondition errors, 2 when an
//! instance is infeasible for the requested method (enumeration budget or
//! exact-search node limit exceeded).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use chokepoint::model::CompositeSolution;
use chokepoint::morph;
use chokepoint::network;
use chokepoint::predict::{self, Detector, ForecastMethod, Forecaster, SystemState};
use chokepoint::screening::{self, CalibrationOutcome};
use chokepoint::{MorphSystem, OutrankParams64};
use chokepoint_cli::formats::{self, Document};
use chokepoint_cli::{report, CliError};

#[derive(Parser)]
#[command(
    name = "chokepoint",
    version,
    about = "Detect bottlenecks in modular systems",
    propagate_version = true
)]
struct Cli {
    /// Report format on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Node cap for the exact network searches.
    #[arg(long, global = true)]
    exact_limit: Option<usize>,
    /// Combination cap for exhaustive composite enumeration.
    #[arg(long, global = true, default_value_t = morph::DEFAULT_ENUM_BUDGET)]
    budget: u64,
    /// Reserved: every detector is deterministic, the value is ignored.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    JsonReport,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate-table detectors.
    #[command(subcommand)]
    Screen(ScreenCommand),
    /// Composite-solution detectors.
    #[command(subcommand)]
    Morph(MorphCommand),
    /// Network-structure detectors.
    #[command(subcommand)]
    Net(NetCommand),
    /// Forecast-driven detection.
    #[command(subcommand)]
    Predict(PredictCommand),
}

#[derive(Subcommand)]
enum ScreenCommand {
    /// Pareto chart with an inclusive selection threshold.
    Chart(ChartArgs),
    /// Pareto-efficient component selection.
    Pareto(ParetoArgs),
    /// Outranking layer ranking.
    Rank(RankArgs),
}

#[derive(Args)]
struct ChartArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    criterion: String,
    #[arg(long)]
    threshold: f64,
    /// Also write the sorted bars as CSV (`component,value,selected`).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ParetoArgs {
    #[arg(long)]
    input: PathBuf,
    /// Criteria to use (default: every criterion in the table).
    #[arg(long, value_delimiter = ',')]
    criteria: Option<Vec<String>>,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    input: PathBuf,
    /// Concordance threshold p in [0, 1].
    #[arg(long)]
    p: Option<f64>,
    /// Discordance threshold q in [0, 1].
    #[arg(long)]
    q: Option<f64>,
    /// Read (p, q) from a recorded calibration file instead.
    #[arg(long, conflicts_with_all = ["p", "q"])]
    calibration: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    criteria: Option<Vec<String>>,
}

#[derive(Subcommand)]
enum MorphCommand {
    /// Enumerate the Pareto-efficient compositions.
    Solve(SolveArgs),
    /// List improvement actions for one composed solution.
    Actions(ActionsArgs),
    /// Detect composite bottlenecks of one composed solution.
    Bottlenecks(BottlenecksArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct ActionsArgs {
    #[arg(long)]
    input: PathBuf,
    /// One design alternative per slot, e.g. `X1,Y2,Z2,H1`.
    #[arg(long, value_delimiter = ',', required = true)]
    picks: Vec<String>,
}

#[derive(Args)]
struct BottlenecksArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    picks: Vec<String>,
    /// Subsystem size (at least 2, below the slot count).
    #[arg(long)]
    size: usize,
}

#[derive(Subcommand)]
enum NetCommand {
    /// Maximum-leaf spanning tree; internal nodes are the bottleneck set.
    Mlst(NetArgs),
    /// Minimum connected dominating set.
    Cds(NetArgs),
    /// Two-level network design (primary path plus secondary trees).
    Htnd(NetArgs),
}

#[derive(Args)]
struct NetArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Heuristic)]
    method: Method,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Heuristic,
    Exact,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Heuristic => "heuristic",
            Method::Exact => "exact",
        }
    }
}

#[derive(Subcommand)]
enum PredictCommand {
    /// Forecast the series and run a detector across it.
    Run(PredictArgs),
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    detector: DetectorKind,
    /// Subsystem size for `composite-bottlenecks`.
    #[arg(long)]
    size: Option<usize>,
    /// Criterion id for `chart`.
    #[arg(long)]
    criterion: Option<String>,
    /// Threshold for `chart`.
    #[arg(long)]
    threshold: Option<f64>,
    /// Criteria for `pareto`/`rank` (default: every criterion).
    #[arg(long, value_delimiter = ',')]
    criteria: Option<Vec<String>>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, value_enum, default_value_t = ForecasterKind::HoldLast)]
    forecaster: ForecasterKind,
    /// Steps past the last snapshot at which the forecast sits.
    #[arg(long, default_value_t = 1)]
    horizon: u32,
    /// Forecast state file for `--forecaster user`.
    #[arg(long)]
    forecast_file: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DetectorKind {
    CompositeBottlenecks,
    ParetoSolutions,
    Chart,
    Pareto,
    Rank,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ForecasterKind {
    HoldLast,
    LinearTrend,
    User,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Infeasible(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, command: &str, text: String, payload: serde_json::Value) {
    match cli.format {
        Format::Text => print!("{text}"),
        Format::JsonReport => {
            let doc = json!({ "command": command, "report": payload });
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializable report")
            );
        }
    }
}

fn all_criteria(table: &chokepoint::EstimateTable64) -> Vec<String> {
    table.criteria.iter().map(|c| c.id.clone()).collect()
}

fn compose_from_picks(
    system: &MorphSystem,
    picks: &[String],
) -> Result<CompositeSolution, CliError> {
    Ok(morph::compose(system, picks)?)
}

fn read_calibration(path: &PathBuf) -> Result<(f64, f64), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let cal: CalibrationOutcome = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed {}: {e}", path.display())))?;
    Ok((cal.concordance_threshold, cal.discordance_threshold))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Screen(ScreenCommand::Chart(args)) => {
            let table = formats::load_table(&args.input)?;
            let chart = screening::pareto_chart(&table, &args.criterion, args.threshold)?;
            if let Some(csv_path) = &args.csv {
                fs::write(csv_path, report::chart_csv(&chart)).map_err(|e| {
                    CliError::Input(format!("cannot write {}: {e}", csv_path.display()))
                })?;
            }
            emit(
                cli,
                "screen chart",
                report::chart_text(&chart),
                json!({ "chart": chart }),
            );
            Ok(())
        }
        Command::Screen(ScreenCommand::Pareto(args)) => {
            let table = formats::load_table(&args.input)?;
            let criteria = args
                .criteria
                .clone()
                .unwrap_or_else(|| all_criteria(&table));
            let efficient = screening::pareto_efficient(&table, &criteria)?;
            emit(
                cli,
                "screen pareto",
                report::efficient_text(&criteria, &efficient),
                json!({ "criteria": criteria, "efficient": efficient }),
            );
            Ok(())
        }
        Command::Screen(ScreenCommand::Rank(args)) => {
            let table = formats::load_table(&args.input)?;
            let criteria = args
                .criteria
                .clone()
                .unwrap_or_else(|| all_criteria(&table));
            let (p, q) = match (&args.calibration, args.p, args.q) {
                (Some(path), _, _) => read_calibration(path)?,
                (None, Some(p), Some(q)) => (p, q),
                _ => {
                    return Err(CliError::Input(
                        "supply either --calibration or both --p and --q".into(),
                    ))
                }
            };
            let params = OutrankParams64::new(p, q);
            let ranking = screening::electre_layers(&table, &criteria, &params)?;
            emit(
                cli,
                "screen rank",
                report::layers_text(p, q, &ranking),
                json!({ "p": p, "q": q, "criteria": criteria, "layers": ranking.layers }),
            );
            Ok(())
        }
        Command::Morph(MorphCommand::Solve(args)) => {
            let system = formats::load_morph(&args.input)?;
            let solutions = morph::pareto_solutions_with_budget(&system, cli.budget)?;
            let combinations: u128 = system
                .slots
                .iter()
                .map(|s| system.slot_alternatives(s).len() as u128)
                .product();
            emit(
                cli,
                "morph solve",
                report::solutions_text(combinations, &solutions),
                json!({ "combinations": combinations.to_string(), "solutions": solutions }),
            );
            Ok(())
        }
        Command::Morph(MorphCommand::Actions(args)) => {
            let system = formats::load_morph(&args.input)?;
            let solution = compose_from_picks(&system, &args.picks)?;
            let actions = morph::improvement_actions(&system, &solution)?;
            emit(
                cli,
                "morph actions",
                report::actions_text(&solution, &actions),
                json!({ "solution": solution, "actions": actions }),
            );
            Ok(())
        }
        Command::Morph(MorphCommand::Bottlenecks(args)) => {
            let system = formats::load_morph(&args.input)?;
            let solution = compose_from_picks(&system, &args.picks)?;
            let subs = morph::composite_bottlenecks(&system, &solution, args.size)?;
            emit(
                cli,
                "morph bottlenecks",
                report::bottlenecks_text(&solution, args.size, &subs),
                json!({ "solution": solution, "size": args.size, "bottlenecks": subs }),
            );
            Ok(())
        }
        Command::Net(NetCommand::Mlst(args)) => {
            let graph = formats::load_graph(&args.input)?;
            let tree = match args.method {
                Method::Heuristic => network::mlst_heuristic(&graph)?,
                Method::Exact => network::mlst_exact_with_limit(
                    &graph,
                    cli.exact_limit.unwrap_or(network::DEFAULT_EXACT_LIMIT),
                )?,
            };
            emit(
                cli,
                "net mlst",
                report::tree_text(args.method.name(), &tree),
                json!({ "method": args.method.name(), "tree": tree }),
            );
            Ok(())
        }
        Command::Net(NetCommand::Cds(args)) => {
            let graph = formats::load_graph(&args.input)?;
            let members = match args.method {
                Method::Heuristic => network::cds_heuristic(&graph)?,
                Method::Exact => network::cds_exact_with_limit(
                    &graph,
                    cli.exact_limit.unwrap_or(network::DEFAULT_EXACT_LIMIT),
                )?,
            };
            emit(
                cli,
                "net cds",
                report::cds_text(args.method.name(), &members),
                json!({ "method": args.method.name(), "members": members }),
            );
            Ok(())
        }
        Command::Net(NetCommand::Htnd(args)) => {
            let graph = formats::load_graph(&args.input)?;
            let design = match args.method {
                Method::Heuristic => network::htnd_heuristic(&graph)?,
                Method::Exact => network::htnd_exact_with_limit(
                    &graph,
                    cli.exact_limit.unwrap_or(network::DEFAULT_HTND_EXACT_LIMIT),
                )?,
            };
            emit(
                cli,
                "net htnd",
                report::design_text(args.method.name(), &design),
                json!({ "method": args.method.name(), "design": design }),
            );
            Ok(())
        }
        Command::Predict(PredictCommand::Run(args)) => {
            let series = formats::load_series(&args.input)?;
            let detector = build_detector(cli, args, &series)?;
            let forecaster = build_forecaster(args)?;
            let trajectory = predict::predictive_bottlenecks(&series, &forecaster, &detector)?;
            let heading = format!(
                "detector {}, forecaster {}, horizon {}",
                detector_label(&detector),
                forecaster_label(&forecaster),
                args.horizon
            );
            emit(
                cli,
                "predict run",
                report::trajectory_text(&heading, &trajectory),
                json!({ "detector": detector, "trajectory": trajectory }),
            );
            Ok(())
        }
    }
}

fn build_detector(
    cli: &Cli,
    args: &PredictArgs,
    series: &chokepoint::SnapshotSeries64,
) -> Result<Detector<f64>, CliError> {
    let table_criteria = || -> Option<Vec<String>> {
        series.states.first().and_then(|s| match s {
            SystemState::EstimateTable(t) => {
                Some(t.criteria.iter().map(|c| c.id.clone()).collect())
            }
            SystemState::MorphSystem(_) => None,
        })
    };
    match args.detector {
        DetectorKind::CompositeBottlenecks => {
            let size = args
                .size
                .ok_or_else(|| CliError::Input("composite-bottlenecks needs --size".into()))?;
            Ok(Detector::CompositeBottlenecks { size })
        }
        DetectorKind::ParetoSolutions => Ok(Detector::ParetoSolutions { budget: cli.budget }),
        DetectorKind::Chart => {
            let criterion = args
                .criterion
                .clone()
                .ok_or_else(|| CliError::Input("chart needs --criterion".into()))?;
            let threshold = args
                .threshold
                .ok_or_else(|| CliError::Input("chart needs --threshold".into()))?;
            Ok(Detector::ParetoChart {
                criterion,
                threshold,
            })
        }
        DetectorKind::Pareto => {
            let criteria = args
                .criteria
                .clone()
                .or_else(table_criteria)
                .ok_or_else(|| CliError::Input("pareto needs --criteria".into()))?;
            Ok(Detector::ParetoEfficient { criteria })
        }
        DetectorKind::Rank => {
            let criteria = args
                .criteria
                .clone()
                .or_else(table_criteria)
                .ok_or_else(|| CliError::Input("rank needs --criteria".into()))?;
            let (p, q) = match (args.p, args.q) {
                (Some(p), Some(q)) => (p, q),
                _ => return Err(CliError::Input("rank needs --p and --q".into())),
            };
            Ok(Detector::Layers {
                criteria,
                params: OutrankParams64::new(p, q),
            })
        }
    }
}

fn build_forecaster(args: &PredictArgs) -> Result<Forecaster<f64>, CliError> {
    if args.horizon == 0 {
        return Err(CliError::Input(
            "forecast horizon must be at least 1".into(),
        ));
    }
    let method = match args.forecaster {
        ForecasterKind::HoldLast => ForecastMethod::HoldLast,
        ForecasterKind::LinearTrend => ForecastMethod::LinearTrend,
        ForecasterKind::User => {
            let path = args
                .forecast_file
                .as_ref()
                .ok_or_else(|| CliError::Input("--forecaster user needs --forecast-file".into()))?;
            let state = match formats::parse_document(path)? {
                Document::MorphSystem(m) => SystemState::MorphSystem(m),
                Document::EstimateTable(t) => SystemState::EstimateTable(t),
                other => {
                    return Err(CliError::Input(format!(
                        "{} holds a {}, expected a system state",
                        path.display(),
                        other.kind()
                    )))
                }
            };
            ForecastMethod::UserSupplied {
                state: Box::new(state),
            }
        }
    };
    Ok(Forecaster {
        method,
        horizon: args.horizon,
    })
}

fn detector_label(detector: &Detector<f64>) -> String {
    match detector {
        Detector::CompositeBottlenecks { size } => format!("composite-bottlenecks (size {size})"),
        Detector::ParetoSolutions { budget } => format!("pareto-solutions (budget {budget})"),
        Detector::ParetoChart {
            criterion,
            threshold,
        } => {
            format!("chart ({criterion} >= {threshold})")
        }
        Detector::ParetoEfficient { .. } => "pareto".to_string(),
        Detector::Layers { params, .. } => format!(
            "rank (p = {}, q = {})",
            params.concordance_threshold, params.discordance_threshold
        ),
    }
}

fn forecaster_label(forecaster: &Forecaster<f64>) -> &'static str {
    match forecaster.method {
        ForecastMethod::HoldLast => "hold-last",
        ForecastMethod::LinearTrend => "linear-trend",
        ForecastMethod::UserSupplied { .. } => "user-supplied",
    }
}
