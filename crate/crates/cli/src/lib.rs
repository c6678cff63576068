//! Command-line driver: reads a JSON run configuration, runs one analysis and
//! writes a CSV plus a JSON sidecar describing the run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qfridge_core::analysis::{
    self, calibration_landscape, negative_grid, positive_grid, reference_targets, solve_point,
};
use qfridge_core::tolerances::Tolerances;
use qfridge_core::{Direction, Execution, FridgeConfig, Statistics, SweepRecord, ThresholdMode};
use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Header shared by every per-point CSV.
pub const SWEEP_HEADER: &str = "swept_value,t1,t1_minus_tc,residual,coherence,status";

/// Fraction of sweep points that must solve for a zero exit status.
pub const MIN_SUCCESS_FRACTION: f64 = 0.9;

const DEFAULT_GAMMA1_SEQUENCE: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
const DEFAULT_CALIBRATION_GRID: [f64; 7] = [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0];
const REPRODUCE_TC: [f64; 3] = [1.0, 1.5, 2.0];

#[derive(Debug, Parser)]
#[command(name = "qfridge", version, about = "Three-qubit absorption refrigerator steady states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandLine,
}

#[derive(Debug, Subcommand)]
pub enum CommandLine {
    /// Steady state at the configured hot-bath temperature.
    Solve(RunArgs),
    /// One steady state per entry of `th_values`.
    SweepTh(RunArgs),
    /// Lowest reachable qubit-1 temperature.
    Plateau(RunArgs),
    /// Largest cold-bath temperature at which the machine still cools.
    Threshold(RunArgs),
    /// Qubit-1 temperature as `γ₁ → 0`, against the closed form.
    Insulation(RunArgs),
    /// Fits the coupling `g` to the reference plateau temperatures.
    Calibrate(RunArgs),
    /// Regenerates the reference sweeps and threshold tables into a directory.
    Reproduce {
        #[arg(value_enum, default_value_t = Figure::All)]
        figure: Figure,
        #[command(flatten)]
        args: RunArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON run configuration (a previous sidecar is accepted too).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV, or output directory for `reproduce`.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    pub parallel: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Plateau)]
    pub threshold_mode: ModeArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Plateau,
    GridEdge,
}

impl From<ModeArg> for ThresholdMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Plateau => ThresholdMode::Plateau,
            ModeArg::GridEdge => ThresholdMode::GridEdge,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    SweepTh,
    Plateau,
    Threshold,
    Insulation,
    Calibrate,
    Reproduce,
}

/// Physical configuration plus the optional parameters of each command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigDocument {
    #[serde(flatten)]
    pub fridge: FridgeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub th_values: Option<Vec<f64>>,
    /// Hot-bath sign for `plateau` and `threshold`; inferred from the hot bath when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma1_sequence: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration_grid: Option<Vec<f64>>,
}

impl ConfigDocument {
    pub fn reference() -> Self {
        Self {
            fridge: FridgeConfig::reference_positive(1.0, 10.0).expect("reference config is valid"),
            th_values: None,
            direction: None,
            gamma1_sequence: None,
            calibration_grid: None,
        }
    }

    pub fn direction(&self) -> Direction {
        if let Some(d) = self.direction {
            return d;
        }
        let hot = self.fridge.hot();
        let inverted = hot.statistics == Statistics::Fermionic
            && hot.effective_temperature(self.fridge.gaps[2]).is_ok_and(|t| t < 0.0);
        if inverted {
            Direction::NegativeTh
        } else {
            Direction::PositiveTh
        }
    }
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<Figure>,
    pub threshold_mode: ThresholdMode,
    pub parallelism: Option<usize>,
    pub output: PathBuf,
    #[serde(flatten)]
    pub config: ConfigDocument,
}

/// JSON written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub tool_version: String,
    pub tolerances: Tolerances,
    pub summary: serde_json::Value,
    #[serde(flatten)]
    pub manifest: RunManifest,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] qfridge_core::Error),
    #[error("{failed} of {total} sweep points failed")]
    Sweep { failed: usize, total: usize },
    #[error("i/o error on {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(e) if e.is_config_error() => 2,
            CliError::Core(e) if e.is_convergence_error() => 4,
            CliError::Core(_) | CliError::Sweep { .. } => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "config",
            4 => "non-convergence",
            _ => "solver",
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() })
            .to_string()
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io { path: path.to_path_buf(), message: e.to_string() }
}

pub fn load_config(path: &Path) -> CliResult<ConfigDocument> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let doc: ConfigDocument =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    doc.fridge.validate()?;
    Ok(doc)
}

/// Shortest representation that parses back to the same `f64`, with an
/// exponent for very small or large magnitudes.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn record_row(r: &SweepRecord) -> String {
    let t1 = r.t1.value().map_or_else(|| "inf_temp".to_string(), fmt_f64);
    let t1_minus_tc = r.t1_minus_tc.map_or_else(|| "inf_temp".to_string(), fmt_f64);
    format!(
        "{},{},{},{},{},ok",
        fmt_f64(r.swept_value),
        t1,
        t1_minus_tc,
        fmt_f64(r.residual),
        fmt_f64(r.coherence_magnitude)
    )
}

fn error_row(swept_value: f64, e: &qfridge_core::Error) -> String {
    format!("{},,,,,{}", fmt_f64(swept_value), csv_field(&format!("error: {e}")))
}

fn records_csv(rows: &[String]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(r);
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

/// `results.csv` → `results.json` (`out.json` → `out.json.json`); a directory
/// output gets `run.json` inside it.
pub fn sidecar_path(manifest: &RunManifest) -> PathBuf {
    let out = &manifest.output;
    if manifest.command == Command::Reproduce {
        out.join("run.json")
    } else if out.extension().is_some_and(|e| e == "json") {
        let mut name = out.as_os_str().to_owned();
        name.push(".json");
        PathBuf::from(name)
    } else {
        out.with_extension("json")
    }
}

fn write_sidecar(manifest: &RunManifest, summary: serde_json::Value) -> CliResult<()> {
    let sidecar = Sidecar {
        tool_version: TOOL_VERSION.to_string(),
        tolerances: Tolerances::default(),
        summary,
        manifest: manifest.clone(),
    };
    let text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    write_file(&sidecar_path(manifest), &(text + "\n"))
}

fn execution(manifest: &RunManifest) -> Execution {
    match manifest.parallelism {
        Some(1) => Execution::Sequential,
        _ => Execution::Parallel,
    }
}

/// Converts parsed arguments into a manifest, loading the configuration file.
pub fn manifest_from_cli(cli: Cli) -> CliResult<RunManifest> {
    let (command, figure, args) = match cli.command {
        CommandLine::Solve(a) => (Command::Solve, None, a),
        CommandLine::SweepTh(a) => (Command::SweepTh, None, a),
        CommandLine::Plateau(a) => (Command::Plateau, None, a),
        CommandLine::Threshold(a) => (Command::Threshold, None, a),
        CommandLine::Insulation(a) => (Command::Insulation, None, a),
        CommandLine::Calibrate(a) => (Command::Calibrate, None, a),
        CommandLine::Reproduce { figure, args } => (Command::Reproduce, Some(figure), args),
    };
    let config = match &args.config {
        Some(path) => load_config(path)?,
        None if command == Command::Reproduce => ConfigDocument::reference(),
        None => return Err(CliError::Config(format!("--config is required for {command:?}"))),
    };
    if args.parallel == Some(0) {
        return Err(CliError::Config("--parallel must be at least 1".into()));
    }
    Ok(RunManifest {
        command,
        figure,
        threshold_mode: args.threshold_mode.into(),
        parallelism: args.parallel,
        output: args.out,
        config,
    })
}

/// Runs the manifest inside a thread pool of the requested size.
pub fn execute(manifest: &RunManifest) -> CliResult<()> {
    #[cfg(feature = "parallel")]
    if let Some(n) = manifest.parallelism.filter(|&n| n > 1) {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        return pool.install(|| dispatch(manifest));
    }
    dispatch(manifest)
}

fn dispatch(m: &RunManifest) -> CliResult<()> {
    match m.command {
        Command::Solve => run_solve(m),
        Command::SweepTh => run_sweep(m),
        Command::Plateau => run_plateau(m),
        Command::Threshold => run_threshold(m),
        Command::Insulation => run_insulation(m),
        Command::Calibrate => run_calibrate(m),
        Command::Reproduce => run_reproduce(m),
    }
}

fn run_solve(m: &RunManifest) -> CliResult<()> {
    let fridge = &m.config.fridge;
    let t_h = fridge.hot().effective_temperature(fridge.gaps[2])?;
    let record = solve_point(fridge, t_h)?;
    write_file(&m.output, &records_csv(&[record_row(&record)]))?;
    write_sidecar(m, serde_json::json!({ "record": record }))
}

/// Rows of a sweep and the number of failed points.
fn sweep_rows(fridge: &FridgeConfig, th_values: &[f64], execution: Execution) -> CliResult<(Vec<String>, usize)> {
    let points = qfridge_core::sweep_th_with(fridge, th_values, execution)?;
    let mut failed = 0;
    let rows = points
        .iter()
        .map(|p| match &p.result {
            Ok(r) => record_row(r),
            Err(e) => {
                failed += 1;
                error_row(p.swept_value, e)
            }
        })
        .collect();
    Ok((rows, failed))
}

fn check_success(failed: usize, total: usize) -> CliResult<()> {
    if (total - failed) as f64 >= MIN_SUCCESS_FRACTION * total as f64 {
        Ok(())
    } else {
        Err(CliError::Sweep { failed, total })
    }
}

fn run_sweep(m: &RunManifest) -> CliResult<()> {
    let th_values = m
        .config
        .th_values
        .as_deref()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| CliError::Config("sweep-th needs a non-empty th_values list".into()))?;
    let (rows, failed) = sweep_rows(&m.config.fridge, th_values, execution(m))?;
    write_file(&m.output, &records_csv(&rows))?;
    write_sidecar(m, serde_json::json!({ "points": rows.len(), "failed": failed }))?;
    check_success(failed, rows.len())
}

fn run_plateau(m: &RunManifest) -> CliResult<()> {
    let direction = m.config.direction();
    let result = qfridge_core::analysis::plateau_t1_with(&m.config.fridge, direction, execution(m))?;
    write_file(&m.output, &records_csv(&[record_row(&result.record)]))?;
    write_sidecar(m, serde_json::json!({ "plateau": result }))
}

fn run_threshold(m: &RunManifest) -> CliResult<()> {
    let direction = m.config.direction();
    let t_star = qfridge_core::cooling_threshold(&m.config.fridge, direction, m.threshold_mode)?;
    let record = analysis::best_record(&m.config.fridge, direction, m.threshold_mode, t_star)?;
    let mut row = record_row(&record);
    row.replace_range(..row.find(',').expect("csv row"), &fmt_f64(t_star));
    write_file(&m.output, &records_csv(&[row]))?;
    write_sidecar(
        m,
        serde_json::json!({ "direction": direction, "threshold_t_c": t_star, "record_at_threshold": record }),
    )
}

fn run_insulation(m: &RunManifest) -> CliResult<()> {
    let seq = m.config.gamma1_sequence.clone().unwrap_or_else(|| DEFAULT_GAMMA1_SEQUENCE.to_vec());
    let result = qfridge_core::analysis::insulation_limit_with(&m.config.fridge, &seq, execution(m))?;
    let rows: Vec<String> = result.numeric.iter().map(record_row).collect();
    write_file(&m.output, &records_csv(&rows))?;
    write_sidecar(
        m,
        serde_json::json!({
            "analytic_t1": result.analytic,
            "final_relative_gap": result.final_gap,
            "monotone": result.monotone,
            "smallest_usable_gamma1": result.smallest_usable_gamma1,
        }),
    )
}

fn run_calibrate(m: &RunManifest) -> CliResult<()> {
    let grid = m.config.calibration_grid.clone().unwrap_or_else(|| DEFAULT_CALIBRATION_GRID.to_vec());
    let report = calibration_landscape(&m.config.fridge, &reference_targets(), &grid, execution(m))?;
    let mut csv = String::from("g,max_rel_error,status\n");
    for &(g, err) in &report.landscape {
        let status = if g == report.best_g { "best" } else { "evaluated" };
        writeln!(csv, "{},{},{status}", fmt_f64(g), fmt_f64(err)).expect("write to string");
    }
    write_file(&m.output, &csv)?;
    write_sidecar(m, serde_json::json!({ "calibration": report }))?;
    if report.accepted {
        Ok(())
    } else {
        Err(qfridge_core::Error::CalibrationFailure { best_g: report.best_g, best_error: report.best_error }.into())
    }
}

fn tc_label(t_c: f64) -> String {
    format!("{t_c}").replace('.', "p")
}

fn run_reproduce(m: &RunManifest) -> CliResult<()> {
    let figure = m.figure.unwrap_or(Figure::All);
    let dir = &m.output;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let exec = execution(m);
    let template = &m.config.fridge;
    let mut files = Vec::new();
    let (mut failed, mut total) = (0, 0);

    type Panel = (Figure, Direction, fn() -> Vec<f64>);
    let sweeps: &[Panel] =
        &[(Figure::Fig2, Direction::PositiveTh, positive_grid), (Figure::Fig3, Direction::NegativeTh, negative_grid)];
    for &(fig, direction, grid) in sweeps {
        if figure != fig && figure != Figure::All {
            continue;
        }
        let base = analysis::config_for_direction(template, direction)?;
        for t_c in REPRODUCE_TC {
            let (rows, f) = sweep_rows(&base.with_t_c(t_c)?, &grid(), exec)?;
            failed += f;
            total += rows.len();
            let name = format!("{}_tc{}.csv", figure_name(fig), tc_label(t_c));
            write_file(&dir.join(&name), &records_csv(&rows))?;
            files.push(name);
        }
    }

    let mut thresholds = serde_json::Map::new();
    if matches!(figure, Figure::Fig4 | Figure::All) {
        let mut csv =
            String::from("t_c,lowest_t1_positive,lowest_t1_negative,cooling_pct_positive,cooling_pct_negative\n");
        for t_c in REPRODUCE_TC {
            let mut lows = [0.0; 2];
            for (k, direction) in [Direction::PositiveTh, Direction::NegativeTh].into_iter().enumerate() {
                let config = analysis::config_for_direction(template, direction)?.with_t_c(t_c)?;
                lows[k] = analysis::plateau_t1_with(&config, direction, exec)?.plateau_t1;
            }
            let pct = |t1: f64| 100.0 * (t_c - t1) / t_c;
            writeln!(
                csv,
                "{},{},{},{},{}",
                fmt_f64(t_c),
                fmt_f64(lows[0]),
                fmt_f64(lows[1]),
                fmt_f64(pct(lows[0])),
                fmt_f64(pct(lows[1]))
            )
            .expect("write to string");
        }
        write_file(&dir.join("fig4.csv"), &csv)?;
        files.push("fig4.csv".into());

        let mut csv = String::from("direction,mode,threshold_t_c,status\n");
        for direction in [Direction::PositiveTh, Direction::NegativeTh] {
            for (mode, label) in [(ThresholdMode::Plateau, "plateau"), (ThresholdMode::GridEdge, "grid-edge")] {
                let dir_label = match direction {
                    Direction::PositiveTh => "positive",
                    Direction::NegativeTh => "negative",
                };
                match qfridge_core::cooling_threshold(template, direction, mode) {
                    Ok(t) => {
                        writeln!(csv, "{dir_label},{label},{},ok", fmt_f64(t)).expect("write to string");
                        thresholds.insert(format!("{dir_label}/{label}"), t.into());
                    }
                    Err(e) => {
                        writeln!(csv, "{dir_label},{label},,{}", csv_field(&format!("error: {e}")))
                            .expect("write to string");
                    }
                }
            }
        }
        write_file(&dir.join("fig4_thresholds.csv"), &csv)?;
        files.push("fig4_thresholds.csv".into());
    }

    write_sidecar(
        m,
        serde_json::json!({ "files": files, "points": total, "failed": failed, "thresholds": thresholds }),
    )?;
    if total > 0 {
        check_success(failed, total)?;
    }
    Ok(())
}

fn figure_name(f: Figure) -> &'static str {
    match f {
        Figure::Fig2 => "fig2",
        Figure::Fig3 => "fig3",
        Figure::Fig4 => "fig4",
        Figure::All => "all",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest(command: Command, output: &str) -> RunManifest {
        RunManifest {
            command,
            figure: None,
            threshold_mode: ThresholdMode::Plateau,
            parallelism: None,
            output: PathBuf::from(output),
            config: ConfigDocument::reference(),
        }
    }

    #[test]
    fn sidecar_never_overwrites_the_output() {
        assert_eq!(sidecar_path(&manifest(Command::SweepTh, "a/b.csv")), PathBuf::from("a/b.json"));
        assert_eq!(sidecar_path(&manifest(Command::Solve, "out.json")), PathBuf::from("out.json.json"));
        assert_eq!(sidecar_path(&manifest(Command::Solve, "plain")), PathBuf::from("plain.json"));
        assert_eq!(sidecar_path(&manifest(Command::Reproduce, "dir")), PathBuf::from("dir/run.json"));
    }

    #[test]
    fn numbers_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, 1.6653345369377348e-16, -2.5e300, 10.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn csv_fields_are_quoted_when_needed() {
        assert_eq!(csv_field("ok"), "ok");
        assert_eq!(csv_field("a, b"), "\"a, b\"");
        assert_eq!(csv_field("say \"x\""), "\"say \"\"x\"\"\"");
    }

    #[test]
    fn direction_follows_the_hot_bath() {
        let mut doc = ConfigDocument::reference();
        assert_eq!(doc.direction(), Direction::PositiveTh);
        doc.fridge = FridgeConfig::reference_negative(1.0, -1.0).unwrap();
        assert_eq!(doc.direction(), Direction::NegativeTh);
        doc.direction = Some(Direction::PositiveTh);
        assert_eq!(doc.direction(), Direction::PositiveTh);
    }

    #[test]
    fn exit_codes_by_error_class() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::from(qfridge_core::Error::InvalidConfig("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(qfridge_core::Error::Singular { pivot: 0.0 }).exit_code(), 3);
        assert_eq!(CliError::from(qfridge_core::Error::NonConvergence { previous: 1.0, last: 2.0 }).exit_code(), 4);
        assert_eq!(CliError::Sweep { failed: 5, total: 10 }.exit_code(), 3);
    }
}
