//! `farm-sentinel plan | simulate | report | validate`.
//!
//! Exit codes: 0 success, 1 the scenario is invalid, 2 anything else.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use farm_sentinel_core::metrics::{baseline_row, compare, compute_metrics, criticality_table, emit, Format};
use farm_sentinel_core::mission::{replay, EventLog, MissionRun};
use farm_sentinel_core::scenario::Prepared;
use farm_sentinel_core::spatial::to_vector_matrix;
use farm_sentinel_core::{MissionResult, Scenario};

use crate::config::{load_scenario, LoadError};
use crate::output;
use crate::sweep::run_sweep;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_RUNTIME: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "farm-sentinel", version, about = "Multi-UAV wind farm inspection simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan every zone's inspection path and write it under paths/.
    Plan(OutArgs),
    /// Run one mission, or a sweep with --runs.
    Simulate(SimulateArgs),
    /// Compare earlier simulate outputs with the configured baseline.
    Report(ReportArgs),
    /// Check a scenario file and list every problem.
    Validate(ScenarioArg),
}

#[derive(Debug, Args)]
pub struct ScenarioArg {
    #[arg(long, value_name = "PATH")]
    pub scenario: PathBuf,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    #[arg(long, value_name = "DIR", env = "FARM_SENTINEL_OUT", default_value = "./out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: OutArgs,
    /// Overrides the scenario's master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub runs: u32,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: OutArgs,
    #[arg(long, default_value = "text", value_parser = parse_format)]
    pub format: Format,
}

fn parse_format(s: &str) -> Result<Format, String> {
    Format::parse(s).ok_or_else(|| format!("unknown format `{s}` (expected csv, text or plot-data)"))
}

#[derive(Debug)]
pub enum CliError {
    Invalid(Vec<String>),
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        if e.is_runtime() {
            CliError::Runtime(e.to_string())
        } else {
            CliError::Invalid(e.details())
        }
    }
}

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

pub fn run(cli: Cli) -> u8 {
    let stdout = io::stdout();
    match execute(&cli.command, &mut stdout.lock()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            match &e {
                CliError::Invalid(lines) => {
                    for l in lines {
                        eprintln!("error: {l}");
                    }
                }
                CliError::Runtime(m) => eprintln!("error: {m}"),
            }
            e.code()
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Validate(a) => {
            let s = load_scenario(&a.scenario)?;
            say(out, format_args!("ok: {} ({} zone(s))", a.scenario.display(), s.farm.zones.len()))
        }
        Command::Plan(a) => plan(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Report(a) => report(a, out),
    }
}

fn say(out: &mut dyn Write, args: std::fmt::Arguments<'_>) -> Result<(), CliError> {
    writeln!(out, "{args}").map_err(|e| CliError::Runtime(format!("stdout: {e}")))
}

fn prepare(path: &Path) -> Result<(Scenario, Prepared), CliError> {
    let s = load_scenario(path)?;
    let p = s.prepare().map_err(|issues| CliError::Invalid(issues.iter().map(|i| i.to_string()).collect()))?;
    Ok((s, p))
}

fn write(root: &Path, rel: &str, contents: &str) -> Result<(), CliError> {
    let path = root.join(rel);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(&path, contents).map_err(|e| io_err(&path, e))
}

/// Removes earlier outputs of this tool so the tree reflects only the current command.
fn clear(root: &Path, entries: &[&str]) -> Result<(), CliError> {
    for e in entries {
        let path = root.join(e);
        let r = if path.is_dir() { fs::remove_dir_all(&path) } else { fs::remove_file(&path) };
        match r {
            Err(err) if err.kind() != io::ErrorKind::NotFound => return Err(io_err(&path, err)),
            _ => {}
        }
    }
    Ok(())
}

fn write_paths(root: &Path, p: &Prepared) -> Result<(), CliError> {
    for path in &p.paths {
        write(root, &format!("paths/zone-{}.csv", path.zone_id), &output::path_csv(path))?;
    }
    write(root, "paths/vector-matrix.csv", &output::vector_matrix_csv(&p.layout, &to_vector_matrix(&p.layout)))
}

fn plan(a: &OutArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (_, p) = prepare(&a.scenario.scenario)?;
    clear(&a.out, &["paths"])?;
    write_paths(&a.out, &p)?;
    for path in &p.paths {
        say(
            out,
            format_args!(
                "zone {}: {} waypoints, {:.1} m, {:.3} h, uav-{}",
                path.zone_id,
                path.waypoints.len(),
                path.total_length,
                path.est_duration / 3600.0,
                p.assignment.uav_of(path.zone_id).map_or(0, |u| u + 1)
            ),
        )?;
    }
    say(out, format_args!("planned makespan {:.3} h", p.assignment.makespan / 3600.0))
}

fn run_name(k: usize, runs: usize) -> String {
    let width = runs.saturating_sub(1).to_string().len().max(3);
    format!("run-{k:0width$}")
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let root = &a.common.out;
    let (s, p) = prepare(&a.common.scenario.scenario)?;
    let master = a.seed.unwrap_or(s.seeds.master);
    let runs: Vec<MissionRun> = run_sweep(&s, master, a.runs).map_err(|e| CliError::Runtime(e.to_string()))?;

    clear(root, &["paths", "events", "reports", "summary.csv"])?;
    if s.outputs.paths {
        write_paths(root, &p)?;
    }
    for (k, r) in runs.iter().enumerate() {
        let name = run_name(k, runs.len());
        if s.outputs.events {
            write(root, &format!("events/{name}.csv"), &r.log.to_csv())?;
        }
        write(root, &format!("reports/{name}-defects.csv"), &output::defects_csv(&r.result.reports))?;
        write(root, &format!("reports/{name}-monitor.csv"), &output::monitor_csv(&r.result.health))?;
        if s.outputs.matrices {
            write(root, &format!("reports/{name}-matrix.csv"), &output::sensor_matrix_csv(&r.matrices))?;
        }
    }
    let results: Vec<MissionResult> = runs.into_iter().map(|r| r.result).collect();
    write(root, "summary.csv", &output::summary_csv(&results))?;

    let reported: usize = results.iter().map(|r| r.reports.len()).sum();
    let injected: u64 = results.iter().map(|r| r.injected_defects as u64).sum();
    say(out, format_args!("{} run(s), master seed {master}, {reported}/{injected} defects reported", results.len()))?;
    say(out, format_args!("outputs in {}", root.display()))
}

/// Mission results rebuilt from `events/run-*.csv`, in file-name order.
pub fn load_results(root: &Path) -> Result<Vec<MissionResult>, CliError> {
    let dir = root.join("events");
    let missing = || CliError::Runtime(format!("no simulation outputs under {}; run `simulate` first", dir.display()));
    let entries = match fs::read_dir(&dir) {
        Ok(e) => e,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(missing()),
        Err(e) => return Err(io_err(&dir, e)),
    };
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            name.starts_with("run-") && name.ends_with(".csv")
        })
        .collect();
    if files.is_empty() {
        return Err(missing());
    }
    files.sort();
    files
        .iter()
        .map(|f| {
            let text = fs::read_to_string(f).map_err(|e| io_err(f, e))?;
            let log = EventLog::parse(&text).map_err(|e| CliError::Runtime(format!("{}: {e}", f.display())))?;
            replay(&log).map_err(|e| CliError::Runtime(format!("{}: {e}", f.display())))
        })
        .collect()
}

fn report(a: &ReportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let root = &a.common.out;
    let s = load_scenario(&a.common.scenario.scenario)?;
    let results = load_results(root)?;
    let system = compute_metrics(&results, &s.baseline).map_err(|e| CliError::Runtime(e.to_string()))?;
    let cmp = compare(&baseline_row(&s.baseline), &system);
    let crit = criticality_table(&results, &s.baseline);
    for (name, contents) in emit(&cmp, &crit, a.format) {
        write(root, &format!("reports/{name}"), &contents)?;
        say(out, format_args!("wrote {}", root.join("reports").join(&name).display()))?;
    }
    for c in &cmp.checks {
        say(out, format_args!("{} {}", if c.pass { "pass" } else { "FAIL" }, c.name))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_names_sort() {
        assert_eq!(run_name(0, 1), "run-000");
        assert_eq!(run_name(7, 1000), "run-007");
        assert_eq!(run_name(1234, 2000), "run-1234");
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from(["farm-sentinel", "simulate", "--scenario", "a.toml", "--runs", "3", "--seed", "9", "--out", "x"]).unwrap();
        match cli.command {
            Command::Simulate(a) => {
                assert_eq!((a.runs, a.seed), (3, Some(9)));
                assert_eq!(a.common.out, PathBuf::from("x"));
            }
            _ => panic!("wrong command"),
        }
        assert!(Cli::try_parse_from(["farm-sentinel", "simulate", "--scenario", "a", "--runs", "0"]).is_err());
        assert!(Cli::try_parse_from(["farm-sentinel", "report", "--scenario", "a", "--format", "pdf"]).is_err());
    }
}
