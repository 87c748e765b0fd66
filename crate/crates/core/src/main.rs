use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use decolab::harness::oracle::run_oracle;
use decolab::harness::run::fit_series;
use decolab::harness::{ordering_report, run_scenario, FitReport, Scenario, TimeSeries};
use decolab::{Result, Tolerances};

/// Decoherence scenarios: run, fit, compare, and check against oracles.
#[derive(Parser)]
#[command(name = "decolab", version)]
struct Cli {
    /// Overrides the seed given in a config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Tolerance override `key=value`; may be repeated.
    #[arg(long = "tol-override", global = true, value_name = "KEY=VALUE")]
    tol_override: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario; writes series.csv and summary.json into the output directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit t_D and t_R on an existing series CSV and print the JSON summary.
    Fit {
        #[arg(long)]
        series: PathBuf,
    },
    /// Collect summary.json files under a directory and print the t_D/t_R ordering table.
    Compare {
        #[arg(long)]
        reports: PathBuf,
    },
    /// Run a brute-force oracle and print its samples as CSV.
    Oracle {
        /// spin-bath, sid-gaussian or master-eq.
        #[arg(long)]
        scenario: String,
    },
}

fn tolerances(cli: &Cli, base: Tolerances) -> Result<Tolerances> {
    let mut tol = base;
    for o in &cli.tol_override {
        tol.apply_override(o)?;
    }
    Ok(tol)
}

fn collect_reports(dir: &std::path::Path) -> Result<Vec<(PathBuf, FitReport)>> {
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let p = entry?.path();
        if p.is_dir() {
            let s = p.join("summary.json");
            if s.is_file() {
                paths.push(s);
            }
        } else if p.file_name().is_some_and(|n| n == "summary.json") {
            paths.push(p);
        }
    }
    paths.sort();
    paths
        .into_iter()
        .map(|p| FitReport::read_json(&p).map(|r| (p, r)))
        .collect()
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config, out } => {
            let mut s = Scenario::from_file(config)?;
            if let Some(seed) = cli.seed {
                s.seed = seed;
            }
            s.tolerances = tolerances(cli, s.tolerances.clone())?;
            let run = run_scenario(&s)?;
            run.write(out)?;
            print!("{}", run.report.to_json());
        }
        Command::Fit { series } => {
            let ts = TimeSeries::read_csv(series)?;
            let name = series
                .file_stem()
                .map_or("series".to_string(), |s| s.to_string_lossy().into_owned());
            print!("{}", fit_series(&ts, &name)?.to_json());
        }
        Command::Compare { reports } => {
            let found = collect_reports(reports)?;
            let fits: Vec<FitReport> = found.into_iter().map(|(_, r)| r).collect();
            let table = ordering_report(&fits)?;
            std::fs::write(reports.join("ordering.json"), table.to_json())?;
            std::fs::write(reports.join("ordering.txt"), table.to_text())?;
            print!("{}", table.to_text());
        }
        Command::Oracle { scenario } => {
            let tol = tolerances(cli, Tolerances::default())?;
            let ts = run_oracle(scenario, cli.seed.unwrap_or(0), &tol)?;
            print!("{}", ts.to_csv());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
