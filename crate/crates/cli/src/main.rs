use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use recordtime_cli::export::{export_trace, render_csv, rescaled_rows};
use recordtime_cli::report::{render_reports, write_file};
use recordtime_cli::{run_experiment, with_workers, CliError, CliResult, ExperimentConfig, Format};

#[derive(Parser)]
#[command(name = "recordtime", version, about = "Simulate and verify the record structure of Poisson processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export one path: s, N, I_next, C, W on a grid plus every arrival.
    Trace(Common),
    /// Run a verification suite (pathwise, indicators, stirling, record-times,
    /// limit-cov, clt, slln, perpetuity, renewal-sampling, all).
    Verify {
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// Export rescaled C and W on a grid for each scale and replicate.
    Rescaled(Common),
}

#[derive(Args)]
struct Common {
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Scale parameters, comma separated.
    #[arg(long, alias = "scale", value_delimiter = ',')]
    scales: Option<Vec<f64>>,
    #[arg(long)]
    reps: Option<usize>,
    /// Grid points on [0, 1] (or on [0, horizon] for `trace`).
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn resolve(self, suite: Option<String>) -> CliResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_toml_file(p)?,
            None => ExperimentConfig::default(),
        };
        if suite.is_some() {
            cfg.suite = suite;
        }
        macro_rules! take {
            ($($field:ident),*) => { $(if self.$field.is_some() { cfg.$field = self.$field; })* };
        }
        take!(lambda, horizon, scales, reps, out, workers);
        if let Some(g) = self.grid {
            cfg.grid = g;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(p) => write_file(p, bytes),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| CliError::Io { path: "<stdout>".into(), source: e })
        }
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Trace(common) => {
            let cfg = common.resolve(None)?;
            let rows = export_trace(cfg.lambda_or(1.0), cfg.horizon.unwrap_or(10.0), cfg.seed, cfg.grid)?;
            emit(&cfg.out, &render_csv(&rows, &["s", "N", "I_next", "C", "W"])?)?;
            Ok(true)
        }
        Command::Rescaled(common) => {
            let cfg = common.resolve(None)?;
            let scales = cfg.scales_or(&[1.0, 2.0, 4.0, 8.0]);
            let rows = with_workers(cfg.workers, || {
                rescaled_rows(cfg.lambda_or(1.0), &scales, cfg.reps_or(10), cfg.grid, cfg.seed)
            })??;
            emit(&cfg.out, &render_csv(&rows, &["replicate", "n", "t", "C_tilde", "W_tilde"])?)?;
            Ok(true)
        }
        Command::Verify { suite, common } => {
            let cfg = common.resolve(Some(suite))?;
            let reports = run_experiment(&cfg)?;
            if cfg.out.is_some() {
                for r in &reports {
                    println!("{r}");
                }
            } else {
                emit(&None, &render_reports(&reports, cfg.format)?)?;
            }
            Ok(reports.iter().all(|r| r.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
