//! Experiment driver for the `recordtime` crate: verification suites, trace
//! export and rescaled-process export, with seeded replication over a thread
//! pool whose size never changes the output.

pub mod config;
pub mod error;
pub mod export;
pub mod report;
pub mod suites;

use serde_json::json;

use recordtime::randomness::GENERATOR_VERSION;
use recordtime::TestReport;

pub use config::{ExperimentConfig, Format};
pub use error::{CliError, CliResult};
pub use suites::{run_suite, Suite, SuiteRun};

/// Runs `f` on a pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn check_output_dir(out: &std::path::Path) -> CliResult<()> {
    match out.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(CliError::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "output directory does not exist"),
        )),
        _ => Ok(()),
    }
}

/// Validates `cfg`, runs its suite and, when `cfg.out` is set, writes the
/// report there plus a `.meta.json` sidecar holding the resolved parameters.
///
/// Nothing is written unless the configuration is valid.
pub fn run_experiment(cfg: &ExperimentConfig) -> CliResult<Vec<TestReport>> {
    cfg.validate()?;
    let name = cfg
        .suite
        .as_deref()
        .ok_or_else(|| CliError::Usage("no suite given".into()))?;
    let suite = Suite::parse(name)?;
    if let Some(out) = &cfg.out {
        check_output_dir(out)?;
    }
    let run = with_workers(cfg.workers, || run_suite(suite, cfg))??;
    if let Some(out) = &cfg.out {
        report::write_file(out, &report::render_reports(&run.reports, cfg.format)?)?;
        let meta = json!({
            "suite": suite.name(),
            "seed": cfg.seed,
            "generator": GENERATOR_VERSION,
            "config": {
                "lambda": cfg.lambda, "horizon": cfg.horizon, "scales": cfg.scales,
                "reps": cfg.reps, "grid": cfg.grid, "format": cfg.format,
            },
            "resolved": run.params,
        });
        report::write_file(&report::meta_path(out), &report::render_meta(&meta))?;
    }
    Ok(run.reports)
}
