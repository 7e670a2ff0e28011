//! Tabular exports: a single path sampled on a grid, and rescaled processes
//! per replicate.

use rayon::prelude::*;
use serde::Serialize;

use recordtime::pathsim::{build_trace, observables_at, simulate_path};
use recordtime::randomness::{derive_seed, make_stream};
use recordtime::scaling::{exponential_clock, rescaled_c, rescaled_w, Grid};
use recordtime::{PoissonPath, RecordTrace};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub s: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "I_next")]
    pub i_next: u8,
    #[serde(rename = "C")]
    pub c: usize,
    #[serde(rename = "W")]
    pub w: f64,
}

/// One row per point of a `resolution`-point grid on `[0, horizon]` and one
/// per arrival in that interval, in time order without duplicates.
pub fn trace_rows(path: &PoissonPath, trace: &RecordTrace, resolution: usize) -> CliResult<Vec<TraceRow>> {
    let h = path.horizon();
    let steps = (resolution.max(2) - 1) as f64;
    let mut times: Vec<f64> = (0..=steps as usize).map(|k| h * (k as f64 / steps)).collect();
    times.extend(path.arrivals().iter().copied().filter(|&s| s <= h));
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
        .into_iter()
        .map(|s| {
            let o = observables_at(path, trace, s)?;
            Ok(TraceRow {
                s,
                n: o.n,
                i_next: trace.indicator(o.n + 1) as u8,
                c: o.c,
                w: o.w,
            })
        })
        .collect::<recordtime::Result<Vec<_>>>()
        .map_err(CliError::from)
}

pub fn export_trace(rate: f64, horizon: f64, seed: u64, resolution: usize) -> CliResult<Vec<TraceRow>> {
    let path = simulate_path(&mut make_stream(derive_seed(seed, "trace"), 0), rate, horizon)?;
    let trace = build_trace(&path);
    trace_rows(&path, &trace, resolution)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RescaledRow {
    pub replicate: u64,
    pub n: f64,
    pub t: f64,
    #[serde(rename = "C_tilde")]
    pub c_tilde: f64,
    #[serde(rename = "W_tilde")]
    pub w_tilde: f64,
}

/// `C̃_n` and `W̃_n` on a uniform grid for each scale and replicate; each
/// (scale, replicate) pair uses its own path.
pub fn rescaled_rows(rate: f64, scales: &[f64], reps: usize, grid_points: usize, seed: u64) -> CliResult<Vec<RescaledRow>> {
    let grid = Grid::uniform(grid_points)?;
    let mut rows = Vec::new();
    for &n in scales {
        let label = format!("rescaled-n{n}");
        let per_rep = (0..reps as u64)
            .into_par_iter()
            .map(|r| {
                let path = simulate_path(&mut make_stream(derive_seed(seed, &label), r), rate, exponential_clock(n, 1.0))?;
                let trace = build_trace(&path);
                let c = rescaled_c(&path, &trace, n, &grid)?;
                let w = rescaled_w(&path, &trace, n, rate, &grid)?;
                Ok(grid
                    .points()
                    .iter()
                    .zip(c.values.iter().zip(&w.values))
                    .map(|(&t, (&c_tilde, &w_tilde))| RescaledRow {
                        replicate: r,
                        n,
                        t,
                        c_tilde,
                        w_tilde,
                    })
                    .collect::<Vec<_>>())
            })
            .collect::<recordtime::Result<Vec<_>>>()?;
        rows.extend(per_rep.into_iter().flatten());
    }
    Ok(rows)
}

pub fn render_csv<T: Serialize>(rows: &[T], header: &[&str]) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(!rows.is_empty()).from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}
