//! Rescaled record processes on `[0, 1]`.
//!
//! With the exponential clock `τ(t) = e^{nt} - 1`:
//!
//! ```text
//! C̃_n(t) = (C(τ) - nt) / √n
//! W̃_n(t) = λ / n^{3/2} · (W(τ) - (nt)² / (2λ))
//! Φ_n(t) = A_{N(τ)} / n
//! ```
//!
//! and with the cube-root clock `τ(t) = (n + 1)^{t^{1/3}} - 1`,
//!
//! ```text
//! λ√3 / (ln n)^{3/2} · (W(τ) - t^{2/3} (ln n)² / (2λ)).
//! ```
//!
//! All evaluations read `W` through the closed form in
//! [`counts_at`](crate::pathsim::counts_at).

use crate::error::{require_positive, Error, Result};
use crate::pathsim::{counts_at, PoissonPath, RecordTrace};

/// Default number of grid points, `2^9 + 1`.
pub const DEFAULT_GRID_POINTS: usize = 513;

/// Strictly increasing time points in `[0, 1]` starting at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput("a grid needs at least two points".into()));
        }
        if points[0] != 0.0 {
            return Err(Error::InvalidInput("grid must start at 0".into()));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) || *points.last().unwrap() > 1.0 {
            return Err(Error::InvalidInput(
                "grid must be strictly increasing within [0, 1]".into(),
            ));
        }
        Ok(Grid(points))
    }

    /// `points` equally spaced points from 0 to 1 inclusive.
    pub fn uniform(points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidInput("a grid needs at least two points".into()));
        }
        let g = (points - 1) as f64;
        Grid::new((0..points).map(|i| i as f64 / g).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the grid point closest to `t`.
    pub fn nearest(&self, t: f64) -> usize {
        let i = self.0.partition_point(|&p| p < t);
        if i == 0 {
            0
        } else if i == self.0.len() || t - self.0[i - 1] <= self.0[i] - t {
            i - 1
        } else {
            i
        }
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid::uniform(DEFAULT_GRID_POINTS).expect("default grid is valid")
    }
}

/// A right-continuous step function on `[0, 1]` known at grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPath {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl SampledPath {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} grid points but {} values",
                grid.len(),
                values.len()
            )));
        }
        Ok(SampledPath { grid, values })
    }

    /// Step interpolation: the value at the last grid point `<= t`.
    pub fn value_at(&self, t: f64) -> f64 {
        let i = self.grid.points().partition_point(|&p| p <= t);
        self.values[i.saturating_sub(1)]
    }
}

fn check_scale(n: f64) -> Result<()> {
    if n >= 1.0 && n.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("scale n must be >= 1, got {n}")))
    }
}

/// `e^{nt} - 1`.
pub fn exponential_clock(n: f64, t: f64) -> f64 {
    (n * t).exp_m1()
}

fn check_horizon(path: &PoissonPath, needed: f64) -> Result<()> {
    if path.horizon() >= needed {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "required horizon",
            value: needed,
            lo: 0.0,
            hi: path.horizon(),
        })
    }
}

fn sample_on_clock(
    path: &PoissonPath,
    trace: &RecordTrace,
    n: f64,
    grid: &Grid,
    f: impl Fn(f64, usize, f64) -> f64,
) -> Result<SampledPath> {
    check_scale(n)?;
    check_horizon(path, exponential_clock(n, 1.0))?;
    let values = grid
        .points()
        .iter()
        .map(|&t| {
            let (_, c, w) = counts_at(path, trace, exponential_clock(n, t))?;
            Ok(f(t, c, w))
        })
        .collect::<Result<Vec<_>>>()?;
    SampledPath::new(grid.clone(), values)
}

/// `C̃_n` on `grid`.
pub fn rescaled_c(path: &PoissonPath, trace: &RecordTrace, n: f64, grid: &Grid) -> Result<SampledPath> {
    let scale = n.sqrt().recip();
    sample_on_clock(path, trace, n, grid, |t, c, _| scale * (c as f64 - n * t))
}

/// `W̃_n` on `grid`.
pub fn rescaled_w(
    path: &PoissonPath,
    trace: &RecordTrace,
    n: f64,
    rate: f64,
    grid: &Grid,
) -> Result<SampledPath> {
    require_positive("rate", rate)?;
    let scale = rate / n.powf(1.5);
    sample_on_clock(path, trace, n, grid, |t, _, w| {
        let nt = n * t;
        scale * (w - nt * nt / (2.0 * rate))
    })
}

/// The stochastic clock `Φ_n`.
pub fn stochastic_clock(path: &PoissonPath, trace: &RecordTrace, n: f64, grid: &Grid) -> Result<SampledPath> {
    sample_on_clock(path, trace, n, grid, |_, c, _| c as f64 / n)
}

/// `(n + 1)^{t^{1/3}} - 1`, pinned to exactly `n` at `t = 1`.
pub fn cuberoot_clock(n: u64, t: f64) -> f64 {
    let top = n as f64;
    if t >= 1.0 {
        top
    } else {
        (t.cbrt() * (top + 1.0).ln()).exp_m1().min(top)
    }
}

/// `W` on the cube-root clock, centred and scaled to converge to a standard
/// Brownian motion.
pub fn cuberoot_rescaled_w(
    path: &PoissonPath,
    trace: &RecordTrace,
    n: u64,
    rate: f64,
    grid: &Grid,
) -> Result<SampledPath> {
    require_positive("rate", rate)?;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("cube-root clock needs n >= 2, got {n}")));
    }
    check_horizon(path, n as f64)?;
    let log_n = (n as f64).ln();
    let scale = rate * 3f64.sqrt() / log_n.powf(1.5);
    let values = grid
        .points()
        .iter()
        .map(|&t| {
            let (_, _, w) = counts_at(path, trace, cuberoot_clock(n, t))?;
            Ok(scale * (w - t.powf(2.0 / 3.0) * log_n * log_n / (2.0 * rate)))
        })
        .collect::<Result<Vec<_>>>()?;
    SampledPath::new(grid.clone(), values)
}

/// Roots in `x >= 1` of `ln(x) / x = rate`; at most two.
fn log_ratio_roots(rate: f64) -> Vec<f64> {
    let e = std::f64::consts::E;
    let peak = 1.0 / e;
    if rate > peak {
        return Vec::new();
    }
    if rate == peak {
        return vec![e];
    }
    let g = |x: f64| x.ln() / x - rate;
    let bisect = |mut lo: f64, mut hi: f64, rising: bool| {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (g(mid) < 0.0) == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut hi = 2.0 * e;
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    vec![bisect(1.0, e, true), bisect(e, hi, false)]
}

/// `sup_{0<=s<=t} |W_s - (ln(1 + s))² / (2 rate)|`, exact.
///
/// On each lifetime `W` is affine with slope 0 or 1. With slope 0 the
/// difference is monotone; with slope 1 its derivative
/// `1 - ln(1+s) / (rate (1+s))` vanishes only where `ln(x)/x = rate`,
/// `x = 1 + s`. The supremum is therefore taken over lifetime endpoints and
/// those (at most two) points.
pub fn sup_deviation(path: &PoissonPath, trace: &RecordTrace, t: f64, rate: f64) -> Result<f64> {
    require_positive("rate", rate)?;
    if !(0.0..=path.horizon()).contains(&t) {
        return Err(Error::OutOfRange {
            what: "t",
            value: t,
            lo: 0.0,
            hi: path.horizon(),
        });
    }
    let reference = |s: f64| {
        let l = s.ln_1p();
        l * l / (2.0 * rate)
    };
    let critical: Vec<f64> = log_ratio_roots(rate).into_iter().map(|x| x - 1.0).collect();
    let mut sup = 0.0f64;
    let mut start = 0.0;
    let mut w_start = 0.0;
    for (&end, &rec) in path.arrivals().iter().zip(&trace.indicators) {
        if start >= t {
            break;
        }
        let stop = end.min(t);
        if rec {
            for &s in &critical {
                if s > start && s < stop {
                    sup = sup.max((w_start + (s - start) - reference(s)).abs());
                }
            }
            w_start += stop - start;
        }
        sup = sup.max((w_start - reference(stop)).abs());
        start = end;
    }
    Ok(sup)
}

/// `(C_t / ln t, 2 rate W_t / (ln t)²)`, both tending to 1 almost surely.
pub fn slln_ratios(path: &PoissonPath, trace: &RecordTrace, t: f64, rate: f64) -> Result<(f64, f64)> {
    require_positive("rate", rate)?;
    if !(t > 1.0) {
        return Err(Error::InvalidParameter(format!("need t > 1, got {t}")));
    }
    let (_, c, w) = counts_at(path, trace, t)?;
    Ok(slln_ratios_from(c, w, t, rate))
}

/// [`slln_ratios`] from already computed `C_t` and `W_t`.
pub fn slln_ratios_from(c: usize, w: f64, t: f64, rate: f64) -> (f64, f64) {
    let l = t.ln();
    (c as f64 / l, 2.0 * rate * w / (l * l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathsim::{build_trace, simulate_path};
    use crate::randomness::make_stream;
    use std::f64::consts::E;

    fn hand() -> (PoissonPath, RecordTrace) {
        let p = PoissonPath::from_interarrivals(1.0, 3.0, &[1.0, 0.5, 2.0]).unwrap();
        let tr = build_trace(&p);
        (p, tr)
    }

    /// Path whose first arrival lies beyond `horizon`.
    fn late(horizon: f64) -> (PoissonPath, RecordTrace) {
        let p = PoissonPath::from_interarrivals(1.0, horizon, &[horizon + 1.0]).unwrap();
        let tr = build_trace(&p);
        (p, tr)
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(vec![0.0]).is_err());
        assert!(Grid::new(vec![0.1, 1.0]).is_err());
        assert!(Grid::new(vec![0.0, 0.5, 0.5]).is_err());
        assert!(Grid::new(vec![0.0, 1.5]).is_err());
        let g = Grid::default();
        assert_eq!(g.len(), 513);
        assert_eq!(g.points()[512], 1.0);
        assert_eq!(g.nearest(0.5), 256);
        assert_eq!(g.nearest(2.0), 512);
    }

    #[test]
    fn step_interpolation() {
        let p = SampledPath::new(Grid::uniform(3).unwrap(), vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.value_at(0.49), 1.0);
        assert_eq!(p.value_at(0.5), 2.0);
        assert_eq!(p.value_at(1.0), 3.0);
        assert!(SampledPath::new(Grid::uniform(3).unwrap(), vec![1.0]).is_err());
    }

    #[test]
    fn hand_path_rescalings() {
        let (p, tr) = hand();
        let g = Grid::uniform(2).unwrap();
        let c = rescaled_c(&p, &tr, 1.0, &g).unwrap();
        assert_eq!(c.values, vec![0.0, 0.0]);
        let phi = stochastic_clock(&p, &tr, 1.0, &g).unwrap();
        assert_eq!(phi.values, vec![0.0, 1.0]);
        let w = rescaled_w(&p, &tr, 1.0, 1.0, &g).unwrap();
        assert_eq!(w.values[0], 0.0);
        // W(e - 1): record piece [0, 1) then non-record [1, 1.5), then record.
        let expect = 1.0 + (E - 1.0 - 1.5) - 0.5;
        assert!((w.values[1] - expect).abs() < 1e-12);
    }

    #[test]
    fn rescaled_w_before_first_arrival() {
        let (p, tr) = late(E);
        let w = rescaled_w(&p, &tr, 1.0, 1.0, &Grid::uniform(2).unwrap()).unwrap();
        assert!((w.values[1] - (E - 1.0 - 0.5)).abs() < 1e-12);
        assert!((w.values[1] - 1.21828).abs() < 1e-5);
    }

    #[test]
    fn horizon_and_scale_checks() {
        let (p, tr) = hand();
        let g = Grid::default();
        assert!(rescaled_c(&p, &tr, 2.0, &g).is_err());
        assert!(rescaled_c(&p, &tr, 0.5, &g).is_err());
        assert!(cuberoot_rescaled_w(&p, &tr, 1, 1.0, &g).is_err());
        assert!(cuberoot_rescaled_w(&p, &tr, 4, 1.0, &g).is_err());
        assert!(slln_ratios(&p, &tr, 1.0, 1.0).is_err());
    }

    #[test]
    fn c_tilde_is_clock_identity() {
        let g = Grid::default();
        for id in 0..20 {
            let n = 6.0;
            let p = simulate_path(&mut make_stream(13, id), 1.0, exponential_clock(n, 1.0)).unwrap();
            let tr = build_trace(&p);
            let c = rescaled_c(&p, &tr, n, &g).unwrap();
            let phi = stochastic_clock(&p, &tr, n, &g).unwrap();
            assert!(phi.values.windows(2).all(|w| w[0] <= w[1]));
            for ((&t, &cv), &pv) in g.points().iter().zip(&c.values).zip(&phi.values) {
                assert!((cv - n.sqrt() * (pv - t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cuberoot_endpoints() {
        assert_eq!(cuberoot_clock(7, 1.0), 7.0);
        assert_eq!(cuberoot_clock(7, 0.0), 0.0);
        let (p, tr) = late(2.0);
        let v = cuberoot_rescaled_w(&p, &tr, 2, 1.0, &Grid::uniform(2).unwrap()).unwrap();
        let l2 = 2f64.ln();
        let expect = 3f64.sqrt() / l2.powf(1.5) * (2.0 - l2 * l2 / 2.0);
        assert_eq!(v.values[0], 0.0);
        assert!((v.values[1] - expect).abs() < 1e-12);
    }

    #[test]
    fn sup_deviation_before_first_arrival() {
        let (p, tr) = late(1.0);
        let l2 = 2f64.ln();
        let s = sup_deviation(&p, &tr, 1.0, 1.0).unwrap();
        assert!((s - (1.0 - l2 * l2 / 2.0)).abs() < 1e-15);
        assert!((s - 0.75977).abs() < 1e-5);
        assert_eq!(sup_deviation(&p, &tr, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn log_ratio_roots_solve() {
        assert!(log_ratio_roots(0.5).is_empty());
        for &r in &[0.05, 0.2, 0.36] {
            for x in log_ratio_roots(r) {
                assert!((x.ln() / x - r).abs() < 1e-12, "rate {r} root {x}");
            }
        }
    }

    #[test]
    fn sup_deviation_dominates_dense_sampling() {
        // Small rates put interior maxima inside record pieces.
        for (id, &rate) in [0.1, 0.3, 1.0, 2.0].iter().enumerate() {
            let horizon = 60.0;
            let p = simulate_path(&mut make_stream(31, id as u64), rate, horizon).unwrap();
            let tr = build_trace(&p);
            let exact = sup_deviation(&p, &tr, horizon, rate).unwrap();
            let mut dense = 0.0f64;
            for k in 0..=200_000 {
                let s = horizon * k as f64 / 200_000.0;
                let (_, _, w) = counts_at(&p, &tr, s).unwrap();
                let l = s.ln_1p();
                dense = dense.max((w - l * l / (2.0 * rate)).abs());
            }
            assert!(exact >= dense - 1e-9, "rate {rate}: {exact} < {dense}");
            assert!(exact - dense < 1e-3, "rate {rate}: {exact} vs {dense}");
        }
    }

    #[test]
    fn sup_deviation_grows_with_t() {
        let p = simulate_path(&mut make_stream(3, 3), 1.0, 500.0).unwrap();
        let tr = build_trace(&p);
        let mut last = 0.0;
        for k in 0..=100 {
            let s = sup_deviation(&p, &tr, 5.0 * k as f64, 1.0).unwrap();
            assert!(s >= last);
            last = s;
        }
    }

    #[test]
    fn slln_examples() {
        let (p, tr) = hand();
        let (c, _) = slln_ratios(&p, &tr, E, 1.0).unwrap();
        assert_eq!(c, 1.0);
        let (p, tr) = late(10.0);
        let (_, w) = slln_ratios(&p, &tr, 10.0, 1.0).unwrap();
        assert!((w - 20.0 / 10f64.ln().powi(2)).abs() < 1e-12);
    }
}
