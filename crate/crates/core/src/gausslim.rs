//! Brownian motion `B`, its running integral `Y = ∫B`, and the limit pair
//! `Z^C = -B`, `Z^W = Y - tB`.
//!
//! The exact-joint scheme draws, per step of length `h`, the increment of `B`
//! and the increment `I = ∫_t^{t+h} (B_s - B_t) ds` from their joint Gaussian
//! law with covariance `[[h, h²/2], [h²/2, h³/3]]`:
//!
//! ```text
//! ΔB = √h z1
//! I  = h^{3/2} (z1 / 2 + z2 / √12)
//! Y_{t+h} = Y_t + h B_t + I
//! ```
//!
//! so `B` and `Y` are exact at grid points. The trapezoid scheme draws only
//! `ΔB` and integrates the grid values of `B`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::randomness::GaussianSource;
use crate::scaling::{Grid, SampledPath};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    ExactJoint,
    Trapezoid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPairPath {
    pub grid: Grid,
    pub b: Vec<f64>,
    pub y: Vec<f64>,
    pub scheme: Scheme,
}

impl GaussianPairPath {
    /// Pairs given Brownian grid values with their trapezoid integral.
    pub fn trapezoid_from_b(grid: Grid, b: Vec<f64>) -> Result<Self> {
        if b.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} grid points but {} values",
                grid.len(),
                b.len()
            )));
        }
        let mut y = Vec::with_capacity(b.len());
        y.push(0.0);
        let mut acc = 0.0;
        for (w, v) in grid.points().windows(2).zip(b.windows(2)) {
            acc += 0.5 * (w[1] - w[0]) * (v[0] + v[1]);
            y.push(acc);
        }
        Ok(GaussianPairPath {
            grid,
            b,
            y,
            scheme: Scheme::Trapezoid,
        })
    }
}

/// Covariance matrix of `(ΔB, ∫(B_s - B_t) ds)` over a step of length `h`.
pub fn exact_joint_step_cov(h: f64) -> [[f64; 2]; 2] {
    [[h, h * h / 2.0], [h * h / 2.0, h * h * h / 3.0]]
}

pub fn simulate_bm_pair<G: GaussianSource + ?Sized>(src: &mut G, grid: &Grid, scheme: Scheme) -> GaussianPairPath {
    let pts = grid.points();
    let mut b = Vec::with_capacity(pts.len());
    let mut y = Vec::with_capacity(pts.len());
    b.push(0.0);
    y.push(0.0);
    let (mut bt, mut yt) = (0.0, 0.0);
    let inv_sqrt12 = 1.0 / 12f64.sqrt();
    for w in pts.windows(2) {
        let h = w[1] - w[0];
        let sh = h.sqrt();
        match scheme {
            Scheme::ExactJoint => {
                let z1 = src.next_normal();
                let z2 = src.next_normal();
                let h32 = h * sh;
                yt += h * bt + h32 * (0.5 * z1 + inv_sqrt12 * z2);
                bt += sh * z1;
            }
            Scheme::Trapezoid => {
                let next = bt + sh * src.next_normal();
                yt += 0.5 * h * (bt + next);
                bt = next;
            }
        }
        b.push(bt);
        y.push(yt);
    }
    GaussianPairPath {
        grid: grid.clone(),
        b,
        y,
        scheme,
    }
}

/// `(Z^C, Z^W) = (-B, Y - tB)` pointwise.
pub fn limit_pair(pair: &GaussianPairPath) -> (SampledPath, SampledPath) {
    let zc = pair.b.iter().map(|b| -b).collect();
    let zw = pair
        .grid
        .points()
        .iter()
        .zip(pair.b.iter().zip(&pair.y))
        .map(|(&t, (&b, &y))| y - t * b)
        .collect();
    (
        SampledPath {
            grid: pair.grid.clone(),
            values: zc,
        },
        SampledPath {
            grid: pair.grid.clone(),
            values: zw,
        },
    )
}

fn check_unit(what: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what,
            value: v,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

/// `cov(Z^W_s, Z^W_t) = min(s, t)³ / 3`.
pub fn limit_cov(s: f64, t: f64) -> Result<f64> {
    check_unit("s", s)?;
    check_unit("t", t)?;
    Ok(s.min(t).powi(3) / 3.0)
}

/// `cov(Z^C_s, Z^W_t) = min(s, t)² / 2`.
pub fn limit_cross_cov(s: f64, t: f64) -> Result<f64> {
    check_unit("s", s)?;
    check_unit("t", t)?;
    Ok(s.min(t).powi(2) / 2.0)
}

/// `E Y_s Y_t = m² M / 2 - m³ / 6` with `m = min(s, t)`, `M = max(s, t)`.
pub fn integral_cov(s: f64, t: f64) -> f64 {
    let (m, big) = (s.min(t), s.max(t));
    m * m * big / 2.0 - m * m * m / 6.0
}

/// `E B_s Y_t`: `st - s²/2` for `s <= t`, `t²/2` otherwise.
pub fn bm_integral_cov(s: f64, t: f64) -> f64 {
    if s <= t {
        s * t - s * s / 2.0
    } else {
        t * t / 2.0
    }
}

/// `B̃(t³) / √3` on `grid`, equal in law to `Z^W`.
pub fn clocked_bm<G: GaussianSource + ?Sized>(src: &mut G, grid: &Grid) -> SampledPath {
    let inv_sqrt3 = 1.0 / 3f64.sqrt();
    let mut values = Vec::with_capacity(grid.len());
    values.push(0.0);
    let mut acc = 0.0;
    for w in grid.points().windows(2) {
        let du = w[1].powi(3) - w[0].powi(3);
        acc += du.sqrt() * src.next_normal();
        values.push(acc * inv_sqrt3);
    }
    SampledPath {
        grid: grid.clone(),
        values,
    }
}
