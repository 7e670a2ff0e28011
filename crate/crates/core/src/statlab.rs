//! Goodness-of-fit statistics, exact record-count laws, reference
//! distributions and pass/fail reports.

use std::fmt;

use serde::{Serialize, Serializer};
use statrs::function::erf::erfc;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Asymptotic 1% critical value of `√N · D` for the Kolmogorov distribution.
pub const KS_CRITICAL_1PCT: f64 = 1.63;

/// One-sample KS threshold at the 1% level.
pub fn ks_threshold_one_sample(n: usize) -> f64 {
    KS_CRITICAL_1PCT / (n as f64).sqrt()
}

/// Two-sample KS threshold at the 1% level for equal sample sizes `n`.
pub fn ks_threshold_two_sample(n: usize) -> f64 {
    KS_CRITICAL_1PCT * (2.0 / n as f64).sqrt()
}

/// A distribution function, with its left limit for laws that have atoms.
pub trait DistributionFunction {
    fn cdf(&self, x: f64) -> f64;

    /// `F(x-)`; equal to `cdf` for continuous laws.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
}

impl<F: Fn(f64) -> f64> DistributionFunction for F {
    fn cdf(&self, x: f64) -> f64 {
        self(x)
    }
}

fn sorted(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidInput("sample contains NaN".into()));
    }
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `sup_x |F_N(x) - F(x)|`, evaluated on both sides of every jump of the
/// empirical CDF.
pub fn ks_one_sample<D: DistributionFunction + ?Sized>(sample: &[f64], law: &D) -> Result<f64> {
    let xs = sorted(sample)?;
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let above = (i + 1) as f64 / n - law.cdf(x);
        let below = law.cdf_left(x) - i as f64 / n;
        d = d.max(above).max(below);
    }
    Ok(d)
}

/// `sup_x |F_a(x) - F_b(x)|` over the merged support.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let a = sorted(a)?;
    let b = sorted(b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Sample mean and its standard error.
pub fn mean_and_se(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(Error::InvalidInput("need at least two observations".into()));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> Result<f64> {
    let (_, se) = mean_and_se(xs)?;
    Ok(se * se * xs.len() as f64)
}

fn column(table: &[Vec<f64>], i: usize) -> Result<Vec<f64>> {
    table
        .iter()
        .map(|row| {
            row.get(i)
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("row has no column {i}")))
        })
        .collect()
}

/// Unbiased covariance of columns `i` and `j` of a replicate-by-gridpoint table.
pub fn empirical_cov(table: &[Vec<f64>], i: usize, j: usize) -> Result<f64> {
    Ok(cov_with_se(table, i, j)?.0)
}

/// Covariance of columns `i` and `j` with a Monte Carlo standard error: the
/// standard deviation of the centred products over `√N`.
pub fn cov_with_se(table: &[Vec<f64>], i: usize, j: usize) -> Result<(f64, f64)> {
    if table.len() < 2 {
        return Err(Error::InvalidInput("covariance needs at least two replicates".into()));
    }
    let x = column(table, i)?;
    let y = column(table, j)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let products: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let cov = products.iter().sum::<f64>() / (n - 1.0);
    let mp = products.iter().sum::<f64>() / n;
    let var_p = products.iter().map(|p| (p - mp).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((cov, (var_p / n).sqrt()))
}

/// A probability mass function on consecutive integers.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    pub support: Vec<u64>,
    pub probabilities: Vec<f64>,
}

impl Pmf {
    pub fn probability(&self, k: u64) -> f64 {
        self.support
            .iter()
            .position(|&s| s == k)
            .map_or(0.0, |i| self.probabilities[i])
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.probabilities)
            .map(|(&k, &p)| k as f64 * p)
            .sum()
    }

    /// Total-variation distance to the empirical law of `observations`.
    pub fn total_variation(&self, observations: &[u64]) -> f64 {
        let n = observations.len() as f64;
        let mut counts = std::collections::BTreeMap::new();
        for &o in observations {
            *counts.entry(o).or_insert(0usize) += 1;
        }
        let mut tv = 0.0;
        for (&k, &p) in self.support.iter().zip(&self.probabilities) {
            let q = counts.remove(&k).unwrap_or(0) as f64 / n;
            tv += (p - q).abs();
        }
        tv += counts.values().map(|&c| c as f64 / n).sum::<f64>();
        tv / 2.0
    }
}

/// Unsigned Stirling numbers of the first kind `c(n, k)` for `k = 0..=n`, or
/// `None` once they overflow `u128`.
pub fn stirling_first_kind_row(n: usize) -> Option<Vec<u128>> {
    let mut row = vec![1u128];
    for m in 0..n {
        let mut next = vec![0u128; row.len() + 1];
        for (k, &c) in row.iter().enumerate() {
            next[k + 1] = next[k + 1].checked_add(c)?;
            next[k] = next[k].checked_add(c.checked_mul(m as u128)?)?;
        }
        row = next;
    }
    Some(row)
}

/// Largest `n` whose `n!` is exactly representable as an `f64` integer.
const EXACT_FACTORIAL_MAX: usize = 18;

/// Law of `A_n`, the number of records among `n` i.i.d. continuous lifetimes.
///
/// For `n <= 18` this is `c(n, k) / n!` with both integers exact in `f64`, so
/// each probability is correctly rounded. Beyond that it falls back to
/// [`record_count_pmf_by_convolution`].
pub fn record_count_pmf(n: usize) -> Result<Pmf> {
    if n == 0 {
        return Err(Error::InvalidParameter("record count law needs n >= 1".into()));
    }
    if n > EXACT_FACTORIAL_MAX {
        return record_count_pmf_by_convolution(n);
    }
    let row = stirling_first_kind_row(n).expect("fits for n <= 18");
    let total: u128 = row.iter().sum();
    Ok(Pmf {
        support: (1..=n as u64).collect(),
        probabilities: row[1..].iter().map(|&c| c as f64 / total as f64).collect(),
    })
}

/// Law of `A_n` as the convolution of independent Bernoulli(1/k), k = 1..n.
pub fn record_count_pmf_by_convolution(n: usize) -> Result<Pmf> {
    if n == 0 {
        return Err(Error::InvalidParameter("record count law needs n >= 1".into()));
    }
    // dist[j] = P(A = j)
    let mut dist = vec![1.0f64];
    for k in 1..=n {
        let p = 1.0 / k as f64;
        let mut next = vec![0.0; dist.len() + 1];
        for (j, &q) in dist.iter().enumerate() {
            next[j] += q * (1.0 - p);
            next[j + 1] += q * p;
        }
        dist = next;
    }
    Ok(Pmf {
        support: (1..=n as u64).collect(),
        probabilities: dist[1..].to_vec(),
    })
}

/// `E H_N` for `N ~ Poisson(mean)`, `H_0 = 0`: the expected number of records
/// among the lifetimes completed by time `t` when `mean = λt`.
pub fn expected_harmonic_of_poisson(mean: f64) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let spread = 40.0 * mean.sqrt() + 40.0;
    let lo = (mean - spread).max(1.0).floor() as u64;
    let hi = (mean + spread).ceil() as u64;
    let log_mean = mean.ln();
    (lo..=hi)
        .map(|k| {
            let kf = k as f64;
            let log_p = kf * log_mean - mean - ln_gamma(kf + 1.0);
            log_p.exp() * (digamma(kf + 1.0) + EULER_GAMMA)
        })
        .sum()
}

/// Number of entries at least as large as the last one.
pub fn rank_of_last(sample: &[f64]) -> Result<usize> {
    let last = *sample
        .last()
        .ok_or_else(|| Error::InvalidInput("rank of an empty sample".into()))?;
    Ok(sample.iter().filter(|&&x| x >= last).count())
}

pub fn normal_cdf(x: f64, mean: f64, variance: f64) -> f64 {
    0.5 * erfc(-(x - mean) / (2.0 * variance).sqrt())
}

/// Truncation tolerance for the `sup |B|` series.
const SERIES_TOL: f64 = 1e-12;

/// `P(sup_{0<=s<=1} |B_s| <= x)`.
///
/// Below `x = 1` this is the theta series
/// `(4/π) Σ_k (-1)^k / (2k+1) · exp(-π² (2k+1)² / (8x²))`; from `x = 1` on it
/// is the reflection series `1 - 4 Σ_k (-1)^k Φ̄((2k+1)x)`, where `Φ̄` is the
/// normal upper tail. Both are alternating and are stopped once a term drops
/// below `1e-12`.
pub fn sup_abs_bm_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let alternating = |term: &dyn Fn(f64) -> f64| {
        let mut sum = 0.0;
        for k in 0.. {
            let t = term((2 * k + 1) as f64);
            sum += if k % 2 == 0 { t } else { -t };
            if t < SERIES_TOL {
                break;
            }
        }
        sum
    };
    let pi = std::f64::consts::PI;
    let value = if x < 1.0 {
        let a = pi * pi / (8.0 * x * x);
        4.0 / pi * alternating(&|m| (-a * m * m).exp() / m)
    } else {
        1.0 - 4.0 * alternating(&|m| 0.5 * erfc(m * x / std::f64::consts::SQRT_2))
    };
    value.clamp(0.0, 1.0)
}

/// Reference laws used as KS targets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReferenceLaw {
    Normal { mean: f64, variance: f64 },
    /// Standard Gumbel, `exp(-e^{-x})`.
    Gumbel,
    /// Law of `sup_{0<=s<=1} |B_s|`.
    SupAbsBm,
    /// Limit of the normalised rank of the current lifetime: density `-ln x`
    /// on (0, 1), CDF `x - x ln x`.
    RankLimit,
    /// Current age at time `t`: `1 - e^{-λx}` on `[0, t)` with an atom
    /// `e^{-λt}` at `t`.
    AgeTruncatedExp { rate: f64, t: f64 },
    Uniform01,
}

impl ReferenceLaw {
    /// Builds a law from its name and parameters.
    pub fn parse(name: &str, params: &[f64]) -> Result<Self> {
        let want = |k: usize| {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "law {name} takes {k} parameters, got {}",
                    params.len()
                )))
            }
        };
        let law = match name {
            "normal" => {
                want(2)?;
                ReferenceLaw::Normal {
                    mean: params[0],
                    variance: params[1],
                }
            }
            "gumbel" => {
                want(0)?;
                ReferenceLaw::Gumbel
            }
            "sup_abs_bm" => {
                want(0)?;
                ReferenceLaw::SupAbsBm
            }
            "rank_limit" => {
                want(0)?;
                ReferenceLaw::RankLimit
            }
            "age_truncated_exp" => {
                want(2)?;
                ReferenceLaw::AgeTruncatedExp {
                    rate: params[0],
                    t: params[1],
                }
            }
            "uniform" => {
                want(0)?;
                ReferenceLaw::Uniform01
            }
            other => return Err(Error::InvalidParameter(format!("unknown law {other:?}"))),
        };
        law.validate()?;
        Ok(law)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ReferenceLaw::Normal { variance, .. } if !(variance > 0.0) => {
                Err(Error::InvalidParameter(format!("normal variance {variance}")))
            }
            ReferenceLaw::AgeTruncatedExp { rate, t } if !(rate > 0.0 && t >= 0.0) => Err(
                Error::InvalidParameter(format!("age law needs rate > 0 and t >= 0, got {rate}, {t}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn standard_normal() -> Self {
        ReferenceLaw::Normal {
            mean: 0.0,
            variance: 1.0,
        }
    }
}

impl DistributionFunction for ReferenceLaw {
    fn cdf(&self, x: f64) -> f64 {
        match *self {
            ReferenceLaw::Normal { mean, variance } => normal_cdf(x, mean, variance),
            ReferenceLaw::Gumbel => (-(-x).exp()).exp(),
            ReferenceLaw::SupAbsBm => sup_abs_bm_cdf(x),
            ReferenceLaw::RankLimit => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    x - x * x.ln()
                }
            }
            ReferenceLaw::AgeTruncatedExp { rate, t } => {
                if x < 0.0 {
                    0.0
                } else if x < t {
                    -(-rate * x).exp_m1()
                } else {
                    1.0
                }
            }
            ReferenceLaw::Uniform01 => x.clamp(0.0, 1.0),
        }
    }

    fn cdf_left(&self, x: f64) -> f64 {
        match *self {
            ReferenceLaw::AgeTruncatedExp { rate, t } if x == t => -(-rate * t).exp_m1(),
            _ => self.cdf(x),
        }
    }
}

/// Evaluates `law` at `x`.
pub fn reference_cdf(law: &ReferenceLaw, x: f64) -> f64 {
    law.cdf(x)
}

/// Acceptance rule attached to a reported statistic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold {
    /// Pass iff `value <= bound`.
    AtMost(f64),
    /// Pass iff `lo <= value <= hi`.
    Within(f64, f64),
    /// Reported for context only; always passes.
    Info,
}

impl Threshold {
    pub fn admits(&self, value: f64) -> bool {
        match *self {
            Threshold::AtMost(b) => value <= b,
            Threshold::Within(lo, hi) => lo <= value && value <= hi,
            Threshold::Info => true,
        }
    }
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or very large magnitudes.
struct Num(f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.0.abs();
        if a != 0.0 && a.is_finite() && !(1e-4..1e9).contains(&a) {
            write!(f, "{:e}", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Threshold::AtMost(b) => write!(f, "<={}", Num(b)),
            Threshold::Within(lo, hi) => write!(f, "[{},{}]", Num(lo), Num(hi)),
            Threshold::Info => Ok(()),
        }
    }
}

/// Serialised as a number, a two-element `[lo, hi]` array, or `null`.
impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Threshold::AtMost(b) => s.serialize_f64(b),
            Threshold::Within(lo, hi) => [lo, hi].serialize(s),
            Threshold::Info => s.serialize_none(),
        }
    }
}

/// One checked statistic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestReport {
    pub suite: String,
    pub statistic: String,
    pub value: f64,
    pub threshold: Threshold,
    pub pass: bool,
    pub n_samples: u64,
    pub seed: u64,
}

impl TestReport {
    pub fn new(
        suite: impl Into<String>,
        statistic: impl Into<String>,
        value: f64,
        threshold: Threshold,
        n_samples: u64,
        seed: u64,
    ) -> Self {
        TestReport {
            suite: suite.into(),
            statistic: statistic.into(),
            value,
            threshold,
            pass: threshold.admits(value),
            n_samples,
            seed,
        }
    }
}

impl fmt::Display for TestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match (self.pass, self.threshold) {
            (_, Threshold::Info) => "INFO",
            (true, _) => "PASS",
            (false, _) => "FAIL",
        };
        write!(
            f,
            "[{verdict}] {}/{}: {} (threshold {}, n={}, seed={})",
            self.suite,
            self.statistic,
            Num(self.value),
            self.threshold,
            self.n_samples,
            self.seed
        )
    }
}
