//! Exact Poisson sample paths and their record structure.
//!
//! A path keeps every lifetime up to and including the first arrival past the
//! horizon. The retained overshoot is what makes the in-progress record
//! indicator `I_{N_t+1}` (and hence `W_t`) computable at every `t <= horizon`.
//!
//! Index conventions: lifetimes, indicators and counts are 1-based in the
//! mathematical sense and stored 0-based, so `X_n` is `interarrivals[n - 1]`.
//! `A_0 = 0`, `T_0 = 0` and `S_0 = 0` are implicit.

use crate::error::{require_positive, Error, Result};
use crate::randomness::{sample_exp, UniformSource};

#[derive(Clone, Debug, PartialEq)]
pub struct PoissonPath {
    rate: f64,
    horizon: f64,
    interarrivals: Vec<f64>,
    arrivals: Vec<f64>,
}

impl PoissonPath {
    /// Builds a path from given lifetimes, keeping them up to the first
    /// arrival strictly beyond `horizon` and discarding the rest.
    pub fn from_interarrivals(rate: f64, horizon: f64, lifetimes: &[f64]) -> Result<Self> {
        require_positive("rate", rate)?;
        check_horizon(horizon)?;
        let mut interarrivals = Vec::new();
        let mut arrivals = Vec::new();
        let mut s = 0.0;
        for &x in lifetimes {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::InvalidInput(format!("lifetime {x} is not positive")));
            }
            s += x;
            interarrivals.push(x);
            arrivals.push(s);
            if s > horizon {
                return Ok(PoissonPath {
                    rate,
                    horizon,
                    interarrivals,
                    arrivals,
                });
            }
        }
        Err(Error::InvalidInput(format!(
            "lifetimes sum to {s}, never passing the horizon {horizon}"
        )))
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `X_1, ..., X_m`, the last one being the retained overshoot.
    pub fn interarrivals(&self) -> &[f64] {
        &self.interarrivals
    }

    /// `S_1, ..., S_m`.
    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    /// The lifetime in progress at the horizon, `X_{N_horizon + 1}`.
    pub fn overshoot(&self) -> f64 {
        *self.interarrivals.last().expect("path always holds one lifetime")
    }

    /// `N_t = #{n : S_n <= t}`. Valid for any `t`, exact for `t <= horizon`.
    pub fn count_at(&self, t: f64) -> usize {
        self.arrivals.partition_point(|&s| s <= t)
    }

    /// `S_n` with `S_0 = 0`.
    pub fn arrival(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.arrivals[n - 1]
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if (0.0..=self.horizon).contains(&t) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                what: "t",
                value: t,
                lo: 0.0,
                hi: self.horizon,
            })
        }
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon >= 0.0 && horizon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("horizon must be finite and >= 0, got {horizon}")))
    }
}

/// Draws i.i.d. Exp(`rate`) lifetimes until the first arrival passes `horizon`.
pub fn simulate_path<U: UniformSource + ?Sized>(
    src: &mut U,
    rate: f64,
    horizon: f64,
) -> Result<PoissonPath> {
    require_positive("rate", rate)?;
    check_horizon(horizon)?;
    let expected = (rate * horizon * 1.05 + 16.0).min(1e9) as usize;
    let mut interarrivals = Vec::with_capacity(expected);
    let mut arrivals = Vec::with_capacity(expected);
    let mut s = 0.0;
    loop {
        let x = sample_exp(src, rate)?;
        s += x;
        interarrivals.push(x);
        arrivals.push(s);
        if s > horizon {
            break;
        }
    }
    Ok(PoissonPath {
        rate,
        horizon,
        interarrivals,
        arrivals,
    })
}

/// `I_n = 1` iff the n-th entry strictly exceeds every earlier entry.
pub fn record_indicators(lifetimes: &[f64]) -> Result<Vec<bool>> {
    if lifetimes.is_empty() {
        return Err(Error::InvalidInput("record indicators of an empty sequence".into()));
    }
    if let Some(bad) = lifetimes.iter().find(|x| !(**x > 0.0)) {
        return Err(Error::InvalidInput(format!("lifetime {bad} is not positive")));
    }
    let mut best = f64::NEG_INFINITY;
    Ok(lifetimes
        .iter()
        .map(|&x| {
            let rec = x > best;
            if rec {
                best = x;
            }
            rec
        })
        .collect())
}

/// Record structure of a lifetime sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct RecordTrace {
    /// `I_1..I_m`.
    pub indicators: Vec<bool>,
    /// `A_1..A_m`, the number of records among the first n lifetimes.
    pub counts: Vec<usize>,
    /// `L_1..L_K`, 1-based indices of the records.
    pub record_times: Vec<usize>,
    /// `R_1..R_K`.
    pub record_values: Vec<f64>,
    /// `T_1..T_K`, partial sums of the record values.
    pub record_sums: Vec<f64>,
}

impl RecordTrace {
    pub fn from_lifetimes(lifetimes: &[f64]) -> Result<Self> {
        let indicators = record_indicators(lifetimes)?;
        let mut counts = Vec::with_capacity(lifetimes.len());
        let mut record_times = Vec::new();
        let mut record_values = Vec::new();
        let mut record_sums = Vec::new();
        let mut a = 0;
        let mut t = 0.0;
        for (i, (&rec, &x)) in indicators.iter().zip(lifetimes).enumerate() {
            if rec {
                a += 1;
                t += x;
                record_times.push(i + 1);
                record_values.push(x);
                record_sums.push(t);
            }
            counts.push(a);
        }
        Ok(RecordTrace {
            indicators,
            counts,
            record_times,
            record_values,
            record_sums,
        })
    }

    /// `A_n` with `A_0 = 0`.
    pub fn count(&self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            self.counts[n - 1]
        }
    }

    /// `T_j` with `T_0 = 0`.
    pub fn record_sum(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.record_sums[j - 1]
        }
    }

    /// `Z_n = T_{A_n}`, the sum of the record values among the first n lifetimes.
    pub fn record_sum_through(&self, n: usize) -> f64 {
        self.record_sum(self.count(n))
    }

    /// `I_n` (1-based).
    pub fn indicator(&self, n: usize) -> bool {
        self.indicators[n - 1]
    }
}

pub fn build_trace(path: &PoissonPath) -> RecordTrace {
    RecordTrace::from_lifetimes(&path.interarrivals).expect("simulated lifetimes are positive")
}

/// Values of the basic processes at a single time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observables {
    /// `N_t`.
    pub n: usize,
    /// `C_t`, completed record lifetimes.
    pub c: usize,
    /// `W_t`, time spent in record lifetimes.
    pub w: f64,
    /// Current age `t - S_{N_t}`.
    pub age: f64,
    /// `max(X_1..X_{N_t})`, `None` before the first arrival.
    pub current_max: Option<f64>,
    /// `I_{N_t + 1}`: whether the lifetime in progress is a record.
    pub in_record: bool,
}

/// Evaluates `N_t`, `C_t = A_{N_t}`, `W_t = T_{A_{N_t}} + (t - S_{N_t}) I_{N_t+1}`,
/// the age and the running maximum.
///
/// The running maximum is found by scanning the completed lifetimes, not read
/// off the trace, so it can be checked against `R_{A_{N_t}}`.
pub fn observables_at(path: &PoissonPath, trace: &RecordTrace, t: f64) -> Result<Observables> {
    path.check_time(t)?;
    let n = path.count_at(t);
    let c = trace.count(n);
    let age = t - path.arrival(n);
    let in_record = trace.indicator(n + 1);
    let w = trace.record_sum(c) + if in_record { age } else { 0.0 };
    let current_max = path.interarrivals[..n].iter().copied().reduce(f64::max);
    Ok(Observables {
        n,
        c,
        w,
        age,
        current_max,
        in_record,
    })
}

/// Like [`observables_at`] without the O(N) running-maximum scan.
pub fn counts_at(path: &PoissonPath, trace: &RecordTrace, t: f64) -> Result<(usize, usize, f64)> {
    path.check_time(t)?;
    let n = path.count_at(t);
    let c = trace.count(n);
    let w = trace.record_sum(c)
        + if trace.indicator(n + 1) {
            t - path.arrival(n)
        } else {
            0.0
        };
    Ok((n, c, w))
}

/// `W_t` as the integral of `s -> I_{N_s + 1}` over `[0, t]`: the summed
/// lengths of record lifetimes clipped to `[0, t]`.
pub fn integrate_time_in_records(path: &PoissonPath, trace: &RecordTrace, t: f64) -> Result<f64> {
    path.check_time(t)?;
    let mut total = 0.0;
    let mut start = 0.0;
    for (&end, &rec) in path.arrivals.iter().zip(&trace.indicators) {
        if start >= t {
            break;
        }
        if rec {
            total += end.min(t) - start;
        }
        start = end;
    }
    Ok(total)
}

/// Observables at `t` for a fresh path, computed in one pass with O(1) memory.
///
/// Consumes exactly the draws `simulate_path(src, rate, t)` would and performs
/// the same floating-point operations, so results are bit-identical to
/// building that path and calling [`observables_at`].
pub fn stream_observables<U: UniformSource + ?Sized>(
    src: &mut U,
    rate: f64,
    t: f64,
) -> Result<Observables> {
    require_positive("rate", rate)?;
    check_horizon(t)?;
    let mut n = 0usize;
    let mut c = 0usize;
    let mut s = 0.0;
    let mut record_sum = 0.0;
    let mut best = f64::NEG_INFINITY;
    loop {
        let x = sample_exp(src, rate)?;
        let is_record = x > best;
        let next = s + x;
        if next > t {
            let age = t - s;
            let w = record_sum + if is_record { age } else { 0.0 };
            return Ok(Observables {
                n,
                c,
                w,
                age,
                current_max: (n > 0).then_some(best),
                in_record: is_record,
            });
        }
        s = next;
        n += 1;
        if is_record {
            best = x;
            c += 1;
            record_sum += x;
        }
    }
}
