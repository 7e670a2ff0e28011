//! Record values and record times simulated directly, without generating
//! every lifetime, plus the perpetuity that links the two.
//!
//! Three samplers for the record times `L_n` are provided and are equal in
//! law:
//!
//! * [`record_times_by_scanning`]: draw lifetimes one by one and watch for
//!   new maxima. Costs `L_n` draws, which has infinite mean already for `n = 2`.
//! * [`record_times_ceil_rep`]: given record values `R_i` and independent unit
//!   exponentials `V_i`, `L_n = 1 + sum_{i<n} [V_i / h(R_i)]` where
//!   `h(r) = -ln(1 - e^{-r})` and `[x] = floor(x) + 1`.
//! * [`record_times_markov`]: the chain `L_{j+1} = ceil(L_j / U)`, whose tail
//!   is `P(L_{j+1} > m | L_j = k) = k / m` for integers `m >= k`.
//!
//! The last two assume unit-rate record values; the record times do not
//! depend on the rate, so callers with rate `λ` pass `λ R`.

use crate::error::{require_positive, Error, Result};
use crate::randomness::{sample_exp, sample_unit_exp, UniformSource};

/// Record values and record times of one sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct RecordSequence {
    pub values: Vec<f64>,
    pub times: Vec<u64>,
}

impl RecordSequence {
    pub fn new(values: Vec<f64>, times: Vec<u64>) -> Result<Self> {
        if values.len() != times.len() {
            return Err(Error::InvalidInput(format!(
                "{} record values but {} record times",
                values.len(),
                times.len()
            )));
        }
        check_increasing_values(&values)?;
        if times.first().is_some_and(|&l| l != 1) || times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "record times must start at 1 and strictly increase".into(),
            ));
        }
        Ok(RecordSequence { values, times })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Simulates `n` records of a rate-`rate` sequence: values by
/// [`simulate_record_values`], times by the ceiling representation with
/// exponentials drawn from the separate `times_src`.
pub fn simulate_record_sequence<U, V>(
    values_src: &mut U,
    times_src: &mut V,
    rate: f64,
    n: usize,
) -> Result<RecordSequence>
where
    U: UniformSource + ?Sized,
    V: UniformSource + ?Sized,
{
    let values = simulate_record_values(values_src, rate, n)?;
    let unit: Vec<f64> = values.iter().map(|r| r * rate).collect();
    let times = record_times_ceil_rep(times_src, &unit)?;
    Ok(RecordSequence { values, times })
}

fn check_increasing_values(values: &[f64]) -> Result<()> {
    if values.first().is_some_and(|&r| !(r > 0.0)) || values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput(
            "record values must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `R_k = Δ_1 + ... + Δ_k` with i.i.d. Exp(`rate`) increments.
pub fn simulate_record_values<U: UniformSource + ?Sized>(
    src: &mut U,
    rate: f64,
    n: usize,
) -> Result<Vec<f64>> {
    require_positive("rate", rate)?;
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one record".into()));
    }
    let mut r = 0.0;
    (0..n)
        .map(|_| {
            r += sample_exp(src, rate)?;
            Ok(r)
        })
        .collect()
}

/// Prefix sums of given record-value increments.
pub fn record_values_from_increments(increments: &[f64]) -> Result<Vec<f64>> {
    if increments.is_empty() || increments.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::InvalidInput("increments must be non-empty and positive".into()));
    }
    let mut r = 0.0;
    Ok(increments
        .iter()
        .map(|d| {
            r += d;
            r
        })
        .collect())
}

/// `-ln(1 - e^{-r})` for `r > 0`.
///
/// Above `ln 2` the argument of the outer log is close to 1 and the value is
/// `-ln_1p(-e^{-r})`; below it `1 - e^{-r}` is small and is formed as
/// `-expm1(-r)` before taking `-ln`.
pub fn record_hazard_log(r: f64) -> f64 {
    if r > std::f64::consts::LN_2 {
        -(-(-r).exp()).ln_1p()
    } else {
        -(-(-r).exp_m1()).ln()
    }
}

/// `floor(x) + 1`, the bracket used by the ceiling representation.
pub fn bracket(x: f64) -> Result<u64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidInput(format!("bracket of {x}")));
    }
    let f = x.floor();
    if f >= u64::MAX as f64 {
        return Err(Error::Overflow("computing a record-time increment"));
    }
    Ok(f as u64 + 1)
}

/// Record times from unit-rate record values and the given unit exponentials
/// `V_1..V_{n-1}`.
pub fn ceil_rep_from_exponentials(record_values: &[f64], exponentials: &[f64]) -> Result<Vec<u64>> {
    if record_values.is_empty() {
        return Err(Error::InvalidInput("no record values".into()));
    }
    check_increasing_values(record_values)?;
    if exponentials.len() + 1 != record_values.len() {
        return Err(Error::InvalidInput(format!(
            "{} record values need {} exponentials, got {}",
            record_values.len(),
            record_values.len() - 1,
            exponentials.len()
        )));
    }
    let mut times = Vec::with_capacity(record_values.len());
    let mut l: u64 = 1;
    times.push(l);
    for (&r, &v) in record_values.iter().zip(exponentials) {
        let step = bracket(v / record_hazard_log(r))?;
        l = l
            .checked_add(step)
            .ok_or(Error::Overflow("summing record-time increments"))?;
        times.push(l);
    }
    Ok(times)
}

/// Ceiling representation of the record times, drawing the `V_i` from `src`.
///
/// `src` must be independent of whatever produced `record_values`.
pub fn record_times_ceil_rep<U: UniformSource + ?Sized>(
    src: &mut U,
    record_values: &[f64],
) -> Result<Vec<u64>> {
    check_increasing_values(record_values)?;
    let v: Vec<f64> = (1..record_values.len()).map(|_| sample_unit_exp(src)).collect();
    ceil_rep_from_exponentials(record_values, &v)
}

/// One transition of the record-time chain from `L_j = k` given uniform `u`.
///
/// Returns `ceil(k / u)`, never less than `k + 1`: that bound holds exactly in
/// real arithmetic and guards against `k / u` rounding down to `k` when `u`
/// is within an ulp of 1.
pub fn markov_next(k: u64, u: f64) -> Result<u64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidParameter(format!("uniform {u} outside (0, 1)")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("record times start at 1".into()));
    }
    let next = (k as f64 / u).ceil();
    if next >= u64::MAX as f64 {
        return Err(Error::Overflow("advancing the record-time chain"));
    }
    Ok((next as u64).max(k + 1))
}

/// `L_1..L_n` from the Markov chain of record times.
pub fn record_times_markov<U: UniformSource + ?Sized>(src: &mut U, n: usize) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one record".into()));
    }
    let mut times = Vec::with_capacity(n);
    let mut l = 1;
    times.push(l);
    for _ in 1..n {
        l = markov_next(l, src.next_uniform())?;
        times.push(l);
    }
    Ok(times)
}

/// Outcome of scanning lifetimes for records under a budget.
#[derive(Clone, Debug, PartialEq)]
pub struct ScannedRecordTimes {
    /// Record times found, at most the number requested.
    pub times: Vec<u64>,
    /// False when the budget ran out first; every missing record time then
    /// exceeds the budget.
    pub complete: bool,
}

/// First `n` record times of an i.i.d. Exp(`rate`) sequence, found by drawing
/// lifetimes one at a time, giving up after `max_lifetimes` draws.
///
/// Lifetimes are `-ln(u) / rate`, a decreasing map, so a record is a new
/// minimum of the underlying uniforms; those are compared directly.
pub fn record_times_by_scanning<U: UniformSource + ?Sized>(
    src: &mut U,
    rate: f64,
    n: usize,
    max_lifetimes: u64,
) -> Result<ScannedRecordTimes> {
    require_positive("rate", rate)?;
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one record".into()));
    }
    let mut times = Vec::with_capacity(n);
    let mut lowest = f64::INFINITY;
    let mut index = 0u64;
    while times.len() < n {
        if index == max_lifetimes {
            return Ok(ScannedRecordTimes {
                times,
                complete: false,
            });
        }
        index += 1;
        let u = src.next_uniform();
        if u < lowest {
            lowest = u;
            times.push(index);
        }
    }
    Ok(ScannedRecordTimes {
        times,
        complete: true,
    })
}

/// `Y_n` together with its step index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerpetuityState {
    pub value: f64,
    pub index: u64,
}

impl PerpetuityState {
    pub fn zero() -> Self {
        PerpetuityState {
            value: 0.0,
            index: 0,
        }
    }

    pub fn new(value: f64, index: u64) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidParameter(format!("perpetuity value {value}")));
        }
        Ok(PerpetuityState { value, index })
    }
}

/// `Y_{n+1} = (Y_n + v) u`.
pub fn perpetuity_step(state: PerpetuityState, v: f64, u: f64) -> Result<PerpetuityState> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter(format!("v = {v} must be positive")));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidParameter(format!("u = {u} outside (0, 1)")));
    }
    Ok(PerpetuityState {
        value: (state.value + v) * u,
        index: state.index + 1,
    })
}

fn check_perpetuity_inputs(record_values: &[f64], exponentials: &[f64]) -> Result<()> {
    if record_values.is_empty() || exponentials.len() + 1 != record_values.len() {
        return Err(Error::InvalidInput(format!(
            "need n >= 1 record values and n - 1 exponentials, got {} and {}",
            record_values.len(),
            exponentials.len()
        )));
    }
    check_increasing_values(record_values)
}

/// `Y_n = e^{-R_n} + sum_{i<n} V_i e^{-(R_n - R_i)}`.
pub fn perpetuity_direct(record_values: &[f64], exponentials: &[f64]) -> Result<f64> {
    check_perpetuity_inputs(record_values, exponentials)?;
    let rn = *record_values.last().unwrap();
    let tail: f64 = record_values
        .iter()
        .zip(exponentials)
        .map(|(&ri, &vi)| vi * (-(rn - ri)).exp())
        .sum();
    Ok((-rn).exp() + tail)
}

/// The same `Y_n` by iterating [`perpetuity_step`] from `Y_1 = e^{-R_1}` with
/// `U_{i+1} = e^{-(R_{i+1} - R_i)}`.
pub fn perpetuity_by_recursion(record_values: &[f64], exponentials: &[f64]) -> Result<f64> {
    check_perpetuity_inputs(record_values, exponentials)?;
    let mut state = PerpetuityState::new((-record_values[0]).exp(), 1)?;
    for (w, &v) in record_values.windows(2).zip(exponentials) {
        state = perpetuity_step(state, v, (-(w[1] - w[0])).exp())?;
    }
    Ok(state.value)
}

/// One approximately stationary draw: `burn_in` steps of the recursion from
/// `Y = 0` with fresh `V ~ Exp(1)`, `U ~ Unif(0, 1)`.
///
/// After `k` steps the distance to stationarity is a product of `k`
/// uniforms, about `2^-k` in mean.
pub fn stationary_perpetuity<U: UniformSource + ?Sized>(src: &mut U, burn_in: usize) -> f64 {
    let mut y = 0.0;
    for _ in 0..burn_in {
        let v = sample_unit_exp(src);
        let u = src.next_uniform();
        y = (y + v) * u;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomness::{make_stream, Scripted};
    use std::f64::consts::LN_2;

    #[test]
    fn values_are_prefix_sums() {
        assert_eq!(record_values_from_increments(&[0.25, 0.75, 1.0]).unwrap(), vec![0.25, 1.0, 2.0]);
        let r = record_values_from_increments(&[0.3, 0.7, 1.0]).unwrap();
        assert!((r[1] - 1.0).abs() < 1e-15 && (r[2] - 2.0).abs() < 1e-15);
        assert!(record_values_from_increments(&[]).is_err());
    }

    #[test]
    fn simulated_values_scale_with_rate() {
        let a = simulate_record_values(&mut make_stream(2, 0), 1.0, 20).unwrap();
        let b = simulate_record_values(&mut make_stream(2, 0), 2.0, 20).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x / 2.0 - y).abs() <= 1e-14 * x);
        }
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(simulate_record_values(&mut make_stream(2, 0), 1.0, 0).is_err());
    }

    #[test]
    fn hazard_log_is_stable() {
        assert!((record_hazard_log(LN_2) - LN_2).abs() < 1e-15);
        // Large r: -ln(1 - e^{-r}) ~ e^{-r}.
        let r = 40.0;
        assert!((record_hazard_log(r) / (-r).exp() - 1.0).abs() < 1e-12);
        // Small r: -ln(1 - e^{-r}) ~ -ln r.
        let r = 1e-12;
        assert!((record_hazard_log(r) + r.ln()).abs() < 1e-9);
        for &r in &[0.1f64, 0.5, 0.69, 0.7, 1.0, 3.0] {
            let naive = -(1.0 - (-r).exp()).ln();
            assert!((record_hazard_log(r) - naive).abs() < 1e-13);
        }
    }

    #[test]
    fn ceil_rep_scripted() {
        // V / h(R_1) = 1 exactly, so the bracket is floor(1) + 1 = 2.
        assert_eq!(ceil_rep_from_exponentials(&[LN_2, 1.0], &[LN_2]).unwrap(), vec![1, 3]);
        assert_eq!(ceil_rep_from_exponentials(&[LN_2, 1.0], &[3.0 * LN_2]).unwrap(), vec![1, 5]);
        assert_eq!(ceil_rep_from_exponentials(&[LN_2, 1.0], &[1e-300]).unwrap(), vec![1, 2]);
        assert_eq!(ceil_rep_from_exponentials(&[0.5], &[]).unwrap(), vec![1]);
        assert!(ceil_rep_from_exponentials(&[1.0, 0.5], &[1.0]).is_err());
        assert!(ceil_rep_from_exponentials(&[0.5, 1.0], &[]).is_err());
    }

    #[test]
    fn ceil_rep_from_stream_uses_uniform_inversion() {
        // u = 1/2 gives V = ln 2.
        let l = record_times_ceil_rep(&mut Scripted::new([0.5]), &[LN_2, 2.0]).unwrap();
        assert_eq!(l, vec![1, 3]);
        assert!(record_times_ceil_rep(&mut Scripted::new([0.5]), &[2.0, 2.0]).is_err());
    }

    #[test]
    fn markov_transitions() {
        assert_eq!(markov_next(5, 0.25).unwrap(), 20);
        assert_eq!(markov_next(1, 0.9).unwrap(), 2);
        assert_eq!(markov_next(1, 0.5).unwrap(), 2);
        assert_eq!(markov_next(7, 1.0 - 1e-16).unwrap(), 8);
        assert!(markov_next(1, 1.0).is_err());
        assert!(markov_next(0, 0.5).is_err());
        assert!(markov_next(1 << 40, 1e-10).is_err());
        let l = record_times_markov(&mut Scripted::new([0.9, 0.5, 0.25]), 4).unwrap();
        assert_eq!(l, vec![1, 2, 4, 16]);
    }

    #[test]
    fn markov_pmf_matches_tail_law() {
        // P(next = m | k) = k / ((m - 1) m) for m > k.
        let mut s = make_stream(19, 0);
        let trials = 200_000;
        for &k in &[1u64, 3] {
            let mut hits = [0usize; 4];
            for _ in 0..trials {
                let m = markov_next(k, s.uniform()).unwrap();
                if m <= k + 4 {
                    hits[(m - k - 1) as usize] += 1;
                }
            }
            for (j, &h) in hits.iter().enumerate() {
                let m = (k + 1 + j as u64) as f64;
                let p = k as f64 / ((m - 1.0) * m);
                let se = (p * (1.0 - p) / trials as f64).sqrt();
                assert!((h as f64 / trials as f64 - p).abs() < 5.0 * se, "k={k} m={m}");
            }
        }
    }

    #[test]
    fn scanning_finds_records() {
        // -ln(u): 0.5 -> 0.69, 0.9 -> 0.105, 0.1 -> 2.30.
        let got = record_times_by_scanning(&mut Scripted::new([0.5, 0.9, 0.1]), 1.0, 2, 100).unwrap();
        assert_eq!(got, ScannedRecordTimes { times: vec![1, 3], complete: true });
        let cut = record_times_by_scanning(&mut Scripted::new([0.5, 0.9]), 1.0, 2, 2).unwrap();
        assert_eq!(cut, ScannedRecordTimes { times: vec![1], complete: false });
    }

    #[test]
    fn record_sequence_validation() {
        assert!(RecordSequence::new(vec![1.0, 2.0], vec![1, 4]).is_ok());
        assert!(RecordSequence::new(vec![1.0, 2.0], vec![2, 4]).is_err());
        assert!(RecordSequence::new(vec![1.0, 2.0], vec![1, 1]).is_err());
        assert!(RecordSequence::new(vec![2.0, 1.0], vec![1, 2]).is_err());
        assert!(RecordSequence::new(vec![1.0], vec![1, 2]).is_err());
        let seq = simulate_record_sequence(&mut make_stream(1, 0), &mut make_stream(2, 0), 3.0, 8).unwrap();
        assert!(RecordSequence::new(seq.values.clone(), seq.times.clone()).is_ok());
        assert_eq!(seq.len(), 8);
    }

    #[test]
    fn perpetuity_steps() {
        let s = perpetuity_step(PerpetuityState::zero(), 1.0, 0.5).unwrap();
        assert_eq!(s, PerpetuityState { value: 0.5, index: 1 });
        let s = perpetuity_step(s, 1.0, 0.5).unwrap();
        assert_eq!(s.value, 0.75);
        let s = perpetuity_step(s, 1.0, 1e-300).unwrap();
        assert!(s.value > 0.0 && s.value < 1e-299);
        assert!(perpetuity_step(s, 0.0, 0.5).is_err());
        assert!(perpetuity_step(s, 1.0, 1.0).is_err());
        assert!(PerpetuityState::new(-1.0, 0).is_err());
    }

    #[test]
    fn perpetuity_direct_examples() {
        assert!((perpetuity_direct(&[LN_2], &[]).unwrap() - 0.5).abs() < 1e-15);
        let y = perpetuity_direct(&[LN_2, 4f64.ln()], &[1.0]).unwrap();
        assert!((y - 0.75).abs() < 1e-15);
        assert!(perpetuity_direct(&[LN_2, 1.0], &[]).is_err());
    }

    #[test]
    fn perpetuity_routes_agree() {
        for id in 0..100 {
            let mut s = make_stream(21, id);
            let r = simulate_record_values(&mut s, 1.0, 50).unwrap();
            let v: Vec<f64> = (0..49).map(|_| sample_unit_exp(&mut s)).collect();
            let a = perpetuity_direct(&r, &v).unwrap();
            let b = perpetuity_by_recursion(&r, &v).unwrap();
            assert!((a - b).abs() <= 1e-9 * a.abs());
        }
    }
}
