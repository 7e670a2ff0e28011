//! Reproducible, splittable sources of uniform, exponential and Gaussian
//! variates.
//!
//! Every [`RandomStream`] is a ChaCha8 keystream: the 64-bit seed is expanded
//! into a 256-bit key with `seed_from_u64`, and `stream_id` selects the ChaCha
//! stream (nonce), so streams with distinct ids never share keystream blocks.
//! One uniform consumes exactly one 64-bit word:
//!
//! ```text
//! u = ((w >> 12) + 0.5) * 2^-52        // always inside (0, 1)
//! ```
//!
//! Gaussians use the polar-free Box–Muller transform on two consecutive
//! uniforms; both outputs are used. Exponentials are `-ln(u) / rate`.
//!
//! The combination above is identified by [`GENERATOR_VERSION`]; changing any
//! part of it must bump the version because stored reports would no longer
//! replay.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{require_positive, Result};

/// Identifier of the exact generator recipe described in the module docs.
pub const GENERATOR_VERSION: &str = "chacha8-u52mid-boxmuller/1";

const TWO_POW_MINUS_52: f64 = 1.0 / (1u64 << 52) as f64;

/// Anything that yields i.i.d. uniforms on the open interval (0, 1).
pub trait UniformSource {
    fn next_uniform(&mut self) -> f64;
}

impl<T: UniformSource + ?Sized> UniformSource for &mut T {
    fn next_uniform(&mut self) -> f64 {
        (**self).next_uniform()
    }
}

/// Anything that yields i.i.d. standard normal variates.
pub trait GaussianSource {
    fn next_normal(&mut self) -> f64;
}

impl<T: GaussianSource + ?Sized> GaussianSource for &mut T {
    fn next_normal(&mut self) -> f64 {
        (**self).next_normal()
    }
}

/// A deterministic stream of variates addressed by `(seed, stream_id)`.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    position: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RandomStream {
            seed,
            stream_id,
            position: 0,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of 64-bit words consumed so far.
    pub fn position(&self) -> u64 {
        self.position
    }

    /// Uniform on (0, 1); advances the position by one word.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.position += 1;
        let w = self.rng.next_u64();
        ((w >> 12) as f64 + 0.5) * TWO_POW_MINUS_52
    }

    /// Exp(`rate`) variate by inversion.
    pub fn exp(&mut self, rate: f64) -> Result<f64> {
        sample_exp(self, rate)
    }
}

impl UniformSource for RandomStream {
    #[inline]
    fn next_uniform(&mut self) -> f64 {
        self.uniform()
    }
}

/// Builds the stream for `(seed, stream_id)` positioned at its first draw.
pub fn make_stream(seed: u64, stream_id: u64) -> RandomStream {
    RandomStream::new(seed, stream_id)
}

pub fn sample_uniform<U: UniformSource + ?Sized>(src: &mut U) -> f64 {
    src.next_uniform()
}

/// `-ln(u) / rate` for the next uniform `u`.
pub fn sample_exp<U: UniformSource + ?Sized>(src: &mut U, rate: f64) -> Result<f64> {
    require_positive("rate", rate)?;
    Ok(exp_from_uniform(src.next_uniform(), rate))
}

#[inline]
pub(crate) fn exp_from_uniform(u: f64, rate: f64) -> f64 {
    -u.ln() / rate
}

/// Unit-rate exponential, for callers that already validated nothing.
#[inline]
pub fn sample_unit_exp<U: UniformSource + ?Sized>(src: &mut U) -> f64 {
    -src.next_uniform().ln()
}

/// Derives a sub-experiment seed from a master seed and a label.
///
/// FNV-1a of the label is folded into the seed and then passed through the
/// SplitMix64 finaliser.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Box–Muller adapter turning a uniform source into a Gaussian source.
#[derive(Clone, Debug)]
pub struct BoxMuller<U> {
    src: U,
    spare: Option<f64>,
}

impl<U: UniformSource> BoxMuller<U> {
    pub fn new(src: U) -> Self {
        BoxMuller { src, spare: None }
    }

    pub fn into_inner(self) -> U {
        self.src
    }
}

impl<U: UniformSource> GaussianSource for BoxMuller<U> {
    fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.src.next_uniform();
        let u2 = self.src.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// A finite, pre-recorded list of draws. Panics once exhausted.
#[derive(Clone, Debug)]
pub struct Scripted {
    values: Vec<f64>,
    next: usize,
}

impl Scripted {
    pub fn new(values: impl Into<Vec<f64>>) -> Self {
        Scripted {
            values: values.into(),
            next: 0,
        }
    }

    pub fn remaining(&self) -> usize {
        self.values.len() - self.next
    }

    fn pop(&mut self) -> f64 {
        let v = *self
            .values
            .get(self.next)
            .unwrap_or_else(|| panic!("scripted source exhausted after {} draws", self.next));
        self.next += 1;
        v
    }
}

impl UniformSource for Scripted {
    fn next_uniform(&mut self) -> f64 {
        let u = self.pop();
        assert!(u > 0.0 && u < 1.0, "scripted uniform {u} outside (0, 1)");
        u
    }
}

impl GaussianSource for Scripted {
    fn next_normal(&mut self) -> f64 {
        self.pop()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn draws(s: &mut RandomStream, n: usize) -> Vec<f64> {
        (0..n).map(|_| s.uniform()).collect()
    }

    #[test]
    fn same_seed_and_id_replay() {
        let a = draws(&mut make_stream(1, 0), 10);
        let b = draws(&mut make_stream(1, 0), 10);
        assert_eq!(a, b);
    }

    #[test]
    fn stream_ids_and_seeds_separate() {
        let base = draws(&mut make_stream(1, 0), 100);
        assert_ne!(base, draws(&mut make_stream(1, 1), 100));
        assert_ne!(base, draws(&mut make_stream(2, 0), 100));
    }

    #[test]
    fn clone_replays_from_current_state() {
        let mut s = make_stream(9, 3);
        draws(&mut s, 17);
        let mut t = s.clone();
        assert_eq!(s.uniform(), t.uniform());
        assert_eq!(s.position(), 18);
    }

    #[test]
    fn uniforms_stay_open_and_average_half() {
        let mut s = make_stream(11, 0);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let u = s.uniform();
            assert!(u > 0.0 && u < 1.0);
            sum += u;
        }
        assert!((sum / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn uniform_extremes_are_interior() {
        const { assert!(0.5 * TWO_POW_MINUS_52 > 0.0) };
        let top = (((u64::MAX >> 12) as f64) + 0.5) * TWO_POW_MINUS_52;
        assert!(top < 1.0);
    }

    #[test]
    fn exp_by_inversion() {
        let x = sample_exp(&mut Scripted::new([0.5]), 1.0).unwrap();
        assert!((x - std::f64::consts::LN_2).abs() < 1e-15);
        let y = sample_exp(&mut Scripted::new([0.5]), 2.0).unwrap();
        assert_eq!(y, x / 2.0);
        let tiny = sample_exp(&mut Scripted::new([1.0 - 1e-15]), 1.0).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-14);
    }

    #[test]
    fn exp_rejects_bad_rate() {
        let mut s = make_stream(1, 0);
        assert!(sample_exp(&mut s, 0.0).is_err());
        assert!(sample_exp(&mut s, -1.0).is_err());
        assert!(sample_exp(&mut s, f64::NAN).is_err());
        assert_eq!(s.position(), 0);
    }

    #[test]
    fn derive_seed_depends_on_label() {
        assert_ne!(derive_seed(1, "a"), derive_seed(1, "b"));
        assert_ne!(derive_seed(1, "a"), derive_seed(2, "a"));
        assert_eq!(derive_seed(5, "x"), derive_seed(5, "x"));
    }

    #[test]
    fn box_muller_moments() {
        let mut g = BoxMuller::new(make_stream(4, 0));
        let n = 100_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let z = g.next_normal();
            s1 += z;
            s2 += z * z;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 0.015);
        assert!((var - 1.0).abs() < 0.02);
    }
}
