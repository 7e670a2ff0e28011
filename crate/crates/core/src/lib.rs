//! Simulation and statistical verification of the record structure of a
//! homogeneous Poisson process.
//!
//! * [`randomness`]: reproducible ChaCha8 streams addressed by `(seed, stream_id)`.
//! * [`pathsim`]: exact paths, record traces, `N_t`, `C_t`, `W_t`.
//! * [`recordsim`]: record values and record times without the lifetimes, and
//!   the associated perpetuity.
//! * [`scaling`]: the rescaled processes on `[0, 1]` and the sup statistic.
//! * [`gausslim`]: the Gaussian limit processes.
//! * [`statlab`]: KS statistics, exact record-count laws, reference CDFs.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gausslim;
pub mod pathsim;
pub mod randomness;
pub mod recordsim;
pub mod scaling;
pub mod statlab;

pub use error::{Error, Result};
pub use gausslim::{GaussianPairPath, Scheme};
pub use pathsim::{build_trace, observables_at, simulate_path, Observables, PoissonPath, RecordTrace};
pub use randomness::{make_stream, BoxMuller, GaussianSource, RandomStream, Scripted, UniformSource};
pub use recordsim::{PerpetuityState, RecordSequence};
pub use scaling::{Grid, SampledPath};
pub use statlab::{Pmf, ReferenceLaw, TestReport, Threshold};
