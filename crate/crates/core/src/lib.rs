//! Fundamental limits of variable-length lossy source coding when both the
//! excess-distortion probability and the codeword-length overflow probability are bounded.
//!
//! A problem is a finite source `P_X`, a reproduction alphabet, a distortion matrix with a
//! level `D`, an excess budget `ε` and an overflow budget `δ`. The central quantity is
//! `G`, the smallest smooth max entropy of a reproduction whose excess distortion is at
//! most `ε`. The optimal rate lies in `(G - 1, floor(G)]`.
//!
//! - [`smooth_entropy`]: smooth max entropy and majorization.
//! - [`dball_code`]: the greedy distortion-ball cover, `G`, and the stochastic and
//!   deterministic codes built from it.
//! - [`evaluator`]: exact code evaluation, converse and majorization audits, Monte Carlo.
//! - [`blocklength`]: memoryless extensions and per-symbol rate bounds.
//! - [`asymptotics`]: rate-distortion function, dispersion and the Gaussian approximation.
//! - [`io`] and [`cli`]: JSON formats and the command-line front end.
//!
//! Every routine is generic over [`Prob`]: `f64`, or [`Exact`] rationals when results must
//! be checked with equality.
//!
//! ```
//! use lossy_overflow::dball_code::{build_stochastic_code, greedy_cover};
//! use lossy_overflow::evaluator::evaluate_code;
//! use lossy_overflow::model::{DistortionSpec, Instance};
//! use lossy_overflow::prob::{Exact, Prob};
//!
//! let hamming = DistortionSpec::hamming(2, 0.0).unwrap();
//! let inst = Instance::from_parts(
//!     vec![Exact::from_ratio(7, 10), Exact::from_ratio(3, 10)],
//!     hamming.matrix().to_vec(),
//!     0.0,
//!     Exact::from_ratio(1, 5),
//!     Exact::from_ratio(1, 5),
//! )
//! .unwrap();
//! let cover = greedy_cover(&inst).unwrap();
//! assert_eq!((cover.i_star(), cover.k_star()), (1, 2));
//! let report = evaluate_code(&inst, &build_stochastic_code(&inst).unwrap()).unwrap();
//! assert_eq!(report.excess_prob, Exact::from_ratio(1, 5));
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod blocklength;
pub mod cli;
pub mod dball_code;
pub mod error;
pub mod evaluator;
pub mod io;
pub mod model;
pub mod prob;
pub mod smooth_entropy;

pub use error::{LossyError, Result};
pub use model::{DistortionSpec, FiniteSource, Instance, LossyProblem};
pub use prob::{Exact, Prob};
