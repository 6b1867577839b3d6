//! Numerics for rough paths of sampled signals.
//!
//! The crate is organised bottom-up:
//!
//! * [`paths`] and [`words`]: time grids, piecewise-linear paths, words and
//!   the shuffle product.
//! * [`signature`]: exact truncated signatures of piecewise-linear paths,
//!   pair sweeps and mixed (Young-translated) iterated integrals.
//! * [`norms`]: Hölder rough-path norms, inhomogeneous distances,
//!   p-variation, Besov seminorms and control functions.
//! * [`gaussian`]: fBM and random Fourier series samplers with shared-noise
//!   coupling, Cameron–Martin elements and exact Malliavin gradients.
//! * [`experiments`]: Monte Carlo drivers, log-log rate fits and reports.
//! * [`checks`]: self-contained verification batteries shared by the CLI and
//!   the acceptance suite.

// Parameter checks negate comparisons so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops read more naturally in the dynamic programs.
#![allow(clippy::needless_range_loop)]
// `is_multiple_of` is newer than the minimum supported toolchain.
#![allow(clippy::manual_is_multiple_of)]

pub mod checks;
pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod norms;
pub mod paths;
pub mod quadrature;
pub mod signature;
pub mod stats;
pub mod words;

pub use error::{Error, Result};
pub use paths::{Path, TimeGrid};
pub use signature::{PairSet, SignatureTensor};
pub use words::{ShuffleExpansion, Word};
