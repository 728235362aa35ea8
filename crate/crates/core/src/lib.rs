//! Two-window concept drift detection and window adversarials.
//!
//! A two-window detector compares the samples of a reference window with
//! those of a test window for every window pair its scheme considers. If the
//! stream is drawn as `X_i ~ v_i P + (1 - v_i) Q` for a profile `v` whose
//! window means coincide on every compared pair, the detector cannot see the
//! drift no matter which two-sample test it runs. This crate
//!
//! - enumerates the window pairs of sliding, fixed-reference, growing-reference,
//!   chunked and combined schemes and encodes them as weight matrices
//!   ([`windowing`]),
//! - constructs such profiles by null-space solves or closed-form families and
//!   certifies them exactly in rational arithmetic, and checks continuous-time
//!   profile functions against the window-integral identities ([`adversary`]),
//! - runs the kernel MMD permutation-test detector ([`detector`]),
//! - samples mixture streams ([`data`]) and reproduces the synthetic
//!   benchmark grid ([`experiment`]).
//!
//! Linear algebra that only needs a field is generic over [`Scalar`], so the
//! same weight matrix and residual code runs in `f64` for solving and in
//! [`Rational`] for exact certificates. Kernel code is generic over
//! [`Real`] (`f32` or `f64`).

pub mod adversary;
pub mod data;
pub mod detector;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod windowing;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

/// Exact rational numbers used for residual certificates.
pub type Rational = num_rational::BigRational;

/// Weight matrix with exact rational entries.
pub type ExactWeightMatrix = windowing::WeightMatrix<Rational>;
/// Weight matrix with floating-point entries, as handed to the SVD solve.
pub type FloatWeightMatrix = windowing::WeightMatrix<f64>;

/// Profile with floating-point mixture weights.
pub type Profile = adversary::AdversarialProfile<f64>;
/// Profile with exact rational mixture weights.
pub type ExactProfile = adversary::AdversarialProfile<Rational>;

/// Kernel matrix in double precision.
pub type KernelMatrix64 = detector::KernelMatrix<f64>;
/// Kernel matrix in single precision.
pub type KernelMatrix32 = detector::KernelMatrix<f32>;

/// Seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 1729;
