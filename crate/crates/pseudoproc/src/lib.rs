//! Numerical stack for the sojourn time on the positive half-line of the
//! pseudo-process driven by the order-`N` heat-type equation
//! `∂u/∂t = κ_N ∂^N u/∂x^N`.
//!
//! Layers, from the bottom up:
//!
//! * [`quadrature`] — adaptive Gauss–Kronrod engine, endpoint-singularity
//!   substitutions, semi-infinite integrals, forward Laplace/Fourier transforms.
//! * [`special_functions`] — Mittag-Leffler, error functions, Airy `Hi`, and the
//!   contour-rotated kernel integrals `I_{j,m}`.
//! * [`root_algebra`] — the `N`-th roots of `κ_N`, the `J`/`K` split and the
//!   Vandermonde-type coefficients with their identity ledger.
//! * [`kernel`] — the signed fundamental solution `p(t; x)`.
//! * [`transform_stack`] — the triple Laplace–Fourier transform of
//!   `(T(t), X(t))` and its successive inversions down to the joint density.
//! * [`discrete_oracle`] — lattice evolution of the dyadic pseudo-walk and
//!   brute-force verification of Spitzer's identity.
//! * [`validation`] — the identity ledger and the consistency ladder.
//! * [`cli`] — the command-line front end.

pub mod cli;
pub mod discrete_oracle;
pub mod error;
pub mod kernel;
pub mod quadrature;
pub mod report;
pub mod root_algebra;
pub mod special_functions;
pub mod transform_stack;
pub mod validation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
