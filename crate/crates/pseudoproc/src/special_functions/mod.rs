//! Special functions: Mittag-Leffler functions in several representations,
//! the error-function family, Scorer's function `Hi`, and the `I_{j,m}` kernels
//! whose Laplace transforms are `λ^{−m/N} e^{−θ_j λ^{1/N} x}`.

mod airy;
mod dd;
mod error_fn;
mod i_kernel;
mod mittag_leffler;
mod suite;

pub use airy::{airy_hi, airy_hi_prime, cubic_moment, AIRY_MAX_RE};
pub use dd::Dd;
pub use error_fn::{dawson, erf, erfc, erfcx, erfi};
pub use i_kernel::{
    i_jm, i_jm_at_origin, i_jm_closed, i_jm_generic, laplace_check_i, moment_integral, IMethod, Moment,
    real_axis_laplace_converges, transient_growth, IValue, LaplaceCheck, LAPLACE_CONTOUR_ROTATION,
    MAX_TRANSIENT_GROWTH, ORIGIN_EXTRAPOLATION_STEP, QUARTIC_SERIES_RADIUS,
};
pub use mittag_leffler::{
    mittag_leffler, ml_real, MlMethod, MlSpec, SERIES_MAX_TERMS, SERIES_QUIET_TERMS,
    RECIPROCAL_SERIES_LIMIT, SERIES_RADIUS, SERIES_TERM_RATIO,
};
pub use suite::{special_function_suite, ML_B_GRID};
