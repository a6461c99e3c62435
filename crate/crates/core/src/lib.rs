//! Simulation, exact likelihood, estimation and local asymptotic verification
//! for the Cox–Ingersoll–Ross diffusion
//!
//! ```text
//! dX_t = (a - b X_t) dt + sqrt(2 sigma X_t) dB_t,   X_0 = x0,   a >= sigma > 0
//! ```
//!
//! observed on an equidistant grid. The crate is organised bottom-up:
//!
//! * [`model`]: parameters, regimes, sampling schemes, local alternatives and rates;
//! * [`specfun`]: `ln Gamma` and `ln I_nu` evaluated stably;
//! * [`quad`]: adaptive Gauss–Kronrod quadrature used by density oracles;
//! * [`sim`]: exact Poisson–Gamma transitions, a symmetrized Euler cross-check,
//!   and draws of the auxiliary processes that appear in the limit laws;
//! * [`likelihood`]: log-space transition density, path log-likelihoods and ratios,
//!   score approximations and Fisher information;
//! * [`estimate`]: discretized continuous-time MLE, exact-likelihood simplex MLE,
//!   and efficiency experiments;
//! * [`lanlab`]: Monte Carlo comparison of exact log-likelihood ratios with their
//!   regime-dependent limit laws.

// `!(x > 0.0)` is the NaN-rejecting form used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimate;
pub mod lanlab;
pub mod likelihood;
pub mod model;
pub mod quad;
pub mod sim;
pub mod specfun;

pub use error::{CirError, Result};
pub use model::{
    check_condition_a, classify_regime, local_alternative_params, local_rates, perturb,
    validate_scheme, CirParams, LocalAlternative, RatePair, Regime, SamplingScheme, SchemeWarning,
    CONDITION_A_THRESHOLD,
};
pub use sim::{Path, RngStream};
