//! Model parameters, regimes, observation grids and local alternatives.

use std::fmt;

use crate::error::{CirError, Result};

/// Lower bound on `a / sigma` under which the local asymptotic results are stated.
pub const CONDITION_A_THRESHOLD: f64 = 5.0 + 3.0 * std::f64::consts::SQRT_2;

/// Parameters of `dX = (a - bX) dt + sqrt(2 sigma X) dB`, `X_0 = x0`.
///
/// `sigma` is a known constant; only the drift pair `(a, b)` is ever estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirParams {
    a: f64,
    b: f64,
    sigma: f64,
    x0: f64,
}

impl CirParams {
    /// Validated constructor: requires `a >= sigma > 0` and `x0 > 0`.
    pub fn new(a: f64, b: f64, sigma: f64, x0: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && sigma.is_finite() && x0.is_finite()) {
            return Err(CirError::InvalidParams(
                "all parameters must be finite".into(),
            ));
        }
        if !(sigma > 0.0) {
            return Err(CirError::InvalidParams(format!(
                "sigma must be > 0, got {sigma}"
            )));
        }
        if a < sigma {
            return Err(CirError::InvalidParams(format!(
                "need a >= sigma, got a = {a}, sigma = {sigma}"
            )));
        }
        if !(x0 > 0.0) {
            return Err(CirError::InvalidParams(format!("x0 must be > 0, got {x0}")));
        }
        Ok(Self { a, b, sigma, x0 })
    }

    /// Skips the `a >= sigma` check. Only intended for discretisation
    /// experiments (e.g. a nearly deterministic Euler run); the density and
    /// the exact sampler assume the validated domain.
    pub fn new_relaxed(a: f64, b: f64, sigma: f64, x0: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && sigma.is_finite() && x0.is_finite()) {
            return Err(CirError::InvalidParams(
                "all parameters must be finite".into(),
            ));
        }
        if !(sigma > 0.0) || !(x0 > 0.0) || a < 0.0 {
            return Err(CirError::InvalidParams(
                "relaxed parameters need sigma > 0, x0 > 0, a >= 0".into(),
            ));
        }
        Ok(Self { a, b, sigma, x0 })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Same `sigma` and `x0`, new drift pair. Validated.
    pub fn with_drift(&self, a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, self.sigma, self.x0)
    }

    pub fn with_x0(&self, x0: f64) -> Result<Self> {
        Self::new(self.a, self.b, self.sigma, x0)
    }

    /// Order of the Bessel function in the transition density, `a / sigma - 1`.
    pub fn bessel_order(&self) -> f64 {
        self.a / self.sigma - 1.0
    }

    pub fn regime(&self) -> Regime {
        classify_regime(self)
    }
}

/// Sign of `b`: mean reverting, driftless, explosive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        };
        f.write_str(s)
    }
}

/// Equidistant observation grid `t_k = k * delta`, `k = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingScheme {
    n: usize,
    delta: f64,
}

impl SamplingScheme {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        if n < 2 {
            return Err(CirError::InvalidScheme(format!("need n >= 2, got {n}")));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(CirError::InvalidScheme(format!(
                "need 0 < delta <= 1, got {delta}"
            )));
        }
        Ok(Self { n, delta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Observation horizon `n * delta`.
    pub fn horizon(&self) -> f64 {
        self.n as f64 * self.delta
    }
}

/// Perturbation direction `z = (u, v)` of a local alternative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalAlternative {
    pub u: f64,
    pub v: f64,
}

impl LocalAlternative {
    pub const ZERO: Self = Self { u: 0.0, v: 0.0 };

    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn is_zero(&self) -> bool {
        self.u == 0.0 && self.v == 0.0
    }
}

/// Local scales `(phi1, phi2)` applied to `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub phi1: f64,
    pub phi2: f64,
}

impl RatePair {
    pub fn new(phi1: f64, phi2: f64) -> Result<Self> {
        if !(phi1 > 0.0 && phi1.is_finite() && phi2 > 0.0 && phi2.is_finite()) {
            return Err(CirError::Domain(format!(
                "rates must be positive and finite, got ({phi1}, {phi2})"
            )));
        }
        Ok(Self { phi1, phi2 })
    }
}

/// Exact sign test on the stored `b`.
pub fn classify_regime(params: &CirParams) -> Regime {
    if params.b > 0.0 {
        Regime::Subcritical
    } else if params.b < 0.0 {
        Regime::Supercritical
    } else {
        Regime::Critical
    }
}

pub fn check_condition_a(params: &CirParams) -> bool {
    params.a / params.sigma > CONDITION_A_THRESHOLD
}

/// Regime-dependent local scales:
/// subcritical `(1/sqrt(T), 1/sqrt(T))`, critical `(1/sqrt(log T), 1/T)`,
/// supercritical `(1, exp(b0 T / 2))`, with `T = n * delta`.
pub fn local_rates(params0: &CirParams, scheme: &SamplingScheme) -> Result<RatePair> {
    let t = scheme.horizon();
    let (phi1, phi2) = match classify_regime(params0) {
        Regime::Subcritical => (1.0 / t.sqrt(), 1.0 / t.sqrt()),
        Regime::Critical => {
            if t <= 1.0 {
                return Err(CirError::CriticalHorizonTooShort(t));
            }
            (1.0 / t.ln().sqrt(), 1.0 / t)
        }
        Regime::Supercritical => (1.0, (params0.b * t / 2.0).exp()),
    };
    Ok(RatePair { phi1, phi2 })
}

/// `(a0 + u phi1, b0 + v phi2)` for explicitly supplied rates.
pub fn perturb(params0: &CirParams, rates: &RatePair, z: &LocalAlternative) -> Result<CirParams> {
    if z.is_zero() {
        return Ok(*params0);
    }
    let a_n = params0.a + z.u * rates.phi1;
    let b_n = params0.b + z.v * rates.phi2;
    if a_n < params0.sigma {
        return Err(CirError::AlternativeLeavesParameterSpace {
            a_n,
            sigma: params0.sigma,
        });
    }
    params0.with_drift(a_n, b_n)
}

pub fn local_alternative_params(
    params0: &CirParams,
    scheme: &SamplingScheme,
    z: &LocalAlternative,
) -> Result<CirParams> {
    let rates = local_rates(params0, scheme)?;
    perturb(params0, &rates, z)
}

/// Advisory notes for a single scheme measured against asymptotic conditions.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeWarning {
    StepTooCoarse { delta: f64, tol: f64 },
    HorizonTooShort { horizon: f64, min: f64 },
    CriticalRate { ratio: f64, tol: f64 },
    SupercriticalRate { ratio: f64, tol: f64 },
}

impl fmt::Display for SchemeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeWarning::StepTooCoarse { delta, tol } => {
                write!(f, "delta = {delta} exceeds tolerance {tol}")
            }
            SchemeWarning::HorizonTooShort { horizon, min } => {
                write!(f, "horizon n*delta = {horizon} below {min}")
            }
            SchemeWarning::CriticalRate { ratio, tol } => {
                write!(f, "n*delta^1.5/log(n*delta) = {ratio} exceeds {tol}")
            }
            SchemeWarning::SupercriticalRate { ratio, tol } => {
                write!(f, "n*delta^2 = {ratio} exceeds {tol}")
            }
        }
    }
}

pub fn validate_scheme(
    params0: &CirParams,
    scheme: &SamplingScheme,
    tol: f64,
) -> Vec<SchemeWarning> {
    let mut out = Vec::new();
    let delta = scheme.delta();
    let n = scheme.n() as f64;
    let horizon = scheme.horizon();
    if delta > tol {
        out.push(SchemeWarning::StepTooCoarse { delta, tol });
    }
    if horizon < 1.0 / tol {
        out.push(SchemeWarning::HorizonTooShort {
            horizon,
            min: 1.0 / tol,
        });
    }
    match classify_regime(params0) {
        Regime::Subcritical => {}
        Regime::Critical => {
            // log(T) <= 0 makes the ratio meaningless; treat as violated.
            let ratio = if horizon > 1.0 {
                n * delta.powf(1.5) / horizon.ln()
            } else {
                f64::INFINITY
            };
            if ratio > tol {
                out.push(SchemeWarning::CriticalRate { ratio, tol });
            }
        }
        Regime::Supercritical => {
            let ratio = n * delta * delta;
            if ratio > tol {
                out.push(SchemeWarning::SupercriticalRate { ratio, tol });
            }
        }
    }
    out
}
