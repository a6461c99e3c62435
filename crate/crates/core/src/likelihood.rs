//! Transition densities in log space, path likelihoods, score approximations
//! and Fisher information.
//!
//! With `c`, `m = x exp(-b dt)` and `nu = a/sigma - 1`, the transition density is
//!
//! ```text
//! p(dt, x, y) = (1/c) (y/m)^(nu/2) exp(-(m + y)/c) I_nu(2 sqrt(m y) / c)
//! ```
//!
//! which is evaluated as
//! `-ln c + (nu/2) ln(y/m) - (sqrt y - sqrt m)^2 / c + [ln I_nu(z) - z]`
//! so that neither the exponential factor nor the Bessel function is formed.

use crate::error::{CirError, Result};
use crate::model::{CirParams, Regime};
use crate::quad::{integrate_with_breaks, QuadOptions, QuadResult};
use crate::sim::{transition_constants, Path, TransitionConstants};
use crate::specfun::log_bessel_i_scaled;

/// Which closed form to use for the density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DensityBranch {
    /// `b = 0` formula inside the near-critical band, general formula outside.
    #[default]
    Auto,
    /// Always the `b = 0` formula, whatever the stored `b`.
    Critical,
}

/// Precomputed constants of `y -> ln p(dt, x, y)` for fixed parameters and step.
#[derive(Debug, Clone, Copy)]
pub struct TransitionKernel {
    tc: TransitionConstants,
    nu: f64,
    ln_c: f64,
}

impl TransitionKernel {
    pub fn new(params: &CirParams, dt: f64) -> Self {
        Self::with_branch(params, dt, DensityBranch::Auto)
    }

    pub fn with_branch(params: &CirParams, dt: f64, branch: DensityBranch) -> Self {
        let tc = match branch {
            DensityBranch::Auto => transition_constants(params, dt),
            DensityBranch::Critical => TransitionConstants {
                c: params.sigma() * dt,
                decay: 1.0,
                shape: params.a() / params.sigma(),
            },
        };
        Self {
            tc,
            nu: params.bessel_order(),
            ln_c: tc.c.ln(),
        }
    }

    pub fn constants(&self) -> &TransitionConstants {
        &self.tc
    }

    /// `ln p(dt, x, y)` for `x, y > 0`.
    #[inline]
    pub fn log_density(&self, x: f64, y: f64) -> f64 {
        let m = x * self.tc.decay;
        let sm = m.sqrt();
        let sy = y.sqrt();
        let arg = 2.0 * sm * sy / self.tc.c;
        let gap = sy - sm;
        let bessel = log_bessel_i_scaled(self.nu, arg).unwrap_or(f64::NAN);
        -self.ln_c + 0.5 * self.nu * (y / m).ln() - gap * gap / self.tc.c + bessel
    }
}

fn check_positive(dt: f64, x: f64, y: f64) -> Result<()> {
    if !(dt > 0.0 && x > 0.0 && y > 0.0) || !(dt.is_finite() && x.is_finite() && y.is_finite()) {
        return Err(CirError::Domain(format!(
            "density needs dt, x, y > 0 (got dt = {dt}, x = {x}, y = {y})"
        )));
    }
    Ok(())
}

pub fn log_transition_density(params: &CirParams, dt: f64, x: f64, y: f64) -> Result<f64> {
    log_transition_density_with(params, dt, x, y, DensityBranch::Auto)
}

pub fn log_transition_density_with(
    params: &CirParams,
    dt: f64,
    x: f64,
    y: f64,
    branch: DensityBranch,
) -> Result<f64> {
    check_positive(dt, x, y)?;
    Ok(TransitionKernel::with_branch(params, dt, branch).log_density(x, y))
}

/// Sum of log transition densities along the path.
pub fn path_loglik(params: &CirParams, path: &Path) -> Result<f64> {
    let kernel = TransitionKernel::new(params, path.delta());
    let total: f64 = path
        .values()
        .windows(2)
        .map(|w| kernel.log_density(w[0], w[1]))
        .sum();
    if total.is_finite() {
        Ok(total)
    } else {
        Err(CirError::Domain(format!(
            "non-finite log-likelihood {total}"
        )))
    }
}

/// `ln dP_{params1} / dP_{params0}` evaluated on `path`.
pub fn loglr(params0: &CirParams, params1: &CirParams, path: &Path) -> Result<f64> {
    if params0.sigma() != params1.sigma() {
        return Err(CirError::SigmaMismatch(params0.sigma(), params1.sigma()));
    }
    if params0 == params1 {
        return Ok(0.0);
    }
    let k0 = TransitionKernel::new(params0, path.delta());
    let k1 = TransitionKernel::new(params1, path.delta());
    let total: f64 = path
        .values()
        .windows(2)
        .map(|w| k1.log_density(w[0], w[1]) - k0.log_density(w[0], w[1]))
        .sum();
    if total.is_finite() {
        Ok(total)
    } else {
        Err(CirError::Domain(format!(
            "non-finite log-likelihood ratio {total}"
        )))
    }
}

/// Per-transition scores with respect to `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScorePair {
    pub s_a: f64,
    pub s_b: f64,
}

/// Leading terms of the `a`- and `b`-scores, from the Euler-centred increment
/// `y - x - (a - b x) dt`.
pub fn score_main_term(params: &CirParams, dt: f64, x: f64, y: f64) -> ScorePair {
    let incr = y - x - (params.a() - params.b() * x) * dt;
    let two_sigma = 2.0 * params.sigma();
    ScorePair {
        s_a: incr / (two_sigma * x),
        s_b: -incr / two_sigma,
    }
}

/// Default central-difference step for a parameter of magnitude `value`.
pub fn default_fd_step(value: f64) -> f64 {
    (1e-7 * value.abs()).max(1e-5)
}

/// Central differences of `ln p` in `a` and `b`.
pub fn score_fd(
    params: &CirParams,
    dt: f64,
    x: f64,
    y: f64,
    h_a: f64,
    h_b: f64,
) -> Result<ScorePair> {
    check_positive(dt, x, y)?;
    if !(h_a > 0.0 && h_b > 0.0) || params.a() - h_a < params.sigma() {
        return Err(CirError::StepLeavesDomain);
    }
    let (a, b) = (params.a(), params.b());
    let at = |aa: f64, bb: f64| -> Result<f64> {
        Ok(TransitionKernel::new(&params.with_drift(aa, bb)?, dt).log_density(x, y))
    };
    let s_a = (at(a + h_a, b)? - at(a - h_a, b)?) / (2.0 * h_a);
    let s_b = (at(a, b + h_b)? - at(a, b - h_b)?) / (2.0 * h_b);
    Ok(ScorePair { s_a, s_b })
}

/// Symmetric 2x2 information matrix for `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherMatrix {
    pub i_aa: f64,
    pub i_ab: f64,
    pub i_bb: f64,
}

impl FisherMatrix {
    pub fn quadratic_form(&self, u: f64, v: f64) -> f64 {
        self.i_aa * u * u + 2.0 * self.i_ab * u * v + self.i_bb * v * v
    }

    pub fn determinant(&self) -> f64 {
        self.i_aa * self.i_bb - self.i_ab * self.i_ab
    }

    pub fn is_positive_definite(&self) -> bool {
        self.i_aa > 0.0 && self.determinant() > 0.0
    }

    /// Inverse as a row-major 2x2 array.
    pub fn inverse(&self) -> Result<[[f64; 2]; 2]> {
        let det = self.determinant();
        if !(det.abs() > 0.0) {
            return Err(CirError::Domain("singular information matrix".into()));
        }
        Ok([
            [self.i_bb / det, -self.i_ab / det],
            [-self.i_ab / det, self.i_aa / det],
        ])
    }
}

/// `(1 / 2 sigma) [[b0 / (a0 - sigma), -1], [-1, a0 / b0]]`.
pub fn fisher_info_subcritical(params0: &CirParams) -> Result<FisherMatrix> {
    if params0.regime() != Regime::Subcritical {
        return Err(CirError::WrongRegime {
            expected: "subcritical",
            actual: params0.regime(),
        });
    }
    let (a0, b0, sigma) = (params0.a(), params0.b(), params0.sigma());
    if a0 <= sigma {
        return Err(CirError::Domain(format!("need a0 > sigma, got a0 = {a0}")));
    }
    let k = 1.0 / (2.0 * sigma);
    Ok(FisherMatrix {
        i_aa: k * b0 / (a0 - sigma),
        i_ab: -k,
        i_bb: k * a0 / b0,
    })
}

/// Deterministic `(a, a)` information at `b0 = 0`: `1 / (2 sigma (a0 - sigma))`.
pub fn critical_info_deterministic(params0: &CirParams) -> Result<f64> {
    let (a0, sigma) = (params0.a(), params0.sigma());
    if a0 <= sigma {
        return Err(CirError::Domain(format!("need a0 > sigma, got a0 = {a0}")));
    }
    Ok(1.0 / (2.0 * sigma * (a0 - sigma)))
}

/// Break points covering the bulk of the transition law from `x`: zero, the
/// mean plus or minus multiples of the standard deviation, and the upper cut
/// `m + 20 c (a/sigma + lambda)` beyond which the mass is negligible.
pub fn transition_breakpoints(params: &CirParams, dt: f64, x: f64) -> Vec<f64> {
    let tc = transition_constants(params, dt);
    let mean = tc.mean(x);
    let sd = tc.variance(x).sqrt();
    let upper = x * tc.decay + 20.0 * tc.c * (tc.shape + tc.lambda(x));
    let mut pts = vec![0.0, upper];
    for k in [
        -16.0, -10.0, -6.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 6.0, 10.0, 16.0, 25.0,
    ] {
        let p = mean + k * sd;
        if p > 0.0 && p < upper {
            pts.push(p);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts
}

/// `E[g(X_{dt}) | X_0 = x]` by adaptive quadrature against the exact density.
pub fn transition_expectation<G: Fn(f64) -> f64>(
    params: &CirParams,
    dt: f64,
    x: f64,
    g: G,
    opts: &QuadOptions,
) -> QuadResult {
    let kernel = TransitionKernel::new(params, dt);
    let pts = transition_breakpoints(params, dt, x);
    integrate_with_breaks(
        |y| {
            if y <= 0.0 {
                0.0
            } else {
                let p = kernel.log_density(x, y).exp();
                if p == 0.0 {
                    0.0
                } else {
                    g(y) * p
                }
            }
        },
        &pts,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64) -> CirParams {
        CirParams::new(a, b, 0.1, 1.0).unwrap()
    }

    #[test]
    fn fisher_reference() {
        let i = fisher_info_subcritical(&params(1.1, 0.5)).unwrap();
        assert!((i.i_aa - 2.5).abs() < 1e-14);
        assert!((i.i_ab + 5.0).abs() < 1e-14);
        assert!((i.i_bb - 11.0).abs() < 1e-13);
        assert!((i.determinant() - 2.5).abs() < 1e-12);
        assert!((i.quadratic_form(1.0, 1.0) - 3.5).abs() < 1e-12);
        let inv = i.inverse().unwrap();
        assert!((inv[0][0] - 4.4).abs() < 1e-12 && (inv[0][1] - 2.0).abs() < 1e-12);
        assert!((inv[1][1] - 1.0).abs() < 1e-12);
        assert_eq!(
            fisher_info_subcritical(&params(2.0, 3.0)).unwrap().i_ab,
            -5.0
        );
        assert!(matches!(
            fisher_info_subcritical(&params(1.1, 0.0)),
            Err(CirError::WrongRegime { .. })
        ));
    }

    #[test]
    fn critical_information() {
        assert!((critical_info_deterministic(&params(1.1, 0.0)).unwrap() - 5.0).abs() < 1e-13);
        assert!(critical_info_deterministic(&params(0.1, 0.0)).is_err());
        let near = CirParams::new(0.1 + 1e-300 * 0.0 + f64::EPSILON * 0.1, 0.0, 0.1, 1.0).unwrap();
        let v = critical_info_deterministic(&near).unwrap();
        assert!(v > 1e15);
    }

    #[test]
    fn score_main_term_values() {
        let p = params(1.1, 0.5);
        let s = score_main_term(&p, 0.01, 1.0, 1.0 + 0.6 * 0.01);
        assert!(s.s_a.abs() < 1e-15 && s.s_b.abs() < 1e-15);
        let s = score_main_term(&p, 0.01, 1.0, 1.01);
        assert!((s.s_a - 0.02).abs() < 1e-14 && (s.s_b + 0.02).abs() < 1e-14);
    }

    #[test]
    fn density_domain_errors() {
        let p = params(1.1, 0.5);
        assert!(log_transition_density(&p, 0.0, 1.0, 1.0).is_err());
        assert!(log_transition_density(&p, 0.1, -1.0, 1.0).is_err());
        assert!(log_transition_density(&p, 0.1, 1.0, 0.0).is_err());
        assert!(score_fd(
            &CirParams::new(0.1, 0.5, 0.1, 1.0).unwrap(),
            0.1,
            1.0,
            1.0,
            1e-5,
            1e-5
        )
        .is_err());
    }

    #[test]
    fn sigma_mismatch() {
        let path = Path::new(0.0, 0.1, vec![1.0, 1.1, 1.2]).unwrap();
        let p0 = params(1.1, 0.5);
        let p1 = CirParams::new(1.1, 0.5, 0.2, 1.0).unwrap();
        assert_eq!(
            loglr(&p0, &p1, &path),
            Err(CirError::SigmaMismatch(0.1, 0.2))
        );
        assert_eq!(loglr(&p0, &p0, &path).unwrap(), 0.0);
    }

    #[test]
    fn continuity_across_critical_switch() {
        let crit = log_transition_density(&params(1.1, 0.0), 0.1, 1.0, 1.05).unwrap();
        for b in [1e-8, -1e-8, 1e-12] {
            let v = log_transition_density(&params(1.1, b), 0.1, 1.0, 1.05).unwrap();
            assert!((v - crit).abs() < 1e-6, "b = {b}: {v} vs {crit}");
        }
        let forced = log_transition_density_with(
            &params(1.1, 1e-3),
            0.1,
            1.0,
            1.05,
            DensityBranch::Critical,
        )
        .unwrap();
        assert_eq!(forced, crit);
    }
}
