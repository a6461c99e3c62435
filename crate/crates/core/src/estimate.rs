//! Drift estimators and efficiency experiments.
//!
//! The discretized estimator solves the score equations of the continuous-time
//! likelihood
//!
//! ```text
//! l(a, b) = int (a - bX)/(2 sigma X) dX - (1/2) int (a - bX)^2 / (2 sigma X) ds
//! ```
//!
//! with left-point Riemann sums for `int ds / X`, `int X ds` and the Ito sum
//! `sum (X_{k+1} - X_k) / X_k` for `int dX / X`. Setting both partial
//! derivatives to zero gives the linear system
//!
//! ```text
//! [ S1  -T  ] [a]   [D1]       S1 = delta sum 1/X_k,  S2 = delta sum X_k,  T = n delta,
//! [ T   -S2 ] [b] = [D2],      D1 = sum (X_{k+1} - X_k)/X_k,  D2 = X_n - X_0.
//! ```

use rayon::prelude::*;

use crate::error::{CirError, Result};
use crate::likelihood::{fisher_info_subcritical, path_loglik, TransitionKernel};
use crate::model::{CirParams, Regime, SamplingScheme};
use crate::sim::{simulate_path, Path, RngStream, EMPIRICAL_LANE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateResult {
    pub a_hat: f64,
    pub b_hat: f64,
    pub converged: bool,
    pub iterations: usize,
    pub loglik_at_optimum: f64,
    /// The raw solution had `a < sigma` and was projected onto `a = sigma`.
    pub projected: bool,
}

/// Sufficient statistics of the discretized score system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreSums {
    pub s1: f64,
    pub s2: f64,
    pub horizon: f64,
    pub d1: f64,
    pub d2: f64,
}

impl ScoreSums {
    pub fn from_path(path: &Path) -> Self {
        let values = path.values();
        let delta = path.delta();
        let (mut inv, mut lin, mut d1) = (0.0, 0.0, 0.0);
        for w in values.windows(2) {
            inv += 1.0 / w[0];
            lin += w[0];
            d1 += (w[1] - w[0]) / w[0];
        }
        ScoreSums {
            s1: delta * inv,
            s2: delta * lin,
            horizon: path.n_steps() as f64 * delta,
            d1,
            d2: values[values.len() - 1] - values[0],
        }
    }

    pub fn determinant(&self) -> f64 {
        self.s1 * self.s2 - self.horizon * self.horizon
    }
}

/// Closed-form discretized continuous-time MLE with `sigma` known.
pub fn mle_discretized(path: &Path, sigma: f64) -> Result<EstimateResult> {
    if !(sigma > 0.0) {
        return Err(CirError::InvalidParams(format!(
            "sigma must be > 0, got {sigma}"
        )));
    }
    let s = ScoreSums::from_path(path);
    let det = s.determinant();
    if !(det.abs() > 1e-12 * s.s1 * s.s2) {
        return Err(CirError::DegenerateDesign);
    }
    // [s1, -T; T, -s2] (a, b)' = (d1, d2)'
    let a_raw = (-s.s2 * s.d1 + s.horizon * s.d2) / (-det);
    let b_raw = (s.s1 * s.d2 - s.horizon * s.d1) / (-det);
    let projected = a_raw < sigma;
    let a_hat = a_raw.max(sigma);
    let params = CirParams::new(a_hat, b_raw, sigma, path.values()[0])?;
    Ok(EstimateResult {
        a_hat,
        b_hat: b_raw,
        converged: true,
        iterations: 0,
        loglik_at_optimum: path_loglik(&params, path)?,
        projected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    /// Stop when the simplex diameter falls below this.
    pub xtol: f64,
    pub max_iter: usize,
    /// Initial simplex edge lengths in `(a, b)`; derived from `init` if `None`.
    pub initial_step: Option<(f64, f64)>,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            xtol: 1e-7,
            max_iter: 500,
            initial_step: None,
        }
    }
}

/// Maximise the exact discrete log-likelihood over `{a >= sigma} x R` with a
/// Nelder–Mead simplex. Points with `a < sigma` are reflected about `a = sigma`.
///
/// Hitting `max_iter` is reported through `converged = false`.
pub fn mle_exact(
    path: &Path,
    sigma: f64,
    init: (f64, f64),
    opts: &OptimizerOptions,
) -> Result<EstimateResult> {
    if !(sigma > 0.0) {
        return Err(CirError::InvalidParams(format!(
            "sigma must be > 0, got {sigma}"
        )));
    }
    if init.0 < sigma || !init.0.is_finite() || !init.1.is_finite() {
        return Err(CirError::InvalidParams(format!(
            "init ({}, {}) outside a >= sigma = {sigma}",
            init.0, init.1
        )));
    }
    let x0 = path.values()[0];
    let reflect = |a: f64| if a < sigma { 2.0 * sigma - a } else { a };
    let objective = |p: [f64; 2]| -> f64 {
        let Ok(params) = CirParams::new(p[0], p[1], sigma, x0) else {
            return f64::INFINITY;
        };
        let kernel = TransitionKernel::new(&params, path.delta());
        let ll: f64 = path
            .values()
            .windows(2)
            .map(|w| kernel.log_density(w[0], w[1]))
            .sum();
        if ll.is_finite() {
            -ll
        } else {
            f64::INFINITY
        }
    };
    let (step_a, step_b) = opts.initial_step.unwrap_or((
        (0.05 * init.0).max(0.5 * sigma),
        (0.05 * init.1.abs()).max(0.01),
    ));

    let start = [init.0, init.1];
    let mut simplex = [
        start,
        [reflect(init.0 + step_a), init.1],
        [init.0, init.1 + step_b],
    ];
    let mut values = simplex.map(objective);
    let mut iterations = 0;
    let mut converged = false;

    loop {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);

        let diameter = simplex[1..]
            .iter()
            .map(|p| ((p[0] - simplex[0][0]).powi(2) + (p[1] - simplex[0][1]).powi(2)).sqrt())
            .fold(0.0, f64::max);
        if diameter < opts.xtol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;

        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| -> [f64; 2] {
            [
                reflect(centroid[0] + t * (simplex[2][0] - centroid[0])),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };
        let xr = along(-1.0);
        let fr = objective(xr);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = objective(xe);
            if fe < fr {
                simplex[2] = xe;
                values[2] = fe;
            } else {
                simplex[2] = xr;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = xr;
            values[2] = fr;
        } else {
            let (xc, fc) = if fr < values[2] {
                let xc = along(-0.5);
                (xc, objective(xc))
            } else {
                let xc = along(0.5);
                (xc, objective(xc))
            };
            if fc < values[2].min(fr) {
                simplex[2] = xc;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        reflect(simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0])),
                        simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
                    ];
                    values[i] = objective(simplex[i]);
                }
            }
        }
    }

    let best = simplex[0];
    let ll = -values[0];
    if !ll.is_finite() {
        return Err(CirError::Domain(
            "exact log-likelihood not finite at any vertex".into(),
        ));
    }
    Ok(EstimateResult {
        a_hat: best[0],
        b_hat: best[1],
        converged,
        iterations,
        loglik_at_optimum: ll,
        projected: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Discretized,
    /// Exact-likelihood simplex started from the discretized estimate.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyReport {
    pub m: usize,
    /// Mean of unscaled errors `(a_hat - a0, b_hat - b0)`.
    pub mean_error: [f64; 2],
    /// Sample covariance of `sqrt(n delta) * error`.
    pub sample_cov_scaled: [[f64; 2]; 2],
    /// Inverse of the subcritical Fisher information.
    pub crlb: [[f64; 2]; 2],
    pub max_rel_dev: f64,
}

fn estimate_one(path: &Path, sigma: f64, estimator: Estimator) -> Result<EstimateResult> {
    let d = mle_discretized(path, sigma)?;
    match estimator {
        Estimator::Discretized => Ok(d),
        Estimator::Exact => mle_exact(
            path,
            sigma,
            (d.a_hat, d.b_hat),
            &OptimizerOptions::default(),
        ),
    }
}

/// Replicate estimation on `m` independent exact paths and compare the
/// covariance of rate-scaled errors with the inverse Fisher information.
pub fn efficiency_experiment(
    params0: &CirParams,
    scheme: &SamplingScheme,
    m: usize,
    estimator: Estimator,
    stream: &RngStream,
) -> Result<EfficiencyReport> {
    if params0.regime() != Regime::Subcritical {
        return Err(CirError::WrongRegime {
            expected: "subcritical",
            actual: params0.regime(),
        });
    }
    if m < 2 {
        return Err(CirError::TooFewSamples { got: m, min: 2 });
    }
    let crlb = fisher_info_subcritical(params0)?.inverse()?;
    let errors: Vec<[f64; 2]> = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let path = simulate_path(params0, scheme, &stream.child(EMPIRICAL_LANE, i));
            let est = estimate_one(&path, params0.sigma(), estimator)?;
            Ok([est.a_hat - params0.a(), est.b_hat - params0.b()])
        })
        .collect::<Result<_>>()?;

    let mf = m as f64;
    let mean_error = [
        errors.iter().map(|e| e[0]).sum::<f64>() / mf,
        errors.iter().map(|e| e[1]).sum::<f64>() / mf,
    ];
    let scale = scheme.horizon();
    let mut cov = [[0.0; 2]; 2];
    for e in &errors {
        let d = [e[0] - mean_error[0], e[1] - mean_error[1]];
        for i in 0..2 {
            for j in 0..2 {
                cov[i][j] += d[i] * d[j];
            }
        }
    }
    for row in cov.iter_mut() {
        for c in row.iter_mut() {
            *c *= scale / (mf - 1.0);
        }
    }
    let max_rel_dev = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| ((cov[i][j] - crlb[i][j]) / crlb[i][j]).abs())
        .fold(0.0, f64::max);
    Ok(EfficiencyReport {
        m,
        mean_error,
        sample_cov_scaled: cov,
        crlb,
        max_rel_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_path_is_degenerate() {
        let path = Path::new(0.0, 0.01, vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(mle_discretized(&path, 0.1), Err(CirError::DegenerateDesign));
    }

    #[test]
    fn cauchy_schwarz_on_positive_paths() {
        let path = Path::new(0.0, 0.1, vec![1.0, 2.0, 0.5, 3.0, 0.1]).unwrap();
        let s = ScoreSums::from_path(&path);
        assert!(s.s1 * s.s2 >= s.horizon * s.horizon);
    }

    #[test]
    fn hand_solved_system() {
        let path = Path::new(0.0, 0.5, vec![1.0, 2.0, 1.5]).unwrap();
        let s = ScoreSums::from_path(&path);
        // s1 = 0.5 (1 + 0.5), s2 = 0.5 (1 + 2), T = 1, d1 = 1 - 0.25, d2 = 0.5
        assert!((s.s1 - 0.75).abs() < 1e-15 && (s.s2 - 1.5).abs() < 1e-15);
        let est = mle_discretized(&path, 0.1).unwrap();
        assert!((0.75 * est.a_hat - est.b_hat - 0.75).abs() < 1e-12);
        assert!((est.a_hat - 1.5 * est.b_hat - 0.5).abs() < 1e-12);
    }

    #[test]
    fn projection_flag() {
        let path = Path::new(0.0, 0.1, vec![2.0, 1.0, 0.5, 0.2]).unwrap();
        let est = mle_discretized(&path, 0.1).unwrap();
        assert!(est.projected);
        assert_eq!(est.a_hat, 0.1);
    }

    #[test]
    fn rejects_bad_init() {
        let path = Path::new(0.0, 0.1, vec![1.0, 1.1, 1.2]).unwrap();
        assert!(mle_exact(&path, 0.1, (0.05, 0.0), &OptimizerOptions::default()).is_err());
    }
}
