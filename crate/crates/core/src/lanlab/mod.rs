//! Monte Carlo checks of the local asymptotic structure of the likelihood.
//!
//! Each check samples exact log-likelihood ratios `ln dP^{a_n,b_n}/dP^{a0,b0}`
//! on paths drawn under the null and compares them with the limit law
//! `z'U - z'Iz/2` of the regime: a closed-form Gaussian when `b0 > 0`, and
//! simulated functionals of the auxiliary driftless process otherwise.
//!
//! Empirical paths use the `EMPIRICAL_LANE` of the supplied stream and limit
//! draws the `LIMIT_LANE`, so the two samples of a two-sample test are
//! independent.

pub mod stats;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{CirError, Result};
use crate::likelihood::{
    critical_info_deterministic, default_fd_step, fisher_info_subcritical, loglr, score_fd,
    score_main_term, transition_expectation, TransitionKernel,
};
use crate::model::{
    local_rates, perturb, CirParams, LocalAlternative, RatePair, Regime, SamplingScheme,
};
use crate::quad::QuadOptions;
use crate::sim::{
    sample_limit_loglr, simulate_critical_limit, simulate_path, simulate_supercritical_limit,
    LimitDraw, RngStream, DEFAULT_LIMIT_SUBSTEPS, EMPIRICAL_LANE, LIMIT_LANE,
};

pub use stats::{
    ks_statistic_one_sample, ks_statistic_two_sample, ks_two_sample_threshold, mean_and_variance,
    normal_cdf, unit_mean_statistic, variance_standard_error,
};

/// Smallest sample size accepted by the checks.
pub const MIN_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    ClosedFormGaussian,
    SimulatedCritical,
    SimulatedSupercritical,
}

impl LimitKind {
    pub fn for_regime(regime: Regime) -> Self {
        match regime {
            Regime::Subcritical => LimitKind::ClosedFormGaussian,
            Regime::Critical => LimitKind::SimulatedCritical,
            Regime::Supercritical => LimitKind::SimulatedSupercritical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitLawSpec {
    pub regime: Regime,
    pub kind: LimitKind,
    pub params0: CirParams,
    pub z: LocalAlternative,
}

impl LimitLawSpec {
    pub fn new(params0: CirParams, z: LocalAlternative) -> Self {
        let regime = params0.regime();
        Self {
            regime,
            kind: LimitKind::for_regime(regime),
            params0,
            z,
        }
    }
}

/// A theoretical moment: known in closed form, or only available through the
/// simulated limit sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theoretical {
    Value(f64),
    Simulated,
}

impl Theoretical {
    pub fn value(&self) -> Option<f64> {
        match self {
            Theoretical::Value(v) => Some(*v),
            Theoretical::Simulated => None,
        }
    }
}

/// Tolerances of a verification run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    /// Replace the regime's local rates, e.g. for negative controls.
    pub rates: Option<RatePair>,
    pub substeps: usize,
    /// Asymptotic 1% Kolmogorov constant.
    pub ks_constant: f64,
    /// Multiplier on the KS threshold when the alternative moves `a` in the
    /// critical regime, where convergence is logarithmic.
    pub u_ks_relax: f64,
    pub mean_se_mult: f64,
    pub var_rel_tol: f64,
    pub unit_mean_se_mult: f64,
    /// The unit-mean gate is applied only when the empirical variance of the
    /// log-ratios is at most this; beyond it `exp` of the sample is dominated
    /// by a handful of draws and its standard error is not informative.
    pub unit_mean_max_var: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            rates: None,
            substeps: DEFAULT_LIMIT_SUBSTEPS,
            ks_constant: 1.63,
            u_ks_relax: 2.0,
            mean_se_mult: 3.0,
            var_rel_tol: 0.15,
            unit_mean_se_mult: 4.0,
            unit_mean_max_var: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub regime: Regime,
    pub z: LocalAlternative,
    pub rates: RatePair,
    pub m: usize,
    /// Number of simulated limit draws; zero when the limit is closed form.
    pub m_limit: usize,
    pub emp_mean: f64,
    pub emp_mean_se: f64,
    pub emp_var: f64,
    pub emp_var_se: f64,
    pub theo_mean: Theoretical,
    pub theo_var: Theoretical,
    pub ks_stat: f64,
    pub ks_threshold: f64,
    pub unit_mean: f64,
    pub unit_mean_se: f64,
    pub options: CheckOptions,
    /// Empirical log-likelihood ratios in stream order.
    pub samples: Vec<f64>,
    /// Simulated limit draws; empty when the limit is closed form.
    pub limit_samples: Vec<f64>,
}

impl VerificationReport {
    fn moment_checks_apply(&self) -> bool {
        self.m_limit == 0
    }

    fn unit_mean_gate_applies(&self) -> bool {
        self.m_limit > 0 && self.emp_var <= self.options.unit_mean_max_var
    }

    pub fn mean_ok(&self) -> Option<bool> {
        let theo = self.theo_mean.value()?;
        if !self.moment_checks_apply() {
            return None;
        }
        let dev = (self.emp_mean - theo).abs();
        Some(dev == 0.0 || dev <= self.options.mean_se_mult * self.emp_mean_se)
    }

    pub fn var_rel_dev(&self) -> Option<f64> {
        let theo = self.theo_var.value()?;
        if theo == 0.0 {
            return Some(if self.emp_var == 0.0 {
                0.0
            } else {
                f64::INFINITY
            });
        }
        Some((self.emp_var - theo).abs() / theo)
    }

    pub fn var_ok(&self) -> Option<bool> {
        if !self.moment_checks_apply() {
            return None;
        }
        Some(self.var_rel_dev()? <= self.options.var_rel_tol)
    }

    pub fn ks_ok(&self) -> bool {
        self.ks_stat == 0.0 || self.ks_stat < self.ks_threshold
    }

    pub fn unit_mean_ok(&self) -> Option<bool> {
        if !self.unit_mean_gate_applies() {
            return None;
        }
        let dev = (self.unit_mean - 1.0).abs();
        Some(dev == 0.0 || dev <= self.options.unit_mean_se_mult * self.unit_mean_se)
    }

    /// Conjunction of every gate that applies to this report.
    pub fn pass(&self) -> bool {
        self.ks_ok()
            && self.mean_ok().unwrap_or(true)
            && self.var_ok().unwrap_or(true)
            && self.unit_mean_ok().unwrap_or(true)
    }
}

fn require_regime(params0: &CirParams, regime: Regime, name: &'static str) -> Result<()> {
    if params0.regime() == regime {
        Ok(())
    } else {
        Err(CirError::WrongRegime {
            expected: name,
            actual: params0.regime(),
        })
    }
}

fn require_samples(m: usize) -> Result<()> {
    if m < MIN_SAMPLES {
        Err(CirError::TooFewSamples {
            got: m,
            min: MIN_SAMPLES,
        })
    } else {
        Ok(())
    }
}

/// `m` log-likelihood ratios at the regime's local alternative, on paths
/// simulated under `params0` from `stream.child(EMPIRICAL_LANE, i)`.
pub fn sample_loglr_empirical(
    params0: &CirParams,
    scheme: &SamplingScheme,
    z: &LocalAlternative,
    m: usize,
    stream: &RngStream,
) -> Result<Vec<f64>> {
    let rates = local_rates(params0, scheme)?;
    sample_loglr_with_rates(params0, scheme, z, &rates, m, stream)
}

/// As [`sample_loglr_empirical`] with explicitly supplied rates.
pub fn sample_loglr_with_rates(
    params0: &CirParams,
    scheme: &SamplingScheme,
    z: &LocalAlternative,
    rates: &RatePair,
    m: usize,
    stream: &RngStream,
) -> Result<Vec<f64>> {
    let params1 = perturb(params0, rates, z)?;
    if params1 == *params0 {
        return Ok(vec![0.0; m]);
    }
    (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let path = simulate_path(params0, scheme, &stream.child(EMPIRICAL_LANE, i));
            loglr(params0, &params1, &path)
        })
        .collect()
}

/// `m_limit` draws of the limit log-ratio from `stream.child(LIMIT_LANE, i)`.
pub fn sample_loglr_limit(
    params0: &CirParams,
    z: &LocalAlternative,
    m_limit: usize,
    substeps: usize,
    stream: &RngStream,
) -> Result<Vec<f64>> {
    if z.is_zero() {
        return Ok(vec![0.0; m_limit]);
    }
    (0..m_limit as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.child(LIMIT_LANE, i).generator();
            let draw = match params0.regime() {
                Regime::Subcritical => None,
                Regime::Critical => {
                    let draw = simulate_critical_limit(params0, substeps, &mut rng)?;
                    let g: f64 = rng.sample(StandardNormal);
                    Some(LimitDraw::Critical { g, draw })
                }
                Regime::Supercritical => Some(LimitDraw::Supercritical(
                    simulate_supercritical_limit(params0, substeps, &mut rng)?,
                )),
            };
            sample_limit_loglr(params0, z, draw.as_ref(), &mut rng)
        })
        .collect()
}

fn resolve_rates(
    params0: &CirParams,
    scheme: &SamplingScheme,
    opts: &CheckOptions,
) -> Result<RatePair> {
    match opts.rates {
        Some(r) => Ok(r),
        None => local_rates(params0, scheme),
    }
}

struct EmpiricalSummary {
    mean: f64,
    mean_se: f64,
    var: f64,
    var_se: f64,
    unit_mean: f64,
    unit_mean_se: f64,
}

fn summarize(samples: &[f64]) -> Result<EmpiricalSummary> {
    let (mean, var) = mean_and_variance(samples);
    let (unit_mean, unit_mean_se) = unit_mean_statistic(samples)?;
    Ok(EmpiricalSummary {
        mean,
        mean_se: (var / samples.len() as f64).sqrt(),
        var,
        var_se: variance_standard_error(samples),
        unit_mean,
        unit_mean_se,
    })
}

/// Subcritical check against `N(-z'Iz/2, z'Iz)`.
pub fn lan_check_subcritical(
    params0: &CirParams,
    scheme: &SamplingScheme,
    z: &LocalAlternative,
    m: usize,
    stream: &RngStream,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    require_regime(params0, Regime::Subcritical, "subcritical")?;
    require_samples(m)?;
    let rates = resolve_rates(params0, scheme, opts)?;
    let q = fisher_info_subcritical(params0)?.quadratic_form(z.u, z.v);
    let samples = sample_loglr_with_rates(params0, scheme, z, &rates, m, stream)?;
    let s = summarize(&samples)?;
    let (theo_mean, theo_var) = if z.is_zero() {
        (0.0, 0.0)
    } else {
        (-0.5 * q, q)
    };
    // A zero direction gives identical point masses on both sides.
    let ks_stat = if z.is_zero() {
        0.0
    } else {
        ks_statistic_one_sample(&samples, normal_cdf(theo_mean, theo_var.sqrt()))?
    };
    Ok(VerificationReport {
        regime: Regime::Subcritical,
        z: *z,
        rates,
        m,
        m_limit: 0,
        emp_mean: s.mean,
        emp_mean_se: s.mean_se,
        emp_var: s.var,
        emp_var_se: s.var_se,
        theo_mean: Theoretical::Value(theo_mean),
        theo_var: Theoretical::Value(theo_var),
        ks_stat,
        ks_threshold: opts.ks_constant / (m as f64).sqrt(),
        unit_mean: s.unit_mean,
        unit_mean_se: s.unit_mean_se,
        options: *opts,
        samples,
        limit_samples: Vec::new(),
    })
}

#[allow(clippy::too_many_arguments)]
fn simulated_limit_check(
    params0: &CirParams,
    scheme: &SamplingScheme,
    z: &LocalAlternative,
    m: usize,
    m_limit: usize,
    stream: &RngStream,
    opts: &CheckOptions,
    relax: f64,
) -> Result<VerificationReport> {
    require_samples(m)?;
    require_samples(m_limit)?;
    let rates = resolve_rates(params0, scheme, opts)?;
    let samples = sample_loglr_with_rates(params0, scheme, z, &rates, m, stream)?;
    let limit = sample_loglr_limit(params0, z, m_limit, opts.substeps, stream)?;
    let s = summarize(&samples)?;
    let ks_stat = ks_statistic_two_sample(&samples, &limit)?;
    Ok(VerificationReport {
        regime: params0.regime(),
        z: *z,
        rates,
        m,
        m_limit,
        emp_mean: s.mean,
        emp_mean_se: s.mean_se,
        emp_var: s.var,
        emp_var_se: s.var_se,
        theo_mean: Theoretical::Simulated,
        theo_var: Theoretical::Simulated,
        ks_stat,
        ks_threshold: relax * ks_two_sample_threshold(opts.ks_constant, m, m_limit),
        unit_mean: s.unit_mean,
        unit_mean_se: s.unit_mean_se,
        options: *opts,
        samples,
        limit_samples: limit,
    })
}

/// Critical check: two-sample KS against simulated limit draws, plus the
/// unit-mean identity. The KS threshold is relaxed by `opts.u_ks_relax`
/// whenever `z.u != 0`.
pub fn laq_check_critical(
    params0: &CirParams,
    scheme: &SamplingScheme,
    z: &LocalAlternative,
    m: usize,
    m_limit: usize,
    stream: &RngStream,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    require_regime(params0, Regime::Critical, "critical")?;
    let relax = if z.u != 0.0 { opts.u_ks_relax } else { 1.0 };
    simulated_limit_check(params0, scheme, z, m, m_limit, stream, opts, relax)
}

/// Supercritical check: two-sample KS against simulated limit draws, plus the
/// unit-mean identity.
pub fn lamn_check_supercritical(
    params0: &CirParams,
    scheme: &SamplingScheme,
    z: &LocalAlternative,
    m: usize,
    m_limit: usize,
    stream: &RngStream,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    require_regime(params0, Regime::Supercritical, "supercritical")?;
    simulated_limit_check(params0, scheme, z, m, m_limit, stream, opts, 1.0)
}

/// Run the check matching the regime of `spec.params0`.
pub fn verify(
    spec: &LimitLawSpec,
    scheme: &SamplingScheme,
    m: usize,
    m_limit: usize,
    stream: &RngStream,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    match spec.kind {
        LimitKind::ClosedFormGaussian => {
            lan_check_subcritical(&spec.params0, scheme, &spec.z, m, stream, opts)
        }
        LimitKind::SimulatedCritical => {
            laq_check_critical(&spec.params0, scheme, &spec.z, m, m_limit, stream, opts)
        }
        LimitKind::SimulatedSupercritical => {
            lamn_check_supercritical(&spec.params0, scheme, &spec.z, m, m_limit, stream, opts)
        }
    }
}

/// One horizon of the critical `a`-direction trend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendPoint {
    pub horizon: f64,
    pub n: usize,
    /// KS distance between `(loglr + u^2 I / 2) / u` and `N(0, I)`.
    pub ks_stat: f64,
    pub emp_mean: f64,
    pub emp_var: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendReport {
    pub info: f64,
    pub u: f64,
    pub m: usize,
    pub points: Vec<TrendPoint>,
}

impl TrendReport {
    pub fn non_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].ks_stat <= w[0].ks_stat)
    }
}

/// Distance to the Gaussian limit of the critical `a`-direction log-ratio at
/// several horizons, with common random numbers: each replication simulates
/// one path to the longest horizon and evaluates the ratio on its prefixes.
pub fn critical_u_trend(
    params0: &CirParams,
    delta: f64,
    horizons: &[f64],
    u: f64,
    m: usize,
    stream: &RngStream,
) -> Result<TrendReport> {
    require_regime(params0, Regime::Critical, "critical")?;
    require_samples(m)?;
    if u == 0.0 || !u.is_finite() {
        return Err(CirError::InvalidParams(
            "trend needs a finite u != 0".into(),
        ));
    }
    if horizons.is_empty() {
        return Err(CirError::InvalidScheme("no horizons given".into()));
    }
    let info = critical_info_deterministic(params0)?;
    let mut ns = Vec::with_capacity(horizons.len());
    let mut alts = Vec::with_capacity(horizons.len());
    for &h in horizons {
        let n = (h / delta).round() as usize;
        let scheme = SamplingScheme::new(n, delta)?;
        let rates = local_rates(params0, &scheme)?;
        alts.push(perturb(params0, &rates, &LocalAlternative::new(u, 0.0))?);
        ns.push(n);
    }
    let n_max = *ns.iter().max().expect("non-empty");
    let scheme = SamplingScheme::new(n_max, delta)?;
    let k0 = TransitionKernel::new(params0, delta);
    let k1: Vec<TransitionKernel> = alts
        .iter()
        .map(|p| TransitionKernel::new(p, delta))
        .collect();

    let per_path: Vec<Vec<f64>> = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let path = simulate_path(params0, &scheme, &stream.child(EMPIRICAL_LANE, i));
            let x = path.values();
            let out: Vec<f64> = ns
                .iter()
                .zip(&k1)
                .map(|(&n, k)| {
                    x[..=n]
                        .windows(2)
                        .map(|w| k.log_density(w[0], w[1]) - k0.log_density(w[0], w[1]))
                        .sum::<f64>()
                })
                .collect();
            if out.iter().all(|v| v.is_finite()) {
                Ok(out)
            } else {
                Err(CirError::Domain("non-finite log-likelihood ratio".into()))
            }
        })
        .collect::<Result<_>>()?;

    let reference = normal_cdf(0.0, info.sqrt());
    let points = horizons
        .iter()
        .zip(&ns)
        .enumerate()
        .map(|(j, (&horizon, &n))| {
            let raw: Vec<f64> = per_path.iter().map(|r| r[j]).collect();
            let (emp_mean, emp_var) = mean_and_variance(&raw);
            let scores: Vec<f64> = raw.iter().map(|l| (l + 0.5 * u * u * info) / u).collect();
            Ok(TrendPoint {
                horizon,
                n,
                ks_stat: ks_statistic_one_sample(&scores, &reference)?,
                emp_mean,
                emp_var,
            })
        })
        .collect::<Result<_>>()?;
    Ok(TrendReport { info, u, m, points })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgodicOptions {
    /// Relative tolerance on the two time averages.
    pub avg_tol: f64,
    /// Relative tolerance on the tail variance.
    pub var_tol: f64,
    /// Leading fraction of the path discarded before the tail moments.
    pub burn_in_fraction: f64,
}

impl Default for ErgodicOptions {
    fn default() -> Self {
        Self {
            avg_tol: 0.02,
            var_tol: 0.05,
            burn_in_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgodicReport {
    pub horizon: f64,
    pub delta: f64,
    pub avg_x: f64,
    pub target_avg_x: f64,
    pub avg_inv_x: f64,
    pub target_avg_inv_x: f64,
    pub tail_mean: f64,
    pub tail_var: f64,
    pub stationary_mean: f64,
    pub stationary_var: f64,
    pub options: ErgodicOptions,
}

impl ErgodicReport {
    pub fn rel_dev_avg_x(&self) -> f64 {
        (self.avg_x - self.target_avg_x).abs() / self.target_avg_x
    }

    pub fn rel_dev_avg_inv_x(&self) -> f64 {
        (self.avg_inv_x - self.target_avg_inv_x).abs() / self.target_avg_inv_x
    }

    pub fn rel_dev_tail_mean(&self) -> f64 {
        (self.tail_mean - self.stationary_mean).abs() / self.stationary_mean
    }

    pub fn rel_dev_tail_var(&self) -> f64 {
        (self.tail_var - self.stationary_var).abs() / self.stationary_var
    }

    pub fn pass(&self) -> bool {
        self.rel_dev_avg_x() <= self.options.avg_tol
            && self.rel_dev_avg_inv_x() <= self.options.avg_tol
            && self.rel_dev_tail_var() <= self.options.var_tol
    }
}

/// Time averages of `X` and `1/X` along one long exact path, and moments of
/// the post-burn-in segment against the stationary `Gamma(a/sigma, sigma/b)`.
pub fn ergodic_check(
    params: &CirParams,
    horizon: f64,
    delta: f64,
    stream: &RngStream,
    opts: &ErgodicOptions,
) -> Result<ErgodicReport> {
    require_regime(params, Regime::Subcritical, "subcritical")?;
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(CirError::InvalidScheme(format!(
            "horizon must be > 0, got {horizon}"
        )));
    }
    if !(0.0..1.0).contains(&opts.burn_in_fraction) {
        return Err(CirError::InvalidScheme(
            "burn_in_fraction must be in [0, 1)".into(),
        ));
    }
    let n = (horizon / delta).round() as usize;
    let scheme = SamplingScheme::new(n, delta)?;
    let path = simulate_path(params, &scheme, &stream.child(EMPIRICAL_LANE, 0));
    let x = path.values();
    let trapezoid = |f: &dyn Fn(f64) -> f64| -> f64 {
        let inner: f64 = x[1..n].iter().map(|&v| f(v)).sum();
        delta * (inner + 0.5 * (f(x[0]) + f(x[n])))
    };
    let t = scheme.horizon();
    let avg_x = trapezoid(&|v| v) / t;
    let avg_inv_x = trapezoid(&|v| 1.0 / v) / t;
    let start = (opts.burn_in_fraction * n as f64).floor() as usize;
    let (tail_mean, tail_var) = mean_and_variance(&x[start..]);
    let (a, b, sigma) = (params.a(), params.b(), params.sigma());
    Ok(ErgodicReport {
        horizon: t,
        delta,
        avg_x,
        target_avg_x: a / b,
        avg_inv_x,
        target_avg_inv_x: b / (a - sigma),
        tail_mean,
        tail_var,
        stationary_mean: a / b,
        stationary_var: a * sigma / (b * b),
        options: *opts,
    })
}

/// `E|main - fd|` for the `a`- and `b`-scores under the transition law from
/// `x` over `dt`, where `fd` is the central-difference score of the exact
/// log-density.
pub fn score_main_term_gap(params: &CirParams, dt: f64, x: f64) -> Result<[f64; 2]> {
    let h_a = default_fd_step(params.a());
    let h_b = default_fd_step(params.b());
    if params.a() - h_a < params.sigma() {
        return Err(CirError::StepLeavesDomain);
    }
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-8,
        ..QuadOptions::default()
    };
    let gap = |pick: fn(&crate::likelihood::ScorePair) -> f64| -> Result<f64> {
        let r = transition_expectation(
            params,
            dt,
            x,
            |y| {
                let main = score_main_term(params, dt, x, y);
                match score_fd(params, dt, x, y, h_a, h_b) {
                    Ok(fd) => (pick(&main) - pick(&fd)).abs(),
                    Err(_) => f64::NAN,
                }
            },
            &opts,
        );
        if r.value.is_finite() {
            Ok(r.value)
        } else {
            Err(CirError::Domain("score gap integral not finite".into()))
        }
    };
    Ok([gap(|s| s.s_a)?, gap(|s| s.s_b)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> CirParams {
        CirParams::new(1.1, 0.5, 0.1, 1.0).unwrap()
    }

    #[test]
    fn zero_direction_is_degenerate_pass() {
        let scheme = SamplingScheme::new(50, 0.02).unwrap();
        let r = lan_check_subcritical(
            &reference(),
            &scheme,
            &LocalAlternative::ZERO,
            200,
            &RngStream::new(1, 0),
            &CheckOptions::default(),
        )
        .unwrap();
        assert_eq!(r.theo_mean, Theoretical::Value(0.0));
        assert_eq!(r.theo_var, Theoretical::Value(0.0));
        assert_eq!((r.emp_mean, r.emp_var, r.ks_stat), (0.0, 0.0, 0.0));
        assert_eq!((r.unit_mean, r.unit_mean_se), (1.0, 0.0));
        assert!(r.pass());
    }

    #[test]
    fn regime_and_size_guards() {
        let scheme = SamplingScheme::new(50, 0.02).unwrap();
        let crit = CirParams::new(1.1, 0.0, 0.1, 1.0).unwrap();
        let z = LocalAlternative::new(0.0, 1.0);
        let s = RngStream::new(1, 0);
        let o = CheckOptions::default();
        assert!(matches!(
            lan_check_subcritical(&crit, &scheme, &z, 200, &s, &o),
            Err(CirError::WrongRegime { .. })
        ));
        assert!(matches!(
            lan_check_subcritical(&reference(), &scheme, &z, 99, &s, &o),
            Err(CirError::TooFewSamples { .. })
        ));
        assert!(matches!(
            lamn_check_supercritical(&crit, &scheme, &z, 200, 200, &s, &o),
            Err(CirError::WrongRegime { .. })
        ));
        assert!(matches!(
            ergodic_check(&crit, 10.0, 0.1, &s, &ErgodicOptions::default()),
            Err(CirError::WrongRegime { .. })
        ));
    }

    #[test]
    fn pass_is_function_of_stored_fields() {
        let scheme = SamplingScheme::new(200, 0.05).unwrap();
        let mut r = lan_check_subcritical(
            &reference(),
            &scheme,
            &LocalAlternative::new(1.0, 1.0),
            200,
            &RngStream::new(3, 0),
            &CheckOptions::default(),
        )
        .unwrap();
        let before = r.pass();
        assert_eq!(before, r.clone().pass());
        r.ks_stat = r.ks_threshold * 2.0;
        assert!(!r.pass());
    }
}
