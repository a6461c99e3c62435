//! Path and limit-law simulation.
//!
//! Transitions are drawn exactly from the Poisson mixture of Gamma laws:
//! given `X_s = x`, `X_{s+dt} = c * Gamma(a/sigma + K)` with
//! `K ~ Poisson(lambda/2)`, `lambda = 2 x exp(-b dt) / c` and
//! `c = sigma (1 - exp(-b dt)) / b`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};

use crate::error::{CirError, Result};
use crate::likelihood::fisher_info_subcritical;
use crate::model::{CirParams, LocalAlternative, Regime, SamplingScheme};

/// Below this `|b| * dt` the critical (`b = 0`) formulas are used.
pub const NEAR_CRITICAL_BAND: f64 = 1e-10;

/// Default number of grid steps for the auxiliary limit processes.
pub const DEFAULT_LIMIT_SUBSTEPS: usize = 256;

/// Offsets separating independent families of streams derived from one base.
pub const EMPIRICAL_LANE: u64 = 0;
pub const LIMIT_LANE: u64 = 1 << 48;
pub const AUX_LANE: u64 = 2 << 48;

pub type StreamRng = ChaCha8Rng;

/// A reproducible random stream keyed by `(seed, stream_id)`.
///
/// Distinct stream ids map to distinct ChaCha streams under the same key, so
/// per-path streams can be consumed in any order or on any thread.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn generator(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Stream `index` within `lane`. Children of different parents live under
    /// different keys, so they never share draws.
    pub fn child(&self, lane: u64, index: u64) -> RngStream {
        RngStream {
            seed: splitmix64(splitmix64(self.seed) ^ self.stream_id),
            stream_id: lane.wrapping_add(index),
        }
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A discretely observed trajectory on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    t0: f64,
    delta: f64,
    values: Vec<f64>,
}

impl Path {
    pub fn new(t0: f64, delta: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(CirError::Domain(format!(
                "a path needs at least 2 observations, got {}",
                values.len()
            )));
        }
        if !(delta > 0.0 && delta.is_finite()) || !t0.is_finite() {
            return Err(CirError::Domain(format!(
                "invalid grid t0 = {t0}, delta = {delta}"
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(CirError::Domain(format!(
                "path value {v} at index {i} is not strictly positive"
            )));
        }
        Ok(Self { t0, delta, values })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |k| self.t0 + k as f64 * self.delta)
    }

    /// Sub-path over observation indices `start..=end`.
    pub fn segment(&self, start: usize, end: usize) -> Result<Path> {
        if end <= start || end >= self.values.len() {
            return Err(CirError::Domain(format!(
                "segment {start}..={end} out of range for {} observations",
                self.values.len()
            )));
        }
        Path::new(
            self.t0 + start as f64 * self.delta,
            self.delta,
            self.values[start..=end].to_vec(),
        )
    }

    pub fn shifted(&self, t0: f64) -> Path {
        Path { t0, ..self.clone() }
    }
}

/// Scale `c`, decay `exp(-b dt)` and shape `a / sigma` of the transition law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionConstants {
    pub c: f64,
    pub decay: f64,
    pub shape: f64,
}

impl TransitionConstants {
    /// Non-centrality `2 x exp(-b dt) / c`.
    pub fn lambda(&self, x: f64) -> f64 {
        2.0 * x * self.decay / self.c
    }

    pub fn mean(&self, x: f64) -> f64 {
        x * self.decay + self.c * self.shape
    }

    pub fn variance(&self, x: f64) -> f64 {
        self.c * self.c * (self.shape + self.lambda(x))
    }
}

pub fn transition_constants(params: &CirParams, dt: f64) -> TransitionConstants {
    let b = params.b();
    let sigma = params.sigma();
    let shape = params.a() / sigma;
    if (b * dt).abs() < NEAR_CRITICAL_BAND {
        TransitionConstants {
            c: sigma * dt,
            decay: 1.0,
            shape,
        }
    } else {
        TransitionConstants {
            c: -sigma * (-b * dt).exp_m1() / b,
            decay: (-b * dt).exp(),
            shape,
        }
    }
}

/// One exact draw of `X_{s+dt}` given `X_s = x` (`x = 0` allowed).
pub fn exact_transition_sample<R: Rng + ?Sized>(
    params: &CirParams,
    x: f64,
    dt: f64,
    rng: &mut R,
) -> f64 {
    sample_with_constants(&transition_constants(params, dt), x, rng)
}

fn sample_with_constants<R: Rng + ?Sized>(tc: &TransitionConstants, x: f64, rng: &mut R) -> f64 {
    let half_lambda = 0.5 * tc.lambda(x);
    let k = if half_lambda > 0.0 {
        let poisson = Poisson::new(half_lambda).expect("finite positive Poisson mean");
        poisson.sample(rng)
    } else {
        0.0
    };
    let gamma = Gamma::new(tc.shape + k, tc.c).expect("positive Gamma parameters");
    let y: f64 = gamma.sample(rng);
    if y > 0.0 {
        y
    } else {
        f64::MIN_POSITIVE
    }
}

/// Exact simulation of `x0, X_delta, ..., X_{n delta}` from `params.x0()`.
pub fn simulate_path(params: &CirParams, scheme: &SamplingScheme, stream: &RngStream) -> Path {
    simulate_values(params, scheme.n(), scheme.delta(), &mut stream.generator())
}

/// Same as [`simulate_path`] with an externally owned generator.
pub fn simulate_values<R: Rng + ?Sized>(
    params: &CirParams,
    n: usize,
    delta: f64,
    rng: &mut R,
) -> Path {
    let tc = transition_constants(params, delta);
    let mut values = Vec::with_capacity(n + 1);
    let mut x = params.x0();
    values.push(x);
    for _ in 0..n {
        x = sample_with_constants(&tc, x, rng);
        values.push(x);
    }
    Path {
        t0: 0.0,
        delta,
        values,
    }
}

/// Symmetrized Euler scheme `x <- |x + (a - b x) h + sqrt(2 sigma x h) xi|` on a
/// sub-grid of `substeps` steps per observation. Exact zeros are replaced by
/// the smallest positive double so the path stays in the density's domain.
pub fn simulate_path_euler_symmetrized(
    params: &CirParams,
    scheme: &SamplingScheme,
    substeps: usize,
    stream: &RngStream,
) -> Result<Path> {
    if substeps == 0 {
        return Err(CirError::InvalidScheme("substeps must be >= 1".into()));
    }
    let mut rng = stream.generator();
    let (a, b, sigma) = (params.a(), params.b(), params.sigma());
    let h = scheme.delta() / substeps as f64;
    let sqrt_h = h.sqrt();
    let mut x = params.x0();
    let mut values = Vec::with_capacity(scheme.n() + 1);
    values.push(x);
    for _ in 0..scheme.n() {
        for _ in 0..substeps {
            let xi: f64 = rng.sample(StandardNormal);
            x = (x + (a - b * x) * h + (2.0 * sigma * x.max(0.0)).sqrt() * sqrt_h * xi).abs();
        }
        values.push(if x > 0.0 { x } else { f64::from_bits(1) });
    }
    Ok(Path {
        t0: 0.0,
        delta: scheme.delta(),
        values,
    })
}

/// `(R_1, int_0^1 R ds)` for `dR = a dt + sqrt(2 sigma R) dB`, `R_0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalLimitDraw {
    pub r1: f64,
    pub int_r: f64,
}

/// `R` started at `x0` with the same dynamics, run to `T = -1/b0`, and the
/// statistic `V = ln R_T - ln x0 - (a0 - sigma) int_0^T R ds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupercriticalLimitDraw {
    pub r_end: f64,
    pub int_r: f64,
    pub v_stat: f64,
    pub z1: f64,
}

impl SupercriticalLimitDraw {
    pub fn new(r_end: f64, int_r: f64, z1: f64, params0: &CirParams) -> Self {
        let v_stat = r_end.ln() - params0.x0().ln() - (params0.a() - params0.sigma()) * int_r;
        Self {
            r_end,
            int_r,
            v_stat,
            z1,
        }
    }
}

/// Regime-specific random inputs of the limit log-likelihood ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitDraw {
    Critical { g: f64, draw: CriticalLimitDraw },
    Supercritical(SupercriticalLimitDraw),
}

/// Exact skeleton of a driftless-reversion (`b = 0`) CIR path with trapezoid
/// integral. Returns `(endpoint, integral)`.
fn driftless_skeleton<R: Rng + ?Sized>(
    params0: &CirParams,
    start: f64,
    horizon: f64,
    steps: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let critical = CirParams::new(params0.a(), 0.0, params0.sigma(), params0.x0())?;
    let h = horizon / steps as f64;
    let tc = transition_constants(&critical, h);
    let mut x = start;
    let mut acc = 0.5 * x;
    for k in 0..steps {
        x = sample_with_constants(&tc, x, rng);
        acc += if k + 1 == steps { 0.5 * x } else { x };
    }
    Ok((x, acc * h))
}

pub fn simulate_critical_limit<R: Rng + ?Sized>(
    params0: &CirParams,
    substeps: usize,
    rng: &mut R,
) -> Result<CriticalLimitDraw> {
    if substeps < 2 {
        return Err(CirError::InvalidScheme(
            "limit substeps must be >= 2".into(),
        ));
    }
    let (r1, int_r) = driftless_skeleton(params0, 0.0, 1.0, substeps, rng)?;
    Ok(CriticalLimitDraw { r1, int_r })
}

pub fn simulate_supercritical_limit<R: Rng + ?Sized>(
    params0: &CirParams,
    substeps: usize,
    rng: &mut R,
) -> Result<SupercriticalLimitDraw> {
    if params0.regime() != Regime::Supercritical {
        return Err(CirError::WrongRegime {
            expected: "supercritical",
            actual: params0.regime(),
        });
    }
    if substeps < 2 {
        return Err(CirError::InvalidScheme(
            "limit substeps must be >= 2".into(),
        ));
    }
    let horizon = -1.0 / params0.b();
    let (r_end, int_r) = driftless_skeleton(params0, params0.x0(), horizon, substeps, rng)?;
    let z1: f64 = rng.sample(StandardNormal);
    Ok(SupercriticalLimitDraw::new(r_end, int_r, z1, params0))
}

/// One draw of `z'U - z'Iz/2` for the regime of `params0`.
///
/// The subcritical limit is Gaussian with deterministic information and is
/// drawn from `rng`; the other regimes consume the supplied `draw`.
pub fn sample_limit_loglr<R: Rng + ?Sized>(
    params0: &CirParams,
    z: &LocalAlternative,
    draw: Option<&LimitDraw>,
    rng: &mut R,
) -> Result<f64> {
    let sigma = params0.sigma();
    let a0 = params0.a();
    let (u, v) = (z.u, z.v);
    match params0.regime() {
        Regime::Subcritical => {
            let info = fisher_info_subcritical(params0)?;
            let q = info.quadratic_form(u, v);
            let g: f64 = rng.sample(StandardNormal);
            if q == 0.0 {
                return Ok(0.0);
            }
            Ok(-0.5 * q + q.sqrt() * g)
        }
        Regime::Critical => match draw {
            Some(LimitDraw::Critical { g, draw }) => {
                let ia = 1.0 / (2.0 * sigma * (a0 - sigma));
                Ok(u * g * ia.sqrt() + v * (a0 - draw.r1) / (2.0 * sigma)
                    - 0.5 * (u * u * ia + v * v * draw.int_r / (2.0 * sigma)))
            }
            _ => Err(CirError::MissingDraw(Regime::Critical)),
        },
        Regime::Supercritical => match draw {
            Some(LimitDraw::Supercritical(d)) => {
                let b0 = params0.b();
                let ib = -d.r_end / b0;
                Ok(
                    u * d.v_stat / (2.0 * sigma) + v * (ib / (2.0 * sigma)).sqrt() * d.z1
                        - 0.5 * (u * u * d.int_r / (2.0 * sigma) + v * v * ib / (2.0 * sigma)),
                )
            }
            _ => Err(CirError::MissingDraw(Regime::Supercritical)),
        },
    }
}
