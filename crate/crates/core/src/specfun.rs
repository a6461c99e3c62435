//! Log-gamma and the modified Bessel function of the first kind, in log scale.
//!
//! `I_nu(x)` is evaluated through one of three expansions:
//!
//! * the defining power series for `x <= max(30, nu)`;
//! * the Hankel large-argument expansion once `x >= max(30, 4 nu^2)`;
//! * the Debye uniform expansion in between.
//!
//! The Debye sum is written in terms of `w = 1/sqrt(nu^2 + x^2)` and
//! `t = nu w`, so it stays finite as `nu -> 0` and does not divide by the order.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{CirError, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SERIES_MIN_CUTOFF: f64 = 30.0;
const DEBYE_TERMS: usize = 16;

/// Evaluation strategy picked for `(nu, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselRegime {
    SeriesSmallArg,
    AsymptoticLargeArg,
    UniformLargeOrder,
}

pub fn bessel_regime(nu: f64, x: f64) -> BesselRegime {
    if x <= SERIES_MIN_CUTOFF.max(nu) {
        BesselRegime::SeriesSmallArg
    } else if x >= SERIES_MIN_CUTOFF.max(4.0 * nu * nu) {
        BesselRegime::AsymptoticLargeArg
    } else {
        BesselRegime::UniformLargeOrder
    }
}

/// `ln I_nu(x)`. Returns `-inf` for `nu > 0, x = 0`.
pub fn log_bessel_i(nu: f64, x: f64) -> Result<f64> {
    Ok(log_bessel_i_scaled(nu, x)? + x)
}

/// `ln I_nu(x) - x`, the form used by the transition density where the
/// exponential prefactor cancels most of the growth of `I_nu`.
pub fn log_bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    if !(nu >= 0.0) || !(x >= 0.0) || nu.is_infinite() || x.is_infinite() {
        return Err(CirError::Domain(format!(
            "log_bessel_i needs finite nu >= 0 and x >= 0, got nu = {nu}, x = {x}"
        )));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY });
    }
    Ok(match bessel_regime(nu, x) {
        BesselRegime::SeriesSmallArg => series_log(nu, x) - x,
        BesselRegime::AsymptoticLargeArg => hankel_log_scaled(nu, x),
        BesselRegime::UniformLargeOrder => debye_log_scaled(nu, x),
    })
}

fn series_log(nu: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut log_scale = 0.0_f64;
    let mut k = 1.0_f64;
    loop {
        let ratio = q / (k * (k + nu));
        term *= ratio;
        sum += term;
        if ratio < 1.0 && term < sum * 1e-17 {
            break;
        }
        if sum > 1e250 {
            sum *= 1e-250;
            term *= 1e-250;
            log_scale += 250.0 * std::f64::consts::LN_10;
        }
        k += 1.0;
    }
    nu * (0.5 * x).ln() - ln_gamma_unchecked(nu + 1.0) + sum.ln() + log_scale
}

fn hankel_log_scaled(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut prev_abs = f64::INFINITY;
    for k in 1..80 {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) / (8.0 * k as f64 * x);
        let abs = term.abs();
        if abs > prev_abs {
            break;
        }
        sum += term;
        if abs < 1e-17 * sum.abs() {
            break;
        }
        prev_abs = abs;
    }
    -0.5 * (2.0 * PI * x).ln() + sum.ln()
}

fn debye_log_scaled(nu: f64, x: f64) -> f64 {
    let r = nu.hypot(x);
    let w = 1.0 / r;
    let t = nu * w;
    let polys = debye_polys();
    let mut sum = 1.0_f64;
    let mut wk = 1.0_f64;
    for poly in polys.iter().skip(1) {
        wk *= w;
        let term = wk * horner(poly, t);
        sum += term;
        if term.abs() < 1e-17 * sum {
            break;
        }
    }
    // r - x and nu * ln(x / (nu + r)) written to avoid cancellation.
    let r_minus_x = nu * nu / (r + x);
    let log_ratio = if nu == 0.0 {
        0.0
    } else {
        -nu * ((nu + r_minus_x) / x).ln_1p()
    };
    r_minus_x + log_ratio - LN_SQRT_2PI - 0.5 * r.ln() + sum.ln()
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Debye polynomials `u_k(t) / t^k`, coefficients in increasing powers of `t`.
fn debye_polys() -> &'static [Vec<f64>] {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        // u_{k+1}(t) = t^2 (1 - t^2) u_k'(t) / 2 + (1/8) int_0^t (1 - 5 s^2) u_k(s) ds
        let mut u: Vec<f64> = vec![1.0];
        let mut out = vec![vec![1.0]];
        for k in 1..DEBYE_TERMS {
            let mut next = vec![0.0; u.len() + 3];
            for (j, &c) in u.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let jf = j as f64;
                if j > 0 {
                    next[j + 1] += 0.5 * jf * c;
                    next[j + 3] -= 0.5 * jf * c;
                }
                next[j + 1] += c / (8.0 * (jf + 1.0));
                next[j + 3] -= 5.0 * c / (8.0 * (jf + 3.0));
            }
            out.push(next[k..].to_vec());
            u = next;
        }
        out
    })
}

/// `ln Gamma(z)` for `z > 0`.
pub fn log_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || z.is_infinite() {
        return Err(CirError::Domain(format!(
            "log_gamma needs finite z > 0, got {z}"
        )));
    }
    Ok(ln_gamma_unchecked(z))
}

fn ln_gamma_unchecked(z: f64) -> f64 {
    if z.fract() == 0.0 && z <= 23.0 {
        return small_factorial(z as usize - 1).ln();
    }
    if z >= 15.0 {
        return stirling(z);
    }
    let mut prod = 1.0;
    let mut zz = z;
    while zz < 15.0 {
        prod *= zz;
        zz += 1.0;
    }
    stirling(zz) - prod.ln()
}

/// `n!` for `n <= 22`; exact in binary64.
fn small_factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn stirling(z: f64) -> f64 {
    // B_{2k} / (2k (2k - 1))
    const COEFFS: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv * COEFFS.iter().rev().fold(0.0, |acc, &c| acc * inv2 + c);
    let zh = z - 0.5;
    let lz = z.ln();
    let main = zh * lz;
    let main_err = zh.mul_add(lz, -main);
    (main - z) + (main_err + LN_SQRT_2PI + series)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_gamma_reference_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0).unwrap(), 0.0);
        assert!((log_gamma(0.5).unwrap() - 0.5 * PI.ln()).abs() < 1e-15);
        assert!((log_gamma(11.0).unwrap() - 3_628_800f64.ln()).abs() < 1e-14);
        assert!((log_gamma(11.0).unwrap() - 15.104_412_573_075_516).abs() < 1e-13);
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn log_gamma_recurrence() {
        let mut z = 0.013;
        while z < 190.0 {
            let lhs = log_gamma(z + 1.0).unwrap();
            let rhs = log_gamma(z).unwrap() + z.ln();
            assert!((lhs - rhs).abs() < 1e-12, "z = {z}: {lhs} vs {rhs}");
            z *= 1.07;
        }
    }

    #[test]
    fn bessel_special_values() {
        assert_eq!(log_bessel_i(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(log_bessel_i(1.5, 0.0).unwrap(), f64::NEG_INFINITY);
        assert!(log_bessel_i(-0.1, 1.0).is_err());
        assert!(log_bessel_i(1.0, -1.0).is_err());
        let want = ((2.0 / (PI * 2.0)).sqrt() * 2f64.sinh()).ln();
        assert!((log_bessel_i(0.5, 2.0).unwrap() - want).abs() < 1e-14);
        assert!((want - 0.716_002_429_689_468_6).abs() < 1e-14);
    }

    #[test]
    fn half_order_closed_form_in_every_regime() {
        // I_{1/2}(x) = sqrt(2 / (pi x)) sinh x; scaled form avoids overflow.
        for &x in &[0.3, 5.0, 29.0, 31.0, 100.0, 700.0, 5_000.0, 1e6] {
            let want = 0.5 * (2.0 / (PI * x)).ln() + (0.5 * (1.0 - (-2.0 * x).exp())).ln();
            let got = log_bessel_i_scaled(0.5, x).unwrap();
            assert!((got - want).abs() < 1e-13, "x = {x}: {got} vs {want}");
        }
    }

    #[test]
    fn high_order_leading_term() {
        let got = log_bessel_i(10.0, 1.0).unwrap();
        assert!((got - (-22.013_178_577_973_04)).abs() < 1e-12, "{got}");
        let lead = 10.0 * 0.5f64.ln() - log_gamma(11.0).unwrap();
        assert!(got > lead && got - lead < 0.03);
    }

    #[test]
    fn regime_selection() {
        assert_eq!(bessel_regime(10.0, 30.0), BesselRegime::SeriesSmallArg);
        assert_eq!(bessel_regime(100.0, 99.0), BesselRegime::SeriesSmallArg);
        assert_eq!(bessel_regime(10.0, 200.0), BesselRegime::UniformLargeOrder);
        assert_eq!(bessel_regime(10.0, 400.0), BesselRegime::AsymptoticLargeArg);
        assert_eq!(bessel_regime(0.0, 30.5), BesselRegime::AsymptoticLargeArg);
    }

    #[test]
    fn debye_polynomials_match_tables() {
        let p = debye_polys();
        // u_1 = (3t - 5t^3)/24, u_2 = (81t^2 - 462t^4 + 385t^6)/1152
        let want1 = [3.0 / 24.0, 0.0, -5.0 / 24.0];
        let want2 = [81.0 / 1152.0, 0.0, -462.0 / 1152.0, 0.0, 385.0 / 1152.0];
        for (g, w) in p[1].iter().zip(want1.iter()) {
            assert!((g - w).abs() < 1e-15);
        }
        for (g, w) in p[2].iter().zip(want2.iter()) {
            assert!((g - w).abs() < 1e-15);
        }
        assert_eq!(p[3].len(), 7);
    }
}
