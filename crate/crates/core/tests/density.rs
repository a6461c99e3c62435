use cirlan_core::likelihood::{
    default_fd_step, fisher_info_subcritical, log_transition_density, loglr, path_loglik, score_fd,
    score_main_term, transition_breakpoints, transition_expectation, TransitionKernel,
};
use cirlan_core::quad::{integrate_with_breaks, QuadOptions};
use cirlan_core::sim::{simulate_path, transition_constants};
use cirlan_core::{CirParams, Path, RngStream, SamplingScheme};
use proptest::prelude::*;

fn regimes() -> [(&'static str, CirParams); 3] {
    [
        ("subcritical", CirParams::new(1.1, 0.5, 0.1, 1.0).unwrap()),
        ("critical", CirParams::new(1.1, 0.0, 0.1, 1.0).unwrap()),
        (
            "supercritical",
            CirParams::new(1.1, -0.5, 0.1, 1.0).unwrap(),
        ),
    ]
}

#[test]
fn normalization_on_grid() {
    let opts = QuadOptions::default();
    for (name, p) in regimes() {
        for &dt in &[0.01, 0.1, 1.0] {
            for &x in &[0.1, 1.0, 5.0] {
                let r = transition_expectation(&p, dt, x, |_| 1.0, &opts);
                assert!(r.converged, "{name} dt={dt} x={x}: {r:?}");
                assert!(
                    (r.value - 1.0).abs() < 1e-8,
                    "{name} dt={dt} x={x}: mass {}",
                    r.value
                );
            }
        }
    }
}

#[test]
fn conditional_mean_and_variance() {
    let opts = QuadOptions::default();
    for (name, p) in regimes() {
        for &dt in &[0.01, 0.1, 1.0] {
            let x = 1.0;
            let tc = transition_constants(&p, dt);
            let b = p.b();
            let want = if b == 0.0 {
                x + p.a() * dt
            } else {
                x * (-b * dt).exp() + p.a() / b * (-(-b * dt).exp_m1())
            };
            let m = transition_expectation(&p, dt, x, |y| y, &opts).value;
            assert!((m - want).abs() < 1e-7, "{name} dt={dt}: {m} vs {want}");
            let v = transition_expectation(&p, dt, x, |y| (y - want) * (y - want), &opts).value;
            assert!(
                (v - tc.variance(x)).abs() < 1e-7 * tc.variance(x).max(1.0),
                "{name} dt={dt}: {v}"
            );
        }
    }
}

#[test]
fn chapman_kolmogorov() {
    let opts = QuadOptions::default();
    for (name, p) in regimes() {
        let (s, t, x) = (0.05, 0.05, 1.0);
        let k = TransitionKernel::new(&p, s);
        let pts = transition_breakpoints(&p, s, x);
        for &y in &[0.8, 1.0, 1.3] {
            let r = integrate_with_breaks(
                |z| {
                    if z <= 0.0 {
                        0.0
                    } else {
                        (k.log_density(x, z) + k.log_density(z, y)).exp()
                    }
                },
                &pts,
                &opts,
            );
            let want = log_transition_density(&p, s + t, x, y).unwrap().exp();
            assert!(
                (r.value - want).abs() < 1e-6 * want,
                "{name} y={y}: {} vs {want}",
                r.value
            );
        }
    }
}

#[test]
fn continuity_through_critical_point() {
    let (x, y, dt) = (1.0, 1.05, 0.1);
    let crit =
        log_transition_density(&CirParams::new(1.1, 0.0, 0.1, 1.0).unwrap(), dt, x, y).unwrap();
    for b in [1e-8, -1e-8, 1e-12, -1e-12] {
        let p = CirParams::new(1.1, b, 0.1, 1.0).unwrap();
        let v = log_transition_density(&p, dt, x, y).unwrap();
        assert!((v - crit).abs() < 1e-6, "b={b}: {v} vs {crit}");
    }
}

#[test]
fn scale_constant_relative_accuracy_near_zero_drift() {
    // c = sigma (1 - e^{-b t}) / b; compare with a series oracle.
    for &bt in &[1e-4, 3e-6, -2e-5, 1e-9, -7e-8] {
        let dt = 0.5;
        let b = bt / dt;
        let p = CirParams::new(1.1, b, 0.1, 1.0).unwrap();
        let c = transition_constants(&p, dt).c;
        // (1 - e^{-u}) / u = 1 - u/2 + u^2/6 - u^3/24 + u^4/120
        let u: f64 = bt;
        let ratio = 1.0 - u / 2.0 + u * u / 6.0 - u.powi(3) / 24.0 + u.powi(4) / 120.0;
        let want = 0.1 * dt * ratio;
        assert!(((c - want) / want).abs() < 1e-14, "bt={bt}: {c} vs {want}");
    }
}

fn sample_path(p: &CirParams, n: usize, delta: f64, id: u64) -> Path {
    simulate_path(
        p,
        &SamplingScheme::new(n, delta).unwrap(),
        &RngStream::new(11, id),
    )
}

#[test]
fn path_loglik_structure() {
    let p = regimes()[0].1;
    let one = Path::new(0.0, 0.1, vec![1.0, 1.07]).unwrap();
    assert_eq!(
        path_loglik(&p, &one).unwrap(),
        log_transition_density(&p, 0.1, 1.0, 1.07).unwrap()
    );

    let path = sample_path(&p, 400, 0.05, 0);
    let whole = path_loglik(&p, &path).unwrap();
    let first = path_loglik(&p, &path.segment(0, 200).unwrap()).unwrap();
    let second = path_loglik(&p, &path.segment(200, 400).unwrap()).unwrap();
    assert!((whole - first - second).abs() < 1e-9 * whole.abs());
}

#[test]
fn loglr_identities() {
    let p0 = CirParams::new(1.1, 0.5, 0.1, 1.0).unwrap();
    let p1 = p0.with_drift(1.2, 0.6).unwrap();
    let p2 = p0.with_drift(1.05, 0.45).unwrap();
    let path = sample_path(&p0, 1000, 0.02, 1);
    assert_eq!(loglr(&p0, &p0, &path).unwrap(), 0.0);
    let l01 = loglr(&p0, &p1, &path).unwrap();
    assert_eq!(l01, -loglr(&p1, &p0, &path).unwrap());
    let chain = l01 + loglr(&p1, &p2, &path).unwrap();
    let direct = loglr(&p0, &p2, &path).unwrap();
    assert!(
        (chain - direct).abs() <= 1e-10 * direct.abs().max(1.0),
        "{chain} vs {direct}"
    );
    let other_sigma = CirParams::new(1.1, 0.5, 0.11, 1.0).unwrap();
    assert!(loglr(&p0, &other_sigma, &path).is_err());
}

#[test]
fn true_parameters_have_higher_average_likelihood() {
    let p = CirParams::new(1.1, 0.5, 0.1, 1.0).unwrap();
    let wrong = p.with_drift(1.4, 0.8).unwrap();
    let (mut good, mut bad) = (0.0, 0.0);
    for i in 0..200 {
        let path = sample_path(&p, 200, 0.05, 100 + i);
        good += path_loglik(&p, &path).unwrap();
        bad += path_loglik(&wrong, &path).unwrap();
    }
    assert!(good > bad, "{good} vs {bad}");
}

#[test]
fn score_main_term_examples() {
    let p = CirParams::new(1.1, 0.5, 0.1, 1.0).unwrap();
    let s = score_main_term(&p, 0.01, 1.0, 1.0 + 0.6 * 0.01);
    assert!(s.s_a.abs() < 1e-15 && s.s_b.abs() < 1e-15);
    let s = score_main_term(&p, 0.01, 1.0, 1.01);
    assert!((s.s_a - 0.02).abs() < 1e-13 && (s.s_b + 0.02).abs() < 1e-13);
}

#[test]
fn score_main_term_mean_vanishes_with_dt() {
    let p = CirParams::new(1.1, 0.5, 0.1, 1.0).unwrap();
    let opts = QuadOptions::default();
    let at = |dt: f64| {
        transition_expectation(&p, dt, 1.0, |y| score_main_term(&p, dt, 1.0, y).s_a, &opts).value
    };
    let (m1, m2) = (at(0.01), at(0.005));
    assert!(m1.abs() < 5e-3, "{m1}");
    assert!(m2.abs() <= 0.5 * m1.abs(), "{m2} vs {m1}");
}

#[test]
fn score_fd_has_zero_conditional_mean() {
    let opts = QuadOptions::default();
    for (name, p) in regimes() {
        let (ha, hb) = (default_fd_step(p.a()), default_fd_step(p.b()));
        for &dt in &[0.01, 0.1] {
            let ea = transition_expectation(
                &p,
                dt,
                1.0,
                |y| score_fd(&p, dt, 1.0, y, ha, hb).unwrap().s_a,
                &opts,
            );
            let eb = transition_expectation(
                &p,
                dt,
                1.0,
                |y| score_fd(&p, dt, 1.0, y, ha, hb).unwrap().s_b,
                &opts,
            );
            assert!(
                ea.value.abs() < 1e-6 && eb.value.abs() < 1e-6,
                "{name} dt={dt}: {} {}",
                ea.value,
                eb.value
            );
        }
    }
}

#[test]
fn score_fd_step_stability() {
    let p = CirParams::new(1.1, 0.5, 0.1, 1.0).unwrap();
    let s1 = score_fd(&p, 0.1, 1.0, 1.05, 1e-4, 1e-4).unwrap();
    let s2 = score_fd(&p, 0.1, 1.0, 1.05, 5e-5, 5e-5).unwrap();
    assert!((s1.s_b - s2.s_b).abs() < 1e-6, "{} vs {}", s1.s_b, s2.s_b);
    assert!((s1.s_a - s2.s_a).abs() < 1e-6, "{} vs {}", s1.s_a, s2.s_a);
    let edge = CirParams::new(0.10001, 0.5, 0.1, 1.0).unwrap();
    assert!(score_fd(&edge, 0.1, 1.0, 1.05, 1e-4, 1e-4).is_err());
}

#[test]
fn score_gap_shrinks_with_dt() {
    let p = CirParams::new(1.1, 0.5, 0.1, 1.0).unwrap();
    let g4 = cirlan_core::lanlab::score_main_term_gap(&p, 0.04, 1.0).unwrap();
    let g1 = cirlan_core::lanlab::score_main_term_gap(&p, 0.01, 1.0).unwrap();
    for i in 0..2 {
        assert!(
            g4[i] >= 1.5 * g1[i],
            "component {i}: {} vs {}",
            g4[i],
            g1[i]
        );
    }
}

#[test]
fn domain_errors() {
    let p = regimes()[0].1;
    assert!(log_transition_density(&p, 0.0, 1.0, 1.0).is_err());
    assert!(log_transition_density(&p, 0.1, 0.0, 1.0).is_err());
    assert!(log_transition_density(&p, 0.1, 1.0, -1.0).is_err());
}

proptest! {
    #[test]
    fn fisher_is_symmetric_positive_definite(a in 0.11f64..20.0, b in 1e-3f64..10.0) {
        let p = CirParams::new(a, b, 0.1, 1.0).unwrap();
        let f = fisher_info_subcritical(&p).unwrap();
        prop_assert!(f.is_positive_definite());
        let det = 1.0 / (4.0 * 0.01) * 0.1 / (a - 0.1);
        prop_assert!((f.determinant() - det).abs() <= 1e-9 * det);
        prop_assert_eq!(f.i_ab, -5.0);
    }

    #[test]
    fn density_is_finite_and_bounded(x in 0.05f64..10.0, y in 0.05f64..10.0, dt in 1e-3f64..1.0, b in -2.0f64..2.0) {
        let p = CirParams::new(1.1, b, 0.1, 1.0).unwrap();
        let v = log_transition_density(&p, dt, x, y).unwrap();
        prop_assert!(v.is_finite() || v == f64::NEG_INFINITY);
        prop_assert!(v < 50.0);
    }
}
