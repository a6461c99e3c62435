use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path as FsPath, PathBuf};

use cirlan_core::estimate::{mle_discretized, mle_exact, OptimizerOptions};
use cirlan_core::lanlab::{
    ergodic_check, verify, CheckOptions, ErgodicOptions, LimitLawSpec, Theoretical,
    VerificationReport,
};
use cirlan_core::likelihood::{DensityBranch, TransitionKernel};
use cirlan_core::sim::{simulate_path, simulate_path_euler_symmetrized};
use cirlan_core::{
    check_condition_a, local_rates, perturb, validate_scheme, CirParams, LocalAlternative,
    RatePair, RngStream, SamplingScheme,
};

use crate::cli::{
    Command, DensityArgs, DriftArgs, ErgodicArgs, EstimateArgs, LanArgs, Method, OutputArgs,
    SimulateArgs,
};
use crate::error::CliError;
use crate::report::{format_float, Report};
use crate::series::{parse_series, write_series};

/// Exit code for a completed run whose verification gate failed.
pub const EXIT_VERIFICATION_FAILED: i32 = 5;

pub fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Density(a) => density(a),
        Command::Estimate(a) => estimate(a),
        Command::Lan(a) => lan(a),
        Command::Ergodic(a) => ergodic(a),
    }
}

fn params(d: &DriftArgs, x0: f64) -> Result<CirParams, CliError> {
    Ok(CirParams::new(d.a, d.b, d.sigma, x0)?)
}

fn scheme(n: usize, delta: f64) -> Result<SamplingScheme, CliError> {
    Ok(SamplingScheme::new(n, delta)?)
}

fn is_stdout(p: &Option<PathBuf>) -> bool {
    p.as_deref().is_none_or(|p| p.as_os_str() == "-")
}

fn open_output(p: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match p {
        Some(path) if path.as_os_str() != "-" => {
            let f = File::create(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn io_err(p: &Option<PathBuf>) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |e| {
        let name = p
            .as_ref()
            .map_or("stdout".to_string(), |p| p.display().to_string());
        CliError::io(name, e)
    }
}

/// Write a report to `out.output`.
fn emit_report(report: &Report, out: &OutputArgs) -> Result<(), CliError> {
    let mut w = open_output(&out.output)?;
    w.write_all(report.render(out.json).as_bytes())
        .and_then(|_| w.flush())
        .map_err(io_err(&out.output))
}

/// Summary of a command whose main output is a data file: stdout when the
/// data went to a file, stderr otherwise.
fn emit_side_report(report: &Report, out: &OutputArgs) -> Result<(), CliError> {
    let text = report.render(out.json);
    if is_stdout(&out.output) {
        io::stderr().write_all(text.as_bytes())
    } else {
        io::stdout().write_all(text.as_bytes())
    }
    .map_err(|e| CliError::io("report", e))
}

fn simulate(args: SimulateArgs) -> Result<i32, CliError> {
    let p = params(&args.drift, args.x0)?;
    let s = scheme(args.n, args.delta)?;
    let stream = RngStream::new(args.seed.seed, args.seed.stream);
    let path = match args.method {
        Method::Exact => simulate_path(&p, &s, &stream),
        Method::Euler => simulate_path_euler_symmetrized(&p, &s, args.substeps, &stream)?,
    };
    let w = open_output(&args.out.output)?;
    write_series(w, &path).map_err(io_err(&args.out.output))?;
    if !is_stdout(&args.out.output) {
        let mut r = Report::new();
        r.push("command", "simulate")
            .push("regime", p.regime().to_string())
            .push("rows", path.values().len())
            .push(
                "x_min",
                path.values().iter().copied().fold(f64::INFINITY, f64::min),
            )
            .push("x_last", *path.values().last().expect("non-empty"));
        emit_side_report(&r, &args.out)?;
    }
    Ok(0)
}

fn density(args: DensityArgs) -> Result<i32, CliError> {
    let p = params(&args.drift, args.x)?;
    if !(args.dt > 0.0) {
        return Err(CliError::Domain(format!("dt must be > 0, got {}", args.dt)));
    }
    if args.points < 2 {
        return Err(CliError::Config("points must be >= 2".into()));
    }
    let branch = if args.force_critical {
        DensityBranch::Critical
    } else {
        DensityBranch::Auto
    };
    let kernel = TransitionKernel::with_branch(&p, args.dt, branch);
    let tc = *kernel.constants();
    let (mean, sd) = (tc.mean(args.x), tc.variance(args.x).sqrt());
    let lo = args
        .y_min
        .unwrap_or_else(|| (mean - args.sds * sd).max(1e-3 * sd.min(mean)));
    let hi = args.y_max.unwrap_or(mean + args.sds * sd);
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(CliError::Domain(format!(
            "grid needs 0 < y_min < y_max, got [{lo}, {hi}]"
        )));
    }
    let step = (hi - lo) / (args.points - 1) as f64;
    let mut w = open_output(&args.out.output)?;
    let mut mass = 0.0;
    let mut prev: Option<f64> = None;
    let write = |w: &mut Box<dyn Write>, y: f64, lp: f64, pv: f64| -> io::Result<()> {
        writeln!(
            w,
            "{},{},{}",
            format_float(y),
            format_float(lp),
            format_float(pv)
        )
    };
    writeln!(w, "y,log_p,p").map_err(io_err(&args.out.output))?;
    for k in 0..args.points {
        let y = if k + 1 == args.points {
            hi
        } else {
            lo + k as f64 * step
        };
        let lp = kernel.log_density(args.x, y);
        let pv = lp.exp();
        if let Some(q) = prev {
            mass += 0.5 * step * (q + pv);
        }
        prev = Some(pv);
        write(&mut w, y, lp, pv).map_err(io_err(&args.out.output))?;
    }
    w.flush().map_err(io_err(&args.out.output))?;
    let mut r = Report::new();
    r.push("command", "density")
        .push(
            "branch",
            if args.force_critical {
                "critical"
            } else {
                "auto"
            },
        )
        .push("y_min", lo)
        .push("y_max", hi)
        .push("points", args.points)
        .push("mean", mean)
        .push("sd", sd)
        .push("trapezoid_mass", mass);
    emit_side_report(&r, &args.out)?;
    Ok(0)
}

fn read_series(path: &FsPath) -> Result<cirlan_core::Path, CliError> {
    let f = File::open(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    parse_series(io::BufReader::new(f))
}

fn estimate(args: EstimateArgs) -> Result<i32, CliError> {
    if !(args.sigma > 0.0) {
        return Err(CliError::Domain(format!(
            "sigma must be > 0, got {}",
            args.sigma
        )));
    }
    let path = read_series(&args.input)?;
    let d = mle_discretized(&path, args.sigma)?;
    let mut r = Report::new();
    r.push("command", "estimate")
        .push("rows", path.values().len())
        .push("t0", path.t0())
        .push("delta", path.delta())
        .push("sigma", args.sigma)
        .push("a_hat", d.a_hat)
        .push("b_hat", d.b_hat)
        .push("converged", d.converged)
        .push("projected", d.projected)
        .push("loglik", d.loglik_at_optimum);
    if args.exact {
        let opts = OptimizerOptions {
            xtol: args.xtol,
            max_iter: args.max_iter,
            initial_step: None,
        };
        let e = mle_exact(&path, args.sigma, (d.a_hat, d.b_hat), &opts)?;
        r.push("exact_a_hat", e.a_hat)
            .push("exact_b_hat", e.b_hat)
            .push("exact_converged", e.converged)
            .push("exact_iterations", e.iterations)
            .push("exact_loglik", e.loglik_at_optimum)
            .push("abs_diff_a", (e.a_hat - d.a_hat).abs())
            .push("abs_diff_b", (e.b_hat - d.b_hat).abs());
    }
    emit_report(&r, &args.out)?;
    Ok(0)
}

fn theoretical(t: Theoretical) -> crate::report::Field {
    match t {
        Theoretical::Value(v) => v.into(),
        Theoretical::Simulated => "simulated".into(),
    }
}

fn lan_report(v: &VerificationReport, p1: &CirParams, warnings: &[String]) -> Report {
    let mut r = Report::new();
    r.push("command", "lan")
        .push("regime", v.regime.to_string())
        .push("u", v.z.u)
        .push("v", v.z.v)
        .push("phi1", v.rates.phi1)
        .push("phi2", v.rates.phi2)
        .push("a_n", p1.a())
        .push("b_n", p1.b())
        .push("m", v.m)
        .push("m_limit", v.m_limit)
        .push("emp_mean", v.emp_mean)
        .push("emp_mean_se", v.emp_mean_se)
        .push("emp_var", v.emp_var)
        .push("emp_var_se", v.emp_var_se)
        .push("theo_mean", theoretical(v.theo_mean))
        .push("theo_var", theoretical(v.theo_var))
        .push_opt("var_rel_dev", v.var_rel_dev())
        .push("ks_stat", v.ks_stat)
        .push("ks_threshold", v.ks_threshold)
        .push("unit_mean", v.unit_mean)
        .push("unit_mean_se", v.unit_mean_se)
        .push_opt("mean_ok", v.mean_ok())
        .push_opt("var_ok", v.var_ok())
        .push("ks_ok", v.ks_ok())
        .push_opt("unit_mean_ok", v.unit_mean_ok())
        .push("warnings", warnings.len());
    for (i, w) in warnings.iter().enumerate() {
        r.push(&format!("warning_{i}"), w.as_str());
    }
    r.push("pass", v.pass());
    r
}

fn lan(args: LanArgs) -> Result<i32, CliError> {
    let p0 = params(&args.drift, args.x0)?;
    let s = scheme(args.n, args.delta)?;
    let z = LocalAlternative::new(args.u, args.v);
    let rates = if args.phi1.is_some() || args.phi2.is_some() {
        let base = local_rates(&p0, &s)?;
        Some(
            RatePair::new(
                args.phi1.unwrap_or(base.phi1),
                args.phi2.unwrap_or(base.phi2),
            )
            .map_err(|e| CliError::Config(e.to_string()))?,
        )
    } else {
        None
    };
    let opts = CheckOptions {
        rates,
        substeps: args.substeps,
        ks_constant: args.ks_constant,
        unit_mean_max_var: args.unit_mean_max_var,
        ..CheckOptions::default()
    };
    let mut warnings: Vec<String> = validate_scheme(&p0, &s, args.warn_tol)
        .iter()
        .map(ToString::to_string)
        .collect();
    if !check_condition_a(&p0) {
        warnings.push(format!(
            "a/sigma = {} violates condition (A)",
            p0.a() / p0.sigma()
        ));
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let stream = RngStream::new(args.seed.seed, args.seed.stream);
    let spec = LimitLawSpec::new(p0, z);
    let report = verify(&spec, &s, args.m, args.m_limit, &stream, &opts)?;
    let p1 = perturb(&p0, &report.rates, &z)?;
    if let Some(dump) = &args.dump {
        let target = Some(dump.clone());
        let mut w = open_output(&target)?;
        let mut rows = String::from("source,index,loglr\n");
        for (src, xs) in [
            ("empirical", &report.samples),
            ("limit", &report.limit_samples),
        ] {
            for (i, x) in xs.iter().enumerate() {
                rows.push_str(&format!("{src},{i},{}\n", format_float(*x)));
            }
        }
        w.write_all(rows.as_bytes())
            .and_then(|_| w.flush())
            .map_err(io_err(&target))?;
    }
    emit_report(&lan_report(&report, &p1, &warnings), &args.out)?;
    Ok(if report.pass() {
        0
    } else {
        EXIT_VERIFICATION_FAILED
    })
}

fn ergodic(args: ErgodicArgs) -> Result<i32, CliError> {
    let p = params(&args.drift, args.x0)?;
    let opts = ErgodicOptions {
        avg_tol: args.avg_tol,
        var_tol: args.var_tol,
        burn_in_fraction: args.burn_in,
    };
    let stream = RngStream::new(args.seed.seed, args.seed.stream);
    let e = ergodic_check(&p, args.horizon, args.delta, &stream, &opts)?;
    let mut r = Report::new();
    r.push("command", "ergodic")
        .push("horizon", e.horizon)
        .push("delta", e.delta)
        .push("avg_x", e.avg_x)
        .push("target_avg_x", e.target_avg_x)
        .push("rel_dev_avg_x", e.rel_dev_avg_x())
        .push("avg_inv_x", e.avg_inv_x)
        .push("target_avg_inv_x", e.target_avg_inv_x)
        .push("rel_dev_avg_inv_x", e.rel_dev_avg_inv_x())
        .push("tail_mean", e.tail_mean)
        .push("stationary_mean", e.stationary_mean)
        .push("rel_dev_tail_mean", e.rel_dev_tail_mean())
        .push("tail_var", e.tail_var)
        .push("stationary_var", e.stationary_var)
        .push("rel_dev_tail_var", e.rel_dev_tail_var())
        .push("pass", e.pass());
    emit_report(&r, &args.out)?;
    Ok(if e.pass() {
        0
    } else {
        EXIT_VERIFICATION_FAILED
    })
}
