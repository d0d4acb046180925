use std::path::Path;

use serde_json::{Map, Value};
use sunphase_core::sampling::{random_unit_generator, seeded_rng};
use sunphase_core::superosc::{omega_fd_deviation, SUPEROSC_TOL};
use sunphase_core::{
    aligned_generator, build_gellmann_basis, phase_trace, superoscillation_report, tol, Error,
    NormalizedGenerator, PhaseTrace,
};

use crate::args::{GeneratorKind, SuperoscArgs};
use crate::config::{check_n, PairSource, Tolerances};
use crate::error::{CliError, CliResult};
use crate::report::{fmt, num, nums, Check, Report};

pub fn write_trace_csv(path: &Path, trace: &PhaseTrace) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "re", "im", "omega"])?;
    for ((t, a), w_t) in trace.t.iter().zip(&trace.amplitude).zip(&trace.omega) {
        w.write_record([
            fmt(*t),
            fmt(a.re),
            fmt(a.im),
            w_t.map_or_else(|| "nan".to_string(), fmt),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: &SuperoscArgs) -> CliResult<Report> {
    let n = args.n;
    check_n(n)?;
    if args.samples < 2 {
        return Err(CliError::config("--samples must be at least 2"));
    }
    if !(args.t_max.is_finite() && args.t_max > 0.0) {
        return Err(CliError::config("--t-max must be positive"));
    }
    let tols = Tolerances::new(
        &[
            ("superoscillation_at_zero", SUPEROSC_TOL),
            ("eigenvalue_bound", 1e-9),
            ("fourier_reconstruction", 1e-9),
        ],
        &args.output.tol,
    )?;
    let source = PairSource::from_args(&args.pair, n)?;
    let basis = build_gellmann_basis(n)?;
    let mut rng = seeded_rng(args.seed);
    let pair = source.draw(&mut rng);
    let gen = match args.generator {
        GeneratorKind::Aligned => aligned_generator(&pair, &basis).map_err(|e| match e {
            Error::UndefinedDirection { overlap } => CliError::config(format!(
                "aligned generator undefined: |<f|i>| = {overlap:e} (orthogonal pair)"
            )),
            other => other.into(),
        })?,
        GeneratorKind::Random => NormalizedGenerator::new(random_unit_generator(&mut rng, &basis))?,
    };
    let range = (-args.t_max, args.t_max);
    let rep = superoscillation_report(&pair, &gen, range, args.samples).map_err(|e| match e {
        Error::NearZeroAmplitude { p, .. } => CliError::config(format!(
            "amplitude vanishes at t = 0 (p = {p:e}); local frequency undefined"
        )),
        other => other.into(),
    })?;
    let trace = phase_trace(&pair, &gen, range, args.samples)?;
    if let Some(path) = &args.csv {
        write_trace_csv(path, &trace)?;
    }

    let mut report = Report::new("superosc", Some(args.seed));
    report
        .config("n", Value::from(n))
        .config("pair", Value::from(super::pair_name(&args.pair)))
        .config(
            "generator",
            Value::from(match args.generator {
                GeneratorKind::Aligned => "aligned",
                GeneratorKind::Random => "random",
            }),
        )
        .config("samples", Value::from(args.samples))
        .config("t_range", nums(&[range.0, range.1]))
        .tolerances(&tols);
    super::echo_fixed_pair(&mut report, &source);
    if let Some(path) = &args.csv {
        report.config("csv", Value::from(path.display().to_string()));
    }

    let mut checks = Vec::new();
    if args.generator == GeneratorKind::Aligned {
        checks.push(Check::single(
            "superoscillation_at_zero",
            (rep.max_eigenvalue - rep.omega0).max(0.0),
            tols.get("superoscillation_at_zero"),
        ));
    }
    checks.push(Check::single(
        "eigenvalue_bound",
        (rep.max_eigenvalue - rep.bound).max(0.0),
        tols.get("eigenvalue_bound"),
    ));
    checks.push(Check::single(
        "fourier_reconstruction",
        trace.fourier_residual(),
        tols.get("fourier_reconstruction"),
    ));
    report.checks = checks;
    if rep.boundary {
        report
            .notes
            .push("boundary: omega(0) equals max |l_k| within tolerance".into());
    }

    let spectrum: Vec<Value> = trace
        .eigenvalues
        .iter()
        .zip(&trace.fourier)
        .map(|(l, c)| {
            let mut m = Map::new();
            m.insert("l_k".into(), num(*l));
            m.insert("abs_c_k".into(), num(c.norm()));
            m.insert("c_k".into(), nums(&[c.re, c.im]));
            Value::Object(m)
        })
        .collect();
    let intervals: Vec<Value> = rep.intervals.iter().map(|(a, b)| nums(&[*a, *b])).collect();
    let measure = rep.intervals.iter().fold(0.0, |acc, (a, b)| acc + (b - a));
    let generator: Vec<Value> = basis
        .coefficients(&gen.l)
        .iter()
        .map(|z| num(z.re))
        .collect();
    report
        .diagnostic("omega0", num(rep.omega0))
        .diagnostic("max_abs_eigenvalue", num(rep.max_eigenvalue))
        .diagnostic("bound", num(rep.bound))
        .diagnostic(
            "superoscillatory_at_zero",
            Value::Bool(rep.superoscillatory_at_zero),
        )
        .diagnostic("boundary", Value::Bool(rep.boundary))
        .diagnostic("intervals", Value::Array(intervals))
        .diagnostic("superoscillating_length", num(measure))
        .diagnostic("flagged_samples", Value::from(rep.flagged_samples))
        .diagnostic(
            "omega_fd_deviation",
            num(omega_fd_deviation(&pair, &gen, &trace, tol::FD_STEP)?),
        )
        .diagnostic("generator_coefficients", Value::Array(generator))
        .diagnostic("spectrum", Value::Array(spectrum));
    Ok(report)
}
