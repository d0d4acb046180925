use std::f64::consts::{FRAC_PI_2, PI};

use serde_json::Value;
use sunphase_core::sampling::seeded_rng;
use sunphase_core::{vortex_winding, Error};

use crate::args::{ChartKind, LoopKind, VortexArgs};
use crate::commands::surel::{chart_for, chart_name};
use crate::config::{check_n, PairSource, Tolerances};
use crate::error::{CliError, CliResult};
use crate::report::{num, nums, Check, Report};

fn parse_list<T: std::str::FromStr>(text: &str, flag: &str) -> CliResult<Vec<T>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::config(format!("--{flag}: cannot parse '{t}'")))
        })
        .collect()
}

/// Closed path: `segments + 1` points, last equal to the first group element.
fn build_path(args: &VortexArgs, dim: usize) -> CliResult<Vec<Vec<f64>>> {
    if args.segments < 2 {
        return Err(CliError::config("--segments must be at least 2"));
    }
    let s = args.segments;
    let angles = (0..=s).map(|k| 2.0 * PI * k as f64 / s as f64);
    let mut path: Vec<Vec<f64>> = match args.loop_kind {
        LoopKind::Phi => {
            if args.chart != ChartKind::Su2Polar {
                return Err(CliError::config("--loop phi needs --chart su2-polar"));
            }
            angles.map(|phi| vec![args.chi, args.theta, phi]).collect()
        }
        LoopKind::Circle => {
            let center: Vec<f64> = match &args.center {
                Some(text) => parse_list(text, "center")?,
                None if args.chart == ChartKind::Su2Polar => vec![FRAC_PI_2, FRAC_PI_2, 0.0],
                None => vec![0.0; dim],
            };
            if center.len() != dim {
                return Err(CliError::config(format!(
                    "--center: expected {dim} coordinates, got {}",
                    center.len()
                )));
            }
            let plane: Vec<usize> = parse_list(&args.plane, "plane")?;
            let (i, j) = match plane[..] {
                [i, j] if i != j && i < dim && j < dim => (i, j),
                _ => {
                    return Err(CliError::config(format!(
                        "--plane: need two distinct indices below {dim}"
                    )))
                }
            };
            if args.radius.is_nan() || args.radius <= 0.0 {
                return Err(CliError::config("--radius must be positive"));
            }
            angles
                .map(|a| {
                    let mut x = center.clone();
                    x[i] += args.radius * a.cos();
                    x[j] += args.radius * a.sin();
                    x
                })
                .collect()
        }
    };
    if args.reverse {
        path.reverse();
    }
    Ok(path)
}

pub fn run(args: &VortexArgs) -> CliResult<Report> {
    let n = args.n;
    check_n(n)?;
    let tols = Tolerances::new(&[("winding_residue", 1e-2)], &args.output.tol)?;
    let source = PairSource::from_args(&args.pair, n)?;
    let pair = source.draw(&mut seeded_rng(args.seed));
    let chart = chart_for(args.chart, n, &pair)?;
    let path = build_path(args, chart.domain().dim())?;

    let mut report = Report::new("vortex", Some(args.seed));
    report
        .config("n", Value::from(n))
        .config("chart", Value::from(chart_name(args.chart)))
        .config("pair", Value::from(super::pair_name(&args.pair)))
        .config(
            "loop",
            Value::from(match args.loop_kind {
                LoopKind::Phi => "phi",
                LoopKind::Circle => "circle",
            }),
        )
        .config("segments", Value::from(args.segments))
        .config("reverse", Value::Bool(args.reverse))
        .config("start", nums(&path[0]))
        .tolerances(&tols);
    match args.loop_kind {
        LoopKind::Phi => {
            report
                .config("chi", num(args.chi))
                .config("theta", num(args.theta));
        }
        LoopKind::Circle => {
            report
                .config("plane", Value::from(args.plane.clone()))
                .config("radius", num(args.radius));
        }
    }
    if let Some(k) = args.expect {
        report.config("expect", Value::from(k));
    }
    super::echo_fixed_pair(&mut report, &source);

    let w = match vortex_winding(&pair, chart.as_ref(), &path) {
        Ok(w) => w,
        Err(
            e @ (Error::SingularLoop { .. }
            | Error::InsufficientResolution { .. }
            | Error::NonIntegerWinding { .. }),
        ) => {
            report.inconclusive = Some(e.to_string());
            return Ok(report);
        }
        Err(e @ (Error::OpenLoop { .. } | Error::LoopTooShort | Error::OutsideDomain { .. })) => {
            return Err(CliError::config(e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };

    report.checks.push(Check::single(
        "winding_residue",
        w.residue,
        tols.get("winding_residue"),
    ));
    if let Some(k) = args.expect {
        report.checks.push(Check::single(
            "expected_winding",
            (w.number - k).abs() as f64,
            0.0,
        ));
    }
    report
        .diagnostic("winding", Value::from(w.number))
        .diagnostic("total_phase", num(w.total_phase))
        .diagnostic("residue", num(w.residue))
        .diagnostic("samples", Value::from(w.samples))
        .diagnostic("max_step", num(w.max_step))
        .diagnostic("refinements", Value::from(w.refinements))
        .diagnostic("min_p", num(w.min_p));
    Ok(report)
}
