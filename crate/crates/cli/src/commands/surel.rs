use std::sync::Arc;

use serde_json::{Map, Value};
use sunphase_core::amplitude::modulus_from_phase_gradient;
use sunphase_core::sampling::seeded_rng;
use sunphase_core::{
    build_cartan_frame, build_gellmann_basis, dchi_finite_difference, dchi_vielbein, exp_chart,
    min_gradient_bound, polar_amplitude, su2_polar_chart, tol, Chart, FullCartanChart,
    PhaseGradient, StatePair, SurelResiduals,
};

use crate::args::{Backend, ChartKind, SurelArgs};
use crate::config::{check_n, check_points, PairSource, Tolerances};
use crate::error::{CliError, CliResult};
use crate::report::{num, Check, Report};
use crate::sweep::{detail_record, evaluate, PointEval, Tally, P_SKIP};

struct Point {
    pair: StatePair,
    chart: Arc<dyn Chart>,
    x: Vec<f64>,
}

struct Outcome {
    p: f64,
    residuals: SurelResiduals,
    /// `|reconstructed - sqrt p| / sqrt p`
    reconstruction: f64,
    grad_eta_sq: f64,
}

/// Coordinates are drawn this far inside the chart domain.
const SAMPLE_MARGIN: f64 = 1e-3;

/// Chart of the given kind; the Cartan chart is adapted to `psi_i` of
/// `pair`, the others ignore it.
pub fn chart_for(kind: ChartKind, n: usize, pair: &StatePair) -> CliResult<Arc<dyn Chart>> {
    Ok(match kind {
        ChartKind::Exp => Arc::new(exp_chart(build_gellmann_basis(n)?)),
        ChartKind::Su2Polar => {
            if n != 2 {
                return Err(CliError::config("--chart su2-polar needs --n 2"));
            }
            Arc::new(su2_polar_chart())
        }
        ChartKind::Cartan => {
            let frame = build_cartan_frame(&pair.psi_i, &build_gellmann_basis(n)?)?;
            Arc::new(FullCartanChart::new(frame)?)
        }
    })
}

pub fn chart_name(kind: ChartKind) -> &'static str {
    match kind {
        ChartKind::Exp => "exp",
        ChartKind::Su2Polar => "su2-polar",
        ChartKind::Cartan => "cartan",
    }
}

fn evaluate_point(pt: &Point, backend: Backend, n: usize) -> PointEval<Outcome> {
    let u = match pt.chart.eval(&pt.x) {
        Ok(u) => u,
        Err(e) => return PointEval::from_error(e),
    };
    let amp = polar_amplitude(&pt.pair, &u);
    if amp.p < P_SKIP {
        return PointEval::Skipped { p: amp.p };
    }
    let grad: sunphase_core::Result<PhaseGradient> = match backend {
        Backend::Vielbein => dchi_vielbein(&pt.pair, pt.chart.as_ref(), &pt.x),
        Backend::Fd => dchi_finite_difference(&pt.pair, pt.chart.as_ref(), &pt.x, tol::FD_STEP),
    };
    let grad = match grad {
        Ok(g) => g,
        Err(e) => return PointEval::from_error(e),
    };
    let p = grad.amplitude.p;
    let reconstruction = match modulus_from_phase_gradient(grad.grad_eta_sq, n) {
        Ok(m) => (m - p.sqrt()).abs() / p.sqrt(),
        Err(_) => f64::NAN,
    };
    PointEval::Done(Outcome {
        p,
        residuals: SurelResiduals::from_gradient(&grad, n),
        reconstruction,
        grad_eta_sq: grad.grad_eta_sq,
    })
}

pub fn run(args: &SurelArgs) -> CliResult<Report> {
    let n = args.n;
    check_n(n)?;
    check_points(args.points)?;
    let source = PairSource::from_args(&args.pair, n)?;
    let tol_rel = match args.backend {
        Backend::Vielbein => 1e-8,
        Backend::Fd => 1e-5,
    };
    let tols = Tolerances::new(
        &[
            ("phase_gradient", tol_rel),
            ("modulus_gradient", tol_rel),
            ("gradient_orthogonality", tol_rel),
            ("reconstruction", tol_rel),
            ("lower_bound", 1e-9),
        ],
        &args.output.tol,
    )?;

    // draw everything sequentially so the stream depends only on the seed
    let mut rng = seeded_rng(args.seed);
    // one chart for the sweep unless it depends on a per-point reference state
    let per_point = args.chart == ChartKind::Cartan && source.fixed().is_none();
    let shared = if per_point {
        None
    } else {
        let probe = source
            .fixed()
            .cloned()
            .unwrap_or_else(|| source.draw(&mut seeded_rng(0)));
        Some(chart_for(args.chart, n, &probe)?)
    };
    let mut points = Vec::with_capacity(args.points);
    for _ in 0..args.points {
        let pair = source.draw(&mut rng);
        let chart = match &shared {
            Some(c) => Arc::clone(c),
            None => chart_for(ChartKind::Cartan, n, &pair)?,
        };
        let x = chart.domain().sample(&mut rng, SAMPLE_MARGIN);
        points.push(Point { pair, chart, x });
    }

    let evals = evaluate(&points, |pt| evaluate_point(pt, args.backend, n))?;
    let tally = Tally::new(&evals);
    let bound_sq = min_gradient_bound(n)?.powi(2);

    let mut report = Report::new("verify-surel", Some(args.seed));
    report
        .config("n", Value::from(n))
        .config("chart", Value::from(chart_name(args.chart)))
        .config("pair", Value::from(super::pair_name(&args.pair)))
        .config("points", Value::from(args.points))
        .config("backend", Value::from(super::backend_name(args.backend)))
        .tolerances(&tols);
    super::echo_fixed_pair(&mut report, &source);

    let vals: Vec<&Outcome> = tally.values().collect();
    report.checks = vec![
        Check::max_of(
            "phase_gradient",
            vals.iter().map(|o| o.residuals.eta),
            tols.get("phase_gradient"),
        ),
        Check::max_of(
            "modulus_gradient",
            vals.iter().map(|o| o.residuals.log_modulus),
            tols.get("modulus_gradient"),
        ),
        Check::max_of(
            "gradient_orthogonality",
            vals.iter().map(|o| o.residuals.orthogonality),
            tols.get("gradient_orthogonality"),
        ),
        Check::max_of(
            "reconstruction",
            vals.iter().map(|o| o.reconstruction),
            tols.get("reconstruction"),
        ),
        Check::max_of(
            "lower_bound",
            vals.iter().map(|o| (bound_sq - o.grad_eta_sq).max(0.0)),
            tols.get("lower_bound"),
        ),
    ];
    let min_grad = vals
        .iter()
        .map(|o| o.grad_eta_sq)
        .fold(f64::INFINITY, f64::min);
    let min_p = vals.iter().map(|o| o.p).fold(f64::INFINITY, f64::min);
    report
        .diagnostic("gradient_bound", num(bound_sq))
        .diagnostic("min_grad_eta_sq", num(min_grad))
        .diagnostic("min_p", num(min_p));
    tally.finish(&mut report);

    if args.output.detail {
        report.points = Some(
            points
                .iter()
                .zip(&evals)
                .enumerate()
                .map(|(k, (pt, ev))| {
                    detail_record(k, &pt.x, ev, |o| {
                        let mut m = Map::new();
                        m.insert("p".into(), num(o.p));
                        m.insert("grad_eta_sq".into(), num(o.grad_eta_sq));
                        m.insert("phase_gradient".into(), num(o.residuals.eta));
                        m.insert("modulus_gradient".into(), num(o.residuals.log_modulus));
                        m.insert(
                            "gradient_orthogonality".into(),
                            num(o.residuals.orthogonality),
                        );
                        m.insert("reconstruction".into(), num(o.reconstruction));
                        m
                    })
                })
                .collect(),
        );
    }
    Ok(report)
}
