use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use serde_json::{Map, Value};
use sunphase_core::amplitude::wrap_angle;
use sunphase_core::{dchi_vielbein, su2_polar_chart, StatePair, Su2PolarChart};

use crate::args::DemoArgs;
use crate::config::{up_down, Tolerances};
use crate::error::{CliError, CliResult};
use crate::report::{fmt, num, nums, Check, Report};
use crate::sweep::{evaluate, PointEval};

/// Points listed after the grid: `(chi, theta, phi)`, expected `p`, `eta`.
pub const REFERENCE_ROWS: [([f64; 3], f64, f64); 2] = [
    ([FRAC_PI_2, FRAC_PI_2, 0.0], 1.0, FRAC_PI_2),
    ([PI / 3.0, PI / 4.0, 1.0], 3.0 / 8.0, 1.0 + FRAC_PI_2),
];

#[derive(Debug, Clone)]
pub struct Row {
    pub x: [f64; 3],
    pub p: f64,
    pub eta: f64,
    pub grad_eta_sq: f64,
    /// `|p - sin^2 chi sin^2 theta|`
    pub p_error: f64,
    /// `|eta - (phi + pi/2)|` modulo `2 pi`
    pub eta_error: f64,
    /// `||grad eta|^2 - 1/p|`
    pub gradient_error: f64,
}

impl Row {
    pub fn residual(&self) -> f64 {
        self.p_error.max(self.eta_error).max(self.gradient_error)
    }
}

fn evaluate_row(chart: &Su2PolarChart, pair: &StatePair, x: [f64; 3]) -> PointEval<Row> {
    let g = match dchi_vielbein(pair, chart, &x) {
        Ok(g) => g,
        Err(e) => return PointEval::from_error(e),
    };
    let [chi, theta, phi] = x;
    let p = g.amplitude.p;
    let eta = g.amplitude.eta;
    PointEval::Done(Row {
        x,
        p,
        eta,
        grad_eta_sq: g.grad_eta_sq,
        p_error: (p - (chi.sin() * theta.sin()).powi(2)).abs(),
        eta_error: wrap_angle(eta - phi - FRAC_PI_2).abs(),
        gradient_error: (g.grad_eta_sq - 1.0 / p).abs(),
    })
}

/// Cell centres of a `cells^3` grid over `(0, pi) x (0, pi) x (0, 2 pi)`,
/// followed by the reference points.
pub fn grid_points(cells: usize) -> Vec<[f64; 3]> {
    let h = 1.0 / cells as f64;
    let mut out = Vec::with_capacity(cells.pow(3) + REFERENCE_ROWS.len());
    for i in 0..cells {
        for j in 0..cells {
            for k in 0..cells {
                out.push([
                    (i as f64 + 0.5) * h * PI,
                    (j as f64 + 0.5) * h * PI,
                    (k as f64 + 0.5) * h * 2.0 * PI,
                ]);
            }
        }
    }
    out.extend(REFERENCE_ROWS.iter().map(|r| r.0));
    out
}

pub fn write_csv(path: &Path, rows: &[Row]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "chi",
        "theta",
        "phi",
        "p",
        "eta",
        "grad_eta_sq",
        "inv_p",
        "residual",
    ])?;
    for r in rows {
        w.write_record([
            fmt(r.x[0]),
            fmt(r.x[1]),
            fmt(r.x[2]),
            fmt(r.p),
            fmt(r.eta),
            fmt(r.grad_eta_sq),
            fmt(1.0 / r.p),
            fmt(r.residual()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: &DemoArgs) -> CliResult<Report> {
    if args.grid == 0 {
        return Err(CliError::config("--grid must be at least 1"));
    }
    let tols = Tolerances::new(
        &[
            ("closed_form_p", 1e-10),
            ("closed_form_eta", 1e-10),
            ("gradient_inverse_p", 1e-10),
            ("reference_rows", 1e-10),
        ],
        &args.output.tol,
    )?;
    let chart = su2_polar_chart();
    let pair = up_down();
    let xs = grid_points(args.grid);
    let evals = evaluate(&xs, |&x| evaluate_row(&chart, &pair, x))?;
    let mut rows = Vec::with_capacity(evals.len());
    for (x, e) in xs.iter().zip(evals) {
        match e {
            PointEval::Done(r) => rows.push(r),
            PointEval::Skipped { p } => {
                return Err(CliError::config(format!(
                    "grid point {x:?} has p = {p:e}; use a coarser grid"
                )))
            }
            PointEval::Failed(msg) => {
                return Err(CliError::Core(sunphase_core::Error::Internal(msg)))
            }
        }
    }
    if let Some(path) = &args.csv {
        write_csv(path, &rows)?;
    }

    let grid_rows = &rows[..rows.len() - REFERENCE_ROWS.len()];
    let refs = &rows[rows.len() - REFERENCE_ROWS.len()..];
    let ref_residual = refs
        .iter()
        .zip(REFERENCE_ROWS.iter())
        .map(|(r, (_, p, eta))| (r.p - p).abs().max(wrap_angle(r.eta - eta).abs()))
        .fold(0.0, f64::max);

    let mut report = Report::new("su2-demo", None);
    report
        .config("grid", Value::from(args.grid))
        .config("chart", Value::from("su2-polar"))
        .config("pair", Value::from("paper-su2"))
        .tolerances(&tols);
    report.checks = vec![
        Check::max_of(
            "closed_form_p",
            rows.iter().map(|r| r.p_error),
            tols.get("closed_form_p"),
        ),
        Check::max_of(
            "closed_form_eta",
            rows.iter().map(|r| r.eta_error),
            tols.get("closed_form_eta"),
        ),
        Check::max_of(
            "gradient_inverse_p",
            rows.iter().map(|r| r.gradient_error),
            tols.get("gradient_inverse_p"),
        ),
        Check::single("reference_rows", ref_residual, tols.get("reference_rows")),
    ];
    let rel_gradient = grid_rows
        .iter()
        .map(|r| (r.grad_eta_sq * r.p - 1.0).abs())
        .fold(0.0, f64::max);
    report
        .diagnostic("grid_points", Value::from(grid_rows.len()))
        .diagnostic("max_relative_gradient_error", num(rel_gradient))
        .diagnostic(
            "min_p",
            num(grid_rows.iter().map(|r| r.p).fold(f64::INFINITY, f64::min)),
        );
    let refs_json: Vec<Value> = refs
        .iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert("x".into(), nums(&r.x));
            m.insert("p".into(), num(r.p));
            m.insert("eta".into(), num(r.eta));
            m.insert("grad_eta_sq".into(), num(r.grad_eta_sq));
            Value::Object(m)
        })
        .collect();
    report.diagnostic("reference_rows", Value::Array(refs_json));
    if let Some(path) = &args.csv {
        report.config("csv", Value::from(path.display().to_string()));
    }
    Ok(report)
}
