//! Parallel point evaluation with ordered aggregation.

use rayon::prelude::*;
use serde_json::{Map, Value};
use sunphase_core::Error;

use crate::error::CliResult;
use crate::report::{num, Check, Report};

/// Points with `p` below this are skipped rather than tested.
pub const P_SKIP: f64 = 1e-6;

#[derive(Debug, Clone)]
pub enum PointEval<T> {
    Done(T),
    Skipped { p: f64 },
    Failed(String),
}

impl<T> PointEval<T> {
    /// Near-zero amplitudes become skips, anything else a failure.
    pub fn from_error(e: Error) -> Self {
        match e {
            Error::NearZeroAmplitude { p, .. } => Self::Skipped { p },
            other => Self::Failed(other.to_string()),
        }
    }
}

/// Evaluate `f` on every input inside the configured pool; results keep
/// input order.
pub fn evaluate<I, T, F>(inputs: &[I], f: F) -> CliResult<Vec<PointEval<T>>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> PointEval<T> + Sync + Send,
{
    let pool = crate::config::thread_pool()?;
    Ok(pool.install(|| inputs.par_iter().map(&f).collect()))
}

pub struct Tally<'a, T> {
    pub done: Vec<(usize, &'a T)>,
    pub skipped: usize,
    pub failed: Vec<(usize, &'a str)>,
    pub total: usize,
}

impl<'a, T> Tally<'a, T> {
    pub fn new(evals: &'a [PointEval<T>]) -> Self {
        let mut done = Vec::new();
        let mut skipped = 0;
        let mut failed = Vec::new();
        for (k, e) in evals.iter().enumerate() {
            match e {
                PointEval::Done(v) => done.push((k, v)),
                PointEval::Skipped { .. } => skipped += 1,
                PointEval::Failed(msg) => failed.push((k, msg.as_str())),
            }
        }
        Self {
            done,
            skipped,
            failed,
            total: evals.len(),
        }
    }

    pub fn values(&self) -> impl Iterator<Item = &'a T> + '_ {
        self.done.iter().map(|(_, v)| *v)
    }

    /// Record counts, flag an inconclusive sweep when more than half the
    /// points were skipped, and turn evaluation failures into a failing
    /// check.
    pub fn finish(&self, report: &mut Report) {
        report.diagnostic("points_total", Value::from(self.total));
        report.diagnostic("points_evaluated", Value::from(self.done.len()));
        report.diagnostic("points_skipped", Value::from(self.skipped));
        report.diagnostic("points_failed", Value::from(self.failed.len()));
        report.diagnostic("p_skip_threshold", num(P_SKIP));
        if !self.failed.is_empty() {
            report
                .checks
                .push(Check::single("point_errors", self.failed.len() as f64, 0.0));
            for (k, msg) in self.failed.iter().take(5) {
                report.notes.push(format!("point {k}: {msg}"));
            }
        }
        if 2 * self.skipped > self.total {
            report.inconclusive = Some(format!(
                "{} of {} points skipped with p < {:e}",
                self.skipped, self.total, P_SKIP
            ));
        }
    }
}

/// Per-point JSON record for `--detail`.
pub fn detail_record<T>(
    index: usize,
    x: &[f64],
    eval: &PointEval<T>,
    fields: impl Fn(&T) -> Map<String, Value>,
) -> Value {
    let mut m = Map::new();
    m.insert("index".into(), Value::from(index));
    m.insert("x".into(), crate::report::nums(x));
    match eval {
        PointEval::Done(v) => {
            m.insert("status".into(), Value::String("evaluated".into()));
            m.extend(fields(v));
        }
        PointEval::Skipped { p } => {
            m.insert("status".into(), Value::String("skipped".into()));
            m.insert("p".into(), num(*p));
        }
        PointEval::Failed(msg) => {
            m.insert("status".into(), Value::String("failed".into()));
            m.insert("error".into(), Value::String(msg.clone()));
        }
    }
    Value::Object(m)
}
