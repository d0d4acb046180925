pub mod cprel;
pub mod demo;
pub mod superosc;
pub mod surel;
pub mod vortex;

use serde_json::Value;

use crate::args::{Backend, PairArgs, PairKind};
use crate::config::PairSource;
use crate::report::{nums, Report};

pub(crate) fn pair_name(args: &PairArgs) -> &'static str {
    match args.pair {
        PairKind::Random => "random",
        PairKind::PaperSu2 => "paper-su2",
        PairKind::Explicit => "explicit",
    }
}

pub(crate) fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Vielbein => "vielbein",
        Backend::Fd => "fd",
    }
}

/// Echo the normalized states of a fixed pair as `[re, im, re, im, ...]`.
pub(crate) fn echo_fixed_pair(report: &mut Report, source: &PairSource) {
    if let Some(pair) = source.fixed() {
        let flat = |v: &sunphase_core::StateVector| -> Value {
            let xs: Vec<f64> = v.iter().flat_map(|z| [z.re, z.im]).collect();
            nums(&xs)
        };
        report.config("psi_i", flat(&pair.psi_i));
        report.config("psi_f", flat(&pair.psi_f));
    }
}
