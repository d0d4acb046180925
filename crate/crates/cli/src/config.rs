//! Input validation shared by the commands.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::ThreadPool;
use sunphase_core::sampling::{random_pair, SweepRng};
use sunphase_core::{StatePair, StateVector};

use crate::args::{PairArgs, PairKind};
use crate::error::{CliError, CliResult};

/// Deviation from unit norm tolerated silently for explicit states.
pub const NORM_WARN: f64 = 1e-6;

#[derive(Debug, Clone)]
pub enum PairSource {
    Random { n: usize },
    Fixed(StatePair),
}

impl PairSource {
    pub fn from_args(args: &PairArgs, n: usize) -> CliResult<Self> {
        match args.pair {
            PairKind::Random => {
                if args.psi_i.is_some() || args.psi_f.is_some() {
                    return Err(CliError::config("--psi-i/--psi-f require --pair explicit"));
                }
                Ok(Self::Random { n })
            }
            PairKind::PaperSu2 => {
                if n != 2 {
                    return Err(CliError::config("--pair paper-su2 needs --n 2"));
                }
                Ok(Self::Fixed(up_down()))
            }
            PairKind::Explicit => {
                let psi_i = args
                    .psi_i
                    .as_deref()
                    .ok_or_else(|| CliError::config("--pair explicit needs --psi-i"))?;
                let psi_f = args
                    .psi_f
                    .as_deref()
                    .ok_or_else(|| CliError::config("--pair explicit needs --psi-f"))?;
                let psi_i = parse_state(psi_i, n, "psi-i")?;
                let psi_f = parse_state(psi_f, n, "psi-f")?;
                Ok(Self::Fixed(StatePair::new(psi_i, psi_f)?))
            }
        }
    }

    /// Next pair; random sources draw from `rng`, fixed ones ignore it.
    pub fn draw(&self, rng: &mut SweepRng) -> StatePair {
        match self {
            Self::Random { n } => random_pair(rng, *n),
            Self::Fixed(p) => p.clone(),
        }
    }

    pub fn fixed(&self) -> Option<&StatePair> {
        match self {
            Self::Fixed(p) => Some(p),
            Self::Random { .. } => None,
        }
    }
}

/// `(|+>, |->)` with `|+> = (1, 0)`, `|-> = (0, 1)`.
pub fn up_down() -> StatePair {
    let up = StateVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let down = StateVector::from_vec(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
    StatePair::new(up, down).expect("basis states are normalized")
}

/// Parse "re:im,re:im,..." (a bare "re" means zero imaginary part) and
/// normalize, warning when the input norm is off by more than 1e-6.
pub fn parse_state(text: &str, n: usize, label: &str) -> CliResult<StateVector> {
    let comps: Vec<Complex64> = text
        .split(',')
        .map(|tok| parse_component(tok.trim(), label))
        .collect::<CliResult<_>>()?;
    if comps.len() != n {
        return Err(CliError::config(format!(
            "--{label}: expected {n} components, got {}",
            comps.len()
        )));
    }
    let v = StateVector::from_vec(comps);
    let norm = v.norm();
    if !(norm.is_finite() && norm > 1e-12) {
        return Err(CliError::config(format!(
            "--{label}: zero or non-finite vector"
        )));
    }
    if (norm - 1.0).abs() > NORM_WARN {
        eprintln!("warning: --{label} has norm {norm:.6e}; normalizing");
    }
    Ok(v / Complex64::new(norm, 0.0))
}

fn parse_component(tok: &str, label: &str) -> CliResult<Complex64> {
    let bad = || CliError::config(format!("--{label}: cannot parse component '{tok}'"));
    let (re, im) = match tok.split_once(':') {
        Some((re, im)) => (re, im),
        None => (tok, "0"),
    };
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

pub fn check_n(n: usize) -> CliResult<()> {
    if n < 2 {
        return Err(CliError::config(format!("--n must be at least 2, got {n}")));
    }
    Ok(())
}

pub fn check_points(points: usize) -> CliResult<()> {
    if points == 0 {
        return Err(CliError::config("--points must be at least 1"));
    }
    Ok(())
}

/// Named check tolerances, overridable with `--tol NAME=VALUE`.
#[derive(Debug, Clone)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub fn new(defaults: &[(&str, f64)], overrides: &[String]) -> CliResult<Self> {
        let mut map: BTreeMap<String, f64> =
            defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for o in overrides {
            let (name, value) = o
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("--tol expects NAME=VALUE, got '{o}'")))?;
            let name = name.trim();
            let slot = map.get_mut(name).ok_or_else(|| {
                let known: Vec<&str> = defaults.iter().map(|(k, _)| *k).collect();
                CliError::config(format!(
                    "unknown tolerance '{name}' (known: {})",
                    known.join(", ")
                ))
            })?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| CliError::config(format!("--tol {name}: bad value '{value}'")))?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::config(format!(
                    "--tol {name}: must be finite and >= 0"
                )));
            }
            *slot = v;
        }
        Ok(Self(map))
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &f64)> {
        self.0.iter()
    }
}

/// Worker pool sized by `SUN_PHASE_THREADS` when set.
pub fn thread_pool() -> CliResult<ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("SUN_PHASE_THREADS") {
        let k: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&k| k >= 1)
            .ok_or_else(|| CliError::config(format!("SUN_PHASE_THREADS: bad value '{v}'")))?;
        builder = builder.num_threads(k);
    }
    builder
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))
}
