//! One-parameter subgroups `exp(i l t)` and superoscillatory phase.
//!
//! For a generator normalized to `Tr(l^2) = 2` the curve `t -> exp(i l t)`
//! has unit Cartan-Killing speed, so the local phase frequency at `t = 0`
//! along the phase-gradient direction equals `|grad eta|` at the identity,
//! which never drops below `sqrt(2(n-1)/n)`. The same number bounds every
//! eigenvalue of `l`, hence the Fourier components of the amplitude.

use num_complex::Complex64;

use crate::algebra::{expm_generator, GeneratorBasis, StatePair};
use crate::amplitude::wrap_angle;
use crate::error::{Error, Result};
use crate::matrix::{ComplexSquareMatrix, StateVector};
use crate::{isotropy_eigenvalue, tol};

/// Tolerance for the superoscillation comparison at `t = 0`.
pub const SUPEROSC_TOL: f64 = 1e-9;
/// Samples with `p` below this are flagged and carry no frequency.
pub const P_TRACE: f64 = 1e-10;

/// Traceless Hermitian generator with `Tr(l^2)/2 = 1`, plus its spectrum.
#[derive(Debug, Clone)]
pub struct NormalizedGenerator {
    pub l: ComplexSquareMatrix,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors `|k>`.
    pub eigenvectors: ComplexSquareMatrix,
}

impl NormalizedGenerator {
    /// Validates Hermiticity, tracelessness and normalization (1e-10).
    pub fn new(l: ComplexSquareMatrix) -> Result<Self> {
        let herm = l.hermiticity_error();
        if herm > tol::IDENTITY {
            return Err(Error::NotHermitian { residual: herm });
        }
        let tr = l.trace().norm();
        if tr > tol::IDENTITY {
            return Err(Error::InvalidGenerator(format!("trace {tr:.3e}")));
        }
        let norm = ((&l * &l).trace().re * 0.5 - 1.0).abs();
        if norm > tol::IDENTITY {
            return Err(Error::InvalidGenerator(format!(
                "Tr(l^2)/2 deviates from 1 by {norm:.3e}"
            )));
        }
        let eig = l.hermitian_eigen();
        Ok(Self {
            l,
            eigenvalues: eig.values,
            eigenvectors: eig.vectors,
        })
    }

    /// Rescale a nonzero traceless Hermitian matrix to unit Killing norm.
    pub fn normalize(l: &ComplexSquareMatrix) -> Result<Self> {
        let norm = ((l * l).trace().re * 0.5).sqrt();
        if norm < tol::IDENTITY {
            return Err(Error::InvalidGenerator("zero generator".into()));
        }
        Self::new(l.scale_real(1.0 / norm))
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn eigenvector(&self, k: usize) -> StateVector {
        self.eigenvectors.as_dmatrix().column(k).into_owned()
    }

    /// `C_k = <f|k><k|i>`
    pub fn fourier_coefficients(&self, pair: &StatePair) -> Vec<Complex64> {
        (0..self.eigenvalues.len())
            .map(|k| {
                let v = self.eigenvector(k);
                pair.psi_f.dotc(&v) * v.dotc(&pair.psi_i)
            })
            .collect()
    }

    /// `omega(t) = Re[<f|U(t) l|i> / <f|U(t)|i>]`, `None` near zeros.
    pub fn local_frequency(&self, pair: &StatePair, t: f64) -> Result<Option<f64>> {
        let u = expm_generator(&self.l, t)?;
        let amp = pair.amplitude(&u);
        if amp.norm_sqr() < P_TRACE {
            return Ok(None);
        }
        let num = pair.amplitude(&(&u * &self.l));
        Ok(Some((num / amp).re))
    }
}

/// Generator along the phase gradient at the identity:
/// `c_a = Re[<f|l_a|i> / <f|i>]`, `l = c.l / |c|`.
pub fn aligned_generator(pair: &StatePair, basis: &GeneratorBasis) -> Result<NormalizedGenerator> {
    if pair.dim() != basis.n() {
        return Err(Error::ShapeMismatch {
            expected: basis.n(),
            found: pair.dim(),
        });
    }
    let overlap = pair.overlap();
    if overlap.norm_sqr() < tol::P_GRAD {
        return Err(Error::UndefinedDirection {
            overlap: overlap.norm_sqr(),
        });
    }
    let coeffs: Vec<f64> = basis
        .iter()
        .map(|l| (l.sandwich(&pair.psi_f, &pair.psi_i) / overlap).re)
        .collect();
    let norm = coeffs.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < tol::IDENTITY {
        return Err(Error::Internal(format!(
            "phase gradient at the identity vanishes (|c| = {norm:.3e}) for a non-orthogonal pair"
        )));
    }
    let unit: Vec<f64> = coeffs.iter().map(|v| v / norm).collect();
    NormalizedGenerator::new(basis.combine(&unit))
}

/// Sampled amplitude `<f|exp(i l t)|i>` with local frequency and spectrum.
#[derive(Debug, Clone)]
pub struct PhaseTrace {
    pub t: Vec<f64>,
    pub amplitude: Vec<Complex64>,
    /// `None` where the amplitude is (near) zero.
    pub omega: Vec<Option<f64>>,
    pub eigenvalues: Vec<f64>,
    pub fourier: Vec<Complex64>,
}

impl PhaseTrace {
    /// `sum_k C_k e^{i l_k t}`
    pub fn fourier_sum(&self, t: f64) -> Complex64 {
        self.fourier
            .iter()
            .zip(&self.eigenvalues)
            .map(|(c, &l)| c * Complex64::from_polar(1.0, l * t))
            .sum()
    }

    /// Largest deviation of the Fourier sum from the sampled amplitude.
    pub fn fourier_residual(&self) -> f64 {
        self.t
            .iter()
            .zip(&self.amplitude)
            .map(|(&t, a)| (self.fourier_sum(t) - a).norm())
            .fold(0.0, f64::max)
    }

    pub fn flagged(&self) -> usize {
        self.omega.iter().filter(|w| w.is_none()).count()
    }
}

/// Sample the amplitude along `exp(i l t)` on a uniform grid.
pub fn phase_trace(
    pair: &StatePair,
    gen: &NormalizedGenerator,
    t_range: (f64, f64),
    samples: usize,
) -> Result<PhaseTrace> {
    if samples < 2 {
        return Err(Error::TooFewSamples {
            min: 2,
            found: samples,
        });
    }
    if pair.dim() != gen.l.dim() {
        return Err(Error::ShapeMismatch {
            expected: gen.l.dim(),
            found: pair.dim(),
        });
    }
    let (t0, t1) = t_range;
    let dt = (t1 - t0) / (samples - 1) as f64;
    let t: Vec<f64> = (0..samples).map(|k| t0 + dt * k as f64).collect();
    let mut amplitude = Vec::with_capacity(samples);
    let mut omega = Vec::with_capacity(samples);
    for &tk in &t {
        let u = expm_generator(&gen.l, tk)?;
        let amp = pair.amplitude(&u);
        amplitude.push(amp);
        omega.push(if amp.norm_sqr() < P_TRACE {
            None
        } else {
            Some((pair.amplitude(&(&u * &gen.l)) / amp).re)
        });
    }
    Ok(PhaseTrace {
        t,
        amplitude,
        omega,
        eigenvalues: gen.eigenvalues.clone(),
        fourier: gen.fourier_coefficients(pair),
    })
}

/// Largest deviation between the analytic `omega(t)` and a central
/// difference of the unwrapped phase, over unflagged grid points.
pub fn omega_fd_deviation(
    pair: &StatePair,
    gen: &NormalizedGenerator,
    trace: &PhaseTrace,
    step: f64,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (&t, w) in trace.t.iter().zip(&trace.omega) {
        let Some(w) = w else { continue };
        let plus = pair.amplitude(&expm_generator(&gen.l, t + step)?);
        let minus = pair.amplitude(&expm_generator(&gen.l, t - step)?);
        if plus.norm_sqr() < P_TRACE || minus.norm_sqr() < P_TRACE {
            continue;
        }
        let d = wrap_angle(plus.arg() - minus.arg()) / (2.0 * step);
        worst = worst.max((d - w).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperoscillationReport {
    pub max_eigenvalue: f64,
    pub omega0: f64,
    /// `sqrt(2(n-1)/n)`
    pub bound: f64,
    /// Intervals of `t` where `|omega(t)| > max_k |l_k| + 1e-9`.
    pub intervals: Vec<(f64, f64)>,
    /// `omega(0) >= max_k |l_k| - 1e-9`
    pub superoscillatory_at_zero: bool,
    /// `|omega(0) - max_k |l_k|| <= 1e-9`
    pub boundary: bool,
    pub flagged_samples: usize,
}

/// Superoscillation diagnostics of `<f|exp(i l t)|i>` over `t_range`.
///
/// Intervals are runs of grid samples above the fastest Fourier frequency,
/// widened by half a grid spacing on each side except next to flagged
/// (zero-amplitude) samples or the ends of the range.
pub fn superoscillation_report(
    pair: &StatePair,
    gen: &NormalizedGenerator,
    t_range: (f64, f64),
    samples: usize,
) -> Result<SuperoscillationReport> {
    let trace = phase_trace(pair, gen, t_range, samples)?;
    let max_eigenvalue = gen.max_abs_eigenvalue();
    let omega0 = gen
        .local_frequency(pair, 0.0)?
        .ok_or(Error::NearZeroAmplitude {
            p: pair.overlap().norm_sqr(),
            threshold: P_TRACE,
        })?;
    let half = 0.5 * (t_range.1 - t_range.0) / (samples - 1) as f64;
    let above: Vec<bool> = trace
        .omega
        .iter()
        .map(|w| w.is_some_and(|w| w.abs() > max_eigenvalue + SUPEROSC_TOL))
        .collect();
    let mut intervals = Vec::new();
    let mut k = 0;
    while k < samples {
        if !above[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k + 1 < samples && above[k + 1] {
            k += 1;
        }
        let end = k;
        let lo = if start == 0 || trace.omega[start - 1].is_none() {
            trace.t[start]
        } else {
            trace.t[start] - half
        };
        let hi = if end + 1 == samples || trace.omega[end + 1].is_none() {
            trace.t[end]
        } else {
            trace.t[end] + half
        };
        intervals.push((lo, hi));
        k += 1;
    }
    Ok(SuperoscillationReport {
        max_eigenvalue,
        omega0,
        bound: isotropy_eigenvalue(pair.dim()),
        intervals,
        superoscillatory_at_zero: omega0 >= max_eigenvalue - SUPEROSC_TOL,
        boundary: (omega0 - max_eigenvalue).abs() <= SUPEROSC_TOL,
        flagged_samples: trace.flagged(),
    })
}
