//! Polar decomposition of `<psi_f| U(x) |psi_i>` and its gradients.
//!
//! Writing the amplitude as `sqrt(p) e^{i eta} = e^{i chi}`, the
//! left-invariant frame gives `d chi = omega^a <f|U l_a|i> / <f|U|i>`.
//! With norms taken in the Cartan-Killing metric the gradients satisfy
//!
//! ```text
//! |grad eta|^2        = 1/p + 1 - 2/n
//! |grad log sqrt p|^2 = 1/p - 1
//! grad p . grad eta   = 0
//! ```
//!
//! Residuals of these relations are returned, never asserted; thresholds
//! belong to the caller.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::StatePair;
use crate::charts::{Chart, Geometry, MetricAtPoint};
use crate::error::{Error, Result};
use crate::matrix::ComplexSquareMatrix;
use crate::{isotropy_eigenvalue, tol};

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarAmplitude {
    pub value: Complex64,
    /// `|value|^2`
    pub p: f64,
    /// Principal phase in `(-pi, pi]`; zero when undefined.
    pub eta: f64,
    pub phase_defined: bool,
}

impl PolarAmplitude {
    pub fn from_value(value: Complex64) -> Self {
        let p = value.norm_sqr();
        let phase_defined = p >= tol::P_MIN;
        let eta = if phase_defined {
            wrap_angle(value.arg())
        } else {
            0.0
        };
        Self {
            value,
            p,
            eta,
            phase_defined,
        }
    }
}

pub fn polar_amplitude(pair: &StatePair, u: &ComplexSquareMatrix) -> PolarAmplitude {
    PolarAmplitude::from_value(pair.amplitude(u))
}

/// Gradient data of the complex phase at one point.
#[derive(Debug, Clone)]
pub struct PhaseGradient {
    pub amplitude: PolarAmplitude,
    /// `d chi_mu = d_mu eta - i d_mu log sqrt p`
    pub dchi: Vec<Complex64>,
    pub grad_eta_sq: f64,
    pub grad_logsqrtp_sq: f64,
    /// `g^{mu nu} d_mu p d_nu eta`
    pub cross: f64,
}

impl PhaseGradient {
    pub fn d_eta(&self) -> Vec<f64> {
        self.dchi.iter().map(|z| z.re).collect()
    }

    pub fn d_logsqrtp(&self) -> Vec<f64> {
        self.dchi.iter().map(|z| -z.im).collect()
    }

    fn from_dchi(amplitude: PolarAmplitude, dchi: Vec<Complex64>, metric: &MetricAtPoint) -> Self {
        let d_eta: Vec<f64> = dchi.iter().map(|z| z.re).collect();
        let d_log: Vec<f64> = dchi.iter().map(|z| -z.im).collect();
        let grad_eta_sq = metric.inverse_product(&d_eta, &d_eta);
        let grad_logsqrtp_sq = metric.inverse_product(&d_log, &d_log);
        // d p = 2 p d log sqrt p
        let cross = 2.0 * amplitude.p * metric.inverse_product(&d_log, &d_eta);
        Self {
            amplitude,
            dchi,
            grad_eta_sq,
            grad_logsqrtp_sq,
            cross,
        }
    }
}

fn require_gradient_amplitude(amp: &PolarAmplitude) -> Result<()> {
    if amp.p < tol::P_GRAD {
        return Err(Error::NearZeroAmplitude {
            p: amp.p,
            threshold: tol::P_GRAD,
        });
    }
    Ok(())
}

/// `d chi` from the left-invariant frame:
/// `d chi_mu = omega^a_mu <f|U l_a|i> / <f|U|i>`.
pub fn dchi_vielbein(pair: &StatePair, chart: &dyn Chart, x: &[f64]) -> Result<PhaseGradient> {
    check_pair_dim(pair, chart)?;
    let geo = Geometry::at(chart, x)?;
    dchi_from_geometry(pair, chart, &geo)
}

pub(crate) fn dchi_from_geometry(
    pair: &StatePair,
    chart: &dyn Chart,
    geo: &Geometry,
) -> Result<PhaseGradient> {
    let u = geo.u();
    let amp = polar_amplitude(pair, u);
    require_gradient_amplitude(&amp)?;
    let bra = u.adjoint().apply(&pair.psi_f); // (<f|U)^dagger
    let ratios: Vec<Complex64> = chart
        .basis()
        .iter()
        .map(|l| bra.dotc(&l.apply(&pair.psi_i)) / amp.value)
        .collect();
    let omega = &geo.frame.omega;
    let dchi = (0..omega.ncols())
        .map(|mu| {
            ratios
                .iter()
                .enumerate()
                .map(|(a, r)| r * omega[(a, mu)])
                .sum()
        })
        .collect();
    Ok(PhaseGradient::from_dchi(amp, dchi, &geo.metric))
}

/// Raw central-difference partials of `eta` (unwrapped against the centre
/// value) and of `log sqrt p`.
pub(crate) fn phase_partials_fd(
    pair: &StatePair,
    chart: &dyn Chart,
    x: &[f64],
    step: f64,
) -> Result<(PolarAmplitude, Vec<f64>, Vec<f64>)> {
    let centre = polar_amplitude(pair, &chart.eval(x)?);
    require_gradient_amplitude(&centre)?;
    let mut d_eta = Vec::with_capacity(x.len());
    let mut d_log = Vec::with_capacity(x.len());
    let mut xs = x.to_vec();
    for mu in 0..x.len() {
        xs[mu] = x[mu] + step;
        let plus = polar_amplitude(pair, &chart.eval(&xs)?);
        xs[mu] = x[mu] - step;
        let minus = polar_amplitude(pair, &chart.eval(&xs)?);
        xs[mu] = x[mu];
        for side in [&plus, &minus] {
            if !side.phase_defined {
                return Err(Error::NearZeroAmplitude {
                    p: side.p,
                    threshold: tol::P_MIN,
                });
            }
        }
        let forward = wrap_angle(plus.eta - centre.eta);
        let backward = wrap_angle(centre.eta - minus.eta);
        d_eta.push((forward + backward) / (2.0 * step));
        d_log.push(0.25 * (plus.p.ln() - minus.p.ln()) / step);
    }
    Ok((centre, d_eta, d_log))
}

/// `d chi` from central differences of the phase and modulus, with the
/// metric from the chart's own backend.
pub fn dchi_finite_difference(
    pair: &StatePair,
    chart: &dyn Chart,
    x: &[f64],
    step: f64,
) -> Result<PhaseGradient> {
    check_pair_dim(pair, chart)?;
    let metric = crate::charts::ck_metric(chart, x)?;
    let (amp, d_eta, d_log) = phase_partials_fd(pair, chart, x, step)?;
    let dchi = d_eta
        .iter()
        .zip(&d_log)
        .map(|(&e, &l)| Complex64::new(e, -l))
        .collect();
    Ok(PhaseGradient::from_dchi(amp, dchi, &metric))
}

/// Absolute residuals of the three group-manifold relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurelResiduals {
    /// `| |grad eta|^2 - 1/p - (1 - 2/n) |`
    pub eta: f64,
    /// `| |grad log sqrt p|^2 - 1/p + 1 |`
    pub log_modulus: f64,
    /// `| grad p . grad eta |`
    pub orthogonality: f64,
    pub p: f64,
}

impl SurelResiduals {
    pub fn max(&self) -> f64 {
        self.eta.max(self.log_modulus).max(self.orthogonality)
    }

    pub fn from_gradient(g: &PhaseGradient, n: usize) -> Self {
        let p = g.amplitude.p;
        let n = n as f64;
        Self {
            eta: (g.grad_eta_sq - 1.0 / p - (1.0 - 2.0 / n)).abs(),
            log_modulus: (g.grad_logsqrtp_sq - 1.0 / p + 1.0).abs(),
            orthogonality: g.cross.abs(),
            p,
        }
    }
}

/// Residuals of the group-manifold relations with the vielbein backend.
pub fn verify_surel(pair: &StatePair, chart: &dyn Chart, x: &[f64]) -> Result<SurelResiduals> {
    let g = dchi_vielbein(pair, chart, x)?;
    Ok(SurelResiduals::from_gradient(&g, chart.n()))
}

/// Modulus recovered from the phase alone:
/// `|amp| = 1 / sqrt(|grad eta|^2 - (n-2)/n)`.
pub fn reconstruct_modulus(pair: &StatePair, chart: &dyn Chart, x: &[f64]) -> Result<f64> {
    let g = dchi_vielbein(pair, chart, x)?;
    modulus_from_phase_gradient(g.grad_eta_sq, chart.n())
}

pub fn modulus_from_phase_gradient(grad_eta_sq: f64, n: usize) -> Result<f64> {
    let value = grad_eta_sq - (n as f64 - 2.0) / n as f64;
    if value <= tol::CONSTRUCTION {
        return Err(Error::ReconstructionUndefined { value });
    }
    Ok(1.0 / value.sqrt())
}

/// `sqrt(2(n-1)/n)`, the smallest possible `|grad eta|`.
pub fn min_gradient_bound(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension { n, min: 2 });
    }
    Ok(isotropy_eigenvalue(n))
}

/// Minimum number of loop segments before adaptive refinement.
pub const MIN_LOOP_SEGMENTS: usize = 64;
/// Largest phase step accepted between adjacent loop samples.
pub const MAX_PHASE_STEP: f64 = PI / 2.0;
const MAX_REFINE_DEPTH: u32 = 16;
const WINDING_RESIDUE: f64 = 0.01;

/// Phase circulation around a closed loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Winding {
    pub number: i64,
    /// Accumulated unwrapped phase.
    pub total_phase: f64,
    /// `|total / 2pi - number|`
    pub residue: f64,
    /// Phase evaluations performed, refinements included.
    pub samples: usize,
    /// Largest accepted phase step.
    pub max_step: f64,
    /// Number of bisections triggered by large steps.
    pub refinements: usize,
    /// Smallest `p` seen along the loop.
    pub min_p: f64,
}

struct LoopWalker<'a> {
    pair: &'a StatePair,
    chart: &'a dyn Chart,
    samples: usize,
    refinements: usize,
    max_step: f64,
    min_p: f64,
}

impl LoopWalker<'_> {
    fn phase_at(&mut self, x: &[f64], index: usize) -> Result<f64> {
        let amp = polar_amplitude(self.pair, &self.chart.eval(x)?);
        self.samples += 1;
        self.min_p = self.min_p.min(amp.p);
        if amp.p < tol::P_GRAD {
            return Err(Error::SingularLoop { index, p: amp.p });
        }
        Ok(amp.eta)
    }

    /// Unwrapped phase change from `a` to `b`, bisecting while the step is
    /// too large to unwrap unambiguously.
    fn segment(
        &mut self,
        a: &[f64],
        eta_a: f64,
        b: &[f64],
        eta_b: f64,
        segment: usize,
        depth: u32,
    ) -> Result<f64> {
        let step = wrap_angle(eta_b - eta_a);
        if step.abs() < MAX_PHASE_STEP {
            self.max_step = self.max_step.max(step.abs());
            return Ok(step);
        }
        if depth >= MAX_REFINE_DEPTH {
            return Err(Error::InsufficientResolution { segment, step });
        }
        self.refinements += 1;
        let mid: Vec<f64> = a.iter().zip(b).map(|(u, v)| 0.5 * (u + v)).collect();
        let eta_mid = self.phase_at(&mid, segment)?;
        Ok(self.segment(a, eta_a, &mid, eta_mid, segment, depth + 1)?
            + self.segment(&mid, eta_mid, b, eta_b, segment, depth + 1)?)
    }
}

/// Winding number `(1/2pi) sum d eta` of the amplitude phase around a
/// closed coordinate loop.
///
/// The loop is closed when its endpoints map to the same group element,
/// so periodic coordinates may run over a full period. Segments are
/// linearly subdivided to at least [`MIN_LOOP_SEGMENTS`] and bisected
/// further wherever a phase step reaches `pi/2`.
pub fn vortex_winding(pair: &StatePair, chart: &dyn Chart, path: &[Vec<f64>]) -> Result<Winding> {
    check_pair_dim(pair, chart)?;
    if path.len() < 2 {
        return Err(Error::LoopTooShort);
    }
    let first = chart.eval(&path[0])?;
    let last = chart.eval(&path[path.len() - 1])?;
    let gap = first.max_deviation(&last);
    if gap > tol::IDENTITY {
        return Err(Error::OpenLoop { gap });
    }

    let segments = path.len() - 1;
    let per_segment = MIN_LOOP_SEGMENTS.div_ceil(segments).max(1);
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(segments * per_segment + 1);
    for w in path.windows(2) {
        for k in 0..per_segment {
            let s = k as f64 / per_segment as f64;
            points.push(
                w[0].iter()
                    .zip(&w[1])
                    .map(|(a, b)| a + s * (b - a))
                    .collect(),
            );
        }
    }
    points.push(path[path.len() - 1].clone());

    let mut walker = LoopWalker {
        pair,
        chart,
        samples: 0,
        refinements: 0,
        max_step: 0.0,
        min_p: f64::INFINITY,
    };
    let mut total = 0.0;
    let mut eta_prev = walker.phase_at(&points[0], 0)?;
    for (k, w) in points.windows(2).enumerate() {
        let eta_next = walker.phase_at(&w[1], k + 1)?;
        total += walker.segment(&w[0], eta_prev, &w[1], eta_next, k, 0)?;
        eta_prev = eta_next;
    }
    let turns = total / (2.0 * PI);
    let number = turns.round();
    let residue = (turns - number).abs();
    if residue >= WINDING_RESIDUE {
        return Err(Error::NonIntegerWinding { residue });
    }
    Ok(Winding {
        number: number as i64,
        total_phase: total,
        residue,
        samples: walker.samples,
        max_step: walker.max_step,
        refinements: walker.refinements,
        min_p: walker.min_p,
    })
}

fn check_pair_dim(pair: &StatePair, chart: &dyn Chart) -> Result<()> {
    if pair.dim() != chart.n() {
        return Err(Error::ShapeMismatch {
            expected: chart.n(),
            found: pair.dim(),
        });
    }
    Ok(())
}
