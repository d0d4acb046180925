//! Coordinate charts on the SU(n) group manifold.
//!
//! A [`Chart`] maps `n^2 - 1` real coordinates to a group element `U(x)`.
//! From `U` and its coordinate partials we extract the left-invariant
//! one-forms `U^dagger dU = i omega^a l_a` and the Cartan-Killing metric
//! `g_{mu nu} = Tr(d_mu U d_nu U^dagger) / 2`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::{build_gellmann_basis, exp_i_hermitian, GeneratorBasis};
use crate::error::{Error, Result};
use crate::matrix::{c, ComplexSquareMatrix, I};
use crate::tol;

/// How coordinate partials `d_mu U` are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeBackend {
    Analytic,
    /// Central differences; with `richardson` the step-`h` and step-`h/2`
    /// estimates are combined to cancel the leading error term.
    CentralDifference {
        step: f64,
        richardson: bool,
    },
}

impl DerivativeBackend {
    pub fn central() -> Self {
        Self::CentralDifference {
            step: tol::FD_STEP,
            richardson: false,
        }
    }
}

/// One constraint on a group of coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainBlock {
    /// Euclidean ball `|x[start..start+len]| < radius`.
    Ball {
        start: usize,
        len: usize,
        radius: f64,
    },
    /// Open interval `lo < x[index] < hi`.
    Interval { index: usize, lo: f64, hi: f64 },
    /// Angle coordinate; every real value is accepted.
    Periodic { index: usize, period: f64 },
}

/// Product of [`DomainBlock`]s covering every coordinate exactly once.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    dim: usize,
    blocks: Vec<DomainBlock>,
}

impl Domain {
    pub fn new(dim: usize, blocks: Vec<DomainBlock>) -> Self {
        Self { dim, blocks }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[DomainBlock] {
        &self.blocks
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::CoordinateCount {
                expected: self.dim,
                found: x.len(),
            });
        }
        if let Some((index, &value)) = x.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::OutsideDomain { index, value });
        }
        for block in &self.blocks {
            match *block {
                DomainBlock::Ball { start, len, radius } => {
                    let r = x[start..start + len]
                        .iter()
                        .map(|v| v * v)
                        .sum::<f64>()
                        .sqrt();
                    if r >= radius {
                        let (index, value) = x[start..start + len]
                            .iter()
                            .enumerate()
                            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                            .map(|(i, v)| (start + i, *v))
                            .unwrap_or((start, r));
                        return Err(Error::OutsideDomain { index, value });
                    }
                }
                DomainBlock::Interval { index, lo, hi } => {
                    let v = x[index];
                    if v <= lo || v >= hi {
                        return Err(Error::OutsideDomain { index, value: v });
                    }
                }
                DomainBlock::Periodic { .. } => {}
            }
        }
        Ok(())
    }

    /// Uniform sample, kept at least `margin` away from every boundary.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, margin: f64) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for block in &self.blocks {
            match *block {
                DomainBlock::Ball { start, len, radius } => {
                    let dir: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
                    let norm = dir
                        .iter()
                        .map(|v| v * v)
                        .sum::<f64>()
                        .sqrt()
                        .max(f64::MIN_POSITIVE);
                    let u: f64 = rng.random();
                    let r = (radius - margin).max(0.0) * u.powf(1.0 / len as f64);
                    for (k, d) in dir.iter().enumerate() {
                        x[start + k] = r * d / norm;
                    }
                }
                DomainBlock::Interval { index, lo, hi } => {
                    x[index] = rng.random_range((lo + margin)..(hi - margin));
                }
                DomainBlock::Periodic { index, period } => {
                    x[index] = rng.random_range(0.0..period);
                }
            }
        }
        x
    }
}

/// A differentiable parametrization `x -> U(x)` of (part of) SU(n).
pub trait Chart: Send + Sync {
    /// Orthonormal generators used to expand `U^dagger dU`.
    fn basis(&self) -> &GeneratorBasis;

    fn domain(&self) -> &Domain;

    fn backend(&self) -> DerivativeBackend;

    /// `U(x)` without domain checks.
    fn eval_unchecked(&self, x: &[f64]) -> ComplexSquareMatrix;

    /// Closed-form partials, when the chart has them.
    fn analytic_partials(&self, _x: &[f64]) -> Option<Vec<ComplexSquareMatrix>> {
        None
    }

    fn n(&self) -> usize {
        self.basis().n()
    }

    fn manifold_dim(&self) -> usize {
        self.n() * self.n() - 1
    }

    fn eval(&self, x: &[f64]) -> Result<ComplexSquareMatrix> {
        self.domain().check(x)?;
        Ok(self.eval_unchecked(x))
    }
}

/// Exponential chart `U(x) = exp(i sum_a x^a l_a)` on the ball `|x| < pi/2`.
#[derive(Debug, Clone)]
pub struct ExpChart {
    basis: GeneratorBasis,
    domain: Domain,
    backend: DerivativeBackend,
}

impl ExpChart {
    pub fn new(basis: GeneratorBasis) -> Self {
        let dim = basis.len();
        Self {
            domain: Domain::new(
                dim,
                vec![DomainBlock::Ball {
                    start: 0,
                    len: dim,
                    radius: FRAC_PI_2,
                }],
            ),
            basis,
            backend: DerivativeBackend::central(),
        }
    }

    /// Switch the central-difference backend on or off Richardson mode.
    pub fn with_richardson(mut self, richardson: bool) -> Self {
        self.backend = DerivativeBackend::CentralDifference {
            step: tol::FD_STEP,
            richardson,
        };
        self
    }
}

impl Chart for ExpChart {
    fn basis(&self) -> &GeneratorBasis {
        &self.basis
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn backend(&self) -> DerivativeBackend {
        self.backend
    }

    fn eval_unchecked(&self, x: &[f64]) -> ComplexSquareMatrix {
        exp_i_hermitian(&self.basis.combine(x), 1.0)
    }
}

pub fn exp_chart(basis: GeneratorBasis) -> ExpChart {
    ExpChart::new(basis)
}

/// Margin keeping the polar chart away from its degenerate loci.
pub const POLAR_MARGIN: f64 = 1e-3;

/// Polar chart on SU(2) = S^3: `U = cos(chi) 1 + i sin(chi) sigma . n(theta, phi)`.
///
/// Coordinates are `(chi, theta, phi)`; `phi` is periodic, `chi` and
/// `theta` live in `(1e-3, pi - 1e-3)`.
#[derive(Debug, Clone)]
pub struct Su2PolarChart {
    basis: GeneratorBasis,
    domain: Domain,
}

impl Default for Su2PolarChart {
    fn default() -> Self {
        Self::new()
    }
}

impl Su2PolarChart {
    pub fn new() -> Self {
        let basis = build_gellmann_basis(2).expect("n = 2 is valid");
        let domain = Domain::new(
            3,
            vec![
                DomainBlock::Interval {
                    index: 0,
                    lo: POLAR_MARGIN,
                    hi: PI - POLAR_MARGIN,
                },
                DomainBlock::Interval {
                    index: 1,
                    lo: POLAR_MARGIN,
                    hi: PI - POLAR_MARGIN,
                },
                DomainBlock::Periodic {
                    index: 2,
                    period: 2.0 * PI,
                },
            ],
        );
        Self { basis, domain }
    }

    /// `sigma . v` for a real 3-vector.
    fn sigma_dot(&self, v: [f64; 3]) -> ComplexSquareMatrix {
        let [x, y, z] = v;
        ComplexSquareMatrix::from_row_slice(2, &[c(z, 0.), c(x, -y), c(x, y), c(-z, 0.)])
    }
}

impl Chart for Su2PolarChart {
    fn basis(&self) -> &GeneratorBasis {
        &self.basis
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn backend(&self) -> DerivativeBackend {
        DerivativeBackend::Analytic
    }

    fn eval_unchecked(&self, x: &[f64]) -> ComplexSquareMatrix {
        let (chi, theta, phi) = (x[0], x[1], x[2]);
        let n = [
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ];
        let id = ComplexSquareMatrix::identity(2).scale_real(chi.cos());
        &id + &self.sigma_dot(n).scale(I * chi.sin())
    }

    fn analytic_partials(&self, x: &[f64]) -> Option<Vec<ComplexSquareMatrix>> {
        let (chi, theta, phi) = (x[0], x[1], x[2]);
        let (st, ct, sp, cp) = (theta.sin(), theta.cos(), phi.sin(), phi.cos());
        let n = [st * cp, st * sp, ct];
        let dn_theta = [ct * cp, ct * sp, -st];
        let dn_phi = [-st * sp, st * cp, 0.0];
        let d_chi = &ComplexSquareMatrix::identity(2).scale_real(-chi.sin())
            + &self.sigma_dot(n).scale(I * chi.cos());
        let d_theta = self.sigma_dot(dn_theta).scale(I * chi.sin());
        let d_phi = self.sigma_dot(dn_phi).scale(I * chi.sin());
        Some(vec![d_chi, d_theta, d_phi])
    }
}

pub fn su2_polar_chart() -> Su2PolarChart {
    Su2PolarChart::new()
}

fn fd_partials_step(chart: &dyn Chart, x: &[f64], h: f64) -> Result<Vec<ComplexSquareMatrix>> {
    let mut out = Vec::with_capacity(x.len());
    let mut xp = x.to_vec();
    for mu in 0..x.len() {
        xp[mu] = x[mu] + h;
        let up = chart.eval(&xp)?;
        xp[mu] = x[mu] - h;
        let um = chart.eval(&xp)?;
        xp[mu] = x[mu];
        out.push((&up - &um).scale_real(0.5 / h));
    }
    Ok(out)
}

/// Central-difference partials regardless of the chart's own backend.
pub fn central_partials(
    chart: &dyn Chart,
    x: &[f64],
    step: f64,
    richardson: bool,
) -> Result<Vec<ComplexSquareMatrix>> {
    chart.domain().check(x)?;
    let coarse = fd_partials_step(chart, x, step)?;
    if !richardson {
        return Ok(coarse);
    }
    let fine = fd_partials_step(chart, x, 0.5 * step)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(d1, d2)| &d2.scale_real(4.0 / 3.0) - &d1.scale_real(1.0 / 3.0))
        .collect())
}

/// `d_mu U(x)` for every coordinate, through the chart's backend.
pub fn partials(chart: &dyn Chart, x: &[f64]) -> Result<Vec<ComplexSquareMatrix>> {
    match chart.backend() {
        DerivativeBackend::Analytic => {
            chart.domain().check(x)?;
            chart.analytic_partials(x).ok_or_else(|| {
                Error::Internal("chart declares an analytic backend without partials".into())
            })
        }
        DerivativeBackend::CentralDifference { step, richardson } => {
            central_partials(chart, x, step, richardson)
        }
    }
}

/// Left-invariant frame at a point.
#[derive(Debug, Clone)]
pub struct FrameAtPoint {
    pub x: Vec<f64>,
    pub u: ComplexSquareMatrix,
    /// `omega[(a, mu)] = omega^a_mu`
    pub omega: DMatrix<f64>,
    /// Inverse of `omega`: column `a` holds the vector field `e_a^mu`.
    pub dual: DMatrix<f64>,
    /// `max |U^dagger d_mu U - i omega^a_mu l_a|`
    pub reconstruction_residual: f64,
    /// Largest discarded imaginary part of `omega`.
    pub imaginary_residue: f64,
}

impl FrameAtPoint {
    /// `max |omega e - 1|`
    pub fn inversion_residual(&self) -> f64 {
        let prod = &self.omega * &self.dual;
        max_identity_deviation(&prod)
    }

    /// `eta_ab omega^a omega^b`
    pub fn vielbein_metric(&self) -> DMatrix<f64> {
        self.omega.transpose() * &self.omega
    }

    /// Components `e_a(f) = e_a^mu d_mu f` of a covector.
    pub fn frame_components(&self, df: &[f64]) -> Vec<f64> {
        let d = self.dual.nrows();
        (0..self.dual.ncols())
            .map(|a| (0..d).map(|mu| self.dual[(mu, a)] * df[mu]).sum())
            .collect()
    }
}

pub(crate) fn max_identity_deviation(m: &DMatrix<f64>) -> f64 {
    let mut err: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((m[(i, j)] - target).abs());
        }
    }
    err
}

pub(crate) fn frame_from_partials(
    basis: &GeneratorBasis,
    x: &[f64],
    u: ComplexSquareMatrix,
    parts: &[ComplexSquareMatrix],
) -> Result<FrameAtPoint> {
    let dim = basis.len();
    let ud = u.adjoint();
    let mut omega = DMatrix::zeros(dim, parts.len());
    let mut reconstruction: f64 = 0.0;
    let mut imaginary: f64 = 0.0;
    for (mu, d) in parts.iter().enumerate() {
        let m = &ud * d;
        let anti = (&m + &m.adjoint()).max_abs();
        let trace = m.trace().norm();
        if anti.max(trace) > tol::FRAME {
            return Err(Error::NotInAlgebra {
                residual: anti.max(trace),
            });
        }
        // omega^a = Tr(l_a M) / 2i
        let coeffs: Vec<Complex64> = basis.coefficients(&m).into_iter().map(|z| z / I).collect();
        let mut rebuilt = ComplexSquareMatrix::zeros(basis.n());
        for (a, z) in coeffs.iter().enumerate() {
            imaginary = imaginary.max(z.im.abs());
            omega[(a, mu)] = z.re;
            rebuilt = &rebuilt + &basis.get(a).scale(I * z.re);
        }
        reconstruction = reconstruction.max(m.max_deviation(&rebuilt));
    }
    if imaginary > tol::FRAME {
        return Err(Error::NotInAlgebra {
            residual: imaginary,
        });
    }
    if reconstruction > tol::FRAME {
        return Err(Error::NotInAlgebra {
            residual: reconstruction,
        });
    }
    let det = omega.determinant();
    if det.abs() < tol::IDENTITY {
        return Err(Error::ChartDegenerate { det: det.abs() });
    }
    let dual = omega
        .clone()
        .try_inverse()
        .ok_or(Error::ChartDegenerate { det: det.abs() })?;
    Ok(FrameAtPoint {
        x: x.to_vec(),
        u,
        omega,
        dual,
        reconstruction_residual: reconstruction,
        imaginary_residue: imaginary,
    })
}

/// Left-invariant one-forms `omega^a_mu = Tr(l_a U^dagger d_mu U) / 2i`.
pub fn left_invariant_frame(chart: &dyn Chart, x: &[f64]) -> Result<FrameAtPoint> {
    let u = chart.eval(x)?;
    let parts = partials(chart, x)?;
    frame_from_partials(chart.basis(), x, u, &parts)
}

/// Cartan-Killing metric and its inverse at a point.
#[derive(Debug, Clone)]
pub struct MetricAtPoint {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
}

impl MetricAtPoint {
    /// Symmetric positive-definite check through Cholesky.
    pub fn from_matrix(g: DMatrix<f64>) -> Result<Self> {
        let g = (&g + g.transpose()) * 0.5;
        let chol = g.clone().cholesky().ok_or(Error::DegenerateMetric)?;
        let g_inv = chol.inverse();
        if g_inv.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateMetric);
        }
        Ok(Self { g, g_inv })
    }

    pub fn inversion_residual(&self) -> f64 {
        max_identity_deviation(&(&self.g * &self.g_inv))
    }

    /// `g^{mu nu} a_mu b_nu`
    pub fn inverse_product(&self, a: &[f64], b: &[f64]) -> f64 {
        inverse_product(&self.g_inv, a, b)
    }
}

pub(crate) fn inverse_product(g_inv: &DMatrix<f64>, a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for mu in 0..a.len() {
        for nu in 0..b.len() {
            s += a[mu] * g_inv[(mu, nu)] * b[nu];
        }
    }
    s
}

/// `g_{mu nu} = Re Tr(d_mu U d_nu U^dagger) / 2`
pub fn trace_metric(parts: &[ComplexSquareMatrix]) -> DMatrix<f64> {
    let d = parts.len();
    let adj: Vec<ComplexSquareMatrix> = parts.iter().map(|p| p.adjoint()).collect();
    DMatrix::from_fn(d, d, |mu, nu| 0.5 * (&parts[mu] * &adj[nu]).trace().re)
}

/// Cartan-Killing metric from the trace formula.
pub fn ck_metric(chart: &dyn Chart, x: &[f64]) -> Result<MetricAtPoint> {
    let parts = partials(chart, x)?;
    MetricAtPoint::from_matrix(trace_metric(&parts))
}

/// Everything the amplitude machinery needs at one point, computed once.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub frame: FrameAtPoint,
    pub metric: MetricAtPoint,
}

impl Geometry {
    pub fn at(chart: &dyn Chart, x: &[f64]) -> Result<Self> {
        let u = chart.eval(x)?;
        let parts = partials(chart, x)?;
        let metric = MetricAtPoint::from_matrix(trace_metric(&parts))?;
        let frame = frame_from_partials(chart.basis(), x, u, &parts)?;
        Ok(Self { frame, metric })
    }

    pub fn u(&self) -> &ComplexSquareMatrix {
        &self.frame.u
    }

    /// `max |g_trace - omega^T omega|`
    pub fn vielbein_deviation(&self) -> f64 {
        (&self.metric.g - self.frame.vielbein_metric()).abs().max()
    }
}
