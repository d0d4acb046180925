//! Cartan decomposition of su(n) relative to a reference state.
//!
//! Given `|psi_i>` the algebra splits into the isotropy part (an su(n-1)
//! acting on the orthogonal complement plus the U(1) generator `l_0`) and
//! `2(n-1)` coset generators `X_k, Y_k`. The coset representative
//! `K(y) = exp(i y^A l_A)` produces a section `|psi(y)> = K(y)|psi_i>` of
//! ray space, on which we build the Fubini-Study metric and the Berry
//! connection `A = -i <psi|d psi>`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::{build_gellmann_basis, exp_i_hermitian, GeneratorBasis, StatePair};
use crate::amplitude::{phase_partials_fd, wrap_angle, PolarAmplitude};
use crate::charts::{inverse_product, Chart, DerivativeBackend, Domain, DomainBlock, Geometry};
use crate::error::{Error, Result};
use crate::matrix::{inner, ComplexSquareMatrix, StateVector, I};
use crate::{isotropy_eigenvalue, tol};

/// Adapted generator set `{l_A} u {l_i} u {l_0}` for a reference state.
#[derive(Debug, Clone)]
pub struct CartanFrame {
    pub n: usize,
    pub psi_i: StateVector,
    /// `sqrt(2/(n(n-1))) (1 - n |psi_i><psi_i|)`; eigenvalue
    /// `-sqrt(2(n-1)/n)` on `psi_i`.
    pub lambda0: ComplexSquareMatrix,
    /// Interleaved `X_1, Y_1, X_2, Y_2, ...`.
    pub coset_gens: Vec<ComplexSquareMatrix>,
    /// su(n-1) generators supported on the complement of `psi_i`.
    pub iso_gens: Vec<ComplexSquareMatrix>,
    /// Orthonormal basis `|k>` of the complement of `psi_i`.
    pub complement_basis: Vec<StateVector>,
}

/// Worst-case deviations of a [`CartanFrame`] from its invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartanCheck {
    pub lambda0_trace: f64,
    /// `|Tr(l_0^2)/2 - 1|`
    pub lambda0_norm: f64,
    /// `| l_0 psi_i + sqrt(2(n-1)/n) psi_i |`
    pub eigen_residual: f64,
    /// Largest Killing-form deviation from orthonormality over the whole
    /// adapted set.
    pub orthonormality: f64,
    pub generator_count: usize,
}

/// Build the adapted frame for `psi_i`.
///
/// The complement basis comes from Gram-Schmidt (applied twice) on the
/// standard basis vectors, skipping the one with the largest overlap with
/// `psi_i`; the choice is deterministic.
pub fn build_cartan_frame(psi_i: &StateVector, basis: &GeneratorBasis) -> Result<CartanFrame> {
    let n = basis.n();
    if psi_i.len() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            found: psi_i.len(),
        });
    }
    let norm = psi_i.norm();
    if (norm - 1.0).abs() > tol::CONSTRUCTION {
        return Err(Error::NotNormalized { norm });
    }

    let skip = (0..n)
        .max_by(|&a, &b| psi_i[a].norm().total_cmp(&psi_i[b].norm()))
        .expect("n >= 2");
    let mut accepted: Vec<StateVector> = vec![psi_i.clone()];
    for j in (0..n).filter(|&j| j != skip) {
        let mut v = StateVector::from_fn(n, |r, _| {
            if r == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        for _ in 0..2 {
            for u in &accepted {
                let proj = inner(u, &v);
                v -= u * proj;
            }
        }
        let len = v.norm();
        accepted.push(v / Complex64::new(len, 0.0));
    }
    let complement_basis: Vec<StateVector> = accepted.split_off(1);

    let nf = n as f64;
    let lambda0 = (&ComplexSquareMatrix::identity(n)
        - &ComplexSquareMatrix::outer(psi_i, psi_i).scale_real(nf))
        .scale_real((2.0 / (nf * (nf - 1.0))).sqrt());

    let mut coset_gens = Vec::with_capacity(2 * (n - 1));
    for k in &complement_basis {
        let ik = ComplexSquareMatrix::outer(psi_i, k);
        let ki = ComplexSquareMatrix::outer(k, psi_i);
        coset_gens.push(&ik + &ki);
        coset_gens.push(&ik.scale(I) - &ki.scale(I));
    }

    let iso_gens = if n >= 3 {
        let sub = build_gellmann_basis(n - 1)?;
        let b = DMatrix::from_fn(n, n - 1, |r, col| complement_basis[col][r]);
        sub.iter()
            .map(|g| {
                ComplexSquareMatrix::from_dmatrix(&b * g.as_dmatrix() * b.adjoint())
                    .expect("square by construction")
            })
            .collect()
    } else {
        Vec::new()
    };

    Ok(CartanFrame {
        n,
        psi_i: psi_i.clone(),
        lambda0,
        coset_gens,
        iso_gens,
        complement_basis,
    })
}

impl CartanFrame {
    pub fn coset_dim(&self) -> usize {
        2 * (self.n - 1)
    }

    pub fn iso_dim(&self) -> usize {
        self.iso_gens.len()
    }

    /// Ordered as coset, su(n-1), then `l_0` last.
    pub fn adapted_generators(&self) -> Vec<ComplexSquareMatrix> {
        self.coset_gens
            .iter()
            .chain(&self.iso_gens)
            .chain(std::iter::once(&self.lambda0))
            .cloned()
            .collect()
    }

    pub fn adapted_basis(&self) -> Result<GeneratorBasis> {
        GeneratorBasis::from_generators(self.n, self.adapted_generators())
    }

    /// Isotropy generators including `l_0` (last).
    pub fn isotropy_with_u1(&self) -> Vec<ComplexSquareMatrix> {
        self.iso_gens
            .iter()
            .chain(std::iter::once(&self.lambda0))
            .cloned()
            .collect()
    }

    pub fn check(&self) -> CartanCheck {
        let l0 = &self.lambda0;
        let c = isotropy_eigenvalue(self.n);
        let eig = l0.apply(&self.psi_i) + &self.psi_i * Complex64::new(c, 0.0);
        let gens = self.adapted_generators();
        let mut ortho: f64 = 0.0;
        for (a, ga) in gens.iter().enumerate() {
            for (b, gb) in gens.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                ortho = ortho.max(((ga * gb).trace() * 0.5 - target).norm());
            }
        }
        CartanCheck {
            lambda0_trace: l0.trace().norm(),
            lambda0_norm: ((l0 * l0).trace() * 0.5 - 1.0).norm(),
            eigen_residual: eig.norm(),
            orthonormality: ortho,
            generator_count: gens.len(),
        }
    }

    /// `K(y) = exp(i y^A l_A)`
    pub fn coset_representative(&self, y: &[f64]) -> ComplexSquareMatrix {
        exp_i_hermitian(&combine(&self.coset_gens, y, self.n), 1.0)
    }

    /// `H_S(xi) = exp(i xi^j l_j)` over the su(n-1) generators.
    pub fn isotropy_element(&self, xi: &[f64]) -> ComplexSquareMatrix {
        if self.iso_gens.is_empty() {
            return ComplexSquareMatrix::identity(self.n);
        }
        exp_i_hermitian(&combine(&self.iso_gens, xi, self.n), 1.0)
    }
}

fn combine(gens: &[ComplexSquareMatrix], coeffs: &[f64], n: usize) -> ComplexSquareMatrix {
    gens.iter()
        .zip(coeffs)
        .fold(ComplexSquareMatrix::zeros(n), |acc, (g, &x)| {
            &acc + &g.scale_real(x)
        })
}

/// Chart `U(y, xi_S, xi_0) = K(y) H_S(xi_S) exp(i l_0 xi_0)` with
/// coordinates ordered `(y, xi_S, xi_0)`.
#[derive(Debug, Clone)]
pub struct FullCartanChart {
    pub frame: CartanFrame,
    basis: GeneratorBasis,
    domain: Domain,
}

impl FullCartanChart {
    pub fn new(frame: CartanFrame) -> Result<Self> {
        let basis = frame.adapted_basis()?;
        let m = frame.coset_dim();
        let s = frame.iso_dim();
        let mut blocks = vec![DomainBlock::Ball {
            start: 0,
            len: m,
            radius: FRAC_PI_2,
        }];
        if s > 0 {
            blocks.push(DomainBlock::Ball {
                start: m,
                len: s,
                radius: FRAC_PI_2,
            });
        }
        blocks.push(DomainBlock::Interval {
            index: m + s,
            lo: -PI,
            hi: PI,
        });
        let domain = Domain::new(m + s + 1, blocks);
        Ok(Self {
            frame,
            basis,
            domain,
        })
    }

    pub fn coords(&self, y: &[f64], xi_s: &[f64], xi0: f64) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.domain.dim());
        x.extend_from_slice(y);
        x.extend_from_slice(xi_s);
        x.push(xi0);
        x
    }

    pub fn split<'a>(&self, x: &'a [f64]) -> (&'a [f64], &'a [f64], f64) {
        let m = self.frame.coset_dim();
        let s = self.frame.iso_dim();
        (&x[..m], &x[m..m + s], x[m + s])
    }
}

impl Chart for FullCartanChart {
    fn basis(&self) -> &GeneratorBasis {
        &self.basis
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn backend(&self) -> DerivativeBackend {
        DerivativeBackend::central()
    }

    fn eval_unchecked(&self, x: &[f64]) -> ComplexSquareMatrix {
        let (y, xi_s, xi0) = self.split(x);
        let k = self.frame.coset_representative(y);
        let h = self.frame.isotropy_element(xi_s);
        let phase = exp_i_hermitian(&self.frame.lambda0, xi0);
        &(&k * &h) * &phase
    }
}

/// Section data at one coset point.
#[derive(Debug, Clone)]
pub struct SectionPoint {
    pub y: Vec<f64>,
    /// `K(y)|psi_i>`
    pub psi: StateVector,
    pub dpsi: Vec<StateVector>,
    /// `tau[(A, mu)] = Tr(l_A K^dagger d_mu K) / 2i`
    pub tau: DMatrix<f64>,
    /// Same projection onto the isotropy generators, `l_0` in the last row.
    pub alpha: DMatrix<f64>,
    /// `eta_AB tau^A tau^B`
    pub fs_metric: DMatrix<f64>,
    /// `Re <d psi|d psi> - <d psi|psi><psi|d psi>`
    pub fs_metric_state: DMatrix<f64>,
    pub fs_inverse: DMatrix<f64>,
    /// `A_mu = -i <psi|d_mu psi>`
    pub berry: Vec<f64>,
    /// Largest imaginary part discarded from `A`.
    pub berry_imag_residue: f64,
}

impl SectionPoint {
    pub fn alpha0(&self) -> Vec<f64> {
        let last = self.alpha.nrows() - 1;
        self.alpha.row(last).iter().copied().collect()
    }

    /// `max |g_FS(vielbein) - g_FS(state)|`
    pub fn fs_crosscheck(&self) -> f64 {
        (&self.fs_metric - &self.fs_metric_state).abs().max()
    }

    /// `max_mu |alpha^0_mu - sign sqrt(n/(2(n-1))) A_mu|`
    pub fn alpha0_connection_residual(&self, sign: f64) -> f64 {
        let n = (self.psi.len()) as f64;
        let k = sign * (n / (2.0 * (n - 1.0))).sqrt();
        self.alpha0()
            .iter()
            .zip(&self.berry)
            .map(|(a, b)| (a - k * b).abs())
            .fold(0.0, f64::max)
    }
}

/// Section `|psi(y)> = K(y)|psi_i>` with its Fubini-Study metric (both
/// constructions) and Berry connection. Derivatives of `K` are exact
/// (divided differences on the spectrum of `y^A l_A`).
pub fn section(frame: &CartanFrame, y: &[f64]) -> Result<SectionPoint> {
    section_with(frame, y, DerivativeBackend::Analytic)
}

/// [`section`] with a chosen derivative backend for `d K`.
pub fn section_with(
    frame: &CartanFrame,
    y: &[f64],
    backend: DerivativeBackend,
) -> Result<SectionPoint> {
    let m = frame.coset_dim();
    if y.len() != m {
        return Err(Error::CoordinateCount {
            expected: m,
            found: y.len(),
        });
    }
    let ball = Domain::new(
        m,
        vec![DomainBlock::Ball {
            start: 0,
            len: m,
            radius: FRAC_PI_2,
        }],
    );
    ball.check(y)?;

    let gen = combine(&frame.coset_gens, y, frame.n);
    let eig = gen.hermitian_eigen();
    let k = eig.map_spectrum(|l| Complex64::from_polar(1.0, l));
    let dks: Vec<ComplexSquareMatrix> = match backend {
        DerivativeBackend::Analytic => frame
            .coset_gens
            .iter()
            .map(|l| eig.exp_i_derivative(l))
            .collect(),
        DerivativeBackend::CentralDifference { step, richardson } => {
            let mut ys = y.to_vec();
            let mut out = Vec::with_capacity(m);
            for mu in 0..m {
                let mut central = |h: f64| -> Result<ComplexSquareMatrix> {
                    ys[mu] = y[mu] + h;
                    ball.check(&ys)?;
                    let kp = frame.coset_representative(&ys);
                    ys[mu] = y[mu] - h;
                    ball.check(&ys)?;
                    let km = frame.coset_representative(&ys);
                    ys[mu] = y[mu];
                    Ok((&kp - &km).scale_real(0.5 / h))
                };
                let coarse = central(step)?;
                out.push(if richardson {
                    let fine = central(0.5 * step)?;
                    (&fine.scale_real(4.0) - &coarse).scale_real(1.0 / 3.0)
                } else {
                    coarse
                });
            }
            out
        }
    };

    let kd = k.adjoint();
    let psi = k.apply(&frame.psi_i);
    let iso = frame.isotropy_with_u1();
    let mut tau = DMatrix::zeros(m, m);
    let mut alpha = DMatrix::zeros(iso.len(), m);
    let mut dpsi = Vec::with_capacity(m);
    for (mu, dk) in dks.iter().enumerate() {
        let mc = &kd * dk;
        for (a, l) in frame.coset_gens.iter().enumerate() {
            tau[(a, mu)] = ((l * &mc).trace() / (2.0 * I)).re;
        }
        for (i, l) in iso.iter().enumerate() {
            alpha[(i, mu)] = ((l * &mc).trace() / (2.0 * I)).re;
        }
        dpsi.push(dk.apply(&frame.psi_i));
    }

    let fs_metric = tau.transpose() * &tau;
    let overlaps: Vec<Complex64> = dpsi.iter().map(|d| inner(&psi, d)).collect();
    let fs_metric_state = DMatrix::from_fn(m, m, |mu, nu| {
        let a = inner(&dpsi[mu], &dpsi[nu]).re;
        let b = (overlaps[mu].conj() * overlaps[nu]).re;
        a - b
    });
    let fs_metric_state = (&fs_metric_state + fs_metric_state.transpose()) * 0.5;
    let fs_inverse = fs_metric
        .clone()
        .cholesky()
        .ok_or(Error::DegenerateSection)?
        .inverse();

    let mut berry_imag_residue: f64 = 0.0;
    let berry = overlaps
        .iter()
        .map(|z| {
            let a = -I * z;
            berry_imag_residue = berry_imag_residue.max(a.im.abs());
            a.re
        })
        .collect();

    Ok(SectionPoint {
        y: y.to_vec(),
        psi,
        dpsi,
        tau,
        alpha,
        fs_metric,
        fs_metric_state,
        fs_inverse,
        berry,
        berry_imag_residue,
    })
}

/// Absolute residuals of the ray-space relations on the section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CprelResiduals {
    /// `| q |grad eta - A|^2 - (1/p - 1) |`
    pub eta: f64,
    /// `| q |grad log sqrt p|^2 - (1/p - 1) |`
    pub log_modulus: f64,
    /// `| grad p . (grad eta - A) |`
    pub orthogonality: f64,
    /// First residual with `grad eta + A` instead, for the sign convention
    /// comparison.
    pub eta_plus_connection: f64,
    pub p: f64,
}

impl CprelResiduals {
    pub fn max(&self) -> f64 {
        self.eta.max(self.log_modulus).max(self.orthogonality)
    }
}

fn check_reference(pair: &StatePair, frame: &CartanFrame) -> Result<()> {
    if pair.dim() != frame.n {
        return Err(Error::ShapeMismatch {
            expected: frame.n,
            found: pair.dim(),
        });
    }
    if (&pair.psi_i - &frame.psi_i).norm() > tol::CONSTRUCTION {
        return Err(Error::ReferenceStateMismatch);
    }
    Ok(())
}

/// Ray-space relations on the section at coset point `y`, with the
/// Fubini-Study metric scaled by `q` (`q = 1` is the vielbein metric).
///
/// `eta` and `log p` are differentiated numerically (step 1e-5 with one
/// Richardson level); the metric and connection come from [`section`].
pub fn verify_cprel(
    pair: &StatePair,
    frame: &CartanFrame,
    y: &[f64],
    q: f64,
) -> Result<CprelResiduals> {
    check_reference(pair, frame)?;
    let sp = section(frame, y)?;
    let h = tol::FD_STEP;
    let amp_at = |ys: &[f64]| section_amplitude(pair, frame, ys);
    let centre = amp_at(y);
    if centre.p < tol::P_GRAD {
        return Err(Error::NearZeroAmplitude {
            p: centre.p,
            threshold: tol::P_GRAD,
        });
    }
    let m = y.len();
    let mut d_eta = vec![0.0; m];
    let mut d_log = vec![0.0; m];
    let mut ys = y.to_vec();
    for mu in 0..m {
        // central differences at h and h/2, Richardson-combined
        let mut central = |step: f64| -> Result<(f64, f64)> {
            ys[mu] = y[mu] + step;
            let plus = amp_at(&ys);
            ys[mu] = y[mu] - step;
            let minus = amp_at(&ys);
            ys[mu] = y[mu];
            if !plus.phase_defined || !minus.phase_defined {
                return Err(Error::NearZeroAmplitude {
                    p: plus.p.min(minus.p),
                    threshold: tol::P_MIN,
                });
            }
            let de = (wrap_angle(plus.eta - centre.eta) + wrap_angle(centre.eta - minus.eta))
                / (2.0 * step);
            let dl = 0.25 * (plus.p.ln() - minus.p.ln()) / step;
            Ok((de, dl))
        };
        let (e1, l1) = central(h)?;
        let (e2, l2) = central(0.5 * h)?;
        d_eta[mu] = (4.0 * e2 - e1) / 3.0;
        d_log[mu] = (4.0 * l2 - l1) / 3.0;
    }

    let p = centre.p;
    let target = 1.0 / p - 1.0;
    // metric q g_FS has inverse g_FS^{-1} / q
    let g_inv = &sp.fs_inverse / q;
    let minus_a: Vec<f64> = d_eta.iter().zip(&sp.berry).map(|(e, a)| e - a).collect();
    let plus_a: Vec<f64> = d_eta.iter().zip(&sp.berry).map(|(e, a)| e + a).collect();
    let d_p: Vec<f64> = d_log.iter().map(|v| 2.0 * p * v).collect();
    Ok(CprelResiduals {
        eta: (q * inverse_product(&g_inv, &minus_a, &minus_a) - target).abs(),
        log_modulus: (q * inverse_product(&g_inv, &d_log, &d_log) - target).abs(),
        orthogonality: inverse_product(&g_inv, &d_p, &minus_a).abs(),
        eta_plus_connection: (q * inverse_product(&g_inv, &plus_a, &plus_a) - target).abs(),
        p,
    })
}

/// `|<f|U(y, xi)|i> - e^{-i sqrt(2(n-1)/n) xi_0} <f|psi(y)>|`
pub fn amplitude_factorization_residual(
    pair: &StatePair,
    chart: &FullCartanChart,
    y: &[f64],
    xi_s: &[f64],
    xi0: f64,
) -> Result<f64> {
    check_reference(pair, &chart.frame)?;
    if xi_s.len() != chart.frame.iso_dim() {
        return Err(Error::CoordinateCount {
            expected: chart.frame.iso_dim(),
            found: xi_s.len(),
        });
    }
    let x = chart.coords(y, xi_s, xi0);
    let lhs = pair.amplitude(&chart.eval(&x)?);
    let psi = chart
        .frame
        .coset_representative(y)
        .apply(&chart.frame.psi_i);
    let c = isotropy_eigenvalue(chart.frame.n);
    let rhs = Complex64::from_polar(1.0, -c * xi0) * inner(&pair.psi_f, &psi);
    Ok((lhs - rhs).norm())
}

/// Both sides of the three identities linking the group-manifold
/// gradients (full Cartan-Killing inverse) to the coset gradients
/// (Fubini-Study inverse) at `xi = 0`.
///
/// `D eta = d_par eta - alpha^i nabla_i eta` is assembled from its
/// definition, with the isotropy sum running over su(n-1) and `l_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeReport {
    /// `g_CK^{-1}(d eta, d eta)`, `g_CK^{-1}(d eta, d p)`, `g_CK^{-1}(d p, d p)`
    pub lhs: [f64; 3],
    pub rhs: [f64; 3],
    pub residuals: [f64; 3],
    /// `e_0(eta)`: dual-frame component along `l_0`.
    pub nabla0_eta: f64,
    /// Coordinate partial `d eta / d xi_0`.
    pub d_xi0_eta: f64,
    /// Largest `|e_i(eta)|` over the su(n-1) directions.
    pub max_su_nabla_eta: f64,
    /// First identity with `D eta` replaced by `d_par eta + A`.
    pub residual_plus_connection: f64,
    /// First identity with `D eta` replaced by `d_par eta - A`.
    pub residual_minus_connection: f64,
    pub p: f64,
}

impl BridgeReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

pub fn bridge_identities(
    pair: &StatePair,
    chart: &FullCartanChart,
    y: &[f64],
) -> Result<BridgeReport> {
    check_reference(pair, &chart.frame)?;
    let frame = &chart.frame;
    let m = frame.coset_dim();
    let x = chart.coords(y, &vec![0.0; frame.iso_dim()], 0.0);
    let geo = Geometry::at(chart, &x)?;
    let (amp, d_eta, d_log) = phase_partials_fd(pair, chart, &x, tol::FD_STEP)?;
    if amp.p < 1e-6 {
        return Err(Error::NearZeroAmplitude {
            p: amp.p,
            threshold: 1e-6,
        });
    }
    let p = amp.p;
    let d_p: Vec<f64> = d_log.iter().map(|v| 2.0 * p * v).collect();
    let g_ck = &geo.metric;
    let lhs = [
        g_ck.inverse_product(&d_eta, &d_eta),
        g_ck.inverse_product(&d_eta, &d_p),
        g_ck.inverse_product(&d_p, &d_p),
    ];

    let nabla_eta = geo.frame.frame_components(&d_eta);
    let nabla_p = geo.frame.frame_components(&d_p);
    let sp = section(frame, y)?;
    let covariant = |df: &[f64], nabla: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|mu| {
                let correction: f64 = (0..sp.alpha.nrows())
                    .map(|i| sp.alpha[(i, mu)] * nabla[m + i])
                    .sum();
                df[mu] - correction
            })
            .collect()
    };
    let d_eta_par = &d_eta[..m];
    let d_p_par = &d_p[..m];
    let cov_eta = covariant(d_eta_par, &nabla_eta);
    let cov_p = covariant(d_p_par, &nabla_p);
    let bound = isotropy_eigenvalue(frame.n).powi(2);
    let g_fs = &sp.fs_inverse;
    let rhs = [
        inverse_product(g_fs, &cov_eta, &cov_eta) + bound,
        inverse_product(g_fs, &cov_eta, &cov_p),
        inverse_product(g_fs, &cov_p, &cov_p),
    ];
    let residuals = [
        (lhs[0] - rhs[0]).abs(),
        (lhs[1] - rhs[1]).abs(),
        (lhs[2] - rhs[2]).abs(),
    ];

    let shifted = |sign: f64| -> f64 {
        let v: Vec<f64> = d_eta_par
            .iter()
            .zip(&sp.berry)
            .map(|(e, a)| e + sign * a)
            .collect();
        (lhs[0] - inverse_product(g_fs, &v, &v) - bound).abs()
    };

    let last = nabla_eta.len() - 1;
    Ok(BridgeReport {
        lhs,
        rhs,
        residuals,
        nabla0_eta: nabla_eta[last],
        d_xi0_eta: d_eta[d_eta.len() - 1],
        max_su_nabla_eta: nabla_eta[m..last].iter().fold(0.0, |a, v| a.max(v.abs())),
        residual_plus_connection: shifted(1.0),
        residual_minus_connection: shifted(-1.0),
        p,
    })
}

/// `max |g_CK(coset block) - (g_FS + sum_i alpha^i alpha^i)|` at `xi = 0`.
pub fn ck_decomposition_residual(chart: &FullCartanChart, y: &[f64]) -> Result<f64> {
    let m = chart.frame.coset_dim();
    let x = chart.coords(y, &vec![0.0; chart.frame.iso_dim()], 0.0);
    let geo = Geometry::at(chart, &x)?;
    let sp = section(&chart.frame, y)?;
    let predicted = &sp.fs_metric + sp.alpha.transpose() * &sp.alpha;
    let block = geo.metric.g.view((0, 0), (m, m));
    Ok((block - predicted).abs().max())
}

/// Amplitude `<f|psi(y)>` on the section.
pub fn section_amplitude(pair: &StatePair, frame: &CartanFrame, y: &[f64]) -> PolarAmplitude {
    let psi = frame.coset_representative(y).apply(&frame.psi_i);
    PolarAmplitude::from_value(inner(&pair.psi_f, &psi))
}
