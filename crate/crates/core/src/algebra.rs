//! Lie-algebra structure of SU(n) in the defining representation.
//!
//! Generators are normalized so that `Tr(l_a l_b) = 2 delta_ab`; the
//! Cartan-Killing form on the algebra is then `eta_ab = Tr(l_a l_b) / 2`,
//! i.e. the identity matrix in this basis.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexSquareMatrix, StateVector, I};
use crate::tol;

/// Ordered set of `n^2 - 1` traceless Hermitian generators.
#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    n: usize,
    generators: Vec<ComplexSquareMatrix>,
}

/// Worst-case deviations of a basis from its defining invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisCheck {
    pub hermiticity: f64,
    pub trace: f64,
    /// `max_ab |Tr(l_a l_b)/2 - delta_ab|`
    pub killing: f64,
}

impl BasisCheck {
    pub fn max(&self) -> f64 {
        self.hermiticity.max(self.trace).max(self.killing)
    }
}

impl GeneratorBasis {
    /// Wraps an explicit list of generators after validating count, shape,
    /// Hermiticity, tracelessness and orthonormality (all to 1e-12).
    pub fn from_generators(n: usize, generators: Vec<ComplexSquareMatrix>) -> Result<Self> {
        if generators.len() != n * n - 1 {
            return Err(Error::ShapeMismatch {
                expected: n * n - 1,
                found: generators.len(),
            });
        }
        if let Some(g) = generators.iter().find(|g| g.dim() != n) {
            return Err(Error::ShapeMismatch {
                expected: n,
                found: g.dim(),
            });
        }
        let basis = Self { n, generators };
        let check = basis.check();
        if check.max() > tol::CONSTRUCTION {
            return Err(Error::InvalidGenerator(format!(
                "basis violates invariants: {check:?}"
            )));
        }
        Ok(basis)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[ComplexSquareMatrix] {
        &self.generators
    }

    pub fn get(&self, a: usize) -> &ComplexSquareMatrix {
        &self.generators[a]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ComplexSquareMatrix> {
        self.generators.iter()
    }

    pub fn check(&self) -> BasisCheck {
        let mut out = BasisCheck {
            hermiticity: 0.0,
            trace: 0.0,
            killing: 0.0,
        };
        for (a, la) in self.generators.iter().enumerate() {
            out.hermiticity = out.hermiticity.max(la.hermiticity_error());
            out.trace = out.trace.max(la.trace().norm());
            for (b, lb) in self.generators.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                let k = (la * lb).trace() * 0.5;
                out.killing = out.killing.max((k - target).norm());
            }
        }
        out
    }

    /// Coefficients `Tr(l_a M) / 2`; for `M` in the algebra these are the
    /// expansion coefficients `M = sum_a c_a l_a`.
    pub fn coefficients(&self, m: &ComplexSquareMatrix) -> Vec<Complex64> {
        self.generators
            .iter()
            .map(|l| (l * m).trace() * 0.5)
            .collect()
    }

    /// `sum_a coeffs[a] l_a`
    pub fn combine(&self, coeffs: &[f64]) -> ComplexSquareMatrix {
        assert_eq!(coeffs.len(), self.len(), "coefficient count");
        let mut acc = ComplexSquareMatrix::zeros(self.n);
        for (l, &x) in self.generators.iter().zip(coeffs) {
            if x != 0.0 {
                acc = &acc + &l.scale_real(x);
            }
        }
        acc
    }
}

/// Generalized Gell-Mann basis.
///
/// Ordering: symmetric `E_jk + E_kj` for `j < k` lexicographic, then the
/// antisymmetric `-i E_jk + i E_kj` in the same order, then the diagonal
/// generators `sqrt(2/(l(l+1))) (sum_{m<l} E_mm - l E_ll)` for `l = 1..n-1`.
/// For `n = 2` this reproduces the Pauli matrices in the order x, y, z.
pub fn build_gellmann_basis(n: usize) -> Result<GeneratorBasis> {
    if n < 2 {
        return Err(Error::InvalidDimension { n, min: 2 });
    }
    let one = Complex64::new(1.0, 0.0);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| ((j + 1)..n).map(move |k| (j, k)))
        .collect();
    let mut generators = Vec::with_capacity(n * n - 1);
    for &(j, k) in &pairs {
        let mut m = ComplexSquareMatrix::zeros(n).into_dmatrix();
        m[(j, k)] = one;
        m[(k, j)] = one;
        generators.push(ComplexSquareMatrix::from_dmatrix(m)?);
    }
    for &(j, k) in &pairs {
        let mut m = ComplexSquareMatrix::zeros(n).into_dmatrix();
        m[(j, k)] = -I;
        m[(k, j)] = I;
        generators.push(ComplexSquareMatrix::from_dmatrix(m)?);
    }
    for l in 1..n {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = ComplexSquareMatrix::zeros(n).into_dmatrix();
        for d in 0..l {
            m[(d, d)] = Complex64::new(norm, 0.0);
        }
        m[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
        generators.push(ComplexSquareMatrix::from_dmatrix(m)?);
    }
    Ok(GeneratorBasis { n, generators })
}

/// Cartan-Killing inner product `Re Tr(AB) / 2`.
///
/// When both arguments are Hermitian the trace must be real; an imaginary
/// part above 1e-12 (relative to the trace magnitude) is reported.
pub fn killing_inner(a: &ComplexSquareMatrix, b: &ComplexSquareMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let tr = (a * b).trace();
    if a.is_hermitian(tol::CONSTRUCTION)
        && b.is_hermitian(tol::CONSTRUCTION)
        && tr.im.abs() > tol::CONSTRUCTION * tr.norm().max(1.0)
    {
        return Err(Error::ComplexKillingForm { imag: tr.im });
    }
    Ok(0.5 * tr.re)
}

/// `|sum_a Tr(X l_a Y l_a)/2 - (Tr X Tr Y - Tr(XY)/n)|`.
pub fn completeness_residual(
    x: &ComplexSquareMatrix,
    y: &ComplexSquareMatrix,
    basis: &GeneratorBasis,
) -> Result<f64> {
    let n = basis.n();
    for d in [x.dim(), y.dim()] {
        if d != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                found: d,
            });
        }
    }
    let lhs: Complex64 = basis
        .iter()
        .map(|l| {
            let xl = x * l;
            let yl = y * l;
            (&xl * &yl).trace()
        })
        .sum::<Complex64>()
        * 0.5;
    let rhs = x.trace() * y.trace() - (x * y).trace() / n as f64;
    Ok((lhs - rhs).norm())
}

/// `exp(i l t)` for Hermitian `l`, through its eigendecomposition.
pub fn expm_generator(l: &ComplexSquareMatrix, t: f64) -> Result<ComplexSquareMatrix> {
    let herm = l.hermiticity_error();
    if herm > tol::IDENTITY {
        return Err(Error::NotHermitian { residual: herm });
    }
    Ok(exp_i_hermitian(l, t))
}

/// Unchecked variant used by chart evaluators whose generators are
/// Hermitian by construction.
pub(crate) fn exp_i_hermitian(l: &ComplexSquareMatrix, t: f64) -> ComplexSquareMatrix {
    l.hermitian_eigen()
        .map_spectrum(|lk| Complex64::from_polar(1.0, lk * t))
}

/// A pair of unit-norm states `(psi_i, psi_f)` defining the amplitude
/// `<psi_f| U |psi_i>`.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub psi_i: StateVector,
    pub psi_f: StateVector,
}

impl StatePair {
    /// Both states must already be normalized to 1e-12.
    pub fn new(psi_i: StateVector, psi_f: StateVector) -> Result<Self> {
        if psi_i.len() != psi_f.len() {
            return Err(Error::ShapeMismatch {
                expected: psi_i.len(),
                found: psi_f.len(),
            });
        }
        for v in [&psi_i, &psi_f] {
            let norm = v.norm();
            if (norm - 1.0).abs() > tol::CONSTRUCTION {
                return Err(Error::NotNormalized { norm });
            }
        }
        Ok(Self { psi_i, psi_f })
    }

    /// Normalizes both inputs first; zero vectors are rejected.
    pub fn normalized(psi_i: StateVector, psi_f: StateVector) -> Result<Self> {
        let fix = |v: StateVector| {
            let norm = v.norm();
            if norm == 0.0 || !norm.is_finite() {
                Err(Error::NotNormalized { norm })
            } else {
                Ok(v / Complex64::new(norm, 0.0))
            }
        };
        Self::new(fix(psi_i)?, fix(psi_f)?)
    }

    pub fn dim(&self) -> usize {
        self.psi_i.len()
    }

    /// `<psi_f| U |psi_i>`
    pub fn amplitude(&self, u: &ComplexSquareMatrix) -> Complex64 {
        u.sandwich(&self.psi_f, &self.psi_i)
    }

    /// `<psi_f|psi_i>`
    pub fn overlap(&self) -> Complex64 {
        self.psi_f.dotc(&self.psi_i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn pauli() -> [ComplexSquareMatrix; 3] {
        let z = c(0., 0.);
        let o = c(1., 0.);
        [
            ComplexSquareMatrix::from_row_slice(2, &[z, o, o, z]),
            ComplexSquareMatrix::from_row_slice(2, &[z, -I, I, z]),
            ComplexSquareMatrix::from_row_slice(2, &[o, z, z, -o]),
        ]
    }

    #[test]
    fn n2_is_pauli() {
        let b = build_gellmann_basis(2).unwrap();
        for (g, s) in b.iter().zip(pauli().iter()) {
            assert_eq!(g, s);
        }
    }

    #[test]
    fn rejects_small_n() {
        assert_eq!(
            build_gellmann_basis(1).unwrap_err(),
            Error::InvalidDimension { n: 1, min: 2 }
        );
    }

    #[test]
    fn basis_invariants_up_to_n8() {
        for n in 2..=8 {
            let b = build_gellmann_basis(n).unwrap();
            assert_eq!(b.len(), n * n - 1);
            assert!(b.check().max() < 1e-12, "n={n}: {:?}", b.check());
        }
    }

    #[test]
    fn killing_examples() {
        let b = build_gellmann_basis(3).unwrap();
        assert!((killing_inner(b.get(0), b.get(0)).unwrap() - 1.0).abs() < 1e-15);
        assert!(killing_inner(b.get(0), b.get(1)).unwrap().abs() < 1e-15);
        let id = ComplexSquareMatrix::identity(3);
        assert!((killing_inner(&id, &id).unwrap() - 1.5).abs() < 1e-15);
        let two = ComplexSquareMatrix::identity(2);
        assert!(matches!(
            killing_inner(&id, &two),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn completeness_identity_on_identity() {
        for n in [2usize, 4] {
            let b = build_gellmann_basis(n).unwrap();
            let id = ComplexSquareMatrix::identity(n);
            assert!(completeness_residual(&id, &id, &b).unwrap() < 1e-12);
            // both sides are n^2 - 1
            let rhs = (n * n - 1) as f64;
            let lhs: f64 = b.iter().map(|l| (l * l).trace().re).sum::<f64>() * 0.5;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn expm_sigma_z() {
        let sz = &pauli()[2];
        let u = expm_generator(sz, std::f64::consts::FRAC_PI_2).unwrap();
        let expected = ComplexSquareMatrix::diagonal(&[I, -I]);
        assert!(u.max_deviation(&expected) < 1e-15);
        let id = expm_generator(sz, 0.0).unwrap();
        assert!(id.max_deviation(&ComplexSquareMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let m =
            ComplexSquareMatrix::from_row_slice(2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert!(matches!(
            expm_generator(&m, 1.0),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn state_pair_normalization() {
        let v = StateVector::from_vec(vec![c(3., 0.), c(0., 4.)]);
        assert!(matches!(
            StatePair::new(v.clone(), v.clone()),
            Err(Error::NotNormalized { .. })
        ));
        let p = StatePair::normalized(v.clone(), v).unwrap();
        assert!((p.overlap().re - 1.0).abs() < 1e-15);
    }
}
