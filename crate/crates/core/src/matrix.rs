//! Dense complex square matrices and state vectors.
//!
//! [`ComplexSquareMatrix`] wraps an `nalgebra` dense matrix and adds the
//! predicates the rest of the crate relies on (Hermiticity, unitarity,
//! tracelessness), together with a Hermitian eigensolver whose output is
//! sorted so that downstream code sees a deterministic spectrum.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex column vector used for states in the defining representation.
pub type StateVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `<u|v>`, antilinear in the first slot.
pub fn inner(u: &StateVector, v: &StateVector) -> Complex64 {
    u.dotc(v)
}

/// Dense `n x n` complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexSquareMatrix(DMatrix<Complex64>);

impl fmt::Debug for ComplexSquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexSquareMatrix{}", self.0)
    }
}

impl ComplexSquareMatrix {
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::ShapeMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        Ok(Self(m))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(n, n, f))
    }

    /// Row-major construction; panics if `entries.len() != n * n`.
    pub fn from_row_slice(n: usize, entries: &[Complex64]) -> Self {
        Self(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                entries[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `|u><v|`
    pub fn outer(u: &StateVector, v: &StateVector) -> Self {
        Self(u * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        &self.0 * v
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.clone().determinant()
    }

    /// `<u|M|v>`
    pub fn sandwich(&self, u: &StateVector, v: &StateVector) -> Complex64 {
        u.dotc(&(&self.0 * v))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise `max |M - M^dagger|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                err = err.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `max |U^dagger U - 1|`.
    pub fn unitarity_error(&self) -> f64 {
        let prod = self.0.adjoint() * &self.0;
        let n = self.dim();
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((prod[(i, j)] - target).norm());
            }
        }
        err
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn is_traceless(&self, tol: f64) -> bool {
        self.trace().norm() <= tol
    }

    /// `max |self - other|` entrywise.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        (&self.0 - &other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
    ///
    /// The caller is responsible for Hermiticity; only the Hermitian part of
    /// the input is effectively used.
    pub fn hermitian_eigen(&self) -> HermitianEigen {
        let n = self.dim();
        let sym = (&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        HermitianEigen {
            values,
            vectors: Self(vectors),
        }
    }
}

/// Eigenpairs of a Hermitian matrix: `M = V diag(values) V^dagger`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are orthonormal eigenvectors.
    pub vectors: ComplexSquareMatrix,
}

impl HermitianEigen {
    pub fn eigenvector(&self, k: usize) -> StateVector {
        self.vectors.0.column(k).into_owned()
    }

    /// `V diag(f(lambda_k)) V^dagger`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> ComplexSquareMatrix {
        let diag: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors.0;
        let d = ComplexSquareMatrix::diagonal(&diag);
        ComplexSquareMatrix(v * d.0 * v.adjoint())
    }

    /// Directional derivative `d/ds exp(i (M + s E))` at `s = 0`, through
    /// the divided differences of `exp(i x)` on the spectrum.
    pub fn exp_i_derivative(&self, e: &ComplexSquareMatrix) -> ComplexSquareMatrix {
        let v = &self.vectors.0;
        let mut inner = v.adjoint() * &e.0 * v;
        let l = &self.values;
        for j in 0..l.len() {
            for k in 0..l.len() {
                let half = 0.5 * (l[j] - l[k]);
                let sinc = if half.abs() < 1e-8 {
                    1.0 - half * half / 6.0
                } else {
                    half.sin() / half
                };
                let mean = 0.5 * (l[j] + l[k]);
                inner[(j, k)] *= Complex64::new(0.0, sinc) * Complex64::from_polar(1.0, mean);
            }
        }
        ComplexSquareMatrix(v * inner * v.adjoint())
    }

    /// `max |M V - V Lambda|`
    pub fn residual(&self, m: &ComplexSquareMatrix) -> f64 {
        let v = &self.vectors.0;
        let lhs = &m.0 * v;
        let mut err: f64 = 0.0;
        for j in 0..v.ncols() {
            for i in 0..v.nrows() {
                err = err.max((lhs[(i, j)] - v[(i, j)] * self.values[j]).norm());
            }
        }
        err
    }
}

impl<'a> Mul<&'a ComplexSquareMatrix> for &'a ComplexSquareMatrix {
    type Output = ComplexSquareMatrix;
    fn mul(self, rhs: &'a ComplexSquareMatrix) -> ComplexSquareMatrix {
        ComplexSquareMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for ComplexSquareMatrix {
    type Output = ComplexSquareMatrix;
    fn mul(self, rhs: ComplexSquareMatrix) -> ComplexSquareMatrix {
        ComplexSquareMatrix(self.0 * rhs.0)
    }
}

impl<'a> Add<&'a ComplexSquareMatrix> for &'a ComplexSquareMatrix {
    type Output = ComplexSquareMatrix;
    fn add(self, rhs: &'a ComplexSquareMatrix) -> ComplexSquareMatrix {
        ComplexSquareMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexSquareMatrix> for &'a ComplexSquareMatrix {
    type Output = ComplexSquareMatrix;
    fn sub(self, rhs: &'a ComplexSquareMatrix) -> ComplexSquareMatrix {
        ComplexSquareMatrix(&self.0 - &rhs.0)
    }
}
