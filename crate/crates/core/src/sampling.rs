//! Seeded random inputs: states, Hermitian matrices, generators.
//!
//! All sweeps use ChaCha8 so that a seed pins the stream across platforms
//! and `rand` releases.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{GeneratorBasis, StatePair};
use crate::matrix::{ComplexSquareMatrix, StateVector};

pub type SweepRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SweepRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_c<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-uniform unit vector (normalized complex Gaussian).
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> StateVector {
    loop {
        let v = StateVector::from_fn(n, |_, _| gaussian_c(rng));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / Complex64::new(norm, 0.0);
        }
    }
}

pub fn random_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> StatePair {
    let psi_i = random_state(rng, n);
    let psi_f = random_state(rng, n);
    StatePair::new(psi_i, psi_f).expect("random states are normalized")
}

/// GUE-like Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexSquareMatrix {
    let a = ComplexSquareMatrix::from_fn(n, |_, _| gaussian_c(rng));
    (&a + &a.adjoint()).scale_real(0.5)
}

/// Random real combination of the basis with unit Killing norm.
pub fn random_unit_generator<R: Rng + ?Sized>(
    rng: &mut R,
    basis: &GeneratorBasis,
) -> ComplexSquareMatrix {
    let mut coeffs: Vec<f64> = (0..basis.len())
        .map(|_| rng.sample(StandardNormal))
        .collect();
    let norm = coeffs.iter().map(|v| v * v).sum::<f64>().sqrt();
    coeffs.iter_mut().for_each(|v| *v /= norm);
    basis.combine(&coeffs)
}
