//! Numerical toolkit for the phase/modulus relations of SU(n) matrix
//! elements `<psi_f| U(x) |psi_i>` in the defining representation.
//!
//! The crate is organized bottom-up:
//!
//! - [`algebra`]: generator bases, the Cartan-Killing form, the
//!   completeness identity and the matrix exponential.
//! - [`charts`]: coordinate charts on the group manifold, left-invariant
//!   frames and the Cartan-Killing metric.
//! - [`amplitude`]: polar decomposition of the amplitude, its gradients,
//!   the group-manifold relations and vortex winding.
//! - [`coset`]: the Cartan decomposition relative to a reference state,
//!   the section of states, the Fubini-Study metric, the Berry connection
//!   and the bridge between the group and ray-space relations.
//! - [`superosc`]: one-parameter subgroups and superoscillation.

pub mod algebra;
pub mod amplitude;
pub mod charts;
pub mod coset;
pub mod error;
pub mod matrix;
pub mod sampling;
pub mod superosc;

pub use algebra::{
    build_gellmann_basis, completeness_residual, expm_generator, killing_inner, GeneratorBasis,
    StatePair,
};
pub use amplitude::{
    dchi_finite_difference, dchi_vielbein, min_gradient_bound, polar_amplitude,
    reconstruct_modulus, verify_surel, vortex_winding, PhaseGradient, PolarAmplitude,
    SurelResiduals, Winding,
};
pub use charts::{
    ck_metric, exp_chart, left_invariant_frame, partials, su2_polar_chart, Chart,
    DerivativeBackend, Domain, ExpChart, FrameAtPoint, MetricAtPoint, Su2PolarChart,
};
pub use coset::{
    amplitude_factorization_residual, bridge_identities, build_cartan_frame, section, section_with,
    verify_cprel, BridgeReport, CartanFrame, CprelResiduals, FullCartanChart, SectionPoint,
};
pub use error::{Error, Result};
pub use matrix::{ComplexSquareMatrix, HermitianEigen, StateVector};
pub use superosc::{
    aligned_generator, phase_trace, superoscillation_report, NormalizedGenerator, PhaseTrace,
    SuperoscillationReport,
};

/// Fixed numerical tolerances and thresholds.
pub mod tol {
    /// Construction checks: Hermiticity, trace, normalization.
    pub const CONSTRUCTION: f64 = 1e-12;
    /// Algebraic identities evaluated without finite differences.
    pub const IDENTITY: f64 = 1e-10;
    /// Frame and metric consistency checks.
    pub const FRAME: f64 = 1e-8;
    /// Agreement between analytic and finite-difference derivatives.
    pub const FINITE_DIFFERENCE: f64 = 1e-6;
    /// Below this `p` the phase is reported as undefined.
    pub const P_MIN: f64 = 1e-12;
    /// Below this `p` gradient formulas refuse to evaluate.
    pub const P_GRAD: f64 = 1e-8;
    /// Central-difference step for all coordinate derivatives.
    pub const FD_STEP: f64 = 1e-5;
}

/// `sqrt(2(n-1)/n)`: magnitude of the eigenvalue of the U(1) isotropy
/// generator on the reference state, and the minimum phase gradient.
pub(crate) fn isotropy_eigenvalue(n: usize) -> f64 {
    (2.0 * (n as f64 - 1.0) / n as f64).sqrt()
}
