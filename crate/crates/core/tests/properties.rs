//! Invariants over seeded random inputs.

use std::f64::consts::FRAC_PI_2;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use sunphase_core::charts::{trace_metric, DomainBlock, Geometry};
use sunphase_core::coset::ck_decomposition_residual;
use sunphase_core::sampling::{
    random_hermitian, random_pair, random_state, random_unit_generator, seeded_rng,
};
use sunphase_core::{
    build_cartan_frame, build_gellmann_basis, completeness_residual, dchi_finite_difference,
    exp_chart, expm_generator, left_invariant_frame, min_gradient_bound, partials, section,
    su2_polar_chart, verify_cprel, verify_surel, Chart, ComplexSquareMatrix, DerivativeBackend,
    Domain, FullCartanChart, GeneratorBasis, NormalizedGenerator, StatePair,
};

fn coset_ball(m: usize) -> Domain {
    Domain::new(
        m,
        vec![DomainBlock::Ball {
            start: 0,
            len: m,
            radius: FRAC_PI_2,
        }],
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn completeness_holds(n in 2usize..=5, seed in any::<u64>()) {
        let basis = build_gellmann_basis(n).unwrap();
        let mut rng = seeded_rng(seed);
        let x = random_hermitian(&mut rng, n);
        let y = random_hermitian(&mut rng, n);
        prop_assert!(completeness_residual(&x, &y, &basis).unwrap() < 1e-10);
    }

    #[test]
    fn expm_is_unitary_and_additive(
        n in 2usize..=5,
        seed in any::<u64>(),
        t1 in -4.0f64..4.0,
        t2 in -4.0f64..4.0,
    ) {
        let basis = build_gellmann_basis(n).unwrap();
        let mut rng = seeded_rng(seed);
        let l = random_unit_generator(&mut rng, &basis);
        let u1 = expm_generator(&l, t1).unwrap();
        let u2 = expm_generator(&l, t2).unwrap();
        prop_assert!(u1.unitarity_error() < 1e-10);
        let u12 = expm_generator(&l, t1 + t2).unwrap();
        prop_assert!((&u1 * &u2).max_deviation(&u12) < 1e-9);
        prop_assert!((u1.determinant() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn normalized_generator_eigenvalue_bound(n in 2usize..=5, seed in any::<u64>()) {
        let basis = build_gellmann_basis(n).unwrap();
        let mut rng = seeded_rng(seed);
        let gen = NormalizedGenerator::new(random_unit_generator(&mut rng, &basis)).unwrap();
        prop_assert!(gen.max_abs_eigenvalue() <= min_gradient_bound(n).unwrap() + 1e-9);
    }

    #[test]
    fn killing_coefficients_roundtrip(n in 2usize..=4, seed in any::<u64>()) {
        let basis = build_gellmann_basis(n).unwrap();
        let mut rng = seeded_rng(seed);
        let l = random_unit_generator(&mut rng, &basis);
        let coeffs: Vec<f64> = basis.coefficients(&l).iter().map(|z| z.re).collect();
        prop_assert!(basis.combine(&coeffs).max_deviation(&l) < 1e-12);
        let norm: f64 = coeffs.iter().map(|v| v * v).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn basis_checks_for_each_n() {
    for n in 2..=5 {
        let basis = build_gellmann_basis(n).unwrap();
        assert_eq!(basis.len(), n * n - 1);
        assert!(basis.check().max() < 1e-12);
    }
}

#[test]
fn eigenvalue_bound_500_generators_per_n() {
    for n in 2..=5 {
        let basis = build_gellmann_basis(n).unwrap();
        let bound = min_gradient_bound(n).unwrap();
        let mut rng = seeded_rng(500 + n as u64);
        for _ in 0..500 {
            let gen = NormalizedGenerator::new(random_unit_generator(&mut rng, &basis)).unwrap();
            assert!(gen.max_abs_eigenvalue() <= bound + 1e-9);
        }
    }
}

fn charts_under_test() -> Vec<Box<dyn Chart>> {
    let mut charts: Vec<Box<dyn Chart>> = vec![Box::new(su2_polar_chart())];
    for n in 2..=4 {
        charts.push(Box::new(exp_chart(build_gellmann_basis(n).unwrap())));
    }
    charts
}

#[test]
fn trace_and_vielbein_metrics_agree() {
    let mut rng = seeded_rng(21);
    for chart in charts_under_test() {
        for _ in 0..100 {
            let x = chart.domain().sample(&mut rng, 1e-3);
            let geo = Geometry::at(chart.as_ref(), &x).unwrap();
            assert!(geo.vielbein_deviation() < 1e-8);
            assert!(geo.frame.inversion_residual() < 1e-8);
            assert!(geo.frame.reconstruction_residual < 1e-8);
        }
    }
}

/// `x -> V U(x)` for a fixed group element `V`.
struct Shifted<C> {
    inner: C,
    v: ComplexSquareMatrix,
}

impl<C: Chart> Chart for Shifted<C> {
    fn basis(&self) -> &GeneratorBasis {
        self.inner.basis()
    }

    fn domain(&self) -> &Domain {
        self.inner.domain()
    }

    fn backend(&self) -> DerivativeBackend {
        self.inner.backend()
    }

    fn eval_unchecked(&self, x: &[f64]) -> ComplexSquareMatrix {
        &self.v * &self.inner.eval_unchecked(x)
    }
}

#[test]
fn metric_is_left_invariant() {
    let mut rng = seeded_rng(22);
    for n in 2..=4 {
        let basis = build_gellmann_basis(n).unwrap();
        let l = random_unit_generator(&mut rng, &basis);
        let v = expm_generator(&l, 0.8).unwrap();
        let plain = exp_chart(basis.clone());
        let shifted = Shifted {
            inner: exp_chart(basis),
            v,
        };
        for _ in 0..20 {
            let x = plain.domain().sample(&mut rng, 1e-3);
            let a = trace_metric(&partials(&plain, &x).unwrap());
            let b = trace_metric(&partials(&shifted, &x).unwrap());
            assert!((a - b).abs().max() < 1e-8);
        }
    }
}

#[test]
fn surel_sweeps_both_backends() {
    let mut rng = seeded_rng(23);
    for chart in charts_under_test() {
        let n = chart.n();
        let bound = min_gradient_bound(n).unwrap().powi(2);
        let mut min_grad = f64::INFINITY;
        let mut tested = 0;
        while tested < 100 {
            let pair = random_pair(&mut rng, n);
            let x = chart.domain().sample(&mut rng, 1e-3);
            let r = verify_surel(&pair, chart.as_ref(), &x).unwrap();
            if r.p <= 1e-6 {
                continue;
            }
            let tol = if chart.backend() == DerivativeBackend::Analytic {
                1e-8
            } else {
                1e-5
            };
            assert!(r.max() < tol, "n={n} residual {}", r.max());
            let fd = dchi_finite_difference(&pair, chart.as_ref(), &x, 1e-5).unwrap();
            assert!((fd.grad_eta_sq - (1.0 / r.p + 1.0 - 2.0 / n as f64)).abs() < 1e-5 / r.p);
            min_grad = min_grad.min(fd.grad_eta_sq);
            tested += 1;
        }
        assert!(min_grad >= bound - 1e-9);
    }
}

#[test]
fn identity_pair_attains_the_bound() {
    let mut rng = seeded_rng(24);
    for n in 2..=5 {
        let psi = random_state(&mut rng, n);
        let pair = StatePair::new(psi.clone(), psi).unwrap();
        let chart = exp_chart(build_gellmann_basis(n).unwrap());
        let g = sunphase_core::dchi_vielbein(&pair, &chart, &vec![0.0; n * n - 1]).unwrap();
        assert_abs_diff_eq!(
            g.grad_eta_sq,
            min_gradient_bound(n).unwrap().powi(2),
            epsilon = 1e-8
        );
        assert_abs_diff_eq!(g.grad_logsqrtp_sq, 0.0, epsilon = 1e-8);
    }
}

#[test]
fn cartan_frame_invariants() {
    let mut rng = seeded_rng(25);
    for n in 2..=5 {
        let basis = build_gellmann_basis(n).unwrap();
        for _ in 0..10 {
            let frame = build_cartan_frame(&random_state(&mut rng, n), &basis).unwrap();
            let chk = frame.check();
            assert_eq!(chk.generator_count, n * n - 1);
            assert!(chk.lambda0_trace < 1e-12);
            assert!(chk.lambda0_norm < 1e-12);
            assert!(chk.orthonormality < 1e-12);
            assert!(chk.eigen_residual < 1e-10);
        }
    }
}

#[test]
fn section_geometry_sweep() {
    let mut rng = seeded_rng(26);
    for n in 2..=4 {
        let basis = build_gellmann_basis(n).unwrap();
        let c = min_gradient_bound(n).unwrap();
        for _ in 0..25 {
            let psi_i = random_state(&mut rng, n);
            let frame = build_cartan_frame(&psi_i, &basis).unwrap();
            let chart = FullCartanChart::new(frame.clone()).unwrap();
            let y = coset_ball(frame.coset_dim()).sample(&mut rng, 0.05);
            let sp = section(&frame, &y).unwrap();
            assert!(sp.fs_crosscheck() < 1e-6);
            assert!(
                sp.berry_imag_residue < 1e-10,
                "n={n} {}",
                sp.berry_imag_residue
            );
            // the U(1) part of the connection is the Berry connection with
            // a negative coefficient
            assert!(sp.alpha0_connection_residual(-1.0) < 1e-8);
            assert!(ck_decomposition_residual(&chart, &y).unwrap() < 1e-6);

            let xi_s: Vec<f64> = vec![0.0; frame.iso_dim()];
            let x = chart.coords(&y, &xi_s, 0.3);
            let f = left_invariant_frame(&chart, &x).unwrap();
            let last = f.omega.nrows() - 1;
            assert_abs_diff_eq!(f.omega[(last, last)], 1.0, epsilon = 1e-8);
            let m = frame.coset_dim();
            let alpha0 = sp.alpha0();
            for (mu, a) in alpha0.iter().enumerate().take(m) {
                assert_abs_diff_eq!(f.omega[(last, mu)], *a, epsilon = 1e-8);
            }
            for mu in m..last {
                assert!(f.omega[(last, mu)].abs() < 1e-8);
            }

            let psi_f = random_state(&mut rng, n);
            let pair = StatePair::new(psi_i.clone(), psi_f).unwrap();
            let r = sunphase_core::bridge_identities(&pair, &chart, &y);
            if let Ok(r) = r {
                assert!(r.max_residual() < 1e-4);
                assert!((r.nabla0_eta + c).abs() < 1e-6);
                assert!((r.d_xi0_eta + c).abs() < 1e-6);
                assert!(r.max_su_nabla_eta < 1e-6);
            }
            if let Ok(res) = verify_cprel(&pair, &frame, &y, 1.0) {
                if res.p > 1e-6 {
                    assert!(res.max() < 1e-5);
                }
            }
        }
    }
}
