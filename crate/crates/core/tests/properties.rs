use std::f64::consts::FRAC_PI_2;

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use sta3d_core::hamiltonians::{build_h_total, SystemParams};
use sta3d_core::model::{atomic_sigma, enumerate_basis, Atom, Level};
use sta3d_core::pulse::{invariant_eigenstates, invariant_matrix, PulseProtocol};

fn det3(m: &DMatrix<C64>) -> C64 {
    m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
}

const ATOM1_LEVELS: [Level; 4] = [Level::G0, Level::GL, Level::GR, Level::E0];
const ATOM2_LEVELS: [Level; 5] = [Level::G0, Level::GL, Level::GR, Level::EL, Level::ER];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn sigma_adjoint_swaps_levels(a in 0usize..4, b in 0usize..4, c in 0usize..5, d in 0usize..5) {
        let basis = enumerate_basis();
        let s = atomic_sigma(Atom::One, ATOM1_LEVELS[a], ATOM1_LEVELS[b], &basis).unwrap();
        let r = atomic_sigma(Atom::One, ATOM1_LEVELS[b], ATOM1_LEVELS[a], &basis).unwrap();
        prop_assert_eq!(s.adjoint().into_matrix(), r.into_matrix());
        let s = atomic_sigma(Atom::Two, ATOM2_LEVELS[c], ATOM2_LEVELS[d], &basis).unwrap();
        let r = atomic_sigma(Atom::Two, ATOM2_LEVELS[d], ATOM2_LEVELS[c], &basis).unwrap();
        prop_assert_eq!(s.adjoint().into_matrix(), r.into_matrix());
    }

    #[test]
    fn invariant_spectrum(nu in 0.01f64..FRAC_PI_2 - 0.01, beta in -3.0f64..3.0, chi in 0.1f64..3.0) {
        let inv = invariant_matrix(nu, beta, chi);
        let m = inv.matrix().clone();
        prop_assert!(inv.hermiticity_residual() <= 1e-15);
        let tr = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        prop_assert!(tr.norm() <= 1e-15);
        prop_assert!(det3(&m).norm() <= 1e-14 * chi.powi(3));
        // trace 0, det 0 and tr I^2 = 2 chi^2/5 fix the spectrum {0, +-chi/sqrt5}
        prop_assert!((inv.frobenius_norm().powi(2) - 0.4 * chi * chi).abs() <= 1e-13 * chi * chi);
        let ev = inv.eigenvalues().unwrap();
        let s = chi / 5f64.sqrt();
        for (got, want) in ev.iter().zip([-s, 0.0, s]) {
            prop_assert!((got - want).abs() <= 1e-12 * chi);
        }
    }

    #[test]
    fn eigenstates_are_orthonormal_eigenvectors(nu in 0.01f64..FRAC_PI_2 - 0.01, beta in -3.0f64..3.0) {
        let inv = invariant_matrix(nu, beta, 1.0);
        let states = invariant_eigenstates(nu, beta);
        let s = 1.0 / 5f64.sqrt();
        for (k, lambda) in [0.0, s, -s].into_iter().enumerate() {
            let image = inv.apply(&states[k]).unwrap();
            for i in 0..3 {
                prop_assert!((image.amplitude(i) - states[k].amplitude(i) * lambda).norm() <= 1e-14);
            }
            for j in 0..3 {
                let want = if j == k { 1.0 } else { 0.0 };
                prop_assert!((states[k].inner(&states[j]).unwrap() - C64::from(want)).norm() <= 1e-14);
            }
        }
    }
}

#[test]
fn total_hamiltonian_hermitian_at_random_times() {
    let basis = enumerate_basis();
    let params = SystemParams::default();
    let protocol = PulseProtocol::reference(params.tf, params.epsilon).unwrap();
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..100 {
        let t = (0.0..=params.tf).new_tree(&mut runner).unwrap().current();
        let h = build_h_total(t, &protocol, &params, &basis).unwrap();
        assert!(h.is_hermitian());
        assert_abs_diff_eq!(h.hermiticity_residual(), 0.0, epsilon = 1e-12);
    }
}
