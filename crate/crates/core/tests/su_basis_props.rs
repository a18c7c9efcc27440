mod common;

use discord_core::linalg::kron;
use discord_core::states::bell_diagonal;
use discord_core::su_basis::{canonicalize_two_qubit, decompose, generators, reconstruct, reconstruct_matrix};
use proptest::prelude::*;

#[test]
fn generators_are_orthogonal() {
    for n in 2..=4 {
        let g = generators(n).unwrap();
        assert_eq!(g.len(), n * n - 1);
        for (i, a) in g.iter().enumerate() {
            assert!(a.trace().norm() < 1e-12);
            for (j, b) in g.iter().enumerate() {
                let want = if i == j { 2.0 } else { 0.0 };
                assert!((a.trace_product(b).re - want).abs() < 1e-12 && a.trace_product(b).im.abs() < 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decompose_reconstruct_round_trip(seed in any::<u64>(), m in 2usize..4, n in 2usize..4) {
        let mut r = common::rng(seed);
        let rho = common::random_density(&mut r, (m, n));
        let d = decompose(&rho).unwrap();
        let back = reconstruct(&d).unwrap();
        prop_assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-10);
        let again = decompose(&back).unwrap();
        let diff = d.alpha.iter().zip(&again.alpha).chain(d.beta.iter().zip(&again.beta))
            .map(|(a, b)| (a - b).abs())
            .chain(d.corr.iter().flatten().zip(again.corr.iter().flatten()).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        prop_assert!(diff < 1e-10);
        prop_assert!(reconstruct_matrix(&d).unwrap().max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn canonical_omega_is_local_unitary_invariant(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let rho = common::random_density(&mut r, (2, 2));
        let (u1, u2) = (common::random_unitary(&mut r, 2), common::random_unitary(&mut r, 2));
        let rotated = rho.conjugate_local(&u1, &u2).unwrap();
        let a = canonicalize_two_qubit(&rho).unwrap();
        let b = canonicalize_two_qubit(&rotated).unwrap();
        for i in 0..3 {
            prop_assert!((a.omega[i] - b.omega[i]).abs() < 1e-9, "{:?} vs {:?}", a.omega, b.omega);
        }
    }

    #[test]
    fn canonical_rotations_diagonalize(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let w = common::random_bell_omega(&mut r);
        let (u1, u2) = (common::random_unitary(&mut r, 2), common::random_unitary(&mut r, 2));
        let rho = bell_diagonal(w).unwrap().conjugate_local(&u1, &u2).unwrap();
        let c = canonicalize_two_qubit(&rho).unwrap();
        let (v1, v2) = &c.local_rotations;
        let k = kron(v1, v2);
        let back = k.matmul(rho.matrix()).matmul(&k.adjoint());
        let want = bell_diagonal(c.omega).unwrap();
        prop_assert!(back.max_abs_diff(want.matrix()) < 1e-9);
        let mut got: Vec<f64> = c.omega.iter().map(|x| x.abs()).collect();
        let mut exp: Vec<f64> = w.iter().map(|x| x.abs()).collect();
        got.sort_by(f64::total_cmp);
        exp.sort_by(f64::total_cmp);
        for (g, e) in got.iter().zip(&exp) {
            prop_assert!((g - e).abs() < 1e-9);
        }
    }
}
