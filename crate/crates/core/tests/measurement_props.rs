mod common;

use discord_core::linalg::{von_neumann_entropy, Subsystem};
use discord_core::measurement::{
    apply_measurement, apply_superop_vectorized, bell_conditional_entropy, conditional_entropy,
    conditional_entropy_with, ProjectorPair, VonNeumannMeasurement,
};
use discord_core::states::{bell_diagonal, devectorize_matrix, vectorize, werner, DensityMatrix};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn conditional_entropy_bounds(seed in any::<u64>(), m in 1usize..4) {
        let mut r = common::rng(seed);
        let rho = common::random_density(&mut r, (m, 2));
        let s = conditional_entropy(&rho, &common::random_measurement(&mut r)).unwrap();
        prop_assert!(s >= -1e-12 && s <= (m as f64).log2() + 1e-12);
    }

    #[test]
    fn product_states_are_blind_to_measurement(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let a = common::random_density(&mut r, (2, 1));
        let b = common::random_density(&mut r, (2, 1));
        let rho = DensityMatrix::product(&a, &b).unwrap();
        let s_a = von_neumann_entropy(&rho.marginal(Subsystem::A)).unwrap();
        let s = conditional_entropy(&rho, &common::random_measurement(&mut r)).unwrap();
        prop_assert!((s - s_a).abs() < 1e-9);
    }

    #[test]
    fn global_phase_is_a_gauge(seed in any::<u64>(), phase in 0.0f64..6.3) {
        let mut r = common::rng(seed);
        let rho = common::random_density(&mut r, (2, 2));
        let meas = common::random_measurement(&mut r);
        let v = meas.unitary();
        let p = ProjectorPair::from_unitary(&v);
        let q = ProjectorPair::from_unitary(&v.scale(Complex64::from_polar(1.0, phase)));
        prop_assert!(p.pi0.max_abs_diff(&q.pi0) < 1e-12 && p.pi1.max_abs_diff(&q.pi1) < 1e-12);
        let (ep, eq) = (apply_measurement(&rho, &p).unwrap(), apply_measurement(&rho, &q).unwrap());
        for (a, b) in ep.outcomes.iter().zip(&eq.outcomes) {
            prop_assert!((a.probability - b.probability).abs() < 1e-12);
        }
        let diff = conditional_entropy_with(&rho, &p).unwrap() - conditional_entropy_with(&rho, &q).unwrap();
        prop_assert!(diff.abs() < 1e-12);
    }

    #[test]
    fn bloch_direction_is_unit(phi in prop::array::uniform3(-7.0f64..7.0)) {
        let z = VonNeumannMeasurement::from_angles(phi).bloch_direction();
        prop_assert!((z.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let rho = common::random_density(&mut r, (3, 2));
        let e = apply_measurement(&rho, &common::random_measurement(&mut r).projectors()).unwrap();
        prop_assert!((e.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_fast_path_matches_general(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let w = common::random_bell_omega(&mut r);
        let meas = common::random_measurement(&mut r);
        let general = conditional_entropy(&bell_diagonal(w).unwrap(), &meas).unwrap();
        prop_assert!((bell_conditional_entropy(w, &meas) - general).abs() < 1e-9);
    }

    #[test]
    fn superoperator_matches_direct(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let rho = common::random_density(&mut r, (2, 2));
        let p = common::random_measurement(&mut r).projectors();
        let direct = apply_measurement(&rho, &p).unwrap();
        let vec = apply_superop_vectorized(&vectorize(&rho), &p, (2, 2)).unwrap();
        for (d, v) in direct.outcomes.iter().zip(&vec) {
            prop_assert!((d.probability - v.probability).abs() < 1e-10);
            let unnormalized = devectorize_matrix(v.image.as_ref().unwrap(), 4).unwrap();
            let want = d.state.as_ref().unwrap().matrix().scale_real(d.probability);
            prop_assert!(unnormalized.max_abs_diff(&want) < 1e-10);
        }
    }
}

#[test]
fn werner_conditional_entropy_is_flat() {
    let mut r = common::rng(5);
    let rho = werner(0.5).unwrap();
    let values: Vec<f64> = (0..200)
        .map(|_| conditional_entropy(&rho, &common::random_measurement(&mut r)).unwrap())
        .collect();
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - values.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 1e-9);
}
