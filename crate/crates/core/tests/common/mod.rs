#![allow(dead_code)]

use discord_core::linalg::ComplexMatrix;
use discord_core::measurement::VonNeumannMeasurement;
use discord_core::states::{bell_diagonal, DensityMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    random_matrix(rng, n).hermitian_part()
}

/// G G† / Tr, full rank with probability one.
pub fn random_density(rng: &mut impl Rng, dims: (usize, usize)) -> DensityMatrix {
    let g = random_matrix(rng, dims.0 * dims.1);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr), dims).unwrap()
}

/// Gram-Schmidt on the columns of a random complex matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n);
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    for j in 0..n {
        let mut v: Vec<Complex64> = (0..n).map(|i| g[(i, j)]).collect();
        for c in &cols {
            let dot: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|x| x / norm).collect());
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

pub fn random_measurement(rng: &mut impl Rng) -> VonNeumannMeasurement {
    VonNeumannMeasurement::from_angles([
        rng.gen_range(0.0..std::f64::consts::PI),
        rng.gen_range(0.0..std::f64::consts::PI),
        rng.gen_range(0.0..2.0 * std::f64::consts::PI),
    ])
}

/// ω drawn uniformly from the tetrahedron of valid Bell-diagonal states,
/// by rejection from the cube.
pub fn random_bell_omega(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let w = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if bell_diagonal(w).is_ok() {
            return w;
        }
    }
}
