//! Generalized Gell-Mann generators of SU(N) and the expansion of bipartite
//! operators in the product basis {I, λᵢ} ⊗ {I, λⱼ}.
//!
//! Coefficients follow the convention under which
//!
//! ρ = (1/mn)(I⊗I + Σ αᵢ λᵢ⊗I + Σ βⱼ I⊗λⱼ + Σ mᵢⱼ λᵢ⊗λⱼ)
//!
//! holds exactly, i.e. αᵢ = (m/2) Tr(ρ λᵢ⊗I), βⱼ = (n/2) Tr(ρ I⊗λⱼ) and
//! mᵢⱼ = (mn/4) Tr(ρ λᵢ⊗λⱼ). For two qubits this is the familiar
//! ρ = ¼(I + α·σ⊗I + I⊗β·σ + Σ mᵢⱼ σᵢ⊗σⱼ).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, ComplexMatrix};
use crate::states::DensityMatrix;

/// Imaginary parts of coefficients above this abort a decomposition.
pub const IMAG_COEFF_TOL: f64 = 1e-8;

/// The N²−1 generators of SU(N), ordered U-block, V-block, W-block.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub dimension: usize,
    pub generators: Vec<ComplexMatrix>,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ComplexMatrix> {
        self.generators.iter()
    }
}

/// Builds the generalized Gell-Mann matrices for dimension `n`:
/// symmetric U_jk = P_jk + P_kj and antisymmetric V_jk = −i(P_jk − P_kj)
/// for j < k in lexicographic order, then the diagonal W_l for l = 1..n−1.
pub fn generators(n: usize) -> Result<GeneratorSet> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "generator dimension",
            value: n as f64,
            min: 2.0,
            max: f64::INFINITY,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| ((j + 1)..n).map(move |k| (j, k)))
        .collect();
    let mut gens = Vec::with_capacity(n * n - 1);
    for &(j, k) in &pairs {
        let mut u = ComplexMatrix::zeros(n, n);
        u[(j, k)] = Complex64::new(1.0, 0.0);
        u[(k, j)] = Complex64::new(1.0, 0.0);
        gens.push(u);
    }
    for &(j, k) in &pairs {
        let mut v = ComplexMatrix::zeros(n, n);
        v[(j, k)] = Complex64::new(0.0, -1.0);
        v[(k, j)] = Complex64::new(0.0, 1.0);
        gens.push(v);
    }
    for l in 1..n {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; n];
        diag[..l].iter_mut().for_each(|d| *d = norm);
        diag[l] = -(l as f64) * norm;
        gens.push(ComplexMatrix::diag_real(&diag));
    }
    Ok(GeneratorSet {
        dimension: n,
        generators: gens,
    })
}

/// Coefficients of a bipartite operator in the SU(m)⊗SU(n) product basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuDecomposition {
    pub dims: (usize, usize),
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// (m²−1) rows × (n²−1) columns.
    pub corr: Vec<Vec<f64>>,
}

fn real_coefficient(z: Complex64, label: impl FnOnce() -> String) -> Result<f64> {
    if z.im.abs() > IMAG_COEFF_TOL {
        return Err(Error::ComplexCoefficient {
            label: label(),
            imag: z.im,
        });
    }
    Ok(z.re)
}

/// Expands `rho` in the product generator basis.
pub fn decompose(rho: &DensityMatrix) -> Result<SuDecomposition> {
    decompose_matrix(rho.matrix(), rho.dims())
}

/// As [`decompose`], for any Hermitian (m·n)×(m·n) matrix.
pub fn decompose_matrix(rho: &ComplexMatrix, dims: (usize, usize)) -> Result<SuDecomposition> {
    let (m, n) = dims;
    if rho.rows() != m * n || rho.cols() != m * n {
        return Err(Error::DimensionMismatch(format!(
            "decomposition over ({m}, {n}) needs a {0}x{0} matrix",
            m * n
        )));
    }
    let ga = generators(m)?;
    let gb = generators(n)?;
    let id_a = ComplexMatrix::identity(m);
    let id_b = ComplexMatrix::identity(n);
    let (mf, nf) = (m as f64, n as f64);

    let alpha = ga
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let t = rho.trace_product(&kron(l, &id_b)) * (mf / 2.0);
            real_coefficient(t, || format!("alpha[{i}]"))
        })
        .collect::<Result<Vec<_>>>()?;
    let beta = gb
        .iter()
        .enumerate()
        .map(|(j, l)| {
            let t = rho.trace_product(&kron(&id_a, l)) * (nf / 2.0);
            real_coefficient(t, || format!("beta[{j}]"))
        })
        .collect::<Result<Vec<_>>>()?;
    let corr = ga
        .iter()
        .enumerate()
        .map(|(i, la)| {
            gb.iter()
                .enumerate()
                .map(|(j, lb)| {
                    let t = rho.trace_product(&kron(la, lb)) * (mf * nf / 4.0);
                    real_coefficient(t, || format!("corr[{i}][{j}]"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuDecomposition {
        dims,
        alpha,
        beta,
        corr,
    })
}

/// Inverse of [`decompose_matrix`]: sums the basis expansion back into a
/// matrix. Shapes must match the stored dims.
pub fn reconstruct_matrix(d: &SuDecomposition) -> Result<ComplexMatrix> {
    let (m, n) = d.dims;
    let ga = generators(m)?;
    let gb = generators(n)?;
    if d.alpha.len() != ga.len()
        || d.beta.len() != gb.len()
        || d.corr.len() != ga.len()
        || d.corr.iter().any(|row| row.len() != gb.len())
    {
        return Err(Error::DimensionMismatch(format!(
            "coefficient shapes do not match dims ({m}, {n})"
        )));
    }
    let id_a = ComplexMatrix::identity(m);
    let id_b = ComplexMatrix::identity(n);
    let mut acc = ComplexMatrix::identity(m * n);
    for (a, l) in d.alpha.iter().zip(ga.iter()) {
        acc = &acc + &kron(l, &id_b).scale_real(*a);
    }
    for (b, l) in d.beta.iter().zip(gb.iter()) {
        acc = &acc + &kron(&id_a, l).scale_real(*b);
    }
    for (row, la) in d.corr.iter().zip(ga.iter()) {
        for (c, lb) in row.iter().zip(gb.iter()) {
            if *c != 0.0 {
                acc = &acc + &kron(la, lb).scale_real(*c);
            }
        }
    }
    Ok(acc.scale_real(1.0 / (m * n) as f64))
}

/// Reassembles a density matrix from its coefficients, validating the result.
pub fn reconstruct(d: &SuDecomposition) -> Result<DensityMatrix> {
    DensityMatrix::new(reconstruct_matrix(d)?, d.dims)
}

/// Two-qubit state brought to the form ¼(I + α'·σ⊗I + I⊗β'·σ + Σ ωⱼ σⱼ⊗σⱼ)
/// by local SU(2) conjugation (U₁⊗U₂) ρ (U₁⊗U₂)†.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    /// Signed diagonal correlations, ordered by descending |ωⱼ|.
    pub omega: [f64; 3],
    /// (U₁, U₂), each in SU(2).
    pub local_rotations: (ComplexMatrix, ComplexMatrix),
    pub residual_alpha: [f64; 3],
    pub residual_beta: [f64; 3],
}

pub type Mat3 = [[f64; 3]; 3];

fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn mat3_transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

fn mat3_vec(a: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| (0..3).map(|k| a[i][k] * v[k]).sum())
}

fn det3(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn column(a: &Mat3, k: usize) -> [f64; 3] {
    [a[0][k], a[1][k], a[2][k]]
}

fn set_column(a: &mut Mat3, k: usize, v: [f64; 3]) {
    for i in 0..3 {
        a[i][k] = v[i];
    }
}

fn unit(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (n > 1e-300).then(|| v.map(|x| x / n))
}

fn any_orthogonal(v: [f64; 3]) -> [f64; 3] {
    let axis = if v[0].abs() <= v[1].abs() && v[0].abs() <= v[2].abs() {
        [1.0, 0.0, 0.0]
    } else if v[1].abs() <= v[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    unit(cross(v, axis)).expect("axis chosen to be non-parallel")
}

/// Signed SVD M = U·diag(ω)·Vᵀ with U, V proper rotations and ω sorted by
/// descending |ωᵢ|. Built from the Jacobi eigendecomposition of MᵀM.
pub fn proper_svd3(m: &Mat3) -> (Mat3, [f64; 3], Mat3) {
    let mtm = mat3_mul(&mat3_transpose(m), m);
    let as_complex = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(mtm[i][j], 0.0));
    let eig = hermitian_eig(&as_complex).expect("MᵀM is symmetric");
    // descending order
    let mut v: Mat3 = [[0.0; 3]; 3];
    let mut s = [0.0; 3];
    for k in 0..3 {
        let src = 2 - k;
        s[k] = eig.eigenvalues[src].max(0.0).sqrt();
        for i in 0..3 {
            v[i][k] = eig.eigenvectors[(i, src)].re;
        }
    }
    // re-orthonormalize V (eigenvectors of a real symmetric matrix may carry a
    // global phase; the Jacobi path keeps them real here, this just cleans rounding)
    let v0 = unit(column(&v, 0)).unwrap_or([1.0, 0.0, 0.0]);
    let v1 = {
        let c = column(&v, 1);
        let d: f64 = (0..3).map(|i| c[i] * v0[i]).sum();
        unit([c[0] - d * v0[0], c[1] - d * v0[1], c[2] - d * v0[2]]).unwrap_or_else(|| any_orthogonal(v0))
    };
    let v2 = cross(v0, v1);
    set_column(&mut v, 0, v0);
    set_column(&mut v, 1, v1);
    set_column(&mut v, 2, v2);

    let scale = s[0].max(1.0);
    let mut u: Mat3 = [[0.0; 3]; 3];
    let mut filled = [false; 3];
    for k in 0..3 {
        if s[k] > 1e-12 * scale {
            let mv = mat3_vec(m, &column(&v, k));
            if let Some(uk) = unit(mv) {
                set_column(&mut u, k, uk);
                filled[k] = true;
            }
        }
    }
    // complete U for vanishing singular values
    match filled {
        [true, true, true] => {}
        [true, true, false] => {
            let c = cross(column(&u, 0), column(&u, 1));
            set_column(&mut u, 2, c)
        }
        [true, false, _] => {
            let u0 = column(&u, 0);
            let u1 = any_orthogonal(u0);
            set_column(&mut u, 1, u1);
            set_column(&mut u, 2, cross(u0, u1));
        }
        _ => u = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    }
    // Gram-Schmidt on U to kill rounding
    let u0 = unit(column(&u, 0)).unwrap();
    let u1c = column(&u, 1);
    let d: f64 = (0..3).map(|i| u1c[i] * u0[i]).sum();
    let u1 = unit([u1c[0] - d * u0[0], u1c[1] - d * u0[1], u1c[2] - d * u0[2]]).unwrap_or_else(|| any_orthogonal(u0));
    let u2 = column(&u, 2);
    let c2 = cross(u0, u1);
    let sign: f64 = if (0..3).map(|i| u2[i] * c2[i]).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    set_column(&mut u, 0, u0);
    set_column(&mut u, 1, u1);
    set_column(&mut u, 2, c2.map(|x| x * sign));

    // fold reflections into the smallest singular value
    let mut omega = s;
    if det3(&u) < 0.0 {
        let c = column(&u, 2).map(|x| -x);
        set_column(&mut u, 2, c);
        omega[2] = -omega[2];
    }
    if det3(&v) < 0.0 {
        let c = column(&v, 2).map(|x| -x);
        set_column(&mut v, 2, c);
        omega[2] = -omega[2];
    }
    (u, omega, v)
}

/// SU(2) element U with U σⱼ U† = Σᵢ Rᵢⱼ σᵢ for a proper rotation R.
pub fn su2_from_rotation(r: &Mat3) -> ComplexMatrix {
    // quaternion (w, x, y, z) of R, branch chosen on the largest component
    let trace = r[0][0] + r[1][1] + r[2][2];
    let (w, x, y, z) = if trace > 0.0 {
        let s = 2.0 * (1.0 + trace).sqrt();
        (0.25 * s, (r[2][1] - r[1][2]) / s, (r[0][2] - r[2][0]) / s, (r[1][0] - r[0][1]) / s)
    } else if r[0][0] > r[1][1] && r[0][0] > r[2][2] {
        let s = 2.0 * (1.0 + r[0][0] - r[1][1] - r[2][2]).sqrt();
        ((r[2][1] - r[1][2]) / s, 0.25 * s, (r[0][1] + r[1][0]) / s, (r[0][2] + r[2][0]) / s)
    } else if r[1][1] > r[2][2] {
        let s = 2.0 * (1.0 + r[1][1] - r[0][0] - r[2][2]).sqrt();
        ((r[0][2] - r[2][0]) / s, (r[0][1] + r[1][0]) / s, 0.25 * s, (r[1][2] + r[2][1]) / s)
    } else {
        let s = 2.0 * (1.0 + r[2][2] - r[0][0] - r[1][1]).sqrt();
        ((r[1][0] - r[0][1]) / s, (r[0][2] + r[2][0]) / s, (r[1][2] + r[2][1]) / s, 0.25 * s)
    };
    let n = (w * w + x * x + y * y + z * z).sqrt();
    let (w, x, y, z) = (w / n, x / n, y / n, z / n);
    // U = w I − i (x σx + y σy + z σz)
    let mut u = ComplexMatrix::zeros(2, 2);
    u[(0, 0)] = Complex64::new(w, -z);
    u[(0, 1)] = Complex64::new(-y, -x);
    u[(1, 0)] = Complex64::new(y, -x);
    u[(1, 1)] = Complex64::new(w, z);
    u
}

/// Rotates a two-qubit state so its correlation matrix becomes diagonal.
///
/// With M = U·diag(ω)·Vᵀ (U, V ∈ SO(3)), conjugating by U₁⊗U₂ where U₁
/// realizes Uᵀ and U₂ realizes Vᵀ sends M to diag(ω), α to Uᵀα and β to Vᵀβ.
pub fn canonicalize_two_qubit(rho: &DensityMatrix) -> Result<CanonicalForm> {
    if rho.dims() != (2, 2) {
        return Err(Error::DimensionMismatch(format!(
            "canonical form needs a two-qubit state, got dims {:?}",
            rho.dims()
        )));
    }
    let d = decompose(rho)?;
    let mut m: Mat3 = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = d.corr[i][j];
        }
    }
    let (u, omega, v) = proper_svd3(&m);
    let r1 = mat3_transpose(&u);
    let r2 = mat3_transpose(&v);
    let alpha = [d.alpha[0], d.alpha[1], d.alpha[2]];
    let beta = [d.beta[0], d.beta[1], d.beta[2]];
    Ok(CanonicalForm {
        omega,
        local_rotations: (su2_from_rotation(&r1), su2_from_rotation(&r2)),
        residual_alpha: mat3_vec(&r1, &alpha),
        residual_beta: mat3_vec(&r2, &beta),
    })
}
