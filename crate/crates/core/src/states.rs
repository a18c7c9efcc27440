//! Density matrices, the built-in state families, the doubled-space
//! vectorization |ρ⟩ and a tiny statevector utility for preparing it.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigenvalues, kron, partial_trace, ComplexMatrix, Subsystem, ValidityReport};

/// Validation tolerance for states built in code.
pub const STATE_TOL: f64 = 1e-9;
/// Default validation tolerance for states read from files.
pub const FILE_TOL: f64 = 1e-6;
/// The tabulated random state is rejected if its repaired spectrum dips below this.
const REPAIR_MIN_EIGENVALUE: f64 = -1e-3;
const MAX_GATE_QUBITS: usize = 8;
const UNITARY_TOL: f64 = 1e-10;

/// A bipartite density matrix on C^m ⊗ C^n.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: (usize, usize),
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates at [`STATE_TOL`] and stores the Hermitian part.
    pub fn new(matrix: ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        Self::with_tolerance(matrix, dims, STATE_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, dims: (usize, usize), tol: f64) -> Result<Self> {
        let (m, n) = dims;
        if m == 0 || n == 0 || matrix.rows() != m * n || matrix.cols() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "dims ({m}, {n}) need a {0}x{0} matrix, got {1}x{2}",
                m * n,
                matrix.rows(),
                matrix.cols()
            )));
        }
        let report = linalg::is_density_matrix(&matrix, tol);
        if !report.valid {
            return Err(Error::InvalidState(report.to_string()));
        }
        Ok(Self {
            dims,
            matrix: matrix.hermitian_part(),
        })
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, dims: (usize, usize)) -> Self {
        debug_assert_eq!(matrix.rows(), dims.0 * dims.1);
        Self { dims, matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    pub fn validity(&self, tol: f64) -> ValidityReport {
        linalg::is_density_matrix(&self.matrix, tol)
    }

    pub fn marginal(&self, keep: Subsystem) -> ComplexMatrix {
        partial_trace(&self.matrix, keep, self.dims).expect("dims checked on construction")
    }

    pub fn entropy(&self) -> Result<f64> {
        linalg::von_neumann_entropy(&self.matrix)
    }

    /// ρ_A ⊗ ρ_B.
    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        Self::new(kron(&a.matrix, &b.matrix), (a.dim(), b.dim()))
    }

    /// (U₁⊗U₂) ρ (U₁⊗U₂)†.
    pub fn conjugate_local(&self, u1: &ComplexMatrix, u2: &ComplexMatrix) -> Result<Self> {
        if u1.rows() != self.dims.0 || u2.rows() != self.dims.1 {
            return Err(Error::DimensionMismatch("local unitary sizes do not match dims".into()));
        }
        let u = kron(u1, u2);
        let out = u.matmul(&self.matrix).matmul(&u.adjoint());
        Ok(Self::new_unchecked(out.hermitian_part(), self.dims))
    }
}

fn ket(bits: usize, dim: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[bits] = Complex64::new(1.0, 0.0);
    v
}

fn projector(v: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::outer(v, v)
}

fn check_unit_interval(what: &'static str, a: f64, open_at_zero: bool) -> Result<()> {
    let ok = if open_at_zero { a > 0.0 && a <= 1.0 } else { (0.0..=1.0).contains(&a) };
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what,
            value: a,
            min: 0.0,
            max: 1.0,
        })
    }
}

/// a|ψ⁻⟩⟨ψ⁻| + (1−a)I/4 with |ψ⁻⟩ = (|01⟩ − |10⟩)/√2, for 0 ≤ a ≤ 1.
pub fn werner(a: f64) -> Result<DensityMatrix> {
    check_unit_interval("Werner parameter", a, false)?;
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let psi = [Complex64::new(0.0, 0.0), s, -s, Complex64::new(0.0, 0.0)];
    let m = &projector(&psi).scale_real(a) + &ComplexMatrix::identity(4).scale_real((1.0 - a) / 4.0);
    DensityMatrix::new(m, (2, 2))
}

/// ⅓[(1−a)|00⟩⟨00| + 2|ψ⁺⟩⟨ψ⁺| + a|11⟩⟨11|] with |ψ⁺⟩ = (|01⟩ + |10⟩)/√2, for 0 < a ≤ 1.
pub fn mixed_bell_family(a: f64) -> Result<DensityMatrix> {
    check_unit_interval("mixed-Bell parameter", a, true)?;
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let psi = [Complex64::new(0.0, 0.0), s, s, Complex64::new(0.0, 0.0)];
    let m = &(&projector(&ket(0, 4)).scale_real(1.0 - a) + &projector(&psi).scale_real(2.0))
        + &projector(&ket(3, 4)).scale_real(a);
    DensityMatrix::new(m.scale_real(1.0 / 3.0), (2, 2))
}

/// ¼(I⊗I + Σⱼ ωⱼ σⱼ⊗σⱼ). Rejects ω whose state has a negative eigenvalue.
pub fn bell_diagonal(omega: [f64; 3]) -> Result<DensityMatrix> {
    let paulis = linalg::paulis();
    let mut m = ComplexMatrix::identity(4);
    for (w, s) in omega.iter().zip(&paulis) {
        m = &m + &kron(s, s).scale_real(*w);
    }
    let m = m.scale_real(0.25);
    let min = hermitian_eigenvalues(&m)?[0];
    if min < -STATE_TOL {
        return Err(Error::NotPositive(min));
    }
    DensityMatrix::new(m, (2, 2))
}

/// Tabulated 4×4 two-qubit state printed to three significant digits,
/// together with the corrections applied to make it a valid state.
#[derive(Debug, Clone)]
pub struct RepairedState {
    pub state: DensityMatrix,
    /// Hermiticity defect removed by symmetrization.
    pub hermiticity_correction: f64,
    /// Trace(printed) − 1, removed by rescaling.
    pub trace_correction: f64,
    pub min_eigenvalue: f64,
}

const RANDOM_STATE_ENTRIES: [[(f64, f64); 4]; 4] = [
    [(0.437, 0.0), (0.126, 0.197), (0.0271, -0.0258), (-0.247, 0.0997)],
    [(0.126, -0.197), (0.154, 0.0), (-0.0115, -0.0187), (-0.0315, 0.170)],
    [(0.0271, 0.0258), (-0.0115, 0.0187), (0.0370, 0.0), (0.00219, -0.0367)],
    [(-0.247, -0.0997), (-0.0315, -0.170), (0.00219, 0.0367), (0.372, 0.0)],
];

/// The raw printed matrix, before any repair.
pub fn tabulated_random_matrix() -> ComplexMatrix {
    ComplexMatrix::from_fn(4, 4, |i, j| {
        let (re, im) = RANDOM_STATE_ENTRIES[i][j];
        Complex64::new(re, im)
    })
}

/// A fixed random two-qubit state (reference minimum conditional entropy
/// 0.24 nats). Symmetrized and trace-renormalized; panics only if the
/// printed data were grossly non-positive, which they are not.
pub fn tabulated_random_state() -> RepairedState {
    let raw = tabulated_random_matrix();
    let hermiticity_correction = raw.hermiticity_defect();
    let sym = raw.hermitian_part();
    let tr = sym.trace().re;
    let repaired = sym.scale_real(1.0 / tr);
    let min_eigenvalue = hermitian_eigenvalues(&repaired).expect("Hermitian by construction")[0];
    assert!(
        min_eigenvalue >= REPAIR_MIN_EIGENVALUE,
        "tabulated state has eigenvalue {min_eigenvalue}"
    );
    RepairedState {
        state: DensityMatrix::new_unchecked(repaired, (2, 2)),
        hermiticity_correction,
        trace_correction: tr - 1.0,
        min_eigenvalue,
    }
}

/// Row-major doubled-space vector Σ ρᵢⱼ/‖ρ‖_F |i⟩_p|j⟩_A.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorizedState {
    pub amplitudes: Vec<Complex64>,
    /// Frobenius norm of the original matrix.
    pub normalization: f64,
}

impl VectorizedState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

pub fn vectorize_matrix(m: &ComplexMatrix) -> Result<VectorizedState> {
    let norm = m.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(VectorizedState {
        amplitudes: m.as_slice().iter().map(|z| z / norm).collect(),
        normalization: norm,
    })
}

pub fn vectorize(rho: &DensityMatrix) -> VectorizedState {
    vectorize_matrix(rho.matrix()).expect("a density matrix has unit trace")
}

/// Unflattens and rescales without validating (the result need not be a state).
pub fn devectorize_matrix(v: &VectorizedState, dim: usize) -> Result<ComplexMatrix> {
    if v.amplitudes.len() != dim * dim {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes cannot form a {dim}x{dim} matrix",
            v.amplitudes.len()
        )));
    }
    ComplexMatrix::from_vec(dim, dim, v.amplitudes.iter().map(|z| z * v.normalization).collect())
}

pub fn devectorize(v: &VectorizedState, dims: (usize, usize)) -> Result<DensityMatrix> {
    DensityMatrix::new(devectorize_matrix(v, dims.0 * dims.1)?, dims)
}

/// One gate of a state-preparation sequence. Qubit 0 is the most
/// significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    H(usize),
    Cnot { control: usize, target: usize },
    U2 { matrix: ComplexMatrix, target: usize },
    /// exp(−iθ n̂·σ/2).
    Rotation { theta: f64, axis: [f64; 3], target: usize },
}

fn rotation_matrix(theta: f64, axis: [f64; 3]) -> Result<ComplexMatrix> {
    let len = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len == 0.0 || !len.is_finite() {
        return Err(Error::Gate("rotation axis must be a nonzero vector".into()));
    }
    let [nx, ny, nz] = axis.map(|x| x / len);
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut r = ComplexMatrix::zeros(2, 2);
    r[(0, 0)] = Complex64::new(c, -nz * s);
    r[(0, 1)] = Complex64::new(-ny * s, -nx * s);
    r[(1, 0)] = Complex64::new(ny * s, -nx * s);
    r[(1, 1)] = Complex64::new(c, nz * s);
    Ok(r)
}

impl GateOp {
    fn qubits(&self) -> Vec<usize> {
        match self {
            GateOp::H(q) => vec![*q],
            GateOp::Cnot { control, target } => vec![*control, *target],
            GateOp::U2 { target, .. } | GateOp::Rotation { target, .. } => vec![*target],
        }
    }

    /// The 2×2 matrix of a single-qubit gate.
    pub fn single_qubit_matrix(&self) -> Result<Option<ComplexMatrix>> {
        Ok(match self {
            GateOp::H(_) => Some(
                ComplexMatrix::from_rows(&[&[(1.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0), (-1.0, 0.0)]])?
                    .scale_real(FRAC_1_SQRT_2),
            ),
            GateOp::U2 { matrix, .. } => {
                if matrix.rows() != 2 || matrix.cols() != 2 {
                    return Err(Error::Gate("U2 payload must be 2x2".into()));
                }
                let defect = matrix.adjoint().matmul(matrix).max_abs_diff(&ComplexMatrix::identity(2));
                if defect > UNITARY_TOL {
                    return Err(Error::Gate(format!("U2 payload is not unitary (defect {defect:.3e})")));
                }
                Some(matrix.clone())
            }
            GateOp::Rotation { theta, axis, .. } => Some(rotation_matrix(*theta, *axis)?),
            GateOp::Cnot { .. } => None,
        })
    }
}

/// Applies `gates` left to right to |0…0⟩ on `num_qubits` qubits (at most 8).
pub fn apply_gate_sequence(gates: &[GateOp], num_qubits: usize) -> Result<Vec<Complex64>> {
    if num_qubits == 0 || num_qubits > MAX_GATE_QUBITS {
        return Err(Error::Gate(format!(
            "gate sequences support 1..={MAX_GATE_QUBITS} qubits, got {num_qubits}"
        )));
    }
    let dim = 1usize << num_qubits;
    let mut state = ket(0, dim);
    let mask = |q: usize| 1usize << (num_qubits - 1 - q);
    for gate in gates {
        let qs = gate.qubits();
        if let Some(&bad) = qs.iter().find(|&&q| q >= num_qubits) {
            return Err(Error::Gate(format!("qubit {bad} out of range for {num_qubits} qubits")));
        }
        match gate {
            GateOp::Cnot { control, target } => {
                if control == target {
                    return Err(Error::Gate("CNOT control and target coincide".into()));
                }
                let (cm, tm) = (mask(*control), mask(*target));
                for i in 0..dim {
                    if i & cm != 0 && i & tm == 0 {
                        state.swap(i, i | tm);
                    }
                }
            }
            _ => {
                let u = gate.single_qubit_matrix()?.expect("single-qubit gate");
                let tm = mask(qs[0]);
                for i in 0..dim {
                    if i & tm == 0 {
                        let (a0, a1) = (state[i], state[i | tm]);
                        state[i] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
                        state[i | tm] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
                    }
                }
            }
        }
    }
    Ok(state)
}

/// H on `control` then CNOT(control → target): (|00⟩ + |11⟩)/√2 on that pair.
pub fn bell_pair_circuit(control: usize, target: usize) -> Vec<GateOp> {
    vec![GateOp::H(control), GateOp::Cnot { control, target }]
}

/// JSON density-matrix file: `{ "dims": [m, n], "re": [[..]], "im": [[..]] }`,
/// both matrices row-major and mn×mn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: [usize; 2],
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self::from_matrix(rho.matrix(), rho.dims())
    }

    pub fn from_matrix(m: &ComplexMatrix, dims: (usize, usize)) -> Self {
        let rows = |f: fn(&Complex64) -> f64| {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            dims: [dims.0, dims.1],
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    /// The raw matrix, checked for shape only.
    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let d = self.dims[0] * self.dims[1];
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if d == 0 || !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Parse(format!(
                "dims {:?} need {d}x{d} \"re\" and \"im\" arrays",
                self.dims
            )));
        }
        Ok(ComplexMatrix::from_fn(d, d, |i, j| Complex64::new(self.re[i][j], self.im[i][j])))
    }

    pub fn to_state(&self, tol: f64) -> Result<DensityMatrix> {
        DensityMatrix::with_tolerance(self.matrix()?, (self.dims[0], self.dims[1]), tol)
    }

    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn werner_endpoints() {
        let w0 = werner(0.0).unwrap();
        assert!(w0.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.25)) < 1e-16);
        let w1 = werner(1.0).unwrap();
        let ev = hermitian_eigenvalues(w1.matrix()).unwrap();
        assert!((ev[3] - 1.0).abs() < 1e-14 && ev[0].abs() < 1e-14);
        assert!(werner(1.2).is_err() && werner(-0.1).is_err());
    }

    #[test]
    fn mixed_bell_family_shape() {
        for a in [0.05, 0.5, 1.0] {
            let rho = mixed_bell_family(a).unwrap();
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        }
        assert!(mixed_bell_family(0.0).is_err());
        // a = 1: ⅓(2|ψ⁺⟩⟨ψ⁺| + |11⟩⟨11|), |00⟩ block empty
        let rho = mixed_bell_family(1.0).unwrap();
        assert_eq!(rho.matrix()[(0, 0)], Complex64::new(0.0, 0.0));
        let ev = hermitian_eigenvalues(rho.matrix()).unwrap();
        let want = [0.0, 0.0, 1.0 / 3.0, 2.0 / 3.0];
        for (g, w) in ev.iter().zip(want) {
            assert!((g - w).abs() < 1e-14, "{ev:?}");
        }
    }

    #[test]
    fn bell_diagonal_validation() {
        let rho = bell_diagonal([-0.4, -0.4, -0.4]).unwrap();
        assert!(rho.matrix().max_abs_diff(werner(0.4).unwrap().matrix()) < 1e-15);
        // singlet weight ¼(1 − ω₁ − ω₂ − ω₃) is −½ for (1, 1, 1)
        match bell_diagonal([1.0, 1.0, 1.0]) {
            Err(Error::NotPositive(ev)) => assert!((ev + 0.5).abs() < 1e-12),
            other => panic!("expected rejection, got {other:?}"),
        }
        assert!(bell_diagonal([1.0, -1.0, 1.0]).is_ok());
        assert!(bell_diagonal([1.0, 1.0, -1.0]).is_ok());
    }

    #[test]
    fn tabulated_state_values() {
        let raw = tabulated_random_matrix();
        assert_eq!(raw[(0, 0)], Complex64::new(0.437, 0.0));
        assert!((raw.trace().re - 1.0).abs() < 1e-12);
        let r = tabulated_random_state();
        assert!(r.hermiticity_correction < 1e-15);
        assert!(r.trace_correction.abs() < 1e-12);
        assert!(r.min_eigenvalue > 0.0);
        assert!(r.state.validity(1e-9).valid);
        assert!(linalg::is_density_matrix(&raw, 1e-3).valid);
    }

    #[test]
    fn vectorization_examples() {
        let zero = DensityMatrix::new(ComplexMatrix::diag_real(&[1.0, 0.0]), (1, 2)).unwrap();
        let v = vectorize(&zero);
        assert_eq!(v.normalization, 1.0);
        assert_eq!(v.amplitudes[0], Complex64::new(1.0, 0.0));
        assert!(v.amplitudes[1..].iter().all(|z| z.norm() == 0.0));

        let half = DensityMatrix::new(ComplexMatrix::identity(2).scale_real(0.5), (1, 2)).unwrap();
        let v = vectorize(&half);
        assert!((v.normalization - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((v.amplitudes[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((v.amplitudes[3].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(vectorize_matrix(&ComplexMatrix::zeros(2, 2)).is_err());
        assert!(devectorize(&v, (2, 2)).is_err());
    }

    #[test]
    fn gate_basics() {
        let bell = apply_gate_sequence(&bell_pair_circuit(0, 1), 2).unwrap();
        let s = FRAC_1_SQRT_2;
        assert!((bell[0].re - s).abs() < 1e-15 && (bell[3].re - s).abs() < 1e-15);
        assert!(bell[1].norm() < 1e-15 && bell[2].norm() < 1e-15);
        let empty = apply_gate_sequence(&[], 3).unwrap();
        assert_eq!(empty[0], Complex64::new(1.0, 0.0));
        assert!(apply_gate_sequence(&[GateOp::H(2)], 2).is_err());
        assert!(apply_gate_sequence(&[], 9).is_err());
        let bad = GateOp::U2 {
            matrix: ComplexMatrix::diag_real(&[1.0, 2.0]),
            target: 0,
        };
        assert!(matches!(apply_gate_sequence(&[bad], 1), Err(Error::Gate(_))));
        assert!(apply_gate_sequence(&[GateOp::Cnot { control: 1, target: 1 }], 2).is_err());
    }

    #[test]
    fn rotation_gate_matches_x_flip() {
        // exp(−iπσx/2) = −iσx, sending |0⟩ to −i|1⟩
        let out = apply_gate_sequence(
            &[GateOp::Rotation {
                theta: std::f64::consts::PI,
                axis: [1.0, 0.0, 0.0],
                target: 0,
            }],
            1,
        )
        .unwrap();
        assert!(out[0].norm() < 1e-15);
        assert!((out[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn state_file_round_trip_and_errors() {
        let w = werner(0.3).unwrap();
        let text = StateFile::from_state(&w).to_json();
        let back = StateFile::parse(&text).unwrap().to_state(FILE_TOL).unwrap();
        assert!(back.matrix().max_abs_diff(w.matrix()) < 1e-15);

        assert!(matches!(StateFile::parse("{"), Err(Error::Parse(_))));
        let short = r#"{"dims":[2,2],"re":[[1.0]],"im":[[0.0]]}"#;
        assert!(matches!(StateFile::parse(short).unwrap().to_state(FILE_TOL), Err(Error::Parse(_))));
        let mut f = StateFile::from_state(&w);
        f.re[0][0] += 0.1;
        assert!(matches!(f.to_state(FILE_TOL), Err(Error::InvalidState(_))));
    }
}
