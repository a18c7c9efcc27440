//! Rank-1 projective (von Neumann) measurements on the second subsystem.
//!
//! A measurement is an SU(2) element V = rI + i(y₁σx + y₂σy + y₃σz) with
//! r² + |y|² = 1; its projectors are Πⱼ = V|j⟩⟨j|V†. The Bloch direction
//! of Π₀ is z = (Tr σᵢ Vσ_zV†)ᵢ, so Π₀ = (I + z·σ)/2 and Π₁ = (I − z·σ)/2.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, binary_entropy, kron, paulis, sigma_z, ComplexMatrix, Subsystem};
use crate::states::{DensityMatrix, VectorizedState};

/// Outcomes less likely than this are dropped from entropy sums.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-12;
const UNIT_NORM_TOL: f64 = 1e-9;

/// A von Neumann measurement given by its SU(2) parameters (r, y₁, y₂, y₃).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VonNeumannMeasurement {
    pub r: f64,
    pub y: [f64; 3],
}

impl VonNeumannMeasurement {
    /// The computational-basis measurement, V = I.
    pub const IDENTITY: Self = Self { r: 1.0, y: [0.0; 3] };

    /// Hyperspherical map ℝ³ → S³:
    /// r = cos φ₁, y₁ = sin φ₁ cos φ₂, y₂ = sin φ₁ sin φ₂ cos φ₃, y₃ = sin φ₁ sin φ₂ sin φ₃.
    pub fn from_angles(phi: [f64; 3]) -> Self {
        let (s1, c1) = phi[0].sin_cos();
        let (s2, c2) = phi[1].sin_cos();
        let (s3, c3) = phi[2].sin_cos();
        Self {
            r: c1,
            y: [s1 * c2, s1 * s2 * c3, s1 * s2 * s3],
        }
    }

    /// Inverse of [`from_angles`](Self::from_angles), with φ₁, φ₂ ∈ [0, π].
    pub fn angles(&self) -> [f64; 3] {
        let [y1, y2, y3] = self.y;
        [
            self.r.clamp(-1.0, 1.0).acos(),
            (y2 * y2 + y3 * y3).sqrt().atan2(y1),
            y3.atan2(y2),
        ]
    }

    /// Accepts (r, y) within 1e-9 of the unit sphere and renormalizes.
    pub fn from_su2(r: f64, y: [f64; 3]) -> Result<Self> {
        let norm = (r * r + y.iter().map(|v| v * v).sum::<f64>()).sqrt();
        if norm.is_nan() || (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::OutOfRange {
                what: "|(r, y)|",
                value: norm,
                min: 1.0,
                max: 1.0,
            });
        }
        Ok(Self {
            r: r / norm,
            y: y.map(|v| v / norm),
        })
    }

    /// Rotation by `theta` about `axis`: V = exp(−iθ n̂·σ/2).
    pub fn from_axis_angle(theta: f64, axis: [f64; 3]) -> Result<Self> {
        let len = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len == 0.0 || !len.is_finite() {
            return Err(Error::OutOfRange {
                what: "rotation axis length",
                value: len,
                min: f64::MIN_POSITIVE,
                max: f64::INFINITY,
            });
        }
        let (s, c) = (theta / 2.0).sin_cos();
        Ok(Self {
            r: c,
            y: axis.map(|v| -s * v / len),
        })
    }

    /// A measurement whose Π₀ has Bloch vector along `direction`
    /// (V = R_z(φ) R_y(θ) for the polar angles of the direction).
    pub fn from_bloch_direction(direction: [f64; 3]) -> Result<Self> {
        let len = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len == 0.0 || !len.is_finite() {
            return Err(Error::OutOfRange {
                what: "Bloch direction length",
                value: len,
                min: f64::MIN_POSITIVE,
                max: f64::INFINITY,
            });
        }
        let [x, y, z] = direction.map(|v| v / len);
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        Ok(Self::from_polar(theta, phi))
    }

    /// Π₀ along (sin θ cos φ, sin θ sin φ, cos θ).
    pub fn from_polar(theta: f64, phi: f64) -> Self {
        // R_z(φ)R_y(θ) = (cφ − i sφ σz)(cθ − i sθ σy) with half angles
        let (st, ct) = (theta / 2.0).sin_cos();
        let (sp, cp) = (phi / 2.0).sin_cos();
        // product = cp ct − i(cp st σy + sp ct σz) − sp st σz σy,  σzσy = −iσx
        // → r = cp ct, y = (sp st, −cp st, −sp ct) in V = rI + i y·σ
        Self {
            r: cp * ct,
            y: [sp * st, -cp * st, -sp * ct],
        }
    }

    pub fn norm(&self) -> f64 {
        (self.r * self.r + self.y.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// V = rI + i(y·σ).
    pub fn unitary(&self) -> ComplexMatrix {
        let [y1, y2, y3] = self.y;
        let mut v = ComplexMatrix::zeros(2, 2);
        v[(0, 0)] = Complex64::new(self.r, y3);
        v[(0, 1)] = Complex64::new(y2, y1);
        v[(1, 0)] = Complex64::new(-y2, y1);
        v[(1, 1)] = Complex64::new(self.r, -y3);
        v
    }

    /// Bloch vector of Π₀, from the Pauli expansion of V σ_z V†.
    pub fn bloch_direction(&self) -> [f64; 3] {
        let v = self.unitary();
        let conj = v.matmul(&sigma_z()).matmul(&v.adjoint());
        let [sx, sy, sz] = paulis();
        [sx, sy, sz].map(|s| 0.5 * conj.trace_product(&s).re)
    }

    pub fn projectors(&self) -> ProjectorPair {
        ProjectorPair::from_unitary(&self.unitary())
    }
}

/// Π₀ and Π₁ of a two-outcome rank-1 projective measurement on a qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorPair {
    pub pi0: ComplexMatrix,
    pub pi1: ComplexMatrix,
}

impl ProjectorPair {
    /// Πⱼ = V|j⟩⟨j|V† for any 2×2 unitary V.
    pub fn from_unitary(v: &ComplexMatrix) -> Self {
        let col = |j: usize| [v[(0, j)], v[(1, j)]];
        Self {
            pi0: ComplexMatrix::outer(&col(0), &col(0)),
            pi1: ComplexMatrix::outer(&col(1), &col(1)),
        }
    }

    /// Π₀,₁ = (I ± n̂·σ)/2.
    pub fn from_bloch(n: [f64; 3]) -> Self {
        let [sx, sy, sz] = paulis();
        let ns = &(&sx.scale_real(n[0]) + &sy.scale_real(n[1])) + &sz.scale_real(n[2]);
        let id = ComplexMatrix::identity(2);
        Self {
            pi0: (&id + &ns).scale_real(0.5),
            pi1: (&id - &ns).scale_real(0.5),
        }
    }

    pub fn get(&self, j: usize) -> &ComplexMatrix {
        match j {
            0 => &self.pi0,
            1 => &self.pi1,
            _ => panic!("projector index {j} out of range"),
        }
    }
}

/// One measurement outcome. `state` is `None` when the outcome has
/// negligible probability.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub probability: f64,
    pub state: Option<DensityMatrix>,
}

#[derive(Debug, Clone)]
pub struct MeasurementEnsemble {
    pub outcomes: Vec<Outcome>,
}

impl MeasurementEnsemble {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

fn qubit_b(rho: &DensityMatrix) -> Result<usize> {
    let (m, n) = rho.dims();
    if n != 2 {
        return Err(Error::DimensionMismatch(format!(
            "measurements act on a qubit B, state has dims ({m}, {n})"
        )));
    }
    Ok(m)
}

/// (I⊗Πⱼ) ρ (I⊗Πⱼ) for each outcome, normalized by pⱼ = Tr[(I⊗Πⱼ) ρ (I⊗Πⱼ)].
pub fn apply_measurement(rho: &DensityMatrix, p: &ProjectorPair) -> Result<MeasurementEnsemble> {
    let m = qubit_b(rho)?;
    let id = ComplexMatrix::identity(m);
    let outcomes = [&p.pi0, &p.pi1]
        .into_iter()
        .map(|pi| {
            let k = kron(&id, pi);
            let post = k.matmul(rho.matrix()).matmul(&k);
            let prob = post.trace().re;
            if prob < NEGLIGIBLE_PROBABILITY {
                Outcome {
                    probability: prob.max(0.0),
                    state: None,
                }
            } else {
                Outcome {
                    probability: prob,
                    state: Some(DensityMatrix::new_unchecked(post.scale_real(1.0 / prob), rho.dims())),
                }
            }
        })
        .collect();
    Ok(MeasurementEnsemble { outcomes })
}

/// Σⱼ pⱼ S(ρⱼ) for an arbitrary projector pair. The entropy of each ρⱼ is
/// taken on its A-marginal: ρⱼ = (A part) ⊗ Πⱼ, so the two coincide.
pub fn conditional_entropy_with(rho: &DensityMatrix, p: &ProjectorPair) -> Result<f64> {
    let ensemble = apply_measurement(rho, p)?;
    let mut total = 0.0;
    for o in &ensemble.outcomes {
        if let Some(state) = &o.state {
            total += o.probability * linalg::von_neumann_entropy(&state.marginal(Subsystem::A))?;
        }
    }
    Ok(total)
}

/// S(ρ_AB | {Πⱼ}) in bits, for a measurement on B.
pub fn conditional_entropy(rho: &DensityMatrix, meas: &VonNeumannMeasurement) -> Result<f64> {
    conditional_entropy_with(rho, &meas.projectors())
}

/// ξ = |(ωᵢ zᵢ)ᵢ| for a Bell-diagonal ω, clamped to [0, 1].
pub fn bell_xi(omega: [f64; 3], z: [f64; 3]) -> f64 {
    (0..3)
        .map(|i| (omega[i] * z[i]).powi(2))
        .sum::<f64>()
        .sqrt()
        .min(1.0)
}

/// Conditional entropy of ¼(I + Σ ωⱼ σⱼ⊗σⱼ): both outcomes have p = ½
/// and leave A in ½(I ± Σ ωᵢzᵢσᵢ), so the cost is h((1 + ξ)/2).
pub fn bell_conditional_entropy(omega: [f64; 3], meas: &VonNeumannMeasurement) -> f64 {
    let xi = bell_xi(omega, meas.bloch_direction());
    binary_entropy((1.0 + xi) / 2.0).expect("argument in [1/2, 1]")
}

/// Image of one projector under the vectorized superoperator.
#[derive(Debug, Clone)]
pub struct SuperopOutcome {
    /// Tr of the unnormalized post-measurement operator, read out as the
    /// overlap of the image with the vectorized identity.
    pub probability: f64,
    /// ‖(K⊗Kᵀ)|ρ⟩‖², with |ρ⟩ unit-norm.
    pub squared_norm: f64,
    /// Normalized image; devectorizing it yields K ρ K. `None` for a zero image.
    pub image: Option<VectorizedState>,
}

/// Applies (I⊗Πⱼ) ⊗ (I⊗Πⱼ)ᵀ to the row-major vectorization of a m⊗2 state.
pub fn apply_superop_vectorized(
    v: &VectorizedState,
    p: &ProjectorPair,
    dims: (usize, usize),
) -> Result<Vec<SuperopOutcome>> {
    let (m, n) = dims;
    let d = m * n;
    if n != 2 || v.amplitudes.len() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes do not match a ({m}, {n}) state measured on a qubit B",
            v.amplitudes.len()
        )));
    }
    let id = ComplexMatrix::identity(m);
    Ok([&p.pi0, &p.pi1]
        .into_iter()
        .map(|pi| {
            let k = kron(&id, pi);
            let superop = kron(&k, &k.transpose());
            let image = superop.mul_vec(&v.amplitudes);
            let squared_norm: f64 = image.iter().map(|z| z.norm_sqr()).sum();
            let probability = (0..d).map(|i| image[i * d + i].re).sum::<f64>() * v.normalization;
            let image = (squared_norm > 0.0).then(|| {
                let len = squared_norm.sqrt();
                VectorizedState {
                    amplitudes: image.iter().map(|z| z / len).collect(),
                    normalization: v.normalization * len,
                }
            });
            SuperopOutcome {
                probability,
                squared_norm,
                image,
            }
        })
        .collect())
}
