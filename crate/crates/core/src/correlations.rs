//! Mutual information, classical correlation and quantum discord of
//! bipartite states measured on a qubit B. All quantities are in bits.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{binary_entropy, entropy_of_spectrum, von_neumann_entropy, Subsystem};
use crate::measurement::{bell_conditional_entropy, conditional_entropy, VonNeumannMeasurement};
use crate::optimizer::{analytic_gradient_bell, grid_oracle, minimize_angles, OptimizationResult, OptimizerConfig};
use crate::states::DensityMatrix;
use crate::su_basis::decompose;

/// Values in (−NEGATIVE_CLAMP, 0) are reported as zero.
pub const NEGATIVE_CLAMP: f64 = 1e-9;
/// Largest |α|, |β| or off-diagonal correlation for which a two-qubit state
/// is treated as Bell-diagonal.
pub const BELL_DIAGONAL_TOL: f64 = 1e-9;

/// I(A:B) = S(ρ_A) + S(ρ_B) − S(ρ_AB).
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    let s_a = von_neumann_entropy(&rho.marginal(Subsystem::A))?;
    let s_b = von_neumann_entropy(&rho.marginal(Subsystem::B))?;
    Ok(s_a + s_b - rho.entropy()?)
}

/// Closed form for ¼(I + Σ ωⱼ σⱼ⊗σⱼ): both marginals are maximally mixed.
pub fn mutual_information_bell(omega: [f64; 3]) -> Result<f64> {
    let [c1, c2, c3] = omega;
    let spectrum = [
        (1.0 - c1 - c2 - c3) / 4.0,
        (1.0 - c1 + c2 + c3) / 4.0,
        (1.0 + c1 - c2 + c3) / 4.0,
        (1.0 + c1 + c2 - c3) / 4.0,
    ];
    Ok(2.0 - entropy_of_spectrum(&spectrum)?)
}

/// ω if `rho` is a two-qubit Bell-diagonal state.
pub fn bell_diagonal_omega(rho: &DensityMatrix) -> Option<[f64; 3]> {
    if rho.dims() != (2, 2) {
        return None;
    }
    let d = decompose(rho).ok()?;
    let local = d.alpha.iter().chain(&d.beta).all(|v| v.abs() < BELL_DIAGONAL_TOL);
    let off_diagonal = (0..3)
        .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
        .all(|(i, j)| d.corr[i][j].abs() < BELL_DIAGONAL_TOL);
    (local && off_diagonal).then(|| [d.corr[0][0], d.corr[1][1], d.corr[2][2]])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerStats {
    pub iterations: usize,
    /// Starting points explored (random restarts plus axis starts).
    pub starts: usize,
    pub converged: bool,
    /// Gradient norm or simplex diameter at the end of the winning run.
    pub final_spread: f64,
    pub bell_fast_path: bool,
    pub gradient_clamped: bool,
    /// Refined grid-oracle minimum of the conditional entropy, when run.
    pub oracle_min: Option<f64>,
    /// Optimizer minimum minus `oracle_min`.
    pub oracle_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalCorrelation {
    pub value: f64,
    pub min_conditional_entropy: f64,
    pub entropy_a: f64,
    pub argmin: VonNeumannMeasurement,
    pub clamped: bool,
    pub stats: OptimizerStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
    pub min_conditional_entropy: f64,
    pub min_conditional_entropy_nats: f64,
    pub optimal_measurement: VonNeumannMeasurement,
    /// Bloch direction of Π₀ for the optimal measurement.
    pub optimal_direction: [f64; 3],
    pub mutual_information_clamped: bool,
    pub classical_correlation_clamped: bool,
    pub stats: OptimizerStats,
}

fn clamp_negative(v: f64) -> (f64, bool) {
    if v < 0.0 && v > -NEGATIVE_CLAMP {
        (0.0, true)
    } else {
        (v, false)
    }
}

/// Conditional-entropy cost over measurement angles, using the closed
/// form when the state is Bell-diagonal.
pub struct ConditionalEntropyCost<'a> {
    rho: &'a DensityMatrix,
    omega: Option<[f64; 3]>,
}

impl<'a> ConditionalEntropyCost<'a> {
    pub fn new(rho: &'a DensityMatrix) -> Result<Self> {
        let (_, n) = rho.dims();
        if n != 2 {
            return Err(Error::DimensionMismatch(format!(
                "measurements act on a qubit B, state has dims {:?}",
                rho.dims()
            )));
        }
        // surfaces eigensolver failures once, before the optimizer swallows them
        conditional_entropy(rho, &VonNeumannMeasurement::IDENTITY)?;
        Ok(Self {
            rho,
            omega: bell_diagonal_omega(rho),
        })
    }

    pub fn omega(&self) -> Option<[f64; 3]> {
        self.omega
    }

    pub fn measurement(&self, meas: &VonNeumannMeasurement) -> f64 {
        match self.omega {
            Some(w) => bell_conditional_entropy(w, meas),
            None => conditional_entropy(self.rho, meas).unwrap_or(f64::INFINITY),
        }
    }

    pub fn angles(&self, phi: &[f64]) -> f64 {
        self.measurement(&VonNeumannMeasurement::from_angles([phi[0], phi[1], phi[2]]))
    }
}

fn run_minimizer(cost: &ConditionalEntropyCost<'_>, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    let f = |phi: &[f64]| cost.angles(phi);
    match cost.omega() {
        Some(w) => {
            let g = move |phi: &[f64]| analytic_gradient_bell(w, [phi[0], phi[1], phi[2]]).to_vec();
            minimize_angles(&f, Some(&g), cfg)
        }
        None => minimize_angles(&f, None, cfg),
    }
}

/// C(ρ) = S(ρ_A) − min over projective measurements on B of Σ pⱼ S(ρⱼ).
pub fn classical_correlation(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<ClassicalCorrelation> {
    classical_correlation_checked(rho, cfg, None)
}

fn classical_correlation_checked(
    rho: &DensityMatrix,
    cfg: &OptimizerConfig,
    oracle_resolution: Option<usize>,
) -> Result<ClassicalCorrelation> {
    cfg.validate()?;
    let cost = ConditionalEntropyCost::new(rho)?;
    let result = run_minimizer(&cost, cfg)?;
    let argmin = VonNeumannMeasurement::from_angles([result.best_params[0], result.best_params[1], result.best_params[2]]);
    let min_ce = result.best_value;
    // the oracle always takes the general route, never the Bell closed form
    let oracle_min = match oracle_resolution {
        Some(res) => {
            let general = |m: &VonNeumannMeasurement| conditional_entropy(rho, m).unwrap_or(f64::INFINITY);
            Some(grid_oracle(&general, res)?.refined_min)
        }
        None => None,
    };
    let entropy_a = match cost.omega() {
        Some(_) => 1.0,
        None => von_neumann_entropy(&rho.marginal(Subsystem::A))?,
    };
    let (value, clamped) = clamp_negative(entropy_a - min_ce);
    Ok(ClassicalCorrelation {
        value,
        min_conditional_entropy: min_ce,
        entropy_a,
        argmin,
        clamped,
        stats: OptimizerStats {
            iterations: result.iterations,
            starts: result.starts,
            converged: result.converged,
            final_spread: result.final_spread,
            bell_fast_path: cost.omega().is_some(),
            gradient_clamped: result.clamped,
            oracle_min,
            oracle_gap: oracle_min.map(|o| min_ce - o),
        },
    })
}

/// Mutual information, classical correlation and discord = I − C.
pub fn quantum_discord(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<CorrelationReport> {
    report(rho, cfg, None)
}

/// As [`quantum_discord`], also comparing the optimizer against a grid
/// oracle at `resolution`.
pub fn quantum_discord_with_oracle(
    rho: &DensityMatrix,
    cfg: &OptimizerConfig,
    resolution: usize,
) -> Result<CorrelationReport> {
    report(rho, cfg, Some(resolution))
}

fn report(rho: &DensityMatrix, cfg: &OptimizerConfig, oracle_resolution: Option<usize>) -> Result<CorrelationReport> {
    let cc = classical_correlation_checked(rho, cfg, oracle_resolution)?;
    let (mi, mi_clamped) = clamp_negative(mutual_information(rho)?);
    Ok(CorrelationReport {
        mutual_information: mi,
        classical_correlation: cc.value,
        discord: mi - cc.value,
        min_conditional_entropy: cc.min_conditional_entropy,
        min_conditional_entropy_nats: cc.min_conditional_entropy * LN_2,
        optimal_measurement: cc.argmin,
        optimal_direction: cc.argmin.bloch_direction(),
        mutual_information_clamped: mi_clamped,
        classical_correlation_clamped: cc.clamped,
        stats: cc.stats,
    })
}

/// Closed-form classical correlation of the Werner state, 1 − h((1 + |a|)/2).
pub fn werner_classical_correlation(a: f64) -> Result<f64> {
    Ok(1.0 - binary_entropy((1.0 + a.abs()) / 2.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_diagonal, mixed_bell_family, werner};

    #[test]
    fn werner_endpoints() {
        let cfg = OptimizerConfig::default();
        let r = quantum_discord(&werner(0.0).unwrap(), &cfg).unwrap();
        assert!(r.mutual_information.abs() < 1e-12);
        assert!(r.discord.abs() < 1e-12);
        let r = quantum_discord(&werner(1.0).unwrap(), &cfg).unwrap();
        assert!((r.mutual_information - 2.0).abs() < 1e-10);
        assert!((r.classical_correlation - 1.0).abs() < 1e-10);
        assert!((r.discord - 1.0).abs() < 1e-10);
        assert!(r.stats.bell_fast_path);
    }

    #[test]
    fn werner_closed_form() {
        let cfg = OptimizerConfig::default();
        for a in [0.1, 0.35, 0.5, 0.8] {
            let c = classical_correlation(&werner(a).unwrap(), &cfg).unwrap();
            assert!((c.value - werner_classical_correlation(a).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn bell_mutual_information_closed_form() {
        for w in [[-0.5, -0.5, -0.5], [0.8, 0.1, 0.1], [0.3, -0.2, 0.1]] {
            let rho = bell_diagonal(w).unwrap();
            assert!((mutual_information(&rho).unwrap() - mutual_information_bell(w).unwrap()).abs() < 1e-10);
            assert_eq!(bell_diagonal_omega(&rho).map(|o| o.map(|v| (v * 1e9).round())), Some(w.map(|v| (v * 1e9).round())));
        }
    }

    #[test]
    fn mixed_bell_is_not_bell_diagonal_and_is_consistent() {
        // a = ½ balances |00⟩ and |11⟩ and is Bell-diagonal
        assert!(bell_diagonal_omega(&mixed_bell_family(0.5).unwrap()).is_some());
        let rho = mixed_bell_family(0.3).unwrap();
        assert!(bell_diagonal_omega(&rho).is_none());
        let r = quantum_discord(&rho, &OptimizerConfig::default()).unwrap();
        assert!(!r.stats.bell_fast_path);
        assert_eq!(r.discord, r.mutual_information - r.classical_correlation);
        assert!(r.discord >= -1e-9 && r.classical_correlation >= 0.0);
    }

    #[test]
    fn rejects_non_qubit_b() {
        let m = crate::linalg::ComplexMatrix::identity(6).scale_real(1.0 / 6.0);
        let rho = DensityMatrix::new(m, (2, 3)).unwrap();
        assert!(classical_correlation(&rho, &OptimizerConfig::default()).is_err());
    }
}
