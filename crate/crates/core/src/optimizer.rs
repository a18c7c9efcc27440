//! Minimizers for the conditional-entropy landscape over measurement angles.
//!
//! The search space is the three hyperspherical angles of
//! [`VonNeumannMeasurement::from_angles`], so every point is a valid
//! measurement and no constraint handling is needed. [`grid_oracle`] is a
//! brute-force check that never touches the angle parameterization: it
//! samples Bloch directions of Π₀ directly.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{paulis, sigma_z, ComplexMatrix};
use crate::measurement::{bell_xi, VonNeumannMeasurement};

/// Gradient components are clamped to this magnitude.
pub const GRADIENT_CLAMP: f64 = 1e6;
/// Consecutive step-size halvings tolerated by gradient descent.
pub const MAX_HALVINGS: usize = 20;
/// Initial Nelder-Mead simplex edge, in radians.
pub const SIMPLEX_STEP: f64 = 0.5;
/// Grid resolution used by [`Method::GridThenPolish`] before polishing.
pub const POLISH_GRID_RESOLUTION: usize = 32;
const REFINE_LEVELS: u32 = 3;
const REFINE_HALF_WIDTH: i32 = 3;
const GOLDEN_ITERATIONS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    GradientDescent,
    #[default]
    NelderMead,
    GridThenPolish,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "gradient_descent" | "gd" => Ok(Method::GradientDescent),
            "nelder_mead" | "nm" => Ok(Method::NelderMead),
            "grid_then_polish" | "grid" => Ok(Method::GridThenPolish),
            other => Err(Error::InvalidConfig(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub method: Method,
    /// Gradient-descent learning rate.
    pub eta: f64,
    /// Central-difference step.
    pub fd_step: f64,
    /// Value-change tolerance (gradient descent) or simplex diameter (Nelder-Mead).
    pub tol: f64,
    pub max_iter: usize,
    /// Number of seeded random starts, on top of the six axis-aligned ones.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            method: Method::NelderMead,
            eta: 0.05,
            fd_step: 1e-6,
            tol: 1e-8,
            max_iter: 5000,
            restarts: 8,
            seed: 42,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")))
            }
        };
        positive("eta", self.eta)?;
        positive("fd_step", self.fd_step)?;
        positive("tol", self.tol)?;
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Final gradient norm (gradient descent) or simplex diameter (Nelder-Mead).
    pub final_spread: f64,
    /// Number of starting points explored.
    pub starts: usize,
    /// Whether a gradient clamp triggered a line search.
    pub clamped: bool,
    pub trace: Option<Vec<(usize, f64)>>,
}

/// Central differences (f(θ + h eₖ) − f(θ − h eₖ)) / 2h.
pub fn finite_diff_gradient<F: Fn(&[f64]) -> f64 + ?Sized>(cost: &F, theta: &[f64], h: f64) -> Vec<f64> {
    let mut x = theta.to_vec();
    (0..theta.len())
        .map(|k| {
            x[k] = theta[k] + h;
            let fp = cost(&x);
            x[k] = theta[k] - h;
            let fm = cost(&x);
            x[k] = theta[k];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Clamps each component to ±[`GRADIENT_CLAMP`]; reports whether any was cut.
pub fn clamp_gradient(g: &mut [f64]) -> bool {
    let mut hit = false;
    for v in g.iter_mut() {
        if v.abs() > GRADIENT_CLAMP {
            *v = GRADIENT_CLAMP.copysign(*v);
            hit = true;
        }
    }
    hit
}

/// ∂(r, y₁, y₂, y₃)/∂(φ₁, φ₂, φ₃) of the hyperspherical map, rows indexed by (r, y…).
fn hyperspherical_jacobian(phi: [f64; 3]) -> [[f64; 3]; 4] {
    let (s1, c1) = phi[0].sin_cos();
    let (s2, c2) = phi[1].sin_cos();
    let (s3, c3) = phi[2].sin_cos();
    [
        [-s1, 0.0, 0.0],
        [c1 * c2, -s1 * s2, 0.0],
        [c1 * s2 * c3, s1 * c2 * c3, -s1 * s2 * s3],
        [c1 * s2 * s3, s1 * c2 * s3, s1 * s2 * c3],
    ]
}

/// ∂zᵢ/∂φₖ where z is the Bloch vector of V σ_z V†, via
/// ∂z = Re Tr(σᵢ ∂V σ_z V†) · 2/2 and ∂V/∂r = I, ∂V/∂yₖ = iσₖ.
pub fn bloch_direction_jacobian(phi: [f64; 3]) -> [[f64; 3]; 3] {
    let meas = VonNeumannMeasurement::from_angles(phi);
    let v = meas.unitary();
    let sz_vdag = sigma_z().matmul(&v.adjoint());
    let sig = paulis();
    let i = num_complex::Complex64::new(0.0, 1.0);
    let dv: [ComplexMatrix; 4] = [
        ComplexMatrix::identity(2),
        sig[0].scale(i),
        sig[1].scale(i),
        sig[2].scale(i),
    ];
    // dz/dq for q ∈ (r, y₁, y₂, y₃)
    let mut dz_dq = [[0.0; 4]; 3];
    for (q, d) in dv.iter().enumerate() {
        let a = d.matmul(&sz_vdag);
        for (row, s) in sig.iter().enumerate() {
            dz_dq[row][q] = a.trace_product(s).re;
        }
    }
    let jac = hyperspherical_jacobian(phi);
    let mut out = [[0.0; 3]; 3];
    for (row, dzq) in dz_dq.iter().enumerate() {
        for k in 0..3 {
            out[row][k] = (0..4).map(|q| dzq[q] * jac[q][k]).sum();
        }
    }
    out
}

/// Analytic gradient of h((1 + ξ(φ))/2) for a Bell-diagonal ω, where
/// ξ = |(ωᵢ zᵢ)|. The binary-entropy slope is evaluated with ξ capped at
/// 1 − 1e-12 and the result is clamped to ±[`GRADIENT_CLAMP`].
pub fn analytic_gradient_bell(omega: [f64; 3], phi: [f64; 3]) -> [f64; 3] {
    let z = VonNeumannMeasurement::from_angles(phi).bloch_direction();
    let xi = bell_xi(omega, z);
    if xi < 1e-12 {
        return [0.0; 3];
    }
    let dz = bloch_direction_jacobian(phi);
    let dxi = [0, 1, 2].map(|k| (0..3).map(|i| omega[i] * omega[i] * z[i] * dz[i][k]).sum::<f64>() / xi);
    let x = (1.0 + xi.min(1.0 - 1e-12)) / 2.0;
    let slope = ((1.0 - x) / x).log2();
    let mut g = dxi.map(|d| 0.5 * slope * d);
    clamp_gradient(&mut g);
    g
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..GOLDEN_ITERATIONS {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        }
    }
    if fa <= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// θ ← θ − η ∇f(θ), accepting only non-increasing steps.
///
/// A step that raises the value by more than `tol` is rejected and η is
/// halved; more than [`MAX_HALVINGS`] halvings in a row is reported as
/// divergence. Convergence is a value change below `tol`. When the gradient
/// hits the clamp, a golden-section search along −∇f replaces the fixed step.
pub fn gradient_descent<F, G>(cost: &F, grad: &G, theta0: &[f64], cfg: &OptimizerConfig) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
    G: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    cfg.validate()?;
    let mut theta = theta0.to_vec();
    let mut value = cost(&theta);
    let mut eta = cfg.eta;
    let mut halvings = 0;
    let mut trace = vec![(0, value)];
    let mut converged = false;
    let mut clamped_any = false;
    let mut gnorm = f64::INFINITY;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        iterations += 1;
        let mut g = grad(&theta);
        let clamped = clamp_gradient(&mut g);
        gnorm = norm(&g);
        if gnorm == 0.0 {
            converged = true;
            break;
        }
        let (trial, trial_value) = if clamped {
            clamped_any = true;
            let dir: Vec<f64> = g.iter().map(|x| -x / gnorm).collect();
            let along = |t: f64| {
                let p: Vec<f64> = theta.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
                cost(&p)
            };
            let (t, v) = golden_section(along, 0.0, PI / 2.0);
            (theta.iter().zip(&dir).map(|(a, d)| a + t * d).collect::<Vec<_>>(), v)
        } else {
            let p: Vec<f64> = theta.iter().zip(&g).map(|(a, d)| a - eta * d).collect();
            let v = cost(&p);
            (p, v)
        };

        if trial_value <= value {
            let change = value - trial_value;
            theta = trial;
            value = trial_value;
            halvings = 0;
            trace.push((iterations, value));
            if change < cfg.tol {
                converged = true;
                break;
            }
        } else if trial_value - value < cfg.tol {
            converged = true;
            break;
        } else {
            eta /= 2.0;
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(Error::Diverged { halvings });
            }
        }
    }

    Ok(OptimizationResult {
        best_params: theta,
        best_value: value,
        iterations,
        converged,
        final_spread: gnorm,
        starts: 1,
        clamped: clamped_any,
        trace: Some(trace),
    })
}

/// Downhill simplex with reflection 1, expansion 2, contraction ½ and
/// shrink ½. Converged once the largest vertex distance from the best
/// vertex falls below `cfg.tol`.
pub fn nelder_mead<F>(cost: &F, theta0: &[f64], cfg: &OptimizerConfig) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    cfg.validate()?;
    let n = theta0.len();
    if n == 0 {
        return Err(Error::InvalidConfig("Nelder-Mead needs at least one parameter".into()));
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((theta0.to_vec(), cost(theta0)));
    for k in 0..n {
        let mut p = theta0.to_vec();
        p[k] += SIMPLEX_STEP;
        let v = cost(&p);
        simplex.push((p, v));
    }

    let lerp = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
        from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
    };
    let diameter = |s: &[(Vec<f64>, f64)]| {
        s[1..]
            .iter()
            .map(|(p, _)| norm(&p.iter().zip(&s[0].0).map(|(a, b)| a - b).collect::<Vec<_>>()))
            .fold(0.0, f64::max)
    };

    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    loop {
        // stable sort keeps vertex order deterministic on ties
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        trace.push((iterations, simplex[0].1));
        if diameter(&simplex) < cfg.tol {
            converged = true;
            break;
        }
        if iterations >= cfg.max_iter {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(p, _)| p[k]).sum::<f64>() / n as f64)
            .collect();
        let (worst, f_worst) = simplex[n].clone();
        let f_best = simplex[0].1;
        let f_second = simplex[n - 1].1;

        let reflected = lerp(&centroid, &worst, -1.0);
        let f_r = cost(&reflected);
        if f_r < f_best {
            let expanded = lerp(&centroid, &worst, -2.0);
            let f_e = cost(&expanded);
            simplex[n] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
            continue;
        }
        if f_r < f_second {
            simplex[n] = (reflected, f_r);
            continue;
        }
        let contracted = if f_r < f_worst {
            let c = lerp(&centroid, &reflected, 0.5);
            let f_c = cost(&c);
            (f_c <= f_r).then_some((c, f_c))
        } else {
            let c = lerp(&centroid, &worst, 0.5);
            let f_c = cost(&c);
            (f_c < f_worst).then_some((c, f_c))
        };
        match contracted {
            Some(v) => simplex[n] = v,
            None => {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let p = lerp(&best, &vertex.0, 0.5);
                    let v = cost(&p);
                    *vertex = (p, v);
                }
            }
        }
    }

    let spread = diameter(&simplex);
    let (best_params, best_value) = simplex.swap_remove(0);
    Ok(OptimizationResult {
        best_params,
        best_value,
        iterations,
        converged,
        final_spread: spread,
        starts: 1,
        clamped: false,
        trace: Some(trace),
    })
}

/// Brute-force minimum over Bloch directions of Π₀.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleResult {
    pub grid_min: f64,
    pub refined_min: f64,
    pub argmin: VonNeumannMeasurement,
    /// Bloch direction of the optimal Π₀.
    pub direction: [f64; 3],
    pub evaluations: usize,
}

fn direction_of(u: f64, phi: f64) -> VonNeumannMeasurement {
    VonNeumannMeasurement::from_polar(u.clamp(-1.0, 1.0).acos(), phi)
}

/// Evaluates `cost` on a `resolution × resolution` grid uniform in
/// (cos θ, φ), then refines around the best point with three levels of
/// 3× finer local 7×7 grids.
pub fn grid_oracle<F>(cost: &F, resolution: usize) -> Result<OracleResult>
where
    F: Fn(&VonNeumannMeasurement) -> f64 + Sync + ?Sized,
{
    if resolution < 8 {
        return Err(Error::InvalidConfig(format!(
            "oracle resolution must be at least 8, got {resolution}"
        )));
    }
    let du = 2.0 / resolution as f64;
    let dphi = 2.0 * PI / resolution as f64;
    // (value, flat index) minimum; index breaks ties so the scan order does not matter
    let (grid_min, idx) = (0..resolution * resolution)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / resolution, k % resolution);
            let u = -1.0 + (i as f64 + 0.5) * du;
            let phi = (j as f64 + 0.5) * dphi;
            (cost(&direction_of(u, phi)), k)
        })
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| match a.0.total_cmp(&b.0) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Greater => b,
                std::cmp::Ordering::Equal => {
                    if a.1 <= b.1 {
                        a
                    } else {
                        b
                    }
                }
            },
        );
    let mut best_u = -1.0 + ((idx / resolution) as f64 + 0.5) * du;
    let mut best_phi = ((idx % resolution) as f64 + 0.5) * dphi;
    let mut best = grid_min;
    let mut evaluations = resolution * resolution;

    for level in 1..=REFINE_LEVELS {
        let scale = 3f64.powi(level as i32);
        let (su, sphi) = (du / scale, dphi / scale);
        let (cu, cphi) = (best_u, best_phi);
        for a in -REFINE_HALF_WIDTH..=REFINE_HALF_WIDTH {
            let u = (cu + a as f64 * su).clamp(-1.0, 1.0);
            for b in -REFINE_HALF_WIDTH..=REFINE_HALF_WIDTH {
                let phi = cphi + b as f64 * sphi;
                let v = cost(&direction_of(u, phi));
                evaluations += 1;
                if v < best {
                    best = v;
                    best_u = u;
                    best_phi = phi;
                }
            }
        }
    }
    let argmin = direction_of(best_u, best_phi);
    Ok(OracleResult {
        grid_min,
        refined_min: best,
        argmin,
        direction: argmin.bloch_direction(),
        evaluations,
    })
}

/// Angles of measurements along ±x, ±y, ±z followed by `cfg.restarts`
/// seeded random angle triples.
pub fn start_points(cfg: &OptimizerConfig) -> Vec<[f64; 3]> {
    let axes = [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let mut starts: Vec<[f64; 3]> = axes
        .iter()
        .map(|d| {
            VonNeumannMeasurement::from_bloch_direction(*d)
                .expect("unit axis")
                .angles()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.restarts {
        starts.push([rng.gen_range(0.0..PI), rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI)]);
    }
    starts
}

/// Runs `inner` from every point of [`start_points`] and keeps the lowest
/// value (earliest start wins ties). Starts whose run fails are skipped;
/// the error of the first failure is returned only if every start fails.
pub fn multi_start<R>(cfg: &OptimizerConfig, mut inner: R) -> Result<OptimizationResult>
where
    R: FnMut(&[f64]) -> Result<OptimizationResult>,
{
    cfg.validate()?;
    let starts = start_points(cfg);
    let mut best: Option<OptimizationResult> = None;
    let mut first_error = None;
    let mut iterations = 0;
    let mut clamped = false;
    for s in &starts {
        match inner(s) {
            Ok(r) => {
                iterations += r.iterations;
                clamped |= r.clamped;
                if best.as_ref().is_none_or(|b| r.best_value < b.best_value) {
                    best = Some(r);
                }
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    match best {
        Some(mut b) => {
            b.iterations = iterations;
            b.starts = starts.len();
            b.clamped = clamped;
            Ok(b)
        }
        None => Err(first_error.expect("at least one start")),
    }
}

/// Gradient callback accepted by [`minimize_angles`].
pub type GradientFn = dyn Fn(&[f64]) -> Vec<f64> + Sync;

/// Minimizes a cost over measurement angles with the configured method.
/// `grad` is used by gradient descent; `None` falls back to central
/// differences with `cfg.fd_step`.
pub fn minimize_angles<F>(
    cost: &F,
    grad: Option<&GradientFn>,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    cfg.validate()?;
    match cfg.method {
        Method::NelderMead => multi_start(cfg, |s| nelder_mead(cost, s, cfg)),
        Method::GradientDescent => {
            let fd = |t: &[f64]| finite_diff_gradient(cost, t, cfg.fd_step);
            multi_start(cfg, |s| match grad {
                Some(g) => gradient_descent(cost, g, s, cfg),
                None => gradient_descent(cost, &fd, s, cfg),
            })
        }
        Method::GridThenPolish => {
            let on_measurement = |m: &VonNeumannMeasurement| cost(&m.angles());
            let oracle = grid_oracle(&on_measurement, POLISH_GRID_RESOLUTION)?;
            let mut r = nelder_mead(cost, &oracle.argmin.angles(), cfg)?;
            r.iterations += oracle.evaluations;
            Ok(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn fd_gradient_of_quadratic_and_constant() {
        let g = finite_diff_gradient(&quad, &[1.0, 2.0], 1e-5);
        assert!((g[0] - 2.0).abs() < 1e-6 && (g[1] - 4.0).abs() < 1e-6);
        let g = finite_diff_gradient(&|_: &[f64]| 3.5, &[0.3, -1.0, 2.0], 1e-5);
        assert!(g.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn gd_quadratic_bowl() {
        let cfg = OptimizerConfig {
            eta: 0.1,
            max_iter: 200,
            ..Default::default()
        };
        let grad = |x: &[f64]| x.iter().map(|v| 2.0 * v).collect::<Vec<_>>();
        let r = gradient_descent(&quad, &grad, &[1.0, -2.0], &cfg).unwrap();
        assert!(r.converged && r.iterations <= 200);
        assert!(r.best_value < 1e-7);
        let values: Vec<f64> = r.trace.unwrap().iter().map(|t| t.1).collect();
        assert!(values.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn gd_halves_a_too_large_step() {
        let cfg = OptimizerConfig {
            eta: 5.0,
            ..Default::default()
        };
        let grad = |x: &[f64]| x.iter().map(|v| 2.0 * v).collect::<Vec<_>>();
        let r = gradient_descent(&quad, &grad, &[1.0], &cfg).unwrap();
        assert!(r.converged && r.best_value < 1e-7);
    }

    #[test]
    fn gd_reports_divergence_for_a_wrong_gradient() {
        let grad = |x: &[f64]| x.iter().map(|v| -2.0 * v - 1.0).collect::<Vec<_>>();
        let r = gradient_descent(&quad, &grad, &[1.0], &OptimizerConfig::default());
        assert!(matches!(r, Err(Error::Diverged { .. })));
    }

    #[test]
    fn nm_parabola_1d() {
        let r = nelder_mead(&quad, &[3.0], &OptimizerConfig::default()).unwrap();
        assert!(r.converged);
        assert!(r.best_params[0].abs() < 1e-6);
        assert_eq!(r.best_value, quad(&r.best_params));
    }

    #[test]
    fn nm_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(&rosen, &[-1.2, 1.0], &OptimizerConfig::default()).unwrap();
        assert!(r.converged);
        assert!((r.best_params[0] - 1.0).abs() < 1e-6 && (r.best_params[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn nm_flat_cost_converges_by_shrinking() {
        let r = nelder_mead(&|_: &[f64]| 1.0, &[0.1, 0.2, 0.3], &OptimizerConfig::default()).unwrap();
        assert!(r.converged && r.iterations < 100);
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        for bad in [
            OptimizerConfig { eta: 0.0, ..Default::default() },
            OptimizerConfig { fd_step: -1.0, ..Default::default() },
            OptimizerConfig { tol: f64::NAN, ..Default::default() },
            OptimizerConfig { max_iter: 0, ..Default::default() },
            OptimizerConfig { restarts: 0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
        assert_eq!("nelder-mead".parse::<Method>().unwrap(), Method::NelderMead);
        assert!("simulated_annealing".parse::<Method>().is_err());
    }

    #[test]
    fn oracle_rejects_coarse_grids() {
        assert!(grid_oracle(&|_: &VonNeumannMeasurement| 0.0, 7).is_err());
    }

    #[test]
    fn oracle_finds_a_pole() {
        // minimum of −z₃ sits exactly at the north pole
        let cost = |m: &VonNeumannMeasurement| -m.bloch_direction()[2];
        let r = grid_oracle(&cost, 20).unwrap();
        assert!((r.refined_min + 1.0).abs() < 1e-12);
        assert!(r.refined_min <= r.grid_min);
    }

    #[test]
    fn start_points_are_seeded() {
        let cfg = OptimizerConfig::default();
        let a = start_points(&cfg);
        assert_eq!(a.len(), 6 + cfg.restarts);
        assert_eq!(a, start_points(&cfg));
        let other = start_points(&OptimizerConfig { seed: 7, ..cfg });
        assert_ne!(a[6], other[6]);
        assert_eq!(a[..6], other[..6]);
        for (k, d) in [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]
            .iter()
            .enumerate()
        {
            let z = VonNeumannMeasurement::from_angles(a[k]).bloch_direction();
            for i in 0..3 {
                assert!((z[i] - d[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn multi_start_skips_failures() {
        let cfg = OptimizerConfig::default();
        let mut calls = 0;
        let r = multi_start(&cfg, |s| {
            calls += 1;
            if calls % 2 == 0 {
                Err(Error::Diverged { halvings: 21 })
            } else {
                nelder_mead(&quad, s, &cfg)
            }
        })
        .unwrap();
        assert!(r.best_value < 1e-14);
        let all_fail = multi_start(&cfg, |_| Err(Error::Diverged { halvings: 21 }));
        assert!(all_fail.is_err());
    }
}
