//! Front-end plumbing shared by the command-line tool and the Python
//! bindings: configuration, state files, sweeps, CSV and plot scripts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{quantum_discord, quantum_discord_with_oracle, CorrelationReport};
use crate::error::{Error, Result};
use crate::linalg::{is_density_matrix, ValidityReport};
use crate::measurement::conditional_entropy;
use crate::optimizer::{grid_oracle, Method, OptimizerConfig, OracleResult};
use crate::states::{bell_diagonal, mixed_bell_family, werner, DensityMatrix, StateFile, FILE_TOL};

/// Environment variable naming a default configuration file.
pub const CONFIG_ENV: &str = "QDISCORD_CONFIG";
pub const CSV_HEADER: &str = "param,mutual_information,classical_correlation,discord,min_conditional_entropy,oracle_min_conditional_entropy,iterations,converged";
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const DEFAULT_ORACLE_RESOLUTION: usize = 200;
const MIN_ORACLE_RESOLUTION: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub optimizer: OptimizerConfig,
    /// Run the grid oracle alongside the optimizer.
    pub oracle: bool,
    pub oracle_resolution: usize,
    pub output_path: Option<PathBuf>,
    pub emit_plot_script: bool,
    /// Validity tolerance applied to state files.
    pub input_tolerance: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            optimizer: OptimizerConfig::default(),
            oracle: false,
            oracle_resolution: DEFAULT_ORACLE_RESOLUTION,
            output_path: None,
            emit_plot_script: false,
            input_tolerance: FILE_TOL,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.optimizer.validate()?;
        if self.oracle_resolution < MIN_ORACLE_RESOLUTION {
            return Err(Error::InvalidConfig(format!(
                "oracle_resolution must be at least {MIN_ORACLE_RESOLUTION}, got {}",
                self.oracle_resolution
            )));
        }
        if self.input_tolerance.is_nan() || self.input_tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "input tolerance must be positive, got {}",
                self.input_tolerance
            )));
        }
        Ok(())
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read(path)?)
    }
}

/// Command-line values that take precedence over the configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub method: Option<Method>,
    pub eta: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
    pub oracle: Option<bool>,
    pub oracle_resolution: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub emit_plot_script: Option<bool>,
    pub input_tolerance: Option<f64>,
}

impl ConfigOverrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        let opt = &mut cfg.optimizer;
        if let Some(v) = self.method {
            opt.method = v;
        }
        if let Some(v) = self.eta {
            opt.eta = v;
        }
        if let Some(v) = self.tol {
            opt.tol = v;
        }
        if let Some(v) = self.max_iter {
            opt.max_iter = v;
        }
        if let Some(v) = self.restarts {
            opt.restarts = v;
        }
        if let Some(v) = self.seed {
            opt.seed = v;
        }
        if let Some(v) = self.oracle {
            cfg.oracle = v;
        }
        if let Some(v) = self.oracle_resolution {
            cfg.oracle_resolution = v;
        }
        if let Some(v) = &self.output_path {
            cfg.output_path = Some(v.clone());
        }
        if let Some(v) = self.emit_plot_script {
            cfg.emit_plot_script = v;
        }
        if let Some(v) = self.input_tolerance {
            cfg.input_tolerance = v;
        }
    }
}

/// Defaults, then the file at `config_path` if any, then `overrides`.
pub fn resolve_config(config_path: Option<&Path>, overrides: &ConfigOverrides) -> Result<RunConfig> {
    let mut cfg = match config_path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    overrides.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_state_file(path: &Path) -> Result<StateFile> {
    StateFile::parse(&read(path)?)
}

/// Parses and validates a state file at `tol`.
pub fn load_state(path: &Path, tol: f64) -> Result<DensityMatrix> {
    load_state_file(path)?.to_state(tol)
}

pub fn write_state(path: &Path, rho: &DensityMatrix) -> Result<()> {
    write(path, &StateFile::from_state(rho).to_json())
}

/// Exit code for a finished computation.
pub fn exit_code(report: &CorrelationReport) -> i32 {
    if report.stats.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    }
}

pub fn compute(rho: &DensityMatrix, cfg: &RunConfig) -> Result<CorrelationReport> {
    cfg.validate()?;
    if cfg.oracle {
        quantum_discord_with_oracle(rho, &cfg.optimizer, cfg.oracle_resolution)
    } else {
        quantum_discord(rho, &cfg.optimizer)
    }
}

pub fn format_report(r: &CorrelationReport) -> String {
    let mut s = String::new();
    let d = r.optimal_direction;
    let m = r.optimal_measurement;
    let _ = writeln!(s, "mutual information        {:.10}", r.mutual_information);
    let _ = writeln!(s, "classical correlation     {:.10}", r.classical_correlation);
    let _ = writeln!(s, "quantum discord           {:.10}", r.discord);
    let _ = writeln!(
        s,
        "min conditional entropy   {:.10} bits ({:.10} nats)",
        r.min_conditional_entropy, r.min_conditional_entropy_nats
    );
    let _ = writeln!(s, "optimal measurement       r={:.8} y=({:.8}, {:.8}, {:.8})", m.r, m.y[0], m.y[1], m.y[2]);
    let _ = writeln!(s, "projector direction       ({:.8}, {:.8}, {:.8})", d[0], d[1], d[2]);
    if let (Some(o), Some(g)) = (r.stats.oracle_min, r.stats.oracle_gap) {
        let _ = writeln!(s, "oracle min cond. entropy  {o:.10} (gap {g:.3e})");
    }
    let st = &r.stats;
    let _ = writeln!(
        s,
        "optimizer                 {} iterations over {} starts, {}, final spread {:.3e}{}",
        st.iterations,
        st.starts,
        if st.converged { "converged" } else { "NOT converged" },
        st.final_spread,
        if st.bell_fast_path { ", Bell-diagonal closed form" } else { "" }
    );
    if r.mutual_information_clamped || r.classical_correlation_clamped {
        let _ = writeln!(s, "note                      tiny negative values were clamped to 0");
    }
    s
}

#[derive(Debug, Clone)]
pub struct ComputeOutcome {
    pub report: CorrelationReport,
    pub text: String,
    pub exit_code: i32,
}

/// Loads, computes and writes the JSON report to `cfg.output_path` if set.
pub fn cmd_compute(state_path: &Path, cfg: &RunConfig) -> Result<ComputeOutcome> {
    cfg.validate()?;
    let rho = load_state(state_path, cfg.input_tolerance)?;
    let report = compute(&rho, cfg)?;
    if let Some(out) = &cfg.output_path {
        let json = serde_json::to_string_pretty(&report).expect("plain data serializes");
        write(out, &json)?;
    }
    Ok(ComputeOutcome {
        text: format_report(&report),
        exit_code: exit_code(&report),
        report,
    })
}

/// Grid oracle over the general conditional-entropy route.
pub fn oracle_for_state(rho: &DensityMatrix, resolution: usize) -> Result<OracleResult> {
    conditional_entropy(rho, &crate::measurement::VonNeumannMeasurement::IDENTITY)?;
    let cost = |m: &crate::measurement::VonNeumannMeasurement| conditional_entropy(rho, m).unwrap_or(f64::INFINITY);
    grid_oracle(&cost, resolution)
}

pub fn format_oracle(o: &OracleResult) -> String {
    format!(
        "grid minimum              {:.10}\nrefined minimum           {:.10} bits ({:.10} nats)\nprojector direction       ({:.8}, {:.8}, {:.8})\nevaluations               {}\n",
        o.grid_min,
        o.refined_min,
        o.refined_min * std::f64::consts::LN_2,
        o.direction[0],
        o.direction[1],
        o.direction[2],
        o.evaluations
    )
}

pub fn cmd_oracle(state_path: &Path, resolution: usize, tol: f64) -> Result<(OracleResult, String)> {
    let rho = load_state(state_path, tol)?;
    let o = oracle_for_state(&rho, resolution)?;
    let text = format_oracle(&o);
    Ok((o, text))
}

/// Parses the file and checks it at `tol`; an invalid matrix is reported,
/// not returned as an error.
pub fn cmd_validate(state_path: &Path, tol: f64) -> Result<ValidityReport> {
    let file = load_state_file(state_path)?;
    Ok(is_density_matrix(&file.matrix()?, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Werner,
    MixedBell,
    BellDiagonal,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "werner" => Ok(Family::Werner),
            "mixed_bell" => Ok(Family::MixedBell),
            "bell_diagonal" => Ok(Family::BellDiagonal),
            other => Err(Error::InvalidConfig(format!("unknown family '{other}'"))),
        }
    }
}

/// ω(p) = offset + p · slope, for Bell-diagonal sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaLine {
    pub offset: [f64; 3],
    pub slope: [f64; 3],
}

impl Default for OmegaLine {
    fn default() -> Self {
        Self {
            offset: [0.0; 3],
            slope: [1.0, -1.0, 1.0],
        }
    }
}

impl OmegaLine {
    pub fn at(&self, p: f64) -> [f64; 3] {
        [0, 1, 2].map(|i| self.offset[i] + p * self.slope[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub family: Family,
    pub param_start: f64,
    pub param_end: f64,
    pub param_step: f64,
    #[serde(default)]
    pub omega: Option<OmegaLine>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.param_step.is_finite() || self.param_step <= 0.0 {
            return Err(Error::InvalidConfig(format!("step must be positive, got {}", self.param_step)));
        }
        if self.param_start.is_nan() || self.param_end.is_nan() || self.param_start > self.param_end {
            return Err(Error::InvalidConfig(format!(
                "start {} exceeds end {}",
                self.param_start, self.param_end
            )));
        }
        if self.omega.is_some() && self.family != Family::BellDiagonal {
            return Err(Error::InvalidConfig("omega applies to bell_diagonal sweeps only".into()));
        }
        Ok(())
    }

    /// start + k·step for k = 0, 1, …, with the last point snapped to `end`
    /// when it lands within rounding of it.
    pub fn params(&self) -> Vec<f64> {
        let span = (self.param_end - self.param_start) / self.param_step;
        let n = (span + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|k| {
                let p = self.param_start + k as f64 * self.param_step;
                if (p - self.param_end).abs() < 1e-9 * self.param_step.max(1.0) {
                    self.param_end
                } else {
                    p.min(self.param_end)
                }
            })
            .collect()
    }

    pub fn state(&self, p: f64) -> Result<DensityMatrix> {
        let rho = match self.family {
            Family::Werner => werner(p),
            Family::MixedBell => mixed_bell_family(p),
            Family::BellDiagonal => bell_diagonal(self.omega.unwrap_or_default().at(p)),
        };
        rho.map_err(|e| Error::InvalidState(format!("sweep parameter {p}: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub report: CorrelationReport,
}

/// Computes every row concurrently; rows come back in parameter order.
pub fn run_sweep(spec: &SweepSpec, cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    cfg.validate()?;
    let params = spec.params();
    // validate every state before spending time on any row
    let states = params.iter().map(|&p| spec.state(p)).collect::<Result<Vec<_>>>()?;
    params
        .par_iter()
        .zip(states.par_iter())
        .map(|(&param, rho)| {
            let report = compute(rho, cfg).map_err(|e| Error::InvalidState(format!("sweep parameter {param}: {e}")))?;
            Ok(SweepRow { param, report })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::with_capacity(128 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for row in rows {
        let r = &row.report;
        let oracle = r.stats.oracle_min.map(|v| format!("{v:.10}")).unwrap_or_default();
        let _ = writeln!(
            s,
            "{:.10},{:.10},{:.10},{:.10},{:.10},{},{},{}",
            row.param,
            r.mutual_information,
            r.classical_correlation,
            r.discord,
            r.min_conditional_entropy,
            oracle,
            r.stats.iterations,
            r.stats.converged
        );
    }
    s
}

/// Gnuplot script plotting classical correlation and discord against the
/// swept parameter from `csv_name`, resolved relative to the script.
pub fn plot_script(csv_name: &str, family: Family) -> String {
    let stem = csv_name.strip_suffix(".csv").unwrap_or(csv_name);
    let title = match family {
        Family::Werner => "Werner state",
        Family::MixedBell => "mixed-Bell family",
        Family::BellDiagonal => "Bell-diagonal family",
    };
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 800,600\n\
         set output '{stem}.png'\n\
         set title '{title}'\n\
         set xlabel 'parameter'\n\
         set ylabel 'bits'\n\
         set key top left\n\
         set grid\n\
         plot '{csv_name}' using 1:3 skip 1 with linespoints title 'classical correlation', \\\n     \
         '{csv_name}' using 1:4 skip 1 with linespoints title 'quantum discord'\n"
    )
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub csv: String,
    pub csv_path: Option<PathBuf>,
    pub plot_path: Option<PathBuf>,
    pub exit_code: i32,
}

/// Runs the sweep and writes the CSV (and plot script, if requested) next
/// to `cfg.output_path`.
pub fn cmd_sweep(spec: &SweepSpec, cfg: &RunConfig) -> Result<SweepOutcome> {
    let rows = run_sweep(spec, cfg)?;
    let csv = sweep_csv(&rows);
    let mut plot_path = None;
    if let Some(out) = &cfg.output_path {
        write(out, &csv)?;
        if cfg.emit_plot_script {
            let name = out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let script = out.with_extension("gp");
            write(&script, &plot_script(&name, spec.family))?;
            plot_path = Some(script);
        }
    }
    let exit_code = if rows.iter().all(|r| r.report.stats.converged) {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    };
    Ok(SweepOutcome {
        rows,
        csv,
        csv_path: cfg.output_path.clone(),
        plot_path,
        exit_code,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_hit_the_endpoints() {
        let spec = SweepSpec {
            family: Family::Werner,
            param_start: 0.0,
            param_end: 1.0,
            param_step: 0.05,
            omega: None,
        };
        let p = spec.params();
        assert_eq!(p.len(), 21);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[20], 1.0);
        let spec = SweepSpec {
            param_start: 0.05,
            ..spec
        };
        assert_eq!(spec.params().len(), 20);
    }

    #[test]
    fn spec_validation() {
        let good = SweepSpec {
            family: Family::MixedBell,
            param_start: 0.1,
            param_end: 0.2,
            param_step: 0.1,
            omega: None,
        };
        assert!(good.validate().is_ok());
        assert!(SweepSpec { param_step: 0.0, ..good.clone() }.validate().is_err());
        assert!(SweepSpec { param_start: 0.5, ..good.clone() }.validate().is_err());
        assert!(SweepSpec { omega: Some(OmegaLine::default()), ..good.clone() }.validate().is_err());
        let bad_state = SweepSpec { param_start: 0.0, ..good };
        let err = run_sweep(&bad_state, &RunConfig::default()).unwrap_err();
        assert!(err.to_string().contains("sweep parameter 0"), "{err}");
    }

    #[test]
    fn config_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        fs::write(&path, r#"{"optimizer": {"seed": 7, "eta": 0.2}, "oracle_resolution": 50}"#).unwrap();
        let cfg = resolve_config(Some(&path), &ConfigOverrides::default()).unwrap();
        assert_eq!(cfg.optimizer.seed, 7);
        assert_eq!(cfg.optimizer.eta, 0.2);
        assert_eq!(cfg.optimizer.max_iter, OptimizerConfig::default().max_iter);
        assert_eq!(cfg.oracle_resolution, 50);
        let over = ConfigOverrides {
            seed: Some(9),
            ..Default::default()
        };
        let cfg = resolve_config(Some(&path), &over).unwrap();
        assert_eq!((cfg.optimizer.seed, cfg.optimizer.eta), (9, 0.2));
        let over = ConfigOverrides {
            oracle_resolution: Some(4),
            ..Default::default()
        };
        assert!(resolve_config(None, &over).is_err());
    }

    #[test]
    fn csv_shape() {
        let spec = SweepSpec {
            family: Family::Werner,
            param_start: 0.0,
            param_end: 1.0,
            param_step: 0.5,
            omega: None,
        };
        let rows = run_sweep(&spec, &RunConfig::default()).unwrap();
        let csv = sweep_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first.len(), 8);
        assert_eq!(first[0], "0.0000000000");
        assert_eq!(first[5], "");
        let last: Vec<&str> = lines[3].split(',').collect();
        assert_eq!(&last[..4], &["1.0000000000", "2.0000000000", "1.0000000000", "1.0000000000"]);
    }
}
