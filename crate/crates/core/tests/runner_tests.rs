use std::fs;

use discord_core::linalg::{binary_entropy, ComplexMatrix};
use discord_core::runner::{
    cmd_compute, cmd_oracle, cmd_sweep, cmd_validate, write_state, Family, OmegaLine, RunConfig, SweepSpec,
    CSV_HEADER, EXIT_OK,
};
use discord_core::states::{tabulated_random_matrix, werner, DensityMatrix, StateFile};

fn werner_sweep(step: f64) -> SweepSpec {
    SweepSpec {
        family: Family::Werner,
        param_start: 0.0,
        param_end: 1.0,
        param_step: step,
        omega: None,
    }
}

#[test]
fn compute_werner_file_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("w.json");
    let report_path = dir.path().join("report.json");
    write_state(&state, &werner(0.5).unwrap()).unwrap();
    let cfg = RunConfig {
        oracle: true,
        output_path: Some(report_path.clone()),
        ..Default::default()
    };
    let out = cmd_compute(&state, &cfg).unwrap();
    assert_eq!(out.exit_code, EXIT_OK);
    assert!(out.report.stats.oracle_gap.unwrap().abs() < 1e-5);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    for key in ["mutual_information", "classical_correlation", "discord", "min_conditional_entropy", "stats"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert!(out.text.contains("quantum discord"));
}

#[test]
fn maximally_mixed_file_gives_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("mixed.json");
    let rho = DensityMatrix::new(ComplexMatrix::identity(4).scale_real(0.25), (2, 2)).unwrap();
    write_state(&state, &rho).unwrap();
    let r = cmd_compute(&state, &RunConfig::default()).unwrap().report;
    assert!(r.mutual_information.abs() < 1e-12);
    assert!(r.classical_correlation.abs() < 1e-12);
    assert!(r.discord.abs() < 1e-12);
}

#[test]
fn oracle_on_werner_and_product_states() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("w.json");
    write_state(&state, &werner(0.5).unwrap()).unwrap();
    let (o, text) = cmd_oracle(&state, 20, 1e-6).unwrap();
    assert!((o.refined_min - binary_entropy(0.75).unwrap()).abs() < 1e-12);
    assert!((o.grid_min - o.refined_min).abs() < 1e-12);
    assert!(text.contains("refined minimum"));

    let a = DensityMatrix::new(ComplexMatrix::diag_real(&[0.7, 0.3]), (2, 1)).unwrap();
    let b = DensityMatrix::new(ComplexMatrix::diag_real(&[0.4, 0.6]), (2, 1)).unwrap();
    write_state(&state, &DensityMatrix::product(&a, &b).unwrap()).unwrap();
    let (o, _) = cmd_oracle(&state, 16, 1e-6).unwrap();
    assert!((o.refined_min - binary_entropy(0.7).unwrap()).abs() < 1e-12);
}

#[test]
fn validate_reports_trace_defect() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let m = ComplexMatrix::diag_real(&[0.5, 0.2, 0.2, 0.2]);
    fs::write(&path, StateFile::from_matrix(&m, (2, 2)).to_json()).unwrap();
    let report = cmd_validate(&path, 1e-6).unwrap();
    assert!(!report.valid);
    assert!(report.to_string().contains("trace defect 0.1"), "{report}");

    fs::write(&path, StateFile::from_matrix(&tabulated_random_matrix(), (2, 2)).to_json()).unwrap();
    assert!(cmd_validate(&path, 1e-3).unwrap().valid);

    fs::write(&path, "{ not json").unwrap();
    assert!(cmd_validate(&path, 1e-6).is_err());
    assert!(cmd_compute(&path, &RunConfig::default()).is_err());
}

#[test]
fn sweep_writes_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("werner.csv");
    let cfg = RunConfig {
        output_path: Some(out.clone()),
        emit_plot_script: true,
        ..Default::default()
    };
    let res = cmd_sweep(&werner_sweep(0.05), &cfg).unwrap();
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv, res.csv);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 22);
    let first: Vec<f64> = lines[1].split(',').take(5).map(|v| v.parse().unwrap()).collect();
    assert_eq!(&first[1..4], &[0.0, 0.0, 0.0]);
    let last: Vec<f64> = lines[21].split(',').take(4).map(|v| v.parse().unwrap()).collect();
    assert_eq!(&last[2..4], &[1.0, 1.0]);
    for line in &lines[1..] {
        let v: Vec<f64> = line.split(',').take(4).map(|x| x.parse().unwrap()).collect();
        assert!((v[3] - (v[1] - v[2])).abs() <= 1.5e-10, "{line}");
    }
    let script = fs::read_to_string(res.plot_path.unwrap()).unwrap();
    assert!(script.contains("'werner.csv'"));
}

#[test]
fn sweeps_are_byte_identical() {
    let spec = SweepSpec {
        family: Family::BellDiagonal,
        param_start: -0.3,
        param_end: 0.6,
        param_step: 0.1,
        omega: Some(OmegaLine {
            offset: [0.0, 0.05, 0.0],
            slope: [1.0, -0.5, 0.25],
        }),
    };
    let cfg = RunConfig {
        oracle: true,
        oracle_resolution: 24,
        ..Default::default()
    };
    let a = cmd_sweep(&spec, &cfg).unwrap().csv;
    let b = cmd_sweep(&spec, &cfg).unwrap().csv;
    assert_eq!(a, b);
}

#[test]
fn invalid_sampled_state_names_the_parameter() {
    let spec = SweepSpec {
        family: Family::BellDiagonal,
        param_start: 0.0,
        param_end: 2.0,
        param_step: 0.5,
        omega: Some(OmegaLine {
            offset: [0.0; 3],
            slope: [1.0, 1.0, 1.0],
        }),
    };
    let err = cmd_sweep(&spec, &RunConfig::default()).unwrap_err().to_string();
    assert!(err.contains("sweep parameter 0.5"), "{err}");
}
