//! End-to-end command tests: in-process through `run`, and through the
//! compiled binary where exit codes, streams, or the environment matter.

use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};

use orbitfisher_cli::{run, ReportFile, EXIT_CONTRACT, EXIT_USAGE, EXIT_VALIDATION};

static COUNTER: AtomicUsize = AtomicUsize::new(0);

fn scratch_path(name: &str) -> PathBuf {
    let stamp = COUNTER.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!(
        "orbitfisher-cli-{}-{stamp}-{name}",
        std::process::id()
    ))
}

fn write_scratch(name: &str, contents: &str) -> PathBuf {
    let path = scratch_path(name);
    fs::write(&path, contents).unwrap();
    path
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orbitfisher"))
}

const RHO_532: &str = r#"{"n":3,"re":[[0.5,0,0],[0,0.3,0],[0,0,0.2]],"im":[[0,0,0],[0,0,0],[0,0,0]]}"#;

fn report_from(path: &PathBuf) -> ReportFile {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn classify_reports_the_generic_three_level_orbit() {
    let input = write_scratch("rho.json", RHO_532);
    let output = scratch_path("classify.json");
    let code = run([
        "orbitfisher",
        "classify",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report = report_from(&output);
    assert_eq!(report.command, "classify");
    assert_eq!(report.input_digest.len(), 64);
    assert_eq!(report.payload["partition"], serde_json::json!([1, 1, 1]));
    assert_eq!(report.payload["orbit_dim"], serde_json::json!(6));
    assert_eq!(report.payload["stratum_dim"], serde_json::json!(8));
}

#[test]
fn u3_closed_form_matches_the_pinned_coefficients() {
    let output = scratch_path("u3.json");
    let code = run([
        "orbitfisher",
        "u3-closed-form",
        "--kappa",
        "0.5,0.3,0.2",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report = report_from(&output);
    let pairs = report.payload["pairs"].as_array().unwrap();
    let sym: Vec<f64> = pairs.iter().map(|p| p["sym"].as_f64().unwrap()).collect();
    let expected = [0.2, 0.5142857142857143, 0.08];
    for (got, want) in sym.iter().zip(expected) {
        assert!((got - want).abs() <= 1e-10, "{got} vs {want}");
    }
    let antisym: Vec<f64> = pairs
        .iter()
        .map(|p| p["antisym"].as_f64().unwrap())
        .collect();
    for (got, want) in antisym.iter().zip([0.05, 0.22040816326530613, 0.016]) {
        assert!((got - want).abs() <= 1e-10, "{got} vs {want}");
    }
}

#[test]
fn missing_input_file_exits_2_and_names_the_path() {
    let missing = scratch_path("does-not-exist.json");
    let out = binary()
        .args(["classify", "--input", missing.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains(missing.to_str().unwrap()),
        "stderr was: {stderr}"
    );
}

#[test]
fn malformed_json_exits_2() {
    let input = write_scratch("garbage.json", "{not json");
    let code = run(["orbitfisher", "classify", "--input", input.to_str().unwrap()]);
    assert_eq!(code, EXIT_VALIDATION);
}

#[test]
fn non_hermitian_state_exits_2() {
    let input = write_scratch(
        "nonherm.json",
        r#"{"n":2,"re":[[0.5,0.3],[0.1,0.5]],"im":[[0,0],[0,0]]}"#,
    );
    let code = run(["orbitfisher", "classify", "--input", input.to_str().unwrap()]);
    assert_eq!(code, EXIT_VALIDATION);
}

#[test]
fn ragged_matrix_rows_exit_2() {
    let input = write_scratch(
        "ragged.json",
        r#"{"n":2,"re":[[0.5,0],[0]],"im":[[0,0],[0,0]]}"#,
    );
    let code = run(["orbitfisher", "classify", "--input", input.to_str().unwrap()]);
    assert_eq!(code, EXIT_VALIDATION);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(["orbitfisher", "no-such-command"]), EXIT_USAGE);
    assert_eq!(run(["orbitfisher", "classify", "--tol", "abc"]), EXIT_USAGE);
    assert_eq!(run(["orbitfisher", "classify"]), EXIT_USAGE);
    assert_eq!(run(["orbitfisher", "classify", "--tol=-1.0"]), EXIT_USAGE);
    assert_eq!(run(["orbitfisher", "classify", "--tol=inf"]), EXIT_USAGE);
    assert_eq!(
        run(["orbitfisher", "fibration-check", "--n", "3", "--input", "x"]),
        EXIT_USAGE
    );
    assert_eq!(run(["orbitfisher", "fibration-check"]), EXIT_USAGE);
}

#[test]
fn help_exits_0() {
    let out = binary().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("classify"));
    assert!(stdout.contains("selftest"));
}

#[test]
fn sld_reconstructs_its_input_direction() {
    let input = write_scratch(
        "tangent.json",
        r#"{"rho":{"n":2,"re":[[0.75,0],[0,0.25]],"im":[[0,0],[0,0]]},
            "generator":{"n":2,"re":[[0,1],[-1,0]],"im":[[0,0],[0,0]]}}"#,
    );
    let output = scratch_path("sld.json");
    let code = run([
        "orbitfisher",
        "sld",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report = report_from(&output);
    assert_eq!(report.payload["sld"]["re"][0][1], serde_json::json!(-1.0));
    assert!(report.payload["residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn kks_pairing_matches_the_hand_value() {
    let input = write_scratch(
        "pair.json",
        r#"{"rho":{"n":2,"re":[[0.75,0],[0,0.25]],"im":[[0,0],[0,0]]},
            "generator_a":{"n":2,"re":[[0,1],[-1,0]],"im":[[0,0],[0,0]]},
            "generator_b":{"n":2,"re":[[0,0],[0,0]],"im":[[0,1],[1,0]]}}"#,
    );
    let output = scratch_path("kks.json");
    let code = run([
        "orbitfisher",
        "kks",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report = report_from(&output);
    let value = report.payload["value"].as_f64().unwrap();
    assert!((value - 1.0).abs() <= 1e-12, "kks value {value}");
}

#[test]
fn fisher_accepts_both_input_shapes() {
    let pair = write_scratch(
        "fisher-pair.json",
        r#"{"rho":{"n":2,"re":[[0.75,0],[0,0.25]],"im":[[0,0],[0,0]]},
            "generator_a":{"n":2,"re":[[0,1],[-1,0]],"im":[[0,0],[0,0]]},
            "generator_b":{"n":2,"re":[[0,0],[0,0]],"im":[[0,1],[1,0]]}}"#,
    );
    let out_pair = scratch_path("fisher-pair-out.json");
    assert_eq!(
        run([
            "orbitfisher",
            "fisher",
            "--input",
            pair.to_str().unwrap(),
            "--output",
            out_pair.to_str().unwrap(),
        ]),
        0
    );
    let report = report_from(&out_pair);
    assert!((report.payload["antisym"].as_f64().unwrap() + 0.5).abs() <= 1e-12);

    let state = write_scratch("fisher-state.json", RHO_532);
    let out_state = scratch_path("fisher-state-out.json");
    assert_eq!(
        run([
            "orbitfisher",
            "fisher",
            "--input",
            state.to_str().unwrap(),
            "--output",
            out_state.to_str().unwrap(),
        ]),
        0
    );
    let report = report_from(&out_state);
    assert_eq!(report.payload["dim"], serde_json::json!(6));
    assert_eq!(report.payload["partition"], serde_json::json!([1, 1, 1]));
    let sym = report.payload["fisher_sym"].as_array().unwrap();
    assert_eq!(sym.len(), 6);
}

#[test]
fn curve_fisher_reproduces_the_bernoulli_index() {
    let input = write_scratch(
        "curve.json",
        r#"{"kind":"eigenvalue_path","kappa0":[0.75,0.25],"dkappa":[1.0,-1.0],
            "unitary":{"n":2,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]}}"#,
    );
    let output = scratch_path("curve-out.json");
    let code = run([
        "orbitfisher",
        "curve-fisher",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report = report_from(&output);
    let index = report.payload["fisher_index"].as_f64().unwrap();
    assert!((index - 16.0 / 3.0).abs() <= 1e-6, "index {index}");
    let metric = report.payload["bures_metric"].as_f64().unwrap();
    assert!((4.0 * metric - index).abs() <= 1e-8 * index);
}

#[test]
fn curve_crossing_the_spectrum_exits_3() {
    // At theta = 0 the two eigenvalues collide, so the stencil partitions
    // disagree and the numerical contract is refused.
    let input = write_scratch(
        "crossing.json",
        r#"{"kind":"eigenvalue_path","kappa0":[0.5,0.5],"dkappa":[1.0,-1.0],
            "unitary":{"n":2,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]}}"#,
    );
    let code = run([
        "orbitfisher",
        "curve-fisher",
        "--input",
        input.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_CONTRACT);
}

#[test]
fn fibration_table_contains_the_flag_over_partial_flag_row() {
    let output = scratch_path("nesting.json");
    let code = run([
        "orbitfisher",
        "fibration-check",
        "--n",
        "3",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report = report_from(&output);
    let rows = report.payload["rows"].as_array().unwrap();
    let hit = rows.iter().any(|row| {
        row["fine"] == serde_json::json!([1, 1, 1])
            && row["coarse"] == serde_json::json!([2, 1])
            && row["total_dim"] == serde_json::json!(6)
            && row["base_dim"] == serde_json::json!(4)
            && row["fibre_dim"] == serde_json::json!(2)
            && row["identity_holds"] == serde_json::json!(true)
    });
    assert!(hit, "rows were: {rows:?}");
}

#[test]
fn fibration_pair_mode_checks_the_dimension_split() {
    let input = write_scratch(
        "fib-pair.json",
        r#"{"eta0":{"n":3,"re":[[0.5,0,0],[0,0.3,0],[0,0,0.2]],"im":[[0,0,0],[0,0,0],[0,0,0]]},
            "xi0":{"n":3,"re":[[0.4,0,0],[0,0.4,0],[0,0,0.2]],"im":[[0,0,0],[0,0,0],[0,0,0]]}}"#,
    );
    let output = scratch_path("fib-pair-out.json");
    assert_eq!(
        run([
            "orbitfisher",
            "fibration-check",
            "--input",
            input.to_str().unwrap(),
            "--output",
            output.to_str().unwrap(),
        ]),
        0
    );
    let report = report_from(&output);
    assert_eq!(report.payload["total_dim"], serde_json::json!(6));
    assert_eq!(report.payload["base_dim"], serde_json::json!(4));
    assert_eq!(report.payload["fibre_dim"], serde_json::json!(2));

    // Swapped arguments are not a refinement: validation error.
    let swapped = write_scratch(
        "fib-swapped.json",
        r#"{"eta0":{"n":3,"re":[[0.4,0,0],[0,0.4,0],[0,0,0.2]],"im":[[0,0,0],[0,0,0],[0,0,0]]},
            "xi0":{"n":3,"re":[[0.5,0,0],[0,0.3,0],[0,0,0.2]],"im":[[0,0,0],[0,0,0],[0,0,0]]}}"#,
    );
    assert_eq!(
        run([
            "orbitfisher",
            "fibration-check",
            "--input",
            swapped.to_str().unwrap(),
        ]),
        EXIT_VALIDATION
    );
}

#[test]
fn selftest_is_byte_deterministic_for_a_fixed_seed() {
    let first = binary().args(["selftest", "--seed", "11"]).output().unwrap();
    let second = binary().args(["selftest", "--seed", "11"]).output().unwrap();
    assert_eq!(first.status.code(), Some(0), "selftest failed unexpectedly");
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8_lossy(&first.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("criterion ")).count(), 9);
    assert!(text.ends_with("all 9 criteria passed\n"));
}

#[test]
fn selftest_with_absurd_tolerance_reports_failures_and_exits_3() {
    let out = binary().args(["selftest", "--tol", "1e-20"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONTRACT));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[FAIL]"), "stdout was: {text}");
}

#[test]
fn tolerance_env_var_applies_and_the_flag_wins() {
    // The resolved tolerance is recorded in the report conventions.
    let out = binary()
        .args(["u3-closed-form", "--kappa", "0.5,0.3,0.2"])
        .env("ORBITFISHER_TOL", "2.5e-3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: ReportFile = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.conventions.tolerance, 2.5e-3);

    let out = binary()
        .args(["u3-closed-form", "--kappa", "0.5,0.3,0.2", "--tol", "1e-10"])
        .env("ORBITFISHER_TOL", "2.5e-3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: ReportFile = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.conventions.tolerance, 1e-10);

    // A clustering tolerance too coarse to reconstruct the spectrum is
    // refused as a numerical contract, proving the env reaches the kernel.
    let input = write_scratch("rho-env.json", RHO_532);
    let out = binary()
        .args(["classify", "--input", input.to_str().unwrap()])
        .env("ORBITFISHER_TOL", "0.15")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONTRACT));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("numerical contract"), "stderr: {stderr}");

    let out = binary()
        .args(["classify", "--input", input.to_str().unwrap()])
        .env("ORBITFISHER_TOL", "banana")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}

#[test]
fn plot_data_sweep_is_monotone_and_matches_the_closed_form() {
    let output = scratch_path("sweep.csv");
    let code = run([
        "orbitfisher",
        "plot-data",
        "--quantity",
        "u2-fisher-sym",
        "--start",
        "0.55",
        "--stop",
        "0.95",
        "--points",
        "9",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&output).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("kappa1"))
        .map(|l| {
            let mut split = l.split(',');
            (
                split.next().unwrap().parse().unwrap(),
                split.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(rows.len(), 9);
    for window in rows.windows(2) {
        assert!(window[1].1 > window[0].1, "not monotone: {rows:?}");
    }
    for (kappa1, value) in rows {
        let expected = 4.0 * (2.0 * kappa1 - 1.0).powi(2);
        assert!((value - expected).abs() <= 1e-12, "{kappa1}: {value}");
    }
}

#[test]
fn plot_data_lambda_sweep_matches_the_gap_square() {
    let output = scratch_path("lambda.csv");
    let code = run([
        "orbitfisher",
        "plot-data",
        "--quantity",
        "bures-lambda",
        "--start",
        "0.6",
        "--stop",
        "0.9",
        "--points",
        "4",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&output).unwrap();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("kappa1")) {
        let mut split = line.split(',');
        let kappa1: f64 = split.next().unwrap().parse().unwrap();
        let value: f64 = split.next().unwrap().parse().unwrap();
        let expected = (2.0 * kappa1 - 1.0).powi(2);
        assert!((value - expected).abs() <= 1e-12, "{kappa1}: {value}");
    }
}

#[test]
fn empty_sweep_emits_the_header_only() {
    let output = scratch_path("empty.csv");
    let code = run([
        "orbitfisher",
        "plot-data",
        "--quantity",
        "u2-fisher-sym",
        "--points",
        "0",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&output).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.last().copied(), Some("kappa1,fisher_sym"));
    assert!(lines
        .iter()
        .all(|l| l.starts_with('#') || *l == "kappa1,fisher_sym"));
}

#[test]
fn out_of_range_sweep_exits_2() {
    for (start, stop) in [("0.4", "0.9"), ("0.6", "1.2")] {
        let code = run([
            "orbitfisher",
            "plot-data",
            "--quantity",
            "u2-fisher-sym",
            "--start",
            start,
            "--stop",
            stop,
        ]);
        assert_eq!(code, EXIT_VALIDATION, "start {start} stop {stop}");
    }
}

#[test]
fn csv_report_flattens_the_payload_deterministically() {
    let input = write_scratch("rho-csv.json", RHO_532);
    let output = scratch_path("classify.csv");
    let code = run([
        "orbitfisher",
        "classify",
        "--input",
        input.to_str().unwrap(),
        "--format",
        "csv",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&output).unwrap();
    assert!(text.starts_with("# command: classify\n"));
    assert!(text.contains("key,value\n"));
    assert!(text.contains("orbit_dim,6\n"));
    assert!(text.contains("partition[0],1\n"));
    assert!(!output.with_extension("csv.tmp").exists());
}

#[test]
fn identical_runs_produce_identical_reports() {
    let input = write_scratch("rho-det.json", RHO_532);
    let a = scratch_path("det-a.json");
    let b = scratch_path("det-b.json");
    for path in [&a, &b] {
        assert_eq!(
            run([
                "orbitfisher",
                "classify",
                "--input",
                input.to_str().unwrap(),
                "--output",
                path.to_str().unwrap(),
            ]),
            0
        );
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}
