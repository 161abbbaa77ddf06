//! End-to-end tests of the `remest` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn remest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_remest"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn tmp_path(name: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("remest-cli-test-{}-{name}", std::process::id()));
    path
}

const FIG5A: &[&str] = &[
    "--p", "0.2", "--q", "0.3", "--ps", "0.9", "--beta", "0.8", "--lambda", "8",
];

#[test]
fn evaluate_reports_the_closed_form_objective() {
    let output = remest(&[&["--mode", "evaluate", "--policy", "3,13"], FIG5A].concat());
    assert!(output.status.success());
    let stdout = stdout_of(&output);
    let expected = remest_core::analytic::switching_metrics(
        &remest_core::ModelParams::new(0.2, 0.3, 0.9, 0.8, 8.0).unwrap(),
        &remest_core::SwitchingPolicy::new(3, 13),
    );
    let line = stdout
        .lines()
        .find(|l| l.trim_start().starts_with("objective"))
        .expect("objective line");
    let value: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((value - expected.objective).abs() < 1e-12);
}

#[test]
fn evaluate_degenerate_cases() {
    // Always-transmit over a perfect channel: objective equals lambda.
    let output = remest(&[
        "--mode", "evaluate", "--policy", "0,0", "--p", "0.2", "--q", "0.3", "--ps", "1.0",
        "--beta", "0.8", "--lambda", "8",
    ]);
    assert!(output.status.success());
    let stdout = stdout_of(&output);
    let objective = stdout
        .lines()
        .find(|l| l.trim_start().starts_with("objective"))
        .and_then(|l| l.split_whitespace().nth(1))
        .and_then(|v| v.parse::<f64>().ok())
        .unwrap();
    assert!((objective - 8.0).abs() < 1e-12);

    // Saturated rates over a perfect channel: zero cost, unit frequency.
    let output = remest(&[
        "--mode", "evaluate", "--rates", "1,1", "--p", "0.2", "--q", "0.3", "--ps", "1.0",
        "--beta", "0.8", "--lambda", "8",
    ]);
    assert!(output.status.success());
    let stdout = stdout_of(&output);
    assert!(stdout.contains("avg_cost      0.0000000000000000e0"));
    assert!(stdout.contains("frequency     1.0000000000000000e0"));
}

#[test]
fn validation_errors_exit_with_one() {
    let output = remest(&[
        "--mode", "evaluate", "--policy", "3,13", "--p", "1.5", "--q", "0.3", "--ps", "0.9",
        "--beta", "0.8", "--lambda", "8",
    ]);
    assert_eq!(output.status.code(), Some(1));

    let output = remest(&["--mode", "evaluate"]);
    assert_eq!(output.status.code(), Some(1));

    let output = remest(&[&["--mode", "evaluate"], FIG5A].concat());
    assert_eq!(
        output.status.code(),
        Some(1),
        "evaluate without a policy must fail"
    );
}

#[test]
fn search_finds_the_grid_optimum() {
    let output = remest(&[&["--mode", "search", "--nmax", "60"], FIG5A].concat());
    assert!(output.status.success());
    assert!(stdout_of(&output).contains("best switching policy (2, 22)"));
}

#[test]
fn sweep_csv_is_byte_stable_and_well_formed() {
    let path_a = tmp_path("sweep-a.csv");
    let path_b = tmp_path("sweep-b.csv");
    for path in [&path_a, &path_b] {
        let base: &[&str] = &[
            "--mode",
            "sweep",
            "--axis",
            "thresholds",
            "--grid-max",
            "8",
            "--out",
        ];
        let target: &[&str] = &[path.to_str().unwrap()];
        let output = remest(&[base, target, FIG5A].concat());
        assert!(output.status.success());
    }
    let a = std::fs::read(&path_a).unwrap();
    let b = std::fs::read(&path_b).unwrap();
    assert_eq!(a, b, "identical runs must produce identical bytes");
    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "ma_threshold,fa_threshold,avg_cost,frequency,objective"
    );
    assert_eq!(lines.count(), 81);
    std::fs::remove_file(path_a).ok();
    std::fs::remove_file(path_b).ok();
}

#[test]
fn parameter_sweep_emits_policy_comparison_columns() {
    let output = remest(&[
        "--mode",
        "sweep",
        "--axis",
        "lambda",
        "--grid",
        "0.1:0.3:0.1",
        "--nmax",
        "40",
        "--p",
        "0.2",
        "--q",
        "0.25",
        "--ps",
        "0.9",
        "--beta",
        "0.5",
        "--lambda",
        "0.1",
    ]);
    assert!(output.status.success());
    let stdout = stdout_of(&output);
    let mut lines = stdout.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("lambda,opt_ma_threshold,opt_fa_threshold"));
    assert!(header.contains("diag_gap") && header.contains("rand_kl"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn oversized_grids_are_rejected() {
    let output = remest(
        &[
            &[
                "--mode",
                "sweep",
                "--axis",
                "lambda",
                "--grid",
                "0:200:0.0001",
            ],
            FIG5A,
        ]
        .concat(),
    );
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn crosscheck_passes_on_reference_parameters() {
    let output = remest(
        &[
            &[
                "--mode",
                "crosscheck",
                "--horizon",
                "200000",
                "--nmax",
                "60",
            ],
            FIG5A,
        ]
        .concat(),
    );
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = stdout_of(&output);
    assert_eq!(stdout.matches(": PASS").count(), 8);
    assert_eq!(stdout.matches(": FAIL").count(), 0);
}

#[test]
fn crosscheck_handles_degenerate_limits() {
    let output = remest(&[
        "--mode",
        "crosscheck",
        "--p",
        "0.2",
        "--q",
        "0.3",
        "--ps",
        "1.0",
        "--beta",
        "0.8",
        "--lambda",
        "0",
        "--horizon",
        "200000",
        "--nmax",
        "40",
    ]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert_eq!(stdout_of(&output).matches(": FAIL").count(), 0);
}

#[test]
fn rvi_reports_the_switching_structure() {
    let output = remest(&[&["--mode", "rvi", "--nmax", "60"], FIG5A].concat());
    assert!(output.status.success());
    let stdout = stdout_of(&output);
    assert!(stdout.contains("switching-equivalent policy (2, 22)"));
    assert!(stdout.contains("monotone=true"));
}

#[test]
fn simulate_is_reproducible() {
    let args: Vec<&str> = [
        &[
            "--mode",
            "simulate",
            "--policy",
            "2,22",
            "--horizon",
            "100000",
            "--seed",
            "11",
        ],
        FIG5A,
    ]
    .concat();
    let a = remest(&args);
    let b = remest(&args);
    assert!(a.status.success());
    assert_eq!(stdout_of(&a), stdout_of(&b));
}

#[test]
fn config_file_fills_gaps_but_flags_win() {
    let path = tmp_path("config.txt");
    std::fs::write(
        &path,
        "mode = evaluate\np = 0.2\nq = 0.3\nps = 0.9\nbeta = 0.8\nlambda = 8\npolicy = 3,13\n",
    )
    .unwrap();
    let output = remest(&["--config", path.to_str().unwrap()]);
    assert!(output.status.success());
    assert!(stdout_of(&output).contains("switching policy (3, 13)"));

    // An explicit flag overrides the file's value.
    let output = remest(&["--config", path.to_str().unwrap(), "--policy", "1,1"]);
    assert!(output.status.success());
    assert!(stdout_of(&output).contains("switching policy (1, 1)"));
    std::fs::remove_file(path).ok();
}

#[test]
fn preset_parameters_can_be_overridden() {
    // The preset sets the sweep mode, but an explicit mode wins.
    let output = remest(&["--preset", "fig5a", "--mode", "search", "--nmax", "50"]);
    assert!(output.status.success());
    assert!(stdout_of(&output).contains("best switching policy (2, 22)"));
}
