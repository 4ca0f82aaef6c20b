use std::path::Path;
use std::process::{Command, Stdio};

use tandem_paoi_cli::{
    execute, read_config, ExperimentConfig, Figure, Mode, OutputFormat, TandemKind,
};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tandem-paoi"));
    c.stdout(Stdio::null()).stderr(Stdio::null());
    c
}

fn data_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn analytic_md1_file_respects_support_and_monotonicity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.csv");
    let status = bin()
        .args(["--mode", "analytic", "--tandem", "md1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 301);
    let mut prev = 0.0;
    for row in rows {
        let tau: f64 = row[0].parse().unwrap();
        let cdf: f64 = row[2].parse().unwrap();
        if tau < 1.6 {
            assert_eq!(cdf, 0.0);
            assert_eq!(row[2], "0");
        }
        assert!(cdf >= prev);
        prev = cdf;
    }
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# p_A: 0.31398"));
}

#[test]
fn files_regenerate_from_their_header() {
    let dir = tempfile::tempdir().unwrap();
    for (mode, format) in [
        ("simulate", "csv"),
        ("analytic", "json"),
        ("sweep", "csv"),
        ("compare", "json"),
    ] {
        let first = dir.path().join(format!("{mode}.{format}"));
        let second = dir.path().join(format!("{mode}_again.{format}"));
        let status = bin()
            .args(["--mode", mode, "--tandem", "mm1", "--format", format])
            .args([
                "--packets",
                "30000",
                "--sweep-values",
                "0.3,0.6",
                "--seed",
                "9",
                "--out",
            ])
            .arg(&first)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0), "{mode}");
        let status = bin()
            .arg("--replay")
            .arg(&first)
            .arg("--out")
            .arg(&second)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        assert_eq!(
            std::fs::read(&first).unwrap(),
            std::fs::read(&second).unwrap(),
            "{mode}"
        );
        let cfg = read_config(&first).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.tandem, TandemKind::Mm1);
    }
}

#[test]
fn compare_exit_status_follows_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let run = |extra: &[&str]| {
        bin()
            .args([
                "--mode",
                "compare",
                "--tandem",
                "md1",
                "--packets",
                "201000",
                "--out",
            ])
            .arg(&out)
            .args(extra)
            .status()
            .unwrap()
            .code()
    };
    assert_eq!(run(&[]), Some(0));
    assert_eq!(run(&["--sim-lambda", "0.6"]), Some(1));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# overall: fail"));
    let ks: f64 = data_rows(&out)
        .iter()
        .find(|r| r[0] == "ks_overall")
        .map(|r| r[1].parse().unwrap())
        .unwrap();
    assert!(ks > 0.01);
}

#[test]
fn bad_input_exits_with_two() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["--mode", "reproduce", "--figure", "fig3"]), Some(2));
    assert_eq!(code(&["--tau-points", "1"]), Some(2));
    assert_eq!(code(&["--lambda", "-1"]), Some(2));
    assert_eq!(code(&["--lambda", "1.5"]), Some(2));
    assert_eq!(
        code(&["--mode", "simulate", "--packets", "10", "--warmup", "10"]),
        Some(2)
    );
    assert_eq!(code(&["--mode", "bogus"]), Some(2));
}

#[test]
fn default_output_goes_to_env_directory() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .env(tandem_paoi_cli::OUT_DIR_ENV, dir.path())
        .args([
            "--mode",
            "analytic",
            "--tandem",
            "mm1",
            "--format",
            "json",
            "--tau-points",
            "5",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("analytic_mm1.json").exists());
}

#[test]
fn empty_simulation_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let status = bin()
        .args([
            "--mode",
            "simulate",
            "--packets",
            "1",
            "--warmup",
            "0",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# notice:"));
    assert!(data_rows(&out).is_empty());
}

#[test]
fn sweep_marks_unstable_points() {
    let cfg = ExperimentConfig {
        mode: Mode::Sweep,
        tandem: TandemKind::Md1,
        sweep_values: vec![0.5, 1.3],
        ..ExperimentConfig::default()
    };
    let table = tandem_paoi_cli::run_sweep(&cfg).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert_eq!(
        table.rows[1][1],
        tandem_paoi_cli::Cell::Text("unstable".into())
    );
    let p99 = table.column("p99").unwrap();
    assert!(p99[0] > 10.0 && p99[1].is_nan());
}

#[test]
fn unstable_simulation_carries_warning() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        mode: Mode::Simulate,
        lambda: 1.2,
        packets: 5000,
        out: Some(dir.path().join("u.csv")),
        ..ExperimentConfig::default()
    };
    execute(&cfg).unwrap();
    let text = std::fs::read_to_string(dir.path().join("u.csv")).unwrap();
    assert!(text.contains("# warning:"));
}

#[test]
fn reproduce_fig9_orders_the_systems() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        mode: Mode::Reproduce,
        figure: Some(Figure::Fig9),
        format: OutputFormat::Csv,
        tau_max: 40.0,
        tau_points: 4001,
        out: Some(dir.path().to_path_buf()),
        ..ExperimentConfig::default()
    };
    let summary = execute(&cfg).unwrap();
    assert_eq!(summary.files.len(), 6);
    let level_crossing = |name: &str, p: f64| {
        let rows = data_rows(&dir.path().join(name));
        rows.iter()
            .find(|r| r[2].parse::<f64>().unwrap() >= p)
            .map(|r| r[0].parse::<f64>().unwrap())
            .unwrap()
    };
    assert!(level_crossing("md1_d_1.csv", 0.8) < level_crossing("mm1_mu2_1.25.csv", 0.8));
    assert!(level_crossing("md1_d_1.csv", 0.2) > level_crossing("mm1_mu2_1.25.csv", 0.2));
}

#[test]
fn reproduce_fig4_writes_analytic_and_simulated_cases() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        mode: Mode::Reproduce,
        figure: Some(Figure::Fig4),
        packets: 20_000,
        out: Some(dir.path().to_path_buf()),
        ..ExperimentConfig::default()
    };
    let summary = execute(&cfg).unwrap();
    assert_eq!(summary.files.len(), 2);
    let analytic = data_rows(&dir.path().join("md1_cases_analytic.csv"));
    for row in &analytic {
        if row[0].parse::<f64>().unwrap() < 1.6 {
            assert!(row[7..11].iter().all(|c| c == "0"));
        }
    }
    let replayed = read_config(&dir.path().join("md1_cases_simulated.csv")).unwrap();
    assert_eq!(replayed.mode, Mode::Simulate);
    assert_eq!(replayed.figure, Some(Figure::Fig4));
}
