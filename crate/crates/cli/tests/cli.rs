use std::path::Path;
use std::process::{Command, Output};

fn cascade_grid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cascade-grid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_config(dir: &Path) -> String {
    let path = dir.join("cfg.json");
    let stem = dir.join("out/sweep");
    std::fs::write(
        &path,
        format!(
            r#"{{"comm": {{"kind": "scale_free", "n": 1500, "alpha": 2.5, "min_degree": 2, "seed": 4}},
               "power": {{"kind": "scale_free", "n": 300, "seed": 5}},
               "attacks": ["targeted", "random"], "x_values": [0, 150, 450],
               "replications": 4, "base_seed": 6, "output": "{}"}}"#,
            stem.display()
        ),
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn piecewise_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let grid = dir.path().join("grid");
    let grid = grid.to_str().unwrap();
    stdout(&cascade_grid(&[
        "generate",
        "--config",
        &cfg,
        "--out-dir",
        grid,
    ]));
    for file in ["comm.edges", "power.edges", "interlinks.txt"] {
        assert!(Path::new(grid).join(file).exists());
    }

    let dump = dir.path().join("attacked.txt");
    let dump = dump.to_str().unwrap();
    let common = [
        "--grid", grid, "--attack", "targeted", "--x", "20", "--seed", "9",
    ];
    stdout(&cascade_grid(
        &[&["attack"], &common[..], &["--dump", dump]].concat(),
    ));
    let lines: Vec<usize> = std::fs::read_to_string(dump)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(lines.len(), 20);
    let printed = stdout(&cascade_grid(&[&["attack"], &common[..]].concat()));
    assert_eq!(printed, std::fs::read_to_string(dump).unwrap());

    let trace = dir.path().join("trace.csv");
    let trace = trace.to_str().unwrap();
    let out = stdout(&cascade_grid(
        &[&["cascade"], &common[..], &["--trace", trace]].concat(),
    ));
    assert!(out.starts_with("mu_A="));
    let text = std::fs::read_to_string(trace).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "stage,side,removed_count,alive_count,giant_size,mu"
    );
    assert!(text.lines().nth(1).unwrap().starts_with("1,comm,"));
}

#[test]
fn experiment_and_analytic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    stdout(&cascade_grid(&[
        "experiment",
        "--config",
        &cfg,
        "--compare",
        "--coupling",
        "conditional",
    ]));
    let out = dir.path().join("out");
    let raw = std::fs::read_to_string(out.join("sweep_raw.csv")).unwrap();
    assert_eq!(raw.lines().next().unwrap(), "kind,x,rep,mu_A,mu_B,stages");
    assert_eq!(raw.lines().count(), 1 + 2 * 3 * 4);
    assert!(out.join("sweep_summary.csv").exists());
    assert_eq!(
        std::fs::read_to_string(out.join("sweep_compare.csv"))
            .unwrap()
            .lines()
            .count(),
        7
    );

    let table = stdout(&cascade_grid(&[
        "analytic", "cascade", "--config", &cfg, "--x", "0,300",
    ]));
    assert_eq!(table.lines().next().unwrap(), "kind,x,mu_A,mu_B,stages");
    assert_eq!(table.lines().count(), 5);

    let pmf = dir.path().join("pmf.csv");
    std::fs::write(&pmf, "k,probability\n1,0.5\n3,0.5\n").unwrap();
    let line = stdout(&cascade_grid(&[
        "analytic",
        "--dist",
        pmf.to_str().unwrap(),
        "--phi",
        "1",
    ]));
    // Excess pmf is (1/4, 0, 3/4), so u = 1/3 and mu = 1 - (1/3 + 1/27) / 2.
    let mu: f64 = line.trim().rsplit('=').next().unwrap().parse().unwrap();
    assert!(
        (mu - (1.0 - (1.0 / 3.0 + 1.0 / 27.0) / 2.0)).abs() < 1e-9,
        "{line}"
    );

    let critical = stdout(&cascade_grid(&[
        "critical", "--config", &cfg, "--attack", "random",
    ]));
    assert!(critical.starts_with("x_c="));
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing");
    let out = cascade_grid(&[
        "attack",
        "--grid",
        missing.to_str().unwrap(),
        "--attack",
        "random",
        "--x",
        "1",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"comm": {"kind": "lattice"}}"#).unwrap();
    assert!(
        !cascade_grid(&["experiment", "--config", bad.to_str().unwrap()])
            .status
            .success()
    );
    assert!(!cascade_grid(&["analytic", "--phi", "0.5"]).status.success());
    assert!(!cascade_grid(&["attack", "--attack", "sideways"])
        .status
        .success());
}
