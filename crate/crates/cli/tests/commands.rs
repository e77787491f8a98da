use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_erosion"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Out {
    let o = bin().args(args).output().unwrap();
    Out {
        code: o.status.code().unwrap(),
        stdout: String::from_utf8(o.stdout).unwrap(),
        stderr: String::from_utf8(o.stderr).unwrap(),
    }
}

fn rows(csv: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let body = lines
        .map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap()).collect())
        .collect();
    (header, body)
}

fn fixtures() -> TempDir {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "ball.txt", "dim = 2\nR0 = 2\npiece 0 1 constant 1\n");
    write(dir.path(), "sqrt.txt", "dim = 2\nR0 = 3\npiece 0 1 powlin 1 2 0.5\n");
    write(dir.path(), "step.txt", "dim = 2\nR0 = 3\npiece 0 1 constant 2\npiece 1 2 constant 1\n");
    write(dir.path(), "zero.txt", "dim = 2\nR0 = 2\n");
    write(dir.path(), "open.txt", "dim = 2\nR0 = 3\npiece 0 1 powlin 1 1 0.5\n");
    write(dir.path(), "const.txt", "dim = 2\nR0 = 2\npiece 0 1 constant 0.8\n");
    dir
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn simulate_ball_follows_the_linear_law() {
    let dir = fixtures();
    let out = run(&["simulate", "--profile", &path(&dir, "ball.txt"), "--tau", "1e-3"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let (header, body) = rows(&out.stdout);
    assert_eq!(header, ["t", "lambda_discrete", "lambda_ode", "speed_lower", "speed_upper"]);
    assert!(body.len() > 1500);
    for r in &body {
        if r[0] <= PI / 2.0 {
            assert!((r[2] - (1.0 - 2.0 / PI * r[0])).abs() <= 1e-9, "t = {}", r[0]);
        }
    }
    assert_eq!(body.last().unwrap()[1], 0.0);
    assert_eq!(body.last().unwrap()[2], 0.0);
}

#[test]
fn simulate_zero_profile_is_one_row() {
    let dir = fixtures();
    let out = run(&["simulate", "--profile", &path(&dir, "zero.txt"), "--tau", "0.1"]);
    assert_eq!(out.code, 0);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1], "0,0,0,-inf,-inf");
}

#[test]
fn simulate_step_brackets_only_the_crossing_rows() {
    let dir = fixtures();
    let out = run(&["simulate", "--profile", &path(&dir, "step.txt"), "--tau", "0.01"]);
    assert_eq!(out.code, 0);
    let (_, body) = rows(&out.stdout);
    let mut crossings = 0;
    for w in body.windows(2) {
        let crossed = w[0][2] > 1.0 && w[1][2] <= 1.0;
        let strict = w[1][3] < w[1][4];
        assert_eq!(crossed, strict, "row t = {}", w[1][0]);
        crossings += crossed as usize;
    }
    assert_eq!(crossings, 1);
}

#[test]
fn open_case_needs_the_flag() {
    let dir = fixtures();
    let open = path(&dir, "open.txt");
    let out = run(&["simulate", "--profile", &open, "--tau", "0.1"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("open case"));
    let out = run(&["simulate", "--profile", &open, "--tau", "0.1", "--exploratory"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
}

#[test]
fn converge_ball_and_sqrt() {
    let dir = fixtures();
    let taus = "1e-2,5e-3,2.5e-3";
    let out = run(&["converge", "--profile", &path(&dir, "ball.txt"), "--tau", taus]);
    assert_eq!(out.code, 0);
    let (header, body) = rows(&out.stdout);
    assert_eq!(header, ["tau", "sup_error_vs_ode", "rate_vs_prev"]);
    assert!(body[0][2].is_nan());
    for r in &body {
        assert!(r[1] <= 2.0 / PI * r[0]);
    }
    let out = run(&["converge", "--profile", &path(&dir, "sqrt.txt"), "--tau", taus]);
    let (_, body) = rows(&out.stdout);
    for r in &body[1..] {
        assert!((1.6..=2.4).contains(&r[2]), "rate {}", r[2]);
    }
}

#[test]
fn converge_single_tau_is_a_config_error() {
    let dir = fixtures();
    let out = run(&["converge", "--profile", &path(&dir, "ball.txt"), "--tau", "0.01"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn coarea_scale_invariant_gap() {
    let dir = fixtures();
    let out = run(&["coarea", "--profile", &path(&dir, "sqrt.txt"), "--p", "1"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let (header, body) = rows(&out.stdout);
    assert_eq!(header, ["n", "q", "energy", "target", "rel_error", "l1_gap"]);
    for r in &body {
        assert!(((r[2] - r[3]).abs() - 4.0 * PI / r[0]).abs() < 1e-8);
    }
}

#[test]
fn oracle_regimes() {
    let dir = fixtures();
    let out = run(&["oracle", "--tau", "0.01", "--seed", "4"]);
    assert_eq!(out.code, 0);
    let (header, body) = rows(&out.stdout);
    assert_eq!(header, ["trial", "argmin_is_truncation", "argmin_level", "scheme_level", "agreement_cells"]);
    assert_eq!(body.len(), 20);
    for r in &body {
        assert_eq!(r[1], 1.0);
        assert!(r[4] <= 1.0);
    }
    let constant = path(&dir, "const.txt");
    for (tau, level) in [("1e-9", 1.0), ("1e6", 0.0)] {
        let out = run(&["oracle", "--profile", &constant, "--tau", tau]);
        let (_, body) = rows(&out.stdout);
        assert_eq!(body[0][1], 1.0);
        assert_eq!(body[0][2], level);
    }
}

#[test]
fn energy_of_a_ball() {
    let dir = fixtures();
    let out = run(&["energy", "--profile", &path(&dir, "ball.txt")]);
    assert_eq!(out.code, 0);
    let (header, body) = rows(&out.stdout);
    assert_eq!(header, ["W_p", "F"]);
    assert!((body[0][0] - 2.0 * PI).abs() < 1e-12);
    assert!((body[0][1] - 2.0 * PI).abs() < 1e-12);
    let out = run(&[
        "energy",
        "--profile",
        &path(&dir, "ball.txt"),
        "--candidate",
        &path(&dir, "zero.txt"),
        "--tau",
        "0.5",
    ]);
    let (_, body) = rows(&out.stdout);
    // F(0; ball) = (π²/(2τ)) (∫ r^2)² = π²
    assert!((body[0][1] - PI * PI).abs() < 1e-12);
}

#[test]
fn config_file_and_override() {
    let dir = fixtures();
    let cfg = write(
        dir.path(),
        "run.cfg",
        "[run]\nprofile = ball.txt\ntau = 0.5\nout = result.csv\n",
    );
    let out = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let written = std::fs::read_to_string(dir.path().join("result.csv")).unwrap();
    assert_eq!(written.lines().count(), 6);
    let out = run(&["simulate", "--config", cfg.to_str().unwrap(), "--tau", "0.25", "--out", "-"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().count(), 9);
    assert!(!written.contains('\r'));
    let written = std::fs::read_to_string(dir.path().join("result.csv")).unwrap();
    assert_eq!(written.lines().count(), 6);
}

#[test]
fn oracle_is_deterministic() {
    let dir = fixtures();
    let a = run(&["oracle", "--tau", "0.02", "--seed", "11"]).stdout;
    let b = run(&["oracle", "--tau", "0.02", "--seed", "11"]).stdout;
    let c = run(&["oracle", "--tau", "0.02", "--seed", "12"]).stdout;
    assert_eq!(a, b);
    assert_ne!(a, c);
    let sim = |_: ()| run(&["simulate", "--profile", &path(&dir, "sqrt.txt"), "--tau", "0.01"]).stdout;
    assert_eq!(sim(()), sim(()));
}

#[test]
fn bad_input_exit_codes() {
    let dir = fixtures();
    assert_eq!(run(&["simulate", "--profile", &path(&dir, "missing.txt"), "--tau", "0.1"]).code, 2);
    assert_eq!(run(&["simulate", "--profile", &path(&dir, "ball.txt"), "--tau", "-1"]).code, 2);
    assert_eq!(run(&["simulate", "--profile", &path(&dir, "ball.txt")]).code, 2);
    let bad = write(dir.path(), "bad.txt", "dim = 2\nR0 = 2\npiece 0 1 constant 1\npiece 2 3 constant 1\n");
    let out = run(&["simulate", "--profile", bad.to_str().unwrap(), "--tau", "0.1"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 4"));
    assert_eq!(run(&["frobnicate"]).code, 2);
}
