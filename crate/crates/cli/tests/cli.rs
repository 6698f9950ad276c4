use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twisted-moment"))
        .args(args)
        .env_remove("TM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn field(text: &str, name: &str) -> String {
    text.lines()
        .find_map(|l| {
            let mut parts = l.splitn(2, char::is_whitespace);
            (parts.next() == Some(name)).then(|| parts.next().unwrap_or("").trim().to_string())
        })
        .unwrap_or_else(|| panic!("no field {name} in\n{text}"))
}

#[test]
fn compute_reports_agreeing_values() {
    let out = run(&["compute", "5", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let exact: f64 = field(&text, "m_exact").parse().unwrap();
    let brute = field(&text, "m_brute");
    let brute_re: f64 = brute.split_whitespace().next().unwrap().parse().unwrap();
    assert!((exact - brute_re).abs() < 1e-11);
    assert!((exact + 0.185251856462).abs() < 1e-11);
    let dev: f64 = field(&text, "exact_brute_dev").parse().unwrap();
    assert!(dev < 1e-9);
}

#[test]
fn compute_prints_twelve_digits() {
    let text = stdout(&run(&["compute", "3", "2"]));
    assert_eq!(field(&text, "m_plus_exact"), "0");
    assert_eq!(field(&text, "m_exact"), "-0.365540903744");
}

#[test]
fn compute_rejects_bad_pairs() {
    let out = run(&["compute", "6", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("gcd(f,c) must be 1"));
    assert_eq!(stderr(&out).lines().count(), 1);

    let out = run(&["compute", "5", "7"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["compute", "7", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["compute", "7", "1", "--untwisted"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn compute_above_brute_cap_marks_fields_absent() {
    let out = run(&["compute", "101", "2", "--brute-cap", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(field(&text, "m_brute").starts_with("skipped"));
    assert!(!text.contains("exact_brute_dev"));
}

#[test]
fn verify_passes_on_small_grids() {
    for fmax in ["5", "100"] {
        let out = run(&["verify", "--fmax", fmax]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        let text = stdout(&out);
        assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 9);
    }
}

#[test]
fn verify_fails_at_unreachable_tolerance() {
    let out = run(&["verify", "--fmax", "60", "--tol", "1e-14"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("[FAIL]"));
    assert!(text.contains("worst at f="));
}

#[test]
fn verify_rejects_tiny_fmax() {
    assert_eq!(run(&["verify", "--fmax", "4"]).status.code(), Some(2));
}

#[test]
fn sweep_writes_csv_with_exact_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = run(&[
        "sweep",
        "--f-min",
        "5",
        "--f-max",
        "50",
        "--c",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("23 pairs skipped"));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("f,c,phi_f,m_plus_exact,m_minus_exact,m_exact,m_brute_re,m_brute_im,m_asym,m_plus_asym,residual,residual_over_logf,brute_checked")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 23);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn sweep_thread_counts_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut contents = Vec::new();
    for threads in ["1", "8"] {
        let path = dir.path().join(format!("t{threads}.json"));
        let out = run(&[
            "sweep",
            "--f-min",
            "3",
            "--f-max",
            "150",
            "--squarefree",
            "--c",
            "2,3,5",
            "--brute-cap",
            "120",
            "--threads",
            threads,
            "--format",
            "json",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        contents.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(contents[0], contents[1]);
}

#[test]
fn sweep_reads_thread_count_from_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_twisted-moment"))
        .args(["sweep", "--f-max", "20", "--primes"])
        .env("TM_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 1 + 6);
    let out = Command::new(env!("CARGO_BIN_EXE_twisted-moment"))
        .args(["sweep", "--f-max", "20"])
        .env("TM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_usage_errors_exit_two() {
    assert_eq!(run(&["sweep", "--c", ""]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--c", "1"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--f-min", "2"]).status.code(), Some(2));
    let out = run(&["sweep", "--out", "/nonexistent-dir/out.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot write"));
}

#[test]
fn kernel_subcommands() {
    let f_half: f64 = stdout(&run(&["kernel", "f", "1/2"]))
        .trim()
        .parse()
        .unwrap();
    assert!((f_half - 4.0 * 2f64.ln()).abs() < 1e-8);
    let f_dec: f64 = stdout(&run(&["kernel", "f", "0.5"]))
        .trim()
        .parse()
        .unwrap();
    assert!((f_dec - f_half).abs() < 1e-11);
    let r: f64 = stdout(&run(&["kernel", "r", "2", "3"]))
        .trim()
        .parse()
        .unwrap();
    assert!((r - 3f64.ln().powi(2) / 2.0).abs() < 1e-11);
    let s: f64 = stdout(&run(&["kernel", "s", "3", "-1"]))
        .trim()
        .parse()
        .unwrap();
    assert!((s + 2.0 / 3.0).abs() < 1e-11);
    assert_eq!(run(&["kernel", "r", "4", "6"]).status.code(), Some(2));
    assert_eq!(run(&["kernel", "f", "x"]).status.code(), Some(2));
}
