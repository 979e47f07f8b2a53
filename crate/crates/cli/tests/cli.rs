use std::process::{Command, Output};

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/bolza_eigenvalues.dat");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylbound"))
        .args(args)
        .env_remove("WEYLBOUND_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn nu_prints_ten_decimals() {
    let o = run(&["nu", "--m", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "4.7300407449");
}

#[test]
fn nu_as_csv_has_twelve_digits() {
    let o = run(&["nu", "--m", "2", "--format", "csv"]);
    assert_eq!(stdout(&o).replace("\r\n", "\n"), "m,nu\n2,4.73004074486\n");
}

#[test]
fn count_gives_one_csv_row() {
    let o = run(&["count", "--dim", "2", "--d", "1", "--tau", "10"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    let lower: f64 = rows[0][3].parse().unwrap();
    let upper: f64 = rows[0][4].parse().unwrap();
    assert!(lower < 100.0 / (4.0 * std::f64::consts::PI) && upper > lower);
}

#[test]
fn json_output_parses() {
    let o = run(&["count", "--dim", "3", "--d", "2", "--tau-grid", "0:10:4", "--format", "json"]);
    let text = stdout(&o);
    assert!(text.contains("\"columns\"") && text.contains("\"meta\""));
    assert_eq!(text.matches("3.0,").count(), 4);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["nu"]).status.code(), Some(1));
    assert_eq!(run(&["verify-kernel", "--n", "6"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn domain_errors_exit_one_with_message() {
    let o = run(&["nu", "--m", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = run(&["detzeta", "--eigs", FIXTURE, "--c", "20", "--eps", "0.3", "--T", "2.5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["count", "--dim", "2", "--d", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn tolerance_from_environment_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_weylbound"))
        .args(["nu", "--m", "2"])
        .env("WEYLBOUND_TOL", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bolza_determinant_bracket() {
    let o = run(&["detzeta", "--eigs", FIXTURE, "--closed", "--c", "20", "--eps", "0.3524", "--T", "2.2165"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let lower: f64 = rows[0][7].parse().unwrap();
    let upper: f64 = rows[0][8].parse().unwrap();
    assert!((lower - 4.51591).abs() < 2e-2 && (upper - 4.88303).abs() < 2e-2);
    assert!(o.stderr.is_empty(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn missing_leading_zero_is_reported() {
    let dir = std::env::temp_dir().join(format!("weylbound-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("eigs.txt");
    let text = std::fs::read_to_string(FIXTURE).unwrap();
    let body: String = text.lines().filter(|l| l.trim().parse::<f64>() != Ok(0.0)).map(|l| format!("{l}\n")).collect();
    std::fs::write(&path, body).unwrap();
    let p = path.to_str().unwrap();
    let o = run(&["detzeta", "--eigs", p, "--closed", "--c", "20", "--eps", "0.3524", "--T", "2.2165"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn heat_remainder_curve_is_pinned() {
    // ten ordinates of area × R_t^20 on the Bolza surface
    let pinned = [
        (0.05, 63.2463756588),
        (0.3, 0.343382703017),
        (0.55, 0.00225683812812),
        (0.8, 0.0000150596339464),
        (1.05, 1.00947584928e-7),
        (1.3, 6.77996303124e-10),
        (1.55, 4.55829949225e-12),
        (1.8, 3.06647651328e-14),
        (2.05, 2.06368356936e-16),
        (2.3, 1.38918283985e-18),
    ];
    let o = run(&["heat-remainder", "--eigs", FIXTURE, "--closed", "--c", "20", "--t-grid", "0.05:2.3:10"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 10);
    for (row, (t, r)) in rows.iter().zip(pinned) {
        let got_t: f64 = row[0].parse().unwrap();
        let got_r: f64 = row[2].parse().unwrap();
        let tail: f64 = row[3].parse().unwrap();
        assert!((got_t - t).abs() < 1e-12);
        assert!((got_r / r - 1.0).abs() < 1e-9, "t={t}: {got_r} vs {r}");
        assert!(got_r >= tail);
    }
}

#[test]
fn heat_remainder_svg_has_both_series() {
    let o = run(&["heat-remainder", "--eigs", FIXTURE, "--closed", "--c", "20", "--svg", "--log-y"]);
    assert!(o.status.success());
    let svg = stdout(&o);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<path").count(), 2);
}

#[test]
fn verify_kernel_reports_small_errors() {
    let o = run(&["verify-kernel", "--n", "3"]);
    assert!(o.status.success());
    for row in csv_rows(&stdout(&o)) {
        let err: f64 = row[4].parse().unwrap();
        assert!(err < 1e-6, "{row:?}");
    }
}

#[test]
fn seed_check_runs_before_the_command() {
    let o = run(&["--seed-check", "verify-kernel", "--n", "1", "--roundtrip"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed check passed"));
    let o = run(&["count", "--dim", "4", "--d", "0.5", "--tau", "3", "--seed-check"]);
    assert!(o.status.success());
}

#[test]
fn sqrt_input_matches_squared_input() {
    let dir = std::env::temp_dir().join(format!("weylbound-sqrt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let text = std::fs::read_to_string(FIXTURE).unwrap();
    let roots: String = text
        .lines()
        .filter_map(|l| l.trim().parse::<f64>().ok())
        .map(|v| format!("{}\n", v.sqrt()))
        .collect();
    let path = dir.join("roots.txt");
    std::fs::write(&path, roots).unwrap();
    let args = |p: &str, extra: &[&str]| {
        let mut v = vec!["detzeta", "--eigs", p, "--c", "50", "--eps", "0.22161", "--T", "2.2165"];
        v.extend_from_slice(extra);
        v.iter().map(|s| s.to_string()).collect::<Vec<_>>()
    };
    let a: Vec<String> = args(FIXTURE, &[]);
    let b: Vec<String> = args(path.to_str().unwrap(), &["--sqrt-input"]);
    let oa = run(&a.iter().map(String::as_str).collect::<Vec<_>>());
    let ob = run(&b.iter().map(String::as_str).collect::<Vec<_>>());
    let ra = csv_rows(&stdout(&oa));
    let rb = csv_rows(&stdout(&ob));
    for j in 7..9 {
        let x: f64 = ra[0][j].parse().unwrap();
        let y: f64 = rb[0][j].parse().unwrap();
        assert!((x - y).abs() < 1e-9 * x);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
