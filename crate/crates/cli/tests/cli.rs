use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn spzf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spzf"))
        .args(args)
        .env_remove("SPZF_THREADS")
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no '{key}' in output:\n{text}"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn solve_feasible_instance() {
    let h1 = data("feasible_h1.txt");
    let h2 = data("feasible_h2.txt");
    for algo in ["random", "iterative", "iterative-fc", "genetic"] {
        let o = spzf(&["solve", "--h1", h1.to_str().unwrap(), "--h2", h2.to_str().unwrap(), "--algo", algo]);
        assert!(o.status.success(), "{algo}: {}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert_eq!(field(&text, "status"), "solved");
        for user in ["residual user 1", "residual user 2"] {
            let r: f64 = field(&text, user).parse().unwrap();
            assert!(r < 1e-9, "{algo} {user} = {r}");
        }
        let w_lines: Vec<&str> = text.lines().skip_while(|l| *l != "w:").skip(1).take(9).collect();
        for line in w_lines {
            let v: Vec<f64> = line.split(' ').map(|x| x.parse().unwrap()).collect();
            assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn solve_reports_dominant_entry_as_e1() {
    let dir = tempfile::tempdir().unwrap();
    let h1 = write(dir.path(), "h1", "50 0\n1 0\n1 0\n1 0\n1 0\n1 0\n1 0\n1 0\n1 0\n");
    let h2 = write(dir.path(), "h2", "1 0\n0 1\n-1 0\n0 -1\n1 1\n1 -1\n-1 1\n-1 -1\n2 0\n");
    let o = spzf(&["solve", "--h1", h1.to_str().unwrap(), "--h2", h2.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(field(&text, "status"), "outage");
    assert_eq!(field(&text, "event"), "E1");
    assert_eq!(field(&text, "stage"), "1");
}

#[test]
fn solve_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let nine = write(dir.path(), "nine", &"1 0\n".repeat(9));
    let eight = write(dir.path(), "eight", &"1 0\n".repeat(8));
    let junk = write(dir.path(), "junk", "1 0\n1 zero\n");
    let o = spzf(&["solve", "--h1", nine.to_str().unwrap(), "--h2", eight.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension mismatch"));
    let o = spzf(&["solve", "--h1", nine.to_str().unwrap(), "--h2", junk.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = spzf(&["solve", "--h1", "/nonexistent/h1", "--h2", nine.to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn same_seed_gives_identical_bytes() {
    let args = ["outage", "--n", "12", "--m", "3,4", "--algo", "all", "--trials", "500", "--seed", "9"];
    let a = spzf(&args);
    let b = spzf(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 1 + 5 * 2 * 3);
    assert!(!text.contains('\r'));
    let other = spzf(&["outage", "--n", "12", "--m", "3,4", "--algo", "all", "--trials", "500", "--seed", "10"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fray.csv");
    let cfg = write(
        dir.path(),
        "run.toml",
        &format!("m = [3, 4]\ntrials = 2000\nseed = 5\nout = \"{}\"\n", out.display()),
    );
    let o = spzf(&["fray", "--config", cfg.to_str().unwrap(), "--seed", "6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("fray: 4 rows"));
    let csv = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(r[11], "2000");
        assert_eq!(r[12], "6");
    }
    assert_eq!(rows[1][8], "fray_approx");

    let bad = write(dir.path(), "bad.toml", "trails = 10\n");
    let o = spzf(&["fray", "--config", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown config key"));
}

#[test]
fn thread_count_from_environment() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_spzf"))
            .args(["outage", "--n", "12", "--m", "4", "--algo", "iterative", "--trials", "300"])
            .env("SPZF_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert!(one.status.success());
    assert_eq!(one.stdout, run("3").stdout);
    assert!(!run("lots").status.success());
}

#[test]
fn unwritable_output_fails() {
    let o = spzf(&["fray", "--m", "3", "--trials", "10", "--out", "/nonexistent/dir/x.csv"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot write"));
}

#[test]
fn secrecy_rows_carry_snr_and_eavesdropper_size() {
    let o = spzf(&[
        "secrecy", "--n", "12", "--m", "4", "--algo", "random", "--ne", "2", "--snr-db", "-5,10", "--trials", "200",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 4);
    let metrics: Vec<&str> = rows.iter().take(4).map(|r| r[8]).collect();
    assert_eq!(metrics, ["rate_user1", "rate_user2", "rate_min", "outage_fraction"]);
    assert!(rows.iter().all(|r| r[6] == "2"));
    assert_eq!(rows[0][7].parse::<f64>().unwrap(), -5.0);
    assert_eq!(rows[4][7].parse::<f64>().unwrap(), 10.0);
}

#[test]
fn min_outage_reports_m_star() {
    let o = spzf(&["min-outage", "--n", "9,12", "--algo", "iterative-fc", "--trials", "300"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][8], "m_star");
    assert_eq!(rows[0][4], "3");
    let m_star: f64 = rows[2][9].parse().unwrap();
    assert!(m_star == 3.0 || m_star == 4.0);
}

#[test]
fn runtime_ordering() {
    let o = spzf(&["runtime", "--n", "20", "--trials", "200"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mean = |algo: &str| -> f64 {
        text.lines()
            .map(|l| l.split(',').collect::<Vec<_>>())
            .find(|r| r[2] == algo)
            .map(|r| r[9].parse().unwrap())
            .unwrap()
    };
    let (r, i, f, g) = (mean("random"), mean("iterative"), mean("iterative-fc"), mean("genetic"));
    assert!(r < i && r < f, "random {r} iterative {i} iterative-fc {f}");
    assert!(i < g && f < g, "iterative {i} iterative-fc {f} genetic {g}");
    assert!(text.lines().skip(1).all(|l| !l.ends_with(",0.00000000000e0")));
}
