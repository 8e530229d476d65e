use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pshgeo"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(cmd: &mut Command) -> (Output, String) {
    let out = cmd.output().expect("spawn pshgeo");
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    (out, text)
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("cfg.toml");
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL: &str = r#"
[grid]
n = 1
R = 8.0
N = 128

[functions.zero]
pieces = [{ coef = [0.0], constant = 0.0 }]

[functions.log]
pieces = [{ coef = [1.0], constant = 0.0 }]

[functions.bounded]
pieces = [{ coef = [1.0], constant = 0.0 }, { coef = [0.0], constant = -1.0 }]
"#;

#[test]
fn run_writes_profiles_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let (out, text) = run(bin()
        .args(["run", "--config"])
        .arg(config("disk.toml"))
        .args(["--suite", "geodesic-examples", "--out"])
        .arg(dir.path()));
    assert!(out.status.success(), "{text}");
    assert!(text.contains("all checks passed"));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("geodesic-examples"));
    let csvs: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
        .collect();
    assert!(!csvs.is_empty());
    let first = std::fs::read_to_string(csvs[0].path()).unwrap();
    assert!(first.starts_with("t,m_t,capacity,"));
    assert!(!first.contains('\r'));
}

#[test]
fn failing_expectation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "{SMALL}\n[[connectivity]]\nu0 = \"zero\"\nu1 = \"log\"\nexpected = \"connectable\"\n"
    );
    let cfg = write_config(dir.path(), &body);
    let (out, text) = run(bin().args(["run", "--config"]).arg(&cfg).args(["--suite", "connectivity"]));
    assert_eq!(out.status.code(), Some(1), "{text}");
    assert!(text.contains("FAIL"));
}

#[test]
fn errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let (out, _) = run(bin().args(["run", "--config"]).arg(&cfg).args(["--suite", "no-such-suite"]));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("no-such-suite"));

    let bad = write_config(dir.path(), "[grid]\nn = 1\nR = 8.0\nN = 128\n\n[bodies]\nK0 = [[-1.0]]\n\n[[body_pairs]]\nl0 = \"K0\"\nl1 = \"K9\"\n");
    let (out, _) = run(bin().args(["run", "--config"]).arg(&bad));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("K9") && err.contains("line 11"), "{err}");
}

#[test]
fn geodesic_subcommand_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let (out, text) = run(bin()
        .args(["geodesic", "--config"])
        .arg(&cfg)
        .args(["--u0", "zero", "--u1", "bounded", "--out"])
        .arg(dir.path()));
    assert!(out.status.success(), "{text}");
    let csv = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .find(|e| e.file_name().to_string_lossy().starts_with("geodesic-"))
        .expect("geodesic csv");
    let text = std::fs::read_to_string(csv.path()).unwrap();
    assert!(text.lines().count() > 2);
}

#[test]
fn connectivity_subcommand_reports_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let verdict = |u0: &str, u1: &str| {
        let (out, text) = run(bin().args(["connectivity", "--config"]).arg(&cfg).args(["--u0", u0, "--u1", u1]));
        assert!(out.status.success(), "{text}");
        text.lines().next().unwrap().to_string()
    };
    assert_eq!(verdict("zero", "bounded"), "verdict: connectable");
    assert_eq!(verdict("zero", "log"), "verdict: not-connectable");
    assert_eq!(verdict("log", "residual(log)"), "verdict: connectable");
}

#[test]
fn output_is_identical_across_thread_counts() {
    let outputs: Vec<tempfile::TempDir> = ["1", "8"]
        .iter()
        .map(|threads| {
            let dir = tempfile::tempdir().unwrap();
            let (out, text) = run(bin()
                .env("PSHGEO_THREADS", threads)
                .args(["run", "--config"])
                .arg(config("disk.toml"))
                .arg("--out")
                .arg(dir.path()));
            assert!(out.status.success(), "{text}");
            dir
        })
        .collect();
    let list = |d: &Path| {
        let mut v: Vec<_> = std::fs::read_dir(d).unwrap().map(|e| e.unwrap().file_name()).collect();
        v.sort();
        v
    };
    let (a, b) = (outputs[0].path(), outputs[1].path());
    assert_eq!(list(a), list(b));
    for name in list(a) {
        assert_eq!(std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap());
    }
}
