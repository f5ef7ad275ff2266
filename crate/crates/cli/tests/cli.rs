use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modhilbert"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("HT_THREADS")
        .output()
        .expect("binary runs")
}

#[test]
fn table1_prefix_passes_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--table", "table1", "--nu", "0,1", "--nmax", "32"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("cs_nu0.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,h,value,eoc");
    assert_eq!(lines.len(), 1 + 5);
    assert!(lines[1].starts_with("2,") && lines[1].ends_with(','));
    assert!(dir.path().join("cs_over_h_nu1.csv").exists());
    assert!(!dir.path().join("failures.csv").exists());
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--table", "table2", "--nu", "0,2", "--nmax", "16"];
    run(&args, a.path());
    let o = Command::new(env!("CARGO_BIN_EXE_modhilbert"))
        .args(args)
        .arg("--out")
        .arg(b.path())
        .env("HT_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.code().is_some());
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for name in names {
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?}");
    }
}

#[test]
fn first_cell_is_projected_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--table", "custom", "--func", "psi1", "--nu", "0", "--nmax", "16"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("error_nu0_psi1.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let value: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(value < 1e-10, "{line}");
    }
}

#[test]
fn mismatches_exit_with_two_and_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--table", "table2", "--nu", "2", "--nmax", "8"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.starts_with("quantity,n,expected,got,tolerance"));
    let listed = fs::read_to_string(dir.path().join("failures.csv")).unwrap();
    assert_eq!(listed, stderr);
    assert!(listed.lines().skip(1).all(|l| l.split(',').count() == 5));
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["--table", "table9"][..],
        &["--table", "table2", "--nmax", "12"],
        &["--table", "table2", "--horizon", "-1"],
        &["--table", "table6", "--nu", "1"],
        &["--table", "custom", "--func", "cosine"],
        &["--nu", "0"],
    ] {
        let o = run(args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn markdown_fig2_and_matrix_dump() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--table", "table5", "--nmax", "16", "--format", "md", "--dump-matrix"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let md = fs::read_to_string(dir.path().join("wh_nu0_cubic_a.md")).unwrap();
    assert!(md.contains("| n |"), "{md}");
    let dump = fs::read(dir.path().join("matrix_nu0_n16.bin")).unwrap();
    assert_eq!(dump.len(), 8 + 16 * 16 * 8);

    let o = run(&["--table", "fig2", "--grid-points", "500"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let grid = fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    assert_eq!(grid.lines().count(), 501);
    assert_eq!(grid.lines().next(), Some("x,gap"));
}
