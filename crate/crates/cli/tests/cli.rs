use std::path::Path;
use std::process::{Command, Output};

fn shatter(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shatter"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_samples(path: &Path) -> Vec<f64> {
    std::fs::read(path)
        .unwrap()
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect()
}

#[test]
fn table1_prints_exact_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = shatter(&["table1"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    for (row, shatter_stored) in rows.iter().zip(["20", "100"]) {
        assert_eq!(
            &row[4..10],
            ["175", shatter_stored, "174825", "399600", "175000", "400000"]
        );
    }
    assert!(stderr(&out).contains("n: 1000"));
}

#[test]
fn gen_encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = shatter(
        &[
            "gen",
            "--n",
            "1000",
            "--sparsity",
            "25",
            "--seed",
            "7",
            "--out",
            "x.f64",
        ],
        d,
    );
    assert!(gen.status.success(), "{}", stderr(&gen));
    assert_eq!(std::fs::metadata(d.join("x.f64")).unwrap().len(), 8000);

    // seed 7 collides at σ = 11, so let the encoder search
    let enc = shatter(
        &[
            "encode",
            "--in",
            "x.f64",
            "--filters",
            "100",
            "--threshold",
            "0.01",
            "--out",
            "y.json",
        ],
        d,
    );
    assert!(enc.status.success(), "{}", stderr(&enc));
    assert!(stderr(&enc).contains("sigma="));

    let dec = shatter(&["decode", "--in", "y.json", "--out", "xr.f64"], d);
    assert!(dec.status.success(), "{}", stderr(&dec));
    let (x, xr) = (read_samples(&d.join("x.f64")), read_samples(&d.join("xr.f64")));
    let err = x.iter().zip(&xr).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-9, "{err}");
}

#[test]
fn csv_signals_and_explicit_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(shatter(
        &["gen", "--n", "1000", "--sparsity", "5", "--seed", "1", "--out", "x.csv"],
        d
    )
    .status
    .success());
    let text = std::fs::read_to_string(d.join("x.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("sample"));
    assert_eq!(text.lines().count(), 1001);
    let enc = shatter(
        &[
            "encode",
            "--in",
            "x.csv",
            "--filters",
            "100",
            "--sigma",
            "11",
            "--out",
            "y.json",
        ],
        d,
    );
    assert!(enc.status.success(), "{}", stderr(&enc));
    let json: String = std::fs::read_to_string(d.join("y.json"))
        .unwrap()
        .split_whitespace()
        .collect();
    assert!(json.contains("\"sigma\":11"));
}

#[test]
fn domain_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(shatter(
        &[
            "gen",
            "--n",
            "1000",
            "--sparsity",
            "25",
            "--seed",
            "7",
            "--out",
            "x.f64"
        ],
        d
    )
    .status
    .success());
    let out = shatter(
        &[
            "encode",
            "--in",
            "x.f64",
            "--filters",
            "100",
            "--sigma",
            "1",
            "--out",
            "y.json",
        ],
        d,
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("ShatterCollision"));

    assert!(
        shatter(&["gen", "--n", "64", "--sparsity", "20", "--out", "big.f64"], d)
            .status
            .success()
    );
    let out = shatter(&["encode", "--in", "big.f64", "--filters", "16", "--out", "y.json"], d);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("NoValidSigma"));
}

#[test]
fn usage_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        shatter(&["encode", "--filters", "4"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(shatter(&["frobnicate"], dir.path()).status.code(), Some(2));
    let missing = shatter(&["decode", "--in", "absent.json", "--out", "x.f64"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--n",
        "256",
        "--filters",
        "32",
        "--sparsity",
        "0,4,8",
        "--seed",
        "1,2",
        "--multiplier",
        "6",
        "--m-max",
        "8",
    ];
    let a = shatter(&args, dir.path());
    let b = shatter(&args, dir.path());
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let m: usize = f[0].parse().unwrap();
        assert_eq!(f[4], "48");
        if f[6] == "ok" {
            assert_eq!(f[3].parse::<usize>().unwrap(), 4 * m);
        }
    }
}

#[test]
fn dump_matrix_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = shatter(
        &[
            "dump-matrix",
            "--n",
            "16",
            "--filters",
            "4",
            "--sigma",
            "3",
            "--out",
            "m.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("m.csv")).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().all(|l| l.split(',').count() == 32));
}
