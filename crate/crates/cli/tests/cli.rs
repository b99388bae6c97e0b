use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bri::io;
use bri::{DenseMatrix, Method};

fn bri(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bri"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(path: &Path, m: usize, data: Vec<f64>) {
    io::write_matrix(path, &DenseMatrix::from_vec(m, data).unwrap()).unwrap();
}

/// `[[2I, I], [I, 2I]]` of order 2b.
fn band(b: usize) -> DenseMatrix {
    DenseMatrix::from_fn(2 * b, |i, j| {
        if i == j {
            2.0
        } else if i % b == j % b {
            1.0
        } else {
            0.0
        }
    })
}

#[test]
fn gen_randn_is_deterministic_and_shifted() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.brim"), dir.path().join("b.brim"));
    for path in [&a, &b] {
        let out = bri(&["gen", "--kind", "randn", "--m", "8", "--seed", "42", "--out", p(path)]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let x = io::read_matrix(&a).unwrap();
    assert_eq!(x, bri::generate::randn_shifted(8, 42));
}

#[test]
fn gen_lssvm_corner_and_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("k.brim");
    let out = bri(&["gen", "--kind", "lssvm", "--n", "3", "--gamma", "1", "--out", p(&f)]);
    assert_eq!(code(&out), 0);
    let x = io::read_matrix(&f).unwrap();
    assert_eq!(x.order(), 4);
    assert_eq!(x.get(0, 0), 0.0);
    for i in 1..4 {
        assert_eq!(x.get(i, i), 2.0);
        assert_eq!(x.get(0, i), 1.0);
    }
}

#[test]
fn gen_spd_is_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s.brim");
    assert_eq!(code(&bri(&["gen", "--kind", "spd", "--m", "12", "--out", p(&f)])), 0);
    let x = io::read_matrix(&f).unwrap();
    assert_eq!(x, x.transpose());
}

#[test]
fn help_mentions_diagonal_shift() {
    let out = bri(&["gen", "--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("adds m to every"), "{text}");
}

#[test]
fn bad_flags_exit_3_without_creating_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m.brim");
    write(&input, 4, band(2).into_vec());
    let out_path = dir.path().join("o.brim");
    for args in [
        vec!["invert", "--in", p(&input), "--out", p(&out_path), "--k", "1"],
        vec!["invert", "--in", p(&input), "--out", p(&out_path), "--k", "5"],
        vec!["invert", "--in", p(&input), "--out", p(&out_path)],
        vec![
            "invert-block",
            "--in",
            p(&input),
            "--out",
            p(&out_path),
            "--k",
            "2",
            "--row",
            "3",
            "--col",
            "1",
        ],
        vec![
            "invert-block",
            "--in",
            p(&input),
            "--out",
            p(&out_path),
            "--k",
            "2",
            "--row",
            "1",
            "--col",
            "0",
        ],
        vec!["gen", "--kind", "lssvm", "--m", "3", "--out", p(&out_path)],
        vec!["bench", "--m", "8", "--k-list", "2,1"],
        vec!["frobnicate"],
    ] {
        let out = bri(&args);
        assert_eq!(code(&out), 3, "{args:?}");
        assert!(!out_path.exists(), "{args:?}");
    }
}

#[test]
fn missing_input_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = bri(&[
        "invert",
        "--in",
        p(&dir.path().join("nope")),
        "--out",
        p(&dir.path().join("o")),
        "--k",
        "2",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn invert_band_reassembles() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output) = (dir.path().join("m.brim"), dir.path().join("z.brim"));
    write(&input, 4, band(2).into_vec());
    let out = bri(&["invert", "--in", p(&input), "--out", p(&output), "--k", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let z = io::read_matrix(&output).unwrap();
    let want = DenseMatrix::from_fn(4, |i, j| {
        if i == j {
            2.0 / 3.0
        } else if i % 2 == j % 2 {
            -1.0 / 3.0
        } else {
            0.0
        }
    });
    assert!(z.max_abs_diff(&want) < 1e-15);
    assert!(String::from_utf8_lossy(&out.stdout).contains("peak_blocks=3"));
}

#[test]
fn identity_off_diagonal_blocks_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output) = (dir.path().join("i.brim"), dir.path().join("z.brim"));
    io::write_matrix(&input, &DenseMatrix::identity(4)).unwrap();
    let out = bri(&["invert", "--in", p(&input), "--out", p(&output), "--k", "2"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("N(1,2)"), "{err}");
    assert!(!output.exists());
    assert!(dir.path().join("z.brim.partial").exists());
}

#[test]
fn bri_and_lu_agree() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m.brim");
    let (x, y) = (dir.path().join("bri.brim"), dir.path().join("lu.brim"));
    assert_eq!(code(&bri(&["gen", "--m", "16", "--out", p(&input)])), 0);
    assert_eq!(
        code(&bri(&["invert", "--in", p(&input), "--out", p(&x), "--k", "4"])),
        0
    );
    assert_eq!(
        code(&bri(&["invert", "--in", p(&input), "--out", p(&y), "--method", "lu"])),
        0
    );
    let (zb, zl) = (io::read_matrix(&x).unwrap(), io::read_matrix(&y).unwrap());
    assert!(zb.rel_max_diff(&zl) < 1e-8);
    let threaded = dir.path().join("t.brim");
    assert_eq!(
        code(&bri(&[
            "invert",
            "--in",
            p(&input),
            "--out",
            p(&threaded),
            "--k",
            "4",
            "--threads",
            "3"
        ])),
        0
    );
    assert_eq!(fs::read(&threaded).unwrap(), fs::read(&x).unwrap());
}

#[test]
fn invert_block_scalar_examples() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m.brim");
    write(&input, 2, vec![4.0, 2.0, 1.0, 3.0]);
    for (row, col, want) in [("1", "1", 0.3), ("2", "1", -0.1), ("1", "2", -0.2), ("2", "2", 0.4)] {
        let out_path = dir.path().join(format!("n{row}{col}.brim"));
        let out = bri(&[
            "invert-block",
            "--in",
            p(&input),
            "--out",
            p(&out_path),
            "--k",
            "2",
            "--row",
            row,
            "--col",
            col,
        ]);
        assert_eq!(code(&out), 0);
        let n = io::read_matrix(&out_path).unwrap();
        assert_eq!(n.order(), 1);
        assert!((n.get(0, 0) - want).abs() < 1e-15, "({row},{col})");
    }
}

#[test]
fn invert_block_json_reports_peak() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m.brim");
    assert_eq!(code(&bri(&["gen", "--m", "12", "--out", p(&input)])), 0);
    let out = bri(&[
        "invert-block",
        "--in",
        p(&input),
        "--out",
        p(&dir.path().join("b.brim")),
        "--k",
        "4",
        "--row",
        "3",
        "--col",
        "2",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["bound"], 12);
    assert!(v["peak_blocks"].as_u64().unwrap() <= 12);
}

#[test]
fn verify_pass_and_located_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m.brim");
    assert_eq!(code(&bri(&["gen", "--m", "12", "--seed", "3", "--out", p(&input)])), 0);
    let out = bri(&["verify", "--in", p(&input), "--k", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS"));

    let inv = dir.path().join("z.brim");
    assert_eq!(
        code(&bri(&["invert", "--in", p(&input), "--out", p(&inv), "--k", "3"])),
        0
    );
    assert_eq!(
        code(&bri(&["verify", "--in", p(&input), "--k", "3", "--inverse", p(&inv)])),
        0
    );

    let mut z = io::read_matrix(&inv).unwrap();
    z.set(4, 7, z.get(4, 7) + 1.0);
    io::write_matrix(&inv, &z).unwrap();
    let out = bri(&["verify", "--in", p(&input), "--k", "3", "--inverse", p(&inv), "--json"]);
    assert_eq!(code(&out), 1);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
    assert_eq!(v["worst"], serde_json::json!([5, 8]));
}

#[test]
fn verify_band_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m.brim");
    write(&input, 8, band(4).into_vec());
    let out = bri(&["verify", "--in", p(&input), "--k", "2", "--tol", "0", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["max_rel_error"].as_f64().unwrap() < 1e-15);
}

#[test]
fn bench_rows_and_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let out = bri(&[
        "bench",
        "--m",
        "64",
        "--k-list",
        "2,4,8",
        "--repeat",
        "2",
        "--csv",
        p(&csv),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "method,m,k,wall_ms,peak_bytes,n_block_inv,n_block_mul,seed"
    );
    let rows = io::read_bench_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 8);
    let kinds: Vec<(Method, usize)> = rows.iter().map(|r| (r.method, r.k)).collect();
    assert_eq!(
        kinds[..4],
        [(Method::Bri, 2), (Method::Bri, 4), (Method::Bri, 8), (Method::Lu, 1)]
    );
    let peaks: Vec<u64> = rows[..3].iter().map(|r| r.peak_bytes).collect();
    assert!(peaks[0] > peaks[1] && peaks[1] > peaks[2], "{peaks:?}");
    let medians = String::from_utf8_lossy(&out.stdout);
    assert_eq!(medians.lines().count(), 4);
}

#[test]
fn bench_to_stdout() {
    let out = bri(&["bench", "--m", "8", "--k-list", "2", "--repeat", "1"]);
    assert_eq!(code(&out), 0);
    let rows = io::read_bench_csv(&out.stdout[..]).unwrap();
    assert_eq!(rows.len(), 2);
}
