use std::path::Path;
use std::process::{Command, Output};

fn mubforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mubforge"))
        .args(args)
        .env_remove("MUBFORGE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fourier_search_reports_48_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let vectors = dir.path().join("vectors.csv");
    let out = mubforge(&[
        "mu-search",
        "--family",
        "F",
        "--seeds",
        "5000",
        "--rng",
        "42",
        "--out",
        path(&vectors),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("48 distinct vectors"), "{}", stdout(&out));

    let out = mubforge(&[
        "triplets",
        "--in",
        path(&vectors),
        "--family",
        "F",
        "--out",
        path(dir.path()),
    ]);
    assert!(stdout(&out).contains("16 third bases"));
    assert!(dir.path().join("triplet_15.csv").exists());

    let out = mubforge(&["orbits", "--in", path(&vectors), "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["sizes"], serde_json::json!([6, 6, 36]));
    assert_eq!(doc["closed"], serde_json::json!(true));

    let triplet = dir.path().join("triplet_0.csv");
    let out = mubforge(&["extend", "--triplet", path(&triplet), "--seeds", "200"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("0 vectors unbiased"));
}

#[test]
fn catalog_verifies_tao() {
    let out = mubforge(&["catalog", "--family", "S6", "--verify"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 7);
    assert!(text.ends_with("Hadamard: true, isolated: true\n"));
}

#[test]
fn catalog_output_round_trips_through_equivalence() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    std::fs::write(
        &a,
        stdout(&mubforge(&["catalog", "--family", "K2", "--params", "0.3,-0.8"])),
    )
    .unwrap();
    std::fs::write(
        &b,
        stdout(&mubforge(&["catalog", "--family", "K2", "--params", "0.3,0.8"])),
    )
    .unwrap();
    std::fs::write(&c, stdout(&mubforge(&["catalog", "--family", "S6"]))).unwrap();
    let out = mubforge(&["equivalence", "--a", path(&a), "--b", path(&b)]);
    assert!(stdout(&out).starts_with("equivalent: true"));
    let out = mubforge(&["equivalence", "--a", path(&a), "--b", path(&c)]);
    assert!(stdout(&out).starts_with("equivalent: false"));
}

#[test]
fn grid_sweep_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let scan = dir.path().join("scan.csv");
    let pgm = dir.path().join("scan.pgm");
    let args = [
        "sweep",
        "--family",
        "K2",
        "--grid",
        "8",
        "--seeds-per-point",
        "40",
        "--rng",
        "3",
    ];
    let out = mubforge(&args);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 65);

    let mut with_files = args.to_vec();
    with_files.extend(["--out", path(&scan), "--bitmap", path(&pgm)]);
    assert!(mubforge(&with_files).status.success());
    let csv = std::fs::read_to_string(&scan).unwrap();
    assert_eq!(csv, stdout(&out));
    assert!(std::fs::read_to_string(&pgm).unwrap().starts_with("P2\n8 8\n255\n"));

    let out = mubforge(&["symmetry-check", "--in", path(&scan)]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 5);

    let out = mubforge(&[
        "sweep",
        "--family",
        "K2",
        "--grid",
        "2",
        "--seeds-per-point",
        "10",
        "--json",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.as_array().unwrap().len(), 4);
    assert!(doc[0].get("triplet_found").is_some());
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = |threads: &str| {
        stdout(&mubforge(&[
            "mu-search",
            "--family",
            "D6",
            "--params",
            "0",
            "--seeds",
            "300",
            "--rng",
            "9",
            "--json",
            "--threads",
            threads,
        ]))
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn exit_codes() {
    assert_eq!(mubforge(&["catalog", "--family", "Q"]).status.code(), Some(1));
    assert_eq!(
        mubforge(&["catalog", "--family", "K2", "--params", "0.3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        mubforge(&["catalog", "--family", "K2", "--params", "x,1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(mubforge(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        mubforge(&["orbits", "--in", "/nonexistent/v.csv"]).status.code(),
        Some(1)
    );
    let corner = mubforge(&[
        "catalog",
        "--family",
        "K2",
        "--params",
        "1.5707963267948966,-1.5707963267948966",
    ]);
    assert_eq!(corner.status.code(), Some(2));
    assert_eq!(mubforge(&["--help"]).status.code(), Some(0));
}
