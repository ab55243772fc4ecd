use std::path::Path;
use std::process::{Command, Output};

use binembed::io::{read_codes, read_vectors};

fn binembed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_binembed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = binembed(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_writes_standard_size_file_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.bemb");
    let b = dir.path().join("b.bemb");
    let out = ok(&["gen", "--n", "300", "--p", "512", "--seed", "7", "--out", s(&a)]);
    ok(&["gen", "--n", "300", "--p", "512", "--seed", "7", "--out", s(&b)]);
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes.len(), 24 + 4 * 300 * 512);
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("N=300 p=512 fnv1a64="), "{text}");
    let data = read_vectors(&mut bytes.as_slice()).unwrap();
    assert_eq!((data.n_points(), data.dim()), (300, 512));
}

#[test]
fn gen_rejects_empty_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out = binembed(&["gen", "--n", "0", "--p", "8", "--out", s(&dir.path().join("x"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn embed_headers_follow_flags() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.bemb");
    ok(&["gen", "--n", "40", "--p", "512", "--seed", "1", "--out", s(&data)]);

    let fbe = dir.path().join("fbe.bcod");
    ok(&["embed", "--in", s(&data), "--algo", "fbe", "--m", "960", "--b", "16", "--out", s(&fbe)]);
    let codes = read_codes(&mut std::fs::read(&fbe).unwrap().as_slice()).unwrap();
    assert_eq!(codes.len(), 40);
    assert!(codes.iter().all(|c| c.n_bits() == 960 && c.n_blocks() == 16));

    let urp = dir.path().join("urp.bcod");
    ok(&["embed", "--in", s(&data), "--algo", "urp", "--m", "1000", "--out", s(&urp)]);
    let codes = read_codes(&mut std::fs::read(&urp).unwrap().as_slice()).unwrap();
    assert!(codes.iter().all(|c| c.n_bits() == 1000 && c.n_blocks() == 1));

    let bad = binembed(&["embed", "--in", s(&data), "--algo", "fbe", "--m", "100", "--b", "3", "--out", s(&fbe)]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("does not divide"));

    let rounded = dir.path().join("r.bcod");
    ok(&[
        "embed", "--in", s(&data), "--algo", "fbe", "--m", "100", "--b", "3", "--round-m", "--out", s(&rounded),
    ]);
    let codes = read_codes(&mut std::fs::read(&rounded).unwrap().as_slice()).unwrap();
    assert_eq!((codes[0].n_bits(), codes[0].n_blocks()), (102, 3));
}

#[test]
fn sweep_then_slice() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let svg = dir.path().join("sweep.svg");
    let args = [
        "sweep", "--algos", "urp,fbe,fbe2", "--N", "30,90", "--ms", "8,32,128", "--p", "32", "--trials", "4",
        "--seed", "3", "--no-timing", "--threads", "1",
    ];
    let first = ok(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", s(&csv), "--plot", s(&svg)]);
    ok(&with_out);
    assert_eq!(std::fs::read(&csv).unwrap(), first.stdout);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));

    let text = String::from_utf8(first.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "algorithm,N,p,m,n,B,seed,trial,max_distortion,mean_distortion,fit_ms,embed_ms"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3 * 2 * 3 * 4);
    assert_eq!(rows.iter().filter(|r| r.starts_with("urp,30,32,8,")).count(), 4);

    let slice = ok(&["slice", "--in", s(&csv), "--delta", "0.3"]);
    let table = String::from_utf8(slice.stdout).unwrap();
    assert!(table.starts_with("algorithm,N,ln_N,m\n"), "{table}");
    assert_eq!(table.lines().count(), 1 + 3 * 2);
    assert!(String::from_utf8_lossy(&slice.stderr).contains("R^2"));
}

#[test]
fn slice_reports_unbracketed_target() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    ok(&[
        "sweep", "--algos", "urp", "--N", "20", "--ms", "64,128", "--p", "16", "--trials", "2", "--no-timing",
        "--out", s(&csv),
    ]);
    let out = binembed(&["slice", "--in", s(&csv), "--delta", "0.0001"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("target"));
}

#[test]
fn retrieve_on_synthetic_data() {
    let out = ok(&[
        "retrieve", "--algos", "urp,fbe,fbe2", "--ms", "256", "--N", "300", "--p", "32", "--n-queries", "20",
        "--k", "5", "--seed", "2",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "algorithm,m,n,B,k,n_queries,recall,embed_ms,query_ms");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        let recall: f64 = r[6].parse().unwrap();
        assert!((0.0..=1.0).contains(&recall));
        assert_eq!(r[5], "20");
    }
}

#[test]
fn verify_passes_and_names_identities() {
    let out = ok(&["verify", "--trials", "20000", "--seed", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("tessellation identity"));
    assert!(text.contains("Pr(X = Y') = 1/2"));
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 20);
    assert!(!text.contains("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(binembed(&["embed", "--algo", "nope"]).status.code(), Some(2));
    assert_eq!(binembed(&["frobnicate"]).status.code(), Some(2));
}
