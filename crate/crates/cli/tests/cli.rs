use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::Command;

use axisdecomp_cli::server::{run, ServerState};
use axisdecomp_core::pipeline::import_bundle;

fn iris() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/iris.csv")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_axisdecomp"))
}

#[test]
fn analyze_writes_a_loadable_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("iris.json");
    let status = bin()
        .args(["analyze", "--input"])
        .arg(iris())
        .args(["--label", "species", "--objective", "lpp", "--projections", "2", "--output"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let bundle = import_bundle(&out).unwrap();
    assert_eq!(bundle.linear_nodes.len(), 2);
    assert_eq!(bundle.dataset.dim_names.len(), 4);
    assert!(!bundle.axis_nodes.is_empty());
}

#[test]
fn analyze_without_output_prints_json() {
    let out = bin()
        .args(["analyze", "--label", "species", "--objective", "pca", "--projections", "1", "--input"])
        .arg(iris())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(axisdecomp_core::AnalysisBundle::from_json(&text).is_ok());
}

#[test]
fn bad_arguments_exit_with_config_code() {
    let out = bin().args(["analyze", "--objective", "tsne", "--input"]).arg(iris()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["analyze", "--objective", "lde", "--input"]).arg(iris()).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "lde needs a label column");
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn bad_data_exits_with_data_code() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    std::fs::write(&csv, "a,b,c\n1,2,x\n3,4,5\n").unwrap();
    let out = bin().args(["analyze", "--input"]).arg(&csv).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["analyze", "--input"]).arg(dir.path().join("missing.csv")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["serve", "--bundle"]).arg(&csv).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "a non-bundle file is rejected before serving");
}

fn get(addr: std::net::SocketAddr, path: &str) -> String {
    let mut s = std::net::TcpStream::connect(addr).unwrap();
    write!(s, "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").unwrap();
    let mut buf = String::new();
    s.read_to_string(&mut buf).unwrap();
    buf
}

#[tokio::test(flavor = "multi_thread")]
async fn server_returns_the_bundle_verbatim() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.json");
    let status = bin()
        .args(["analyze", "--label", "species", "--projections", "1", "--input"])
        .arg(iris())
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();

    let assets = dir.path().join("www");
    std::fs::create_dir(&assets).unwrap();
    std::fs::write(assets.join("index.html"), "<html>ok</html>").unwrap();

    let state = ServerState::new(text.clone(), Some(assets)).unwrap();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(run(listener, state));

    let (bundle, health, index, escape) = tokio::task::spawn_blocking(move || {
        (get(addr, "/bundle"), get(addr, "/health"), get(addr, "/"), get(addr, "/../b.json"))
    })
    .await
    .unwrap();

    assert!(bundle.starts_with("HTTP/1.1 200"));
    assert!(bundle.to_ascii_lowercase().contains("content-type: application/json"));
    assert!(bundle.ends_with(text.as_str()));
    assert!(health.starts_with("HTTP/1.1 200") && health.contains("axisdecomp"));
    assert!(index.contains("<html>ok</html>"));
    assert!(!escape.starts_with("HTTP/1.1 200"));
}
