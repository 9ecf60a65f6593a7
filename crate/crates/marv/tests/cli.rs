use std::net::TcpListener;
use std::process::Command;

fn marv() -> Command {
    Command::new(env!("CARGO_BIN_EXE_marv"))
}

#[test]
fn synth_ingest_stats_scene() {
    let dir = tempfile::tempdir().unwrap();
    let study = dir.path().join("study");
    let out = marv().args(["synth", study.to_str().unwrap(), "--records", "200", "--attributes", "10"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = study.join("manifest.toml");
    let m = manifest.to_str().unwrap();

    let out = marv().args(["ingest", m]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("steps      8"), "{text}");
    assert!(text.contains("attributes 10"));

    let out = marv().args(["stats", m, "--format", "machine", "--drift-norm", "per-attribute"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["steps"].as_array().unwrap().len(), 8);
    assert_eq!(v["drift"]["normalization"], "per-attribute");
    let out = marv().args(["stats", m, "--format", "json"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["drift"]["normalization"], "global");
    assert_eq!(v["drift"]["ranking"][0]["attribute"], "CurvedLength");
    assert_eq!(v["drift"]["ranking"][0]["value"], 1.0);
    assert_eq!(v["drift"]["ranking"][0]["pair"], serde_json::json!([1, 2]));

    let table = marv().args(["stats", m]).output().unwrap();
    assert!(String::from_utf8(table.stdout).unwrap().contains("drift ranking"));

    for chart in ["mdd", "tet", "chrono:Diameter"] {
        let file = dir.path().join("chart.json");
        let out = marv().args(["scene", m, "--chart", chart, "--out", file.to_str().unwrap()]).output().unwrap();
        assert!(out.status.success(), "{chart}: {}", String::from_utf8_lossy(&out.stderr));
        let text = std::fs::read_to_string(&file).unwrap();
        let scene = marv::codec::parse_scene(&text).unwrap();
        assert_eq!(marv::codec::serialize_scene(&scene).unwrap(), text);
    }
    let out = marv().args(["scene", m, "--chart", "bogus", "--out", "/dev/null"]).output().unwrap();
    assert!(!out.status.success());

    let log = dir.path().join("log.jsonl");
    std::fs::write(
        &log,
        "# demo\n{\"type\":\"extract_chrono\",\"attribute\":\"Phi\"}\n\n{\"type\":\"dismiss_chrono\",\"chart_id\":\"x\"}\n",
    )
    .unwrap();
    let snaps = dir.path().join("snaps");
    let out = marv()
        .args(["replay", m, log.to_str().unwrap(), "--snapshots", snaps.to_str().unwrap()])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("v1 ok") && text.contains("rejected"), "{text}");
    assert!(snaps.join("v0.json").exists() && snaps.join("v1.json").exists());
}

#[test]
fn errors_exit_nonzero() {
    let out = marv().args(["ingest", "/nonexistent/manifest.toml"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn serve_reports_busy_port() {
    let dir = tempfile::tempdir().unwrap();
    let study = dir.path().join("s");
    assert!(marv().args(["synth", study.to_str().unwrap(), "--records", "20", "--attributes", "8"]).status().unwrap().success());
    let held = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = held.local_addr().unwrap().port().to_string();
    let out = marv()
        .args(["serve", study.join("manifest.toml").to_str().unwrap(), "--port", &port])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("binding"));
}

#[test]
fn shipped_palette_is_current() {
    assert_eq!(marv::palette_file::SHIPPED_PALETTE, marv::palette_file::PaletteFile::current().to_json());
    let out = marv().arg("palette").output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), marv::palette_file::SHIPPED_PALETTE);
}
