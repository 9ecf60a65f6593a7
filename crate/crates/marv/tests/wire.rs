use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use marv::codec::{parse_patch, parse_scene, serialize_scene};
use marv::palette_file::PaletteFile;
use marv::wire::{serve, Delivery, Hub, PROTOCOL};
use marv_core::scene::apply_patch;
use serde_json::{json, Value};

mod common;

fn hub() -> Hub {
    let reopen = Box::new(|| Ok(common::demo_session(30, 1)));
    Hub::new(common::demo_session(30, 1), Some(reopen))
}

fn parsed(d: &[Delivery]) -> Vec<(u64, Value)> {
    d.iter().map(|d| (d.to, serde_json::from_str(&d.text).unwrap())).collect()
}

fn hello(h: &mut Hub, c: u64, role: &str) -> Vec<(u64, Value)> {
    parsed(&h.handle(c, &json!({"type": "hello", "role": role}).to_string()))
}

#[test]
fn hello_yields_handshake_then_snapshot() {
    let mut h = hub();
    let c = h.connect();
    let out = hello(&mut h, c, "viewer");
    assert_eq!(out.len(), 2);
    let (to, hs) = &out[0];
    assert_eq!(*to, c);
    assert_eq!(hs["type"], "handshake");
    assert_eq!(hs["protocol"], PROTOCOL);
    assert_eq!(hs["scene_version"], 0);
    assert_eq!(hs["role"], "viewer");
    assert_eq!(hs["scene_schema"], "marv-scene/1");
    assert_eq!(hs["constants"]["tet_enter_degrees"], 30.0);
    assert_eq!(hs["constants"]["tet_exit_degrees"], 35.0);
    let palette: PaletteFile = serde_json::from_value(hs["palette"].clone()).unwrap();
    assert_eq!(palette, PaletteFile::current());
    let snap = &out[1].1;
    assert_eq!(snap["type"], "snapshot");
    assert_eq!(snap["scene_version"], 0);
    let scene = parse_scene(&snap["scene"].to_string()).unwrap();
    assert_eq!(serialize_scene(&scene).unwrap(), serialize_scene(h.session().scene()).unwrap());
}

#[test]
fn patches_broadcast_in_order_to_every_viewer() {
    let mut h = hub();
    let w = h.connect();
    let v1 = h.connect();
    let v2 = h.connect();
    let idle = h.connect();
    hello(&mut h, w, "writer");
    let mut views: Vec<_> = [v1, v2]
        .iter()
        .map(|&v| {
            let out = hello(&mut h, v, "viewer");
            parse_scene(&out[1].1["scene"].to_string()).unwrap()
        })
        .collect();
    let requests = [
        json!({"type": "extract_chrono", "attribute": "Diameter", "id": 1}),
        json!({"type": "click_chrono_quad", "chart_id": "chrono:Diameter", "bin_index": 2, "time_pair": 0, "id": 2}),
        json!({"type": "set_representation", "chart_id": "mdd", "representation": "tet", "id": "three"}),
        json!({"type": "sk_select", "col": 2, "row": 0}),
    ];
    for (k, r) in requests.iter().enumerate() {
        let out = parsed(&h.handle(w, &r.to_string()));
        let targets: Vec<u64> = out.iter().map(|(to, _)| *to).collect();
        assert_eq!(targets, [w, v1, v2]);
        for (to, f) in &out {
            assert_eq!(f["type"], "patch");
            assert_eq!(f["scene_version"], k as u64 + 1);
            assert_eq!(f.get("request_id"), r.get("id"));
            if let Some(i) = [v1, v2].iter().position(|v| v == to) {
                let p = parse_patch(&f["patch"].to_string()).unwrap();
                views[i] = apply_patch(&views[i], &p).unwrap();
            }
        }
    }
    assert!(!h.handle(idle, &json!({"type": "sk_select", "col": 0, "row": 0}).to_string()).is_empty());
    let expected = serialize_scene(h.session().scene()).unwrap();
    for v in &views {
        assert_eq!(serialize_scene(v).unwrap(), expected);
    }
}

#[test]
fn violations_yield_errors_and_leave_state_intact() {
    let mut h = hub();
    let c = h.connect();
    let before = serialize_scene(h.session().scene()).unwrap();
    let code = |out: &[(u64, Value)]| out[0].1["code"].as_str().unwrap().to_string();

    let out = parsed(&h.handle(c, r#"{"type":"sk_select","col":0,"row":0}"#));
    assert_eq!(code(&out), "hello_required");
    hello(&mut h, c, "viewer");
    let out = parsed(&h.handle(c, r#"{"type":"sk_select","col":0,"row":0}"#));
    assert_eq!(code(&out), "not_writer");
    hello(&mut h, c, "writer");
    for bad in ["not json", "[1,2]", r#"{"col":1}"#, r#"{"type":"explode"}"#, r#"{"type":"sk_select","col":"a","row":0}"#] {
        let out = parsed(&h.handle(c, bad));
        assert_eq!(out.len(), 1, "{bad}");
        assert_eq!(out[0].0, c);
        assert_eq!(out[0].1["type"], "error");
        assert_eq!(code(&out), "malformed", "{bad}");
        assert_eq!(out[0].1["protocol"], PROTOCOL);
        assert_eq!(out[0].1["scene_version"], 0);
    }
    let out = parsed(&h.handle(c, r#"{"type":"dismiss_chrono","chart_id":"chrono:Phi","id":9}"#));
    assert_eq!(code(&out), "rejected");
    assert_eq!(out[0].1["request_id"], 9);
    let out = parsed(&h.handle(c, r#"{"type":"extract_chrono","attribute":"Nope"}"#));
    assert_eq!(code(&out), "rejected");
    assert_eq!(h.scene_version(), 0);
    assert_eq!(serialize_scene(h.session().scene()).unwrap(), before);
}

#[test]
fn single_writer() {
    let mut h = hub();
    let a = h.connect();
    let b = h.connect();
    assert_eq!(hello(&mut h, a, "writer")[0].1["role"], "writer");
    let out = hello(&mut h, b, "writer");
    assert_eq!(out[0].1["code"], "writer_taken");
    assert_eq!(out[1].1["role"], "viewer");
    assert_eq!(h.writer(), Some(a));
    h.disconnect(a);
    assert_eq!(h.writer(), None);
    assert_eq!(hello(&mut h, b, "writer")[0].1["role"], "writer");
    assert_eq!(h.writer(), Some(b));
}

#[test]
fn open_reloads_and_bumps_version() {
    let mut h = hub();
    let w = h.connect();
    let v = h.connect();
    hello(&mut h, w, "writer");
    hello(&mut h, v, "viewer");
    h.handle(w, r#"{"type":"extract_chrono","attribute":"Phi"}"#);
    assert_eq!(h.scene_version(), 1);
    let out = parsed(&h.handle(w, r#"{"type":"open"}"#));
    assert_eq!(out.len(), 2);
    for (_, f) in &out {
        assert_eq!(f["type"], "snapshot");
        assert_eq!(f["scene_version"], 2);
    }
    assert!(h.session().scene().find("chrono:Phi").is_none());
    let out = parsed(&h.handle(w, r#"{"type":"sk_select","col":1,"row":1}"#));
    assert_eq!(out[0].1["scene_version"], 3);

    let mut fixed = Hub::new(common::demo_session(20, 2), None);
    let c = fixed.connect();
    hello(&mut fixed, c, "writer");
    let out = parsed(&fixed.handle(c, r#"{"type":"open"}"#));
    assert_eq!(out[0].1["code"], "rejected");
}

#[test]
fn websocket_round_trip() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let assets = tempfile::tempdir().unwrap();
    std::fs::write(assets.path().join("index.html"), "<html>viewer</html>").unwrap();
    let dir = assets.path().to_path_buf();
    thread::spawn(move || serve(listener, hub(), Some(dir)));

    let (mut writer, _) = tungstenite::connect(format!("ws://{addr}")).unwrap();
    let (mut viewer, _) = tungstenite::connect(format!("ws://{addr}")).unwrap();
    let recv = |ws: &mut tungstenite::WebSocket<_>| -> Value {
        loop {
            if let tungstenite::Message::Text(t) = ws.read().unwrap() {
                return serde_json::from_str(t.as_str()).unwrap();
            }
        }
    };
    writer.send(tungstenite::Message::text(r#"{"type":"hello","role":"writer"}"#)).unwrap();
    assert_eq!(recv(&mut writer)["type"], "handshake");
    assert_eq!(recv(&mut writer)["type"], "snapshot");
    viewer.send(tungstenite::Message::text(r#"{"type":"hello","role":"viewer"}"#)).unwrap();
    assert_eq!(recv(&mut viewer)["role"], "viewer");
    let snap = recv(&mut viewer);
    let mut scene = parse_scene(&snap["scene"].to_string()).unwrap();

    writer.send(tungstenite::Message::text(r#"{"type":"sk_select","col":1,"row":1,"id":1}"#)).unwrap();
    let pw = recv(&mut writer);
    let pv = recv(&mut viewer);
    assert_eq!(pw, pv);
    assert_eq!(pv["scene_version"], 1);
    scene = apply_patch(&scene, &parse_patch(&pv["patch"].to_string()).unwrap()).unwrap();
    assert!(scene.walk().any(|n| n.id.starts_with("mdd/glyph/")));

    viewer.send(tungstenite::Message::text("garbage")).unwrap();
    assert_eq!(recv(&mut viewer)["code"], "malformed");

    let mut http = std::net::TcpStream::connect(addr).unwrap();
    http.set_read_timeout(Some(Duration::from_secs(5))).unwrap();
    use std::io::{Read, Write};
    http.write_all(b"GET / HTTP/1.1\r\nHost: x\r\n\r\n").unwrap();
    let mut body = String::new();
    http.read_to_string(&mut body).unwrap();
    assert!(body.starts_with("HTTP/1.1 200"), "{body}");
    assert!(body.ends_with("<html>viewer</html>"));
    let mut http = std::net::TcpStream::connect(addr).unwrap();
    http.write_all(b"GET /../secret HTTP/1.1\r\nHost: x\r\n\r\n").unwrap();
    let mut body = String::new();
    http.read_to_string(&mut body).unwrap();
    assert!(body.starts_with("HTTP/1.1 404"), "{body}");
}
