//! `marv-wire/1`: JSON text frames over WebSocket.
//!
//! WebSocket messages are the length-delimited frames; each carries one JSON
//! object with a `type` field. Client requests:
//!
//! | type | fields |
//! |---|---|
//! | `hello` | `role`: `viewer` or `writer` |
//! | `open` | none; reloads the served study |
//! | `set_representation` | `chart_id`, `representation` (`mdd` or `tet`) |
//! | `extract_chrono` | `attribute` |
//! | `dismiss_chrono` | `chart_id` |
//! | `click_chrono_quad` | `chart_id`, `bin_index`, `time_pair`, optional `dim_others` |
//! | `sk_select` | `col`, `row` |
//!
//! Any request may carry an `id`, echoed as `request_id`. Server frames are
//! `handshake`, `snapshot`, `patch` and `error`; every one carries
//! `protocol` and `scene_version`. `hello` is answered with a handshake
//! (view-angle constants, palette, schema tags) followed by a full snapshot.
//! Only the single writer may send mutating requests; their patches are
//! broadcast to every greeted client in version order. A rejected request
//! yields an error frame to its sender and changes nothing.

use std::collections::BTreeMap;
use std::io::{self, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Component, Path, PathBuf};
use std::sync::mpsc::{self, Receiver, Sender};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use marv_core::scene::{ScenePatch, SCENE_SCHEMA};
use marv_core::session::{Mutation, Session};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::codec::{from_value_with_path, to_canonical_string, SceneDocument};
use crate::palette_file::PaletteFile;

pub const PROTOCOL: &str = "marv-wire/1";

/// View-angle contract for the MDD/TET switch, degrees between the view
/// direction and the chart's +y axis: enter TET below `enter`, leave above `exit`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionConstants {
    pub tet_enter_degrees: f64,
    pub tet_exit_degrees: f64,
}

pub const TRANSITION: TransitionConstants = TransitionConstants {
    tet_enter_degrees: 30.0,
    tet_exit_degrees: 35.0,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Viewer,
    Writer,
}

#[derive(Deserialize)]
struct Hello {
    role: Role,
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum ServerFrame<'a> {
    Handshake {
        protocol: &'static str,
        scene_version: u64,
        role: Role,
        scene_schema: &'static str,
        constants: TransitionConstants,
        palette: &'a PaletteFile,
    },
    Snapshot {
        protocol: &'static str,
        scene_version: u64,
        scene: SceneDocument<'a>,
    },
    Patch {
        protocol: &'static str,
        scene_version: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        request_id: Option<&'a Value>,
        patch: &'a ScenePatch,
    },
    Error {
        protocol: &'static str,
        scene_version: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        request_id: Option<&'a Value>,
        code: &'static str,
        message: String,
    },
}

pub type ClientId = u64;

/// Rebuilds the session for an `open` request.
pub type Reopen = Box<dyn FnMut() -> Result<Session, String> + Send>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivery {
    pub to: ClientId,
    pub text: Arc<str>,
}

/// Transport-independent protocol state: the session plus connected clients.
pub struct Hub {
    session: Session,
    reopen: Option<Reopen>,
    /// Version offset of the current session, bumped by `open`.
    base_version: u64,
    clients: BTreeMap<ClientId, Option<Role>>,
    writer: Option<ClientId>,
    next_client: ClientId,
    palette: PaletteFile,
}

impl Hub {
    pub fn new(session: Session, reopen: Option<Reopen>) -> Self {
        Self {
            session,
            reopen,
            base_version: 0,
            clients: BTreeMap::new(),
            writer: None,
            next_client: 1,
            palette: PaletteFile::current(),
        }
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    pub fn scene_version(&self) -> u64 {
        self.base_version + self.session.version()
    }

    pub fn writer(&self) -> Option<ClientId> {
        self.writer
    }

    pub fn connect(&mut self) -> ClientId {
        let id = self.next_client;
        self.next_client += 1;
        self.clients.insert(id, None);
        id
    }

    pub fn disconnect(&mut self, id: ClientId) {
        self.clients.remove(&id);
        if self.writer == Some(id) {
            self.writer = None;
        }
    }

    fn frame(&self, f: &ServerFrame<'_>) -> Arc<str> {
        Arc::from(to_canonical_string(f))
    }

    fn error(&self, to: ClientId, request_id: Option<&Value>, code: &'static str, message: String) -> Delivery {
        Delivery {
            to,
            text: self.frame(&ServerFrame::Error {
                protocol: PROTOCOL,
                scene_version: self.scene_version(),
                request_id,
                code,
                message,
            }),
        }
    }

    pub fn snapshot_frame(&self) -> Arc<str> {
        self.frame(&ServerFrame::Snapshot {
            protocol: PROTOCOL,
            scene_version: self.scene_version(),
            scene: SceneDocument::new(self.session.scene()),
        })
    }

    fn greeted(&self) -> impl Iterator<Item = ClientId> + '_ {
        self.clients.iter().filter(|(_, r)| r.is_some()).map(|(id, _)| *id)
    }

    fn broadcast(&self, text: Arc<str>) -> Vec<Delivery> {
        self.greeted()
            .map(|to| Delivery {
                to,
                text: text.clone(),
            })
            .collect()
    }

    /// Handles one text frame from `from`; returns the frames to deliver, in order.
    pub fn handle(&mut self, from: ClientId, text: &str) -> Vec<Delivery> {
        if !self.clients.contains_key(&from) {
            return Vec::new();
        }
        let request: Value = match serde_json::from_str(text) {
            Ok(v @ Value::Object(_)) => v,
            Ok(_) => return vec![self.error(from, None, "malformed", "request must be a JSON object".into())],
            Err(e) => return vec![self.error(from, None, "malformed", e.to_string())],
        };
        let id = request.get("id").cloned();
        let id = id.as_ref();
        let Some(kind) = request.get("type").and_then(Value::as_str).map(str::to_string) else {
            return vec![self.error(from, id, "malformed", "missing string field `type`".into())];
        };
        if kind == "hello" {
            return self.hello(from, id, request);
        }
        let Some(role) = self.clients[&from] else {
            return vec![self.error(from, id, "hello_required", "send hello first".into())];
        };
        if role != Role::Writer {
            return vec![self.error(from, id, "not_writer", format!("`{kind}` needs the writer role"))];
        }
        if kind == "open" {
            return self.open(from, id);
        }
        let mutation: Mutation = match from_value_with_path(request) {
            Ok(m) => m,
            Err(e) => return vec![self.error(from, id, "malformed", e.to_string())],
        };
        match self.session.apply(&mutation) {
            Ok(patch) => {
                let text = self.frame(&ServerFrame::Patch {
                    protocol: PROTOCOL,
                    scene_version: self.scene_version(),
                    request_id: id,
                    patch: &patch,
                });
                self.broadcast(text)
            }
            Err(e) => vec![self.error(from, id, "rejected", e.to_string())],
        }
    }

    fn hello(&mut self, from: ClientId, id: Option<&Value>, request: Value) -> Vec<Delivery> {
        let hello: Hello = match from_value_with_path(request) {
            Ok(h) => h,
            Err(e) => return vec![self.error(from, id, "malformed", e.to_string())],
        };
        let mut out = Vec::new();
        let mut role = hello.role;
        if role == Role::Writer {
            match self.writer {
                Some(w) if w != from => {
                    out.push(self.error(from, id, "writer_taken", format!("client {w} holds the writer role")));
                    role = Role::Viewer;
                }
                _ => self.writer = Some(from),
            }
        } else if self.writer == Some(from) {
            self.writer = None;
        }
        self.clients.insert(from, Some(role));
        let handshake = self.frame(&ServerFrame::Handshake {
            protocol: PROTOCOL,
            scene_version: self.scene_version(),
            role,
            scene_schema: SCENE_SCHEMA,
            constants: TRANSITION,
            palette: &self.palette,
        });
        out.push(Delivery { to: from, text: handshake });
        out.push(Delivery {
            to: from,
            text: self.snapshot_frame(),
        });
        out
    }

    fn open(&mut self, from: ClientId, id: Option<&Value>) -> Vec<Delivery> {
        let Some(reopen) = self.reopen.as_mut() else {
            return vec![self.error(from, id, "rejected", "this server cannot reopen its study".into())];
        };
        match reopen() {
            Ok(session) => {
                self.base_version = self.scene_version() + 1;
                self.session = session;
                self.broadcast(self.snapshot_frame())
            }
            Err(message) => vec![self.error(from, id, "rejected", message)],
        }
    }
}

enum Event {
    Connect(Sender<Arc<str>>, Sender<ClientId>),
    Message(ClientId, String),
    Disconnect(ClientId),
}

fn engine(mut hub: Hub, events: Receiver<Event>) {
    let mut outboxes: BTreeMap<ClientId, Sender<Arc<str>>> = BTreeMap::new();
    for ev in events {
        match ev {
            Event::Connect(outbox, reply) => {
                let id = hub.connect();
                outboxes.insert(id, outbox);
                let _ = reply.send(id);
            }
            Event::Message(id, text) => {
                for d in hub.handle(id, &text) {
                    if let Some(tx) = outboxes.get(&d.to) {
                        let _ = tx.send(d.text);
                    }
                }
            }
            Event::Disconnect(id) => {
                hub.disconnect(id);
                outboxes.remove(&id);
            }
        }
    }
}

/// Runs the service on `listener` until the process ends. Plain HTTP
/// requests are answered from `assets` when given.
pub fn serve(listener: TcpListener, hub: Hub, assets: Option<PathBuf>) -> io::Result<()> {
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || engine(hub, rx));
    let assets = assets.map(Arc::new);
    for stream in listener.incoming() {
        let stream = match stream {
            Ok(s) => s,
            Err(e) => {
                eprintln!("accept failed: {e}");
                continue;
            }
        };
        let tx = tx.clone();
        let assets = assets.clone();
        thread::spawn(move || {
            if let Err(e) = connection(stream, tx, assets.as_deref().map(PathBuf::as_path)) {
                eprintln!("connection closed: {e}");
            }
        });
    }
    Ok(())
}

fn is_websocket_upgrade(stream: &TcpStream) -> io::Result<bool> {
    let mut buf = [0u8; 4096];
    stream.set_read_timeout(Some(Duration::from_secs(5)))?;
    for _ in 0..50 {
        let n = stream.peek(&mut buf)?;
        let head = String::from_utf8_lossy(&buf[..n]).to_ascii_lowercase();
        if head.contains("\r\n\r\n") || n == buf.len() {
            return Ok(head.contains("upgrade: websocket"));
        }
        if n == 0 {
            return Ok(false);
        }
        thread::sleep(Duration::from_millis(10));
    }
    Ok(false)
}

fn connection(mut stream: TcpStream, events: Sender<Event>, assets: Option<&Path>) -> io::Result<()> {
    if !is_websocket_upgrade(&stream)? {
        return serve_static(&mut stream, assets);
    }
    stream.set_read_timeout(None)?;
    let mut ws = tungstenite::accept(stream.try_clone()?).map_err(|e| io::Error::other(e.to_string()))?;
    let (out_tx, out_rx) = mpsc::channel::<Arc<str>>();
    let (id_tx, id_rx) = mpsc::channel();
    events
        .send(Event::Connect(out_tx, id_tx))
        .map_err(|_| io::Error::other("engine stopped"))?;
    let id = id_rx.recv().map_err(|_| io::Error::other("engine stopped"))?;
    stream.set_read_timeout(Some(Duration::from_millis(20)))?;
    let result = (|| -> io::Result<()> {
        loop {
            match ws.read() {
                Ok(tungstenite::Message::Text(t)) => {
                    events
                        .send(Event::Message(id, t.as_str().to_string()))
                        .map_err(|_| io::Error::other("engine stopped"))?;
                }
                Ok(tungstenite::Message::Close(_)) => return Ok(()),
                Ok(_) => {}
                Err(tungstenite::Error::Io(e)) if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => {}
                Err(tungstenite::Error::ConnectionClosed | tungstenite::Error::AlreadyClosed) => return Ok(()),
                Err(e) => return Err(io::Error::other(e.to_string())),
            }
            while let Ok(text) = out_rx.try_recv() {
                ws.send(tungstenite::Message::text(text.as_ref()))
                    .map_err(|e| io::Error::other(e.to_string()))?;
            }
        }
    })();
    let _ = events.send(Event::Disconnect(id));
    result
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript",
        Some("css") => "text/css",
        Some("json") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        _ => "application/octet-stream",
    }
}

fn serve_static(stream: &mut TcpStream, assets: Option<&Path>) -> io::Result<()> {
    let mut buf = [0u8; 4096];
    let n = stream.read(&mut buf)?;
    let head = String::from_utf8_lossy(&buf[..n]);
    let target = head.split_whitespace().nth(1).unwrap_or("/");
    let target = target.split('?').next().unwrap_or("/");
    let rel = Path::new(target.trim_start_matches('/'));
    let safe = rel.components().all(|c| matches!(c, Component::Normal(_)));
    let file = match assets {
        Some(root) if safe => {
            let p = if rel.as_os_str().is_empty() { root.join("index.html") } else { root.join(rel) };
            std::fs::read(&p).ok().map(|body| (p, body))
        }
        _ => None,
    };
    match file {
        Some((p, body)) => {
            write!(
                stream,
                "HTTP/1.1 200 OK\r\nContent-Type: {}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
                content_type(&p),
                body.len()
            )?;
            stream.write_all(&body)
        }
        None => {
            let body = format!("{PROTOCOL} endpoint: connect with a WebSocket client\n");
            write!(
                stream,
                "HTTP/1.1 404 Not Found\r\nContent-Type: text/plain\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
        }
    }
}
