//! Wire protocol for driving a session from a remote client.
//!
//! Messages are JSON objects with a `type` field, one per line or frame.
//! The transport is up to the caller; [`LiveSession::handle`] turns one
//! inbound message into the outbound ones, in engine-event order.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::NgramModel;
use crate::engine::{EngineError, Mode, Phase, Session, SessionConfig, SessionEvent};
use crate::geometry::Point;
use crate::layout::{Blank, Corner, KeyRegion, Keyboard, Target};

/// Dwell progress is forwarded at most this often per key.
pub const MAX_DWELL_MESSAGES_PER_SEC: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Pointer {
        t_ms: f64,
        x: f64,
        y: f64,
    },
    Config {
        #[serde(default)]
        dwell_ms: Option<f64>,
        #[serde(default)]
        mode: Option<Mode>,
        #[serde(default)]
        corpus_id: Option<String>,
    },
    Reset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CommitKind {
    Char,
    Word,
    Space,
    Delete,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Layout {
        keys: Vec<KeyRegion>,
        corners: Vec<Corner>,
        blanks: Vec<Blank>,
        prefix: String,
        mode: Mode,
    },
    Dwell {
        /// A letter, or the name of a corner key.
        letter: String,
        phase: Phase,
        fraction: f64,
        /// The word offered inside the dwelt key, if any.
        prediction: Option<String>,
    },
    /// The cursor left a key, resetting its dwell.
    Exit { letter: String },
    Commit { kind: CommitKind, text: String },
    Buffer { text: String },
    Mode { mode: Mode },
    Error { code: ErrorCode, detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadJson,
    BadType,
    BadField,
    BadTimestamp,
    BadCorpus,
}

impl ServerMessage {
    fn error(code: ErrorCode, detail: impl Into<String>) -> Self {
        ServerMessage::Error {
            code,
            detail: detail.into(),
        }
    }

    pub fn to_json_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("server messages serialize");
        s.push('\n');
        s
    }
}

fn target_name(t: Target) -> String {
    match t {
        Target::Key(c) => c.to_string(),
        Target::Corner(k) => k.name().to_string(),
    }
}

/// Shared, read-only service state: keyboard geometry, defaults and the
/// corpora a client may select by id.
#[derive(Debug, Clone)]
pub struct SessionService {
    keyboard: Keyboard,
    defaults: SessionConfig,
    corpora: BTreeMap<String, Arc<NgramModel>>,
    default_corpus: String,
    next_id: Arc<AtomicU64>,
}

impl SessionService {
    pub fn new(keyboard: Keyboard, defaults: SessionConfig, corpus_id: &str, model: Arc<NgramModel>) -> Self {
        SessionService {
            keyboard,
            defaults,
            corpora: BTreeMap::from([(corpus_id.to_string(), model)]),
            default_corpus: corpus_id.to_string(),
            next_id: Arc::new(AtomicU64::new(1)),
        }
    }

    /// Default keyboard, bundled corpus under the id `"bundled"`.
    pub fn bundled() -> Self {
        Self::new(
            Keyboard::default(),
            SessionConfig::default(),
            "bundled",
            NgramModel::bundled(),
        )
    }

    pub fn add_corpus(&mut self, id: &str, model: Arc<NgramModel>) {
        self.corpora.insert(id.to_string(), model);
    }

    pub fn corpus_ids(&self) -> impl Iterator<Item = &str> {
        self.corpora.keys().map(String::as_str)
    }

    /// Starts a session. The returned messages (layout, buffer) should be
    /// sent to the client first.
    pub fn open_session(&self) -> Result<(LiveSession, Vec<ServerMessage>), EngineError> {
        let model = self.corpora[&self.default_corpus].clone();
        let session = Session::new(model, self.keyboard.clone(), self.defaults)?;
        let mut live = LiveSession {
            id: self.next_id.fetch_add(1, Ordering::Relaxed),
            service: self.clone(),
            session,
            pending_model: None,
            last_dwell: None,
        };
        let greeting = vec![live.layout_message(), live.buffer_message()];
        live.last_dwell = None;
        Ok((live, greeting))
    }

    pub fn close(&self, session: LiveSession) {
        drop(session);
    }
}

/// One client's session. Owned by its connection.
#[derive(Debug)]
pub struct LiveSession {
    id: u64,
    service: SessionService,
    session: Session,
    pending_model: Option<Arc<NgramModel>>,
    /// Key and time of the last forwarded dwell message.
    last_dwell: Option<(Target, f64)>,
}

impl LiveSession {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    /// Parses and applies one raw client message.
    pub fn handle_text(&mut self, raw: &str) -> Vec<ServerMessage> {
        let value: serde_json::Value = match serde_json::from_str(raw) {
            Ok(v) => v,
            Err(e) => return vec![ServerMessage::error(ErrorCode::BadJson, e.to_string())],
        };
        let known = matches!(
            value.get("type").and_then(|t| t.as_str()),
            Some("pointer" | "config" | "reset")
        );
        if !known {
            let detail = match value.get("type") {
                Some(t) => format!("unknown message type {t}"),
                None => "missing \"type\"".to_string(),
            };
            return vec![ServerMessage::error(ErrorCode::BadType, detail)];
        }
        match serde_json::from_value::<ClientMessage>(value) {
            Ok(msg) => self.handle(msg),
            Err(e) => vec![ServerMessage::error(ErrorCode::BadField, e.to_string())],
        }
    }

    pub fn handle(&mut self, msg: ClientMessage) -> Vec<ServerMessage> {
        match msg {
            ClientMessage::Pointer { t_ms, x, y } => {
                let events = match self.session.feed_sample(t_ms, Point::new(x, y)) {
                    Ok(events) => events,
                    Err(e @ EngineError::NonMonotonic { .. }) => {
                        return vec![ServerMessage::error(ErrorCode::BadTimestamp, e.to_string())]
                    }
                    Err(e) => return vec![ServerMessage::error(ErrorCode::BadField, e.to_string())],
                };
                let mut out = self.translate(t_ms, events);
                out.extend(self.apply_pending_model());
                out
            }
            ClientMessage::Config {
                dwell_ms,
                mode,
                corpus_id,
            } => {
                let mut out = Vec::new();
                if let Some(id) = corpus_id {
                    match self.service.corpora.get(&id) {
                        Some(m) => self.pending_model = Some(m.clone()),
                        None => {
                            return vec![ServerMessage::error(
                                ErrorCode::BadCorpus,
                                format!("unknown corpus {id:?}"),
                            )]
                        }
                    }
                }
                let mut cfg = *self.session.config();
                if let Some(d) = dwell_ms {
                    cfg.dwell_ms = d;
                }
                if let Some(m) = mode {
                    cfg.mode = m;
                }
                match self.session.set_config(cfg) {
                    Ok(events) => out.extend(self.translate(f64::NAN, events)),
                    Err(e) => return vec![ServerMessage::error(ErrorCode::BadField, e.to_string())],
                }
                out.extend(self.apply_pending_model());
                out
            }
            ClientMessage::Reset => {
                let events = self.session.reset();
                self.last_dwell = None;
                let mut out = self.translate(f64::NAN, events);
                out.extend(self.apply_pending_model());
                out
            }
        }
    }

    fn apply_pending_model(&mut self) -> Vec<ServerMessage> {
        let Some(model) = self.pending_model.clone() else {
            return Vec::new();
        };
        match self.session.set_model(model) {
            Some(events) => {
                self.pending_model = None;
                self.translate(f64::NAN, events)
            }
            None => Vec::new(),
        }
    }

    fn layout_message(&self) -> ServerMessage {
        let layout = self.session.layout();
        ServerMessage::Layout {
            keys: layout.keys.clone(),
            corners: layout.corners.to_vec(),
            blanks: layout.blanks.clone(),
            prefix: layout.prefix.clone(),
            mode: self.session.mode(),
        }
    }

    fn buffer_message(&self) -> ServerMessage {
        ServerMessage::Buffer {
            text: self.session.transcribe().to_string(),
        }
    }

    fn translate(&mut self, t_ms: f64, events: Vec<SessionEvent>) -> Vec<ServerMessage> {
        let min_gap = 1000.0 / MAX_DWELL_MESSAGES_PER_SEC;
        let mut out = Vec::with_capacity(events.len());
        for event in events {
            let msg = match event {
                SessionEvent::KeyEnter { target, prediction } => {
                    self.last_dwell = Some((target, t_ms));
                    ServerMessage::Dwell {
                        letter: target_name(target),
                        phase: Phase::First,
                        fraction: 0.0,
                        prediction: prediction.map(|p| p.word),
                    }
                }
                SessionEvent::DwellProgress {
                    target,
                    phase,
                    fraction,
                } => {
                    // Phase boundaries always go out; the ramp in between
                    // is thinned.
                    let boundary = fraction == 0.0 || fraction >= 1.0;
                    let recent = match self.last_dwell {
                        Some((k, t)) => k == target && t_ms - t < min_gap,
                        None => false,
                    };
                    if recent && !boundary {
                        continue;
                    }
                    self.last_dwell = Some((target, t_ms));
                    ServerMessage::Dwell {
                        letter: target_name(target),
                        phase,
                        fraction,
                        prediction: self.proposal_for(target, phase),
                    }
                }
                SessionEvent::KeyExit { target } => {
                    self.last_dwell = None;
                    ServerMessage::Exit {
                        letter: target_name(target),
                    }
                }
                SessionEvent::CharCommitted { letter } => ServerMessage::Commit {
                    kind: CommitKind::Char,
                    text: letter.to_string(),
                },
                SessionEvent::WordCommitted { word, .. } => ServerMessage::Commit {
                    kind: CommitKind::Word,
                    text: word,
                },
                SessionEvent::SpaceCommitted => ServerMessage::Commit {
                    kind: CommitKind::Space,
                    text: " ".to_string(),
                },
                SessionEvent::Deleted { removed } => ServerMessage::Commit {
                    kind: CommitKind::Delete,
                    text: removed.to_string(),
                },
                SessionEvent::ModeChanged { mode } => ServerMessage::Mode { mode },
                SessionEvent::LayoutChanged { .. } => self.layout_message(),
                SessionEvent::BufferChanged { text } => ServerMessage::Buffer { text },
            };
            out.push(msg);
        }
        out
    }

    fn proposal_for(&self, target: Target, phase: Phase) -> Option<String> {
        use crate::engine::DwellState;
        match (self.session.state(), phase) {
            (DwellState::FirstDwell { key, proposed, .. }, Phase::First) if *key == target => {
                proposed.as_ref().map(|p| p.word.clone())
            }
            (DwellState::SecondDwell { key, proposed, .. }, Phase::Second)
                if Target::Key(*key) == target =>
            {
                Some(proposed.word.clone())
            }
            _ => None,
        }
    }
}
