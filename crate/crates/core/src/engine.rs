//! Dwell-selection state machine and the text buffer it writes into.
//!
//! A [`Session`] consumes timestamped cursor samples and emits
//! [`SessionEvent`]s. Dwell time accumulates only while consecutive samples
//! stay inside the same key; leaving the key resets the timer completely.
//! One full dwell commits the letter; staying for a second dwell accepts the
//! word prediction shown on that key. To type the same letter twice the
//! cursor has to leave the key and come back.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{NgramModel, Prediction};
use crate::geometry::{Point, Rect};
use crate::layout::{CornerKind, KeyRegion, Keyboard, LayoutState, Target};
use crate::merge::merged_layout;

/// Slack for comparing accumulated dwell time against the dwell period,
/// absorbing float error from 60 Hz timestamps.
const DWELL_EPS_MS: f64 = 1e-6;

pub const DEFAULT_DWELL_MS: f64 = 1000.0;

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("sample time {got} ms is not after the previous sample at {prev} ms")]
    NonMonotonic { prev: f64, got: f64 },
    #[error("dwell period must be positive, got {0} ms")]
    BadDwell(f64),
    #[error("sample coordinates must be finite")]
    BadSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Merging,
    NonMerging,
}

impl Mode {
    pub fn toggled(self) -> Mode {
        match self {
            Mode::Merging => Mode::NonMerging,
            Mode::NonMerging => Mode::Merging,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionConfig {
    pub dwell_ms: f64,
    pub mode: Mode,
    /// Add committed words to the model while in non-merging mode.
    pub learn: bool,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            dwell_ms: DEFAULT_DWELL_MS,
            mode: Mode::Merging,
            learn: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DwellState {
    Idle,
    FirstDwell {
        key: Target,
        elapsed_ms: f64,
        proposed: Option<Prediction>,
    },
    /// Letter already committed; completing this dwell accepts `proposed`.
    SecondDwell {
        key: char,
        elapsed_ms: f64,
        proposed: Prediction,
    },
    /// Nothing more can happen on `key` until the cursor leaves it.
    MustExit { key: Target },
}

impl DwellState {
    pub fn key(&self) -> Option<Target> {
        match self {
            DwellState::Idle => None,
            DwellState::FirstDwell { key, .. } | DwellState::MustExit { key } => Some(*key),
            DwellState::SecondDwell { key, .. } => Some(Target::Key(*key)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SessionEvent {
    KeyEnter {
        target: Target,
        prediction: Option<Prediction>,
    },
    KeyExit {
        target: Target,
    },
    DwellProgress {
        target: Target,
        phase: Phase,
        fraction: f64,
    },
    CharCommitted {
        letter: char,
    },
    /// `appended` is what the buffer gained: the rest of the word and a space.
    WordCommitted {
        word: String,
        appended: String,
    },
    SpaceCommitted,
    Deleted {
        removed: char,
    },
    ModeChanged {
        mode: Mode,
    },
    LayoutChanged {
        layout: LayoutState,
    },
    BufferChanged {
        text: String,
    },
}

/// Shape being dwelt on, frozen at entry so that a layout change at a commit
/// cannot move the key out from under the cursor.
#[derive(Debug, Clone)]
enum Held {
    Key(KeyRegion),
    Corner(Rect),
}

impl Held {
    fn contains(&self, p: Point) -> bool {
        match self {
            Held::Key(k) => k.contains(p),
            Held::Corner(r) => r.contains(p),
        }
    }
}

/// One typing session. Not shared between threads; the model is a snapshot
/// that is copied on first write.
#[derive(Debug, Clone)]
pub struct Session {
    model: Arc<NgramModel>,
    keyboard: Keyboard,
    config: SessionConfig,
    pending: Option<SessionConfig>,
    buffer: String,
    prefix: String,
    prev_word: Option<String>,
    layout: LayoutState,
    state: DwellState,
    held: Option<Held>,
    last_t: Option<f64>,
}

impl Session {
    pub fn new(
        model: Arc<NgramModel>,
        keyboard: Keyboard,
        config: SessionConfig,
    ) -> Result<Self, EngineError> {
        check_config(&config)?;
        let mut s = Session {
            layout: keyboard.default_layout(),
            model,
            keyboard,
            config,
            pending: None,
            buffer: String::new(),
            prefix: String::new(),
            prev_word: None,
            state: DwellState::Idle,
            held: None,
            last_t: None,
        };
        s.layout = s.compute_layout();
        Ok(s)
    }

    pub fn transcribe(&self) -> &str {
        &self.buffer
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn prev_word(&self) -> Option<&str> {
        self.prev_word.as_deref()
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn layout(&self) -> &LayoutState {
        &self.layout
    }

    pub fn state(&self) -> &DwellState {
        &self.state
    }

    /// Whether `p` lies in the region being dwelt on. The region is fixed
    /// when the key is entered, so it can differ from the current layout.
    pub fn holds(&self, p: Point) -> bool {
        self.held.as_ref().is_some_and(|h| h.contains(p))
    }

    pub fn model(&self) -> &NgramModel {
        &self.model
    }

    pub fn keyboard(&self) -> &Keyboard {
        &self.keyboard
    }

    /// Clears text and dwell state; keeps config and any learned words.
    pub fn reset(&mut self) -> Vec<SessionEvent> {
        self.buffer.clear();
        self.prefix.clear();
        self.prev_word = None;
        self.state = DwellState::Idle;
        self.held = None;
        self.last_t = None;
        self.layout = self.compute_layout();
        vec![
            SessionEvent::BufferChanged {
                text: String::new(),
            },
            self.layout_event(),
        ]
    }

    /// Queues a config change. It applies at once when idle, otherwise at
    /// the next return to idle.
    pub fn set_config(&mut self, config: SessionConfig) -> Result<Vec<SessionEvent>, EngineError> {
        check_config(&config)?;
        self.pending = Some(config);
        if self.state == DwellState::Idle {
            Ok(self.apply_pending())
        } else {
            Ok(Vec::new())
        }
    }

    /// Swaps the language model, keeping the text typed so far. Only
    /// valid while idle; returns `None` otherwise.
    pub fn set_model(&mut self, model: Arc<NgramModel>) -> Option<Vec<SessionEvent>> {
        if self.state != DwellState::Idle {
            return None;
        }
        self.model = model;
        self.layout = self.compute_layout();
        Some(vec![self.layout_event()])
    }

    /// Advances the state machine by one cursor sample.
    pub fn feed_sample(&mut self, t_ms: f64, p: Point) -> Result<Vec<SessionEvent>, EngineError> {
        if !(t_ms.is_finite() && p.x.is_finite() && p.y.is_finite()) {
            return Err(EngineError::BadSample);
        }
        let dt = match self.last_t {
            Some(prev) if t_ms <= prev => return Err(EngineError::NonMonotonic { prev, got: t_ms }),
            Some(prev) => t_ms - prev,
            None => 0.0,
        };
        self.last_t = Some(t_ms);

        let mut events = Vec::new();
        let inside = self.held.as_ref().is_some_and(|h| h.contains(p));
        match self.state.clone() {
            DwellState::Idle => {}
            DwellState::FirstDwell {
                key,
                elapsed_ms,
                proposed,
            } if inside => {
                let elapsed_ms = elapsed_ms + dt;
                if elapsed_ms + DWELL_EPS_MS >= self.config.dwell_ms {
                    events.push(progress(key, Phase::First, 1.0));
                    self.complete_first(key, &mut events);
                } else {
                    events.push(progress(key, Phase::First, elapsed_ms / self.config.dwell_ms));
                    self.state = DwellState::FirstDwell {
                        key,
                        elapsed_ms,
                        proposed,
                    };
                }
                return Ok(events);
            }
            DwellState::SecondDwell {
                key,
                elapsed_ms,
                proposed,
            } if inside => {
                let elapsed_ms = elapsed_ms + dt;
                let target = Target::Key(key);
                if elapsed_ms + DWELL_EPS_MS >= self.config.dwell_ms {
                    events.push(progress(target, Phase::Second, 1.0));
                    self.commit_word(key, proposed, &mut events);
                } else {
                    events.push(progress(target, Phase::Second, elapsed_ms / self.config.dwell_ms));
                    self.state = DwellState::SecondDwell {
                        key,
                        elapsed_ms,
                        proposed,
                    };
                }
                return Ok(events);
            }
            DwellState::MustExit { .. } if inside => return Ok(events),
            other => {
                let target = other.key().expect("non-idle state has a key");
                events.push(SessionEvent::KeyExit { target });
                self.state = DwellState::Idle;
                self.held = None;
            }
        }

        events.extend(self.apply_pending());
        self.enter(p, &mut events);
        Ok(events)
    }

    fn enter(&mut self, p: Point, events: &mut Vec<SessionEvent>) {
        match self.layout.hit_test(p) {
            Some(Target::Key(c)) => {
                let key = self.layout.key(c).expect("hit key exists").clone();
                let mut word = self.prefix.clone();
                word.push(c);
                let proposed = self.model.predict(self.prev_word.as_deref(), &word);
                let target = Target::Key(c);
                events.push(SessionEvent::KeyEnter {
                    target,
                    prediction: proposed.clone(),
                });
                self.held = Some(Held::Key(key));
                self.state = DwellState::FirstDwell {
                    key: target,
                    elapsed_ms: 0.0,
                    proposed,
                };
            }
            Some(Target::Corner(kind)) if kind.selectable() => {
                let target = Target::Corner(kind);
                events.push(SessionEvent::KeyEnter {
                    target,
                    prediction: None,
                });
                self.held = Some(Held::Corner(self.layout.corner(kind).rect));
                self.state = DwellState::FirstDwell {
                    key: target,
                    elapsed_ms: 0.0,
                    proposed: None,
                };
            }
            _ => {}
        }
    }

    fn complete_first(&mut self, key: Target, events: &mut Vec<SessionEvent>) {
        match key {
            Target::Key(c) => {
                self.buffer.push(c);
                self.prefix.push(c);
                events.push(SessionEvent::CharCommitted { letter: c });
                events.push(self.buffer_event());
                self.layout = self.compute_layout();
                events.push(self.layout_event());
                match self.model.predict(self.prev_word.as_deref(), &self.prefix) {
                    Some(proposed) => {
                        events.push(progress(key, Phase::Second, 0.0));
                        self.state = DwellState::SecondDwell {
                            key: c,
                            elapsed_ms: 0.0,
                            proposed,
                        };
                    }
                    None => self.state = DwellState::MustExit { key },
                }
            }
            Target::Corner(kind) => {
                self.corner_action(kind, events);
                self.state = DwellState::MustExit { key };
            }
        }
    }

    fn commit_word(&mut self, key: char, proposed: Prediction, events: &mut Vec<SessionEvent>) {
        let word = proposed.word;
        debug_assert!(word.starts_with(&self.prefix));
        let mut appended = word[self.prefix.len()..].to_string();
        appended.push(' ');
        self.buffer.push_str(&appended);
        self.learn(&word);
        events.push(SessionEvent::WordCommitted { word, appended });
        events.push(self.buffer_event());
        self.sync_context();
        self.layout = self.compute_layout();
        events.push(self.layout_event());
        self.state = DwellState::MustExit {
            key: Target::Key(key),
        };
    }

    /// Applies a completed dwell on a corner key.
    pub fn corner_action(&mut self, kind: CornerKind, events: &mut Vec<SessionEvent>) {
        match kind {
            CornerKind::Space => {
                if !self.prefix.is_empty() {
                    let word = self.prefix.clone();
                    self.learn(&word);
                }
                self.buffer.push(' ');
                events.push(SessionEvent::SpaceCommitted);
                events.push(self.buffer_event());
            }
            CornerKind::Delete => match self.buffer.pop() {
                Some(removed) => {
                    events.push(SessionEvent::Deleted { removed });
                    events.push(self.buffer_event());
                }
                None => {
                    events.push(self.buffer_event());
                    return;
                }
            },
            CornerKind::Mode => {
                self.config.mode = self.config.mode.toggled();
                events.push(SessionEvent::ModeChanged {
                    mode: self.config.mode,
                });
            }
            CornerKind::Status => return,
        }
        self.sync_context();
        self.layout = self.compute_layout();
        events.push(self.layout_event());
    }

    fn learn(&mut self, word: &str) {
        if self.config.mode == Mode::NonMerging && self.config.learn {
            // Buffer words are always a-z.
            let _ = Arc::make_mut(&mut self.model).learn_word(word);
        }
    }

    /// Re-derives prefix and previous word from the buffer.
    fn sync_context(&mut self) {
        let (prev, prefix) = context_of(&self.buffer);
        self.prev_word = prev.map(str::to_string);
        self.prefix = prefix.to_string();
    }

    fn compute_layout(&self) -> LayoutState {
        match self.config.mode {
            Mode::Merging => merged_layout(
                &self.model,
                &self.keyboard,
                self.prev_word.as_deref(),
                &self.prefix,
            ),
            Mode::NonMerging => {
                let mut l = self.keyboard.default_layout();
                l.prefix = self.prefix.clone();
                l
            }
        }
    }

    fn apply_pending(&mut self) -> Vec<SessionEvent> {
        let Some(cfg) = self.pending.take() else {
            return Vec::new();
        };
        let mode_changed = cfg.mode != self.config.mode;
        self.config = cfg;
        if !mode_changed {
            return Vec::new();
        }
        self.layout = self.compute_layout();
        vec![
            SessionEvent::ModeChanged {
                mode: self.config.mode,
            },
            self.layout_event(),
        ]
    }

    fn buffer_event(&self) -> SessionEvent {
        SessionEvent::BufferChanged {
            text: self.buffer.clone(),
        }
    }

    fn layout_event(&self) -> SessionEvent {
        SessionEvent::LayoutChanged {
            layout: self.layout.clone(),
        }
    }
}

fn check_config(config: &SessionConfig) -> Result<(), EngineError> {
    if config.dwell_ms > 0.0 && config.dwell_ms.is_finite() {
        Ok(())
    } else {
        Err(EngineError::BadDwell(config.dwell_ms))
    }
}

fn progress(target: Target, phase: Phase, fraction: f64) -> SessionEvent {
    SessionEvent::DwellProgress {
        target,
        phase,
        fraction: fraction.clamp(0.0, 1.0),
    }
}

/// Splits a buffer into (previous word, current prefix).
pub fn context_of(buffer: &str) -> (Option<&str>, &str) {
    let (head, prefix) = match buffer.rfind(' ') {
        Some(i) => (&buffer[..i], &buffer[i + 1..]),
        None => ("", buffer),
    };
    let prev = head.split(' ').rev().find(|w| !w.is_empty());
    (prev, prefix)
}
