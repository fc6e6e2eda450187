#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use slicetype::engine::DwellState;
use slicetype::{CornerKind, Point, Session, SessionEvent, Target};

pub const STEP_MS: f64 = 1000.0 / 60.0;

/// Outside the circle and outside every corner square.
pub const DEAD_ZONE: Point = Point::new(0.8, 0.65);

/// Drives a session with center-to-center samples and keeps the log.
pub struct Driver {
    pub session: Session,
    pub t: f64,
    pub log: Vec<SessionEvent>,
}

impl Driver {
    pub fn new(session: Session) -> Self {
        Driver {
            session,
            t: 0.0,
            log: Vec::new(),
        }
    }

    pub fn sample(&mut self, p: Point) {
        let ev = self.session.feed_sample(self.t, p).unwrap();
        self.log.extend(ev);
        self.t += STEP_MS;
    }

    pub fn center(&self, target: Target) -> Point {
        self.session.layout().target_center(target).unwrap()
    }

    /// Holds the cursor on `p` for `ms` (one sample per step, inclusive of
    /// both ends of the interval).
    pub fn hold(&mut self, p: Point, ms: f64) {
        let end = self.t + ms;
        while self.t <= end + 1e-9 {
            self.sample(p);
        }
    }

    /// One sample in the dead zone, then holds `target` until the engine
    /// reports `dwells` completed dwell periods on it.
    pub fn dwell(&mut self, target: Target, dwells: usize) {
        self.sample(DEAD_ZONE);
        let p = self.center(target);
        let mut done = 0;
        let start = self.log.len();
        while done < dwells {
            self.sample(p);
            done = self.log[start..]
                .iter()
                .filter(|e| {
                    matches!(
                        e,
                        SessionEvent::CharCommitted { .. }
                            | SessionEvent::WordCommitted { .. }
                            | SessionEvent::SpaceCommitted
                            | SessionEvent::Deleted { .. }
                            | SessionEvent::ModeChanged { .. }
                    ) || matches!(e, SessionEvent::BufferChanged { text } if text.is_empty())
                })
                .count();
            assert!(self.t < 1e7, "no commit on {target}");
        }
    }

    pub fn letter(&mut self, c: char) {
        self.dwell(Target::Key(c), 1);
    }

    pub fn word_via(&mut self, c: char) {
        self.dwell(Target::Key(c), 2);
    }

    pub fn corner(&mut self, kind: CornerKind) {
        self.dwell(Target::Corner(kind), 1);
    }

    pub fn state(&self) -> &DwellState {
        self.session.state()
    }
}

/// The log without dwell progress and layout payloads, one short token per
/// event.
pub fn summary(events: &[SessionEvent]) -> Vec<String> {
    events
        .iter()
        .filter_map(|e| {
            Some(match e {
                SessionEvent::KeyEnter { target, .. } => format!("enter:{target}"),
                SessionEvent::KeyExit { target } => format!("exit:{target}"),
                SessionEvent::DwellProgress { .. } => return None,
                SessionEvent::CharCommitted { letter } => format!("char:{letter}"),
                SessionEvent::WordCommitted { word, .. } => format!("word:{word}"),
                SessionEvent::SpaceCommitted => "space".to_string(),
                SessionEvent::Deleted { removed } => format!("delete:{removed}"),
                SessionEvent::ModeChanged { mode } => format!("mode:{mode:?}"),
                SessionEvent::LayoutChanged { .. } => "layout".to_string(),
                SessionEvent::BufferChanged { text } => format!("buffer:{text}"),
            })
        })
        .collect()
}

/// Rebuilds the buffer from commit events alone.
pub fn rebuild_buffer(events: &[SessionEvent]) -> String {
    let mut text = String::new();
    for e in events {
        match e {
            SessionEvent::CharCommitted { letter } => text.push(*letter),
            SessionEvent::WordCommitted { appended, .. } => text.push_str(appended),
            SessionEvent::SpaceCommitted => text.push(' '),
            SessionEvent::Deleted { .. } => {
                text.pop();
            }
            _ => {}
        }
    }
    text
}

/// Corpus read straight from the data files, for scan-based oracles.
pub struct RawCorpus {
    pub unigrams: BTreeMap<String, u64>,
    pub bigrams: BTreeMap<String, BTreeMap<String, u64>>,
}

impl RawCorpus {
    pub fn bundled() -> Self {
        let mut unigrams = BTreeMap::new();
        for line in include_str!("../../data/unigrams.tsv").lines() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (w, c) = line.split_once('\t').unwrap();
            *unigrams.entry(w.to_string()).or_insert(0) += c.trim().parse::<u64>().unwrap();
        }
        let mut bigrams: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        for line in include_str!("../../data/bigrams.tsv").lines() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let c: u64 = f[2].trim().parse().unwrap();
            *bigrams
                .entry(f[0].to_string())
                .or_default()
                .entry(f[1].to_string())
                .or_insert(0) += c;
            unigrams.entry(f[1].to_string()).or_insert(1);
        }
        RawCorpus { unigrams, bigrams }
    }

    /// Entries from `prefix` onwards in sorted order, stopping at the first
    /// key that no longer starts with it.
    fn range<'a>(
        map: &'a BTreeMap<String, u64>,
        prefix: &'a str,
    ) -> impl Iterator<Item = (&'a String, &'a u64)> + 'a {
        map.range(prefix.to_string()..).take_while(move |(w, _)| w.starts_with(prefix))
    }

    fn best<'a>(words: impl Iterator<Item = (&'a String, &'a u64)>, prefix: &str) -> Option<(String, u64)> {
        let mut best: Option<(&String, u64)> = None;
        for (w, &c) in words {
            if !w.starts_with(prefix) {
                continue;
            }
            let better = match best {
                None => true,
                Some((bw, bc)) => c > bc || (c == bc && w < bw),
            };
            if better {
                best = Some((w, c));
            }
        }
        best.map(|(w, c)| (w.clone(), c))
    }

    /// (word, count, from_bigram)
    pub fn predict(&self, prev: Option<&str>, prefix: &str) -> Option<(String, u64, bool)> {
        if prefix.is_empty() {
            return None;
        }
        if let Some(succ) = prev.and_then(|p| self.bigrams.get(p)) {
            if let Some((w, c)) = Self::best(Self::range(succ, prefix), prefix) {
                return Some((w, c, true));
            }
        }
        Self::best(Self::range(&self.unigrams, prefix), prefix).map(|(w, c)| (w, c, false))
    }

    pub fn extendable(&self, prev: Option<&str>, prefix: &str) -> BTreeSet<char> {
        let next = |w: &String| w.strip_prefix(prefix).and_then(|r| r.chars().next());
        let mut set: BTreeSet<char> =
            Self::range(&self.unigrams, prefix).map(|(w, _)| w).filter_map(next).collect();
        if let Some(succ) = prev.and_then(|p| self.bigrams.get(p)) {
            set.extend(Self::range(succ, prefix).map(|(w, _)| w).filter_map(next));
        }
        set
    }
}
