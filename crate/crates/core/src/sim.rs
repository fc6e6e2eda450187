//! Synthetic gaze: a user that aims at key centers with Gaussian jitter.
//!
//! Saccades are instantaneous; the cursor jumps to the next target and then
//! scatters around its center. Movement time is not modeled here (see the
//! Fitts analyzer for that), so simulated throughput isolates the cost of
//! jitter-induced dwell resets.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use thiserror::Error;

use crate::corpus::NgramModel;
use crate::engine::{DwellState, EngineError, Mode, Session, SessionConfig, SessionEvent};
use crate::fitts::{words_of, Condition};
use crate::geometry::Point;
use crate::layout::{CornerKind, Keyboard, Target};
use crate::trace::Sample;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("jitter parameter {name} must be positive and finite, got {value}")]
    BadJitter { name: &'static str, value: f64 },
    #[error("{0} cannot be simulated: its predictions are not selectable on the keyboard")]
    UnsupportedPolicy(Condition),
    #[error(transparent)]
    Text(#[from] crate::fitts::FittsError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("no progress for {waited_ms:.0} ms at {elapsed_ms:.0} ms; typed {typed:?}, aiming at {aim}")]
    Timeout {
        typed: String,
        aim: Target,
        elapsed_ms: f64,
        waited_ms: f64,
    },
}

/// Eye-tracker noise and viewing geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JitterModel {
    /// Angular standard deviation of each gaze sample, per axis.
    pub sigma_deg: f64,
    pub viewing_distance_cm: f64,
    pub screen_width_cm: f64,
    pub screen_px: f64,
    /// Width of the keyboard square on screen.
    pub keyboard_px: f64,
    pub sample_rate_hz: f64,
}

impl Default for JitterModel {
    /// 60 Hz tracker with 0.45° accuracy, 50 cm from a 21" 1920×1080
    /// screen whose left half holds the keyboard.
    fn default() -> Self {
        let diagonal_cm = 21.0 * 2.54;
        JitterModel {
            sigma_deg: 0.45,
            viewing_distance_cm: 50.0,
            screen_width_cm: diagonal_cm * 16.0 / (16.0f64 * 16.0 + 9.0 * 9.0).sqrt(),
            screen_px: 1920.0,
            keyboard_px: 960.0,
            sample_rate_hz: 60.0,
        }
    }
}

impl JitterModel {
    pub fn with_sigma(sigma_deg: f64) -> Self {
        JitterModel {
            sigma_deg,
            ..Default::default()
        }
    }

    /// `sigma_deg` may be zero; everything else must be positive.
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("viewing_distance_cm", self.viewing_distance_cm),
            ("screen_width_cm", self.screen_width_cm),
            ("screen_px", self.screen_px),
            ("keyboard_px", self.keyboard_px),
            ("sample_rate_hz", self.sample_rate_hz),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SimError::BadJitter { name, value });
            }
        }
        if !(self.sigma_deg >= 0.0 && self.sigma_deg < 90.0) {
            return Err(SimError::BadJitter {
                name: "sigma_deg",
                value: self.sigma_deg,
            });
        }
        Ok(())
    }

    /// Keyboard radius in centimeters.
    pub fn keyboard_half_width_cm(&self) -> f64 {
        self.screen_width_cm * self.keyboard_px / self.screen_px / 2.0
    }

    /// Jitter standard deviation in keyboard units (radius = 1).
    pub fn sigma_norm(&self) -> f64 {
        self.sigma_deg.to_radians().tan() * self.viewing_distance_cm / self.keyboard_half_width_cm()
    }

    pub fn sample_interval_ms(&self) -> f64 {
        1000.0 / self.sample_rate_hz
    }
}

/// Isotropic Gaussian offsets in keyboard units.
pub struct Jitter {
    rng: ChaCha8Rng,
    normal: Option<Normal<f64>>,
}

impl Jitter {
    pub fn new(model: &JitterModel, seed: u64) -> Self {
        let sigma = model.sigma_norm();
        Jitter {
            rng: ChaCha8Rng::seed_from_u64(seed),
            normal: (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("finite sigma")),
        }
    }

    pub fn around(&mut self, p: Point) -> Point {
        match &self.normal {
            Some(n) => Point::new(p.x + n.sample(&mut self.rng), p.y + n.sample(&mut self.rng)),
            None => p,
        }
    }
}

/// The cursor moves to `point` at `start_ms`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedTarget {
    pub start_ms: f64,
    pub point: Point,
}

/// Samples at the tracker rate from 0 up to `end_ms` (exclusive), each one
/// scattered around the target active at that time.
pub fn generate_trace(
    targets: &[TimedTarget],
    end_ms: f64,
    jitter: &JitterModel,
    seed: u64,
) -> Result<Vec<Sample>, SimError> {
    jitter.validate()?;
    let dt = jitter.sample_interval_ms();
    let mut noise = Jitter::new(jitter, seed);
    let mut samples = Vec::new();
    let mut current = None;
    let mut next = 0;
    for k in 0u64.. {
        let t = k as f64 * dt;
        if t >= end_ms {
            break;
        }
        while next < targets.len() && targets[next].start_ms <= t {
            current = Some(targets[next].point);
            next += 1;
        }
        if let Some(p) = current {
            let q = noise.around(p);
            samples.push(Sample::new(t, q));
        }
    }
    Ok(samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub dwell_ms: f64,
    pub jitter: JitterModel,
    /// Which keyboard features the simulated user relies on.
    pub policy: Condition,
    /// Give up when the transcript has not changed for this long.
    pub timeout_per_char_ms: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dwell_ms: crate::engine::DEFAULT_DWELL_MS,
            jitter: JitterModel::default(),
            policy: Condition::PredMerge,
            timeout_per_char_ms: 30_000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub seed: u64,
    pub transcript: String,
    /// Characters of the transcript, trailing space excluded.
    pub chars: usize,
    pub words: usize,
    /// Words finished by accepting a prediction.
    pub predicted_words: usize,
    pub elapsed_ms: f64,
    /// Times the cursor slipped out of the key the user was dwelling on.
    pub dwell_resets: usize,
    pub samples: usize,
    pub wpm: f64,
}

/// Words per minute with five characters per word.
pub fn words_per_minute(chars: usize, elapsed_ms: f64) -> f64 {
    if elapsed_ms <= 0.0 {
        return 0.0;
    }
    (chars as f64 / 5.0) / (elapsed_ms / 60_000.0)
}

/// Runs one seeded session until `text` is typed.
pub fn simulate_typing(
    text: &str,
    model: Arc<NgramModel>,
    keyboard: &Keyboard,
    config: &SimConfig,
    seed: u64,
) -> Result<SimResult, SimError> {
    simulate_traced(text, model, keyboard, config, seed).map(|(r, _)| r)
}

/// Like [`simulate_typing`], also returning every sample fed to the engine.
pub fn simulate_traced(
    text: &str,
    model: Arc<NgramModel>,
    keyboard: &Keyboard,
    config: &SimConfig,
    seed: u64,
) -> Result<(SimResult, Vec<Sample>), SimError> {
    config.jitter.validate()?;
    if config.policy == Condition::DedicatedArea {
        return Err(SimError::UnsupportedPolicy(config.policy));
    }
    let goal = words_of(text)?.join(" ");
    let mode = if config.policy.uses_merging() {
        Mode::Merging
    } else {
        Mode::NonMerging
    };
    let mut session = Session::new(
        model,
        keyboard.clone(),
        SessionConfig {
            dwell_ms: config.dwell_ms,
            mode,
            learn: false,
        },
    )?;
    let user = User {
        goal: &goal,
        predictions: config.policy.uses_prediction(),
    };
    let dt = config.jitter.sample_interval_ms();
    let mut noise = Jitter::new(&config.jitter, seed);
    let mut trace = Vec::new();
    let mut resets = 0;
    let mut predicted_words = 0;
    let mut last_progress_ms = 0.0;
    let mut best_prefix = 0;
    let mut elapsed_ms = 0.0;

    for k in 0u64.. {
        if user.done(session.transcribe()) {
            break;
        }
        let t = k as f64 * dt;
        let aim = user.aim(&session);
        if t - last_progress_ms > config.timeout_per_char_ms {
            return Err(SimError::Timeout {
                typed: session.transcribe().to_string(),
                aim,
                elapsed_ms: t,
                waited_ms: t - last_progress_ms,
            });
        }
        let p = noise.around(aim_point(&session, aim));
        trace.push(Sample::new(t, p));
        for event in session.feed_sample(t, p)? {
            match event {
                SessionEvent::KeyExit { target } if target == aim => resets += 1,
                SessionEvent::BufferChanged { text } => {
                    elapsed_ms = t;
                    // Typing and deleting a wrong letter is not progress.
                    let good = common_prefix_len(&text, &goal);
                    if good > best_prefix {
                        best_prefix = good;
                        last_progress_ms = t;
                    }
                }
                SessionEvent::WordCommitted { .. } => predicted_words += 1,
                _ => {}
            }
        }
    }

    let transcript = session.transcribe().to_string();
    let chars = transcript.trim_end().chars().count();
    let result = SimResult {
        seed,
        words: transcript.split_whitespace().count(),
        transcript,
        chars,
        predicted_words,
        elapsed_ms,
        dwell_resets: resets,
        samples: trace.len(),
        wpm: words_per_minute(chars, elapsed_ms),
    };
    Ok((result, trace))
}

fn common_prefix_len(a: &str, b: &str) -> usize {
    a.bytes().zip(b.bytes()).take_while(|(x, y)| x == y).count()
}

/// Where a user looks for a letter whose key has been merged away.
fn blank_center(keyboard: &Keyboard, aim: Target) -> Point {
    match aim {
        Target::Key(c) => keyboard.sector(c).target_center(),
        Target::Corner(kind) => keyboard.corner(kind).center,
    }
}

/// The simulated user's decision rule.
struct User<'a> {
    goal: &'a str,
    predictions: bool,
}

impl User<'_> {
    fn done(&self, buffer: &str) -> bool {
        buffer == self.goal || buffer.strip_suffix(' ') == Some(self.goal)
    }

    /// The word of the goal that the buffer is currently inside.
    fn current_word(&self, buffer: &str) -> &str {
        let start = buffer.rfind(' ').map_or(0, |i| i + 1);
        let rest = &self.goal[start.min(self.goal.len())..];
        rest.split(' ').next().unwrap_or("")
    }

    fn aim(&self, session: &Session) -> Target {
        let buffer = session.transcribe();
        if !self.goal.starts_with(buffer) {
            return self.exit_first(session, Target::Corner(CornerKind::Delete));
        }
        if let DwellState::SecondDwell { key, proposed, .. } = session.state() {
            if self.predictions && proposed.word == self.current_word(buffer) {
                return Target::Key(*key);
            }
        }
        let next = match self.goal[buffer.len()..].chars().next() {
            Some(' ') => Target::Corner(CornerKind::Space),
            Some(c) => Target::Key(c),
            // Unreachable while not done; keep still.
            None => Target::Corner(CornerKind::Status),
        };
        self.exit_first(session, next)
    }

    /// The region just used must be left before anything under it can be
    /// selected: a repeated letter, or a letter whose sector the held key
    /// had absorbed when it was entered.
    fn exit_first(&self, session: &Session, want: Target) -> Target {
        match session.state() {
            DwellState::Idle => want,
            DwellState::FirstDwell { key, .. } if *key == want => want,
            _ if session.holds(aim_point(session, want)) => Target::Corner(CornerKind::Status),
            _ => want,
        }
    }
}

fn aim_point(session: &Session, aim: Target) -> Point {
    session
        .layout()
        .target_center(aim)
        .unwrap_or_else(|| blank_center(session.keyboard(), aim))
}

/// Mean and spread over several runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSummary {
    pub trials: usize,
    pub mean_wpm: f64,
    /// Half-width of the normal-approximation 95% interval of the mean.
    pub wpm_ci95: f64,
    pub mean_resets: f64,
    pub mean_elapsed_ms: f64,
}

pub fn summarize(results: &[SimResult]) -> SimSummary {
    let n = results.len();
    let mean = |f: &dyn Fn(&SimResult) -> f64| {
        if n == 0 {
            0.0
        } else {
            results.iter().map(f).sum::<f64>() / n as f64
        }
    };
    let mean_wpm = mean(&|r| r.wpm);
    let ci = if n > 1 {
        let var = results.iter().map(|r| (r.wpm - mean_wpm).powi(2)).sum::<f64>() / (n - 1) as f64;
        1.96 * (var / n as f64).sqrt()
    } else {
        0.0
    };
    SimSummary {
        trials: n,
        mean_wpm,
        wpm_ci95: ci,
        mean_resets: mean(&|r| r.dwell_resets as f64),
        mean_elapsed_ms: mean(&|r| r.elapsed_ms),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_geometry() {
        let j = JitterModel::default();
        assert!((j.screen_width_cm - 46.49).abs() < 0.01);
        assert!((j.keyboard_half_width_cm() - 11.62).abs() < 0.01);
        assert!((j.sigma_norm() - 0.0338).abs() < 1e-3);
        assert!((j.sample_interval_ms() - 16.6667).abs() < 1e-3);
        assert_eq!(JitterModel::with_sigma(0.0).sigma_norm(), 0.0);
    }

    #[test]
    fn rejects_bad_jitter() {
        let j = JitterModel {
            sample_rate_hz: 0.0,
            ..Default::default()
        };
        assert!(j.validate().is_err());
        assert!(JitterModel::with_sigma(-1.0).validate().is_err());
    }

    #[test]
    fn zero_sigma_trace_sits_on_targets() {
        let a = Point::new(0.1, 0.2);
        let b = Point::new(-0.5, 0.0);
        let targets = [
            TimedTarget { start_ms: 0.0, point: a },
            TimedTarget { start_ms: 100.0, point: b },
        ];
        let s = generate_trace(&targets, 200.0, &JitterModel::with_sigma(0.0), 1).unwrap();
        assert_eq!(s.len(), 12);
        for x in &s {
            let want = if x.t_ms < 100.0 { a } else { b };
            assert_eq!(x.point(), want);
        }
        assert!((s[1].t_ms - s[0].t_ms - 1000.0 / 60.0).abs() < 1e-9);
    }

    #[test]
    fn wpm_convention() {
        assert_eq!(words_per_minute(10, 60_000.0), 2.0);
        assert_eq!(words_per_minute(10, 0.0), 0.0);
    }

    #[test]
    fn dedicated_area_is_rejected() {
        let cfg = SimConfig {
            policy: Condition::DedicatedArea,
            ..Default::default()
        };
        let r = simulate_typing("the", NgramModel::bundled(), &Keyboard::default(), &cfg, 0);
        assert!(matches!(r, Err(SimError::UnsupportedPolicy(_))));
    }

    #[test]
    fn zero_jitter_types_exactly() {
        let cfg = SimConfig {
            jitter: JitterModel::with_sigma(0.0),
            ..Default::default()
        };
        let r = simulate_typing("hello world", NgramModel::bundled(), &Keyboard::default(), &cfg, 3).unwrap();
        assert_eq!(r.transcript.trim_end(), "hello world");
        assert_eq!(r.dwell_resets, 0);
        assert_eq!(r.chars, 11);
    }

    #[test]
    fn unreachable_letter_times_out() {
        let model = Arc::new(
            NgramModel::build([("ab", 1u64)], Vec::<(&str, &str, u64)>::new()).unwrap(),
        );
        let cfg = SimConfig {
            jitter: JitterModel::with_sigma(0.0),
            policy: Condition::NoPredMerge,
            timeout_per_char_ms: 3000.0,
            ..Default::default()
        };
        let r = simulate_typing("az", model, &Keyboard::default(), &cfg, 0);
        assert!(matches!(r, Err(SimError::Timeout { .. })), "{r:?}");
    }
}
