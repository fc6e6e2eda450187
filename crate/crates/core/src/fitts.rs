//! Fitts' law path analysis.
//!
//! An ideal user types a text starting from the keyboard center, moving
//! center to center. Every movement is scored with the Shannon index of
//! difficulty `ID = log2(A / W′ + 1)`, where `A` is the distance to the
//! target center and `W′` the target's extent along the line of approach.
//! Dwell time is not part of the score.
//!
//! Word boundaries follow the typing engine: a word accepted from a
//! prediction is followed by an automatic space, a word typed letter by
//! letter needs a move to the space corner (none after the last word).

use std::fmt;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::NgramModel;
use crate::geometry::{GeometryError, Point};
use crate::layout::{CornerKind, Keyboard, LayoutState, RingRadii, Target};
use crate::merge::merged_layout;

#[derive(Debug, Error)]
pub enum FittsError {
    #[error("target width must be positive, got {0}")]
    NonPositiveWidth(f64),
    #[error("distance must be non-negative, got {0}")]
    NegativeDistance(f64),
    #[error("text may contain only letters a-z and spaces: {0:?}")]
    BadText(String),
    #[error("letter {letter:?} of {word:?} has no key")]
    Unreachable { word: String, letter: char },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("writing report: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Shannon index of difficulty in bits.
pub fn index_of_difficulty(a: f64, w: f64) -> Result<f64, FittsError> {
    if !(w > 0.0) {
        return Err(FittsError::NonPositiveWidth(w));
    }
    if !(a >= 0.0) {
        return Err(FittsError::NegativeDistance(a));
    }
    Ok((a / w + 1.0).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    NoPredNoMerge,
    PredNoMerge,
    NoPredMerge,
    PredMerge,
    /// Predictions listed in the top-left corner instead of inside keys.
    DedicatedArea,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::NoPredNoMerge,
        Condition::PredNoMerge,
        Condition::NoPredMerge,
        Condition::PredMerge,
        Condition::DedicatedArea,
    ];

    pub fn uses_prediction(self) -> bool {
        matches!(
            self,
            Condition::PredNoMerge | Condition::PredMerge | Condition::DedicatedArea
        )
    }

    pub fn uses_merging(self) -> bool {
        matches!(self, Condition::NoPredMerge | Condition::PredMerge)
    }

    pub fn name(self) -> &'static str {
        match self {
            Condition::NoPredNoMerge => "no_pred_no_merge",
            Condition::PredNoMerge => "pred_no_merge",
            Condition::NoPredMerge => "no_pred_merge",
            Condition::PredMerge => "pred_merge",
            Condition::DedicatedArea => "dedicated_area",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Condition {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Condition::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown condition {s:?}"))
    }
}

/// Where a movement starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Origin {
    #[serde(serialize_with = "ser_center")]
    Center,
    Target(Target),
}

fn ser_center<S: serde::Serializer>(s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str("center")
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Center => f.write_str("center"),
            Origin::Target(t) => t.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MovementStep {
    pub word: String,
    pub from: Origin,
    pub to: Target,
    pub origin: Point,
    pub target_center: Point,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "ID")]
    pub id: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub condition: Condition,
    pub total_id: f64,
    pub steps: Vec<MovementStep>,
    /// Words typed on the unmerged layout because merging would hide one of
    /// their letters.
    pub unmerged_words: Vec<String>,
}

/// Splits text into words, rejecting anything but `a`–`z` and whitespace.
pub fn words_of(text: &str) -> Result<Vec<String>, FittsError> {
    let lowered = text.to_lowercase();
    if !lowered.chars().all(|c| c.is_ascii_lowercase() || c.is_whitespace()) {
        return Err(FittsError::BadText(text.to_string()));
    }
    Ok(lowered.split_whitespace().map(str::to_string).collect())
}

/// Whether every letter of `word` keeps a key under merging.
pub fn reachable_under_merging(model: &NgramModel, prev: Option<&str>, word: &str) -> bool {
    word.char_indices()
        .all(|(i, c)| model.extendable_letters(prev, &word[..i]).contains(c))
}

struct Walker {
    unmerged: LayoutState,
    from: Origin,
    at: Point,
    steps: Vec<MovementStep>,
}

impl Walker {
    fn step(&mut self, word: &str, layout: Option<&LayoutState>, to: Target) -> Result<(), FittsError> {
        let layout = layout.unwrap_or(&self.unmerged);
        let center = layout.target_center(to).ok_or_else(|| FittsError::Unreachable {
            word: word.to_string(),
            letter: match to {
                Target::Key(c) => c,
                Target::Corner(_) => ' ',
            },
        })?;
        let a = center.distance(self.at);
        // Re-selecting the key under the cursor costs no movement; W′ is
        // then taken along the radial direction, which leaves ID at 0.
        let w = if a < 1e-12 {
            layout.effective_width(to, Point::ORIGIN)?
        } else {
            layout.effective_width(to, self.at)?
        };
        self.steps.push(MovementStep {
            word: word.to_string(),
            from: self.from,
            to,
            origin: self.at,
            target_center: center,
            a,
            w,
            id: index_of_difficulty(a, w)?,
        });
        self.from = Origin::Target(to);
        self.at = center;
        Ok(())
    }
}

/// Movement sequence of the ideal user for one condition.
pub fn plan_path(
    text: &str,
    condition: Condition,
    model: &NgramModel,
    keyboard: &Keyboard,
) -> Result<ConditionResult, FittsError> {
    let words = words_of(text)?;
    let mut walker = Walker {
        unmerged: keyboard.default_layout(),
        from: Origin::Center,
        at: Point::ORIGIN,
        steps: Vec::new(),
    };
    let mut unmerged_words = Vec::new();
    let mut prev: Option<&str> = None;

    for (wi, word) in words.iter().enumerate() {
        let mut merging = condition.uses_merging();
        if merging && !reachable_under_merging(model, prev, word) {
            merging = false;
            unmerged_words.push(word.clone());
        }
        let mut completed = false;
        for (i, letter) in word.char_indices() {
            let layout = merging.then(|| merged_layout(model, keyboard, prev, &word[..i]));
            walker.step(word, layout.as_ref(), Target::Key(letter))?;
            let typed = &word[..i + letter.len_utf8()];
            completed = condition.uses_prediction()
                && model
                    .predict(prev, typed)
                    .is_some_and(|p| p.word == *word);
            if condition == Condition::DedicatedArea {
                walker.step(word, None, Target::Corner(CornerKind::Status))?;
            }
            if completed {
                break;
            }
        }
        let last = wi + 1 == words.len();
        if !completed && !last {
            walker.step(word, None, Target::Corner(CornerKind::Space))?;
        }
        prev = Some(word);
    }

    // An empty sum is -0.0; report it as 0.
    let total_id = walker.steps.iter().map(|s| s.id).sum::<f64>() + 0.0;
    Ok(ConditionResult {
        condition,
        total_id,
        steps: walker.steps,
        unmerged_words,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    pub text: String,
    pub corpus_id: String,
    pub radii: RingRadii,
    pub arrangement: String,
    pub corner_size: f64,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FittsReport {
    pub meta: ReportMeta,
    pub conditions: Vec<ConditionResult>,
    /// `(dedicated_area - pred_no_merge) / dedicated_area`, when both ran.
    pub in_key_prediction_decrease: Option<f64>,
}

pub const SPACE_NOTE: &str = "space handling: words accepted from a prediction get an automatic space; \
words typed letter by letter move to the space corner (no space after the last word)";

impl FittsReport {
    pub fn total(&self, condition: Condition) -> Option<f64> {
        self.conditions
            .iter()
            .find(|c| c.condition == condition)
            .map(|c| c.total_id)
    }

    /// Total movement time under `MT = a + b·ID` summed over steps.
    pub fn movement_times(&self, a: f64, b: f64) -> Vec<(Condition, f64)> {
        self.conditions
            .iter()
            .map(|c| (c.condition, c.steps.iter().map(|s| a + b * s.id).sum()))
            .collect()
    }

    pub fn step_count(&self) -> usize {
        self.conditions.iter().map(|c| c.steps.len()).sum()
    }

    /// One row per step: condition, word, from, to, A, W′, ID.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), FittsError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["condition", "word", "from", "to", "A", "W'", "ID"])?;
        for c in &self.conditions {
            for s in &c.steps {
                w.write_record([
                    c.condition.name().to_string(),
                    s.word.clone(),
                    s.from.to_string(),
                    s.to.to_string(),
                    format!("{:.6}", s.a),
                    format!("{:.6}", s.w),
                    format!("{:.6}", s.id),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the given conditions over `text`.
pub fn report(
    text: &str,
    model: &NgramModel,
    keyboard: &Keyboard,
    corpus_id: &str,
    conditions: &[Condition],
) -> Result<FittsReport, FittsError> {
    let results = conditions
        .iter()
        .map(|&c| plan_path(text, c, model, keyboard))
        .collect::<Result<Vec<_>, _>>()?;
    let find = |c: Condition| results.iter().find(|r| r.condition == c).map(|r| r.total_id);
    let decrease = match (find(Condition::DedicatedArea), find(Condition::PredNoMerge)) {
        (Some(da), Some(pnm)) if da > 0.0 => Some((da - pnm) / da),
        _ => None,
    };
    Ok(FittsReport {
        meta: ReportMeta {
            text: text.to_string(),
            corpus_id: corpus_id.to_string(),
            radii: keyboard.radii(),
            arrangement: keyboard.arrangement().spec_string(),
            corner_size: keyboard.corner_size(),
            notes: vec![SPACE_NOTE.to_string()],
        },
        conditions: results,
        in_key_prediction_decrease: decrease,
    })
}

/// The arrangement-independent default: all five conditions.
pub fn full_report(
    text: &str,
    model: &NgramModel,
    keyboard: &Keyboard,
    corpus_id: &str,
) -> Result<FittsReport, FittsError> {
    report(text, model, keyboard, corpus_id, &Condition::ALL)
}

/// Bar chart of condition totals.
pub fn svg_chart(report: &FittsReport) -> String {
    let width = 120 * report.conditions.len().max(1) + 40;
    let max = report
        .conditions
        .iter()
        .map(|c| c.total_id)
        .fold(1e-9, f64::max);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"320\" font-family=\"sans-serif\" font-size=\"11\">\n"
    );
    for (i, c) in report.conditions.iter().enumerate() {
        let h = 240.0 * c.total_id / max;
        let x = 30 + i * 120;
        svg.push_str(&format!(
            "  <rect x=\"{x}\" y=\"{:.2}\" width=\"80\" height=\"{h:.2}\" fill=\"#d9822b\"/>\n\
             \x20 <text x=\"{}\" y=\"{:.2}\" text-anchor=\"middle\">{:.2}</text>\n\
             \x20 <text x=\"{}\" y=\"300\" text-anchor=\"middle\">{}</text>\n",
            270.0 - h,
            x + 40,
            265.0 - h,
            c.total_id,
            x + 40,
            c.condition.name()
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
