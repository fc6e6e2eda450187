//! The circular keyboard: two half-disc keys in the middle, two rings of
//! twelve 30° keys around them, and four square function keys in the corners
//! of the enclosing square.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{run_containing, AnnularSector, GeometryError, Line, Point, Rect};
use crate::letters::{is_word, letter_index, LetterSet, ALPHABET_LEN};

/// Keys per ring.
pub const RING_SLOTS: usize = 12;

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("arrangement must place each of a-z exactly once: {0}")]
    BadArrangement(String),
    #[error("corner size {0} must be in (0, 1 - 1/sqrt 2]")]
    BadCornerSize(f64),
}

/// Radii of the inner disc and the two rings, as fractions of the keyboard
/// half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RingRadii {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl RingRadii {
    pub fn new(r1: f64, r2: f64, r3: f64) -> Result<Self, GeometryError> {
        if !(0.0 < r1 && r1 < r2 && r2 < r3 && r3 <= 1.0) {
            return Err(GeometryError::InvalidRadii((r1, r2, r3)));
        }
        Ok(RingRadii { r1, r2, r3 })
    }
}

impl Default for RingRadii {
    fn default() -> Self {
        RingRadii {
            r1: 0.30,
            r2: 0.65,
            r3: 1.00,
        }
    }
}

/// Which letter sits where. Ring slot `k` spans `[30k°, 30(k+1)°)`; the
/// inner and outer slot with the same index are radially adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arrangement {
    /// Half disc spanning `[90°, 270°)`.
    pub left: char,
    /// Half disc spanning `[270°, 450°)`.
    pub right: char,
    pub inner: [char; RING_SLOTS],
    pub outer: [char; RING_SLOTS],
}

impl Arrangement {
    pub fn new(
        left: char,
        right: char,
        inner: [char; RING_SLOTS],
        outer: [char; RING_SLOTS],
    ) -> Result<Self, LayoutError> {
        let a = Arrangement {
            left,
            right,
            inner,
            outer,
        };
        let all: String = a.letters().collect();
        let set: LetterSet = all.chars().collect();
        if all.len() != ALPHABET_LEN || set.len() != ALPHABET_LEN || !is_word(&all) {
            return Err(LayoutError::BadArrangement(all));
        }
        Ok(a)
    }

    /// Parses `"et/aholidnuscrm/kvxbzgwjyqpf"`: halves, inner ring, outer ring.
    pub fn parse(spec: &str) -> Result<Self, LayoutError> {
        let bad = || LayoutError::BadArrangement(spec.to_string());
        let parts: Vec<Vec<char>> = spec.split('/').map(|p| p.chars().collect()).collect();
        match parts.as_slice() {
            [halves, inner, outer]
                if halves.len() == 2 && inner.len() == RING_SLOTS && outer.len() == RING_SLOTS =>
            {
                Arrangement::new(
                    halves[0],
                    halves[1],
                    inner.as_slice().try_into().map_err(|_| bad())?,
                    outer.as_slice().try_into().map_err(|_| bad())?,
                )
            }
            _ => Err(bad()),
        }
    }

    /// Builds an arrangement from a frequency ranking (most frequent first):
    /// the top two take the half discs, the next twelve the inner ring and
    /// the rest the outer ring. Within a ring, frequent and infrequent
    /// letters alternate so that frequent keys are spread around the circle.
    pub fn from_ranking(ranking: &[char]) -> Result<Self, LayoutError> {
        if ranking.len() != ALPHABET_LEN {
            return Err(LayoutError::BadArrangement(ranking.iter().collect()));
        }
        let spread = |ring: &[char]| -> [char; RING_SLOTS] {
            let half = RING_SLOTS / 2;
            std::array::from_fn(|slot| {
                if slot % 2 == 0 {
                    ring[slot / 2]
                } else {
                    ring[half + slot / 2]
                }
            })
        };
        let inner = spread(&ranking[2..14]);
        let mut outer_ranked = ranking[14..].to_vec();
        // Rarest outer letters sit above the most frequent inner letters.
        outer_ranked.reverse();
        Arrangement::new(ranking[0], ranking[1], inner, spread(&outer_ranked))
    }

    pub fn letters(&self) -> impl Iterator<Item = char> + '_ {
        [self.left, self.right]
            .into_iter()
            .chain(self.inner.iter().copied())
            .chain(self.outer.iter().copied())
    }

    pub fn ring_of(&self, letter: char) -> Option<Ring> {
        if letter == self.left || letter == self.right {
            Some(Ring::Center)
        } else if self.inner.contains(&letter) {
            Some(Ring::Inner)
        } else if self.outer.contains(&letter) {
            Some(Ring::Outer)
        } else {
            None
        }
    }

    pub fn spec_string(&self) -> String {
        format!(
            "{}{}/{}/{}",
            self.left,
            self.right,
            self.inner.iter().collect::<String>(),
            self.outer.iter().collect::<String>()
        )
    }
}

impl Default for Arrangement {
    /// Ring membership follows the letter frequencies of the bundled corpus.
    /// `y` sits outside `s` and `w` outside `n`.
    fn default() -> Self {
        Arrangement::parse("et/aholidnuscrm/kvxbzgwjyqpf").expect("valid default arrangement")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    Center,
    Inner,
    Outer,
}

/// Function keys in the corners of the keyboard square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerKind {
    /// Top-left: shows the transcribed text and word-list predictions; not selectable.
    Status,
    /// Top-right.
    Delete,
    /// Bottom-left: toggles non-merging mode.
    Mode,
    /// Bottom-right.
    Space,
}

impl CornerKind {
    pub const ALL: [CornerKind; 4] = [
        CornerKind::Status,
        CornerKind::Delete,
        CornerKind::Mode,
        CornerKind::Space,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CornerKind::Status => "status",
            CornerKind::Delete => "delete",
            CornerKind::Mode => "mode",
            CornerKind::Space => "space",
        }
    }

    pub fn selectable(self) -> bool {
        self != CornerKind::Status
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Corner {
    pub id: CornerKind,
    pub rect: Rect,
    pub center: Point,
}

impl Corner {
    fn new(id: CornerKind, size: f64) -> Self {
        let (sx, sy) = match id {
            CornerKind::Status => (-1.0, 1.0),
            CornerKind::Delete => (1.0, 1.0),
            CornerKind::Mode => (-1.0, -1.0),
            CornerKind::Space => (1.0, -1.0),
        };
        let a = Point::new(sx, sy);
        let b = Point::new(sx * (1.0 - size), sy * (1.0 - size));
        let rect = Rect {
            min: Point::new(a.x.min(b.x), a.y.min(b.y)),
            max: Point::new(a.x.max(b.x), a.y.max(b.y)),
        };
        Corner {
            id,
            rect,
            center: rect.center(),
        }
    }

    /// Extent of the corner square along the line from `origin` through its center.
    pub fn effective_width(&self, origin: Point) -> Result<f64, GeometryError> {
        let line = Line::through(origin, self.center)?;
        self.rect
            .line_interval(&line)
            .map(|(a, b)| b - a)
            .ok_or(GeometryError::CenterOutside)
    }
}

/// One selectable letter key: its own sector plus any sectors it absorbed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeyRegion {
    pub letter: char,
    pub absorbed: Vec<char>,
    pub sectors: Vec<AnnularSector>,
    pub center: Point,
    #[serde(skip)]
    pub host: AnnularSector,
}

impl KeyRegion {
    pub fn unmerged(letter: char, host: AnnularSector) -> Self {
        KeyRegion {
            letter,
            absorbed: Vec::new(),
            sectors: vec![host],
            center: host.target_center(),
            host,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.sectors.iter().any(|s| s.contains(p))
    }

    pub fn area(&self) -> f64 {
        self.sectors.iter().map(AnnularSector::area).sum()
    }

    /// Extent of the key along the line through `origin` and the target
    /// center: the contiguous run of the line, inside the union of the key's
    /// sectors, that contains the center.
    pub fn effective_width(&self, origin: Point) -> Result<f64, GeometryError> {
        let line = Line::through(origin, self.center)?;
        let at_center = self.center.distance(origin);
        let intervals =
            crate::geometry::join_intervals(self.sectors.iter().flat_map(|s| s.line_intervals(&line)));
        run_containing(&intervals, at_center).ok_or(GeometryError::CenterOutside)
    }
}

/// A removed key that no neighbor absorbed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Blank {
    pub letter: char,
    pub sector: AnnularSector,
}

/// Anything the cursor can land on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(untagged)]
pub enum Target {
    Key(char),
    Corner(CornerKind),
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::Key(c) => write!(f, "{c}"),
            Target::Corner(k) => write!(f, "{}", k.name()),
        }
    }
}

/// Fixed keyboard geometry. [`Keyboard::default_layout`] produces the
/// unmerged layout; the merge controller derives the others.
#[derive(Debug, Clone, PartialEq)]
pub struct Keyboard {
    radii: RingRadii,
    arrangement: Arrangement,
    corner_size: f64,
    sectors: [AnnularSector; ALPHABET_LEN],
    corners: [Corner; 4],
}

/// Largest corner square that stays outside the unit circle.
pub const MAX_CORNER_SIZE: f64 = 1.0 - FRAC_1_SQRT_2;

/// Start angle of ring slot `k`; slot 12 is exactly 2π.
pub fn slot_angle(k: usize) -> f64 {
    if k == RING_SLOTS {
        TAU
    } else {
        TAU * k as f64 / RING_SLOTS as f64
    }
}

impl Keyboard {
    pub fn new(
        radii: RingRadii,
        arrangement: Arrangement,
        corner_size: f64,
    ) -> Result<Self, LayoutError> {
        RingRadii::new(radii.r1, radii.r2, radii.r3)?;
        if !(corner_size > 0.0 && corner_size <= MAX_CORNER_SIZE + 1e-12) {
            return Err(LayoutError::BadCornerSize(corner_size));
        }
        let quarter = slot_angle(3);
        let three_quarters = slot_angle(9);
        let mut sectors = [AnnularSector {
            r_in: 0.0,
            r_out: 1.0,
            a_start: 0.0,
            a_end: TAU,
        }; ALPHABET_LEN];
        let mut put = |c: char, s: AnnularSector| sectors[letter_index(c).expect("a-z")] = s;
        put(
            arrangement.left,
            AnnularSector::new(0.0, radii.r1, quarter, three_quarters)?,
        );
        put(
            arrangement.right,
            AnnularSector::new(0.0, radii.r1, three_quarters, TAU + quarter)?,
        );
        for k in 0..RING_SLOTS {
            let (a0, a1) = (slot_angle(k), slot_angle(k + 1));
            put(arrangement.inner[k], AnnularSector::new(radii.r1, radii.r2, a0, a1)?);
            put(arrangement.outer[k], AnnularSector::new(radii.r2, radii.r3, a0, a1)?);
        }
        let corners = CornerKind::ALL.map(|k| Corner::new(k, corner_size));
        Ok(Keyboard {
            radii,
            arrangement,
            corner_size,
            sectors,
            corners,
        })
    }

    pub fn radii(&self) -> RingRadii {
        self.radii
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    pub fn corner_size(&self) -> f64 {
        self.corner_size
    }

    /// The unmerged sector of `letter`.
    pub fn sector(&self, letter: char) -> AnnularSector {
        self.sectors[letter_index(letter).expect("letter a-z")]
    }

    pub fn corner(&self, kind: CornerKind) -> &Corner {
        self.corners.iter().find(|c| c.id == kind).expect("all corners present")
    }

    pub fn corners(&self) -> &[Corner; 4] {
        &self.corners
    }

    /// Ring slot index of a ring letter.
    pub fn slot(&self, letter: char) -> Option<usize> {
        let a = &self.arrangement;
        a.inner
            .iter()
            .position(|&c| c == letter)
            .or_else(|| a.outer.iter().position(|&c| c == letter))
    }

    /// All 26 keys unmerged, plus the corners.
    pub fn default_layout(&self) -> LayoutState {
        LayoutState {
            keys: self
                .arrangement
                .letters()
                .map(|c| KeyRegion::unmerged(c, self.sector(c)))
                .collect(),
            blanks: Vec::new(),
            corners: self.corners,
            prefix: String::new(),
        }
    }
}

impl Default for Keyboard {
    fn default() -> Self {
        Keyboard::new(RingRadii::default(), Arrangement::default(), MAX_CORNER_SIZE)
            .expect("default keyboard is valid")
    }
}

/// Default layout for the given radii with the default arrangement.
pub fn default_layout(radii: RingRadii) -> Result<LayoutState, LayoutError> {
    Ok(Keyboard::new(radii, Arrangement::default(), MAX_CORNER_SIZE)?.default_layout())
}

/// Active keys for one word prefix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayoutState {
    pub keys: Vec<KeyRegion>,
    pub blanks: Vec<Blank>,
    pub corners: [Corner; 4],
    pub prefix: String,
}

impl LayoutState {
    pub fn key(&self, letter: char) -> Option<&KeyRegion> {
        self.keys.iter().find(|k| k.letter == letter)
    }

    pub fn corner(&self, kind: CornerKind) -> &Corner {
        self.corners.iter().find(|c| c.id == kind).expect("all corners present")
    }

    /// The region containing `p`, if any. Blank areas and the dead zone
    /// between circle and corners give `None`.
    pub fn hit_test(&self, p: Point) -> Option<Target> {
        if let Some(k) = self.keys.iter().find(|k| k.contains(p)) {
            return Some(Target::Key(k.letter));
        }
        self.corners
            .iter()
            .find(|c| c.rect.contains(p))
            .map(|c| Target::Corner(c.id))
    }

    pub fn target_center(&self, target: Target) -> Option<Point> {
        match target {
            Target::Key(c) => self.key(c).map(|k| k.center),
            Target::Corner(kind) => Some(self.corner(kind).center),
        }
    }

    /// Fitts distance `A` from `origin` to the target center.
    pub fn distance(&self, origin: Point, target: Target) -> Option<f64> {
        self.target_center(target).map(|c| c.distance(origin))
    }

    /// Fitts width `W′` of `target` seen from `origin`.
    pub fn effective_width(&self, target: Target, origin: Point) -> Result<f64, GeometryError> {
        match target {
            Target::Key(c) => self
                .key(c)
                .ok_or(GeometryError::CenterOutside)?
                .effective_width(origin),
            Target::Corner(kind) => self.corner(kind).effective_width(origin),
        }
    }

    /// Letters with a key of their own.
    pub fn active_letters(&self) -> LetterSet {
        self.keys.iter().map(|k| k.letter).collect()
    }

    pub fn active_area(&self) -> f64 {
        self.keys.iter().map(KeyRegion::area).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("layout serializes")
    }
}
