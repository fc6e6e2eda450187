//! Key merging: letters that cannot extend the current prefix lose their key,
//! and the vacated sector goes to the first surviving neighbor. Merging is
//! one hop only; a removed key whose neighbors are all removed stays blank.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::NgramModel;
use crate::geometry::{angles_equal, AnnularSector};
use crate::layout::{Blank, Keyboard, LayoutState, RING_SLOTS};
use crate::letters::LetterSet;

/// Ordered neighbor lists for every letter of the unmerged keyboard:
/// radially inward, radially outward, counter-clockwise, clockwise.
/// A half-disc key lists the six inner-ring keys along its arc.
pub fn adjacency(keyboard: &Keyboard) -> BTreeMap<char, Vec<char>> {
    let a = keyboard.arrangement();
    let half_of = |slot: usize| if (3..9).contains(&slot) { a.left } else { a.right };
    let ccw = |k: usize| (k + 1) % RING_SLOTS;
    let cw = |k: usize| (k + RING_SLOTS - 1) % RING_SLOTS;

    let mut map = BTreeMap::new();
    map.insert(a.left, (3..9).map(|k| a.inner[k]).collect());
    map.insert(a.right, [9, 10, 11, 0, 1, 2].map(|k| a.inner[k]).to_vec());
    for k in 0..RING_SLOTS {
        map.insert(
            a.inner[k],
            vec![half_of(k), a.outer[k], a.inner[ccw(k)], a.inner[cw(k)]],
        );
        map.insert(a.outer[k], vec![a.inner[k], a.outer[ccw(k)], a.outer[cw(k)]]);
    }
    map
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergePlan {
    pub removed: LetterSet,
    /// Removed letter to absorbing host, `None` when left blank.
    pub absorptions: BTreeMap<char, Option<char>>,
    pub prefix: String,
}

impl MergePlan {
    /// No removals: the unmerged layout.
    pub fn identity(prefix: &str) -> Self {
        MergePlan {
            removed: LetterSet::EMPTY,
            absorptions: BTreeMap::new(),
            prefix: prefix.to_string(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.removed.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plan serializes")
    }
}

/// Decides which keys disappear for `prefix` and who absorbs them.
pub fn plan_merge(
    model: &NgramModel,
    keyboard: &Keyboard,
    prev_word: Option<&str>,
    prefix: &str,
) -> MergePlan {
    let survivors = model.extendable_letters(prev_word, prefix);
    plan_for_survivors(keyboard, survivors, prefix)
}

/// Like [`plan_merge`] with an explicit surviving set.
pub fn plan_for_survivors(keyboard: &Keyboard, survivors: LetterSet, prefix: &str) -> MergePlan {
    let removed = survivors.complement();
    let neighbors = adjacency(keyboard);
    let absorptions = removed
        .iter()
        .map(|c| {
            let host = neighbors[&c].iter().copied().find(|n| survivors.contains(*n));
            (c, host)
        })
        .collect();
    MergePlan {
        removed,
        absorptions,
        prefix: prefix.to_string(),
    }
}

/// Builds the layout described by `plan`.
pub fn apply_plan(keyboard: &Keyboard, plan: &MergePlan) -> LayoutState {
    let mut layout = keyboard.default_layout();
    layout.prefix = plan.prefix.clone();
    let mut gained: BTreeMap<char, Vec<char>> = BTreeMap::new();
    for (&removed, host) in &plan.absorptions {
        match host {
            Some(h) => gained.entry(*h).or_default().push(removed),
            None => layout.blanks.push(Blank {
                letter: removed,
                sector: keyboard.sector(removed),
            }),
        }
    }
    layout.keys.retain(|k| !plan.removed.contains(k.letter));
    for key in &mut layout.keys {
        if let Some(extra) = gained.remove(&key.letter) {
            key.sectors
                .extend(extra.iter().map(|&c| keyboard.sector(c)));
            key.sectors = coalesce(std::mem::take(&mut key.sectors));
            key.absorbed = extra;
        }
    }
    layout
}

/// `plan_merge` followed by `apply_plan`.
pub fn merged_layout(
    model: &NgramModel,
    keyboard: &Keyboard,
    prev_word: Option<&str>,
    prefix: &str,
) -> LayoutState {
    apply_plan(keyboard, &plan_merge(model, keyboard, prev_word, prefix))
}

/// Fuses sectors that together form a single wider or deeper sector.
fn coalesce(mut sectors: Vec<AnnularSector>) -> Vec<AnnularSector> {
    'outer: loop {
        for i in 0..sectors.len() {
            for j in 0..sectors.len() {
                if i == j {
                    continue;
                }
                if let Some(joined) = join_pair(&sectors[i], &sectors[j]) {
                    let (lo, hi) = (i.min(j), i.max(j));
                    sectors.remove(hi);
                    sectors[lo] = joined;
                    continue 'outer;
                }
            }
        }
        return sectors;
    }
}

fn join_pair(a: &AnnularSector, b: &AnnularSector) -> Option<AnnularSector> {
    let same_radii = a.r_in == b.r_in && a.r_out == b.r_out;
    if same_radii && angles_equal(a.a_end, b.a_start) {
        return Some(AnnularSector {
            a_end: a.a_end + b.angular_width(),
            ..*a
        });
    }
    let same_span = angles_equal(a.a_start, b.a_start) && (a.angular_width() - b.angular_width()).abs() < 1e-12;
    if same_span && a.r_out == b.r_in {
        return Some(AnnularSector { r_out: b.r_out, ..*a });
    }
    None
}
