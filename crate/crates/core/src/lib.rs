//! SliceType: a circular, dwell-driven gaze keyboard whose keys merge away
//! when no dictionary word can use them, with word predictions shown inside
//! the key being dwelt on.
//!
//! The crate provides the language model ([`corpus`]), the keyboard geometry
//! ([`layout`], [`geometry`]), key merging ([`merge`]), the dwell state
//! machine ([`engine`]), a Fitts' law path analyzer ([`fitts`]), a jittered
//! gaze simulator ([`sim`]) and the JSON session protocol ([`service`]).

pub mod corpus;
pub mod engine;
pub mod fitts;
pub mod geometry;
pub mod layout;
pub mod letters;
pub mod merge;
pub mod service;
pub mod sim;
pub mod trace;

pub use engine::{Mode, Session, SessionConfig, SessionEvent};
pub use corpus::{NgramModel, Prediction, Source};
pub use geometry::{AnnularSector, Point};
pub use layout::{Arrangement, CornerKind, KeyRegion, Keyboard, LayoutState, RingRadii, Target};
pub use letters::LetterSet;
