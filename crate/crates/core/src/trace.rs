//! Replayable cursor traces: CSV with header `t_ms,x,y`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{EngineError, Session, SessionEvent};
use crate::geometry::Point;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("trace row {row}: {source}")]
    Engine { row: usize, source: EngineError },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t_ms: f64,
    pub x: f64,
    pub y: f64,
}

impl Sample {
    pub fn new(t_ms: f64, p: Point) -> Self {
        Sample {
            t_ms,
            x: p.x,
            y: p.y,
        }
    }

    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

pub fn read_trace<R: std::io::Read>(reader: R) -> Result<Vec<Sample>, TraceError> {
    let mut rdr = csv::Reader::from_reader(reader);
    Ok(rdr.deserialize().collect::<Result<Vec<Sample>, _>>()?)
}

pub fn write_trace<W: std::io::Write>(writer: W, samples: &[Sample]) -> Result<(), TraceError> {
    let mut w = csv::Writer::from_writer(writer);
    for s in samples {
        w.serialize(s)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Feeds every sample to `session`, returning all events in order.
pub fn replay(session: &mut Session, samples: &[Sample]) -> Result<Vec<SessionEvent>, TraceError> {
    let mut events = Vec::new();
    for (row, s) in samples.iter().enumerate() {
        let ev = session
            .feed_sample(s.t_ms, s.point())
            .map_err(|source| TraceError::Engine { row: row + 1, source })?;
        events.extend(ev);
    }
    Ok(events)
}
