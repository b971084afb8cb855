//! Benchmark datasets: loading, validation, seeded generation, and the
//! uncertainty machinery (alien records, deck changes, reveal sequences)
//! used by the experiment protocols.
//!
//! Both datasets follow the UCI file layout: comma-separated values, one
//! record per line, class label last. Files can be parsed strictly (first
//! bad line aborts) or leniently (bad lines are reported and skipped).

mod car;
mod inject;
mod poker;
mod reveal;

pub use car::{
    car_meta, load_car, parse_car, synth_car, CarClass, CarRecord, CAR_ATTRIBUTES, CAR_CLASSES,
    CAR_DOMAINS,
};
pub use inject::{inject_alien_records, inject_deck_change, Alienate, RowCondition};
pub use poker::{
    full_deck, hand_class, load_poker, parse_poker, poker_meta, synth_poker, Card, PokerRecord,
    POKER_CLASSES,
};
pub use reveal::{
    read_reveal_log, write_reveal_log, RevealLogLine, RevealSequence, RevealStep,
};

use thiserror::Error;

/// Errors produced while loading or transforming datasets.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("injection fraction {0} is outside [0, 1]")]
    BadFraction(f64),
    #[error("deck change step {0} must keep at least one card and redraw at least one (1..=4)")]
    BadChangeStep(usize),
}

/// Whether parsing aborts on the first malformed line or skips and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    Strict,
    Lenient,
}

/// A line that failed to parse in lenient mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub reason: String,
}

/// Outcome of parsing a dataset file.
#[derive(Debug, Clone)]
pub struct LoadReport<R> {
    pub records: Vec<R>,
    /// Malformed lines that were skipped (always empty in strict mode).
    pub skipped: Vec<LineError>,
}

/// Static description of a dataset: slot layout, class labels, and the
/// vocabulary of reveal-step tokens. Everything the predictors need to set
/// up their encodings.
#[derive(Debug, Clone)]
pub struct DatasetMeta {
    pub name: &'static str,
    /// One name per reveal slot (an attribute for cars, a card for poker).
    pub slot_names: Vec<&'static str>,
    pub class_labels: Vec<String>,
    /// Every in-domain reveal token, in canonical order.
    pub step_vocab: Vec<String>,
}

impl DatasetMeta {
    pub fn n_slots(&self) -> usize {
        self.slot_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }
}

pub(crate) fn read_to_string(path: &std::path::Path) -> Result<String, DataError> {
    std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })
}
