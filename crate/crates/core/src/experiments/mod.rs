//! The benchmark protocols: reveal records one slot at a time, ask each
//! method for a prediction after every reveal, and aggregate per-cycle
//! error and timing reports.
//!
//! A run is `methods x modes x cycles`; each cycle reshuffles the dataset
//! with its own derived seed, carves off a warm-up slice for training and
//! an evaluation slice for trials, and (optionally) injects uncertainty
//! into both. Everything runs serially — trials are microseconds of pure
//! computation each, and a serial loop keeps timing measurements honest.

mod bootstrap;
mod predict;
mod protocol;
mod report;

pub use bootstrap::{bootstrap_experience, BootstrapConfig};
pub use predict::{build_predictor, DatasetKind, Predictor, PredictorKnobs};
pub use protocol::{
    run_car_protocol, run_poker_protocol, ProtocolConfig, CAR_ADJUSTMENT_FACTOR,
    MIN_TRIALS_FOR_ZERO_GUARD, POKER_ADJUSTMENT_FACTOR,
};
pub use report::{
    emit_csv, emit_table, error_percentage, parse_csv, timing_summary, CSV_HEADER,
};

use crate::baselines::BaselineError;
use crate::datasets::DataError;
use crate::model::ModelError;
use serde::{Deserialize, Serialize};
use std::time::Duration;
use thiserror::Error;

/// The three competing methods, in canonical report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodId {
    Nn,
    Hmm,
    Intuition,
}

impl MethodId {
    pub const ALL: [MethodId; 3] = [MethodId::Nn, MethodId::Hmm, MethodId::Intuition];

    pub fn name(self) -> &'static str {
        match self {
            MethodId::Nn => "nn",
            MethodId::Hmm => "hmm",
            MethodId::Intuition => "intuition",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// Whether the method was exposed to the warm-up data (and its injected
/// uncertainty) before evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeId {
    Untrained,
    Trained,
}

impl ModeId {
    pub const ALL: [ModeId; 2] = [ModeId::Untrained, ModeId::Trained];

    pub fn name(self) -> &'static str {
        match self {
            ModeId::Untrained => "untrained",
            ModeId::Trained => "trained",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// Whether reports carry real wall-clock timings or zeros. Zeroed timing
/// exists so two runs of the same configuration produce byte-identical
/// report files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimingMode {
    Real,
    Zero,
}

/// Denominator of the error percentage: all trials (the standard), or only
/// the correctly answered ones (a stricter variant that inflates the
/// percentage when mistakes pile up).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorDenominator {
    AllTrials,
    CorrectAnswers,
}

/// One prediction attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    /// `None` when the method refused (unexpected value, no vocabulary for
    /// it). Refusals count as mistakes.
    pub predicted: Option<usize>,
    pub true_class: usize,
    pub elapsed: Duration,
}

impl TrialResult {
    pub fn is_correct(&self) -> bool {
        self.predicted == Some(self.true_class)
    }
}

/// Aggregated outcome of one (dataset, cycle, method, mode) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleReport {
    pub dataset: String,
    pub cycle: u32,
    pub method: MethodId,
    pub mode: ModeId,
    pub trials: u32,
    pub mistakes: u32,
    pub error_pct: f64,
    /// Mean wall-clock time per prediction, zeroed under
    /// [`TimingMode::Zero`].
    pub mean_elapsed_ns: u64,
}

/// Errors raised by the experiment harness.
#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("not enough records: need {needed}, have {have}")]
    NotEnoughRecords { needed: usize, have: usize },
    #[error("invalid protocol configuration: {0}")]
    BadConfig(String),
    /// With injected uncertainty and a meaningful trial count, a perfect
    /// score means the harness is broken, not that the method is.
    #[error("suspicious 0% error for {method}/{mode} in cycle {cycle} despite injected uncertainty")]
    ZeroErrorCell {
        method: &'static str,
        mode: &'static str,
        cycle: u32,
    },
    #[error("error percentage is undefined without trials")]
    NoTrials,
    #[error("error-per-correct-answer is undefined when nothing was answered correctly")]
    NoCorrectAnswers,
    #[error("report line {line}: {reason}")]
    MalformedReport { line: usize, reason: String },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    /// A predictor failed in a way that is not a refusal — a bug in the
    /// harness wiring, not an expected outcome.
    #[error("predictor failure: {0}")]
    Predict(#[from] crate::baselines::PredictError),
}
