//! Baseline predictors the intuition model is benchmarked against: a small
//! feedforward neural network, a class-aligned hidden Markov model, and an
//! exact combinatorial probability calculator for poker hands.
//!
//! The network and the HMM consume partially revealed records through the
//! encoders in [`encoding`]. Untrained variants carry no out-of-vocabulary
//! slot: confronted with a value outside the schema they refuse to answer
//! ([`PredictError::UnexpectedValue`]) rather than silently picking a
//! class. Trained variants reserve an explicit OOV slot instead.

mod encoding;
mod hmm;
mod naive;
mod nn;

pub use encoding::{OneHot, SymbolTable};
pub use hmm::{forward, predict_hmm, train_hmm, uniform_hmm, HmmFilter, HmmModel};
pub use naive::{naive_poker_probability, poker_class_distribution};
pub use nn::{predict_nn, train_nn, NnConfig, NnGradients, NnModel};

use std::time::Duration;
use thiserror::Error;

/// A baseline's answer to one partially revealed record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub class: usize,
    /// Normalized score of the winning class (softmax probability for the
    /// network, posterior share for the HMM).
    pub confidence: f64,
    /// Wall-clock time of the encode + inference work.
    pub elapsed: Duration,
}

/// Errors raised while answering a single prediction request.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PredictError {
    /// The input contained a value the model has no representation for.
    /// Untrained models refuse instead of guessing.
    #[error("unexpected value {token:?} in slot {slot}")]
    UnexpectedValue { slot: usize, token: String },
    /// Nothing has been revealed yet; there is nothing to predict from.
    #[error("every slot is masked")]
    AllMasked,
    /// The input view does not match the encoder's slot count.
    #[error("expected {expected} slots, got {got}")]
    SlotCountMismatch { expected: usize, got: usize },
}

/// Errors raised outside the prediction hot path: serialization, training
/// input validation, and the combinatorial calculator.
#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("model file line {line}: {reason}")]
    MalformedModel { line: usize, reason: String },
    #[error("bad seen cards: {0}")]
    BadSeenCards(String),
    #[error("training needs at least one sequence")]
    NoTrainingData,
    #[error("bad training sequence: {0}")]
    BadTrainingSequence(String),
}
