//! The intuition model.
//!
//! An [`ExperienceSet`] holds previously solved problems as
//! [`ExperienceElement`]s, each carrying a payload (the remembered answer)
//! and a handful of 1–10 scores: how urgent the element is ([`priority`]),
//! how well the intuitive process handles it (`importance_ip`), and how well
//! a deliberate, normal process would (`importance_np`).
//!
//! [`intuit`] answers a new [`ProblemElement`] by selecting the most urgent
//! matching experience, mapping its payload through a weighted-sum score,
//! applying a configured adjustment, and classifying how much the answer can
//! be trusted ([`AnswerClass`]). All steps are pure and deterministic; the
//! single class that needs randomness (`HighlyInaccurate`) derives it from a
//! caller-provided seed.
//!
//! [`priority`]: ExperienceElement::priority

mod experience;
mod intuition;
mod score;

pub use experience::{ExperienceElement, ExperienceSet, Payload, ProblemElement};
pub use intuition::{
    apply_adjustment, classify_answer, intuit, mapping_fn, p_ip_given_np, select_experience,
    AnswerClass, IntuitionConfig, MappedAnswer, Mapping, MatchPolicy,
};
pub use score::{normalize_score, ScaledScore};

use thiserror::Error;

/// Errors produced by the model layer.
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    /// A 1–10 score was constructed from a value outside that range.
    #[error("score {0} is outside the valid range 1..=10")]
    ScoreOutOfRange(i64),
    /// A probability parameter fell outside `[0, 1]`.
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    /// No experience element matched the problem.
    #[error("no experience element matches domain {0:?}")]
    NoMatchingExperience(String),
    /// The experience set was empty.
    #[error("experience set is empty")]
    EmptyExperienceSet,
    /// The normal-process availability list was empty; the conditional
    /// probability of the intuitive process is undefined without it.
    #[error("no normal process availability given")]
    NoNormalProcess,
    /// A serialized experience set could not be parsed.
    #[error("experience set line {line}: {reason}")]
    MalformedExperience { line: usize, reason: String },
}
