use super::ModelError;
use serde::{Deserialize, Serialize};

/// An integer score on the model's 1–10 scale.
///
/// Scores are stored as integers and only divided down to `[0.1, 1.0]` at
/// computation time, so sets remain human-readable and comparisons stay
/// exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct ScaledScore(u8);

impl ScaledScore {
    /// Accepts values in `1..=10`.
    pub fn new(value: u8) -> Result<Self, ModelError> {
        if (1..=10).contains(&value) {
            Ok(ScaledScore(value))
        } else {
            Err(ModelError::ScoreOutOfRange(value as i64))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// The score as a fraction of the scale maximum.
    pub fn normalized(self) -> f64 {
        self.0 as f64 / 10.0
    }
}

impl TryFrom<u8> for ScaledScore {
    type Error = ModelError;
    fn try_from(value: u8) -> Result<Self, ModelError> {
        ScaledScore::new(value)
    }
}

impl From<ScaledScore> for u8 {
    fn from(score: ScaledScore) -> u8 {
        score.0
    }
}

/// Maps a 1–10 score onto `[0.1, 1.0]`.
pub fn normalize_score(score: ScaledScore) -> f64 {
    score.normalized()
}
