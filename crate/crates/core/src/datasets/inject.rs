//! Uncertainty injection: replacing records with out-of-domain "alien"
//! rows, and changing the deck under a partially revealed poker hand.

use super::poker::{full_deck, hand_class, Card, PokerRecord};
use super::{CarRecord, DataError};
use crate::seed::mix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// How much the environment is allowed to surprise the predictor on a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowCondition {
    /// Plain data from the training distribution.
    Known,
    /// Data subject to a change the predictor is not told about (for poker,
    /// the deck may be swapped mid-reveal).
    Hidden,
    /// An alien row: every attribute replaced with an out-of-domain value.
    Unknown,
}

/// Datasets that can turn a record into an alien one.
pub trait Alienate {
    /// Replaces every attribute with an out-of-domain value, keeping the
    /// class label: the row still *means* the same thing, the predictor has
    /// just never seen data like it.
    fn alienate(&mut self, rng: &mut ChaCha12Rng);
}

impl Alienate for CarRecord {
    fn alienate(&mut self, rng: &mut ChaCha12Rng) {
        for value in &mut self.values {
            // No car domain token starts with 'x', so these never collide.
            *value = format!("x{:04x}", rng.gen_range(0u32..0x1_0000));
        }
    }
}

impl Alienate for PokerRecord {
    fn alienate(&mut self, rng: &mut ChaCha12Rng) {
        for card in &mut self.cards {
            *card = Card {
                suit: rng.gen_range(5..=9),
                rank: rng.gen_range(14..=20),
            };
        }
    }
}

/// Tags every row with a [`RowCondition`] and rewrites the `Unknown` ones
/// into alien records.
///
/// A seeded `fraction` of rows (rounded to the nearest count) becomes
/// `Unknown`. With `equal_split`, the remaining rows are divided evenly
/// between `Known` and `Hidden` (`Known` gets the extra row on odd counts);
/// otherwise they all stay `Known`. A fraction of zero leaves every row
/// `Known` and untouched — no injection means no uncertainty of either
/// kind. Row order is preserved.
pub fn inject_alien_records<R: Alienate>(
    rows: Vec<R>,
    fraction: f64,
    equal_split: bool,
    seed: u64,
) -> Result<Vec<(R, RowCondition)>, DataError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(DataError::BadFraction(fraction));
    }
    let n = rows.len();
    let mut conditions = vec![RowCondition::Known; n];
    if fraction > 0.0 && n > 0 {
        let n_unknown = (fraction * n as f64).round() as usize;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha12Rng::seed_from_u64(mix(seed, "alien-pick")));
        for &i in order.iter().take(n_unknown) {
            conditions[i] = RowCondition::Unknown;
        }
        if equal_split {
            let rest = &order[n_unknown..];
            let known_share = (rest.len() + 1) / 2;
            for &i in &rest[known_share..] {
                conditions[i] = RowCondition::Hidden;
            }
        }
    }

    let mut value_rng = ChaCha12Rng::seed_from_u64(mix(seed, "alien-values"));
    Ok(rows
        .into_iter()
        .zip(conditions)
        .map(|(mut row, condition)| {
            if condition == RowCondition::Unknown {
                row.alienate(&mut value_rng);
            }
            (row, condition)
        })
        .collect())
}

/// Swaps the deck under a partially dealt hand.
///
/// Cards before `from_step` are kept; the rest of the hand is redrawn from
/// a fresh shuffled deck that excludes the kept cards. Returns the new hand
/// and its recomputed class. `from_step` must keep at least one card and
/// redraw at least one (`1..=4`). Expects a valid (non-alien) hand.
pub fn inject_deck_change(
    cards: [Card; 5],
    from_step: usize,
    seed: u64,
) -> Result<([Card; 5], u8), DataError> {
    if !(1..=4).contains(&from_step) {
        return Err(DataError::BadChangeStep(from_step));
    }
    let kept = &cards[..from_step];
    let mut deck: Vec<Card> = full_deck().into_iter().filter(|c| !kept.contains(c)).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let (drawn, _) = deck.partial_shuffle(&mut rng, 5 - from_step);
    let mut new_cards = cards;
    new_cards[from_step..].copy_from_slice(drawn);
    Ok((new_cards, hand_class(&new_cards)))
}
