//! Exact hand-class probabilities by brute-force enumeration.
//!
//! Given any number of already-seen cards (up to the full hand), every way
//! of completing the hand from the remaining deck is enumerated and
//! classified. No sampling, no approximation — the counts for an empty
//! table reproduce the classic five-card combinatorics exactly.

use super::BaselineError;
use crate::datasets::{full_deck, hand_class, Card};
use std::sync::OnceLock;

/// Class counts over every completion of `seen`, plus the total number of
/// completions. `seen` may hold zero to five valid, distinct cards.
pub fn poker_class_distribution(seen: &[Card]) -> Result<([u64; 10], u64), BaselineError> {
    if seen.len() > 5 {
        return Err(BaselineError::BadSeenCards(format!(
            "{} cards seen, a hand has 5",
            seen.len()
        )));
    }
    for c in seen {
        if c.is_alien() {
            return Err(BaselineError::BadSeenCards(format!(
                "{} is not in the deck",
                c.token()
            )));
        }
    }
    for (i, a) in seen.iter().enumerate() {
        if seen[i + 1..].contains(a) {
            return Err(BaselineError::BadSeenCards(format!(
                "duplicate card {}",
                a.token()
            )));
        }
    }

    // The empty-table distribution costs a full C(52,5) sweep; cache it.
    if seen.is_empty() {
        static FULL: OnceLock<([u64; 10], u64)> = OnceLock::new();
        return Ok(*FULL.get_or_init(|| enumerate(&[])));
    }
    Ok(enumerate(seen))
}

fn enumerate(seen: &[Card]) -> ([u64; 10], u64) {
    let deck: Vec<Card> = full_deck()
        .into_iter()
        .filter(|c| !seen.contains(c))
        .collect();
    let mut hand = [Card { suit: 0, rank: 0 }; 5];
    hand[..seen.len()].copy_from_slice(seen);

    let mut counts = [0u64; 10];
    let mut total = 0u64;
    complete(&deck, 0, seen.len(), &mut hand, &mut counts, &mut total);
    (counts, total)
}

/// Recursively chooses the remaining cards in increasing deck order, so
/// each completion is counted exactly once.
fn complete(
    deck: &[Card],
    from: usize,
    filled: usize,
    hand: &mut [Card; 5],
    counts: &mut [u64; 10],
    total: &mut u64,
) {
    if filled == 5 {
        counts[hand_class(hand) as usize] += 1;
        *total += 1;
        return;
    }
    let still_needed = 5 - filled;
    for i in from..=deck.len() - still_needed {
        hand[filled] = deck[i];
        complete(deck, i + 1, filled + 1, hand, counts, total);
    }
}

/// Probability that the completed hand lands in `class`, as an exact ratio
/// of enumeration counts.
pub fn naive_poker_probability(seen: &[Card], class: u8) -> Result<f64, BaselineError> {
    if class > 9 {
        return Err(BaselineError::BadSeenCards(format!(
            "class {class} is outside 0..=9"
        )));
    }
    let (counts, total) = poker_class_distribution(seen)?;
    Ok(counts[class as usize] as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cards(spec: &[(u8, u8)]) -> Vec<Card> {
        spec.iter().map(|&(suit, rank)| Card { suit, rank }).collect()
    }

    #[test]
    fn the_empty_table_reproduces_the_classic_counts() {
        let (counts, total) = poker_class_distribution(&[]).unwrap();
        assert_eq!(total, 2_598_960);
        assert_eq!(
            counts,
            [
                1_302_540, // nothing
                1_098_240, // one pair
                123_552,   // two pairs
                54_912,    // three of a kind
                10_200,    // straight
                5_108,     // flush
                3_744,     // full house
                624,       // four of a kind
                36,        // straight flush
                4,         // royal flush
            ]
        );
        let sum: u64 = counts.iter().sum();
        assert_eq!(sum, total);
    }

    #[test]
    fn four_scattered_hearts_leave_nine_flush_outs_in_fortyeight() {
        // 2-5-9-K of hearts: any of the 9 remaining hearts completes a
        // flush, and none of them can turn it into a straight flush.
        let seen = cards(&[(1, 2), (1, 5), (1, 9), (1, 13)]);
        let (counts, total) = poker_class_distribution(&seen).unwrap();
        assert_eq!(total, 48);
        assert_eq!(counts[5], 9);
        assert_eq!(counts[8], 0);
        assert_eq!(counts[9], 0);
        assert_eq!(naive_poker_probability(&seen, 5).unwrap(), 9.0 / 48.0);
    }

    #[test]
    fn a_seen_pair_mostly_stays_a_pair() {
        // 2-2-7-9: the last card either matches a rank (2 twos left -> three
        // of a kind, 3 sevens + 3 nines -> two pairs) or keeps the pair.
        let seen = cards(&[(1, 2), (2, 2), (3, 7), (4, 9)]);
        let (counts, total) = poker_class_distribution(&seen).unwrap();
        assert_eq!(total, 48);
        assert_eq!(counts[3], 2);
        assert_eq!(counts[2], 6);
        assert_eq!(counts[1], 40);
        assert_eq!(naive_poker_probability(&seen, 1).unwrap(), 40.0 / 48.0);
    }

    #[test]
    fn a_complete_hand_is_certain() {
        let seen = cards(&[(1, 10), (1, 11), (1, 13), (1, 12), (1, 1)]);
        let (counts, total) = poker_class_distribution(&seen).unwrap();
        assert_eq!(total, 1);
        assert_eq!(counts[9], 1);
        assert_eq!(naive_poker_probability(&seen, 9).unwrap(), 1.0);
        assert_eq!(naive_poker_probability(&seen, 0).unwrap(), 0.0);
    }

    #[test]
    fn probabilities_sum_to_one_at_any_depth() {
        let seen = cards(&[(2, 4), (3, 11)]);
        let (counts, total) = poker_class_distribution(&seen).unwrap();
        assert_eq!(total, 19_600); // C(50, 3)
        let sum: u64 = counts.iter().sum();
        assert_eq!(sum, total);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(poker_class_distribution(&cards(&[(7, 18)])).is_err());
        assert!(poker_class_distribution(&cards(&[(1, 2), (1, 2)])).is_err());
        let six = cards(&[(1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7)]);
        assert!(poker_class_distribution(&six).is_err());
        assert!(naive_poker_probability(&[], 10).is_err());
    }
}
