//! The poker hand dataset: five cards drawn from a standard deck, labeled
//! with one of ten hand classes.
//!
//! Cards follow the UCI convention: suits 1–4, ranks 1–13 with 1 = ace.
//! Classes: 0 nothing, 1 one pair, 2 two pairs, 3 three of a kind,
//! 4 straight, 5 flush, 6 full house, 7 four of a kind, 8 straight flush,
//! 9 royal flush. Aces play both low and high in straights.

use super::{DataError, DatasetMeta, LineError, LoadReport, ParseMode};
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::path::Path;

pub const POKER_CLASSES: [&str; 10] = ["0", "1", "2", "3", "4", "5", "6", "7", "8", "9"];

/// A playing card. Valid decks use suits `1..=4` and ranks `1..=13`; the
/// alien injector deliberately builds cards outside those ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Card {
    pub suit: u8,
    pub rank: u8,
}

impl Card {
    pub fn is_alien(self) -> bool {
        !(1..=4).contains(&self.suit) || !(1..=13).contains(&self.rank)
    }

    /// The reveal token for this card, e.g. `s1r10`.
    pub fn token(self) -> String {
        format!("s{}r{}", self.suit, self.rank)
    }
}

/// One dealt hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PokerRecord {
    pub cards: [Card; 5],
    /// Hand class, `0..=9`.
    pub class: u8,
}

impl PokerRecord {
    pub fn step_token(&self, slot: usize) -> String {
        self.cards[slot].token()
    }

    /// Serializes back to the UCI line format
    /// (`S1,C1,S2,C2,S3,C3,S4,C4,S5,C5,CLASS`).
    pub fn to_line(&self) -> String {
        let mut out = String::new();
        for c in &self.cards {
            out.push_str(&format!("{},{},", c.suit, c.rank));
        }
        out.push_str(&self.class.to_string());
        out
    }

    pub fn parse_line(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 11 {
            return Err(format!("expected 11 fields, got {}", fields.len()));
        }
        let num = |field: &str, what: &str| -> Result<u8, String> {
            field.parse().map_err(|_| format!("bad {what}: {field:?}"))
        };
        let mut cards = [Card { suit: 0, rank: 0 }; 5];
        for (i, card) in cards.iter_mut().enumerate() {
            let suit = num(fields[2 * i], "suit")?;
            let rank = num(fields[2 * i + 1], "rank")?;
            if !(1..=4).contains(&suit) {
                return Err(format!("suit {suit} is outside 1..=4"));
            }
            if !(1..=13).contains(&rank) {
                return Err(format!("rank {rank} is outside 1..=13"));
            }
            *card = Card { suit, rank };
        }
        for i in 0..5 {
            for j in (i + 1)..5 {
                if cards[i] == cards[j] {
                    return Err(format!("duplicate card {}", cards[i].token()));
                }
            }
        }
        let class = num(fields[10], "class")?;
        if class > 9 {
            return Err(format!("class {class} is outside 0..=9"));
        }
        Ok(PokerRecord { cards, class })
    }
}

/// Evaluates a five-card hand into its UCI class. Expects in-range,
/// duplicate-free cards.
pub fn hand_class(cards: &[Card; 5]) -> u8 {
    let mut rank_counts = [0u8; 14];
    let mut suit_counts = [0u8; 5];
    for c in cards {
        rank_counts[c.rank as usize] += 1;
        suit_counts[c.suit as usize] += 1;
    }
    let flush = suit_counts.contains(&5);

    // Rank presence with the ace mirrored high, so both A-2-3-4-5 and
    // 10-J-Q-K-A register as runs.
    let mut present = [false; 15];
    for r in 1..=13 {
        if rank_counts[r] > 0 {
            present[r] = true;
            if r == 1 {
                present[14] = true;
            }
        }
    }
    let mut straight_high = 0;
    for top in 5..=14 {
        if (top - 4..=top).all(|i| present[i]) {
            straight_high = top;
        }
    }

    let mut pairs = 0;
    let mut trips = false;
    let mut quads = false;
    for r in 1..=13 {
        match rank_counts[r] {
            2 => pairs += 1,
            3 => trips = true,
            4 => quads = true,
            _ => {}
        }
    }

    if straight_high > 0 && flush {
        return if straight_high == 14 { 9 } else { 8 };
    }
    if quads {
        return 7;
    }
    if trips && pairs == 1 {
        return 6;
    }
    if flush {
        return 5;
    }
    if straight_high > 0 {
        return 4;
    }
    if trips {
        return 3;
    }
    match pairs {
        2 => 2,
        1 => 1,
        _ => 0,
    }
}

/// Parses UCI poker-hand text. Blank lines are ignored.
pub fn parse_poker(text: &str, mode: ParseMode) -> Result<LoadReport<PokerRecord>, DataError> {
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match PokerRecord::parse_line(line) {
            Ok(r) => records.push(r),
            Err(reason) => match mode {
                ParseMode::Strict => {
                    return Err(DataError::Malformed {
                        line: idx + 1,
                        reason,
                    })
                }
                ParseMode::Lenient => skipped.push(LineError {
                    line: idx + 1,
                    reason,
                }),
            },
        }
    }
    Ok(LoadReport { records, skipped })
}

/// Loads a UCI poker-hand file.
pub fn load_poker(path: &Path, mode: ParseMode) -> Result<LoadReport<PokerRecord>, DataError> {
    parse_poker(&super::read_to_string(path)?, mode)
}

/// The 52-card deck in suit-major order.
pub fn full_deck() -> Vec<Card> {
    let mut deck = Vec::with_capacity(52);
    for suit in 1..=4 {
        for rank in 1..=13 {
            deck.push(Card { suit, rank });
        }
    }
    deck
}

/// Deals `n` seeded random hands, labeled by [`hand_class`].
pub fn synth_poker(n: usize, seed: u64) -> Vec<PokerRecord> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut deck = full_deck();
    (0..n)
        .map(|_| {
            let (dealt, _) = deck.partial_shuffle(&mut rng, 5);
            let cards: [Card; 5] = dealt.try_into().unwrap();
            PokerRecord {
                cards,
                class: hand_class(&cards),
            }
        })
        .collect()
}

pub fn poker_meta() -> DatasetMeta {
    DatasetMeta {
        name: "poker",
        slot_names: vec!["card1", "card2", "card3", "card4", "card5"],
        class_labels: POKER_CLASSES.iter().map(|s| s.to_string()).collect(),
        step_vocab: full_deck().into_iter().map(Card::token).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hand(spec: [(u8, u8); 5]) -> [Card; 5] {
        spec.map(|(suit, rank)| Card { suit, rank })
    }

    #[test]
    fn classifies_every_hand_shape() {
        // royal flush: 10-J-Q-K-A of hearts
        assert_eq!(hand_class(&hand([(1, 10), (1, 11), (1, 13), (1, 12), (1, 1)])), 9);
        // straight flush, including the ace-low wheel
        assert_eq!(hand_class(&hand([(2, 5), (2, 6), (2, 7), (2, 8), (2, 9)])), 8);
        assert_eq!(hand_class(&hand([(3, 1), (3, 2), (3, 3), (3, 4), (3, 5)])), 8);
        // four of a kind
        assert_eq!(hand_class(&hand([(1, 9), (2, 9), (3, 9), (4, 9), (1, 2)])), 7);
        // full house
        assert_eq!(hand_class(&hand([(1, 4), (2, 4), (3, 4), (1, 11), (2, 11)])), 6);
        // flush (not straight)
        assert_eq!(hand_class(&hand([(4, 2), (4, 5), (4, 9), (4, 11), (4, 13)])), 5);
        // straights: ace high, ace low, and a middle run
        assert_eq!(hand_class(&hand([(1, 10), (2, 11), (3, 12), (4, 13), (1, 1)])), 4);
        assert_eq!(hand_class(&hand([(1, 1), (2, 2), (3, 3), (4, 4), (1, 5)])), 4);
        assert_eq!(hand_class(&hand([(1, 6), (2, 7), (3, 8), (4, 9), (1, 10)])), 4);
        // three of a kind
        assert_eq!(hand_class(&hand([(1, 7), (2, 7), (3, 7), (4, 2), (1, 9)])), 3);
        // two pairs
        assert_eq!(hand_class(&hand([(1, 3), (2, 3), (3, 8), (4, 8), (1, 12)])), 2);
        // one pair
        assert_eq!(hand_class(&hand([(1, 6), (2, 6), (3, 2), (4, 9), (1, 12)])), 1);
        // nothing
        assert_eq!(hand_class(&hand([(1, 2), (2, 5), (3, 9), (4, 11), (1, 13)])), 0);
        // almost a straight (gap) and almost a flush (four suits) stay nothing
        assert_eq!(hand_class(&hand([(1, 2), (2, 3), (3, 4), (4, 5), (1, 7)])), 0);
    }

    #[test]
    fn parses_the_royal_flush_line() {
        let r = PokerRecord::parse_line("1,10,1,11,1,13,1,12,1,1,9").unwrap();
        assert_eq!(r.class, 9);
        assert_eq!(hand_class(&r.cards), 9);
        assert_eq!(r.to_line(), "1,10,1,11,1,13,1,12,1,1,9");
        assert_eq!(r.step_token(0), "s1r10");
    }

    #[test]
    fn rejects_malformed_lines() {
        let cases = [
            ("1,10,1,11,1,13,1,12,1,1", "expected 11"),
            ("5,10,1,11,1,13,1,12,1,1,9", "suit 5"),
            ("1,14,1,11,1,13,1,12,1,1,9", "rank 14"),
            ("1,10,1,10,1,13,1,12,1,1,9", "duplicate"),
            ("1,10,1,11,1,13,1,12,1,1,12", "class 12"),
            ("x,10,1,11,1,13,1,12,1,1,9", "bad suit"),
        ];
        for (line, needle) in cases {
            let err = PokerRecord::parse_line(line).unwrap_err();
            assert!(err.contains(needle), "{line}: {err}");
        }
    }

    #[test]
    fn strict_and_lenient_modes_behave_like_the_car_loader() {
        let text = "1,10,1,11,1,13,1,12,1,1,9\n9,9,9,9,9,9,9,9,9,9,9\n";
        assert!(matches!(
            parse_poker(text, ParseMode::Strict),
            Err(DataError::Malformed { line: 2, .. })
        ));
        let report = parse_poker(text, ParseMode::Lenient).unwrap();
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.skipped.len(), 1);
    }

    #[test]
    fn dealing_is_seeded_and_duplicate_free() {
        let a = synth_poker(200, 7);
        let b = synth_poker(200, 7);
        assert_eq!(a, b);
        assert_ne!(a, synth_poker(200, 8));
        for r in &a {
            let mut cards = r.cards.to_vec();
            cards.sort();
            cards.dedup();
            assert_eq!(cards.len(), 5, "{}", r.to_line());
            assert!(!r.cards.iter().any(|c| c.is_alien()));
            assert_eq!(r.class, hand_class(&r.cards));
        }
    }

    #[test]
    fn dealt_class_distribution_is_plausible() {
        let hands = synth_poker(20_000, 42);
        let mut counts = [0usize; 10];
        for r in &hands {
            counts[r.class as usize] += 1;
        }
        let frac = |c: usize| counts[c] as f64 / hands.len() as f64;
        // True probabilities: nothing 50.1%, one pair 42.3%, two pairs 4.8%.
        assert!((frac(0) - 0.501).abs() < 0.02, "nothing: {}", frac(0));
        assert!((frac(1) - 0.423).abs() < 0.02, "one pair: {}", frac(1));
        assert!((frac(2) - 0.048).abs() < 0.01, "two pairs: {}", frac(2));
    }

    #[test]
    fn deck_and_meta_are_consistent() {
        let deck = full_deck();
        assert_eq!(deck.len(), 52);
        let meta = poker_meta();
        assert_eq!(meta.n_slots(), 5);
        assert_eq!(meta.n_classes(), 10);
        assert_eq!(meta.step_vocab.len(), 52);
        assert_eq!(meta.step_vocab[0], "s1r1");
    }

    proptest! {
        #[test]
        fn generated_hands_round_trip_through_the_parser(n in 1usize..40, seed in any::<u64>()) {
            let records = synth_poker(n, seed);
            let text: String = records.iter().map(|r| r.to_line() + "\n").collect();
            let report = parse_poker(&text, ParseMode::Strict).unwrap();
            prop_assert_eq!(report.records, records);
        }

        #[test]
        fn permuting_a_hand_never_changes_its_class(seed in any::<u64>(), swap_a in 0usize..5, swap_b in 0usize..5) {
            let record = &synth_poker(1, seed)[0];
            let mut cards = record.cards;
            cards.swap(swap_a, swap_b);
            prop_assert_eq!(hand_class(&cards), record.class);
        }
    }
}
