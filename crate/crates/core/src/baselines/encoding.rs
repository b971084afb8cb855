//! Input encodings: one-hot feature vectors for the network, symbol ids for
//! the HMM.
//!
//! Every attribute block reserves a "masked" slot for values that have not
//! been revealed yet. Encoders built with `include_oov` additionally
//! reserve an out-of-vocabulary slot per block; encoders without it refuse
//! unexpected values, which is exactly how the untrained baselines are
//! meant to fail.

use super::PredictError;
use crate::datasets::{CAR_ATTRIBUTES, CAR_DOMAINS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    /// Six categorical attribute blocks, tokens like `buying=vhigh`.
    Car,
    /// Five card slots, each expanding into a suit block and a rank block,
    /// tokens like `s3r11`.
    Poker,
}

/// One-hot encoder over partially revealed records.
#[derive(Debug, Clone)]
pub struct OneHot {
    layout: Layout,
    include_oov: bool,
    /// Per feature block: the in-domain tokens, in order.
    blocks: Vec<Vec<String>>,
}

impl OneHot {
    pub fn car(include_oov: bool) -> Self {
        let blocks = CAR_DOMAINS
            .iter()
            .enumerate()
            .map(|(slot, domain)| {
                domain
                    .iter()
                    .map(|v| format!("{}={}", CAR_ATTRIBUTES[slot], v))
                    .collect()
            })
            .collect();
        OneHot {
            layout: Layout::Car,
            include_oov,
            blocks,
        }
    }

    pub fn poker(include_oov: bool) -> Self {
        let mut blocks = Vec::with_capacity(10);
        for _card in 0..5 {
            blocks.push((1..=4).map(|s| s.to_string()).collect());
            blocks.push((1..=13).map(|r| r.to_string()).collect());
        }
        OneHot {
            layout: Layout::Poker,
            include_oov,
            blocks,
        }
    }

    pub fn n_slots(&self) -> usize {
        match self.layout {
            Layout::Car => 6,
            Layout::Poker => 5,
        }
    }

    fn extra_per_block(&self) -> usize {
        // masked slot, plus the OOV slot if reserved
        1 + usize::from(self.include_oov)
    }

    /// Length of the encoded vector.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.len() + self.extra_per_block()).sum()
    }

    /// Encodes a slot view (one `Option` per reveal slot) into a one-hot
    /// vector. Masked slots activate their blocks' masked positions.
    pub fn encode(&self, view: &[Option<&str>]) -> Result<Vec<f64>, PredictError> {
        if view.len() != self.n_slots() {
            return Err(PredictError::SlotCountMismatch {
                expected: self.n_slots(),
                got: view.len(),
            });
        }
        if view.iter().all(Option::is_none) {
            return Err(PredictError::AllMasked);
        }

        // Resolve each feature block to Some(in-domain index), None for
        // masked, or an OOV marker (usize::MAX) for unexpected values.
        let mut resolved = Vec::with_capacity(self.blocks.len());
        for (slot, token) in view.iter().enumerate() {
            match self.layout {
                Layout::Car => resolved.push(self.resolve(slot, *token, slot)?),
                Layout::Poker => {
                    let (suit, rank) = match token {
                        None => (None, None),
                        Some(t) => match split_card_token(t) {
                            Some((s, r)) => (Some(s), Some(r)),
                            // Unparseable card: both blocks are unexpected.
                            None => (Some(t.to_string()), Some(t.to_string())),
                        },
                    };
                    resolved.push(self.resolve(2 * slot, suit.as_deref(), slot)?);
                    resolved.push(self.resolve(2 * slot + 1, rank.as_deref(), slot)?);
                }
            }
        }

        let mut x = vec![0.0; self.dim()];
        let mut offset = 0;
        for (block, value) in self.blocks.iter().zip(resolved) {
            let width = block.len() + self.extra_per_block();
            let hot = match value {
                BlockValue::Masked => block.len(),
                BlockValue::InDomain(i) => i,
                BlockValue::Oov => block.len() + 1,
            };
            x[offset + hot] = 1.0;
            offset += width;
        }
        Ok(x)
    }

    fn resolve(
        &self,
        block: usize,
        token: Option<&str>,
        slot: usize,
    ) -> Result<BlockValue, PredictError> {
        let Some(token) = token else {
            return Ok(BlockValue::Masked);
        };
        match self.blocks[block].iter().position(|v| v == token) {
            Some(i) => Ok(BlockValue::InDomain(i)),
            None if self.include_oov => Ok(BlockValue::Oov),
            None => Err(PredictError::UnexpectedValue {
                slot,
                token: token.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum BlockValue {
    Masked,
    InDomain(usize),
    Oov,
}

/// Splits a card token `s<suit>r<rank>` into its suit and rank strings.
fn split_card_token(token: &str) -> Option<(String, String)> {
    let rest = token.strip_prefix('s')?;
    let r_pos = rest.find('r')?;
    let (suit, rank) = rest.split_at(r_pos);
    let rank = &rank[1..];
    if suit.is_empty() || rank.is_empty() {
        return None;
    }
    Some((suit.to_string(), rank.to_string()))
}

/// Token-to-id mapping for the HMM. Ids are positions in the vocabulary;
/// with `include_oov`, one extra id is reserved for everything else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    tokens: Vec<String>,
    include_oov: bool,
}

impl SymbolTable {
    pub fn new(vocab: &[String], include_oov: bool) -> Self {
        SymbolTable {
            tokens: vocab.to_vec(),
            include_oov,
        }
    }

    /// Total number of ids, including the OOV slot if reserved.
    pub fn len(&self) -> usize {
        self.tokens.len() + usize::from(self.include_oov)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has_oov(&self) -> bool {
        self.include_oov
    }

    pub fn oov_id(&self) -> Option<usize> {
        self.include_oov.then_some(self.tokens.len())
    }

    /// Resolves a token, falling back to the OOV id when reserved and
    /// refusing otherwise.
    pub fn id(&self, token: &str, slot: usize) -> Result<usize, PredictError> {
        match self.tokens.iter().position(|t| t == token) {
            Some(i) => Ok(i),
            None => self.oov_id().ok_or_else(|| PredictError::UnexpectedValue {
                slot,
                token: token.to_string(),
            }),
        }
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        if Some(id) == self.oov_id() {
            Some("<oov>")
        } else {
            self.tokens.get(id).map(String::as_str)
        }
    }

    pub fn vocab(&self) -> &[String] {
        &self.tokens
    }
}
