//! Seeding an experience set from warm-up labels.
//!
//! The intuition method never trains in the gradient sense; it consults an
//! experience set. The harness grows one from the warm-up slice by
//! recording a single element per class it has seen, with priority
//! proportional to how often the class occurred. Frequent classes end up
//! preferred by the selection order, which makes the untrained and trained
//! variants differ only in *which* labels they saw, not in mechanism.

use super::ProtocolError;
use crate::datasets::DatasetMeta;
use crate::model::{ExperienceElement, ExperienceSet, Payload, ScaledScore};
use crate::seed::mix_n;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Score ranges (inclusive) used when minting experience elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BootstrapConfig {
    /// Importance of the intuition process for the element.
    pub importance_ip: (u8, u8),
    /// Importance of the normal process; kept below `importance_ip` by
    /// default so mapped answers land in the confident regime.
    pub importance_np: (u8, u8),
    pub confidence: (u8, u8),
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            importance_ip: (6, 9),
            importance_np: (1, 5),
            confidence: (5, 10),
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        for (name, (lo, hi)) in [
            ("importance_ip", self.importance_ip),
            ("importance_np", self.importance_np),
            ("confidence", self.confidence),
        ] {
            if lo < 1 || hi > 10 || lo > hi {
                return Err(ProtocolError::BadConfig(format!(
                    "{name} range {lo}..={hi} must sit within 1..=10"
                )));
            }
        }
        Ok(())
    }
}

/// Builds an experience set from the class labels of a warm-up slice.
///
/// One element is recorded per class present in `labels`, in class-index
/// order. Priorities scale with frequency: the most common class gets 10,
/// a class seen a tenth as often gets 1 (`ceil(10 * count / max_count)`).
/// The remaining scores are drawn from the ranges in `cfg`, one element at
/// a time in field order, from a ChaCha stream derived from `seed` — so
/// the same labels and seed always mint the same set.
pub fn bootstrap_experience(
    labels: impl IntoIterator<Item = usize>,
    meta: &DatasetMeta,
    cfg: &BootstrapConfig,
    seed: u64,
) -> Result<ExperienceSet, ProtocolError> {
    cfg.validate()?;
    let k = meta.n_classes();
    let mut counts = vec![0usize; k];
    for label in labels {
        if label >= k {
            return Err(ProtocolError::BadConfig(format!(
                "class index {label} out of range for {} classes",
                k
            )));
        }
        counts[label] += 1;
    }
    let max_count = counts.iter().copied().max().unwrap_or(0);
    if max_count == 0 {
        return Err(ProtocolError::BadConfig(
            "cannot bootstrap an experience set from an empty warm-up".into(),
        ));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(mix_n(seed, "bootstrap", k as u64));
    let mut set = ExperienceSet::new();
    let mut order = 0u64;
    for (class_idx, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        // ceil(10 * count / max_count), always in 1..=10 because
        // 1 <= count <= max_count.
        let priority = ((10 * count + max_count - 1) / max_count) as u8;
        let importance_ip = rng.gen_range(cfg.importance_ip.0..=cfg.importance_ip.1);
        let importance_np = rng.gen_range(cfg.importance_np.0..=cfg.importance_np.1);
        let confidence = rng.gen_range(cfg.confidence.0..=cfg.confidence.1);
        set.record(ExperienceElement {
            id: class_idx as u64,
            domain: meta.name.to_string(),
            payload: Payload::Symbolic {
                label: meta.class_labels[class_idx].clone(),
                ordinal: class_idx as u32,
                alphabet: k as u32,
            },
            priority: ScaledScore::new(priority)?,
            importance_ip: ScaledScore::new(importance_ip)?,
            importance_np: ScaledScore::new(importance_np)?,
            confidence: ScaledScore::new(confidence)?,
            first_seen: order,
            revision_count: 0,
        });
        order += 1;
    }
    Ok(set)
}
