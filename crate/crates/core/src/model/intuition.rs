use super::{normalize_score, ExperienceElement, ExperienceSet, ModelError, Payload, ProblemElement};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// How much an intuited answer can be trusted, judged from the relative
/// importance scores of the chosen experience element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnswerClass {
    /// The intuitive process dominates and clears the threshold.
    Correct,
    /// The deliberate process dominates and intuition falls short.
    Wrong,
    /// Intuition dominates but stays under the threshold; the answer is
    /// nudged to compensate.
    Adjusted,
    /// Neither process clearly dominates; the answer is effectively a guess.
    HighlyInaccurate,
}

/// How [`select_experience`] matches candidate elements to a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchPolicy {
    /// Prefer elements from the problem's domain, fall back to any element.
    SameDomainThenAny,
    /// Only consider elements from the problem's domain.
    SameDomainOnly,
    /// Consider every element regardless of domain.
    Any,
}

/// Tunable parameters of the intuition pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntuitionConfig {
    /// Prior probability that the intuitive process fires at all, before
    /// normal-process availability is taken into account.
    pub base_ip_probability: f64,
    /// Probability that outside circumstances have changed since the
    /// experience was stored.
    pub external_change_probability: f64,
    /// Constant added to the mapping delta before it is applied to the
    /// payload; calibrated per problem domain.
    pub adjustment_factor: f64,
    /// Score threshold separating confident answers from shaky ones.
    pub answer_threshold: u8,
    pub match_policy: MatchPolicy,
    /// How far an `Adjusted` answer may be nudged from the mapped symbol.
    /// Zero disables the nudge.
    pub adjusted_answer_radius: u32,
}

impl Default for IntuitionConfig {
    fn default() -> Self {
        IntuitionConfig {
            base_ip_probability: 0.7,
            external_change_probability: 0.8,
            adjustment_factor: 0.0,
            answer_threshold: 5,
            match_policy: MatchPolicy::SameDomainThenAny,
            adjusted_answer_radius: 1,
        }
    }
}

impl IntuitionConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        for p in [self.base_ip_probability, self.external_change_probability] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ModelError::ProbabilityOutOfRange(p));
            }
        }
        if !(1..=10).contains(&self.answer_threshold) {
            return Err(ModelError::ScoreOutOfRange(self.answer_threshold as i64));
        }
        if !self.adjustment_factor.is_finite() {
            return Err(ModelError::ProbabilityOutOfRange(self.adjustment_factor));
        }
        Ok(())
    }
}

/// Intermediate result of [`mapping_fn`]: the weighted-sum delta together
/// with the payload it will be applied to. Classification has not happened
/// yet at this stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Mapping {
    pub delta: f64,
    pub payload: Payload,
}

/// Final output of [`intuit`].
#[derive(Debug, Clone, PartialEq)]
pub struct MappedAnswer {
    /// The mapping delta that produced the answer.
    pub delta: f64,
    /// The answer itself.
    pub payload: Payload,
    pub class: AnswerClass,
    /// Id of the experience element the answer was derived from.
    pub chosen_id: u64,
}

/// Probability that the intuitive process handles the problem, given the
/// availability of each normal (deliberate) process that could compete with
/// it: the base probability times the product of the availabilities.
///
/// An empty availability list is an error — with no normal process declared
/// the conditional probability is undefined.
pub fn p_ip_given_np(base: f64, np_availabilities: &[f64]) -> Result<f64, ModelError> {
    if !(0.0..=1.0).contains(&base) {
        return Err(ModelError::ProbabilityOutOfRange(base));
    }
    if np_availabilities.is_empty() {
        return Err(ModelError::NoNormalProcess);
    }
    let mut p = base;
    for &a in np_availabilities {
        if !(0.0..=1.0).contains(&a) {
            return Err(ModelError::ProbabilityOutOfRange(a));
        }
        p *= a;
    }
    Ok(p)
}

/// Picks the experience element the model will answer from.
///
/// Candidates are filtered by `policy`, then the most urgent one wins:
/// highest priority, then highest `importance_ip`. Remaining ties prefer the
/// element stored earliest (`first_seen`), then the one revised least, then
/// the smallest id — an early, untouched memory beats a reworked copy of
/// itself.
pub fn select_experience<'a>(
    set: &'a ExperienceSet,
    domain: &str,
    policy: MatchPolicy,
) -> Result<&'a ExperienceElement, ModelError> {
    if set.is_empty() {
        return Err(ModelError::EmptyExperienceSet);
    }
    let same_domain = || set.iter().filter(|e| e.domain == domain);
    let pick = |candidates: &mut dyn Iterator<Item = &'a ExperienceElement>| {
        candidates.max_by(|a, b| {
            a.priority
                .cmp(&b.priority)
                .then(a.importance_ip.cmp(&b.importance_ip))
                .then(b.first_seen.cmp(&a.first_seen))
                .then(b.revision_count.cmp(&a.revision_count))
                .then(b.id.cmp(&a.id))
        })
    };
    let best = match policy {
        MatchPolicy::SameDomainOnly => pick(&mut same_domain()),
        MatchPolicy::SameDomainThenAny => {
            pick(&mut same_domain()).or_else(|| pick(&mut set.iter()))
        }
        MatchPolicy::Any => pick(&mut set.iter()),
    };
    best.ok_or_else(|| ModelError::NoMatchingExperience(domain.to_string()))
}

/// The mapping function: combines the chance that intuition fires, how
/// important the problem is to the intuitive process, how urgent the stored
/// experience is, and the chance that the world changed in the meantime into
/// a single additive delta over the element's payload.
///
/// `delta = p_ip * imp_ip/10 + priority/10 + external_p`
///
/// With `p_ip = 0.7`, `importance_ip = 8`, `priority = 7`, and
/// `external_p = 0.8`, the delta is `0.56 + 0.7 + 0.8 = 2.06`. (This same
/// example is sometimes quoted with a result of 2.28; that value does not
/// follow from the formula — the exact sum is 2.06.)
pub fn mapping_fn(element: &ExperienceElement, p_ip: f64, external_p: f64) -> Mapping {
    let delta = p_ip * normalize_score(element.importance_ip)
        + normalize_score(element.priority)
        + external_p;
    Mapping {
        delta,
        payload: element.payload.clone(),
    }
}

/// Classifies an answer by weighing the intuitive-process importance `ip`
/// against the normal-process importance `np`:
///
/// * `np > ip` and `ip < threshold` — `Wrong`: a deliberate process clearly
///   should have handled this.
/// * `ip > np` and `ip > threshold` — `Correct`.
/// * `ip > np` and `ip < threshold` — `Adjusted`: intuition wins but is not
///   confident enough to stand unmodified.
/// * anything else (ties, or scores sitting exactly on the threshold) —
///   `HighlyInaccurate`.
pub fn classify_answer(
    importance_ip: super::ScaledScore,
    importance_np: super::ScaledScore,
    threshold: u8,
) -> AnswerClass {
    let ip = importance_ip.get();
    let np = importance_np.get();
    if np > ip && ip < threshold {
        AnswerClass::Wrong
    } else if ip > np && ip > threshold {
        AnswerClass::Correct
    } else if ip > np && ip < threshold {
        AnswerClass::Adjusted
    } else {
        AnswerClass::HighlyInaccurate
    }
}

/// Applies the mapping delta plus the configured adjustment factor to the
/// mapped payload.
///
/// Numeric payloads shift by the full amount. Symbolic payloads shift their
/// ordinal by the amount rounded to the nearest integer (halves away from
/// zero) and clamp to the alphabet, so a calibrated adjustment factor can
/// cancel the delta exactly and leave the remembered symbol in place.
pub fn apply_adjustment(mapping: &Mapping, adjustment_factor: f64) -> Payload {
    let shift = mapping.delta + adjustment_factor;
    match &mapping.payload {
        Payload::Numeric(v) => Payload::Numeric(v + shift),
        Payload::Symbolic {
            label,
            ordinal,
            alphabet,
        } => {
            let steps = shift.round() as i64;
            let max = (*alphabet as i64 - 1).max(0);
            let shifted = (*ordinal as i64 + steps).clamp(0, max);
            Payload::Symbolic {
                label: label.clone(),
                ordinal: shifted as u32,
                alphabet: *alphabet,
            }
        }
    }
}

/// Answers `problem` from the experience set.
///
/// Pipeline: select the most urgent matching element, compute the mapping
/// delta, apply the adjustment factor, classify the answer, and finally
/// distort the payload according to its class:
///
/// * `Correct` — the adjusted payload is returned as-is.
/// * `Adjusted` — symbolic answers are nudged to the nearest different
///   symbol (bounded by `adjusted_answer_radius`; reflected at the top of
///   the alphabet); numeric answers already carry their compensation.
/// * `Wrong` — deterministically off: the next symbol (wrapping), or `+1.0`
///   for numeric payloads.
/// * `HighlyInaccurate` — a uniformly random different symbol (or a random
///   offset in `[-5, 5)` for numeric payloads), drawn from a stream seeded
///   by `seed` and the problem id, so reruns reproduce the same guess.
pub fn intuit(
    problem: &ProblemElement,
    set: &ExperienceSet,
    cfg: &IntuitionConfig,
    np_availabilities: &[f64],
    seed: u64,
) -> Result<MappedAnswer, ModelError> {
    cfg.validate()?;
    let element = select_experience(set, &problem.domain, cfg.match_policy)?;
    let p_ip = p_ip_given_np(cfg.base_ip_probability, np_availabilities)?;
    let mapping = mapping_fn(element, p_ip, cfg.external_change_probability);
    let class = classify_answer(element.importance_ip, element.importance_np, cfg.answer_threshold);
    let mapped = apply_adjustment(&mapping, cfg.adjustment_factor);

    let payload = match class {
        AnswerClass::Correct => mapped,
        AnswerClass::Adjusted => nudge(mapped, cfg.adjusted_answer_radius),
        AnswerClass::Wrong => miss(mapped),
        AnswerClass::HighlyInaccurate => {
            // The only branch that needs randomness; build the stream lazily
            // so the common paths stay allocation- and rng-free.
            let stream = crate::seed::fnv1a(problem.id.as_bytes()) ^ seed;
            scramble(mapped, &mut ChaCha12Rng::seed_from_u64(stream))
        }
    };
    Ok(MappedAnswer {
        delta: mapping.delta,
        payload,
        class,
        chosen_id: element.id,
    })
}

/// Nearest different symbol, reflecting downward at the top of the alphabet.
fn nudge(payload: Payload, radius: u32) -> Payload {
    match payload {
        Payload::Symbolic {
            label,
            ordinal,
            alphabet,
        } if radius > 0 && alphabet > 1 => {
            let ordinal = if ordinal + 1 < alphabet { ordinal + 1 } else { ordinal - 1 };
            Payload::Symbolic {
                label,
                ordinal,
                alphabet,
            }
        }
        other => other,
    }
}

/// Deterministically wrong: one step forward, wrapping around the alphabet.
fn miss(payload: Payload) -> Payload {
    match payload {
        Payload::Symbolic {
            label,
            ordinal,
            alphabet,
        } if alphabet > 1 => Payload::Symbolic {
            label,
            ordinal: (ordinal + 1) % alphabet,
            alphabet,
        },
        Payload::Numeric(v) => Payload::Numeric(v + 1.0),
        other => other,
    }
}

/// A seeded guess guaranteed to differ from the mapped symbol when the
/// alphabet allows it.
fn scramble(payload: Payload, rng: &mut ChaCha12Rng) -> Payload {
    match payload {
        Payload::Symbolic {
            label,
            ordinal,
            alphabet,
        } if alphabet > 1 => Payload::Symbolic {
            label,
            ordinal: (ordinal + rng.gen_range(1..alphabet)) % alphabet,
            alphabet,
        },
        Payload::Numeric(v) => Payload::Numeric(v + rng.gen_range(-5.0..5.0)),
        other => other,
    }
}
