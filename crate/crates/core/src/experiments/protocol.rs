//! The cycle engine: shuffle, slice, inject, reveal, time, report.
//!
//! Every cycle derives its own seed from the master seed, shuffles the
//! record pool, carves a warm-up slice (training data) and an evaluation
//! slice (trials), injects uncertainty into both, and runs every requested
//! (method, mode) pair over the same evaluation sequences. One trial is
//! one prediction at one reveal depth; a record with six slots contributes
//! six trials. All methods are timed by the same stopwatch around the same
//! call boundary.

use super::predict::{build_predictor, DatasetKind, PredictorKnobs};
use super::{
    error_percentage, BootstrapConfig, CycleReport, ErrorDenominator, MethodId, ModeId,
    ProtocolError, TimingMode,
};
use crate::baselines::NnConfig;
use crate::datasets::{
    car_meta, inject_alien_records, inject_deck_change, poker_meta, Alienate, CarRecord,
    DatasetMeta, PokerRecord, RevealSequence, RowCondition,
};
use crate::model::IntuitionConfig;
use crate::seed::{mix, mix_n};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::time::Instant;

/// Adjustment factor calibrated for the car protocol. With the default
/// bootstrap ranges the mapping delta lands in [2.22, 2.43]; subtracting
/// 2.3 rounds the payload displacement to zero, so answers stay on the
/// highest-priority (most frequent) class.
pub const CAR_ADJUSTMENT_FACTOR: f64 = -2.3;

/// Adjustment factor calibrated for the poker protocol: displaces answers
/// one class up from the most frequent one (from "nothing" to "one pair").
pub const POKER_ADJUSTMENT_FACTOR: f64 = -1.3;

/// A perfect score over at least this many trials, with uncertainty
/// injected, aborts the run as a harness bug.
pub const MIN_TRIALS_FOR_ZERO_GUARD: u32 = 100;

/// Full description of a benchmark run.
#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub cycles: u32,
    /// Records sliced off per cycle to train on (and to mint the intuition
    /// experience set from).
    pub warmup_per_cycle: usize,
    /// Records evaluated per cycle; each contributes one trial per slot.
    pub eval_per_cycle: usize,
    /// Fraction of rows rewritten with out-of-domain values ("unknown"
    /// rows). Zero disables injection entirely.
    pub inject_fraction: f64,
    /// Split the uninjected remainder evenly into known and hidden rows
    /// instead of leaving it all known.
    pub equal_split: bool,
    /// Share of hidden evaluation rows whose environment changes
    /// mid-reveal (poker: part of the deck is redealt). Car records have
    /// no such event; the share is ignored there.
    pub deck_change_share: f64,
    pub master_seed: u64,
    pub methods: Vec<MethodId>,
    pub modes: Vec<ModeId>,
    pub nn: NnConfig,
    pub bootstrap: BootstrapConfig,
    pub intuition: IntuitionConfig,
    pub np_availabilities: Vec<f64>,
    pub timing: TimingMode,
    pub error_denominator: ErrorDenominator,
}

impl ProtocolConfig {
    /// The car protocol: 5 cycles of 400 warm-up / 500 evaluation records.
    pub fn car_defaults(master_seed: u64) -> Self {
        ProtocolConfig {
            cycles: 5,
            warmup_per_cycle: 400,
            eval_per_cycle: 500,
            inject_fraction: 1.0 / 3.0,
            equal_split: true,
            deck_change_share: 0.0,
            master_seed,
            methods: MethodId::ALL.to_vec(),
            modes: ModeId::ALL.to_vec(),
            nn: NnConfig {
                epochs: 60,
                ..NnConfig::default()
            },
            bootstrap: BootstrapConfig::default(),
            intuition: IntuitionConfig {
                adjustment_factor: CAR_ADJUSTMENT_FACTOR,
                ..IntuitionConfig::default()
            },
            np_availabilities: vec![1.0],
            timing: TimingMode::Real,
            error_denominator: ErrorDenominator::AllTrials,
        }
    }

    /// The poker protocol: 5 cycles of 4000 warm-up / 1000 evaluation
    /// records, with deck changes on half of the hidden rows.
    pub fn poker_defaults(master_seed: u64) -> Self {
        ProtocolConfig {
            cycles: 5,
            warmup_per_cycle: 4000,
            eval_per_cycle: 1000,
            deck_change_share: 0.5,
            nn: NnConfig {
                epochs: 12,
                ..NnConfig::default()
            },
            intuition: IntuitionConfig {
                adjustment_factor: POKER_ADJUSTMENT_FACTOR,
                ..IntuitionConfig::default()
            },
            ..ProtocolConfig::car_defaults(master_seed)
        }
    }

    fn validate(&self) -> Result<(), ProtocolError> {
        if self.cycles == 0 {
            return Err(ProtocolError::BadConfig("cycles must be positive".into()));
        }
        if self.warmup_per_cycle == 0 || self.eval_per_cycle == 0 {
            return Err(ProtocolError::BadConfig(
                "warm-up and evaluation slices must be non-empty".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.inject_fraction) {
            return Err(ProtocolError::BadConfig(format!(
                "inject fraction {} outside [0, 1]",
                self.inject_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.deck_change_share) {
            return Err(ProtocolError::BadConfig(format!(
                "deck change share {} outside [0, 1]",
                self.deck_change_share
            )));
        }
        if self.np_availabilities.is_empty()
            || self
                .np_availabilities
                .iter()
                .any(|a| !(0.0..=1.0).contains(a))
        {
            return Err(ProtocolError::BadConfig(
                "normal-process availabilities must be a non-empty list of probabilities".into(),
            ));
        }
        self.bootstrap.validate()?;
        self.intuition.validate()?;
        Ok(())
    }
}

/// What the engine needs from a record type beyond alienation.
trait BenchRecord: Clone + Alienate {
    const KIND: DatasetKind;
    fn class_index(&self) -> usize;
    fn reveal_tokens(&self) -> Vec<String>;
    /// Applies a mid-reveal environment change where the dataset supports
    /// one, returning the step index at which it strikes.
    fn environment_change(&mut self, rng: &mut ChaCha12Rng)
        -> Result<Option<usize>, ProtocolError>;
}

impl BenchRecord for CarRecord {
    const KIND: DatasetKind = DatasetKind::Car;

    fn class_index(&self) -> usize {
        self.class.index()
    }

    fn reveal_tokens(&self) -> Vec<String> {
        (0..self.values.len()).map(|s| self.step_token(s)).collect()
    }

    fn environment_change(
        &mut self,
        _rng: &mut ChaCha12Rng,
    ) -> Result<Option<usize>, ProtocolError> {
        Ok(None)
    }
}

impl BenchRecord for PokerRecord {
    const KIND: DatasetKind = DatasetKind::Poker;

    fn class_index(&self) -> usize {
        self.class as usize
    }

    fn reveal_tokens(&self) -> Vec<String> {
        (0..self.cards.len()).map(|s| self.step_token(s)).collect()
    }

    fn environment_change(
        &mut self,
        rng: &mut ChaCha12Rng,
    ) -> Result<Option<usize>, ProtocolError> {
        // At least two cards stay, so the change always strikes mid-reveal.
        let from_step = rng.gen_range(2..=4);
        let seed: u64 = rng.gen();
        let (cards, class) = inject_deck_change(self.cards, from_step, seed)?;
        self.cards = cards;
        self.class = class;
        Ok(Some(from_step))
    }
}

/// Runs the benchmark over car records.
pub fn run_car_protocol(
    records: &[CarRecord],
    cfg: &ProtocolConfig,
) -> Result<Vec<CycleReport>, ProtocolError> {
    run_protocol(records, cfg, &car_meta())
}

/// Runs the benchmark over poker records.
pub fn run_poker_protocol(
    records: &[PokerRecord],
    cfg: &ProtocolConfig,
) -> Result<Vec<CycleReport>, ProtocolError> {
    run_protocol(records, cfg, &poker_meta())
}

fn run_protocol<R: BenchRecord>(
    records: &[R],
    cfg: &ProtocolConfig,
    meta: &DatasetMeta,
) -> Result<Vec<CycleReport>, ProtocolError> {
    cfg.validate()?;
    let needed = cfg.warmup_per_cycle + cfg.eval_per_cycle;
    if records.len() < needed {
        return Err(ProtocolError::NotEnoughRecords {
            needed,
            have: records.len(),
        });
    }
    // Canonical order regardless of how the request was phrased, and
    // duplicates collapse.
    let methods: Vec<MethodId> = MethodId::ALL
        .into_iter()
        .filter(|m| cfg.methods.contains(m))
        .collect();
    let modes: Vec<ModeId> = ModeId::ALL
        .into_iter()
        .filter(|m| cfg.modes.contains(m))
        .collect();
    if methods.is_empty() || modes.is_empty() {
        return Err(ProtocolError::BadConfig(
            "at least one method and one mode must be requested".into(),
        ));
    }

    let mut reports = Vec::new();
    for cycle in 1..=cfg.cycles {
        let cseed = cfg.master_seed.wrapping_add(u64::from(cycle));

        let mut order: Vec<usize> = (0..records.len()).collect();
        order.shuffle(&mut ChaCha12Rng::seed_from_u64(mix(cseed, "shuffle")));
        let warm_rows: Vec<R> = order[..cfg.warmup_per_cycle]
            .iter()
            .map(|&i| records[i].clone())
            .collect();
        let eval_rows: Vec<R> = order[cfg.warmup_per_cycle..needed]
            .iter()
            .map(|&i| records[i].clone())
            .collect();

        let warm = inject_alien_records(
            warm_rows,
            cfg.inject_fraction,
            cfg.equal_split,
            mix(cseed, "inject-warm"),
        )?;
        let eval = inject_alien_records(
            eval_rows,
            cfg.inject_fraction,
            cfg.equal_split,
            mix(cseed, "inject-eval"),
        )?;

        // Warm-up sequences carry no mid-reveal events: training data is a
        // stable record of the past.
        let warm_seqs: Vec<RevealSequence> = warm
            .into_iter()
            .enumerate()
            .map(|(i, (row, condition))| {
                RevealSequence::new(
                    format!("{}-c{}-w{}", meta.name, cycle, i),
                    row.class_index(),
                    row.reveal_tokens(),
                    condition,
                    None,
                )
            })
            .collect();

        let mut event_rng = ChaCha12Rng::seed_from_u64(mix(cseed, "events-eval"));
        let mut eval_seqs = Vec::with_capacity(cfg.eval_per_cycle);
        for (i, (mut row, condition)) in eval.into_iter().enumerate() {
            let mut change_at = None;
            if condition == RowCondition::Hidden
                && cfg.deck_change_share > 0.0
                && event_rng.gen::<f64>() < cfg.deck_change_share
            {
                change_at = row.environment_change(&mut event_rng)?;
            }
            eval_seqs.push(RevealSequence::new(
                format!("{}-c{}-{}", meta.name, cycle, i),
                row.class_index(),
                row.reveal_tokens(),
                condition,
                change_at,
            ));
        }

        for &method in &methods {
            // The seed deliberately ignores the mode: the intuition method
            // must come out identical untrained and trained.
            let knobs = PredictorKnobs {
                nn: cfg.nn.clone(),
                bootstrap: cfg.bootstrap.clone(),
                intuition: cfg.intuition.clone(),
                np_availabilities: cfg.np_availabilities.clone(),
                seed: mix_n(cseed, "predictor", method as u64),
            };
            for &mode in &modes {
                let mut predictor =
                    build_predictor(R::KIND, method, mode, &warm_seqs, meta, &knobs)?;
                let mut mistakes = 0u32;
                let mut trials = 0u32;
                let mut total_ns: u128 = 0;
                for seq in &eval_seqs {
                    for depth in 1..=seq.n_slots() {
                        let start = Instant::now();
                        let answer = predictor.predict(seq, depth)?;
                        total_ns += start.elapsed().as_nanos();
                        trials += 1;
                        if answer != Some(seq.class) {
                            mistakes += 1;
                        }
                    }
                }
                if cfg.inject_fraction > 0.0
                    && trials >= MIN_TRIALS_FOR_ZERO_GUARD
                    && mistakes == 0
                {
                    return Err(ProtocolError::ZeroErrorCell {
                        method: method.name(),
                        mode: mode.name(),
                        cycle,
                    });
                }
                let error_pct = error_percentage(mistakes, trials, cfg.error_denominator)?;
                let mean_elapsed_ns = match cfg.timing {
                    TimingMode::Real => (total_ns / u128::from(trials)) as u64,
                    TimingMode::Zero => 0,
                };
                reports.push(CycleReport {
                    dataset: meta.name.to_string(),
                    cycle,
                    method,
                    mode,
                    trials,
                    mistakes,
                    error_pct,
                    mean_elapsed_ns,
                });
            }
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{synth_car, synth_poker, CarClass};
    use crate::experiments::emit_csv;

    fn small_car_cfg() -> ProtocolConfig {
        ProtocolConfig {
            cycles: 2,
            warmup_per_cycle: 60,
            eval_per_cycle: 20,
            nn: NnConfig {
                epochs: 2,
                ..NnConfig::default()
            },
            timing: TimingMode::Zero,
            ..ProtocolConfig::car_defaults(99)
        }
    }

    #[test]
    fn car_smoke_run_has_canonical_shape() {
        let records = synth_car();
        let reports = run_car_protocol(&records, &small_car_cfg()).unwrap();
        // 2 cycles x 3 methods x 2 modes.
        assert_eq!(reports.len(), 12);
        for r in &reports {
            assert_eq!(r.dataset, "car");
            assert_eq!(r.trials, 20 * 6);
            assert_eq!(r.mean_elapsed_ns, 0);
            assert!(r.error_pct > 0.0);
        }
        let per_cycle: Vec<(u32, MethodId, ModeId)> =
            reports.iter().map(|r| (r.cycle, r.method, r.mode)).collect();
        let mut expected = Vec::new();
        for cycle in 1..=2 {
            for method in MethodId::ALL {
                for mode in ModeId::ALL {
                    expected.push((cycle, method, mode));
                }
            }
        }
        assert_eq!(per_cycle, expected);
    }

    #[test]
    fn identical_configs_produce_identical_reports() {
        let records = synth_car();
        let cfg = small_car_cfg();
        let a = run_car_protocol(&records, &cfg).unwrap();
        let b = run_car_protocol(&records, &cfg).unwrap();
        assert_eq!(emit_csv(&a), emit_csv(&b));
    }

    #[test]
    fn poker_smoke_run_with_deck_changes() {
        let records = synth_poker(600, 7);
        let cfg = ProtocolConfig {
            cycles: 1,
            warmup_per_cycle: 300,
            eval_per_cycle: 60,
            nn: NnConfig {
                epochs: 1,
                ..NnConfig::default()
            },
            timing: TimingMode::Zero,
            ..ProtocolConfig::poker_defaults(3)
        };
        let reports = run_poker_protocol(&records, &cfg).unwrap();
        assert_eq!(reports.len(), 6);
        for r in &reports {
            assert_eq!(r.dataset, "poker");
            assert_eq!(r.trials, 60 * 5);
        }
    }

    #[test]
    fn refuses_to_run_without_enough_records() {
        let records: Vec<CarRecord> = synth_car().into_iter().take(50).collect();
        let err = run_car_protocol(&records, &small_car_cfg()).unwrap_err();
        assert!(matches!(
            err,
            ProtocolError::NotEnoughRecords { needed: 80, have: 50 }
        ));
    }

    #[test]
    fn zero_error_cell_is_rejected_as_suspicious() {
        // All records share one class, so the intuition method (which
        // answers the most frequent class under the car calibration) never
        // misses. With injection on and >= 100 trials, that must abort.
        let records: Vec<CarRecord> = synth_car()
            .into_iter()
            .filter(|r| r.class == CarClass::Unacc)
            .take(60)
            .collect();
        let cfg = ProtocolConfig {
            cycles: 1,
            warmup_per_cycle: 30,
            eval_per_cycle: 20,
            methods: vec![MethodId::Intuition],
            modes: vec![ModeId::Untrained],
            timing: TimingMode::Zero,
            ..ProtocolConfig::car_defaults(5)
        };
        let err = run_car_protocol(&records, &cfg).unwrap_err();
        assert!(matches!(
            err,
            ProtocolError::ZeroErrorCell {
                method: "intuition",
                mode: "untrained",
                cycle: 1,
            }
        ));
    }

    #[test]
    fn clean_runs_allow_perfect_scores() {
        // Same degenerate data, but with injection off the guard stands
        // down: a perfect score on clean, single-class data is legitimate.
        let records: Vec<CarRecord> = synth_car()
            .into_iter()
            .filter(|r| r.class == CarClass::Unacc)
            .take(60)
            .collect();
        let cfg = ProtocolConfig {
            cycles: 1,
            warmup_per_cycle: 30,
            eval_per_cycle: 20,
            inject_fraction: 0.0,
            methods: vec![MethodId::Intuition],
            modes: vec![ModeId::Untrained],
            timing: TimingMode::Zero,
            ..ProtocolConfig::car_defaults(5)
        };
        let reports = run_car_protocol(&records, &cfg).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].error_pct, 0.0);
        assert_eq!(reports[0].mistakes, 0);
    }

    #[test]
    fn config_validation_catches_nonsense() {
        let records = synth_car();
        for tweak in [
            |c: &mut ProtocolConfig| c.cycles = 0,
            |c: &mut ProtocolConfig| c.eval_per_cycle = 0,
            |c: &mut ProtocolConfig| c.inject_fraction = 1.5,
            |c: &mut ProtocolConfig| c.deck_change_share = -0.1,
            |c: &mut ProtocolConfig| c.np_availabilities = vec![],
            |c: &mut ProtocolConfig| c.np_availabilities = vec![2.0],
            |c: &mut ProtocolConfig| c.methods = vec![],
        ] {
            let mut cfg = small_car_cfg();
            tweak(&mut cfg);
            assert!(run_car_protocol(&records, &cfg).is_err());
        }
    }

    #[test]
    fn intuition_error_is_mode_independent() {
        let records = synth_car();
        let cfg = ProtocolConfig {
            methods: vec![MethodId::Intuition],
            ..small_car_cfg()
        };
        let reports = run_car_protocol(&records, &cfg).unwrap();
        assert_eq!(reports.len(), 4);
        for pair in reports.chunks(2) {
            assert_eq!(pair[0].cycle, pair[1].cycle);
            assert_eq!(pair[0].error_pct, pair[1].error_pct);
            assert_eq!(pair[0].mistakes, pair[1].mistakes);
        }
    }
}
