//! The car evaluation dataset: 1728 cars described by six categorical
//! attributes and rated unacceptable / acceptable / good / very good.

use super::{DataError, DatasetMeta, LineError, LoadReport, ParseMode};
use std::path::Path;

pub const CAR_ATTRIBUTES: [&str; 6] = ["buying", "maint", "doors", "persons", "lug_boot", "safety"];

/// Attribute domains in canonical order. The position of a value doubles as
/// its ordinal in the scoring rule behind [`synth_car`].
pub const CAR_DOMAINS: [&[&str]; 6] = [
    &["vhigh", "high", "med", "low"],
    &["vhigh", "high", "med", "low"],
    &["2", "3", "4", "5more"],
    &["2", "4", "more"],
    &["small", "med", "big"],
    &["low", "med", "high"],
];

pub const CAR_CLASSES: [&str; 4] = ["unacc", "acc", "good", "vgood"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CarClass {
    Unacc,
    Acc,
    Good,
    Vgood,
}

impl CarClass {
    pub fn index(self) -> usize {
        match self {
            CarClass::Unacc => 0,
            CarClass::Acc => 1,
            CarClass::Good => 2,
            CarClass::Vgood => 3,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        [CarClass::Unacc, CarClass::Acc, CarClass::Good, CarClass::Vgood]
            .get(index)
            .copied()
    }

    pub fn as_str(self) -> &'static str {
        CAR_CLASSES[self.index()]
    }

    pub fn parse(label: &str) -> Option<Self> {
        CAR_CLASSES
            .iter()
            .position(|&c| c == label)
            .and_then(Self::from_index)
    }
}

/// One car. `values` holds the raw attribute tokens in slot order; records
/// built by the alien injector may carry tokens outside [`CAR_DOMAINS`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarRecord {
    pub values: [String; 6],
    pub class: CarClass,
}

impl CarRecord {
    /// Position of the slot's value inside its domain, or `None` for an
    /// out-of-domain (alien) token.
    pub fn value_index(&self, slot: usize) -> Option<usize> {
        CAR_DOMAINS[slot].iter().position(|&v| v == self.values[slot])
    }

    /// The namespaced reveal token for a slot, e.g. `buying=vhigh`.
    pub fn step_token(&self, slot: usize) -> String {
        format!("{}={}", CAR_ATTRIBUTES[slot], self.values[slot])
    }

    /// Serializes back to the UCI line format.
    pub fn to_line(&self) -> String {
        format!("{},{}", self.values.join(","), self.class.as_str())
    }

    /// Parses one UCI line: six attribute values and a class label.
    pub fn parse_line(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(format!("expected 7 fields, got {}", fields.len()));
        }
        let mut values: [String; 6] = Default::default();
        for (slot, field) in fields[..6].iter().enumerate() {
            if !CAR_DOMAINS[slot].contains(field) {
                return Err(format!(
                    "unexpected {} value {:?}",
                    CAR_ATTRIBUTES[slot], field
                ));
            }
            values[slot] = field.to_string();
        }
        let class = CarClass::parse(fields[6])
            .ok_or_else(|| format!("unexpected class label {:?}", fields[6]))?;
        Ok(CarRecord { values, class })
    }
}

/// Parses UCI car-evaluation text. Blank lines are ignored.
pub fn parse_car(text: &str, mode: ParseMode) -> Result<LoadReport<CarRecord>, DataError> {
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match CarRecord::parse_line(line) {
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

/// Loads a UCI `car.data` file.
pub fn load_car(path: &Path, mode: ParseMode) -> Result<LoadReport<CarRecord>, DataError> {
    parse_car(&super::read_to_string(path)?, mode)
}

/// Generates the full 6-attribute factorial (1728 records) labeled by a
/// fixed scoring rule.
///
/// The rule mirrors how the original ratings behave: capacity for two
/// persons or low safety is an immediate rejection, after that a weighted
/// sum of cheapness, comfort, and safety has to clear increasing thresholds
/// for `acc`, `good`, and `vgood` (the top two additionally require a cheap
/// car, and `vgood` requires high safety). The resulting class distribution
/// is 1212 / 382 / 70 / 64 — within six records of the classic benchmark's
/// 1210 / 384 / 69 / 65.
pub fn synth_car() -> Vec<CarRecord> {
    let mut records = Vec::with_capacity(1728);
    let mut idx = [0usize; 6];
    loop {
        let values: [String; 6] =
            std::array::from_fn(|slot| CAR_DOMAINS[slot][idx[slot]].to_string());
        records.push(CarRecord {
            values,
            class: rule_class(&idx),
        });
        // odometer-style increment over the six domains
        let mut slot = 5;
        loop {
            idx[slot] += 1;
            if idx[slot] < CAR_DOMAINS[slot].len() {
                break;
            }
            idx[slot] = 0;
            if slot == 0 {
                return records;
            }
            slot -= 1;
        }
    }
}

/// The scoring rule behind [`synth_car`], over domain ordinals.
fn rule_class(idx: &[usize; 6]) -> CarClass {
    let [buying, maint, doors, persons, lug_boot, safety] = *idx;
    if persons == 0 || safety == 0 {
        return CarClass::Unacc;
    }
    let price = buying + maint; // 0..=6, higher = cheaper
    let comfort = doors.min(2) + lug_boot + (persons - 1); // 0..=5
    let score = 3 * price + 2 * comfort + (safety - 1);
    if score < 13 {
        CarClass::Unacc
    } else if safety == 2 && score >= 19 && price >= 5 {
        CarClass::Vgood
    } else if score >= 18 && price >= 5 {
        CarClass::Good
    } else {
        CarClass::Acc
    }
}

pub fn car_meta() -> DatasetMeta {
    let mut step_vocab = Vec::new();
    for (slot, domain) in CAR_DOMAINS.iter().enumerate() {
        for value in domain.iter() {
            step_vocab.push(format!("{}={}", CAR_ATTRIBUTES[slot], value));
        }
    }
    DatasetMeta {
        name: "car",
        slot_names: CAR_ATTRIBUTES.to_vec(),
        class_labels: CAR_CLASSES.iter().map(|s| s.to_string()).collect(),
        step_vocab,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_and_serializes_a_line() {
        let r = CarRecord::parse_line("vhigh,vhigh,2,2,small,low,unacc").unwrap();
        assert_eq!(r.class, CarClass::Unacc);
        assert_eq!(r.values[0], "vhigh");
        assert_eq!(r.to_line(), "vhigh,vhigh,2,2,small,low,unacc");
        assert_eq!(r.step_token(3), "persons=2");
        assert_eq!(r.value_index(2), Some(0));
    }

    #[test]
    fn rejects_malformed_lines_with_reasons() {
        assert!(CarRecord::parse_line("vhigh,vhigh,2,2,small,low").is_err());
        assert!(CarRecord::parse_line("bus,vhigh,2,2,small,low,unacc")
            .unwrap_err()
            .contains("buying"));
        assert!(CarRecord::parse_line("vhigh,vhigh,2,2,small,low,meh")
            .unwrap_err()
            .contains("class"));
    }

    #[test]
    fn strict_mode_stops_at_the_first_bad_line() {
        let text = "vhigh,vhigh,2,2,small,low,unacc\nbus,vhigh,2,2,small,low,unacc\n";
        let err = parse_car(text, ParseMode::Strict).unwrap_err();
        assert!(matches!(err, DataError::Malformed { line: 2, .. }));
    }

    #[test]
    fn lenient_mode_skips_and_reports() {
        let text = "vhigh,vhigh,2,2,small,low,unacc\n\nbus,vhigh,2,2,small,low,unacc\nlow,low,4,4,big,high,vgood\n";
        let report = parse_car(text, ParseMode::Lenient).unwrap();
        assert_eq!(report.records.len(), 2);
        assert_eq!(report.skipped.len(), 1);
        assert_eq!(report.skipped[0].line, 3);
    }

    #[test]
    fn generated_records_cover_the_full_factorial() {
        let records = synth_car();
        assert_eq!(records.len(), 1728);
        let mut lines: Vec<String> = records.iter().map(|r| r.to_line()).collect();
        lines.sort();
        lines.dedup();
        assert_eq!(lines.len(), 1728, "every record is distinct");
    }

    #[test]
    fn generated_class_distribution_matches_the_benchmark_shape() {
        let mut counts = [0usize; 4];
        for r in synth_car() {
            counts[r.class.index()] += 1;
        }
        assert_eq!(counts, [1212, 382, 70, 64]);
    }

    #[test]
    fn two_seats_or_low_safety_is_always_unacceptable() {
        for r in synth_car() {
            if r.values[3] == "2" || r.values[5] == "low" {
                assert_eq!(r.class, CarClass::Unacc, "{}", r.to_line());
            }
        }
        // The classic worst-on-everything row as a spot check.
        let r = CarRecord::parse_line("vhigh,vhigh,2,2,small,low,unacc").unwrap();
        let generated = synth_car()
            .into_iter()
            .find(|g| g.values == r.values)
            .unwrap();
        assert_eq!(generated.class, CarClass::Unacc);
    }

    #[test]
    fn generated_text_round_trips_through_the_parser() {
        let records = synth_car();
        let text: String = records.iter().map(|r| r.to_line() + "\n").collect();
        let report = parse_car(&text, ParseMode::Strict).unwrap();
        assert_eq!(report.records, records);
        assert!(report.skipped.is_empty());
    }

    #[test]
    fn meta_lists_the_full_vocabulary() {
        let meta = car_meta();
        assert_eq!(meta.n_slots(), 6);
        assert_eq!(meta.n_classes(), 4);
        assert_eq!(meta.step_vocab.len(), 21);
        assert!(meta.step_vocab.contains(&"safety=high".to_string()));
    }

    proptest! {
        #[test]
        fn any_domain_combination_parses_round_trip(
            b in 0usize..4, m in 0usize..4, d in 0usize..4,
            p in 0usize..3, l in 0usize..3, s in 0usize..3,
            class in 0usize..4,
        ) {
            let values = [
                CAR_DOMAINS[0][b], CAR_DOMAINS[1][m], CAR_DOMAINS[2][d],
                CAR_DOMAINS[3][p], CAR_DOMAINS[4][l], CAR_DOMAINS[5][s],
            ];
            let line = format!("{},{}", values.join(","), CAR_CLASSES[class]);
            let record = CarRecord::parse_line(&line).unwrap();
            prop_assert_eq!(record.to_line(), line);
        }
    }
}
