//! Incremental reveal of a record, one slot per step, plus the JSON-lines
//! log format the harness uses to make every shown value auditable.

use super::{DataError, RowCondition};
use serde::{Deserialize, Serialize};
use std::io::{self, BufRead, Write};

/// One revealed slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevealStep {
    pub slot: usize,
    pub token: String,
}

/// The full reveal schedule for one record: which token shows up at each
/// step, under what row condition, and whether the environment changed
/// partway through.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevealSequence {
    pub record_id: String,
    /// Ground-truth class (never shown to predictors).
    pub class: usize,
    pub steps: Vec<RevealStep>,
    pub condition: RowCondition,
    /// Step index at which the environment changed under the record, if any.
    pub change_at: Option<usize>,
}

impl RevealSequence {
    /// Natural-order schedule: slot `i` is revealed at step `i`.
    pub fn new(
        record_id: String,
        class: usize,
        tokens: Vec<String>,
        condition: RowCondition,
        change_at: Option<usize>,
    ) -> Self {
        let steps = tokens
            .into_iter()
            .enumerate()
            .map(|(slot, token)| RevealStep { slot, token })
            .collect();
        RevealSequence {
            record_id,
            class,
            steps,
            condition,
            change_at,
        }
    }

    pub fn n_slots(&self) -> usize {
        self.steps.len()
    }

    /// What a predictor sees after `depth` steps: one entry per slot,
    /// `None` while the slot is still hidden.
    pub fn view(&self, depth: usize) -> Vec<Option<&str>> {
        let mut view = vec![None; self.steps.len()];
        for step in &self.steps[..depth.min(self.steps.len())] {
            view[step.slot] = Some(step.token.as_str());
        }
        view
    }

    /// Iterates over `(depth, view)` for every prefix, depth `1..=n_slots`.
    pub fn prefixes(&self) -> impl Iterator<Item = (usize, Vec<Option<&str>>)> {
        (1..=self.steps.len()).map(move |depth| (depth, self.view(depth)))
    }

    /// Flattens the sequence into log lines, one per step.
    pub fn to_log_lines(&self) -> Vec<RevealLogLine> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, step)| RevealLogLine {
                record: self.record_id.clone(),
                step: i,
                slot: step.slot,
                token: step.token.clone(),
                condition: self.condition,
                event: match self.change_at {
                    Some(at) if at == i => Some("deck_change".to_string()),
                    _ => None,
                },
            })
            .collect()
    }
}

/// One line of the reveal log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevealLogLine {
    pub record: String,
    pub step: usize,
    pub slot: usize,
    pub token: String,
    pub condition: RowCondition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<String>,
}

/// Writes sequences as JSON lines, one step per line.
pub fn write_reveal_log<W: Write>(mut w: W, sequences: &[RevealSequence]) -> io::Result<()> {
    for seq in sequences {
        for line in seq.to_log_lines() {
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Reads a JSON-lines reveal log back. Blank lines are ignored.
pub fn read_reveal_log<R: BufRead>(r: R) -> Result<Vec<RevealLogLine>, DataError> {
    let mut lines = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line.map_err(|source| DataError::Io {
            path: "<reveal log>".to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str(&line).map_err(|e| DataError::Malformed {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        lines.push(parsed);
    }
    Ok(lines)
}
