//! A discrete hidden Markov model whose states are aligned with the class
//! labels: state `j` means "this record belongs to class `j`".
//!
//! Training is closed-form counting with add-one smoothing — records never
//! switch class mid-reveal, so the only transitions ever observed are
//! self-transitions and the smoothed transition matrix comes out close to
//! the identity. Prediction runs the forward algorithm over the revealed
//! prefix and reads the class off the final state distribution.

use super::{encoding::SymbolTable, nn::argmax, BaselineError, Prediction, PredictError};
use std::fmt::Write as _;
use std::time::Instant;

/// The model. `trans` and `emit` are row-stochastic: `trans[i][j]` is the
/// probability of moving from state `i` to state `j`, `emit[s][o]` of
/// emitting symbol `o` from state `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmModel {
    pub n_states: usize,
    pub init: Vec<f64>,
    pub trans: Vec<Vec<f64>>,
    pub emit: Vec<Vec<f64>>,
    pub symbols: SymbolTable,
    pub trained: bool,
}

/// A maximally ignorant model: uniform prior, uniform transitions, uniform
/// emissions. Its forward pass keeps every state equally likely, so its
/// argmax prediction is always state zero.
pub fn uniform_hmm(n_states: usize, symbols: SymbolTable) -> HmmModel {
    let n_symbols = symbols.len();
    HmmModel {
        n_states,
        init: vec![1.0 / n_states as f64; n_states],
        trans: vec![vec![1.0 / n_states as f64; n_states]; n_states],
        emit: vec![vec![1.0 / n_symbols as f64; n_symbols]; n_states],
        symbols,
        trained: false,
    }
}

/// Trains by maximum-likelihood counting with add-one smoothing.
///
/// Each sequence is a record's symbol ids plus its class; the class pins
/// the hidden state for every step of that sequence.
pub fn train_hmm(
    sequences: &[(Vec<usize>, usize)],
    n_states: usize,
    symbols: SymbolTable,
) -> Result<HmmModel, BaselineError> {
    if sequences.is_empty() {
        return Err(BaselineError::NoTrainingData);
    }
    let n_symbols = symbols.len();
    let mut init_counts = vec![0u64; n_states];
    let mut trans_counts = vec![vec![0u64; n_states]; n_states];
    let mut emit_counts = vec![vec![0u64; n_symbols]; n_states];
    for (obs, class) in sequences {
        if *class >= n_states {
            return Err(BaselineError::BadTrainingSequence(format!(
                "class {class} outside 0..{n_states}"
            )));
        }
        init_counts[*class] += 1;
        if !obs.is_empty() {
            trans_counts[*class][*class] += obs.len() as u64 - 1;
        }
        for &o in obs {
            if o >= n_symbols {
                return Err(BaselineError::BadTrainingSequence(format!(
                    "symbol id {o} outside 0..{n_symbols}"
                )));
            }
            emit_counts[*class][o] += 1;
        }
    }

    let smooth = |counts: &[u64]| -> Vec<f64> {
        let total: u64 = counts.iter().sum();
        let denom = total as f64 + counts.len() as f64;
        counts.iter().map(|&c| (c as f64 + 1.0) / denom).collect()
    };
    Ok(HmmModel {
        n_states,
        init: smooth(&init_counts),
        trans: trans_counts.iter().map(|row| smooth(row)).collect(),
        emit: emit_counts.iter().map(|row| smooth(row)).collect(),
        symbols,
        trained: true,
    })
}

/// The forward algorithm: returns the unnormalized joint
/// `alpha[j] = P(observations, final state = j)`. An empty observation
/// sequence returns the prior.
///
/// Sequences here are at most a handful of steps, so no scaling is needed —
/// the smallest possible joint is far above the underflow threshold.
pub fn forward(model: &HmmModel, observations: &[usize]) -> Vec<f64> {
    let mut filter = HmmFilter::start(model);
    for &o in observations {
        filter.step(o);
    }
    filter.into_alpha()
}

/// Incremental forward filtering, one revealed symbol at a time.
///
/// Carrying the filter across reveals and recomputing from scratch give
/// identical numbers; the filter exists so a live consumer can retain its
/// belief state instead of replaying the prefix.
#[derive(Debug, Clone)]
pub struct HmmFilter<'a> {
    model: &'a HmmModel,
    alpha: Vec<f64>,
    steps: usize,
}

impl<'a> HmmFilter<'a> {
    pub fn start(model: &'a HmmModel) -> Self {
        HmmFilter {
            model,
            alpha: model.init.clone(),
            steps: 0,
        }
    }

    /// Rebuilds a filter from a previously saved belief state, for callers
    /// that persist `(alpha, steps)` between sessions rather than holding
    /// the borrow open. Panics if `alpha` does not match the state count.
    pub fn resume(model: &'a HmmModel, alpha: Vec<f64>, steps: usize) -> Self {
        assert_eq!(alpha.len(), model.n_states, "alpha length != state count");
        HmmFilter {
            model,
            alpha,
            steps,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Absorbs one observed symbol and returns the updated alpha.
    pub fn step(&mut self, symbol: usize) -> &[f64] {
        let m = self.model;
        if self.steps == 0 {
            for (j, a) in self.alpha.iter_mut().enumerate() {
                *a *= m.emit[j][symbol];
            }
        } else {
            let mut next = vec![0.0; m.n_states];
            for (j, n) in next.iter_mut().enumerate() {
                let mut acc = 0.0;
                for i in 0..m.n_states {
                    acc += self.alpha[i] * m.trans[i][j];
                }
                *n = acc * m.emit[j][symbol];
            }
            self.alpha = next;
        }
        self.steps += 1;
        &self.alpha
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn into_alpha(self) -> Vec<f64> {
        self.alpha
    }

    /// Current argmax state and its share of the posterior.
    pub fn class(&self) -> (usize, f64) {
        let (best, value) = argmax(&self.alpha);
        let total: f64 = self.alpha.iter().sum();
        (best, if total > 0.0 { value / total } else { 0.0 })
    }
}

/// Runs the forward algorithm over a revealed prefix and predicts the
/// argmax state. Ties resolve to the lowest state index, which for the
/// uniform untrained model means class zero.
pub fn predict_hmm(model: &HmmModel, observations: &[usize]) -> Result<Prediction, PredictError> {
    if observations.is_empty() {
        return Err(PredictError::AllMasked);
    }
    let start = Instant::now();
    let mut filter = HmmFilter::start(model);
    for &o in observations {
        filter.step(o);
    }
    let (class, confidence) = filter.class();
    Ok(Prediction {
        class,
        confidence,
        elapsed: start.elapsed(),
    })
}

impl HmmModel {
    /// Serializes to a line-oriented text format (exact float round-trip),
    /// symbol table included so the file is self-contained.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "hmm v1");
        let _ = writeln!(out, "states {}", self.n_states);
        let _ = writeln!(out, "trained {}", u8::from(self.trained));
        let _ = writeln!(
            out,
            "symtab {} oov {}",
            self.symbols.vocab().len(),
            u8::from(self.symbols.has_oov())
        );
        for token in self.symbols.vocab() {
            let _ = writeln!(out, "{token}");
        }
        let row_line = |row: &[f64]| -> String {
            row.iter()
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(out, "init\n{}", row_line(&self.init));
        let _ = writeln!(out, "trans");
        for row in &self.trans {
            let _ = writeln!(out, "{}", row_line(row));
        }
        let _ = writeln!(out, "emit");
        for row in &self.emit {
            let _ = writeln!(out, "{}", row_line(row));
        }
        out
    }

    /// Parses the format produced by [`HmmModel::to_text`].
    pub fn from_text(text: &str) -> Result<Self, BaselineError> {
        let mut lines = text.lines().enumerate().peekable();
        let bad = |line: usize, reason: String| BaselineError::MalformedModel { line, reason };
        let mut next_line = |what: &str| -> Result<(usize, &str), BaselineError> {
            lines
                .next()
                .map(|(i, l)| (i + 1, l.trim()))
                .ok_or_else(|| bad(0, format!("missing {what}")))
        };

        let (n, header) = next_line("header")?;
        if header != "hmm v1" {
            return Err(bad(n, format!("expected \"hmm v1\", found {header:?}")));
        }
        let (n, states_line) = next_line("states")?;
        let n_states: usize = states_line
            .strip_prefix("states ")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(n, format!("bad states line {states_line:?}")))?;
        let (n, trained_line) = next_line("trained flag")?;
        let trained = match trained_line {
            "trained 0" => false,
            "trained 1" => true,
            other => return Err(bad(n, format!("bad trained line {other:?}"))),
        };
        let (n, symtab_line) = next_line("symtab")?;
        let (vocab_len, has_oov) = symtab_line
            .strip_prefix("symtab ")
            .and_then(|rest| {
                let mut it = rest.split_whitespace();
                let len: usize = it.next()?.parse().ok()?;
                if it.next()? != "oov" {
                    return None;
                }
                let oov = match it.next()? {
                    "0" => false,
                    "1" => true,
                    _ => return None,
                };
                Some((len, oov))
            })
            .ok_or_else(|| bad(n, format!("bad symtab line {symtab_line:?}")))?;
        let mut vocab = Vec::with_capacity(vocab_len);
        for _ in 0..vocab_len {
            let (_, token) = next_line("symbol")?;
            vocab.push(token.to_string());
        }
        let symbols = SymbolTable::new(&vocab, has_oov);
        let n_symbols = symbols.len();

        let mut read_rows = |tag: &str, rows: usize, cols: usize| -> Result<Vec<Vec<f64>>, BaselineError> {
            let (n, line) = next_line(tag)?;
            if line != tag {
                return Err(bad(n, format!("expected {tag:?}, found {line:?}")));
            }
            let mut out = Vec::with_capacity(rows);
            for _ in 0..rows {
                let (n, line) = next_line("matrix row")?;
                let row: Vec<f64> = line
                    .split_whitespace()
                    .map(|t| t.parse())
                    .collect::<Result<_, _>>()
                    .map_err(|e| bad(n, format!("bad value: {e}")))?;
                if row.len() != cols {
                    return Err(bad(n, format!("expected {cols} values, got {}", row.len())));
                }
                out.push(row);
            }
            Ok(out)
        };

        let init = read_rows("init", 1, n_states)?.remove(0);
        let trans = read_rows("trans", n_states, n_states)?;
        let emit = read_rows("emit", n_states, n_symbols)?;
        Ok(HmmModel {
            n_states,
            init,
            trans,
            emit,
            symbols,
            trained,
        })
    }
}
