//! A small feedforward network: one sigmoid hidden layer, softmax output,
//! cross-entropy loss, trained by minibatch gradient descent.
//!
//! Deliberately hand-rolled and flat (`Vec<f64>` in row-major order) — the
//! inputs are tiny one-hot vectors and the point of the baseline is to be
//! auditable, not fast. Gradients are analytic and are verified against
//! central finite differences in the tests.

use super::{encoding::OneHot, BaselineError, Prediction, PredictError};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::fmt::Write as _;
use std::time::Instant;

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct NnConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch: usize,
}

impl Default for NnConfig {
    fn default() -> Self {
        NnConfig {
            hidden: 16,
            learning_rate: 0.3,
            epochs: 30,
            batch: 32,
        }
    }
}

/// The network. `w1` is `hidden x input`, `w2` is `output x hidden`, both
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NnModel {
    pub input: usize,
    pub hidden: usize,
    pub output: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub trained: bool,
}

/// Parameter gradients, same shapes as the model.
#[derive(Debug, Clone)]
pub struct NnGradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl NnModel {
    /// Fresh network with weights drawn uniformly from `[-0.5, 0.5)`.
    pub fn random(input: usize, hidden: usize, output: usize, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect()
        };
        NnModel {
            input,
            hidden,
            output,
            w1: draw(hidden * input),
            b1: draw(hidden),
            w2: draw(output * hidden),
            b2: draw(output),
            trained: false,
        }
    }

    /// Hidden activations and output probabilities for one input.
    pub fn forward(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        debug_assert_eq!(x.len(), self.input);
        let mut h = vec![0.0; self.hidden];
        for (j, hj) in h.iter_mut().enumerate() {
            let mut z = self.b1[j];
            let row = &self.w1[j * self.input..(j + 1) * self.input];
            for (w, xi) in row.iter().zip(x) {
                z += w * xi;
            }
            *hj = sigmoid(z);
        }
        let mut logits = vec![0.0; self.output];
        for (k, lk) in logits.iter_mut().enumerate() {
            let mut z = self.b2[k];
            let row = &self.w2[k * self.hidden..(k + 1) * self.hidden];
            for (w, hj) in row.iter().zip(&h) {
                z += w * hj;
            }
            *lk = z;
        }
        softmax_in_place(&mut logits);
        (h, logits)
    }

    /// Cross-entropy loss of one example.
    pub fn loss(&self, x: &[f64], y: usize) -> f64 {
        let (_, probs) = self.forward(x);
        -probs[y].ln()
    }

    /// Analytic gradients of [`NnModel::loss`] for one example.
    pub fn gradients(&self, x: &[f64], y: usize) -> NnGradients {
        let (h, probs) = self.forward(x);

        // d loss / d logits = probs - onehot(y)
        let mut dlogits = probs;
        dlogits[y] -= 1.0;

        let mut gw2 = vec![0.0; self.output * self.hidden];
        for k in 0..self.output {
            for j in 0..self.hidden {
                gw2[k * self.hidden + j] = dlogits[k] * h[j];
            }
        }
        let gb2 = dlogits.clone();

        // back through the hidden layer
        let mut dh = vec![0.0; self.hidden];
        for j in 0..self.hidden {
            let mut acc = 0.0;
            for k in 0..self.output {
                acc += self.w2[k * self.hidden + j] * dlogits[k];
            }
            dh[j] = acc * h[j] * (1.0 - h[j]); // sigmoid'
        }

        let mut gw1 = vec![0.0; self.hidden * self.input];
        for j in 0..self.hidden {
            for (i, xi) in x.iter().enumerate() {
                gw1[j * self.input + i] = dh[j] * xi;
            }
        }
        NnGradients {
            w1: gw1,
            b1: dh,
            w2: gw2,
            b2: gb2,
        }
    }

    fn step(&mut self, grads: &NnGradients, scale: f64) {
        for (w, g) in self.w1.iter_mut().zip(&grads.w1) {
            *w -= scale * g;
        }
        for (b, g) in self.b1.iter_mut().zip(&grads.b1) {
            *b -= scale * g;
        }
        for (w, g) in self.w2.iter_mut().zip(&grads.w2) {
            *w -= scale * g;
        }
        for (b, g) in self.b2.iter_mut().zip(&grads.b2) {
            *b -= scale * g;
        }
    }

    /// Serializes the model to a line-oriented text format with exact
    /// (shortest round-trip) float representations.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "nn v1");
        let _ = writeln!(out, "dims {} {} {}", self.input, self.hidden, self.output);
        let _ = writeln!(out, "trained {}", u8::from(self.trained));
        for (name, values, cols) in [
            ("w1", &self.w1, self.input),
            ("b1", &self.b1, self.b1.len()),
            ("w2", &self.w2, self.hidden),
            ("b2", &self.b2, self.b2.len()),
        ] {
            let _ = writeln!(out, "{name}");
            for row in values.chunks(cols.max(1)) {
                let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
        out
    }

    /// Parses the format produced by [`NnModel::to_text`].
    pub fn from_text(text: &str) -> Result<Self, BaselineError> {
        let mut lines = text.lines().enumerate();

        expect_tag(&mut lines, "nn v1")?;
        let (dims_line_no, dims_line) = expect_tag(&mut lines, "dims")?;
        let dims: Vec<usize> = dims_line
            .split_whitespace()
            .skip(1)
            .map(|t| t.parse())
            .collect::<Result<_, _>>()
            .map_err(|e| BaselineError::MalformedModel {
                line: dims_line_no,
                reason: format!("bad dims: {e}"),
            })?;
        let [input, hidden, output]: [usize; 3] =
            dims.try_into().map_err(|_| BaselineError::MalformedModel {
                line: dims_line_no,
                reason: "dims needs exactly three numbers".into(),
            })?;
        let (tr_line_no, tr_line) = expect_tag(&mut lines, "trained")?;
        let trained = match tr_line.split_whitespace().nth(1) {
            Some("0") => false,
            Some("1") => true,
            other => {
                return Err(BaselineError::MalformedModel {
                    line: tr_line_no,
                    reason: format!("bad trained flag {other:?}"),
                })
            }
        };

        let w1 = read_float_block(&mut lines, "w1", hidden * input)?;
        let b1 = read_float_block(&mut lines, "b1", hidden)?;
        let w2 = read_float_block(&mut lines, "w2", output * hidden)?;
        let b2 = read_float_block(&mut lines, "b2", output)?;
        Ok(NnModel {
            input,
            hidden,
            output,
            w1,
            b1,
            w2,
            b2,
            trained,
        })
    }
}

type NumberedLines<'a> = std::iter::Enumerate<std::str::Lines<'a>>;

/// Advances to the next non-blank line and checks it starts with `tag`.
fn expect_tag(lines: &mut NumberedLines, tag: &str) -> Result<(usize, String), BaselineError> {
    for (idx, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == tag || line.starts_with(&format!("{tag} ")) {
            return Ok((idx + 1, line.to_string()));
        }
        return Err(BaselineError::MalformedModel {
            line: idx + 1,
            reason: format!("expected {tag:?}, found {line:?}"),
        });
    }
    Err(BaselineError::MalformedModel {
        line: 0,
        reason: format!("missing {tag:?} section"),
    })
}

/// Reads a `tag` header followed by exactly `len` whitespace-separated floats.
fn read_float_block(
    lines: &mut NumberedLines,
    tag: &str,
    len: usize,
) -> Result<Vec<f64>, BaselineError> {
    expect_tag(lines, tag)?;
    let mut values = Vec::with_capacity(len);
    while values.len() < len {
        let Some((idx, raw)) = lines.next() else {
            return Err(BaselineError::MalformedModel {
                line: 0,
                reason: format!("truncated {tag} block"),
            });
        };
        for token in raw.split_whitespace() {
            let v: f64 = token.parse().map_err(|e| BaselineError::MalformedModel {
                line: idx + 1,
                reason: format!("bad value {token:?}: {e}"),
            })?;
            values.push(v);
        }
    }
    if values.len() != len {
        return Err(BaselineError::MalformedModel {
            line: 0,
            reason: format!("{tag} block has {} values, expected {len}", values.len()),
        });
    }
    Ok(values)
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn softmax_in_place(logits: &mut [f64]) {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for l in logits.iter_mut() {
        *l = (*l - max).exp();
        sum += *l;
    }
    for l in logits.iter_mut() {
        *l /= sum;
    }
}

/// Trains in place: `epochs` passes of seeded-shuffled minibatches,
/// averaging gradients within each batch.
pub fn train_nn(
    model: &mut NnModel,
    samples: &[(Vec<f64>, usize)],
    cfg: &NnConfig,
    seed: u64,
) -> Result<(), BaselineError> {
    if samples.is_empty() {
        return Err(BaselineError::NoTrainingData);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let batch = cfg.batch.max(1);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            let mut acc: Option<NnGradients> = None;
            for &i in chunk {
                let (x, y) = &samples[i];
                let g = model.gradients(x, *y);
                match &mut acc {
                    None => acc = Some(g),
                    Some(a) => {
                        for (t, s) in a.w1.iter_mut().zip(&g.w1) {
                            *t += s;
                        }
                        for (t, s) in a.b1.iter_mut().zip(&g.b1) {
                            *t += s;
                        }
                        for (t, s) in a.w2.iter_mut().zip(&g.w2) {
                            *t += s;
                        }
                        for (t, s) in a.b2.iter_mut().zip(&g.b2) {
                            *t += s;
                        }
                    }
                }
            }
            if let Some(acc) = acc {
                model.step(&acc, cfg.learning_rate / chunk.len() as f64);
            }
        }
    }
    model.trained = true;
    Ok(())
}

/// Encodes a slot view and runs the network, timing the whole thing.
/// Returns the refusal error untouched when the encoder rejects the view.
pub fn predict_nn(
    model: &NnModel,
    encoder: &OneHot,
    view: &[Option<&str>],
) -> Result<Prediction, PredictError> {
    let start = Instant::now();
    let x = encoder.encode(view)?;
    debug_assert_eq!(x.len(), model.input);
    let (_, probs) = model.forward(&x);
    let (class, confidence) = argmax(&probs);
    Ok(Prediction {
        class,
        confidence,
        elapsed: start.elapsed(),
    })
}

/// First index of the maximum value.
pub(crate) fn argmax(values: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    (best, values[best])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy_model(seed: u64) -> NnModel {
        NnModel::random(6, 5, 3, seed)
    }

    fn toy_input(seed: u64, n: usize) -> Vec<f64> {
        // Qualified call: both glob imports above carry a `Rng` trait.
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0))
            .collect()
    }

    #[test]
    fn forward_produces_a_distribution() {
        let model = toy_model(1);
        let (h, probs) = model.forward(&toy_input(2, 6));
        assert!(h.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(probs.iter().all(|&p| p > 0.0));
    }

    /// Central-difference check of every parameter's analytic gradient.
    fn max_relative_gradient_error(model: &mut NnModel, x: &[f64], y: usize) -> f64 {
        const EPS: f64 = 1e-5;
        let analytic = model.gradients(x, y);
        let mut worst: f64 = 0.0;
        for (pick, len) in [(0usize, model.w1.len()), (1, model.b1.len()), (2, model.w2.len()), (3, model.b2.len())] {
            for i in 0..len {
                let read = |m: &NnModel| match pick {
                    0 => m.w1[i],
                    1 => m.b1[i],
                    2 => m.w2[i],
                    _ => m.b2[i],
                };
                let write = |m: &mut NnModel, v: f64| match pick {
                    0 => m.w1[i] = v,
                    1 => m.b1[i] = v,
                    2 => m.w2[i] = v,
                    _ => m.b2[i] = v,
                };
                let orig = read(model);
                write(model, orig + EPS);
                let up = model.loss(x, y);
                write(model, orig - EPS);
                let down = model.loss(x, y);
                write(model, orig);
                let numeric = (up - down) / (2.0 * EPS);
                let analytic_v = match pick {
                    0 => analytic.w1[i],
                    1 => analytic.b1[i],
                    2 => analytic.w2[i],
                    _ => analytic.b2[i],
                };
                let denom = numeric.abs().max(analytic_v.abs()).max(1e-8);
                worst = worst.max((numeric - analytic_v).abs() / denom);
            }
        }
        worst
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        for seed in 0..4 {
            let mut model = toy_model(seed);
            let x = toy_input(seed + 100, 6);
            let worst = max_relative_gradient_error(&mut model, &x, (seed % 3) as usize);
            assert!(worst < 1e-4, "seed {seed}: relative error {worst}");
        }
    }

    #[test]
    fn training_learns_a_separable_toy_problem() {
        // Two classes keyed by which half of the input is lit.
        let mut samples = Vec::new();
        for i in 0..6 {
            let mut x = vec![0.0; 6];
            x[i] = 1.0;
            samples.push((x, usize::from(i >= 3)));
        }
        let mut model = NnModel::random(6, 8, 2, 3);
        let before: f64 = samples.iter().map(|(x, y)| model.loss(x, *y)).sum();
        train_nn(
            &mut model,
            &samples,
            &NnConfig {
                hidden: 8,
                learning_rate: 0.5,
                epochs: 200,
                batch: 3,
            },
            9,
        )
        .unwrap();
        let after: f64 = samples.iter().map(|(x, y)| model.loss(x, *y)).sum();
        assert!(after < before / 10.0, "loss {before} -> {after}");
        for (x, y) in &samples {
            let (_, probs) = model.forward(x);
            assert_eq!(argmax(&probs).0, *y);
        }
        assert!(model.trained);
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let samples: Vec<(Vec<f64>, usize)> = (0..20)
            .map(|i| (toy_input(i, 6), (i % 3) as usize))
            .collect();
        let cfg = NnConfig::default();
        let mut a = toy_model(5);
        let mut b = toy_model(5);
        train_nn(&mut a, &samples, &cfg, 7).unwrap();
        train_nn(&mut b, &samples, &cfg, 7).unwrap();
        assert_eq!(a, b);
        let mut c = toy_model(5);
        train_nn(&mut c, &samples, &cfg, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empty_training_sets_are_rejected() {
        let mut model = toy_model(1);
        assert!(matches!(
            train_nn(&mut model, &[], &NnConfig::default(), 0),
            Err(BaselineError::NoTrainingData)
        ));
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let mut model = NnModel::random(7, 4, 3, 11);
        model.trained = true;
        let text = model.to_text();
        let back = NnModel::from_text(&text).unwrap();
        assert_eq!(back, model);
        // Bit-exactness, not just approximate equality.
        for (a, b) in model.w1.iter().zip(&back.w1) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn malformed_model_files_are_reported() {
        assert!(NnModel::from_text("not a model").is_err());
        let mut text = toy_model(0).to_text();
        text = text.replace("dims 6 5 3", "dims 6 5");
        assert!(matches!(
            NnModel::from_text(&text),
            Err(BaselineError::MalformedModel { .. })
        ));
        let text = toy_model(0).to_text().replace("trained 0", "trained yes");
        assert!(NnModel::from_text(&text).is_err());
    }

    #[test]
    fn predictions_go_through_the_encoder() {
        let encoder = OneHot::car(false);
        let model = NnModel::random(encoder.dim(), 4, 4, 2);
        let view = vec![Some("buying=low"), None, None, None, None, None];
        let p = predict_nn(&model, &encoder, &view).unwrap();
        assert!(p.class < 4);
        assert!(p.confidence > 0.0);

        let alien = vec![Some("x0abc"), None, None, None, None, None];
        assert!(matches!(
            predict_nn(&model, &encoder, &alien),
            Err(PredictError::UnexpectedValue { .. })
        ));
        assert_eq!(
            predict_nn(&model, &encoder, &vec![None; 6]),
            Err(PredictError::AllMasked)
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn gradcheck_holds_across_random_models(seed in any::<u64>(), y in 0usize..3) {
            let mut model = toy_model(seed);
            let x = toy_input(seed ^ 0xabcdef, 6);
            let worst = max_relative_gradient_error(&mut model, &x, y);
            prop_assert!(worst < 1e-4, "relative error {}", worst);
        }
    }
}
