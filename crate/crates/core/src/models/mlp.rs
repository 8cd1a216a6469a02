//! One-hidden-layer perceptron: ReLU hidden units, softmax over the two
//! classes, mean cross-entropy, seeded mini-batch gradient descent.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::features::SparseVector;
use crate::label::Label;

use super::format::{In, Out};
use super::softmax2;

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub hidden: usize,
    /// Input weights, `dimension` rows of `hidden` values (row j = feature j).
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// Output weights, `hidden` rows of two values.
    pub w2: Vec<f64>,
    pub b2: [f64; 2],
}

/// Dense gradient of the mean cross-entropy, laid out like [`Mlp`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradient {
    pub loss: f64,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: [f64; 2],
}

/// Gradient with only the touched input rows materialized.
struct SparseGradient {
    loss: f64,
    w1: BTreeMap<usize, Vec<f64>>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: [f64; 2],
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct MlpSettings {
    pub hidden: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Mlp {
    /// Normal weights scaled by 1/√fan_in, zero biases.
    pub fn init(dimension: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s1 = 1.0 / (dimension as f64).sqrt();
        let s2 = 1.0 / (hidden as f64).sqrt();
        let w1 = (0..dimension * hidden)
            .map(|_| rng.sample::<f64, _>(StandardNormal) * s1)
            .collect();
        let w2 = (0..hidden * 2)
            .map(|_| rng.sample::<f64, _>(StandardNormal) * s2)
            .collect();
        Mlp {
            hidden,
            w1,
            b1: vec![0.0; hidden],
            w2,
            b2: [0.0; 2],
        }
    }

    pub fn dimension(&self) -> usize {
        self.w1.len() / self.hidden
    }

    /// Hidden pre-activations and output logits.
    fn forward(&self, x: &SparseVector) -> (Vec<f64>, [f64; 2]) {
        let h = self.hidden;
        let mut pre = self.b1.clone();
        for &(j, v) in x.entries() {
            for (a, w) in pre.iter_mut().zip(&self.w1[j * h..(j + 1) * h]) {
                *a += v * w;
            }
        }
        let mut logits = self.b2;
        for (k, a) in pre.iter().enumerate() {
            let r = a.max(0.0);
            logits[0] += r * self.w2[2 * k];
            logits[1] += r * self.w2[2 * k + 1];
        }
        (pre, logits)
    }

    pub fn predict_proba(&self, x: &SparseVector) -> [f64; 2] {
        softmax2(self.forward(x).1)
    }

    fn gradient(&self, xs: &[SparseVector], ys: &[Label], idx: &[usize]) -> SparseGradient {
        let h = self.hidden;
        let n = idx.len() as f64;
        let mut g = SparseGradient {
            loss: 0.0,
            w1: BTreeMap::new(),
            b1: vec![0.0; h],
            w2: vec![0.0; 2 * h],
            b2: [0.0; 2],
        };
        for &i in idx {
            let x = &xs[i];
            let (pre, logits) = self.forward(x);
            let max = logits[0].max(logits[1]);
            let lse = max + ((logits[0] - max).exp() + (logits[1] - max).exp()).ln();
            let y = ys[i].index();
            g.loss += (lse - logits[y]) / n;
            let p = softmax2(logits);
            let mut dz = [p[0] / n, p[1] / n];
            dz[y] -= 1.0 / n;
            g.b2[0] += dz[0];
            g.b2[1] += dz[1];
            let mut da = vec![0.0; h];
            for k in 0..h {
                let r = pre[k].max(0.0);
                g.w2[2 * k] += r * dz[0];
                g.w2[2 * k + 1] += r * dz[1];
                if pre[k] > 0.0 {
                    da[k] = self.w2[2 * k] * dz[0] + self.w2[2 * k + 1] * dz[1];
                }
            }
            for (b, d) in g.b1.iter_mut().zip(&da) {
                *b += d;
            }
            for &(j, v) in x.entries() {
                let row = g.w1.entry(j).or_insert_with(|| vec![0.0; h]);
                for (w, d) in row.iter_mut().zip(&da) {
                    *w += v * d;
                }
            }
        }
        g
    }

    pub(crate) fn fit(xs: &[SparseVector], ys: &[Label], dimension: usize, s: MlpSettings) -> Self {
        let mut model = Mlp::init(dimension, s.hidden, s.seed);
        // Shuffling uses its own stream so initialization does not depend on it.
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed.wrapping_add(1));
        let mut order: Vec<usize> = (0..xs.len()).collect();
        let h = s.hidden;
        let lr = s.learning_rate;
        for _ in 0..s.epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(s.batch_size) {
                let g = model.gradient(xs, ys, batch);
                for (j, row) in g.w1 {
                    for (w, d) in model.w1[j * h..(j + 1) * h].iter_mut().zip(row) {
                        *w -= lr * d;
                    }
                }
                for (w, d) in model.b1.iter_mut().zip(&g.b1) {
                    *w -= lr * d;
                }
                for (w, d) in model.w2.iter_mut().zip(&g.w2) {
                    *w -= lr * d;
                }
                model.b2[0] -= lr * g.b2[0];
                model.b2[1] -= lr * g.b2[1];
            }
        }
        model
    }

    pub(crate) fn write(&self, out: &mut Out) {
        out.line("hidden", [self.hidden.to_string()]);
        out.reals("w1", &self.w1);
        out.reals("b1", &self.b1);
        out.reals("w2", &self.w2);
        out.reals("b2", &self.b2);
    }

    pub(crate) fn read(input: &mut In, dimension: usize) -> Result<Self> {
        let hidden: usize = input.expect_one("hidden")?;
        if hidden == 0 {
            return Err(input.error("hidden layer must be non-empty"));
        }
        let w1 = input.expect_reals("w1", dimension * hidden)?;
        let b1 = input.expect_reals("b1", hidden)?;
        let w2 = input.expect_reals("w2", 2 * hidden)?;
        let b2 = input.expect_reals("b2", 2)?;
        Ok(Mlp {
            hidden,
            w1,
            b1,
            w2,
            b2: [b2[0], b2[1]],
        })
    }
}

/// Mean cross-entropy over the whole set and its dense gradient.
pub fn mlp_objective(model: &Mlp, xs: &[SparseVector], ys: &[Label]) -> MlpGradient {
    let idx: Vec<usize> = (0..xs.len()).collect();
    let g = model.gradient(xs, ys, &idx);
    let h = model.hidden;
    let mut w1 = vec![0.0; model.w1.len()];
    for (j, row) in g.w1 {
        w1[j * h..(j + 1) * h].copy_from_slice(&row);
    }
    MlpGradient {
        loss: g.loss,
        w1,
        b1: g.b1,
        w2: g.w2,
        b2: g.b2,
    }
}
