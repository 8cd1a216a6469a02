//! Logistic regression and the linear SVM: dense weights, sparse inputs,
//! seeded mini-batch (sub)gradient descent.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::features::SparseVector;
use crate::label::Label;

use super::format::{In, Out};

#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub weights: Vec<f64>,
    pub bias: f64,
}

/// Objective value and its (sub)gradient with respect to weights and bias.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGradient {
    pub loss: f64,
    pub weights: Vec<f64>,
    pub bias: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SgdSettings {
    pub learning_rate: f64,
    pub lambda: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn l2(w: &[f64]) -> f64 {
    w.iter().map(|v| v * v).sum::<f64>()
}

impl Linear {
    pub fn zeros(dimension: usize) -> Self {
        Linear {
            weights: vec![0.0; dimension],
            bias: 0.0,
        }
    }

    pub fn decision(&self, x: &SparseVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }

    pub(crate) fn fit_logistic(xs: &[SparseVector], ys: &[Label], dimension: usize, s: SgdSettings) -> Self {
        let mut model = Linear::zeros(dimension);
        model.descend(xs, ys, s, logistic_indexed);
        model
    }

    pub(crate) fn fit_hinge(xs: &[SparseVector], ys: &[Label], dimension: usize, s: SgdSettings) -> Self {
        let mut model = Linear::zeros(dimension);
        model.descend(xs, ys, s, hinge_indexed);
        model
    }

    fn descend(
        &mut self,
        xs: &[SparseVector],
        ys: &[Label],
        s: SgdSettings,
        objective: fn(&Linear, &[SparseVector], &[Label], &[usize], f64) -> LinearGradient,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        let mut order: Vec<usize> = (0..xs.len()).collect();
        for _ in 0..s.epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(s.batch_size) {
                let g = objective(self, xs, ys, batch, s.lambda);
                for (w, gw) in self.weights.iter_mut().zip(&g.weights) {
                    *w -= s.learning_rate * gw;
                }
                self.bias -= s.learning_rate * g.bias;
            }
        }
    }

    pub(crate) fn write(&self, out: &mut Out) {
        out.reals("bias", &[self.bias]);
        out.reals("weights", &self.weights);
    }

    pub(crate) fn read(input: &mut In, dimension: usize) -> Result<Self> {
        let bias = input.expect_reals("bias", 1)?[0];
        let weights = input.expect_reals("weights", dimension)?;
        Ok(Linear { weights, bias })
    }
}

fn logistic_indexed(m: &Linear, xs: &[SparseVector], ys: &[Label], idx: &[usize], lambda: f64) -> LinearGradient {
    let n = idx.len() as f64;
    let mut grad = LinearGradient {
        loss: 0.0,
        weights: m.weights.iter().map(|w| lambda * w).collect(),
        bias: 0.0,
    };
    for &i in idx {
        let z = m.decision(&xs[i]);
        let y = if ys[i].is_positive() { 1.0 } else { 0.0 };
        grad.loss += (softplus(z) - y * z) / n;
        let r = (sigmoid(z) - y) / n;
        for &(j, v) in xs[i].entries() {
            grad.weights[j] += r * v;
        }
        grad.bias += r;
    }
    grad.loss += 0.5 * lambda * l2(&m.weights);
    grad
}

fn hinge_indexed(m: &Linear, xs: &[SparseVector], ys: &[Label], idx: &[usize], lambda: f64) -> LinearGradient {
    let n = idx.len() as f64;
    let mut grad = LinearGradient {
        loss: 0.0,
        weights: m.weights.iter().map(|w| lambda * w).collect(),
        bias: 0.0,
    };
    for &i in idx {
        let y = ys[i].sign();
        let margin = y * m.decision(&xs[i]);
        if margin < 1.0 {
            grad.loss += (1.0 - margin) / n;
            for &(j, v) in xs[i].entries() {
                grad.weights[j] -= y * v / n;
            }
            grad.bias -= y / n;
        }
    }
    grad.loss += 0.5 * lambda * l2(&m.weights);
    grad
}

/// Mean cross-entropy plus (λ/2)‖w‖² and its gradient over the whole set.
pub fn logistic_objective(model: &Linear, xs: &[SparseVector], ys: &[Label], lambda: f64) -> LinearGradient {
    let idx: Vec<usize> = (0..xs.len()).collect();
    logistic_indexed(model, xs, ys, &idx, lambda)
}

/// Mean hinge loss plus (λ/2)‖w‖² and a subgradient over the whole set.
pub fn hinge_objective(model: &Linear, xs: &[SparseVector], ys: &[Label], lambda: f64) -> LinearGradient {
    let idx: Vec<usize> = (0..xs.len()).collect();
    hinge_indexed(model, xs, ys, &idx, lambda)
}
