//! Random forest (bagged Gini trees) and gradient-boosted regression trees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::features::SparseVector;
use crate::label::Label;

use super::format::{In, Out};
use super::linear::sigmoid;
use super::tree::{grow_classifier, grow_regressor, ClassificationTree, Columns, GrowSettings, RegressionTree};

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub trees: Vec<ClassificationTree>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ForestSettings {
    pub trees: usize,
    pub bootstrap: bool,
    pub grow: GrowSettings,
    pub seed: u64,
}

impl Forest {
    /// Tree seeds are drawn up front so parallel construction matches the
    /// sequential result.
    pub(crate) fn fit(xs: &[SparseVector], ys: &[Label], s: ForestSettings) -> Self {
        let mut master = ChaCha8Rng::seed_from_u64(s.seed);
        let seeds: Vec<u64> = (0..s.trees).map(|_| master.random()).collect();
        let n = xs.len();
        let trees = seeds
            .into_par_iter()
            .map(|seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let samples: Vec<usize> = if s.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                grow_classifier(xs, ys, samples, s.grow, &mut rng)
            })
            .collect();
        Forest { trees }
    }

    /// Majority vote; ties go to the negative class.
    pub fn predict(&self, x: &SparseVector) -> Label {
        let positive = self.trees.iter().filter(|t| t.predict(x).is_positive()).count();
        Label::from_bool(2 * positive > self.trees.len())
    }

    pub(crate) fn write(&self, out: &mut Out) {
        out.line("trees", [self.trees.len().to_string()]);
        for t in &self.trees {
            t.write(out);
        }
    }

    pub(crate) fn read(input: &mut In, dimension: usize) -> Result<Self> {
        let count: usize = input.expect_one("trees")?;
        let trees = (0..count)
            .map(|_| ClassificationTree::read(input, dimension))
            .collect::<Result<_>>()?;
        Ok(Forest { trees })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Boosted {
    /// Log-odds of the positive class in the training labels.
    pub base_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<RegressionTree>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct BoostSettings {
    pub rounds: usize,
    pub learning_rate: f64,
    pub grow: GrowSettings,
}

impl Boosted {
    pub(crate) fn fit(xs: &[SparseVector], ys: &[Label], s: BoostSettings) -> Self {
        let y: Vec<f64> = ys.iter().map(|l| if l.is_positive() { 1.0 } else { 0.0 }).collect();
        let prior = y.iter().sum::<f64>() / y.len() as f64;
        let base_score = (prior / (1.0 - prior)).ln();
        let mut score = vec![base_score; xs.len()];
        let cols = Columns::new(xs);
        let mut trees = Vec::with_capacity(s.rounds);
        for _ in 0..s.rounds {
            let residual: Vec<f64> = y.iter().zip(&score).map(|(y, f)| y - sigmoid(*f)).collect();
            let tree = grow_regressor(xs, &cols, &residual, s.grow);
            for (f, x) in score.iter_mut().zip(xs) {
                *f += s.learning_rate * tree.predict(x);
            }
            trees.push(tree);
        }
        Boosted {
            base_score,
            learning_rate: s.learning_rate,
            trees,
        }
    }

    pub fn decision(&self, x: &SparseVector) -> f64 {
        self.base_score + self.learning_rate * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    pub fn predict_proba(&self, x: &SparseVector) -> [f64; 2] {
        let p = sigmoid(self.decision(x));
        [1.0 - p, p]
    }

    pub(crate) fn write(&self, out: &mut Out) {
        out.reals("base_score", &[self.base_score]);
        out.reals("learning_rate", &[self.learning_rate]);
        out.line("rounds", [self.trees.len().to_string()]);
        for t in &self.trees {
            t.write(out);
        }
    }

    pub(crate) fn read(input: &mut In, dimension: usize) -> Result<Self> {
        let base_score = input.expect_reals("base_score", 1)?[0];
        let learning_rate = input.expect_reals("learning_rate", 1)?[0];
        let count: usize = input.expect_one("rounds")?;
        let trees = (0..count)
            .map(|_| RegressionTree::read(input, dimension))
            .collect::<Result<_>>()?;
        Ok(Boosted {
            base_score,
            learning_rate,
            trees,
        })
    }
}
