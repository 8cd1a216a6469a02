//! Multinomial naive Bayes with Laplace smoothing.

use crate::error::Result;
use crate::features::SparseVector;
use crate::label::Label;

use super::format::{In, Out};
use super::softmax2;

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayes {
    /// ln P(class), indexed by [`Label::index`].
    pub log_prior: [f64; 2],
    /// ln P(feature | class), one row of length `dimension` per class.
    pub log_likelihood: [Vec<f64>; 2],
}

impl NaiveBayes {
    pub fn fit(xs: &[SparseVector], ys: &[Label], dimension: usize, alpha: f64) -> Self {
        let mut counts = [vec![0.0; dimension], vec![0.0; dimension]];
        let mut docs = [0usize; 2];
        for (x, y) in xs.iter().zip(ys) {
            let c = y.index();
            docs[c] += 1;
            for &(j, v) in x.entries() {
                counts[c][j] += v;
            }
        }
        let n = xs.len() as f64;
        let log_prior = [(docs[0] as f64 / n).ln(), (docs[1] as f64 / n).ln()];
        let log_likelihood = counts.map(|row| {
            let total: f64 = row.iter().sum::<f64>() + alpha * dimension as f64;
            row.into_iter().map(|c| ((c + alpha) / total).ln()).collect()
        });
        NaiveBayes {
            log_prior,
            log_likelihood,
        }
    }

    /// Unnormalized log joint ln P(class) + Σ x_j ln P(j | class).
    pub fn joint_log_likelihood(&self, x: &SparseVector) -> [f64; 2] {
        [0, 1].map(|c| {
            self.log_prior[c]
                + x.entries()
                    .iter()
                    .map(|&(j, v)| v * self.log_likelihood[c][j])
                    .sum::<f64>()
        })
    }

    pub fn predict_proba(&self, x: &SparseVector) -> [f64; 2] {
        softmax2(self.joint_log_likelihood(x))
    }

    pub(crate) fn write(&self, out: &mut Out) {
        out.reals("log_prior", &self.log_prior);
        out.reals("log_likelihood_negative", &self.log_likelihood[0]);
        out.reals("log_likelihood_positive", &self.log_likelihood[1]);
    }

    pub(crate) fn read(input: &mut In, dimension: usize) -> Result<Self> {
        let prior = input.expect_reals("log_prior", 2)?;
        let neg = input.expect_reals("log_likelihood_negative", dimension)?;
        let pos = input.expect_reals("log_likelihood_positive", dimension)?;
        Ok(NaiveBayes {
            log_prior: [prior[0], prior[1]],
            log_likelihood: [neg, pos],
        })
    }
}
