//! Metrics, model evaluation on held-out data and the n-gram sweep.

mod sweep;

use std::fmt::Write as _;

use crate::corpus::Dataset;
use crate::error::{Error, Result};
use crate::features::{NGramRange, TfidfModel};
use crate::label::Label;
use crate::models::{ModelSpec, TrainedModel};
use crate::textprep::Cleaner;
use crate::vocab::string_vocabulary;

pub use sweep::{ngram_sweep, SweepCell, SweepConfig, SweepTable, METRIC_COLUMNS};

string_vocabulary! {
    pub enum Averaging as "averaging" {
        BinaryPositive => "binary_positive",
        Macro => "macro",
        Weighted => "weighted",
    }
}

/// Counts with the positive class as offensive / threat.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// The same counts with the negative class treated as positive.
    fn flipped(&self) -> ConfusionMatrix {
        ConfusionMatrix {
            tp: self.tn,
            fp: self.fn_,
            fn_: self.fp,
            tn: self.tp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn confusion_matrix(y_true: &[Label], y_pred: &[Label]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Validation(format!(
            "{} true labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::Validation("no labels to compare".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (t, p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (Label::Positive, Label::Positive) => cm.tp += 1,
            (Label::Negative, Label::Positive) => cm.fp += 1,
            (Label::Positive, Label::Negative) => cm.fn_ += 1,
            (Label::Negative, Label::Negative) => cm.tn += 1,
        }
    }
    Ok(cm)
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Precision, recall and F1 of the matrix's positive class.
fn class_scores(cm: &ConfusionMatrix) -> (f64, f64, f64) {
    let p = ratio(cm.tp, cm.tp + cm.fp);
    let r = ratio(cm.tp, cm.tp + cm.fn_);
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

pub fn metrics(cm: &ConfusionMatrix, averaging: Averaging) -> Result<Metrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Validation("confusion matrix is empty".into()));
    }
    let accuracy = ratio(cm.tp + cm.tn, total);
    let pos = class_scores(cm);
    let (precision, recall, f1) = match averaging {
        Averaging::BinaryPositive => pos,
        Averaging::Macro | Averaging::Weighted => {
            let neg = class_scores(&cm.flipped());
            let (wp, wn) = if averaging == Averaging::Macro {
                (0.5, 0.5)
            } else {
                (ratio(cm.tp + cm.fn_, total), ratio(cm.tn + cm.fp, total))
            };
            (
                wp * pos.0 + wn * neg.0,
                wp * pos.1 + wn * neg.1,
                wp * pos.2 + wn * neg.2,
            )
        }
    };
    Ok(Metrics {
        accuracy,
        precision,
        recall,
        f1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub averaging: Averaging,
    /// Echoed in the report when the test set came from a seeded split.
    pub split_seed: Option<u64>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            averaging: Averaging::BinaryPositive,
            split_seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
    pub averaging: Averaging,
    pub spec: ModelSpec,
    pub ngram_range: NGramRange,
    pub min_df: usize,
    pub max_features: Option<usize>,
    pub split_seed: Option<u64>,
    pub test_size: usize,
}

impl EvalReport {
    /// Flat `key=value` lines in a fixed order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("model", self.spec.kind.to_string());
        kv("seed", self.spec.seed.to_string());
        for (name, value) in &self.spec.hyperparameters {
            kv(&format!("hyperparameter.{name}"), value.to_string());
        }
        kv("ngram_range", self.ngram_range.to_string());
        kv("min_df", self.min_df.to_string());
        kv(
            "max_features",
            self.max_features.map_or("none".into(), |m| m.to_string()),
        );
        kv(
            "split_seed",
            self.split_seed.map_or("none".into(), |s| s.to_string()),
        );
        kv("averaging", self.averaging.to_string());
        kv("test_size", self.test_size.to_string());
        kv("tp", self.confusion.tp.to_string());
        kv("fp", self.confusion.fp.to_string());
        kv("fn", self.confusion.fn_.to_string());
        kv("tn", self.confusion.tn.to_string());
        kv("accuracy", format!("{:.6}", self.metrics.accuracy));
        kv("precision", format!("{:.6}", self.metrics.precision));
        kv("recall", format!("{:.6}", self.metrics.recall));
        kv("f1", format!("{:.6}", self.metrics.f1));
        s
    }
}

/// Cleans, vectorizes and classifies every test post, then scores the predictions.
pub fn evaluate(
    model: &TrainedModel,
    vectorizer: &TfidfModel,
    cleaner: &Cleaner,
    test: &Dataset,
    options: EvalOptions,
) -> Result<EvalReport> {
    if vectorizer.dimension() != model.dimension {
        return Err(Error::Validation(format!(
            "vectorizer dimension {} does not match model dimension {}",
            vectorizer.dimension(),
            model.dimension
        )));
    }
    let y_true = test.labels()?;
    let y_pred = test
        .items()
        .iter()
        .map(|item| model.predict(&vectorizer.transform_tokens(&cleaner.tokens(&item.post.text))))
        .collect::<Result<Vec<_>>>()?;
    let confusion = confusion_matrix(&y_true, &y_pred)?;
    Ok(EvalReport {
        confusion,
        metrics: metrics(&confusion, options.averaging)?,
        averaging: options.averaging,
        spec: model.spec.clone(),
        ngram_range: vectorizer.ngram_range(),
        min_df: vectorizer.min_df(),
        max_features: vectorizer.max_features(),
        split_seed: options.split_seed,
        test_size: test.len(),
    })
}
