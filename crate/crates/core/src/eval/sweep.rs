use std::fmt::Write as _;

use rayon::prelude::*;

use super::{confusion_matrix, metrics, Averaging, ConfusionMatrix, Metrics};
use crate::corpus::{split, Dataset};
use crate::error::{Error, Result};
use crate::features::{NGramRange, TfidfModel};
use crate::models::{train, ModelSpec};
use crate::textprep::{Cleaner, Document};

/// Metric column order within each n-gram group.
pub const METRIC_COLUMNS: [&str; 4] = ["Acc.", "Recall", "Prec.", "F-score"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub specs: Vec<ModelSpec>,
    pub ranges: Vec<NGramRange>,
    pub split_seed: u64,
    pub train_fraction: f64,
    pub min_df: usize,
    pub max_features: Option<usize>,
    pub averaging: Averaging,
}

impl SweepConfig {
    pub fn new(specs: Vec<ModelSpec>, ranges: Vec<NGramRange>, split_seed: u64) -> Self {
        SweepConfig {
            specs,
            ranges,
            split_seed,
            train_fraction: 0.8,
            min_df: 1,
            max_features: None,
            averaging: Averaging::BinaryPositive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// Resolved specs, one per row.
    pub specs: Vec<ModelSpec>,
    pub ranges: Vec<NGramRange>,
    /// `cells[row][group]`.
    pub cells: Vec<Vec<SweepCell>>,
    pub config: SweepConfig,
    pub train_size: usize,
    pub test_size: usize,
}

fn fmt_metric(v: f64) -> String {
    format!("{v:.4}")
}

impl SweepTable {
    pub fn cell(&self, row: usize, group: usize) -> &SweepCell {
        &self.cells[row][group]
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["Model".to_string()];
        for r in &self.ranges {
            for m in METRIC_COLUMNS {
                h.push(format!("{} {m}", r.group_name()));
            }
        }
        h
    }

    fn row_values(&self, row: usize) -> Vec<String> {
        let mut v = vec![self.specs[row].kind.display_name().to_string()];
        for c in &self.cells[row] {
            let m = c.metrics;
            v.extend([m.accuracy, m.recall, m.precision, m.f1].map(fmt_metric));
        }
        v
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header()).expect("in-memory write");
        for row in 0..self.specs.len() {
            w.write_record(self.row_values(row)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    /// Column-aligned table with an n-gram group header line.
    pub fn to_text(&self) -> String {
        let rows: Vec<Vec<String>> = (0..self.specs.len()).map(|r| self.row_values(r)).collect();
        let mut sub = vec![String::new()];
        for _ in &self.ranges {
            sub.extend(METRIC_COLUMNS.iter().map(|s| s.to_string()));
        }
        let ncol = sub.len();
        let mut width = vec![0; ncol];
        for line in rows.iter().chain(std::iter::once(&sub)) {
            for (i, cell) in line.iter().enumerate() {
                width[i] = width[i].max(cell.chars().count());
            }
        }
        width[0] = width[0].max("Model".len());
        let group_width = |g: usize| (1..=4).map(|k| width[1 + 4 * g + k - 1]).sum::<usize>() + 3 * 2;

        let mut out = String::new();
        let _ = write!(out, "{:<w$}", "Model", w = width[0]);
        for (g, r) in self.ranges.iter().enumerate() {
            let _ = write!(out, " | {:<w$}", r.group_name(), w = group_width(g));
        }
        out.push('\n');
        let render = |out: &mut String, line: &[String]| {
            let _ = write!(out, "{:<w$}", line[0], w = width[0]);
            for g in 0..self.ranges.len() {
                out.push_str(" | ");
                let cells: Vec<String> = (0..4)
                    .map(|k| format!("{:>w$}", line[1 + 4 * g + k], w = width[1 + 4 * g + k]))
                    .collect();
                out.push_str(&cells.join("  "));
            }
            out.push('\n');
        };
        render(&mut out, &sub);
        for line in &rows {
            render(&mut out, line);
        }
        out
    }

    /// Resolved configuration echo, one `key=value` per line.
    pub fn config_text(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        let _ = writeln!(s, "split_seed={}", c.split_seed);
        let _ = writeln!(s, "train_fraction={}", c.train_fraction);
        let _ = writeln!(s, "train_size={}", self.train_size);
        let _ = writeln!(s, "test_size={}", self.test_size);
        let _ = writeln!(s, "min_df={}", c.min_df);
        let _ = writeln!(
            s,
            "max_features={}",
            c.max_features.map_or("none".into(), |m| m.to_string())
        );
        let _ = writeln!(s, "averaging={}", c.averaging);
        let ranges: Vec<String> = self.ranges.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(s, "ngram_ranges={}", ranges.join(","));
        for spec in &self.specs {
            let _ = writeln!(s, "model={spec}");
        }
        s
    }
}

fn documents(cleaner: &Cleaner, dataset: &Dataset) -> Vec<Document> {
    dataset
        .items()
        .par_iter()
        .map(|item| cleaner.document(&item.post))
        .collect()
}

/// For every (spec, range): fit the vectorizer on the training split, train,
/// and score on the test split. Cells run in parallel; the table is a pure
/// function of the inputs.
pub fn ngram_sweep(dataset: &Dataset, cleaner: &Cleaner, config: &SweepConfig) -> Result<SweepTable> {
    if config.specs.is_empty() || config.ranges.is_empty() {
        return Err(Error::Validation("sweep needs at least one model and one n-gram range".into()));
    }
    let specs = config
        .specs
        .iter()
        .map(|s| s.resolved())
        .collect::<Result<Vec<_>>>()?;
    let (train_set, test_set) = split(dataset, config.train_fraction, config.split_seed)?;
    let train_docs = documents(cleaner, &train_set);
    let test_docs = documents(cleaner, &test_set);
    let y_train = train_set.labels()?;
    let y_test = test_set.labels()?;

    let features = config
        .ranges
        .par_iter()
        .map(|&range| {
            let tfidf = TfidfModel::fit(&train_docs, range, config.min_df, config.max_features)?;
            Ok((tfidf.transform_corpus(&train_docs), tfidf.transform_corpus(&test_docs)))
        })
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..specs.len())
        .flat_map(|r| (0..config.ranges.len()).map(move |g| (r, g)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(r, g)| {
            let (x_train, x_test) = &features[g];
            let model = train(&specs[r], x_train, &y_train)?;
            let y_pred = model.predict_batch(x_test)?;
            let confusion = confusion_matrix(&y_test, &y_pred)?;
            Ok(SweepCell {
                confusion,
                metrics: metrics(&confusion, config.averaging)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cells = results
        .chunks(config.ranges.len())
        .map(|c| c.to_vec())
        .collect();
    Ok(SweepTable {
        specs,
        ranges: config.ranges.clone(),
        cells,
        config: config.clone(),
        train_size: train_set.len(),
        test_size: test_set.len(),
    })
}
