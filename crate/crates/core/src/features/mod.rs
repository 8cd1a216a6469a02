//! Word n-gram extraction and TF-IDF featurization.
//!
//! Weights use raw term counts, the smoothed inverse document frequency
//! `ln((1 + N) / (1 + df)) + 1`, and L2 normalization of each document
//! vector.

mod sparse;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::textprep::Document;

pub use sparse::SparseVector;

/// Separator between the tokens of an n-gram. Cleaned tokens never contain it.
pub const NGRAM_JOINER: char = '_';

const FORMAT_TAG: &str = "hausa-guard-tfidf";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NGramRange {
    min_n: usize,
    max_n: usize,
}

impl NGramRange {
    pub const UNIGRAMS: NGramRange = NGramRange { min_n: 1, max_n: 1 };
    pub const BIGRAMS: NGramRange = NGramRange { min_n: 1, max_n: 2 };
    pub const TRIGRAMS: NGramRange = NGramRange { min_n: 1, max_n: 3 };

    pub fn new(min_n: usize, max_n: usize) -> Result<Self> {
        if min_n < 1 || min_n > max_n || max_n > 3 {
            return Err(Error::Validation(format!(
                "invalid n-gram range {min_n}..{max_n} (need 1 <= min <= max <= 3)"
            )));
        }
        Ok(NGramRange { min_n, max_n })
    }

    /// The range `1..=max_n`.
    pub fn up_to(max_n: usize) -> Result<Self> {
        NGramRange::new(1, max_n)
    }

    pub fn min_n(&self) -> usize {
        self.min_n
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// Column-group name used in sweep tables.
    pub fn group_name(&self) -> String {
        match (self.min_n, self.max_n) {
            (1, 1) => "Unigrams".into(),
            (1, 2) => "Bigrams".into(),
            (1, 3) => "Trigrams".into(),
            (a, b) => format!("{a}..{b}-grams"),
        }
    }
}

impl fmt::Display for NGramRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.min_n, self.max_n)
    }
}

impl FromStr for NGramRange {
    type Err = Error;

    /// Accepts `a..b` or a single `n` meaning `1..n`.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::Validation(format!("invalid n-gram range '{s}'")))
        };
        match s.split_once("..") {
            Some((a, b)) => NGramRange::new(parse(a)?, parse(b)?),
            None => NGramRange::up_to(parse(s)?),
        }
    }
}

/// All contiguous n-token windows for each n in the range, joined by `_`.
pub fn extract_ngrams(tokens: &[String], range: NGramRange) -> Vec<String> {
    let mut out = Vec::new();
    for n in range.min_n..=range.max_n {
        if tokens.len() < n {
            continue;
        }
        out.extend(tokens.windows(n).map(|w| w.join("_")));
    }
    out
}

/// A fitted TF-IDF vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfModel {
    /// Lexicographically sorted; position is the column index.
    terms: Vec<String>,
    index: HashMap<String, usize>,
    idf: Vec<f64>,
    ngram_range: NGramRange,
    doc_count: usize,
    min_df: usize,
    max_features: Option<usize>,
}

/// Smoothed inverse document frequency.
pub fn smoothed_idf(doc_count: usize, df: usize) -> f64 {
    ((1.0 + doc_count as f64) / (1.0 + df as f64)).ln() + 1.0
}

impl TfidfModel {
    pub fn fit(
        corpus: &[Document],
        ngram_range: NGramRange,
        min_df: usize,
        max_features: Option<usize>,
    ) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::Fit("cannot fit on an empty corpus".into()));
        }
        if min_df == 0 {
            return Err(Error::Fit("min_df must be positive".into()));
        }
        if max_features == Some(0) {
            return Err(Error::Fit("max_features must be positive".into()));
        }
        let mut df: HashMap<String, usize> = HashMap::new();
        for doc in corpus {
            let grams: HashSet<String> = extract_ngrams(&doc.tokens, ngram_range).into_iter().collect();
            for gram in grams {
                *df.entry(gram).or_insert(0) += 1;
            }
        }
        let mut kept: Vec<(String, usize)> = df.into_iter().filter(|(_, c)| *c >= min_df).collect();
        if let Some(limit) = max_features {
            kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            kept.truncate(limit);
        }
        if kept.is_empty() {
            return Err(Error::Fit("vocabulary is empty after pruning".into()));
        }
        kept.sort_by(|a, b| a.0.cmp(&b.0));

        let doc_count = corpus.len();
        let idf = kept.iter().map(|(_, c)| smoothed_idf(doc_count, *c)).collect();
        let terms: Vec<String> = kept.into_iter().map(|(t, _)| t).collect();
        Ok(TfidfModel::from_parts(terms, idf, ngram_range, doc_count, min_df, max_features))
    }

    fn from_parts(
        terms: Vec<String>,
        idf: Vec<f64>,
        ngram_range: NGramRange,
        doc_count: usize,
        min_df: usize,
        max_features: Option<usize>,
    ) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        TfidfModel {
            terms,
            index,
            idf,
            ngram_range,
            doc_count,
            min_df,
            max_features,
        }
    }

    pub fn dimension(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn ngram_range(&self) -> NGramRange {
        self.ngram_range
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn min_df(&self) -> usize {
        self.min_df
    }

    pub fn max_features(&self) -> Option<usize> {
        self.max_features
    }

    /// Raw counts times idf, L2-normalized. Out-of-vocabulary n-grams are ignored.
    pub fn transform_tokens(&self, tokens: &[String]) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for gram in extract_ngrams(tokens, self.ngram_range) {
            if let Some(&i) = self.index.get(&gram) {
                *counts.entry(i).or_insert(0.0) += 1.0;
            }
        }
        if counts.is_empty() {
            return SparseVector::empty(self.dimension());
        }
        let weighted: Vec<(usize, f64)> = counts
            .into_iter()
            .map(|(i, c)| (i, c * self.idf[i]))
            .collect();
        let norm = weighted.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt();
        let entries = weighted.into_iter().map(|(i, v)| (i, v / norm)).collect();
        SparseVector::new(self.dimension(), entries).expect("entries are sorted and in range")
    }

    pub fn transform(&self, document: &Document) -> SparseVector {
        self.transform_tokens(&document.tokens)
    }

    pub fn transform_corpus(&self, corpus: &[Document]) -> Vec<SparseVector> {
        corpus.par_iter().map(|d| self.transform(d)).collect()
    }

    /// Writes the versioned text format: one header line, then
    /// `ngram<TAB>index<TAB>idf` per vocabulary entry.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let max_features = self
            .max_features
            .map_or_else(|| "none".to_string(), |m| m.to_string());
        writeln!(
            w,
            "{FORMAT_TAG} v{FORMAT_VERSION} ngram_range={} doc_count={} min_df={} max_features={} vocabulary={}",
            self.ngram_range,
            self.doc_count,
            self.min_df,
            max_features,
            self.terms.len()
        )?;
        for (i, (term, idf)) in self.terms.iter().zip(&self.idf).enumerate() {
            writeln!(w, "{term}\t{i}\t{idf:.16e}")?;
        }
        w.flush()
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty vectorizer file"))?;
        let header = header.map_err(|e| Error::parse(1, e.to_string()))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some(FORMAT_TAG) {
            return Err(Error::Incompatible("not a TF-IDF vectorizer file".into()));
        }
        let version = fields.next().unwrap_or_default();
        if version != format!("v{FORMAT_VERSION}") {
            return Err(Error::Incompatible(format!(
                "unsupported vectorizer format version '{version}'"
            )));
        }
        let mut kv = HashMap::new();
        for field in fields {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::parse(1, format!("malformed header field '{field}'")))?;
            kv.insert(k, v);
        }
        let get = |k: &str| {
            kv.get(k)
                .copied()
                .ok_or_else(|| Error::parse(1, format!("missing header field '{k}'")))
        };
        let num = |k: &str| -> Result<usize> {
            get(k)?
                .parse()
                .map_err(|_| Error::parse(1, format!("invalid value for '{k}'")))
        };
        let ngram_range: NGramRange = get("ngram_range")?.parse()?;
        let doc_count = num("doc_count")?;
        let min_df = num("min_df")?;
        let max_features = match get("max_features")? {
            "none" => None,
            _ => Some(num("max_features")?),
        };
        let size = num("vocabulary")?;

        let mut terms = Vec::with_capacity(size);
        let mut idf = Vec::with_capacity(size);
        for (n, line) in lines {
            let line = line.map_err(|e| Error::parse(n + 1, e.to_string()))?;
            let mut cols = line.split('\t');
            let (Some(term), Some(index), Some(value), None) =
                (cols.next(), cols.next(), cols.next(), cols.next())
            else {
                return Err(Error::parse(n + 1, "expected ngram, index, idf"));
            };
            let index: usize = index
                .parse()
                .map_err(|_| Error::parse(n + 1, "invalid index"))?;
            if index != terms.len() {
                return Err(Error::parse(n + 1, "vocabulary indices must be contiguous"));
            }
            if terms.last().is_some_and(|prev: &String| prev.as_str() >= term) {
                return Err(Error::parse(n + 1, "vocabulary must be sorted"));
            }
            let value: f64 = value
                .parse()
                .map_err(|_| Error::parse(n + 1, "invalid idf"))?;
            if value <= 0.0 || !value.is_finite() {
                return Err(Error::parse(n + 1, "idf must be positive"));
            }
            terms.push(term.to_string());
            idf.push(value);
        }
        if terms.len() != size {
            return Err(Error::parse(
                terms.len() + 2,
                format!("truncated vocabulary: expected {size} entries, found {}", terms.len()),
            ));
        }
        if size == 0 || doc_count == 0 {
            return Err(Error::parse(1, "vocabulary and doc_count must be positive"));
        }
        Ok(TfidfModel::from_parts(terms, idf, ngram_range, doc_count, min_df, max_features))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(std::io::BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        TfidfModel::read_from(std::io::BufReader::new(file))
    }
}
