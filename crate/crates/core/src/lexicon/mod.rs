//! Term lexicons, per-term proportions among positive posts and dataset
//! profiles over the shared annotation fields.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{Annotation, Category, Dataset, DatasetKind, Language, Sentiment};
use crate::error::{Error, Result};
use crate::textprep::{fold, strip_irrelevant, Document};
use crate::vocab::{string_vocabulary, Vocabulary};

string_vocabulary! {
    pub enum Subcategory as "subcategory" {
        Abusive => "abusive",
        Offensive => "offensive",
        Threat => "threat",
        Violence => "violence",
        ThreatObject => "threat_object",
    }
}

impl Subcategory {
    /// Like [`Vocabulary::parse`], also accepting `threat-object`.
    pub fn parse_lenient(value: &str) -> Option<Self> {
        Self::parse(&value.trim().replace('-', "_"))
    }
}

/// Tokens of `text` after stripping and folding, without stopword removal or
/// stemming. Lexicon terms and the posts they are searched in share this form.
pub fn surface_tokens(text: &str) -> Vec<String> {
    fold(&strip_irrelevant(text))
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    /// Normalized term: tokens joined by single spaces.
    pub term: String,
    pub subcategory: Subcategory,
    pub gloss: String,
}

impl LexiconEntry {
    pub fn new(term: &str, subcategory: Subcategory, gloss: impl Into<String>) -> Result<Self> {
        let tokens = surface_tokens(term);
        if tokens.is_empty() {
            return Err(Error::Validation(format!("lexicon term '{term}' is empty after normalization")));
        }
        Ok(LexiconEntry {
            term: tokens.join(" "),
            subcategory,
            gloss: gloss.into(),
        })
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.term.split(' ')
    }
}

/// Parses `term<TAB>subcategory<TAB>gloss` lines; `#` starts a comment line.
/// The gloss column may be omitted. Duplicate terms are rejected.
pub fn parse_lexicon(text: &str) -> Result<Vec<LexiconEntry>> {
    let mut entries = Vec::new();
    let mut seen = BTreeSet::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if !(2..=3).contains(&cols.len()) {
            return Err(Error::parse(line_no, "expected term, subcategory and gloss separated by tabs"));
        }
        let sub = Subcategory::parse_lenient(cols[1]).ok_or_else(|| {
            Error::parse(
                line_no,
                format!("unknown subcategory '{}' (expected one of: {})", cols[1], Subcategory::options()),
            )
        })?;
        let gloss = cols.get(2).map_or("", |g| g.trim());
        let entry = LexiconEntry::new(cols[0], sub, gloss).map_err(|e| Error::parse(line_no, e.to_string()))?;
        if !seen.insert(entry.term.clone()) {
            return Err(Error::parse(line_no, format!("duplicate term '{}'", entry.term)));
        }
        entries.push(entry);
    }
    Ok(entries)
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Vec<LexiconEntry>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lexicon(&text)
}

/// The bundled lexicon of frequent terms and translation-study terms.
pub fn default_lexicon() -> Vec<LexiconEntry> {
    parse_lexicon(include_str!("../../resources/lexicon.tsv")).expect("bundled lexicon is well formed")
}

fn contains_window(tokens: &[String], term: &[&str]) -> bool {
    term.len() <= tokens.len()
        && tokens
            .windows(term.len())
            .any(|w| w.iter().zip(term).all(|(a, b)| a == b))
}

/// Entries whose term occurs as a contiguous run of the document's tokens.
pub fn match_terms<'a>(document: &Document, lexicon: &'a [LexiconEntry]) -> Vec<&'a LexiconEntry> {
    lexicon
        .iter()
        .filter(|e| contains_window(&document.tokens, &e.tokens().collect::<Vec<_>>()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermRow {
    pub term: String,
    pub subcategory: Subcategory,
    /// Positive posts containing the term.
    pub count: usize,
    pub proportion: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermReport {
    pub kind: DatasetKind,
    pub positive_posts: usize,
    /// Sorted by proportion descending, then by term.
    pub rows: Vec<TermRow>,
}

pub const PROPORTION_NOTE: &str =
    "proportion = positive-class posts containing the term / all positive-class posts";

impl TermReport {
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {PROPORTION_NOTE}");
        let _ = writeln!(s, "# dataset={} positive_posts={}", self.kind, self.positive_posts);
        s.push_str("term\tcount\tproportion\tsubcategory\n");
        for r in &self.rows {
            let _ = writeln!(s, "{}\t{}\t{:.4}\t{}", r.term, r.count, r.proportion, r.subcategory);
        }
        s
    }
}

/// Fraction of positive-class posts (offensive for HOC, threat for HTC) that
/// contain each lexicon term.
pub fn term_report(dataset: &Dataset, lexicon: &[LexiconEntry]) -> Result<TermReport> {
    let labels = dataset.labels()?;
    let positives: Vec<Vec<String>> = dataset
        .items()
        .par_iter()
        .zip(&labels)
        .filter(|(_, l)| l.is_positive())
        .map(|(item, _)| surface_tokens(&item.post.text))
        .collect();
    if positives.is_empty() {
        return Err(Error::Validation("dataset has no positive-class posts".into()));
    }
    let mut rows: Vec<TermRow> = lexicon
        .iter()
        .map(|e| {
            let term: Vec<&str> = e.tokens().collect();
            let count = positives.iter().filter(|t| contains_window(t, &term)).count();
            TermRow {
                term: e.term.clone(),
                subcategory: e.subcategory,
                count,
                proportion: count as f64 / positives.len() as f64,
            }
        })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.term.cmp(&b.term)));
    Ok(TermReport {
        kind: dataset.kind(),
        positive_posts: positives.len(),
        rows,
    })
}

/// Published term proportions, kept as metadata for comparison only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub kind: DatasetKind,
    pub term: &'static str,
    pub proportion: f64,
    pub subcategory: Subcategory,
}

const fn reference(kind: DatasetKind, term: &'static str, proportion: f64, subcategory: Subcategory) -> ReferenceRow {
    ReferenceRow {
        kind,
        term,
        proportion,
        subcategory,
    }
}

use DatasetKind::{Hoc, Htc};
use Subcategory::{Abusive, Offensive, Threat, ThreatObject, Violence};

/// The rikici figure is printed without a percent sign in the source table
/// and is stored as 1.64%.
pub const REFERENCE_PROPORTIONS: [ReferenceRow; 18] = [
    reference(Hoc, "dan iska", 0.277, Abusive),
    reference(Hoc, "kutumar uba", 0.104, Abusive),
    reference(Hoc, "shege/shegiya", 0.090, Abusive),
    reference(Hoc, "jaki", 0.087, Offensive),
    reference(Hoc, "uwarka", 0.080, Abusive),
    reference(Hoc, "dan kutumar uba", 0.069, Abusive),
    reference(Hoc, "wawa", 0.069, Offensive),
    reference(Hoc, "jahili", 0.069, Offensive),
    reference(Hoc, "ubanka", 0.066, Abusive),
    reference(Htc, "bindiga", 0.9245, ThreatObject),
    reference(Htc, "kashe kashe", 0.3197, Violence),
    reference(Htc, "tarzoma", 0.2459, Violence),
    reference(Htc, "yan bindiga", 0.1256, Threat),
    reference(Htc, "farmaki", 0.0902, Violence),
    reference(Htc, "hari", 0.0574, Violence),
    reference(Htc, "zanga zanga", 0.0477, Threat),
    reference(Htc, "ta'addanci", 0.0226, Threat),
    reference(Htc, "rikici", 0.0164, Violence),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Bucket {
    pub value: &'static str,
    pub count: usize,
    pub fraction: f64,
}

/// Counts and fractions of the annotated language, sentiment and category.
/// Only values that occur get a bucket; buckets follow vocabulary order.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetProfile {
    pub kind: DatasetKind,
    pub total: usize,
    pub language: Vec<Bucket>,
    pub sentiment: Vec<Bucket>,
    pub category: Vec<Bucket>,
}

impl DatasetProfile {
    pub fn facets(&self) -> [(&'static str, &[Bucket]); 3] {
        [
            ("language", &self.language),
            ("sentiment", &self.sentiment),
            ("category", &self.category),
        ]
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# dataset={} posts={}", self.kind, self.total);
        s.push_str("facet\tvalue\tcount\tfraction\n");
        for (facet, buckets) in self.facets() {
            for b in buckets {
                let _ = writeln!(s, "{facet}\t{}\t{}\t{:.4}", b.value, b.count, b.fraction);
            }
        }
        s
    }
}

fn facet<V: Vocabulary + PartialEq>(annotations: &[&Annotation], get: impl Fn(&Annotation) -> V) -> Vec<Bucket> {
    let total = annotations.len();
    V::ALL
        .iter()
        .filter_map(|v| {
            let count = annotations.iter().filter(|a| get(a) == *v).count();
            (count > 0).then(|| Bucket {
                value: v.as_str(),
                count,
                fraction: count as f64 / total as f64,
            })
        })
        .collect()
}

pub fn dataset_profile(dataset: &Dataset) -> Result<DatasetProfile> {
    if dataset.is_empty() {
        return Err(Error::Validation("cannot profile an empty dataset".into()));
    }
    let annotations = dataset
        .items()
        .iter()
        .map(|item| {
            item.annotation
                .as_ref()
                .ok_or_else(|| Error::Validation(format!("post {} is not annotated", item.post.id)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DatasetProfile {
        kind: dataset.kind(),
        total: annotations.len(),
        language: facet::<Language>(&annotations, Annotation::language),
        sentiment: facet::<Sentiment>(&annotations, Annotation::sentiment),
        category: facet::<Category>(&annotations, Annotation::category),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(tokens: &[&str]) -> Document {
        Document::new("d", tokens.iter().map(|t| t.to_string()).collect())
    }

    #[test]
    fn contiguous_matching() {
        let lex = vec![LexiconEntry::new("dan iska", Abusive, "rascal").unwrap()];
        assert_eq!(match_terms(&doc(&["wallahi", "dan", "iska", "ne"]), &lex).len(), 1);
        assert!(match_terms(&doc(&["dan", "gari", "iska"]), &lex).is_empty());
        assert!(match_terms(&doc(&["dan", "iska"]), &[]).is_empty());
        assert!(match_terms(&doc(&[]), &lex).is_empty());
    }

    #[test]
    fn terms_are_normalized() {
        let e = LexiconEntry::new("  Zanga-Zanga ", Threat, "protest").unwrap();
        assert_eq!(e.term, "zanga zanga");
        assert_eq!(LexiconEntry::new("ƙ'yan Bindiga", Threat, "").unwrap().term, "k'yan bindiga");
        assert!(LexiconEntry::new(" 123 !", Threat, "").is_err());
    }

    #[test]
    fn bundled_lexicon_parses() {
        let lex = default_lexicon();
        for r in REFERENCE_PROPORTIONS {
            for term in r.term.split('/') {
                let e = lex.iter().find(|e| e.term == term).unwrap_or_else(|| panic!("{term} missing"));
                assert_eq!(e.subcategory, r.subcategory);
            }
        }
        assert_eq!(Subcategory::parse_lenient("threat-object"), Some(ThreatObject));
    }

    #[test]
    fn lexicon_format_errors() {
        assert!(matches!(parse_lexicon("hari\tbad\tattack"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_lexicon("# c\nhari\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(
            parse_lexicon("hari\tviolence\tattack\nHari\tviolence\tattack"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert_eq!(parse_lexicon("hari\tviolence").unwrap()[0].gloss, "");
    }
}
