//! Cleaning pipeline for collected posts.
//!
//! The full pipeline runs, in order: [`strip_irrelevant`], [`normalize`],
//! whitespace tokenization, [`remove_stopwords`], optional stemming,
//! [`dedupe`] and [`distinct_word_filter`]. Every step is a pure function, and
//! the pipeline is idempotent on its own output.

mod stem;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;
use std::sync::LazyLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::corpus::RawPost;
use crate::error::{Error, Result};

pub use stem::{Stemmer, MIN_STEM_CHARS};

/// Default distinct-word threshold; shorter posts carry too little content.
pub const DEFAULT_MIN_DISTINCT_WORDS: usize = 8;

static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:https?://|www\.)\S+").unwrap());
static HTML_TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<[^<>]*>").unwrap());
static HTML_ENTITY: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"&(?:[A-Za-z]+|#[0-9]+|#x[0-9A-Fa-f]+);").unwrap());
static MENTION_OR_HASHTAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[@#][\w']*").unwrap());
static EMOJI: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"[\p{Extended_Pictographic}\p{Emoji_Modifier}\p{Regional_Indicator}\u{200D}\u{FE0E}\u{FE0F}\u{20E3}]",
    )
    .unwrap()
});

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{2018}' | '\u{02BC}')
}

fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Removes URLs, HTML tags and entities, hashtags and mentions (with their
/// words), digits, punctuation and math/currency symbols. Apostrophes between
/// two letters are kept. Whitespace is collapsed to single spaces.
pub fn strip_irrelevant(text: &str) -> String {
    let text = URL.replace_all(text, " ");
    let text = HTML_TAG.replace_all(&text, " ");
    let text = HTML_ENTITY.replace_all(&text, " ");
    let text = MENTION_OR_HASHTAG.replace_all(&text, " ");

    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    for (i, &c) in chars.iter().enumerate() {
        let keep = if is_apostrophe(c) {
            let before = i > 0 && chars[i - 1].is_alphabetic();
            let after = chars.get(i + 1).is_some_and(|n| n.is_alphabetic());
            before && after
        } else {
            !(c.is_numeric() || is_punctuation_or_symbol(c))
        };
        out.push(if keep { c } else { ' ' });
    }
    collapse_whitespace(&out)
}

fn is_punctuation_or_symbol(c: char) -> bool {
    if c.is_ascii() {
        return c.is_ascii_punctuation();
    }
    static CLASSES: LazyLock<Regex> =
        LazyLock::new(|| Regex::new(r"^[\p{P}\p{Sm}\p{Sc}]$").unwrap());
    let mut buf = [0u8; 4];
    CLASSES.is_match(c.encode_utf8(&mut buf))
}

/// Lowercases and folds accented vowels and the Hausa hooked consonants
/// (ɓ, ɗ, ƙ, ƴ) to their base letters. Apostrophe variants become `'`.
pub fn fold(text: &str) -> String {
    fold_with(text, true)
}

fn fold_with(text: &str, fold_accents: bool) -> String {
    let lower = text.to_lowercase();
    let mapped = lower.chars().map(|c| {
        if is_apostrophe(c) {
            return '\'';
        }
        if !fold_accents {
            return c;
        }
        match c {
            'ɓ' => 'b',
            'ɗ' => 'd',
            'ƙ' => 'k',
            'ƴ' => 'y',
            other => other,
        }
    });
    if fold_accents {
        mapped.collect::<String>().nfd().filter(|c| !is_combining_mark(*c)).nfc().collect()
    } else {
        mapped.collect()
    }
}

/// Options for the cleaning pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanConfig {
    pub stopwords: BTreeSet<String>,
    pub misspellings: BTreeMap<String, String>,
    pub min_distinct_words: usize,
    pub fold_accents: bool,
    pub strip_emoji: bool,
    pub apply_stemming: bool,
    pub suffixes: Vec<String>,
}

impl Default for CleanConfig {
    fn default() -> Self {
        CleanConfig {
            stopwords: parse_stopwords(include_str!("../../resources/stopwords.txt")),
            misspellings: parse_misspellings(include_str!("../../resources/misspellings.tsv"))
                .expect("bundled misspelling map is well formed"),
            min_distinct_words: DEFAULT_MIN_DISTINCT_WORDS,
            fold_accents: true,
            strip_emoji: true,
            apply_stemming: true,
            suffixes: Stemmer::default().suffixes().to_vec(),
        }
    }
}

impl CleanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stopwords.is_empty() {
            return Err(Error::Validation("stopword list is empty".into()));
        }
        Ok(())
    }

    pub fn stemmer(&self) -> Stemmer {
        Stemmer::new(&self.suffixes)
    }
}

/// One token per line, `#` comments ignored.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(fold)
        .collect()
}

pub fn load_stopwords(path: impl AsRef<Path>) -> Result<BTreeSet<String>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}

/// Two tab-separated columns per line: wrong, correct. Chains such as
/// `a -> b`, `b -> c` are resolved to `a -> c` so correction is idempotent.
pub fn parse_misspellings(text: &str) -> Result<BTreeMap<String, String>> {
    let mut raw = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut cols = line.split('\t');
        match (cols.next(), cols.next(), cols.next()) {
            (Some(wrong), Some(right), None) if !wrong.trim().is_empty() => {
                raw.insert(fold(wrong.trim()), collapse_whitespace(&fold(right)));
            }
            _ => {
                return Err(Error::parse(
                    n + 1,
                    "expected two tab-separated columns: wrong, correct",
                ))
            }
        }
    }
    let mut resolved = BTreeMap::new();
    for (wrong, first) in &raw {
        let mut current = first.clone();
        let mut visited = HashSet::from([wrong.clone()]);
        while let Some(next) = raw.get(&current) {
            if !visited.insert(current.clone()) {
                break;
            }
            current = next.clone();
        }
        resolved.insert(wrong.clone(), current);
    }
    Ok(resolved)
}

pub fn load_misspellings(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_misspellings(&text)
}

/// Lowercases, folds accents and hooked consonants (when enabled), removes
/// emoji (when enabled) and replaces misspelt tokens via the dictionary.
pub fn normalize(text: &str, config: &CleanConfig) -> String {
    let folded = fold_with(text, config.fold_accents);
    let folded = if config.strip_emoji {
        EMOJI.replace_all(&folded, " ").into_owned()
    } else {
        folded
    };
    folded
        .split_whitespace()
        .map(|tok| {
            config
                .misspellings
                .get(tok)
                .map(String::as_str)
                .unwrap_or(tok)
        })
        .filter(|tok| !tok.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Order-preserving removal of exact stopword matches.
pub fn remove_stopwords(tokens: &[String], stopwords: &BTreeSet<String>) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !stopwords.contains(t.as_str()))
        .cloned()
        .collect()
}

/// A cleaned, tokenized post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub post_id: String,
    pub tokens: Vec<String>,
    pub original_text: String,
}

impl Document {
    pub fn new(post_id: impl Into<String>, tokens: Vec<String>) -> Self {
        Document {
            post_id: post_id.into(),
            tokens,
            original_text: String::new(),
        }
    }

    pub fn distinct_tokens(&self) -> usize {
        self.tokens.iter().collect::<HashSet<_>>().len()
    }
}

/// Keeps exactly the documents with at least `min_distinct` unique tokens.
pub fn distinct_word_filter(documents: Vec<Document>, min_distinct: usize) -> Vec<Document> {
    documents
        .into_iter()
        .filter(|d| d.distinct_tokens() >= min_distinct)
        .collect()
}

/// Drops documents whose token sequence already occurred earlier.
pub fn dedupe(documents: Vec<Document>) -> Vec<Document> {
    let mut seen = HashSet::new();
    documents
        .into_iter()
        .filter(|d| seen.insert(d.tokens.clone()))
        .collect()
}

/// Per-post cleaning without the corpus-level dedupe and distinct-word steps.
#[derive(Debug, Clone)]
pub struct Cleaner {
    config: CleanConfig,
    stemmer: Stemmer,
}

impl Cleaner {
    pub fn new(config: CleanConfig) -> Result<Self> {
        config.validate()?;
        let stemmer = config.stemmer();
        Ok(Cleaner { config, stemmer })
    }

    pub fn config(&self) -> &CleanConfig {
        &self.config
    }

    pub fn tokens(&self, text: &str) -> Vec<String> {
        let normalized = normalize(&strip_irrelevant(text), &self.config);
        let tokens: Vec<String> = normalized.split_whitespace().map(str::to_string).collect();
        let tokens = remove_stopwords(&tokens, &self.config.stopwords);
        if !self.config.apply_stemming {
            return tokens;
        }
        tokens.into_iter().map(|t| self.stable_stem(t)).collect()
    }

    /// A stem that would itself be rewritten by a later pass (a stopword or a
    /// misspelling key) is rejected and the token kept whole.
    fn stable_stem(&self, token: String) -> String {
        let stem = self.stemmer.stem(&token);
        if stem == token
            || self.config.stopwords.contains(&stem)
            || self.config.misspellings.contains_key(&stem)
        {
            token
        } else {
            stem
        }
    }

    pub fn document(&self, post: &RawPost) -> Document {
        Document {
            post_id: post.id.clone(),
            tokens: self.tokens(&post.text),
            original_text: post.text.clone(),
        }
    }
}

/// Runs the full cleaning pipeline over `posts`.
pub fn clean_pipeline(posts: &[RawPost], config: &CleanConfig) -> Result<Vec<Document>> {
    let cleaner = Cleaner::new(config.clone())?;
    let documents: Vec<Document> = posts.par_iter().map(|p| cleaner.document(p)).collect();
    Ok(distinct_word_filter(
        dedupe(documents),
        config.min_distinct_words,
    ))
}
