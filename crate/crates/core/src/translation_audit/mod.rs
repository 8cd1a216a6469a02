//! Compares a translation provider's output for lexicon terms with the
//! reference glosses and flags mismatches.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lexicon::{surface_tokens, LexiconEntry};
use crate::vocab::string_vocabulary;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Translates one term. Implementations must be total: every failure is an
/// error, never an empty string.
pub trait TranslationProvider: Sync {
    fn translate(&self, term: &str, source_lang: &str, target_lang: &str) -> Result<String>;
}

/// Fixed outputs keyed by normalized term.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StubProvider {
    outputs: BTreeMap<String, String>,
}

impl StubProvider {
    pub fn new<I, K, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: Into<String>,
    {
        let outputs = pairs
            .into_iter()
            .map(|(k, v)| (surface_tokens(k.as_ref()).join(" "), v.into()))
            .collect();
        StubProvider { outputs }
    }

    /// Parses `term<TAB>output` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (term, output) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(n + 1, "expected term and provider output separated by a tab"))?;
            pairs.push((term.to_string(), output.trim().to_string()));
        }
        Ok(Self::new(pairs))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Engine outputs recorded for the translation-study terms.
    pub fn recorded() -> Self {
        Self::parse(include_str!("../../resources/translation_stub.tsv")).expect("bundled stub is well formed")
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.outputs.keys().map(String::as_str)
    }
}

impl TranslationProvider for StubProvider {
    fn translate(&self, term: &str, _source: &str, _target: &str) -> Result<String> {
        let key = surface_tokens(term).join(" ");
        self.outputs
            .get(&key)
            .cloned()
            .ok_or_else(|| Error::Provider(format!("no recorded translation for '{term}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpProviderConfig {
    pub endpoint: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub timeout: Duration,
}

impl Default for HttpProviderConfig {
    fn default() -> Self {
        HttpProviderConfig {
            endpoint: "https://translation.googleapis.com/language/translate/v2".into(),
            api_key_env: "HAUSA_GUARD_TRANSLATE_KEY".into(),
            timeout: Duration::from_secs(10),
        }
    }
}

/// JSON-over-HTTP provider. Sends `{q, source, target, format}` with the key
/// as a `key` query parameter.
pub struct HttpProvider {
    agent: ureq::Agent,
    endpoint: String,
    api_key: String,
}

impl HttpProvider {
    pub fn from_env(config: &HttpProviderConfig) -> Result<Self> {
        let api_key = std::env::var(&config.api_key_env)
            .map_err(|_| Error::Provider(format!("environment variable {} is not set", config.api_key_env)))?;
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .build()
            .into();
        Ok(HttpProvider {
            agent,
            endpoint: config.endpoint.clone(),
            api_key,
        })
    }
}

/// Extracts the translated text from either a `data.translations[0]` or a
/// flat `translatedText` response body.
pub fn parse_response(body: &Value) -> Result<String> {
    let text = body
        .pointer("/data/translations/0/translatedText")
        .or_else(|| body.get("translatedText"))
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Provider("response has no translated text".into()))?;
    if text.trim().is_empty() {
        return Err(Error::Provider("provider returned an empty translation".into()));
    }
    Ok(text.to_string())
}

impl TranslationProvider for HttpProvider {
    fn translate(&self, term: &str, source_lang: &str, target_lang: &str) -> Result<String> {
        let body = json!({"q": term, "source": source_lang, "target": target_lang, "format": "text"});
        let mut response = self
            .agent
            .post(&self.endpoint)
            .query("key", &self.api_key)
            .send_json(&body)
            .map_err(|e| Error::Provider(e.to_string()))?;
        let value: Value = response
            .body_mut()
            .read_json()
            .map_err(|e| Error::Provider(e.to_string()))?;
        parse_response(&value)
    }
}

string_vocabulary! {
    pub enum Similarity as "similarity" {
        Jaccard => "jaccard",
        Overlap => "overlap",
    }
}

fn token_set(text: &str) -> BTreeSet<String> {
    surface_tokens(text).into_iter().collect()
}

impl Similarity {
    /// Similarity of the normalized token sets of `a` and `b`; 0 when either
    /// set is empty.
    pub fn score(self, a: &str, b: &str) -> f64 {
        let (a, b) = (token_set(a), token_set(b));
        if a.is_empty() || b.is_empty() {
            return 0.0;
        }
        let shared = a.intersection(&b).count() as f64;
        let den = match self {
            Similarity::Jaccard => a.union(&b).count(),
            Similarity::Overlap => a.len().min(b.len()),
        };
        shared / den as f64
    }
}

string_vocabulary! {
    pub enum Verdict as "verdict" {
        Match => "match",
        Mismatch => "mismatch",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditOptions {
    pub threshold: f64,
    pub similarity: Similarity,
    pub source_lang: String,
    pub target_lang: String,
    /// Maximum concurrent provider calls.
    pub parallelism: usize,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            threshold: DEFAULT_THRESHOLD,
            similarity: Similarity::Jaccard,
            source_lang: "ha".into(),
            target_lang: "en".into(),
            parallelism: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub output: String,
    pub similarity: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub term: String,
    pub gloss: String,
    /// Provider failures are kept per row as the error message.
    pub outcome: std::result::Result<Translation, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub options: AuditOptions,
}

impl AuditReport {
    pub fn mismatches(&self) -> usize {
        self.count(Verdict::Mismatch)
    }

    pub fn matches(&self) -> usize {
        self.count(Verdict::Match)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    fn count(&self, verdict: Verdict) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!(&r.outcome, Ok(t) if t.verdict == verdict))
            .count()
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# similarity={} threshold={}",
            self.options.similarity, self.options.threshold
        );
        s.push_str("term\tgloss\ttranslation\tverdict\tsimilarity\n");
        for r in &self.rows {
            match &r.outcome {
                Ok(t) => {
                    let _ = writeln!(
                        s,
                        "{}\t{}\t{}\t{}\t{:.4}",
                        r.term, r.gloss, t.output, t.verdict, t.similarity
                    );
                }
                Err(e) => {
                    let _ = writeln!(s, "{}\t{}\t\terror\t{}", r.term, r.gloss, e.replace(['\t', '\n'], " "));
                }
            }
        }
        s
    }
}

/// Translates every entry and scores the output against its gloss. Rows keep
/// lexicon order; a failing provider call only fails its own row.
pub fn audit_lexicon(
    lexicon: &[LexiconEntry],
    provider: &dyn TranslationProvider,
    options: &AuditOptions,
) -> Result<AuditReport> {
    if !(0.0..=1.0).contains(&options.threshold) {
        return Err(Error::Validation(format!("threshold {} is outside [0, 1]", options.threshold)));
    }
    if options.parallelism == 0 {
        return Err(Error::Validation("parallelism must be at least 1".into()));
    }
    if lexicon.is_empty() {
        return Err(Error::Validation("lexicon is empty".into()));
    }
    if let Some(e) = lexicon.iter().find(|e| e.gloss.trim().is_empty()) {
        return Err(Error::Validation(format!("term '{}' has no gloss", e.term)));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.parallelism)
        .build()
        .map_err(|e| Error::Provider(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<AuditRow> = pool.install(|| {
        lexicon
            .par_iter()
            .map(|entry| {
                let outcome = provider
                    .translate(&entry.term, &options.source_lang, &options.target_lang)
                    .and_then(|output| {
                        if output.trim().is_empty() {
                            return Err(Error::Provider(format!("empty translation for '{}'", entry.term)));
                        }
                        let similarity = options.similarity.score(&entry.gloss, &output);
                        let verdict = if similarity >= options.threshold {
                            Verdict::Match
                        } else {
                            Verdict::Mismatch
                        };
                        Ok(Translation {
                            output,
                            similarity,
                            verdict,
                        })
                    })
                    .map_err(|e| e.to_string());
                AuditRow {
                    term: entry.term.clone(),
                    gloss: entry.gloss.clone(),
                    outcome,
                }
            })
            .collect()
    });
    if rows.iter().all(|r| r.outcome.is_err()) {
        return Err(Error::Audit(format!("all {} provider calls failed", rows.len())));
    }
    Ok(AuditReport {
        rows,
        options: options.clone(),
    })
}
