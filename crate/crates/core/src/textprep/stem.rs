use std::path::Path;

use crate::error::{Error, Result};

/// Minimum number of characters a stem may have.
pub const MIN_STEM_CHARS: usize = 3;

/// Suffix-stripping stemmer over a configurable suffix table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stemmer {
    /// Longest suffix first.
    suffixes: Vec<String>,
}

impl Stemmer {
    pub fn new<I, S>(suffixes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut suffixes: Vec<String> = suffixes
            .into_iter()
            .map(|s| s.as_ref().trim().trim_start_matches('-').to_lowercase())
            .filter(|s| !s.is_empty())
            .collect();
        suffixes.sort_by(|a, b| {
            b.chars()
                .count()
                .cmp(&a.chars().count())
                .then_with(|| a.cmp(b))
        });
        suffixes.dedup();
        Stemmer { suffixes }
    }

    /// Parses a suffix table: one suffix per line, `#` comments, optional leading `-`.
    pub fn parse(text: &str) -> Self {
        Stemmer::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Stemmer::parse(&text))
    }

    pub fn suffixes(&self) -> &[String] {
        &self.suffixes
    }

    /// Strips the longest matching suffix that leaves at least
    /// [`MIN_STEM_CHARS`] characters, repeating until no suffix applies.
    pub fn stem(&self, token: &str) -> String {
        let mut current = token;
        'outer: loop {
            let len = current.chars().count();
            for suffix in &self.suffixes {
                if current.ends_with(suffix.as_str())
                    && len - suffix.chars().count() >= MIN_STEM_CHARS
                {
                    current = &current[..current.len() - suffix.len()];
                    continue 'outer;
                }
            }
            return current.to_string();
        }
    }
}

impl Default for Stemmer {
    fn default() -> Self {
        Stemmer::parse(include_str!("../../resources/suffixes.txt"))
    }
}
