//! Dataset model for the HOC (offensive) and HTC (threatening) corpora.
//!
//! A [`Dataset`] is a list of [`RawPost`]s, each optionally carrying an
//! [`Annotation`] whose shape matches the dataset kind. Datasets are
//! validated on construction and immutable afterwards.

mod collect;
mod io;
mod split;
pub mod synthetic;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, FieldError, Result};
use crate::label::Label;
use crate::vocab::string_vocabulary;

pub use collect::{collect_by_keywords, collect_paged, ArchiveSource, CollectionRequest, DirArchive};
pub use io::{
    annotation_from_json, load_dataset, parse_dataset, read_posts, record_line, save_dataset,
    write_csv, write_dataset,
};
pub use split::split;

string_vocabulary! {
    /// Platform a post was collected from.
    pub enum Source as "source" {
        Twitter => "twitter",
        Facebook => "facebook",
        Other => "other",
    }
}

string_vocabulary! {
    pub enum DatasetKind as "dataset kind" {
        Hoc => "HOC",
        Htc => "HTC",
    }
}

string_vocabulary! {
    pub enum Language as "language" {
        Hausa => "hausa",
        Engausa => "engausa",
        English => "english",
        Other => "other",
    }
}

string_vocabulary! {
    pub enum Sentiment as "sentiment" {
        Positive => "positive",
        Neutral => "neutral",
        Negative => "negative",
    }
}

string_vocabulary! {
    /// Theme of a post.
    pub enum Category as "category" {
        Social => "social",
        Political => "political",
        Religious => "religious",
        Security => "security",
        Education => "education",
        Law => "law",
        Sport => "sport",
        Health => "health",
        Agriculture => "agriculture",
        Business => "business",
        Other => "other",
    }
}

string_vocabulary! {
    pub enum ThreatClass as "class" {
        Threat => "threat",
        NoThreat => "no_threat",
    }
}

/// A collected social media post with the fields retrieved during collection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPost {
    pub id: String,
    pub text: String,
    pub source: Source,
    /// ISO-8601 date-time, kept verbatim so records round-trip byte-exactly.
    pub posting_date: String,
    pub retweet_count: u64,
    pub favourite_count: u64,
    pub screen_name: String,
    pub urls: Vec<String>,
}

impl RawPost {
    /// A post with only an id and text; the remaining fields take neutral values.
    pub fn from_text(id: impl Into<String>, text: impl Into<String>) -> Self {
        RawPost {
            id: id.into(),
            text: text.into(),
            source: Source::Other,
            posting_date: "1970-01-01T00:00:00Z".to_string(),
            retweet_count: 0,
            favourite_count: 0,
            screen_name: String::new(),
            urls: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::Validation("post id must be non-empty".into()));
        }
        validate_date(&self.posting_date)
            .map_err(|e| Error::Validation(format!("post {}: {e}", self.id)))
    }
}

fn validate_date(value: &str) -> std::result::Result<(), String> {
    use chrono::{DateTime, NaiveDate, NaiveDateTime};
    let ok = DateTime::parse_from_rfc3339(value).is_ok()
        || NaiveDateTime::parse_from_str(value, "%Y-%m-%dT%H:%M:%S%.f").is_ok()
        || NaiveDateTime::parse_from_str(value, "%Y-%m-%d %H:%M:%S").is_ok()
        || NaiveDate::parse_from_str(value, "%Y-%m-%d").is_ok();
    if ok {
        Ok(())
    } else {
        Err(format!("posting_date '{value}' is not an ISO-8601 date-time"))
    }
}

/// Labels shared by both annotation schemas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HocAnnotation {
    pub language: Language,
    pub sentiment: Sentiment,
    pub category: Category,
    pub offensive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HtcAnnotation {
    pub language: Language,
    pub sentiment: Sentiment,
    pub category: Category,
    pub offensive: bool,
    pub location: Option<String>,
    pub violence: Option<String>,
    pub threat: Option<String>,
    pub threat_object: Option<String>,
    pub class: ThreatClass,
}

impl HtcAnnotation {
    pub fn validate(&self) -> std::result::Result<(), Vec<FieldError>> {
        if self.class == ThreatClass::NoThreat && self.threat.is_some() {
            return Err(vec![FieldError::new(
                "threat",
                "must be null when class is no_threat",
            )]);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Annotation {
    Hoc(HocAnnotation),
    Htc(HtcAnnotation),
}

impl Annotation {
    pub fn kind(&self) -> DatasetKind {
        match self {
            Annotation::Hoc(_) => DatasetKind::Hoc,
            Annotation::Htc(_) => DatasetKind::Htc,
        }
    }

    /// The binary detection label: offensive for HOC, threat for HTC.
    pub fn label(&self) -> Label {
        let positive = match self {
            Annotation::Hoc(a) => a.offensive,
            Annotation::Htc(a) => a.class == ThreatClass::Threat,
        };
        Label::from_bool(positive)
    }

    pub fn language(&self) -> Language {
        match self {
            Annotation::Hoc(a) => a.language,
            Annotation::Htc(a) => a.language,
        }
    }

    pub fn sentiment(&self) -> Sentiment {
        match self {
            Annotation::Hoc(a) => a.sentiment,
            Annotation::Htc(a) => a.sentiment,
        }
    }

    pub fn category(&self) -> Category {
        match self {
            Annotation::Hoc(a) => a.category,
            Annotation::Htc(a) => a.category,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<FieldError>> {
        match self {
            Annotation::Hoc(_) => Ok(()),
            Annotation::Htc(a) => a.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub post: RawPost,
    pub annotation: Option<Annotation>,
}

impl Item {
    pub fn unlabeled(post: RawPost) -> Self {
        Item {
            post,
            annotation: None,
        }
    }

    pub fn label(&self) -> Option<Label> {
        self.annotation.as_ref().map(Annotation::label)
    }
}

/// A validated HOC or HTC dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    kind: DatasetKind,
    items: Vec<Item>,
}

impl Dataset {
    pub fn new(kind: DatasetKind, items: Vec<Item>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(items.len());
        for item in &items {
            item.post.validate()?;
            if !seen.insert(item.post.id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate post id '{}'",
                    item.post.id
                )));
            }
            if let Some(annotation) = &item.annotation {
                if annotation.kind() != kind {
                    return Err(Error::Validation(format!(
                        "post {} carries a {} annotation in a {} dataset",
                        item.post.id,
                        annotation.kind(),
                        kind
                    )));
                }
                annotation.validate().map_err(Error::InvalidFields)?;
            }
        }
        Ok(Dataset { kind, items })
    }

    pub fn empty(kind: DatasetKind) -> Self {
        Dataset {
            kind,
            items: Vec::new(),
        }
    }

    pub fn kind(&self) -> DatasetKind {
        self.kind
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn into_items(self) -> Vec<Item> {
        self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn annotated_count(&self) -> usize {
        self.items.iter().filter(|i| i.annotation.is_some()).count()
    }

    /// Binary labels of every item, failing on the first unannotated one.
    pub fn labels(&self) -> Result<Vec<Label>> {
        self.items
            .iter()
            .map(|item| {
                item.label().ok_or_else(|| {
                    Error::Validation(format!("post {} is not annotated", item.post.id))
                })
            })
            .collect()
    }

    /// Replaces the annotation at `index`, re-checking the dataset invariants.
    pub fn set_annotation(&mut self, index: usize, annotation: Annotation) -> Result<()> {
        if index >= self.items.len() {
            return Err(Error::Range {
                index,
                len: self.items.len(),
            });
        }
        if annotation.kind() != self.kind {
            return Err(Error::InvalidFields(vec![FieldError::new(
                "annotation",
                format!("expected a {} annotation", self.kind),
            )]));
        }
        annotation.validate().map_err(Error::InvalidFields)?;
        self.items[index].annotation = Some(annotation);
        Ok(())
    }
}
