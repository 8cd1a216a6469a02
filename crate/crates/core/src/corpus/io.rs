use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use super::{
    Annotation, Category, Dataset, DatasetKind, HocAnnotation, HtcAnnotation, Item, Language,
    RawPost, Sentiment, ThreatClass,
};
use crate::error::{Error, FieldError, Result};
use crate::vocab::Vocabulary;

const HOC_KEYS: &[&str] = &["language", "sentiment", "category", "offensive"];
const HTC_KEYS: &[&str] = &[
    "language",
    "sentiment",
    "category",
    "offensive",
    "location",
    "violence",
    "threat",
    "threat_object",
    "class",
];

#[derive(Serialize)]
struct RecordOut<'a> {
    id: &'a str,
    text: &'a str,
    source: super::Source,
    posting_date: &'a str,
    retweet_count: u64,
    favourite_count: u64,
    screen_name: &'a str,
    urls: &'a [String],
    annotation: Option<&'a Annotation>,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordIn {
    id: String,
    text: String,
    source: super::Source,
    posting_date: String,
    retweet_count: u64,
    favourite_count: u64,
    screen_name: String,
    urls: Vec<String>,
    #[serde(default)]
    annotation: Option<Value>,
}

/// Serializes one dataset item as a single-line flat JSON object.
pub fn record_line(item: &Item) -> String {
    let post = &item.post;
    let out = RecordOut {
        id: &post.id,
        text: &post.text,
        source: post.source,
        posting_date: &post.posting_date,
        retweet_count: post.retweet_count,
        favourite_count: post.favourite_count,
        screen_name: &post.screen_name,
        urls: &post.urls,
        annotation: item.annotation.as_ref(),
    };
    serde_json::to_string(&out).expect("dataset records always serialize")
}

fn parse_record(line: &str, kind: Option<DatasetKind>) -> std::result::Result<Item, String> {
    let record: RecordIn = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let annotation = match (record.annotation, kind) {
        (None | Some(Value::Null), _) => None,
        (Some(value), Some(kind)) => Some(
            annotation_from_json(&value, kind).map_err(|errs| {
                errs.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; ")
            })?,
        ),
        (Some(_), None) => None,
    };
    Ok(Item {
        post: RawPost {
            id: record.id,
            text: record.text,
            source: record.source,
            posting_date: record.posting_date,
            retweet_count: record.retweet_count,
            favourite_count: record.favourite_count,
            screen_name: record.screen_name,
            urls: record.urls,
        },
        annotation,
    })
}

/// Parses dataset records from a reader, one JSON object per line.
pub fn parse_dataset<R: BufRead>(reader: R, kind: DatasetKind) -> Result<Dataset> {
    let mut items = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::parse(n + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(parse_record(&line, Some(kind)).map_err(|m| Error::parse(n + 1, m))?);
    }
    Dataset::new(kind, items)
}

pub fn load_dataset(path: impl AsRef<Path>, kind: DatasetKind) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(BufReader::new(file), kind)
}

/// Reads posts from an archive file in the dataset line format, ignoring annotations.
pub fn read_posts(path: impl AsRef<Path>) -> Result<Vec<RawPost>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut posts = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = parse_record(&line, None).map_err(|m| Error::parse(n + 1, m))?;
        item.post.validate()?;
        posts.push(item.post);
    }
    Ok(posts)
}

pub fn write_dataset<W: Write>(dataset: &Dataset, mut writer: W) -> std::io::Result<()> {
    for item in dataset.items() {
        writer.write_all(record_line(item).as_bytes())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

/// Writes the dataset to `path` through a temporary sibling file and an
/// atomic rename, so readers see either the old or the new file.
pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::io(path, std::io::Error::other("not a file path")))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);

    let result = (|| {
        let file = File::create(&tmp)?;
        let mut writer = BufWriter::new(file);
        write_dataset(dataset, &mut writer)?;
        writer.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// CSV export with the annotation flattened into `ann_`-prefixed columns.
pub fn write_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let ann_keys = match dataset.kind() {
        DatasetKind::Hoc => HOC_KEYS,
        DatasetKind::Htc => HTC_KEYS,
    };
    let mut header: Vec<String> = [
        "id",
        "text",
        "source",
        "posting_date",
        "retweet_count",
        "favourite_count",
        "screen_name",
        "urls",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(ann_keys.iter().map(|k| format!("ann_{k}")));
    let to_err = |e: csv::Error| Error::Validation(format!("csv export failed: {e}"));
    csv.write_record(&header).map_err(to_err)?;

    for item in dataset.items() {
        let p = &item.post;
        let mut row = vec![
            p.id.clone(),
            p.text.clone(),
            p.source.to_string(),
            p.posting_date.clone(),
            p.retweet_count.to_string(),
            p.favourite_count.to_string(),
            p.screen_name.clone(),
            p.urls.join(" "),
        ];
        let opt = |v: &Option<String>| v.clone().unwrap_or_default();
        match &item.annotation {
            None => row.extend(std::iter::repeat_n(String::new(), ann_keys.len())),
            Some(Annotation::Hoc(a)) => row.extend([
                a.language.to_string(),
                a.sentiment.to_string(),
                a.category.to_string(),
                a.offensive.to_string(),
            ]),
            Some(Annotation::Htc(a)) => row.extend([
                a.language.to_string(),
                a.sentiment.to_string(),
                a.category.to_string(),
                a.offensive.to_string(),
                opt(&a.location),
                opt(&a.violence),
                opt(&a.threat),
                opt(&a.threat_object),
                a.class.to_string(),
            ]),
        }
        csv.write_record(&row).map_err(to_err)?;
    }
    csv.flush()
        .map_err(|e| Error::Validation(format!("csv export failed: {e}")))
}

/// Parses an annotation object for the given schema, collecting every invalid
/// field instead of stopping at the first.
pub fn annotation_from_json(
    value: &Value,
    kind: DatasetKind,
) -> std::result::Result<Annotation, Vec<FieldError>> {
    let Some(obj) = value.as_object() else {
        return Err(vec![FieldError::new("annotation", "must be an object")]);
    };
    let allowed = match kind {
        DatasetKind::Hoc => HOC_KEYS,
        DatasetKind::Htc => HTC_KEYS,
    };
    let mut errors = Vec::new();
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            errors.push(FieldError::new(key.clone(), format!("unknown field for {kind}")));
        }
    }

    let language = vocab_field::<Language>(obj, "language", &mut errors);
    let sentiment = vocab_field::<Sentiment>(obj, "sentiment", &mut errors);
    let category = vocab_field::<Category>(obj, "category", &mut errors);
    let offensive = match obj.get("offensive") {
        Some(Value::Bool(b)) => Some(*b),
        Some(_) => {
            errors.push(FieldError::new("offensive", "must be true or false"));
            None
        }
        None => {
            errors.push(FieldError::new("offensive", "is required"));
            None
        }
    };

    let annotation = match kind {
        DatasetKind::Hoc => {
            if !errors.is_empty() {
                return Err(errors);
            }
            Annotation::Hoc(HocAnnotation {
                language: language.unwrap(),
                sentiment: sentiment.unwrap(),
                category: category.unwrap(),
                offensive: offensive.unwrap(),
            })
        }
        DatasetKind::Htc => {
            let location = optional_text(obj, "location", &mut errors);
            let violence = optional_text(obj, "violence", &mut errors);
            let threat = optional_text(obj, "threat", &mut errors);
            let threat_object = optional_text(obj, "threat_object", &mut errors);
            let class = vocab_field::<ThreatClass>(obj, "class", &mut errors);
            if !errors.is_empty() {
                return Err(errors);
            }
            let htc = HtcAnnotation {
                language: language.unwrap(),
                sentiment: sentiment.unwrap(),
                category: category.unwrap(),
                offensive: offensive.unwrap(),
                location,
                violence,
                threat,
                threat_object,
                class: class.unwrap(),
            };
            htc.validate()?;
            Annotation::Htc(htc)
        }
    };
    Ok(annotation)
}

fn vocab_field<V: Vocabulary>(
    obj: &Map<String, Value>,
    key: &str,
    errors: &mut Vec<FieldError>,
) -> Option<V> {
    match obj.get(key) {
        Some(Value::String(s)) => match V::parse(s) {
            Some(v) => Some(v),
            None => {
                errors.push(FieldError::new(
                    key,
                    format!("invalid value '{s}' (expected one of: {})", V::options()),
                ));
                None
            }
        },
        Some(_) => {
            errors.push(FieldError::new(key, "must be a string"));
            None
        }
        None => {
            errors.push(FieldError::new(key, "is required"));
            None
        }
    }
}

fn optional_text(
    obj: &Map<String, Value>,
    key: &str,
    errors: &mut Vec<FieldError>,
) -> Option<String> {
    match obj.get(key) {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => {
            errors.push(FieldError::new(key, "must be a string or null"));
            None
        }
    }
}
