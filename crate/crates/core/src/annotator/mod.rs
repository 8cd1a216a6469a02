//! Annotation sessions over a dataset file: next-unlabeled lookup, atomic
//! saves with a submission journal, and a line-oriented terminal mode.

mod terminal;

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::corpus::{annotation_from_json, load_dataset, save_dataset, Annotation, Dataset, DatasetKind, RawPost};
use crate::error::{Error, Result};

pub use terminal::{run_terminal, TerminalSummary};

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

pub fn lock_path(dataset: &Path) -> PathBuf {
    sibling(dataset, ".lock")
}

pub fn journal_path(dataset: &Path) -> PathBuf {
    sibling(dataset, ".journal.jsonl")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Progress {
    pub total: usize,
    pub annotated: usize,
}

#[derive(Serialize)]
struct JournalLine<'a> {
    seq: u64,
    at: String,
    annotator: &'a str,
    index: usize,
    post_id: &'a str,
    overwrite: bool,
    annotation: &'a Annotation,
}

/// The single writer for one dataset file, held through a lock file.
#[derive(Debug)]
pub struct AnnotationSession {
    path: PathBuf,
    kind: DatasetKind,
    annotator_id: String,
    dataset: Dataset,
    cursor: usize,
    next_seq: u64,
    open: bool,
}

impl AnnotationSession {
    pub fn open(path: impl AsRef<Path>, kind: DatasetKind, annotator_id: impl Into<String>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let annotator_id = annotator_id.into();
        if annotator_id.trim().is_empty() {
            return Err(Error::Validation("annotator id must not be empty".into()));
        }
        let dataset = load_dataset(&path, kind)?;
        let lock = lock_path(&path);
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(mut f) => {
                let _ = writeln!(f, "pid={} annotator={}", std::process::id(), annotator_id);
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                let holder = fs::read_to_string(&lock).unwrap_or_default();
                return Err(Error::State(format!(
                    "{} is locked ({}); remove {} if no session is running",
                    path.display(),
                    holder.trim(),
                    lock.display()
                )));
            }
            Err(e) => return Err(Error::io(&lock, e)),
        }
        let next_seq = match File::open(journal_path(&path)) {
            Ok(f) => BufReader::new(f).lines().count() as u64,
            Err(_) => 0,
        };
        let mut session = AnnotationSession {
            path,
            kind,
            annotator_id,
            dataset,
            cursor: 0,
            next_seq,
            open: true,
        };
        session.advance_cursor();
        Ok(session)
    }

    /// Removes a lock left behind by a session that did not shut down.
    /// Returns whether a lock file existed.
    pub fn unlock(path: impl AsRef<Path>) -> Result<bool> {
        let lock = lock_path(path.as_ref());
        match fs::remove_file(&lock) {
            Ok(()) => Ok(true),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(false),
            Err(e) => Err(Error::io(lock, e)),
        }
    }

    pub fn close(&mut self) -> Result<()> {
        if !self.open {
            return Ok(());
        }
        self.open = false;
        let lock = lock_path(&self.path);
        fs::remove_file(&lock).map_err(|e| Error::io(lock, e))
    }

    fn ensure_open(&self) -> Result<()> {
        if self.open {
            Ok(())
        } else {
            Err(Error::State("session is closed".into()))
        }
    }

    fn advance_cursor(&mut self) {
        let items = self.dataset.items();
        while self.cursor < items.len() && items[self.cursor].annotation.is_some() {
            self.cursor += 1;
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn kind(&self) -> DatasetKind {
        self.kind
    }

    pub fn annotator_id(&self) -> &str {
        &self.annotator_id
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn progress(&self) -> Progress {
        Progress {
            total: self.dataset.len(),
            annotated: self.dataset.annotated_count(),
        }
    }

    /// The lowest-index unannotated post, or `None` when every post is done.
    pub fn next_unlabeled(&self) -> Result<Option<(RawPost, usize)>> {
        self.ensure_open()?;
        Ok(self
            .dataset
            .items()
            .get(self.cursor)
            .map(|item| (item.post.clone(), self.cursor)))
    }

    /// Stores the annotation, saves the dataset atomically, then appends a
    /// journal line. Re-submitting an index overwrites the earlier annotation.
    pub fn submit_annotation(&mut self, index: usize, annotation: Annotation) -> Result<()> {
        self.ensure_open()?;
        let overwrite = self
            .dataset
            .items()
            .get(index)
            .is_some_and(|item| item.annotation.is_some());
        let mut updated = self.dataset.clone();
        updated.set_annotation(index, annotation.clone())?;
        save_dataset(&updated, &self.path)?;
        self.dataset = updated;
        if index < self.cursor {
            self.cursor = index;
        }
        self.advance_cursor();
        self.append_journal(index, overwrite, &annotation)
    }

    /// Parses a flat annotation object for the session schema, then submits it.
    pub fn submit_json(&mut self, index: usize, annotation: &Value) -> Result<()> {
        self.ensure_open()?;
        let len = self.dataset.len();
        if index >= len {
            return Err(Error::Range { index, len });
        }
        let annotation = annotation_from_json(annotation, self.kind).map_err(Error::InvalidFields)?;
        self.submit_annotation(index, annotation)
    }

    fn append_journal(&mut self, index: usize, overwrite: bool, annotation: &Annotation) -> Result<()> {
        let line = JournalLine {
            seq: self.next_seq,
            at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            annotator: &self.annotator_id,
            index,
            post_id: &self.dataset.items()[index].post.id,
            overwrite,
            annotation,
        };
        let text = serde_json::to_string(&line).expect("journal lines always serialize");
        let path = journal_path(&self.path);
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        writeln!(f, "{text}").map_err(|e| Error::io(&path, e))?;
        self.next_seq += 1;
        Ok(())
    }
}

impl Drop for AnnotationSession {
    fn drop(&mut self) {
        let _ = self.close();
    }
}

/// Applies journal lines, in order, to `base`.
pub fn replay_journal<R: BufRead>(base: &Dataset, journal: R) -> Result<Dataset> {
    let mut dataset = base.clone();
    for (n, line) in journal.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::parse(line_no, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| Error::parse(line_no, e.to_string()))?;
        let index = value
            .get("index")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::parse(line_no, "missing index"))? as usize;
        let post_id = value.get("post_id").and_then(Value::as_str).unwrap_or_default();
        match dataset.items().get(index) {
            Some(item) if item.post.id == post_id => {}
            _ => {
                return Err(Error::parse(
                    line_no,
                    format!("journal entry for post '{post_id}' does not match index {index}"),
                ))
            }
        }
        let annotation = annotation_from_json(value.get("annotation").unwrap_or(&Value::Null), dataset.kind())
            .map_err(|errs| Error::parse(line_no, Error::InvalidFields(errs).to_string()))?;
        dataset.set_annotation(index, annotation)?;
    }
    Ok(dataset)
}

pub fn replay_journal_file(base: &Dataset, path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    replay_journal(base, BufReader::new(file))
}
