use std::collections::HashSet;
use std::path::{Path, PathBuf};

use super::{read_posts, RawPost};
use crate::error::{Error, Result};
use crate::textprep::fold;

/// Keyword search parameters for collection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectionRequest {
    keywords: Vec<String>,
    max_iterations: usize,
    max_results: usize,
}

impl CollectionRequest {
    pub fn new(keywords: Vec<String>, max_iterations: usize, max_results: usize) -> Result<Self> {
        if keywords.is_empty() {
            return Err(Error::InvalidRequest("keyword list is empty".into()));
        }
        if keywords.iter().any(|k| k.trim().is_empty()) {
            return Err(Error::InvalidRequest("keywords must not be blank".into()));
        }
        if max_iterations == 0 {
            return Err(Error::InvalidRequest("max_iterations must be positive".into()));
        }
        if max_results == 0 {
            return Err(Error::InvalidRequest("max_results must be positive".into()));
        }
        Ok(CollectionRequest {
            keywords,
            max_iterations,
            max_results,
        })
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn max_results(&self) -> usize {
        self.max_results
    }
}

/// A post archive that is read one page per search iteration.
pub trait ArchiveSource {
    /// Returns the posts of page `iteration`, or `None` once the archive is exhausted.
    fn fetch_page(&mut self, iteration: usize) -> Result<Option<Vec<RawPost>>>;
}

/// An archive stored as a directory of JSONL files, one page per file in name order.
#[derive(Debug, Clone)]
pub struct DirArchive {
    pages: Vec<PathBuf>,
}

impl DirArchive {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut pages = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            if path.extension().is_some_and(|ext| ext == "jsonl") {
                pages.push(path);
            }
        }
        pages.sort();
        Ok(DirArchive { pages })
    }
}

impl ArchiveSource for DirArchive {
    fn fetch_page(&mut self, iteration: usize) -> Result<Option<Vec<RawPost>>> {
        match self.pages.get(iteration) {
            Some(path) => read_posts(path).map(Some),
            None => Ok(None),
        }
    }
}

struct Matcher {
    keywords: Vec<String>,
}

impl Matcher {
    fn new(request: &CollectionRequest) -> Self {
        Matcher {
            keywords: request.keywords.iter().map(|k| fold(k.trim())).collect(),
        }
    }

    fn matches(&self, text: &str) -> bool {
        let text = fold(text);
        self.keywords.iter().any(|k| text.contains(k.as_str()))
    }
}

/// Scans `posts` in order, appending matches to `out` until `limit` is reached.
/// Returns true once the result is full.
fn scan(
    posts: impl IntoIterator<Item = RawPost>,
    matcher: &Matcher,
    seen: &mut HashSet<String>,
    out: &mut Vec<RawPost>,
    limit: usize,
) -> bool {
    for post in posts {
        if out.len() >= limit {
            return true;
        }
        if seen.contains(&post.id) || !matcher.matches(&post.text) {
            continue;
        }
        seen.insert(post.id.clone());
        out.push(post);
    }
    out.len() >= limit
}

/// Returns every archive post whose folded text contains at least one keyword,
/// in archive order, deduplicated by id and truncated at `max_results`.
pub fn collect_by_keywords(archive: &[RawPost], request: &CollectionRequest) -> Vec<RawPost> {
    let matcher = Matcher::new(request);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    scan(
        archive.iter().cloned(),
        &matcher,
        &mut seen,
        &mut out,
        request.max_results,
    );
    out
}

/// Collection over a paged archive: at most `max_iterations` pages are read.
pub fn collect_paged<A: ArchiveSource>(
    source: &mut A,
    request: &CollectionRequest,
) -> Result<Vec<RawPost>> {
    let matcher = Matcher::new(request);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for iteration in 0..request.max_iterations {
        let Some(page) = source.fetch_page(iteration)? else {
            break;
        };
        if scan(page, &matcher, &mut seen, &mut out, request.max_results) {
            break;
        }
    }
    Ok(out)
}
