//! `hausa-guard` command line: collection, cleaning, annotation, training,
//! evaluation, sweeps, prediction and the lexicon and translation reports.
//!
//! Exit status is 0 on success, 1 on usage or validation errors and 2 on I/O
//! errors. Every artifact written to a file gets a `<file>.config` sidecar
//! holding the resolved configuration; passing it back with `--config`
//! reproduces the artifact.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hausa_guard::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_io() => 2,
            CliError::Output(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Args, Default)]
struct Common {
    /// `key=value` configuration file; repeatable, later files win.
    #[arg(long = "config", value_name = "FILE", global = true)]
    config: Vec<PathBuf>,
    /// Seed for every random choice (splits, model initialisation, sampling).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Override any setting, e.g. `--set rf.trees=50`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Debug, Args, Default)]
struct CleanFlags {
    /// Stopword list (one token per line).
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Misspelling map (`wrong<TAB>right`).
    #[arg(long)]
    misspellings: Option<PathBuf>,
    /// Stemming suffix list.
    #[arg(long)]
    suffixes: Option<PathBuf>,
    #[arg(long)]
    no_stemming: bool,
    #[arg(long)]
    min_distinct_words: Option<usize>,
}

#[derive(Debug, Args, Default)]
struct DatasetFlags {
    /// Dataset file, or `synthetic[:SIZE]` for the seeded synthetic corpus.
    #[arg(long)]
    dataset: Option<String>,
    /// HOC or HTC.
    #[arg(long)]
    kind: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Select archive posts matching any keyword.
    Collect {
        /// Archive file or directory of JSONL pages.
        #[arg(long)]
        archive: Option<PathBuf>,
        /// Comma-separated keywords.
        #[arg(long)]
        keywords: Option<String>,
        #[arg(long)]
        max_iterations: Option<usize>,
        #[arg(long)]
        max_results: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        kind: Option<String>,
    },
    /// Run the cleaning pipeline over a post file.
    Clean {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        clean: CleanFlags,
    },
    /// Annotate unlabeled posts at the terminal.
    Annotate {
        #[command(flatten)]
        data: DatasetFlags,
        #[arg(long)]
        annotator: Option<String>,
        /// Remove a lock left by a session that did not shut down, then exit.
        #[arg(long)]
        unlock: bool,
    },
    /// Serve the annotation endpoints and UI assets.
    Serve {
        #[command(flatten)]
        data: DatasetFlags,
        #[arg(long)]
        annotator: Option<String>,
        #[arg(long)]
        addr: Option<String>,
        #[arg(long)]
        static_dir: Option<PathBuf>,
        /// Environment variable holding the shared token.
        #[arg(long)]
        token_env: Option<String>,
    },
    /// Fit a vectorizer and a classifier.
    Train {
        #[command(flatten)]
        data: DatasetFlags,
        #[command(flatten)]
        clean: CleanFlags,
        /// Model kind (nb, logreg, svm, dt, rf, gbt, mlp).
        #[arg(long)]
        model: Option<String>,
        /// N-gram range, `a..b` or `n` for `1..n`.
        #[arg(long)]
        ngrams: Option<String>,
        #[arg(long)]
        min_df: Option<usize>,
        #[arg(long)]
        max_features: Option<usize>,
        /// Train on the training side of a seeded stratified split only.
        #[arg(long)]
        holdout: bool,
        #[arg(long)]
        train_fraction: Option<f64>,
        #[arg(long)]
        out_model: Option<PathBuf>,
        #[arg(long)]
        out_vectorizer: Option<PathBuf>,
    },
    /// Score a trained model on a labelled dataset.
    Evaluate {
        #[command(flatten)]
        data: DatasetFlags,
        #[command(flatten)]
        clean: CleanFlags,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        vectorizer: Option<PathBuf>,
        /// Evaluate on the test side of the seeded split used by `train --holdout`.
        #[arg(long)]
        holdout: bool,
        #[arg(long)]
        train_fraction: Option<f64>,
        #[arg(long)]
        averaging: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Models x n-gram ranges table.
    Sweep {
        #[command(flatten)]
        data: DatasetFlags,
        #[command(flatten)]
        clean: CleanFlags,
        /// Comma-separated model kinds.
        #[arg(long)]
        models: Option<String>,
        /// Comma-separated n-gram ranges.
        #[arg(long)]
        ngrams: Option<String>,
        #[arg(long)]
        train_fraction: Option<f64>,
        #[arg(long)]
        min_df: Option<usize>,
        #[arg(long)]
        max_features: Option<usize>,
        #[arg(long)]
        averaging: Option<String>,
        /// CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Aligned plain-text output.
        #[arg(long)]
        out_text: Option<PathBuf>,
    },
    /// Classify text with a trained model.
    Predict {
        #[command(flatten)]
        clean: CleanFlags,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        vectorizer: Option<PathBuf>,
        #[arg(long)]
        text: Option<String>,
        /// File with one post per line.
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Proportion of positive posts containing each lexicon term.
    LexiconReport {
        #[command(flatten)]
        data: DatasetFlags,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Language, sentiment and category distribution.
    Profile {
        #[command(flatten)]
        data: DatasetFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare provider translations of lexicon terms with their glosses.
    AuditTranslations {
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// `stub` or `http`.
        #[arg(long)]
        provider: Option<String>,
        /// Stub outputs (`term<TAB>output`).
        #[arg(long)]
        stub: Option<PathBuf>,
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        threshold: Option<f64>,
        /// `jaccard` or `overlap`.
        #[arg(long)]
        similarity: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Parser)]
#[command(name = "hausa-guard", version, about = "Offensive and threatening content detection for Hausa posts")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Runs one command; returns the process exit status.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match Cli::try_parse_from(args) {
        Ok(p) => p,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match commands::execute(parsed.common, parsed.command, input, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
