//! Offensive and threatening content detection for Hausa social media text.
//!
//! The crate covers the whole pipeline: keyword collection and annotation of
//! posts ([`corpus`], [`annotator`]), cleaning ([`textprep`]), n-gram TF-IDF
//! features ([`features`]), classical classifiers ([`models`]), evaluation and
//! n-gram sweeps ([`eval`]), lexicon analytics ([`lexicon`]) and a
//! translation-quality audit ([`translation_audit`]).

pub mod annotator;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod label;
pub mod lexicon;
pub mod models;
pub mod textprep;
pub mod translation_audit;
mod vocab;

pub use error::{Error, FieldError, Result};
pub use label::Label;
pub use vocab::Vocabulary;
