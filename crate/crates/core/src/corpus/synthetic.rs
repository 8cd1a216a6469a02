//! Seeded synthetic HOC corpus for desk-scale benchmarking.
//!
//! Offensive posts carry one planted three-word phrase. Non-offensive posts
//! reuse the same words as decoys: partial phrases, reordered phrases, or the
//! words scattered apart. Word identity alone is therefore weakly
//! informative, while the contiguous phrase is a strong signal.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    Annotation, Category, Dataset, DatasetKind, HocAnnotation, Item, Language, RawPost, Sentiment,
    Source,
};

/// Planted offensive phrases. Words are reused across phrases and decoys.
pub const PHRASES: [[&str; 3]; 12] = [
    ["dan", "iska", "banza"],
    ["uwar", "gidan", "karya"],
    ["jaki", "mugu", "tsoho"],
    ["shege", "bakin", "wawa"],
    ["sakarai", "dan", "jaki"],
    ["kutuma", "uba", "banza"],
    ["jahili", "mugu", "karya"],
    ["tsoho", "iska", "shege"],
    ["bakin", "uwar", "jahili"],
    ["wawa", "gidan", "sakarai"],
    ["uba", "kutuma", "iska"],
    ["karya", "tsoho", "dan"],
];

const SYLLABLES: [&str; 12] = [
    "ba", "ko", "ma", "ri", "zu", "lo", "te", "gi", "sha", "fu", "de", "no",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub size: usize,
    pub positive_rate: f64,
    pub label_noise: f64,
    pub decoy_rate: f64,
    pub min_filler: usize,
    pub max_filler: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            size: 2000,
            positive_rate: 0.5,
            label_noise: 0.05,
            decoy_rate: 0.75,
            min_filler: 8,
            max_filler: 13,
        }
    }
}

fn phrase_words() -> Vec<&'static str> {
    let mut words: Vec<&str> = PHRASES.iter().flatten().copied().collect();
    words.sort_unstable();
    words.dedup();
    words
}

/// Two-syllable filler words that never collide with phrase words.
fn filler_vocabulary() -> Vec<String> {
    let phrase = phrase_words();
    let mut words = Vec::new();
    for a in SYLLABLES {
        for b in SYLLABLES {
            if a != b {
                let word = format!("{a}{b}");
                if !phrase.contains(&word.as_str()) {
                    words.push(word);
                }
            }
        }
    }
    words
}

fn decoy(rng: &mut ChaCha8Rng, phrase: [&'static str; 3], pool: &[&'static str]) -> Vec<Vec<String>> {
    let other = |rng: &mut ChaCha8Rng, not: &str| loop {
        let w = *pool.choose(rng).unwrap();
        if w != not {
            return w.to_string();
        }
    };
    let [a, b, c] = phrase;
    match rng.random_range(0..4) {
        0 => vec![vec![a.into(), b.into(), other(rng, c)]],
        1 => vec![vec![other(rng, a), b.into(), c.into()]],
        2 => {
            let order = if rng.random_bool(0.5) { [c, a, b] } else { [b, c, a] };
            vec![order.iter().map(|w| w.to_string()).collect()]
        }
        _ => phrase.iter().map(|w| vec![w.to_string()]).collect(),
    }
}

/// Generates a labelled HOC dataset. Equal seeds give equal datasets.
pub fn offensive_corpus(seed: u64, config: &SyntheticConfig) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let filler = filler_vocabulary();
    let pool = phrase_words();
    let mut items = Vec::with_capacity(config.size);

    for i in 0..config.size {
        let positive = rng.random_bool(config.positive_rate);
        let phrase = PHRASES[rng.random_range(0..PHRASES.len())];

        let mut chunks: Vec<Vec<String>> = (0..rng.random_range(config.min_filler..=config.max_filler))
            .map(|_| vec![filler.choose(&mut rng).unwrap().clone()])
            .collect();
        let planted = if positive {
            vec![phrase.iter().map(|w| w.to_string()).collect()]
        } else if rng.random_bool(config.decoy_rate) {
            decoy(&mut rng, phrase, &pool)
        } else {
            Vec::new()
        };
        for chunk in planted {
            let at = rng.random_range(0..=chunks.len());
            chunks.insert(at, chunk);
        }
        let text = chunks.concat().join(" ");

        let offensive = positive ^ rng.random_bool(config.label_noise);
        let sentiment = if offensive {
            *[Sentiment::Negative, Sentiment::Negative, Sentiment::Neutral]
                .choose(&mut rng)
                .unwrap()
        } else {
            *[Sentiment::Positive, Sentiment::Neutral, Sentiment::Negative]
                .choose(&mut rng)
                .unwrap()
        };
        let mut categories = [Category::Political, Category::Social, Category::Religious, Category::Sport];
        categories.shuffle(&mut rng);
        let language = if rng.random_bool(0.8) {
            Language::Hausa
        } else {
            Language::Engausa
        };

        items.push(Item {
            post: RawPost {
                id: format!("syn-{seed}-{i:05}"),
                text,
                source: if i % 3 == 0 { Source::Facebook } else { Source::Twitter },
                posting_date: format!("2023-{:02}-{:02}T12:00:00Z", 1 + i % 12, 1 + i % 28),
                retweet_count: rng.random_range(0..50),
                favourite_count: rng.random_range(0..200),
                screen_name: format!("user{}", i % 97),
                urls: Vec::new(),
            },
            annotation: Some(Annotation::Hoc(HocAnnotation {
                language,
                sentiment,
                category: categories[0],
                offensive,
            })),
        });
    }
    Dataset::new(DatasetKind::Hoc, items).expect("synthetic ids are unique")
}
