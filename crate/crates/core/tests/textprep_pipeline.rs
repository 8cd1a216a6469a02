use std::collections::HashSet;

use hausa_guard::corpus::{read_posts, RawPost};
use hausa_guard::textprep::{clean_pipeline, dedupe, distinct_word_filter, CleanConfig, Document};
use proptest::prelude::*;

fn render(docs: &[Document]) -> String {
    docs.iter()
        .map(|d| format!("{}\t{}\n", d.post_id, d.tokens.join(" ")))
        .collect()
}

#[test]
fn golden_fixture_matches_byte_exactly() {
    let posts = read_posts(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/clean_golden_posts.jsonl")).unwrap();
    assert_eq!(posts.len(), 12);
    let expected = include_str!("fixtures/clean_golden_expected.tsv");
    let docs = clean_pipeline(&posts, &CleanConfig::default()).unwrap();
    assert_eq!(render(&docs), expected);

    // g06 has exactly 7 distinct tokens after cleaning, g05 exactly 8.
    let all = clean_pipeline(
        &posts,
        &CleanConfig {
            min_distinct_words: 0,
            ..CleanConfig::default()
        },
    )
    .unwrap();
    let distinct = |id: &str| all.iter().find(|d| d.post_id == id).unwrap().distinct_tokens();
    assert_eq!(distinct("g06"), 7);
    assert_eq!(distinct("g05"), 8);
}

#[test]
fn dedupe_matches_brute_force_on_planted_duplicates() {
    let vocab = ["dan", "iska", "hari", "bindiga", "gida", "sannu"];
    let mut docs = Vec::new();
    for i in 0..100usize {
        // Every 7th document repeats the token sequence of document i/2.
        let seed = if i % 7 == 3 { i / 2 } else { i };
        let tokens = (0..1 + seed % 4)
            .map(|k| vocab[(seed * 31 + k * 7) % vocab.len()].to_string())
            .collect();
        docs.push(Document::new(format!("d{i}"), tokens));
    }
    let got = dedupe(docs.clone());

    let mut expected = Vec::new();
    for (i, doc) in docs.iter().enumerate() {
        if !docs[..i].iter().any(|earlier| earlier.tokens == doc.tokens) {
            expected.push(doc.clone());
        }
    }
    assert_eq!(got, expected);
    assert!(got.len() < docs.len());
}

fn text_strategy() -> impl Strategy<Value = String> {
    let pieces = prop::sample::select(vec![
        "dan", "Iska", "ƊAN", "ìská", "ta'addanci", "'yan", "bindiga!", "12", "#siyasa", "@user",
        "https://t.co/x", "<b>", "</b>", "😀", "👍🏽", "wlh", "a", "ni", "to", "su", "hari,", "kashewa",
        "talakawa", "gaskiya", "zanga-zanga", "&amp;", "?", "/", "ƙarya", "ɓarna", "d***head",
        "yanxu", "sannu", "wallahi", "€5", "x+y=z", "mutane", "kasuwanci",
    ]);
    prop::collection::vec(pieces, 0..25).prop_map(|v| v.join(" "))
}

fn posts_strategy() -> impl Strategy<Value = Vec<RawPost>> {
    prop::collection::vec(text_strategy(), 0..12).prop_map(|texts| {
        texts
            .into_iter()
            .enumerate()
            .map(|(i, t)| RawPost::from_text(format!("p{i}"), t))
            .collect()
    })
}

fn small_threshold() -> CleanConfig {
    CleanConfig {
        min_distinct_words: 2,
        ..CleanConfig::default()
    }
}

proptest! {
    #[test]
    fn output_tokens_are_clean(posts in posts_strategy()) {
        let config = small_threshold();
        for doc in clean_pipeline(&posts, &config).unwrap() {
            for tok in &doc.tokens {
                prop_assert!(!tok.is_empty());
                prop_assert_eq!(tok.to_lowercase(), tok.clone());
                prop_assert!(!config.stopwords.contains(tok), "stopword {}", tok);
                prop_assert!(
                    tok.chars().all(|c| c.is_alphabetic() || c == '\''),
                    "stripped class in {:?}", tok
                );
                prop_assert!(!tok.starts_with('\'') && !tok.ends_with('\''));
            }
        }
    }

    #[test]
    fn pipeline_is_deterministic(posts in posts_strategy()) {
        let config = small_threshold();
        prop_assert_eq!(
            clean_pipeline(&posts, &config).unwrap(),
            clean_pipeline(&posts, &config).unwrap()
        );
    }

    #[test]
    fn pipeline_is_idempotent(posts in posts_strategy()) {
        let config = small_threshold();
        let once = clean_pipeline(&posts, &config).unwrap();
        let reposted: Vec<RawPost> = once
            .iter()
            .map(|d| RawPost::from_text(d.post_id.clone(), d.tokens.join(" ")))
            .collect();
        let twice = clean_pipeline(&reposted, &config).unwrap();
        let tokens = |docs: &[Document]| docs.iter().map(|d| (d.post_id.clone(), d.tokens.clone())).collect::<Vec<_>>();
        prop_assert_eq!(tokens(&once), tokens(&twice));
    }

    #[test]
    fn distinct_filter_is_monotone(
        token_lists in prop::collection::vec(prop::collection::vec("[a-e]{1,2}", 0..12), 0..20),
        k in 0usize..10,
    ) {
        let docs: Vec<Document> = token_lists
            .into_iter()
            .enumerate()
            .map(|(i, t)| Document::new(format!("d{i}"), t))
            .collect();
        let low = distinct_word_filter(docs.clone(), k);
        let high = distinct_word_filter(docs.clone(), k + 1);
        let low_ids: HashSet<_> = low.iter().map(|d| d.post_id.clone()).collect();
        prop_assert!(high.iter().all(|d| low_ids.contains(&d.post_id)));
        prop_assert!(low.iter().all(|d| docs.contains(d)));
        prop_assert!(low.iter().all(|d| d.distinct_tokens() >= k));
    }
}
