use std::collections::BTreeMap;

use hausa_guard::corpus::synthetic::{offensive_corpus, SyntheticConfig};
use hausa_guard::corpus::{Annotation, Category, Dataset, DatasetKind, HocAnnotation, Item, Language, RawPost, Sentiment};
use hausa_guard::lexicon::{
    dataset_profile, default_lexicon, match_terms, parse_lexicon, term_report, LexiconEntry, Subcategory,
    REFERENCE_PROPORTIONS,
};
use hausa_guard::textprep::Document;
use hausa_guard::Error;
use proptest::prelude::*;

fn item(id: usize, text: &str, offensive: bool, sentiment: Sentiment) -> Item {
    Item {
        post: RawPost::from_text(format!("p{id}"), text),
        annotation: Some(Annotation::Hoc(HocAnnotation {
            language: Language::Hausa,
            sentiment,
            category: Category::Social,
            offensive,
        })),
    }
}

fn hoc(items: Vec<Item>) -> Dataset {
    Dataset::new(DatasetKind::Hoc, items).unwrap()
}

#[test]
fn three_of_ten_positive_posts() {
    let mut items: Vec<Item> = (0..10)
        .map(|i| {
            let text = if i < 3 { "kai wawa ne kawai" } else { "ba haka ba ne" };
            item(i, text, true, Sentiment::Negative)
        })
        .collect();
    // Negative posts never count, even when they contain the term.
    items.extend((10..15).map(|i| item(i, "wawa wawa", false, Sentiment::Neutral)));
    let lex = parse_lexicon("wawa\toffensive\tidiot\n").unwrap();
    let report = term_report(&hoc(items), &lex).unwrap();
    assert_eq!(report.positive_posts, 10);
    assert_eq!(report.rows[0].count, 3);
    assert!((report.rows[0].proportion - 0.30).abs() < 1e-12);
    assert!(report.to_tsv().starts_with("# proportion = positive-class posts"));
}

#[test]
fn reference_rows_carry_published_values() {
    let find = |t: &str| REFERENCE_PROPORTIONS.iter().find(|r| r.term == t).unwrap();
    let dan_iska = find("dan iska");
    assert_eq!((dan_iska.kind, dan_iska.subcategory), (DatasetKind::Hoc, Subcategory::Abusive));
    assert!((dan_iska.proportion - 0.277).abs() < 1e-12);
    let bindiga = find("bindiga");
    assert_eq!((bindiga.kind, bindiga.subcategory), (DatasetKind::Htc, Subcategory::ThreatObject));
    assert!((bindiga.proportion - 0.9245).abs() < 1e-12);
}

fn brute_force_contains(text: &str, term: &str) -> bool {
    let padded = |s: &str| format!(" {} ", s.split_whitespace().collect::<Vec<_>>().join(" "));
    padded(&text.to_lowercase()).contains(&padded(term))
}

#[test]
fn term_report_matches_membership_scan() {
    let ds = offensive_corpus(11, &SyntheticConfig { size: 400, ..Default::default() });
    let mut lex = default_lexicon();
    lex.push(LexiconEntry::new("dan iska banza", Subcategory::Abusive, "").unwrap());
    lex.push(LexiconEntry::new("tsoho iska", Subcategory::Abusive, "").unwrap());
    let report = term_report(&ds, &lex).unwrap();

    let positives: Vec<&str> = ds
        .items()
        .iter()
        .filter(|i| i.label().unwrap().is_positive())
        .map(|i| i.post.text.as_str())
        .collect();
    assert_eq!(report.positive_posts, positives.len());
    assert_eq!(report.rows.len(), lex.len());
    for row in &report.rows {
        let expected = positives.iter().filter(|t| brute_force_contains(t, &row.term)).count();
        assert_eq!(row.count, expected, "{}", row.term);
        assert_eq!(row.proportion, expected as f64 / positives.len() as f64);
        assert!((0.0..=1.0).contains(&row.proportion));
    }
    assert!(report.rows.iter().any(|r| r.count > 0));
    assert!(report.rows.windows(2).all(|w| w[0].proportion >= w[1].proportion));
}

#[test]
fn term_report_needs_positive_posts() {
    let ds = hoc(vec![item(0, "sannu", false, Sentiment::Neutral)]);
    assert!(matches!(term_report(&ds, &default_lexicon()), Err(Error::Validation(_))));
    let unlabeled = Dataset::new(DatasetKind::Hoc, vec![Item::unlabeled(RawPost::from_text("u", "x"))]).unwrap();
    assert!(matches!(term_report(&unlabeled, &default_lexicon()), Err(Error::Validation(_))));
}

#[test]
fn profile_small_examples() {
    use Sentiment::*;
    let ds = hoc([Negative, Negative, Positive, Neutral].iter().enumerate().map(|(i, s)| item(i, "x", true, *s)).collect());
    let p = dataset_profile(&ds).unwrap();
    let frac = |v: &str| p.sentiment.iter().find(|b| b.value == v).unwrap().fraction;
    assert_eq!((frac("negative"), frac("positive"), frac("neutral")), (0.5, 0.25, 0.25));

    let single = dataset_profile(&hoc(vec![item(0, "x", false, Neutral)])).unwrap();
    for (_, buckets) in single.facets() {
        assert_eq!(buckets.len(), 1);
        assert_eq!(buckets[0].fraction, 1.0);
    }
    assert!(matches!(dataset_profile(&Dataset::empty(DatasetKind::Htc)), Err(Error::Validation(_))));
}

#[test]
fn profile_matches_brute_force_counts() {
    let ds = offensive_corpus(4, &SyntheticConfig { size: 100, ..Default::default() });
    let p = dataset_profile(&ds).unwrap();
    let mut expected: BTreeMap<(&str, String), usize> = BTreeMap::new();
    for it in ds.items() {
        let a = it.annotation.as_ref().unwrap();
        *expected.entry(("language", a.language().to_string())).or_default() += 1;
        *expected.entry(("sentiment", a.sentiment().to_string())).or_default() += 1;
        *expected.entry(("category", a.category().to_string())).or_default() += 1;
    }
    let mut got = BTreeMap::new();
    for (facet, buckets) in p.facets() {
        let sum: f64 = buckets.iter().map(|b| b.fraction).sum();
        assert!((sum - 1.0).abs() <= 1e-12, "{facet} fractions sum to {sum}");
        for b in buckets {
            got.insert((facet, b.value.to_string()), b.count);
            assert_eq!(b.fraction, b.count as f64 / 100.0);
        }
    }
    assert_eq!(got, expected);
}

fn words() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vec!["dan", "iska", "gari", "ne", "hari", "wawa"]), 0..6)
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

proptest! {
    #[test]
    fn matching_ignores_padding_outside_the_window(left in words(), right in words()) {
        let lex = default_lexicon();
        let core: Vec<String> = ["dan", "iska"].iter().map(|s| s.to_string()).collect();
        let padded: Vec<String> = left.iter().chain(&core).chain(&right).cloned().collect();
        let hit = |tokens: Vec<String>| {
            match_terms(&Document::new("d", tokens), &lex).iter().any(|e| e.term == "dan iska")
        };
        prop_assert!(hit(core.clone()));
        prop_assert!(hit(padded));
    }
}
