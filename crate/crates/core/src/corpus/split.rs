use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Dataset;
use crate::error::{Error, Result};
use crate::label::Label;

/// Stratified train/test split on the binary label.
///
/// Each class contributes `round(n_c * train_fraction)` items to the training
/// side, clamped so both sides receive at least one item of every class.
/// Items keep their original relative order on both sides.
pub fn split(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Validation(format!(
            "train fraction {train_fraction} must lie in (0, 1)"
        )));
    }
    let labels = dataset.labels()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_train = vec![false; labels.len()];

    for class in Label::ORDER {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == class)
            .map(|(i, _)| i)
            .collect();
        if members.len() < 2 {
            return Err(Error::Stratification(format!(
                "class {class} has {} item(s); at least 2 are required",
                members.len()
            )));
        }
        let n = members.len();
        let n_train = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
        members.shuffle(&mut rng);
        for &i in &members[..n_train] {
            in_train[i] = true;
        }
    }

    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (item, &is_train) in dataset.items().iter().zip(&in_train) {
        if is_train {
            train.push(item.clone());
        } else {
            test.push(item.clone());
        }
    }
    Ok((
        Dataset::new(dataset.kind(), train)?,
        Dataset::new(dataset.kind(), test)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Annotation, Category, DatasetKind, HocAnnotation, Item, Language, RawPost, Sentiment};

    fn dataset(pos: usize, neg: usize) -> Dataset {
        let items = (0..pos + neg)
            .map(|i| Item {
                post: RawPost::from_text(format!("p{i}"), "text"),
                annotation: Some(Annotation::Hoc(HocAnnotation {
                    language: Language::Hausa,
                    sentiment: Sentiment::Neutral,
                    category: Category::Social,
                    offensive: i < pos,
                })),
            })
            .collect();
        Dataset::new(DatasetKind::Hoc, items).unwrap()
    }

    fn count(ds: &Dataset, label: Label) -> usize {
        ds.labels().unwrap().iter().filter(|l| **l == label).count()
    }

    #[test]
    fn exact_stratification() {
        let (train, test) = split(&dataset(5, 5), 0.8, 1).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
        assert_eq!(count(&train, Label::Positive), 4);
        assert_eq!(count(&test, Label::Positive), 1);
    }

    #[test]
    fn half_split_of_four() {
        let (train, test) = split(&dataset(2, 2), 0.5, 3).unwrap();
        assert_eq!(count(&train, Label::Positive), 1);
        assert_eq!(count(&train, Label::Negative), 1);
        assert_eq!(test.len(), 2);
    }

    #[test]
    fn deterministic_for_seed() {
        let ds = dataset(20, 13);
        assert_eq!(split(&ds, 0.7, 9).unwrap(), split(&ds, 0.7, 9).unwrap());
    }

    #[test]
    fn small_class_is_rejected() {
        assert!(matches!(split(&dataset(1, 5), 0.8, 0), Err(Error::Stratification(_))));
    }

    #[test]
    fn unannotated_is_rejected() {
        let ds = Dataset::new(DatasetKind::Hoc, vec![Item::unlabeled(RawPost::from_text("a", "b"))]).unwrap();
        assert!(matches!(split(&ds, 0.5, 0), Err(Error::Validation(_))));
    }
}
