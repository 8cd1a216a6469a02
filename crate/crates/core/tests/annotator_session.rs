use std::io::Cursor;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::Duration;

use hausa_guard::annotator::{journal_path, lock_path, replay_journal_file, run_terminal, AnnotationSession};
use hausa_guard::corpus::{
    load_dataset, save_dataset, Annotation, Category, Dataset, DatasetKind, HocAnnotation, Item, Language, RawPost,
    Sentiment,
};
use hausa_guard::Error;
use serde_json::{json, Value};

fn hoc(offensive: bool) -> Annotation {
    Annotation::Hoc(HocAnnotation {
        language: Language::Hausa,
        sentiment: Sentiment::Negative,
        category: Category::Political,
        offensive,
    })
}

fn write_dataset(dir: &Path, kind: DatasetKind, n: usize, annotated: usize) -> PathBuf {
    let items = (0..n)
        .map(|i| Item {
            post: RawPost::from_text(format!("post{i}"), format!("rubutu na {i} dan iska")),
            annotation: (i < annotated).then(|| hoc(i % 2 == 0)),
        })
        .collect();
    let path = dir.join("data.jsonl");
    save_dataset(&Dataset::new(kind, items).unwrap(), &path).unwrap();
    path
}

#[test]
fn cursor_follows_the_lowest_unannotated_item() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_dataset(dir.path(), DatasetKind::Hoc, 4, 2);
    let mut s = AnnotationSession::open(&path, DatasetKind::Hoc, "amina").unwrap();
    assert_eq!(s.next_unlabeled().unwrap().unwrap().1, 2);
    s.submit_annotation(2, hoc(true)).unwrap();
    assert_eq!(s.next_unlabeled().unwrap().unwrap().1, 3);
    s.submit_annotation(3, hoc(false)).unwrap();
    assert!(s.next_unlabeled().unwrap().is_none());
    assert_eq!(s.progress().annotated, 4);
    s.close().unwrap();
    assert!(matches!(s.next_unlabeled(), Err(Error::State(_))));
    assert!(matches!(s.submit_annotation(0, hoc(true)), Err(Error::State(_))));
}

#[test]
fn submission_persists_the_annotation_object() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_dataset(dir.path(), DatasetKind::Hoc, 3, 0);
    let mut s = AnnotationSession::open(&path, DatasetKind::Hoc, "amina").unwrap();
    let ann = json!({"language": "engausa", "sentiment": "neutral", "category": "sport", "offensive": false});
    s.submit_json(1, &ann).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let rec: Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert_eq!(rec["annotation"], ann);
    assert_eq!(serde_json::from_str::<Value>(text.lines().next().unwrap()).unwrap()["annotation"], Value::Null);
    assert_eq!(load_dataset(&path, DatasetKind::Hoc).unwrap(), *s.dataset());
}

#[test]
fn invalid_submissions_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_dataset(dir.path(), DatasetKind::Htc, 2, 0);
    let before = std::fs::read(&path).unwrap();
    let mut s = AnnotationSession::open(&path, DatasetKind::Htc, "amina").unwrap();
    let bad_class = json!({
        "language": "hausa", "sentiment": "negative", "category": "security", "offensive": false,
        "location": null, "violence": null, "threat": "za mu kashe", "threat_object": null, "class": "no_threat"
    });
    match s.submit_json(0, &bad_class) {
        Err(Error::InvalidFields(f)) => assert_eq!(f[0].field, "threat"),
        other => panic!("{other:?}"),
    }
    let mut bad_enum = bad_class.clone();
    bad_enum["sentiment"] = json!("angry");
    bad_enum["threat"] = Value::Null;
    match s.submit_json(0, &bad_enum) {
        Err(Error::InvalidFields(f)) => assert_eq!(f.iter().map(|e| e.field.as_str()).collect::<Vec<_>>(), ["sentiment"]),
        other => panic!("{other:?}"),
    }
    assert!(matches!(s.submit_json(2, &bad_class), Err(Error::Range { index: 2, len: 2 })));
    assert!(matches!(s.submit_annotation(5, hoc(true)), Err(Error::Range { .. })));
    assert_eq!(std::fs::read(&path).unwrap(), before);
}

#[test]
fn one_session_per_dataset_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_dataset(dir.path(), DatasetKind::Hoc, 2, 0);
    let first = AnnotationSession::open(&path, DatasetKind::Hoc, "a").unwrap();
    assert!(matches!(AnnotationSession::open(&path, DatasetKind::Hoc, "b"), Err(Error::State(_))));
    drop(first);
    assert!(!lock_path(&path).exists());
    let _second = AnnotationSession::open(&path, DatasetKind::Hoc, "b").unwrap();
    assert!(AnnotationSession::unlock(&path).unwrap());
    assert!(!AnnotationSession::unlock(&path).unwrap());
}

#[test]
fn journal_replays_to_the_final_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_dataset(dir.path(), DatasetKind::Hoc, 5, 1);
    let base = load_dataset(&path, DatasetKind::Hoc).unwrap();
    {
        let mut s = AnnotationSession::open(&path, DatasetKind::Hoc, "amina").unwrap();
        s.submit_annotation(1, hoc(true)).unwrap();
        s.submit_annotation(3, hoc(false)).unwrap();
        s.submit_annotation(1, hoc(false)).unwrap();
        s.submit_annotation(0, hoc(true)).unwrap();
    }
    {
        let mut s = AnnotationSession::open(&path, DatasetKind::Hoc, "musa").unwrap();
        s.submit_annotation(4, hoc(true)).unwrap();
    }
    let journal = std::fs::read_to_string(journal_path(&path)).unwrap();
    let lines: Vec<Value> = journal.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 5);
    let overwrite: Vec<bool> = lines.iter().map(|l| l["overwrite"].as_bool().unwrap()).collect();
    assert_eq!(overwrite, [false, false, true, true, false]);
    assert_eq!(lines.iter().map(|l| l["seq"].as_u64().unwrap()).collect::<Vec<_>>(), [0, 1, 2, 3, 4]);
    assert_eq!(lines[4]["annotator"], "musa");

    let replayed = replay_journal_file(&base, journal_path(&path)).unwrap();
    assert_eq!(replayed, load_dataset(&path, DatasetKind::Hoc).unwrap());
}

#[test]
fn terminal_mode_prompts_until_done() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_dataset(dir.path(), DatasetKind::Hoc, 3, 1);
    let mut s = AnnotationSession::open(&path, DatasetKind::Hoc, "amina").unwrap();
    let script = "hausa\nmaybe\nnegative\npolitical\ny\nengausa\nneutral\nsport\nno\n";
    let mut out = Vec::new();
    let summary = run_terminal(&mut s, Cursor::new(script), &mut out).unwrap();
    assert_eq!((summary.submitted, summary.quit), (2, false));
    let out = String::from_utf8(out).unwrap();
    assert!(out.contains("'maybe' is not one of positive/neutral/negative"));
    assert!(out.contains("all posts annotated"));
    assert_eq!(s.dataset().items()[1].annotation, Some(hoc(true)));
    let last = s.dataset().items()[2].annotation.clone().unwrap();
    assert_eq!((last.language(), last.category()), (Language::Engausa, Category::Sport));

    drop(s);
    let path = write_dataset(dir.path(), DatasetKind::Hoc, 3, 0);
    let mut s = AnnotationSession::open(&path, DatasetKind::Hoc, "amina").unwrap();
    let summary = run_terminal(&mut s, Cursor::new("hausa\nq\n"), std::io::sink()).unwrap();
    assert_eq!((summary.submitted, summary.quit), (0, true));
    assert_eq!(s.progress().annotated, 0);
}

const CHILD_ENV: &str = "HAUSA_GUARD_KILL_TEST_DATASET";

/// Runs only as a child of `killed_writer_leaves_a_consistent_file`.
#[test]
fn child_writer_loop() {
    let Ok(path) = std::env::var(CHILD_ENV) else { return };
    let mut s = AnnotationSession::open(&path, DatasetKind::Hoc, "child").unwrap();
    let n = s.dataset().len();
    for round in 0.. {
        s.submit_annotation(round % n, hoc(round % 3 == 0)).unwrap();
    }
}

#[test]
fn killed_writer_leaves_a_consistent_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_dataset(dir.path(), DatasetKind::Hoc, 40, 0);
    let original = load_dataset(&path, DatasetKind::Hoc).unwrap();
    for delay in [0, 15, 60] {
        let mut child = Command::new(std::env::current_exe().unwrap())
            .args(["--exact", "child_writer_loop", "--nocapture", "--test-threads=1"])
            .env(CHILD_ENV, &path)
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .unwrap();
        let journal = journal_path(&path);
        let started = std::time::Instant::now();
        while !journal.exists() && started.elapsed() < Duration::from_secs(20) {
            std::thread::sleep(Duration::from_millis(2));
        }
        std::thread::sleep(Duration::from_millis(delay));
        child.kill().unwrap();
        child.wait().unwrap();

        let reloaded = load_dataset(&path, DatasetKind::Hoc).expect("dataset is never torn");
        assert_eq!(reloaded.len(), original.len());
        for (a, b) in reloaded.items().iter().zip(original.items()) {
            assert_eq!(a.post, b.post);
            assert!(a.annotation.is_none() || a.annotation == Some(hoc(true)) || a.annotation == Some(hoc(false)));
        }
        assert!(lock_path(&path).exists(), "killed session leaves its lock");
        assert!(matches!(AnnotationSession::open(&path, DatasetKind::Hoc, "x"), Err(Error::State(_))));
        AnnotationSession::unlock(&path).unwrap();
        AnnotationSession::open(&path, DatasetKind::Hoc, "x").unwrap();
        let _ = std::fs::remove_file(&journal);
    }
}
