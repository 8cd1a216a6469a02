use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use hausa_guard::annotator::{run_terminal, AnnotationSession};
use hausa_guard::corpus::synthetic::{offensive_corpus, SyntheticConfig};
use hausa_guard::corpus::{
    collect_by_keywords, collect_paged, load_dataset, read_posts, split, write_dataset, CollectionRequest, Dataset,
    DatasetKind, DirArchive, Item,
};
use hausa_guard::eval::{evaluate, ngram_sweep, Averaging, EvalOptions, SweepConfig};
use hausa_guard::features::{NGramRange, TfidfModel};
use hausa_guard::lexicon::{
    dataset_profile, default_lexicon, load_lexicon, term_report, LexiconEntry, REFERENCE_PROPORTIONS,
};
use hausa_guard::models::{train, ModelKind, ModelSpec, TrainedModel};
use hausa_guard::textprep::{
    clean_pipeline, load_misspellings, load_stopwords, CleanConfig, Cleaner, Stemmer, DEFAULT_MIN_DISTINCT_WORDS,
};
use hausa_guard::translation_audit::{
    audit_lexicon, AuditOptions, HttpProvider, HttpProviderConfig, Similarity, StubProvider, TranslationProvider,
};
use hausa_guard::Error;
use hausa_guard_server::ServeConfig;

use crate::{CleanFlags, CliError, CliResult, Command, Common, DatasetFlags, RunConfig};

const BUNDLED: &str = "bundled";

fn put(cfg: &mut RunConfig, key: &str, value: Option<impl ToString>) {
    if let Some(v) = value {
        cfg.set(key, v.to_string());
    }
}

fn put_path(cfg: &mut RunConfig, key: &str, value: &Option<PathBuf>) {
    put(cfg, key, value.as_ref().map(|p| p.display().to_string()));
}

fn put_flag(cfg: &mut RunConfig, key: &str, on: bool) {
    if on {
        cfg.set(key, "true");
    }
}

fn clean_defaults(cfg: &mut RunConfig) {
    for key in ["clean.stopwords", "clean.misspellings", "clean.suffixes"] {
        cfg.set(key, BUNDLED);
    }
    let d = CleanConfig::default();
    cfg.set("clean.stemming", d.apply_stemming.to_string());
    cfg.set("clean.fold_accents", d.fold_accents.to_string());
    cfg.set("clean.strip_emoji", d.strip_emoji.to_string());
    cfg.set("clean.min_distinct_words", DEFAULT_MIN_DISTINCT_WORDS.to_string());
}

fn clean_flags(cfg: &mut RunConfig, f: &CleanFlags) {
    put_path(cfg, "clean.stopwords", &f.stopwords);
    put_path(cfg, "clean.misspellings", &f.misspellings);
    put_path(cfg, "clean.suffixes", &f.suffixes);
    if f.no_stemming {
        cfg.set("clean.stemming", "false");
    }
    put(cfg, "clean.min_distinct_words", f.min_distinct_words);
}

fn data_flags(cfg: &mut RunConfig, f: &DatasetFlags) {
    put(cfg, "dataset", f.dataset.clone());
    put(cfg, "kind", f.kind.clone());
}

/// Command name, its defaults, and the layer set by its own flags.
fn layers(command: &Command) -> (&'static str, RunConfig, RunConfig) {
    let mut d = RunConfig::default();
    let mut f = RunConfig::default();
    d.set("kind", "HOC");
    let name = match command {
        Command::Collect { archive, keywords, max_iterations, max_results, out, kind } => {
            d.set("max_iterations", "10");
            d.set("max_results", "1000");
            put_path(&mut f, "archive", archive);
            put(&mut f, "keywords", keywords.clone());
            put(&mut f, "max_iterations", *max_iterations);
            put(&mut f, "max_results", *max_results);
            put_path(&mut f, "out", out);
            put(&mut f, "kind", kind.clone());
            "collect"
        }
        Command::Clean { input, out, clean } => {
            clean_defaults(&mut d);
            put_path(&mut f, "in", input);
            put_path(&mut f, "out", out);
            clean_flags(&mut f, clean);
            "clean"
        }
        Command::Annotate { data, annotator, .. } => {
            d.set("annotator", "annotator");
            data_flags(&mut f, data);
            put(&mut f, "annotator", annotator.clone());
            "annotate"
        }
        Command::Serve { data, annotator, addr, static_dir, token_env } => {
            d.set("annotator", "annotator");
            d.set("addr", "127.0.0.1:8080");
            d.set("token_env", "HAUSA_GUARD_ANNOTATOR_TOKEN");
            data_flags(&mut f, data);
            put(&mut f, "annotator", annotator.clone());
            put(&mut f, "addr", addr.clone());
            put_path(&mut f, "static_dir", static_dir);
            put(&mut f, "token_env", token_env.clone());
            "serve"
        }
        Command::Train { data, clean, model, ngrams, min_df, max_features, holdout, train_fraction, out_model, out_vectorizer } => {
            clean_defaults(&mut d);
            d.set("model", "nb");
            d.set("ngrams", "1..3");
            d.set("min_df", "1");
            d.set("max_features", "none");
            d.set("holdout", "false");
            d.set("train_fraction", "0.8");
            data_flags(&mut f, data);
            clean_flags(&mut f, clean);
            put(&mut f, "model", model.clone());
            put(&mut f, "ngrams", ngrams.clone());
            put(&mut f, "min_df", *min_df);
            put(&mut f, "max_features", *max_features);
            put_flag(&mut f, "holdout", *holdout);
            put(&mut f, "train_fraction", *train_fraction);
            put_path(&mut f, "out_model", out_model);
            put_path(&mut f, "out_vectorizer", out_vectorizer);
            "train"
        }
        Command::Evaluate { data, clean, model, vectorizer, holdout, train_fraction, averaging, out } => {
            clean_defaults(&mut d);
            d.set("holdout", "false");
            d.set("train_fraction", "0.8");
            d.set("averaging", Averaging::BinaryPositive.to_string());
            data_flags(&mut f, data);
            clean_flags(&mut f, clean);
            put_path(&mut f, "model_path", model);
            put_path(&mut f, "vectorizer_path", vectorizer);
            put_flag(&mut f, "holdout", *holdout);
            put(&mut f, "train_fraction", *train_fraction);
            put(&mut f, "averaging", averaging.clone());
            put_path(&mut f, "out", out);
            "evaluate"
        }
        Command::Sweep { data, clean, models, ngrams, train_fraction, min_df, max_features, averaging, out, out_text } => {
            clean_defaults(&mut d);
            d.set("models", ModelKind::SHORT.join(","));
            d.set("ngrams", "1,2,3");
            d.set("train_fraction", "0.8");
            d.set("min_df", "1");
            d.set("max_features", "none");
            d.set("averaging", Averaging::BinaryPositive.to_string());
            data_flags(&mut f, data);
            clean_flags(&mut f, clean);
            put(&mut f, "models", models.clone());
            put(&mut f, "ngrams", ngrams.clone());
            put(&mut f, "train_fraction", *train_fraction);
            put(&mut f, "min_df", *min_df);
            put(&mut f, "max_features", *max_features);
            put(&mut f, "averaging", averaging.clone());
            put_path(&mut f, "out", out);
            put_path(&mut f, "out_text", out_text);
            "sweep"
        }
        Command::Predict { clean, model, vectorizer, text, input } => {
            clean_defaults(&mut d);
            clean_flags(&mut f, clean);
            put_path(&mut f, "model_path", model);
            put_path(&mut f, "vectorizer_path", vectorizer);
            put(&mut f, "text", text.clone());
            put_path(&mut f, "in", input);
            "predict"
        }
        Command::LexiconReport { data, lexicon, out } => {
            d.set("lexicon", BUNDLED);
            data_flags(&mut f, data);
            put_path(&mut f, "lexicon", lexicon);
            put_path(&mut f, "out", out);
            "lexicon-report"
        }
        Command::Profile { data, out } => {
            data_flags(&mut f, data);
            put_path(&mut f, "out", out);
            "profile"
        }
        Command::AuditTranslations { lexicon, provider, stub, endpoint, threshold, similarity, out } => {
            let http = HttpProviderConfig::default();
            let audit = AuditOptions::default();
            d.set("lexicon", BUNDLED);
            d.set("provider", "stub");
            d.set("stub", BUNDLED);
            d.set("provider.endpoint", http.endpoint);
            d.set("provider.api_key_env", http.api_key_env);
            d.set("provider.timeout_secs", http.timeout.as_secs().to_string());
            d.set("provider.parallelism", audit.parallelism.to_string());
            d.set("audit.threshold", audit.threshold.to_string());
            d.set("audit.similarity", audit.similarity.to_string());
            d.set("source_lang", audit.source_lang);
            d.set("target_lang", audit.target_lang);
            put_path(&mut f, "lexicon", lexicon);
            put(&mut f, "provider", provider.clone());
            put_path(&mut f, "stub", stub);
            put(&mut f, "provider.endpoint", endpoint.clone());
            put(&mut f, "audit.threshold", *threshold);
            put(&mut f, "audit.similarity", similarity.clone());
            put_path(&mut f, "out", out);
            "audit-translations"
        }
    };
    (name, d, f)
}

pub(crate) fn execute(common: Common, command: Command, input: &mut dyn BufRead, out: &mut dyn Write) -> CliResult<()> {
    let (name, defaults, flags) = layers(&command);
    let mut cfg = defaults;
    cfg.set("seed", "0");
    cfg.set("jobs", "1");
    for path in &common.config {
        cfg.merge(&RunConfig::load(path)?);
    }
    cfg.merge(&flags);
    put(&mut cfg, "seed", common.seed);
    put(&mut cfg, "jobs", common.jobs);
    for kv in &common.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        cfg.set(k.trim(), v.trim());
    }
    cfg.set("command", name);

    let jobs: usize = cfg.required("jobs")?;
    if jobs == 0 {
        return Err(Error::Validation("jobs must be at least 1".into()).into());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} worker threads: {e}")))?;
    match &command {
        Command::Annotate { unlock, .. } => return annotate(&cfg, *unlock, input, out),
        Command::Serve { .. } => return serve(&cfg),
        _ => {}
    }
    let mut buf = Vec::new();
    let result = pool.install(|| match &command {
        Command::Collect { .. } => collect(&cfg, &mut buf),
        Command::Clean { .. } => clean(&cfg, &mut buf),
        Command::Train { .. } => train_cmd(&mut cfg, &mut buf),
        Command::Evaluate { .. } => evaluate_cmd(&cfg, &mut buf),
        Command::Sweep { .. } => sweep(&mut cfg, &mut buf),
        Command::Predict { .. } => predict(&cfg, &mut buf),
        Command::LexiconReport { .. } => lexicon_report(&cfg, &mut buf),
        Command::Profile { .. } => profile(&cfg, &mut buf),
        Command::AuditTranslations { .. } => audit(&cfg, &mut buf),
        Command::Annotate { .. } | Command::Serve { .. } => unreachable!("handled above"),
    });
    out.write_all(&buf)?;
    result
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".config");
    path.with_file_name(name)
}

fn write_file(path: &Path, content: &[u8]) -> CliResult<()> {
    std::fs::write(path, content).map_err(|e| Error::io(path, e).into())
}

/// Writes to the file named by `key` (plus its config sidecar), or to stdout.
fn emit(cfg: &RunConfig, key: &str, content: &str, out: &mut dyn Write) -> CliResult<()> {
    match cfg.get(key) {
        Some(path) => {
            let path = Path::new(path);
            write_file(path, content.as_bytes())?;
            write_file(&sidecar(path), cfg.to_text().as_bytes())
        }
        None => Ok(out.write_all(content.as_bytes())?),
    }
}

fn kind(cfg: &RunConfig) -> CliResult<DatasetKind> {
    Ok(cfg.required("kind")?)
}

fn dataset(cfg: &RunConfig) -> CliResult<Dataset> {
    let kind = kind(cfg)?;
    let spec = cfg.require("dataset")?;
    if let Some(rest) = spec.strip_prefix("synthetic") {
        if kind != DatasetKind::Hoc {
            return Err(Error::Validation("the synthetic corpus is an HOC dataset".into()).into());
        }
        let mut config = SyntheticConfig::default();
        if let Some(size) = rest.strip_prefix(':') {
            config.size = size
                .parse()
                .map_err(|_| Error::Validation(format!("invalid synthetic size '{size}'")))?;
        } else if !rest.is_empty() {
            return Err(Error::Validation(format!("unknown dataset '{spec}'")).into());
        }
        return Ok(offensive_corpus(cfg.required("seed")?, &config));
    }
    Ok(load_dataset(spec, kind)?)
}

fn clean_config(cfg: &RunConfig) -> CliResult<CleanConfig> {
    let mut c = CleanConfig::default();
    let custom = |key: &str| cfg.get(key).filter(|v| *v != BUNDLED);
    if let Some(p) = custom("clean.stopwords") {
        c.stopwords = load_stopwords(p)?;
    }
    if let Some(p) = custom("clean.misspellings") {
        c.misspellings = load_misspellings(p)?;
    }
    if let Some(p) = custom("clean.suffixes") {
        c.suffixes = Stemmer::load(p)?.suffixes().to_vec();
    }
    c.apply_stemming = cfg.required("clean.stemming")?;
    c.fold_accents = cfg.required("clean.fold_accents")?;
    c.strip_emoji = cfg.required("clean.strip_emoji")?;
    c.min_distinct_words = cfg.required("clean.min_distinct_words")?;
    c.validate()?;
    Ok(c)
}

fn list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

fn collect(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let request = CollectionRequest::new(
        list(cfg.require("keywords")?),
        cfg.required("max_iterations")?,
        cfg.required("max_results")?,
    )?;
    let archive = PathBuf::from(cfg.require("archive")?);
    let posts = if archive.is_dir() {
        collect_paged(&mut DirArchive::open(&archive)?, &request)?
    } else {
        collect_by_keywords(&read_posts(&archive)?, &request)
    };
    let ds = Dataset::new(kind(cfg)?, posts.into_iter().map(Item::unlabeled).collect())?;
    let mut buf = Vec::new();
    write_dataset(&ds, &mut buf)?;
    emit(cfg, "out", &String::from_utf8(buf).expect("records are UTF-8"), out)
}

fn clean(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let posts = read_posts(cfg.require("in")?)?;
    let docs = clean_pipeline(&posts, &clean_config(cfg)?)?;
    let mut text = String::new();
    for d in &docs {
        text.push_str(&serde_json::to_string(d).expect("documents serialize"));
        text.push('\n');
    }
    emit(cfg, "out", &text, out)
}

fn annotate(cfg: &RunConfig, unlock: bool, input: &mut dyn BufRead, out: &mut dyn Write) -> CliResult<()> {
    let path = cfg.require("dataset")?;
    if unlock {
        let removed = AnnotationSession::unlock(path)?;
        writeln!(out, "{}", if removed { "lock removed" } else { "no lock present" })?;
        return Ok(());
    }
    let mut session = AnnotationSession::open(path, kind(cfg)?, cfg.require("annotator")?)?;
    let summary = run_terminal(&mut session, input, &mut *out)?;
    session.close()?;
    let p = session.progress();
    writeln!(out, "submitted {} annotation(s); {}/{} annotated", summary.submitted, p.annotated, p.total)?;
    Ok(())
}

fn serve(cfg: &RunConfig) -> CliResult<()> {
    let session = AnnotationSession::open(cfg.require("dataset")?, kind(cfg)?, cfg.require("annotator")?)?;
    let addr = cfg
        .require("addr")?
        .parse()
        .map_err(|e| Error::Validation(format!("invalid addr: {e}")))?;
    let token = std::env::var(cfg.require("token_env")?).ok();
    let config = ServeConfig {
        addr,
        static_dir: cfg.get("static_dir").map(PathBuf::from),
        token,
    };
    let runtime = tokio::runtime::Runtime::new()?;
    runtime
        .block_on(hausa_guard_server::serve(session, config))
        .map_err(|e| Error::io(cfg.require("addr").unwrap_or_default(), e).into())
}

/// Spec for `kind` with `<short>.<name>` overrides; the resolved values are
/// written back so the echoed config is complete.
fn model_spec(cfg: &mut RunConfig, kind: ModelKind) -> CliResult<ModelSpec> {
    let mut spec = ModelSpec::new(kind, cfg.required("seed")?);
    let overrides: Vec<(String, String)> = cfg
        .section(kind.short_name())
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    for (k, v) in overrides {
        let value: f64 = v
            .parse()
            .map_err(|_| Error::Validation(format!("invalid value '{v}' for {}.{k}", kind.short_name())))?;
        spec = spec.with(&k, value);
    }
    let spec = spec.resolved()?;
    for (k, v) in &spec.hyperparameters {
        cfg.set(&format!("{}.{k}", kind.short_name()), v.to_string());
    }
    Ok(spec)
}

fn holdout_split(cfg: &RunConfig, ds: &Dataset) -> CliResult<Option<(Dataset, Dataset)>> {
    if !cfg.required::<bool>("holdout")? {
        return Ok(None);
    }
    Ok(Some(split(ds, cfg.required("train_fraction")?, cfg.required("seed")?)?))
}

fn train_cmd(cfg: &mut RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let ds = dataset(cfg)?;
    let ds = match holdout_split(cfg, &ds)? {
        Some((train_side, _)) => train_side,
        None => ds,
    };
    let cleaner = Cleaner::new(clean_config(cfg)?)?;
    let range: NGramRange = cfg.required("ngrams")?;
    let kind = ModelKind::from_name(cfg.require("model")?)?;
    let spec = model_spec(cfg, kind)?;
    let model_path = PathBuf::from(cfg.require("out_model")?);
    let vec_path = PathBuf::from(cfg.require("out_vectorizer")?);

    let docs: Vec<_> = ds.items().iter().map(|it| cleaner.document(&it.post)).collect();
    let tfidf = TfidfModel::fit(&docs, range, cfg.required("min_df")?, cfg.parsed("max_features")?)?;
    let model = train(&spec, &tfidf.transform_corpus(&docs), &ds.labels()?)?;
    model.save(&model_path)?;
    tfidf.save(&vec_path)?;
    for p in [&model_path, &vec_path] {
        write_file(&sidecar(p), cfg.to_text().as_bytes())?;
    }
    writeln!(
        out,
        "trained {} on {} posts ({} features)",
        model.spec,
        ds.len(),
        tfidf.dimension()
    )?;
    Ok(())
}

fn load_pair(cfg: &RunConfig) -> CliResult<(TrainedModel, TfidfModel)> {
    let model = TrainedModel::load(cfg.require("model_path")?)?;
    let tfidf = TfidfModel::load(cfg.require("vectorizer_path")?)?;
    if model.dimension != tfidf.dimension() {
        return Err(Error::Validation(format!(
            "model dimension {} does not match vectorizer dimension {}",
            model.dimension,
            tfidf.dimension()
        ))
        .into());
    }
    Ok((model, tfidf))
}

fn evaluate_cmd(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let (model, tfidf) = load_pair(cfg)?;
    let ds = dataset(cfg)?;
    let (test, split_seed) = match holdout_split(cfg, &ds)? {
        Some((_, test)) => (test, Some(cfg.required("seed")?)),
        None => (ds, None),
    };
    let options = EvalOptions {
        averaging: cfg.required("averaging")?,
        split_seed,
    };
    let cleaner = Cleaner::new(clean_config(cfg)?)?;
    let report = evaluate(&model, &tfidf, &cleaner, &test, options)?;
    emit(cfg, "out", &report.to_text(), out)
}

fn sweep(cfg: &mut RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let ds = dataset(cfg)?;
    let cleaner = Cleaner::new(clean_config(cfg)?)?;
    let kinds = list(cfg.require("models")?)
        .iter()
        .map(|m| ModelKind::from_name(m))
        .collect::<Result<Vec<_>, _>>()?;
    let specs = kinds
        .into_iter()
        .map(|k| model_spec(cfg, k))
        .collect::<CliResult<Vec<_>>>()?;
    let ranges = list(cfg.require("ngrams")?)
        .iter()
        .map(|r| r.parse())
        .collect::<Result<Vec<NGramRange>, _>>()?;
    let config = SweepConfig {
        train_fraction: cfg.required("train_fraction")?,
        min_df: cfg.required("min_df")?,
        max_features: cfg.parsed("max_features")?,
        averaging: cfg.required("averaging")?,
        ..SweepConfig::new(specs, ranges, cfg.required("seed")?)
    };
    let table = ngram_sweep(&ds, &cleaner, &config)?;
    if let Some(path) = cfg.get("out_text") {
        let path = Path::new(path);
        write_file(path, table.to_text().as_bytes())?;
        write_file(&sidecar(path), cfg.to_text().as_bytes())?;
    }
    emit(cfg, "out", &table.to_csv(), out)
}

fn predict(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let (model, tfidf) = load_pair(cfg)?;
    let cleaner = Cleaner::new(clean_config(cfg)?)?;
    let texts: Vec<String> = match (cfg.get("text"), cfg.get("in")) {
        (Some(t), None) => vec![t.to_string()],
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| Error::io(path, e))?
            .lines()
            .map(String::from)
            .collect(),
        _ => return Err(CliError::Usage("predict needs exactly one of --text or --in".into())),
    };
    for text in texts {
        let x = tfidf.transform_tokens(&cleaner.tokens(&text));
        let label = model.predict(&x)?;
        let probability = if model.kind().is_probabilistic() {
            format!("{:.6}", model.predict_proba(&x)?[1])
        } else {
            "n/a".to_string()
        };
        writeln!(out, "{label}\t{probability}")?;
    }
    Ok(())
}

fn lexicon(cfg: &RunConfig) -> CliResult<Vec<LexiconEntry>> {
    Ok(match cfg.require("lexicon")? {
        BUNDLED => default_lexicon(),
        path => load_lexicon(path)?,
    })
}

fn lexicon_report(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let ds = dataset(cfg)?;
    let report = term_report(&ds, &lexicon(cfg)?)?;
    let mut text = report.to_tsv();
    text.push_str("# published reference proportions (metadata, not recomputed)\n");
    for r in REFERENCE_PROPORTIONS.iter().filter(|r| r.kind == ds.kind()) {
        let _ = writeln!(text, "# {}\t{:.4}\t{}", r.term, r.proportion, r.subcategory);
    }
    emit(cfg, "out", &text, out)
}

fn profile(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let p = dataset_profile(&dataset(cfg)?)?;
    emit(cfg, "out", &p.to_tsv(), out)
}

fn audit(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let mut entries = lexicon(cfg)?;
    let provider: Box<dyn TranslationProvider> = match cfg.require("provider")? {
        "stub" => {
            let stub = match cfg.require("stub")? {
                BUNDLED => StubProvider::recorded(),
                path => StubProvider::load(path)?,
            };
            if cfg.require("lexicon")? == BUNDLED {
                let terms: Vec<&str> = stub.terms().collect();
                entries.retain(|e| terms.contains(&e.term.as_str()));
            }
            Box::new(stub)
        }
        "http" => Box::new(HttpProvider::from_env(&HttpProviderConfig {
            endpoint: cfg.require("provider.endpoint")?.to_string(),
            api_key_env: cfg.require("provider.api_key_env")?.to_string(),
            timeout: Duration::from_secs(cfg.required("provider.timeout_secs")?),
        })?),
        other => return Err(Error::Validation(format!("unknown provider '{other}' (expected stub or http)")).into()),
    };
    let options = AuditOptions {
        threshold: cfg.required("audit.threshold")?,
        similarity: cfg.required::<Similarity>("audit.similarity")?,
        source_lang: cfg.require("source_lang")?.to_string(),
        target_lang: cfg.require("target_lang")?.to_string(),
        parallelism: cfg.required("provider.parallelism")?,
    };
    let report = audit_lexicon(&entries, provider.as_ref(), &options)?;
    emit(cfg, "out", &report.to_tsv(), out)
}
