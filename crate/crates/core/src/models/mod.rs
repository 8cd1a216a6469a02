//! Classifier families behind one train / predict contract.
//!
//! Every model consumes [`SparseVector`]s and binary [`Label`]s. Hyperparameters
//! live in a name→value map on [`ModelSpec`]; absent entries take the
//! documented defaults, and the resolved map is stored with the model.

mod ensemble;
mod format;
mod linear;
mod mlp;
mod naive_bayes;
mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::label::Label;
use crate::vocab::{string_vocabulary, Vocabulary};

pub use ensemble::{Boosted, Forest};
pub use linear::{hinge_objective, logistic_objective, sigmoid, Linear, LinearGradient};
pub use mlp::{mlp_objective, Mlp, MlpGradient};
pub use naive_bayes::NaiveBayes;
pub use tree::{best_split, ClassCounts, ClassificationTree, Node, RegressionTree, Split, Tree};

use ensemble::{BoostSettings, ForestSettings};
use format::{In, Out};
use linear::SgdSettings;
use mlp::MlpSettings;
use tree::GrowSettings;

const FORMAT_TAG: &str = "hausa-guard-model";
const FORMAT_VERSION: u32 = 1;

string_vocabulary! {
    pub enum ModelKind as "model kind" {
        NaiveBayes => "naive_bayes",
        LogisticRegression => "logistic_regression",
        LinearSvm => "linear_svm",
        DecisionTree => "decision_tree",
        RandomForest => "random_forest",
        Gbt => "gbt",
        Mlp => "mlp",
    }
}

impl ModelKind {
    /// Short command-line names, in [`Vocabulary::ALL`] order.
    pub const SHORT: [&'static str; 7] = ["nb", "logreg", "svm", "dt", "rf", "gbt", "mlp"];

    /// Accepts the canonical name or the short alias.
    pub fn from_name(name: &str) -> Result<Self> {
        if let Some(i) = Self::SHORT.iter().position(|s| *s == name) {
            return Ok(Self::ALL[i]);
        }
        name.parse().map_err(Error::Validation)
    }

    pub fn short_name(self) -> &'static str {
        Self::SHORT[Self::ALL.iter().position(|k| *k == self).unwrap_or(0)]
    }

    /// Row label used in sweep tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::NaiveBayes => "Naive Bayes",
            ModelKind::LogisticRegression => "Logistic Regression",
            ModelKind::LinearSvm => "SVM",
            ModelKind::DecisionTree => "Decision Tree",
            ModelKind::RandomForest => "Random Forest",
            ModelKind::Gbt => "GBT",
            ModelKind::Mlp => "MLP",
        }
    }

    pub fn is_probabilistic(self) -> bool {
        matches!(
            self,
            ModelKind::NaiveBayes | ModelKind::LogisticRegression | ModelKind::Gbt | ModelKind::Mlp
        )
    }

    pub fn hyperparameters(self) -> &'static [Hyperparameter] {
        use Domain::*;
        const fn hp(name: &'static str, default: Option<f64>, domain: Domain) -> Hyperparameter {
            Hyperparameter { name, default, domain }
        }
        const SGD: [Hyperparameter; 4] = [
            hp("learning_rate", Some(0.1), Positive),
            hp("lambda", Some(1e-4), NonNegative),
            hp("epochs", Some(100.0), Count { min: 1 }),
            hp("batch_size", Some(32.0), Count { min: 1 }),
        ];
        const NB: [Hyperparameter; 1] = [hp("alpha", Some(1.0), Positive)];
        const DT: [Hyperparameter; 2] = [
            hp("max_depth", Some(20.0), Count { min: 1 }),
            hp("min_samples_split", Some(2.0), Count { min: 2 }),
        ];
        const RF: [Hyperparameter; 5] = [
            hp("trees", Some(100.0), Count { min: 1 }),
            hp("max_depth", Some(20.0), Count { min: 1 }),
            hp("min_samples_split", Some(2.0), Count { min: 2 }),
            hp("bootstrap", Some(1.0), Flag),
            hp("max_features", None, Count { min: 1 }),
        ];
        const GBT: [Hyperparameter; 4] = [
            hp("rounds", Some(100.0), Count { min: 0 }),
            hp("learning_rate", Some(0.1), Positive),
            hp("max_depth", Some(3.0), Count { min: 1 }),
            hp("min_samples_split", Some(2.0), Count { min: 2 }),
        ];
        const MLP: [Hyperparameter; 4] = [
            hp("hidden", Some(64.0), Count { min: 1 }),
            hp("learning_rate", Some(0.05), Positive),
            hp("epochs", Some(50.0), Count { min: 1 }),
            hp("batch_size", Some(32.0), Count { min: 1 }),
        ];
        match self {
            ModelKind::NaiveBayes => &NB,
            ModelKind::LogisticRegression | ModelKind::LinearSvm => &SGD,
            ModelKind::DecisionTree => &DT,
            ModelKind::RandomForest => &RF,
            ModelKind::Gbt => &GBT,
            ModelKind::Mlp => &MLP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Positive,
    NonNegative,
    Count { min: u64 },
    /// 0 or 1.
    Flag,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparameter {
    pub name: &'static str,
    /// `None` means the value is derived from the data when absent.
    pub default: Option<f64>,
    pub domain: Domain,
}

impl Hyperparameter {
    fn check(&self, value: f64) -> Result<()> {
        let ok = value.is_finite()
            && match self.domain {
                Domain::Positive => value > 0.0,
                Domain::NonNegative => value >= 0.0,
                Domain::Count { min } => value.fract() == 0.0 && value >= min as f64,
                Domain::Flag => value == 0.0 || value == 1.0,
            };
        if ok {
            Ok(())
        } else {
            let want = match self.domain {
                Domain::Positive => "a positive number".to_string(),
                Domain::NonNegative => "a non-negative number".to_string(),
                Domain::Count { min } => format!("an integer >= {min}"),
                Domain::Flag => "0 or 1".to_string(),
            };
            Err(Error::Validation(format!(
                "hyperparameter {} = {value} must be {want}",
                self.name
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub hyperparameters: BTreeMap<String, f64>,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, seed: u64) -> Self {
        ModelSpec {
            kind,
            hyperparameters: BTreeMap::new(),
            seed,
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.hyperparameters.insert(name.to_string(), value);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let known = self.kind.hyperparameters();
        for (name, &value) in &self.hyperparameters {
            let hp = known.iter().find(|h| h.name == name).ok_or_else(|| {
                Error::Validation(format!(
                    "unknown hyperparameter '{name}' for {} (expected one of: {})",
                    self.kind,
                    known.iter().map(|h| h.name).collect::<Vec<_>>().join(", ")
                ))
            })?;
            hp.check(value)?;
        }
        Ok(())
    }

    /// The spec with every defaulted hyperparameter filled in.
    pub fn resolved(&self) -> Result<ModelSpec> {
        self.validate()?;
        let mut out = self.clone();
        for hp in self.kind.hyperparameters() {
            if let Some(d) = hp.default {
                out.hyperparameters.entry(hp.name.to_string()).or_insert(d);
            }
        }
        Ok(out)
    }

    fn get(&self, name: &str) -> Option<f64> {
        self.hyperparameters.get(name).copied().or_else(|| {
            self.kind
                .hyperparameters()
                .iter()
                .find(|h| h.name == name)
                .and_then(|h| h.default)
        })
    }

    fn real(&self, name: &str) -> f64 {
        self.get(name).expect("hyperparameter has a default")
    }

    fn count(&self, name: &str) -> usize {
        self.real(name) as usize
    }
}

impl fmt::Display for ModelSpec {
    /// `kind seed=S name=value ...` in name order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} seed={}", self.kind, self.seed)?;
        for (k, v) in &self.hyperparameters {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Parameters {
    NaiveBayes(NaiveBayes),
    Linear(Linear),
    Tree(ClassificationTree),
    Forest(Forest),
    Boosted(Boosted),
    Mlp(Mlp),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    /// Resolved: every defaulted hyperparameter is present.
    pub spec: ModelSpec,
    pub dimension: usize,
    pub labels: [Label; 2],
    pub parameters: Parameters,
}

fn check_dimensions(xs: &[SparseVector], dimension: usize) -> Result<()> {
    match xs.iter().position(|x| x.dimension() != dimension) {
        Some(i) => Err(Error::Validation(format!(
            "instance {i} has dimension {}, expected {dimension}",
            xs[i].dimension()
        ))),
        None => Ok(()),
    }
}

pub fn train(spec: &ModelSpec, xs: &[SparseVector], ys: &[Label]) -> Result<TrainedModel> {
    let spec = spec.resolved()?;
    if xs.len() != ys.len() {
        return Err(Error::Validation(format!(
            "{} instances but {} labels",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Training("need at least two training instances".into()));
    }
    let dimension = xs[0].dimension();
    if dimension == 0 {
        return Err(Error::Validation("feature dimension must be positive".into()));
    }
    check_dimensions(xs, dimension)?;
    if ys.iter().all(|y| *y == ys[0]) {
        return Err(Error::Training(format!(
            "training labels contain only the {} class",
            ys[0]
        )));
    }

    let sgd = || SgdSettings {
        learning_rate: spec.real("learning_rate"),
        lambda: spec.real("lambda"),
        epochs: spec.count("epochs"),
        batch_size: spec.count("batch_size"),
        seed: spec.seed,
    };
    let grow = |max_features| GrowSettings {
        max_depth: spec.count("max_depth"),
        min_samples_split: spec.count("min_samples_split"),
        max_features,
    };
    let parameters = match spec.kind {
        ModelKind::NaiveBayes => Parameters::NaiveBayes(NaiveBayes::fit(xs, ys, dimension, spec.real("alpha"))),
        ModelKind::LogisticRegression => Parameters::Linear(Linear::fit_logistic(xs, ys, dimension, sgd())),
        ModelKind::LinearSvm => Parameters::Linear(Linear::fit_hinge(xs, ys, dimension, sgd())),
        ModelKind::DecisionTree => Parameters::Tree(tree::grow_classifier(
            xs,
            ys,
            (0..xs.len()).collect(),
            grow(None),
            &mut ChaCha8Rng::seed_from_u64(spec.seed),
        )),
        ModelKind::RandomForest => {
            let max_features = spec
                .get("max_features")
                .map(|m| m as usize)
                .unwrap_or_else(|| (dimension as f64).sqrt().ceil() as usize);
            Parameters::Forest(Forest::fit(
                xs,
                ys,
                ForestSettings {
                    trees: spec.count("trees"),
                    bootstrap: spec.real("bootstrap") == 1.0,
                    grow: grow(Some(max_features)),
                    seed: spec.seed,
                },
            ))
        }
        ModelKind::Gbt => Parameters::Boosted(Boosted::fit(
            xs,
            ys,
            BoostSettings {
                rounds: spec.count("rounds"),
                learning_rate: spec.real("learning_rate"),
                grow: grow(None),
            },
        )),
        ModelKind::Mlp => Parameters::Mlp(Mlp::fit(
            xs,
            ys,
            dimension,
            MlpSettings {
                hidden: spec.count("hidden"),
                learning_rate: spec.real("learning_rate"),
                epochs: spec.count("epochs"),
                batch_size: spec.count("batch_size"),
                seed: spec.seed,
            },
        )),
    };
    Ok(TrainedModel {
        spec,
        dimension,
        labels: Label::ORDER,
        parameters,
    })
}

/// Softmax over two logits.
pub(crate) fn softmax2(z: [f64; 2]) -> [f64; 2] {
    let m = z[0].max(z[1]);
    let e = [(z[0] - m).exp(), (z[1] - m).exp()];
    let s = e[0] + e[1];
    [e[0] / s, e[1] / s]
}

/// Positive only when its probability is strictly larger.
fn argmax(p: [f64; 2]) -> Label {
    Label::from_bool(p[1] > p[0])
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        self.spec.kind
    }

    fn check(&self, x: &SparseVector) -> Result<()> {
        if x.dimension() != self.dimension {
            return Err(Error::Validation(format!(
                "input has dimension {}, model expects {}",
                x.dimension(),
                self.dimension
            )));
        }
        Ok(())
    }

    fn proba_unchecked(&self, x: &SparseVector) -> Option<[f64; 2]> {
        match &self.parameters {
            Parameters::NaiveBayes(m) => Some(m.predict_proba(x)),
            Parameters::Linear(m) if self.spec.kind == ModelKind::LogisticRegression => {
                let p = sigmoid(m.decision(x));
                Some([1.0 - p, p])
            }
            Parameters::Boosted(m) => Some(m.predict_proba(x)),
            Parameters::Mlp(m) => Some(m.predict_proba(x)),
            _ => None,
        }
    }

    /// Ties go to the negative class.
    pub fn predict(&self, x: &SparseVector) -> Result<Label> {
        self.check(x)?;
        if let Some(p) = self.proba_unchecked(x) {
            return Ok(argmax(p));
        }
        Ok(match &self.parameters {
            Parameters::Linear(m) => Label::from_bool(m.decision(x) > 0.0),
            Parameters::Tree(t) => t.predict(x),
            Parameters::Forest(f) => f.predict(x),
            _ => unreachable!("probabilistic kinds handled above"),
        })
    }

    pub fn predict_batch(&self, xs: &[SparseVector]) -> Result<Vec<Label>> {
        xs.iter().map(|x| self.predict(x)).collect()
    }

    /// `[P(negative), P(positive)]`.
    pub fn predict_proba(&self, x: &SparseVector) -> Result<[f64; 2]> {
        self.check(x)?;
        self.proba_unchecked(x).ok_or(Error::Capability {
            kind: self.spec.kind.as_str(),
            operation: "predict_proba",
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = Out::default();
        out.line(FORMAT_TAG, [format!("v{FORMAT_VERSION}")]);
        out.line("kind", [self.spec.kind.to_string()]);
        out.line("dimension", [self.dimension.to_string()]);
        out.line("labels", self.labels.map(|l| l.to_string()));
        out.line("seed", [self.spec.seed.to_string()]);
        out.line(
            "hyperparameters",
            self.spec
                .hyperparameters
                .iter()
                .map(|(k, v)| format!("{k}={}", format::real(*v))),
        );
        match &self.parameters {
            Parameters::NaiveBayes(m) => m.write(&mut out),
            Parameters::Linear(m) => m.write(&mut out),
            Parameters::Tree(t) => t.write(&mut out),
            Parameters::Forest(f) => f.write(&mut out),
            Parameters::Boosted(b) => b.write(&mut out),
            Parameters::Mlp(m) => m.write(&mut out),
        }
        out.line("end", []);
        out.into_string()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut input = In::new(text);
        let header = input.next_line().map_err(|_| Error::parse(1, "empty model file"))?;
        let mut parts = header.split(' ');
        if parts.next() != Some(FORMAT_TAG) {
            return Err(Error::Incompatible("not a model file".into()));
        }
        let version = parts.next().unwrap_or_default();
        if version != format!("v{FORMAT_VERSION}") || parts.next().is_some() {
            return Err(Error::Incompatible(format!(
                "unsupported model format version '{version}'"
            )));
        }
        let kind_name: String = input.expect_one("kind")?;
        let kind = ModelKind::from_str(&kind_name).map_err(|e| input.error(e))?;
        let dimension: usize = input.expect_one("dimension")?;
        if dimension == 0 {
            return Err(input.error("dimension must be positive"));
        }
        let labels = input.expect("labels")?;
        if labels != ["negative", "positive"] {
            return Err(input.error("label order must be 'negative positive'"));
        }
        let seed: u64 = input.expect_one("seed")?;
        let mut spec = ModelSpec::new(kind, seed);
        for field in input.expect("hyperparameters")? {
            if field.is_empty() {
                continue;
            }
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| input.error(format!("malformed hyperparameter '{field}'")))?;
            spec.hyperparameters.insert(k.to_string(), input.finite(v)?);
        }
        spec.validate().map_err(|e| input.error(e.to_string()))?;
        let parameters = match kind {
            ModelKind::NaiveBayes => Parameters::NaiveBayes(NaiveBayes::read(&mut input, dimension)?),
            ModelKind::LogisticRegression | ModelKind::LinearSvm => {
                Parameters::Linear(Linear::read(&mut input, dimension)?)
            }
            ModelKind::DecisionTree => Parameters::Tree(ClassificationTree::read(&mut input, dimension)?),
            ModelKind::RandomForest => Parameters::Forest(Forest::read(&mut input, dimension)?),
            ModelKind::Gbt => Parameters::Boosted(Boosted::read(&mut input, dimension)?),
            ModelKind::Mlp => Parameters::Mlp(Mlp::read(&mut input, dimension)?),
        };
        input.finish()?;
        Ok(TrainedModel {
            spec,
            dimension,
            labels: Label::ORDER,
            parameters,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TrainedModel::from_text(&text)
    }
}

pub fn predict(model: &TrainedModel, x: &SparseVector) -> Result<Label> {
    model.predict(x)
}

pub fn predict_proba(model: &TrainedModel, x: &SparseVector) -> Result<[f64; 2]> {
    model.predict_proba(x)
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    model.save(path)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    TrainedModel::load(path)
}
