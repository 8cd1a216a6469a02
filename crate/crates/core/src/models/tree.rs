//! CART trees over sparse inputs: Gini classification trees (decision tree,
//! forest members) and squared-error regression trees (boosting).
//!
//! Candidate thresholds are the observed values of a feature in the node,
//! excluding the largest; a sample goes left when `x[f] <= t`. Absent sparse
//! entries are observed zeros.

use std::cmp::Ordering;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::features::SparseVector;
use crate::label::Label;

use super::format::{In, Out};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node<L> {
    Leaf(L),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Nodes stored in preorder; the root is node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree<L> {
    pub nodes: Vec<Node<L>>,
}

/// Class counts `[negative, positive]` of the training samples at a leaf.
pub type ClassCounts = [u64; 2];

pub type ClassificationTree = Tree<ClassCounts>;
pub type RegressionTree = Tree<f64>;

impl<L> Tree<L> {
    pub fn leaf(&self, x: &SparseVector) -> &L {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf(l) => return l,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x.get(*feature) <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Depth of the deepest leaf (a single leaf has depth 0).
    pub fn depth(&self) -> usize {
        fn walk<L>(t: &Tree<L>, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(t, *left).max(walk(t, *right)),
            }
        }
        walk(self, 0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &L> {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf(l) => Some(l),
            Node::Split { .. } => None,
        })
    }
}

impl ClassificationTree {
    /// Majority class at the leaf; ties go to the negative class.
    pub fn predict(&self, x: &SparseVector) -> Label {
        let [neg, pos] = *self.leaf(x);
        Label::from_bool(pos > neg)
    }

    /// Size-weighted Gini impurity of the leaves on the training data.
    pub fn weighted_gini(&self) -> f64 {
        let total: u64 = self.leaves().map(|c| c[0] + c[1]).sum();
        self.leaves()
            .map(|&[a, b]| {
                let n = (a + b) as f64;
                if n == 0.0 {
                    return 0.0;
                }
                let g = 1.0 - (a as f64 / n).powi(2) - (b as f64 / n).powi(2);
                g * n / total as f64
            })
            .sum()
    }
}

impl RegressionTree {
    pub fn predict(&self, x: &SparseVector) -> f64 {
        *self.leaf(x)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct GrowSettings {
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Features examined per split; `None` means every feature.
    pub max_features: Option<usize>,
}

/// Per-feature runs of entries sorted by (feature, value).
fn runs<T>(entries: &[(usize, f64, T)]) -> Vec<(usize, &[(usize, f64, T)])> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < entries.len() {
        let f = entries[start].0;
        let end = start + entries[start..].iter().take_while(|e| e.0 == f).count();
        out.push((f, &entries[start..end]));
        start = end;
    }
    out
}

/// Per-feature bookkeeping reused across the nodes of one tree, so finding
/// the non-constant features costs one pass over the node's entries.
pub(crate) struct Scratch {
    epoch: u32,
    seen: Vec<u32>,
    chosen: Vec<u32>,
    count: Vec<u32>,
    first: Vec<f64>,
    varied: Vec<bool>,
}

impl Scratch {
    pub fn new(dimension: usize) -> Self {
        Scratch {
            epoch: 0,
            seen: vec![0; dimension],
            chosen: vec![0; dimension],
            count: vec![0; dimension],
            first: vec![0.0; dimension],
            varied: vec![false; dimension],
        }
    }

    /// Features taking at least two values on the samples, ascending. A
    /// feature absent from some sample has an implicit zero there.
    fn non_constant(&mut self, xs: &[SparseVector], samples: &[usize]) -> Vec<usize> {
        self.epoch += 1;
        let mut touched = Vec::new();
        for &i in samples {
            for &(f, v) in xs[i].entries() {
                if self.seen[f] != self.epoch {
                    self.seen[f] = self.epoch;
                    self.count[f] = 1;
                    self.first[f] = v;
                    self.varied[f] = false;
                    touched.push(f);
                } else {
                    self.count[f] += 1;
                    self.varied[f] |= v != self.first[f];
                }
            }
        }
        let n = samples.len() as u32;
        let mut usable: Vec<usize> = touched
            .into_iter()
            .filter(|&f| self.varied[f] || self.count[f] < n)
            .collect();
        usable.sort_unstable();
        usable
    }
}

/// Candidate features at a node, ascending. With `max_features` set, a random
/// subset (without replacement) of the non-constant features.
fn candidates<R: Rng>(usable: Vec<usize>, max_features: Option<usize>, rng: &mut R) -> Vec<usize> {
    match max_features {
        Some(k) if k < usable.len() => {
            let mut chosen: Vec<usize> = sample(rng, usable.len(), k).into_iter().map(|i| usable[i]).collect();
            chosen.sort_unstable();
            chosen
        }
        _ => usable,
    }
}

/// Exact comparison of Σ_side (a² + b²) / n between two candidate splits.
/// Larger is better (lower weighted Gini).
#[derive(Debug, Clone, Copy)]
struct GiniScore {
    num: u128,
    den: u128,
}

impl GiniScore {
    fn new(left: ClassCounts, right: ClassCounts) -> Self {
        let sq = |c: ClassCounts| (c[0] as u128).pow(2) + (c[1] as u128).pow(2);
        let nl = (left[0] + left[1]) as u128;
        let nr = (right[0] + right[1]) as u128;
        GiniScore {
            num: sq(left) * nr + sq(right) * nl,
            den: nl * nr,
        }
    }

    fn cmp(&self, other: &GiniScore) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

fn gini_split_for_feature(
    run: &[(usize, f64, Label)],
    totals: ClassCounts,
) -> Option<(GiniScore, f64)> {
    // Distinct values ascending with their class counts, implicit zeros included.
    let nonzero = run.iter().fold([0u64; 2], |mut c, e| {
        c[e.2.index()] += 1;
        c
    });
    let zeros = [totals[0] - nonzero[0], totals[1] - nonzero[1]];
    let mut values: Vec<(f64, ClassCounts)> = Vec::new();
    let mut push = |v: f64, c: ClassCounts| match values.last_mut() {
        Some(last) if last.0 == v => {
            last.1[0] += c[0];
            last.1[1] += c[1];
        }
        _ => values.push((v, c)),
    };
    let zero_pos = run.partition_point(|e| e.1 < 0.0);
    for e in &run[..zero_pos] {
        let mut c = [0, 0];
        c[e.2.index()] = 1;
        push(e.1, c);
    }
    if zeros[0] + zeros[1] > 0 {
        push(0.0, zeros);
    }
    for e in &run[zero_pos..] {
        let mut c = [0, 0];
        c[e.2.index()] = 1;
        push(e.1, c);
    }
    let mut best: Option<(GiniScore, f64)> = None;
    let mut left = [0u64; 2];
    for &(v, c) in &values[..values.len().saturating_sub(1)] {
        left[0] += c[0];
        left[1] += c[1];
        let right = [totals[0] - left[0], totals[1] - left[1]];
        let score = GiniScore::new(left, right);
        if best.is_none_or(|(b, _)| score.cmp(&b) == Ordering::Greater) {
            best = Some((score, v));
        }
    }
    best
}

fn best_gini_split<R: Rng>(
    xs: &[SparseVector],
    ys: &[Label],
    samples: &[usize],
    max_features: Option<usize>,
    rng: &mut R,
    scratch: &mut Scratch,
) -> Option<Split> {
    let totals = samples.iter().fold([0u64; 2], |mut c, &i| {
        c[ys[i].index()] += 1;
        c
    });
    let usable = scratch.non_constant(xs, samples);
    let chosen = candidates(usable, max_features, rng);
    if chosen.is_empty() {
        return None;
    }
    let epoch = scratch.epoch;
    for &f in &chosen {
        scratch.chosen[f] = epoch;
    }
    let mut entries: Vec<(usize, f64, Label)> = Vec::new();
    for &i in samples {
        for &(f, v) in xs[i].entries() {
            if scratch.chosen[f] == epoch {
                entries.push((f, v, ys[i]));
            }
        }
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut best: Option<(GiniScore, Split)> = None;
    for (feature, run) in runs(&entries) {
        if let Some((score, threshold)) = gini_split_for_feature(run, totals) {
            if best.is_none_or(|(b, _)| score.cmp(&b) == Ordering::Greater) {
                best = Some((score, Split { feature, threshold }));
            }
        }
    }
    best.map(|(_, s)| s)
}

/// Best Gini split over all features for the given samples (repeats allowed),
/// tie-broken toward the lower feature index, then the lower threshold.
/// `None` when every feature is constant on the samples.
pub fn best_split(xs: &[SparseVector], ys: &[Label], samples: &[usize]) -> Option<Split> {
    let dimension = xs.first().map_or(0, |x| x.dimension());
    // The generator is only consulted when sampling features.
    best_gini_split(
        xs,
        ys,
        samples,
        None,
        &mut ChaCha8Rng::seed_from_u64(0),
        &mut Scratch::new(dimension),
    )
}

fn partition(xs: &[SparseVector], samples: &[usize], split: Split) -> (Vec<usize>, Vec<usize>) {
    samples
        .iter()
        .partition(|&&i| xs[i].get(split.feature) <= split.threshold)
}

pub(crate) fn grow_classifier<R: Rng>(
    xs: &[SparseVector],
    ys: &[Label],
    samples: Vec<usize>,
    settings: GrowSettings,
    rng: &mut R,
) -> ClassificationTree {
    let mut tree = Tree { nodes: Vec::new() };
    let mut scratch = Scratch::new(xs.first().map_or(0, |x| x.dimension()));
    grow_class_node(&mut tree, xs, ys, samples, 0, settings, rng, &mut scratch);
    tree
}

fn grow_class_node<R: Rng>(
    tree: &mut ClassificationTree,
    xs: &[SparseVector],
    ys: &[Label],
    samples: Vec<usize>,
    depth: usize,
    settings: GrowSettings,
    rng: &mut R,
    scratch: &mut Scratch,
) -> usize {
    let counts = samples.iter().fold([0u64; 2], |mut c, &i| {
        c[ys[i].index()] += 1;
        c
    });
    let id = tree.nodes.len();
    tree.nodes.push(Node::Leaf(counts));
    let pure = counts[0] == 0 || counts[1] == 0;
    if pure || depth >= settings.max_depth || samples.len() < settings.min_samples_split {
        return id;
    }
    let Some(split) = best_gini_split(xs, ys, &samples, settings.max_features, rng, scratch) else {
        return id;
    };
    let (l, r) = partition(xs, &samples, split);
    drop(samples);
    let left = grow_class_node(tree, xs, ys, l, depth + 1, settings, rng, scratch);
    let right = grow_class_node(tree, xs, ys, r, depth + 1, settings, rng, scratch);
    tree.nodes[id] = Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left,
        right,
    };
    id
}

/// Column-major copy of a training matrix with each column sorted by value,
/// built once and shared by every boosting round.
pub(crate) struct Columns {
    start: Vec<usize>,
    rows: Vec<usize>,
    values: Vec<f64>,
}

impl Columns {
    pub fn new(xs: &[SparseVector]) -> Self {
        let dimension = xs.first().map_or(0, |x| x.dimension());
        let mut cols: Vec<Vec<(f64, usize)>> = vec![Vec::new(); dimension];
        for (i, x) in xs.iter().enumerate() {
            for &(f, v) in x.entries() {
                cols[f].push((v, i));
            }
        }
        let mut start = Vec::with_capacity(dimension + 1);
        let mut rows = Vec::new();
        let mut values = Vec::new();
        start.push(0);
        for mut col in cols {
            col.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (v, i) in col {
                values.push(v);
                rows.push(i);
            }
            start.push(rows.len());
        }
        Columns { start, rows, values }
    }

    fn dimension(&self) -> usize {
        self.start.len() - 1
    }
}

/// Best squared-error split: maximizes S_L²/n_L + S_R²/n_R over the same
/// candidate thresholds as the classification trees. Requires a strict
/// improvement over the unsplit node.
fn best_regression_split(
    cols: &Columns,
    targets: &[f64],
    samples: &[usize],
    in_node: &[bool],
) -> Option<Split> {
    let n = samples.len() as f64;
    let total: f64 = samples.iter().map(|&i| targets[i]).sum();
    let mut best: Option<(f64, Split)> = None;
    // (value, count, target sum) per distinct value, implicit zeros included.
    let mut groups: Vec<(f64, f64, f64)> = Vec::new();
    let mut run: Vec<(f64, f64)> = Vec::new();
    for feature in 0..cols.dimension() {
        run.clear();
        for k in cols.start[feature]..cols.start[feature + 1] {
            let i = cols.rows[k];
            if in_node[i] {
                run.push((cols.values[k], targets[i]));
            }
        }
        if run.is_empty() {
            continue;
        }
        let zero_n = n - run.len() as f64;
        let zero_sum = total - run.iter().map(|e| e.1).sum::<f64>();
        groups.clear();
        let mut push = |v: f64, c: f64, s: f64| match groups.last_mut() {
            Some(g) if g.0 == v => {
                g.1 += c;
                g.2 += s;
            }
            _ => groups.push((v, c, s)),
        };
        let zero_pos = run.partition_point(|e| e.0 < 0.0);
        for e in &run[..zero_pos] {
            push(e.0, 1.0, e.1);
        }
        if zero_n > 0.0 {
            push(0.0, zero_n, zero_sum);
        }
        for e in &run[zero_pos..] {
            push(e.0, 1.0, e.1);
        }
        let (mut ln, mut ls) = (0.0, 0.0);
        for &(v, c, s) in &groups[..groups.len() - 1] {
            ln += c;
            ls += s;
            let (rn, rs) = (n - ln, total - ls);
            let score = ls * ls / ln + rs * rs / rn;
            if best.is_none_or(|(b, _)| score > b) {
                best = Some((score, Split { feature, threshold: v }));
            }
        }
    }
    let parent = total * total / n;
    best.filter(|(score, _)| *score > parent + 1e-12 * parent.abs().max(1.0))
        .map(|(_, s)| s)
}

pub(crate) fn grow_regressor(
    xs: &[SparseVector],
    cols: &Columns,
    targets: &[f64],
    settings: GrowSettings,
) -> RegressionTree {
    let mut tree = Tree { nodes: Vec::new() };
    let mut in_node = vec![false; xs.len()];
    grow_reg_node(&mut tree, xs, cols, targets, (0..xs.len()).collect(), 0, settings, &mut in_node);
    tree
}

#[allow(clippy::too_many_arguments)]
fn grow_reg_node(
    tree: &mut RegressionTree,
    xs: &[SparseVector],
    cols: &Columns,
    targets: &[f64],
    samples: Vec<usize>,
    depth: usize,
    settings: GrowSettings,
    in_node: &mut [bool],
) -> usize {
    let mean = samples.iter().map(|&i| targets[i]).sum::<f64>() / samples.len() as f64;
    let id = tree.nodes.len();
    tree.nodes.push(Node::Leaf(mean));
    if depth >= settings.max_depth || samples.len() < settings.min_samples_split {
        return id;
    }
    for &i in &samples {
        in_node[i] = true;
    }
    let split = best_regression_split(cols, targets, &samples, in_node);
    for &i in &samples {
        in_node[i] = false;
    }
    let Some(split) = split else {
        return id;
    };
    let (l, r) = partition(xs, &samples, split);
    drop(samples);
    let left = grow_reg_node(tree, xs, cols, targets, l, depth + 1, settings, in_node);
    let right = grow_reg_node(tree, xs, cols, targets, r, depth + 1, settings, in_node);
    tree.nodes[id] = Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left,
        right,
    };
    id
}

pub(crate) trait LeafCodec: Sized {
    fn encode(&self) -> Vec<String>;
    fn decode(input: &In, fields: &[&str]) -> Result<Self>;
}

impl LeafCodec for ClassCounts {
    fn encode(&self) -> Vec<String> {
        vec![self[0].to_string(), self[1].to_string()]
    }

    fn decode(input: &In, fields: &[&str]) -> Result<Self> {
        match fields {
            [a, b] => Ok([input.value(a)?, input.value(b)?]),
            _ => Err(input.error("leaf needs two class counts")),
        }
    }
}

impl LeafCodec for f64 {
    fn encode(&self) -> Vec<String> {
        vec![super::format::real(*self)]
    }

    fn decode(input: &In, fields: &[&str]) -> Result<Self> {
        match fields {
            [v] => input.finite(v),
            _ => Err(input.error("leaf needs one value")),
        }
    }
}

impl<L> Tree<L> {
    pub(crate) fn write(&self, out: &mut Out)
    where
        L: LeafCodec,
    {
        out.line("tree", [self.nodes.len().to_string()]);
        for node in &self.nodes {
            match node {
                Node::Leaf(l) => out.line("leaf", l.encode()),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => out.line(
                    "split",
                    [
                        feature.to_string(),
                        super::format::real(*threshold),
                        left.to_string(),
                        right.to_string(),
                    ],
                ),
            }
        }
    }

    pub(crate) fn read(input: &mut In, dimension: usize) -> Result<Self>
    where
        L: LeafCodec,
    {
        let count: usize = input.expect_one("tree")?;
        if count == 0 {
            return Err(input.error("tree has no nodes"));
        }
        let mut nodes = Vec::with_capacity(count.min(1 << 20));
        for i in 0..count {
            let line = input.next_line()?;
            let mut parts = line.split(' ');
            let key = parts.next().unwrap_or_default();
            let fields: Vec<&str> = parts.collect();
            let node = match (key, fields.as_slice()) {
                ("leaf", f) => Node::Leaf(L::decode(input, f)?),
                ("split", [f, t, l, r]) => {
                    let (feature, left, right): (usize, usize, usize) =
                        (input.value(f)?, input.value(l)?, input.value(r)?);
                    // Preorder layout: children come after their parent.
                    if feature >= dimension || left <= i || right <= i || left >= count || right >= count {
                        return Err(input.error("split references an invalid feature or node"));
                    }
                    Node::Split {
                        feature,
                        threshold: input.finite(t)?,
                        left,
                        right,
                    }
                }
                _ => return Err(input.error("expected 'leaf' or 'split' node")),
            };
            nodes.push(node);
        }
        Ok(Tree { nodes })
    }
}
