//! Semi-supervised learning with the `Ω_{H,p}` regularizers and the
//! clique-expansion Laplacian baseline.
//!
//! Two-class problems solve `min_f ½‖f − Y‖² + λ Ω_{H,p}(f)` with
//! `Y ∈ {−1, 0, 1}ⁿ`. More classes are handled one-vs-rest with an argmax
//! over the per-class scores.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::hypergraph::Hypergraph;
use crate::parallel::map_indexed;
use crate::pdhg::{solve, DataTerm, PdhgConfig, Power, SolveReport};

/// Labelled vertices `(vertex, class)` with classes in `0..n_classes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet {
    n_vertices: usize,
    pairs: Vec<(usize, usize)>,
    n_classes: usize,
    class_names: Vec<String>,
}

impl LabelSet {
    /// Class names default to the decimal class ids.
    pub fn new(n_vertices: usize, pairs: Vec<(usize, usize)>, n_classes: usize) -> Result<Self> {
        let names = (0..n_classes).map(|c| c.to_string()).collect();
        Self::with_names(n_vertices, pairs, names)
    }

    pub fn with_names(
        n_vertices: usize,
        pairs: Vec<(usize, usize)>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let n_classes = class_names.len();
        let mut seen = HashSet::new();
        for &(v, c) in &pairs {
            if v >= n_vertices {
                return Err(Error::InvalidArgument(format!(
                    "labelled vertex {v} out of range (n = {n_vertices})"
                )));
            }
            if c >= n_classes {
                return Err(Error::InvalidArgument(format!(
                    "class {c} out of range ({n_classes} classes)"
                )));
            }
            if !seen.insert(v) {
                return Err(Error::InvalidArgument(format!("vertex {v} labelled twice")));
            }
        }
        Ok(LabelSet {
            n_vertices,
            pairs,
            n_classes,
            class_names,
        })
    }

    /// Builds a label set from class names. Class ids follow the sorted
    /// names, numerically when every name parses as an integer.
    pub fn from_named(n_vertices: usize, named: &[(usize, String)]) -> Result<Self> {
        let mut names: Vec<String> = named.iter().map(|(_, s)| s.clone()).collect();
        names.sort();
        names.dedup();
        if names.iter().all(|s| s.parse::<i64>().is_ok()) {
            names.sort_by_key(|s| s.parse::<i64>().unwrap());
        }
        let pairs = named
            .iter()
            .map(|(v, s)| (*v, names.iter().position(|n| n == s).unwrap()))
            .collect();
        Self::with_names(n_vertices, pairs, names)
    }

    /// Reads a CSV with header and columns `vertex_id, class`; ids are
    /// 0-based.
    pub fn read_csv<P: AsRef<Path>>(path: P, n_vertices: usize) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut named = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            let line = row + 2;
            if record.len() < 2 {
                return Err(Error::Parse {
                    line,
                    msg: "expected vertex_id,class".into(),
                });
            }
            let v = record[0].parse::<usize>().map_err(|e| Error::Parse {
                line,
                msg: format!("bad vertex id {:?}: {e}", &record[0]),
            })?;
            named.push((v, record[1].to_string()));
        }
        Self::from_named(n_vertices, &named)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The pairs at positions `idx`, same classes.
    pub fn select(&self, idx: &[usize]) -> LabelSet {
        LabelSet {
            n_vertices: self.n_vertices,
            pairs: idx.iter().map(|&i| self.pairs[i]).collect(),
            n_classes: self.n_classes,
            class_names: self.class_names.clone(),
        }
    }

    /// Per-vertex class, `None` where unlabelled.
    pub fn per_vertex(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n_vertices];
        for &(v, c) in &self.pairs {
            out[v] = Some(c);
        }
        out
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &(_, c) in &self.pairs {
            counts[c] += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SslConfig {
    pub power: Power,
    pub lambda_grid: Vec<f64>,
    pub cv_folds: usize,
    pub pdhg: PdhgConfig,
    pub seed: u64,
    /// Worker threads for per-class and per-fold solves.
    pub threads: usize,
}

impl Default for SslConfig {
    fn default() -> Self {
        SslConfig {
            power: Power::Two,
            lambda_grid: (0..=6).map(|k| 10f64.powi(-k)).collect(),
            cv_folds: 5,
            pdhg: PdhgConfig::default(),
            seed: 0,
            threads: 1,
        }
    }
}

impl SslConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_grid.is_empty() {
            return Err(Error::InvalidArgument("lambda grid is empty".into()));
        }
        if let Some(l) = self.lambda_grid.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidArgument(format!("grid value {l} is not positive")));
        }
        if self.cv_folds < 2 {
            return Err(Error::InvalidArgument("cv_folds must be >= 2".into()));
        }
        Ok(())
    }
}

/// `Y` with `+1` on vertices labelled `positive_class`, `−1` on other
/// labelled vertices and `0` elsewhere.
pub fn build_label_vector(labels: &LabelSet, positive_class: usize, n: usize) -> Result<Vec<f64>> {
    if positive_class >= labels.n_classes() {
        return Err(Error::InvalidArgument(format!(
            "class {positive_class} out of range ({} classes)",
            labels.n_classes()
        )));
    }
    let mut y = vec![0.0; n];
    for &(v, c) in labels.pairs() {
        if v >= n {
            return Err(Error::InvalidArgument(format!("vertex {v} out of range (n = {n})")));
        }
        y[v] = if c == positive_class { 1.0 } else { -1.0 };
    }
    Ok(y)
}

/// `argmin_f ½‖f − y‖² + λ Ω_{H,p}(f)`. The minimizer is `report.f`.
pub fn ssl_solve(
    h: &Hypergraph,
    y: &[f64],
    power: Power,
    lambda: f64,
    cfg: &PdhgConfig,
) -> Result<SolveReport> {
    check_len(h.n_vertices(), y.len())?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must be > 0, got {lambda}")));
    }
    if h.edges().iter().all(|e| e.len() < 2) {
        // the regularizer vanishes identically
        return Ok(SolveReport {
            f: y.to_vec(),
            objective: 0.0,
            dual_objective: 0.0,
            rel_gap: 0.0,
            iterations: 0,
            seconds: 0.0,
            converged: true,
        });
    }
    solve(h, &DataTerm::Ssl { y: y.to_vec() }, lambda, power, cfg)
}

/// One-vs-rest output: `scores[c][i]` is the class-`c` score of vertex `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub labels: Vec<usize>,
    pub scores: Vec<Vec<f64>>,
    pub lambda: f64,
    pub converged: bool,
    /// Largest relative duality gap over the per-class solves.
    pub max_rel_gap: f64,
}

/// One-vs-rest prediction at a fixed `λ`; every class needs at least one
/// labelled vertex.
pub fn ssl_predict_multiclass(
    h: &Hypergraph,
    labels: &LabelSet,
    lambda: f64,
    cfg: &SslConfig,
) -> Result<Prediction> {
    if labels.n_classes() < 2 {
        return Err(Error::InvalidArgument("need at least two classes".into()));
    }
    if let Some(c) = labels.class_counts().iter().position(|&k| k == 0) {
        return Err(Error::InvalidArgument(format!(
            "class {:?} has no labelled vertex",
            labels.class_names()[c]
        )));
    }
    predict(h, labels, lambda, cfg)
}

/// Like [`ssl_predict_multiclass`] but classes without labelled vertices
/// are never predicted.
fn predict(h: &Hypergraph, labels: &LabelSet, lambda: f64, cfg: &SslConfig) -> Result<Prediction> {
    let n = h.n_vertices();
    let k = labels.n_classes();
    let counts = labels.class_counts();
    let present: Vec<usize> = (0..k).filter(|&c| counts[c] > 0).collect();
    let mut scores = vec![vec![f64::NEG_INFINITY; n]; k];
    let mut converged = true;
    let mut max_rel_gap: f64 = 0.0;
    match present.len() {
        0 => return Err(Error::Empty("label set")),
        1 => scores[present[0]] = vec![0.0; n],
        2 => {
            // the second score is exactly the negated first
            let (a, b) = (present[0], present[1]);
            let y = build_label_vector(labels, a, n)?;
            let rep = ssl_solve(h, &y, cfg.power, lambda, &cfg.pdhg)?;
            converged = rep.converged;
            max_rel_gap = rep.rel_gap;
            scores[b] = rep.f.iter().map(|v| -v).collect();
            scores[a] = rep.f;
        }
        _ => {
            let reports = map_indexed(present.len(), cfg.threads, |i| {
                let y = build_label_vector(labels, present[i], n)?;
                ssl_solve(h, &y, cfg.power, lambda, &cfg.pdhg)
            });
            for (i, rep) in reports.into_iter().enumerate() {
                let rep = rep?;
                converged &= rep.converged;
                max_rel_gap = max_rel_gap.max(rep.rel_gap);
                scores[present[i]] = rep.f;
            }
        }
    }
    let labels = (0..n)
        .map(|v| {
            let mut best = present[0];
            for &c in &present[1..] {
                if scores[c][v] > scores[best][v] {
                    best = c;
                }
            }
            best
        })
        .collect();
    Ok(Prediction {
        labels,
        scores,
        lambda,
        converged,
        max_rel_gap,
    })
}

/// Splits positions `0..labels.len()` into `folds` groups, stratified by
/// class: each class is shuffled and dealt round-robin, continuing where
/// the previous class stopped, so fold sizes differ by at most one.
pub fn stratified_folds(labels: &LabelSet, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::InvalidArgument("need at least two folds".into()));
    }
    if labels.len() < folds {
        return Err(Error::InvalidArgument(format!(
            "{} labelled vertices cannot fill {folds} folds",
            labels.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Vec::new(); folds];
    let mut next = 0;
    for c in 0..labels.n_classes() {
        let mut members: Vec<usize> = (0..labels.len())
            .filter(|&i| labels.pairs()[i].1 == c)
            .collect();
        members.shuffle(&mut rng);
        for i in members {
            out[next % folds].push(i);
            next += 1;
        }
    }
    for fold in &mut out {
        fold.sort_unstable();
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub lambda: f64,
    pub mean_error: f64,
    pub fold_errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub best_lambda: f64,
    /// One row per grid value, in grid order.
    pub table: Vec<CvRow>,
}

/// Picks `λ` from `cfg.lambda_grid` by stratified k-fold cross validation
/// over the labelled vertices. Ties go to the larger `λ`.
pub fn cross_validate_lambda(h: &Hypergraph, labels: &LabelSet, cfg: &SslConfig) -> Result<CvResult> {
    let inner = SslConfig {
        threads: 1,
        ..cfg.clone()
    };
    cross_validate_with(labels, cfg, |train, lambda| {
        Ok(predict(h, train, lambda, &inner)?.labels)
    })
}

/// Cross validation of any predictor `(training labels, λ) → class per
/// vertex` over `cfg.lambda_grid`, with the folds and tie rule of
/// [`cross_validate_lambda`].
pub fn cross_validate_with<F>(labels: &LabelSet, cfg: &SslConfig, predictor: F) -> Result<CvResult>
where
    F: Fn(&LabelSet, f64) -> Result<Vec<usize>> + Sync,
{
    cfg.validate()?;
    if cfg.lambda_grid.len() == 1 {
        return Ok(CvResult {
            best_lambda: cfg.lambda_grid[0],
            table: vec![CvRow {
                lambda: cfg.lambda_grid[0],
                mean_error: f64::NAN,
                fold_errors: Vec::new(),
            }],
        });
    }
    let folds = stratified_folds(labels, cfg.cv_folds, cfg.seed)?;
    let n_folds = folds.len();
    let jobs = cfg.lambda_grid.len() * n_folds;
    let errors = map_indexed(jobs, cfg.threads, |job| -> Result<f64> {
        let lambda = cfg.lambda_grid[job / n_folds];
        let held = &folds[job % n_folds];
        let train: Vec<usize> = (0..labels.len()).filter(|i| held.binary_search(i).is_err()).collect();
        let predicted = predictor(&labels.select(&train), lambda)?;
        let wrong = held
            .iter()
            .filter(|&&i| predicted[labels.pairs()[i].0] != labels.pairs()[i].1)
            .count();
        Ok(wrong as f64 / held.len() as f64)
    });
    let errors = errors.into_iter().collect::<Result<Vec<f64>>>()?;
    let table: Vec<CvRow> = cfg
        .lambda_grid
        .iter()
        .enumerate()
        .map(|(g, &lambda)| {
            let fold_errors = errors[g * n_folds..(g + 1) * n_folds].to_vec();
            let mean_error = fold_errors.iter().sum::<f64>() / n_folds as f64;
            CvRow {
                lambda,
                mean_error,
                fold_errors,
            }
        })
        .collect();
    let mut best = &table[0];
    for row in &table[1..] {
        let better = row.mean_error < best.mean_error - 1e-12;
        let tie_larger = (row.mean_error - best.mean_error).abs() <= 1e-12 && row.lambda > best.lambda;
        if better || tie_larger {
            best = row;
        }
    }
    Ok(CvResult {
        best_lambda: best.lambda,
        table,
    })
}

/// Vertex degree used to normalize the clique-expansion Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeConvention {
    /// `d(i) = Σ_{e∋i} w_e/|e|`. The diagonal of `L` is then zero and `L`
    /// is in general indefinite.
    #[default]
    Literal,
    /// `d(i) = Σ_{e∋i} w_e`, which makes `L` positive semidefinite.
    Standard,
}

/// Symmetric sparse matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// From `(i, j, v)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            last = Some((i, j));
            row_ptr[i + 1] += 1;
            cols.push(j);
            vals.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[row.clone()].binary_search(&j) {
            Ok(k) => self.vals[row.start + k],
            Err(_) => 0.0,
        }
    }

    /// `out = A x`.
    pub fn mul_into(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            out[i] = acc;
        }
    }

    /// `⟨x, A x⟩`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut ax = vec![0.0; self.n];
        self.mul_into(x, &mut ax);
        ax.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Largest `|A_ij − A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                worst = worst.max((self.vals[k] - self.get(self.cols[k], i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }
}

/// `L_CE = I − D^{−1/2} H W′ Hᵀ D^{−1/2}` with `w′_e = w_e/|e|`, the
/// diagonal of `H W′ Hᵀ` included. Vertices with zero degree get a unit
/// diagonal and no off-diagonal entries.
pub fn clique_laplacian(h: &Hypergraph, convention: DegreeConvention) -> SparseMatrix {
    let n = h.n_vertices();
    let mut degree = vec![0.0; n];
    let mut triplets = Vec::new();
    for e in h.edges() {
        let wp = e.weight / e.len() as f64;
        for &i in &e.vertices {
            degree[i] += match convention {
                DegreeConvention::Literal => wp,
                DegreeConvention::Standard => e.weight,
            };
            for &j in &e.vertices {
                triplets.push((i, j, wp));
            }
        }
    }
    let scale: Vec<f64> = degree
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    let mut entries: Vec<(usize, usize, f64)> = triplets
        .into_iter()
        .filter(|&(i, j, _)| scale[i] > 0.0 && scale[j] > 0.0)
        .map(|(i, j, a)| (i, j, -a * scale[i] * scale[j]))
        .collect();
    entries.extend((0..n).map(|i| (i, i, 1.0)));
    SparseMatrix::from_triplets(n, entries)
}

/// Conjugate gradients for `A x = b` with `A` symmetric positive definite,
/// given as `apply(x, out)`. Stops at `‖b − Ax‖ ≤ rel_tol·‖b‖`.
pub fn conjugate_gradient<F>(apply: F, b: &[f64], rel_tol: f64, max_iters: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let norm_b = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if norm_b == 0.0 {
        return Ok(x);
    }
    let target = rel_tol * norm_b;
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    for _ in 0..max_iters {
        if rr.sqrt() <= target {
            return Ok(x);
        }
        apply(&p, &mut ap);
        let curvature = dot(&p, &ap);
        if !(curvature > 0.0) {
            return Err(Error::NotConverged(format!(
                "conjugate gradients met non-positive curvature {curvature:e}"
            )));
        }
        let alpha = rr / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        rr = rr_next;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    // recompute the true residual before giving up
    apply(&x, &mut ap);
    let res = b.iter().zip(&ap).map(|(b, a)| (b - a).powi(2)).sum::<f64>().sqrt();
    if res <= target {
        return Ok(x);
    }
    Err(Error::NotConverged(format!(
        "conjugate gradients stalled at residual {:e} after {max_iters} iterations",
        res / norm_b
    )))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `argmin_f ‖f − y‖² + λ⟨f, L_CE f⟩`, i.e. `(I + λL_CE) f = y`, solved by
/// conjugate gradients to relative residual `1e-10`.
pub fn ssl_clique_baseline(
    h: &Hypergraph,
    y: &[f64],
    lambda: f64,
    convention: DegreeConvention,
) -> Result<Vec<f64>> {
    check_len(h.n_vertices(), y.len())?;
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must be >= 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(y.to_vec());
    }
    let l = clique_laplacian(h, convention);
    let apply = |x: &[f64], out: &mut [f64]| {
        l.mul_into(x, out);
        for i in 0..x.len() {
            out[i] = x[i] + lambda * out[i];
        }
    };
    conjugate_gradient(apply, y, 1e-10, 10 * y.len() + 100)
}

/// One-vs-rest baseline prediction, argmax with ties to the smaller class.
/// Classes without labelled vertices are never predicted.
pub fn baseline_predict_multiclass(
    h: &Hypergraph,
    labels: &LabelSet,
    lambda: f64,
    convention: DegreeConvention,
) -> Result<Vec<usize>> {
    let n = h.n_vertices();
    let counts = labels.class_counts();
    let present: Vec<usize> = (0..labels.n_classes()).filter(|&c| counts[c] > 0).collect();
    if present.is_empty() {
        return Err(Error::Empty("label set"));
    }
    let scores = present
        .iter()
        .map(|&c| ssl_clique_baseline(h, &build_label_vector(labels, c, n)?, lambda, convention))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..n)
        .map(|v| {
            let mut best = 0;
            for c in 1..scores.len() {
                if scores[c][v] > scores[best][v] {
                    best = c;
                }
            }
            present[best]
        })
        .collect())
}

/// Fraction of `eval_set` where `predicted` and `truth` differ.
pub fn classification_error(predicted: &[usize], truth: &[usize], eval_set: &[usize]) -> Result<f64> {
    check_len(predicted.len(), truth.len())?;
    if eval_set.is_empty() {
        return Err(Error::Empty("evaluation set"));
    }
    let mut wrong = 0;
    for &i in eval_set {
        if i >= truth.len() {
            return Err(Error::InvalidArgument(format!("evaluation index {i} out of range")));
        }
        if predicted[i] != truth[i] {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / eval_set.len() as f64)
}

/// Error after relabelling each cluster with its majority true class.
pub fn clustering_error(clusters: &[usize], truth: &[usize]) -> Result<f64> {
    check_len(clusters.len(), truth.len())?;
    if clusters.is_empty() {
        return Err(Error::Empty("clustering"));
    }
    let k = clusters.iter().max().unwrap() + 1;
    let c = truth.iter().max().unwrap() + 1;
    let mut table = vec![vec![0usize; c]; k];
    for (&a, &t) in clusters.iter().zip(truth) {
        table[a][t] += 1;
    }
    let correct: usize = table.iter().map(|row| row.iter().max().copied().unwrap_or(0)).sum();
    Ok(1.0 - correct as f64 / clusters.len() as f64)
}

/// Draws `count` labelled positions from `pool`, first one per class
/// (when `count` allows) and then uniformly from the rest.
pub fn sample_labelled(pool: &LabelSet, count: usize, seed: u64) -> Result<Vec<usize>> {
    if count == 0 || count >= pool.len() {
        return Err(Error::InvalidArgument(format!(
            "labelled count {count} must be in 1..{}",
            pool.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(&mut rng);
    let mut chosen = Vec::with_capacity(count);
    let mut taken = vec![false; pool.len()];
    if count >= pool.n_classes() {
        for c in 0..pool.n_classes() {
            if let Some(&i) = order.iter().find(|&&i| pool.pairs()[i].1 == c) {
                chosen.push(i);
                taken[i] = true;
            }
        }
    }
    for &i in &order {
        if chosen.len() == count {
            break;
        }
        if !taken[i] {
            chosen.push(i);
            taken[i] = true;
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}
