//! Balanced hypergraph cuts.
//!
//! Minimizes `cut_H(C, C̄) / Ŝ(C)` through its exact continuous relaxation
//! `TV_H(f) / S(f)` (`S` the Lovász extension of `Ŝ`) with RatioDCA, then
//! turns the resulting vector into a partition by optimal thresholding.
//! Only submodular balancing functions are supported, so the inner problem
//! is `min_{‖u‖≤1} TV_H(u) − λᵏ⟨u, s₁(fᵏ)⟩`, solved with PDHG.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::hypergraph::{Hyperedge, Hypergraph, Partition};
use crate::parallel::map_indexed;
use crate::lovasz::{ascending_order, lovasz_extension, lovasz_subgradient, SetFunction};
use crate::pdhg::{solve_with_state, DataTerm, PdhgConfig, PdhgState, Power};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BalanceKind {
    /// `|C|·|C̄|`
    RatioCut,
    /// `vol(C)·vol(C̄)`
    NormalizedCut,
    /// `min(|C|, |C̄|)`
    CheegerRatio,
    /// `min(vol C, vol C̄)`
    CheegerNormalized,
}

impl BalanceKind {
    pub const ALL: [BalanceKind; 4] = [
        BalanceKind::RatioCut,
        BalanceKind::NormalizedCut,
        BalanceKind::CheegerRatio,
        BalanceKind::CheegerNormalized,
    ];

    fn uses_volume(self) -> bool {
        matches!(self, BalanceKind::NormalizedCut | BalanceKind::CheegerNormalized)
    }
}

/// Symmetric, non-negative, submodular balancing set function. Every variant
/// is a concave function of a modular weight `m(C)` (vertex counts or
/// volumes), which makes the suffix sweep O(1) per step.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceFunction {
    kind: BalanceKind,
    weights: Vec<f64>,
}

impl BalanceFunction {
    pub fn new(h: &Hypergraph, kind: BalanceKind) -> Self {
        let weights = if kind.uses_volume() {
            h.degrees().to_vec()
        } else {
            vec![1.0; h.n_vertices()]
        };
        BalanceFunction {
            kind,
            weights,
        }
    }

    pub fn kind(&self) -> BalanceKind {
        self.kind
    }

    /// Both masses are summed directly so an empty side is exactly zero.
    #[inline]
    fn of_masses(&self, inside: f64, outside: f64) -> f64 {
        match self.kind {
            BalanceKind::RatioCut | BalanceKind::NormalizedCut => inside * outside,
            BalanceKind::CheegerRatio | BalanceKind::CheegerNormalized => inside.min(outside),
        }
    }
}

impl SetFunction for BalanceFunction {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, c: &Partition) -> f64 {
        let (mut inside, mut outside) = (0.0, 0.0);
        for (m, w) in c.members().zip(&self.weights) {
            if m {
                inside += w;
            } else {
                outside += w;
            }
        }
        self.of_masses(inside, outside)
    }

    fn suffix_values(&self, order: &[usize]) -> Vec<f64> {
        let n = order.len();
        let mut prefix = vec![0.0; n + 1];
        for k in 0..n {
            prefix[k + 1] = prefix[k] + self.weights[order[k]];
        }
        let mut out = vec![0.0; n + 1];
        let mut inside = 0.0;
        for k in (1..n).rev() {
            inside += self.weights[order[k]];
            out[k] = self.of_masses(inside, prefix[k]);
        }
        out
    }
}

pub fn balance_value(b: &BalanceFunction, c: &Partition) -> Result<f64> {
    check_len(b.ground_size(), c.len())?;
    Ok(b.value(c))
}

/// `cut_H(C, C̄) / Ŝ(C)`. A proper partition with zero balance (only
/// possible for volume-based balances with zero-degree vertices) has value
/// `+∞`.
pub fn balanced_cut(h: &Hypergraph, b: &BalanceFunction, c: &Partition) -> Result<f64> {
    check_len(h.n_vertices(), c.len())?;
    if !c.is_proper() {
        return Err(Error::Degenerate("balanced cut needs 0 < |C| < n".into()));
    }
    let s = b.value(c);
    if s <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(h.cut(c)? / s)
}

/// `TV_H(f) / S(f)`.
pub fn continuous_ratio(h: &Hypergraph, b: &BalanceFunction, f: &[f64]) -> Result<f64> {
    let num = h.total_variation(f)?;
    let den = lovasz_extension(b, f)?;
    if den <= 0.0 {
        return Err(Error::Degenerate(
            "balance extension vanishes at f".into(),
        ));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    pub partition: Partition,
    pub value: f64,
}

/// Best level set `{i : f_i > t}` over all thresholds, found by one sweep in
/// decreasing order of `f` with incremental cut and mass updates.
pub fn optimal_threshold(h: &Hypergraph, b: &BalanceFunction, f: &[f64]) -> Result<Threshold> {
    check_len(h.n_vertices(), f.len())?;
    let n = f.len();
    let mut order = ascending_order(f);
    order.reverse();
    if n < 2 || f[order[0]] == f[order[n - 1]] {
        return Err(Error::Degenerate("cannot threshold a constant vector".into()));
    }

    // mass outside the level set, summed from the far end
    let mut outside = vec![0.0; n];
    for k in (1..n).rev() {
        outside[k - 1] = outside[k] + b.weights[order[k]];
    }
    let mut inside_count = vec![0usize; h.n_edges()];
    let mut cut = 0.0;
    let mut mass = 0.0;
    let mut best: Option<(usize, f64)> = None;
    for k in 0..n - 1 {
        let v = order[k];
        mass += b.weights[v];
        for &e in h.incident_edges(v) {
            let edge = &h.edges()[e];
            let before = inside_count[e];
            inside_count[e] += 1;
            if edge.len() > 1 {
                if before == 0 {
                    cut += edge.weight;
                }
                if inside_count[e] == edge.len() {
                    cut -= edge.weight;
                }
            }
        }
        if f[order[k + 1]] == f[v] {
            continue;
        }
        let s = b.of_masses(mass, outside[k]);
        let value = if s > 0.0 { cut.max(0.0) / s } else { f64::INFINITY };
        if best.map_or(true, |(_, bv)| value < bv) {
            best = Some((k + 1, value));
        }
    }
    let (size, _) = best.expect("non-constant vector has a proper level set");
    let partition = Partition::from_indices(n, &order[..size])?;
    // exact re-evaluation, free of accumulated rounding in the sweep
    let value = balanced_cut(h, b, &partition)?;
    Ok(Threshold { partition, value })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioDcaConfig {
    /// Stop once `|λᵏ⁺¹ − λᵏ| / λᵏ < epsilon`.
    pub epsilon: f64,
    pub max_outer: usize,
    /// PDHG settings for the inner problem.
    pub inner: PdhgConfig,
    pub restarts: usize,
    pub seed: u64,
    /// After each outer step, continue from the best level set of the new
    /// iterate whenever that level set has a strictly smaller ratio.
    pub threshold_restart: bool,
    /// Worker threads for independent restarts (results do not depend on it).
    pub threads: usize,
}

impl Default for RatioDcaConfig {
    fn default() -> Self {
        RatioDcaConfig {
            epsilon: 1e-4,
            max_outer: 100,
            inner: PdhgConfig {
                epsilon: 1e-6,
                max_iters: 2_000,
                gap_check_stride: 10,
                ..PdhgConfig::default()
            },
            restarts: 10,
            seed: 0,
            threshold_restart: true,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    pub u: Vec<f64>,
    /// `TV_H(u) − λᵏ⟨u, s₁⟩`.
    pub objective: f64,
    pub converged: bool,
    /// True when the PDHG iterate lost to the descent candidate
    /// `fᵏ/‖fᵏ‖` and was replaced by it.
    pub fell_back: bool,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn inner_objective(h: &Hypergraph, s1: &[f64], lambda_k: f64, u: &[f64]) -> Result<f64> {
    let lin: f64 = s1.iter().zip(u).map(|(a, b)| a * b).sum();
    Ok(h.total_variation(u)? - lambda_k * lin)
}

/// Solves `min_{‖u‖≤1} TV_H(u) − λᵏ⟨u, s₁(f_prev)⟩`.
///
/// The returned point never has a larger objective than `f_prev/‖f_prev‖`,
/// which guarantees outer descent. `state` carries the PDHG duals between
/// outer iterations.
pub fn inner_problem_solve(
    h: &Hypergraph,
    b: &BalanceFunction,
    f_prev: &[f64],
    lambda_k: f64,
    cfg: &PdhgConfig,
    state: &mut PdhgState,
) -> Result<InnerSolution> {
    check_len(h.n_vertices(), f_prev.len())?;
    if !(lambda_k >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda_k must be >= 0, got {lambda_k}")));
    }
    let s1 = lovasz_subgradient(b, f_prev)?;
    let scaled: Vec<f64> = s1.iter().map(|x| lambda_k * x).collect();
    if scaled.iter().all(|&x| x == 0.0) {
        // only TV_H remains, minimized by u = 0
        return Ok(InnerSolution {
            u: vec![0.0; f_prev.len()],
            objective: 0.0,
            converged: true,
            fell_back: false,
        });
    }
    let norm = norm2(f_prev);
    let candidate: Vec<f64> = if norm > 0.0 {
        f_prev.iter().map(|x| x / norm).collect()
    } else {
        vec![0.0; f_prev.len()]
    };
    state.warm_start(&candidate);
    let report = solve_with_state(h, &DataTerm::BallLinear { s1: scaled }, 1.0, cfg, state)?;
    let obj = inner_objective(h, &s1, lambda_k, &report.f)?;
    let candidate_obj = inner_objective(h, &s1, lambda_k, &candidate)?;
    if obj <= candidate_obj {
        Ok(InnerSolution {
            u: report.f,
            objective: obj,
            converged: report.converged,
            fell_back: false,
        })
    } else {
        Ok(InnerSolution {
            u: candidate,
            objective: candidate_obj,
            converged: report.converged,
            fell_back: true,
        })
    }
}

/// Outcome of RatioDCA: nonlinear eigenpair plus its thresholded partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigResult {
    /// Final ratio `λ*`.
    pub eigenvalue: f64,
    pub eigenvector: Vec<f64>,
    pub partition: Partition,
    /// Balanced cut of `partition`; never above `eigenvalue`.
    pub cut_value: f64,
    pub restart: usize,
    /// `λᵏ` of the winning restart.
    pub trace: Vec<f64>,
    /// `λᵏ` sequences of every restart, in restart order.
    pub all_traces: Vec<Vec<f64>>,
    pub inner_nonconverged: usize,
}

struct RestartOutcome {
    eigenvalue: f64,
    eigenvector: Vec<f64>,
    threshold: Threshold,
    trace: Vec<f64>,
    inner_nonconverged: usize,
}

fn initial_vector(h: &Hypergraph, restart: usize, seed: u64) -> Vec<f64> {
    let n = h.n_vertices();
    if restart == 0 {
        let d = h.degrees();
        let mean = d.iter().sum::<f64>() / n as f64;
        let centered: Vec<f64> = d.iter().map(|x| x - mean).collect();
        let norm = norm2(&centered);
        if norm > 1e-12 {
            return centered.iter().map(|x| x / norm).collect();
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = norm2(&v);
        if norm > 0.0 && v.iter().any(|&x| x != v[0]) {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

fn indicator_direction(c: &Partition) -> Vec<f64> {
    let v = c.indicator();
    let norm = norm2(&v);
    v.iter().map(|x| x / norm).collect()
}

fn run_restart(
    h: &Hypergraph,
    b: &BalanceFunction,
    cfg: &RatioDcaConfig,
    restart: usize,
) -> Result<RestartOutcome> {
    let mut f = initial_vector(h, restart, cfg.seed);
    let mut lambda = continuous_ratio(h, b, &f)?;
    let mut trace = vec![lambda];
    let mut state = PdhgState::new(h, Power::One);
    let mut inner_nonconverged = 0;

    if cfg.threshold_restart {
        let t = optimal_threshold(h, b, &f)?;
        if t.value < lambda {
            f = indicator_direction(&t.partition);
            lambda = t.value;
            trace.push(lambda);
        }
    }

    for _ in 0..cfg.max_outer {
        if lambda <= 0.0 {
            break;
        }
        let inner = inner_problem_solve(h, b, &f, lambda, &cfg.inner, &mut state)?;
        if !inner.converged {
            inner_nonconverged += 1;
        }
        if inner.fell_back {
            break;
        }
        let Ok(next) = continuous_ratio(h, b, &inner.u) else {
            break;
        };
        if next > lambda {
            break;
        }
        let mut f_next = inner.u;
        let mut lambda_next = next;
        if cfg.threshold_restart {
            let t = optimal_threshold(h, b, &f_next)?;
            if t.value < lambda_next {
                f_next = indicator_direction(&t.partition);
                lambda_next = t.value;
            }
        }
        let rel = (lambda - lambda_next).abs() / lambda;
        f = f_next;
        lambda = lambda_next;
        trace.push(lambda);
        if rel < cfg.epsilon {
            break;
        }
    }

    let threshold = optimal_threshold(h, b, &f)?;
    debug_assert!(threshold.value <= lambda * (1.0 + 1e-9) + 1e-12);
    Ok(RestartOutcome {
        eigenvalue: lambda,
        eigenvector: f,
        threshold,
        trace,
        inner_nonconverged,
    })
}

/// RatioDCA with `cfg.restarts` independent starts; keeps the restart whose
/// thresholded partition has the smallest balanced cut.
pub fn ratio_dca(h: &Hypergraph, b: &BalanceFunction, cfg: &RatioDcaConfig) -> Result<EigResult> {
    if h.n_vertices() < 2 {
        return Err(Error::Degenerate("need at least two vertices".into()));
    }
    if h.edges().iter().all(|e| e.len() < 2) {
        return Err(Error::Degenerate("no edge joins two vertices".into()));
    }
    if cfg.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be >= 1".into()));
    }
    let outcomes = run_restarts(h, b, cfg)?;
    let mut best = 0;
    for (k, o) in outcomes.iter().enumerate() {
        if o.threshold.value < outcomes[best].threshold.value {
            best = k;
        }
    }
    let all_traces = outcomes.iter().map(|o| o.trace.clone()).collect();
    let inner_nonconverged = outcomes.iter().map(|o| o.inner_nonconverged).sum();
    let win = outcomes.into_iter().nth(best).unwrap();
    Ok(EigResult {
        eigenvalue: win.eigenvalue,
        eigenvector: win.eigenvector,
        cut_value: win.threshold.value,
        partition: win.threshold.partition,
        restart: best,
        trace: win.trace,
        all_traces,
        inner_nonconverged,
    })
}

fn run_restarts(
    h: &Hypergraph,
    b: &BalanceFunction,
    cfg: &RatioDcaConfig,
) -> Result<Vec<RestartOutcome>> {
    map_indexed(cfg.restarts, cfg.threads, |r| run_restart(h, b, cfg, r))
        .into_iter()
        .collect()
}

/// Which cluster [`recursive_partition`] splits next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitRule {
    /// The cluster whose best bipartition has the smallest balanced cut.
    #[default]
    SmallestRatio,
    LargestCluster,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    /// Index of the cluster that was split.
    pub cluster: usize,
    pub size: usize,
    /// Balanced cut of the split on the induced sub-hypergraph.
    pub value: f64,
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    /// Cluster id per vertex, in `0..k`.
    pub labels: Vec<usize>,
    pub splits: Vec<SplitRecord>,
}

struct Candidate {
    left: Vec<usize>,
    right: Vec<usize>,
    value: f64,
    trace: Vec<f64>,
}

fn best_split(
    h: &Hypergraph,
    members: &[usize],
    kind: BalanceKind,
    cfg: &RatioDcaConfig,
) -> Result<Candidate> {
    let sub = h.induced(members)?;
    let (left, right, value, trace) = if sub.n_edges() == 0 {
        // nothing ties the cluster together: any split is free
        let half = members.len() / 2;
        (members[..half].to_vec(), members[half..].to_vec(), 0.0, Vec::new())
    } else {
        let b = BalanceFunction::new(&sub, kind);
        let res = ratio_dca(&sub, &b, cfg)?;
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (local, &v) in members.iter().enumerate() {
            if res.partition.contains(local) {
                left.push(v);
            } else {
                right.push(v);
            }
        }
        (left, right, res.cut_value, res.trace)
    };
    // the side holding the smallest vertex id keeps the parent's label
    let (left, right) = if left.first() < right.first() && !left.is_empty() {
        (left, right)
    } else {
        (right, left)
    };
    Ok(Candidate {
        left,
        right,
        value,
        trace,
    })
}

/// Recursive bipartitioning into `k` clusters.
pub fn recursive_partition(
    h: &Hypergraph,
    kind: BalanceKind,
    k: usize,
    cfg: &RatioDcaConfig,
    rule: SplitRule,
) -> Result<Clustering> {
    let n = h.n_vertices();
    if k < 2 || k > n {
        return Err(Error::InvalidArgument(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut clusters: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut candidates: Vec<Option<Candidate>> = vec![None];
    let mut splits = Vec::new();

    while clusters.len() < k {
        for (c, members) in clusters.iter().enumerate() {
            if candidates[c].is_none() && members.len() >= 2 {
                candidates[c] = Some(best_split(h, members, kind, cfg)?);
            }
        }
        let pick = match rule {
            SplitRule::SmallestRatio => candidates
                .iter()
                .enumerate()
                .filter_map(|(c, cand)| cand.as_ref().map(|x| (c, x.value)))
                .fold(None, |acc: Option<(usize, f64)>, (c, v)| match acc {
                    Some((_, bv)) if bv <= v => acc,
                    _ => Some((c, v)),
                })
                .map(|(c, _)| c),
            SplitRule::LargestCluster => clusters
                .iter()
                .enumerate()
                .filter(|(c, _)| candidates[*c].is_some())
                .fold(None, |acc: Option<usize>, (c, m)| match acc {
                    Some(b) if clusters[b].len() >= m.len() => acc,
                    _ => Some(c),
                }),
        };
        let Some(c) = pick else {
            return Err(Error::Degenerate(format!(
                "only singleton clusters remain after {} of {k} clusters",
                clusters.len()
            )));
        };
        let cand = candidates[c].take().unwrap();
        splits.push(SplitRecord {
            cluster: c,
            size: clusters[c].len(),
            value: cand.value,
            trace: cand.trace,
        });
        clusters[c] = cand.left;
        clusters.push(cand.right);
        candidates.push(None);
    }

    let mut labels = vec![0; n];
    for (c, members) in clusters.iter().enumerate() {
        for &v in members {
            labels[v] = c;
        }
    }
    Ok(Clustering { labels, splits })
}

/// `Σ_i cut(C_i) / vol(C_i)` over the clusters of `labels`, with the
/// hypergraph cut and degrees.
pub fn multiway_normalized_cut(h: &Hypergraph, labels: &[usize]) -> Result<f64> {
    let cut_of = |e: &Hyperedge, inside: usize| {
        if inside < e.len() {
            e.weight
        } else {
            0.0
        }
    };
    multiway_ncut(h, labels, h.degrees(), cut_of)
}

/// As [`multiway_normalized_cut`] on the clique expansion: an edge adds
/// `w_e/|e|` per separated pair, and a vertex has degree
/// `Σ_e w_e (|e| − 1)/|e|`.
pub fn clique_multiway_normalized_cut(h: &Hypergraph, labels: &[usize]) -> Result<f64> {
    let mut degrees = vec![0.0; h.n_vertices()];
    for e in h.edges() {
        let share = e.weight * (e.len() - 1) as f64 / e.len() as f64;
        for &v in &e.vertices {
            degrees[v] += share;
        }
    }
    let cut_of = |e: &Hyperedge, inside: usize| {
        e.weight / e.len() as f64 * (inside * (e.len() - inside)) as f64
    };
    multiway_ncut(h, labels, &degrees, cut_of)
}

/// `cut_of(e, k)` is the cut contribution of `e` to a cluster holding
/// `k ≥ 1` of its vertices.
fn multiway_ncut<F>(h: &Hypergraph, labels: &[usize], degrees: &[f64], cut_of: F) -> Result<f64>
where
    F: Fn(&Hyperedge, usize) -> f64,
{
    check_len(h.n_vertices(), labels.len())?;
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut cut = vec![0.0; k];
    let mut vol = vec![0.0; k];
    for (v, &d) in degrees.iter().enumerate() {
        vol[labels[v]] += d;
    }
    let mut inside = vec![0usize; k];
    for e in h.edges() {
        for &v in &e.vertices {
            inside[labels[v]] += 1;
        }
        for &v in &e.vertices {
            let c = labels[v];
            if inside[c] > 0 {
                cut[c] += cut_of(e, inside[c]);
                inside[c] = 0;
            }
        }
    }
    let mut total = 0.0;
    for c in 0..k {
        if cut[c] > 0.0 {
            total += cut[c] / vol[c];
        }
    }
    Ok(total)
}
