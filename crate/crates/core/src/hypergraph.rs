//! Weighted undirected hypergraphs and their cut functionals.
//!
//! Edges are stored as sorted vertex lists; the incidence structure is kept
//! sparse (per-vertex lists of incident edge ids) and never materialized as
//! a dense matrix.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperedge {
    pub weight: f64,
    /// Strictly increasing vertex ids.
    pub vertices: Vec<usize>,
}

impl Hyperedge {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `(min, max)` of `f` over the edge.
    #[inline]
    pub fn range(&self, f: &[f64]) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.vertices {
            let x = f[v];
            if x < lo {
                lo = x;
            }
            if x > hi {
                hi = x;
            }
        }
        (lo, hi)
    }
}

/// Weighted hypergraph `H = (V, E, w)`. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    n_vertices: usize,
    edges: Vec<Hyperedge>,
    degrees: Vec<f64>,
    incidence: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Builds a hypergraph from `(weight, vertices)` pairs. Vertex lists are
    /// sorted; duplicates, empty edges, negative or non-finite weights and
    /// out-of-range ids are rejected.
    pub fn new<I>(n_vertices: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, Vec<usize>)>,
    {
        let mut stored = Vec::new();
        for (idx, (weight, mut vertices)) in edges.into_iter().enumerate() {
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {idx} has invalid weight {weight}"
                )));
            }
            if vertices.is_empty() {
                return Err(Error::InvalidHypergraph(format!("edge {idx} is empty")));
            }
            vertices.sort_unstable();
            if vertices.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {idx} repeats a vertex"
                )));
            }
            if let Some(&last) = vertices.last() {
                if last >= n_vertices {
                    return Err(Error::InvalidHypergraph(format!(
                        "edge {idx} references vertex {last} but n = {n_vertices}"
                    )));
                }
            }
            stored.push(Hyperedge { weight, vertices });
        }
        Ok(Self::from_validated(n_vertices, stored))
    }

    fn from_validated(n_vertices: usize, edges: Vec<Hyperedge>) -> Self {
        let mut degrees = vec![0.0; n_vertices];
        let mut incidence = vec![Vec::new(); n_vertices];
        for (e, edge) in edges.iter().enumerate() {
            for &v in &edge.vertices {
                degrees[v] += edge.weight;
                incidence[v].push(e);
            }
        }
        Hypergraph {
            n_vertices,
            edges,
            degrees,
            incidence,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    /// Weighted degrees `d_i = Σ_{e ∋ i} w_e`.
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Edge ids incident to vertex `v`, in ascending order.
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    /// Number of edges containing `v` (`c_i`).
    pub fn incidence_count(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    pub fn max_incidence_count(&self) -> usize {
        self.incidence.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_edge_cardinality(&self) -> usize {
        self.edges.iter().map(Hyperedge::len).max().unwrap_or(0)
    }

    /// `Σ_e |e|`.
    pub fn total_cardinality(&self) -> usize {
        self.edges.iter().map(Hyperedge::len).sum()
    }

    pub fn volume(&self, c: &Partition) -> f64 {
        c.members()
            .zip(&self.degrees)
            .filter(|(m, _)| *m)
            .map(|(_, d)| d)
            .sum()
    }

    /// Hypergraph cut: total weight of edges with vertices on both sides.
    pub fn cut(&self, c: &Partition) -> Result<f64> {
        check_len(self.n_vertices, c.len())?;
        Ok(self
            .edges
            .iter()
            .filter(|e| straddles(e, c))
            .map(|e| e.weight)
            .sum())
    }

    /// Cut of the clique expansion evaluated directly:
    /// `Σ_e (w_e/|e|) |e∩C| |e∩C̄|`.
    pub fn clique_expansion_cut(&self, c: &Partition) -> Result<f64> {
        check_len(self.n_vertices, c.len())?;
        let mut total = 0.0;
        for e in &self.edges {
            let inside = e.vertices.iter().filter(|&&v| c.contains(v)).count();
            let outside = e.len() - inside;
            if inside > 0 && outside > 0 {
                total += e.weight / e.len() as f64 * (inside * outside) as f64;
            }
        }
        Ok(total)
    }

    /// Replaces every hyperedge by a complete graph with pair weight `w_e/|e|`.
    pub fn clique_expansion(&self) -> WeightedGraph {
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for e in &self.edges {
            let w = e.weight / e.len() as f64;
            for (a, &i) in e.vertices.iter().enumerate() {
                for &j in &e.vertices[a + 1..] {
                    *acc.entry((i, j)).or_insert(0.0) += w;
                }
            }
        }
        WeightedGraph::from_sorted_map(self.n_vertices, acc)
    }

    /// Graph `W = ½ H diag(w) Hᵀ` (diagonal dropped) whose cuts coincide with
    /// the hypergraph cuts of a 3-uniform hypergraph.
    pub fn three_uniform_graph(&self) -> Result<WeightedGraph> {
        if let Some((idx, e)) = self.edges.iter().enumerate().find(|(_, e)| e.len() != 3) {
            return Err(Error::InvalidHypergraph(format!(
                "edge {idx} has {} vertices, expected 3",
                e.len()
            )));
        }
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for e in &self.edges {
            for (a, &i) in e.vertices.iter().enumerate() {
                for &j in &e.vertices[a + 1..] {
                    *acc.entry((i, j)).or_insert(0.0) += 0.5 * e.weight;
                }
            }
        }
        Ok(WeightedGraph::from_sorted_map(self.n_vertices, acc))
    }

    /// `TV_H(f) = Σ_e w_e (max_{i∈e} f_i − min_{j∈e} f_j)`.
    pub fn total_variation(&self, f: &[f64]) -> Result<f64> {
        check_len(self.n_vertices, f.len())?;
        Ok(self
            .edges
            .iter()
            .map(|e| {
                let (lo, hi) = e.range(f);
                e.weight * (hi - lo)
            })
            .sum())
    }

    /// `Ω_{H,p}(f) = Σ_e w_e (max_{i∈e} f_i − min_{j∈e} f_j)^p` for `p ≥ 1`.
    pub fn omega(&self, f: &[f64], p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument(format!("p must be >= 1, got {p}")));
        }
        check_len(self.n_vertices, f.len())?;
        Ok(self
            .edges
            .iter()
            .map(|e| {
                let (lo, hi) = e.range(f);
                let gap = hi - lo;
                let powed = if p == 1.0 {
                    gap
                } else if p == 2.0 {
                    gap * gap
                } else {
                    gap.powf(p)
                };
                e.weight * powed
            })
            .sum())
    }

    /// Sub-hypergraph induced on `vertices` (relabelled `0..len` in the given
    /// order). Edges are restricted to the subset; restrictions with fewer
    /// than two vertices are dropped, weights are kept.
    pub fn induced(&self, vertices: &[usize]) -> Result<Hypergraph> {
        let mut local = vec![usize::MAX; self.n_vertices];
        for (k, &v) in vertices.iter().enumerate() {
            if v >= self.n_vertices {
                return Err(Error::InvalidArgument(format!("vertex {v} out of range")));
            }
            if local[v] != usize::MAX {
                return Err(Error::InvalidArgument(format!("vertex {v} repeated")));
            }
            local[v] = k;
        }
        let mut edges = Vec::new();
        for e in &self.edges {
            let mut restricted: Vec<usize> = e
                .vertices
                .iter()
                .filter_map(|&v| (local[v] != usize::MAX).then_some(local[v]))
                .collect();
            if restricted.len() >= 2 {
                restricted.sort_unstable();
                edges.push(Hyperedge {
                    weight: e.weight,
                    vertices: restricted,
                });
            }
        }
        Ok(Self::from_validated(vertices.len(), edges))
    }
}

#[inline]
fn straddles(e: &Hyperedge, c: &Partition) -> bool {
    let first = c.contains(e.vertices[0]);
    e.vertices[1..].iter().any(|&v| c.contains(v) != first)
}

/// Two-sided partition `(C, C̄)` stored as a membership mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition(Vec<bool>);

impl Partition {
    pub fn new(membership: Vec<bool>) -> Self {
        Partition(membership)
    }

    pub fn empty(n: usize) -> Self {
        Partition(vec![false; n])
    }

    pub fn full(n: usize) -> Self {
        Partition(vec![true; n])
    }

    pub fn from_indices(n: usize, members: &[usize]) -> Result<Self> {
        let mut mask = vec![false; n];
        for &v in members {
            if v >= n {
                return Err(Error::InvalidArgument(format!("vertex {v} out of range")));
            }
            mask[v] = true;
        }
        Ok(Partition(mask))
    }

    /// Subset encoded by the low `n` bits of `bits`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Partition((0..n).map(|i| bits >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.0[v]
    }

    pub fn size(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// True when both sides are nonempty.
    pub fn is_proper(&self) -> bool {
        let k = self.size();
        k > 0 && k < self.len()
    }

    pub fn complement(&self) -> Partition {
        Partition(self.0.iter().map(|b| !b).collect())
    }

    pub fn members(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i]).collect()
    }

    pub fn indicator(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }
}

/// Undirected weighted graph stored as upper-triangular triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n_vertices: usize,
    /// `(i, j, w_ij)` with `i < j`, sorted, no duplicates.
    entries: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    /// Builds a graph from arbitrary triplets; `(i, j)` and `(j, i)` are
    /// merged, self-loops ignored.
    pub fn new(n_vertices: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut acc = BTreeMap::new();
        for &(i, j, w) in triplets {
            if i >= n_vertices || j >= n_vertices {
                return Err(Error::InvalidArgument(format!(
                    "edge ({i}, {j}) out of range"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidArgument(format!("invalid weight {w}")));
            }
            if i == j {
                continue;
            }
            *acc.entry((i.min(j), i.max(j))).or_insert(0.0) += w;
        }
        Ok(Self::from_sorted_map(n_vertices, acc))
    }

    fn from_sorted_map(n_vertices: usize, acc: BTreeMap<(usize, usize), f64>) -> Self {
        WeightedGraph {
            n_vertices,
            entries: acc.into_iter().map(|((i, j), w)| (i, j, w)).collect(),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.entries
            .binary_search_by(|&(a, b, _)| (a, b).cmp(&key))
            .map(|k| self.entries[k].2)
            .unwrap_or(0.0)
    }

    pub fn cut(&self, c: &Partition) -> Result<f64> {
        check_len(self.n_vertices, c.len())?;
        Ok(self
            .entries
            .iter()
            .filter(|&&(i, j, _)| c.contains(i) != c.contains(j))
            .map(|&(_, _, w)| w)
            .sum())
    }

    /// `½ Σ_{i,j} w_ij |f_i − f_j|^p`, each unordered pair counted once.
    pub fn p_variation(&self, f: &[f64], p: f64) -> Result<f64> {
        check_len(self.n_vertices, f.len())?;
        Ok(self
            .entries
            .iter()
            .map(|&(i, j, w)| w * (f[i] - f[j]).abs().powf(p))
            .sum())
    }
}
