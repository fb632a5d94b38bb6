//! Set functions and their Lovász extensions.
//!
//! For `f` sorted ascending along the permutation `order`, the level sets are
//! the suffixes `C_k = {order[k], …, order[n-1]}`, so `C_0 = V` and
//! `C_n = ∅`. Ties in `f` are broken by ascending vertex id. The extension
//! value does not depend on how ties are broken; the subgradient does, but
//! every tie order produces a valid subgradient when the set function is
//! submodular.

use crate::error::{check_len, Result};
use crate::hypergraph::{Hypergraph, Partition};

pub trait SetFunction {
    /// Size of the ground set.
    fn ground_size(&self) -> usize;

    /// `Ŝ(C)`. Must satisfy `Ŝ(∅) = 0`.
    fn value(&self, c: &Partition) -> f64;

    /// `[Ŝ(C_0), …, Ŝ(C_n)]` for the suffix sets of `order`.
    ///
    /// The default rebuilds each set; implementors override this with an
    /// incremental sweep.
    fn suffix_values(&self, order: &[usize]) -> Vec<f64> {
        let n = order.len();
        let mut mask = vec![false; n];
        let mut out = vec![0.0; n + 1];
        out[n] = self.value(&Partition::new(mask.clone()));
        for k in (0..n).rev() {
            mask[order[k]] = true;
            out[k] = self.value(&Partition::new(mask.clone()));
        }
        out
    }
}

/// Permutation sorting `f` ascending, ties by vertex id.
pub fn ascending_order(f: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    order
}

pub fn lovasz_extension<S: SetFunction + ?Sized>(s: &S, f: &[f64]) -> Result<f64> {
    check_len(s.ground_size(), f.len())?;
    if f.is_empty() {
        return Ok(0.0);
    }
    let order = ascending_order(f);
    let vals = s.suffix_values(&order);
    let mut total = f[order[0]] * vals[0];
    for k in 1..order.len() {
        total += vals[k] * (f[order[k]] - f[order[k - 1]]);
    }
    Ok(total)
}

/// `g` with `g[order[k]] = Ŝ(C_k) − Ŝ(C_{k+1})`, so `⟨g, f⟩` equals the
/// extension at `f`.
pub fn lovasz_subgradient<S: SetFunction + ?Sized>(s: &S, f: &[f64]) -> Result<Vec<f64>> {
    check_len(s.ground_size(), f.len())?;
    let order = ascending_order(f);
    let vals = s.suffix_values(&order);
    let mut g = vec![0.0; f.len()];
    for (k, &v) in order.iter().enumerate() {
        g[v] = vals[k] - vals[k + 1];
    }
    Ok(g)
}

/// Set function backed by a closure over membership masks.
pub struct FnSetFunction<F> {
    n: usize,
    eval: F,
}

impl<F: Fn(&Partition) -> f64> FnSetFunction<F> {
    pub fn new(n: usize, eval: F) -> Self {
        FnSetFunction { n, eval }
    }
}

impl<F: Fn(&Partition) -> f64> SetFunction for FnSetFunction<F> {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, c: &Partition) -> f64 {
        (self.eval)(c)
    }
}

/// The hypergraph cut `C ↦ cut_H(C, C̄)`; its extension is `TV_H`.
impl SetFunction for Hypergraph {
    fn ground_size(&self) -> usize {
        self.n_vertices()
    }

    fn value(&self, c: &Partition) -> f64 {
        self.cut(c).expect("partition length checked by caller")
    }

    fn suffix_values(&self, order: &[usize]) -> Vec<f64> {
        let n = order.len();
        let mut inside = vec![0usize; self.n_edges()];
        let mut out = vec![0.0; n + 1];
        let mut cut = 0.0;
        for k in (0..n).rev() {
            for &e in self.incident_edges(order[k]) {
                let edge = &self.edges()[e];
                let before = inside[e];
                inside[e] += 1;
                if before == 0 && edge.len() > 1 {
                    cut += edge.weight;
                }
                if inside[e] == edge.len() && edge.len() > 1 {
                    cut -= edge.weight;
                }
            }
            out[k] = cut;
        }
        out[0] = 0.0;
        out
    }
}
