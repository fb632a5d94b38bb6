//! Random instance generators and brute-force oracles shared by the
//! integration tests. Nothing here calls into the solvers it checks.

#![allow(dead_code)]

use hypertv::{Hypergraph, Partition};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random hypergraph with `n` vertices and `m` edges of size in
/// `[2, max_size]`, weights uniform in `[0.1, 2]`.
pub fn random_hypergraph(rng: &mut ChaCha8Rng, n: usize, m: usize, max_size: usize) -> Hypergraph {
    let edges: Vec<(f64, Vec<usize>)> = (0..m)
        .map(|_| {
            let k = rng.gen_range(2..=max_size.min(n));
            let verts = sample(rng, n, k).into_vec();
            (rng.gen_range(0.1..2.0), verts)
        })
        .collect();
    Hypergraph::new(n, edges).unwrap()
}

/// Random `k`-uniform hypergraph.
pub fn random_uniform(rng: &mut ChaCha8Rng, n: usize, m: usize, k: usize) -> Hypergraph {
    let edges: Vec<(f64, Vec<usize>)> = (0..m)
        .map(|_| (rng.gen_range(0.1..2.0), sample(rng, n, k).into_vec()))
        .collect();
    Hypergraph::new(n, edges).unwrap()
}

/// Random SSL label vector: each vertex labelled ±1 with probability
/// `frac`, otherwise 0.
pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, frac: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if rng.gen_bool(frac) {
                if rng.gen_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            }
        })
        .collect()
}

/// Straddling-edge cut computed from scratch.
pub fn brute_cut(h: &Hypergraph, c: &Partition) -> f64 {
    h.edges()
        .iter()
        .filter(|e| {
            let inside = e.vertices.iter().filter(|&&v| c.contains(v)).count();
            inside > 0 && inside < e.vertices.len()
        })
        .map(|e| e.weight)
        .sum()
}

/// `ratio(C)` minimized over all proper subsets by enumeration.
pub fn brute_force_min<F: Fn(&Partition) -> f64>(n: usize, ratio: F) -> (Partition, f64) {
    let mut best = (Partition::empty(n), f64::INFINITY);
    // fixing vertex n-1 outside C visits each unordered split once
    for bits in 1..(1u64 << (n - 1)) {
        let c = Partition::from_bits(n, bits);
        let v = ratio(&c);
        if v < best.1 {
            best = (c, v);
        }
    }
    best
}

/// `½‖f − y‖² + λ Σ_e w_e (max_e f − min_e f)^p`.
pub fn ssl_objective(h: &Hypergraph, y: &[f64], lambda: f64, p: f64, f: &[f64]) -> f64 {
    let fit: f64 = f.iter().zip(y).map(|(a, b)| 0.5 * (a - b).powi(2)).sum();
    let reg: f64 = h
        .edges()
        .iter()
        .map(|e| {
            let hi = e.vertices.iter().map(|&v| f[v]).fold(f64::NEG_INFINITY, f64::max);
            let lo = e.vertices.iter().map(|&v| f[v]).fold(f64::INFINITY, f64::min);
            e.weight * (hi - lo).powf(p)
        })
        .sum();
    fit + lambda * reg
}

/// Subgradient of the SSL objective at `f`.
fn ssl_subgradient(h: &Hypergraph, y: &[f64], lambda: f64, p: f64, f: &[f64], g: &mut [f64]) {
    for i in 0..f.len() {
        g[i] = f[i] - y[i];
    }
    for e in h.edges() {
        let (mut imax, mut imin) = (e.vertices[0], e.vertices[0]);
        for &v in &e.vertices {
            if f[v] > f[imax] {
                imax = v;
            }
            if f[v] < f[imin] {
                imin = v;
            }
        }
        let gap = f[imax] - f[imin];
        let scale = if p == 1.0 { 1.0 } else { 2.0 * gap };
        if imax != imin {
            g[imax] += lambda * e.weight * scale;
            g[imin] -= lambda * e.weight * scale;
        }
    }
}

/// Best objective found by a subgradient method with steps `1/(k+1+k0)`
/// (the objective is 1-strongly convex), started at `y`. For `p = 2` the
/// offset `k0` bounds the curvature of the regularizer so the early steps
/// do not blow up.
pub fn subgradient_oracle(h: &Hypergraph, y: &[f64], lambda: f64, p: f64, iters: usize) -> f64 {
    let n = y.len();
    let k0 = if p == 1.0 {
        0.0
    } else {
        4.0 * lambda * h.degrees().iter().cloned().fold(0.0, f64::max)
    };
    let mut f = y.to_vec();
    let mut g = vec![0.0; n];
    let mut best = ssl_objective(h, y, lambda, p, &f);
    for k in 0..iters {
        ssl_subgradient(h, y, lambda, p, &f, &mut g);
        let step = 1.0 / (k as f64 + 1.0 + k0);
        for i in 0..n {
            f[i] -= step * g[i];
        }
        if k % 16 == 0 || k + 1 == iters {
            best = best.min(ssl_objective(h, y, lambda, p, &f));
        }
    }
    best
}

/// `½‖x − α‖² + μ(max x − min x)²`.
pub fn maxmin_objective(alpha: &[f64], mu: f64, x: &[f64]) -> f64 {
    let fit: f64 = x.iter().zip(alpha).map(|(a, b)| 0.5 * (a - b).powi(2)).sum();
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    fit + mu * (hi - lo).powi(2)
}

fn clamp_to(alpha: &[f64], s: f64, r: f64) -> Vec<f64> {
    alpha.iter().map(|&a| a.max(s).min(r)).collect()
}

/// Best objective over candidates `clamp(α, s, r)`: the stationary levels
/// for every count `p` of entries clipped from above and `q` from below,
/// the fully collapsed point, and a zooming grid over `(r, s)`.
pub fn maxmin_prox_oracle(alpha: &[f64], mu: f64) -> f64 {
    let m = alpha.len();
    let mut sorted = alpha.to_vec();
    sorted.sort_by(f64::total_cmp);
    let eval = |s: f64, r: f64| maxmin_objective(alpha, mu, &clamp_to(alpha, s.min(r), r.max(s)));
    let mean = alpha.iter().sum::<f64>() / m as f64;
    let mut best = eval(mean, mean);
    for p in 1..m {
        for q in 1..=(m - p) {
            let a: f64 = sorted[m - p..].iter().sum();
            let b: f64 = sorted[..q].iter().sum();
            let (pf, qf) = (p as f64, q as f64);
            let d = 2.0 * mu * (a / pf - b / qf) / (1.0 + 2.0 * mu / pf + 2.0 * mu / qf);
            let r = (a - d) / pf;
            let s = (b + d) / qf;
            best = best.min(eval(s, r));
        }
    }
    let (mut lo, mut hi) = (sorted[0], sorted[m - 1]);
    let (mut s0, mut s1, mut r0, mut r1) = (lo, hi, lo, hi);
    let steps = 60;
    for _ in 0..12 {
        let mut local = (f64::INFINITY, lo, hi);
        for i in 0..=steps {
            let s = s0 + (s1 - s0) * i as f64 / steps as f64;
            for j in 0..=steps {
                let r = r0 + (r1 - r0) * j as f64 / steps as f64;
                if r < s {
                    continue;
                }
                let v = eval(s, r);
                if v < local.0 {
                    local = (v, s, r);
                }
            }
        }
        best = best.min(local.0);
        let (ws, wr) = ((s1 - s0) / steps as f64 * 2.0, (r1 - r0) / steps as f64 * 2.0);
        lo = local.1;
        hi = local.2;
        s0 = lo - ws;
        s1 = lo + ws;
        r0 = hi - wr;
        r1 = hi + wr;
    }
    best
}

/// Random prox instance: `m ∈ [2, 8]`, log-uniform `μ ∈ [0.01, 10]`, and
/// in half the cases entries drawn from a coarse grid so ties occur.
pub fn random_prox_instance(rng: &mut ChaCha8Rng) -> (Vec<f64>, f64) {
    let m = rng.gen_range(2..=8);
    let mu = 10f64.powf(rng.gen_range(-2.0..1.0));
    let tied = rng.gen_bool(0.5);
    let alpha = (0..m)
        .map(|_| {
            if tied {
                rng.gen_range(-2..=2) as f64 * 0.5
            } else {
                rng.gen_range(-3.0..3.0)
            }
        })
        .collect();
    (alpha, mu)
}
