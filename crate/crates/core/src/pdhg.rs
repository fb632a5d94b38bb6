//! Primal-dual hybrid gradient solvers for `min_f G(f) + λ Ω_{H,p}(f)`,
//! `p ∈ {1, 2}`.
//!
//! `K` is never formed: `K_e f` gathers `f` over the vertices of `e` and
//! `K_eᵀ α` scatter-adds a dual block back onto those vertices. Scatter-adds
//! run in edge order, so a solve is bit-reproducible.
//!
//! For `p = 1` every edge carries two dual blocks, one in the scaled simplex
//! `S_{λw_e}` (dual to `λw_e max`) and one in `−S_{λw_e}` (dual to
//! `−λw_e min`). For `p = 2` each edge carries one block, updated through the
//! Moreau identity with the max/min prox.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::hypergraph::Hypergraph;
use crate::prox::{
    edge_conjugate, project_neg_simplex_in_place, project_simplex_in_place,
    prox_conjugate_in_place, ProxScratch,
};

/// Which `Ω_{H,p}` regularizer a solve uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Power {
    One,
    Two,
}

impl Power {
    pub fn exponent(self) -> f64 {
        match self {
            Power::One => 1.0,
            Power::Two => 2.0,
        }
    }

    pub fn from_exponent(p: u32) -> Result<Self> {
        match p {
            1 => Ok(Power::One),
            2 => Ok(Power::Two),
            _ => Err(Error::InvalidArgument(format!("p must be 1 or 2, got {p}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PdhgConfig {
    /// Extrapolation weight in `[0, 1]`.
    pub theta: f64,
    /// Dual step; `None` means `0.99/‖K‖`.
    pub sigma: Option<f64>,
    /// Primal step; `None` means `0.99/‖K‖`.
    pub tau: Option<f64>,
    /// Relative duality gap tolerance.
    pub epsilon: f64,
    pub max_iters: usize,
    pub gap_check_stride: usize,
}

impl Default for PdhgConfig {
    fn default() -> Self {
        PdhgConfig {
            theta: 1.0,
            sigma: None,
            tau: None,
            epsilon: 1e-6,
            max_iters: 100_000,
            gap_check_stride: 10,
        }
    }
}

impl PdhgConfig {
    /// Resolved `(σ, τ)` for a given `‖K‖²`.
    pub fn step_sizes(&self, norm_sq: f64) -> Result<(f64, f64)> {
        let default = 0.99 / norm_sq.sqrt();
        let sigma = self.sigma.unwrap_or(default);
        let tau = self.tau.unwrap_or(default);
        if !(sigma > 0.0 && tau > 0.0) {
            return Err(Error::InvalidArgument("step sizes must be positive".into()));
        }
        if sigma * tau * norm_sq >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "step sizes violate sigma*tau < 1/|K|^2 ({sigma} * {tau} * {norm_sq} >= 1)"
            )));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::InvalidArgument(format!(
                "theta must lie in [0, 1], got {}",
                self.theta
            )));
        }
        Ok((sigma, tau))
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument("epsilon must be > 0".into()));
        }
        if self.gap_check_stride == 0 {
            return Err(Error::InvalidArgument("gap_check_stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// `‖K‖²`: `2·max_i c_i` for `p = 1`, `max_i c_i` for `p = 2`.
pub fn operator_norm_bound(h: &Hypergraph, power: Power) -> Result<f64> {
    let c = h.max_incidence_count();
    if h.n_edges() == 0 || c == 0 {
        return Err(Error::NoEdges);
    }
    Ok(match power {
        Power::One => 2.0 * c as f64,
        Power::Two => c as f64,
    })
}

/// The separable data term `G`.
#[derive(Debug, Clone, PartialEq)]
pub enum DataTerm {
    /// `G(f) = ½‖f − y‖²`.
    Ssl { y: Vec<f64> },
    /// `G(f) = −⟨s₁, f⟩ + ι_{‖f‖₂ ≤ 1}`.
    BallLinear { s1: Vec<f64> },
}

impl DataTerm {
    pub fn len(&self) -> usize {
        match self {
            DataTerm::Ssl { y } => y.len(),
            DataTerm::BallLinear { s1 } => s1.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `prox_{τG}` applied in place.
    pub fn prox_in_place(&self, x: &mut [f64], tau: f64) {
        match self {
            DataTerm::Ssl { y } => {
                let scale = 1.0 / (1.0 + tau);
                for (xi, yi) in x.iter_mut().zip(y) {
                    *xi = (*xi + tau * yi) * scale;
                }
            }
            DataTerm::BallLinear { s1 } => {
                for (xi, si) in x.iter_mut().zip(s1) {
                    *xi += tau * si;
                }
                let norm = norm2(x);
                if norm > 1.0 {
                    x.iter_mut().for_each(|v| *v /= norm);
                }
            }
        }
    }

    /// `G(f)`; `+∞` outside the ball for the constrained variant.
    pub fn value(&self, f: &[f64]) -> f64 {
        match self {
            DataTerm::Ssl { y } => 0.5 * f.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>(),
            DataTerm::BallLinear { s1 } => {
                if norm2(f) > 1.0 + 1e-9 {
                    return f64::INFINITY;
                }
                -dot(s1, f)
            }
        }
    }

    /// `G*(x)`.
    pub fn conjugate(&self, x: &[f64]) -> f64 {
        match self {
            DataTerm::Ssl { y } => {
                let shifted: f64 = x.iter().zip(y).map(|(a, b)| (a + b).powi(2)).sum();
                let base: f64 = y.iter().map(|b| b * b).sum();
                0.5 * shifted - 0.5 * base
            }
            DataTerm::BallLinear { s1 } => x
                .iter()
                .zip(s1)
                .map(|(a, b)| (a + b).powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Primal iterate, extrapolation and dual blocks of a solve.
///
/// Dual blocks are stored flat: edge `e` owns `offsets[e]..offsets[e+1]`.
/// `upper` holds the `max` duals for `p = 1` and the single block for
/// `p = 2`; `lower` holds the `min` duals and is empty for `p = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PdhgState {
    pub power: Power,
    pub f: Vec<f64>,
    pub f_bar: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub offsets: Vec<usize>,
    pub iterations: usize,
}

impl PdhgState {
    /// `f = f̄ = 0`, zero duals.
    pub fn new(h: &Hypergraph, power: Power) -> Self {
        let mut offsets = Vec::with_capacity(h.n_edges() + 1);
        offsets.push(0);
        for e in h.edges() {
            offsets.push(offsets.last().unwrap() + e.len());
        }
        let total = *offsets.last().unwrap();
        PdhgState {
            power,
            f: vec![0.0; h.n_vertices()],
            f_bar: vec![0.0; h.n_vertices()],
            upper: vec![0.0; total],
            lower: match power {
                Power::One => vec![0.0; total],
                Power::Two => Vec::new(),
            },
            offsets,
            iterations: 0,
        }
    }

    /// Restarts the primal at `f` (with `f̄ = f`) keeping the duals.
    pub fn warm_start(&mut self, f: &[f64]) {
        self.f.copy_from_slice(f);
        self.f_bar.copy_from_slice(f);
    }

    fn check_shape(&self, h: &Hypergraph, power: Power) -> Result<()> {
        if self.power != power {
            return Err(Error::InvalidArgument("state built for a different p".into()));
        }
        check_len(h.n_vertices(), self.f.len())?;
        check_len(h.total_cardinality(), self.upper.len())?;
        Ok(())
    }

    /// `Σ_e K_eᵀ(α^{(e,1)} + α^{(e,2)})` (or `Σ_e K_eᵀα^e`) into `out`.
    fn adjoint_into(&self, h: &Hypergraph, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (e, edge) in h.edges().iter().enumerate() {
            let off = self.offsets[e];
            for (k, &v) in edge.vertices.iter().enumerate() {
                out[v] += self.upper[off + k];
                if self.power == Power::One {
                    out[v] += self.lower[off + k];
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub f: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    pub rel_gap: f64,
    #[serde(rename = "iters")]
    pub iterations: usize,
    pub seconds: f64,
    pub converged: bool,
}

/// Primal value, dual value and relative gap of a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEstimate {
    pub primal: f64,
    pub dual: f64,
    pub rel_gap: f64,
}

/// Evaluates the duality gap at `state`.
///
/// The dual point is `−Σ_e K_eᵀα`. For `p = 1` the blocks must lie in
/// `±S_{λw_e}` (checked to `1e-9`, otherwise the dual is `−∞`). For `p = 2`
/// each block is first mean-centered so `F*_e` is finite.
pub fn duality_gap(
    h: &Hypergraph,
    data: &DataTerm,
    lambda: f64,
    state: &PdhgState,
) -> Result<GapEstimate> {
    check_len(h.n_vertices(), data.len())?;
    state.check_shape(h, state.power)?;
    let mut adj = vec![0.0; h.n_vertices()];
    let mut conj_sum = 0.0;
    match state.power {
        Power::One => {
            state.adjoint_into(h, &mut adj);
            for (e, edge) in h.edges().iter().enumerate() {
                let radius = lambda * edge.weight;
                let tol = 1e-9 * radius.max(1.0);
                let range = state.offsets[e]..state.offsets[e + 1];
                let up = &state.upper[range.clone()];
                let lo = &state.lower[range];
                let feasible = (up.iter().sum::<f64>() - radius).abs() <= tol
                    && (lo.iter().sum::<f64>() + radius).abs() <= tol
                    && up.iter().all(|&x| x >= -tol)
                    && lo.iter().all(|&x| x <= tol);
                if !feasible {
                    conj_sum = f64::INFINITY;
                    break;
                }
            }
        }
        Power::Two => {
            let mut block = Vec::new();
            for (e, edge) in h.edges().iter().enumerate() {
                let range = state.offsets[e]..state.offsets[e + 1];
                block.clear();
                block.extend_from_slice(&state.upper[range]);
                let mean = block.iter().sum::<f64>() / block.len() as f64;
                block.iter_mut().for_each(|x| *x -= mean);
                for (k, &v) in edge.vertices.iter().enumerate() {
                    adj[v] += block[k];
                }
                if block.len() < 2 {
                    // centered singleton block is exactly zero
                    continue;
                }
                conj_sum += edge_conjugate(&block, lambda * edge.weight);
            }
        }
    }
    adj.iter_mut().for_each(|x| *x = -*x);
    let primal = data.value(&state.f) + lambda * h.omega(&state.f, state.power.exponent())?;
    let dual = -(data.conjugate(&adj) + conj_sum);
    let rel_gap = relative_gap(primal, dual);
    Ok(GapEstimate {
        primal,
        dual,
        rel_gap,
    })
}

fn relative_gap(primal: f64, dual: f64) -> f64 {
    if !dual.is_finite() || !primal.is_finite() {
        return f64::INFINITY;
    }
    let gap = primal - dual;
    if gap <= 0.0 {
        return 0.0;
    }
    gap / primal.abs().max(f64::EPSILON)
}

/// PDHG on `G(f) + λΩ_{H,1}(f)` from a zero start.
pub fn solve_omega1(
    h: &Hypergraph,
    data: &DataTerm,
    lambda: f64,
    cfg: &PdhgConfig,
) -> Result<SolveReport> {
    let mut state = PdhgState::new(h, Power::One);
    solve_with_state(h, data, lambda, cfg, &mut state)
}

/// PDHG on `G(f) + λΩ_{H,2}(f)` from a zero start.
pub fn solve_omega2(
    h: &Hypergraph,
    data: &DataTerm,
    lambda: f64,
    cfg: &PdhgConfig,
) -> Result<SolveReport> {
    let mut state = PdhgState::new(h, Power::Two);
    solve_with_state(h, data, lambda, cfg, &mut state)
}

pub fn solve(
    h: &Hypergraph,
    data: &DataTerm,
    lambda: f64,
    power: Power,
    cfg: &PdhgConfig,
) -> Result<SolveReport> {
    let mut state = PdhgState::new(h, power);
    solve_with_state(h, data, lambda, cfg, &mut state)
}

/// Runs PDHG from `state` until the relative gap drops below `cfg.epsilon`
/// or `cfg.max_iters` is reached. On non-convergence the iterate with the
/// smallest observed gap is reported and `converged` is false.
pub fn solve_with_state(
    h: &Hypergraph,
    data: &DataTerm,
    lambda: f64,
    cfg: &PdhgConfig,
    state: &mut PdhgState,
) -> Result<SolveReport> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must be > 0, got {lambda}")));
    }
    cfg.validate()?;
    check_len(h.n_vertices(), data.len())?;
    let power = state.power;
    state.check_shape(h, power)?;
    let norm_sq = operator_norm_bound(h, power)?;
    let (sigma, tau) = cfg.step_sizes(norm_sq)?;
    let start = Instant::now();

    let scaled: Vec<f64> = h.edges().iter().map(|e| lambda * e.weight).collect();
    let mut scratch = ProxScratch::with_capacity(h.max_edge_cardinality());
    let mut adj = vec![0.0; h.n_vertices()];
    let mut f_prev = vec![0.0; h.n_vertices()];

    let mut best = duality_gap(h, data, lambda, state)?;
    let mut best_f = state.f.clone();
    let mut converged = best.rel_gap < cfg.epsilon && state.iterations > 0;
    let mut last = best;

    let mut iter = 0;
    while !converged && iter < cfg.max_iters {
        // dual ascent on every edge block
        for (e, edge) in h.edges().iter().enumerate() {
            let range = state.offsets[e]..state.offsets[e + 1];
            match power {
                Power::One => {
                    let up = &mut state.upper[range.clone()];
                    for (a, &v) in up.iter_mut().zip(&edge.vertices) {
                        *a += sigma * state.f_bar[v];
                    }
                    project_simplex_in_place(up, scaled[e], &mut scratch);
                    let lo = &mut state.lower[range];
                    for (a, &v) in lo.iter_mut().zip(&edge.vertices) {
                        *a += sigma * state.f_bar[v];
                    }
                    project_neg_simplex_in_place(lo, scaled[e], &mut scratch);
                }
                Power::Two => {
                    let block = &mut state.upper[range];
                    for (a, &v) in block.iter_mut().zip(&edge.vertices) {
                        *a += sigma * state.f_bar[v];
                    }
                    prox_conjugate_in_place(block, scaled[e] / sigma, &mut scratch);
                }
            }
        }

        // primal descent and extrapolation
        state.adjoint_into(h, &mut adj);
        f_prev.copy_from_slice(&state.f);
        for (fi, gi) in state.f.iter_mut().zip(&adj) {
            *fi -= tau * gi;
        }
        data.prox_in_place(&mut state.f, tau);
        for ((fb, fi), fp) in state.f_bar.iter_mut().zip(&state.f).zip(&f_prev) {
            *fb = fi + cfg.theta * (fi - fp);
        }

        iter += 1;
        state.iterations += 1;
        if iter % cfg.gap_check_stride == 0 || iter == cfg.max_iters {
            last = duality_gap(h, data, lambda, state)?;
            if last.rel_gap <= best.rel_gap || !best.rel_gap.is_finite() {
                best = last;
                best_f.copy_from_slice(&state.f);
            }
            converged = last.rel_gap < cfg.epsilon;
        }
    }

    let (f, est) = if converged {
        (state.f.clone(), last)
    } else {
        (best_f, best)
    };
    Ok(SolveReport {
        f,
        objective: est.primal,
        dual_objective: est.dual,
        rel_gap: est.rel_gap,
        iterations: iter,
        seconds: start.elapsed().as_secs_f64(),
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn running_example() -> Hypergraph {
        Hypergraph::new(4, vec![(1.0, vec![0, 1, 2]), (2.0, vec![2, 3])]).unwrap()
    }

    /// The gap bounds `½‖f − f*‖²`, so pointwise checks need a tight gap.
    fn tight() -> PdhgConfig {
        PdhgConfig {
            epsilon: 1e-13,
            ..PdhgConfig::default()
        }
    }

    #[test]
    fn operator_norm_examples() {
        let h = running_example();
        assert_eq!(operator_norm_bound(&h, Power::One).unwrap(), 4.0);
        assert_eq!(operator_norm_bound(&h, Power::Two).unwrap(), 2.0);
        let single = Hypergraph::new(2, vec![(1.0, vec![0, 1])]).unwrap();
        assert_eq!(operator_norm_bound(&single, Power::Two).unwrap(), 1.0);
        let empty = Hypergraph::new(3, Vec::new()).unwrap();
        assert_eq!(operator_norm_bound(&empty, Power::One), Err(Error::NoEdges));
    }

    #[test]
    fn step_sizes_respect_bound() {
        let cfg = PdhgConfig::default();
        let (s, t) = cfg.step_sizes(4.0).unwrap();
        assert!(s * t * 4.0 < 1.0);
        let bad = PdhgConfig {
            sigma: Some(1.0),
            tau: Some(1.0),
            ..PdhgConfig::default()
        };
        assert!(bad.step_sizes(4.0).is_err());
    }

    #[test]
    fn tiny_lambda_reproduces_labels() {
        let h = running_example();
        let y = vec![1.0, 0.0, -1.0, 1.0];
        let data = DataTerm::Ssl { y: y.clone() };
        for power in [Power::One, Power::Two] {
            let r = solve(&h, &data, 1e-12, power, &tight()).unwrap();
            for (a, b) in r.f.iter().zip(&y) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn strong_total_variation_forces_consensus() {
        let h = Hypergraph::new(2, vec![(1.0, vec![0, 1])]).unwrap();
        let data = DataTerm::Ssl { y: vec![1.0, -1.0] };
        let r = solve_omega1(&h, &data, 2.0, &tight()).unwrap();
        assert!(r.converged);
        assert!(r.f[0].abs() < 1e-6 && r.f[1].abs() < 1e-6);
    }

    #[test]
    fn quadratic_consensus_two_vertices() {
        // ½Σ(f_i − y_i)² + 0.5(f_0 − f_1)²: stationarity gives
        // [[2, −1], [−1, 2]] f = (1, −1), so f = (1/3, −1/3).
        let h = Hypergraph::new(2, vec![(1.0, vec![0, 1])]).unwrap();
        let data = DataTerm::Ssl { y: vec![1.0, -1.0] };
        let r = solve_omega2(&h, &data, 0.5, &tight()).unwrap();
        assert!(r.converged, "{r:?}");
        assert!((r.f[0] - 1.0 / 3.0).abs() < 1e-5);
        assert!((r.f[1] + 1.0 / 3.0).abs() < 1e-5);
    }

    #[test]
    fn weak_duality_at_zero_state() {
        let h = running_example();
        let data = DataTerm::Ssl { y: vec![1.0, 0.0, 0.0, -1.0] };
        for power in [Power::One, Power::Two] {
            let state = PdhgState::new(&h, power);
            let g = duality_gap(&h, &data, 0.3, &state).unwrap();
            assert!(g.primal >= g.dual - 1e-12);
        }
    }

    #[test]
    fn analytic_pair_has_zero_gap() {
        // Single edge {0,1}, w = 1, y = (1, −1), λ = 0.5, p = 2.
        // Primal optimum f = (1/3, −1/3); optimal dual block α = y − f.
        let h = Hypergraph::new(2, vec![(1.0, vec![0, 1])]).unwrap();
        let data = DataTerm::Ssl { y: vec![1.0, -1.0] };
        let mut state = PdhgState::new(&h, Power::Two);
        state.f = vec![1.0 / 3.0, -1.0 / 3.0];
        state.upper = vec![2.0 / 3.0, -2.0 / 3.0];
        let g = duality_gap(&h, &data, 0.5, &state).unwrap();
        assert!((g.primal - g.dual).abs() < 1e-10, "{g:?}");

        // Same instance, p = 1, λ = 2: optimum f = 0 and
        // Kᵀ(α_up + α_lo) = y − f = (1, −1) with α_up = (2, 0), α_lo = (−1, −1).
        let mut state = PdhgState::new(&h, Power::One);
        state.f = vec![0.0, 0.0];
        state.upper = vec![2.0, 0.0];
        state.lower = vec![-1.0, -1.0];
        let g = duality_gap(&h, &data, 2.0, &state).unwrap();
        assert!((g.primal - g.dual).abs() < 1e-10, "{g:?}");
    }

    #[test]
    fn p1_duals_stay_feasible() {
        let h = running_example();
        let data = DataTerm::Ssl { y: vec![1.0, 0.0, 0.0, -1.0] };
        let lambda = 0.4;
        let cfg = PdhgConfig {
            max_iters: 50,
            ..PdhgConfig::default()
        };
        let mut state = PdhgState::new(&h, Power::One);
        solve_with_state(&h, &data, lambda, &cfg, &mut state).unwrap();
        for (e, edge) in h.edges().iter().enumerate() {
            let r = state.offsets[e]..state.offsets[e + 1];
            let up: f64 = state.upper[r.clone()].iter().sum();
            let lo: f64 = state.lower[r.clone()].iter().sum();
            assert!((up - lambda * edge.weight).abs() < 1e-10);
            assert!((lo + lambda * edge.weight).abs() < 1e-10);
            assert!(state.upper[r.clone()].iter().all(|&x| x >= 0.0));
            assert!(state.lower[r].iter().all(|&x| x <= 0.0));
        }
    }

    #[test]
    fn report_serializes_expected_keys() {
        let h = running_example();
        let data = DataTerm::Ssl { y: vec![1.0, 0.0, 0.0, -1.0] };
        let r = solve_omega2(&h, &data, 0.1, &PdhgConfig::default()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            ["converged", "dual_objective", "iters", "objective", "rel_gap", "seconds"]
        );
    }

    #[test]
    fn rejects_bad_lambda() {
        let h = running_example();
        let data = DataTerm::Ssl { y: vec![0.0; 4] };
        assert!(solve_omega1(&h, &data, 0.0, &PdhgConfig::default()).is_err());
    }
}
