//! Proximal maps and conjugates used by the PDHG solvers.
//!
//! Everything here works in place on caller-provided buffers so that the
//! per-edge dual updates in the solver loop do not allocate.

use crate::error::{check_len, Error, Result};

/// Reusable sort buffer for the per-edge proxes.
#[derive(Debug, Clone, Default)]
pub struct ProxScratch {
    sorted: Vec<f64>,
}

impl ProxScratch {
    pub fn with_capacity(m: usize) -> Self {
        ProxScratch {
            sorted: Vec::with_capacity(m),
        }
    }

    fn load(&mut self, v: &[f64]) -> &mut Vec<f64> {
        self.sorted.clear();
        self.sorted.extend_from_slice(v);
        &mut self.sorted
    }
}

/// Euclidean projection onto `{x ≥ 0, Σx = radius}`, in place.
pub fn project_simplex_in_place(v: &mut [f64], radius: f64, scratch: &mut ProxScratch) {
    if radius <= 0.0 {
        v.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    let u = scratch.load(v);
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &x) in u.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - radius) / (j + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

pub fn project_simplex(v: &[f64], radius: f64) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::Empty("simplex projection input"));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be > 0, got {radius}")));
    }
    let mut out = v.to_vec();
    project_simplex_in_place(&mut out, radius, &mut ProxScratch::default());
    Ok(out)
}

/// Projection onto `−S_radius`, computed as `−P_S(−v)`.
pub fn project_neg_simplex_in_place(v: &mut [f64], radius: f64, scratch: &mut ProxScratch) {
    v.iter_mut().for_each(|x| *x = -*x);
    project_simplex_in_place(v, radius, scratch);
    v.iter_mut().for_each(|x| *x = -*x);
}

pub fn project_neg_simplex(v: &[f64], radius: f64) -> Result<Vec<f64>> {
    let neg: Vec<f64> = v.iter().map(|x| -x).collect();
    Ok(project_simplex(&neg, radius)?.into_iter().map(|x| -x).collect())
}

/// Prox of `τ·½‖f − y‖²`: `(x + τy) / (1 + τ)`.
pub fn prox_ssl_data(x: &[f64], y: &[f64], tau: f64) -> Result<Vec<f64>> {
    check_len(x.len(), y.len())?;
    Ok(x.iter()
        .zip(y)
        .map(|(xi, yi)| (xi + tau * yi) / (1.0 + tau))
        .collect())
}

/// Prox of `τ(−⟨s₁, f⟩ + ι_{‖f‖≤1})`: shift by `τs₁`, then project to the
/// unit ball.
pub fn prox_ball_linear(x: &[f64], s1: &[f64], tau: f64) -> Result<Vec<f64>> {
    check_len(x.len(), s1.len())?;
    let mut out: Vec<f64> = x.iter().zip(s1).map(|(a, b)| a + tau * b).collect();
    let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1.0 {
        out.iter_mut().for_each(|v| *v /= norm);
    }
    Ok(out)
}

/// One breakpoint visited by the max/min sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepStep {
    /// Upper clamp level.
    pub upper: f64,
    /// Lower clamp level.
    pub lower: f64,
    /// `Σ_{top}(α_i − r) + 2μ(s − r)`; the sweep stops once this is ≥ 0.
    pub stationarity: f64,
}

/// Clamp levels `(r, s)` of `prox_{μh}` for `h(x) = (max x − min x)²`,
/// given `sorted` ascending and non-constant.
///
/// The top `p` entries are clamped to `r` and the bottom `q` to `s`. Along
/// the sweep the two one-sided derivatives stay equal:
/// `D = Σ_top(α_i − r) = Σ_bottom(s − α_i)`, so on a fixed `(p, q)` segment
/// `r = (A − D)/p` and `s = (B + D)/q` with `A`, `B` the top and bottom sums.
/// The optimum is the `D` with `D = 2μ(r − s)`. Tied entries join the
/// clamped sets together.
fn maxmin_levels(sorted: &[f64], mu: f64, mut trace: Option<&mut Vec<SweepStep>>) -> (f64, f64) {
    let m = sorted.len();
    let top_val = sorted[m - 1];
    let bottom_val = sorted[0];

    let mut p = sorted.iter().rev().take_while(|&&x| x == top_val).count();
    let mut q = sorted.iter().take_while(|&&x| x == bottom_val).count();
    let mut top_sum = top_val * p as f64;
    let mut bottom_sum = bottom_val * q as f64;
    let mut r = top_val;
    let mut s = bottom_val;
    let mut d = 0.0;

    loop {
        if let Some(t) = trace.as_deref_mut() {
            t.push(SweepStep {
                upper: r,
                lower: s,
                stationarity: d + 2.0 * mu * (s - r),
            });
        }
        let (pf, qf) = (p as f64, q as f64);
        let d_star = 2.0 * mu * (top_sum / pf - bottom_sum / qf)
            / (1.0 + 2.0 * mu / pf + 2.0 * mu / qf);

        if q + p >= m {
            return ((top_sum - d_star) / pf, (bottom_sum + d_star) / qf);
        }
        let next_upper = sorted[m - p - 1];
        let next_lower = sorted[q];
        let d_upper = top_sum - pf * next_upper;
        let d_lower = qf * next_lower - bottom_sum;
        let d_next = d_upper.min(d_lower);
        if d_star <= d_next {
            return ((top_sum - d_star) / pf, (bottom_sum + d_star) / qf);
        }

        d = d_next;
        r = (top_sum - d) / pf;
        s = (bottom_sum + d) / qf;
        if d_upper <= d_lower {
            r = next_upper;
            while q + p < m && sorted[m - p - 1] == next_upper {
                top_sum += next_upper;
                p += 1;
            }
        }
        if d_lower <= d_upper {
            s = next_lower;
            while q + p < m && sorted[q] == next_lower {
                bottom_sum += next_lower;
                q += 1;
            }
        }
    }
}

/// `prox_{μh}(α)` for `h(x) = (max x − min x)²`, in place.
pub fn prox_maxmin_sq_in_place(alpha: &mut [f64], mu: f64, scratch: &mut ProxScratch) {
    if alpha.len() < 2 {
        return;
    }
    let sorted = scratch.load(alpha);
    sorted.sort_unstable_by(f64::total_cmp);
    if sorted[0] == sorted[sorted.len() - 1] {
        return;
    }
    let (r, s) = maxmin_levels(sorted, mu, None);
    for x in alpha.iter_mut() {
        *x = x.max(s).min(r);
    }
}

/// Minimizer of `½‖x − α‖² + μ(max x − min x)²`.
pub fn prox_maxmin_sq(alpha: &[f64], mu: f64, scratch: &mut ProxScratch) -> Result<Vec<f64>> {
    if alpha.is_empty() {
        return Err(Error::Empty("prox input"));
    }
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!("mu must be > 0, got {mu}")));
    }
    let mut out = alpha.to_vec();
    prox_maxmin_sq_in_place(&mut out, mu, scratch);
    Ok(out)
}

/// Like [`prox_maxmin_sq`] but also returns the breakpoints visited by the
/// sweep (empty for constant input).
pub fn prox_maxmin_sq_traced(alpha: &[f64], mu: f64) -> Result<(Vec<f64>, Vec<SweepStep>)> {
    if alpha.is_empty() {
        return Err(Error::Empty("prox input"));
    }
    let mut sorted = alpha.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut trace = Vec::new();
    if sorted[0] == sorted[sorted.len() - 1] {
        return Ok((alpha.to_vec(), trace));
    }
    let (r, s) = maxmin_levels(&sorted, mu, Some(&mut trace));
    Ok((alpha.iter().map(|x| x.max(s).min(r)).collect(), trace))
}

/// `prox_{σF*_e}(α̃) = α̃ − prox_{F_e/σ}(α̃)` with `F_e = λw_e h`, in place.
pub fn prox_conjugate_in_place(alpha: &mut [f64], mu: f64, scratch: &mut ProxScratch) {
    if alpha.len() < 2 {
        // F_e vanishes on singletons, so F*_e is the indicator of {0}.
        alpha.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    let sorted = scratch.load(alpha);
    sorted.sort_unstable_by(f64::total_cmp);
    let m = sorted.len();
    if sorted[0] == sorted[m - 1] {
        alpha.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    let (r, s) = maxmin_levels(sorted, mu, None);
    for x in alpha.iter_mut() {
        *x -= x.max(s).min(r);
    }
}

pub fn prox_conjugate_via_moreau(
    alpha: &[f64],
    sigma: f64,
    edge_weight: f64,
    lambda: f64,
    scratch: &mut ProxScratch,
) -> Result<Vec<f64>> {
    if alpha.is_empty() {
        return Err(Error::Empty("prox input"));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be > 0, got {sigma}")));
    }
    let mut out = alpha.to_vec();
    prox_conjugate_in_place(&mut out, lambda * edge_weight / sigma, scratch);
    Ok(out)
}

/// Zero-sum tolerance used when deciding whether a dual block lies in the
/// domain of `h*`.
fn zero_sum_tol(alpha: &[f64]) -> f64 {
    1e-9 * alpha.iter().map(|x| x.abs()).sum::<f64>().max(1.0)
}

/// Conjugate of `h(x) = (max x − min x)²`: `t₊²/4` on zero-sum vectors,
/// `+∞` elsewhere.
pub fn h_star(alpha: &[f64]) -> f64 {
    let total: f64 = alpha.iter().sum();
    if total.abs() > zero_sum_tol(alpha) {
        return f64::INFINITY;
    }
    let t_plus: f64 = alpha.iter().filter(|&&x| x > 0.0).sum();
    0.25 * t_plus * t_plus
}

/// `F*_e(α) = λw_e h*(α/(λw_e)) = t₊²/(4λw_e)` on zero-sum vectors.
pub fn edge_conjugate(alpha: &[f64], scaled_weight: f64) -> f64 {
    let total: f64 = alpha.iter().sum();
    if total.abs() > zero_sum_tol(alpha) {
        return f64::INFINITY;
    }
    if scaled_weight == 0.0 {
        return if alpha.iter().all(|&x| x == 0.0) {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let t_plus: f64 = alpha.iter().filter(|&&x| x > 0.0).sum();
    t_plus * t_plus / (4.0 * scaled_weight)
}
