//! Gauss-Laguerre and Gauss-Hermite rules.
//!
//! Nodes are the eigenvalues of the Jacobi matrix of the weight's
//! three-term recurrence (Golub-Welsch), polished by Newton steps on the
//! orthonormal polynomial. Weights come from the Christoffel numbers
//! `1 / Σ_k p_k(x)²` rather than eigenvector components, which keeps the tiny
//! tail weights accurate to full relative precision.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{domain, Error, Result};

pub const MAX_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleKind {
    /// `∫_0^∞ f(x) e^{-x} dx`
    Laguerre,
    /// `∫_{-∞}^∞ f(x) e^{-x²} dx`
    Hermite,
}

impl RuleKind {
    /// Total mass of the weight function.
    pub fn mass(self) -> f64 {
        match self {
            RuleKind::Laguerre => 1.0,
            RuleKind::Hermite => PI.sqrt(),
        }
    }

    /// Diagonal `a_k` and off-diagonal `b_k` (k ≥ 1) recurrence coefficients
    /// of the monic orthogonal polynomials, with `b_k` already square-rooted.
    fn jacobi(self, order: usize) -> (Vec<f64>, Vec<f64>) {
        match self {
            RuleKind::Laguerre => (
                (0..order).map(|k| (2 * k + 1) as f64).collect(),
                (1..order).map(|k| k as f64).collect(),
            ),
            RuleKind::Hermite => (
                vec![0.0; order],
                (1..order).map(|k| (k as f64 / 2.0).sqrt()).collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    kind: RuleKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `Σ wᵢ f(xᵢ)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Builds the `order`-point rule of the given kind.
pub fn make_rule(kind: RuleKind, order: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(domain(
            "make_rule",
            format!("order must be in 1..={MAX_ORDER}, got {order}"),
        ));
    }
    let (diag, off) = kind.jacobi(order);
    let mut nodes = symmetric_tridiagonal_eigenvalues(&diag, &off)?;
    nodes.sort_by(|a, b| a.total_cmp(b));

    let mass = kind.mass();
    let mut weights = Vec::with_capacity(order);
    for x in nodes.iter_mut() {
        *x = newton_polish(*x, &diag, &off, mass);
        let (_, _, sum_sq) = orthonormal_eval(*x, &diag, &off, mass);
        weights.push(1.0 / sum_sq);
    }
    if kind == RuleKind::Hermite {
        symmetrize(&mut nodes, &mut weights);
    }
    Ok(QuadratureRule {
        kind,
        nodes,
        weights,
    })
}

type RuleCache = Mutex<HashMap<(RuleKind, usize), Arc<QuadratureRule>>>;

/// Shared, lazily built rule. Rules are immutable so one copy per
/// `(kind, order)` serves every caller.
pub fn cached_rule(kind: RuleKind, order: usize) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache
        .lock()
        .expect("rule cache poisoned")
        .get(&(kind, order))
    {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(make_rule(kind, order)?);
    cache
        .lock()
        .expect("rule cache poisoned")
        .entry((kind, order))
        .or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}

/// Evaluates the orthonormal polynomials at `x` and returns
/// `(p_n(x), p_n'(x), Σ_{k<n} p_k(x)²)`.
fn orthonormal_eval(x: f64, diag: &[f64], off: &[f64], mass: f64) -> (f64, f64, f64) {
    let n = diag.len();
    let mut p_prev = 0.0;
    let mut dp_prev = 0.0;
    let mut p = 1.0 / mass.sqrt();
    let mut dp = 0.0;
    let mut sum_sq = 0.0;
    for k in 0..n {
        sum_sq += p * p;
        let b_prev = if k == 0 { 0.0 } else { off[k - 1] };
        // The last step needs b_n, which the truncated Jacobi matrix lacks;
        // any positive value leaves the zeros of p_n unchanged.
        let b_next = if k + 1 < n { off[k] } else { 1.0 };
        let p_next = ((x - diag[k]) * p - b_prev * p_prev) / b_next;
        let dp_next = ((x - diag[k]) * dp + p - b_prev * dp_prev) / b_next;
        p_prev = p;
        dp_prev = dp;
        p = p_next;
        dp = dp_next;
    }
    (p, dp, sum_sq)
}

fn newton_polish(mut x: f64, diag: &[f64], off: &[f64], mass: f64) -> f64 {
    for _ in 0..8 {
        let (p, dp, _) = orthonormal_eval(x, diag, off, mass);
        if dp == 0.0 || !dp.is_finite() {
            break;
        }
        let step = p / dp;
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Hermite nodes come in ± pairs; average each pair so the rule is exactly
/// symmetric and odd moments vanish.
fn symmetrize(nodes: &mut [f64], weights: &mut [f64]) {
    let n = nodes.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag`
/// and off-diagonal `off`, by implicit QL iterations with Wilkinson shifts.
fn symmetric_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::Solver(
                    "tridiagonal eigenvalue iteration did not converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}
