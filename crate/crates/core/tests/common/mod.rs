//! Independent reference computations for the integration tests.
//!
//! The oracles rebuild every lognormal parameter from the raw scenario
//! fields and integrate the dominant-interferer integrands directly with
//! adaptive Gauss-Kronrod quadrature, sharing no code with the library's
//! closed forms beyond the interferer power law.
#![allow(dead_code, clippy::excessive_precision)]

use std::f64::consts::{LN_10, PI};

use femtoshare_core::{BoundContext, NetworkParams};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive Gauss-Kronrod 7/15 on `[a, b]`, splitting the interval
/// with the largest error estimate until the total falls below `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    for _ in 0..5000 {
        let total_err: f64 = parts.iter().map(|p| p.3).sum();
        if total_err <= abs_tol {
            break;
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    parts.iter().map(|p| p.2).sum()
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

const Z: f64 = LN_10 / 10.0;
/// Gaussian tails beyond this many standard deviations are dropped.
const CUT: f64 = 10.0;

fn ln_mw(dbm: f64) -> f64 {
    Z * dbm
}

/// `(loc, scale)` of the lognormal fit to Rayleigh fading times shadowing.
fn fit(mu_db: f64, sigma_db: f64) -> (f64, f64) {
    (
        Z * (mu_db - 2.5),
        Z * (sigma_db * sigma_db + 5.57 * 5.57).sqrt(),
    )
}

fn ln_phi_macro(p: &NetworkParams) -> f64 {
    -7.1 * LN_10 + 3.0 * p.f_c_mhz.ln()
}

fn ln_phi_femto() -> f64 {
    3.7 * LN_10
}

fn per_subcarrier_dbm(total_dbm: f64, n: u32) -> f64 {
    total_dbm - 10.0 * f64::from(n).log10()
}

/// Signal region of the femto dominant-FAP integral.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Region {
    /// Every `w > γz`.
    Full,
    /// `w ≥ max(γz, e^{2μ}/(γz))`, the part reached by the Laguerre
    /// substitution `ln w = μ + σ√(2(t + χ))`.
    UpperBranch,
}

/// Dominant-FAP term of the femto bound: the probability that the MBS
/// alone does not cause outage but one interfering FAP does.
pub fn femto_composite_oracle(ctx: &BoundContext, d: f64, p_serving_dbm: f64, lambda: f64) -> f64 {
    femto_composite_oracle_over(ctx, d, p_serving_dbm, lambda, Region::Full)
}

pub fn femto_composite_oracle_over(
    ctx: &BoundContext,
    d: f64,
    p_serving_dbm: f64,
    lambda: f64,
    region: Region,
) -> f64 {
    let p = ctx.params();
    let xi = Z * p.xi_db;
    let k = 2.0 / p.alpha_ff;
    let gamma = Z * p.gamma_f_db;

    let (mu_s, sig_s) = fit(p.mu_f_db, p.sigma_f_db);
    let mu_s = mu_s + ln_mw(p_serving_dbm + p.g_f_dbi + p.g_u_dbi)
        - ln_phi_femto()
        - p.alpha_f * p.r_f.ln();
    let (mu_i, sig_i) = fit(p.mu_fm_db, p.sigma_fm_db);
    let p_m = per_subcarrier_dbm(p.p_m_total_dbm, p.n_subcarriers);
    let mu_i =
        mu_i + ln_mw(p_m + p.g_m_dbi + p.g_u_dbi) - ln_phi_macro(p) - xi - p.alpha_fm * d.ln();

    let (mu_ff, sig_ff) = fit(p.mu_ff_db, p.sigma_ff_db);
    let pw = ctx.fap_power();
    let ln_moment = k * (mu_ff + pw.loc) + 0.5 * k * k * (sig_ff * sig_ff + pw.scale * pw.scale);
    let ln_kl = PI.ln()
        + k * (Z * (p.g_f_dbi + p.g_u_dbi) + gamma - ln_phi_femto() - 2.0 * xi)
        + ln_moment
        + lambda.ln();

    let inner = |ln_gz: f64| {
        let t0 = match region {
            Region::Full => (ln_gz - mu_s) / sig_s,
            Region::UpperBranch => ((ln_gz - mu_s) / sig_s).abs(),
        };
        if t0 >= CUT {
            return 0.0;
        }
        integrate(
            |t| {
                let u = mu_s + sig_s * t;
                let ln_gap = u + (-(ln_gz - u).exp_m1()).ln();
                let x = (ln_kl - k * ln_gap).exp();
                normal_pdf(t) * -(-x).exp_m1()
            },
            t0.max(-CUT),
            CUT,
            1e-15,
        )
    };
    integrate(
        |y| normal_pdf(y) * inner(gamma + mu_i + sig_i * y),
        -CUT,
        CUT,
        1e-14,
    )
}

/// Macro outage lower bound: probability that at least one FAP alone
/// drives an outdoor MUE at distance `d` below target.
pub fn macro_oracle(ctx: &BoundContext, d: f64, lambda: f64) -> f64 {
    let p = ctx.params();
    let k = 2.0 / p.alpha_mf;
    let (mu_s, sig_s) = fit(p.mu_m_db, p.sigma_m_db);
    let p_m = per_subcarrier_dbm(p.p_m_total_dbm, p.n_subcarriers);
    let mu_s = mu_s + ln_mw(p_m + p.g_m_dbi + p.g_u_dbi) - ln_phi_macro(p) - p.alpha_m * d.ln();
    let (mu_if, sig_if) = fit(p.mu_mf_db, p.sigma_mf_db);
    let pw = ctx.fap_power();
    let ln_moment = k * (mu_if + pw.loc) + 0.5 * k * k * (sig_if * sig_if + pw.scale * pw.scale);
    let ln_phi_mf = ln_phi_femto() + Z * p.xi_db;
    let ln_kl = PI.ln()
        + k * (Z * (p.g_f_dbi + p.g_u_dbi + p.gamma_m_db) - ln_phi_mf)
        + ln_moment
        + lambda.ln();
    integrate(
        |y| {
            let x = (ln_kl - k * (mu_s + sig_s * y)).exp();
            normal_pdf(y) * -(-x).exp_m1()
        },
        -CUT,
        CUT,
        1e-15,
    )
}

/// Ten `(d, N_F)` points spanning the cell and both reference densities.
pub fn oracle_sample() -> Vec<(f64, f64)> {
    let mut v = Vec::new();
    for n_f in [30.0, 100.0] {
        for d in [400.0, 500.0, 600.0, 800.0, 1000.0] {
            v.push((d, n_f));
        }
    }
    v
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
