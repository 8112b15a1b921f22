//! Closed-form downlink outage lower bounds.
//!
//! Three quantities are evaluated, all for a single resource block:
//!
//! * the probability that macro interference alone puts a cell-edge FUE in
//!   outage (a lognormal CDF),
//! * the femto outage lower bound, which adds the probability that a single
//!   dominant interfering FAP causes outage when the MBS alone does not
//!   (a Gauss-Laguerre × Gauss-Hermite double sum),
//! * the macro outage lower bound for an outdoor MUE from dominant FAP
//!   interferers (a Gauss-Hermite sum).
//!
//! Everything is computed in natural-log units so that tail quadrature nodes
//! neither overflow nor lose precision.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::model::lognormal::fap_power_distribution;
use crate::model::units::dbm_to_ln_mw;
use crate::model::{Links, LognormalDist, NetworkParams};
use crate::quadrature::{cached_rule, QuadratureRule, RuleKind};

/// Femto outage lower bound split into its two terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FemtoOutageBreakdown {
    /// Outage caused by MBS interference alone.
    pub p_macro_only: f64,
    /// Outage caused by one dominant interfering FAP on top of the MBS.
    pub p_composite: f64,
    /// `p_macro_only + p_composite`, clamped to `[0, 1]`.
    pub p_total_lb: f64,
}

/// Everything the bounds need besides the evaluation distance.
#[derive(Debug, Clone)]
pub struct BoundContext {
    params: NetworkParams,
    links: Links,
    fap_power: LognormalDist,
    p_serving_dbm: f64,
    laguerre: Arc<QuadratureRule>,
    hermite: Arc<QuadratureRule>,
}

impl BoundContext {
    /// Context for `params` with the serving FAP at its per-subcarrier cap and
    /// interferer powers spread over `[p_min, cap]`, where `p_min` is the
    /// configured override or else the cell-edge requirement.
    pub fn new(params: NetworkParams) -> Result<Self> {
        params.validate()?;
        let links = Links::from_params(&params)?;
        let cap = params.p_f_cap_dbm();
        let p_min = match params.p_f_min_dbm {
            Some(p) => p,
            None => crate::regulation::required_serving_power_dbm(
                &params,
                &links,
                params.r_m,
                params.eps_f,
            )?,
        };
        // A required minimum above the cap cannot be honoured; fall back to a
        // degenerate law at the cap rather than an inverted range.
        let fap_power = fap_power_distribution(p_min.min(cap), cap)?;
        Ok(Self {
            laguerre: cached_rule(RuleKind::Laguerre, params.laguerre_order)?,
            hermite: cached_rule(RuleKind::Hermite, params.hermite_order)?,
            p_serving_dbm: cap,
            fap_power,
            links,
            params,
        })
    }

    pub fn with_serving_power_dbm(mut self, p_dbm: f64) -> Self {
        self.p_serving_dbm = p_dbm;
        self
    }

    pub fn with_fap_power(mut self, fap_power: LognormalDist) -> Self {
        self.fap_power = fap_power;
        self
    }

    /// Interferer power law from a `[min, max]` dBm range.
    pub fn with_fap_power_range(self, p_min_dbm: f64, p_max_dbm: f64) -> Result<Self> {
        Ok(self.with_fap_power(fap_power_distribution(p_min_dbm, p_max_dbm)?))
    }

    /// Replaces the quadrature orders of both rules.
    pub fn with_orders(mut self, laguerre: usize, hermite: usize) -> Result<Self> {
        self.laguerre = cached_rule(RuleKind::Laguerre, laguerre)?;
        self.hermite = cached_rule(RuleKind::Hermite, hermite)?;
        self.params.laguerre_order = laguerre;
        self.params.hermite_order = hermite;
        Ok(self)
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn links(&self) -> &Links {
        &self.links
    }

    pub fn fap_power(&self) -> &LognormalDist {
        &self.fap_power
    }

    pub fn p_serving_dbm(&self) -> f64 {
        self.p_serving_dbm
    }

    pub fn lambda_f(&self) -> f64 {
        self.params.lambda_f()
    }

    pub fn laguerre(&self) -> &QuadratureRule {
        &self.laguerre
    }

    pub fn hermite(&self) -> &QuadratureRule {
        &self.hermite
    }

    /// `ln` of the MBS per-subcarrier effective power `P_M,Tx G_M G_U`, mW.
    fn ln_p_m(&self) -> f64 {
        let p = &self.params;
        dbm_to_ln_mw(p.p_m_dbm() + p.g_m_dbi + p.g_u_dbi)
    }

    /// `ln` of a FAP's effective power `P_F,Tx G_F G_U`, mW.
    fn ln_p_f(&self, p_tx_dbm: f64) -> f64 {
        let p = &self.params;
        dbm_to_ln_mw(p_tx_dbm + p.g_f_dbi + p.g_u_dbi)
    }
}

fn check_distance(op: &'static str, d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(domain(
            op,
            format!("distance must be finite and > 0, got {d}"),
        ))
    }
}

fn check_lambda(op: &'static str, lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(domain(
            op,
            format!("intensity must be finite and >= 0, got {lambda}"),
        ))
    }
}

/// Law of `H_F Q_F / (H_FM Q_FM)` under the lognormal fit.
pub fn signal_to_macro_ratio(links: &Links) -> LognormalDist {
    links
        .femto_serving
        .composite()
        .ratio(&links.macro_indoor.composite())
}

/// `ln` of the threshold on `H_F Q_F / (H_FM Q_FM)` below which the MBS alone
/// causes outage, for a cell-edge FUE at distance `d` served at `p_tx_dbm`.
pub(crate) fn ln_macro_only_threshold(
    params: &NetworkParams,
    links: &Links,
    p_tx_dbm: f64,
    d: f64,
) -> f64 {
    let ln_signal_gain =
        dbm_to_ln_mw(p_tx_dbm + params.g_f_dbi) - links.femto_serving.ln_path_loss(params.r_f);
    let ln_macro_gain =
        dbm_to_ln_mw(params.p_m_dbm() + params.g_m_dbi) - links.macro_indoor.ln_path_loss(d);
    params.gamma_f().ln() + ln_macro_gain - ln_signal_gain
}

/// Probability that MBS interference alone drives a cell-edge FUE at
/// distance `d` from the MBS below its SIR target.
pub fn femto_macro_only_op(ctx: &BoundContext, d: f64) -> Result<f64> {
    check_distance("femto_macro_only_op", d)?;
    Ok(macro_only(ctx, d, ctx.p_serving_dbm))
}

fn macro_only(ctx: &BoundContext, d: f64, p_serving_dbm: f64) -> f64 {
    let ln_x = ln_macro_only_threshold(&ctx.params, &ctx.links, p_serving_dbm, d);
    signal_to_macro_ratio(&ctx.links).cdf_ln(ln_x)
}

/// `ln κ_F`: the dominant-interferer area factor of the femto bound.
pub fn ln_kappa_f(ctx: &BoundContext) -> f64 {
    let p = &ctx.params;
    let link = &ctx.links.femto_interfering;
    let k = 2.0 / link.alpha;
    let ln_gain = (p.g_f_dbi + p.g_u_dbi + p.gamma_f_db) * crate::model::ZETA - link.phi.ln();
    PI.ln() + k * ln_gain + link.composite().product(&ctx.fap_power).ln_moment(k)
}

pub fn kappa_f(ctx: &BoundContext) -> f64 {
    ln_kappa_f(ctx).exp()
}

/// `ln κ_M`: the dominant-interferer area factor of the macro bound.
pub fn ln_kappa_m(ctx: &BoundContext) -> f64 {
    ln_kappa_m_for(ctx, &ctx.fap_power)
}

fn ln_kappa_m_for(ctx: &BoundContext, fap_power: &LognormalDist) -> f64 {
    let p = &ctx.params;
    let link = &ctx.links.femto_outdoor;
    let k = 2.0 / link.alpha;
    let ln_gain = (p.g_f_dbi + p.g_u_dbi + p.gamma_m_db) * crate::model::ZETA - link.phi.ln();
    PI.ln() + k * ln_gain + link.composite().product(fap_power).ln_moment(k)
}

pub fn kappa_m(ctx: &BoundContext) -> f64 {
    ln_kappa_m(ctx).exp()
}

/// Femto outage lower bound for a cell-edge FUE whose FAP is `d` meters from
/// the MBS, at the context's serving power and interferer intensity.
pub fn femto_op_lower_bound(ctx: &BoundContext, d: f64) -> Result<FemtoOutageBreakdown> {
    femto_op_lower_bound_with(ctx, d, ctx.p_serving_dbm, ctx.lambda_f())
}

/// As [`femto_op_lower_bound`] with explicit serving power and interferer
/// intensity.
pub fn femto_op_lower_bound_with(
    ctx: &BoundContext,
    d: f64,
    p_serving_dbm: f64,
    lambda: f64,
) -> Result<FemtoOutageBreakdown> {
    check_distance("femto_op_lower_bound", d)?;
    check_lambda("femto_op_lower_bound", lambda)?;
    let p_macro_only = macro_only(ctx, d, p_serving_dbm);
    let p_composite = composite_term(ctx, d, p_serving_dbm, lambda);
    Ok(FemtoOutageBreakdown {
        p_macro_only,
        p_composite,
        p_total_lb: (p_macro_only + p_composite).clamp(0.0, 1.0),
    })
}

/// The Laguerre × Hermite double sum for the dominant-FAP term.
fn composite_term(ctx: &BoundContext, d: f64, p_serving_dbm: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let links = &ctx.links;
    let signal = links.femto_serving.composite();
    let macro_if = links.macro_indoor.composite();
    let alpha_ff = links.femto_interfering.alpha;

    let mu_f =
        signal.loc + ctx.ln_p_f(p_serving_dbm) - links.femto_serving.ln_path_loss(ctx.params.r_f);
    let mu_fm = macro_if.loc + ctx.ln_p_m() - links.macro_indoor.ln_path_loss(d);
    let (sig_f, sig_fm) = (signal.scale, macro_if.scale);
    let ln_gamma = ctx.params.gamma_f().ln();
    let ln_kl = ln_kappa_f(ctx) + lambda.ln();

    let mut sum = 0.0;
    for (b, v) in ctx.hermite.iter() {
        let ln_z = SQRT_2 * sig_fm * b + mu_fm;
        let chi = (ln_z + ln_gamma - mu_f).powi(2) / (2.0 * sig_f * sig_f);
        for (a, w) in ctx.laguerre.iter() {
            let ln_w = mu_f + (2.0 * (a + chi)).sqrt() * sig_f;
            let hit = dominant_hit_probability(ln_w, ln_gamma + ln_z, ln_kl, alpha_ff);
            sum += w * v * hit / (2.0 * PI * (a + chi).sqrt() * chi.exp());
        }
    }
    sum
}

/// `1 − exp(−κλ (w − γz)^{−2/α})` given `ln w`, `ln γz` and `ln κλ`. A
/// non-positive margin means outage is already certain, so the factor is 1.
fn dominant_hit_probability(ln_w: f64, ln_gz: f64, ln_kl: f64, alpha: f64) -> f64 {
    let gap = ln_gz - ln_w;
    if gap >= 0.0 {
        return 1.0;
    }
    let ln_margin = ln_w + (-gap.exp_m1()).ln();
    let x = (ln_kl - 2.0 / alpha * ln_margin).exp();
    -(-x).exp_m1()
}

/// Macro outage lower bound for an outdoor MUE `d` meters from the MBS when
/// FAPs transmit in the RB with intensity `lambda_eff` (pass `ρλ_F` for a
/// thinned process).
pub fn macro_op_lower_bound(ctx: &BoundContext, d: f64, lambda_eff: f64) -> Result<f64> {
    macro_op_lower_bound_for_power(ctx, d, lambda_eff, &ctx.fap_power)
}

/// As [`macro_op_lower_bound`] with an explicit interferer power law.
pub fn macro_op_lower_bound_for_power(
    ctx: &BoundContext,
    d: f64,
    lambda_eff: f64,
    fap_power: &LognormalDist,
) -> Result<f64> {
    check_distance("macro_op_lower_bound", d)?;
    check_lambda("macro_op_lower_bound", lambda_eff)?;
    if lambda_eff == 0.0 {
        return Ok(0.0);
    }
    let alpha = ctx.links.femto_outdoor.alpha;
    let offset = lambda_eff.ln() + fap_power.ln_moment(2.0 / alpha);
    Ok(macro_sum(ctx, d, offset))
}

/// Hermite sum `Σ (v_m/√π)(1 − exp(−b̃_m · e^offset · (d^α_M / P_M,Tx)^{2/α_MF}))`.
fn macro_sum(ctx: &BoundContext, d: f64, offset: f64) -> f64 {
    let p = &ctx.params;
    let links = &ctx.links;
    let signal = links.macro_outdoor.composite();
    let interf = links.femto_outdoor.composite();
    let alpha = links.femto_outdoor.alpha;
    let k = 2.0 / alpha;
    let z = crate::model::ZETA;

    let ln_gain = (p.g_f_dbi - p.g_m_dbi + p.gamma_m_db) * z + links.macro_outdoor.phi.ln()
        - links.femto_outdoor.phi.ln();
    let ln_b_common =
        PI.ln() + k * ln_gain + k * (interf.loc - signal.loc) + k * k * interf.scale.powi(2) / 2.0;
    let ln_dist = k * (links.macro_outdoor.alpha * d.ln() - dbm_to_ln_mw(p.p_m_dbm()));

    let norm = PI.sqrt();
    ctx.hermite
        .iter()
        .map(|(b, v)| {
            let x = (ln_b_common - k * SQRT_2 * signal.scale * b + offset + ln_dist).exp();
            v / norm * -(-x).exp_m1()
        })
        .sum()
}
