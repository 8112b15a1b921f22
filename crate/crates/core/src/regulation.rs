//! Distance-based self-regulation of FAP transmit power and RB usage.
//!
//! A FAP at distance `d` from the MBS needs at least `p_lb(d)` per subcarrier
//! to keep its own cell-edge FUE within `eps_f`, and the macrocell tolerates
//! interferer maxima up to `p_ub(d)` before an MUE at `d` exceeds `eps_m`.
//! When the window `[p_lb, min(p_ub, cap)]` is non-empty the FAP transmits
//! inside it; otherwise it transmits at `p_lb` in only a fraction `ρ` of RBs.

use serde::{Deserialize, Serialize};

use crate::analysis::{
    femto_op_lower_bound_with, ln_macro_only_threshold, macro_op_lower_bound_for_power,
    signal_to_macro_ratio, BoundContext,
};
use crate::error::{domain, infeasible, Error, Result};
use crate::model::units::ZETA;
use crate::model::{Links, LognormalDist, NetworkParams};

/// Absolute tolerance of every power root, dB.
pub const POWER_TOL_DB: f64 = 1e-10;
const MAX_BISECTIONS: usize = 200;

/// Per-subcarrier serving power (dBm) at which the MBS alone puts a
/// cell-edge FUE at distance `d` in outage with probability exactly `eps`.
pub fn required_serving_power_dbm(
    params: &NetworkParams,
    links: &Links,
    d: f64,
    eps: f64,
) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(
            "p_fap_min",
            format!("outage target must be in (0, 1), got {eps}"),
        ));
    }
    if !(d > 0.0) {
        return Err(domain(
            "p_fap_min",
            format!("distance must be > 0, got {d}"),
        ));
    }
    // The threshold is `c - ζ p` in the serving power p (dBm).
    let c = ln_macro_only_threshold(params, links, 0.0, d);
    let q = signal_to_macro_ratio(links).quantile_ln(eps);
    Ok((c - q) / ZETA)
}

/// Minimum FAP per-subcarrier power (dBm) meeting `eps_f` for a cell-edge
/// FUE at the macrocell border, from MBS interference alone.
pub fn p_fap_min(ctx: &BoundContext) -> Result<f64> {
    let p = ctx.params();
    required_serving_power_dbm(p, ctx.links(), p.r_m, p.eps_f)
}

/// Smallest MBS distance at which a FAP transmitting at its cap can keep the
/// MBS-only femto outage within `eps_f`.
pub fn d_fm_min(ctx: &BoundContext) -> Result<f64> {
    d_fm_min_for_cap(ctx, ctx.params().p_f_cap_dbm())
}

/// [`d_fm_min`] for an explicit per-subcarrier power cap in dBm.
pub fn d_fm_min_for_cap(ctx: &BoundContext, cap_dbm: f64) -> Result<f64> {
    let p = ctx.params();
    let at_one_meter = required_serving_power_dbm(p, ctx.links(), 1.0, p.eps_f)?;
    // Required power falls by 10 α_FM dB per decade of distance.
    let alpha = ctx.links().macro_indoor.alpha;
    Ok(10f64.powf((at_one_meter - cap_dbm) / (10.0 * alpha)))
}

/// Closed-form lower bound on FAP power at distance `d`, dBm.
pub fn p_lb_approx(ctx: &BoundContext, d: f64) -> Result<f64> {
    let p = ctx.params();
    required_serving_power_dbm(p, ctx.links(), d, p.eps_f)
}

/// Lower bound on FAP power at distance `d` from the full femto outage
/// bound, dBm. Errors when the root leaves `[p_fap_min, cap]`.
pub fn p_lb_exact(ctx: &BoundContext, d: f64) -> Result<f64> {
    p_lb_exact_with(ctx, d, ctx.lambda_f())
}

fn p_lb_exact_with(ctx: &BoundContext, d: f64, lambda: f64) -> Result<f64> {
    let eps = ctx.params().eps_f;
    let lo = p_fap_min(ctx)?;
    let hi = ctx.params().p_f_cap_dbm();
    let f = |p: f64| -> Result<f64> {
        Ok(femto_op_lower_bound_with(ctx, d, p, lambda)?.p_total_lb - eps)
    };
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_hi > 0.0 {
        return Err(infeasible(
            "p_lb_exact",
            format!("femto bound at d = {d} m exceeds target even at the cap"),
        ));
    }
    if f_lo < 0.0 {
        return Err(infeasible(
            "p_lb_exact",
            format!("femto bound at d = {d} m is within target below the minimum power"),
        ));
    }
    bisect(f, lo, hi, f_lo, f_hi)
}

/// Law of interferer powers whose `[min, max]` dBm span is read as ±3σ. A
/// `max` below `min` keeps the same quadratic dependence on the span.
fn power_law(p_min_dbm: f64, p_max_dbm: f64) -> LognormalDist {
    LognormalDist::from_db(
        0.5 * (p_min_dbm + p_max_dbm),
        (p_max_dbm - p_min_dbm).abs() / 6.0,
    )
    .expect("finite powers")
}

/// Minimum FAP power used by the interferer power law: the configured
/// override or the cell-edge requirement.
fn interferer_min_dbm(ctx: &BoundContext) -> Result<f64> {
    match ctx.params().p_f_min_dbm {
        Some(p) => Ok(p),
        None => p_fap_min(ctx),
    }
}

/// Largest interferer maximum power (dBm) such that the macro bound at
/// distance `d` and intensity `lambda_f` stays at `eps_m`.
///
/// The mean and spread of the interferer power law both move with the
/// maximum, and the bound's exponent is quadratic in it with its minimum at
/// `p_min - 9 α_MF / ζ`. The root is searched above that turning point so
/// that the map stays monotone even when the answer lies below `p_min`.
pub fn p_ub_max(ctx: &BoundContext, d: f64, lambda_f: f64) -> Result<f64> {
    if !(lambda_f > 0.0) {
        return Err(domain(
            "p_ub_max",
            format!("intensity must be > 0, got {lambda_f}"),
        ));
    }
    let eps = ctx.params().eps_m;
    let p_min = interferer_min_dbm(ctx)?;
    let alpha = ctx.links().femto_outdoor.alpha;
    let lo = p_min - 9.0 * alpha / ZETA;
    let hi = p_min + 300.0;
    let f = |p_max: f64| -> Result<f64> {
        Ok(macro_op_lower_bound_for_power(ctx, d, lambda_f, &power_law(p_min, p_max))? - eps)
    };
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo > 0.0 {
        return Err(infeasible(
            "p_ub_max",
            format!("macro bound at d = {d} m exceeds target for every maximum power"),
        ));
    }
    if f_hi < 0.0 {
        return Err(Error::Solver(format!(
            "p_ub_max: no root below {hi} dBm at d = {d} m"
        )));
    }
    bisect(f, lo, hi, f_lo, f_hi)
}

/// `ln` of the thinning factor that brings the macro-edge bound at the cap
/// back to `eps_m`, given the upper bound at the edge `ub` (dBm).
fn ln_rho_from_ub(ub: f64, cap: f64, p_min: f64, alpha: f64) -> f64 {
    ZETA * (ub - cap) / alpha + ZETA * ZETA * (ub * ub - cap * cap) / (18.0 * alpha * alpha)
        - ZETA * ZETA * p_min * (ub - cap) / (9.0 * alpha * alpha)
}

/// RB transmission probability for rule b. Equal to 1 when rule a already
/// holds at the macrocell edge.
pub fn rho(ctx: &BoundContext, lambda_f: f64) -> Result<f64> {
    if lambda_f == 0.0 {
        return Ok(1.0);
    }
    let p = ctx.params();
    let ub = match p_ub_max(ctx, p.r_m, lambda_f) {
        Ok(ub) => ub,
        // The closed form needs an edge upper bound; without one, solve the
        // thinned-density condition directly.
        Err(Error::Infeasible { .. }) => return rho_by_definition(ctx, lambda_f),
        Err(e) => return Err(e),
    };
    let lb = lb_or_fallback(ctx, p.r_m, lambda_f)?;
    let cap = p.p_f_cap_dbm();
    if ub >= lb.min(cap) {
        return Ok(1.0);
    }
    let alpha = ctx.links().femto_outdoor.alpha;
    let ln_rho = ln_rho_from_ub(ub, cap, interferer_min_dbm(ctx)?, alpha);
    Ok(ln_rho.exp().clamp(f64::MIN_POSITIVE, 1.0))
}

/// `ρ` such that the macro-edge bound with interferers at `[p_min, cap]` and
/// intensity `ρ λ_f` equals `eps_m`.
pub fn rho_by_definition(ctx: &BoundContext, lambda_f: f64) -> Result<f64> {
    let p = ctx.params();
    let law = power_law(interferer_min_dbm(ctx)?, p.p_f_cap_dbm());
    let f = |ln_rho: f64| -> Result<f64> {
        Ok(macro_op_lower_bound_for_power(ctx, p.r_m, ln_rho.exp() * lambda_f, &law)? - p.eps_m)
    };
    let (lo, hi) = (-700.0, 0.0);
    let f_hi = f(hi)?;
    if f_hi <= 0.0 {
        return Ok(1.0);
    }
    Ok(bisect(f, lo, hi, f(lo)?, f_hi)?.exp())
}

fn lb_or_fallback(ctx: &BoundContext, d: f64, lambda: f64) -> Result<f64> {
    match p_lb_exact_with(ctx, d, lambda) {
        Ok(p) => Ok(p),
        Err(Error::Infeasible { .. }) => Ok(p_lb_approx(ctx, d)?.min(ctx.params().p_f_cap_dbm())),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegulationMode {
    /// Rule a: transmit in every RB inside the power window.
    Window,
    /// Rule b: transmit at the lower bound in a fraction `ρ` of RBs.
    Thinned,
    /// Closer than `d_fm_min`: the femtocell cannot meet its target and stays
    /// silent.
    Excluded,
}

/// Where in the rule-a window a FAP places its power.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerPolicy {
    #[default]
    LowerEdge,
    MidpointDb,
    UpperEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegulationDecision {
    pub d: f64,
    pub p_lb_dbm: f64,
    /// `min(p_ub(d), cap)`; `+inf` is never reported, the cap bounds it.
    pub p_ub_dbm: f64,
    /// Power actually used per subcarrier, dBm.
    pub power_dbm: f64,
    /// Per-RB transmission probability; 0 for excluded FAPs.
    pub transmit_prob: f64,
    pub mode: RegulationMode,
}

/// Regulation state for one scenario and FAP intensity. The edge quantities
/// (`d_fm_min`, `ρ`) are solved once at construction.
#[derive(Debug, Clone)]
pub struct Regulator {
    ctx: BoundContext,
    lambda_f: f64,
    policy: PowerPolicy,
    d_min: f64,
    rho: f64,
}

impl Regulator {
    pub fn new(ctx: BoundContext, lambda_f: f64, policy: PowerPolicy) -> Result<Self> {
        if !(lambda_f >= 0.0) || !lambda_f.is_finite() {
            return Err(domain(
                "Regulator::new",
                format!("bad intensity {lambda_f}"),
            ));
        }
        let d_min = d_fm_min(&ctx)?;
        let rho = rho(&ctx, lambda_f)?;
        Ok(Self {
            ctx,
            lambda_f,
            policy,
            d_min,
            rho,
        })
    }

    pub fn context(&self) -> &BoundContext {
        &self.ctx
    }

    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn lambda_f(&self) -> f64 {
        self.lambda_f
    }

    pub fn decide(&self, d: f64) -> Result<RegulationDecision> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(domain("decide", format!("distance must be > 0, got {d}")));
        }
        let cap = self.ctx.params().p_f_cap_dbm();
        if d < self.d_min {
            return Ok(RegulationDecision {
                d,
                p_lb_dbm: p_lb_approx(&self.ctx, d)?,
                p_ub_dbm: cap,
                power_dbm: f64::NEG_INFINITY,
                transmit_prob: 0.0,
                mode: RegulationMode::Excluded,
            });
        }
        let lb = lb_or_fallback(&self.ctx, d, self.lambda_f)?;
        let ub = if self.lambda_f == 0.0 {
            f64::INFINITY
        } else {
            match p_ub_max(&self.ctx, d, self.lambda_f) {
                Ok(ub) => ub,
                Err(Error::Infeasible { .. }) => f64::NEG_INFINITY,
                Err(e) => return Err(e),
            }
        };
        let top = ub.min(cap);
        if lb <= top {
            let power_dbm = match self.policy {
                PowerPolicy::LowerEdge => lb,
                PowerPolicy::MidpointDb => 0.5 * (lb + top),
                PowerPolicy::UpperEdge => top,
            };
            Ok(RegulationDecision {
                d,
                p_lb_dbm: lb,
                p_ub_dbm: top,
                power_dbm,
                transmit_prob: 1.0,
                mode: RegulationMode::Window,
            })
        } else {
            Ok(RegulationDecision {
                d,
                p_lb_dbm: lb,
                p_ub_dbm: top,
                power_dbm: lb,
                transmit_prob: self.rho,
                mode: RegulationMode::Thinned,
            })
        }
    }
}

/// One-shot decision for a FAP at `d`; builds a [`Regulator`] each call.
pub fn decide(ctx: &BoundContext, d: f64, lambda_f: f64) -> Result<RegulationDecision> {
    Regulator::new(ctx.clone(), lambda_f, PowerPolicy::default())?.decide(d)
}

/// Bisection on a bracketed sign change, to [`POWER_TOL_DB`].
fn bisect<F>(f: F, mut lo: f64, mut hi: f64, f_lo: f64, f_hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Solver(format!("root not bracketed in [{lo}, {hi}]")));
    }
    let lo_sign = f_lo.signum();
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= POWER_TOL_DB || mid == lo || mid == hi {
            return Ok(mid);
        }
        let v = f(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if v.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Solver(format!(
        "bisection did not reach {POWER_TOL_DB} dB in {MAX_BISECTIONS} steps"
    )))
}
