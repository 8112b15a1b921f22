use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};
use std::f64::consts::SQRT_2;

use super::units::ZETA;
use crate::error::{domain, Result};

/// Mean shift, in dB, of the lognormal that approximates an Exp(1) power
/// gain times a lognormal shadowing term (Turkmani's fit).
pub const FADING_MEAN_SHIFT_DB: f64 = 2.5;

/// Standard deviation, in dB, that the Exp(1) fading contributes to the
/// same lognormal fit.
pub const FADING_SPREAD_DB: f64 = 5.57;

/// A lognormal law, `ln X ~ N(loc, scale²)`, parameterised in natural-log
/// units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalDist {
    pub loc: f64,
    pub scale: f64,
}

impl LognormalDist {
    pub fn new(loc: f64, scale: f64) -> Result<Self> {
        if !loc.is_finite() || !scale.is_finite() || scale < 0.0 {
            return Err(domain(
                "LognormalDist::new",
                format!("need finite loc and scale >= 0, got ({loc}, {scale})"),
            ));
        }
        Ok(Self { loc, scale })
    }

    /// Builds the law from a mean and standard deviation of `10 log10 X`.
    pub fn from_db(mu_db: f64, sigma_db: f64) -> Result<Self> {
        Self::new(ZETA * mu_db, ZETA * sigma_db)
    }

    pub fn mu_db(&self) -> f64 {
        self.loc / ZETA
    }

    pub fn sigma_db(&self) -> f64 {
        self.scale / ZETA
    }

    pub fn median(&self) -> f64 {
        self.loc.exp()
    }

    pub fn mean(&self) -> f64 {
        (self.loc + 0.5 * self.scale * self.scale).exp()
    }

    /// `ln E[X^k]`.
    pub fn ln_moment(&self, k: f64) -> f64 {
        k * self.loc + 0.5 * k * k * self.scale * self.scale
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.cdf_ln(x.ln())
    }

    /// CDF evaluated at `exp(ln_x)`; avoids the round trip through `exp` for
    /// arguments that over- or underflow.
    pub fn cdf_ln(&self, ln_x: f64) -> f64 {
        if self.scale == 0.0 {
            return if ln_x >= self.loc { 1.0 } else { 0.0 };
        }
        std_normal_cdf((ln_x - self.loc) / self.scale)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.quantile_ln(p).exp()
    }

    /// `ln` of the `p`-quantile.
    pub fn quantile_ln(&self, p: f64) -> f64 {
        self.loc + self.scale * std_normal_quantile(p)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        (self.loc + self.scale * z).exp()
    }

    /// Law of `X / Y` for independent `X ~ self`, `Y ~ other`.
    pub fn ratio(&self, other: &Self) -> Self {
        Self {
            loc: self.loc - other.loc,
            scale: self.scale.hypot(other.scale),
        }
    }

    /// Law of `X · Y` for independent `X ~ self`, `Y ~ other`.
    pub fn product(&self, other: &Self) -> Self {
        Self {
            loc: self.loc + other.loc,
            scale: self.scale.hypot(other.scale),
        }
    }

    /// Law of `c · X` for a constant `c > 0` given as `ln c`.
    pub fn scaled_ln(&self, ln_c: f64) -> Self {
        Self {
            loc: self.loc + ln_c,
            scale: self.scale,
        }
    }
}

pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

pub fn std_normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// Lognormal approximation of `H · Q` with `H ~ Exp(1)` and
/// `Q ~ LN(ζ mu_db, ζ² sigma_db²)`.
pub fn composite_fading_shadowing(mu_db: f64, sigma_db: f64) -> Result<LognormalDist> {
    if !(sigma_db >= 0.0) || !mu_db.is_finite() || !sigma_db.is_finite() {
        return Err(domain(
            "composite_fading_shadowing",
            format!("need finite mu and sigma >= 0 dB, got ({mu_db}, {sigma_db})"),
        ));
    }
    LognormalDist::new(
        ZETA * (mu_db - FADING_MEAN_SHIFT_DB),
        ZETA * sigma_db.hypot(FADING_SPREAD_DB),
    )
}

/// Lognormal model of an interfering FAP's per-subcarrier power in mW:
/// `[p_min, p_max]` dBm is read as the ±3σ span of a normal law in dBm.
pub fn fap_power_distribution(p_min_dbm: f64, p_max_dbm: f64) -> Result<LognormalDist> {
    if !(p_min_dbm <= p_max_dbm) || !p_min_dbm.is_finite() || !p_max_dbm.is_finite() {
        return Err(domain(
            "fap_power_distribution",
            format!("need finite p_min <= p_max, got [{p_min_dbm}, {p_max_dbm}] dBm"),
        ));
    }
    let mu = 0.5 * (p_min_dbm + p_max_dbm);
    let sigma = (p_max_dbm - p_min_dbm) / 6.0;
    LognormalDist::from_db(mu, sigma)
}

/// Draws one `H · Q` sample: unit-mean exponential power gain times
/// lognormal shadowing, both sampled exactly.
pub fn sample_fading_shadowing<R: Rng + ?Sized>(shadow: &LognormalDist, rng: &mut R) -> f64 {
    let h: f64 = Exp1.sample(rng);
    h * shadow.sample(rng)
}
