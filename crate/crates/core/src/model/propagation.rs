//! IMT-2000 style power-law propagation for the five link types of a
//! macrocell with overlaid indoor femtocells.

use serde::{Deserialize, Serialize};

use super::lognormal::{composite_fading_shadowing, LognormalDist};
use super::params::NetworkParams;
use super::units::db_to_linear;
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    /// MBS to an outdoor UE.
    MacroToOutdoor,
    /// Serving FAP to its own indoor UE.
    ServingFemtoToIndoor,
    /// Indoor FAP to an outdoor UE (one wall).
    FemtoToOutdoor,
    /// MBS to an indoor UE (one wall).
    MacroToIndoor,
    /// Interfering FAP to an indoor UE of another femtocell (two walls).
    InterferingFemtoToIndoor,
}

/// One link type: path loss `phi · d^alpha` and lognormal shadowing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationLink {
    pub kind: LinkKind,
    /// Fixed loss, linear.
    pub phi: f64,
    pub alpha: f64,
    pub mu_db: f64,
    pub sigma_db: f64,
}

impl PropagationLink {
    pub fn new(kind: LinkKind, phi: f64, alpha: f64, mu_db: f64, sigma_db: f64) -> Result<Self> {
        if !(phi > 0.0) || !phi.is_finite() {
            return Err(domain(
                "PropagationLink::new",
                format!("phi must be > 0, got {phi}"),
            ));
        }
        if !(alpha > 2.0) || !alpha.is_finite() {
            return Err(domain(
                "PropagationLink::new",
                format!("path-loss exponent must exceed 2, got {alpha}"),
            ));
        }
        if !(sigma_db >= 0.0) || !mu_db.is_finite() {
            return Err(domain(
                "PropagationLink::new",
                format!("bad shadowing ({mu_db}, {sigma_db}) dB"),
            ));
        }
        Ok(Self {
            kind,
            phi,
            alpha,
            mu_db,
            sigma_db,
        })
    }

    /// Linear loss factor `phi · d^alpha` at distance `d` meters.
    pub fn path_loss(&self, d: f64) -> Result<f64> {
        if !(d > 0.0) {
            return Err(domain(
                "path_loss",
                format!("distance must be > 0, got {d}"),
            ));
        }
        Ok(self.phi * d.powf(self.alpha))
    }

    /// `ln(phi · d^alpha)`, for `d > 0`.
    #[inline]
    pub fn ln_path_loss(&self, d: f64) -> f64 {
        self.phi.ln() + self.alpha * d.ln()
    }

    /// Shadowing law `Q` alone.
    pub fn shadowing(&self) -> LognormalDist {
        LognormalDist::from_db(self.mu_db, self.sigma_db).expect("validated at construction")
    }

    /// Lognormal approximation of fading times shadowing, `H · Q`.
    pub fn composite(&self) -> LognormalDist {
        composite_fading_shadowing(self.mu_db, self.sigma_db).expect("validated at construction")
    }
}

/// The five link types of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Links {
    pub macro_outdoor: PropagationLink,
    pub femto_serving: PropagationLink,
    pub femto_outdoor: PropagationLink,
    pub macro_indoor: PropagationLink,
    pub femto_interfering: PropagationLink,
}

/// Fixed loss of the MBS-to-outdoor link: `10^-7.1 · f_c³`, `f_c` in MHz.
pub fn macro_fixed_loss(f_c_mhz: f64) -> f64 {
    10f64.powf(-7.1) * f_c_mhz.powi(3)
}

/// Fixed loss of the FAP-to-own-indoor-UE link, `10^3.7`.
pub fn femto_fixed_loss() -> f64 {
    10f64.powf(3.7)
}

impl Links {
    pub fn from_params(p: &NetworkParams) -> Result<Self> {
        let phi_m = macro_fixed_loss(p.f_c_mhz);
        let phi_f = femto_fixed_loss();
        let wall = db_to_linear(p.xi_db);
        Ok(Self {
            macro_outdoor: PropagationLink::new(
                LinkKind::MacroToOutdoor,
                phi_m,
                p.alpha_m,
                p.mu_m_db,
                p.sigma_m_db,
            )?,
            femto_serving: PropagationLink::new(
                LinkKind::ServingFemtoToIndoor,
                phi_f,
                p.alpha_f,
                p.mu_f_db,
                p.sigma_f_db,
            )?,
            femto_outdoor: PropagationLink::new(
                LinkKind::FemtoToOutdoor,
                phi_f * wall,
                p.alpha_mf,
                p.mu_mf_db,
                p.sigma_mf_db,
            )?,
            macro_indoor: PropagationLink::new(
                LinkKind::MacroToIndoor,
                phi_m * wall,
                p.alpha_fm,
                p.mu_fm_db,
                p.sigma_fm_db,
            )?,
            femto_interfering: PropagationLink::new(
                LinkKind::InterferingFemtoToIndoor,
                phi_f * wall * wall,
                p.alpha_ff,
                p.mu_ff_db,
                p.sigma_ff_db,
            )?,
        })
    }

    pub fn get(&self, kind: LinkKind) -> &PropagationLink {
        match kind {
            LinkKind::MacroToOutdoor => &self.macro_outdoor,
            LinkKind::ServingFemtoToIndoor => &self.femto_serving,
            LinkKind::FemtoToOutdoor => &self.femto_outdoor,
            LinkKind::MacroToIndoor => &self.macro_indoor,
            LinkKind::InterferingFemtoToIndoor => &self.femto_interfering,
        }
    }
}
