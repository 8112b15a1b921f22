//! Scenario parameters, unit conversions, the power-law propagation model
//! and the lognormal channel approximations shared by every other module.

pub mod lognormal;
pub mod params;
pub mod propagation;
pub mod units;

pub use lognormal::{
    composite_fading_shadowing, fap_power_distribution, LognormalDist, FADING_MEAN_SHIFT_DB,
    FADING_SPREAD_DB,
};
pub use params::NetworkParams;
pub use propagation::{LinkKind, Links, PropagationLink};
pub use units::{per_subcarrier_power, ZETA};

/// `phi · d^alpha` for `link`; see [`PropagationLink::path_loss`].
pub fn path_loss(link: &PropagationLink, d: f64) -> crate::Result<f64> {
    link.path_loss(d)
}
