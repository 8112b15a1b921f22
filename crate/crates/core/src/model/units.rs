//! Decibel conversions.
//!
//! Everything inside the crate works in linear milliwatts and natural-log
//! units; dB and dBm only appear at the API surface and in scenario files.

use std::f64::consts::LN_10;

/// Conversion factor from decibels to nepers-of-power, `0.1 ln 10`.
pub const ZETA: f64 = 0.1 * LN_10;

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    (ZETA * db).exp()
}

#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    x.ln() / ZETA
}

#[inline]
pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

#[inline]
pub fn mw_to_dbm(mw: f64) -> f64 {
    linear_to_db(mw)
}

/// Natural log of a power given in dBm (i.e. `ln` of milliwatts).
#[inline]
pub fn dbm_to_ln_mw(dbm: f64) -> f64 {
    ZETA * dbm
}

#[inline]
pub fn ln_mw_to_dbm(ln_mw: f64) -> f64 {
    ln_mw / ZETA
}

/// Power per subcarrier when `total_dbm` is spread evenly over
/// `n_subcarriers` subcarriers.
pub fn per_subcarrier_power(total_dbm: f64, n_subcarriers: u32) -> crate::Result<f64> {
    if n_subcarriers == 0 {
        return Err(crate::error::domain(
            "per_subcarrier_power",
            "need at least one subcarrier",
        ));
    }
    Ok(total_dbm - 10.0 * f64::from(n_subcarriers).log10())
}

/// Inverse of [`per_subcarrier_power`].
pub fn total_power(per_subcarrier_dbm: f64, n_subcarriers: u32) -> f64 {
    per_subcarrier_dbm + 10.0 * f64::from(n_subcarriers.max(1)).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fap_cap_per_subcarrier() {
        let p = per_subcarrier_power(23.0, 1200).unwrap();
        assert!((p - (-7.79)).abs() < 5e-3, "{p}");
    }

    #[test]
    fn mbs_per_subcarrier() {
        let p = per_subcarrier_power(43.0, 1200).unwrap();
        assert!((p - 12.2082).abs() < 1e-3, "{p}");
    }

    #[test]
    fn single_subcarrier_is_identity() {
        assert_eq!(per_subcarrier_power(17.5, 1).unwrap(), 17.5);
        assert!(per_subcarrier_power(17.5, 0).is_err());
    }

    #[test]
    fn zeta_value() {
        assert_eq!(ZETA, 0.1 * 10f64.ln());
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((db_to_linear(3.0) - 1.995_262_314_968_879_5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn dbm_round_trip(dbm in -100.0f64..100.0) {
            let back = mw_to_dbm(dbm_to_mw(dbm));
            prop_assert!((back - dbm).abs() <= 1e-12 * dbm.abs().max(1.0));
        }
    }
}
