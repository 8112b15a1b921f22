use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use super::units::{db_to_linear, per_subcarrier_power};
use crate::error::{Error, Result};

/// Every scalar describing a scenario. `Default` is the reference
/// deployment: a 1 km macrocell at 2 GHz with 10 dB wall loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkParams {
    /// Macrocell radius, m.
    pub r_m: f64,
    /// Femtocell radius, m.
    pub r_f: f64,
    /// MBS total transmit power, dBm.
    pub p_m_total_dbm: f64,
    /// FAP maximum total transmit power, dBm.
    pub p_f_max_total_dbm: f64,
    pub g_m_dbi: f64,
    pub g_f_dbi: f64,
    pub g_u_dbi: f64,
    pub f_c_mhz: f64,
    pub gamma_m_db: f64,
    pub gamma_f_db: f64,
    pub eps_m: f64,
    pub eps_f: f64,
    /// Expected number of FAPs inside the macrocell disc.
    pub n_f: f64,
    /// Wall-partition loss, dB.
    pub xi_db: f64,
    pub n_subcarriers: u32,
    pub n_rb: u32,
    pub subcarriers_per_rb: u32,

    pub alpha_m: f64,
    pub alpha_f: f64,
    pub alpha_mf: f64,
    pub alpha_fm: f64,
    pub alpha_ff: f64,

    pub mu_m_db: f64,
    pub mu_f_db: f64,
    pub mu_mf_db: f64,
    pub mu_fm_db: f64,
    pub mu_ff_db: f64,
    pub sigma_m_db: f64,
    pub sigma_f_db: f64,
    pub sigma_mf_db: f64,
    pub sigma_fm_db: f64,
    pub sigma_ff_db: f64,

    pub mue_per_cell: f64,
    pub fue_per_femto: f64,

    pub laguerre_order: usize,
    pub hermite_order: usize,

    /// Overrides the minimum FAP per-subcarrier power (dBm) that is
    /// otherwise derived from the cell-edge femto outage constraint.
    pub p_f_min_dbm: Option<f64>,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self {
            r_m: 1000.0,
            r_f: 30.0,
            p_m_total_dbm: 43.0,
            p_f_max_total_dbm: 23.0,
            g_m_dbi: 15.0,
            g_f_dbi: 2.0,
            g_u_dbi: 0.0,
            f_c_mhz: 2000.0,
            gamma_m_db: 5.0,
            gamma_f_db: 10.0,
            eps_m: 0.1,
            eps_f: 0.1,
            n_f: 30.0,
            xi_db: 10.0,
            n_subcarriers: 1200,
            n_rb: 100,
            subcarriers_per_rb: 12,
            alpha_m: 4.0,
            alpha_f: 3.0,
            alpha_mf: 4.0,
            alpha_fm: 4.0,
            alpha_ff: 4.0,
            mu_m_db: 0.0,
            mu_f_db: 0.0,
            mu_mf_db: 0.0,
            mu_fm_db: 0.0,
            mu_ff_db: 0.0,
            sigma_m_db: 8.0,
            sigma_f_db: 4.0,
            sigma_mf_db: 10.0,
            sigma_fm_db: 10.0,
            sigma_ff_db: 12.0,
            mue_per_cell: 100.0,
            fue_per_femto: 2.0,
            laguerre_order: 12,
            hermite_order: 12,
            p_f_min_dbm: None,
        }
    }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let finite = [
            ("r_m", self.r_m),
            ("r_f", self.r_f),
            ("p_m_total_dbm", self.p_m_total_dbm),
            ("p_f_max_total_dbm", self.p_f_max_total_dbm),
            ("g_m_dbi", self.g_m_dbi),
            ("g_f_dbi", self.g_f_dbi),
            ("g_u_dbi", self.g_u_dbi),
            ("f_c_mhz", self.f_c_mhz),
            ("gamma_m_db", self.gamma_m_db),
            ("gamma_f_db", self.gamma_f_db),
            ("xi_db", self.xi_db),
            ("n_f", self.n_f),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if !(self.r_f > 0.0 && self.r_f < self.r_m) {
            return bad(format!(
                "need 0 < r_f < r_m, got r_f={} r_m={}",
                self.r_f, self.r_m
            ));
        }
        if !(0.0..1.0).contains(&self.eps_m) || !(0.0..1.0).contains(&self.eps_f) {
            return bad(format!(
                "outage constraints must lie in [0, 1), got eps_m={} eps_f={}",
                self.eps_m, self.eps_f
            ));
        }
        if self.n_f < 0.0 {
            return bad(format!("n_f must be >= 0, got {}", self.n_f));
        }
        if !(self.f_c_mhz > 0.0) {
            return bad("f_c_mhz must be > 0".into());
        }
        if self.n_subcarriers == 0 || self.n_rb == 0 || self.n_rb > 128 {
            return bad(format!(
                "need n_subcarriers >= 1 and 1 <= n_rb <= 128, got {} / {}",
                self.n_subcarriers, self.n_rb
            ));
        }
        for (name, order) in [
            ("laguerre_order", self.laguerre_order),
            ("hermite_order", self.hermite_order),
        ] {
            if !(1..=crate::quadrature::MAX_ORDER).contains(&order) {
                return bad(format!("{name} must be in 1..=64, got {order}"));
            }
        }
        if let Some(p) = self.p_f_min_dbm {
            if !p.is_finite() {
                return bad("p_f_min_dbm must be finite".into());
            }
        }
        // Link exponents and shadowing are checked by the link constructors.
        super::propagation::Links::from_params(self).map(|_| ())
    }

    /// FAP intensity per m².
    pub fn lambda_f(&self) -> f64 {
        self.n_f / self.macro_area()
    }

    pub fn macro_area(&self) -> f64 {
        PI * self.r_m * self.r_m
    }

    pub fn with_n_f(mut self, n_f: f64) -> Self {
        self.n_f = n_f;
        self
    }

    pub fn with_lambda_f(mut self, lambda_f: f64) -> Self {
        self.n_f = lambda_f * self.macro_area();
        self
    }

    pub fn with_xi_db(mut self, xi_db: f64) -> Self {
        self.xi_db = xi_db;
        self
    }

    /// Spatial density of co-channel MUEs, per m².
    pub fn lambda_m(&self) -> f64 {
        self.mue_per_cell / self.macro_area()
    }

    /// MBS per-subcarrier transmit power, dBm.
    pub fn p_m_dbm(&self) -> f64 {
        per_subcarrier_power(self.p_m_total_dbm, self.n_subcarriers).expect("validated")
    }

    /// FAP per-subcarrier power cap, dBm.
    pub fn p_f_cap_dbm(&self) -> f64 {
        per_subcarrier_power(self.p_f_max_total_dbm, self.n_subcarriers).expect("validated")
    }

    pub fn g_m(&self) -> f64 {
        db_to_linear(self.g_m_dbi)
    }

    pub fn g_f(&self) -> f64 {
        db_to_linear(self.g_f_dbi)
    }

    pub fn g_u(&self) -> f64 {
        db_to_linear(self.g_u_dbi)
    }

    pub fn gamma_m(&self) -> f64 {
        db_to_linear(self.gamma_m_db)
    }

    pub fn gamma_f(&self) -> f64 {
        db_to_linear(self.gamma_f_db)
    }

    /// Reads a scenario from TOML or JSON (chosen by file extension; TOML
    /// otherwise). Missing keys keep their defaults, so an empty file is the
    /// reference scenario.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            msg,
        };
        // A scenario file may give `lambda_f` (per m²) instead of `n_f`.
        let (mut params, lambda_f) = if is_json {
            let mut value: serde_json::Value = if text.trim().is_empty() {
                serde_json::Value::Object(Default::default())
            } else {
                serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))?
            };
            let lambda_f = match value.as_object_mut() {
                Some(obj) => obj.remove("lambda_f"),
                None => return Err(parse_err("expected a JSON object".into())),
            };
            let lambda_f = lambda_f
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| parse_err("lambda_f must be a number".into()))
                })
                .transpose()?;
            let params: NetworkParams =
                serde_json::from_value(value).map_err(|e| parse_err(e.to_string()))?;
            (params, lambda_f)
        } else {
            let mut table: toml::Table =
                toml::from_str(&text).map_err(|e| parse_err(e.to_string()))?;
            let lambda_f = table
                .remove("lambda_f")
                .map(|v| match v {
                    toml::Value::Float(x) => Ok(x),
                    toml::Value::Integer(i) => Ok(i as f64),
                    _ => Err(parse_err("lambda_f must be a number".into())),
                })
                .transpose()?;
            let params: NetworkParams = toml::Value::Table(table)
                .try_into()
                .map_err(|e: toml::de::Error| parse_err(e.to_string()))?;
            (params, lambda_f)
        };
        if let Some(lambda) = lambda_f {
            params = params.with_lambda_f(lambda);
        }
        params.validate()?;
        Ok(params)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("NetworkParams always serializes")
    }
}
