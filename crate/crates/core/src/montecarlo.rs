//! Monte-Carlo ground truth for the outage bounds and the regulation rule.
//!
//! FAPs are dropped as a Poisson point process in a disc around the MBS.
//! Each drop is reused for every evaluation distance and then simulated for
//! a number of fading trials; each trial draws one RB, exponential fading
//! and lognormal shadowing for every link, and records whether the victim's
//! SIR falls below target.
//!
//! Drops run in parallel. Drop `j` draws everything from its own ChaCha
//! stream `j` of the run seed, and results are pooled as integer counts, so
//! the output does not depend on thread scheduling.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::BoundContext;
use crate::error::{domain, Error, Result};
use crate::model::units::{dbm_to_mw, ZETA};
use crate::model::{Links, LognormalDist, NetworkParams, PropagationLink};
use crate::regulation::{RegulationMode, Regulator};

/// Interferers closer than this are placed at this distance.
pub const MIN_LINK_DISTANCE: f64 = 1.0;

/// Victim bearings per drop in [`Simulator::estimate_op`]. The drop region is
/// a disc around the MBS, so every bearing at distance d is equivalent;
/// spreading trials over several bearings samples more FAP geometry per drop.
pub const VICTIM_BEARINGS: usize = 16;

/// Disc centred on the MBS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub radius: f64,
}

impl Disc {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(domain(
                "Disc::new",
                format!("radius must be > 0, got {radius}"),
            ));
        }
        Ok(Self { radius })
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    /// Uniform point in the disc.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let r = self.radius * rng.random::<f64>().sqrt();
        let theta = 2.0 * PI * rng.random::<f64>();
        [r * theta.cos(), r * theta.sin()]
    }
}

/// One realisation of the FAP process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FemtoDrop {
    /// FAP positions, m, MBS at the origin.
    pub positions: Vec<[f64; 2]>,
    /// Per-subcarrier transmit power of each FAP, dBm.
    pub powers_dbm: Vec<f64>,
    /// Bit `k` set when the FAP transmits in RB `k`.
    pub rb_masks: Vec<u128>,
    /// Stream index the drop was generated from.
    pub seed: u64,
}

impl FemtoDrop {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// FAP `i` transmits in RB `rb`.
    pub fn is_active(&self, i: usize, rb: u32) -> bool {
        self.rb_masks[i] >> rb & 1 == 1
    }
}

fn all_rbs(n_rb: u32) -> u128 {
    if n_rb >= 128 {
        u128::MAX
    } else {
        (1u128 << n_rb) - 1
    }
}

/// Drops a Poisson number of FAPs (mean `λ_F · area`) uniformly in `region`.
/// Every FAP starts at the power cap in every RB.
pub fn drop_faps<R: Rng + ?Sized>(params: &NetworkParams, region: &Disc, rng: &mut R) -> FemtoDrop {
    let mean = params.lambda_f() * region.area();
    let count = if mean > 0.0 {
        Poisson::new(mean)
            .expect("positive finite mean")
            .sample(rng) as usize
    } else {
        0
    };
    let positions: Vec<[f64; 2]> = (0..count).map(|_| region.sample(rng)).collect();
    FemtoDrop {
        powers_dbm: vec![params.p_f_cap_dbm(); count],
        rb_masks: vec![all_rbs(params.n_rb); count],
        positions,
        seed: 0,
    }
}

/// Whether fading and shadowing are drawn or frozen at `H = 1`, `Q` = median.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingMode {
    #[default]
    Random,
    Deterministic,
}

/// How interfering FAPs pick their power.
#[derive(Debug, Clone)]
pub enum PowerModel {
    /// I.i.d. lognormal per-subcarrier power (mW law), fixed per drop; every
    /// FAP transmits in every RB.
    Lognormal(LognormalDist),
    /// Power and RB usage from the regulation rule at each FAP's distance.
    Regulated(Box<Regulator>),
}

/// Serving power of the victim FAP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServingPower {
    FixedDbm(f64),
    /// As decided by the regulation rule at the victim's distance.
    Regulated,
}

/// Pooled outage estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub op_estimate: f64,
    /// `√(p(1−p)/n)` over the pooled trials.
    pub std_err: f64,
    /// Standard error from the spread of per-drop estimates. Trials within a
    /// drop share FAP positions, so this is usually the larger of the two.
    pub std_err_drops: f64,
    pub n_trials: u64,
}

impl SimResult {
    pub fn from_counts(outages: u64, n: u64) -> Self {
        if n == 0 {
            return Self {
                op_estimate: f64::NAN,
                std_err: f64::NAN,
                std_err_drops: f64::NAN,
                n_trials: 0,
            };
        }
        let p = outages as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        Self {
            op_estimate: p,
            std_err: se,
            std_err_drops: se,
            n_trials: n,
        }
    }
}

/// Mean of per-drop means and its standard error, drops being the
/// independent units. Falls back to the pooled-sample error for one drop.
fn clustered_mean(per_drop: &[(f64, f64, u64)]) -> (f64, f64, u64) {
    // (sum, sum of squares, count) per drop
    let n: u64 = per_drop.iter().map(|c| c.2).sum();
    if n == 0 {
        return (f64::NAN, f64::NAN, 0);
    }
    let nf = n as f64;
    let mean = per_drop.iter().map(|c| c.0).sum::<f64>() / nf;
    let used: Vec<_> = per_drop.iter().filter(|c| c.2 > 0).collect();
    let se = if used.len() < 2 {
        let sq = per_drop.iter().map(|c| c.1).sum::<f64>();
        ((sq / nf - mean * mean).max(0.0) / nf).sqrt()
    } else {
        // Ratio estimator: residuals of drop totals around mean × drop size.
        let k = used.len() as f64;
        let m_bar = nf / k;
        let ss: f64 = used.iter().map(|c| (c.0 - mean * c.2 as f64).powi(2)).sum();
        (ss / (k * (k - 1.0))).sqrt() / m_bar
    };
    (mean, se, n)
}

impl SimResult {
    /// Outage pooled from per-drop `(outages, trials)` counts.
    pub fn from_drop_counts(counts: &[(u64, u64)]) -> Self {
        let outages = counts.iter().map(|c| c.0).sum();
        let n = counts.iter().map(|c| c.1).sum();
        let c: Vec<_> = counts
            .iter()
            .map(|&(o, n)| (o as f64, o as f64, n))
            .collect();
        let (_, std_err_drops, _) = clustered_mean(&c);
        Self {
            std_err_drops,
            ..Self::from_counts(outages, n)
        }
    }
}

/// Femto and macro outage at one distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpPoint {
    pub d: f64,
    pub femto: SimResult,
    pub macro_: SimResult,
}

/// Area spectral efficiency, b/s/Hz/m².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AseResult {
    pub ase_f: f64,
    pub ase_m: f64,
    pub ase_total: f64,
    pub std_err_f: f64,
    pub std_err_m: f64,
    /// Femto outage over trials with at least one transmitting FAP.
    pub op_f: SimResult,
    pub op_m: SimResult,
    pub n_trials: u64,
}

/// Mean link gains and shadowing laws, precomputed once per simulator.
#[derive(Debug, Clone)]
struct LinkGain {
    /// `G / φ`, so the mean received power is `P · gain · d^{-α}`.
    gain: f64,
    alpha: f64,
    shadow: LognormalDist,
}

impl LinkGain {
    fn new(link: &PropagationLink, antenna_gain: f64) -> Self {
        Self {
            gain: antenna_gain / link.phi,
            alpha: link.alpha,
            shadow: link.shadowing(),
        }
    }

    fn mean(&self, p_mw: f64, d: f64) -> f64 {
        p_mw * self.gain * d.powf(-self.alpha)
    }
}

/// The drop-and-trial simulator.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: NetworkParams,
    region: Disc,
    interferers: PowerModel,
    serving: ServingPower,
    fading: FadingMode,
    signal_f: LinkGain,
    macro_to_fue: LinkGain,
    femto_to_fue: LinkGain,
    signal_m: LinkGain,
    femto_to_mue: LinkGain,
    p_m_mw: f64,
}

impl Simulator {
    /// Simulator for `ctx`'s scenario: interferers follow the context's
    /// lognormal power law, the victim FAP uses the context's serving power,
    /// and FAPs are dropped in `region`.
    pub fn new(ctx: &BoundContext, region: Disc) -> Result<Self> {
        let params = ctx.params().clone();
        let links = Links::from_params(&params)?;
        let g_u = params.g_u();
        let g_f = params.g_f() * g_u;
        let g_m = params.g_m() * g_u;
        Ok(Self {
            region,
            interferers: PowerModel::Lognormal(*ctx.fap_power()),
            serving: ServingPower::FixedDbm(ctx.p_serving_dbm()),
            fading: FadingMode::Random,
            signal_f: LinkGain::new(&links.femto_serving, g_f),
            macro_to_fue: LinkGain::new(&links.macro_indoor, g_m),
            femto_to_fue: LinkGain::new(&links.femto_interfering, g_f),
            signal_m: LinkGain::new(&links.macro_outdoor, g_m),
            femto_to_mue: LinkGain::new(&links.femto_outdoor, g_f),
            p_m_mw: dbm_to_mw(params.p_m_dbm()),
            params,
        })
    }

    pub fn with_lognormal_interferers(mut self, law: LognormalDist) -> Self {
        self.interferers = PowerModel::Lognormal(law);
        self
    }

    /// Interferers and victim both follow `regulator`.
    pub fn with_regulation(mut self, regulator: Regulator) -> Self {
        self.interferers = PowerModel::Regulated(Box::new(regulator));
        self.serving = ServingPower::Regulated;
        self
    }

    pub fn with_serving_power(mut self, serving: ServingPower) -> Self {
        self.serving = serving;
        self
    }

    pub fn with_fading(mut self, fading: FadingMode) -> Self {
        self.fading = fading;
        self
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn region(&self) -> &Disc {
        &self.region
    }

    fn regulator(&self) -> Option<&Regulator> {
        match &self.interferers {
            PowerModel::Regulated(r) => Some(r),
            PowerModel::Lognormal(_) => None,
        }
    }

    /// Drops FAPs and assigns their powers and RB masks.
    pub fn drop<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<FemtoDrop> {
        let mut drop = drop_faps(&self.params, &self.region, rng);
        match &self.interferers {
            PowerModel::Lognormal(law) => {
                for p in drop.powers_dbm.iter_mut() {
                    *p = law.sample(rng).ln() / ZETA;
                }
            }
            PowerModel::Regulated(reg) => {
                let n_rb = self.params.n_rb;
                for i in 0..drop.len() {
                    let [x, y] = drop.positions[i];
                    let dec = reg.decide(x.hypot(y).max(MIN_LINK_DISTANCE))?;
                    drop.powers_dbm[i] = dec.power_dbm;
                    drop.rb_masks[i] = match dec.mode {
                        RegulationMode::Excluded => 0,
                        RegulationMode::Window => all_rbs(n_rb),
                        RegulationMode::Thinned => (0..n_rb)
                            .filter(|_| rng.random::<f64>() < dec.transmit_prob)
                            .fold(0u128, |m, k| m | 1 << k),
                    };
                }
            }
        }
        Ok(drop)
    }

    fn fade<R: Rng + ?Sized>(&self, shadow: &LognormalDist, rng: &mut R) -> f64 {
        match self.fading {
            FadingMode::Random => {
                let h: f64 = Exp1.sample(rng);
                h * shadow.sample(rng)
            }
            FadingMode::Deterministic => shadow.median(),
        }
    }

    /// Mean received power at `at` from every FAP of the drop over `link`.
    fn mean_powers(&self, drop: &FemtoDrop, at: [f64; 2], link: &LinkGain) -> Vec<f64> {
        drop.positions
            .iter()
            .zip(&drop.powers_dbm)
            .map(|(&[x, y], &p)| {
                let dist = (x - at[0]).hypot(y - at[1]).max(MIN_LINK_DISTANCE);
                link.mean(dbm_to_mw(p), dist)
            })
            .collect()
    }

    /// Faded interference summed over FAPs active in `rb`, skipping `skip`.
    fn faded_sum<R: Rng + ?Sized>(
        &self,
        means: &[f64],
        drop: &FemtoDrop,
        rb: u32,
        shadow: &LognormalDist,
        skip: Option<usize>,
        rng: &mut R,
    ) -> f64 {
        let mut total = 0.0;
        for (i, &m) in means.iter().enumerate() {
            if Some(i) != skip && drop.is_active(i, rb) {
                total += m * self.fade(shadow, rng);
            }
        }
        total
    }

    /// One SIR draw for a cell-edge FUE at `(d, 0)` whose FAP transmits at
    /// `serving_dbm` per subcarrier, in RB `rb`.
    pub fn sample_sir_fue<R: Rng + ?Sized>(
        &self,
        drop: &FemtoDrop,
        d_fm: f64,
        serving_dbm: f64,
        rb: u32,
        rng: &mut R,
    ) -> f64 {
        let at = [d_fm, 0.0];
        let means = self.mean_powers(drop, at, &self.femto_to_fue);
        self.sir_fue(drop, &means, d_fm, serving_dbm, rb, None, rng)
    }

    /// FUE SIR given precomputed mean FAP interference `means` and the
    /// victim's MBS distance `d`.
    #[allow(clippy::too_many_arguments)]
    fn sir_fue<R: Rng + ?Sized>(
        &self,
        drop: &FemtoDrop,
        means: &[f64],
        d: f64,
        serving_dbm: f64,
        rb: u32,
        skip: Option<usize>,
        rng: &mut R,
    ) -> f64 {
        let s = self.signal_f.mean(dbm_to_mw(serving_dbm), self.params.r_f)
            * self.fade(&self.signal_f.shadow, rng);
        let d = d.max(MIN_LINK_DISTANCE);
        let i_m =
            self.macro_to_fue.mean(self.p_m_mw, d) * self.fade(&self.macro_to_fue.shadow, rng);
        let i_f = self.faded_sum(means, drop, rb, &self.femto_to_fue.shadow, skip, rng);
        ratio(s, i_m + i_f)
    }

    /// One SIR draw for an outdoor MUE at `(d, 0)` in RB `rb`.
    pub fn sample_sir_mue<R: Rng + ?Sized>(
        &self,
        drop: &FemtoDrop,
        d_m: f64,
        rb: u32,
        rng: &mut R,
    ) -> f64 {
        let means = self.mean_powers(drop, [d_m, 0.0], &self.femto_to_mue);
        self.sir_mue(drop, &means, d_m, rb, rng)
    }

    fn sir_mue<R: Rng + ?Sized>(
        &self,
        drop: &FemtoDrop,
        means: &[f64],
        d: f64,
        rb: u32,
        rng: &mut R,
    ) -> f64 {
        let d = d.max(MIN_LINK_DISTANCE);
        let s = self.signal_m.mean(self.p_m_mw, d) * self.fade(&self.signal_m.shadow, rng);
        let i = self.faded_sum(means, drop, rb, &self.femto_to_mue.shadow, None, rng);
        ratio(s, i)
    }

    /// Serving power of a victim FAP at `d`, or `None` if it may not
    /// transmit there.
    fn serving_dbm(&self, d: f64) -> Result<Option<f64>> {
        match self.serving {
            ServingPower::FixedDbm(p) => Ok(Some(p)),
            ServingPower::Regulated => {
                let reg = self.regulator().ok_or_else(|| {
                    Error::Config("regulated serving power needs a regulator".into())
                })?;
                let dec = reg.decide(d)?;
                Ok((dec.mode != RegulationMode::Excluded).then_some(dec.power_dbm))
            }
        }
    }

    fn stream(seed: u64, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        rng
    }

    /// Femto and macro outage at each distance of `grid`, pooled over
    /// `n_drops` drops of `n_trials` trials each.
    pub fn estimate_op(
        &self,
        grid: &[f64],
        n_drops: usize,
        n_trials: usize,
        seed: u64,
    ) -> Result<Vec<OpPoint>> {
        if n_drops == 0 || n_trials == 0 {
            return Err(domain(
                "estimate_op",
                "need at least one drop and one trial",
            ));
        }
        if let Some(&d) = grid.iter().find(|&&d| !(d > 0.0) || !d.is_finite()) {
            return Err(domain("estimate_op", format!("bad distance {d}")));
        }
        let serving: Vec<Option<f64>> = grid
            .iter()
            .map(|&d| self.serving_dbm(d))
            .collect::<Result<_>>()?;
        let gamma_f = self.params.gamma_f();
        let gamma_m = self.params.gamma_m();
        let n_rb = self.params.n_rb;

        let per_drop: Vec<Vec<(u64, u64)>> = (0..n_drops as u64)
            .into_par_iter()
            .map(|j| -> Result<Vec<(u64, u64)>> {
                let mut rng = Self::stream(seed, j);
                let mut drop = self.drop(&mut rng)?;
                drop.seed = j;
                let n_bearings = VICTIM_BEARINGS.min(n_trials);
                let theta0 = rng.random_range(0.0..std::f64::consts::TAU);
                let mut counts = Vec::with_capacity(grid.len());
                for (&d, &p_serv) in grid.iter().zip(&serving) {
                    let (fue_means, mue_means): (Vec<_>, Vec<_>) = (0..n_bearings)
                        .map(|b| {
                            let th = theta0 + std::f64::consts::TAU * b as f64 / n_bearings as f64;
                            let at = [d * th.cos(), d * th.sin()];
                            (
                                self.mean_powers(&drop, at, &self.femto_to_fue),
                                self.mean_powers(&drop, at, &self.femto_to_mue),
                            )
                        })
                        .unzip();
                    let (mut out_f, mut out_m) = (0u64, 0u64);
                    for t in 0..n_trials {
                        let b = t % n_bearings;
                        let rb = rng.random_range(0..n_rb);
                        if let Some(p) = p_serv {
                            if self.sir_fue(&drop, &fue_means[b], d, p, rb, None, &mut rng)
                                < gamma_f
                            {
                                out_f += 1;
                            }
                        }
                        if self.sir_mue(&drop, &mue_means[b], d, rb, &mut rng) < gamma_m {
                            out_m += 1;
                        }
                    }
                    counts.push((out_f, out_m));
                }
                Ok(counts)
            })
            .collect::<Result<_>>()?;

        Ok(grid
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                let n_f = if serving[k].is_some() {
                    n_trials as u64
                } else {
                    0
                };
                let f: Vec<_> = per_drop.iter().map(|c| (c[k].0, n_f)).collect();
                let m: Vec<_> = per_drop.iter().map(|c| (c[k].1, n_trials as u64)).collect();
                OpPoint {
                    d,
                    femto: SimResult::from_drop_counts(&f),
                    macro_: SimResult::from_drop_counts(&m),
                }
            })
            .collect())
    }

    /// Femto, macro and total area spectral efficiency.
    ///
    /// Each trial draws one RB and one victim of each tier. The femto victim
    /// is the FUE of a FAP picked uniformly among those active in the RB, and
    /// the trial contributes (active FAPs per m²) × success × log2(1 + γ_F).
    /// The macro victim is an MUE uniform in the macrocell, contributing
    /// λ_M × success × log2(1 + γ_M).
    pub fn estimate_ase(&self, n_drops: usize, n_trials: usize, seed: u64) -> Result<AseResult> {
        if n_drops == 0 || n_trials == 0 {
            return Err(domain(
                "estimate_ase",
                "need at least one drop and one trial",
            ));
        }
        let p = &self.params;
        let cell = Disc::new(p.r_m)?;
        let lambda_m = p.lambda_m();
        let se_f = (1.0 + p.gamma_f()).log2();
        let se_m = (1.0 + p.gamma_m()).log2();
        let (gamma_f, gamma_m, n_rb) = (p.gamma_f(), p.gamma_m(), p.n_rb);
        let area = self.region.area();

        struct Acc {
            sum_f: f64,
            sq_f: f64,
            sum_m: f64,
            sq_m: f64,
            out_f: u64,
            n_f: u64,
            out_m: u64,
        }

        let accs: Vec<Acc> = (0..n_drops as u64)
            .into_par_iter()
            .map(|j| -> Result<Acc> {
                let mut rng = Self::stream(seed, j);
                let drop = self.drop(&mut rng)?;
                let mut acc = Acc {
                    sum_f: 0.0,
                    sq_f: 0.0,
                    sum_m: 0.0,
                    sq_m: 0.0,
                    out_f: 0,
                    n_f: 0,
                    out_m: 0,
                };
                // Mean interference at each FAP's own FUE from every FAP.
                let fue_means: Vec<Vec<f64>> = drop
                    .positions
                    .iter()
                    .map(|&at| self.mean_powers(&drop, at, &self.femto_to_fue))
                    .collect();
                let mut active = Vec::with_capacity(drop.len());
                for _ in 0..n_trials {
                    let rb = rng.random_range(0..n_rb);
                    active.clear();
                    active.extend((0..drop.len()).filter(|&i| drop.is_active(i, rb)));
                    let mut v_f = 0.0;
                    if !active.is_empty() {
                        let i = active[rng.random_range(0..active.len())];
                        let [x, y] = drop.positions[i];
                        let sir = self.sir_fue(
                            &drop,
                            &fue_means[i],
                            x.hypot(y),
                            drop.powers_dbm[i],
                            rb,
                            Some(i),
                            &mut rng,
                        );
                        acc.n_f += 1;
                        if sir < gamma_f {
                            acc.out_f += 1;
                        } else {
                            v_f = active.len() as f64 / area * se_f;
                        }
                    }
                    acc.sum_f += v_f;
                    acc.sq_f += v_f * v_f;

                    let at = cell.sample(&mut rng);
                    let mue_means = self.mean_powers(&drop, at, &self.femto_to_mue);
                    let mut v_m = 0.0;
                    if self.sir_mue(&drop, &mue_means, at[0].hypot(at[1]), rb, &mut rng) < gamma_m {
                        acc.out_m += 1;
                    } else {
                        v_m = lambda_m * se_m;
                    }
                    acc.sum_m += v_m;
                    acc.sq_m += v_m * v_m;
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;

        // Pool in drop order so the floating-point sums are reproducible.
        let n = (n_drops * n_trials) as u64;
        let per = |f: fn(&Acc) -> (f64, f64)| -> Vec<(f64, f64, u64)> {
            accs.iter()
                .map(|a| {
                    let (s, q) = f(a);
                    (s, q, n_trials as u64)
                })
                .collect()
        };
        let (ase_f, std_err_f, _) = clustered_mean(&per(|a| (a.sum_f, a.sq_f)));
        let (ase_m, std_err_m, _) = clustered_mean(&per(|a| (a.sum_m, a.sq_m)));
        let op_f: Vec<_> = accs.iter().map(|a| (a.out_f, a.n_f)).collect();
        let op_m: Vec<_> = accs.iter().map(|a| (a.out_m, n_trials as u64)).collect();
        Ok(AseResult {
            ase_f,
            ase_m,
            ase_total: ase_f + ase_m,
            std_err_f,
            std_err_m,
            op_f: SimResult::from_drop_counts(&op_f),
            op_m: SimResult::from_drop_counts(&op_m),
            n_trials: n,
        })
    }
}

fn ratio(signal: f64, interference: f64) -> f64 {
    if interference > 0.0 {
        signal / interference
    } else {
        f64::INFINITY
    }
}

/// One CSV row: abscissa, value, its standard error and sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub x: f64,
    pub value: f64,
    pub std_err: f64,
    pub n: u64,
}

/// Writes rows under the header `x_name,value,std_err,n`.
pub fn write_csv(path: impl AsRef<Path>, x_name: &str, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record([x_name, "value", "std_err", "n"])?;
    for r in rows {
        w.write_record([
            format_num(r.x),
            format_num(r.value),
            format_num(r.std_err),
            r.n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-tripping representation; `nan` and `inf` spelled out.
pub fn format_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

/// Writes `text` to `path`, creating parent directories.
pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}
