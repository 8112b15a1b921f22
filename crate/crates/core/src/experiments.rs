//! Figure presets and custom sweeps.
//!
//! [`run`] evaluates a preset, writes one CSV per curve into the output
//! directory, and returns a report of invariant checks. A failed check does
//! not abort the run; callers decide what to do with [`RunReport::passed`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    femto_macro_only_op, femto_op_lower_bound, macro_op_lower_bound, BoundContext,
};
use crate::error::{Error, Result};
use crate::model::units::per_subcarrier_power;
use crate::model::NetworkParams;
use crate::montecarlo::{format_num, write_csv, write_text, CsvRow, Disc, OpPoint, Simulator};
use crate::regulation::{
    d_fm_min, d_fm_min_for_cap, p_lb_approx, p_lb_exact, p_ub_max, PowerPolicy, RegulationMode,
    Regulator,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Outage vs UE distance, bounds and simulation, N_F ∈ {30, 100}.
    Fig1,
    /// Outage vs N_F at 400 m and 800 m, bounds and simulation.
    Fig2,
    /// Minimum FAP distance vs FAP total power, ξ ∈ {10, 15} dB.
    Fig3,
    /// Power bounds vs FAP distance, N_F ∈ {30, 100}.
    Fig4,
    /// Simulated outage vs distance under regulation.
    Fig5,
    /// Regulated power and RB transmission probability vs distance.
    Fig6,
    /// Area spectral efficiency vs N_F under regulation, ξ ∈ {10, 15} dB.
    Fig7,
    /// User-defined sweep.
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Fig1,
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
        Preset::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Custom => "custom",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown preset '{s}'")))
    }
}

/// Quantity swept by a custom run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    /// UE distance from the MBS, m.
    Distance,
    /// Expected FAPs per macrocell.
    NF,
    /// FAP intensity, per m².
    LambdaF,
    /// Wall-partition loss, dB.
    XiDb,
}

impl SweepVar {
    pub fn column(self) -> &'static str {
        match self {
            SweepVar::Distance => "d_m",
            SweepVar::NF => "n_f",
            SweepVar::LambdaF => "lambda_f",
            SweepVar::XiDb => "xi_db",
        }
    }
}

impl FromStr for SweepVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d" | "distance" | "d_m" => Ok(SweepVar::Distance),
            "n_f" | "nf" => Ok(SweepVar::NF),
            "lambda_f" | "lambda" => Ok(SweepVar::LambdaF),
            "xi" | "xi_db" => Ok(SweepVar::XiDb),
            _ => Err(Error::Config(format!(
                "unknown sweep variable '{s}' (expected d, n_f, lambda_f or xi_db)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub var: SweepVar,
    pub values: Vec<f64>,
}

impl Sweep {
    /// Grid must be non-empty, finite and strictly increasing.
    pub fn new(var: SweepVar, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sweep grid has non-finite values".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "sweep grid must be strictly increasing".into(),
            ));
        }
        Ok(Self { var, values })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub preset: Preset,
    pub params: NetworkParams,
    pub sweep: Option<Sweep>,
    /// Restricts presets that compare several N_F values to this one.
    pub n_f: Option<f64>,
    /// Restricts presets that compare several ξ values to this one.
    pub xi_db: Option<f64>,
    pub n_drops: usize,
    pub n_trials: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Drop-region radius in units of the macrocell radius. `None` uses the
    /// preset default: 2 for bound-validation runs, 1 for regulation runs.
    pub region_scale: Option<f64>,
    pub policy: PowerPolicy,
    /// Evaluation distance for custom sweeps over anything but distance, m.
    pub distance: f64,
}

impl ExperimentSpec {
    pub fn new(preset: Preset) -> Self {
        Self {
            preset,
            params: NetworkParams::default(),
            sweep: None,
            n_f: None,
            xi_db: None,
            n_drops: 100,
            n_trials: 1000,
            seed: 1,
            out_dir: PathBuf::from("out"),
            region_scale: None,
            policy: PowerPolicy::default(),
            distance: 800.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_drops == 0 || self.n_trials == 0 {
            return Err(Error::Config("drops and trials must be at least 1".into()));
        }
        if let Some(s) = self.region_scale {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::Config(format!("bad region scale {s}")));
            }
        }
        if let Some(sweep) = &self.sweep {
            Sweep::new(sweep.var, sweep.values.clone())?;
        }
        if self.preset == Preset::Custom && self.sweep.is_none() {
            return Err(Error::Config("custom runs need a sweep".into()));
        }
        Ok(())
    }

    fn n_f_values(&self, defaults: &[f64]) -> Vec<f64> {
        self.n_f.map_or_else(|| defaults.to_vec(), |n| vec![n])
    }

    fn xi_values(&self, defaults: &[f64]) -> Vec<f64> {
        self.xi_db.map_or_else(|| defaults.to_vec(), |x| vec![x])
    }

    fn region(&self, default_scale: f64) -> Result<Disc> {
        Disc::new(self.params.r_m * self.region_scale.unwrap_or(default_scale))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
    /// Infeasible points and other remarks.
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("{mark} {}: {}\n", c.name, c.detail));
        }
        for n in &self.notes {
            s.push_str(&format!("NOTE {n}\n"));
        }
        for f in &self.files {
            s.push_str(&format!("FILE {}\n", f.display()));
        }
        s
    }
}

struct Writer<'a> {
    dir: &'a Path,
    prefix: String,
    report: RunReport,
}

impl Writer<'_> {
    fn csv(&mut self, name: &str, x_name: &str, rows: &[CsvRow]) -> Result<()> {
        let path = self.dir.join(format!("{}_{name}.csv", self.prefix));
        write_csv(&path, x_name, rows)?;
        self.report.files.push(path);
        Ok(())
    }
}

fn analytic(x: f64, value: f64) -> CsvRow {
    CsvRow {
        x,
        value,
        std_err: 0.0,
        n: 0,
    }
}

fn sim_row(x: f64, r: &crate::montecarlo::SimResult) -> CsvRow {
    CsvRow {
        x,
        value: r.op_estimate,
        std_err: r.std_err,
        n: r.n_trials,
    }
}

fn tag(v: f64) -> String {
    format_num(v).replace('.', "p")
}

/// Evenly spaced grid from `lo` to `hi` inclusive.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// `d_fm_min` rounded up to the next 10 m.
fn first_regulated_distance(ctx: &BoundContext) -> Result<f64> {
    Ok((d_fm_min(ctx)? / 10.0).ceil() * 10.0)
}

/// Runs `spec`, writing CSVs and `<preset>_summary.txt` into its output
/// directory.
pub fn run(spec: &ExperimentSpec) -> Result<RunReport> {
    spec.validate()?;
    std::fs::create_dir_all(&spec.out_dir)?;
    let mut w = Writer {
        dir: &spec.out_dir,
        prefix: spec.preset.name().to_string(),
        report: RunReport::default(),
    };
    match spec.preset {
        Preset::Fig1 => fig1(spec, &mut w)?,
        Preset::Fig2 => fig2(spec, &mut w)?,
        Preset::Fig3 => fig3(spec, &mut w)?,
        Preset::Fig4 => fig4(spec, &mut w)?,
        Preset::Fig5 => fig5(spec, &mut w)?,
        Preset::Fig6 => fig6(spec, &mut w)?,
        Preset::Fig7 => fig7(spec, &mut w)?,
        Preset::Custom => custom(spec, &mut w)?,
    }
    let mut report = w.report;
    let summary = spec
        .out_dir
        .join(format!("{}_summary.txt", spec.preset.name()));
    report.files.push(summary.clone());
    write_text(&summary, &report.summary_text())?;
    Ok(report)
}

/// Bound-vs-simulation comparison over a distance grid for one scenario.
struct BoundSweep {
    points: Vec<OpPoint>,
    femto_lb: Vec<f64>,
    macro_lb: Vec<f64>,
}

fn bound_sweep(spec: &ExperimentSpec, params: NetworkParams, grid: &[f64]) -> Result<BoundSweep> {
    // Serving FAP at its cap; interferers i.i.d. lognormal over [p_min, cap].
    let ctx = BoundContext::new(params)?;
    let sim = Simulator::new(&ctx, spec.region(2.0)?)?;
    let points = sim.estimate_op(grid, spec.n_drops, spec.n_trials, spec.seed)?;
    let femto_lb = grid
        .iter()
        .map(|&d| Ok(femto_op_lower_bound(&ctx, d)?.p_total_lb))
        .collect::<Result<_>>()?;
    let macro_lb = grid
        .iter()
        .map(|&d| macro_op_lower_bound(&ctx, d, ctx.lambda_f()))
        .collect::<Result<_>>()?;
    Ok(BoundSweep {
        points,
        femto_lb,
        macro_lb,
    })
}

/// Counts points where the bound exceeds the simulation by more than three
/// standard errors, and the worst excess.
fn ordering(bounds: &[f64], sims: &[crate::montecarlo::SimResult]) -> (usize, f64) {
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for (b, s) in bounds.iter().zip(sims) {
        if s.n_trials == 0 {
            continue;
        }
        let excess = b - s.op_estimate;
        worst = worst.max(excess);
        if excess > 3.0 * s.std_err {
            violations += 1;
        }
    }
    (violations, worst)
}

fn write_bound_sweep(
    w: &mut Writer<'_>,
    suffix: &str,
    x_name: &str,
    xs: &[f64],
    s: &BoundSweep,
) -> Result<()> {
    let rows = |f: &dyn Fn(usize) -> CsvRow| (0..xs.len()).map(f).collect::<Vec<_>>();
    w.csv(
        &format!("femto_sim_{suffix}"),
        x_name,
        &rows(&|i| sim_row(xs[i], &s.points[i].femto)),
    )?;
    w.csv(
        &format!("femto_lb_{suffix}"),
        x_name,
        &rows(&|i| analytic(xs[i], s.femto_lb[i])),
    )?;
    w.csv(
        &format!("macro_sim_{suffix}"),
        x_name,
        &rows(&|i| sim_row(xs[i], &s.points[i].macro_)),
    )?;
    w.csv(
        &format!("macro_lb_{suffix}"),
        x_name,
        &rows(&|i| analytic(xs[i], s.macro_lb[i])),
    )?;
    Ok(())
}

fn check_ordering(w: &mut Writer<'_>, label: &str, s: &BoundSweep) {
    let femto: Vec<_> = s.points.iter().map(|p| p.femto).collect();
    let macro_: Vec<_> = s.points.iter().map(|p| p.macro_).collect();
    for (tier, bounds, sims) in [
        ("femto", &s.femto_lb, &femto),
        ("macro", &s.macro_lb, &macro_),
    ] {
        let (v, worst) = ordering(bounds, sims);
        w.report.check(
            format!("{tier}_lower_bound_{label}"),
            v == 0,
            format!("{v} points above simulation + 3 s.e.; largest bound - sim = {worst:.4}"),
        );
    }
}

fn fig1(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    let grid = linspace(100.0, 1000.0, 10);
    for n_f in spec.n_f_values(&[30.0, 100.0]) {
        let s = bound_sweep(spec, spec.params.clone().with_n_f(n_f), &grid)?;
        let label = format!("nf{}", tag(n_f));
        write_bound_sweep(w, &label, "d_m", &grid, &s)?;
        check_ordering(w, &label, &s);
        let femto_mono = s.femto_lb.windows(2).all(|p| p[1] <= p[0] + 1e-12);
        let macro_mono = s.macro_lb.windows(2).all(|p| p[1] >= p[0] - 1e-12);
        w.report.check(
            format!("bound_monotone_in_d_{label}"),
            femto_mono && macro_mono,
            "femto bound non-increasing and macro bound non-decreasing in d",
        );
    }
    Ok(())
}

fn fig2(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    if spec.n_f.is_some() {
        w.report
            .notes
            .push("--nf ignored: this preset sweeps N_F".into());
    }
    let n_fs: Vec<f64> = std::iter::once(1.0)
        .chain((1..=10).map(|k| 10.0 * k as f64))
        .collect();
    for d in [400.0, 800.0] {
        let mut sweeps = Vec::new();
        for &n_f in &n_fs {
            sweeps.push(bound_sweep(spec, spec.params.clone().with_n_f(n_f), &[d])?);
        }
        let merged = BoundSweep {
            points: sweeps.iter().map(|s| s.points[0]).collect(),
            femto_lb: sweeps.iter().map(|s| s.femto_lb[0]).collect(),
            macro_lb: sweeps.iter().map(|s| s.macro_lb[0]).collect(),
        };
        let label = format!("d{}", tag(d));
        write_bound_sweep(w, &label, "n_f", &n_fs, &merged)?;
        check_ordering(w, &label, &merged);
        let first = merged.points[0].femto;
        let last = merged.points[merged.points.len() - 1].femto;
        let change = (last.op_estimate - first.op_estimate).abs();
        w.report.check(
            format!("femto_density_insensitive_{label}"),
            change <= 0.03,
            format!("simulated femto outage changes by {change:.4} from N_F = 1 to 100"),
        );
    }
    Ok(())
}

fn fig3(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    let totals: Vec<f64> = (0..=30).map(f64::from).collect();
    let mut curves = Vec::new();
    for xi in spec.xi_values(&[10.0, 15.0]) {
        let ctx = BoundContext::new(spec.params.clone().with_xi_db(xi))?;
        let n_sc = spec.params.n_subcarriers;
        let ds: Vec<f64> = totals
            .iter()
            .map(|&t| d_fm_min_for_cap(&ctx, per_subcarrier_power(t, n_sc)?))
            .collect::<Result<_>>()?;
        let rows: Vec<CsvRow> = totals
            .iter()
            .zip(&ds)
            .map(|(&t, &d)| analytic(t, d))
            .collect();
        w.csv(&format!("dmin_xi{}", tag(xi)), "p_total_dbm", &rows)?;
        w.report.check(
            format!("dmin_decreasing_in_power_xi{}", tag(xi)),
            ds.windows(2).all(|p| p[1] < p[0]),
            "d_fm_min strictly decreasing in FAP power",
        );
        let at_cap = d_fm_min(&ctx)?;
        w.report.notes.push(format!(
            "xi = {xi} dB: d_fm_min = {at_cap:.2} m at {} dBm total",
            spec.params.p_f_max_total_dbm
        ));
        curves.push((xi, ds));
    }
    if let [(xa, a), (xb, b)] = curves.as_slice() {
        let (lo, hi) = if xa < xb { (a, b) } else { (b, a) };
        w.report.check(
            "dmin_decreasing_in_xi",
            lo.iter().zip(hi).all(|(l, h)| h < l),
            "higher wall loss gives a smaller d_fm_min at every power",
        );
    }
    Ok(())
}

fn fig4(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    let grid = linspace(100.0, 1000.0, 37);
    for n_f in spec.n_f_values(&[30.0, 100.0]) {
        let ctx = BoundContext::new(spec.params.clone().with_n_f(n_f))?;
        let label = format!("nf{}", tag(n_f));
        let d_min = d_fm_min(&ctx)?;
        let (mut ub, mut lb, mut approx) = (Vec::new(), Vec::new(), Vec::new());
        let mut infeasible = Vec::new();
        for &d in &grid {
            approx.push(p_lb_approx(&ctx, d)?);
            lb.push(match p_lb_exact(&ctx, d) {
                Ok(p) => p,
                Err(Error::Infeasible { .. }) => {
                    infeasible.push(d);
                    f64::NAN
                }
                Err(e) => return Err(e),
            });
            ub.push(match p_ub_max(&ctx, d, ctx.lambda_f()) {
                Ok(p) => p,
                Err(Error::Infeasible { .. }) => f64::NAN,
                Err(e) => return Err(e),
            });
        }
        if !infeasible.is_empty() {
            w.report.notes.push(format!(
                "N_F = {n_f}: exact lower bound infeasible at d = {:?} m (d_fm_min = {d_min:.1} m)",
                infeasible
            ));
        }
        let rows = |v: &[f64]| {
            grid.iter()
                .zip(v)
                .map(|(&d, &p)| analytic(d, p))
                .collect::<Vec<_>>()
        };
        w.csv(&format!("ub_{label}"), "d_m", &rows(&ub))?;
        w.csv(&format!("lb_exact_{label}"), "d_m", &rows(&lb))?;
        w.csv(&format!("lb_approx_{label}"), "d_m", &rows(&approx))?;

        let feasible: Vec<usize> = (0..grid.len()).filter(|&i| lb[i].is_finite()).collect();
        let gap = feasible
            .iter()
            .map(|&i| (lb[i] - approx[i]).abs())
            .fold(0.0, f64::max);
        w.report.check(
            format!("lb_approx_close_{label}"),
            gap <= 0.5,
            format!("max |exact - approx| = {gap:.3} dB"),
        );
        let mono = |v: &[f64]| {
            let f: Vec<f64> = v.iter().copied().filter(|x| x.is_finite()).collect();
            f.windows(2).all(|p| p[1] <= p[0] + 1e-9)
        };
        w.report.check(
            format!("power_bounds_non_increasing_{label}"),
            mono(&ub) && mono(&lb) && mono(&approx),
            "upper, exact lower and approximate lower bounds non-increasing in d",
        );
        let above = feasible.iter().filter(|&&i| ub[i] >= lb[i]).count();
        w.report.notes.push(format!(
            "N_F = {n_f}: upper bound >= lower bound at {above} of {} feasible distances",
            feasible.len()
        ));
    }
    Ok(())
}

fn regulated_simulator(spec: &ExperimentSpec, params: NetworkParams) -> Result<(Simulator, f64)> {
    let ctx = BoundContext::new(params)?;
    let reg = Regulator::new(ctx.clone(), ctx.lambda_f(), spec.policy)?;
    let d_min = reg.d_min();
    Ok((
        Simulator::new(&ctx, spec.region(1.0)?)?.with_regulation(reg),
        d_min,
    ))
}

fn fig5(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    for n_f in spec.n_f_values(&[30.0, 100.0]) {
        let params = spec.params.clone().with_n_f(n_f);
        let ctx = BoundContext::new(params.clone())?;
        let grid = linspace(first_regulated_distance(&ctx)?, params.r_m, 8);
        let (sim, _) = regulated_simulator(spec, params.clone())?;
        let pts = sim.estimate_op(&grid, spec.n_drops, spec.n_trials, spec.seed)?;
        let label = format!("nf{}", tag(n_f));
        w.csv(
            &format!("femto_sim_{label}"),
            "d_m",
            &pts.iter()
                .map(|p| sim_row(p.d, &p.femto))
                .collect::<Vec<_>>(),
        )?;
        w.csv(
            &format!("macro_sim_{label}"),
            "d_m",
            &pts.iter()
                .map(|p| sim_row(p.d, &p.macro_))
                .collect::<Vec<_>>(),
        )?;
        for (tier, eps, pick) in [
            (
                "femto",
                params.eps_f,
                (|p: &OpPoint| p.femto) as fn(&OpPoint) -> _,
            ),
            ("macro", params.eps_m, |p: &OpPoint| p.macro_),
        ] {
            let worst = pts
                .iter()
                .map(|p| {
                    let r = pick(p);
                    r.op_estimate - eps - 2.0 * r.std_err
                })
                .fold(f64::NEG_INFINITY, f64::max);
            w.report.check(
                format!("{tier}_within_target_{label}"),
                worst <= 0.0,
                format!("max (OP - eps - 2 s.e.) = {worst:.4}"),
            );
        }
    }
    Ok(())
}

fn fig6(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    for n_f in spec.n_f_values(&[30.0, 100.0]) {
        let params = spec.params.clone().with_n_f(n_f);
        let ctx = BoundContext::new(params.clone())?;
        let reg = Regulator::new(ctx.clone(), ctx.lambda_f(), spec.policy)?;
        let grid = linspace(first_regulated_distance(&ctx)?, params.r_m, 31);
        let decisions: Vec<_> = grid.iter().map(|&d| reg.decide(d)).collect::<Result<_>>()?;
        let label = format!("nf{}", tag(n_f));
        w.csv(
            &format!("power_{label}"),
            "d_m",
            &decisions
                .iter()
                .map(|r| analytic(r.d, r.power_dbm))
                .collect::<Vec<_>>(),
        )?;
        w.csv(
            &format!("rho_{label}"),
            "d_m",
            &decisions
                .iter()
                .map(|r| analytic(r.d, r.transmit_prob))
                .collect::<Vec<_>>(),
        )?;
        let thinned = decisions
            .iter()
            .filter(|r| r.mode == RegulationMode::Thinned)
            .count();
        w.report.notes.push(format!(
            "N_F = {n_f}: rho = {:.4}, {thinned} of {} distances thinned",
            reg.rho(),
            decisions.len()
        ));
        w.report.check(
            format!("decisions_consistent_{label}"),
            decisions.iter().all(|r| match r.mode {
                RegulationMode::Window => r.p_lb_dbm <= r.p_ub_dbm && r.transmit_prob == 1.0,
                RegulationMode::Thinned => {
                    r.transmit_prob == reg.rho() && r.power_dbm == r.p_lb_dbm
                }
                RegulationMode::Excluded => r.d < reg.d_min(),
            }),
            "window, thinned and excluded decisions satisfy their invariants",
        );
    }
    Ok(())
}

fn fig7(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    if spec.n_f.is_some() {
        w.report
            .notes
            .push("--nf ignored: this preset sweeps N_F".into());
    }
    let n_fs: Vec<f64> = (1..=10).map(|k| 10.0 * k as f64).collect();
    for xi in spec.xi_values(&[10.0, 15.0]) {
        let mut res = Vec::new();
        for &n_f in &n_fs {
            let params = spec.params.clone().with_xi_db(xi).with_n_f(n_f);
            let (sim, _) = regulated_simulator(spec, params)?;
            res.push(sim.estimate_ase(spec.n_drops, spec.n_trials, spec.seed)?);
        }
        let label = format!("xi{}", tag(xi));
        let n = |i: usize| res[i].n_trials;
        let se_t = |i: usize| res[i].std_err_f.hypot(res[i].std_err_m);
        let rows = |f: &dyn Fn(usize) -> (f64, f64)| {
            (0..n_fs.len())
                .map(|i| {
                    let (v, se) = f(i);
                    CsvRow {
                        x: n_fs[i],
                        value: v,
                        std_err: se,
                        n: n(i),
                    }
                })
                .collect::<Vec<_>>()
        };
        w.csv(
            &format!("ase_femto_{label}"),
            "n_f",
            &rows(&|i| (res[i].ase_f, res[i].std_err_f)),
        )?;
        w.csv(
            &format!("ase_macro_{label}"),
            "n_f",
            &rows(&|i| (res[i].ase_m, res[i].std_err_m)),
        )?;
        w.csv(
            &format!("ase_total_{label}"),
            "n_f",
            &rows(&|i| (res[i].ase_total, se_t(i))),
        )?;

        let ms: Vec<f64> = res.iter().map(|r| r.ase_m).collect();
        let (lo, hi) = ms
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        w.report.check(
            format!("macro_ase_stable_{label}"),
            (hi - lo) < 0.1 * hi,
            format!(
                "macro ASE spread {:.2}% of its maximum",
                100.0 * (hi - lo) / hi
            ),
        );
        let totals: Vec<f64> = res.iter().map(|r| r.ase_total).collect();
        let listed: Vec<String> = totals.iter().map(|v| format!("{v:.3e}")).collect();
        w.report
            .notes
            .push(format!("xi = {xi} dB: total ASE = [{}]", listed.join(", ")));
        let shape = ase_shape(&totals, &(0..totals.len()).map(se_t).collect::<Vec<_>>());
        // Stronger wall loss isolates FAPs well enough that density keeps
        // paying off; the reference 10 dB case saturates and then declines.
        let expected = if xi == 10.0 {
            Some("peaked")
        } else if xi == 15.0 {
            Some("non-decreasing")
        } else {
            None
        };
        match expected {
            Some(e) => w.report.check(
                format!("ase_shape_{label}"),
                shape == e,
                format!("total ASE is {shape}, expected {e}"),
            ),
            None => w
                .report
                .notes
                .push(format!("xi = {xi} dB: total ASE is {shape}")),
        }
    }
    Ok(())
}

/// Classifies a noisy curve as rising, peaked, or neither, using two
/// standard errors as the noise margin.
pub fn ase_shape(values: &[f64], std_errs: &[f64]) -> &'static str {
    let rising = values
        .windows(2)
        .zip(std_errs.windows(2))
        .all(|(v, s)| v[1] >= v[0] - 2.0 * s[0].hypot(s[1]));
    let (imax, &vmax) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let last = values.len() - 1;
    let peaked = imax < last && values[last] < vmax - 2.0 * std_errs[imax].hypot(std_errs[last]);
    match (rising, peaked) {
        (_, true) => "peaked",
        (true, false) => "non-decreasing",
        _ => "irregular",
    }
}

fn custom(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    let sweep = spec.sweep.as_ref().expect("validated");
    let x_name = sweep.var.column();
    let s = match sweep.var {
        SweepVar::Distance => bound_sweep(spec, spec.params.clone(), &sweep.values)?,
        _ => {
            let mut parts = Vec::new();
            for &v in &sweep.values {
                let params = match sweep.var {
                    SweepVar::NF => spec.params.clone().with_n_f(v),
                    SweepVar::LambdaF => spec.params.clone().with_lambda_f(v),
                    SweepVar::XiDb => spec.params.clone().with_xi_db(v),
                    SweepVar::Distance => unreachable!(),
                };
                parts.push(bound_sweep(spec, params, &[spec.distance])?);
            }
            BoundSweep {
                points: parts.iter().map(|s| s.points[0]).collect(),
                femto_lb: parts.iter().map(|s| s.femto_lb[0]).collect(),
                macro_lb: parts.iter().map(|s| s.macro_lb[0]).collect(),
            }
        }
    };
    write_bound_sweep(w, "sweep", x_name, &sweep.values, &s)?;
    check_ordering(w, "sweep", &s);

    // With no FAPs the macro outage vanishes and the femto bound reduces to
    // its MBS-only term.
    let no_faps: Vec<usize> = match sweep.var {
        SweepVar::NF | SweepVar::LambdaF => (0..sweep.values.len())
            .filter(|&i| sweep.values[i] == 0.0)
            .collect(),
        _ if spec.params.n_f == 0.0 => (0..sweep.values.len()).collect(),
        _ => Vec::new(),
    };
    if !no_faps.is_empty() {
        let ctx = BoundContext::new(spec.params.clone().with_n_f(0.0))?;
        let mut ok = true;
        for &i in &no_faps {
            let d = match sweep.var {
                SweepVar::Distance => sweep.values[i],
                _ => spec.distance,
            };
            let base = femto_macro_only_op(&ctx, d)?;
            ok &= s.points[i].macro_.op_estimate == 0.0
                && s.macro_lb[i] == 0.0
                && s.femto_lb[i] == base;
        }
        w.report.check(
            "no_fap_baseline",
            ok,
            "zero FAP density: macro outage 0, femto bound equals its MBS-only term",
        );
    }
    Ok(())
}
