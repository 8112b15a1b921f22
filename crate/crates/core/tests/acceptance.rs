//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). It exits 0 after reporting so
//! that a failing criterion is visible without breaking `cargo test`; set
//! `ACCEPTANCE_STRICT=1` to exit 1 when any criterion fails.

mod common;

use std::time::Instant;

use common::{femto_composite_oracle, macro_oracle, oracle_sample, rel_err};
use femtoshare_core::analysis::{
    femto_op_lower_bound, macro_op_lower_bound, macro_op_lower_bound_for_power,
};
use femtoshare_core::experiments::{run, ExperimentSpec, Preset};
use femtoshare_core::model::units::per_subcarrier_power;
use femtoshare_core::model::LognormalDist;
use femtoshare_core::montecarlo::{Disc, OpPoint};
use femtoshare_core::regulation::{
    d_fm_min, d_fm_min_for_cap, p_lb_approx, p_lb_exact, p_ub_max, rho,
};
use femtoshare_core::{BoundContext, NetworkParams, Simulator};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const DROPS: usize = 100;
const TRIALS: usize = 1000;
const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            passed: true,
            lines: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        let mark = if ok { "ok " } else { "BAD" };
        self.lines.push(format!("{mark} {line}"));
    }
}

fn ctx(n_f: f64) -> BoundContext {
    BoundContext::new(NetworkParams::default().with_n_f(n_f)).unwrap()
}

fn simulate(n_f: f64, grid: &[f64]) -> (BoundContext, Vec<OpPoint>) {
    let c = ctx(n_f);
    let region = Disc::new(2.0 * c.params().r_m).unwrap();
    let pts = Simulator::new(&c, region)
        .unwrap()
        .estimate_op(grid, DROPS, TRIALS, SEED)
        .unwrap();
    (c, pts)
}

fn c1() -> Outcome {
    let mut o = Outcome::new();
    let d = d_fm_min(&ctx(30.0)).unwrap();
    o.expect(
        (d - 384.0).abs() <= 10.0,
        format!("d_fm_min = {d:.2} m, target 384 +/- 10 m"),
    );
    o
}

fn c2() -> Outcome {
    let mut o = Outcome::new();
    for (n_f, target, tol) in [(100.0, 0.15, 0.03), (30.0, 1.0, 1e-12)] {
        let c = ctx(n_f);
        let r = rho(&c, c.lambda_f()).unwrap();
        o.expect(
            (r - target).abs() <= tol,
            format!("N_F = {n_f}: rho = {r:.4}, target {target} +/- {tol}"),
        );
    }
    o
}

const C3_GRID: [f64; 5] = [400.0, 550.0, 700.0, 850.0, 1000.0];

fn c3() -> Outcome {
    let mut o = Outcome::new();
    let (c, pts) = simulate(30.0, &C3_GRID);
    for p in &pts {
        let f_lb = femto_op_lower_bound(&c, p.d).unwrap().p_total_lb;
        let m_lb = macro_op_lower_bound(&c, p.d, c.lambda_f()).unwrap();
        let f_gap = (f_lb - p.femto.op_estimate).abs();
        o.expect(
            f_gap <= 0.03,
            format!(
                "d = {:.0} m femto: LB {f_lb:.4} vs sim {:.4} (|diff| {f_gap:.4} <= 0.03)",
                p.d, p.femto.op_estimate
            ),
        );
        let m_gap = (m_lb - p.macro_.op_estimate).abs();
        if p.macro_.op_estimate <= 0.1 {
            o.expect(
                m_gap <= 0.03,
                format!(
                    "d = {:.0} m macro: LB {m_lb:.4} vs sim {:.4} (|diff| {m_gap:.4} <= 0.03)",
                    p.d, p.macro_.op_estimate
                ),
            );
        } else {
            o.lines.push(format!(
                "--  d = {:.0} m macro: LB {m_lb:.4} vs sim {:.4} (sim > 0.1, not checked)",
                p.d, p.macro_.op_estimate
            ));
        }
    }
    o
}

fn c4() -> Outcome {
    let mut o = Outcome::new();
    let mut cases: Vec<(f64, Vec<f64>)> = vec![(30.0, C3_GRID.to_vec())];
    for n_f in [1.0, 10.0, 30.0, 60.0, 100.0] {
        cases.push((n_f, vec![400.0, 800.0]));
    }
    for (n_f, grid) in cases {
        let (c, pts) = simulate(n_f, &grid);
        for p in &pts {
            let f_lb = femto_op_lower_bound(&c, p.d).unwrap().p_total_lb;
            let m_lb = macro_op_lower_bound(&c, p.d, c.lambda_f()).unwrap();
            for (tier, lb, sim) in [("femto", f_lb, p.femto), ("macro", m_lb, p.macro_)] {
                let limit = sim.op_estimate + 3.0 * sim.std_err;
                o.expect(
                    lb <= limit,
                    format!(
                        "N_F = {n_f}, d = {:.0} m {tier}: LB {lb:.4} <= sim {:.4} + 3 x {:.4} \
                         (between-drop s.e. {:.4})",
                        p.d, sim.op_estimate, sim.std_err, sim.std_err_drops
                    ),
                );
            }
        }
    }
    o
}

fn preset(p: Preset) -> femtoshare_core::RunReport {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::new(p);
    spec.n_drops = DROPS;
    spec.n_trials = TRIALS;
    spec.seed = SEED;
    spec.out_dir = dir.path().to_path_buf();
    run(&spec).unwrap()
}

fn from_report(report: &femtoshare_core::RunReport, prefix: &str) -> Outcome {
    let mut o = Outcome::new();
    for c in report.checks.iter().filter(|c| c.name.starts_with(prefix)) {
        o.expect(c.passed, format!("{}: {}", c.name, c.detail));
    }
    for n in &report.notes {
        o.lines.push(format!("--  {n}"));
    }
    o
}

fn c5() -> Outcome {
    let report = preset(Preset::Fig5);
    let mut o = from_report(&report, "");
    let c = ctx(30.0);
    o.lines.insert(
        0,
        format!(
            "--  d-grid: 8 points from {:.0} m to {:.0} m (d_fm_min = {:.1} m), regulated drops in disc(r_M)",
            (d_fm_min(&c).unwrap() / 10.0).ceil() * 10.0,
            c.params().r_m,
            d_fm_min(&c).unwrap()
        ),
    );
    o
}

fn c6() -> Outcome {
    let mut o = Outcome::new();
    for (d, n_f) in oracle_sample() {
        let c = ctx(n_f);
        let lambda = c.lambda_f();
        let eq7 = femto_op_lower_bound(&c, d).unwrap().p_composite;
        let f_or = femto_composite_oracle(&c, d, c.p_serving_dbm(), lambda);
        let e = rel_err(eq7, f_or);
        o.expect(
            e <= 1e-5,
            format!("d = {d:.0} m, N_F = {n_f} femto double sum {eq7:.6e} vs integral {f_or:.6e} (rel {e:.2e})"),
        );
        let eq12 = macro_op_lower_bound(&c, d, lambda).unwrap();
        let m_or = macro_oracle(&c, d, lambda);
        let e = rel_err(eq12, m_or);
        o.expect(
            e <= 1e-5,
            format!("d = {d:.0} m, N_F = {n_f} macro sum {eq12:.8e} vs integral {m_or:.8e} (rel {e:.2e})"),
        );
    }
    o
}

fn property(
    o: &mut Outcome,
    name: &str,
    result: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>,
) {
    match result {
        Ok(()) => o.expect(true, format!("{name}: 256 cases")),
        Err(e) => o.expect(false, format!("{name}: {e}")),
    }
}

fn c7() -> Outcome {
    let mut o = Outcome::new();
    let runner = || {
        TestRunner::new(Config {
            cases: 256,
            failure_persistence: None,
            ..Config::default()
        })
    };
    let n_f = 1.0..150.0f64;
    let d = 50.0..1000.0f64;

    property(
        &mut o,
        "femto LB non-increasing in d",
        runner().run(&(n_f.clone(), d.clone(), 1.0..200.0f64), |(n, d, step)| {
            let c = ctx(n);
            let a = femto_op_lower_bound(&c, d).unwrap().p_total_lb;
            let b = femto_op_lower_bound(&c, d + step).unwrap().p_total_lb;
            prop_assert!(b <= a + 1e-12, "{a} -> {b}");
            Ok(())
        }),
    );
    property(
        &mut o,
        "macro LB non-decreasing in d",
        runner().run(&(n_f.clone(), d.clone(), 1.0..200.0f64), |(n, d, step)| {
            let c = ctx(n);
            let a = macro_op_lower_bound(&c, d, c.lambda_f()).unwrap();
            let b = macro_op_lower_bound(&c, d + step, c.lambda_f()).unwrap();
            prop_assert!(b >= a - 1e-12, "{a} -> {b}");
            Ok(())
        }),
    );
    property(
        &mut o,
        "macro LB non-decreasing in lambda_F",
        runner().run(&(n_f.clone(), d.clone(), 1.0..3.0f64), |(n, d, factor)| {
            let c = ctx(n);
            let a = macro_op_lower_bound(&c, d, c.lambda_f()).unwrap();
            let b = macro_op_lower_bound(&c, d, c.lambda_f() * factor).unwrap();
            prop_assert!(b >= a - 1e-12, "{a} -> {b}");
            Ok(())
        }),
    );
    property(
        &mut o,
        "macro LB non-decreasing in mu_F,Tx",
        runner().run(
            &(d.clone(), -40.0..-5.0f64, 0.0..10.0f64, 0.0..6.0f64),
            |(d, mu, step, sigma)| {
                let c = ctx(100.0);
                let lo = LognormalDist::from_db(mu, sigma).unwrap();
                let hi = LognormalDist::from_db(mu + step, sigma).unwrap();
                let a = macro_op_lower_bound_for_power(&c, d, c.lambda_f(), &lo).unwrap();
                let b = macro_op_lower_bound_for_power(&c, d, c.lambda_f(), &hi).unwrap();
                prop_assert!(b >= a - 1e-12, "{a} -> {b}");
                Ok(())
            },
        ),
    );
    property(
        &mut o,
        "macro LB non-decreasing in sigma_F,Tx",
        runner().run(
            &(d.clone(), -40.0..-5.0f64, 0.0..6.0f64, 0.0..4.0f64),
            |(d, mu, sigma, step)| {
                let c = ctx(100.0);
                let lo = LognormalDist::from_db(mu, sigma).unwrap();
                let hi = LognormalDist::from_db(mu, sigma + step).unwrap();
                let a = macro_op_lower_bound_for_power(&c, d, c.lambda_f(), &lo).unwrap();
                let b = macro_op_lower_bound_for_power(&c, d, c.lambda_f(), &hi).unwrap();
                prop_assert!(b >= a - 1e-12, "{a} -> {b}");
                Ok(())
            },
        ),
    );
    property(
        &mut o,
        "p_lb (exact and approx) non-increasing in d",
        runner().run(
            &(n_f.clone(), 390.0..1000.0f64, 1.0..200.0f64),
            |(n, d, step)| {
                let c = ctx(n);
                let (a, b) = (
                    p_lb_approx(&c, d).unwrap(),
                    p_lb_approx(&c, d + step).unwrap(),
                );
                prop_assert!(b <= a + 1e-9);
                if let (Ok(a), Ok(b)) = (p_lb_exact(&c, d), p_lb_exact(&c, d + step)) {
                    prop_assert!(b <= a + 1e-9, "{a} -> {b}");
                }
                Ok(())
            },
        ),
    );
    property(
        &mut o,
        "p_ub non-increasing in d",
        runner().run(&(n_f.clone(), d.clone(), 1.0..200.0f64), |(n, d, step)| {
            let c = ctx(n);
            if let (Ok(a), Ok(b)) = (
                p_ub_max(&c, d, c.lambda_f()),
                p_ub_max(&c, d + step, c.lambda_f()),
            ) {
                prop_assert!(b <= a + 1e-9, "{a} -> {b}");
            }
            Ok(())
        }),
    );
    property(
        &mut o,
        "d_fm_min decreasing in xi",
        runner().run(&(0.0..20.0f64, 0.1..10.0f64), |(xi, step)| {
            let a = d_fm_min(&BoundContext::new(NetworkParams::default().with_xi_db(xi)).unwrap())
                .unwrap();
            let b = d_fm_min(
                &BoundContext::new(NetworkParams::default().with_xi_db(xi + step)).unwrap(),
            )
            .unwrap();
            prop_assert!(b < a, "{a} -> {b}");
            Ok(())
        }),
    );
    property(
        &mut o,
        "d_fm_min decreasing in the power cap",
        runner().run(&(0.0..30.0f64, 0.1..10.0f64), |(total, step)| {
            let c = ctx(30.0);
            let n = c.params().n_subcarriers;
            let a = d_fm_min_for_cap(&c, per_subcarrier_power(total, n).unwrap()).unwrap();
            let b = d_fm_min_for_cap(&c, per_subcarrier_power(total + step, n).unwrap()).unwrap();
            prop_assert!(b < a, "{a} -> {b}");
            Ok(())
        }),
    );
    o
}

fn c8() -> Outcome {
    let report = preset(Preset::Fig7);
    from_report(&report, "")
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("C1 d_fm_min near 384 m", c1),
        ("C2 rho near 0.15 at N_F = 100, 1 at N_F = 30", c2),
        ("C3 bound tightness, N_F = 30, 400-1000 m", c3),
        ("C4 lower-bound ordering (bound <= sim + 3 s.e.)", c4),
        ("C5 regulation efficacy (OP <= 0.1 + 2 s.e.)", c5),
        ("C6 quadrature sums vs adaptive integral (1e-5 rel)", c6),
        ("C7 monotonicity suite", c7),
        ("C8 ASE shape under regulation", c8),
    ];
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    println!("acceptance: {DROPS} drops x {TRIALS} trials, seed {SEED}");
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let out = f();
        let mark = if out.passed { "PASS" } else { "FAIL" };
        println!("{mark} {name} ({:.1} s)", t.elapsed().as_secs_f64());
        for l in &out.lines {
            println!("       {l}");
        }
        failed += usize::from(!out.passed);
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
