use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use femtoshare_core::analysis::{femto_op_lower_bound, macro_op_lower_bound};
use femtoshare_core::montecarlo::Disc;
use femtoshare_core::quadrature::{make_rule, RuleKind};
use femtoshare_core::regulation::{p_lb_exact, p_ub_max};
use femtoshare_core::{BoundContext, NetworkParams, PowerPolicy, Regulator, Simulator};

fn ctx(n_f: f64) -> BoundContext {
    BoundContext::new(NetworkParams::default().with_n_f(n_f)).unwrap()
}

fn quadrature(c: &mut Criterion) {
    c.bench_function("hermite_rule_12", |b| {
        b.iter(|| make_rule(RuleKind::Hermite, black_box(12)).unwrap())
    });
    c.bench_function("laguerre_rule_64", |b| {
        b.iter(|| make_rule(RuleKind::Laguerre, black_box(64)).unwrap())
    });
}

fn bounds(c: &mut Criterion) {
    let ctx = ctx(100.0);
    c.bench_function("femto_lower_bound_12x12", |b| {
        b.iter(|| femto_op_lower_bound(&ctx, black_box(600.0)).unwrap())
    });
    c.bench_function("macro_lower_bound_12", |b| {
        b.iter(|| macro_op_lower_bound(&ctx, black_box(600.0), ctx.lambda_f()).unwrap())
    });
}

fn regulation(c: &mut Criterion) {
    let ctx = ctx(100.0);
    c.bench_function("p_lb_exact", |b| {
        b.iter(|| p_lb_exact(&ctx, black_box(600.0)).unwrap())
    });
    c.bench_function("p_ub_max", |b| {
        b.iter(|| p_ub_max(&ctx, black_box(600.0), ctx.lambda_f()).unwrap())
    });
    let reg = Regulator::new(ctx.clone(), ctx.lambda_f(), PowerPolicy::LowerEdge).unwrap();
    c.bench_function("regulator_decide", |b| {
        b.iter(|| reg.decide(black_box(600.0)).unwrap())
    });
}

fn simulation(c: &mut Criterion) {
    let ctx = ctx(30.0);
    let sim = Simulator::new(&ctx, Disc::new(2000.0).unwrap()).unwrap();
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    g.bench_function("estimate_op_10x100_3pt", |b| {
        b.iter(|| {
            sim.estimate_op(&[400.0, 700.0, 1000.0], 10, 100, black_box(1))
                .unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, quadrature, bounds, regulation, simulation);
criterion_main!(benches);
