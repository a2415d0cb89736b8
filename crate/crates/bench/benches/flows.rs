use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use krflow_bench::{ab, m1_context, m1_system};
use krflow_core::fixtures::m1;
use krflow_core::loopable::TypeIOracle;
use krflow_core::states::{generate_states, lower_bound, Backend, Budgets};
use krflow_core::{FlowTerm, SetPartition};

fn relations(c: &mut Criterion) {
    let sys = m1_system();
    let f = ab(&sys);
    let b = sys.letter("b").unwrap().clone();
    c.bench_function("relation compose", |bch| bch.iter(|| black_box(&f).then(black_box(&b))));
    c.bench_function("relation star", |bch| bch.iter(|| black_box(&f).star()));
    c.bench_function("relation omega", |bch| bch.iter(|| black_box(&f).omega()));
}

fn symbolic(c: &mut Criterion) {
    let ctx = m1_context();
    let t = FlowTerm::parse("a (a b)^w* b").unwrap();
    let top = SetPartition::top(4);
    c.bench_function("act_term a (a b)^w* b", |b| b.iter(|| ctx.act_term(black_box(&top), &t).unwrap()));
    c.bench_function("generate level 0", |b| b.iter(|| generate_states(&ctx, &Budgets::default()).unwrap()));
}

fn analyze(c: &mut Criterion) {
    let m = m1();
    let mut g = c.benchmark_group("lower bound m1");
    g.sample_size(10);
    for backend in [Backend::Symbolic, Backend::Explicit] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{backend:?}")), &backend, |b, &be| {
            b.iter(|| lower_bound(&m, "m1", 1, &TypeIOracle::Trivial, be, &Budgets::default()).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, relations, symbolic, analyze);
criterion_main!(benches);
