use criterion::{black_box, criterion_group, criterion_main, Criterion};
use tamedom_core::amalgam::{close, AmalgamEngine};
use tamedom_core::builtins;
use tamedom_core::domination::{refute_all_witnesses, search_witness, AmalgamBackend, CheckOptions, OrderBackend};
use tamedom_core::logic::{PartialStructure, Point, PointKind};
use tamedom_core::order::cut_power;
use tamedom_core::schema::{power, tensor, validate_schema};

fn blank(theory: &str, n: usize) -> PartialStructure {
    let th = builtins::theory(theory).unwrap();
    let points = (0..n).map(|i| Point::new(format!("p{i}"), PointKind::FreshParameter)).collect();
    PartialStructure::with_points(th.signature.clone(), points).unwrap()
}

fn engine(c: &mut Criterion) {
    let th = builtins::theory("counterexample").unwrap();
    let eng = AmalgamEngine::new(th.clone()).unwrap();
    let s4 = blank("counterexample", 4);
    c.bench_function("close/counterexample-4", |b| b.iter(|| close(black_box(&s4), &th)));
    c.bench_function("consistent/counterexample-4", |b| b.iter(|| eng.consistent(black_box(&s4)).unwrap()));
    let base = eng.consistent(&blank("counterexample", 2)).unwrap().unwrap().structure;
    c.bench_function("extensions/counterexample-2+1", |b| {
        b.iter(|| eng.enumerate_extensions(black_box(&base), 1).unwrap())
    });
}

fn schemas(c: &mut Criterion) {
    let p = builtins::type_schema("counterexample", "p").unwrap();
    let q0 = builtins::type_schema("counterexample", "q0").unwrap();
    c.bench_function("tensor/p-q0", |b| b.iter(|| tensor(black_box(&p), &q0).unwrap()));
    c.bench_function("power/p-2", |b| b.iter(|| power(black_box(&p), 2).unwrap()));
    c.bench_function("validate/p", |b| b.iter(|| validate_schema(black_box(&p), 2).unwrap()));
}

fn domination(c: &mut Criterion) {
    let be = AmalgamBackend::new(builtins::theory("counterexample").unwrap()).unwrap();
    let q1 = builtins::type_schema("counterexample", "q1").unwrap();
    let q0 = builtins::type_schema("counterexample", "q0").unwrap();
    let opts = CheckOptions::default();
    c.bench_function("search/q1-q0", |b| b.iter(|| search_witness(&be, &q1, &q0, 0, &opts).unwrap()));

    let rg = AmalgamBackend::new(builtins::theory("random-graph").unwrap()).unwrap();
    let p = builtins::type_schema("random-graph", "p").unwrap();
    let q = builtins::type_schema("random-graph", "q").unwrap();
    c.bench_function("refute-all/rg-p-q", |b| b.iter(|| refute_all_witnesses(&rg, &p, &q, 1, &opts).unwrap()));

    let d = builtins::cut_type("DLO", "p").unwrap();
    let d2 = cut_power(&d, 2).unwrap();
    let y = d.rename(&|_| "y".into());
    c.bench_function("search/dlo-square", |b| {
        b.iter(|| search_witness(&OrderBackend, &d2, &y, 1, &opts).unwrap())
    });
}

criterion_group!(benches, engine, schemas, domination);
criterion_main!(benches);
