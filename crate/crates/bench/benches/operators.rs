use criterion::{criterion_group, criterion_main, Criterion};
use diracop::boundary_ops::{assemble_cauchy, projection_defect};
use diracop::cayley::{octonion_mult, Octonion, Quaternion};
use diracop_bench::{circle, operator_and_density, sphere};
use std::hint::black_box;

fn circle_ops(c: &mut Criterion) {
    for nodes in [128, 256] {
        let (op, g) = circle(nodes);
        c.bench_function(&format!("circle assemble N={nodes}"), |b| b.iter(|| assemble_cauchy(&op, black_box(&g)).unwrap()));
        let (ch, u) = operator_and_density(&op, &g);
        c.bench_function(&format!("circle apply N={nodes}"), |b| b.iter(|| ch.apply(black_box(&u)).unwrap()));
    }
    let (op, g) = circle(256);
    let (ch, _) = operator_and_density(&op, &g);
    c.bench_function("circle projection defect N=256", |b| b.iter(|| projection_defect(black_box(&ch)).unwrap()));
}

fn sphere_ops(c: &mut Criterion) {
    let mut group = c.benchmark_group("s3");
    group.sample_size(10);
    let (op, g) = sphere(8);
    group.bench_function("assemble 8^3", |b| b.iter(|| assemble_cauchy(&op, black_box(&g)).unwrap()));
    let (ch, u) = operator_and_density(&op, &g);
    group.bench_function("apply 8^3", |b| b.iter(|| ch.apply(black_box(&u)).unwrap()));
    group.finish();
}

fn octonions(c: &mut Criterion) {
    let q = |s: f64| Quaternion::new(s, 0.5 * s, -0.25, 1.0 - s);
    let x = Octonion::new(q(0.3), q(-0.7));
    let y = Octonion::new(q(1.1), q(0.2));
    c.bench_function("octonion mult f64", |b| b.iter(|| octonion_mult(black_box(&x), black_box(&y))));
}

criterion_group!(benches, circle_ops, sphere_ops, octonions);
criterion_main!(benches);
