use acsim_core::example3d::{t3_first_component, t3_first_component_tensor, t3_limit};
use criterion::{criterion_group, criterion_main, Criterion};

fn leading_term(c: &mut Criterion) {
    c.bench_function("t3_adaptive_t4", |b| b.iter(|| t3_first_component(4.0, 1.0, 1e-12).unwrap()));
    c.bench_function("t3_tensor_t4", |b| b.iter(|| t3_first_component_tensor(4.0, 1.0, 40).unwrap()));
    c.bench_function("t3_limit", |b| b.iter(|| t3_limit(1.0, 1e-13).unwrap()));
}

criterion_group!(benches, leading_term);
criterion_main!(benches);
