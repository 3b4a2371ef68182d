use acsim_bench::smooth_field;
use acsim_core::kernels::apply_m_epsilon;
use acsim_core::solver::{Model, Stepper};
use acsim_core::Grid;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn transforms(c: &mut Criterion) {
    let mut g = c.benchmark_group("round_trip");
    for (n, res) in [(2, 256), (3, 32), (3, 64)] {
        let grid = Grid::new(n, 40.0, res).unwrap();
        let u = smooth_field(&grid);
        g.bench_with_input(BenchmarkId::new(format!("{n}d"), res), &u, |b, u| {
            b.iter(|| {
                let phys = u.to_physical();
                acsim_core::SpectralVectorField::from_physical(&grid, &phys).unwrap()
            })
        });
    }
    g.finish();
}

fn propagator(c: &mut Criterion) {
    let grid = Grid::new(2, 60.0, 256).unwrap();
    let u = smooth_field(&grid);
    c.bench_function("m_epsilon_2d_256", |b| b.iter(|| apply_m_epsilon(&u, 0.5, 1.0).unwrap()));
}

fn steps(c: &mut Criterion) {
    let mut g = c.benchmark_group("step");
    g.sample_size(10);
    for (n, res) in [(2, 256), (3, 64)] {
        let grid = Grid::new(n, 40.0, res).unwrap();
        let u = smooth_field(&grid);
        for model in [Model::Temam, Model::NavierStokes] {
            let stepper = Stepper::new(&grid, model, 1.0, 0.01, true, true).unwrap();
            g.bench_with_input(BenchmarkId::new(format!("{model:?}_{n}d"), res), &u, |b, u| {
                b.iter(|| stepper.step(u).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, transforms, propagator, steps);
criterion_main!(benches);
