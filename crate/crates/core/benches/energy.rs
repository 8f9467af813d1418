use std::hint::black_box;

use casimir_scatter::energy::{casimir_energy_exact_with, Geometry, NumericsSpec};
use casimir_scatter::parallel::{map_ordered, Execution};
use casimir_scatter::MaterialModel;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn numerics() -> NumericsSpec {
    NumericsSpec {
        refine: false,
        ..NumericsSpec::default()
    }
}

/// One exact energy; the frequency nodes are the parallel work items.
fn single_energy(c: &mut Criterion) {
    let (plane, sphere) = (MaterialModel::copper(), MaterialModel::diamond());
    let num = numerics();
    let mut group = c.benchmark_group("exact_energy");
    group.sample_size(10);
    for (r, l) in [(2.0, 5.0), (10.0, 2.0)] {
        let g = Geometry::new(r, l).unwrap();
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(
                BenchmarkId::new(format!("{exec:?}"), format!("R{r}_L{l}")),
                &g,
                |b, g| b.iter(|| casimir_energy_exact_with(black_box(g), &plane, &sphere, &num, exec).unwrap()),
            );
        }
    }
    group.finish();
}

/// A short distance sweep, fanned out over points.
fn sweep(c: &mut Criterion) {
    let (plane, sphere) = (MaterialModel::copper(), MaterialModel::diamond());
    let num = numerics();
    let ls: Vec<f64> = (0..8).map(|i| 2.0 * 1.8f64.powi(i)).collect();
    let mut group = c.benchmark_group("sweep_R5");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| {
                map_ordered(exec, &ls, |&l| {
                    let g = Geometry::new(5.0, l).unwrap();
                    casimir_energy_exact_with(&g, &plane, &sphere, &num, exec)
                        .unwrap()
                        .energy_ev
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, single_energy, sweep);
criterion_main!(benches);
