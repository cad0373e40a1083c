use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use kinwb::kinetic_solver::{interface_params, ImexOperator, KineticGrid, Model};
use kinwb::par::Execution;
use kinwb::quadrature::{gauss_symmetric, vfp_quadrature};
use kinwb::spectral::Response;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn grid(nx: usize, q: kinwb::VelocityQuadrature) -> KineticGrid {
    let dx = 1.0 / nx as f64;
    let mut g = KineticGrid::new(nx, dx, dx * dx, 1e-3, q).unwrap();
    let rho: Vec<f64> = (0..nx).map(|j| 1.0 + 0.5 * (std::f64::consts::TAU * j as f64 * dx).cos()).collect();
    g.set_equilibrium(&rho);
    g
}

fn chemo_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("chemo_assembly");
    group.measurement_time(Duration::from_secs(5));
    group.sample_size(20);
    let model = Model::Chemo { response: Response::default() };
    for nx in [64, 256, 1024] {
        let g = grid(nx, gauss_symmetric(4).unwrap());
        let params = interface_params(&model, &g, None);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, nx), &nx, |b, _| {
                b.iter(|| ImexOperator::new(&g, &model, &params, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn vfp_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("vfp_assembly");
    group.measurement_time(Duration::from_secs(5));
    group.sample_size(20);
    let model = Model::Vfp { kappa: 1.0 };
    for nx in [64, 256, 1024] {
        let g = grid(nx, vfp_quadrature(3, 1.0, &[0.6, 1.4, 2.4]).unwrap());
        let e: Vec<f64> = (0..nx).map(|j| 0.5 * (std::f64::consts::TAU * (j as f64 - 0.5) / nx as f64).sin()).collect();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, nx), &nx, |b, _| {
                b.iter(|| ImexOperator::new(&g, &model, &e, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn rte_apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("rte_apply");
    group.measurement_time(Duration::from_secs(5));
    for nx in [256, 4096, 16384] {
        let g = grid(nx, gauss_symmetric(8).unwrap());
        let op = ImexOperator::new(&g, &Model::Rte, &vec![0.0; nx], Execution::Parallel).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, nx), &nx, |b, _| b.iter(|| op.apply(&g.f, exec)));
        }
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default();
    targets = chemo_assembly, vfp_assembly, rte_apply
}
criterion_main!(benches);
