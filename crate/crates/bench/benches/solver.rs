use biotfem::assembly::{assemble_elasticity, assemble_load, DiscreteOperators, MaterialParams};
use biotfem::mesh::BoundarySpec;
use biotfem::timestep::{Scheme, StepSolver, SystemState};
use biotfem::{Discretization, Vec2};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::f64::consts::PI;

fn bench_basis_construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("discretization_build");
    for n in [8usize, 16] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| Discretization::structured(n, &BoundarySpec::default()).unwrap());
        });
    }
    group.finish();
}

fn bench_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble_elasticity");
    for n in [8usize, 16] {
        let disc = Discretization::structured(n, &BoundarySpec::default()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &disc, |b, disc| {
            b.iter(|| assemble_elasticity(disc, MaterialParams::default()));
        });
    }
    group.finish();
}

fn bench_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("backward_euler");
    group.sample_size(20);
    for n in [8usize, 16] {
        let disc = Discretization::structured(n, &BoundarySpec::default()).unwrap();
        let ops = DiscreteOperators::assemble(&disc, MaterialParams::default());
        let f = assemble_load(&disc, |x: Vec2| {
            Vec2::new((PI * x.x).sin() * (PI * x.y).sin(), 0.0)
        });
        let g = biotfem::DenseVector::zeros(ops.a_pp.nrows());

        group.bench_with_input(BenchmarkId::new("factorize", n), &ops, |b, ops| {
            b.iter(|| StepSolver::new(ops, 0.0625, Scheme::BackwardEuler).unwrap());
        });

        let solver = StepSolver::new(&ops, 0.0625, Scheme::BackwardEuler).unwrap();
        let state = SystemState::zeros(&ops, 0.0);
        group.bench_with_input(BenchmarkId::new("step", n), &solver, |b, solver| {
            b.iter(|| solver.backward_euler_step(&state, &f, &g).unwrap());
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_basis_construction,
    bench_assembly,
    bench_step
);
criterion_main!(benches);
