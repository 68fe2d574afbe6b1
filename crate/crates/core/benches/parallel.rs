//! Sequential vs parallel execution of the data-parallel kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use prepay_core::closed_form::{log_grid, solve_boundary};
use prepay_core::model::{CirParams, ContractParams};
use prepay_core::oracles::{mc_value, McOptions};
use prepay_core::par::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn fixture() -> (CirParams, ContractParams) {
    (
        CirParams::new(0.25, 0.06, 0.1).unwrap(),
        ContractParams::perpetual(0.05).unwrap(),
    )
}

fn monte_carlo(c: &mut Criterion) {
    let (cir, contract) = fixture();
    let mut group = c.benchmark_group("mc_value");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = McOptions {
            paths: 2_000,
            exec,
            ..McOptions::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| mc_value(&cir, &contract, 0.06, 0.009_217_28, opts).unwrap())
        });
    }
    group.finish();
}

fn value_curve(c: &mut Criterion) {
    let (cir, contract) = fixture();
    let sol = solve_boundary(&cir, &contract, 1e-10).unwrap();
    let xs = log_grid(sol.x_star, 1.0, 2_000);
    let mut group = c.benchmark_group("value_curve");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| sol.curve(&xs, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, value_curve);
criterion_main!(benches);
