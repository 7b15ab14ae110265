use std::f64::consts::PI;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;

use qclab::cloning::phase_cov_ideal_circuit;
use qclab::equality::{swap_accept_analytic, swap_accept_circuit};
use qclab::qsim::{fidelity, haar_state, Circuit, Gate};
use qclab::seeded_rng;
use qclab::varqlone::{cost_gradient, CloneTask, CostKind, StateFamily};

fn layered(n: usize, layers: usize) -> Circuit {
    let mut rng = seeded_rng(1);
    let mut c = Circuit::new(n);
    for _ in 0..layers {
        for q in 0..n {
            c.push(Gate::ry(q, rng.random::<f64>() * PI)).unwrap();
            c.push(Gate::rz(q, rng.random::<f64>() * PI)).unwrap();
        }
        for q in 0..n - 1 {
            c.push(Gate::cnot(q, q + 1)).unwrap();
        }
    }
    c
}

fn circuits(cr: &mut Criterion) {
    let mut g = cr.benchmark_group("circuit_apply");
    for n in [4usize, 8, 12] {
        let c = layered(n, 4);
        let psi = haar_state(1 << n, &mut seeded_rng(2)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| c.apply(&psi).unwrap()));
    }
    g.finish();
}

fn metrics(cr: &mut Criterion) {
    let mut rng = seeded_rng(3);
    let mut g = cr.benchmark_group("fidelity");
    for n in [1usize, 3, 5] {
        let a = haar_state(1 << n, &mut rng).unwrap().to_density();
        let b = a.depolarize(0.3);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |bch, _| bch.iter(|| fidelity(&a, &b).unwrap()));
    }
    g.finish();

    let psi = haar_state(4, &mut rng).unwrap();
    let rho = haar_state(4, &mut rng).unwrap().to_density();
    cr.bench_function("swap_accept_analytic", |b| b.iter(|| swap_accept_analytic(&rho, &psi).unwrap()));
    cr.bench_function("swap_accept_circuit", |b| b.iter(|| swap_accept_circuit(&rho, &psi).unwrap()));
}

fn training(cr: &mut Criterion) {
    let task = CloneTask::new(StateFamily::PhaseCovariant, 3, vec![0], vec![1, 2]).unwrap();
    let c = phase_cov_ideal_circuit();
    cr.bench_function("phase_cov_local_gradient", |b| b.iter(|| cost_gradient(&c, &task, CostKind::Local).unwrap()));
}

criterion_group!(benches, circuits, metrics, training);
criterion_main!(benches);
