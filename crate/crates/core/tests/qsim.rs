use proptest::prelude::*;
use rand::Rng;

use qclab::qsim::io::{read_state_csv, write_state_csv};
use qclab::qsim::{fidelity, haar_state, haar_unitary, trace_distance, Circuit, DensityMatrix, Gate, PureState};
use qclab::{seeded_rng, Rng as Chacha};

fn random_mixed(n: usize, rank: usize, rng: &mut Chacha) -> DensityMatrix {
    let parts: Vec<(f64, DensityMatrix)> =
        (0..rank).map(|_| (rng.random::<f64>() + 0.05, haar_state(1 << n, rng).unwrap().to_density())).collect();
    let total: f64 = parts.iter().map(|p| p.0).sum();
    let refs: Vec<(f64, &DensityMatrix)> = parts.iter().map(|(w, d)| (w / total, d)).collect();
    DensityMatrix::mixture(&refs).unwrap()
}

fn random_circuit(n: usize, len: usize, rng: &mut Chacha) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let a = rng.random_range(0..n);
        let b = (a + 1 + rng.random_range(0..n - 1)) % n;
        let t = rng.random::<f64>() * 6.3;
        let g = match rng.random_range(0..9) {
            0 => Gate::rx(a, t),
            1 => Gate::ry(a, t),
            2 => Gate::rz(a, t),
            3 => Gate::h(a),
            4 => Gate::y(a),
            5 => Gate::cnot(a, b),
            6 => Gate::cz(a, b),
            7 => Gate::swap(a, b),
            _ => Gate::x(a),
        };
        c.push(g).unwrap();
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circuits_preserve_norm_and_trace(seed in any::<u64>(), n in 2usize..5, len in 1usize..30) {
        let mut rng = seeded_rng(seed);
        let c = random_circuit(n, len, &mut rng);
        let psi = haar_state(1 << n, &mut rng).unwrap();
        let out = c.apply(&psi).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        let rho = random_mixed(n, 3, &mut rng);
        let tr = c.apply_density(&rho).unwrap().trace();
        prop_assert!((tr.re - 1.0).abs() < 1e-12 && tr.im.abs() < 1e-12);
        // inverse undoes the circuit
        let back = c.inverse().apply(&out).unwrap();
        prop_assert!((back.overlap_sqr(&psi).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn depolarizing_is_contractive(seed in any::<u64>(), n in 1usize..4, p in 0.0f64..1.0) {
        let mut rng = seeded_rng(seed);
        let a = random_mixed(n, 2, &mut rng);
        let b = random_mixed(n, 2, &mut rng);
        let before = trace_distance(&a, &b).unwrap();
        let after = trace_distance(&a.depolarize(p), &b.depolarize(p)).unwrap();
        prop_assert!(after <= before + 1e-12);
    }

    #[test]
    fn fidelity_trace_distance_sandwich(seed in any::<u64>(), n in 1usize..4, rank in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let a = random_mixed(n, rank, &mut rng);
        let b = random_mixed(n, 2, &mut rng);
        let f = fidelity(&a, &b).unwrap();
        let d = trace_distance(&a, &b).unwrap();
        prop_assert!(1.0 - f.sqrt() <= d + 1e-7, "F={f} D={d}");
        prop_assert!(d <= (1.0 - f).sqrt() + 1e-7, "F={f} D={d}");
        prop_assert!((fidelity(&b, &a).unwrap() - f).abs() < 1e-7);
    }

    #[test]
    fn partial_trace_keeps_trace_and_positivity(seed in any::<u64>(), n in 2usize..5, mask in 1u32..15) {
        let mut rng = seeded_rng(seed);
        let keep: Vec<usize> = (0..n).filter(|w| mask >> w & 1 == 1).collect();
        prop_assume!(!keep.is_empty());
        let rho = random_mixed(n, 3, &mut rng);
        let red = rho.partial_trace(&keep).unwrap();
        prop_assert!((red.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(red.eigenvalues().iter().all(|&l| l > -1e-12));
        // pure-state shortcut agrees with the density route
        let psi = haar_state(1 << n, &mut rng).unwrap();
        let r1 = psi.reduced(&keep).unwrap();
        let r2 = psi.to_density().partial_trace(&keep).unwrap();
        prop_assert!(trace_distance(&r1, &r2).unwrap() < 1e-12);
    }
}

#[test]
fn fidelity_sandwich_thousand_pairs() {
    let mut rng = seeded_rng(1000);
    for i in 0..1000 {
        let n = 1 + i % 3;
        let a = random_mixed(n, 1 + i % 4, &mut rng);
        let b = random_mixed(n, 1 + (i / 4) % 4, &mut rng);
        let (f, d) = (fidelity(&a, &b).unwrap(), trace_distance(&a, &b).unwrap());
        assert!(1.0 - f.sqrt() <= d + 1e-7 && d <= (1.0 - f).sqrt() + 1e-7, "pair {i}: F={f} D={d}");
    }
}

#[test]
fn haar_statistics() {
    let mut rng = seeded_rng(3);
    let d = 8;
    let trials = 20_000;
    let mean: f64 = (0..trials).map(|_| haar_state(d, &mut rng).unwrap().amps()[0].norm_sqr()).sum::<f64>() / trials as f64;
    // |⟨0|ψ⟩|² ~ Beta(1, 7): mean 1/8, sd 0.11
    assert!((mean - 0.125).abs() < 4.0 * 0.11 / (trials as f64).sqrt());
    let u = haar_unitary(d, &mut rng).unwrap();
    assert!(qclab::qsim::linalg::unitarity_deviation(&u) < 1e-12);
    assert!(haar_state(6, &mut rng).is_err());
}

#[test]
fn circuit_text_roundtrip() {
    let mut rng = seeded_rng(4);
    let c = random_circuit(3, 25, &mut rng);
    let text = c.to_text().unwrap();
    let back = Circuit::from_text(&text).unwrap();
    assert_eq!(back.len(), c.len());
    assert!(qclab::qsim::linalg::max_abs_diff(&back.unitary(), &c.unitary()) < 1e-14);
    assert!(Circuit::from_text("# qubits 2\nfoo 0\n").is_err());
    assert!(Circuit::from_text("# qubits 2\ncnot 0,5\n").is_err());
}

#[test]
fn state_csv_roundtrip() {
    let psi = haar_state(8, &mut seeded_rng(5)).unwrap();
    let mut buf = Vec::new();
    write_state_csv(&psi, &mut buf).unwrap();
    let back = read_state_csv(buf.as_slice()).unwrap();
    assert_eq!(back, psi);
    assert!(read_state_csv("re,im\n1,0\n0,0\n0,0\n".as_bytes()).is_err());
}

#[test]
fn little_endian_order() {
    // X on wire 0 of two qubits sets bit 0
    let out = Circuit::new(2).with(Gate::x(0)).unwrap().apply(&PureState::zero(2)).unwrap();
    assert!((out.amps()[1].re - 1.0).abs() < 1e-15);
    let t = PureState::basis(1, 1).tensor(&PureState::basis(1, 0));
    assert!((t.amps()[1].re - 1.0).abs() < 1e-15);
}
