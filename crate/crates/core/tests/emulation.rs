use qclab::emulation::*;
use qclab::qsim::linalg::{max_abs_diff, unitarity_deviation};
use qclab::qsim::{GateKind, PureState};
use qclab::seeded_rng;

fn chi_match(a: &PureState, b: &PureState) -> f64 {
    // both unnormalized in general; compare as vectors
    a.amps().iter().zip(b.amps()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn closed_form_matches_recursion_and_circuit() {
    for seed in 0..20 {
        for k in 1..=2 {
            let (_, samples, target) = random_instance(2 << (seed % 2), k + 1, seed).unwrap();
            let closed = chi_closed_form(&samples, &target, k).unwrap();
            let rec = chi_recursive(&samples, &target).unwrap();
            let sim = run_qe(&samples, &target).unwrap().chi;
            assert!(chi_match(&closed, &rec) < 1e-10, "seed {seed} k {k}");
            assert!(chi_match(&closed, &sim) < 1e-10, "seed {seed} k {k}");
        }
    }
}

#[test]
fn closed_form_rejects_three_blocks() {
    let (_, samples, target) = random_instance(2, 4, 1).unwrap();
    assert!(chi_closed_form(&samples, &target, 3).is_err());
}

#[test]
fn one_block_unity_point() {
    let r = one_block_attack(std::f64::consts::FRAC_1_SQRT_2, 4, 7).unwrap();
    assert!((r.bound - 1.0).abs() < 1e-12);
    assert!((r.simulated_fidelity - 1.0).abs() < 1e-9);
    let r = one_block_attack(1.0, 2, 7).unwrap();
    assert!((r.simulated_fidelity - 1.0).abs() < 1e-9);
    let r = one_block_attack(0.6, 2, 9).unwrap();
    assert!(r.simulated_fidelity >= r.bound - 1e-9);
}

#[test]
fn fidelity_bound_on_random_instances() {
    let mut worst = f64::INFINITY;
    for seed in 0..200u64 {
        let dim = [2, 4][seed as usize % 2];
        let k = 2 + seed as usize % 3;
        let (u, samples, target) = random_instance(dim, k, 1000 + seed).unwrap();
        let res = run_qe(&samples, &target).unwrap();
        let rho = res.output_state.unwrap();
        let f = rho.expectation(&apply_matrix(&u, &target).unwrap()).unwrap();
        worst = worst.min(f - res.stage1_success_prob.sqrt());
        let tr = res.unconditioned.trace().re;
        assert!((tr - 1.0).abs() < 1e-10);
    }
    assert!(worst >= -1e-9, "worst margin {worst}");
}

#[test]
fn orthogonal_target_never_postselects() {
    let e = |i| PureState::basis(2, i);
    let u = qclab::qsim::haar_unitary(4, &mut seeded_rng(2)).unwrap();
    let samples = EmulationSamples::from_unitary(&u, vec![e(0), e(1)], 1).unwrap();
    let res = run_qe(&samples, &e(3)).unwrap();
    assert!(res.stage1_success_prob < 1e-14);
    assert!(!res.postselected && res.output_state.is_none());
}

#[test]
fn span_target_with_balanced_reference() {
    let e0 = PureState::basis(2, 0);
    let e1 = PureState::basis(2, 1);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = PureState::from_real(&[h, h, 0.0, 0.0]).unwrap();
    let u = qclab::qsim::haar_unitary(4, &mut seeded_rng(4)).unwrap();
    let samples = EmulationSamples::from_unitary(&u, vec![e0, e1, r], 2).unwrap();
    let mut rng = seeded_rng(8);
    for _ in 0..50 {
        let c = qclab::qsim::haar_state(2, &mut rng).unwrap();
        let t = PureState::new(vec![c.amps()[0], c.amps()[1], Default::default(), Default::default()]).unwrap();
        let res = run_qe(&samples, &t).unwrap();
        assert!(res.stage1_success_prob >= 1.0 - 1e-6);
    }
}

#[test]
fn blocks_per_stage_and_unitarity() {
    let (u, samples, _) = random_instance(4, 2, 3).unwrap();
    let qc = build_qe(&samples).unwrap();
    assert_eq!(qc.n_blocks, 1);
    let refl = |c: &qclab::Circuit| c.gates().iter().filter(|g| matches!(g.kind, GateKind::ControlledReflection(_))).count();
    assert_eq!(refl(&qc.stage1), 2);
    assert_eq!(refl(&qc.stage4), 2);
    for g in qc.stage1.gates().iter().chain(qc.stage4.gates()) {
        assert!(unitarity_deviation(&g.matrix()) < 1e-10);
    }
    // out-block equals (U ⊗ I) W (U† ⊗ I)
    let w_in = w_block(&samples.inputs()[0], samples.reference()).unwrap().unitary();
    let w_out = w_block(&samples.outputs()[0], samples.reference_out()).unwrap().unitary();
    let id2 = qclab::qsim::CMatrix::identity(2, 2);
    let big_u = qclab::qsim::linalg::kron(&id2, &u);
    let conj = &big_u * w_in * big_u.adjoint();
    assert!(max_abs_diff(&conj, &w_out) < 1e-10);
}

#[test]
fn three_state_interior_maximum() {
    let (g, v) = three_state_argmax(2001, three_state_forgery_prob);
    assert!(g > 0.0 && g < std::f64::consts::FRAC_1_SQRT_2 - 1e-6);
    assert!(v > 0.0);
    let (g2, v2) = three_state_argmax(2001, three_state_forgery_unsimplified);
    assert!(g2 > 0.0 && v2 > 0.0);
}

#[test]
fn inverse_function_pipeline() {
    // f(x) = x XOR 2 on two-bit registers: invertible
    let f = |x: usize| x ^ 2;
    for seed in 0..8 {
        let (x1, xk) = (0usize, 3usize);
        let (y1, yk) = (f(x1), f(xk));
        let r = 2;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![qclab::qsim::C64::new(0.0, 0.0); 16];
        amps[x1 | (y1 << r)] += h;
        amps[xk | (yk << r)] += h;
        let pair = PureState::new(amps).unwrap();
        let conv = invert_samples([(x1, y1), (xk, yk)], &pair, &mut seeded_rng(seed)).unwrap();
        assert!((conv.outcome_prob - 0.25).abs() < 1e-12);
        let target = PureState::basis(4, yk);
        let res = run_qe(&conv.samples, &target).unwrap();
        let expected = PureState::basis(4, yk | (xk << r));
        let fid = res.output_state.unwrap().expectation(&expected).unwrap();
        assert!((fid - 1.0).abs() < 1e-9, "seed {seed} sign {}", conv.sign);
    }
}

#[test]
fn single_qubit_converter_signs() {
    // y1 = 0, yk = 1: (|0⟩ ± |1⟩)|0⟩/√2 each with probability 1/2
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let pair = PureState::from_real(&[h, 0.0, 0.0, h]).unwrap();
    let mut seen = [false; 2];
    for seed in 0..20 {
        let conv = invert_samples([(0, 0), (1, 1)], &pair, &mut seeded_rng(seed)).unwrap();
        assert!((conv.outcome_prob - 0.5).abs() < 1e-12);
        seen[(conv.sign < 0) as usize] = true;
    }
    assert!(seen[0] && seen[1]);
    let bad = PureState::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(invert_samples([(0, 0), (1, 1)], &bad, &mut seeded_rng(0)).is_err());
}

#[test]
fn product_input_is_trivial() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // y1 = yk = 1: |+⟩|1⟩
    let pair = PureState::from_real(&[0.0, 0.0, h, h]).unwrap();
    let conv = invert_samples([(0, 1), (1, 1)], &pair, &mut seeded_rng(3)).unwrap();
    assert_eq!(conv.sign, 1);
    assert!((conv.samples.reference().overlap_sqr(&PureState::basis(2, 1)).unwrap() - 1.0).abs() < 1e-12);
}
