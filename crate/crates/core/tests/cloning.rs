use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use proptest::prelude::*;

use qclab::cloning::*;
use qclab::qsim::{fidelity_pure, DensityMatrix, PureState};

fn opt(family: CloneFamily, m: usize, n: usize, fig: Figure) -> f64 {
    optimal_fidelity(&CloneSpec::new(family, m, n, fig).unwrap()).unwrap()
}

#[test]
fn formula_table() {
    assert!((opt(CloneFamily::Universal, 1, 2, Figure::Local) - 5.0 / 6.0).abs() < 1e-15);
    assert!((opt(CloneFamily::PhaseCovariant, 1, 2, Figure::Local) - 0.5 * (1.0 + FRAC_1_SQRT_2)).abs() < 1e-15);
    assert!((opt(CloneFamily::FixedOverlap(0.5), 1, 2, Figure::Local) - 0.987).abs() < 1e-3);
    let s = (PI / 9.0).cos();
    assert!((opt(CloneFamily::FixedOverlap(s), 1, 2, Figure::Local) - 0.997).abs() < 1e-3);
    // odd N: ½(1 + (N+1)/(2N))
    assert!((opt(CloneFamily::PhaseCovariant, 1, 3, Figure::Local) - 5.0 / 6.0).abs() < 1e-15);
}

#[test]
fn ordering_of_optima() {
    let pc = opt(CloneFamily::PhaseCovariant, 1, 2, Figure::Local);
    let ul = opt(CloneFamily::Universal, 1, 2, Figure::Local);
    let ug = opt(CloneFamily::Universal, 1, 2, Figure::Global);
    assert!(pc > ul && ul > ug);
}

#[test]
fn global_optimal_is_local_lower_bound() {
    for i in 0..50 {
        let s = 0.01 + 0.97 * i as f64 / 49.0;
        let lg = local_fidelity_of_global_optimal(s, 1, 2).unwrap();
        assert!(lg <= fixed_overlap_local_1to2(s) + 1e-12, "s={s}: {lg}");
    }
}

#[test]
fn global_phase_covariant_argmax() {
    let best = (0..1001)
        .map(|i| std::f64::consts::FRAC_PI_2 * i as f64 / 1000.0)
        .max_by(|a, b| phase_cov_global_fidelity(*a).partial_cmp(&phase_cov_global_fidelity(*b)).unwrap())
        .unwrap();
    assert!((best - FRAC_PI_4).abs() < 1e-12);
    let out = phase_cov_transformation(FRAC_PI_4, &PureState::equatorial(0.4)).unwrap();
    for c in &out.clones {
        assert!((fidelity_pure(c, &PureState::equatorial(0.4)).unwrap() - 0.5 * (1.0 + FRAC_1_SQRT_2)).abs() < 1e-12);
    }
}

#[test]
fn ideal_circuit_over_equator() {
    let mut sum = [0.0; 2];
    for k in 0..64 {
        let psi = PureState::equatorial(2.0 * PI * k as f64 / 64.0);
        let out = phase_cov_ideal_output(&psi).unwrap();
        for (s, c) in sum.iter_mut().zip(&out.clones) {
            *s += fidelity_pure(c, &psi).unwrap() / 64.0;
        }
    }
    assert!((sum[0] - 0.853553).abs() < 1e-4);
    assert!((sum[0] - sum[1]).abs() <= 1e-8);
}

#[test]
fn fixed_overlap_clone_reaches_optimum() {
    for s in [0.1, 0.5, (PI / 9.0).cos(), 0.95] {
        let (p0, p1) = fixed_overlap_pair(s).unwrap();
        for (which, p) in [(0, &p0), (1, &p1)] {
            let c = fixed_overlap_clone(s, which).unwrap();
            assert!(c.rho.eigenvalues().iter().all(|&l| l > -1e-12));
            assert!((fidelity_pure(&c.rho, p).unwrap() - fixed_overlap_local_1to2(s)).abs() < 1e-10);
        }
        let (g0, g1) = fixed_overlap_global_clones(&p0, &p1).unwrap();
        assert!((g0.inner(&g1).unwrap().re - s).abs() < 1e-12);
        let fg = 0.5 * (g0.overlap_sqr(&p0.tensor(&p0)).unwrap() + g1.overlap_sqr(&p1.tensor(&p1)).unwrap());
        assert!((fg - fixed_overlap_global(s, 1, 2)).abs() < 1e-10);
    }
}

#[test]
fn four_state_clone_fidelity() {
    let phi = PI / 8.0;
    let f = 0.5 * (1.0 + ((2.0 * phi).sin().powi(4) + (2.0 * phi).cos().powi(4)).sqrt());
    for x in 0..2 {
        for a in 0..2 {
            let rho = four_state_clone(phi, x, a).unwrap();
            assert!((fidelity_pure(&rho, &four_state(phi, x, a)).unwrap() - f).abs() < 1e-12);
        }
    }
    assert!(four_state_clone(0.0, 0, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn helstrom_symmetric(a in 0.0f64..PI, b in 0.0f64..PI, r in 0.0f64..1.0, q in 0.0f64..1.0) {
        let r1 = PureState::bloch(a, 0.3).unwrap().to_density().depolarize(r);
        let r2 = PureState::bloch(b, 1.1).unwrap().to_density();
        let p = helstrom_prob(&r1, &r2, q, 1.0 - q).unwrap();
        let s = helstrom_prob(&r2, &r1, 1.0 - q, q).unwrap();
        prop_assert!((p - s).abs() < 1e-12);
        prop_assert!(p >= q.max(1.0 - q) - 1e-12 && p <= 1.0);
    }

    #[test]
    fn pure_helstrom_closed_form(t in 0.0f64..std::f64::consts::FRAC_PI_2) {
        let a = PureState::from_real(&[1.0, 0.0]).unwrap().to_density();
        let b = PureState::from_real(&[t.cos(), t.sin()]).unwrap().to_density();
        let p = helstrom_prob(&a, &b, 0.5, 0.5).unwrap();
        prop_assert!((p - 0.5 * (1.0 + t.sin())).abs() < 1e-12);
    }

    #[test]
    fn clone_outputs_are_states(eta in 0.0f64..std::f64::consts::FRAC_PI_2, th in 0.0f64..PI, ph in 0.0f64..6.28) {
        let psi = PureState::bloch(th, ph).unwrap();
        let out = phase_cov_transformation(eta, &psi).unwrap();
        for c in &out.clones {
            prop_assert!((c.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(c.eigenvalues().iter().all(|&l| l > -1e-12));
        }
        let _: &DensityMatrix = &out.global_state;
    }
}
