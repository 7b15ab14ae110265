use std::f64::consts::{FRAC_PI_4, PI};

use qclab::attacks::*;
use qclab::cloning::{fixed_overlap_global, four_state, helstrom_prob, phase_cov_ideal_circuit};
use qclab::qsim::Circuit;

fn ideal_circuit_handle() -> ClonerHandle {
    ClonerHandle::Circuit { id: "ideal-circuit".into(), circuit: phase_cov_ideal_circuit(), input_wire: 0, clone_wires: [1, 2] }
}

#[test]
fn bb84_ideal_phase_covariant() {
    let d = bb84_dcrit(&ClonerHandle::PhaseCovariant { eta: FRAC_PI_4 }, EveView::Clone, Ensemble::Sifted).unwrap();
    assert!((d.d_crit - 0.146).abs() <= 0.003, "{d:?}");
    // in this configuration D_crit coincides with 1 − F_opt
    assert!((d.d_crit - (1.0 - 0.853_553_390_593_273_8)).abs() < 1e-5, "{d:?}");
    assert!((d.bob_fidelity - d.eve_fidelity).abs() < 1e-12);
}

#[test]
fn bb84_circuit_matches_analytic_map() {
    let a = bb84_dcrit(&ClonerHandle::PhaseCovariant { eta: FRAC_PI_4 }, EveView::Clone, Ensemble::Sifted).unwrap();
    let b = bb84_dcrit(&ideal_circuit_handle(), EveView::Clone, Ensemble::Sifted).unwrap();
    assert!((a.chi - b.chi).abs() < 1e-9 && (a.d_crit - b.d_crit).abs() < 1e-6, "{a:?} {b:?}");
}

#[test]
fn bb84_other_views_are_reported() {
    let h = ClonerHandle::PhaseCovariant { eta: FRAC_PI_4 };
    let avg = bb84_dcrit(&h, EveView::CloneAndAncilla, Ensemble::BasisAveraged).unwrap();
    let sifted_anc = bb84_dcrit(&h, EveView::CloneAndAncilla, Ensemble::Sifted).unwrap();
    assert!((avg.d_crit - 0.2165).abs() < 1e-3, "{avg:?}");
    assert!((sifted_anc.d_crit - 0.0791).abs() < 1e-3, "{sifted_anc:?}");
}

#[test]
fn bb84_identity_gives_half() {
    let d = bb84_dcrit(&ClonerHandle::Identity, EveView::CloneAndAncilla, Ensemble::Sifted).unwrap();
    assert!(d.chi.abs() < 1e-12);
    assert_eq!(d.d_crit, 0.5);
}

#[test]
fn bb84_monotone_in_eve_fidelity() {
    // η → π/2 moves fidelity from Bob to Eve
    let mut prev: Option<Dcrit> = None;
    for k in 0..=16 {
        let eta = FRAC_PI_4 + k as f64 * (FRAC_PI_4 - 0.01) / 16.0;
        let d = bb84_dcrit(&ClonerHandle::PhaseCovariant { eta }, EveView::Clone, Ensemble::Sifted).unwrap();
        if let Some(p) = prev {
            assert!(d.eve_fidelity >= p.eve_fidelity - 1e-12);
            assert!(d.chi >= p.chi - 1e-12);
            assert!(d.d_crit <= p.d_crit + 1e-9);
        }
        prev = Some(d);
    }
}

#[test]
fn mayers_text_pair() {
    let r = mayers_bias(&ClonerHandle::fixed_overlap(MAYERS_PHI), 1, MAYERS_PHI, MayersPair::Text).unwrap();
    // Helstrom on φ₀⊗φ₁ vs φ₁⊗ρ_c(φ₀) with the constraint-solved clone
    assert!((r.detail("p_fail").unwrap() - 0.279_572_470_2).abs() < 1e-8, "{r:?}");
    assert!((r.detection_prob - (1.0 - 0.997_495_400_045_887)).abs() < 1e-9);
    assert!((r.bias - (r.success_prob - 0.5)).abs() < 1e-15);
}

#[test]
fn mayers_game_pair_below_no_clone_ceiling() {
    let r = mayers_bias(&ClonerHandle::fixed_overlap(MAYERS_PHI), 1, MAYERS_PHI, MayersPair::Game).unwrap();
    let (p0, p1) = (four_state(MAYERS_PHI, 0, 0), four_state(MAYERS_PHI, 1, 0));
    let raw = helstrom_prob(&p0.tensor(&p1).to_density(), &p1.tensor(&p0).to_density(), 0.5, 0.5).unwrap();
    assert!((raw - 0.734_665_589_8).abs() < 1e-9);
    assert!(r.guess_prob <= raw + 1e-12);
    assert!((r.guess_prob - 0.707_263_841_5).abs() < 1e-8, "{r:?}");
}

#[test]
fn mayers_many_copies() {
    let r = mayers_bias(&ClonerHandle::fixed_overlap(MAYERS_PHI), 201, MAYERS_PHI, MayersPair::Text).unwrap();
    assert!(r.guess_prob >= 0.999);
    let mut prev = 0.0;
    for n in [1, 3, 5, 11, 51] {
        let g = majority_success(0.214, n).unwrap();
        assert!(g > prev);
        prev = g;
    }
    assert!(mayers_bias(&ClonerHandle::Forward, 0, MAYERS_PHI, MayersPair::Text).is_err());
}

#[test]
fn mayers_monte_carlo_within_three_sigma() {
    let h = ClonerHandle::fixed_overlap(MAYERS_PHI);
    let mc = simulate_p1_round(&h, MAYERS_PHI, 7, 100_000).unwrap();
    let analytic = mayers_bias(&h, 1, MAYERS_PHI, MayersPair::Game).unwrap().guess_prob;
    let sigma = (analytic * (1.0 - analytic) / 1e5).sqrt();
    assert!((mc.guess_prob - analytic).abs() <= 3.0 * sigma, "{} vs {analytic}", mc.guess_prob);
    assert!(mc.detection_prob <= 0.015);
}

#[test]
fn mayers_forward_guesses_at_random() {
    let mc = simulate_p1_round(&ClonerHandle::Forward, MAYERS_PHI, 3, 100_000).unwrap();
    assert!((mc.guess_prob - 0.5).abs() <= 0.005);
    assert_eq!(mc.detection_prob, 0.0);
}

#[test]
fn aharonov_models() {
    let phi = PI / 8.0;
    let AharonovResult::Report(i) = aharonov_bias(AharonovModel::GlobalI, phi, None).unwrap() else { panic!() };
    assert!((i.guess_prob - 0.853_553).abs() < 1e-6 && (i.bias - 0.353).abs() < 2e-3, "{i:?}");
    let AharonovResult::Report(ii) = aharonov_bias(AharonovModel::FourStateII, phi, None).unwrap() else { panic!() };
    assert!((ii.guess_prob - 0.75).abs() < 1e-12 && (ii.bias - 0.25).abs() < 1e-12, "{ii:?}");
    let AharonovResult::Bounds { lower, upper, .. } = aharonov_bias(AharonovModel::TwoStateIIBounds, phi, None).unwrap()
    else {
        panic!()
    };
    assert!((lower - 0.619).abs() < 2e-3 && (upper - 0.823).abs() < 2e-3, "{lower} {upper}");
    assert!("II_3state".parse::<AharonovModel>().is_err());
    assert!(aharonov_bias(AharonovModel::GlobalI, 0.0, None).is_err());
}

#[test]
fn aharonov_i_neumark_equals_helstrom() {
    // φ = π/4 makes the pair coincide
    for k in 1..10 {
        let phi = k as f64 * PI / 40.0;
        let AharonovResult::Report(r) = aharonov_bias(AharonovModel::GlobalI, phi, None).unwrap() else { panic!() };
        let g = ideal_global_clones(phi).unwrap();
        let pair = helstrom_prob(&g[0].to_density(), &g[3].to_density(), 0.5, 0.5).unwrap();
        assert!((r.guess_prob - pair).abs() < 1e-9, "phi {phi}: {} vs {pair}", r.guess_prob);
        assert!((r.guess_prob - r.detail("helstrom_ensembles").unwrap()).abs() < 1e-9);
        // the two-qubit cloner reaches the closed-form global fidelity
        let s = (2.0 * phi).sin();
        let f = four_state(phi, 0, 0);
        let fg = g[0].overlap_sqr(&f.tensor(&f)).unwrap();
        assert!((fg - fixed_overlap_global(s, 1, 2)).abs() < 1e-9, "phi {phi}");
    }
}

#[test]
fn aharonov_i_closed_form_versus_optimum() {
    // ½ + ½ sin 2φ only agrees with the optimum ½ + ½ cos 2φ at φ = π/8
    let small = 1e-3;
    let AharonovResult::Report(r) = aharonov_bias(AharonovModel::GlobalI, small, None).unwrap() else { panic!() };
    assert!((r.closed_form.unwrap() - 0.5).abs() < 2e-3);
    assert!((r.guess_prob - (0.5 + 0.5 * (2.0 * small).cos())).abs() < 1e-9);
}

#[test]
fn aharonov_with_simulated_cloner() {
    // Identity cloner keeps the state intact: model II sees the raw ensembles
    let phi = PI / 8.0;
    let AharonovResult::Report(r) = aharonov_bias(AharonovModel::FourStateII, phi, Some(&ClonerHandle::Identity)).unwrap() else {
        panic!()
    };
    assert!((r.guess_prob - (0.5 + 0.5 * (2.0 * phi).cos())).abs() < 1e-9);
    let id = ClonerHandle::Circuit { id: "id".into(), circuit: Circuit::new(2), input_wire: 0, clone_wires: [0, 1] };
    let AharonovResult::Report(q) = aharonov_bias(AharonovModel::GlobalI, phi, Some(&id)).unwrap() else { panic!() };
    assert!((q.guess_prob - r.guess_prob).abs() < 1e-9);
}

#[test]
fn report_csv_roundtrip() {
    let r = mayers_bias(&ClonerHandle::fixed_overlap(MAYERS_PHI), 1, MAYERS_PHI, MayersPair::Text).unwrap();
    let mut buf = Vec::new();
    write_reports(&mut buf, &[r.clone()]).unwrap();
    let mut rd = csv::Reader::from_reader(buf.as_slice());
    let row = rd.records().next().unwrap().unwrap();
    assert_eq!(&row[0], "mayers");
    assert_eq!(&row[3], r.cloner_id.as_str());
    assert!((row[4].parse::<f64>().unwrap() - r.guess_prob).abs() < 1e-9);
}
