//! Cloning attacks on BB84 and two coin-flipping protocols.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};

use crate::cloning::{
    fixed_overlap_clone_for, fixed_overlap_coefficients, fixed_overlap_global_clones, fixed_overlap_local_1to2,
    four_state, four_state_clone, four_state_shrinking, helstrom_prob, phase_cov_transformation,
};
use crate::error::{Error, Result};
use crate::qsim::linalg::{c, eigh, CMatrix};
use crate::qsim::{Circuit, DensityMatrix, PureState};

/// Where the two clones come from.
#[derive(Debug, Clone)]
pub enum ClonerHandle {
    /// Analytic η-family phase-covariant map (clones on wires 0, 1, ancilla on 2).
    PhaseCovariant { eta: f64 },
    /// Optimal symmetric local cloner for a fixed pair; only single-clone states exist.
    FixedOverlap { states: [PureState; 2] },
    /// Simulated circuit; every wire that is neither input nor clone is treated as ancilla.
    Circuit { id: String, circuit: Circuit, input_wire: usize, clone_wires: [usize; 2] },
    /// First clone is the input, second is |0⟩.
    Identity,
    /// Bob returns the qubit untouched, keeps nothing and guesses at random.
    Forward,
}

/// States produced by a cloner for one input.
#[derive(Debug, Clone)]
pub struct ClonerOutput {
    pub first: DensityMatrix,
    pub second: DensityMatrix,
    /// Second clone together with any ancilla (second clone on the low wire).
    pub second_with_ancilla: DensityMatrix,
    /// Joint state of both clones, when the cloner defines one.
    pub global: Option<DensityMatrix>,
}

impl ClonerHandle {
    /// Local cloner for cos φ|0⟩ ± sin φ|1⟩.
    pub fn fixed_overlap(phi: f64) -> Self {
        ClonerHandle::FixedOverlap { states: [four_state(phi, 0, 0), four_state(phi, 1, 0)] }
    }

    pub fn id(&self) -> String {
        match self {
            ClonerHandle::PhaseCovariant { eta } => format!("phasecov-eta{eta:.6}"),
            ClonerHandle::FixedOverlap { states } => {
                let s = states[0].inner(&states[1]).map(|z| z.re).unwrap_or(f64::NAN);
                format!("fixed-overlap-s{s:.6}")
            }
            ClonerHandle::Circuit { id, .. } => id.clone(),
            ClonerHandle::Identity => "identity".into(),
            ClonerHandle::Forward => "forward".into(),
        }
    }

    pub fn apply(&self, psi: &PureState) -> Result<ClonerOutput> {
        if psi.n() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: psi.n() });
        }
        match self {
            ClonerHandle::PhaseCovariant { eta } => {
                let out = phase_cov_transformation(*eta, psi)?;
                Ok(ClonerOutput {
                    first: out.clones[0].clone(),
                    second: out.clones[1].clone(),
                    second_with_ancilla: out.global_state.partial_trace(&[1, 2])?,
                    global: Some(out.global_state.partial_trace(&[0, 1])?),
                })
            }
            ClonerHandle::FixedOverlap { states } => {
                let which = if psi.overlap_sqr(&states[0])? >= psi.overlap_sqr(&states[1])? { 0 } else { 1 };
                if psi.overlap_sqr(&states[which])? < 1.0 - 1e-9 {
                    return Err(Error::InvalidState("input is not one of the cloner's pair".into()));
                }
                let rho = fixed_overlap_clone_for(&states[0], &states[1], which)?.rho;
                Ok(ClonerOutput { first: rho.clone(), second: rho.clone(), second_with_ancilla: rho, global: None })
            }
            ClonerHandle::Circuit { circuit, input_wire, clone_wires, .. } => {
                let n = circuit.n();
                if *input_wire >= n || clone_wires.iter().any(|&w| w >= n) || clone_wires[0] == clone_wires[1] {
                    return Err(Error::InvalidWires(format!("input {input_wire}, clones {clone_wires:?} on {n} qubits")));
                }
                let mut amps = vec![crate::qsim::linalg::ZERO; 1 << n];
                amps[0] = psi.amps()[0];
                amps[1 << input_wire] = psi.amps()[1];
                let out = circuit.apply(&PureState::new(amps)?)?;
                let anc: Vec<usize> = (0..n).filter(|w| !clone_wires.contains(w)).collect();
                // second clone goes on the low wire of the kept register
                let mut kept = vec![clone_wires[1]];
                kept.extend(&anc);
                let second_with_ancilla = reorder_reduced(&out, &kept)?;
                Ok(ClonerOutput {
                    first: out.reduced(&[clone_wires[0]])?,
                    second: out.reduced(&[clone_wires[1]])?,
                    second_with_ancilla,
                    global: Some(reorder_reduced(&out, clone_wires)?),
                })
            }
            ClonerHandle::Identity | ClonerHandle::Forward => {
                let zero = PureState::zero(1).to_density();
                Ok(ClonerOutput {
                    first: psi.to_density(),
                    second: zero.clone(),
                    second_with_ancilla: zero,
                    global: Some(psi.tensor(&PureState::zero(1)).to_density()),
                })
            }
        }
    }
}

/// Reduced state on `wires` with `wires[k]` mapped to bit k.
fn reorder_reduced(state: &PureState, wires: &[usize]) -> Result<DensityMatrix> {
    let n = state.n();
    let rest: Vec<usize> = (0..n).filter(|w| !wires.contains(w)).collect();
    let mut perm: Vec<usize> = wires.to_vec();
    perm.extend(&rest);
    // new bit k takes old wire perm[k]
    let mut amps = vec![crate::qsim::linalg::ZERO; state.dim()];
    for (old, &a) in state.amps().iter().enumerate() {
        let new = perm.iter().enumerate().fold(0usize, |acc, (k, &w)| acc | (((old >> w) & 1) << k));
        amps[new] = a;
    }
    let permuted = PureState::new(amps)?;
    permuted.reduced(&(0..wires.len()).collect::<Vec<_>>())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackReport {
    pub protocol: String,
    pub model: String,
    /// φ for the coin-flipping attacks, η or s for BB84 depending on the cloner.
    pub param: f64,
    pub cloner_id: String,
    pub guess_prob: f64,
    /// Guess and pass verification; equal to `guess_prob` when nothing is returned.
    pub success_prob: f64,
    pub bias: f64,
    pub detection_prob: f64,
    pub closed_form: Option<f64>,
    pub trials: Option<usize>,
    pub breakdown: Vec<(String, f64)>,
}

impl AttackReport {
    fn new(protocol: &str, model: &str, param: f64, cloner_id: String) -> Self {
        Self {
            protocol: protocol.into(),
            model: model.into(),
            param,
            cloner_id,
            guess_prob: 0.5,
            success_prob: 0.5,
            bias: 0.0,
            detection_prob: 0.0,
            closed_form: None,
            trials: None,
            breakdown: Vec::new(),
        }
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.breakdown.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

pub const REPORT_HEADER: [&str; 11] = [
    "protocol",
    "model",
    "param",
    "cloner",
    "guess_prob",
    "success_prob",
    "bias",
    "detection_prob",
    "closed_form",
    "trials",
    "detail",
];

impl AttackReport {
    pub fn csv_fields(&self) -> Vec<String> {
        let detail: Vec<String> = self.breakdown.iter().map(|(k, v)| format!("{k}={v:.10}")).collect();
        vec![
            self.protocol.clone(),
            self.model.clone(),
            format!("{:.10}", self.param),
            self.cloner_id.clone(),
            format!("{:.10}", self.guess_prob),
            format!("{:.10}", self.success_prob),
            format!("{:.10}", self.bias),
            format!("{:.10}", self.detection_prob),
            self.closed_form.map(|v| format!("{v:.10}")).unwrap_or_default(),
            self.trials.map(|t| t.to_string()).unwrap_or_default(),
            detail.join(";"),
        ]
    }
}

pub fn write_reports<W: Write>(w: W, reports: &[AttackReport]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(REPORT_HEADER)?;
    for r in reports {
        wr.write_record(r.csv_fields())?;
    }
    wr.flush()?;
    Ok(())
}

// ---------------------------------------------------------------- BB84

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EveView {
    /// Eve's second clone only.
    Clone,
    /// Second clone plus the cloner's ancilla.
    CloneAndAncilla,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    /// Holevo quantity per basis after sifting, averaged over X and Y.
    Sifted,
    /// Bit 0 ↦ {|+⟩, |+i⟩}, bit 1 ↦ {|−⟩, |−i⟩}, both bases mixed.
    BasisAveraged,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dcrit {
    pub chi: f64,
    pub d_crit: f64,
    pub bob_fidelity: f64,
    pub eve_fidelity: f64,
}

pub const DCRIT_TOL: f64 = 1e-6;

pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn holevo2(r0: &DensityMatrix, r1: &DensityMatrix) -> Result<f64> {
    let avg = DensityMatrix::mixture(&[(0.5, r0), (0.5, r1)])?;
    Ok(avg.entropy() - 0.5 * r0.entropy() - 0.5 * r1.entropy())
}

/// Root of 1 − H(D) − χ on (0, 1/2].
pub fn solve_dcrit(chi: f64) -> Result<f64> {
    if !(chi.is_finite()) || chi > 1.0 + 1e-12 {
        return Err(Error::Infeasible(format!("Holevo quantity {chi} exceeds 1, no critical error rate")));
    }
    if chi <= 0.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > DCRIT_TOL * 1e-3 {
        let m = 0.5 * (lo + hi);
        if 1.0 - binary_entropy(m) - chi > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Critical QBER of an individual cloning attack on the X–Y equatorial BB84 states.
pub fn bb84_dcrit(cloner: &ClonerHandle, view: EveView, ensemble: Ensemble) -> Result<Dcrit> {
    let states: Vec<PureState> = [0.0, PI, 0.5 * PI, 1.5 * PI].iter().map(|&e| PureState::equatorial(e)).collect();
    let outs = states.iter().map(|s| cloner.apply(s)).collect::<Result<Vec<_>>>()?;
    let eve: Vec<&DensityMatrix> = outs
        .iter()
        .map(|o| match view {
            EveView::Clone => &o.second,
            EveView::CloneAndAncilla => &o.second_with_ancilla,
        })
        .collect();
    // order: +, −, +i, −i
    let chi = match ensemble {
        Ensemble::Sifted => 0.5 * (holevo2(eve[0], eve[1])? + holevo2(eve[2], eve[3])?),
        Ensemble::BasisAveraged => {
            let r0 = DensityMatrix::mixture(&[(0.5, eve[0]), (0.5, eve[2])])?;
            let r1 = DensityMatrix::mixture(&[(0.5, eve[1]), (0.5, eve[3])])?;
            holevo2(&r0, &r1)?
        }
    };
    let chi = chi.max(0.0);
    let mean = |f: &dyn Fn(&ClonerOutput) -> &DensityMatrix| -> Result<f64> {
        let mut acc = 0.0;
        for (s, o) in states.iter().zip(&outs) {
            acc += f(o).expectation(s)?;
        }
        Ok(acc / states.len() as f64)
    };
    Ok(Dcrit {
        chi,
        d_crit: solve_dcrit(chi)?,
        bob_fidelity: mean(&|o| &o.first)?,
        eve_fidelity: mean(&|o| &o.second)?,
    })
}

// ---------------------------------------------------------------- Mayers

pub const MAYERS_PHI: f64 = PI / 18.0;

/// Which pair Bob is taken to discriminate in the single-round analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MayersPair {
    /// φ₀⊗φ₁ against φ₁⊗ρ_c(φ₀), with the kept clone alone.
    Text,
    /// φ₀⊗ρ_c(φ₁) against φ₁⊗ρ_c(φ₀): the untouched qubit plus the kept clone and ancilla.
    Game,
}

/// Majority-vote success over `n` independent rounds, ties broken by a coin.
pub fn majority_success(p_fail: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange("number of copies must be positive".into()));
    }
    if !(0.0..=1.0).contains(&p_fail) {
        return Err(Error::OutOfRange(format!("p_fail = {p_fail}")));
    }
    let p = 1.0 - p_fail;
    // binomial pmf by recurrence in log space
    let ln = |x: f64| if x > 0.0 { x.ln() } else { f64::NEG_INFINITY };
    let mut log_c = 0.0f64;
    let mut total = 0.0;
    for k in 0..=n {
        if k > 0 {
            log_c += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        let term = (log_c + k as f64 * ln(p) + (n - k) as f64 * ln(p_fail)).exp();
        if 2 * k > n {
            total += term;
        } else if 2 * k == n {
            total += 0.5 * term;
        }
    }
    Ok(total.clamp(0.0, 1.0))
}

fn mayers_pairs(cloner: &ClonerHandle, phi: f64, pair: MayersPair) -> Result<(DensityMatrix, DensityMatrix)> {
    let (p0, p1) = (four_state(phi, 0, 0), four_state(phi, 1, 0));
    let o0 = cloner.apply(&p0)?;
    match pair {
        MayersPair::Text => Ok((p0.to_density().tensor(&p1.to_density()), p1.to_density().tensor(&o0.second))),
        MayersPair::Game => {
            let o1 = cloner.apply(&p1)?;
            Ok((p0.to_density().tensor(&o1.second_with_ancilla), p1.to_density().tensor(&o0.second_with_ancilla)))
        }
    }
}

/// Single-round guess via Helstrom, detection from the returned clone, n-round majority.
pub fn mayers_bias(cloner: &ClonerHandle, n: usize, phi: f64, pair: MayersPair) -> Result<AttackReport> {
    if n == 0 {
        return Err(Error::OutOfRange("number of copies must be positive".into()));
    }
    let mut rep = AttackReport::new("mayers", &format!("{pair:?}").to_lowercase(), phi, cloner.id());
    let (guess, detection) = if matches!(cloner, ClonerHandle::Forward) {
        (0.5, 0.0)
    } else {
        let (r1, r2) = mayers_pairs(cloner, phi, pair)?;
        let guess = helstrom_prob(&r1, &r2, 0.5, 0.5)?;
        let (p0, p1) = (four_state(phi, 0, 0), four_state(phi, 1, 0));
        let f0 = cloner.apply(&p0)?.first.expectation(&p0)?;
        let f1 = cloner.apply(&p1)?.first.expectation(&p1)?;
        (guess, 1.0 - 0.5 * (f0 + f1))
    };
    let p_fail = 1.0 - guess;
    let guess_n = majority_success(p_fail, n)?;
    rep.guess_prob = guess_n;
    rep.detection_prob = detection.clamp(0.0, 1.0);
    rep.success_prob = guess_n * (1.0 - rep.detection_prob);
    rep.bias = rep.success_prob - 0.5;
    rep.breakdown = vec![
        ("p_fail".into(), p_fail),
        ("single_round_guess".into(), guess),
        ("copies".into(), n as f64),
        ("clone_fidelity".into(), 1.0 - detection),
    ];
    Ok(rep)
}

/// Projector onto the positive part of q₁ρ₁ − q₂ρ₂.
pub fn helstrom_projector(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<CMatrix> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch { expected: rho1.dim(), got: rho2.dim() });
    }
    let diff = rho1.matrix() - rho2.matrix();
    let (vals, vecs) = eigh(&diff);
    let d = rho1.dim();
    let mut p = CMatrix::zeros(d, d);
    for (k, &v) in vals.iter().enumerate() {
        if v > 0.0 {
            let col = vecs.column(k);
            p += &col * col.adjoint();
        }
    }
    Ok(p)
}

fn prob(proj: &CMatrix, rho: &DensityMatrix) -> f64 {
    (proj * rho.matrix()).trace().re.clamp(0.0, 1.0)
}

/// Monte Carlo of one round of the attack. Bob holds the untouched qubit and the kept clone.
pub fn simulate_p1_round(cloner: &ClonerHandle, phi: f64, seed: u64, trials: usize) -> Result<AttackReport> {
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be positive".into()));
    }
    let mut rng = crate::Rng::seed_from_u64(seed);
    let mut rep = AttackReport::new("mayers", "monte-carlo", phi, cloner.id());
    let st = [four_state(phi, 0, 0), four_state(phi, 1, 0)];
    // table[e][c] = (P(correct guess), P(detection)); e = announced a⊕c
    let mut table = [[(0.5, 0.0); 2]; 2];
    if !matches!(cloner, ClonerHandle::Forward) {
        let outs = [cloner.apply(&st[0])?, cloner.apply(&st[1])?];
        for (e, row) in table.iter_mut().enumerate() {
            // pair (first, second) = (φ_c, φ_{1−c}); e = 0 returns the second qubit
            let view = |c: usize| -> DensityMatrix {
                let (first, second) = (c, 1 - c);
                let (kept, returned) = if e == 0 { (first, second) } else { (second, first) };
                st[kept].to_density().tensor(&outs[returned].second_with_ancilla)
            };
            let (h0, h1) = (view(0), view(1));
            let proj = helstrom_projector(&h0, &h1)?;
            for (cc, cell) in row.iter_mut().enumerate() {
                let returned = if e == 0 { 1 - cc } else { cc };
                let p_correct = if cc == 0 { prob(&proj, &h0) } else { 1.0 - prob(&proj, &h1) };
                let det = 1.0 - outs[returned].first.expectation(&st[returned])?;
                *cell = (p_correct, det.clamp(0.0, 1.0));
            }
        }
    }
    let (mut correct, mut detected, mut success) = (0usize, 0usize, 0usize);
    for _ in 0..trials {
        let c = rng.random_range(0..2usize);
        let e = rng.random_range(0..2usize);
        let (pc, pd) = table[e][c];
        let ok = rng.random::<f64>() < pc;
        let caught = rng.random::<f64>() < pd;
        correct += ok as usize;
        detected += caught as usize;
        success += (ok && !caught) as usize;
    }
    let t = trials as f64;
    rep.guess_prob = correct as f64 / t;
    rep.detection_prob = detected as f64 / t;
    rep.success_prob = success as f64 / t;
    rep.bias = rep.success_prob - 0.5;
    rep.trials = Some(trials);
    let analytic = table.iter().flatten().map(|x| x.0).sum::<f64>() / 4.0;
    rep.closed_form = Some(analytic);
    rep.breakdown = vec![("analytic_guess".into(), analytic), ("guess_sigma".into(), (analytic * (1.0 - analytic) / t).sqrt())];
    Ok(rep)
}

// ---------------------------------------------------------------- Aharonov

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AharonovModel {
    GlobalI,
    FourStateII,
    TwoStateIIBounds,
}

impl FromStr for AharonovModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I_global" | "I" => Ok(AharonovModel::GlobalI),
            "II_4state" => Ok(AharonovModel::FourStateII),
            "II_2state_bounds" | "II_2state" => Ok(AharonovModel::TwoStateIIBounds),
            other => Err(Error::Parse(format!("unsupported attack model '{other}'"))),
        }
    }
}

impl fmt::Display for AharonovModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AharonovModel::GlobalI => "I_global",
            AharonovModel::FourStateII => "II_4state",
            AharonovModel::TwoStateIIBounds => "II_2state_bounds",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AharonovResult {
    Report(AttackReport),
    Bounds { lower: f64, upper: f64, f_local: f64, s: f64 },
}

const KEYS: [(u8, u8); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

/// Global clone states of the optimal two-qubit cloner for the pair {φ₀₀, φ₁₁}, extended linearly to all four inputs.
pub fn ideal_global_clones(phi: f64) -> Result<Vec<PureState>> {
    let (f00, f11) = (four_state(phi, 0, 0), four_state(phi, 1, 1));
    let (g00, g11) = fixed_overlap_global_clones(&f00, &f11)?;
    // express each input as x·φ₀₀ + y·φ₁₁ (real 2×2 solve)
    let (a, b) = (f00.amps(), f11.amps());
    let det = a[0].re * b[1].re - b[0].re * a[1].re;
    KEYS.iter()
        .map(|&(x, k)| {
            let v = four_state(phi, x, k);
            let (v0, v1) = (v.amps()[0].re, v.amps()[1].re);
            let cx = (v0 * b[1].re - b[0].re * v1) / det;
            let cy = (a[0].re * v1 - v0 * a[1].re) / det;
            let amps = g00.amps().iter().zip(g11.amps()).map(|(p, q)| p * cx + q * cy).collect();
            PureState::normalized(amps)
        })
        .collect()
}

/// Measurement {|v⟩⟨v|, I − |v⟩⟨v|} with |v⟩ placed symmetrically between two pure states.
pub fn neumark_projector(psi0: &PureState, psi1: &PureState) -> Result<CMatrix> {
    let ov = psi0.inner(psi1)?;
    // align phases so the overlap is real
    let ph = if ov.norm() > 1e-15 { ov.conj() / ov.norm() } else { c(1.0, 0.0) };
    let a = psi0.as_dvector();
    let b = psi1.as_dvector() * ph;
    let e1 = (&a + &b) / c((&a + &b).norm(), 0.0);
    let diff = &a - &b;
    if diff.norm() < 1e-12 {
        return Err(Error::InvalidState("states coincide".into()));
    }
    let e2 = &diff / c(diff.norm(), 0.0);
    let v = (e1 + e2) / c(std::f64::consts::SQRT_2, 0.0);
    Ok(&v * v.adjoint())
}

pub fn aharonov_bias(model: AharonovModel, phi: f64, cloner: Option<&ClonerHandle>) -> Result<AharonovResult> {
    if !(phi > 0.0 && phi <= PI / 4.0 + 1e-12) {
        return Err(Error::OutOfRange(format!("phi = {phi} outside (0, pi/4]")));
    }
    let id = cloner.map(|c| c.id()).unwrap_or_else(|| "ideal".into());
    let s = (2.0 * phi).sin();
    match model {
        AharonovModel::GlobalI => {
            let globals: Vec<DensityMatrix> = match cloner {
                None => ideal_global_clones(phi)?.iter().map(|g| g.to_density()).collect(),
                Some(cl) => KEYS
                    .iter()
                    .map(|&(x, a)| {
                        cl.apply(&four_state(phi, x, a))?
                            .global
                            .ok_or_else(|| Error::NoClosedForm("cloner has no joint clone state".into()))
                    })
                    .collect::<Result<_>>()?,
            };
            // KEYS order: 00, 10 encode a = 0; 01, 11 encode a = 1
            let r0 = DensityMatrix::mixture(&[(0.5, &globals[0]), (0.5, &globals[1])])?;
            let r1 = DensityMatrix::mixture(&[(0.5, &globals[2]), (0.5, &globals[3])])?;
            let helstrom = helstrom_prob(&r0, &r1, 0.5, 0.5)?;
            let pure = globals[0].purity() > 1.0 - 1e-9 && globals[3].purity() > 1.0 - 1e-9;
            let proj = if pure {
                let v00 = dominant_vector(&globals[0]);
                let v11 = dominant_vector(&globals[3]);
                neumark_projector(&v00, &v11)?
            } else {
                helstrom_projector(&r0, &r1)?
            };
            let guess = 0.25 * (prob(&proj, &globals[0]) + prob(&proj, &globals[1]))
                + 0.25 * (2.0 - prob(&proj, &globals[2]) - prob(&proj, &globals[3]));
            let mut rep = AttackReport::new("aharonov", "I_global", phi, id);
            rep.guess_prob = guess;
            rep.success_prob = guess;
            rep.bias = guess - 0.5;
            rep.closed_form = Some(0.5 + 0.5 * s);
            rep.breakdown = vec![("helstrom_ensembles".into(), helstrom), ("neumark".into(), pure as u8 as f64)];
            Ok(AharonovResult::Report(rep))
        }
        AharonovModel::FourStateII => {
            let clones: Vec<DensityMatrix> = KEYS
                .iter()
                .map(|&(x, a)| match cloner {
                    None => four_state_clone(phi, x, a),
                    Some(cl) => Ok(cl.apply(&four_state(phi, x, a))?.first),
                })
                .collect::<Result<_>>()?;
            let r0 = DensityMatrix::mixture(&[(0.5, &clones[0]), (0.5, &clones[1])])?;
            let r1 = DensityMatrix::mixture(&[(0.5, &clones[2]), (0.5, &clones[3])])?;
            let guess = helstrom_prob(&r0, &r1, 0.5, 0.5)?;
            let (_, eta_z) = four_state_shrinking(phi);
            let mut rep = AttackReport::new("aharonov", "II_4state", phi, id);
            rep.guess_prob = guess;
            rep.success_prob = guess;
            rep.bias = guess - 0.5;
            rep.closed_form = Some(0.5 + 0.5 * eta_z * (2.0 * phi).cos());
            rep.breakdown = vec![("eta_z".into(), eta_z)];
            Ok(AharonovResult::Report(rep))
        }
        AharonovModel::TwoStateIIBounds => {
            let f_local = match cloner {
                None => fixed_overlap_local_1to2(s),
                Some(cl) => {
                    let p = four_state(phi, 0, 0);
                    cl.apply(&p)?.first.expectation(&p)?
                }
            };
            let (alpha, beta, _) = fixed_overlap_coefficients(s)?;
            let f_cross = (f_local + (s * s - 1.0) * (alpha - beta)).clamp(0.0, 1.0);
            Ok(AharonovResult::Bounds {
                lower: 0.5 + 0.5 * (1.0 - f_cross.sqrt()),
                upper: 0.5 + 0.5 * (1.0 - f_cross).sqrt(),
                f_local,
                s,
            })
        }
    }
}

fn dominant_vector(rho: &DensityMatrix) -> PureState {
    let (_, vecs) = eigh(rho.matrix());
    let k = rho.dim() - 1;
    PureState::normalized(vecs.column(k).iter().copied().collect()).expect("unit eigenvector")
}
