//! Quantum emulation from input/output sample pairs, closed-form stage-1 states and attacks built on it.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::qsim::haar::{haar_state, haar_unitary};
use crate::qsim::linalg::{c, log2_exact, CMatrix, C64, ZERO};
use crate::qsim::state::{gather_bits, scatter_bits, DensityMatrix, PureState};
use crate::qsim::{Circuit, Gate};
use crate::seeded_rng;

pub const MAX_MAIN_DIM: usize = 16;

#[derive(Debug, Clone)]
pub struct EmulationSamples {
    inputs: Vec<PureState>,
    outputs: Vec<PureState>,
    reference_index: usize,
}

impl EmulationSamples {
    pub fn new(inputs: Vec<PureState>, outputs: Vec<PureState>, reference_index: usize) -> Result<Self> {
        if inputs.is_empty() || inputs.len() != outputs.len() {
            return Err(Error::DimensionMismatch { expected: inputs.len(), got: outputs.len() });
        }
        if reference_index >= inputs.len() {
            return Err(Error::OutOfRange(format!("reference index {reference_index}")));
        }
        let d = inputs[0].dim();
        if d > MAX_MAIN_DIM {
            return Err(Error::OutOfRange(format!("dimension {d} above {MAX_MAIN_DIM}")));
        }
        if let Some(bad) = inputs.iter().chain(&outputs).find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.dim() });
        }
        Ok(Self { inputs, outputs, reference_index })
    }

    /// Outputs computed as U·input for a known unitary.
    pub fn from_unitary(u: &CMatrix, inputs: Vec<PureState>, reference_index: usize) -> Result<Self> {
        let outputs = inputs.iter().map(|s| apply_matrix(u, s)).collect::<Result<Vec<_>>>()?;
        Self::new(inputs, outputs, reference_index)
    }

    pub fn inputs(&self) -> &[PureState] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[PureState] {
        &self.outputs
    }

    pub fn reference_index(&self) -> usize {
        self.reference_index
    }

    pub fn reference(&self) -> &PureState {
        &self.inputs[self.reference_index]
    }

    pub fn reference_out(&self) -> &PureState {
        &self.outputs[self.reference_index]
    }

    /// Indices of the non-reference samples, in order.
    pub fn block_indices(&self) -> Vec<usize> {
        (0..self.inputs.len()).filter(|&i| i != self.reference_index).collect()
    }

    pub fn n_main(&self) -> usize {
        self.inputs[0].n()
    }
}

pub fn apply_matrix(u: &CMatrix, s: &PureState) -> Result<PureState> {
    if u.ncols() != s.dim() {
        return Err(Error::DimensionMismatch { expected: u.ncols(), got: s.dim() });
    }
    let v = u * s.as_dvector();
    PureState::normalized(v.iter().copied().collect())
}

fn main_wires(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// W(i) = Rc(φ_i) H Rc(φ_r) on main wires 0..n with the ancilla on `anc`, as a gate list.
fn push_block(c: &mut Circuit, n: usize, anc: usize, phi_i: &PureState, phi_r: &PureState) -> Result<()> {
    let reg = main_wires(n);
    c.push(Gate::controlled_reflection(anc, &reg, Arc::new(phi_r.clone()))?)?;
    c.push(Gate::h(anc))?;
    c.push(Gate::controlled_reflection(anc, &reg, Arc::new(phi_i.clone()))?)?;
    Ok(())
}

/// Single block on n main wires plus one ancilla on wire n.
pub fn w_block(phi_i: &PureState, phi_r: &PureState) -> Result<Circuit> {
    let n = phi_r.n();
    let mut c = Circuit::new(n + 1);
    push_block(&mut c, n, n, phi_i, phi_r)?;
    Ok(c)
}

/// The four emulation stages. Layout: main register on wires 0..n, one ancilla per block
/// on n..n+B, and a register holding |φ_r^out⟩ on n+B..2n+B.
#[derive(Debug, Clone)]
pub struct QeCircuit {
    pub n_main: usize,
    pub n_blocks: usize,
    pub width: usize,
    /// Ancilla preparation in |−⟩ followed by the blocks W(i).
    pub stage1: Circuit,
    /// Post-selection target on the main register.
    pub stage2_reference: PureState,
    /// Swaps the main register with the |φ_r^out⟩ register.
    pub stage3: Circuit,
    /// Inverse output blocks in reverse order.
    pub stage4: Circuit,
    pub reference_out: PureState,
}

impl QeCircuit {
    pub fn main_wires(&self) -> Vec<usize> {
        main_wires(self.n_main)
    }

    pub fn ancilla_wires(&self) -> Vec<usize> {
        (self.n_main..self.n_main + self.n_blocks).collect()
    }

    pub fn reference_wires(&self) -> Vec<usize> {
        (self.n_main + self.n_blocks..self.width).collect()
    }
}

pub fn build_qe(samples: &EmulationSamples) -> Result<QeCircuit> {
    let n = samples.n_main();
    let blocks = samples.block_indices();
    let b = blocks.len();
    let width = 2 * n + b;
    let phi_r = samples.reference();
    let phi_r_out = samples.reference_out();

    let mut stage1 = Circuit::new(width);
    for k in 0..b {
        stage1.push(Gate::x(n + k))?;
        stage1.push(Gate::h(n + k))?;
    }
    for (k, &i) in blocks.iter().enumerate() {
        push_block(&mut stage1, n, n + k, &samples.inputs[i], phi_r)?;
    }

    let mut stage3 = Circuit::new(width);
    for q in 0..n {
        stage3.push(Gate::swap(q, n + b + q))?;
    }

    let mut stage4 = Circuit::new(width);
    let reg = main_wires(n);
    for (k, &i) in blocks.iter().enumerate().rev() {
        let anc = n + k;
        stage4.push(Gate::controlled_reflection(anc, &reg, Arc::new(samples.outputs[i].clone()))?)?;
        stage4.push(Gate::h(anc))?;
        stage4.push(Gate::controlled_reflection(anc, &reg, Arc::new(phi_r_out.clone()))?)?;
    }

    Ok(QeCircuit {
        n_main: n,
        n_blocks: b,
        width,
        stage1,
        stage2_reference: phi_r.clone(),
        stage3,
        stage4,
        reference_out: phi_r_out.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct QeResult {
    /// Main register after post-selection; `None` when the projection never succeeds.
    pub output_state: Option<DensityMatrix>,
    /// (⟨φ_r|ρ_main|φ_r⟩)², the stage-1 success figure the fidelity bound is stated for.
    pub stage1_success_prob: f64,
    /// ⟨φ_r|ρ_main|φ_r⟩, the actual probability of the stage-2 projection.
    pub projection_prob: f64,
    pub postselected: bool,
    /// Main register averaged over both stage-2 outcomes.
    pub unconditioned: DensityMatrix,
    /// Joint main + ancilla state after stage 1.
    pub chi: PureState,
}

/// Splits `amps` into the components parallel and orthogonal to |φ⟩ on `wires`.
fn project_register(amps: &[C64], n: usize, wires: &[usize], phi: &PureState) -> (Vec<C64>, Vec<C64>) {
    let rest: Vec<usize> = (0..n).filter(|w| !wires.contains(w)).collect();
    let k = 1usize << wires.len();
    let offs: Vec<usize> = (0..k).map(|j| scatter_bits(j, wires)).collect();
    let mut par = vec![ZERO; amps.len()];
    let mut perp = amps.to_vec();
    let pa = phi.amps();
    for r in 0..(1usize << rest.len()) {
        let base = scatter_bits(r, &rest);
        let coef: C64 = offs.iter().enumerate().map(|(j, o)| pa[j].conj() * amps[base | o]).sum();
        for (j, o) in offs.iter().enumerate() {
            par[base | o] = coef * pa[j];
            perp[base | o] -= coef * pa[j];
        }
    }
    (par, perp)
}

fn reduced_unnormalized(amps: Vec<C64>, keep: &[usize]) -> CMatrix {
    PureState::from_raw(amps).reduced(keep).map(DensityMatrix::into_matrix).expect("valid wires")
}

pub fn run_qe(samples: &EmulationSamples, target: &PureState) -> Result<QeResult> {
    if target.dim() != samples.reference().dim() {
        return Err(Error::DimensionMismatch { expected: samples.reference().dim(), got: target.dim() });
    }
    let qc = build_qe(samples)?;
    let (n, b, w) = (qc.n_main, qc.n_blocks, qc.width);
    let init = target.tensor(&PureState::zero(b)).tensor(&qc.reference_out);
    let after1 = qc.stage1.apply(&init)?;
    let chi = chi_from_full(&after1, n, b, &qc.reference_out);

    let main = qc.main_wires();
    let projection_prob = after1.reduced_overlap(&main, &qc.stage2_reference).clamp(0.0, 1.0);
    let (par, perp) = project_register(after1.amps(), w, &main, &qc.stage2_reference);

    let mut ok = PureState::from_raw(par);
    qc.stage3.apply_in_place(&mut ok);
    qc.stage4.apply_in_place(&mut ok);
    let mut fail = PureState::from_raw(perp);
    qc.stage4.apply_in_place(&mut fail);

    let ok_m = reduced_unnormalized(ok.into_amps(), &main);
    let fail_m = reduced_unnormalized(fail.into_amps(), &main);
    let unconditioned = DensityMatrix::from_matrix_unchecked(&ok_m + &fail_m);
    let postselected = projection_prob > 1e-14;
    let output_state =
        postselected.then(|| DensityMatrix::from_matrix_unchecked(&ok_m * c(1.0 / ok_m.trace().re, 0.0)));
    Ok(QeResult {
        output_state,
        stage1_success_prob: projection_prob * projection_prob,
        projection_prob,
        postselected,
        unconditioned,
        chi,
    })
}

/// Contracts the (product) reference register away, leaving main + ancillas.
fn chi_from_full(full: &PureState, n: usize, b: usize, refo: &PureState) -> PureState {
    let keep: Vec<usize> = (0..n + b).collect();
    let refw: Vec<usize> = (n + b..2 * n + b).collect();
    let mut out = vec![ZERO; 1 << (n + b)];
    for (idx, a) in full.amps().iter().enumerate() {
        let k = gather_bits(idx, &keep);
        let r = gather_bits(idx, &refw);
        out[k] += refo.amps()[r].conj() * a;
    }
    PureState::from_raw(out)
}

/// Reflection R(φ)v = v − 2⟨φ|v⟩φ.
fn reflect(phi: &PureState, v: &[C64]) -> Vec<C64> {
    let ov: C64 = phi.amps().iter().zip(v).map(|(p, x)| p.conj() * x).sum();
    v.iter().zip(phi.amps()).map(|(x, p)| x - c(2.0, 0.0) * ov * p).collect()
}

/// Stage-1 state by the block recursion χ_i = ½(I − R_r)χ|0⟩ + ½R_i(I + R_r)χ|1⟩.
pub fn chi_recursive(samples: &EmulationSamples, target: &PureState) -> Result<PureState> {
    if target.dim() != samples.reference().dim() {
        return Err(Error::DimensionMismatch { expected: samples.reference().dim(), got: target.dim() });
    }
    let d = target.dim();
    let phi_r = samples.reference();
    let mut branches: Vec<Vec<C64>> = vec![target.amps().to_vec()];
    for &i in &samples.block_indices() {
        let phi_i = &samples.inputs[i];
        let mut next = Vec::with_capacity(branches.len() * 2);
        let mut ones = Vec::with_capacity(branches.len());
        for v in &branches {
            let rv = reflect(phi_r, v);
            next.push(v.iter().zip(&rv).map(|(a, r)| (a - r) * 0.5).collect::<Vec<_>>());
            let plus: Vec<C64> = v.iter().zip(&rv).map(|(a, r)| (a + r) * 0.5).collect();
            ones.push(reflect(phi_i, &plus));
        }
        // the new ancilla is the highest bit: all anc=0 branches first, then anc=1
        next.extend(ones);
        branches = next;
    }
    let mut amps = Vec::with_capacity(branches.len() * d);
    for v in branches {
        amps.extend(v);
    }
    Ok(PureState::from_raw(amps))
}

fn ip(a: &PureState, b: &PureState) -> C64 {
    a.inner(b).expect("same dimension")
}

fn combo(terms: &[(C64, &PureState)], d: usize) -> Vec<C64> {
    let mut out = vec![ZERO; d];
    for (w, s) in terms {
        for (o, a) in out.iter_mut().zip(s.amps()) {
            *o += w * a;
        }
    }
    out
}

/// Closed-form stage-1 state for one or two blocks, built only from pairwise overlaps.
pub fn chi_closed_form(samples: &EmulationSamples, target: &PureState, k: usize) -> Result<PureState> {
    let blocks = samples.block_indices();
    if k != blocks.len() {
        return Err(Error::DimensionMismatch { expected: blocks.len(), got: k });
    }
    if !(1..=2).contains(&k) {
        return Err(Error::NoClosedForm(format!("{k} blocks")));
    }
    let d = target.dim();
    let r = samples.reference();
    let p1 = &samples.inputs[blocks[0]];
    let one = c(1.0, 0.0);
    let two = c(2.0, 0.0);
    let alpha = ip(r, target);
    let beta = ip(p1, target);
    let gamma = ip(p1, r);
    // αφ_r|0⟩ + (ψ − αφ_r − 2βφ₁ + 2αγφ₁)|1⟩
    let b0 = combo(&[(alpha, r)], d);
    let b1 = combo(&[(one, target), (-alpha, r), (-two * beta + two * alpha * gamma, p1)], d);
    if k == 1 {
        let mut amps = b0;
        amps.extend(b1);
        return Ok(PureState::from_raw(amps));
    }
    let p2 = &samples.inputs[blocks[1]];
    let beta2 = ip(p2, target);
    let gamma2 = ip(p2, r);
    let delta = ip(p2, p1);
    // second block on branch 1: ⟨φ_r|b1⟩ = 2γ̄(αγ − β)
    let kappa = two * gamma.conj() * (alpha * gamma - beta);
    let c_psi = one;
    let c_r = -alpha - kappa;
    let c_1 = -two * beta + two * alpha * gamma;
    // ⟨φ₂|w⟩ with w = ψ + c_r φ_r + c_1 φ₁
    let lam = beta2 + c_r * gamma2 + c_1 * delta;
    let b10 = combo(&[(kappa, r)], d);
    let b11 = combo(&[(c_psi, target), (c_r, r), (c_1, p1), (-two * lam, p2)], d);
    // ancilla order: bit0 = first block, bit1 = second block; branch (a1,a2) at a1 + 2a2
    let zero = vec![ZERO; d];
    let mut amps = Vec::with_capacity(4 * d);
    amps.extend(b0);
    amps.extend(b10);
    amps.extend(zero);
    amps.extend(b11);
    Ok(PureState::from_raw(amps))
}

/// F ≥ α²[1 + 4(1 − α²)²]
pub fn one_block_bound(alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    a2 * (1.0 + 4.0 * (1.0 - a2).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneBlockAttack {
    pub bound: f64,
    pub simulated_fidelity: f64,
    pub stage1_success_prob: f64,
}

/// Reference √(1−α²)|φ₁⟩ + α|ψ⟩ with ⟨φ₁|ψ⟩ = 0, one block on φ₁, target ψ, Haar-random U.
pub fn one_block_attack(alpha: f64, dim: usize, seed: u64) -> Result<OneBlockAttack> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange(format!("alpha = {alpha}")));
    }
    log2_exact(dim).filter(|&n| n >= 1).ok_or(Error::NotPowerOfTwo(dim))?;
    let mut rng = seeded_rng(seed);
    let u = haar_unitary(dim, &mut rng)?;
    let basis = haar_unitary(dim, &mut rng)?;
    let phi1 = PureState::new(basis.column(0).iter().copied().collect())?;
    let psi = PureState::new(basis.column(1).iter().copied().collect())?;
    let b = (1.0 - alpha * alpha).max(0.0).sqrt();
    let reference = PureState::normalized(combo(&[(c(b, 0.0), &phi1), (c(alpha, 0.0), &psi)], dim))?;
    let samples = EmulationSamples::from_unitary(&u, vec![phi1, reference], 1)?;
    let res = run_qe(&samples, &psi)?;
    let expected = apply_matrix(&u, &psi)?;
    let simulated_fidelity = match &res.output_state {
        Some(rho) => rho.expectation(&expected)?.clamp(0.0, 1.0),
        None => 0.0,
    };
    Ok(OneBlockAttack { bound: one_block_bound(alpha), simulated_fidelity, stage1_success_prob: res.stage1_success_prob })
}

/// Effective forgery probability γ²(2 − 5γ² + 3γ⁴) of the three-state example.
pub fn three_state_forgery_prob(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let g2 = gamma * gamma;
    Ok(g2 * (2.0 - 5.0 * g2 + 3.0 * g2 * g2))
}

/// The same quantity before simplification: γ²(1 + 4(1−2γ²)²) − (1 − (1−γ²)³).
pub fn three_state_forgery_unsimplified(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let g2 = gamma * gamma;
    Ok(g2 * (1.0 + 4.0 * (1.0 - 2.0 * g2).powi(2)) - (1.0 - (1.0 - g2).powi(3)))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=std::f64::consts::FRAC_1_SQRT_2 + 1e-12).contains(&gamma) {
        return Err(Error::OutOfRange(format!("gamma = {gamma}")));
    }
    Ok(())
}

/// Grid argmax of `f` on [0, 1/√2]; returns (γ, value).
pub fn three_state_argmax(points: usize, f: fn(f64) -> Result<f64>) -> (f64, f64) {
    let top = std::f64::consts::FRAC_1_SQRT_2;
    (0..points)
        .map(|i| top * i as f64 / (points - 1) as f64)
        .map(|g| (g, f(g).expect("in range")))
        .fold((0.0, f64::NEG_INFINITY), |best, x| if x.1 > best.1 { x } else { best })
}

#[derive(Debug, Clone)]
pub struct ConvertedSamples {
    pub samples: EmulationSamples,
    /// +1 or −1, the raw X-basis parity before the phase correction.
    pub sign: i8,
    pub outcome_prob: f64,
}

/// Turns U_f samples into U_{f⁻¹} samples. `f_pairs` = [(x₁, y₁), (x_k, y_k)] on r-bit registers;
/// `superposed_pair` = (|x₁,y₁⟩ + |x_k,y_k⟩)/√2 with x on wires 0..r and y on r..2r.
pub fn invert_samples<R: Rng + ?Sized>(
    f_pairs: [(usize, usize); 2],
    superposed_pair: &PureState,
    rng: &mut R,
) -> Result<ConvertedSamples> {
    let n = superposed_pair.n();
    if n % 2 != 0 || n == 0 || n > 4 {
        return Err(Error::InvalidState(format!("{n} qubits; expected two registers of 1 or 2 qubits")));
    }
    let r = n / 2;
    let [(x1, y1), (xk, yk)] = f_pairs;
    let lim = 1usize << r;
    if [x1, y1, xk, yk].iter().any(|&v| v >= lim) {
        return Err(Error::OutOfRange("register value out of range".into()));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut expected = vec![ZERO; 1 << n];
    expected[x1 | (y1 << r)] += c(h, 0.0);
    expected[xk | (yk << r)] += c(h, 0.0);
    let exp_state = PureState::normalized(expected)?;
    if superposed_pair.overlap_sqr(&exp_state)? < 1.0 - 1e-9 {
        return Err(Error::InvalidState("input is not the expected two-term superposition".into()));
    }

    // ancilla register on 2r..3r; swap it with the x register, then measure it in the X basis
    let x_w: Vec<usize> = (0..r).collect();
    let anc_w: Vec<usize> = (2 * r..3 * r).collect();
    let mut st = superposed_pair.tensor(&PureState::zero(r));
    let mut conv = Circuit::new(3 * r);
    for q in 0..r {
        conv.push(Gate::swap(x_w[q], anc_w[q]))?;
    }
    for &a in &anc_w {
        conv.push(Gate::h(a))?;
    }
    st = conv.apply(&st)?;
    let mut probs = vec![0.0; lim];
    for (idx, a) in st.amps().iter().enumerate() {
        probs[gather_bits(idx, &anc_w)] += a.norm_sqr();
    }
    let mut u = rng.random::<f64>();
    let mut z = lim - 1;
    for (k, p) in probs.iter().enumerate() {
        if u < *p {
            z = k;
            break;
        }
        u -= p;
    }
    while probs[z] < 1e-14 {
        z = (z + 1) % lim;
    }
    let keep: Vec<usize> = (0..2 * r).collect();
    let mut col = vec![ZERO; 1 << (2 * r)];
    for (idx, a) in st.amps().iter().enumerate() {
        if gather_bits(idx, &anc_w) == z {
            col[gather_bits(idx, &keep)] = *a;
        }
    }
    let mut reg = PureState::normalized(col)?;
    // swap the two registers: y lands on wires 0..r, |0⟩ on r..2r
    let mut sw = Circuit::new(2 * r);
    for q in 0..r {
        sw.push(Gate::swap(q, r + q))?;
    }
    reg = sw.apply(&reg)?;
    let parity = ((z & (x1 ^ xk)).count_ones() % 2) as i8;
    let sign = if parity == 0 { 1 } else { -1 };
    if sign < 0 && y1 != yk {
        let bit = (y1 ^ yk).trailing_zeros() as usize;
        reg = Circuit::new(2 * r).with(Gate::z(bit))?.apply(&reg)?;
    }

    let phi1 = PureState::basis(2 * r, y1);
    let phi1_out = PureState::basis(2 * r, y1 | (x1 << r));
    let phi_r_out = sw.apply(superposed_pair)?;
    let samples = EmulationSamples::new(vec![phi1, reg], vec![phi1_out, phi_r_out], 1)?;
    Ok(ConvertedSamples { samples, sign, outcome_prob: probs[z] })
}

/// Haar instance helper for tests and experiments: K samples, reference and target.
pub fn random_instance(dim: usize, k: usize, seed: u64) -> Result<(CMatrix, EmulationSamples, PureState)> {
    let mut rng = seeded_rng(seed);
    let u = haar_unitary(dim, &mut rng)?;
    let inputs = (0..k).map(|_| haar_state(dim, &mut rng)).collect::<Result<Vec<_>>>()?;
    let target = haar_state(dim, &mut rng)?;
    let samples = EmulationSamples::from_unitary(&u, inputs, k - 1)?;
    Ok((u, samples, target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_state_values() {
        assert_eq!(three_state_forgery_prob(0.0).unwrap(), 0.0);
        let g = std::f64::consts::FRAC_1_SQRT_2;
        assert!((three_state_forgery_prob(g).unwrap() - 0.125).abs() < 1e-12);
        assert!(three_state_forgery_prob(0.8).is_err());
    }

    #[test]
    fn bound_arithmetic() {
        assert!((one_block_bound(0.6) - 0.36 * (1.0 + 4.0 * 0.4096)).abs() < 1e-12);
        assert!((one_block_bound(std::f64::consts::FRAC_1_SQRT_2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reference_target_is_fixed_point() {
        let (u, samples, _) = random_instance(4, 3, 5).unwrap();
        let target = samples.reference().clone();
        let res = run_qe(&samples, &target).unwrap();
        assert!((res.stage1_success_prob - 1.0).abs() < 1e-10);
        let f = res.output_state.unwrap().expectation(&apply_matrix(&u, &target).unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }
}
