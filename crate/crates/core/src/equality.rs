//! SWAP, generalized SWAP and idealized equality tests.

use rand::Rng;

use crate::error::{Error, Result};
use crate::qsim::linalg::{eigh, CMatrix, ONE};
use crate::qsim::state::{DensityMatrix, PureState};
use crate::qsim::{Circuit, Gate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOutcome {
    pub accept_prob: f64,
    /// Fraction of accepted shots, when shots were requested.
    pub sampled_freq: Option<f64>,
    /// Outcome of the last shot (1 = accept).
    pub sampled_bit: Option<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Swap,
    Gswap,
}

fn check_dims(rho: &DensityMatrix, psi: &PureState) -> Result<()> {
    if rho.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: psi.dim() });
    }
    Ok(())
}

/// ½ + ½⟨ψ|ρ|ψ⟩
pub fn swap_accept_analytic(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    check_dims(rho, psi)?;
    Ok(0.5 + 0.5 * rho.expectation(psi)?.clamp(0.0, 1.0))
}

/// Controlled-SWAP on (control, a, b).
pub fn fredkin(control: usize, a: usize, b: usize) -> Gate {
    let mut m = CMatrix::zeros(8, 8);
    for i in 0..8usize {
        let j = if i & 1 == 1 { (i & 1) | ((i >> 1) & 1) << 2 | ((i >> 2) & 1) << 1 } else { i };
        m[(j, i)] = ONE;
    }
    Gate::custom(vec![control, a, b], m).expect("permutation is unitary")
}

/// Ancilla on wire 0, first register on wires 1..=n, second on n+1..=2n.
pub fn swap_test_circuit(n: usize) -> Circuit {
    let mut c = Circuit::new(2 * n + 1);
    c.push(Gate::h(0)).unwrap();
    for q in 0..n {
        c.push(fredkin(0, 1 + q, 1 + n + q)).unwrap();
    }
    c.push(Gate::h(0)).unwrap();
    c
}

/// Accept probability from the explicit circuit, mixing over the eigen-decomposition of ρ.
pub fn swap_accept_circuit(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    Ok(swap_branches(rho, psi)?.iter().map(|(w, p)| w * p).sum())
}

fn swap_branches(rho: &DensityMatrix, psi: &PureState) -> Result<Vec<(f64, f64)>> {
    check_dims(rho, psi)?;
    let n = psi.n();
    let circ = swap_test_circuit(n);
    let (vals, vecs) = eigh(rho.matrix());
    let anc = PureState::zero(1);
    let mut out = Vec::new();
    for (k, &w) in vals.iter().enumerate() {
        if w <= 1e-14 {
            continue;
        }
        let col: Vec<_> = vecs.column(k).iter().copied().collect();
        let comp = PureState::normalized(col)?;
        let input = anc.tensor(&comp).tensor(psi);
        let outp = circ.apply(&input)?;
        out.push((w, 1.0 - outp.prob_one(0)));
    }
    Ok(out)
}

/// SWAP test; with `shots`, outcomes are sampled shot by shot from the circuit.
pub fn swap_accept_prob<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    psi: &PureState,
    shots: Option<usize>,
    rng: &mut R,
) -> Result<TestOutcome> {
    let branches = swap_branches(rho, psi)?;
    let accept_prob = branches.iter().map(|(w, p)| w * p).sum::<f64>().clamp(0.0, 1.0);
    let (mut sampled_freq, mut sampled_bit) = (None, None);
    if let Some(shots) = shots.filter(|&s| s > 0) {
        let total: f64 = branches.iter().map(|b| b.0).sum();
        let mut accepted = 0usize;
        let mut last = 0u8;
        for _ in 0..shots {
            let mut u = rng.random::<f64>() * total;
            let mut p = branches.last().map(|b| b.1).unwrap_or(0.5);
            for (w, pb) in &branches {
                if u < *w {
                    p = *pb;
                    break;
                }
                u -= w;
            }
            last = (rng.random::<f64>() < p) as u8;
            accepted += last as usize;
        }
        sampled_freq = Some(accepted as f64 / shots as f64);
        sampled_bit = Some(last);
    }
    Ok(TestOutcome { accept_prob, sampled_freq, sampled_bit })
}

/// 1/(M+1) + M/(M+1)·⟨ψ|ρ|ψ⟩
pub fn gswap_accept_prob(rho: &DensityMatrix, psi: &PureState, m: usize) -> Result<f64> {
    check_dims(rho, psi)?;
    gswap_from_fidelity(rho.expectation(psi)?, m)
}

pub fn gswap_from_fidelity(f: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::OutOfRange("GSWAP needs M >= 1".into()));
    }
    let m = m as f64;
    Ok((1.0 + m * f.clamp(0.0, 1.0)) / (m + 1.0))
}

/// Threshold test: 1 iff F ≥ δ.
pub fn ideal_test(rho: &DensityMatrix, psi: &PureState, delta: f64) -> Result<u8> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::OutOfRange(format!("delta = {delta}")));
    }
    check_dims(rho, psi)?;
    Ok((rho.expectation(psi)? >= delta) as u8)
}

/// Single-instance ideal test: accepts with probability exactly F.
pub fn ideal_test_single<R: Rng + ?Sized>(rho: &DensityMatrix, psi: &PureState, rng: &mut R) -> Result<u8> {
    check_dims(rho, psi)?;
    let f = rho.expectation(psi)?.clamp(0.0, 1.0);
    Ok((rng.random::<f64>() < f) as u8)
}

/// Smallest number of repetitions pushing the false-accept probability to ε.
pub fn repetition_budget(f: f64, eps: f64, kind: TestKind) -> Result<usize> {
    if !(0.0..1.0).contains(&f) {
        return Err(Error::OutOfRange(format!("F = {f}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!("eps = {eps}")));
    }
    match kind {
        TestKind::Swap => {
            let base = (1.0 + f) / 2.0;
            let mut m = ((eps.ln() / base.ln()) - 1e-9).ceil().max(1.0) as usize;
            while base.powi(m as i32) > eps * (1.0 + 1e-12) {
                m += 1;
            }
            while m > 1 && base.powi(m as i32 - 1) <= eps * (1.0 + 1e-12) {
                m -= 1;
            }
            Ok(m)
        }
        TestKind::Gswap => {
            if eps <= f {
                return Err(Error::Infeasible(format!("GSWAP error floor is F = {f} >= eps = {eps}")));
            }
            let mut m = (((1.0 - eps) / (eps - f)) - 1e-9).ceil().max(1.0) as usize;
            let err = |m: usize| gswap_from_fidelity(f, m).unwrap();
            while err(m) > eps * (1.0 + 1e-12) {
                m += 1;
            }
            while m > 1 && err(m - 1) <= eps * (1.0 + 1e-12) {
                m -= 1;
            }
            Ok(m)
        }
    }
}
