//! Ideal cloning machines, closed-form optimal fidelities and two-state discrimination.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::qsim::linalg::{c, trace_norm, CMatrix};
use crate::qsim::state::{DensityMatrix, PureState};
use crate::qsim::{Circuit, Gate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CloneFamily {
    Universal,
    PhaseCovariant,
    /// Two pure states with real overlap `s`.
    FixedOverlap(f64),
    /// The four states cos φ|0⟩ ± sin φ|1⟩, sin φ|0⟩ ∓ cos φ|1⟩.
    FourState(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Local,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloneSpec {
    pub family: CloneFamily,
    pub m: usize,
    pub n: usize,
    pub figure: Figure,
}

impl CloneSpec {
    pub fn new(family: CloneFamily, m: usize, n: usize, figure: Figure) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::OutOfRange(format!("need 1 <= M <= N, got M={m}, N={n}")));
        }
        if let CloneFamily::FixedOverlap(s) = family {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::OutOfRange(format!("overlap s = {s}")));
            }
        }
        Ok(Self { family, m, n, figure })
    }
}

#[derive(Debug, Clone)]
pub struct CloneOutput {
    pub global_state: DensityMatrix,
    pub clones: Vec<DensityMatrix>,
    pub ancilla: Option<DensityMatrix>,
}

impl CloneOutput {
    /// Splits a pure output into reduced clone (and ancilla) states.
    pub fn from_pure(state: &PureState, clone_wires: &[usize], ancilla_wires: &[usize]) -> Result<Self> {
        let clones = clone_wires.iter().map(|&w| state.reduced(&[w])).collect::<Result<Vec<_>>>()?;
        let ancilla = if ancilla_wires.is_empty() { None } else { Some(state.reduced(ancilla_wires)?) };
        Ok(Self { global_state: state.to_density(), clones, ancilla })
    }
}

/// Optimal fidelity of the requested cloning task; unsupported combinations are an error.
pub fn optimal_fidelity(spec: &CloneSpec) -> Result<f64> {
    let (m, n) = (spec.m as f64, spec.n as f64);
    let unsupported = || Error::NoClosedForm(format!("{:?} {:?} {}->{}", spec.family, spec.figure, spec.m, spec.n));
    match (spec.family, spec.figure) {
        (CloneFamily::Universal, Figure::Local) => Ok((m * n + m + n) / (n * (m + 2.0))),
        // N!(M+1)! / (M!(N+1)!) = (M+1)/(N+1)
        (CloneFamily::Universal, Figure::Global) => Ok((m + 1.0) / (n + 1.0)),
        (CloneFamily::PhaseCovariant, Figure::Local) if spec.m == 1 => {
            if spec.n == 1 {
                Ok(1.0)
            } else if spec.n % 2 == 1 {
                Ok(0.5 * (1.0 + (n + 1.0) / (2.0 * n)))
            } else {
                Ok(0.5 * (1.0 + (n * (n + 2.0)).sqrt() / (2.0 * n)))
            }
        }
        (CloneFamily::FixedOverlap(s), Figure::Local) if spec.m == 1 && spec.n == 2 => Ok(fixed_overlap_local_1to2(s)),
        (CloneFamily::FixedOverlap(s), Figure::Global) => Ok(fixed_overlap_global(s, spec.m, spec.n)),
        _ => Err(unsupported()),
    }
}

/// Optimal local 1→2 fidelity for two states with overlap s.
pub fn fixed_overlap_local_1to2(s: f64) -> f64 {
    if s < 1e-9 {
        return 1.0;
    }
    let r = (1.0 - 2.0 * s + 9.0 * s * s).sqrt();
    let inner = (-1.0 + 2.0 * s + 3.0 * s * s + (1.0 - s) * r).max(0.0);
    0.5 + 2f64.sqrt() / (32.0 * s) * (1.0 + s) * (3.0 - 3.0 * s + r) * inner.sqrt()
}

pub fn fixed_overlap_global(s: f64, m: usize, n: usize) -> f64 {
    let (m, n) = (m as i32, n as i32);
    0.5 * (1.0 + s.powi(m + n) + (1.0 - s.powi(2 * m)).max(0.0).sqrt() * (1.0 - s.powi(2 * n)).max(0.0).sqrt())
}

/// Local fidelity of the globally optimal fixed-overlap cloner.
pub fn local_fidelity_of_global_optimal(s: f64, m: usize, n: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::OutOfRange(format!("overlap s = {s}")));
    }
    let (m, n) = (m as i32, n as i32);
    let (sm, sn, s2) = (s.powi(m), s.powi(n), s * s);
    Ok(0.25
        * ((1.0 + sm) / (1.0 + sn) * (1.0 + s2 + 2.0 * sn)
            + (1.0 - sm) / (1.0 - sn) * (1.0 + s2 - 2.0 * sn)
            + 2.0 * (1.0 - s.powi(2 * m)) / (1.0 - s.powi(2 * n)) * (1.0 - s2)))
}

/// Clone of the ideal phase-covariant map with shrinking angle η.
/// Output wires: 0 and 1 are the clones, 2 is the ancilla.
pub fn phase_cov_transformation(eta: f64, input: &PureState) -> Result<CloneOutput> {
    if !(-1e-12..=FRAC_PI_2 + 1e-12).contains(&eta) {
        return Err(Error::OutOfRange(format!("eta = {eta}")));
    }
    if input.n() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: input.n() });
    }
    let (a, b) = (input.amps()[0], input.amps()[1]);
    let (s, co) = eta.sin_cos();
    let h = FRAC_1_SQRT_2;
    let mut amps = vec![c(0.0, 0.0); 8];
    amps[0b000] = a * h;
    amps[0b110] = a * co * h;
    amps[0b101] = a * s * h;
    amps[0b010] = b * s * h;
    amps[0b001] = b * co * h;
    amps[0b111] = b * h;
    let state = PureState::normalized(amps)?;
    CloneOutput::from_pure(&state, &[0, 1], &[2])
}

/// (1/8)(1 + sin η + cos η)², the two-clone global fidelity for equatorial inputs.
pub fn phase_cov_global_fidelity(eta: f64) -> f64 {
    let v = 1.0 + eta.sin() + eta.cos();
    v * v / 8.0
}

pub fn phase_cov_optimal_eta() -> f64 {
    FRAC_PI_4
}

/// Optimal angles (α₁, α₂, α₃) of the ideal phase-covariant circuit.
pub fn phase_cov_angles() -> (f64, f64, f64) {
    let a1 = (0.5 - 1.0 / (2.0 * 3f64.sqrt())).sqrt().asin();
    let a2 = -(0.5 - 3f64.sqrt() / 4.0).sqrt().asin();
    (a1, a2, a1)
}

/// Input on wire 0; the clones come out on wires 1 and 2, wire 0 is left as the ancilla.
pub fn phase_cov_ideal_circuit() -> Circuit {
    let (a1, a2, a3) = phase_cov_angles();
    let gates = [
        Gate::ry(1, 2.0 * a1),
        Gate::cnot(1, 2),
        Gate::ry(2, 2.0 * a2),
        Gate::cnot(2, 1),
        Gate::ry(1, 2.0 * a3),
        Gate::cnot(0, 1),
        Gate::cnot(0, 2),
        Gate::cnot(1, 0),
        Gate::cnot(2, 0),
    ];
    let mut circ = Circuit::new(3);
    for g in gates {
        circ.push(g).expect("wires in range");
    }
    circ
}

pub const IDEAL_CLONE_WIRES: [usize; 2] = [1, 2];
pub const IDEAL_ANCILLA_WIRE: usize = 0;

/// Runs the ideal circuit on a qubit and splits the output.
pub fn phase_cov_ideal_output(input: &PureState) -> Result<CloneOutput> {
    if input.n() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: input.n() });
    }
    let full = input.tensor(&PureState::zero(2));
    let out = phase_cov_ideal_circuit().apply(&full)?;
    CloneOutput::from_pure(&out, &IDEAL_CLONE_WIRES, &[IDEAL_ANCILLA_WIRE])
}

/// Pair cos θ|0⟩ ± sin θ|1⟩ with overlap cos 2θ = s.
pub fn fixed_overlap_pair(s: f64) -> Result<(PureState, PureState)> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange(format!("overlap s = {s}")));
    }
    let th = s.acos() / 2.0;
    Ok((PureState::from_real(&[th.cos(), th.sin()])?, PureState::from_real(&[th.cos(), -th.sin()])?))
}

#[derive(Debug, Clone)]
pub struct FixedOverlapClone {
    pub rho: DensityMatrix,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Set when s = 1 and the two states coincide.
    pub degenerate: bool,
}

/// (α, β, γ) of ρ_c = α|φ_in⟩⟨φ_in| + β|φ_other⟩⟨φ_other| + γ(|φ₀⟩⟨φ₁| + |φ₁⟩⟨φ₀|).
pub fn fixed_overlap_coefficients(s: f64) -> Result<(f64, f64, f64)> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::OutOfRange(format!("overlap s = {s}")));
    }
    let f = fixed_overlap_local_1to2(s);
    let beta = (1.0 - f) / (1.0 - s * s);
    let alpha = beta + ((1.0 - s * s) / (1.0 - s.powi(4))).sqrt();
    let gamma = if s > 1e-12 { (1.0 - alpha - beta) / (2.0 * s) } else { 0.0 };
    Ok((alpha, beta, gamma))
}

/// Single-clone state of the optimal symmetric fixed-overlap cloner for the given states.
/// The overlap ⟨φ₀|φ₁⟩ must be real and non-negative.
pub fn fixed_overlap_clone_for(phi0: &PureState, phi1: &PureState, which: usize) -> Result<FixedOverlapClone> {
    if which > 1 {
        return Err(Error::OutOfRange(format!("input index {which}")));
    }
    let ov = phi0.inner(phi1)?;
    if ov.im.abs() > 1e-9 || ov.re < -1e-12 {
        return Err(Error::InvalidState(format!("overlap {ov} is not real and non-negative")));
    }
    let s = ov.re.clamp(0.0, 1.0);
    let (pin, pother) = if which == 0 { (phi0, phi1) } else { (phi1, phi0) };
    if s > 1.0 - 1e-12 {
        return Ok(FixedOverlapClone { rho: pin.to_density(), alpha: 1.0, beta: 0.0, gamma: 0.0, degenerate: true });
    }
    let (alpha, beta, gamma) = fixed_overlap_coefficients(s)?;
    let v0 = phi0.as_dvector();
    let v1 = phi1.as_dvector();
    let vin = pin.as_dvector();
    let vot = pother.as_dvector();
    let m: CMatrix = &vin * vin.adjoint() * c(alpha, 0.0)
        + &vot * vot.adjoint() * c(beta, 0.0)
        + (&v0 * v1.adjoint() + &v1 * v0.adjoint()) * c(gamma, 0.0);
    Ok(FixedOverlapClone { rho: DensityMatrix::new(m)?, alpha, beta, gamma, degenerate: false })
}

/// Two-qubit outputs of the globally optimal 1→2 cloner for a real pair:
/// |ψ_i⟩ = A|φ_iφ_i⟩ + B|φ_jφ_j⟩ with A, B fixed by normalization and ⟨ψ₀|ψ₁⟩ = ⟨φ₀|φ₁⟩.
pub fn fixed_overlap_global_clones(phi0: &PureState, phi1: &PureState) -> Result<(PureState, PureState)> {
    let ov = phi0.inner(phi1)?;
    if ov.im.abs() > 1e-9 || !(0.0..1.0).contains(&ov.re) {
        return Err(Error::InvalidState(format!("overlap {ov} must be real in [0, 1)")));
    }
    let s = ov.re;
    let s2 = s * s;
    // u = A² + B², w = 2AB:  u + w s² = 1,  w + u s² = s
    let det = 1.0 - s2 * s2;
    let u = (1.0 - s * s2) / det;
    let w = (s - s2) / det;
    let a = ((u + (u * u - w * w).max(0.0).sqrt()) / 2.0).sqrt();
    let b = w / (2.0 * a);
    let (xx, yy) = (phi0.tensor(phi0), phi1.tensor(phi1));
    let mix = |p: f64, q: f64| {
        let amps = xx.amps().iter().zip(yy.amps()).map(|(x, y)| x * p + y * q).collect();
        PureState::normalized(amps)
    };
    Ok((mix(a, b)?, mix(b, a)?))
}

pub fn fixed_overlap_clone(s: f64, which: usize) -> Result<FixedOverlapClone> {
    let (p0, p1) = fixed_overlap_pair(s)?;
    fixed_overlap_clone_for(&p0, &p1, which)
}

/// |φ_{x,a}⟩: a = 0 gives cos φ|0⟩ + (−1)^x sin φ|1⟩, a = 1 gives sin φ|0⟩ + (−1)^{x+1} cos φ|1⟩.
pub fn four_state(phi: f64, x: u8, a: u8) -> PureState {
    let sign = if x == 0 { 1.0 } else { -1.0 };
    let (s, co) = phi.sin_cos();
    let amps = if a == 0 { [co, sign * s] } else { [s, -sign * co] };
    PureState::from_real(&amps).expect("unit vector")
}

/// Bloch vector m_{x,a} of |φ_{x,a}⟩.
pub fn four_state_bloch(phi: f64, x: u8, a: u8) -> [f64; 3] {
    let (s2, c2) = (2.0 * phi).sin_cos();
    match (x, a) {
        (0, 0) => [s2, 0.0, c2],
        (0, _) => [-s2, 0.0, -c2],
        (_, 0) => [-s2, 0.0, c2],
        _ => [s2, 0.0, -c2],
    }
}

/// Shrinking factors (η_x, η_z) of the optimal four-state cloner.
pub fn four_state_shrinking(phi: f64) -> (f64, f64) {
    let (s2, c2) = (2.0 * phi).sin_cos();
    let d = (s2.powi(4) + c2.powi(4)).sqrt();
    (s2 * s2 / d, c2 * c2 / d)
}

/// ½(I + η_x m^x σ_x + η_z m^z σ_z)
pub fn four_state_clone(phi: f64, x: u8, a: u8) -> Result<DensityMatrix> {
    if !(phi > 0.0 && phi <= FRAC_PI_4 + 1e-12) {
        return Err(Error::OutOfRange(format!("phi = {phi}")));
    }
    let (ex, ez) = four_state_shrinking(phi);
    let m = four_state_bloch(phi, x, a);
    DensityMatrix::from_bloch([ex * m[0], 0.0, ez * m[2]])
}

/// ½ + ½‖q₁ρ₁ − q₂ρ₂‖₁
pub fn helstrom_prob(rho1: &DensityMatrix, rho2: &DensityMatrix, q1: f64, q2: f64) -> Result<f64> {
    if (q1 + q2 - 1.0).abs() > 1e-12 || q1 < 0.0 || q2 < 0.0 {
        return Err(Error::OutOfRange(format!("priors {q1}, {q2}")));
    }
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch { expected: rho1.dim(), got: rho2.dim() });
    }
    let diff = rho1.matrix() * c(q1, 0.0) - rho2.matrix() * c(q2, 0.0);
    Ok((0.5 + 0.5 * trace_norm(&diff)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unambiguous {
    pub p_conclusive: f64,
    pub p_inconclusive: f64,
    pub p_error: f64,
}

/// Optimal unambiguous discrimination of two equiprobable pure states at angle θ.
pub fn unambiguous_disc(theta: f64) -> Result<Unambiguous> {
    if !(-1e-12..=FRAC_PI_2 + 1e-12).contains(&theta) {
        return Err(Error::OutOfRange(format!("theta = {theta}")));
    }
    let ci = theta.cos().clamp(0.0, 1.0);
    Ok(Unambiguous { p_conclusive: 1.0 - ci, p_inconclusive: ci, p_error: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let f = |fam, m, n, fig| optimal_fidelity(&CloneSpec::new(fam, m, n, fig).unwrap()).unwrap();
        assert!((f(CloneFamily::Universal, 1, 2, Figure::Local) - 5.0 / 6.0).abs() < 1e-15);
        assert!((f(CloneFamily::Universal, 3, 3, Figure::Local) - 1.0).abs() < 1e-15);
        assert!((f(CloneFamily::Universal, 1, 2, Figure::Global) - 2.0 / 3.0).abs() < 1e-15);
        assert!((f(CloneFamily::PhaseCovariant, 1, 2, Figure::Local) - 0.5 * (1.0 + FRAC_1_SQRT_2)).abs() < 1e-15);
        assert!((f(CloneFamily::FixedOverlap(0.0), 1, 2, Figure::Global) - 1.0).abs() < 1e-15);
        assert!(CloneSpec::new(CloneFamily::Universal, 3, 2, Figure::Local).is_err());
        let bad = CloneSpec::new(CloneFamily::FourState(0.3), 1, 2, Figure::Local).unwrap();
        assert!(matches!(optimal_fidelity(&bad), Err(Error::NoClosedForm(_))));
    }

    #[test]
    fn fixed_overlap_limits() {
        assert!((fixed_overlap_local_1to2(1.0) - 1.0).abs() < 1e-12);
        assert!((fixed_overlap_local_1to2(1e-6) - 1.0).abs() < 1e-4);
        let c0 = fixed_overlap_clone(0.0, 0).unwrap();
        let (p0, _) = fixed_overlap_pair(0.0).unwrap();
        assert!(crate::qsim::linalg::max_abs_diff(c0.rho.matrix(), p0.to_density().matrix()) < 1e-12);
        assert!(fixed_overlap_clone(1.0, 1).unwrap().degenerate);
    }

    #[test]
    fn unambiguous_values() {
        assert!((unambiguous_disc(FRAC_PI_2).unwrap().p_conclusive - 1.0).abs() < 1e-15);
        assert!((unambiguous_disc(0.0).unwrap().p_inconclusive - 1.0).abs() < 1e-15);
        assert!((unambiguous_disc(std::f64::consts::FRAC_PI_3).unwrap().p_conclusive - 0.5).abs() < 1e-12);
    }
}
