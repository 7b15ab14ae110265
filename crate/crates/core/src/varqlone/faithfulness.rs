use std::f64::consts::FRAC_PI_4;

use super::cost::{cost, CloneTask, CostKind, CostMode};
use super::StateFamily;
use crate::cloning::{
    fixed_overlap_clone_for, fixed_overlap_local_1to2, four_state, four_state_clone, phase_cov_global_fidelity,
    phase_cov_transformation,
};
use crate::error::{Error, Result};
use crate::qsim::metrics::{bures_angle_from_fidelity, fidelity};
use crate::qsim::state::{DensityMatrix, PureState};
use crate::qsim::Circuit;

/// Reference optimum for a supported family, used to audit trained circuits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub family: StateFamily,
    pub f_local: f64,
    pub f_global: Option<f64>,
}

impl Optimum {
    pub fn cost(&self, kind: CostKind, n: usize) -> Option<f64> {
        match kind {
            CostKind::Squared => Some(n as f64 * (1.0 - self.f_local).powi(2)),
            CostKind::Local => Some(1.0 - self.f_local),
            CostKind::Global => self.f_global.map(|f| 1.0 - f),
        }
    }

    /// Optimal single-clone state for input ψ (symmetric, so the same for every clone).
    pub fn local_state(&self, psi: &PureState) -> Result<DensityMatrix> {
        match self.family {
            StateFamily::PhaseCovariant => Ok(phase_cov_transformation(FRAC_PI_4, psi)?.clones[0].clone()),
            StateFamily::FixedOverlapPair(phi) => {
                let (p0, p1) = (four_state(phi, 0, 0), four_state(phi, 1, 0));
                let which = if psi.overlap_sqr(&p0)? >= psi.overlap_sqr(&p1)? { 0 } else { 1 };
                Ok(fixed_overlap_clone_for(&p0, &p1, which)?.rho)
            }
            StateFamily::FourState(phi) => {
                let (x, a) = [(0u8, 0u8), (0, 1), (1, 0), (1, 1)]
                    .into_iter()
                    .max_by(|&(x1, a1), &(x2, a2)| {
                        let f1 = psi.overlap_sqr(&four_state(phi, x1, a1)).unwrap();
                        let f2 = psi.overlap_sqr(&four_state(phi, x2, a2)).unwrap();
                        f1.partial_cmp(&f2).unwrap()
                    })
                    .unwrap();
                four_state_clone(phi, x, a)
            }
        }
    }

    pub fn global_state(&self, psi: &PureState) -> Result<DensityMatrix> {
        match self.family {
            StateFamily::PhaseCovariant => phase_cov_transformation(FRAC_PI_4, psi)?.global_state.partial_trace(&[0, 1]),
            _ => Err(Error::NoClosedForm("optimal global clone state for this family".into())),
        }
    }
}

/// Known optimum for 1→2 tasks.
pub fn known_optimum(task: &CloneTask) -> Result<Optimum> {
    if task.m() != 1 || task.n() != 2 {
        return Err(Error::NoClosedForm(format!("{}->{} optimum", task.m(), task.n())));
    }
    let (f_local, f_global) = match task.family {
        StateFamily::PhaseCovariant => (0.5 * (1.0 + std::f64::consts::FRAC_1_SQRT_2), Some(phase_cov_global_fidelity(FRAC_PI_4))),
        StateFamily::FixedOverlapPair(phi) => (fixed_overlap_local_1to2((2.0 * phi).cos()), None),
        StateFamily::FourState(phi) => {
            let (s2, c2) = (2.0 * phi).sin_cos();
            (0.5 * (1.0 + (s2.powi(4) + c2.powi(4)).sqrt()), None)
        }
    };
    Ok(Optimum { family: task.family, f_local, f_global })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaithfulnessReport {
    pub kind: CostKind,
    pub cost: f64,
    pub optimal_cost: f64,
    /// C(θ) − C_opt, floored at zero.
    pub epsilon: f64,
    pub bound: f64,
    /// Largest Bures angle to the optimal clone over the family grid, per clone
    /// (a single entry for the global cost).
    pub theta: Vec<f64>,
    pub pass: bool,
}

/// Checks Θ_BA(ρ_θ, ρ_opt) ≤ f(ε) for the bound matching `kind`.
/// `measure_norm` overrides the family's default normalization.
pub fn faithfulness_audit(
    circuit: &Circuit,
    task: &CloneTask,
    kind: CostKind,
    measure_norm: Option<f64>,
) -> Result<FaithfulnessReport> {
    let opt = known_optimum(task)?;
    let optimal_cost = opt.cost(kind, task.n()).ok_or_else(|| Error::NoClosedForm("global optimum".into()))?;
    let c = cost(circuit, task, kind, CostMode::Exact)?;
    let epsilon = (c - optimal_cost).max(0.0);
    let norm = measure_norm.unwrap_or_else(|| task.family.measure_norm());
    let bound = match kind {
        CostKind::Squared => norm * epsilon / (2.0 * (1.0 - opt.f_local) * opt.f_local.sin()),
        CostKind::Local => norm * epsilon / opt.f_local.sin(),
        CostKind::Global => norm * epsilon / opt.f_global.unwrap().sin(),
    };
    let prepared = task.prepare()?;
    let mut theta = vec![0.0; if kind == CostKind::Global { 1 } else { task.n() }];
    for p in &prepared {
        let out = circuit.apply(&p.input)?;
        if kind == CostKind::Global {
            let rho = out.reduced(&task.clone_wires)?;
            let f = fidelity(&rho, &opt.global_state(&p.psi)?)?;
            theta[0] = f64::max(theta[0], bures_angle_from_fidelity(f));
        } else {
            let target = opt.local_state(&p.psi)?;
            for (j, &w) in task.clone_wires.iter().enumerate() {
                let f = fidelity(&out.reduced(&[w])?, &target)?;
                theta[j] = f64::max(theta[j], bures_angle_from_fidelity(f));
            }
        }
    }
    let pass = theta.iter().all(|&t| t <= bound + 1e-6);
    Ok(FaithfulnessReport { kind, cost: c, optimal_cost, epsilon, bound, theta, pass })
}
