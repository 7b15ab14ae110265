use rand::Rng;
use rayon::prelude::*;

use super::StateFamily;
use crate::error::{Error, Result};
use crate::qsim::linalg::{C64, ONE, ZERO};
use crate::qsim::state::PureState;
use crate::qsim::Circuit;
use crate::seeded_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKind {
    /// Σ(1−F_i)² + Σ_{i<j}(F_i−F_j)²
    Squared,
    /// 1 − (1/N)ΣF_i
    Local,
    /// 1 − F_G
    Global,
}

impl CostKind {
    pub fn name(&self) -> &'static str {
        match self {
            CostKind::Squared => "squared",
            CostKind::Local => "local",
            CostKind::Global => "global",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostMode {
    /// Exact expectation over the task's deterministic family grid.
    Exact,
    /// `states` random family members, each fidelity estimated from `shots` SWAP-test outcomes.
    Sampled { states: usize, shots: usize, seed: u64 },
}

/// Cloning problem: which family, how many copies go in, and where they come out.
#[derive(Debug, Clone, PartialEq)]
pub struct CloneTask {
    pub family: StateFamily,
    pub width: usize,
    /// Wires holding the M input copies; every other wire starts in |0⟩.
    pub input_wires: Vec<usize>,
    /// Wires read out as the N clones.
    pub clone_wires: Vec<usize>,
    /// Grid size for continuous families.
    pub grid_points: usize,
}

impl CloneTask {
    pub fn new(family: StateFamily, width: usize, input_wires: Vec<usize>, clone_wires: Vec<usize>) -> Result<Self> {
        let check = |ws: &[usize], what: &str| -> Result<()> {
            let mut s = ws.to_vec();
            s.sort_unstable();
            s.dedup();
            if ws.is_empty() || s.len() != ws.len() || s.iter().any(|&w| w >= width) {
                return Err(Error::InvalidWires(format!("{what} wires {ws:?} on width {width}")));
            }
            Ok(())
        };
        check(&input_wires, "input")?;
        check(&clone_wires, "clone")?;
        if input_wires.len() > clone_wires.len() {
            return Err(Error::OutOfRange("more inputs than clones".into()));
        }
        Ok(Self { family, width, input_wires, clone_wires, grid_points: 64 })
    }

    /// Like [`CloneTask::new`], also rejecting clone wires that overlap declared ancillas.
    pub fn with_ancillas(
        family: StateFamily,
        width: usize,
        input_wires: Vec<usize>,
        clone_wires: Vec<usize>,
        ancilla_wires: &[usize],
    ) -> Result<Self> {
        if let Some(w) = clone_wires.iter().find(|w| ancilla_wires.contains(w)) {
            return Err(Error::InvalidWires(format!("clone wire {w} is also an ancilla")));
        }
        Self::new(family, width, input_wires, clone_wires)
    }

    pub fn with_grid(mut self, points: usize) -> Self {
        self.grid_points = points;
        self
    }

    /// 1→2 with the input on wire 0 and clones on wires 1, 2.
    pub fn one_to_two(family: StateFamily) -> Self {
        Self::new(family, 3, vec![0], vec![1, 2]).unwrap()
    }

    pub fn m(&self) -> usize {
        self.input_wires.len()
    }

    pub fn n(&self) -> usize {
        self.clone_wires.len()
    }

    /// |ψ⟩^{⊗M} on the input wires, |0⟩ elsewhere.
    pub fn input_state(&self, psi: &PureState) -> PureState {
        let mut amps = vec![ZERO; 1 << self.width];
        for (idx, slot) in amps.iter_mut().enumerate() {
            let mut a: C64 = ONE;
            let mut ok = true;
            for w in 0..self.width {
                let bit = (idx >> w) & 1;
                if self.input_wires.contains(&w) {
                    a *= psi.amps()[bit];
                } else if bit == 1 {
                    ok = false;
                    break;
                }
            }
            if ok {
                *slot = a;
            }
        }
        PureState::new(amps).expect("product of unit vectors")
    }

    pub fn prepare(&self) -> Result<Vec<Prepared>> {
        Ok(self
            .family
            .grid(self.grid_points)?
            .into_iter()
            .map(|(weight, psi)| self.prepare_one(weight, psi))
            .collect())
    }

    fn prepare_one(&self, weight: f64, psi: PureState) -> Prepared {
        Prepared { weight, input: self.input_state(&psi), psi_n: psi.tensor_power(self.n()), psi }
    }
}

#[derive(Debug, Clone)]
pub struct Prepared {
    pub weight: f64,
    pub psi: PureState,
    pub input: PureState,
    pub psi_n: PureState,
}

/// Local fidelities per clone and the global fidelity for one family member.
pub fn clone_fidelities(circuit: &Circuit, task: &CloneTask, p: &Prepared) -> Result<(Vec<f64>, f64)> {
    let out = circuit.apply(&p.input)?;
    let locals = task.clone_wires.iter().map(|&w| out.reduced_overlap(&[w], &p.psi)).collect();
    let global = out.reduced_overlap(&task.clone_wires, &p.psi_n);
    Ok((locals, global))
}

fn per_state_cost(kind: CostKind, locals: &[f64], global: f64) -> f64 {
    match kind {
        CostKind::Squared => {
            let mut c: f64 = locals.iter().map(|f| (1.0 - f).powi(2)).sum();
            for i in 0..locals.len() {
                for j in i + 1..locals.len() {
                    c += (locals[i] - locals[j]).powi(2);
                }
            }
            c
        }
        CostKind::Local => 1.0 - locals.iter().sum::<f64>() / locals.len() as f64,
        CostKind::Global => 1.0 - global,
    }
}

/// Cost for the circuit's current parameters.
pub fn cost(circuit: &Circuit, task: &CloneTask, kind: CostKind, mode: CostMode) -> Result<f64> {
    match mode {
        CostMode::Exact => {
            let prepared = task.prepare()?;
            cost_prepared(circuit, task, kind, &prepared)
        }
        CostMode::Sampled { states, shots, seed } => {
            if states == 0 || shots == 0 {
                return Err(Error::OutOfRange("sampled cost needs states and shots".into()));
            }
            let mut rng = seeded_rng(seed);
            let mut acc = 0.0;
            for _ in 0..states {
                let psi = task.family.sample(&mut rng);
                let p = task.prepare_one(1.0, psi);
                let (locals, global) = clone_fidelities(circuit, task, &p)?;
                let mut est = |f: f64| {
                    let accept = (0..shots).filter(|_| rng.random::<f64>() < 0.5 + 0.5 * f).count();
                    2.0 * accept as f64 / shots as f64 - 1.0
                };
                let locals: Vec<f64> = locals.into_iter().map(&mut est).collect();
                let global = est(global);
                acc += per_state_cost(kind, &locals, global);
            }
            Ok(acc / states as f64)
        }
    }
}

pub(crate) fn cost_prepared(circuit: &Circuit, task: &CloneTask, kind: CostKind, prepared: &[Prepared]) -> Result<f64> {
    let mut acc = 0.0;
    for p in prepared {
        let (locals, global) = clone_fidelities(circuit, task, p)?;
        acc += p.weight * per_state_cost(kind, &locals, global);
    }
    Ok(acc)
}

/// Mean local fidelity per clone over the family grid.
pub fn mean_clone_fidelities(circuit: &Circuit, task: &CloneTask) -> Result<Vec<f64>> {
    let prepared = task.prepare()?;
    let mut means = vec![0.0; task.n()];
    for p in &prepared {
        let (locals, _) = clone_fidelities(circuit, task, p)?;
        for (m, f) in means.iter_mut().zip(locals) {
            *m += p.weight * f;
        }
    }
    Ok(means)
}

/// Parameter-shift gradient; every rotation is exp(−iθP/2) so ∂F = ½(F(θ+π/2) − F(θ−π/2)).
pub fn cost_gradient(circuit: &Circuit, task: &CloneTask, kind: CostKind) -> Result<Vec<f64>> {
    let prepared = task.prepare()?;
    gradient_prepared(circuit, task, kind, &prepared)
}

pub(crate) fn gradient_prepared(
    circuit: &Circuit,
    task: &CloneTask,
    kind: CostKind,
    prepared: &[Prepared],
) -> Result<Vec<f64>> {
    let theta = circuit.params();
    let base: Vec<(Vec<f64>, f64)> = if kind == CostKind::Squared {
        prepared.iter().map(|p| clone_fidelities(circuit, task, p)).collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let shift = std::f64::consts::FRAC_PI_2;
    (0..theta.len())
        .into_par_iter()
        .map(|k| {
            let mut plus = circuit.clone();
            let mut minus = circuit.clone();
            let mut t = theta.clone();
            t[k] = theta[k] + shift;
            plus.set_params(&t)?;
            t[k] = theta[k] - shift;
            minus.set_params(&t)?;
            let mut g = 0.0;
            for (s, p) in prepared.iter().enumerate() {
                let (lp, gp) = clone_fidelities(&plus, task, p)?;
                let (lm, gm) = clone_fidelities(&minus, task, p)?;
                let dl: Vec<f64> = lp.iter().zip(&lm).map(|(a, b)| 0.5 * (a - b)).collect();
                let d = match kind {
                    CostKind::Local => -dl.iter().sum::<f64>() / dl.len() as f64,
                    CostKind::Global => -0.5 * (gp - gm),
                    CostKind::Squared => {
                        let f = &base[s].0;
                        let mut d: f64 = f.iter().zip(&dl).map(|(fi, di)| -2.0 * (1.0 - fi) * di).sum();
                        for i in 0..f.len() {
                            for j in i + 1..f.len() {
                                d += 2.0 * (f[i] - f[j]) * (dl[i] - dl[j]);
                            }
                        }
                        d
                    }
                };
                g += p.weight * d;
            }
            Ok(g)
        })
        .collect()
}
