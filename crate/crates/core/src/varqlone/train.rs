use rand::Rng;

use super::cost::{cost_prepared, gradient_prepared, CloneTask, CostKind};
use crate::error::{Error, Result};
use crate::qsim::Circuit;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimizer {
    GradientDescent,
    Adam,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub lr: f64,
    pub iters: usize,
    pub optimizer: Optimizer,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { lr: 0.05, iters: 200, optimizer: Optimizer::Adam }
    }
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    /// Lowest-cost circuit seen during training.
    pub circuit: Circuit,
    pub best_cost: f64,
    /// (iteration, cost) before each update, plus the final cost.
    pub trace: Vec<(usize, f64)>,
}

pub fn randomize_params<R: Rng + ?Sized>(circuit: &mut Circuit, rng: &mut R) {
    let t: Vec<f64> = (0..circuit.param_count()).map(|_| rng.random::<f64>() * 2.0 * std::f64::consts::PI).collect();
    circuit.set_params(&t).expect("matching length");
}

pub fn train(circuit: &Circuit, task: &CloneTask, kind: CostKind, cfg: &TrainConfig) -> Result<TrainResult> {
    if !(cfg.lr.is_finite() && cfg.lr > 0.0) {
        return Err(Error::OutOfRange(format!("learning rate {}", cfg.lr)));
    }
    let prepared = task.prepare()?;
    let mut cur = circuit.clone();
    let mut theta = cur.params();
    let (b1, b2, eps) = (0.9, 0.999, 1e-8);
    let mut m = vec![0.0; theta.len()];
    let mut v = vec![0.0; theta.len()];
    let mut best = (f64::INFINITY, cur.clone());
    let mut trace = Vec::with_capacity(cfg.iters + 1);
    for it in 0..=cfg.iters {
        let c = cost_prepared(&cur, task, kind, &prepared)?;
        if !c.is_finite() {
            return Err(Error::Numerical(format!("non-finite cost at iteration {it}")));
        }
        trace.push((it, c));
        if c < best.0 {
            best = (c, cur.clone());
        }
        if it == cfg.iters || theta.is_empty() {
            break;
        }
        let g = gradient_prepared(&cur, task, kind, &prepared)?;
        match cfg.optimizer {
            Optimizer::GradientDescent => {
                for (t, gi) in theta.iter_mut().zip(&g) {
                    *t -= cfg.lr * gi;
                }
            }
            Optimizer::Adam => {
                let step = (it + 1) as i32;
                for k in 0..theta.len() {
                    m[k] = b1 * m[k] + (1.0 - b1) * g[k];
                    v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
                    let mh = m[k] / (1.0 - b1.powi(step));
                    let vh = v[k] / (1.0 - b2.powi(step));
                    theta[k] -= cfg.lr * mh / (vh.sqrt() + eps);
                }
            }
        }
        cur.set_params(&theta)?;
    }
    Ok(TrainResult { circuit: best.1, best_cost: best.0, trace })
}
