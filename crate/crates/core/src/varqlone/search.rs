use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rayon::prelude::*;

use super::cost::{mean_clone_fidelities, CloneTask, CostKind};
use super::pool::{GatePool, StructuredCircuit};
use super::train::{train, TrainConfig};
use crate::error::{Error, Result};

/// How each restart picks its initial structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    /// `seq_len` gates drawn uniformly from the pool.
    Random,
    /// The whole pool repeated this many times; `seq_len` is ignored.
    Layered(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub seq_len: usize,
    pub start: Start,
    pub restarts: usize,
    /// Gate substitutions tried per restart.
    pub sweeps: usize,
    /// Optimizer for the initial fit of each restart.
    pub train: TrainConfig,
    /// Optimizer for the re-fit after each substitution (warm started).
    pub refit: TrainConfig,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seq_len: 20,
            start: Start::Random,
            restarts: 5,
            sweeps: 40,
            train: TrainConfig::default(),
            refit: TrainConfig { iters: 60, ..TrainConfig::default() },
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RestartResult {
    pub circuit: StructuredCircuit,
    pub cost: f64,
    pub mean_fidelities: Vec<f64>,
    pub accepted_moves: usize,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: StructuredCircuit,
    pub best_cost: f64,
    pub restarts: Vec<RestartResult>,
}

impl SearchResult {
    /// Mean over restarts of each restart's average clone fidelity.
    pub fn mean_of_restart_fidelities(&self) -> f64 {
        let per: Vec<f64> = self
            .restarts
            .iter()
            .map(|r| r.mean_fidelities.iter().sum::<f64>() / r.mean_fidelities.len() as f64)
            .collect();
        per.iter().sum::<f64>() / per.len() as f64
    }
}

fn fit(sc: &StructuredCircuit, task: &CloneTask, kind: CostKind, cfg: &TrainConfig) -> Result<(StructuredCircuit, f64)> {
    let res = train(&sc.to_circuit(), task, kind, cfg)?;
    let fitted = StructuredCircuit::new(sc.pool.clone(), sc.structure.clone(), res.circuit.params())?;
    Ok((fitted, res.best_cost))
}

fn one_restart(
    pool: &Arc<GatePool>,
    task: &CloneTask,
    kind: CostKind,
    cfg: &SearchConfig,
    restart: usize,
) -> Result<RestartResult> {
    let mut rng = crate::Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    let start = match cfg.start {
        Start::Random => StructuredCircuit::random(pool.clone(), cfg.seq_len, &mut rng)?,
        Start::Layered(l) => StructuredCircuit::layered(pool.clone(), l, &mut rng)?,
    };
    let len = start.structure.len();
    let (mut cur, mut cur_cost) = fit(&start, task, kind, &cfg.train)?;
    let mut accepted_moves = 0;
    for _ in 0..cfg.sweeps {
        let pos = rng.random_range(0..len);
        let gate = rng.random_range(0..pool.len());
        let angle = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
        let cand = cur.replaced(pos, gate, angle)?;
        let (cand, c) = fit(&cand, task, kind, &cfg.refit)?;
        if c < cur_cost {
            cur = cand;
            cur_cost = c;
            accepted_moves += 1;
        }
    }
    let mean_fidelities = mean_clone_fidelities(&cur.to_circuit(), task)?;
    Ok(RestartResult { circuit: cur, cost: cur_cost, mean_fidelities, accepted_moves })
}

/// Greedy variable-structure search: random starts, single-gate substitutions, re-fit, accept on strict improvement.
pub fn structure_search(pool: &GatePool, task: &CloneTask, kind: CostKind, cfg: &SearchConfig) -> Result<SearchResult> {
    if pool.is_empty() {
        return Err(Error::InvalidState("empty gate pool".into()));
    }
    let empty_start = match cfg.start {
        Start::Random => cfg.seq_len == 0,
        Start::Layered(l) => l == 0,
    };
    if empty_start || cfg.restarts == 0 {
        return Err(Error::OutOfRange("sequence length and restarts must be positive".into()));
    }
    if pool.width != task.width {
        return Err(Error::DimensionMismatch { expected: task.width, got: pool.width });
    }
    let pool = Arc::new(pool.clone());
    let restarts: Vec<RestartResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| one_restart(&pool, task, kind, cfg, r))
        .collect::<Result<_>>()?;
    let best = restarts
        .iter()
        .min_by(|a, b| a.cost.partial_cmp(&b.cost).unwrap())
        .expect("at least one restart");
    Ok(SearchResult { best: best.circuit.clone(), best_cost: best.cost, restarts })
}
