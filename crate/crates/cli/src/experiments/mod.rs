//! One module per experiment id.

use std::path::Path;

use qclab::cloning::phase_cov_ideal_circuit;
use qclab::varqlone::{randomize_params, train, CloneTask, CostKind, StateFamily, TrainConfig, TrainResult};
use qclab::{seeded_rng, Circuit};

use crate::config::Config;
use crate::error::CliError;
use crate::report::Outcome;

mod bb84;
mod clone_fidelity;
mod coinflip;
mod hpuf;
mod puf_id;
mod qe;
mod varqlone;

pub const IDS: [&str; 7] =
    ["clone-fidelity", "qe-attack", "varqlone-train", "bb84-dcrit", "coinflip-bias", "puf-id", "hpuf-bounds"];

/// Parameters each experiment accepts besides the common ones.
pub fn keys(id: &str) -> Option<&'static [&'static str]> {
    Some(match id {
        "clone-fidelity" => clone_fidelity::KEYS,
        "qe-attack" => qe::KEYS,
        "varqlone-train" => varqlone::KEYS,
        "bb84-dcrit" => bb84::KEYS,
        "coinflip-bias" => coinflip::KEYS,
        "puf-id" => puf_id::KEYS,
        "hpuf-bounds" => hpuf::KEYS,
        _ => return None,
    })
}

pub fn run(cfg: &Config, dir: &Path) -> Result<Outcome, CliError> {
    let id = cfg.experiment()?;
    let allowed = keys(id).ok_or_else(|| CliError::Config(format!("unknown experiment '{id}'; expected one of {}", IDS.join(", "))))?;
    cfg.check_keys(allowed)?;
    let seed = cfg.seed()?;
    let mut out = Outcome::new(id, seed);
    match id {
        "clone-fidelity" => clone_fidelity::run(cfg, dir, &mut out)?,
        "qe-attack" => qe::run(cfg, dir, &mut out)?,
        "varqlone-train" => varqlone::run(cfg, dir, &mut out)?,
        "bb84-dcrit" => bb84::run(cfg, dir, &mut out)?,
        "coinflip-bias" => coinflip::run(cfg, dir, &mut out)?,
        "puf-id" => puf_id::run(cfg, dir, &mut out)?,
        "hpuf-bounds" => hpuf::run(cfg, dir, &mut out)?,
        _ => unreachable!(),
    }
    out.write_rows(dir)?;
    Ok(out)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn cost_kind(cfg: &Config) -> Result<CostKind, CliError> {
    Ok(match cfg.choice("cost", "local", &["local", "global", "squared"])? {
        "local" => CostKind::Local,
        "global" => CostKind::Global,
        _ => CostKind::Squared,
    })
}

/// The three-qubit ancilla ansatz (input on wire 0, clones on 1 and 2) trained from
/// random angles, one result per restart.
fn train_phase_cov(restarts: usize, kind: CostKind, train_cfg: &TrainConfig, seed: u64) -> Result<Vec<TrainResult>, CliError> {
    if restarts == 0 {
        return Err(CliError::Config("restarts must be positive".into()));
    }
    let task = CloneTask::new(StateFamily::PhaseCovariant, 3, vec![0], vec![1, 2])?;
    let mut rng = seeded_rng(seed);
    (0..restarts)
        .map(|_| {
            let mut c: Circuit = phase_cov_ideal_circuit();
            randomize_params(&mut c, &mut rng);
            Ok(train(&c, &task, kind, train_cfg)?)
        })
        .collect()
}
