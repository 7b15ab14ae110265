use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use qclab::seeded_rng;
use qclab::varqlone::*;

use super::{close, cost_kind, mean, train_phase_cov};
use crate::config::Config;
use crate::error::CliError;
use crate::report::{num, Outcome, Provenance, Row, Target};

pub const KEYS: &[&str] = &["family", "phi", "N", "cost", "restarts", "iters", "lr", "layers", "connectivity", "sweeps"];

pub fn run(cfg: &Config, dir: &Path, out: &mut Outcome) -> Result<(), CliError> {
    let family = cfg.choice("family", "phase-covariant", &["phase-covariant", "fixed-overlap", "four-state"])?;
    let n = cfg.usize_or("N", if family == "four-state" { 3 } else { 2 })?;
    let kind = cost_kind(cfg)?;
    let lr = cfg.f64_or("lr", 0.05)?;
    let seed = out.seed;
    match (family, n) {
        ("phase-covariant", 2) | ("fixed-overlap", 2) => one_to_two(cfg, dir, out, family, kind, lr),
        ("four-state", 3) => one_to_three(cfg, dir, out, kind, lr, seed),
        _ => Err(CliError::Config(format!("{family} supports N={}", if family == "four-state" { 3 } else { 2 }))),
    }
}

fn one_to_two(cfg: &Config, dir: &Path, out: &mut Outcome, family: &str, kind: CostKind, lr: f64) -> Result<(), CliError> {
    let restarts = cfg.usize_or("restarts", 5)?;
    let seed = out.seed;
    let (task, results, target) = if family == "phase-covariant" {
        let tc = TrainConfig { iters: cfg.usize_or("iters", 200)?, lr, ..TrainConfig::default() };
        let task = CloneTask::new(StateFamily::PhaseCovariant, 3, vec![0], vec![1, 2])?;
        let t = if kind == CostKind::Local { Target::AtLeast { value: 0.84, tol: 0.0 } } else { Target::None };
        (task, train_phase_cov(restarts, kind, &tc, seed)?, t)
    } else {
        let phi = cfg.f64_or("phi", PI / 18.0)?;
        let layers = cfg.usize_or("layers", 3)?;
        if restarts == 0 || layers == 0 {
            return Err(CliError::Config("restarts and layers must be positive".into()));
        }
        let tc = TrainConfig { iters: cfg.usize_or("iters", 300)?, lr, ..TrainConfig::default() };
        let task = CloneTask::one_to_two(StateFamily::FixedOverlapPair(phi));
        let pool = Arc::new(GatePool::fixed_overlap_1to2());
        let mut rng = seeded_rng(seed);
        let results = (0..restarts)
            .map(|_| {
                let c = StructuredCircuit::layered(pool.clone(), layers, &mut rng)?.to_circuit();
                train(&c, &task, kind, &tc)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let t = if kind == CostKind::Local && close(phi, PI / 18.0) { Target::AtLeast { value: 0.98, tol: 0.0 } } else { Target::None };
        (task, results, t)
    };

    let opt = known_optimum(&task)?;
    out.push(Row::new("optimal local fidelity", opt.f_local, Provenance::PaperAnalytic));
    let mut fids = Vec::new();
    let mut trace = Vec::new();
    let mut table = Vec::new();
    for (i, r) in results.iter().enumerate() {
        let f = mean_clone_fidelities(&r.circuit, &task)?;
        let m = super::mean(&f);
        out.push(Row::new(format!("restart {i} mean clone fidelity"), m, Provenance::Simulated));
        fids.push(m);
        trace.extend(r.trace.iter().map(|&(it, c)| vec![i.to_string(), it.to_string(), num(c)]));
        let per: Vec<String> = f.iter().map(|x| num(*x)).collect();
        table.push(vec![i.to_string(), num(r.best_cost), num(m), per.join(";")]);
    }
    out.push(Row::new(format!("mean fidelity over {restarts} restarts"), mean(&fids), Provenance::Simulated).target(target));
    let best = results.iter().enumerate().min_by(|a, b| a.1.best_cost.total_cmp(&b.1.best_cost)).map(|(i, _)| i).unwrap();
    out.push(Row::new(format!("best {} cost", kind.name()), results[best].best_cost, Provenance::Simulated));
    out.write_table(dir, "varqlone-train-trace.csv", &["restart", "iteration", "cost"], &trace)?;
    out.write_table(dir, "varqlone-train-restarts.csv", &["restart", "best_cost", "mean_fidelity", "clone_fidelities"], &table)?;
    write_circuit(out, dir, &results[best].circuit)
}

fn one_to_three(cfg: &Config, dir: &Path, out: &mut Outcome, kind: CostKind, lr: f64, seed: u64) -> Result<(), CliError> {
    let phi = cfg.f64_or("phi", PI / 8.0)?;
    let conn = match cfg.choice("connectivity", "fc", &["fc", "nn"])? {
        "fc" => Connectivity::FullyConnected,
        _ => Connectivity::NearestNeighbor,
    };
    let search = SearchConfig {
        start: Start::Layered(cfg.usize_or("layers", 4)?),
        restarts: cfg.usize_or("restarts", 15)?,
        sweeps: cfg.usize_or("sweeps", 4)?,
        train: TrainConfig { iters: cfg.usize_or("iters", 200)?, lr, ..TrainConfig::default() },
        seed,
        ..SearchConfig::default()
    };
    let task = CloneTask::new(StateFamily::FourState(phi), 4, vec![0], vec![1, 2, 3])?;
    let res = structure_search(&GatePool::with_connectivity(4, conn), &task, kind, &search)?;
    let mut table = Vec::new();
    for (i, r) in res.restarts.iter().enumerate() {
        let per: Vec<String> = r.mean_fidelities.iter().map(|x| num(*x)).collect();
        table.push(vec![i.to_string(), num(r.cost), num(mean(&r.mean_fidelities)), per.join(";")]);
    }
    let t = if kind == CostKind::Local && close(phi, PI / 8.0) { Target::AtLeast { value: 0.78, tol: 0.0 } } else { Target::None };
    out.push(
        Row::new(format!("mean best fidelity over {} restarts", search.restarts), res.mean_of_restart_fidelities(), Provenance::Simulated)
            .target(t),
    );
    out.push(Row::new(format!("best {} cost", kind.name()), res.best_cost, Provenance::Simulated));
    out.write_table(dir, "varqlone-train-restarts.csv", &["restart", "best_cost", "mean_fidelity", "clone_fidelities"], &table)?;
    write_circuit(out, dir, &res.best.to_circuit())
}

fn write_circuit(out: &mut Outcome, dir: &Path, c: &qclab::Circuit) -> Result<(), CliError> {
    let text = c.to_text()?;
    let seed = out.seed;
    out.write_with(dir, "varqlone-train-best.txt", |w| {
        use std::io::Write;
        writeln!(w, "# seed {seed}")?;
        w.write_all(text.as_bytes())?;
        Ok(())
    })
}
