use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;

use qclab::emulation::*;

use super::close;
use crate::config::Config;
use crate::error::CliError;
use crate::report::{num, Outcome, Provenance, Row, Target};

pub const KEYS: &[&str] = &["alpha", "dim"];

pub fn run(cfg: &Config, dir: &Path, out: &mut Outcome) -> Result<(), CliError> {
    let alpha = cfg.f64_or("alpha", FRAC_1_SQRT_2)?;
    let dim = cfg.usize_or("dim", 4)?;
    let instances = cfg.trials(200)?;
    let seed = out.seed;

    let one = one_block_attack(alpha, dim, seed)?;
    out.push(Row::new("one-block fidelity bound", one.bound, Provenance::PaperAnalytic));
    let t = if close(alpha, FRAC_1_SQRT_2) { Target::eq(1.0, 1e-9) } else { Target::AtLeast { value: one.bound, tol: 1e-9 } };
    out.push(Row::new("one-block simulated fidelity", one.simulated_fidelity, Provenance::Simulated).target(t));

    let mut rows = Vec::with_capacity(instances);
    let mut worst = f64::INFINITY;
    for i in 0..instances {
        let k = 2 + i % 3;
        let (u, samples, target) = random_instance(dim, k, seed.wrapping_add(i as u64))?;
        let res = run_qe(&samples, &target)?;
        let bound = res.stage1_success_prob.sqrt();
        let f = match &res.output_state {
            Some(rho) => rho.expectation(&apply_matrix(&u, &target)?)?,
            None => 0.0,
        };
        worst = worst.min(f - bound);
        rows.push(vec![i.to_string(), dim.to_string(), k.to_string(), num(f), num(bound)]);
    }
    if instances > 0 {
        out.push(
            Row::new(format!("worst fidelity minus bound ({instances} instances)"), worst, Provenance::Simulated)
                .target(Target::AtLeast { value: 0.0, tol: 1e-9 }),
        );
        out.write_table(dir, "qe-attack-instances.csv", &["instance", "dim", "samples", "fidelity", "bound"], &rows)?;
    }

    // stationary point of x(2 − 5x + 3x²) at x = γ²
    let g_star = ((10.0 - 28f64.sqrt()) / 18.0).sqrt();
    let (g, v) = three_state_argmax(2001, three_state_forgery_prob);
    out.push(Row::new("three-state forgery argmax gamma", g, Provenance::PaperAnalytic).target(Target::eq(g_star, FRAC_1_SQRT_2 / 2000.0)));
    out.push(Row::new("three-state forgery maximum", v, Provenance::PaperAnalytic).target(Target::AtLeast { value: 0.0, tol: 0.0 }));
    let (gu, vu) = three_state_argmax(2001, three_state_forgery_unsimplified);
    out.push(Row::new("unsimplified expression argmax gamma", gu, Provenance::PaperAnalytic));
    out.push(Row::new("unsimplified expression maximum", vu, Provenance::PaperAnalytic));
    let curve = (0..=200)
        .map(|i| {
            let g = FRAC_1_SQRT_2 * i as f64 / 200.0;
            Ok(vec![num(g), num(three_state_forgery_prob(g)?), num(three_state_forgery_unsimplified(g)?)])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    out.write_table(dir, "qe-attack-three-state.csv", &["gamma", "simplified", "unsimplified"], &curve)?;
    Ok(())
}
