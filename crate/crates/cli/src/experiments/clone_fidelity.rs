use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::path::Path;

use qclab::cloning::*;
use qclab::qsim::{fidelity_pure, PureState};

use super::close;
use crate::config::Config;
use crate::error::CliError;
use crate::report::{num, Outcome, Provenance, Row, Target};

pub const KEYS: &[&str] = &["family", "M", "N", "s", "phi", "figure"];

pub fn run(cfg: &Config, dir: &Path, out: &mut Outcome) -> Result<(), CliError> {
    let name = cfg.choice("family", "universal", &["universal", "phase-covariant", "fixed-overlap", "four-state"])?;
    let (m, n) = (cfg.usize_or("M", 1)?, cfg.usize_or("N", 2)?);
    let s = cfg.f64_or("s", 0.5)?;
    let phi = cfg.f64_or("phi", PI / 8.0)?;
    let figure = match cfg.choice("figure", "local", &["local", "global"])? {
        "local" => Figure::Local,
        _ => Figure::Global,
    };
    let family = match name {
        "universal" => CloneFamily::Universal,
        "phase-covariant" => CloneFamily::PhaseCovariant,
        "fixed-overlap" => CloneFamily::FixedOverlap(s),
        _ => CloneFamily::FourState(phi),
    };
    let f = optimal_fidelity(&CloneSpec::new(family, m, n, figure)?)?;
    let fig = if figure == Figure::Local { "local" } else { "global" };
    let one_two = m == 1 && n == 2;
    let target = match (name, one_two && figure == Figure::Local) {
        ("universal", true) => Target::eq(5.0 / 6.0, 1e-12),
        ("phase-covariant", true) => Target::eq(0.5 * (1.0 + FRAC_1_SQRT_2), 1e-12),
        ("fixed-overlap", true) if close(s, 0.5) => Target::eq(0.987, 1e-3),
        ("fixed-overlap", true) if close(s, (PI / 9.0).cos()) => Target::eq(0.997, 1e-3),
        _ => Target::None,
    };
    out.push(Row::new(format!("{name} {m}->{n} {fig} fidelity"), f, Provenance::PaperAnalytic).exact().target(target));

    match (name, one_two) {
        ("phase-covariant", true) => {
            let mut sum = [0.0; 2];
            for k in 0..64 {
                let psi = PureState::equatorial(2.0 * PI * k as f64 / 64.0);
                let o = phase_cov_ideal_output(&psi)?;
                for (acc, c) in sum.iter_mut().zip(&o.clones) {
                    *acc += fidelity_pure(c, &psi)? / 64.0;
                }
            }
            out.push(Row::new("ideal circuit mean clone fidelity (64 states)", sum[0], Provenance::Simulated).target(Target::eq(0.8536, 1e-4)));
            out.push(
                Row::new("ideal circuit clone asymmetry", (sum[0] - sum[1]).abs(), Provenance::Simulated)
                    .target(Target::AtMost { value: 1e-8, tol: 0.0 }),
            );
            out.push(Row::new("global fidelity at eta=pi/4", phase_cov_global_fidelity(phase_cov_optimal_eta()), Provenance::PaperAnalytic));
            let rows: Vec<Vec<String>> = (0..=90)
                .map(|i| {
                    let eta = FRAC_PI_2 * i as f64 / 90.0;
                    vec![num(eta), num(phase_cov_global_fidelity(eta))]
                })
                .collect();
            out.write_table(dir, "clone-fidelity-curve.csv", &["eta", "global_fidelity"], &rows)?;
        }
        ("fixed-overlap", true) => {
            out.push(Row::new("global fidelity", fixed_overlap_global(s, 1, 2), Provenance::PaperAnalytic));
            out.push(Row::new("local fidelity of the global optimum", local_fidelity_of_global_optimal(s, 1, 2)?, Provenance::PaperAnalytic));
            let rows = (1..100)
                .map(|i| {
                    let s = i as f64 / 100.0;
                    Ok(vec![num(s), num(fixed_overlap_local_1to2(s)), num(local_fidelity_of_global_optimal(s, 1, 2)?)])
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            out.write_table(dir, "clone-fidelity-curve.csv", &["s", "local_optimal", "local_of_global_optimal"], &rows)?;
        }
        _ => {}
    }
    Ok(())
}
