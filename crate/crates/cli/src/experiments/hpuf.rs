use std::path::Path;

use qclab::puf::{hpuf_forgery_bound, hpuf_guess_bounds, hpuf_guess_prob, hpuf_mixtures};
use qclab::qsim::trace_distance;

use super::close;
use crate::config::Config;
use crate::error::CliError;
use crate::report::{num, Outcome, Provenance, Row, Target};

pub const KEYS: &[&str] = &["p", "m", "q", "p_classic"];

pub fn run(cfg: &Config, dir: &Path, out: &mut Outcome) -> Result<(), CliError> {
    let p = cfg.f64_or("p", 0.5)?;
    let m = cfg.usize_or("m", 16)?;
    let q = cfg.usize_or("q", 4)?;
    let p_classic = cfg.f64_or("p_classic", 0.9)?;

    let b = hpuf_guess_bounds(p)?;
    out.push(Row::new("guess probability (lemma, clipped)", hpuf_guess_prob(p)?, Provenance::PaperAnalytic));
    out.push(Row::new("lemma value unclipped", b.lemma, Provenance::PaperAnalytic));
    out.push(Row::new("p(1+sqrt2 p) unclipped", b.sqrt2, Provenance::PaperAnalytic));
    out.push(Row::new("Helstrom with the value-bit prior", b.prior_helstrom, Provenance::Simulated));

    // the lemma recomputed from the two mixtures' trace distance
    let mut worst = 0.0f64;
    let mut curve = Vec::new();
    for i in 0..50 {
        let pp = 0.5 + 0.5 * i as f64 / 49.0;
        let (r0, r1) = hpuf_mixtures(pp)?;
        let brute = (pp * (1.0 + trace_distance(&r0, &r1)?)).min(1.0);
        let g = hpuf_guess_prob(pp)?;
        worst = worst.max((g - brute).abs());
        let gb = hpuf_guess_bounds(pp)?;
        curve.push(vec![num(pp), num(g), num(gb.prior_helstrom), num(hpuf_forgery_bound(pp, m, q, p_classic)?)]);
    }
    out.push(Row::new("guess probability vs Helstrom, max error (50 p values)", worst, Provenance::Simulated).target(Target::AtMost { value: 1e-9, tol: 0.0 }));

    let bound = hpuf_forgery_bound(p, m, q, p_classic)?;
    let t = if close(p, 0.5) && m == 16 && q == 4 { Target::AtMost { value: 1e-6, tol: 0.0 } } else { Target::None };
    out.push(Row::new(format!("forgery bound (p_classic={})", num(p_classic)), bound, Provenance::PaperAnalytic).target(t));
    out.write_table(dir, "hpuf-bounds-curve.csv", &["p", "guess_prob", "prior_helstrom", "forgery_bound"], &curve)?;
    Ok(())
}
