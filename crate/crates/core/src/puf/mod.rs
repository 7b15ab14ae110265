//! PUF oracles and identification protocols built on them.

pub mod hpuf;
pub mod lrv;
pub mod qpuf;

pub use hpuf::{
    encode_pair, extract_pair, hlpuf_round, hpuf_encode, hpuf_forgery_bound, hpuf_guess_bounds, hpuf_guess_prob,
    hpuf_mixtures, BiasedCpuf, GuessBounds, HPUFModel, HlpufAdversary, HlpufRound,
};
pub use lrv::{
    brute_force_best, classical_attack_prob, cver, general_trap_asymptotic, general_trap_average, general_trap_prob,
    independent_argmax, lrv_claimed_completeness, lrv_honest_completeness, lrv_round, run_lrv, trap_count,
    ClassicalAttack, ClassicalStrategy, LrvRun, LrvTranscript, TrapProb,
};
pub use qpuf::{average_output_overlap, hrv_soundness, run_hrv, CRPDatabase, CrpRecord, HrvAdversary, HrvRun, UqPUF};

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// One JSON object per line.
pub fn write_jsonl<W: Write, T: Serialize>(mut w: W, records: &[T]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| Error::Io(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
