//! State CSV: one `re,im` row per amplitude, little-endian index order.

use std::io::{Read, Write};

use super::linalg::c;
use super::state::PureState;
use crate::error::{Error, Result};

pub fn write_state_csv<W: Write>(state: &PureState, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["re", "im"])?;
    for a in state.amps() {
        wr.write_record([format!("{:.17e}", a.re), format!("{:.17e}", a.im)])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_state_csv<R: Read>(r: R) -> Result<PureState> {
    let mut rd = csv::Reader::from_reader(r);
    let mut amps = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::Parse(format!("row {} has too few columns", amps.len())))?
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("{e}")))
        };
        amps.push(c(parse(0)?, parse(1)?));
    }
    PureState::new(amps)
}
