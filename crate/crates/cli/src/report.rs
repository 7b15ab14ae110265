//! Result rows, CSV artifacts and the stdout summary.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    PaperAnalytic,
    Simulated,
    MonteCarlo,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::PaperAnalytic => "paper-analytic",
            Provenance::Simulated => "simulated",
            Provenance::MonteCarlo => "monte-carlo",
        })
    }
}

/// What a row is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    None,
    Equal { value: f64, tol: f64 },
    AtLeast { value: f64, tol: f64 },
    AtMost { value: f64, tol: f64 },
    Range { lo: f64, hi: f64 },
}

impl Target {
    pub fn eq(value: f64, tol: f64) -> Self {
        Target::Equal { value, tol }
    }

    pub fn met_by(&self, v: f64) -> Option<bool> {
        match *self {
            Target::None => None,
            Target::Equal { value, tol } => Some((v - value).abs() <= tol),
            Target::AtLeast { value, tol } => Some(v >= value - tol),
            Target::AtMost { value, tol } => Some(v <= value + tol),
            Target::Range { lo, hi } => Some((lo..=hi).contains(&v)),
        }
    }

    fn target_text(&self) -> String {
        match *self {
            Target::None => String::new(),
            Target::Equal { value, .. } => num(value),
            Target::AtLeast { value, .. } => format!(">={}", num(value)),
            Target::AtMost { value, .. } => format!("<={}", num(value)),
            Target::Range { lo, hi } => format!("[{},{}]", num(lo), num(hi)),
        }
    }

    fn tol_text(&self) -> String {
        match *self {
            Target::Equal { tol, .. } | Target::AtLeast { tol, .. } | Target::AtMost { tol, .. } => {
                let t = format!("{tol:e}");
                if t.len() > 9 { format!("{tol:.3e}") } else { t }
            }
            Target::None | Target::Range { .. } => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub quantity: String,
    pub value: f64,
    pub display: String,
    pub target: Target,
    pub provenance: Provenance,
}

impl Row {
    pub fn new(quantity: impl Into<String>, value: f64, provenance: Provenance) -> Self {
        Row { quantity: quantity.into(), value, display: num(value), target: Target::None, provenance }
    }

    pub fn target(mut self, t: Target) -> Self {
        self.target = t;
        self
    }

    pub fn display(mut self, d: impl Into<String>) -> Self {
        self.display = d.into();
        self
    }

    /// Shows the value as a small fraction when it is one.
    pub fn exact(self) -> Self {
        match fraction(self.value) {
            Some((p, q)) if q > 1 => {
                let d = format!("{p}/{q}");
                self.display(d)
            }
            _ => self,
        }
    }

    pub fn status(&self) -> &'static str {
        match self.target.met_by(self.value) {
            None => "n/a",
            Some(true) => "pass",
            Some(false) => "miss",
        }
    }
}

/// Fixed-precision number text, so reruns are byte-identical.
pub fn num(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-4 || v.abs() >= 1e7) {
        format!("{v:.10e}")
    } else {
        format!("{v:.10}")
    }
}

/// p/q with q ≤ 64 when it matches to 1e-12.
pub fn fraction(x: f64) -> Option<(i64, u64)> {
    (1..=64u64).find_map(|q| {
        let p = (x * q as f64).round();
        ((x - p / q as f64).abs() < 1e-12).then_some((p as i64, q))
    })
}

/// Everything one experiment produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub experiment: String,
    pub seed: u64,
    pub rows: Vec<Row>,
    /// Extra lines for the stdout summary.
    pub notes: Vec<String>,
    pub artifacts: Vec<PathBuf>,
}

impl Outcome {
    pub fn new(experiment: &str, seed: u64) -> Self {
        Outcome { experiment: experiment.into(), seed, rows: Vec::new(), notes: Vec::new(), artifacts: Vec::new() }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn misses(&self) -> usize {
        self.rows.iter().filter(|r| r.status() == "miss").count()
    }

    pub fn write_rows(&mut self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join(format!("{}.csv", self.experiment));
        let mut w = csv::Writer::from_writer(create(&path)?);
        w.write_record(["experiment", "quantity", "value", "display", "target", "tolerance", "provenance", "status", "seed"])?;
        for r in &self.rows {
            w.write_record([
                self.experiment.as_str(),
                &r.quantity,
                &num(r.value),
                &r.display,
                &r.target.target_text(),
                &r.target.tol_text(),
                &r.provenance.to_string(),
                r.status(),
                &self.seed.to_string(),
            ])?;
        }
        w.flush()?;
        self.artifacts.insert(0, path);
        Ok(())
    }

    /// A plain data table with the seed appended as the last column.
    pub fn write_table(&mut self, dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let path = dir.join(name);
        let mut w = csv::Writer::from_writer(create(&path)?);
        let mut h: Vec<&str> = header.to_vec();
        h.push("seed");
        w.write_record(&h)?;
        let seed = self.seed.to_string();
        for r in rows {
            let mut rec = r.clone();
            rec.push(seed.clone());
            w.write_record(&rec)?;
        }
        w.flush()?;
        self.artifacts.push(path);
        Ok(())
    }

    /// Writes an artifact through a caller-supplied writer.
    pub fn write_with<F>(&mut self, dir: &Path, name: &str, f: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
    {
        let path = dir.join(name);
        let mut w = create(&path)?;
        f(&mut w)?;
        w.flush()?;
        self.artifacts.push(path);
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = format!("experiment {}  seed {}\n", self.experiment, self.seed);
        let width = self.rows.iter().map(|r| r.quantity.len()).max().unwrap_or(8).max(8);
        s += &format!("{:<width$}  {:<22}  {:<24}  {:<6}  {}\n", "quantity", "value", "target", "status", "provenance");
        for r in &self.rows {
            let target = match r.target.tol_text() {
                t if t.is_empty() || t == "0e0" => r.target.target_text(),
                t => format!("{} ± {t}", r.target.target_text()),
            };
            s += &format!("{:<width$}  {:<22}  {:<24}  {:<6}  {}\n", r.quantity, r.display, target, r.status(), r.provenance);
        }
        for n in &self.notes {
            s += &format!("note: {n}\n");
        }
        for a in &self.artifacts {
            s += &format!("wrote {}\n", a.display());
        }
        s
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_and_status() {
        assert_eq!(fraction(5.0 / 6.0), Some((5, 6)));
        assert_eq!(fraction(0.75), Some((3, 4)));
        assert_eq!(fraction(0.853_553_390_593_273_8), None);
        let r = Row::new("f", 5.0 / 6.0, Provenance::PaperAnalytic).exact().target(Target::eq(5.0 / 6.0, 1e-12));
        assert_eq!(r.display, "5/6");
        assert_eq!(r.status(), "pass");
        let r = Row::new("d", 0.13, Provenance::Simulated).target(Target::Range { lo: 0.14, hi: 0.17 });
        assert_eq!(r.status(), "miss");
        assert_eq!(Row::new("x", 1.0, Provenance::MonteCarlo).status(), "n/a");
    }

    #[test]
    fn number_text() {
        assert_eq!(num(0.5), "0.5000000000");
        assert_eq!(num(1.574e-9), "1.5740000000e-9");
        assert_eq!(num(0.0), "0.0000000000");
    }
}
