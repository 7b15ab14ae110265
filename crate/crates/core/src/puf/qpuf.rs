//! Unitary quantum PUF oracle, CRP databases and high-resource identification.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::emulation::{run_qe, EmulationSamples};
use crate::equality::{gswap_from_fidelity, TestKind};
use crate::error::{Error, Result};
use crate::qsim::haar::{haar_state, haar_unitary};
use crate::qsim::linalg::{c, CMatrix, C64};
use crate::qsim::state::{DensityMatrix, PureState};

/// A Haar-random unitary behind an evaluation-only interface.
#[derive(Debug, Clone)]
pub struct UqPUF {
    unitary: CMatrix,
    dim: usize,
    query_count: usize,
}

impl UqPUF {
    pub fn sample<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        Ok(Self { unitary: haar_unitary(dim, rng)?, dim, query_count: 0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn query_count(&self) -> usize {
        self.query_count
    }

    /// ρ → UρU†
    pub fn eval(&mut self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: rho.dim() });
        }
        self.query_count += 1;
        let out = &self.unitary * rho.matrix() * self.unitary.adjoint();
        Ok(DensityMatrix::from_matrix_unchecked(out))
    }

    pub fn eval_pure(&mut self, psi: &PureState) -> Result<PureState> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: psi.dim() });
        }
        self.query_count += 1;
        Ok(PureState::from_raw((&self.unitary * psi.as_dvector()).iter().copied().collect()))
    }
}

/// Mean output fidelity of two PUFs on `samples` shared Haar inputs; ≈ 1/dim for independent devices.
pub fn average_output_overlap<R: Rng + ?Sized>(
    a: &mut UqPUF,
    b: &mut UqPUF,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    if samples == 0 {
        return Err(Error::OutOfRange("samples must be positive".into()));
    }
    let mut total = 0.0;
    for _ in 0..samples {
        let x = haar_state(a.dim(), rng)?;
        total += a.eval_pure(&x)?.overlap_sqr(&b.eval_pure(&x)?)?;
    }
    Ok(total / samples as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrpRecord {
    pub challenge: PureState,
    pub response: PureState,
    pub copies: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CRPDatabase {
    pub records: Vec<CrpRecord>,
}

#[derive(Deserialize)]
struct CrpRow {
    record: usize,
    copies: usize,
    role: String,
    index: usize,
    re: f64,
    im: f64,
}

impl CRPDatabase {
    /// Queries the PUF `copies` times per Haar challenge.
    pub fn enroll<R: Rng + ?Sized>(puf: &mut UqPUF, count: usize, copies: usize, rng: &mut R) -> Result<Self> {
        let challenges = (0..count).map(|_| haar_state(puf.dim(), rng)).collect::<Result<Vec<_>>>()?;
        Self::enroll_challenges(puf, challenges, copies)
    }

    pub fn enroll_challenges(puf: &mut UqPUF, challenges: Vec<PureState>, copies: usize) -> Result<Self> {
        if copies == 0 {
            return Err(Error::OutOfRange("copy count must be positive".into()));
        }
        let mut records = Vec::with_capacity(challenges.len());
        for challenge in challenges {
            let mut response = puf.eval_pure(&challenge)?;
            for _ in 1..copies {
                response = puf.eval_pure(&challenge)?;
            }
            records.push(CrpRecord { challenge, response, copies });
        }
        Ok(Self { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Columns record, copies, role (challenge/response), index, re, im.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        self.write_rows(w, None)
    }

    /// As [`write_csv`](Self::write_csv) with a trailing seed column; the reader ignores it.
    pub fn write_csv_with_seed<W: Write>(&self, w: W, seed: u64) -> Result<()> {
        self.write_rows(w, Some(seed))
    }

    fn write_rows<W: Write>(&self, w: W, seed: Option<u64>) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["record", "copies", "role", "index", "re", "im"];
        if seed.is_some() {
            header.push("seed");
        }
        wr.write_record(&header)?;
        for (k, r) in self.records.iter().enumerate() {
            for (role, st) in [("challenge", &r.challenge), ("response", &r.response)] {
                for (index, a) in st.amps().iter().enumerate() {
                    let mut rec =
                        vec![k.to_string(), r.copies.to_string(), role.to_string(), index.to_string(), a.re.to_string(), a.im.to_string()];
                    rec.extend(seed.map(|s| s.to_string()));
                    wr.write_record(&rec)?;
                }
            }
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut parts: Vec<(usize, Vec<C64>, Vec<C64>)> = Vec::new();
        for row in rd.deserialize() {
            let row: CrpRow = row?;
            if row.record > parts.len() {
                return Err(Error::Parse(format!("record {} out of order", row.record)));
            }
            if row.record == parts.len() {
                parts.push((row.copies, Vec::new(), Vec::new()));
            }
            let p = &mut parts[row.record];
            let target = match row.role.as_str() {
                "challenge" => &mut p.1,
                "response" => &mut p.2,
                other => return Err(Error::Parse(format!("unknown role {other}"))),
            };
            if row.index != target.len() {
                return Err(Error::Parse(format!("amplitude index {} out of order", row.index)));
            }
            target.push(c(row.re, row.im));
        }
        let records = parts
            .into_iter()
            .map(|(copies, ch, re)| {
                Ok(CrpRecord { challenge: PureState::new(ch)?, response: PureState::new(re)?, copies })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { records })
    }
}

/// Upper bound on an adversary passing every test when each forged state has fidelity `f_adv`.
/// SWAP: ((1+F)/2)^{NM}; GSWAP: (1/(M+1) + M·F/(M+1))^N.
pub fn hrv_soundness(n: usize, m: usize, f_adv: f64, kind: TestKind) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::OutOfRange("N and M must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&f_adv) {
        return Err(Error::OutOfRange(format!("fidelity {f_adv}")));
    }
    Ok(match kind {
        TestKind::Swap => ((1.0 + f_adv) / 2.0).powi((n * m) as i32),
        TestKind::Gswap => gswap_from_fidelity(f_adv, m)?.powi(n as i32),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HrvAdversary {
    Honest,
    /// A fresh Haar state for every state the verifier tests.
    RandomState,
    /// Challenges drawn from a leaked span of this dimension; the adversary emulates the PUF on it.
    SpanEmulation { span_dim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HrvRun {
    pub trials: usize,
    pub accepted: usize,
    pub accept_rate: f64,
    /// Binomial standard error of the accept rate.
    pub sigma: f64,
    /// Soundness formula at the adversary's mean fidelity (1 for the honest prover).
    pub expected: f64,
    pub mean_fidelity: f64,
    pub seed: u64,
}

fn state_in_span<R: Rng + ?Sized>(basis: &[PureState], rng: &mut R) -> Result<PureState> {
    let k = basis.len().next_power_of_two().max(2);
    let coef = haar_state(k, rng)?;
    let dim = basis[0].dim();
    let mut v = vec![C64::new(0.0, 0.0); dim];
    for (b, a) in basis.iter().zip(coef.amps()) {
        for (x, y) in v.iter_mut().zip(b.amps()) {
            *x += a * y;
        }
    }
    PureState::normalized(v)
}

/// Orthonormal vectors spanning a Haar-random subspace.
fn random_span<R: Rng + ?Sized>(dim: usize, k: usize, rng: &mut R) -> Result<Vec<PureState>> {
    let q = haar_unitary(dim, rng)?;
    (0..k).map(|j| PureState::new(q.column(j).iter().copied().collect())).collect()
}

/// hrv-id identification: per trial the verifier enrolls N fresh challenges with M response copies,
/// the prover answers, and the trial passes only if every SWAP/GSWAP test accepts.
pub fn run_hrv(
    puf: &mut UqPUF,
    n: usize,
    m: usize,
    kind: TestKind,
    adversary: HrvAdversary,
    trials: usize,
    seed: u64,
) -> Result<HrvRun> {
    if n == 0 || m == 0 || trials == 0 {
        return Err(Error::OutOfRange("N, M and trials must be positive".into()));
    }
    let dim = puf.dim();
    let mut rng = crate::Rng::seed_from_u64(seed);

    // leaked samples: span basis plus a balanced reference, queried once each
    let leak = match adversary {
        HrvAdversary::SpanEmulation { span_dim } => {
            if span_dim < 2 || span_dim > dim {
                return Err(Error::OutOfRange(format!("span dimension {span_dim}")));
            }
            let basis = random_span(dim, span_dim, &mut rng)?;
            let mut refv = vec![C64::new(0.0, 0.0); dim];
            for b in &basis {
                for (x, y) in refv.iter_mut().zip(b.amps()) {
                    *x += y;
                }
            }
            let mut inputs = basis.clone();
            inputs.push(PureState::normalized(refv)?);
            let outputs = inputs.iter().map(|s| puf.eval_pure(s)).collect::<Result<Vec<_>>>()?;
            let r = inputs.len() - 1;
            Some((basis, EmulationSamples::new(inputs, outputs, r)?))
        }
        _ => None,
    };

    let mut accepted = 0;
    let mut fid_sum = 0.0;
    let mut fid_count = 0usize;
    for _ in 0..trials {
        let challenges = (0..n)
            .map(|_| match &leak {
                Some((basis, _)) => state_in_span(basis, &mut rng),
                None => haar_state(dim, &mut rng),
            })
            .collect::<Result<Vec<_>>>()?;
        let db = CRPDatabase::enroll_challenges(puf, challenges, m)?;
        let mut pass = true;
        for rec in &db.records {
            let tests = match kind {
                TestKind::Swap => m,
                TestKind::Gswap => 1,
            };
            for _ in 0..tests {
                let f = match adversary {
                    HrvAdversary::Honest => puf.eval_pure(&rec.challenge)?.overlap_sqr(&rec.response)?,
                    HrvAdversary::RandomState => haar_state(dim, &mut rng)?.overlap_sqr(&rec.response)?,
                    HrvAdversary::SpanEmulation { .. } => {
                        let (_, samples) = leak.as_ref().expect("span leak present");
                        let res = run_qe(samples, &rec.challenge)?;
                        let out = res.output_state.unwrap_or(res.unconditioned);
                        out.expectation(&rec.response)?
                    }
                }
                .clamp(0.0, 1.0);
                fid_sum += f;
                fid_count += 1;
                let p = match kind {
                    TestKind::Swap => 0.5 + 0.5 * f,
                    TestKind::Gswap => gswap_from_fidelity(f, m)?,
                };
                // keep the stream aligned even after a failure
                if !(rng.random::<f64>() < p) {
                    pass = false;
                }
            }
        }
        accepted += pass as usize;
    }
    let rate = accepted as f64 / trials as f64;
    let mean_fidelity = fid_sum / fid_count as f64;
    let expected = match adversary {
        HrvAdversary::Honest => 1.0,
        HrvAdversary::RandomState => hrv_soundness(n, m, 1.0 / dim as f64, kind)?,
        HrvAdversary::SpanEmulation { .. } => hrv_soundness(n, m, mean_fidelity, kind)?,
    };
    Ok(HrvRun {
        trials,
        accepted,
        accept_rate: rate,
        sigma: (rate * (1.0 - rate) / trials as f64).sqrt(),
        expected,
        mean_fidelity,
        seed,
    })
}
