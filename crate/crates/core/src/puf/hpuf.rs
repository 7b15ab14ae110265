//! Hybrid PUF: classical PUF bits encoded in BB84 states, its guessing and forgery bounds,
//! and the locked identification round.

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsim::linalg::trace_norm;
use crate::qsim::state::{DensityMatrix, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HPUFModel {
    /// Probability that each classical output bit is 0.
    pub p: f64,
    /// Qubits per half-response.
    pub m: usize,
    /// Query budget of the adversary.
    pub q: usize,
}

impl HPUFModel {
    pub fn new(p: f64, m: usize, q: usize) -> Result<Self> {
        check_p(p)?;
        if m == 0 {
            return Err(Error::OutOfRange("m must be positive".into()));
        }
        Ok(Self { p, m, q })
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.5..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("p = {p} outside [1/2, 1]")));
    }
    Ok(())
}

/// (value, basis): (0,0)→|0⟩, (1,0)→|1⟩, (0,1)→|+⟩, (1,1)→|−⟩.
pub fn encode_pair(value: u8, basis: u8) -> Result<PureState> {
    Ok(match (value, basis) {
        (0, 0) => PureState::basis(1, 0),
        (1, 0) => PureState::basis(1, 1),
        (0, 1) => PureState::plus(),
        (1, 1) => PureState::minus(),
        _ => return Err(Error::InvalidState(format!("bit pair ({value}, {basis})"))),
    })
}

pub fn hpuf_encode(bit_pairs: &[(u8, u8)]) -> Result<Vec<PureState>> {
    bit_pairs.iter().map(|&(v, b)| encode_pair(v, b)).collect()
}

/// The adversary's view of a qubit whose value bit is 0 or 1: p|0⟩⟨0|+(1−p)|+⟩⟨+| and p|1⟩⟨1|+(1−p)|−⟩⟨−|.
pub fn hpuf_mixtures(p: f64) -> Result<(DensityMatrix, DensityMatrix)> {
    check_p(p)?;
    let d = |s: PureState| s.to_density();
    let r0 = DensityMatrix::mixture(&[(p, &d(PureState::basis(1, 0))), (1.0 - p, &d(PureState::plus()))])?;
    let r1 = DensityMatrix::mixture(&[(p, &d(PureState::basis(1, 1))), (1.0 - p, &d(PureState::minus()))])?;
    Ok((r0, r1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GuessBounds {
    /// p(1 + √(p² + (1−p)²)) = p(1 + ½‖ρ₀ − ρ₁‖₁), unclipped.
    pub lemma: f64,
    /// p(1 + √2·p), unclipped.
    pub sqrt2: f64,
    /// ½(1 + ‖pρ₀ − (1−p)ρ₁‖₁), the optimum with the value bit's actual prior.
    pub prior_helstrom: f64,
}

pub fn hpuf_guess_bounds(p: f64) -> Result<GuessBounds> {
    let (r0, r1) = hpuf_mixtures(p)?;
    let diff = r0.matrix() * crate::qsim::linalg::c(p, 0.0) - r1.matrix() * crate::qsim::linalg::c(1.0 - p, 0.0);
    Ok(GuessBounds {
        lemma: p * (1.0 + (p * p + (1.0 - p) * (1.0 - p)).sqrt()),
        sqrt2: p * (1.0 + std::f64::consts::SQRT_2 * p),
        prior_helstrom: 0.5 * (1.0 + trace_norm(&diff)),
    })
}

/// Guessing probability of one encoded value bit, p(1 + √(p² + (1−p)²)) clipped to 1.
pub fn hpuf_guess_prob(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok((p * (1.0 + (p * p + (1.0 - p) * (1.0 - p)).sqrt())).min(1.0))
}

/// p_classic · (p(1 + √2p))^{2mq}, clipped to 1.
pub fn hpuf_forgery_bound(p: f64, m: usize, q: usize, p_classic: f64) -> Result<f64> {
    check_p(p)?;
    if !(0.0..=1.0).contains(&p_classic) {
        return Err(Error::OutOfRange(format!("p_classic = {p_classic}")));
    }
    let base = p * (1.0 + std::f64::consts::SQRT_2 * p);
    let exp = 2.0 * m as f64 * q as f64;
    Ok((p_classic * (exp * base.ln()).exp()).min(1.0))
}

/// Ideal classical PUF: i.i.d. output bits, 0 with probability p, fixed per (key, challenge).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedCpuf {
    pub p: f64,
    pub bits: usize,
    pub key: u64,
}

impl BiasedCpuf {
    pub fn eval(&self, x: u64) -> Vec<u8> {
        let mut rng = crate::Rng::seed_from_u64(self.key);
        rng.set_stream(x);
        (0..self.bits).map(|_| u8::from(rng.random::<f64>() >= self.p)).collect()
    }
}

/// Response bits as (value, basis) pairs.
fn pairs(bits: &[u8]) -> Vec<(u8, u8)> {
    bits.chunks(2).map(|c| (c[0], c[1])).collect()
}

/// Measures each received qubit in the expected basis and compares with the expected value.
/// Returns the number of qubits that passed.
fn ver<R: Rng + ?Sized>(expected: &[(u8, u8)], received: &[PureState], rng: &mut R) -> Result<usize> {
    let mut passed = 0;
    for (&(v, b), st) in expected.iter().zip(received) {
        let target = encode_pair(v, b)?;
        passed += (rng.random::<f64>() < target.overlap_sqr(st)?) as usize;
    }
    Ok(passed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlpufAdversary {
    Honest,
    /// Intercepts the first half with this many copies of each qubit, extracts the bits by
    /// repeated Z measurements, re-prepares and forwards.
    InterceptMeasure { copies: usize },
    /// Queries the lock with a challenge but no first-half state.
    ForwardBlind,
}

impl std::fmt::Display for HlpufAdversary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Honest => write!(f, "honest"),
            Self::InterceptMeasure { copies } => write!(f, "intercept-measure-{copies}"),
            Self::ForwardBlind => write!(f, "forward-blind"),
        }
    }
}

/// Extraction of (value, basis) from K copies: Z measurements until two outcomes differ, then
/// an X measurement on the next copy. Returns the guess.
pub fn extract_pair<R: Rng + ?Sized>(state: (u8, u8), copies: usize, rng: &mut R) -> (u8, u8) {
    let (v, b) = state;
    let measure = |basis: u8, rng: &mut R| if basis == b { v } else { u8::from(rng.random::<bool>()) };
    let mut prev = measure(0, rng);
    for i in 1..copies {
        let z = measure(0, rng);
        if z != prev {
            let value = if i + 1 < copies { measure(1, rng) } else { u8::from(rng.random::<bool>()) };
            return (value, 1);
        }
        prev = z;
    }
    (prev, 0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HlpufRound {
    pub seed: u64,
    pub adversary: String,
    pub p: f64,
    pub m: usize,
    pub challenge: u64,
    pub response_bits: String,
    pub client_accept: bool,
    pub server_accept: bool,
    /// The lock returned ⊥ instead of the second half.
    pub lock_bottom: bool,
    pub eve_extracted_bits: Option<String>,
    pub eve_correct_pairs: Option<usize>,
    /// First-half qubits that passed the client's lock check.
    pub lock_qubit_passes: usize,
}

fn bit_string(b: &[u8]) -> String {
    b.iter().map(|&x| char::from(b'0' + x)).collect()
}

/// One HLPUF authentication round on a fresh CRP.
pub fn hlpuf_round(model: &HPUFModel, adversary: HlpufAdversary, seed: u64) -> Result<HlpufRound> {
    check_p(model.p)?;
    let mut rng = crate::Rng::seed_from_u64(seed);
    let cpuf = BiasedCpuf { p: model.p, bits: 4 * model.m, key: rng.random() };
    let challenge: u64 = rng.random();
    let y = cpuf.eval(challenge);
    let (f1, f2) = (pairs(&y[..2 * model.m]), pairs(&y[2 * model.m..]));
    let sent = hpuf_encode(&f1)?;

    let (received, eve) = match adversary {
        HlpufAdversary::Honest => (Some(sent), None),
        HlpufAdversary::InterceptMeasure { copies } => {
            if copies == 0 {
                return Err(Error::OutOfRange("at least one copy".into()));
            }
            let guess: Vec<(u8, u8)> = f1.iter().map(|&s| extract_pair(s, copies, &mut rng)).collect();
            let correct = guess.iter().zip(&f1).filter(|(g, s)| g == s).count();
            (Some(hpuf_encode(&guess)?), Some((guess, correct)))
        }
        HlpufAdversary::ForwardBlind => (None, None),
    };

    let (client_accept, lock_qubit_passes) = match &received {
        Some(r) => {
            let n = ver(&f1, r, &mut rng)?;
            (n == f1.len(), n)
        }
        None => (false, 0),
    };
    let lock_bottom = !client_accept;
    let server_accept = client_accept && ver(&f2, &hpuf_encode(&f2)?, &mut rng)? == f2.len();
    Ok(HlpufRound {
        seed,
        adversary: adversary.to_string(),
        p: model.p,
        m: model.m,
        challenge,
        response_bits: bit_string(&y),
        client_accept,
        server_accept,
        lock_bottom,
        eve_extracted_bits: eve.as_ref().map(|(g, _)| bit_string(&g.iter().flat_map(|&(a, b)| [a, b]).collect::<Vec<_>>())),
        eve_correct_pairs: eve.map(|(_, c)| c),
        lock_qubit_passes,
    })
}
