//! Low-resource identification: trap-based classical verification and the classical attacks on it.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use super::qpuf::UqPUF;
use crate::error::{Error, Result};
use crate::qsim::haar::haar_state;
use crate::qsim::state::PureState;

/// One protocol run as seen by the verifier. Positions not in `trap_positions` carried valid responses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LrvTranscript {
    pub trap_positions: Vec<usize>,
    pub bits: Vec<u8>,
    pub delta_er: f64,
}

impl LrvTranscript {
    pub fn accept(&self) -> Result<bool> {
        cver(&self.bits, &self.trap_positions, self.delta_er)
    }
}

fn check_traps(n: usize, traps: &[usize]) -> Result<Vec<bool>> {
    let mut mark = vec![false; n];
    for &t in traps {
        if t >= n {
            return Err(Error::OutOfRange(format!("trap position {t} outside {n} bits")));
        }
        if std::mem::replace(&mut mark[t], true) {
            return Err(Error::InvalidState(format!("trap position {t} repeated")));
        }
    }
    Ok(mark)
}

/// test1: every non-trap bit is 0. test2: the number of 1s on traps is within δ_er of half the trap count.
pub fn cver(bits: &[u8], traps: &[usize], delta_er: f64) -> Result<bool> {
    if delta_er < 0.0 || delta_er.is_nan() {
        return Err(Error::OutOfRange(format!("delta_er = {delta_er}")));
    }
    let is_trap = check_traps(bits.len(), traps)?;
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::InvalidState("bits must be 0 or 1".into()));
    }
    let test1 = bits.iter().zip(&is_trap).all(|(&b, &t)| t || b == 0);
    if !test1 {
        return Ok(false);
    }
    let count = traps.iter().filter(|&&t| bits[t] == 1).count() as f64;
    Ok((count - traps.len() as f64 / 2.0).abs() <= delta_er + 1e-12)
}

pub fn trap_count(n: usize, p: f64) -> usize {
    ((1.0 - p) * n as f64 + 1e-9).floor() as usize
}

/// A Haar state with the component along `psi` removed.
fn orthogonal_to<R: Rng + ?Sized>(psi: &PureState, rng: &mut R) -> Result<PureState> {
    let mut v = haar_state(psi.dim(), rng)?.into_amps();
    let ov = psi.inner(&PureState::new(v.clone())?)?;
    for (x, a) in v.iter_mut().zip(psi.amps()) {
        *x -= ov * a;
    }
    PureState::normalized(v)
}

/// One honest round: valid responses on a fraction `p` of positions, states orthogonal to the
/// response on the traps, and a SWAP test by the prover at every position (bit 1 = reject).
pub fn lrv_round<R: Rng + ?Sized>(puf: &mut UqPUF, n: usize, p: f64, delta_er: f64, rng: &mut R) -> Result<LrvTranscript> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("p = {p}")));
    }
    let t = trap_count(n, p);
    let mut traps = sample(rng, n, t).into_vec();
    traps.sort_unstable();
    let is_trap = check_traps(n, &traps)?;
    let mut bits = Vec::with_capacity(n);
    for &trap in &is_trap {
        let challenge = haar_state(puf.dim(), rng)?;
        let response = puf.eval_pure(&challenge)?;
        let sent = if trap { orthogonal_to(&response, rng)? } else { response };
        let f = puf.eval_pure(&challenge)?.overlap_sqr(&sent)?;
        let accept = rng.random::<f64>() < 0.5 + 0.5 * f;
        bits.push(u8::from(!accept));
    }
    Ok(LrvTranscript { trap_positions: traps, bits, delta_er })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LrvRun {
    pub rounds: usize,
    pub accepted: usize,
    pub accept_rate: f64,
    pub sigma: f64,
    /// Exact honest pass probability of test2.
    pub exact: f64,
    pub seed: u64,
}

pub fn run_lrv(puf: &mut UqPUF, n: usize, p: f64, delta_er: f64, rounds: usize, seed: u64) -> Result<LrvRun> {
    if rounds == 0 || n == 0 {
        return Err(Error::OutOfRange("N and rounds must be positive".into()));
    }
    let mut rng = crate::Rng::seed_from_u64(seed);
    let mut accepted = 0;
    for _ in 0..rounds {
        accepted += lrv_round(puf, n, p, delta_er, &mut rng)?.accept()? as usize;
    }
    let rate = accepted as f64 / rounds as f64;
    Ok(LrvRun {
        rounds,
        accepted,
        accept_rate: rate,
        sigma: (rate * (1.0 - rate) / rounds as f64).sqrt(),
        exact: lrv_honest_completeness(trap_count(n, p), delta_er)?,
        seed,
    })
}

pub(crate) fn ln_choose(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Trap 1-counts accepted by test2 for `traps` trap positions.
fn valid_counts(traps: usize, delta_er: f64) -> impl Iterator<Item = usize> {
    let center = traps as f64 / 2.0;
    (0..=traps).filter(move |&x| (x as f64 - center).abs() <= delta_er + 1e-12)
}

/// P(|Bin(T, ½) − T/2| ≤ δ_er): the honest pass probability with ideal SWAP statistics on traps.
pub fn lrv_honest_completeness(traps: usize, delta_er: f64) -> Result<f64> {
    if delta_er < 0.0 {
        return Err(Error::OutOfRange(format!("delta_er = {delta_er}")));
    }
    let ln_half = -(traps as f64) * std::f64::consts::LN_2;
    Ok(valid_counts(traps, delta_er).map(|x| (ln_choose(traps, x) + ln_half).exp()).sum())
}

/// The completeness figure 1 − 2e^{−N/4} claimed for the honest prover.
pub fn lrv_claimed_completeness(n: usize) -> f64 {
    1.0 - 2.0 * (-(n as f64) / 4.0).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassicalStrategy {
    /// Each bit is 0 independently with probability α.
    Independent(f64),
    /// A string with a fixed number of 1s placed uniformly.
    GlobalOptimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalAttack {
    /// Closed form: (2δ+1)·α^{3N/4}(1−α)^{N/4}·C(N/2,N/4) or (2δ+1)·(N/2)!(3N/4)!/(N!(N/4)!).
    pub closed_form: f64,
    /// Independent: the exact acceptance probability. Global: Σ over tolerated 1-counts of C(N/2,c)/C(N,c).
    pub summed: f64,
    /// Best single strategy of this kind (equals `summed` for the independent strategy).
    pub optimum: f64,
    /// N was not divisible by 4 and the counts were rounded.
    pub rounded: bool,
}

/// Success probability of a classical adversary against cVer with N/2 traps.
pub fn classical_attack_prob(n: usize, delta_er: f64, strategy: ClassicalStrategy) -> Result<ClassicalAttack> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("N = {n}")));
    }
    if delta_er < 0.0 {
        return Err(Error::OutOfRange(format!("delta_er = {delta_er}")));
    }
    let rounded = n % 4 != 0;
    let t = n / 2;
    let quarter = (t as f64 / 2.0).round() as usize;
    let width = 2.0 * delta_er.floor() + 1.0;
    match strategy {
        ClassicalStrategy::Independent(alpha) => {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::OutOfRange(format!("alpha = {alpha}")));
            }
            // non-trap bits all 0, x of the t trap bits 1
            let term = |x: usize| ln_choose(t, x).exp() * (1.0 - alpha).powi(x as i32) * alpha.powi((n - x) as i32);
            let exact: f64 = valid_counts(t, delta_er).map(term).sum();
            let closed_form = width * term(quarter);
            Ok(ClassicalAttack { closed_form, summed: exact, optimum: exact, rounded })
        }
        ClassicalStrategy::GlobalOptimal => {
            let ratio = |c: usize| (ln_choose(t, c) - ln_choose(n, c)).exp();
            let summed = valid_counts(t, delta_er).map(ratio).sum();
            let optimum = valid_counts(t, delta_er).map(ratio).fold(0.0, f64::max);
            Ok(ClassicalAttack { closed_form: width * ratio(quarter), summed, optimum, rounded })
        }
    }
}

/// α maximizing the independent-strategy closed form on a uniform grid over [0, 1].
pub fn independent_argmax(n: usize, delta_er: f64, points: usize) -> Result<(f64, f64)> {
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..points {
        let a = i as f64 / (points - 1) as f64;
        let v = classical_attack_prob(n, delta_er, ClassicalStrategy::Independent(a))?.closed_form;
        if v > best.1 {
            best = (a, v);
        }
    }
    Ok(best)
}

/// Best deterministic string against uniformly placed N/2 traps, by enumeration of every string and placement.
pub fn brute_force_best(n: usize, delta_er: f64) -> Result<f64> {
    if n > 16 {
        return Err(Error::OutOfRange(format!("N = {n} too large to enumerate")));
    }
    let t = n / 2;
    let placements: Vec<Vec<usize>> = (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == t)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect();
    let mut best = 0.0f64;
    let mut bits = vec![0u8; n];
    for s in 0u32..1 << n {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = (s >> i & 1) as u8;
        }
        let mut pass = 0usize;
        for tr in &placements {
            pass += cver(&bits, tr, delta_er)? as usize;
        }
        best = best.max(pass as f64 / placements.len() as f64);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapProb {
    pub prob: f64,
    /// C(N−Np, (N−Np)/2) / C(N, (N−Np)/2)
    pub conditional: f64,
    /// 1/(N/2 + 1)
    pub guess: f64,
    /// Np or (N−Np)/2 was not an integer.
    pub rounded: bool,
}

/// Success of the optimal classical adversary when a fraction p of positions carry valid responses
/// and the 1-count has to be guessed uniformly.
pub fn general_trap_prob(n: usize, p: f64) -> Result<TrapProb> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("p = {p}")));
    }
    if n == 0 {
        return Err(Error::OutOfRange("N must be positive".into()));
    }
    let np = p * n as f64;
    let traps = n - (np.round() as usize).min(n);
    let ones = traps / 2;
    let rounded = (np - np.round()).abs() > 1e-9 || traps % 2 == 1;
    let conditional = (ln_choose(traps, ones) - ln_choose(n, ones)).exp();
    let guess = 1.0 / (n as f64 / 2.0 + 1.0);
    Ok(TrapProb { prob: guess * conditional, conditional, guess, rounded })
}

/// 2/(N(N+2)) · Σ_{k=0}^{N} (N−k)!((N+k)/2)! / (N!((N−k)/2)!), half-integer factorials included.
pub fn general_trap_average(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange("N must be positive".into()));
    }
    let nf = n as f64;
    let mut sum = 0.0;
    for k in 0..=n {
        let a = (nf - k as f64) / 2.0 + 1.0;
        sum += (0..k).map(|i| (a + i as f64) / (nf - i as f64)).product::<f64>();
    }
    Ok(2.0 / (nf * (nf + 2.0)) * sum)
}

pub fn general_trap_asymptotic(n: usize) -> f64 {
    6.0 / (n as f64 * (n as f64 + 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cver_edge_cases() {
        assert!(!cver(&[0; 8], &[0, 1, 2, 3], 0.0).unwrap());
        assert!(cver(&[1, 1, 0, 0, 0, 0, 0, 0], &[0, 1, 2, 3], 0.0).unwrap());
        assert!(!cver(&[1, 1, 0, 0, 1, 0, 0, 0], &[0, 1, 2, 3], 5.0).unwrap());
        assert!(cver(&[0; 4], &[0, 1], -1.0).is_err());
        assert!(cver(&[0; 4], &[0, 0], 0.0).is_err());
    }

    #[test]
    fn trap_average_endpoints() {
        // N = 2: k = 0, 1, 2 terms are 1, (3/2)/2, 1
        assert!((general_trap_average(2).unwrap() - 2.0 / 8.0 * 2.75).abs() < 1e-12);
    }
}
