//! Haar-random states and unitaries.

use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::{c, is_power_of_two, CMatrix, C64};
use super::state::PureState;
use crate::error::{Error, Result};

fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) / std::f64::consts::SQRT_2
    })
}

/// QR of a complex Gaussian matrix, with the phases of diag(R) moved into Q.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CMatrix> {
    if dim < 2 || !is_power_of_two(dim) {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let qr = ginibre(dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..dim {
        let d = r[(k, k)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for row in 0..dim {
            q[(row, k)] *= ph;
        }
    }
    Ok(q)
}

/// Uniform state on the unit sphere of C^dim.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<PureState> {
    if dim < 2 || !is_power_of_two(dim) {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let v: Vec<C64> = (0..dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c(re, im)
        })
        .collect();
    PureState::normalized(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::linalg::unitarity_deviation;
    use crate::seeded_rng;

    #[test]
    fn unitary_and_deterministic() {
        let u = haar_unitary(4, &mut seeded_rng(3)).unwrap();
        assert!(unitarity_deviation(&u) < 1e-10);
        let v = haar_unitary(4, &mut seeded_rng(3)).unwrap();
        assert_eq!(u, v);
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(haar_unitary(3, &mut seeded_rng(0)).is_err());
        assert!(haar_state(1, &mut seeded_rng(0)).is_err());
    }
}
