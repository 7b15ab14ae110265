use super::linalg::{eigvalsh, sqrtm_psd, trace_norm};
use super::state::{DensityMatrix, PureState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distances {
    pub fidelity: f64,
    pub trace_distance: f64,
    pub bures_angle: f64,
}

fn check(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: sigma.dim() });
    }
    Ok(())
}

/// Squared Uhlmann fidelity (Tr √(√ρ σ √ρ))².
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check(rho, sigma)?;
    let sr = sqrtm_psd(rho.matrix());
    let inner = &sr * sigma.matrix() * &sr;
    let root_sum: f64 = eigvalsh(&inner).into_iter().map(|l| l.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// Fidelity against a pure state, ⟨ψ|ρ|ψ⟩.
pub fn fidelity_pure(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    Ok(rho.expectation(psi)?.clamp(0.0, 1.0))
}

pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check(rho, sigma)?;
    Ok((0.5 * trace_norm(&(rho.matrix() - sigma.matrix()))).clamp(0.0, 1.0))
}

pub fn bures_angle_from_fidelity(f: f64) -> f64 {
    f.clamp(0.0, 1.0).sqrt().acos()
}

pub fn bures_angle(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(bures_angle_from_fidelity(fidelity(rho, sigma)?))
}

pub fn distances(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Distances> {
    let fidelity = fidelity(rho, sigma)?;
    Ok(Distances { fidelity, trace_distance: trace_distance(rho, sigma)?, bures_angle: bures_angle_from_fidelity(fidelity) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn identical_and_orthogonal() {
        let r = PureState::bloch(1.1, 0.3).unwrap().to_density();
        let d = distances(&r, &r).unwrap();
        assert!((d.fidelity - 1.0).abs() < 1e-10 && d.trace_distance < 1e-10 && d.bures_angle < 1e-5);

        let z0 = PureState::basis(1, 0).to_density();
        let z1 = PureState::basis(1, 1).to_density();
        let d = distances(&z0, &z1).unwrap();
        assert!(d.fidelity < 1e-12);
        assert!((d.trace_distance - 1.0).abs() < 1e-12);
        assert!((d.bures_angle - FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn mismatched_dims() {
        let a = DensityMatrix::maximally_mixed(1);
        let b = DensityMatrix::maximally_mixed(2);
        assert!(fidelity(&a, &b).is_err());
    }

    #[test]
    fn mixed_against_pure() {
        let m = DensityMatrix::maximally_mixed(1);
        let p = PureState::plus();
        assert!((fidelity(&m, &p.to_density()).unwrap() - 0.5).abs() < 1e-12);
        assert!((fidelity_pure(&m, &p).unwrap() - 0.5).abs() < 1e-12);
    }
}
