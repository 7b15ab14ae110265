use nalgebra::DVector;

use super::linalg::{c, eigvalsh, log2_exact, CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_FLOOR: f64 = -1e-10;
pub const MAX_QUBITS: usize = 6;

/// Pure state on `n` qubits. Wire `q` is bit `q` of the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<C64>,
    n: usize,
}

impl PureState {
    /// Validating constructor: length must be a power of two and the norm 1.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n = log2_exact(amps.len()).ok_or(Error::NotPowerOfTwo(amps.len()))?;
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm2}")));
        }
        Ok(Self { amps, n })
    }

    /// Rescales to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let n = log2_exact(amps.len()).ok_or(Error::NotPowerOfTwo(amps.len()))?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Ok(Self { amps: amps.into_iter().map(|a| a / norm).collect(), n })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&a| c(a, 0.0)).collect())
    }

    pub(crate) fn from_raw(amps: Vec<C64>) -> Self {
        let n = log2_exact(amps.len()).expect("power of two");
        Self { amps, n }
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Self { amps, n }
    }

    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_raw(vec![c(h, 0.0), c(h, 0.0)])
    }

    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_raw(vec![c(h, 0.0), c(-h, 0.0)])
    }

    /// cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩ with θ∈[0,π], φ∈[0,2π).
    pub fn bloch(theta: f64, phi: f64) -> Result<Self> {
        let eps = 1e-12;
        if !(-eps..=std::f64::consts::PI + eps).contains(&theta) {
            return Err(Error::OutOfRange(format!("theta = {theta}")));
        }
        if !(-eps..2.0 * std::f64::consts::PI).contains(&phi) {
            return Err(Error::OutOfRange(format!("phi = {phi}")));
        }
        Ok(Self::bloch_unchecked(theta, phi))
    }

    pub(crate) fn bloch_unchecked(theta: f64, phi: f64) -> Self {
        let (s, co) = (theta / 2.0).sin_cos();
        Self::from_raw(vec![c(co, 0.0), C64::from_polar(s, phi)])
    }

    /// Equatorial state (|0⟩ + e^{iη}|1⟩)/√2.
    pub fn equatorial(eta: f64) -> Self {
        Self::bloch_unchecked(std::f64::consts::FRAC_PI_2, eta)
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn overlap_sqr(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `self` on the low wires, `other` above it.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for b in &other.amps {
            for a in &self.amps {
                amps.push(a * b);
            }
        }
        PureState { amps, n: self.n + other.n }
    }

    pub fn tensor_power(&self, k: usize) -> PureState {
        let mut out = PureState::from_raw(vec![ONE]);
        for _ in 0..k {
            out = out.tensor(self);
        }
        out
    }

    pub fn to_density(&self) -> DensityMatrix {
        let v = DVector::from_column_slice(&self.amps);
        DensityMatrix { mat: &v * v.adjoint(), n: self.n }
    }

    pub fn as_dvector(&self) -> DVector<C64> {
        DVector::from_column_slice(&self.amps)
    }

    /// Probability that measuring `wire` in the computational basis yields 1.
    pub fn prob_one(&self, wire: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> wire) & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// ⟨ψ|ρ_wires|ψ⟩ for the reduced state on `wires`, computed without forming ρ.
    pub fn reduced_overlap(&self, wires: &[usize], psi: &PureState) -> f64 {
        let k = wires.len();
        debug_assert_eq!(psi.n, k);
        let rest: Vec<usize> = (0..self.n).filter(|w| !wires.contains(w)).collect();
        let mut total = 0.0;
        for r in 0..(1usize << rest.len()) {
            let base = scatter_bits(r, &rest);
            let mut acc = ZERO;
            for j in 0..(1usize << k) {
                let idx = base | scatter_bits(j, wires);
                acc += psi.amps[j].conj() * self.amps[idx];
            }
            total += acc.norm_sqr();
        }
        total
    }
}

/// Places bit `b` of `x` at position `wires[b]`.
pub fn scatter_bits(x: usize, wires: &[usize]) -> usize {
    wires.iter().enumerate().fold(0, |acc, (b, &w)| acc | (((x >> b) & 1) << w))
}

/// Inverse of [`scatter_bits`].
pub fn gather_bits(idx: usize, wires: &[usize]) -> usize {
    wires.iter().enumerate().fold(0, |acc, (b, &w)| acc | (((idx >> w) & 1) << b))
}

fn check_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, got: b });
    }
    Ok(())
}

/// Hermitian, PSD, unit-trace matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    n: usize,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidState("matrix not square".into()));
        }
        let n = log2_exact(mat.nrows()).ok_or(Error::NotPowerOfTwo(mat.nrows()))?;
        let herm = (&mat - mat.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian ({herm:e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > HERMITIAN_TOL || tr.im.abs() > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = eigvalsh(&mat)[0];
        if min < PSD_FLOOR {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { mat, n })
    }

    pub(crate) fn from_matrix_unchecked(mat: CMatrix) -> Self {
        let n = log2_exact(mat.nrows()).expect("power of two");
        Self { mat, n }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1 << n;
        Self { mat: CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0), n }
    }

    /// Bloch-ball qubit state ½(I + r·σ).
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if len > 1.0 + 1e-12 {
            return Err(Error::OutOfRange(format!("Bloch vector length {len}")));
        }
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                c(0.5 * (1.0 + r[2]), 0.0),
                c(0.5 * r[0], -0.5 * r[1]),
                c(0.5 * r[0], 0.5 * r[1]),
                c(0.5 * (1.0 - r[2]), 0.0),
            ],
        );
        Ok(Self { mat: m, n: 1 })
    }

    pub fn bloch_vector(&self) -> Option<[f64; 3]> {
        if self.n != 1 {
            return None;
        }
        let m = &self.mat;
        Some([2.0 * m[(1, 0)].re, 2.0 * m[(1, 0)].im, (m[(0, 0)] - m[(1, 1)]).re])
    }

    /// Convex mixture Σ w_i ρ_i; weights must sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::InvalidState("empty mixture".into()))?.1;
        let total: f64 = parts.iter().map(|p| p.0).sum();
        if (total - 1.0).abs() > 1e-12 || parts.iter().any(|p| p.0 < 0.0) {
            return Err(Error::OutOfRange(format!("mixture weights sum to {total}")));
        }
        let mut acc = CMatrix::zeros(first.dim(), first.dim());
        for (w, r) in parts {
            check_dim(first.dim(), r.dim())?;
            acc += &r.mat * c(*w, 0.0);
        }
        Ok(Self { mat: acc, n: first.n })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.mat)
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    /// ⟨ψ|ρ|ψ⟩
    pub fn expectation(&self, psi: &PureState) -> Result<f64> {
        check_dim(self.dim(), psi.dim())?;
        let v = psi.as_dvector();
        Ok((v.adjoint() * &self.mat * &v)[(0, 0)].re)
    }

    /// `self` on the low wires, `other` above it.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix { mat: super::linalg::kron(&other.mat, &self.mat), n: self.n + other.n }
    }

    /// Reduced state on `keep` (ascending wire order becomes the new little-endian order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() || keep.iter().any(|&w| w >= self.n) {
            return Err(Error::InvalidWires(format!("keep set {keep:?} on {} qubits", self.n)));
        }
        let rest: Vec<usize> = (0..self.n).filter(|w| !keep.contains(w)).collect();
        let dk = 1usize << keep.len();
        let mut out = CMatrix::zeros(dk, dk);
        for t in 0..(1usize << rest.len()) {
            let base = scatter_bits(t, &rest);
            for i in 0..dk {
                let ri = base | scatter_bits(i, &keep);
                for j in 0..dk {
                    let rj = base | scatter_bits(j, &keep);
                    out[(i, j)] += self.mat[(ri, rj)];
                }
            }
        }
        Ok(DensityMatrix { mat: out, n: keep.len() })
    }

    /// Von Neumann entropy in bits; 0·log0 = 0 and eigenvalues below 1e-12 dropped.
    pub fn entropy(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .filter(|&l| l > 1e-12)
            .map(|l| -l * l.log2())
            .sum()
    }

    /// ρ ↦ (1−p)ρ + p·I/d
    pub fn depolarize(&self, p: f64) -> DensityMatrix {
        let d = self.dim();
        let mat = &self.mat * c(1.0 - p, 0.0) + CMatrix::identity(d, d) * c(p / d as f64, 0.0);
        DensityMatrix { mat, n: self.n }
    }
}

impl PureState {
    /// Reduced density matrix on `keep` directly from amplitudes.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() || keep.iter().any(|&w| w >= self.n) {
            return Err(Error::InvalidWires(format!("keep set {keep:?} on {} qubits", self.n)));
        }
        let rest: Vec<usize> = (0..self.n).filter(|w| !keep.contains(w)).collect();
        let dk = 1usize << keep.len();
        let mut out = CMatrix::zeros(dk, dk);
        let mut col = vec![ZERO; dk];
        for t in 0..(1usize << rest.len()) {
            let base = scatter_bits(t, &rest);
            for (i, slot) in col.iter_mut().enumerate() {
                *slot = self.amps[base | scatter_bits(i, &keep)];
            }
            for i in 0..dk {
                for j in 0..dk {
                    out[(i, j)] += col[i] * col[j].conj();
                }
            }
        }
        Ok(DensityMatrix { mat: out, n: keep.len() })
    }
}
