use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::qsim::{Circuit, Gate, GateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    NearestNeighbor,
    FullyConnected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolEntry {
    pub kind: GateKind,
    pub wires: Vec<usize>,
}

impl PoolEntry {
    pub fn gate(&self, param: f64) -> Gate {
        Gate { kind: self.kind.clone(), wires: self.wires.clone(), param }
    }

    pub fn is_parameterized(&self) -> bool {
        self.kind.is_rotation()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GatePool {
    pub width: usize,
    pub entries: Vec<PoolEntry>,
    pub connectivity: Connectivity,
}

impl GatePool {
    pub fn new(width: usize, entries: Vec<PoolEntry>, connectivity: Connectivity) -> Result<Self> {
        for e in &entries {
            if e.wires.iter().any(|&w| w >= width) {
                return Err(Error::InvalidWires(format!("{:?} outside width {width}", e.wires)));
            }
            Gate::new(e.kind.clone(), e.wires.clone(), 0.0)?;
        }
        Ok(Self { width, entries, connectivity })
    }

    /// Rx, Ry, Rz on every wire plus CZ on the listed pairs.
    pub fn rotations_and_cz(width: usize, pairs: &[(usize, usize)], connectivity: Connectivity) -> Result<Self> {
        let mut entries = Vec::new();
        for kind in [GateKind::Rz, GateKind::Rx, GateKind::Ry] {
            for w in 0..width {
                entries.push(PoolEntry { kind: kind.clone(), wires: vec![w] });
            }
        }
        for &(a, b) in pairs {
            entries.push(PoolEntry { kind: GateKind::Cz, wires: vec![a, b] });
        }
        Self::new(width, entries, connectivity)
    }

    /// Three-wire pool with all CZ pairs, used for phase-covariant cloning.
    pub fn phase_covariant() -> Self {
        Self::rotations_and_cz(3, &[(0, 1), (1, 2), (0, 2)], Connectivity::FullyConnected).unwrap()
    }

    /// Three-wire pool with a linear CZ chain, used for fixed-overlap 1→2 cloning.
    pub fn fixed_overlap_1to2() -> Self {
        Self::rotations_and_cz(3, &[(0, 1), (1, 2)], Connectivity::NearestNeighbor).unwrap()
    }

    /// Rotations on `width` wires with a CZ chain or all CZ pairs.
    pub fn with_connectivity(width: usize, connectivity: Connectivity) -> Self {
        let pairs: Vec<(usize, usize)> = match connectivity {
            Connectivity::NearestNeighbor => (0..width - 1).map(|a| (a, a + 1)).collect(),
            Connectivity::FullyConnected => {
                (0..width).flat_map(|a| (a + 1..width).map(move |b| (a, b))).collect()
            }
        };
        Self::rotations_and_cz(width, &pairs, connectivity).unwrap()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A gate sequence drawn from a pool together with its rotation angles.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredCircuit {
    pub pool: Arc<GatePool>,
    pub structure: Vec<usize>,
    pub params: Vec<f64>,
}

impl StructuredCircuit {
    pub fn new(pool: Arc<GatePool>, structure: Vec<usize>, params: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = structure.iter().find(|&&g| g >= pool.len()) {
            return Err(Error::OutOfRange(format!("pool index {bad}")));
        }
        let n_params = structure.iter().filter(|&&g| pool.entries[g].is_parameterized()).count();
        if n_params != params.len() {
            return Err(Error::DimensionMismatch { expected: n_params, got: params.len() });
        }
        Ok(Self { pool, structure, params })
    }

    /// Uniform random structure with uniform random angles.
    pub fn random<R: Rng + ?Sized>(pool: Arc<GatePool>, len: usize, rng: &mut R) -> Result<Self> {
        if pool.is_empty() {
            return Err(Error::InvalidState("empty gate pool".into()));
        }
        let structure: Vec<usize> = (0..len).map(|_| rng.random_range(0..pool.len())).collect();
        let n_params = structure.iter().filter(|&&g| pool.entries[g].is_parameterized()).count();
        let params = (0..n_params).map(|_| rng.random::<f64>() * 2.0 * std::f64::consts::PI).collect();
        Self::new(pool, structure, params)
    }

    /// Every pool entry in order, repeated `layers` times, with random angles.
    pub fn layered<R: Rng + ?Sized>(pool: Arc<GatePool>, layers: usize, rng: &mut R) -> Result<Self> {
        if pool.is_empty() {
            return Err(Error::InvalidState("empty gate pool".into()));
        }
        let structure: Vec<usize> = (0..layers).flat_map(|_| 0..pool.len()).collect();
        let n_params = structure.iter().filter(|&&g| pool.entries[g].is_parameterized()).count();
        let params = (0..n_params).map(|_| rng.random::<f64>() * 2.0 * std::f64::consts::PI).collect();
        Self::new(pool, structure, params)
    }

    pub fn width(&self) -> usize {
        self.pool.width
    }

    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.pool.width);
        let mut it = self.params.iter();
        for &g in &self.structure {
            let e = &self.pool.entries[g];
            let p = if e.is_parameterized() { *it.next().unwrap() } else { 0.0 };
            c.push(e.gate(p)).expect("pool wires within width");
        }
        c
    }

    /// Index into `params` of the first rotation at or after structure position `pos`.
    pub fn param_offset(&self, pos: usize) -> usize {
        self.structure[..pos].iter().filter(|&&g| self.pool.entries[g].is_parameterized()).count()
    }

    /// Replaces the gate at `pos`; angles of untouched gates are kept.
    pub fn replaced(&self, pos: usize, gate: usize, new_param: f64) -> Result<Self> {
        let off = self.param_offset(pos);
        let mut params = self.params.clone();
        if self.pool.entries[self.structure[pos]].is_parameterized() {
            params.remove(off);
        }
        if self.pool.entries[gate].is_parameterized() {
            params.insert(off, new_param);
        }
        let mut structure = self.structure.clone();
        structure[pos] = gate;
        Self::new(self.pool.clone(), structure, params)
    }
}
