//! Variational cloning: state families, cost functions, parameter-shift gradients,
//! training, structure search and faithfulness audits.

mod cost;
mod faithfulness;
mod pool;
mod search;
mod train;

pub use cost::{
    clone_fidelities, cost, cost_gradient, mean_clone_fidelities, CloneTask, CostKind, CostMode, Prepared,
};
pub use faithfulness::{faithfulness_audit, known_optimum, FaithfulnessReport, Optimum};
pub use pool::{Connectivity, GatePool, PoolEntry, StructuredCircuit};
pub use search::{structure_search, RestartResult, SearchConfig, SearchResult, Start};
pub use train::{randomize_params, train, Optimizer, TrainConfig, TrainResult};

use std::f64::consts::PI;

use rand::Rng;

use crate::cloning::four_state;
use crate::error::{Error, Result};
use crate::qsim::state::PureState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateFamily {
    /// Equatorial states (|0⟩ + e^{iη}|1⟩)/√2, η uniform on [0, 2π).
    PhaseCovariant,
    /// cos φ|0⟩ ± sin φ|1⟩, equiprobable.
    FixedOverlapPair(f64),
    /// The four states |φ_{x,a}⟩, equiprobable.
    FourState(f64),
}

impl StateFamily {
    /// Weighted deterministic grid; discrete families return all their states.
    pub fn grid(&self, points: usize) -> Result<Vec<(f64, PureState)>> {
        match *self {
            StateFamily::PhaseCovariant => {
                if points == 0 {
                    return Err(Error::OutOfRange("empty family grid".into()));
                }
                let w = 1.0 / points as f64;
                Ok((0..points).map(|k| (w, PureState::equatorial(2.0 * PI * k as f64 / points as f64))).collect())
            }
            StateFamily::FixedOverlapPair(phi) => Ok(vec![(0.5, four_state(phi, 0, 0)), (0.5, four_state(phi, 1, 0))]),
            StateFamily::FourState(phi) => {
                Ok([(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|&(x, a)| (0.25, four_state(phi, x, a))).collect())
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PureState {
        match *self {
            StateFamily::PhaseCovariant => PureState::equatorial(rng.random::<f64>() * 2.0 * PI),
            StateFamily::FixedOverlapPair(phi) => four_state(phi, rng.random_range(0..2u8), 0),
            StateFamily::FourState(phi) => four_state(phi, rng.random_range(0..2u8), rng.random_range(0..2u8)),
        }
    }

    /// Number of distinct states, or `None` for continuous families.
    pub fn size(&self) -> Option<usize> {
        match self {
            StateFamily::PhaseCovariant => None,
            StateFamily::FixedOverlapPair(_) => Some(2),
            StateFamily::FourState(_) => Some(4),
        }
    }

    /// Measure normalization used in the faithfulness bounds.
    pub fn measure_norm(&self) -> f64 {
        match self.size() {
            None => 2.0 * PI,
            Some(k) => k as f64,
        }
    }
}
