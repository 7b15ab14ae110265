//! Dense state-vector and density-matrix engine for small registers.

pub mod gate;
pub mod haar;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod state;

pub use gate::{Circuit, Gate, GateKind};
pub use haar::{haar_state, haar_unitary};
pub use linalg::{CMatrix, C64};
pub use metrics::{bures_angle, distances, fidelity, fidelity_pure, trace_distance, Distances};
pub use state::{DensityMatrix, PureState};
