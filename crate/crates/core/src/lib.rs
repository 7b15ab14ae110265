//! Small-system quantum simulator with ideal and variational cloners,
//! emulation attacks, and protocol attack harnesses.

pub mod attacks;
pub mod cloning;
pub mod equality;
pub mod emulation;
pub mod error;
pub mod puf;
pub mod qsim;
pub mod varqlone;

pub use error::{Error, Result};
pub use qsim::{Circuit, DensityMatrix, Gate, GateKind, PureState};

use rand::SeedableRng;
pub type Rng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
