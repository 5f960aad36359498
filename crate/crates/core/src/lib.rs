//! Relativistic MHD contact discontinuities: symmetrized equations, jump
//! conditions, characteristic analysis, interface straightening and the
//! linearized free-boundary problem, with numerical checks of each piece.

pub mod characteristics;
pub mod config;
pub mod eos;
pub mod error;
pub mod interface;
pub mod jumps;
pub mod kinematics;
pub mod linalg;
pub mod linearized;
pub mod sampling;
pub mod scalar;
pub mod scenarios;
pub mod solver;
pub mod symmetrizer;
pub mod verification;

pub use eos::ThermoParams;
pub use error::{Error, Result};
pub use kinematics::{Kinematics, PrimitiveState};
pub use symmetrizer::MatrixSet;
