//! Qubit-efficient LABS solving with Pauli correlation encoding.
//!
//! The crate is split by concern:
//!
//! - [`labs`]: exact objective arithmetic (autocorrelations, sidelobe energy,
//!   merit factor, incremental flips, symmetry canonicalization).
//! - [`pauli`]: symplectic Pauli strings, the commuting-class partition and
//!   the randomized correlator-set samplers.
//! - [`sim`]: dense statevector simulation of the brickwork ansatz.
//! - [`pce`]: relaxed loss, parameter-shift gradients and the solver loop.
//! - [`baselines`]: exhaustive, skew-symmetric, Tabu and memetic solvers,
//!   plus the PCE warm start.
//! - [`bench`]: campaigns, exponential TTS fits, KS tests, tuning sweeps,
//!   the shot bound and crossover estimation.

pub mod baselines;
pub mod bench;
pub mod error;
pub mod labs;
pub mod pauli;
pub mod pce;
pub mod seed;
pub mod sim;
pub mod tts;

pub use error::{Error, Result};
pub use labs::{BinarySequence, EnergyReport};
pub use pauli::{PauliMode, PauliSet, PauliString};
pub use pce::PceConfig;
pub use sim::{AnsatzSpec, Statevector};
pub use tts::{EnergyLevels, SolveResult};

/// Version tag written into every JSON document the crate emits.
pub const SCHEMA_VERSION: u32 = 1;
