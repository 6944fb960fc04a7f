//! Statevector simulation: dense reference engine, a fast executor for
//! permutation-heavy circuits, entanglement entropy and Pauli-noise
//! trajectories.

mod engine;
mod entropy;
mod noise;
mod state;

pub use engine::{CompiledCircuit, FastState, NoiseEvent, Op};
pub use entropy::{entanglement_entropy, entropy_of_entries, Bipartition, EIGEN_CUTOFF};
pub use noise::{run_noisy_trajectory, sample_events, NoiseModel, NoiseScope};
pub use state::{sample_index, StateVector, MAX_DENSE_QUBITS};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}
