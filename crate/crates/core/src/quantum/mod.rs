//! Exact single-atom treatment: sparse Hamiltonian, ground state by Lanczos,
//! Husimi Q functions of the cavity modes and the symmetry-breaking collapse.

mod hamiltonian;
mod lanczos;
mod state;

pub use hamiltonian::{build_hamiltonian, u1_apply, CsrMatrix, QuantumConfig};
pub use lanczos::{lowest_eigenpair, tridiagonal_eigen, Eigenpair, LanczosConfig};
pub use state::{
    coherent_amplitudes, collapse, collapse_amplitude, collapse_onto, ground_state, Mode, QGrid, QuantumState, Ridge,
};
