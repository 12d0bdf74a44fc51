//! Problem data: Hamiltonian, coupling, initial/terminal data and the
//! Monge-Kantorovich distance.

pub mod coupling;
pub mod hamiltonian;
pub mod problem;
pub mod wasserstein;

pub use coupling::{coupling_apply, verify_coupling_assumptions, Coupling, CouplingMode};
pub use hamiltonian::{evaluate_hamiltonian, verify_hamiltonian_assumptions, Hamiltonian, HamiltonianEval, HamiltonianOrder};
pub use problem::{MFGProblem, Profile};
pub use wasserstein::wasserstein1;
