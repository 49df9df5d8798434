//! Dense complex linear algebra and quantum primitives.

pub mod haar;
pub mod linalg;
pub mod measures;
pub mod state;

pub use haar::{haar_random_unitary, haar_unitary_with, rng_from_seed, SeededRng};
pub use linalg::{eig_hermitian, ComplexMatrix, ComplexVector, Eigen};
pub use measures::{
    bures_measure, bures_metric, fidelity, hilbert_schmidt_distance, relative_entropy,
    trace_distance,
};
pub use state::{partial_transpose_matrix, DensityMatrix, Dims, PureState, Spectrum, Subsystem};

/// Partial transpose of a density matrix on the chosen subsystem.
pub fn partial_transpose(rho: &DensityMatrix, sub: Subsystem) -> ComplexMatrix {
    rho.partial_transpose(sub)
}
