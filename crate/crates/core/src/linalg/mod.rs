//! Dense complex linear algebra for small operator spaces.

mod eig;
mod expm;
mod matrix;
mod solve;

pub use eig::{hermitian_eig, HermitianEigen, HERMITIAN_TOL};
pub use expm::expm;
pub use matrix::{embed, kron, partial_trace, pauli_x, pauli_y, pauli_z, ComplexMatrix, I, ONE, ZERO};
pub use solve::{null_vector, solve, NullVector};
