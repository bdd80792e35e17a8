//! Sparse matrix storage, direct solvers for the per-step saddle-point
//! systems, and small dense eigenroutines for stability-constant estimates.

mod csr;
mod eigen;
mod solve;
mod vector;

pub use csr::CsrMatrix;
pub use eigen::{eig_min_generalized, sym_generalized_eigenvalues};
pub use solve::{solve_direct, Factorization, RESIDUAL_LIMIT};
pub use vector::DenseVector;
