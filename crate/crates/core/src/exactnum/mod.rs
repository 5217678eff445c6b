//! Exact scalars over the Gaussian rationals and sparse linear algebra.

mod gauss;
mod sparse;

pub use gauss::GaussRat;
pub use sparse::{
    densify, is_zero_vec, kernel_basis, rank, solve, sparsify, Echelon, Factorization, Solution,
    SparseMat, SparseRow, Vector,
};
