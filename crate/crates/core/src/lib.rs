//! Exact-arithmetic engine for the parabolic k-Dirac operator.
//!
//! Spinor-valued polynomials on the two-step nilpotent group with
//! coordinates `x_{αi}` (weight 1) and `y_{rs}` (weight 2) are handled over
//! the Gaussian rationals. On top of that the crate computes monogenic
//! kernels, tableau prolongations and their filtrations, the Spencer complex
//! of the right-invariant coframe, and the unique monogenic extension of
//! initial data on the slice `x_{n+1,·} = 0, y = 0`.

pub mod clifford;
pub mod dirac;
pub mod error;
pub mod exactnum;
pub mod ivp;
mod memo;
pub mod nilframe;
pub mod report;
pub mod spencer;
pub mod suite;
pub mod wpoly;

pub use clifford::{build_gamma, GammaRep};
pub use dirac::{BasisOrder, Flavor, KDirac, Permutation, Subspace};
pub use error::{Error, Result};
pub use exactnum::{GaussRat, SparseMat};
pub use ivp::{restrict, Ivp, SliceFunction};
pub use nilframe::{FieldId, Frame};
pub use spencer::{SpencerComplex, SpencerForm};
pub use wpoly::{HomBasis, Monomial, Params, PolySpinor};
