//! Numerical toolkit for spacetime quantum correlations.
//!
//! Subsystem ordering convention, used by every module: in a tensor product
//! `A ⊗ B ⊗ C` subsystem index 0 is the leftmost factor `A`, and basis index
//! `i = i_A·d_B·d_C + i_B·d_C + i_C`.

pub mod channels;
pub mod cv_wigner;
pub mod error;
pub mod gaussian;
pub mod histories_games;
pub mod operator_algebra;
pub mod otoc;
pub mod pdm;
pub mod process_matrix;
pub mod timecrystal;

pub use error::{Error, Result};
pub use operator_algebra::{CMatrix, PauliString, C64};
