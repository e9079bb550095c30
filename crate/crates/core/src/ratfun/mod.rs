//! Exact polynomial, rational-function and transfer-matrix algebra in the
//! delay variable `q⁻¹`.

mod matrix;
mod polynomial;
mod rational;

pub use matrix::{numeric_rank, TransferMatrix, DEFAULT_DEGREE_CEILING, RANK_TOLERANCE};
pub use polynomial::Polynomial;
pub use rational::{RationalFunction, POLE_TOLERANCE, STABILITY_MARGIN};
