//! Truncated multi-mode bosonic Fock space in the holomorphic representation.

mod basis;
mod kernel;
mod operator;
mod oracle;

pub use basis::{binomial, enumerate_basis, ModeSet, MultiIndex};
pub use kernel::{basis_functions, kernel_eval, wavefunction, CoherentPoint};
pub use operator::{
    induced_rotation, ladder_operators, position_momentum, CMatrix, CVector, FockOperator, FockVector, Ladder,
    LadderPoly,
};
pub use operator::{matmul, max_abs};
pub use oracle::{scalar_product_quadrature_oracle, MAX_ORACLE_MODES};
