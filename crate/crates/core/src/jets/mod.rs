//! Second-order forward-mode differentiation over real or complex scalars.

mod jet;
mod scalar;

pub use jet::{ArithOp, Elementary, Jet2};
pub use scalar::Scalar;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("division by a jet with zero value")]
    SingularDivision,
    #[error("{function} is not defined at {input}")]
    Domain { function: &'static str, input: Scalar },
}
