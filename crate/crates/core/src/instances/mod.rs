//! Built-in instances: quantale-valued matrix equipments, free virtual double
//! categories and small tabulated fixtures.

mod free;
mod matrix;
mod quantale;

use alloc::string::String;

use thiserror::Error;

pub use free::{f1, free_vdc, terminal, Generator, Presentation};
pub use matrix::{
    bool_matrix_equipment, tropical_matrix_equipment, Family, MatrixCaps, MatrixEquipment,
    MatrixSpec,
};
pub use quantale::FiniteQuantale;

use crate::vdc::VdcError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("quantale axiom violated: {0}")]
    QuantaleAxiom(String),
    #[error("bad matrix: {0}")]
    BadMatrix(String),
    #[error("family is not closed: {0}")]
    NotClosed(String),
    #[error("bad presentation: {0}")]
    BadPresentation(String),
    #[error("closure budget exceeded: {0}")]
    ClosureBudgetExceeded(String),
    #[error(transparent)]
    Vdc(#[from] VdcError),
}

/// Boolean matrices between `U = {0}` and `V = {0, 1}`.
pub fn b2() -> MatrixEquipment {
    bool_matrix_equipment("B2", &[("U", 1), ("V", 2)]).expect("B2 is within the caps")
}

/// Tropical matrices capped at 2 between `U = {0}` and `V = {0, 1}`.
pub fn t3() -> MatrixEquipment {
    tropical_matrix_equipment("T3", 2, &[("U", 1), ("V", 2)]).expect("T3 is within the caps")
}
