//! Classification engine: constraint systems for the `I(i)` actions on
//! modules with a prescribed Virasoro structure, their solver, and
//! brute-force diagnostics on materialized windows.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rational, Fraction, Rational};

pub mod matrix;
pub mod oracle;
pub mod scalar;

pub use matrix::{
    build_matrix_system, constant_matrix_family, satisfies_all, verify_coupling_obstruction, Fixture, MatrixSystem,
};
pub use oracle::{i_torsion, irreducibility_oracle, support_shape, SupportShape};
pub use scalar::{
    build_scalar_system, check_family, eliminate_j1, eliminated_quadratic, quadratic_obstruction, solve_punctured,
    solve_scalar, solve_scalar_detailed, FamilyKind, ScalarSystem, SolutionFamily,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifierError {
    #[error("window {got} is too small (need at least {needed})")]
    WindowTooSmall { needed: i64, got: i64 },
    #[error("the punctured system needs an integral alpha, got {}", Fraction(.0))]
    PuncturedAlpha(Rational),
    #[error("the punctured system is defined for beta in {{0, 1}}, got {}", Fraction(.0))]
    PuncturedBeta(Rational),
    #[error("matrix systems are implemented for p = 2 only, got p = {0}")]
    UnsupportedP(usize),
    #[error("extension fixtures need a non-integral alpha, got {}", Fraction(.0))]
    IntegralAlpha(Rational),
    #[error("branch on an irrational root: {0}")]
    IrrationalBranch(String),
    #[error("could not reduce the quadratic relations: {0}")]
    Unresolved(String),
    #[error("unclassified solution branch: {0}")]
    Unclassified(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub kind: String,
    #[serde(rename = "cI")]
    pub c_i: String,
    #[serde(rename = "cDI")]
    pub c_di: String,
}

/// JSON report of a scalar classification run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub alpha: String,
    pub beta: String,
    pub families: Vec<FamilyEntry>,
    pub window: i64,
}

impl ClassifyReport {
    pub fn new(alpha: &Rational, beta: &Rational, window: i64, families: &[SolutionFamily]) -> Self {
        Self {
            alpha: format_rational(alpha),
            beta: format_rational(beta),
            families: families
                .iter()
                .map(|f| FamilyEntry {
                    kind: f.kind.name().to_string(),
                    c_i: format_rational(&f.c_i),
                    c_di: format_rational(&f.c_di),
                })
                .collect(),
            window,
        }
    }
}
