//! Correlation and entanglement quantities as optimization problems.
//!
//! Every value reported here is a certified one-sided bound: the exact
//! problems are intractable, so a result carries its bound direction, the
//! certificate achieving the value, and optimizer diagnostics. The reported
//! value is always recomputed from the certificate, never taken on faith
//! from the optimizer.

mod correlation;
mod eof;
mod holevo;
mod separable;
mod squashed;

pub use correlation::{classical_correlation, discord, MeasurementKind};
pub use eof::{eof, HjwContext};
pub use holevo::{constrained_holevo, holevo_capacity};
pub use separable::{ansatz_is_valid_state, distance_to_separable, rel_ent_entanglement, NormKind, SeparableAnsatz};
pub use squashed::{cmi_half, squashed_upper};

use crate::measurements::Measurement;
use crate::optimize::OptimizationResult;
use crate::qcore::state::{DensityMatrix, PureState};
use crate::qcore::linalg::CVector;

/// Which side of the true value the reported number certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundDirection {
    /// Optimization-based infimum estimate: true value <= reported.
    Upper,
    /// Optimization-based supremum estimate: true value >= reported.
    Lower,
    /// Closed-form eigendecomposition value (unique feasible point).
    ExactEigen,
}

impl BoundDirection {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundDirection::Upper => "upper",
            BoundDirection::Lower => "lower",
            BoundDirection::ExactEigen => "exact-eigen",
        }
    }
}

/// Witness achieving the reported value.
#[derive(Debug, Clone)]
pub enum Certificate {
    /// Optimal measurement on B (classical correlation / discord).
    Measurement(Measurement),
    /// Pure-state ensemble realizing the parent state.
    Ensemble(Vec<(f64, PureState)>),
    /// Separable mixture of product pure states.
    SeparableAnsatz(SeparableAnsatz),
    /// Extension state on A x B x C with recorded local dims.
    Extension {
        dims: (usize, usize, usize),
        state: DensityMatrix,
    },
    /// Product pure state (CC-embedded linear-optimization certificate).
    ProductPair { a: CVector, b: CVector },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Measurement(_) => "measurement",
            Certificate::Ensemble(_) => "ensemble",
            Certificate::SeparableAnsatz(_) => "separable-ansatz",
            Certificate::Extension { .. } => "extension",
            Certificate::ProductPair { .. } => "product-pair",
        }
    }
}

/// Optimizer diagnostics carried alongside a measure value.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct OptSummary {
    pub starts: usize,
    pub starts_within_tol: usize,
    pub evaluations: u64,
    pub converged: bool,
}

impl OptSummary {
    pub fn from_result(res: &OptimizationResult, starts: usize) -> Self {
        Self {
            starts,
            starts_within_tol: res.starts_within_tol,
            evaluations: res.evaluations,
            converged: res.converged,
        }
    }

    /// Diagnostics for a value obtained without optimization.
    pub fn exact() -> Self {
        Self {
            starts: 0,
            starts_within_tol: 0,
            evaluations: 0,
            converged: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MeasureResult {
    /// Value in bits, recomputed from the certificate.
    pub value: f64,
    pub bound_direction: BoundDirection,
    pub certificate: Certificate,
    pub optimizer: OptSummary,
}
