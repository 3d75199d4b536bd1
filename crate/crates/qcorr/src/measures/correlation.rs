//! Classical correlation `J(rho|B)` and quantum discord `D(rho|B)`.
//!
//! `J = S(rho_A) - inf over measurements on B of sum_i p_i S(rho_A^i)`; the
//! infimum runs over rank-1 complete von Neumann bases or rank-1 POVMs with
//! up to `n^2` elements (extremal POVMs suffice). Discord is
//! `I(rho) - J(rho|B)` with the same measurement certificate.

use super::{BoundDirection, Certificate, MeasureResult, OptSummary};
use crate::error::Result;
use crate::measurements::{measure_b, povm_from_params, vn_from_params, Measurement};
use crate::optimize::{minimize_with_starts, Objective, OptimizerConfig};
use crate::qcore::entropy::{mutual_information, von_neumann_entropy};
use crate::qcore::linalg::hermitian_eigen;
use crate::qcore::state::{BipartiteState, Subsystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    VonNeumann,
    Povm,
}

impl MeasurementKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeasurementKind::VonNeumann => "vn",
            MeasurementKind::Povm => "povm",
        }
    }
}

fn average_conditional_entropy(state: &BipartiteState, meas: &Measurement) -> f64 {
    match measure_b(state, meas) {
        Ok(out) => out.average_conditional_entropy(),
        Err(_) => f64::INFINITY,
    }
}

/// Best measurement found for the conditional-entropy infimum, returned with
/// its optimizer report.
fn optimize_measurement(
    state: &BipartiteState,
    kind: MeasurementKind,
    cfg: &OptimizerConfig,
) -> Result<(Measurement, crate::optimize::OptimizationResult, usize)> {
    let n = state.dim_b();
    // reference frame: eigenbasis of rho_B, so the zero start measures in the
    // marginal eigenbasis (the exact optimum for quantum-classical states)
    let (_, frame) = hermitian_eigen(state.partial_trace(Subsystem::B).matrix());

    match kind {
        MeasurementKind::VonNeumann => {
            let arity = n * n;
            let mut cfg = cfg.clone();
            if cfg.bounds.is_empty() {
                cfg.bounds = vec![(-std::f64::consts::PI, std::f64::consts::PI); arity];
            }
            let f = |params: &[f64]| {
                let meas = Measurement::VonNeumann(vn_from_params(n, params, Some(&frame)));
                average_conditional_entropy(state, &meas)
            };
            let obj = Objective::new(arity, &f);
            let starts = vec![vec![0.0; arity]];
            let res = minimize_with_starts(&obj, &cfg, &starts)?;
            let meas = Measurement::VonNeumann(vn_from_params(n, &res.best_params, Some(&frame)));
            let total = cfg.starts + 1;
            Ok((meas, res, total))
        }
        MeasurementKind::Povm => {
            let k = n * n;
            let arity = 2 * k * n;
            let mut cfg = cfg.clone();
            if cfg.bounds.is_empty() {
                cfg.bounds = vec![(-1.0, 1.0); arity];
            }
            let f = |params: &[f64]| match povm_from_params(n, k, params) {
                Ok(povm) => average_conditional_entropy(state, &Measurement::Povm(povm)),
                Err(_) => f64::INFINITY,
            };
            let obj = Objective::new(arity, &f);
            // frame rows followed by zero rows: the marginal-eigenbasis POVM
            let mut start = vec![0.0; arity];
            for i in 0..n {
                for j in 0..n {
                    let z = frame[(j, i)].conj();
                    start[2 * (i * n + j)] = z.re;
                    start[2 * (i * n + j) + 1] = z.im;
                }
            }
            let starts = vec![start];
            let res = minimize_with_starts(&obj, &cfg, &starts)?;
            let meas = Measurement::Povm(povm_from_params(n, k, &res.best_params)?);
            let total = cfg.starts + 1;
            Ok((meas, res, total))
        }
    }
}

/// Classical correlation `J(rho|B)` (measurement on the B subsystem).
pub fn classical_correlation(
    state: &BipartiteState,
    kind: MeasurementKind,
    cfg: &OptimizerConfig,
) -> Result<MeasureResult> {
    let (meas, res, starts) = optimize_measurement(state, kind, cfg)?;
    let s_a = von_neumann_entropy(&state.partial_trace(Subsystem::A));
    // certificate re-evaluation defines the reported value
    let cond = measure_b(state, &meas)?.average_conditional_entropy();
    Ok(MeasureResult {
        value: s_a - cond,
        bound_direction: BoundDirection::Upper,
        certificate: Certificate::Measurement(meas),
        optimizer: OptSummary::from_result(&res, starts),
    })
}

/// Quantum discord `D(rho|B) = I(rho) - J(rho|B)`, sharing the classical
/// correlation certificate. The conditional-entropy infimum is an upper-bound
/// estimate, so the discord value is an upper bound as well.
pub fn discord(
    state: &BipartiteState,
    kind: MeasurementKind,
    cfg: &OptimizerConfig,
) -> Result<MeasureResult> {
    let j = classical_correlation(state, kind, cfg)?;
    let i = mutual_information(state);
    Ok(MeasureResult {
        value: i - j.value,
        bound_direction: BoundDirection::Upper,
        certificate: j.certificate,
        optimizer: j.optimizer,
    })
}
