//! Constrained Holevo capacity `chi_Phi(rho)` and Holevo capacity `chi_Phi`.

use super::eof::{ensemble_certificate, HjwContext};
use super::{BoundDirection, MeasureResult, OptSummary};
use crate::error::{Error, Result};
use crate::optimize::{minimize_with_starts, Objective, OptimizerConfig};
use crate::qcore::channel::QuantumChannel;
use crate::qcore::entropy::{entropy_of_matrix, von_neumann_entropy};
use crate::qcore::linalg::{cplx, CMatrix, CVector};
use crate::qcore::state::DensityMatrix;

/// `Phi(|psi><psi|)` without forming the input projector.
fn apply_to_pure(ch: &QuantumChannel, psi: &CVector) -> CMatrix {
    let mut out = CMatrix::zeros(ch.dim_out(), ch.dim_out());
    for k in ch.kraus() {
        let v = k * psi;
        out += &v * v.adjoint();
    }
    out
}

/// Constrained Holevo capacity
/// `chi_Phi(rho) = S(Phi(rho)) - inf sum_i p_i S(Phi(|psi_i><psi_i|))`,
/// with the infimum over ensembles of at most `k <= n_in^2` pure states
/// realizing `rho` (HJW isometry parametrization, exactly as for the
/// entanglement of formation).
pub fn constrained_holevo(
    ch: &QuantumChannel,
    rho: &DensityMatrix,
    k: Option<usize>,
    cfg: &OptimizerConfig,
) -> Result<MeasureResult> {
    if rho.dim() != ch.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "channel input dim {} but state dim {}",
            ch.dim_in(),
            rho.dim()
        )));
    }
    let cap = ch.dim_in() * ch.dim_in();
    let k = k.unwrap_or(cap);
    if k > cap {
        return Err(Error::InvalidArgument(format!(
            "ensemble size {k} exceeds the cardinality cap {cap}"
        )));
    }
    let ctx = HjwContext::new(rho, k)?;
    let s_out = von_neumann_entropy(&ch.apply(rho)?);

    if ctx.rank() == 1 {
        // the unique ensemble is the (pure) state itself
        let members = ctx.ensemble_vectors(&vec![0.0; ctx.arity()]);
        let avg: f64 = members.iter().map(|(p, v)| p * entropy_of_matrix(&apply_to_pure(ch, v))).sum();
        return Ok(MeasureResult {
            value: s_out - avg,
            bound_direction: BoundDirection::ExactEigen,
            certificate: ensemble_certificate(&members)?,
            optimizer: OptSummary::exact(),
        });
    }

    let mut cfg = cfg.clone();
    if cfg.bounds.is_empty() {
        cfg.bounds = vec![(-std::f64::consts::PI, std::f64::consts::PI); ctx.arity()];
    }
    let f = |params: &[f64]| {
        ctx.ensemble_vectors(params)
            .iter()
            .map(|(p, v)| p * entropy_of_matrix(&apply_to_pure(ch, v)))
            .sum::<f64>()
    };
    let obj = Objective::new(ctx.arity(), &f);
    let starts = vec![vec![0.0; ctx.arity()]];
    let res = minimize_with_starts(&obj, &cfg, &starts)?;

    let members = ctx.ensemble_vectors(&res.best_params);
    let avg: f64 = members.iter().map(|(p, v)| p * entropy_of_matrix(&apply_to_pure(ch, v))).sum();
    super::eof::verify_mixes_to(&members, rho)?;
    Ok(MeasureResult {
        // the subtracted infimum is an upper-bound estimate, so the reported
        // chi is a lower bound certified by the ensemble
        value: s_out - avg,
        bound_direction: BoundDirection::Lower,
        certificate: ensemble_certificate(&members)?,
        optimizer: OptSummary::from_result(&res, cfg.starts + 1),
    })
}

/// Holevo capacity `chi_Phi = sup_rho chi_Phi(rho)`, computed as one free
/// maximization over ensembles of `n_in^2` pure states (an ensemble
/// determines its average input, so the nested sup/inf flattens).
pub fn holevo_capacity(ch: &QuantumChannel, cfg: &OptimizerConfig) -> Result<MeasureResult> {
    let n_in = ch.dim_in();
    let k = n_in * n_in;
    let stride = 1 + 2 * n_in;
    let arity = k * stride;

    let decode = |params: &[f64]| -> Option<Vec<(f64, CVector)>> {
        let mut raw = Vec::with_capacity(k);
        for t in 0..k {
            let w = params[t * stride];
            raw.push(w * w);
        }
        let total: f64 = raw.iter().sum();
        if total < 1e-12 {
            return None;
        }
        let mut members = Vec::with_capacity(k);
        for (t, r) in raw.iter().enumerate() {
            let q = r / total;
            if q < 1e-14 {
                continue;
            }
            let base = t * stride + 1;
            let mut v = CVector::from_fn(n_in, |i, _| cplx(params[base + 2 * i], params[base + 2 * i + 1]));
            let norm = v.norm();
            if norm < 1e-8 {
                return None;
            }
            v /= cplx(norm, 0.0);
            members.push((q, v));
        }
        Some(members)
    };

    let holevo_of = |members: &[(f64, CVector)]| -> f64 {
        let mut avg_in = CMatrix::zeros(n_in, n_in);
        let mut avg_entropy = 0.0;
        for (q, v) in members {
            avg_in += (v * v.adjoint()) * cplx(*q, 0.0);
            avg_entropy += q * entropy_of_matrix(&apply_to_pure(ch, v));
        }
        entropy_of_matrix(&ch.apply_raw(&avg_in)) - avg_entropy
    };

    let mut cfg = cfg.clone();
    if cfg.bounds.is_empty() {
        cfg.bounds = vec![(-1.0, 1.0); arity];
    }
    let f = |params: &[f64]| match decode(params) {
        Some(members) => -holevo_of(&members),
        None => f64::INFINITY,
    };
    let obj = Objective::new(arity, &f);
    // structured start: uniform weights over the computational basis
    let mut start = vec![0.0; arity];
    for t in 0..k {
        start[t * stride] = (1.0 / k as f64).sqrt();
        start[t * stride + 1 + 2 * (t % n_in)] = 1.0;
    }
    let starts = vec![start];
    let res = minimize_with_starts(&obj, &cfg, &starts)?;

    let members = decode(&res.best_params)
        .ok_or_else(|| Error::Infeasible("optimizer returned an infeasible ensemble".into()))?;
    let value = holevo_of(&members);
    Ok(MeasureResult {
        value,
        bound_direction: BoundDirection::Lower,
        certificate: ensemble_certificate(&members)?,
        optimizer: OptSummary::from_result(&res, cfg.starts + 1),
    })
}
