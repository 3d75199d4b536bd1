//! Squashed-entanglement upper bounds at fixed extension dimension.
//!
//! `E_sq` takes an infimum of half the conditional mutual information over
//! *all* extensions `rho_ABC`; how large C must be is open, so this module
//! only ever reports upper bounds at the requested `dim_c` and labels them as
//! such. Quantum extensions are parametrized by Stinespring isometries acting
//! on the purifying system; the classical variant restricts to
//! ensemble-indexed classical registers `sum_i p_i rho_i x |i><i|_C`.

use super::eof::{reduced_a_of_vector, HjwContext};
use super::{BoundDirection, Certificate, MeasureResult, OptSummary};
use crate::error::{Error, Result};
use crate::measurements::NEGLIGIBLE_OUTCOME;
use crate::optimize::{minimize_with_starts, Objective, OptimizerConfig};
use crate::qcore::entropy::{entropy_of_matrix, mutual_information};
use crate::qcore::linalg::{
    cplx, exp_i_hermitian, hermitian_from_params, partial_trace_multi, CMatrix, CVector,
};
use crate::qcore::state::{purify, BipartiteState, DensityMatrix};

/// Desk-scale cap on the extension dimension `m * n * dim_c`.
pub const EXTENSION_DIM_CAP: usize = 64;

/// Half the conditional mutual information
/// `(S(rho_AC) + S(rho_BC) - S(rho_C) - S(rho_ABC)) / 2`
/// of a raw extension matrix with local dims `(m, n, c)`.
pub fn cmi_half(ext: &CMatrix, dims: (usize, usize, usize)) -> f64 {
    let d = [dims.0, dims.1, dims.2];
    let s_ac = entropy_of_matrix(&partial_trace_multi(ext, &d, &[true, false, true]));
    let s_bc = entropy_of_matrix(&partial_trace_multi(ext, &d, &[false, true, true]));
    let s_c = entropy_of_matrix(&partial_trace_multi(ext, &d, &[false, false, true]));
    let s_abc = entropy_of_matrix(ext);
    0.5 * (s_ac + s_bc - s_c - s_abc)
}

/// Upper bound on (classical) squashed entanglement at extension dimension
/// `dim_c`. The value is achieved by the returned extension certificate.
pub fn squashed_upper(
    state: &BipartiteState,
    dim_c: usize,
    classical: bool,
    cfg: &OptimizerConfig,
) -> Result<MeasureResult> {
    let (m, n) = (state.dim_a(), state.dim_b());
    if dim_c < 1 {
        return Err(Error::InvalidArgument("dim_c must be >= 1".into()));
    }
    if m * n * dim_c > EXTENSION_DIM_CAP {
        return Err(Error::DimCapExceeded(format!(
            "extension dimension {} exceeds the desk-scale cap {EXTENSION_DIM_CAP}",
            m * n * dim_c
        )));
    }

    // dim_c = 1 admits exactly one extension, so the bound is closed-form
    if dim_c == 1 {
        let value = 0.5 * mutual_information(state);
        return Ok(MeasureResult {
            value,
            bound_direction: BoundDirection::ExactEigen,
            certificate: Certificate::Extension {
                dims: (m, n, 1),
                state: state.rho().clone(),
            },
            optimizer: OptSummary::exact(),
        });
    }

    if classical {
        squashed_classical(state, dim_c, cfg)
    } else {
        squashed_quantum(state, dim_c, cfg)
    }
}

/// Quantum extensions: every `rho_ABC` with `tr_C rho_ABC = rho_AB` arises by
/// pushing the purifying system through a channel into C; the channel is
/// parametrized as an isometry into C x E with environment dimension equal to
/// the state rank.
fn squashed_quantum(
    state: &BipartiteState,
    dim_c: usize,
    cfg: &OptimizerConfig,
) -> Result<MeasureResult> {
    let (m, n) = (state.dim_a(), state.dim_b());
    let rank = state.rho().rank().max(1);
    let dim_e = rank;
    let psi = purify(state, rank)?;
    let d_ce = dim_c * dim_e;
    let arity = d_ce * d_ce;

    let extension = |params: &[f64]| -> CMatrix {
        let u = exp_i_hermitian(&hermitian_from_params(d_ce, params));
        let v = u.columns(0, rank);
        // |Psi'> = (I_AB x V)|Psi_ABP>
        let amps = psi.amplitudes();
        let mut out = CVector::zeros(m * n * d_ce);
        for ab in 0..m * n {
            for q in 0..d_ce {
                let mut acc = cplx(0.0, 0.0);
                for p in 0..rank {
                    acc += v[(q, p)] * amps[ab * rank + p];
                }
                out[ab * d_ce + q] = acc;
            }
        }
        let proj = &out * out.adjoint();
        partial_trace_multi(&proj, &[m, n, dim_c, dim_e], &[true, true, true, false])
    };

    let mut cfg = cfg.clone();
    if cfg.bounds.is_empty() {
        cfg.bounds = vec![(-std::f64::consts::PI, std::f64::consts::PI); arity];
    }
    let f = |params: &[f64]| cmi_half(&extension(params), (m, n, dim_c));
    let obj = Objective::new(arity, &f);
    // zero start embeds P into E with C in |0>: the trivial product extension
    let starts = vec![vec![0.0; arity]];
    let res = minimize_with_starts(&obj, &cfg, &starts)?;

    let ext = extension(&res.best_params);
    finish_extension(state, ext, (m, n, dim_c), res, cfg.starts + 1)
}

/// Classical extensions `sum_i p_i rho_i x |i><i|_C` over ensembles realizing
/// the state. Parametrized by HJW isometries (pure members), which requires
/// `dim_c >= rank`.
fn squashed_classical(
    state: &BipartiteState,
    dim_c: usize,
    cfg: &OptimizerConfig,
) -> Result<MeasureResult> {
    let (m, n) = (state.dim_a(), state.dim_b());
    let ctx = HjwContext::new(state.rho(), dim_c).map_err(|_| {
        Error::InvalidArgument(format!(
            "classical register dim {dim_c} is below the state rank {}; the \
             pure-member ensemble parametrization needs dim_c >= rank",
            state.rho().rank()
        ))
    })?;

    let mut cfg = cfg.clone();
    if cfg.bounds.is_empty() {
        cfg.bounds = vec![(-std::f64::consts::PI, std::f64::consts::PI); ctx.arity()];
    }
    // For a classical register the CMI halves to the average member mutual
    // information; pure members make that the average entanglement entropy.
    let f = |params: &[f64]| {
        ctx.ensemble_vectors(params)
            .iter()
            .map(|(p, v)| p * entropy_of_matrix(&reduced_a_of_vector(v, m, n)))
            .sum::<f64>()
    };
    let obj = Objective::new(ctx.arity(), &f);
    let starts = vec![vec![0.0; ctx.arity()]];
    let res = minimize_with_starts(&obj, &cfg, &starts)?;

    // assemble the classical-register extension for the certificate
    let members = ctx.ensemble_vectors(&res.best_params);
    let dim = m * n * dim_c;
    let mut ext = CMatrix::zeros(dim, dim);
    for (i, (p, v)) in members.iter().enumerate() {
        if *p < NEGLIGIBLE_OUTCOME {
            continue;
        }
        let proj = v * v.adjoint();
        for ab in 0..m * n {
            for ab2 in 0..m * n {
                ext[(ab * dim_c + i, ab2 * dim_c + i)] += proj[(ab, ab2)] * cplx(*p, 0.0);
            }
        }
    }
    finish_extension(state, ext, (m, n, dim_c), res, cfg.starts + 1)
}

fn finish_extension(
    state: &BipartiteState,
    ext: CMatrix,
    dims: (usize, usize, usize),
    res: crate::optimize::OptimizationResult,
    starts: usize,
) -> Result<MeasureResult> {
    let marginal = partial_trace_multi(&ext, &[dims.0, dims.1, dims.2], &[true, true, false]);
    let defect = crate::qcore::linalg::max_abs_diff(&marginal, state.matrix());
    if defect > 1e-8 {
        return Err(Error::InvalidState(format!(
            "extension marginal misses the state by {defect:.3e}"
        )));
    }
    let value = cmi_half(&ext, dims);
    Ok(MeasureResult {
        value,
        bound_direction: BoundDirection::Upper,
        certificate: Certificate::Extension {
            dims,
            state: DensityMatrix::from_nearly_psd(ext)?,
        },
        optimizer: OptSummary::from_result(&res, starts),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::kron;
    use crate::qcore::random::{master_rng, random_separable_with_decomposition};
    use crate::qcore::state::bell_state;
    use approx::assert_abs_diff_eq;

    fn cfg() -> OptimizerConfig {
        OptimizerConfig {
            starts: 6,
            max_iters: 800,
            tol_f: 1e-9,
            seed: 13,
            bounds: Vec::new(),
        }
    }

    #[test]
    fn trivial_extension_is_half_mutual_information() {
        let mut rng = master_rng(31);
        let st = crate::qcore::random::random_bipartite_with(2, 2, 2, &mut rng).unwrap();
        let res = squashed_upper(&st, 1, false, &cfg()).unwrap();
        assert_abs_diff_eq!(res.value, 0.5 * mutual_information(&st), epsilon = 1e-10);
        assert_eq!(res.bound_direction, BoundDirection::ExactEigen);
    }

    #[test]
    fn bell_state_bound_stays_at_one() {
        // pure states force product extensions, so the value is I/2 = 1 for
        // every dim_c
        let res = squashed_upper(&bell_state(), 2, false, &cfg()).unwrap();
        assert!(res.value >= 1.0 - 1e-6, "value {}", res.value);
        assert!(res.value <= 1.0 + 1e-6);
    }

    #[test]
    fn classical_extension_from_separable_decomposition_squashes() {
        // construction check: a product-member ensemble extension of a
        // separable state has zero conditional mutual information
        let mut rng = master_rng(37);
        let (st, decomp) = random_separable_with_decomposition(2, 2, 4, &mut rng).unwrap();
        let (m, n, k) = (2, 2, decomp.len());
        let dim = m * n * k;
        let mut ext = CMatrix::zeros(dim, dim);
        for (i, (q, a, b)) in decomp.iter().enumerate() {
            let proj = kron(&a.projector(), &b.projector());
            for ab in 0..m * n {
                for ab2 in 0..m * n {
                    ext[(ab * k + i, ab2 * k + i)] += proj[(ab, ab2)] * cplx(*q, 0.0);
                }
            }
        }
        let marg = partial_trace_multi(&ext, &[m, n, k], &[true, true, false]);
        assert!(crate::qcore::linalg::max_abs_diff(&marg, st.matrix()) < 1e-12);
        assert!(cmi_half(&ext, (m, n, k)) <= 1e-5);
    }

    #[test]
    fn dim_cap_is_enforced() {
        let st = bell_state();
        match squashed_upper(&st, 17, false, &cfg()) {
            Err(Error::DimCapExceeded(_)) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn quantum_bound_never_exceeds_trivial_for_separable() {
        let mut rng = master_rng(41);
        let (st, _) = random_separable_with_decomposition(2, 2, 2, &mut rng).unwrap();
        let res = squashed_upper(&st, 2, false, &cfg()).unwrap();
        let trivial = 0.5 * mutual_information(&st);
        assert!(res.value <= trivial + 1e-9, "{} vs {trivial}", res.value);
    }
}
