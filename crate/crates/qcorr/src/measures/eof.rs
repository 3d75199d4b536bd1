//! Entanglement of formation via HJW isometry parametrization.
//!
//! Ensembles of `k` pure states realizing `rho` are in bijection with `k x r`
//! isometries applied to the eigendecomposition,
//! `sqrt(p_i)|psi_i> = sum_j V_ij sqrt(lambda_j) |e_j>`, so the ensemble
//! infimum becomes an unconstrained search over `exp(iH)` on `k x k`.

use super::{BoundDirection, Certificate, MeasureResult, OptSummary};
use crate::error::{Error, Result};
use crate::measurements::NEGLIGIBLE_OUTCOME;
use crate::optimize::{minimize_with_starts, Objective, OptimizerConfig};
use crate::qcore::entropy::entropy_of_matrix;
use crate::qcore::linalg::{
    cplx, exp_i_hermitian, hermitian_eigen, hermitian_from_params, CMatrix, CVector, SUPPORT_EPS,
};
use crate::qcore::state::{BipartiteState, DensityMatrix, PureState};

/// Eigendecomposition data backing the isometry parametrization of all
/// ensembles of `k` pure states realizing a fixed state.
pub struct HjwContext {
    dim: usize,
    rank: usize,
    k: usize,
    /// support eigenvalues, descending
    eigvals: Vec<f64>,
    /// matching eigenvectors as columns (dim x rank)
    eigvecs: CMatrix,
}

impl HjwContext {
    pub fn new(rho: &DensityMatrix, k: usize) -> Result<Self> {
        let (vals, vecs) = hermitian_eigen(rho.matrix());
        let support: Vec<usize> = (0..vals.len())
            .rev()
            .filter(|&i| vals[i] > SUPPORT_EPS)
            .collect();
        let rank = support.len();
        if k < rank {
            return Err(Error::InvalidArgument(format!(
                "ensemble size {k} is below the state rank {rank}"
            )));
        }
        let mut eigvecs = CMatrix::zeros(rho.dim(), rank);
        let mut eigvals = Vec::with_capacity(rank);
        for (dst, &src) in support.iter().enumerate() {
            eigvecs.set_column(dst, &vecs.column(src));
            eigvals.push(vals[src]);
        }
        Ok(Self {
            dim: rho.dim(),
            rank,
            k,
            eigvals,
            eigvecs,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of real parameters (`k^2`, a Hermitian generator on `k x k`).
    pub fn arity(&self) -> usize {
        self.k * self.k
    }

    /// `k x r` isometry: the first `r` columns of `exp(iH(params))`.
    pub fn isometry(&self, params: &[f64]) -> CMatrix {
        let u = exp_i_hermitian(&hermitian_from_params(self.k, params));
        u.columns(0, self.rank).into_owned()
    }

    /// Weighted unnormalized member vectors `(p_i, |psi_i>)`; entries with
    /// `p_i` below the negligible-outcome threshold are dropped.
    pub fn ensemble_vectors(&self, params: &[f64]) -> Vec<(f64, CVector)> {
        let v = self.isometry(params);
        self.ensemble_from_isometry(&v)
    }

    pub fn ensemble_from_isometry(&self, v: &CMatrix) -> Vec<(f64, CVector)> {
        let mut out = Vec::with_capacity(self.k);
        for i in 0..self.k {
            let mut w = CVector::zeros(self.dim);
            for j in 0..self.rank {
                let coeff = v[(i, j)] * cplx(self.eigvals[j].sqrt(), 0.0);
                w.axpy(coeff, &self.eigvecs.column(j).into_owned(), cplx(1.0, 0.0));
            }
            let p = w.norm_squared();
            if p >= NEGLIGIBLE_OUTCOME {
                out.push((p, w / cplx(p.sqrt(), 0.0)));
            }
        }
        out
    }
}

/// Reduced A-side matrix of a pure bipartite vector (A-major indexing).
pub(crate) fn reduced_a_of_vector(psi: &CVector, dim_a: usize, dim_b: usize) -> CMatrix {
    CMatrix::from_fn(dim_a, dim_a, |a, a2| {
        let mut acc = cplx(0.0, 0.0);
        for b in 0..dim_b {
            acc += psi[a * dim_b + b] * psi[a2 * dim_b + b].conj();
        }
        acc
    })
}

/// Average entanglement entropy of an ensemble of pure bipartite vectors.
fn average_entanglement_entropy(members: &[(f64, CVector)], dim_a: usize, dim_b: usize) -> f64 {
    members
        .iter()
        .map(|(p, psi)| p * entropy_of_matrix(&reduced_a_of_vector(psi, dim_a, dim_b)))
        .sum()
}

/// Entanglement of formation upper bound at ensemble size `k`
/// (default `m^2 n^2`, the proven-sufficient cardinality cap).
pub fn eof(state: &BipartiteState, k: Option<usize>, cfg: &OptimizerConfig) -> Result<MeasureResult> {
    let (m, n) = (state.dim_a(), state.dim_b());
    let k = k.unwrap_or(m * m * n * n);
    let ctx = HjwContext::new(state.rho(), k)?;

    // rank 1: the only ensemble is the state itself
    if ctx.rank() == 1 {
        let members = ctx.ensemble_vectors(&vec![0.0; ctx.arity()]);
        let value = average_entanglement_entropy(&members, m, n);
        return Ok(MeasureResult {
            value,
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
        let members = ctx.ensemble_vectors(params);
        average_entanglement_entropy(&members, m, n)
    };
    let obj = Objective::new(ctx.arity(), &f);
    // zero start: the eigen-ensemble (exact for product and zero-eof states)
    let starts = vec![vec![0.0; ctx.arity()]];
    let res = minimize_with_starts(&obj, &cfg, &starts)?;

    let members = ctx.ensemble_vectors(&res.best_params);
    let value = average_entanglement_entropy(&members, m, n);
    let certificate = ensemble_certificate(&members)?;
    verify_mixes_to(&members, state.rho())?;
    Ok(MeasureResult {
        value,
        bound_direction: BoundDirection::Upper,
        certificate,
        optimizer: OptSummary::from_result(&res, cfg.starts + 1),
    })
}

pub(crate) fn ensemble_certificate(members: &[(f64, CVector)]) -> Result<Certificate> {
    let ens = members
        .iter()
        .map(|(p, v)| PureState::new(v.clone()).map(|ps| (*p, ps)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Certificate::Ensemble(ens))
}

pub(crate) fn verify_mixes_to(members: &[(f64, CVector)], parent: &DensityMatrix) -> Result<()> {
    let mut mix = CMatrix::zeros(parent.dim(), parent.dim());
    for (p, v) in members {
        mix += (v * v.adjoint()) * cplx(*p, 0.0);
    }
    let defect = crate::qcore::linalg::max_abs_diff(&mix, parent.matrix());
    if defect > 1e-8 {
        return Err(Error::InvalidEnsemble(format!(
            "certificate ensemble misses the parent state by {defect:.3e}"
        )));
    }
    Ok(())
}
