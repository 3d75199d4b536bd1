//! Separable-set optimizations: relative entropy of entanglement and norm
//! distance to the separable set, both over an explicit mixture ansatz
//! `sigma = sum_i q_i |a_i><a_i| x |b_i><b_i|` with at most `(mn)^2` terms.

use super::{BoundDirection, Certificate, MeasureResult, OptSummary};
use crate::error::{Error, Result};
use crate::optimize::{minimize_with_starts, Objective, OptimizerConfig};
use crate::qcore::entropy::relative_entropy_raw;
use crate::qcore::linalg::{
    cplx, frobenius_norm, hermitian_eigen, kron, trace_norm, CMatrix, CVector, SUPPORT_EPS,
};
use crate::qcore::state::{BipartiteState, Subsystem};

/// Support problems inside the relative-entropy objective are mapped to this
/// finite penalty so the simplex descent keeps an ordering.
const SUPPORT_PENALTY_BITS: f64 = 1e6;

#[derive(Debug, Clone)]
pub struct SeparableAnsatz {
    dim_a: usize,
    dim_b: usize,
    terms: Vec<(f64, CVector, CVector)>,
}

impl SeparableAnsatz {
    pub fn new(dim_a: usize, dim_b: usize, terms: Vec<(f64, CVector, CVector)>) -> Result<Self> {
        if terms.len() > (dim_a * dim_b).pow(2) {
            return Err(Error::InvalidArgument(format!(
                "{} ansatz terms exceed the cap {}",
                terms.len(),
                (dim_a * dim_b).pow(2)
            )));
        }
        let total: f64 = terms.iter().map(|(q, _, _)| q).sum();
        if (total - 1.0).abs() > 1e-9 || terms.iter().any(|(q, _, _)| *q < 0.0) {
            return Err(Error::InvalidArgument(
                "ansatz weights must be nonnegative and sum to 1".into(),
            ));
        }
        Ok(Self { dim_a, dim_b, terms })
    }

    pub fn terms(&self) -> &[(f64, CVector, CVector)] {
        &self.terms
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    /// `sum_i q_i (a_i a_i†) x (b_i b_i†)`.
    pub fn assemble(&self) -> CMatrix {
        let d = self.dim_a * self.dim_b;
        let mut out = CMatrix::zeros(d, d);
        for (q, a, b) in &self.terms {
            if *q <= 0.0 {
                continue;
            }
            out += kron(&(a * a.adjoint()), &(b * b.adjoint())) * cplx(*q, 0.0);
        }
        out
    }

    pub fn to_state(&self) -> Result<BipartiteState> {
        BipartiteState::from_matrix(self.assemble(), self.dim_a, self.dim_b)
    }

    /// Parameter stride per term: weight + real/imag pairs of both vectors.
    fn stride(dim_a: usize, dim_b: usize) -> usize {
        1 + 2 * dim_a + 2 * dim_b
    }

    /// Decodes `k * stride` reals; `None` marks an infeasible point (zero
    /// total weight or an unnormalizable vector with nonzero weight).
    fn from_params(dim_a: usize, dim_b: usize, k: usize, params: &[f64]) -> Option<Self> {
        let stride = Self::stride(dim_a, dim_b);
        debug_assert_eq!(params.len(), k * stride);
        let mut raw_weights = Vec::with_capacity(k);
        for t in 0..k {
            let w = params[t * stride];
            raw_weights.push(w * w);
        }
        let total: f64 = raw_weights.iter().sum();
        if total < 1e-12 {
            return None;
        }
        let mut terms = Vec::with_capacity(k);
        for (t, raw) in raw_weights.iter().enumerate() {
            let q = raw / total;
            if q < 1e-14 {
                continue;
            }
            let base = t * stride + 1;
            let a = normalized_vector(&params[base..base + 2 * dim_a], dim_a)?;
            let b = normalized_vector(&params[base + 2 * dim_a..base + 2 * dim_a + 2 * dim_b], dim_b)?;
            terms.push((q, a, b));
        }
        Some(Self { dim_a, dim_b, terms })
    }

    /// Inverse of `from_params` up to gauge, padding unused slots with zero
    /// weight; used to inject structured starting points.
    fn to_params(&self, k: usize) -> Vec<f64> {
        let stride = Self::stride(self.dim_a, self.dim_b);
        let mut params = vec![0.0; k * stride];
        for (t, (q, a, b)) in self.terms.iter().enumerate().take(k) {
            let base = t * stride;
            params[base] = q.sqrt();
            for i in 0..self.dim_a {
                params[base + 1 + 2 * i] = a[i].re;
                params[base + 2 + 2 * i] = a[i].im;
            }
            let off = base + 1 + 2 * self.dim_a;
            for i in 0..self.dim_b {
                params[off + 2 * i] = b[i].re;
                params[off + 2 * i + 1] = b[i].im;
            }
        }
        params
    }
}

fn normalized_vector(reals: &[f64], dim: usize) -> Option<CVector> {
    let mut v = CVector::from_fn(dim, |i, _| cplx(reals[2 * i], reals[2 * i + 1]));
    let norm = v.norm();
    if norm < 1e-8 {
        return None;
    }
    v /= cplx(norm, 0.0);
    Some(v)
}

/// Structured starting points representable in a `k`-term ansatz: the product
/// of marginals (always full feasible support) and the computational-basis
/// diagonal truncation (exact for classical-classical inputs).
fn structured_starts(state: &BipartiteState, k: usize) -> Vec<Vec<f64>> {
    let (m, n) = (state.dim_a(), state.dim_b());
    let mut starts = Vec::new();
    if k >= m * n {
        let (va, ua) = hermitian_eigen(state.partial_trace(Subsystem::A).matrix());
        let (vb, ub) = hermitian_eigen(state.partial_trace(Subsystem::B).matrix());
        let mut terms = Vec::new();
        for i in 0..m {
            for j in 0..n {
                let q = (va[i].max(0.0)) * (vb[j].max(0.0));
                terms.push((q, ua.column(i).into_owned(), ub.column(j).into_owned()));
            }
        }
        let total: f64 = terms.iter().map(|(q, _, _)| q).sum();
        for t in &mut terms {
            t.0 /= total;
        }
        let ansatz = SeparableAnsatz { dim_a: m, dim_b: n, terms };
        starts.push(ansatz.to_params(k));

        // diagonal of rho in the computational product basis
        let mut terms = Vec::new();
        for i in 0..m {
            for j in 0..n {
                let q = state.matrix()[(i * n + j, i * n + j)].re.max(0.0);
                let mut a = CVector::zeros(m);
                a[i] = cplx(1.0, 0.0);
                let mut b = CVector::zeros(n);
                b[j] = cplx(1.0, 0.0);
                terms.push((q, a, b));
            }
        }
        let total: f64 = terms.iter().map(|(q, _, _)| q).sum();
        if total > 1e-9 {
            for t in &mut terms {
                t.0 /= total;
            }
            let ansatz = SeparableAnsatz { dim_a: m, dim_b: n, terms };
            starts.push(ansatz.to_params(k));
        }
    }
    starts
}

fn run_ansatz_minimization(
    state: &BipartiteState,
    k: usize,
    cfg: &OptimizerConfig,
    objective: impl Fn(&CMatrix) -> f64 + Sync,
) -> Result<(SeparableAnsatz, crate::optimize::OptimizationResult, usize)> {
    let (m, n) = (state.dim_a(), state.dim_b());
    let cap = (m * n).pow(2);
    if k == 0 || k > cap {
        return Err(Error::InvalidArgument(format!(
            "ansatz size {k} outside 1..={cap}"
        )));
    }
    let arity = k * SeparableAnsatz::stride(m, n);
    let mut cfg = cfg.clone();
    if cfg.bounds.is_empty() {
        cfg.bounds = vec![(-1.0, 1.0); arity];
    }
    let f = |params: &[f64]| match SeparableAnsatz::from_params(m, n, k, params) {
        Some(ansatz) => objective(&ansatz.assemble()),
        None => f64::INFINITY,
    };
    let obj = Objective::new(arity, &f);
    let starts = structured_starts(state, k);
    let n_starts = cfg.starts + starts.len();
    let res = minimize_with_starts(&obj, &cfg, &starts)?;
    let ansatz = SeparableAnsatz::from_params(m, n, k, &res.best_params)
        .ok_or_else(|| Error::Infeasible("optimizer returned an infeasible ansatz".into()))?;
    Ok((ansatz, res, n_starts))
}

/// Relative entropy of entanglement upper bound:
/// `min over ansatz sigma of S(rho || sigma)`.
pub fn rel_ent_entanglement(
    state: &BipartiteState,
    k: Option<usize>,
    cfg: &OptimizerConfig,
) -> Result<MeasureResult> {
    let (m, n) = (state.dim_a(), state.dim_b());
    let k = k.unwrap_or((m * n).pow(2));
    let rho = state.matrix().clone();
    let (ansatz, res, starts) = run_ansatz_minimization(state, k, cfg, move |sigma| {
        let v = relative_entropy_raw(&rho, sigma);
        if v.is_finite() {
            v
        } else {
            SUPPORT_PENALTY_BITS
        }
    })?;
    let value = relative_entropy_raw(state.matrix(), &ansatz.assemble());
    Ok(MeasureResult {
        value,
        bound_direction: BoundDirection::Upper,
        certificate: Certificate::SeparableAnsatz(ansatz),
        optimizer: OptSummary::from_result(&res, starts),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Trace,
    Frobenius,
}

impl NormKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormKind::Trace => "trace",
            NormKind::Frobenius => "frobenius",
        }
    }

    pub fn eval(&self, m: &CMatrix) -> f64 {
        match self {
            NormKind::Trace => trace_norm(m),
            NormKind::Frobenius => frobenius_norm(m),
        }
    }
}

/// Norm distance from `rho` to the separable ansatz set (upper bound on the
/// true distance to the separable set).
pub fn distance_to_separable(
    state: &BipartiteState,
    norm: NormKind,
    k: Option<usize>,
    cfg: &OptimizerConfig,
) -> Result<MeasureResult> {
    let (m, n) = (state.dim_a(), state.dim_b());
    let k = k.unwrap_or((m * n).pow(2));
    let rho = state.matrix().clone();
    let (ansatz, res, starts) =
        run_ansatz_minimization(state, k, cfg, move |sigma| norm.eval(&(&rho - sigma)))?;
    let value = norm.eval(&(state.matrix() - ansatz.assemble()));
    Ok(MeasureResult {
        value,
        bound_direction: BoundDirection::Upper,
        certificate: Certificate::SeparableAnsatz(ansatz),
        optimizer: OptSummary::from_result(&res, starts),
    })
}

/// Checks that the assembled ansatz is PSD up to tolerance; used when
/// emitting certificates.
pub fn ansatz_is_valid_state(ansatz: &SeparableAnsatz) -> bool {
    let sigma = ansatz.assemble();
    hermitian_eigen(&sigma).0[0] > -SUPPORT_EPS && (sigma.trace().re - 1.0).abs() < 1e-8
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random::{master_rng, random_separable_with_decomposition};
    use crate::qcore::state::bell_state;
    use approx::assert_abs_diff_eq;

    fn cfg() -> OptimizerConfig {
        OptimizerConfig {
            starts: 8,
            max_iters: 1500,
            tol_f: 1e-9,
            seed: 3,
            bounds: Vec::new(),
        }
    }

    #[test]
    fn separable_state_has_zero_relative_entropy() {
        let mut rng = master_rng(4);
        let (st, _) = random_separable_with_decomposition(2, 2, 2, &mut rng).unwrap();
        let res = rel_ent_entanglement(&st, Some(4), &cfg()).unwrap();
        assert!(res.value <= 1e-6, "E_R = {}", res.value);
        assert!(ansatz_is_valid_state(match &res.certificate {
            Certificate::SeparableAnsatz(a) => a,
            _ => panic!("wrong certificate kind"),
        }));
    }

    #[test]
    fn bell_relative_entropy_is_one_bit() {
        let res = rel_ent_entanglement(&bell_state(), Some(4), &cfg()).unwrap();
        assert_abs_diff_eq!(res.value, 1.0, epsilon = 1e-3);
        assert!(res.value >= 1.0 - 1e-9, "upper bound may not undershoot");
    }

    #[test]
    fn bell_frobenius_distance_matches_twirling_value() {
        // Closest separable state in either norm is the Werner state at
        // w = 1/3 (twirling is a separability-preserving HS/trace-norm
        // contraction), giving distance 1/sqrt(3) in Frobenius norm.
        let res = distance_to_separable(&bell_state(), NormKind::Frobenius, Some(4), &cfg()).unwrap();
        assert_abs_diff_eq!(res.value, 1.0 / 3.0f64.sqrt(), epsilon = 1e-3);
    }

    #[test]
    fn separable_state_has_zero_distance() {
        let mut rng = master_rng(8);
        let (st, _) = random_separable_with_decomposition(2, 2, 2, &mut rng).unwrap();
        let res = distance_to_separable(&st, NormKind::Frobenius, Some(4), &cfg()).unwrap();
        assert!(res.value <= 1e-6, "distance = {}", res.value);
    }

    #[test]
    fn ansatz_cap_is_enforced() {
        let st = bell_state();
        assert!(rel_ent_entanglement(&st, Some(17), &cfg()).is_err());
        assert!(rel_ent_entanglement(&st, Some(0), &cfg()).is_err());
    }

    #[test]
    fn params_round_trip() {
        let mut rng = master_rng(12);
        let (st, decomp) = random_separable_with_decomposition(2, 2, 3, &mut rng).unwrap();
        let terms: Vec<_> = decomp
            .into_iter()
            .map(|(q, a, b)| (q, a.amplitudes().clone(), b.amplitudes().clone()))
            .collect();
        let ansatz = SeparableAnsatz::new(2, 2, terms).unwrap();
        let params = ansatz.to_params(4);
        let back = SeparableAnsatz::from_params(2, 2, 4, &params).unwrap();
        assert!(crate::qcore::linalg::max_abs_diff(&back.assemble(), st.matrix()) < 1e-9);
    }
}
