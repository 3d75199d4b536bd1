//! Polynomial-time detection of quantum-classical / classical-classical
//! states, and classical-state search inside convex extension sets.
//!
//! A state is quantum-classical across the B cut iff its A-indexed blocks
//! `B_kl = (<k| x I) rho (|l> x I)` form a commuting family of normal
//! operators (equivalently: simultaneously unitarily diagonalizable, which is
//! exactly the `sum_i p_i rho_i^A x |b_i><b_i|` form). The test below
//! measures both defects in Frobenius norm and, on success, extracts the
//! common eigenbasis as a witness measurement.

use crate::error::{Error, Result};
use crate::measurements::{vn_from_unitary, VonNeumannMeasurement};
use crate::measures::{
    BoundDirection, Certificate, MeasureResult, OptSummary, SeparableAnsatz,
};
use crate::optimize::{minimize_with_starts, Objective, OptimizerConfig};
use crate::qcore::linalg::{
    cplx, frobenius_norm, hermitian_eigen, kron, trace_norm, CMatrix, CVector,
};
use crate::qcore::state::BipartiteState;

pub const DEFAULT_CLASSICALITY_TOL: f64 = 1e-8;

/// Cap on the extended dimension `(m m') * (n n')` for the CC-extension gap.
pub const CC_EXTENSION_CAP: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Classical,
    NotClassical,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Classical => "classical",
            Verdict::NotClassical => "not-classical",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassicalityReport {
    pub verdict: Verdict,
    pub max_commutator_norm: f64,
    pub max_normality_defect: f64,
    /// Common eigenbasis on the tested subsystem, present iff classical.
    pub witness: Option<VonNeumannMeasurement>,
}

/// A-indexed blocks of rho acting on B.
fn b_blocks(state: &BipartiteState) -> Vec<CMatrix> {
    let (m, n) = (state.dim_a(), state.dim_b());
    let rho = state.matrix();
    let mut blocks = Vec::with_capacity(m * m);
    for k in 0..m {
        for l in 0..m {
            blocks.push(CMatrix::from_fn(n, n, |b, b2| rho[(k * n + b, l * n + b2)]));
        }
    }
    blocks
}

/// Zero-discord (quantum-classical) test across the B cut.
pub fn is_quantum_classical(state: &BipartiteState, tol: f64) -> Result<ClassicalityReport> {
    let blocks = b_blocks(state);
    let mut max_normality = 0.0f64;
    let mut max_commutator = 0.0f64;
    for b in &blocks {
        let defect = frobenius_norm(&(b * b.adjoint() - b.adjoint() * b));
        max_normality = max_normality.max(defect);
    }
    for (i, b1) in blocks.iter().enumerate() {
        for b2 in blocks.iter().skip(i + 1) {
            let defect = frobenius_norm(&(b1 * b2 - b2 * b1));
            max_commutator = max_commutator.max(defect);
        }
    }
    if max_normality > tol || max_commutator > tol {
        return Ok(ClassicalityReport {
            verdict: Verdict::NotClassical,
            max_commutator_norm: max_commutator,
            max_normality_defect: max_normality,
            witness: None,
        });
    }
    let witness = common_eigenbasis(state, &blocks, tol)?;
    Ok(ClassicalityReport {
        verdict: Verdict::Classical,
        max_commutator_norm: max_commutator,
        max_normality_defect: max_normality,
        witness: Some(witness),
    })
}

/// Diagonalizes a random real combination of the blocks' Hermitian parts and
/// verifies the basis leaves the state invariant under dephasing; retries
/// with fresh coefficients on degeneracy.
fn common_eigenbasis(
    state: &BipartiteState,
    blocks: &[CMatrix],
    tol: f64,
) -> Result<VonNeumannMeasurement> {
    let n = state.dim_b();
    for attempt in 0..5u64 {
        let mut rng = crate::qcore::random::stream_rng(0x5EED_BA5E ^ attempt, attempt);
        let mut combo = CMatrix::zeros(n, n);
        for b in blocks {
            let herm = (b + b.adjoint()) * cplx(0.5, 0.0);
            let anti = (b - b.adjoint()) * cplx(0.0, -0.5);
            let (r, s): (f64, f64) = (rand::Rng::random(&mut rng), rand::Rng::random(&mut rng));
            combo += herm * cplx(r - 0.5, 0.0) + anti * cplx(s - 0.5, 0.0);
        }
        let (_, vectors) = hermitian_eigen(&combo);
        let meas = vn_from_unitary(&vectors)?;
        // measure-invariance: dephasing B in the witness basis fixes rho
        let mut dephased = CMatrix::zeros(state.rho().dim(), state.rho().dim());
        let eye_a = crate::qcore::linalg::identity(state.dim_a());
        for p in meas.projectors() {
            let big = kron(&eye_a, p);
            dephased += &big * state.matrix() * &big;
        }
        if crate::qcore::linalg::max_abs_diff(&dephased, state.matrix()) <= 10.0 * tol {
            return Ok(meas);
        }
    }
    Err(Error::InvalidState(
        "blocks commute but no common eigenbasis was found in 5 attempts".into(),
    ))
}

#[derive(Debug, Clone)]
pub struct CcReport {
    pub verdict: Verdict,
    /// B-cut test on the state as given.
    pub b_side: ClassicalityReport,
    /// A-cut test (the state with subsystems swapped).
    pub a_side: ClassicalityReport,
}

/// Classical-classical test: quantum-classical across both cuts; the witness
/// pair is (A basis, B basis).
pub fn is_classical_classical(state: &BipartiteState, tol: f64) -> Result<CcReport> {
    let b_side = is_quantum_classical(state, tol)?;
    let a_side = is_quantum_classical(&state.swapped(), tol)?;
    let verdict = if b_side.verdict == Verdict::Classical && a_side.verdict == Verdict::Classical {
        Verdict::Classical
    } else {
        Verdict::NotClassical
    };
    Ok(CcReport { verdict, b_side, a_side })
}

/// Minimizes `||rho_AB - tr_A'B'(sigma)||_1` over classical-classical states
/// `sigma` on the extended space `(A A') x (B B')`.
///
/// A gap near zero certifies a CC member of the extension set; by trace-norm
/// monotonicity under partial trace, any reported value is an upper bound on
/// the extended-space distance and at least the base-space distance.
pub fn cc_in_extension_gap(
    state: &BipartiteState,
    ext_dims: (usize, usize),
    cfg: &OptimizerConfig,
) -> Result<MeasureResult> {
    let (m, n) = (state.dim_a(), state.dim_b());
    let (ma, nb) = ext_dims;
    if ma < 1 || nb < 1 {
        return Err(Error::InvalidArgument("extension dims must be >= 1".into()));
    }
    let (big_m, big_n) = (m * ma, n * nb);
    if big_m * big_n > CC_EXTENSION_CAP {
        return Err(Error::DimCapExceeded(format!(
            "extended dimension {} exceeds the cap {CC_EXTENSION_CAP}",
            big_m * big_n
        )));
    }

    // parameters: MN weights, then free complex bases orthonormalized by QR
    let arity = big_m * big_n + 2 * big_m * big_m + 2 * big_n * big_n;
    let decode = |params: &[f64]| -> (Vec<f64>, CMatrix, CMatrix) {
        let w = &params[..big_m * big_n];
        let mut weights: Vec<f64> = w.iter().map(|x| x * x).collect();
        let total: f64 = weights.iter().sum();
        if total > 1e-12 {
            for q in &mut weights {
                *q /= total;
            }
        } else {
            weights = vec![1.0 / (big_m * big_n) as f64; big_m * big_n];
        }
        let off_a = big_m * big_n;
        let off_b = off_a + 2 * big_m * big_m;
        let ga = crate::qcore::linalg::matrix_from_params(big_m, big_m, &params[off_a..off_b]);
        let gb = crate::qcore::linalg::matrix_from_params(big_n, big_n, &params[off_b..]);
        // Householder QR always returns an orthonormal basis; column phases
        // are irrelevant for the projectors
        (weights, ga.qr().q(), gb.qr().q())
    };

    let reduced_cols = |basis: &CMatrix, local: usize, anc: usize| -> Vec<CMatrix> {
        (0..basis.ncols())
            .map(|i| {
                let col = basis.column(i).into_owned();
                reduced_of_vector(&col, local, anc)
            })
            .collect()
    };

    let assemble_reduction = |weights: &[f64], ua: &CMatrix, ub: &CMatrix| -> CMatrix {
        let ra = reduced_cols(ua, m, ma);
        let rb = reduced_cols(ub, n, nb);
        let mut out = CMatrix::zeros(m * n, m * n);
        for i in 0..big_m {
            for j in 0..big_n {
                let q = weights[i * big_n + j];
                if q > 1e-15 {
                    out += kron(&ra[i], &rb[j]) * cplx(q, 0.0);
                }
            }
        }
        out
    };

    let mut cfg = cfg.clone();
    if cfg.bounds.is_empty() {
        cfg.bounds = vec![(-1.0, 1.0); arity];
    }
    let rho = state.matrix().clone();
    let f = |params: &[f64]| {
        let (weights, ua, ub) = decode(params);
        trace_norm(&(&rho - assemble_reduction(&weights, &ua, &ub)))
    };
    let obj = Objective::new(arity, &f);
    let starts = cc_structured_starts(state, ext_dims, arity);
    let res = minimize_with_starts(&obj, &cfg, &starts)?;

    // certificate: the CC extension as an explicit orthonormal product mixture
    let (weights, ua, ub) = decode(&res.best_params);
    let mut terms = Vec::new();
    for i in 0..big_m {
        for j in 0..big_n {
            let q = weights[i * big_n + j];
            terms.push((q, ua.column(i).into_owned(), ub.column(j).into_owned()));
        }
    }
    let ansatz = SeparableAnsatz::new(big_m, big_n, terms)?;
    let value = trace_norm(&(state.matrix() - assemble_reduction(&weights, &ua, &ub)));
    Ok(MeasureResult {
        value,
        bound_direction: BoundDirection::Upper,
        certificate: Certificate::SeparableAnsatz(ansatz),
        optimizer: OptSummary::from_result(&res, cfg.starts + starts.len()),
    })
}

/// `tr_anc |v><v|` for a vector on `local x anc` (local index major).
fn reduced_of_vector(v: &CVector, local: usize, anc: usize) -> CMatrix {
    CMatrix::from_fn(local, local, |a, a2| {
        let mut acc = cplx(0.0, 0.0);
        for s in 0..anc {
            acc += v[a * anc + s] * v[a2 * anc + s].conj();
        }
        acc
    })
}

/// Deterministic warm starts for the CC-extension search: the computational
/// product basis weighted by the state diagonal, plus Lemma-6 style witness
/// extensions when one cut already passes the classicality test with pure
/// conditional blocks.
fn cc_structured_starts(
    state: &BipartiteState,
    ext_dims: (usize, usize),
    arity: usize,
) -> Vec<Vec<f64>> {
    let (m, n) = (state.dim_a(), state.dim_b());
    let (ma, nb) = ext_dims;
    let (big_m, big_n) = (m * ma, n * nb);
    let mut starts = Vec::new();

    let encode = |weights: &[f64], ua: &CMatrix, ub: &CMatrix| -> Vec<f64> {
        let mut p = vec![0.0; arity];
        for (k, q) in weights.iter().enumerate() {
            p[k] = q.max(0.0).sqrt();
        }
        let off_a = big_m * big_n;
        for j in 0..big_m {
            for i in 0..big_m {
                let z = ua[(i, j)];
                p[off_a + 2 * (i * big_m + j)] = z.re;
                p[off_a + 2 * (i * big_m + j) + 1] = z.im;
            }
        }
        let off_b = off_a + 2 * big_m * big_m;
        for j in 0..big_n {
            for i in 0..big_n {
                let z = ub[(i, j)];
                p[off_b + 2 * (i * big_n + j)] = z.re;
                p[off_b + 2 * (i * big_n + j) + 1] = z.im;
            }
        }
        p
    };

    // computational start: sigma diagonal matching the state diagonal
    let mut weights = vec![0.0; big_m * big_n];
    for a in 0..m {
        for b in 0..n {
            let q = state.matrix()[(a * n + b, a * n + b)].re.max(0.0);
            weights[(a * ma) * big_n + b * nb] = q;
        }
    }
    let eye_a = crate::qcore::linalg::identity(big_m);
    let eye_b = crate::qcore::linalg::identity(big_n);
    starts.push(encode(&weights, &eye_a, &eye_b));

    // witness starts from either cut
    for swap in [false, true] {
        let tested = if swap { state.swapped() } else { state.clone() };
        let Ok(report) = is_quantum_classical(&tested, DEFAULT_CLASSICALITY_TOL) else {
            continue;
        };
        let Some(witness) = report.witness else { continue };
        // conditional blocks on the other side per witness outcome
        let dim_other = tested.dim_a();
        let anc = if swap { nb } else { ma };
        let terms: Vec<(f64, CVector, CVector)> = witness
            .projectors()
            .iter()
            .enumerate()
            .filter_map(|(i, p)| {
                let big = kron(&crate::qcore::linalg::identity(dim_other), p);
                let weighted = tested.matrix() * big;
                let prob = weighted.trace().re;
                if prob < 1e-12 || i >= anc {
                    return None;
                }
                let cond = crate::qcore::linalg::partial_trace_multi(
                    &weighted,
                    &[dim_other, tested.dim_b()],
                    &[true, false],
                ) * cplx(1.0 / prob, 0.0);
                let (vals, vecs) = hermitian_eigen(&cond);
                // need a pure conditional to embed it as a tagged vector
                if vals[vals.len() - 1] < 1.0 - 1e-7 {
                    return None;
                }
                let top = vecs.column(vals.len() - 1).into_owned();
                // basis vector of B from the witness projector
                let (pv, pvecs) = hermitian_eigen(p);
                let bvec = pvecs.column(pv.len() - 1).into_owned();
                Some((prob, top, bvec))
            })
            .collect();
        if terms.len() != witness.projectors().len() {
            continue;
        }
        // assemble tagged orthonormal families on the extended spaces
        let mut ua = CMatrix::zeros(big_m, big_m);
        let mut ub = CMatrix::zeros(big_n, big_n);
        let mut weights = vec![0.0; big_m * big_n];
        for (i, (prob, other_vec, meas_vec)) in terms.iter().enumerate() {
            // columns i: |other_i> x |i>_anc and |meas_i> x |i>_anc
            let (avec, bvec) = if swap { (meas_vec, other_vec) } else { (other_vec, meas_vec) };
            for r in 0..m {
                ua[(r * ma + (i % ma), i)] = avec[r];
            }
            for r in 0..n {
                ub[(r * nb + (i % nb), i)] = bvec[r];
            }
            weights[i * big_n + i] = *prob;
        }
        // complete to full bases
        let ua = complete_columns(ua, terms.len());
        let ub = complete_columns(ub, terms.len());
        starts.push(encode(&weights, &ua, &ub));
    }
    starts
}

/// Keeps the first `filled` columns and completes the rest to an orthonormal
/// basis.
fn complete_columns(mat: CMatrix, filled: usize) -> CMatrix {
    let partial = mat.columns(0, filled).into_owned();
    crate::qcore::linalg::complete_isometry(&partial)
}
