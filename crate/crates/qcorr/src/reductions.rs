//! Executable promise-problem reductions between separability testing,
//! entanglement of formation, discord, Holevo capacity, and classical-state
//! detection, with thresholds and gaps produced by the proof formulas.

use crate::error::{Error, Result};
use crate::measures::{BoundDirection, Certificate, MeasureResult, MeasurementKind, OptSummary};
use crate::optimize::{seesaw_product, OptimizerConfig};
use crate::qcore::channel::QuantumChannel;
use crate::qcore::entropy::von_neumann_entropy;
use crate::qcore::linalg::{
    cplx, hermitian_eigen, partial_trace_multi, trace_norm, CMatrix, SUPPORT_EPS,
};
use crate::qcore::state::{purify, BipartiteState, DensityMatrix, Subsystem};

/// Separability promise instance: either the state is separable or its
/// Frobenius distance to the separable set is at least `delta`.
#[derive(Debug, Clone)]
pub struct SeparabilityInstance {
    pub state: BipartiteState,
    pub delta: f64,
}

impl SeparabilityInstance {
    pub fn new(state: BipartiteState, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument("gap delta must be > 0".into()));
        }
        Ok(Self { state, delta })
    }
}

/// Entanglement-of-formation promise instance: `E_F <= a` or `E_F >= a + eps`.
#[derive(Debug, Clone)]
pub struct EofInstance {
    pub state: BipartiteState,
    pub threshold: f64,
    pub gap: f64,
}

/// Discord promise instance on the emitted `B x C` carrier with the second
/// subsystem measured: `D <= b` or `D >= b + eps`.
#[derive(Debug, Clone)]
pub struct DiscordInstance {
    pub state: BipartiteState,
    pub threshold: f64,
    pub gap: f64,
    pub kind: MeasurementKind,
}

/// Constrained-Holevo promise instance: `chi_Phi(rho) >= c` or `<= c - eps`.
#[derive(Debug, Clone)]
pub struct HolevoInstance {
    pub channel: QuantumChannel,
    pub input: DensityMatrix,
    pub threshold: f64,
    pub gap: f64,
}

/// Convex-set instance for detecting classical states: `K` is the set of
/// extensions of the base state to the given ancilla dims, described by a
/// polynomial-time membership check.
#[derive(Debug, Clone)]
pub struct KInstance {
    pub base: BipartiteState,
    /// ancilla dims `(dim A', dim B')`
    pub ext_dims: (usize, usize),
    pub delta: f64,
}

impl KInstance {
    /// Membership oracle: the extended state's `tr_A'B'` must reproduce the
    /// base state within trace-norm `1e-8`.
    pub fn is_member(&self, extended: &BipartiteState) -> Result<bool> {
        let (m, n) = (self.base.dim_a(), self.base.dim_b());
        let (ma, nb) = self.ext_dims;
        if extended.dim_a() != m * ma || extended.dim_b() != n * nb {
            return Err(Error::DimensionMismatch(format!(
                "extended state is {}x{}, expected {}x{}",
                extended.dim_a(),
                extended.dim_b(),
                m * ma,
                n * nb
            )));
        }
        let reduced = partial_trace_multi(
            extended.matrix(),
            &[m, ma, n, nb],
            &[true, false, true, false],
        );
        Ok(trace_norm(&(reduced - self.base.matrix())) <= 1e-8)
    }
}

/// Gap arithmetic of the separability -> E_F reduction:
/// `eps = delta^2 / (2448 m n ln 2)`.
pub fn sep_to_eof_gap(delta: f64, dim_a: usize, dim_b: usize) -> f64 {
    delta * delta / (2448.0 * (dim_a * dim_b) as f64 * std::f64::consts::LN_2)
}

/// Separability instance -> entanglement-of-formation instance
/// (same state, threshold 0, gap from the norm-bound chain).
pub fn sep_to_eof(inst: &SeparabilityInstance) -> EofInstance {
    EofInstance {
        state: inst.state.clone(),
        threshold: 0.0,
        gap: sep_to_eof_gap(inst.delta, inst.state.dim_a(), inst.state.dim_b()),
    }
}

/// E_F instance -> discord instance through purification.
///
/// Builds `|Psi_ABC>` with `dim_C` defaulting to `m^2 n^2`, emits the `B x C`
/// marginal with C as the measured subsystem, and shifts the threshold by
/// `b = a - S(rho_A) + S(rho_AB)`. Von Neumann flavored instances always use
/// the full `m^2 n^2` register; the rank-sized desk override is only valid
/// for the POVM flavor.
pub fn eof_to_discord(
    inst: &EofInstance,
    dim_c: Option<usize>,
    kind: MeasurementKind,
) -> Result<DiscordInstance> {
    let (m, n) = (inst.state.dim_a(), inst.state.dim_b());
    let full = m * m * n * n;
    let dim_c = dim_c.unwrap_or(full);
    if kind == MeasurementKind::VonNeumann && dim_c != full {
        return Err(Error::InvalidArgument(format!(
            "von Neumann discord instances require dim_c = {full}"
        )));
    }
    let psi = purify(&inst.state, dim_c)?;
    let s_a = von_neumann_entropy(&inst.state.partial_trace(Subsystem::A));
    let s_ab = von_neumann_entropy(inst.state.rho());
    Ok(DiscordInstance {
        state: psi.rho_bc(),
        threshold: inst.threshold - s_a + s_ab,
        gap: inst.gap,
        kind,
    })
}

/// E_F instance -> constrained-Holevo instance through the Stinespring
/// embedding of the state's eigendecomposition.
///
/// With `V` the isometry of support eigenvectors, the channel
/// `Phi(rho') = tr_B(V rho' V†)` (Kraus `K_b = (I x <b|) V`) and input
/// `rho = diag(lambda)` satisfy `E_F(sigma_AB) = S(Phi(rho)) - chi_Phi(rho)`;
/// the threshold becomes `c = S(Phi(rho)) - a`.
pub fn eof_to_holevo(inst: &EofInstance) -> Result<HolevoInstance> {
    let (m, n) = (inst.state.dim_a(), inst.state.dim_b());
    let (vals, vecs) = hermitian_eigen(inst.state.matrix());
    let support: Vec<usize> = (0..vals.len())
        .rev()
        .filter(|&i| vals[i] > SUPPORT_EPS)
        .collect();
    let rank = support.len();
    if rank == 0 {
        return Err(Error::InvalidState("state has empty support".into()));
    }
    // isometry columns = support eigenvectors
    let mut v = CMatrix::zeros(m * n, rank);
    let mut lambda = Vec::with_capacity(rank);
    for (dst, &src) in support.iter().enumerate() {
        v.set_column(dst, &vecs.column(src));
        lambda.push(vals[src]);
    }
    // Kraus operators: contract the B index of V
    let kraus: Vec<CMatrix> = (0..n)
        .map(|b| CMatrix::from_fn(m, rank, |a, j| v[(a * n + b, j)]))
        .collect();
    let channel = QuantumChannel::new(rank, m, kraus)?;
    let total: f64 = lambda.iter().sum();
    let mut rho = CMatrix::zeros(rank, rank);
    for (j, &l) in lambda.iter().enumerate() {
        rho[(j, j)] = cplx(l / total, 0.0);
    }
    let input = DensityMatrix::new(rho)?;
    let s_out = von_neumann_entropy(&channel.apply(&input)?);
    Ok(HolevoInstance {
        channel,
        input,
        threshold: s_out - inst.threshold,
        gap: inst.gap,
    })
}

/// Separability instance -> classical-states-in-convex-set instance; `K` is
/// the set of extensions of the base state, carried as a membership oracle.
pub fn sep_to_k(inst: &SeparabilityInstance, ext_dims: (usize, usize)) -> Result<KInstance> {
    let (m, n) = (inst.state.dim_a(), inst.state.dim_b());
    let (ma, nb) = ext_dims;
    if ma < 1 || nb < 1 {
        return Err(Error::InvalidArgument("extension dims must be >= 1".into()));
    }
    if m * ma * n * nb > crate::classicality::CC_EXTENSION_CAP {
        return Err(Error::DimCapExceeded(format!(
            "extended dimension {} exceeds the cap {}",
            m * ma * n * nb,
            crate::classicality::CC_EXTENSION_CAP
        )));
    }
    Ok(KInstance {
        base: inst.state.clone(),
        ext_dims,
        delta: inst.delta,
    })
}

/// Linear optimization over classical states: `max tr(rho O)` over CC states
/// equals the product-pure-state maximum (and the QC and separable maxima),
/// realized by alternating exact eigenvector updates. The certificate is the
/// optimal product state, itself a CC state.
pub fn linopt_classical(
    op: &CMatrix,
    dim_a: usize,
    dim_b: usize,
    cfg: &OptimizerConfig,
) -> Result<MeasureResult> {
    let res = seesaw_product(op, dim_a, dim_b, cfg)?;
    Ok(MeasureResult {
        value: res.best_value,
        bound_direction: BoundDirection::Lower,
        certificate: Certificate::ProductPair {
            a: res.vec_a.clone(),
            b: res.vec_b.clone(),
        },
        optimizer: OptSummary {
            starts: dim_b + cfg.starts,
            starts_within_tol: res.starts_within_tol,
            evaluations: res.iterations,
            converged: res.converged,
        },
    })
}
