//! Von Neumann and POVM measurements, optimizer parametrizations, and
//! measurement-induced ensembles on purifications (steering).

use crate::error::{Error, Result};
use crate::qcore::linalg::{
    complete_isometry, cplx, exp_i_hermitian, hermitian_eigen, hermitian_from_params, identity,
    kron, matrix_from_params, max_abs_diff, partial_trace_multi, psd_power, CMatrix, CVector,
    SUPPORT_EPS,
};
use crate::qcore::state::{BipartiteState, DensityMatrix, TripartitePureState};

const PROJ_TOL: f64 = 1e-8;
const PSD_TOL: f64 = -1e-9;
const COMPLETENESS_TOL: f64 = 1e-8;

/// Outcomes below this probability carry no conditional state and contribute
/// nothing to conditional-entropy averages.
pub const NEGLIGIBLE_OUTCOME: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct VonNeumannMeasurement {
    dim: usize,
    projectors: Vec<CMatrix>,
}

impl VonNeumannMeasurement {
    pub fn new(dim: usize, projectors: Vec<CMatrix>) -> Result<Self> {
        let mut sum = CMatrix::zeros(dim, dim);
        for (i, p) in projectors.iter().enumerate() {
            if p.nrows() != dim || p.ncols() != dim {
                return Err(Error::InvalidMeasurement(format!(
                    "projector {i} has wrong shape"
                )));
            }
            if max_abs_diff(p, &p.adjoint()) > PROJ_TOL {
                return Err(Error::InvalidMeasurement(format!("projector {i} not Hermitian")));
            }
            if max_abs_diff(&(p * p), p) > PROJ_TOL {
                return Err(Error::InvalidMeasurement(format!("projector {i} not idempotent")));
            }
            for (j, q) in projectors.iter().enumerate().take(i) {
                if (p * q).iter().map(|z| z.norm()).fold(0.0, f64::max) > PROJ_TOL {
                    return Err(Error::InvalidMeasurement(format!(
                        "projectors {j} and {i} not orthogonal"
                    )));
                }
            }
            sum += p;
        }
        if max_abs_diff(&sum, &identity(dim)) > PROJ_TOL {
            return Err(Error::InvalidMeasurement(
                "projectors do not sum to identity".into(),
            ));
        }
        Ok(Self { dim, projectors })
    }

    pub fn computational(dim: usize) -> Self {
        let projectors = (0..dim)
            .map(|i| {
                let mut p = CMatrix::zeros(dim, dim);
                p[(i, i)] = cplx(1.0, 0.0);
                p
            })
            .collect();
        Self { dim, projectors }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }
}

#[derive(Debug, Clone)]
pub struct Povm {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(dim: usize, elements: Vec<CMatrix>) -> Result<Self> {
        if elements.len() > dim * dim {
            return Err(Error::InvalidMeasurement(format!(
                "{} POVM elements exceed the extremality cap {}",
                elements.len(),
                dim * dim
            )));
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for (i, e) in elements.iter().enumerate() {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::InvalidMeasurement(format!("element {i} has wrong shape")));
            }
            let min_eig = hermitian_eigen(e).0[0];
            if min_eig < PSD_TOL {
                return Err(Error::InvalidMeasurement(format!(
                    "element {i} not PSD (min eigenvalue {min_eig:.3e})"
                )));
            }
            sum += e;
        }
        if max_abs_diff(&sum, &identity(dim)) > COMPLETENESS_TOL {
            return Err(Error::InvalidMeasurement(
                "elements do not sum to identity".into(),
            ));
        }
        Ok(Self { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }
}

/// Either measurement flavor; everything downstream only needs the element
/// list (projectors are POVM elements too).
#[derive(Debug, Clone)]
pub enum Measurement {
    VonNeumann(VonNeumannMeasurement),
    Povm(Povm),
}

impl Measurement {
    pub fn dim(&self) -> usize {
        match self {
            Measurement::VonNeumann(m) => m.dim(),
            Measurement::Povm(m) => m.dim(),
        }
    }

    pub fn elements(&self) -> &[CMatrix] {
        match self {
            Measurement::VonNeumann(m) => m.projectors(),
            Measurement::Povm(m) => m.elements(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Measurement::VonNeumann(_) => "vn",
            Measurement::Povm(_) => "povm",
        }
    }
}

/// One measurement outcome: probability and the conditional reduced state on
/// A, or a flagged placeholder when the probability is negligible.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub probability: f64,
    pub conditional: Option<DensityMatrix>,
}

#[derive(Debug, Clone)]
pub struct MeasurementOutcomeSet {
    outcomes: Vec<Outcome>,
}

impl MeasurementOutcomeSet {
    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    /// `sum_i p_i S(rho_A^i)` with negligible outcomes contributing zero.
    pub fn average_conditional_entropy(&self) -> f64 {
        self.outcomes
            .iter()
            .filter_map(|o| {
                o.conditional
                    .as_ref()
                    .map(|c| o.probability * crate::qcore::entropy::von_neumann_entropy(c))
            })
            .sum()
    }
}

/// Measures subsystem B: `p_i = tr(rho (I x Pi_i))`,
/// `rho_A^i = tr_B(rho (I x Pi_i)) / p_i`.
pub fn measure_b(state: &BipartiteState, meas: &Measurement) -> Result<MeasurementOutcomeSet> {
    if meas.dim() != state.dim_b() {
        return Err(Error::DimensionMismatch(format!(
            "measurement dim {} but subsystem B dim {}",
            meas.dim(),
            state.dim_b()
        )));
    }
    let (m, n) = (state.dim_a(), state.dim_b());
    let mut outcomes = Vec::with_capacity(meas.elements().len());
    let mut total = 0.0;
    for element in meas.elements() {
        let big = kron(&identity(m), element);
        let weighted = state.matrix() * big;
        let p = weighted.trace().re;
        total += p;
        if p < NEGLIGIBLE_OUTCOME {
            outcomes.push(Outcome { probability: p.max(0.0), conditional: None });
            continue;
        }
        let reduced = partial_trace_multi(&weighted, &[m, n], &[true, false]);
        let conditional = DensityMatrix::from_nearly_psd(reduced * cplx(1.0 / p, 0.0))?;
        outcomes.push(Outcome { probability: p, conditional: Some(conditional) });
    }
    if (total - 1.0).abs() > COMPLETENESS_TOL {
        return Err(Error::InvalidMeasurement(format!(
            "outcome probabilities sum to {total}"
        )));
    }
    Ok(MeasurementOutcomeSet { outcomes })
}

/// Rank-1 projective measurement from the columns of a unitary.
pub fn vn_from_unitary(u: &CMatrix) -> Result<VonNeumannMeasurement> {
    let dim = u.nrows();
    if max_abs_diff(&(u * u.adjoint()), &identity(dim)) > PROJ_TOL {
        return Err(Error::InvalidMeasurement("matrix is not unitary".into()));
    }
    let projectors = (0..dim)
        .map(|k| {
            let col = u.column(k);
            col * col.adjoint()
        })
        .collect();
    Ok(VonNeumannMeasurement { dim, projectors })
}

/// Rank-1 POVM from the rows of a `k x n` matrix `M`: with `S = M†M`, the
/// rows of `M S^{-1/2}` define elements that sum to identity by construction.
pub fn povm_from_matrix(m: &CMatrix) -> Result<Povm> {
    let (k, n) = (m.nrows(), m.ncols());
    if k > n * n {
        return Err(Error::InvalidMeasurement(format!(
            "{k} rows exceed the extremality cap {}",
            n * n
        )));
    }
    let s = m.adjoint() * m;
    let min_eig = hermitian_eigen(&s).0[0];
    if min_eig <= SUPPORT_EPS {
        return Err(Error::InvalidMeasurement(format!(
            "M†M singular (min eigenvalue {min_eig:.3e})"
        )));
    }
    let whitened = m * psd_power(&s, -0.5);
    let elements: Vec<CMatrix> = (0..k)
        .map(|i| {
            let row = whitened.row(i);
            let ket: CVector = row.adjoint();
            &ket * ket.adjoint()
        })
        .collect();
    Ok(Povm { dim: n, elements })
}

/// Von Neumann measurement basis from `dim^2` real parameters via
/// `U = exp(iH)`, optionally rotated into the frame of a reference unitary
/// (`basis = frame * exp(iH)`), so the zero parameter vector reproduces the
/// frame itself.
pub fn vn_from_params(dim: usize, params: &[f64], frame: Option<&CMatrix>) -> VonNeumannMeasurement {
    let u = exp_i_hermitian(&hermitian_from_params(dim, params));
    let basis = match frame {
        Some(f) => f * u,
        None => u,
    };
    vn_from_unitary(&basis).expect("exp(iH) is unitary")
}

/// Rank-1 POVM with `k` elements from `2*k*dim` real parameters.
pub fn povm_from_params(dim: usize, k: usize, params: &[f64]) -> Result<Povm> {
    let m = matrix_from_params(k, dim, params);
    povm_from_matrix(&m)
}

/// Ensemble steered on the AB marginal by measuring C of a tripartite pure
/// state: `p_i = <Psi|(I x Pi_i)|Psi>`, `rho_i = tr_C(|Psi><Psi|(I x Pi_i))/p_i`.
#[derive(Debug, Clone)]
pub struct SteeredEnsemble {
    pub members: Vec<(f64, BipartiteState)>,
}

pub fn steer_ensemble(psi: &TripartitePureState, meas: &Measurement) -> Result<SteeredEnsemble> {
    let (da, db, dc) = psi.dims();
    if meas.dim() != dc {
        return Err(Error::DimensionMismatch(format!(
            "measurement dim {} but subsystem C dim {dc}",
            meas.dim()
        )));
    }
    let proj = psi.projector();
    let mut members = Vec::with_capacity(meas.elements().len());
    let mut total = 0.0;
    for element in meas.elements() {
        let big = kron(&identity(da * db), element);
        let weighted = &proj * big;
        let p = weighted.trace().re;
        total += p;
        if p < NEGLIGIBLE_OUTCOME {
            continue;
        }
        let reduced = partial_trace_multi(&weighted, &[da, db, dc], &[true, true, false]);
        let rho = DensityMatrix::from_nearly_psd(reduced * cplx(1.0 / p, 0.0))?;
        members.push((p, BipartiteState::new(rho, da, db)?));
    }
    if (total - 1.0).abs() > COMPLETENESS_TOL {
        return Err(Error::InvalidMeasurement(format!(
            "steering probabilities sum to {total}"
        )));
    }
    Ok(SteeredEnsemble { members })
}

impl SteeredEnsemble {
    /// `sum_i p_i rho_i`, for completeness checks against the AB marginal.
    pub fn mixture(&self) -> CMatrix {
        let dim = self.members[0].1.rho().dim();
        let mut mix = CMatrix::zeros(dim, dim);
        for (p, st) in &self.members {
            mix += st.matrix() * cplx(*p, 0.0);
        }
        mix
    }
}

/// Von Neumann measurement on the purifying system that steers the HJW
/// ensemble encoded by a `k x r` isometry: basis vectors are the conjugated
/// rows of the isometry completed to a `k x k` unitary.
pub fn steering_measurement_for_isometry(v: &CMatrix) -> VonNeumannMeasurement {
    let completed = complete_isometry(v);
    let k = completed.nrows();
    let basis = CMatrix::from_fn(k, k, |j, i| completed[(i, j)].conj());
    vn_from_unitary(&basis).expect("conjugated unitary rows stay unitary")
}
