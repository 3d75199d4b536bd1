//! State carriers: density matrices, bipartite/tripartite wrappers, ensembles.
//!
//! All types are immutable after construction and validate their invariants
//! up front; errors name the violated invariant. The composite index
//! convention is A-major everywhere: row index `i = a*dim_b + b`.

use super::linalg::{
    cplx, hermitian_eigen, hermitian_part, max_abs_diff, partial_trace_multi, CMatrix, CVector,
    SUPPORT_EPS,
};
use crate::error::{Error, Result};

const HERM_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-9;
const PSD_TOL: f64 = -1e-9;
const NORM_TOL: f64 = 1e-9;
const MIX_TOL: f64 = 1e-8;

/// Dense Hermitian PSD unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}, expected square",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let herm_defect = max_abs_diff(&mat, &mat.adjoint());
        if herm_defect > HERM_TOL {
            return Err(Error::InvalidState(format!(
                "Hermiticity violated: max |rho - rho†| = {herm_defect:.3e} > {HERM_TOL:.0e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "unit trace violated: trace = {tr} (tolerance {TRACE_TOL:.0e})"
            )));
        }
        let min_eig = hermitian_eigen(&mat).0[0];
        if min_eig < PSD_TOL {
            return Err(Error::InvalidState(format!(
                "PSD violated: minimum eigenvalue = {min_eig:.3e} < {PSD_TOL:.0e}"
            )));
        }
        Ok(Self { dim: mat.nrows(), mat })
    }

    /// Repairs a matrix that is PSD/unit-trace only up to rounding noise
    /// (conditional states after division by a small outcome probability).
    /// Symmetrizes, clips negative eigenvalues and renormalizes the trace.
    pub fn from_nearly_psd(mat: CMatrix) -> Result<Self> {
        let herm = hermitian_part(&mat);
        let (vals, vecs) = hermitian_eigen(&herm);
        let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidState("cannot renormalize a zero matrix".into()));
        }
        let n = herm.nrows();
        let mut out = CMatrix::zeros(n, n);
        for (k, &v) in clipped.iter().enumerate() {
            if v > 0.0 {
                let col = vecs.column(k);
                let scale = cplx(v / total, 0.0);
                out += (col * col.adjoint()) * scale;
            }
        }
        Ok(Self { dim: n, mat: out })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.mat).0
    }

    /// Rank counted with the global support threshold.
    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&v| v > SUPPORT_EPS).count()
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mat = CMatrix::identity(dim, dim) * cplx(1.0 / dim as f64, 0.0);
        Self { dim, mat }
    }
}

/// Normalized complex amplitude vector.
#[derive(Debug, Clone)]
pub struct PureState {
    dim: usize,
    amps: CVector,
}

impl PureState {
    pub fn new(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "unit norm violated: |psi| = {norm} (tolerance {NORM_TOL:.0e})"
            )));
        }
        Ok(Self { dim: amps.len(), amps })
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut amps = CVector::zeros(dim);
        amps[index] = cplx(1.0, 0.0);
        Self { dim, amps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn projector(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        DensityMatrix {
            dim: self.dim,
            mat: self.projector(),
        }
    }
}

/// Which subsystem a bipartite partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Density matrix on a tensor product `A ⊗ B` with recorded local dimensions.
#[derive(Debug, Clone)]
pub struct BipartiteState {
    rho: DensityMatrix,
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteState {
    pub fn new(rho: DensityMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a * dim_b != rho.dim() {
            return Err(Error::DimensionMismatch(format!(
                "declared dims {}x{} do not match matrix size {}",
                dim_a,
                dim_b,
                rho.dim()
            )));
        }
        Ok(Self { rho, dim_a, dim_b })
    }

    pub fn from_matrix(mat: CMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::new(DensityMatrix::new(mat)?, dim_a, dim_b)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn matrix(&self) -> &CMatrix {
        self.rho.matrix()
    }

    /// Swaps the roles of A and B (reindexes the matrix accordingly).
    pub fn swapped(&self) -> Self {
        let (m, n) = (self.dim_a, self.dim_b);
        let src = self.matrix();
        let mut out = CMatrix::zeros(m * n, m * n);
        for a in 0..m {
            for b in 0..n {
                for a2 in 0..m {
                    for b2 in 0..n {
                        out[(b * m + a, b2 * m + a2)] = src[(a * n + b, a2 * n + b2)];
                    }
                }
            }
        }
        Self {
            rho: DensityMatrix { dim: m * n, mat: out },
            dim_a: n,
            dim_b: m,
        }
    }

    pub fn partial_trace(&self, keep: Subsystem) -> DensityMatrix {
        let mask = match keep {
            Subsystem::A => [true, false],
            Subsystem::B => [false, true],
        };
        let mat = partial_trace_multi(self.matrix(), &[self.dim_a, self.dim_b], &mask);
        DensityMatrix {
            dim: mat.nrows(),
            mat,
        }
    }
}

/// Pure state on `A ⊗ B ⊗ C` with recorded local dimensions.
#[derive(Debug, Clone)]
pub struct TripartitePureState {
    dims: (usize, usize, usize),
    amps: CVector,
}

impl TripartitePureState {
    pub fn new(dims: (usize, usize, usize), amps: CVector) -> Result<Self> {
        if dims.0 * dims.1 * dims.2 != amps.len() {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} do not match vector length {}",
                dims,
                amps.len()
            )));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "unit norm violated: |psi| = {norm}"
            )));
        }
        Ok(Self { dims, amps })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn dim_c(&self) -> usize {
        self.dims.2
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn projector(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }

    fn dims_slice(&self) -> [usize; 3] {
        [self.dims.0, self.dims.1, self.dims.2]
    }

    /// Marginal on AB (traces out C), as a bipartite state.
    pub fn rho_ab(&self) -> BipartiteState {
        let mat = partial_trace_multi(&self.projector(), &self.dims_slice(), &[true, true, false]);
        BipartiteState {
            rho: DensityMatrix { dim: mat.nrows(), mat },
            dim_a: self.dims.0,
            dim_b: self.dims.1,
        }
    }

    /// Marginal on BC (traces out A), as a bipartite state with C second.
    pub fn rho_bc(&self) -> BipartiteState {
        let mat = partial_trace_multi(&self.projector(), &self.dims_slice(), &[false, true, true]);
        BipartiteState {
            rho: DensityMatrix { dim: mat.nrows(), mat },
            dim_a: self.dims.1,
            dim_b: self.dims.2,
        }
    }
}

#[derive(Debug, Clone)]
pub enum EnsembleMember {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl EnsembleMember {
    pub fn dim(&self) -> usize {
        match self {
            EnsembleMember::Pure(p) => p.dim(),
            EnsembleMember::Mixed(d) => d.dim(),
        }
    }

    pub fn matrix(&self) -> CMatrix {
        match self {
            EnsembleMember::Pure(p) => p.projector(),
            EnsembleMember::Mixed(d) => d.matrix().clone(),
        }
    }
}

/// Weighted list of states mixing to a declared parent state.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<(f64, EnsembleMember)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, EnsembleMember)>, parent: &DensityMatrix) -> Result<Self> {
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidEnsemble(format!(
                "weights sum to {total}, expected 1 within {TRACE_TOL:.0e}"
            )));
        }
        if members.iter().any(|(p, _)| *p < -TRACE_TOL) {
            return Err(Error::InvalidEnsemble("negative weight".into()));
        }
        let mut mix = CMatrix::zeros(parent.dim(), parent.dim());
        for (p, member) in &members {
            if member.dim() != parent.dim() {
                return Err(Error::DimensionMismatch(
                    "ensemble member dim differs from parent".into(),
                ));
            }
            mix += member.matrix() * cplx(*p, 0.0);
        }
        let defect = max_abs_diff(&mix, parent.matrix());
        if defect > MIX_TOL {
            return Err(Error::InvalidEnsemble(format!(
                "weighted sum differs from parent by {defect:.3e} > {MIX_TOL:.0e}"
            )));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, EnsembleMember)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Purification `|Psi> = sum_j sqrt(lambda_j) |e_j>_AB |j>_C` from the
/// eigendecomposition of a bipartite state.
///
/// Requires `dim_c >= rank` (rank counted with the support threshold). The
/// round trip `tr_C` is checked before returning.
pub fn purify(state: &BipartiteState, dim_c: usize) -> Result<TripartitePureState> {
    let (vals, vecs) = hermitian_eigen(state.matrix());
    // support enumerated by descending eigenvalue, matching the ordering the
    // ensemble parametrizations use, so C-register indices line up
    let support: Vec<(f64, usize)> = vals
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &v)| v > SUPPORT_EPS)
        .map(|(k, &v)| (v, k))
        .collect();
    let rank = support.len();
    if dim_c < rank {
        return Err(Error::InvalidArgument(format!(
            "purifying dimension {dim_c} is smaller than rank {rank}"
        )));
    }
    let dim_ab = state.rho().dim();
    let mut amps = CVector::zeros(dim_ab * dim_c);
    for (j, &(v, col)) in support.iter().enumerate() {
        let w = cplx(v.max(0.0).sqrt(), 0.0);
        for i in 0..dim_ab {
            amps[i * dim_c + j] += w * vecs[(i, col)];
        }
    }
    let norm = amps.norm();
    amps /= cplx(norm, 0.0);
    let psi = TripartitePureState::new((state.dim_a(), state.dim_b(), dim_c), amps)?;
    let defect = max_abs_diff(psi.rho_ab().matrix(), state.matrix());
    if defect > 1e-9 {
        return Err(Error::InvalidState(format!(
            "purification round trip defect {defect:.3e} exceeds 1e-9"
        )));
    }
    Ok(psi)
}

/// `(|00> + |11>)/sqrt(2)` on two qubits.
pub fn bell_state() -> BipartiteState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = CVector::zeros(4);
    amps[0] = cplx(s, 0.0);
    amps[3] = cplx(s, 0.0);
    let mat = &amps * amps.adjoint();
    BipartiteState {
        rho: DensityMatrix { dim: 4, mat },
        dim_a: 2,
        dim_b: 2,
    }
}

/// `w |psi-><psi-| + (1-w) I/4` with the singlet `(|01> - |10>)/sqrt(2)`.
pub fn werner_state(w: f64) -> Result<BipartiteState> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::InvalidArgument(format!("werner weight {w} outside [0,1]")));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut singlet = CVector::zeros(4);
    singlet[1] = cplx(s, 0.0);
    singlet[2] = cplx(-s, 0.0);
    let mat = (&singlet * singlet.adjoint()) * cplx(w, 0.0)
        + CMatrix::identity(4, 4) * cplx((1.0 - w) / 4.0, 0.0);
    BipartiteState::from_matrix(mat, 2, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::kron;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_non_psd() {
        let mat = CMatrix::from_row_slice(
            2,
            2,
            &[cplx(1.5, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(-0.5, 0.0)],
        );
        let err = DensityMatrix::new(mat).unwrap_err();
        assert!(err.to_string().contains("PSD"));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mat = CMatrix::from_row_slice(
            2,
            2,
            &[cplx(0.5, 0.0), cplx(0.3, 0.0), cplx(0.0, 0.0), cplx(0.5, 0.0)],
        );
        let err = DensityMatrix::new(mat).unwrap_err();
        assert!(err.to_string().contains("Hermiticity"));
    }

    #[test]
    fn rejects_wrong_trace() {
        let mat = CMatrix::identity(2, 2);
        let err = DensityMatrix::new(mat).unwrap_err();
        assert!(err.to_string().contains("trace"));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let a = DensityMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[cplx(0.75, 0.0), cplx(0.1, 0.05), cplx(0.1, -0.05), cplx(0.25, 0.0)],
        ))
        .unwrap();
        let b = DensityMatrix::maximally_mixed(3);
        let ab = BipartiteState::from_matrix(kron(a.matrix(), b.matrix()), 2, 3).unwrap();
        let ta = ab.partial_trace(Subsystem::A);
        assert!(max_abs_diff(ta.matrix(), a.matrix()) < 1e-12);
        let tb = ab.partial_trace(Subsystem::B);
        assert!(max_abs_diff(tb.matrix(), b.matrix()) < 1e-12);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let bell = bell_state();
        let ta = bell.partial_trace(Subsystem::A);
        assert!(max_abs_diff(ta.matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-12);
    }

    #[test]
    fn swapped_preserves_spectrum_and_swaps_marginals() {
        let mut rng = crate::qcore::random::master_rng(11);
        let st = crate::qcore::random::random_bipartite_with(2, 3, 4, &mut rng).unwrap();
        let sw = st.swapped();
        let ea = st.partial_trace(Subsystem::A).eigenvalues();
        let eb = sw.partial_trace(Subsystem::B).eigenvalues();
        for (x, y) in ea.iter().zip(eb.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn ensemble_must_mix_to_parent() {
        let parent = DensityMatrix::maximally_mixed(2);
        let members = vec![
            (0.5, EnsembleMember::Pure(PureState::basis_state(2, 0))),
            (0.5, EnsembleMember::Pure(PureState::basis_state(2, 0))),
        ];
        assert!(Ensemble::new(members, &parent).is_err());
        let good = vec![
            (0.5, EnsembleMember::Pure(PureState::basis_state(2, 0))),
            (0.5, EnsembleMember::Pure(PureState::basis_state(2, 1))),
        ];
        assert!(Ensemble::new(good, &parent).is_ok());
    }

    #[test]
    fn purify_pure_input_with_trivial_ancilla() {
        let bell = bell_state();
        let psi = purify(&bell, 1).unwrap();
        assert_eq!(psi.dims(), (2, 2, 1));
        // amplitudes match the source vector up to a global phase
        let p = psi.projector();
        assert!(max_abs_diff(&p, bell.matrix()) < 1e-9);
    }

    #[test]
    fn purify_maximally_mixed_qubit() {
        let rho = BipartiteState::new(DensityMatrix::maximally_mixed(2), 1, 2).unwrap();
        let psi = purify(&rho, 2).unwrap();
        // Schmidt weights across AB|C are (1/2, 1/2)
        let marg = psi.rho_ab();
        let evs = marg.rho().eigenvalues();
        assert_abs_diff_eq!(evs[evs.len() - 1], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(evs[evs.len() - 2], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn purify_round_trip_random_rank2() {
        let mut rng = crate::qcore::random::master_rng(21);
        let st = crate::qcore::random::random_bipartite_with(2, 2, 2, &mut rng).unwrap();
        let psi = purify(&st, 16).unwrap();
        assert!(max_abs_diff(psi.rho_ab().matrix(), st.matrix()) < 1e-9);
    }

    #[test]
    fn purify_rejects_small_ancilla() {
        let rho = BipartiteState::new(DensityMatrix::maximally_mixed(4), 2, 2).unwrap();
        assert!(purify(&rho, 3).is_err());
    }

    #[test]
    fn nearly_psd_repair_clips_and_renormalizes() {
        let mut mat = DensityMatrix::maximally_mixed(2).matrix().clone();
        mat[(0, 0)] += cplx(1e-7, 0.0);
        mat[(1, 1)] -= cplx(2e-7, 0.0);
        let fixed = DensityMatrix::from_nearly_psd(mat).unwrap();
        assert!((fixed.matrix().trace().re - 1.0).abs() < 1e-14);
        assert!(fixed.eigenvalues()[0] >= 0.0);
    }
}
