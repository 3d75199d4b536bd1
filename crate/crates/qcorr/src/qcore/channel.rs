//! Completely positive trace-preserving maps in operator-sum form.

use super::linalg::{cplx, identity, max_abs_diff, CMatrix};
use super::state::DensityMatrix;
use crate::error::{Error, Result};

const COMPLETENESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("empty Kraus list".into()));
        }
        for (i, k) in kraus.iter().enumerate() {
            if k.nrows() != dim_out || k.ncols() != dim_in {
                return Err(Error::InvalidChannel(format!(
                    "Kraus operator {i} is {}x{}, expected {dim_out}x{dim_in}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        let mut acc = CMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            acc += k.adjoint() * k;
        }
        let defect = max_abs_diff(&acc, &identity(dim_in));
        if defect > COMPLETENESS_TOL {
            return Err(Error::InvalidChannel(format!(
                "completeness violated: max |sum K†K - I| = {defect:.3e} > {COMPLETENESS_TOL:.0e}"
            )));
        }
        Ok(Self { dim_in, dim_out, kraus })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `sum_k K rho K†` on a raw matrix (no invariant checks).
    pub fn apply_raw(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "channel input dim {} but state dim {}",
                self.dim_in,
                rho.dim()
            )));
        }
        DensityMatrix::from_nearly_psd(self.apply_raw(rho.matrix()))
    }

    pub fn identity_channel(dim: usize) -> Self {
        Self {
            dim_in: dim,
            dim_out: dim,
            kraus: vec![identity(dim)],
        }
    }

    /// Maps every input to `I/dim_out`.
    pub fn fully_depolarizing(dim: usize) -> Self {
        let scale = cplx(1.0 / (dim as f64).sqrt(), 0.0);
        let mut kraus = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut k = CMatrix::zeros(dim, dim);
                k[(i, j)] = cplx(1.0, 0.0);
                kraus.push(k * scale);
            }
        }
        Self { dim_in: dim, dim_out: dim, kraus }
    }

    /// Qubit dephasing channel with Kraus `sqrt(1/2) I, sqrt(1/2) Z`.
    pub fn dephasing_qubit() -> Self {
        let s = cplx(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut z = identity(2);
        z[(1, 1)] = cplx(-1.0, 0.0);
        Self {
            dim_in: 2,
            dim_out: 2,
            kraus: vec![identity(2) * s, z * s],
        }
    }
}
