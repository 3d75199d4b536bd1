//! Entropic quantities, all base 2 (bits).

use super::linalg::{hermitian_eigen, CMatrix, SUPPORT_EPS};
use super::state::{BipartiteState, DensityMatrix, Subsystem};
use crate::error::{Error, Result};

/// `-sum lambda log2 lambda` with `0 log 0 := 0`. Eigenvalues in
/// `[-1e-9, 0)` are rounding noise and clipped to zero.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    let mut s = 0.0;
    for &v in eigenvalues {
        if v > 0.0 {
            s -= v * v.log2();
        }
    }
    s
}

/// Von Neumann entropy `S(rho) = -tr(rho log2 rho)`.
pub fn von_neumann_entropy(state: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&state.eigenvalues())
}

/// Entropy of a Hermitian PSD matrix given directly (no invariant checks).
pub fn entropy_of_matrix(mat: &CMatrix) -> f64 {
    entropy_of_spectrum(&hermitian_eigen(mat).0)
}

/// Relative entropy `S(rho||sigma) = tr(rho log2 rho - rho log2 sigma)`.
///
/// Returns `f64::INFINITY` when the support of `rho` is not contained in the
/// support of `sigma` (support decided by the `1e-10` eigenvalue threshold).
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy needs equal dims, got {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(relative_entropy_raw(rho.matrix(), sigma.matrix()))
}

/// Same as [`relative_entropy`] on raw Hermitian matrices (hot path for
/// optimizer objectives; callers guarantee valid states).
pub fn relative_entropy_raw(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let (rvals, rvecs) = hermitian_eigen(rho);
    let (svals, svecs) = hermitian_eigen(sigma);
    // overlap weights |<r_i|s_j>|^2
    let overlap = rvecs.adjoint() * svecs;
    let mut s = 0.0;
    let mut kernel_mass = 0.0;
    for (i, &rv) in rvals.iter().enumerate() {
        if rv <= SUPPORT_EPS {
            continue;
        }
        s += rv * rv.log2();
        for (j, &sv) in svals.iter().enumerate() {
            let w = overlap[(i, j)].norm_sqr();
            if sv > SUPPORT_EPS {
                s -= rv * w * sv.log2();
            } else {
                kernel_mass += rv * w;
            }
        }
    }
    if kernel_mass > SUPPORT_EPS {
        return f64::INFINITY;
    }
    s.max(0.0)
}

/// Mutual information `I = S(rho_A) + S(rho_B) - S(rho_AB)`.
pub fn mutual_information(state: &BipartiteState) -> f64 {
    let sa = von_neumann_entropy(&state.partial_trace(Subsystem::A));
    let sb = von_neumann_entropy(&state.partial_trace(Subsystem::B));
    let sab = von_neumann_entropy(state.rho());
    sa + sb - sab
}
