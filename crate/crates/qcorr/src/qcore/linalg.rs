//! Dense complex matrix helpers shared by the whole crate.
//!
//! Everything operates on `DMatrix<Complex<f64>>`. Eigendecompositions of
//! Hermitian matrices come from nalgebra's `SymmetricEigen` and are returned
//! with eigenvalues sorted ascending so that every caller sees one
//! deterministic ordering.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigenvalues below this magnitude count as zero for rank/support decisions.
pub const SUPPORT_EPS: f64 = 1e-10;

pub fn cplx(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Kronecker product, left factor major (row index `i = a*dim(b) + b`).
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

/// (M + M†)/2
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * cplx(0.5, 0.0)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Trace norm `tr sqrt(X†X)`, i.e. the sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().sum()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvalues sorted ascending and
/// eigenvector `k` in column `k`. The input is symmetrized first so callers
/// may pass matrices that are Hermitian only up to rounding.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Applies `f` to the eigenvalues of a Hermitian matrix: `V f(Λ) V†`.
pub fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let n = m.nrows();
    let mut diag = CMatrix::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        diag[(i, i)] = f(v);
    }
    &vectors * diag * vectors.adjoint()
}

/// Unitary `exp(iH)` for Hermitian `H`.
pub fn exp_i_hermitian(h: &CMatrix) -> CMatrix {
    hermitian_map(h, |v| cplx(0.0, v).exp())
}

/// `M^p` for a PSD matrix, with eigenvalues below `SUPPORT_EPS` treated as 0
/// (so negative powers act on the support only).
pub fn psd_power(m: &CMatrix, p: f64) -> CMatrix {
    hermitian_map(m, |v| {
        if v <= SUPPORT_EPS {
            cplx(0.0, 0.0)
        } else {
            cplx(v.powf(p), 0.0)
        }
    })
}

/// Partial trace over an arbitrary subsystem split.
///
/// `dims` lists the local dimensions left-to-right (leftmost factor is the
/// most significant index block); `keep[s]` selects which subsystems survive.
/// Kept subsystems retain their original relative order.
pub fn partial_trace_multi(m: &CMatrix, dims: &[usize], keep: &[bool]) -> CMatrix {
    assert_eq!(dims.len(), keep.len());
    let total: usize = dims.iter().product();
    assert_eq!(m.nrows(), total, "matrix size must match declared dims");
    assert_eq!(m.ncols(), total);

    // strides of each subsystem inside the composite index
    let mut strides = vec![1usize; dims.len()];
    for s in (0..dims.len().saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * dims[s + 1];
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|&s| keep[s]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|&s| !keep[s]).collect();
    let kdim: usize = kept.iter().map(|&s| dims[s]).product();
    let tdim: usize = traced.iter().map(|&s| dims[s]).product();

    // offset of a flat kept/traced index inside the composite index
    let offset = |flat: usize, subs: &[usize]| -> usize {
        let mut rem = flat;
        let mut off = 0;
        for &s in subs.iter().rev() {
            off += (rem % dims[s]) * strides[s];
            rem /= dims[s];
        }
        off
    };

    let mut out = CMatrix::zeros(kdim, kdim);
    for ki in 0..kdim {
        let oi = offset(ki, &kept);
        for kj in 0..kdim {
            let oj = offset(kj, &kept);
            let mut acc = cplx(0.0, 0.0);
            for t in 0..tdim {
                let ot = offset(t, &traced);
                acc += m[(oi + ot, oj + ot)];
            }
            out[(ki, kj)] = acc;
        }
    }
    out
}

/// Hermitian matrix from `dim*dim` real parameters: `dim` diagonal entries
/// followed by (re, im) pairs for the upper triangle, row by row.
pub fn hermitian_from_params(dim: usize, params: &[f64]) -> CMatrix {
    assert_eq!(params.len(), dim * dim, "need dim^2 parameters");
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = cplx(params[i], 0.0);
    }
    let mut k = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let z = cplx(params[k], params[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

/// Complex `rows x cols` matrix from `2*rows*cols` real parameters.
pub fn matrix_from_params(rows: usize, cols: usize, params: &[f64]) -> CMatrix {
    assert_eq!(params.len(), 2 * rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| {
        let k = 2 * (i * cols + j);
        cplx(params[k], params[k + 1])
    })
}

/// Column-orthonormal completion of an `n x r` isometry to an `n x n` unitary.
///
/// Deterministic: candidate columns are taken from the standard basis and
/// Gram-Schmidt orthogonalized against everything accepted so far.
pub fn complete_isometry(v: &CMatrix) -> CMatrix {
    let (n, r) = (v.nrows(), v.ncols());
    assert!(r <= n);
    let mut cols: Vec<CVector> = (0..r).map(|j| v.column(j).into_owned()).collect();
    let mut basis = 0;
    while cols.len() < n {
        assert!(basis < n, "isometry completion ran out of candidates");
        let mut cand = CVector::zeros(n);
        cand[basis] = cplx(1.0, 0.0);
        basis += 1;
        for c in &cols {
            let overlap = c.dotc(&cand);
            cand -= c * overlap;
        }
        let norm = cand.norm();
        if norm > 1e-8 {
            cols.push(cand / cplx(norm, 0.0));
        }
    }
    CMatrix::from_columns(&cols)
}
