//! Independent oracles used by the integration tests. Everything here is
//! deliberately written against nalgebra directly (closed-form routes, index
//! loops, scalar eigenvalues) rather than through the library's optimizer
//! paths, so a test comparison exercises two genuinely different pipelines.

use nalgebra::DMatrix;
use num_complex::Complex;
use qcorr::qcore::state::BipartiteState;

pub type C64 = Complex<f64>;
pub type M = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Binary entropy in bits.
pub fn h2(p: f64) -> f64 {
    let mut s = 0.0;
    for q in [p, 1.0 - p] {
        if q > 0.0 {
            s -= q * q.log2();
        }
    }
    s
}

/// Two-qubit concurrence by the closed formula: descending square roots
/// `s_1 >= ... >= s_4` of the eigenvalues of `rho rho~` with
/// `rho~ = (Y x Y) conj(rho) (Y x Y)`, then `C = max(0, s1 - s2 - s3 - s4)`.
/// The nonzero spectrum of `rho rho~` equals that of the Hermitian matrix
/// `sqrt(rho) rho~ sqrt(rho)`.
pub fn concurrence(state: &BipartiteState) -> f64 {
    let rho: M = state.matrix().clone();
    let yy = {
        let y = M::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        y.kronecker(&y)
    };
    let tilde = &yy * rho.map(|z| z.conj()) * &yy;
    let sqrt_rho = psd_sqrt(&rho);
    let inner = &sqrt_rho * tilde * &sqrt_rho;
    let mut roots: Vec<f64> = inner
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|&v| v.max(0.0).sqrt())
        .collect();
    roots.sort_by(|a, b| b.total_cmp(a));
    (roots[0] - roots[1] - roots[2] - roots[3]).max(0.0)
}

fn psd_sqrt(m: &M) -> M {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut out = M::zeros(n, n);
    for k in 0..n {
        let v = eig.eigenvalues[k].max(0.0).sqrt();
        let col = eig.eigenvectors.column(k);
        out += (col * col.adjoint()) * c(v, 0.0);
    }
    out
}

/// Wootters formula: `E_F = h((1 + sqrt(1 - C^2))/2)` for two qubits.
pub fn eof_concurrence_oracle(state: &BipartiteState) -> f64 {
    let cc = concurrence(state);
    h2(0.5 * (1.0 + (1.0 - cc * cc).max(0.0).sqrt()))
}

/// Eigenvalues of a 2x2 Hermitian matrix, closed form.
fn eig2(m00: f64, m11: f64, m01: C64) -> (f64, f64) {
    let half_tr = 0.5 * (m00 + m11);
    let half_diff = 0.5 * (m00 - m11);
    let r = (half_diff * half_diff + m01.norm_sqr()).sqrt();
    (half_tr - r, half_tr + r)
}

/// Average conditional entropy of A after a Bloch-angle projective
/// measurement on B of a two-qubit state, by direct index arithmetic.
pub fn bloch_conditional_entropy(state: &BipartiteState, theta: f64, phi: f64) -> f64 {
    let rho = state.matrix();
    let (st, ct) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    let e = c(0.0, phi).exp();
    // projector vectors v0, v1
    let vs = [
        [c(ct, 0.0), e * c(st, 0.0)],
        [c(-st, 0.0), e * c(ct, 0.0)],
    ];
    let mut total = 0.0;
    for v in vs {
        // unnormalized conditional state on A: R[a,a'] = sum_bb' rho[(a b),(a' b')] v_b' conj(v_b)
        let mut r00 = c(0.0, 0.0);
        let mut r01 = c(0.0, 0.0);
        let mut r11 = c(0.0, 0.0);
        for b in 0..2 {
            for b2 in 0..2 {
                let w = v[b].conj() * v[b2];
                r00 += rho[(b, b2)] * w;
                r01 += rho[(b, 2 + b2)] * w;
                r11 += rho[(2 + b, 2 + b2)] * w;
            }
        }
        let p = (r00 + r11).re;
        if p < 1e-12 {
            continue;
        }
        let (l0, l1) = eig2(r00.re / p, r11.re / p, r01 / c(p, 0.0));
        let mut s = 0.0;
        for l in [l0, l1] {
            if l > 0.0 {
                s -= l * l.log2();
            }
        }
        total += p * s;
    }
    total
}

/// Grid minimum of the Bloch conditional entropy (the discord oracle for
/// two-qubit states under rank-1 projective measurements).
pub fn grid_min_conditional_entropy(state: &BipartiteState, theta_steps: usize, phi_steps: usize) -> f64 {
    let mut best = f64::INFINITY;
    for ti in 0..=theta_steps {
        let theta = std::f64::consts::PI * ti as f64 / theta_steps as f64;
        for pi in 0..phi_steps {
            let phi = 2.0 * std::f64::consts::PI * pi as f64 / phi_steps as f64;
            best = best.min(bloch_conditional_entropy(state, theta, phi));
        }
    }
    best
}

/// Shannon entropy (bits) of a probability vector.
pub fn shannon(probs: &[f64]) -> f64 {
    let mut s = 0.0;
    for &p in probs {
        if p > 0.0 {
            s -= p * p.log2();
        }
    }
    s
}
