//! Seeded random generation of states, unitaries and structured batteries.
//!
//! Every generator is deterministic given its seed. Parallel batteries derive
//! one independent ChaCha stream per case from a master seed via a fixed
//! splitting rule, so case `i` sees the same randomness no matter how many
//! workers run.

use super::linalg::{cplx, kron, CMatrix, CVector};
use super::state::{BipartiteState, DensityMatrix, PureState, Subsystem};
use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn master_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` of the master seed.
pub fn stream_rng(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard complex Gaussian entry (Box-Muller).
fn complex_normal(rng: &mut SeededRng) -> crate::qcore::linalg::C64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
    // real and imaginary parts each N(0, 1/2) so |z|^2 has mean 1
    cplx(r * c * std::f64::consts::FRAC_1_SQRT_2, r * s * std::f64::consts::FRAC_1_SQRT_2)
}

pub fn ginibre(dim: usize, rng: &mut SeededRng) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fixing.
pub fn haar_unitary(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let g = ginibre(dim, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { cplx(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_pure_state_with(dim: usize, rng: &mut SeededRng) -> PureState {
    let mut amps = CVector::from_fn(dim, |_, _| complex_normal(rng));
    let norm = amps.norm();
    amps /= cplx(norm, 0.0);
    PureState::new(amps).expect("normalized vector")
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn random_pure_state(dim: usize, seed: u64) -> PureState {
    random_pure_state_with(dim, &mut master_rng(seed))
}

pub fn random_density_matrix_with(dim: usize, rank: usize, rng: &mut SeededRng) -> Result<DensityMatrix> {
    if rank < 1 || rank > dim {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} outside 1..={dim}"
        )));
    }
    // trace out a rank-dimensional ancilla of a Haar-random pure state
    let psi = random_pure_state_with(dim * rank, rng);
    let joint = BipartiteState::new(psi.to_density_matrix(), dim, rank)?;
    Ok(joint.partial_trace(Subsystem::A))
}

/// Random mixed state of the given rank, induced from a Haar-random
/// purification on `dim x rank`.
pub fn random_density_matrix(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_matrix_with(dim, rank, &mut master_rng(seed))
}

pub fn random_bipartite_with(
    dim_a: usize,
    dim_b: usize,
    rank: usize,
    rng: &mut SeededRng,
) -> Result<BipartiteState> {
    let rho = random_density_matrix_with(dim_a * dim_b, rank, rng)?;
    BipartiteState::new(rho, dim_a, dim_b)
}

/// Random Hermitian matrix with Gaussian entries (for operator batteries).
pub fn random_hermitian(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let g = ginibre(dim, rng);
    (&g + g.adjoint()) * cplx(0.5, 0.0)
}

/// Random probability vector, uniform on the simplex.
pub fn random_simplex(len: usize, rng: &mut SeededRng) -> Vec<f64> {
    let mut w: Vec<f64> = (0..len)
        .map(|_| -(rng.random::<f64>().max(f64::MIN_POSITIVE)).ln())
        .collect();
    let total: f64 = w.iter().sum();
    for v in &mut w {
        *v /= total;
    }
    w
}

/// Quantum-classical state `sum_i p_i rho_i^A x |b_i><b_i|` with a Haar-random
/// orthonormal basis `{|b_i>}` on B.
pub fn random_qc_state(dim_a: usize, dim_b: usize, rng: &mut SeededRng) -> Result<BipartiteState> {
    let probs = random_simplex(dim_b, rng);
    let basis = haar_unitary(dim_b, rng);
    let mut mat = CMatrix::zeros(dim_a * dim_b, dim_a * dim_b);
    for (i, &p) in probs.iter().enumerate() {
        let rho_a = random_density_matrix_with(dim_a, dim_a, rng)?;
        let b = basis.column(i);
        let proj = b * b.adjoint();
        mat += kron(rho_a.matrix(), &proj) * cplx(p, 0.0);
    }
    BipartiteState::from_matrix(mat, dim_a, dim_b)
}

/// Classical-classical state `sum_ij p_ij |a_i><a_i| x |b_j><b_j|` with
/// Haar-random product bases.
pub fn random_cc_state(dim_a: usize, dim_b: usize, rng: &mut SeededRng) -> Result<BipartiteState> {
    let probs = random_simplex(dim_a * dim_b, rng);
    let ua = haar_unitary(dim_a, rng);
    let ub = haar_unitary(dim_b, rng);
    let mut mat = CMatrix::zeros(dim_a * dim_b, dim_a * dim_b);
    for i in 0..dim_a {
        for j in 0..dim_b {
            let a = ua.column(i);
            let b = ub.column(j);
            let proj = kron(&(a * a.adjoint()), &(b * b.adjoint()));
            mat += proj * cplx(probs[i * dim_b + j], 0.0);
        }
    }
    BipartiteState::from_matrix(mat, dim_a, dim_b)
}

/// Separable state: a random mixture of `terms` Haar-random product pure
/// states. Also returns the decomposition for use as a constructed witness.
pub fn random_separable_with_decomposition(
    dim_a: usize,
    dim_b: usize,
    terms: usize,
    rng: &mut SeededRng,
) -> Result<(BipartiteState, Vec<(f64, PureState, PureState)>)> {
    if terms == 0 {
        return Err(Error::InvalidArgument("need at least one product term".into()));
    }
    let probs = random_simplex(terms, rng);
    let mut mat = CMatrix::zeros(dim_a * dim_b, dim_a * dim_b);
    let mut decomp = Vec::with_capacity(terms);
    for &p in &probs {
        let a = random_pure_state_with(dim_a, rng);
        let b = random_pure_state_with(dim_b, rng);
        mat += kron(&a.projector(), &b.projector()) * cplx(p, 0.0);
        decomp.push((p, a, b));
    }
    Ok((BipartiteState::from_matrix(mat, dim_a, dim_b)?, decomp))
}

pub fn random_separable(dim_a: usize, dim_b: usize, terms: usize, rng: &mut SeededRng) -> Result<BipartiteState> {
    random_separable_with_decomposition(dim_a, dim_b, terms, rng).map(|(s, _)| s)
}
