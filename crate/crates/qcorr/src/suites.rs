//! Named, reproducible verification suites: identity and inequality chains
//! evaluated over seeded state batteries, reported per case with residuals.
//!
//! Identity suites use `residual = |lhs - rhs|` against the suite tolerance.
//! Inequality suites fold their tolerance margins into the checks and report
//! `residual = max(0, violation)` with a zero pass threshold, so a passing
//! case is exactly a zero residual.

use crate::classicality::{is_quantum_classical, Verdict, DEFAULT_CLASSICALITY_TOL};
use crate::error::{Error, Result};
use crate::exec;
use crate::measurements::{povm_from_params, Measurement};
use crate::measures::{
    classical_correlation, constrained_holevo, discord, distance_to_separable, eof,
    rel_ent_entanglement, MeasurementKind, NormKind,
};
use crate::optimize::OptimizerConfig;
use crate::qcore::entropy::{mutual_information, von_neumann_entropy};
use crate::qcore::linalg::{cplx, max_abs_diff, CMatrix};
use crate::qcore::random::{
    random_bipartite_with, random_hermitian, random_qc_state, random_separable_with_decomposition,
    stream_rng, SeededRng,
};
use crate::qcore::state::{purify, BipartiteState, Subsystem};
use crate::reductions::{eof_to_discord, eof_to_holevo, sep_to_eof, SeparabilityInstance};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteName {
    KoashiWinter,
    HolevoIdentity,
    InequalityChain,
    NormBounds,
    LinoptEquality,
    ClassicalityEquivalence,
    SteeringCompleteness,
    ReductionSoundness,
}

impl SuiteName {
    pub const ALL: [SuiteName; 8] = [
        SuiteName::KoashiWinter,
        SuiteName::HolevoIdentity,
        SuiteName::InequalityChain,
        SuiteName::NormBounds,
        SuiteName::LinoptEquality,
        SuiteName::ClassicalityEquivalence,
        SuiteName::SteeringCompleteness,
        SuiteName::ReductionSoundness,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::KoashiWinter => "koashi-winter",
            SuiteName::HolevoIdentity => "holevo-identity",
            SuiteName::InequalityChain => "inequality-chain",
            SuiteName::NormBounds => "norm-bounds",
            SuiteName::LinoptEquality => "linopt-equality",
            SuiteName::ClassicalityEquivalence => "classicality-equivalence",
            SuiteName::SteeringCompleteness => "steering-completeness",
            SuiteName::ReductionSoundness => "reduction-soundness",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .find(|s| s.as_str() == name)
            .copied()
            .ok_or_else(|| Error::UnknownSuite(name.to_string()))
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            SuiteName::KoashiWinter => 1e-3,
            SuiteName::HolevoIdentity => 1e-3,
            SuiteName::InequalityChain => 0.0,
            SuiteName::NormBounds => 0.0,
            SuiteName::LinoptEquality => 1e-4,
            SuiteName::ClassicalityEquivalence => 0.0,
            SuiteName::SteeringCompleteness => 1e-8,
            SuiteName::ReductionSoundness => 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseRecord {
    pub index: usize,
    pub residual: f64,
    pub fields: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub count: usize,
    pub dims: [usize; 2],
    pub tolerance: f64,
    pub pass: bool,
    pub worst_residual: f64,
    pub cases: Vec<CaseRecord>,
}

impl SuiteReport {
    fn from_cases(name: SuiteName, seed: u64, cases: Vec<CaseRecord>) -> Self {
        let tolerance = name.tolerance();
        let worst = cases.iter().map(|c| c.residual).fold(0.0, f64::max);
        Self {
            suite: name.as_str().to_string(),
            seed,
            count: cases.len(),
            dims: [2, 2],
            tolerance,
            pass: worst <= tolerance,
            worst_residual: worst,
            cases,
        }
    }

    /// One row per case; columns are the sorted field names.
    pub fn to_csv(&self) -> String {
        let mut columns: Vec<&str> = self
            .cases
            .first()
            .map(|c| c.fields.keys().map(String::as_str).collect())
            .unwrap_or_default();
        columns.sort_unstable();
        let mut out = String::from("case");
        for c in &columns {
            out.push(',');
            out.push_str(c);
        }
        out.push_str(",residual\n");
        for case in &self.cases {
            out.push_str(&case.index.to_string());
            for c in &columns {
                out.push(',');
                out.push_str(&format!("{:.12e}", case.fields.get(*c).copied().unwrap_or(f64::NAN)));
            }
            out.push_str(&format!(",{:.12e}\n", case.residual));
        }
        out
    }
}

/// Per-case optimizer configuration: an independent deterministic seed for
/// every (suite seed, case) pair.
fn case_cfg(base: &OptimizerConfig, seed: u64, case: usize) -> OptimizerConfig {
    let mut cfg = base.clone();
    cfg.seed = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(case as u64);
    cfg.bounds = Vec::new();
    cfg
}

fn case_rng(seed: u64, case: usize) -> SeededRng {
    stream_rng(seed, case as u64)
}

/// Runs the named suite over a deterministic battery.
pub fn run_suite(
    name: SuiteName,
    seed: u64,
    count: usize,
    cfg: &OptimizerConfig,
) -> Result<SuiteReport> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be >= 1".into()));
    }
    let cases: Vec<Result<CaseRecord>> = exec::map_indexed(count, |i| match name {
        SuiteName::KoashiWinter => koashi_winter_case(seed, i, cfg),
        SuiteName::HolevoIdentity => holevo_identity_case(seed, i, cfg),
        SuiteName::InequalityChain => inequality_chain_case(seed, i, cfg),
        SuiteName::NormBounds => norm_bounds_case(seed, i, cfg),
        SuiteName::LinoptEquality => linopt_equality_case(seed, i, cfg),
        SuiteName::ClassicalityEquivalence => classicality_case(seed, i, count, cfg),
        SuiteName::SteeringCompleteness => steering_case(seed, i),
        SuiteName::ReductionSoundness => reduction_soundness_case(seed, i, cfg),
    });
    let cases = cases.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport::from_cases(name, seed, cases))
}

fn record(index: usize, residual: f64, fields: Vec<(&str, f64)>) -> CaseRecord {
    CaseRecord {
        index,
        residual,
        fields: fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
    }
}

/// `|E_F(rho_AB) - D_P(rho_BC|C) - S(rho_A) + S(rho_AB)|` on random rank-2
/// two-qubit states with a rank-sized purifying register.
fn koashi_winter_case(seed: u64, index: usize, cfg: &OptimizerConfig) -> Result<CaseRecord> {
    let mut rng = case_rng(seed, index);
    let state = random_bipartite_with(2, 2, 2, &mut rng)?;
    let cfg_i = case_cfg(cfg, seed, index);
    let e_f = eof(&state, Some(4), &cfg_i)?.value;
    let psi = purify(&state, 2)?;
    let d_p = discord(&psi.rho_bc(), MeasurementKind::Povm, &cfg_i)?.value;
    let s_a = von_neumann_entropy(&state.partial_trace(Subsystem::A));
    let s_ab = von_neumann_entropy(state.rho());
    let residual = (e_f - d_p - s_a + s_ab).abs();
    Ok(record(
        index,
        residual,
        vec![("eof", e_f), ("discord_povm", d_p), ("s_a", s_a), ("s_ab", s_ab)],
    ))
}

/// `|E_F(sigma_AB) - S(Phi(rho)) + chi_Phi(rho)|` across the channel
/// reduction on random rank-2 two-qubit states.
fn holevo_identity_case(seed: u64, index: usize, cfg: &OptimizerConfig) -> Result<CaseRecord> {
    let mut rng = case_rng(seed, index);
    let state = random_bipartite_with(2, 2, 2, &mut rng)?;
    let cfg_i = case_cfg(cfg, seed, index);
    let e_f = eof(&state, Some(4), &cfg_i)?.value;
    let inst = sep_to_eof(&SeparabilityInstance::new(state, 0.1)?);
    let holevo = eof_to_holevo(&inst)?;
    let chi = constrained_holevo(&holevo.channel, &holevo.input, None, &cfg_i)?.value;
    let s_out = von_neumann_entropy(&holevo.channel.apply(&holevo.input)?);
    let residual = (e_f - s_out + chi).abs();
    Ok(record(
        index,
        residual,
        vec![("eof", e_f), ("chi", chi), ("s_out", s_out)],
    ))
}

/// Battery state mix for the inequality suites: full rank, rank 2, separable
/// and quantum-classical states in rotation.
fn battery_state(rng: &mut SeededRng, index: usize) -> Result<BipartiteState> {
    match index % 4 {
        0 => random_bipartite_with(2, 2, 4, rng),
        1 => random_bipartite_with(2, 2, 2, rng),
        2 => random_separable_with_decomposition(2, 2, 4, rng).map(|(s, _)| s),
        _ => random_qc_state(2, 2, rng),
    }
}

/// `J_P >= J_N - 1e-6`, `D_P <= D_N + 1e-6`, `E_F >= E_R - 1e-4`,
/// `0 <= J <= I + 1e-7`.
fn inequality_chain_case(seed: u64, index: usize, cfg: &OptimizerConfig) -> Result<CaseRecord> {
    let mut rng = case_rng(seed, index);
    let state = battery_state(&mut rng, index)?;
    let cfg_i = case_cfg(cfg, seed, index);
    let j_n = classical_correlation(&state, MeasurementKind::VonNeumann, &cfg_i)?.value;
    let j_p = classical_correlation(&state, MeasurementKind::Povm, &cfg_i)?.value;
    let i = mutual_information(&state);
    let d_n = i - j_n;
    let d_p = i - j_p;
    let e_f = eof(&state, Some(4), &cfg_i)?.value;
    let e_r = rel_ent_entanglement(&state, Some(4), &cfg_i)?.value;
    let violations = [
        (j_n - 1e-6) - j_p,
        d_p - (d_n + 1e-6),
        (e_r - 1e-4) - e_f,
        -j_n - 1e-7,
        -j_p - 1e-7,
        j_n - (i + 1e-7),
        j_p - (i + 1e-7),
    ];
    let residual = violations.iter().fold(0.0f64, |a, &v| a.max(v)).max(0.0);
    Ok(record(
        index,
        residual,
        vec![
            ("j_n", j_n),
            ("j_p", j_p),
            ("d_n", d_n),
            ("d_p", d_p),
            ("e_f", e_f),
            ("e_r", e_r),
            ("mutual_information", i),
        ],
    ))
}

/// Estimator-margin forms of the norm bounds:
/// `E_R >= dist_1^2/(2 m n ln 2) - 1e-3` and
/// `E_F >= dist_2^2/(2448 ln 2) - 1e-3`.
fn norm_bounds_case(seed: u64, index: usize, cfg: &OptimizerConfig) -> Result<CaseRecord> {
    let mut rng = case_rng(seed, index);
    let state = battery_state(&mut rng, index)?;
    let cfg_i = case_cfg(cfg, seed, index);
    let e_f = eof(&state, Some(4), &cfg_i)?.value;
    let e_r = rel_ent_entanglement(&state, Some(4), &cfg_i)?.value;
    let d1 = distance_to_separable(&state, NormKind::Trace, Some(4), &cfg_i)?.value;
    let d2 = distance_to_separable(&state, NormKind::Frobenius, Some(4), &cfg_i)?.value;
    let ln2 = std::f64::consts::LN_2;
    let bound_r = d1 * d1 / (2.0 * 4.0 * ln2) - 1e-3;
    let bound_f = d2 * d2 / (2448.0 * ln2) - 1e-3;
    let residual = (bound_r - e_r).max(bound_f - e_f).max(0.0);
    Ok(record(
        index,
        residual,
        vec![
            ("e_f", e_f),
            ("e_r", e_r),
            ("dist_trace", d1),
            ("dist_frobenius", d2),
            ("bound_on_e_r", bound_r),
            ("bound_on_e_f", bound_f),
        ],
    ))
}

/// Exact largest eigenvalue of a 2x2 Hermitian matrix.
fn top_eig_2x2(m: &CMatrix) -> f64 {
    let half_tr = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let half_diff = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    half_tr + (half_diff * half_diff + m[(0, 1)].norm_sqr()).sqrt()
}

/// Bloch-angle grid over the A side with the exact B-side eigen-maximizer:
/// an independent oracle for the product-state maximum of a two-qubit
/// Hermitian operator.
pub fn product_max_grid_oracle(op: &CMatrix, theta_steps: usize, phi_steps: usize) -> f64 {
    let slices: Vec<f64> = exec::map_indexed(theta_steps + 1, |ti| {
        let theta = std::f64::consts::PI * ti as f64 / theta_steps as f64;
        let (s, c) = ((theta / 2.0).sin(), (theta / 2.0).cos());
        let mut best = f64::NEG_INFINITY;
        for pi in 0..phi_steps {
            let phi = 2.0 * std::f64::consts::PI * pi as f64 / phi_steps as f64;
            let a = [cplx(c, 0.0), cplx(0.0, phi).exp() * cplx(s, 0.0)];
            let mut mb = CMatrix::zeros(2, 2);
            for be in 0..2 {
                for bp in 0..2 {
                    let mut acc = cplx(0.0, 0.0);
                    for ae in 0..2 {
                        for ap in 0..2 {
                            acc += a[ae].conj() * op[(ae * 2 + be, ap * 2 + bp)] * a[ap];
                        }
                    }
                    mb[(be, bp)] = acc;
                }
            }
            best = best.max(top_eig_2x2(&mb));
        }
        best
    });
    slices.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Seesaw vs. grid oracle on random unit-norm Hermitian operators, plus the
/// CC-embedded certificate re-evaluation.
fn linopt_equality_case(seed: u64, index: usize, cfg: &OptimizerConfig) -> Result<CaseRecord> {
    let mut rng = case_rng(seed, index);
    let mut op = random_hermitian(4, &mut rng);
    let scale = crate::qcore::linalg::hermitian_eigenvalues(&op)
        .iter()
        .fold(0.0f64, |a, &v| a.max(v.abs()));
    op /= cplx(scale, 0.0);
    let cfg_i = case_cfg(cfg, seed, index);
    let res = crate::reductions::linopt_classical(&op, 2, 2, &cfg_i)?;
    let oracle = product_max_grid_oracle(&op, 400, 800);
    let cert_value = match &res.certificate {
        crate::measures::Certificate::ProductPair { a, b } => {
            let mut acc = cplx(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    for i2 in 0..2 {
                        for j2 in 0..2 {
                            acc += a[i].conj() * b[j].conj() * op[(i * 2 + j, i2 * 2 + j2)] * a[i2] * b[j2];
                        }
                    }
                }
            }
            acc.re
        }
        _ => f64::NAN,
    };
    let residual = (res.value - oracle).abs().max((res.value - cert_value).abs() * 1e2);
    Ok(record(
        index,
        residual,
        vec![
            ("seesaw", res.value),
            ("grid_oracle", oracle),
            ("certificate", cert_value),
        ],
    ))
}

/// Verdict of the polynomial-time classicality test against the optimizer
/// (`D_N <= 1e-5`): first half constructed QC states, second half Haar
/// random states. Residual 1 marks a disagreement.
fn classicality_case(seed: u64, index: usize, count: usize, cfg: &OptimizerConfig) -> Result<CaseRecord> {
    let mut rng = case_rng(seed, index);
    let constructed_qc = index < count / 2;
    let state = if constructed_qc {
        random_qc_state(2, 2, &mut rng)?
    } else {
        random_bipartite_with(2, 2, 4, &mut rng)?
    };
    let report = is_quantum_classical(&state, DEFAULT_CLASSICALITY_TOL)?;
    let cfg_i = case_cfg(cfg, seed, index);
    let d_n = discord(&state, MeasurementKind::VonNeumann, &cfg_i)?.value;
    let verdict_classical = report.verdict == Verdict::Classical;
    let discord_zero = d_n <= 1e-5;
    let agree = verdict_classical == discord_zero;
    Ok(record(
        index,
        if agree { 0.0 } else { 1.0 },
        vec![
            ("verdict_classical", if verdict_classical { 1.0 } else { 0.0 }),
            ("d_n", d_n),
            ("constructed_qc", if constructed_qc { 1.0 } else { 0.0 }),
            ("commutator_norm", report.max_commutator_norm),
        ],
    ))
}

/// `sum_i p_i rho_i = rho_AB` for a random POVM on the purifying system.
fn steering_case(seed: u64, index: usize) -> Result<CaseRecord> {
    let mut rng = case_rng(seed, index);
    let state = random_bipartite_with(2, 2, 4, &mut rng)?;
    let dim_c = 4;
    let psi = purify(&state, dim_c)?;
    // rank-1 completeness needs at least dim_c elements
    let elements = dim_c + (index % (dim_c * dim_c - dim_c + 1));
    let params: Vec<f64> = (0..2 * elements * dim_c)
        .map(|_| rand::Rng::random::<f64>(&mut rng) - 0.5)
        .collect();
    let povm = povm_from_params(dim_c, elements, &params)?;
    let ens = crate::measurements::steer_ensemble(&psi, &Measurement::Povm(povm))?;
    let defect = max_abs_diff(&ens.mixture(), state.matrix());
    Ok(record(
        index,
        defect,
        vec![("mixture_defect", defect), ("elements", elements as f64)],
    ))
}

/// Yes/no instance chains through sep -> eof -> discord and sep -> eof ->
/// holevo, checking gap arithmetic and downstream thresholds.
fn reduction_soundness_case(seed: u64, index: usize, cfg: &OptimizerConfig) -> Result<CaseRecord> {
    let mut rng = case_rng(seed, index);
    let yes_instance = index % 2 == 0;
    let state = if yes_instance {
        random_separable_with_decomposition(2, 2, 2, &mut rng)?.0
    } else {
        crate::qcore::state::bell_state()
    };
    let delta = 0.1;
    let inst = SeparabilityInstance::new(state.clone(), delta)?;
    let eof_inst = sep_to_eof(&inst);
    // gap arithmetic against an independent scalar route
    let expected_gap = delta * delta / (2448.0 * 4.0 * std::f64::consts::LN_2);
    let gap_residual = ((eof_inst.gap - expected_gap) / expected_gap).abs();
    let cfg_i = case_cfg(cfg, seed, index);
    let e_f = eof(&state, Some(4), &cfg_i)?.value;

    // threshold checks: yes-instances sit at the threshold, no-instances
    // clear it by at least the emitted gap
    let threshold_violation = if yes_instance {
        (e_f - eof_inst.threshold).max(0.0).min(1.0) * if e_f <= 1e-4 { 0.0 } else { 1.0 }
    } else if e_f >= eof_inst.threshold + eof_inst.gap {
        0.0
    } else {
        1.0
    };

    // discord chain at the rank-sized register (POVM flavor)
    let disc_inst = eof_to_discord(&eof_inst, Some(state.rho().rank()), MeasurementKind::Povm)?;
    let d_p = discord(&disc_inst.state, MeasurementKind::Povm, &cfg_i)?.value;
    let s_a = von_neumann_entropy(&state.partial_trace(Subsystem::A));
    let s_ab = von_neumann_entropy(state.rho());
    let kw_residual = (e_f - d_p - s_a + s_ab).abs();

    // holevo chain
    let hol = eof_to_holevo(&eof_inst)?;
    let chi = constrained_holevo(&hol.channel, &hol.input, None, &cfg_i)?.value;
    let s_out = von_neumann_entropy(&hol.channel.apply(&hol.input)?);
    let holevo_residual = (e_f - s_out + chi).abs();

    let residual = gap_residual
        .max(threshold_violation)
        .max(kw_residual)
        .max(holevo_residual);
    Ok(record(
        index,
        residual,
        vec![
            ("yes_instance", if yes_instance { 1.0 } else { 0.0 }),
            ("eof", e_f),
            ("gap", eof_inst.gap),
            ("discord_povm", d_p),
            ("chi", chi),
            ("kw_residual", kw_residual),
            ("holevo_residual", holevo_residual),
        ],
    ))
}
