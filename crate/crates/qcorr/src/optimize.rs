//! Deterministic multi-start minimization over real parameter vectors.
//!
//! Every "inf" in the measure stack lands here. Local refinement is a bounded
//! Nelder-Mead simplex descent; global coverage comes from seeded random
//! multi-starts (one ChaCha stream per start) plus optional structured start
//! points supplied by the caller. Starts are independent and run in parallel;
//! the merge is ordered by start index, so results are bit-reproducible.
//!
//! Returned values are certified one-sided bounds: `best_value` is always the
//! objective re-evaluated at `best_params`, never an extrapolation.

use crate::error::{Error, Result};
use crate::exec;
use crate::qcore::linalg::{hermitian_eigen, max_abs_diff, CMatrix, CVector};
use crate::qcore::random::stream_rng;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A pure objective over a real parameter vector. `f64::INFINITY` marks
/// infeasible points.
pub struct Objective<'a> {
    arity: usize,
    f: &'a (dyn Fn(&[f64]) -> f64 + Sync),
}

impl<'a> Objective<'a> {
    pub fn new(arity: usize, f: &'a (dyn Fn(&[f64]) -> f64 + Sync)) -> Self {
        Self { arity, f }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub max_iters: usize,
    pub tol_f: f64,
    pub seed: u64,
    /// Per-parameter box bounds; empty means the caller's parametrization
    /// default is applied before optimization.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<(f64, f64)>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 32,
            max_iters: 2000,
            tol_f: 1e-9,
            seed: 1,
            bounds: Vec::new(),
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }

    /// Uniform box over every parameter.
    pub fn uniform_bounds(mut self, lo: f64, hi: f64, arity: usize) -> Self {
        self.bounds = vec![(lo, hi); arity];
        self
    }

    fn validate(&self, arity: usize) -> Result<()> {
        if self.starts < 1 {
            return Err(Error::InvalidArgument("starts must be >= 1".into()));
        }
        if !(self.tol_f > 0.0) {
            return Err(Error::InvalidArgument("tol_f must be > 0".into()));
        }
        if self.bounds.len() != arity {
            return Err(Error::InvalidArgument(format!(
                "bounds cover {} parameters, objective has {arity}",
                self.bounds.len()
            )));
        }
        if self.bounds.iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(Error::InvalidArgument("empty box".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_value: f64,
    pub best_params: Vec<f64>,
    pub converged: bool,
    /// Starts whose refined value lies within `tol_f` of the best.
    pub starts_within_tol: usize,
    pub evaluations: u64,
}

struct StartOutcome {
    value: f64,
    params: Vec<f64>,
    evaluations: u64,
}

/// Minimizes `obj` over the configured box.
///
/// `extra_starts` are deterministic start points refined before the random
/// multi-start batch (parametrization-specific warm starts). Reports
/// `converged` when at least three starts agree within `tol_f`.
pub fn minimize(obj: &Objective, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    minimize_with_starts(obj, cfg, &[])
}

pub fn minimize_with_starts(
    obj: &Objective,
    cfg: &OptimizerConfig,
    extra_starts: &[Vec<f64>],
) -> Result<OptimizationResult> {
    cfg.validate(obj.arity())?;
    for s in extra_starts {
        if s.len() != obj.arity() {
            return Err(Error::InvalidArgument(
                "structured start has wrong arity".into(),
            ));
        }
    }
    let total = extra_starts.len() + cfg.starts;
    let outcomes: Vec<StartOutcome> = exec::map_indexed(total, |idx| {
        let x0 = if idx < extra_starts.len() {
            clamp_into(&extra_starts[idx], &cfg.bounds)
        } else {
            let mut rng = stream_rng(cfg.seed, (idx - extra_starts.len()) as u64);
            cfg.bounds
                .iter()
                .map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect()
        };
        run_single_start(obj, cfg, x0)
    });

    let mut best_idx = None;
    let mut evaluations = 0u64;
    for (i, o) in outcomes.iter().enumerate() {
        evaluations += o.evaluations;
        let better = match best_idx {
            None => o.value.is_finite(),
            Some(b) => o.value < outcomes[b as usize].value,
        };
        if better {
            best_idx = Some(i as u64);
        }
    }
    let Some(best_idx) = best_idx else {
        return Err(Error::Infeasible(
            "objective returned +inf at every start".into(),
        ));
    };
    let best = &outcomes[best_idx as usize];
    let starts_within_tol = outcomes
        .iter()
        .filter(|o| o.value.is_finite() && o.value <= best.value + cfg.tol_f)
        .count();
    Ok(OptimizationResult {
        best_value: best.value,
        best_params: best.params.clone(),
        converged: starts_within_tol >= 3,
        starts_within_tol,
        evaluations,
    })
}

fn clamp_into(x: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    x.iter()
        .zip(bounds)
        .map(|(&v, &(lo, hi))| v.clamp(lo, hi))
        .collect()
}

fn run_single_start(obj: &Objective, cfg: &OptimizerConfig, x0: Vec<f64>) -> StartOutcome {
    let mut evals = 0u64;
    // multi-scale restarts: a fresh simplex around the incumbent escapes the
    // premature collapse Nelder-Mead is prone to in higher dimensions
    let mut best = nelder_mead(obj, cfg, x0, 0.10, &mut evals);
    for frac in [0.02, 0.004, 0.0008, 0.00016] {
        if !best.0.is_finite() {
            break;
        }
        let run = nelder_mead(obj, cfg, best.1.clone(), frac, &mut evals);
        if run.0 < best.0 {
            best = run;
        }
    }
    StartOutcome { value: best.0, params: best.1, evaluations: evals }
}

/// Bounded Nelder-Mead. `step_frac` scales the initial simplex relative to
/// box width. Candidate points are clamped into the box before evaluation.
fn nelder_mead(
    obj: &Objective,
    cfg: &OptimizerConfig,
    x0: Vec<f64>,
    step_frac: f64,
    evals: &mut u64,
) -> (f64, Vec<f64>) {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const BETA: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink
    let n = obj.arity();
    let bounds = &cfg.bounds;
    let spread_tol = (cfg.tol_f * 1e-2).max(1e-15);

    let mut eval = |x: &[f64]| {
        *evals += 1;
        obj.eval(x)
    };

    if n == 0 {
        let v = eval(&x0);
        return (v, x0);
    }

    // initial simplex: x0 plus one perturbed vertex per axis
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
    let v0 = eval(&x0);
    simplex.push((v0, x0.clone()));
    for i in 0..n {
        let (lo, hi) = bounds[i];
        let step = step_frac * (hi - lo);
        let mut x = x0.clone();
        x[i] = if x[i] + step <= hi { x[i] + step } else { x[i] - step };
        let v = eval(&x);
        simplex.push((v, x));
    }

    for _ in 0..cfg.max_iters {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        let best = simplex[0].0;
        let worst = simplex[n].0;
        if worst.is_finite() && (worst - best).abs() <= spread_tol {
            break;
        }

        // centroid of all but the worst vertex
        let mut centroid = vec![0.0; n];
        for (_, x) in simplex.iter().take(n) {
            for (c, &xi) in centroid.iter_mut().zip(x) {
                *c += xi;
            }
        }
        for c in &mut centroid {
            *c /= n as f64;
        }

        let worst_x = simplex[n].1.clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst_x)
            .map(|(&c, &w)| c + ALPHA * (c - w))
            .collect();
        let reflect = clamp_into(&reflect, bounds);
        let fr = eval(&reflect);

        if fr < simplex[0].0 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&worst_x)
                .map(|(&c, &w)| c + GAMMA * ALPHA * (c - w))
                .collect();
            let expand = clamp_into(&expand, bounds);
            let fe = eval(&expand);
            simplex[n] = if fe < fr { (fe, expand) } else { (fr, reflect) };
            continue;
        }
        if fr < simplex[n - 1].0 {
            simplex[n] = (fr, reflect);
            continue;
        }
        // contraction (outside when the reflection improved on the worst)
        let towards: &[f64] = if fr < simplex[n].0 { &reflect } else { &worst_x };
        let contract: Vec<f64> = centroid
            .iter()
            .zip(towards)
            .map(|(&c, &t)| c + BETA * (t - c))
            .collect();
        let contract = clamp_into(&contract, bounds);
        let fc = eval(&contract);
        if fc < simplex[n].0.min(fr) {
            simplex[n] = (fc, contract);
            continue;
        }
        // shrink towards the best vertex
        let best_x = simplex[0].1.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = best_x
                .iter()
                .zip(&vertex.1)
                .map(|(&b, &x)| b + SIGMA * (x - b))
                .collect();
            let v = eval(&x);
            *vertex = (v, x);
        }
    }
    simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
    simplex.swap_remove(0).into()
}

/// Exhaustive evaluation over the box grid with the given step per axis;
/// the independent brute-force oracle for small arities.
pub fn grid_oracle(
    obj: &Objective,
    bounds: &[(f64, f64)],
    step_per_axis: &[f64],
) -> Result<OptimizationResult> {
    let n = obj.arity();
    if n > 4 {
        return Err(Error::InvalidArgument(format!(
            "grid oracle supports arity <= 4, got {n}"
        )));
    }
    if bounds.len() != n || step_per_axis.len() != n {
        return Err(Error::InvalidArgument("bounds/steps must match arity".into()));
    }
    if bounds.iter().any(|(lo, hi)| !(lo < hi)) {
        return Err(Error::InvalidArgument("empty box".into()));
    }
    if step_per_axis.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    let counts: Vec<usize> = bounds
        .iter()
        .zip(step_per_axis)
        .map(|(&(lo, hi), &s)| ((hi - lo) / s).floor() as usize + 1)
        .collect();
    let total: usize = counts.iter().product();
    let outer = counts[0];
    let inner: usize = total / outer;

    let slice_minima: Vec<(f64, Vec<f64>)> = exec::map_indexed(outer, |i0| {
        let mut best = (f64::INFINITY, vec![0.0; n]);
        let mut x = vec![0.0; n];
        x[0] = bounds[0].0 + i0 as f64 * step_per_axis[0];
        for flat in 0..inner {
            let mut rem = flat;
            for axis in (1..n).rev() {
                x[axis] = bounds[axis].0 + (rem % counts[axis]) as f64 * step_per_axis[axis];
                rem /= counts[axis];
            }
            let v = obj.eval(&x);
            if v < best.0 {
                best = (v, x.clone());
            }
        }
        best
    });
    let mut best = (f64::INFINITY, vec![0.0; n.max(1)]);
    for s in slice_minima {
        if s.0 < best.0 {
            best = s;
        }
    }
    if !best.0.is_finite() {
        return Err(Error::Infeasible("grid found no finite value".into()));
    }
    Ok(OptimizationResult {
        best_value: best.0,
        best_params: best.1,
        converged: true,
        starts_within_tol: 1,
        evaluations: total as u64,
    })
}

/// Result of the alternating product-state maximization.
#[derive(Debug, Clone)]
pub struct SeesawResult {
    pub best_value: f64,
    pub vec_a: CVector,
    pub vec_b: CVector,
    pub iterations: u64,
    pub starts_within_tol: usize,
    pub converged: bool,
}

/// Maximizes `<a x b| O |a x b>` over product pure states by alternating
/// exact top-eigenvector updates of the two blocks.
///
/// The objective sequence is nondecreasing at every half-step (each update is
/// an exact block maximizer). Multi-start: every computational basis vector
/// of B plus `cfg.starts` random B-side starts.
pub fn seesaw_product(
    op: &CMatrix,
    dim_a: usize,
    dim_b: usize,
    cfg: &OptimizerConfig,
) -> Result<SeesawResult> {
    if op.nrows() != dim_a * dim_b || op.ncols() != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {}",
            op.nrows(),
            op.ncols(),
            dim_a * dim_b
        )));
    }
    if max_abs_diff(op, &op.adjoint()) > 1e-8 {
        return Err(Error::InvalidArgument("operator must be Hermitian".into()));
    }

    let total = dim_b + cfg.starts;
    let runs: Vec<(f64, CVector, CVector, u64)> = exec::map_indexed(total, |idx| {
        let b0 = if idx < dim_b {
            let mut v = CVector::zeros(dim_b);
            v[idx] = crate::qcore::linalg::cplx(1.0, 0.0);
            v
        } else {
            let mut rng = stream_rng(cfg.seed, (idx - dim_b) as u64);
            crate::qcore::random::random_pure_state_with(dim_b, &mut rng)
                .amplitudes()
                .clone()
        };
        seesaw_single(op, dim_a, dim_b, b0, cfg)
    });

    let mut best: Option<&(f64, CVector, CVector, u64)> = None;
    let mut iterations = 0;
    for r in &runs {
        iterations += r.3;
        if best.map_or(true, |b| r.0 > b.0) {
            best = Some(r);
        }
    }
    let best = best.expect("at least one start");
    let starts_within_tol = runs.iter().filter(|r| r.0 >= best.0 - cfg.tol_f).count();
    Ok(SeesawResult {
        best_value: best.0,
        vec_a: best.1.clone(),
        vec_b: best.2.clone(),
        iterations,
        starts_within_tol,
        converged: starts_within_tol >= 3,
    })
}

fn seesaw_single(
    op: &CMatrix,
    dim_a: usize,
    dim_b: usize,
    mut b: CVector,
    cfg: &OptimizerConfig,
) -> (f64, CVector, CVector, u64) {
    let mut a = CVector::zeros(dim_a);
    a[0] = crate::qcore::linalg::cplx(1.0, 0.0);
    let mut value = f64::NEG_INFINITY;
    let mut iters = 0u64;
    for _ in 0..cfg.max_iters {
        iters += 1;
        // exact A update: top eigenvector of M_b
        let mb = CMatrix::from_fn(dim_a, dim_a, |r, c| {
            let mut acc = crate::qcore::linalg::cplx(0.0, 0.0);
            for be in 0..dim_b {
                for bp in 0..dim_b {
                    acc += b[be].conj() * op[(r * dim_b + be, c * dim_b + bp)] * b[bp];
                }
            }
            acc
        });
        let (_, vecs) = hermitian_eigen(&mb);
        a = vecs.column(dim_a - 1).into_owned();
        // exact B update: top eigenvector of M_a
        let ma = CMatrix::from_fn(dim_b, dim_b, |r, c| {
            let mut acc = crate::qcore::linalg::cplx(0.0, 0.0);
            for ae in 0..dim_a {
                for ap in 0..dim_a {
                    acc += a[ae].conj() * op[(ae * dim_b + r, ap * dim_b + c)] * a[ap];
                }
            }
            acc
        });
        let (vals, vecs) = hermitian_eigen(&ma);
        b = vecs.column(dim_b - 1).into_owned();
        let new_value = vals[dim_b - 1];
        if new_value - value <= cfg.tol_f && value.is_finite() {
            value = value.max(new_value);
            break;
        }
        value = new_value;
    }
    (value, a, b, iters)
}
