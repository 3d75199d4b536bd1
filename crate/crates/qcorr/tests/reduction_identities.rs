//! Numeric round trips through the reduction constructions: purification
//! steering realizability, the E_F <-> discord relation, and the
//! E_F <-> constrained-Holevo relation, all with both sides computed by
//! independent optimizer runs.

mod common;

use common::eof_concurrence_oracle;
use qcorr::measurements::{steer_ensemble, steering_measurement_for_isometry, Measurement};
use qcorr::measures::{constrained_holevo, discord, eof, HjwContext, MeasurementKind};
use qcorr::optimize::OptimizerConfig;
use qcorr::qcore::entropy::von_neumann_entropy;
use qcorr::qcore::random::{master_rng, random_bipartite_with, random_separable_with_decomposition};
use qcorr::qcore::state::{purify, Subsystem};
use qcorr::reductions::{eof_to_discord, eof_to_holevo, sep_to_eof, EofInstance, SeparabilityInstance};

fn cfg(seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        starts: 16,
        max_iters: 1200,
        tol_f: 1e-10,
        seed,
        bounds: Vec::new(),
    }
}

#[test]
fn hjw_steering_round_trip() {
    // ensembles from the isometry parametrization are realizable as von
    // Neumann measurements on the purifying system
    let mut rng = master_rng(5);
    for k in [2usize, 3, 4] {
        let st = random_bipartite_with(2, 2, 2, &mut rng).unwrap();
        let ctx = HjwContext::new(st.rho(), k).unwrap();
        let params: Vec<f64> = (0..ctx.arity())
            .map(|i| ((i * 31 + k) as f64 * 0.41).sin())
            .collect();
        let v = ctx.isometry(&params);
        let members = ctx.ensemble_from_isometry(&v);
        let meas = steering_measurement_for_isometry(&v);
        let psi = purify(&st, k).unwrap();
        let steered = steer_ensemble(&psi, &Measurement::VonNeumann(meas)).unwrap();
        // same weights and the same mixture members, up to ordering by weight
        assert_eq!(steered.members.len(), members.len());
        let mut got: Vec<(f64, qcorr::qcore::CMatrix)> = steered
            .members
            .iter()
            .map(|(p, s)| (*p, s.matrix().clone()))
            .collect();
        for (p, vpsi) in &members {
            let proj = vpsi * vpsi.adjoint();
            let pos = got
                .iter()
                .position(|(q, mat)| {
                    (q - p).abs() < 1e-7 && qcorr::qcore::linalg::max_abs_diff(mat, &proj) < 1e-7
                })
                .unwrap_or_else(|| panic!("member with weight {p} not reproduced"));
            got.swap_remove(pos);
        }
    }
}

#[test]
fn koashi_winter_identity_small_battery() {
    let mut rng = master_rng(11);
    for i in 0..6 {
        let st = random_bipartite_with(2, 2, 2, &mut rng).unwrap();
        let c = cfg(200 + i);
        let e_f = eof(&st, Some(4), &c).unwrap().value;
        let psi = purify(&st, 2).unwrap();
        let d_p = discord(&psi.rho_bc(), MeasurementKind::Povm, &c).unwrap().value;
        let s_a = von_neumann_entropy(&st.partial_trace(Subsystem::A));
        let s_ab = von_neumann_entropy(st.rho());
        let residual = (e_f - d_p - s_a + s_ab).abs();
        assert!(residual <= 1e-3, "case {i}: residual {residual}");
        // cross-check the E_F side against the closed-form oracle
        assert!((e_f - eof_concurrence_oracle(&st)).abs() < 1e-4);
    }
}

#[test]
fn bell_discord_instance_at_rank_register() {
    // pure rho_AB with a rank-sized register: the BC carrier has discord
    // S(rho_AB) - S(rho_A) + E_F = 0 + (E_F - S_A) = 0 for the Bell state
    let bell = qcorr::qcore::state::bell_state();
    let inst = EofInstance { state: bell.clone(), threshold: 0.0, gap: 1e-3 };
    let out = eof_to_discord(&inst, Some(1), MeasurementKind::Povm).unwrap();
    let d = discord(&out.state, MeasurementKind::Povm, &cfg(3)).unwrap().value;
    assert!(d.abs() < 1e-7, "D = {d}");
    // threshold shifted to a - S_A + S_AB = -1
    assert!((out.threshold + 1.0).abs() < 1e-9);
}

#[test]
fn separable_chain_yes_instance() {
    let mut rng = master_rng(13);
    let (st, _) = random_separable_with_decomposition(2, 2, 2, &mut rng).unwrap();
    let inst = sep_to_eof(&SeparabilityInstance::new(st.clone(), 0.1).unwrap());
    assert_eq!(inst.threshold, 0.0);
    let c = cfg(17);
    // yes instance: E_F at the threshold
    let e_f = eof(&st, Some(4), &c).unwrap().value;
    assert!(e_f <= 1e-6, "E_F = {e_f}");
    // discord carrier value equals the shifted threshold when E_F = 0
    let disc = eof_to_discord(&inst, Some(st.rho().rank()), MeasurementKind::Povm).unwrap();
    let d = discord(&disc.state, MeasurementKind::Povm, &c).unwrap().value;
    assert!((d - disc.threshold).abs() <= 1e-3, "D {d} vs b {}", disc.threshold);
}

#[test]
fn holevo_identity_small_battery() {
    let mut rng = master_rng(19);
    for i in 0..6 {
        let st = random_bipartite_with(2, 2, 2, &mut rng).unwrap();
        let c = cfg(300 + i);
        let e_f = eof(&st, Some(4), &c).unwrap().value;
        let inst = EofInstance { state: st.clone(), threshold: 0.25, gap: 1e-3 };
        let hol = eof_to_holevo(&inst).unwrap();
        let chi = constrained_holevo(&hol.channel, &hol.input, None, &c).unwrap().value;
        let s_out = von_neumann_entropy(&hol.channel.apply(&hol.input).unwrap());
        let residual = (e_f - s_out + chi).abs();
        assert!(residual <= 1e-3, "case {i}: residual {residual}");
        // threshold arithmetic: c = S(Phi(rho)) - a
        assert!((hol.threshold - (s_out - 0.25)).abs() < 1e-12);
    }
}

#[test]
fn polynomial_scaling_of_reductions() {
    // construction time only (no optimizers): dims 4 -> 36 stay far below a
    // second each, and the emitted instances are well formed
    for (m, n) in [(2usize, 2usize), (2, 3), (3, 3), (4, 4), (6, 6)] {
        let mut rng = master_rng((m * 10 + n) as u64);
        let st = random_bipartite_with(m, n, m * n, &mut rng).unwrap();
        let started = std::time::Instant::now();
        let inst = sep_to_eof(&SeparabilityInstance::new(st.clone(), 0.05).unwrap());
        let hol = eof_to_holevo(&inst).unwrap();
        assert_eq!(hol.channel.dim_in(), st.rho().rank());
        assert_eq!(hol.channel.dim_out(), m);
        if m * n <= 6 {
            // discord carrier at the full paper register only for tiny dims
            let disc = eof_to_discord(&inst, None, MeasurementKind::VonNeumann).unwrap();
            assert_eq!(disc.state.dim_b(), (m * n * m * n).min(m * m * n * n));
        }
        assert!(started.elapsed().as_secs_f64() < 1.0, "{m}x{n} too slow");
    }
}
