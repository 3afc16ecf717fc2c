//! Workflows that cross module boundaries: files to entropies, wavefunctions
//! to ladders, Gaussian states to grid wavefunctions.

use entropic_core::discretize::{
    convergence_ladder, discretize_position, discretized_entropy, momentum_transform, symmetric_grid_start,
    EntropyKind, LadderConfig, Partition, Quadrature,
};
use entropic_core::entropy::{self, Base};
use entropic_core::gaussian::{self, epr_state, epr_wavefunction, fock_cutoff};
use entropic_core::io::{self, State};
use entropic_core::minmax;
use entropic_core::overlap::{self, prolate_top_eigenfunction};
use entropic_core::qstate::GridWaveFunction;
use std::f64::consts::{E, LN_2, PI};

fn gaussian(n: usize, half_width: f64, sigma: f64) -> GridWaveFunction {
    let dq = 2.0 * half_width / n as f64;
    GridWaveFunction::gaussian(symmetric_grid_start(n, dq), dq, n, 0.0, sigma).unwrap()
}

#[test]
fn trine_file_to_entropies() {
    // three symmetric qubit states, equal priors
    let mut outcomes = Vec::new();
    for k in 0..3 {
        let t = 2.0 * PI * k as f64 / 3.0;
        let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
        let re = [[c * c / 3.0, c * s / 3.0], [c * s / 3.0, s * s / 3.0]];
        outcomes.push(serde_json::json!({"label": format!("trine{k}"), "state": {"dim": 2, "re": re}}));
    }
    let text = serde_json::json!({"type": "CQState", "outcomes": outcomes}).to_string();
    let State::Cq(cq) = io::parse_state(&text).unwrap().state else { panic!("not a cq state") };

    // P_guess = 2/3 for the trine ensemble
    let hmin = minmax::h_min_cq(&cq, minmax::DEFAULT_TOL).unwrap();
    assert!((hmin.in_bits() - (1.5f64).log2()).abs() < 1e-6, "{}", hmin.in_bits());
    // the Holevo quantity is one bit, so H(X|B) = log 3 − 1 as well, and
    // σ = 1/2 gives H_max = 2 log(3·√(1/6)); all three collapse
    let hvn = entropy::cond_vn_cq(&cq);
    let hmax = minmax::h_max_cq(&cq, minmax::DEFAULT_TOL).unwrap();
    for h in [hvn, hmax] {
        assert!((h.in_bits() - hmin.in_bits()).abs() < 1e-6, "{}", h.in_bits());
    }
}

#[test]
fn ladder_rungs_order_min_vn_max() {
    let wf = gaussian(1 << 13, 10.0, 0.7);
    let cfg = LadderConfig { n_max: 6, ..LadderConfig::default() };
    let run = |kind| convergence_ladder(&wf, Quadrature::Position, kind, cfg).unwrap();
    let (min, vn, max) = (run(EntropyKind::Min), run(EntropyKind::Vn), run(EntropyKind::Max));
    for ((a, b), c) in min.rows.iter().zip(&vn.rows).zip(&max.rows) {
        assert!(a.regularized <= b.regularized + 1e-12 && b.regularized <= c.regularized + 1e-12);
    }
    assert!(min.monotone && max.monotone);
}

#[test]
fn position_and_momentum_ladders_saturate_the_vn_relation() {
    // dq = 80/2^15 resolves the position ladder; a wide grid with
    // dp = 2π/2048 resolves the momentum ladder
    let n = 1 << 15;
    let cfg = LadderConfig { n_max: 7, ..LadderConfig::default() };
    let q = convergence_ladder(&gaussian(n, 40.0, 1.0), Quadrature::Position, EntropyKind::Vn, cfg).unwrap();
    let p = convergence_ladder(&gaussian(n, 1024.0, 1.0), Quadrature::Momentum, EntropyKind::Vn, cfg).unwrap();
    let hq = q.rows.last().unwrap().regularized;
    let hp = p.rows.last().unwrap().regularized;
    assert!(((hq + hp) / LN_2 - (E * PI).log2()).abs() < 2e-3, "{}", (hq + hp) / LN_2);
}

#[test]
fn epr_grid_state_matches_covariance_description() {
    let nu = 2.5;
    let n = 4096;
    let dq = 24.0 / n as f64;
    let wf = epr_wavefunction(nu, symmetric_grid_start(n, dq), dq, n, fock_cutoff(nu, 1e-14).unwrap()).unwrap();
    // memory marginal entropy equals the Gaussian entropy of mode B
    let h_grid = entropy::vn_raw(&wf.memory_state());
    let h_cov = epr_state(nu).unwrap().marginal(&[1]).unwrap().vn_entropy().in_nats();
    assert!((h_grid - h_cov).abs() < 1e-9, "{h_grid} vs {h_cov}");
    // and h(Q) of the grid density equals ½ log(πeν)
    let (_, hq, _) = entropic_core::discretize::differential_entropies(&wf).unwrap();
    let exact = gaussian::epr_conditional_entropies(nu).unwrap().h_p;
    assert!((hq.in_nats() - exact).abs() < 1e-6);
}

#[test]
fn prolate_state_saturates_the_minmax_relation_at_several_widths() {
    for delta in [0.75, 1.0, 1.5] {
        let ef = prolate_top_eigenfunction(delta, delta, overlap::START_ORDER).unwrap();
        let n = 4096;
        let dq = delta / 64.0;
        let wf = ef.on_grid(symmetric_grid_start(n, dq), dq, n).unwrap();
        let half = n as f64 * dq / 2.0;
        let pq = Partition::centered(delta, -half, half).unwrap();
        let hq = discretized_entropy(&discretize_position(&wf, &pq).unwrap(), EntropyKind::Max, 1e-7).unwrap();
        let pw = momentum_transform(&wf).unwrap().wavefunction;
        let lo = pw.point(0) - pw.dq;
        let pp = Partition::centered(delta, lo, -lo).unwrap();
        let hp = discretized_entropy(&discretize_position(&pw, &pp).unwrap(), EntropyKind::Min, 1e-7).unwrap();
        assert!(hq.abs() < 1e-12);
        let sum = Base::Bits.from_nats(hq + hp);
        let bound = -ef.eigenvalue.log2();
        assert!((sum - bound).abs() < 1e-3, "δ = {delta}: {sum} vs {bound}");
    }
}
