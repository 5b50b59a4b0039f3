use placekit::exec_prob::ConstantRho;
use placekit::market::{MarketParams, PriceModel};
use placekit::numerics::{gamma_q, integrate_detailed, QuadratureSpec};
use placekit::placement::bm::{cost_bm, optimal_x_bm};
use placekit::placement::gbm::cost_gbm;
use placekit::rho::*;
use placekit::sim::*;

fn market(mu: f64, sigma: f64, r: f64, f: f64) -> MarketParams {
    MarketParams::new(mu, sigma, 50.0, r, f).unwrap()
}

#[test]
fn driftless_cost_matches_closed_form() {
    let p = market(0.0, 0.2, 0.003, 0.003);
    let rho = ConstantRho::new(0.7).unwrap();
    for x in [0.01, 0.05, 0.2] {
        let e =
            simulate_cost_continuous(&p, &rho, PriceModel::Bachelier, x, 0.05, &SimConfig::new(100_000, 1)).unwrap();
        let exact = cost_bm(&p, &rho, x, 0.05).unwrap();
        assert!(e.within(exact, 3.0), "x {x}: {e:?} vs {exact}");
    }
}

#[test]
fn drifting_costs_match_closed_forms() {
    let p = market(-0.25, 0.2, 0.003, 0.003);
    let rho = ConstantRho::new(0.7).unwrap();
    let cfg = SimConfig::new(100_000, 2);
    let e = simulate_cost_continuous(&p, &rho, PriceModel::Bachelier, 0.02, 0.05, &cfg).unwrap();
    assert!(e.within(cost_bm(&p, &rho, 0.02, 0.05).unwrap(), 3.0));
    let e = simulate_cost_continuous(&p, &rho, PriceModel::BlackScholes, 0.0004, 0.05, &cfg).unwrap();
    assert!(e.within(cost_gbm(&p, &rho, 0.0004, 0.05).unwrap(), 3.0), "{e:?}");
}

#[test]
fn unreachable_level_costs_drift_plus_fee() {
    let p = market(-0.25, 0.2, 0.003, 0.003);
    let rho = ConstantRho::new(0.7).unwrap();
    let e = simulate_cost_continuous(&p, &rho, PriceModel::Bachelier, 50.0, 0.05, &SimConfig::new(50_000, 3)).unwrap();
    assert!(e.within(-0.25 * 0.05 + 0.003, 3.0), "{e:?}");
}

#[test]
fn simulated_cost_curve_has_the_same_minimizer() {
    // drift giving a critical time of 0.0284 with (r+f)ρ = 0.006, σ = 0.2
    let p = market(-0.1, 0.2, 0.003, 0.003);
    let rho = ConstantRho::new(1.0).unwrap();
    let t = 0.0384;
    let step = 0.005;
    let grid: Vec<f64> = (1..=10).map(|k| k as f64 * step).collect();
    let cfg = SimConfig::new(400_000, 11).with_antithetic(true);
    let costs: Vec<f64> = grid
        .iter()
        .map(|&x| {
            simulate_cost_continuous(&p, &rho, PriceModel::Bachelier, x, t, &cfg)
                .unwrap()
                .mean
        })
        .collect();
    let best = grid[costs.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0];
    let x_star = optimal_x_bm(&p, &rho, t).unwrap().depth;
    assert!((best - x_star).abs() <= step, "grid minimizer {best} vs {x_star}");
}

#[test]
fn bridge_hit_probability_matches_closed_form() {
    let p = market(-0.25, 0.2, 0.0, 0.0);
    let h = HittingModel::new(PriceModel::Bachelier, p).unwrap();
    for (x, t) in [(0.05, 0.1), (0.02, 0.05), (0.3, 1.0)] {
        let e = simulate_hit_probability(&p, PriceModel::Bachelier, x, t, &SimConfig::new(100_000, 4)).unwrap();
        let exact = h.hit_probability(x, t);
        assert!(e.within(exact, 3.0), "({x},{t}): {e:?} vs {exact}");
    }
}

#[test]
fn hitting_times_follow_the_conditional_law() {
    for kind in [PriceModel::Bachelier, PriceModel::BlackScholes] {
        let h = HittingModel::new(kind, market(-0.25, 0.2, 0.0, 0.0)).unwrap();
        let (x, t) = (0.05, 0.1);
        let mut s = sample_hitting_times(&h, x, t, 1_000_000, 9, 100).unwrap();
        s.sort_by(f64::total_cmp);
        let ln_total = h.ln_hit_probability(x, t);
        let n = s.len() as f64;
        let ks = s
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let cdf = (h.ln_hit_probability(x, v) - ln_total).exp();
                (cdf - k as f64 / n).abs().max((cdf - (k + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks <= 0.01, "{kind:?}: KS distance {ks}");
    }
}

#[test]
fn antithetic_pairs_reduce_the_standard_error() {
    let p = market(-0.25, 0.2, 0.003, 0.003);
    let rho = ConstantRho::new(0.7).unwrap();
    let wins = (0..30u64)
        .filter(|&rep| {
            let plain = SimConfig::new(20_000, 100 + rep);
            let anti = plain.with_antithetic(true);
            let a = simulate_cost_continuous(&p, &rho, PriceModel::Bachelier, 0.02, 0.05, &plain).unwrap();
            let b = simulate_cost_continuous(&p, &rho, PriceModel::Bachelier, 0.02, 0.05, &anti).unwrap();
            b.std_error <= a.std_error
        })
        .count();
    assert!(wins >= 29, "antithetic won {wins} of 30");
}

#[test]
fn estimates_are_reproducible_across_thread_counts() {
    let p = market(-0.25, 0.2, 0.003, 0.003);
    let rho = ConstantRho::new(0.7).unwrap();
    let cfg = SimConfig::new(10_000, 42).with_antithetic(true);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_cost_continuous(&p, &rho, PriceModel::Bachelier, 0.02, 0.05, &cfg).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    let q = QueueModel::reference();
    let x = simulate_queue_race(&q, 5.0, 6, 2, &SimConfig::new(5_000, 8)).unwrap();
    let y = simulate_queue_race(&q, 5.0, 6, 2, &SimConfig::new(5_000, 8)).unwrap();
    assert_eq!(x, y);
}

#[test]
fn tick_model_converges_to_the_continuous_cost() {
    let p = market(-0.25, 0.2, 0.0, 0.0);
    let rho = ConstantRho::new(0.7).unwrap();
    let (x, t) = (0.08, 1.0);
    let target = cost_bm(&p, &rho, x, t).unwrap();
    let continuous =
        simulate_cost_continuous(&p, &rho, PriceModel::Bachelier, x, t, &SimConfig::new(100_000, 6)).unwrap();
    assert!(continuous.within(target, 3.0));
    let gaps: Vec<f64> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&eps| {
            let delta = eps * eps / (0.2 * 0.2);
            let e = simulate_cost_discrete(
                &p,
                &rho,
                PriceModel::Bachelier,
                x,
                t,
                delta,
                eps,
                &SimConfig::new(100_000, 5),
            )
            .unwrap();
            (e.mean - continuous.mean).abs()
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}

#[test]
fn certain_fill_at_the_best_bid_costs_one_tick() {
    let p = market(-0.25, 0.2, 0.0, 0.0);
    let rho = ConstantRho::new(1.0).unwrap();
    let e = simulate_cost_discrete(
        &p,
        &rho,
        PriceModel::Bachelier,
        0.01,
        1.0,
        0.0025,
        0.01,
        &SimConfig::new(1000, 1),
    )
    .unwrap();
    assert_eq!(e.mean, -0.01);
    assert_eq!(e.std_error, 0.0);
}

#[test]
fn unfilled_orders_can_rebound() {
    let p = market(-0.25, 0.2, 0.0, 0.0);
    let rho = ConstantRho::new(0.5).unwrap();
    let c = simulate_discrete_cases(
        &p,
        &rho,
        PriceModel::Bachelier,
        0.03,
        1.0,
        0.0025,
        0.01,
        &SimConfig::new(20_000, 2),
    )
    .unwrap();
    assert!(c.rebound > 0 && c.filled > 0 && c.not_reached > 0, "{c:?}");
    assert_eq!(c.rebound + c.filled + c.not_reached + c.stalled, 20_000);
}

#[test]
fn tick_geometry_is_validated() {
    let p = market(-0.25, 0.2, 0.0, 0.0);
    let rho = ConstantRho::new(0.5).unwrap();
    let cfg = SimConfig::new(10, 1);
    assert!(simulate_cost_discrete(&p, &rho, PriceModel::Bachelier, 0.015, 1.0, 0.01, 0.01, &cfg).is_err());
    assert!(simulate_cost_discrete(&p, &rho, PriceModel::Bachelier, 0.02, 1.0, 0.0, 0.01, &cfg).is_err());
}

#[test]
fn queue_race_matches_quadrature() {
    let q = QueueModel::reference();
    assert_eq!(
        simulate_queue_race(&q, 0.0, 6, 1, &SimConfig::new(100, 1))
            .unwrap()
            .mean,
        0.0
    );
    for i in [1u32, 6, 38] {
        for l in [1u32, 6, 38] {
            let e = simulate_queue_race(&q, 30.0, i, l, &SimConfig::new(100_000, (i * 100 + l) as u64)).unwrap();
            let exact = alpha_race(&q, 30.0, i, l).unwrap();
            assert!(e.within(exact, 3.0), "({i},{l}): {e:?} vs {exact}");
        }
    }
}

#[test]
fn ask_defect_matches_queue_simulation() {
    let q = QueueModel::reference();
    for i in [1u32, 3] {
        let defect = 1.0 - ask_depletion_mass(&q, i).unwrap();
        let emptied = simulate_ask_depletion(&q, i, 150.0, &SimConfig::new(20_000, 12 + i as u64)).unwrap();
        assert!(
            ((1.0 - emptied.mean) - defect).abs() <= 0.005,
            "i {i}: {emptied:?} vs defect {defect}"
        );
    }
}

#[test]
fn race_without_ask_arrivals_matches_two_gamma_integral() {
    let q = QueueModel {
        lambda_a: 0.0,
        ..QueueModel::reference()
    };
    for (i, l, u) in [(3u32, 2u32, 1.0), (6, 6, 0.5)] {
        let oracle = integrate_detailed(
            |s| depletion_density_bid(&q, l, s) * gamma_q(i, q.dep_a * s),
            &[0.0, 0.1, u],
            &QuadratureSpec::default(),
        )
        .unwrap()
        .value;
        let quad = alpha_race(&q, u, i, l).unwrap();
        assert!((quad - oracle).abs() < 1e-8, "{quad} vs {oracle}");
        let e = simulate_queue_race(&q, u, i, l, &SimConfig::new(100_000, 14)).unwrap();
        assert!(e.within(oracle, 3.0), "{e:?} vs {oracle}");
    }
}

#[test]
fn execution_probability_matches_discrete_event_simulation() {
    let h = HittingModel::new(PriceModel::Bachelier, market(0.0, 0.2, 0.0, 0.0)).unwrap();
    let (x, t) = (0.05, 2.0);
    for profile in [vec![], vec![0, 0, 0, 0, 10]] {
        let q = QueueModel {
            depth_profile: profile,
            ..QueueModel::reference()
        };
        let engine = RhoEngine::new(q.clone(), h, t).unwrap();
        let exact = engine.rho(x, t).unwrap();
        let e = simulate_rho(&q, &h, x, t, &SimConfig::new(100_000, 21)).unwrap();
        assert!(e.within(exact, 3.0), "{:?}: {e:?} vs {exact}", q.depth_profile);
    }
}

#[test]
fn best_bid_probability_matches_simulation() {
    let h = HittingModel::new(PriceModel::Bachelier, market(0.0, 0.2, 0.0, 0.0)).unwrap();
    let q = QueueModel {
        best_ask: Some(6),
        depth_profile: vec![38],
        ..QueueModel::reference()
    };
    let exact = rho_0plus_of_t(&q, 5.0, 6, 38).unwrap();
    let e = simulate_rho(&q, &h, 0.01, 5.0, &SimConfig::new(100_000, 22)).unwrap();
    assert!(e.within(exact, 3.0), "{e:?} vs {exact}");
    let again = simulate_rho(&q, &h, 0.01, 5.0, &SimConfig::new(100_000, 22)).unwrap();
    assert_eq!(e, again);
}
