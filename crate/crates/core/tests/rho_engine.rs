use std::sync::Arc;

use placekit::exec_prob::{ConstantRho, ExecProbability};
use placekit::market::{MarketParams, PriceModel};
use placekit::numerics::{integrate_detailed, integrate_to_infinity, QuadratureSpec};
use placekit::rho::*;
use proptest::prelude::*;

fn bm_hitting() -> HittingModel {
    HittingModel::new(
        PriceModel::Bachelier,
        MarketParams::new(0.0, 0.2, 50.0, 0.003, 0.003).unwrap(),
    )
    .unwrap()
}

fn gbm_hitting() -> HittingModel {
    HittingModel::new(
        PriceModel::BlackScholes,
        MarketParams::new(0.0, 0.004, 50.0, 0.003, 0.003).unwrap(),
    )
    .unwrap()
}

fn with_profile(profile: Vec<u32>) -> QueueModel {
    QueueModel {
        depth_profile: profile,
        ..QueueModel::reference()
    }
}

#[test]
fn bid_density_starts_at_depletion_rate_and_normalizes() {
    let q = QueueModel::reference();
    assert_eq!(depletion_density_bid(&q, 1, 0.0), 18.68);
    let spec = QuadratureSpec::default();
    for ell in [1u32, 5, 38] {
        let total = integrate_to_infinity(|s| depletion_density_bid(&q, ell, s), 0.0, &spec).unwrap();
        assert!((total - 1.0).abs() < 1e-8, "ell {ell}: {total}");
    }
}

#[test]
fn ask_density_is_defective_with_the_right_mass() {
    let q = QueueModel::reference();
    for i in [1u32, 2, 6, 20] {
        let mass = ask_depletion_mass(&q, i).unwrap();
        let exact = (19.32f64 / 21.78).powi(i as i32);
        assert!(mass <= 1.0);
        assert!((mass - exact).abs() < 1e-7, "i {i}: {mass} vs {exact}");
    }
    // balanced and depleting queues empty almost surely
    let mut fast = q.clone();
    fast.dep_a = 30.0;
    assert!((ask_depletion_mass(&fast, 3).unwrap() - 1.0).abs() < 1e-7);
}

#[test]
fn ask_density_without_arrivals_is_erlang() {
    let mut q = QueueModel::reference();
    q.lambda_a = 0.0;
    let v = depletion_density_ask(&q, 3, 0.2).unwrap();
    let d: f64 = 19.32;
    let expect = d.powi(3) * 0.04 * (-d * 0.2).exp() / 2.0;
    assert!((v - expect).abs() < 1e-12 * expect);
}

#[test]
fn race_at_zero_horizon_is_zero() {
    let q = QueueModel::reference();
    assert_eq!(alpha_race(&q, 0.0, 6, 1).unwrap(), 0.0);
    assert_eq!(rho_0plus_of_t(&q, 0.0, 6, 1).unwrap(), 0.0);
}

#[test]
fn race_is_monotone_in_queue_sizes() {
    let q = QueueModel::reference();
    let sizes = [1u32, 3, 6, 12, 25];
    let grid: Vec<Vec<f64>> = sizes
        .iter()
        .map(|&i| sizes.iter().map(|&l| alpha_race(&q, 30.0, i, l).unwrap()).collect())
        .collect();
    for a in 0..5 {
        for b in 0..5 {
            if a + 1 < 5 {
                assert!(grid[a + 1][b] >= grid[a][b] - 1e-12, "not increasing in i");
            }
            if b + 1 < 5 {
                assert!(grid[a][b + 1] <= grid[a][b] + 1e-12, "not decreasing in ell");
            }
        }
    }
}

#[test]
fn race_limit_ratio_matches_critical_time_ratio() {
    let q = QueueModel::reference();
    let ratio = alpha_infinity(&q, 6, 39).unwrap() / alpha_infinity(&q, 6, 2).unwrap();
    assert!((ratio - 64.0 / 96.0).abs() <= 0.15, "{ratio}");
}

#[test]
fn race_limit_agrees_with_long_finite_horizon() {
    let q = QueueModel::reference();
    for (i, l) in [(1u32, 1u32), (6, 2), (6, 39)] {
        let a = alpha_infinity(&q, i, l).unwrap();
        let b = alpha_race(&q, 200.0, i, l).unwrap();
        assert!((a - b).abs() < 1e-7, "({i},{l}): {a} vs {b}");
    }
}

#[test]
fn best_bid_limit_decreases_with_queue_position() {
    let q = QueueModel::reference();
    let pmf = q.refill_pmf(REFILL_TAIL);
    let v: Vec<f64> = [1u32, 10, 100]
        .iter()
        .map(|&l| rho_limit_0plus(&q, &pmf, l).unwrap())
        .collect();
    assert!(v[0] > v[1] && v[1] > v[2], "{v:?}");
    assert!(v[2] < 0.5);
}

#[test]
fn best_bid_limit_tends_to_one_as_bid_depletes_faster() {
    let mut q = QueueModel::reference();
    let mut last = 0.0;
    for dep_b in [18.68, 100.0, 1000.0, 10000.0] {
        q.dep_b = dep_b;
        let v = rho_limit_0plus(&q, &fixed_refill(6), 1).unwrap();
        assert!(v > last);
        last = v;
    }
    assert!(last > 0.999, "{last}");
}

#[test]
fn best_bid_limit_with_mean_six_refill() {
    let q = QueueModel::reference();
    let v = rho_limit_0plus(&q, &q.refill_pmf(REFILL_TAIL), 1).unwrap();
    assert!((v - 0.87).abs() <= 0.05, "{v}");
}

#[test]
fn cancellation_distribution() {
    let mut q = with_profile(vec![0, 0, 3]);
    q.theta = vec![0.5];
    let p: Vec<f64> = (0..=3).map(|j| cancellations_ahead(&q, 3, 4.0, j).unwrap()).collect();
    let e = (-2.0f64).exp();
    let expect = [e, 2.0 * e, 2.0 * e, 1.0 - 5.0 * e];
    for (a, b) in p.iter().zip(expect) {
        assert!((a - b).abs() < 1e-14);
    }
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    assert!(cancellations_ahead(&q, 3, 4.0, 4).is_err());
    q.theta = vec![0.0];
    assert_eq!(cancellations_ahead(&q, 3, 4.0, 0).unwrap(), 1.0);
    assert_eq!(cancellations_ahead(&q, 3, 4.0, 2).unwrap(), 0.0);
}

#[test]
fn table_matches_direct_race_quadrature() {
    let q = QueueModel::reference();
    let table = AlphaTable::new(&q, 61.0, 40).unwrap();
    let support = q.refill_support(REFILL_TAIL);
    for ell in [1u32, 2, 39] {
        for u in [0.001, 0.02, 0.4, 3.0, 60.0] {
            let direct: f64 = support
                .iter()
                .map(|&(i, f)| f * alpha_race(&q, u, i, ell).unwrap())
                .sum();
            let tab = table.alpha(ell, u).unwrap();
            assert!((tab - direct).abs() < 1e-6, "ell {ell}, u {u}: {tab} vs {direct}");
        }
    }
}

#[test]
fn empty_queue_reduces_to_single_race_integral() {
    // fixed refill collapses the size mixture; oracle integrates the direct race
    let q = QueueModel {
        f_a: fixed_refill(6),
        ..QueueModel::reference()
    };
    let h = bm_hitting();
    let engine = RhoEngine::new(q.clone(), h, 10.0).unwrap();
    let (x, t) = (0.5, 10.0);
    let oracle = integrate_detailed(
        |s| {
            if s <= 0.0 || s >= t {
                return 0.0;
            }
            hitting_density(&h, x, t, s).unwrap() * alpha_race(&q, t - s, 6, 1).unwrap()
        },
        &[0.0, 0.5, 2.0, 9.0, t],
        &QuadratureSpec::new(1e-9, 1e-7, 500).unwrap(),
    )
    .unwrap()
    .value;
    let got = engine.rho(x, t).unwrap();
    assert!((got - oracle).abs() < 1e-6, "{got} vs {oracle}");
}

#[test]
fn deeper_queue_lowers_execution_probability() {
    for h in [bm_hitting(), gbm_hitting()] {
        let x = h.model_depth(0.1).unwrap();
        let mut last = f64::INFINITY;
        for qb in [0u32, 1, 10, 38, 50, 100] {
            let mut profile = vec![0; 10];
            profile[9] = qb;
            let v = RhoEngine::new(with_profile(profile), h, 60.0)
                .unwrap()
                .rho(x, 60.0)
                .unwrap();
            assert!(v < last, "Q = {qb}: {v} !< {last}");
            last = v;
        }
    }
}

#[test]
fn execution_probability_flattens_in_time() {
    for h in [bm_hitting(), gbm_hitting()] {
        let x = h.model_depth(0.1).unwrap();
        for qb in [0u32, 1, 10, 38, 50, 100] {
            let mut profile = vec![0; 10];
            profile[9] = qb;
            let e = RhoEngine::new(with_profile(profile), h, 120.0).unwrap();
            for t in [30.0, 60.0] {
                let d = (e.rho(x, t).unwrap() - e.rho(x, 2.0 * t).unwrap()).abs();
                assert!(d <= 0.02, "Q {qb}, t {t}: {d}");
            }
        }
    }
}

#[test]
fn best_bid_race_saturates_within_seconds() {
    let q = QueueModel::reference();
    for qb in [1u32, 6, 38] {
        let a = rho_0plus_of_t(&q, 10.0, 6, qb).unwrap();
        let b = rho_0plus_of_t(&q, 60.0, 6, qb).unwrap();
        assert!((a - b).abs() <= 0.02 * b, "qb {qb}: {a} vs {b}");
    }
    assert!(rho_0plus_of_t(&q, 60.0, 6, 38).unwrap() < rho_0plus_of_t(&q, 60.0, 6, 1).unwrap());
}

#[test]
fn tail_condition_probe() {
    let q = QueueModel::reference();
    let h = bm_hitting();
    let engine = Arc::new(RhoEngine::new(q.clone(), h, 60.0).unwrap());
    let rho = QueueRho::new(engine);
    let report = condition_probe(&rho, &h, &q, 60.0, &ProbeOptions::default());
    let bound = 2.0 * 18.68 * 0.04 * 3600.0;
    assert!((report.tail_bound - bound).abs() < 1e-9);
    assert!(
        report.tail_at_ceiling >= 0.9 * bound,
        "{} vs {bound}",
        report.tail_at_ceiling
    );
    assert!(report.slope_at_ceiling.abs() <= 1e-4, "{}", report.slope_at_ceiling);
}

#[test]
fn gap_proxy_is_positive_after_a_few_seconds() {
    let h = gbm_hitting();
    for (qa, q1, q2) in [(6u32, 38u32, 10u32), (3, 10, 20), (6, 38, 1)] {
        let q = QueueModel {
            best_ask: Some(qa),
            depth_profile: vec![q1, q2],
            ..QueueModel::reference()
        };
        let engine = Arc::new(RhoEngine::new(q.clone(), h, 90.0).unwrap());
        let rho = QueueRho::new(engine);
        let opts = ProbeOptions {
            ceiling: Some(1.0),
            points: 4,
        };
        for t in [5.0, 10.0, 30.0, 60.0, 90.0] {
            let report = condition_probe(&rho, &h, &q, t, &opts);
            assert!(report.d_proxy > 0.0, "({qa},{q1},{q2}) t {t}: {}", report.d_proxy);
        }
    }
}

#[test]
fn constant_probability_has_flat_probe() {
    let q = QueueModel::reference();
    let h = bm_hitting();
    let report = condition_probe(&ConstantRho::new(0.8).unwrap(), &h, &q, 60.0, &ProbeOptions::default());
    assert!(report.points.iter().all(|p| p.slope == 0.0));
    assert_eq!(report.max_abs_slope, 0.0);
}

#[test]
fn queue_backed_partials_are_consistent() {
    let q = with_profile(vec![0, 2, 4, 4, 4]);
    let h = bm_hitting();
    let rho = QueueRho::new(Arc::new(RhoEngine::new(q, h, 10.0).unwrap()));
    assert!((rho.rho0() - rho.value(0.0, 10.0)).abs() < 1e-5);
    let d = rho.d_depth(0.5, 5.0);
    let fd = (rho.value(0.51, 5.0) - rho.value(0.49, 5.0)) / 0.02;
    assert!((d - fd).abs() < 1e-12);
    assert!(rho.d_time(0.5, 5.0).is_finite());
    assert!(rho.d2_time_depth(0.5, 9.99).is_finite());
}

#[test]
fn queries_beyond_the_horizon_are_rejected() {
    let e = RhoEngine::new(QueueModel::reference(), bm_hitting(), 5.0).unwrap();
    assert!(e.rho(0.1, 10.0).is_err());
    assert!(e.rho(-0.1, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn race_is_a_probability_nondecreasing_in_horizon(i in 1u32..15, l in 1u32..15, u in 0.0f64..20.0) {
        let q = QueueModel::reference();
        let a = alpha_race(&q, u, i, l).unwrap();
        let b = alpha_race(&q, u + 0.5, i, l).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a - 1e-10);
    }

    #[test]
    fn execution_probability_is_a_probability(x in 0.0f64..3.0, t in 0.01f64..20.0, qb in 0u32..60) {
        let q = with_profile(vec![qb; 300]);
        let e = RhoEngine::new(q, bm_hitting(), 20.0).unwrap();
        let v = e.rho(x, t).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }
}
