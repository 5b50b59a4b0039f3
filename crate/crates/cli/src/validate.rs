use std::time::Instant;

use anyhow::anyhow;
use placekit::placement::{bm, gbm};
use placekit::rho::alpha_race;
use placekit::sim::{simulate_cost_continuous, simulate_hit_probability, simulate_queue_race, simulate_rho};
use placekit::{BoundaryCase, McEstimate, PriceModel};

use crate::commands::Context;
use crate::exit::{CliError, CliResult, VALIDATION};
use crate::output::{Cell, Table};

/// One row of the suite. Deterministic checks have no standard error and
/// compare against an absolute tolerance instead of a z-score.
struct Check {
    name: &'static str,
    t: f64,
    depth: f64,
    target: f64,
    estimate: f64,
    std_error: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    fn statistical(name: &'static str, t: f64, depth: f64, target: f64, mc: McEstimate, z: f64) -> Self {
        Self {
            name,
            t,
            depth,
            target,
            estimate: mc.mean,
            std_error: mc.std_error,
            tolerance: z,
            pass: mc.within(target, z),
        }
    }

    fn exact(name: &'static str, t: f64, depth: f64, target: f64, estimate: f64, tol: f64) -> Self {
        Self {
            name,
            t,
            depth,
            target,
            estimate,
            std_error: f64::NAN,
            tolerance: tol,
            pass: (estimate - target).abs() <= tol * target.abs().max(1.0),
        }
    }

    fn z(&self) -> f64 {
        if self.std_error.is_nan() {
            f64::NAN
        } else if self.std_error == 0.0 {
            if self.estimate == self.target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.estimate - self.target) / self.std_error
        }
    }
}

/// Cross-checks closed forms against the Monte Carlo oracles for the
/// configured model; adds queue race checks when ρ is queue-backed.
pub fn run(ctx: &Context) -> CliResult<()> {
    let started = Instant::now();
    let cfg = ctx.config()?;
    let z = ctx.z_tolerance()?;
    let seed = ctx.seed();
    let mut sim = cfg.sim_config(seed).map_err(crate::exit::config_error)?;
    let loaded = cfg.load_rho(cfg.max_horizon())?;
    let rho = loaded.rho.as_ref();
    let p = &cfg.market;
    let h = cfg.hitting()?;
    let opts = ctx.solver_options()?;
    let mut checks = Vec::new();
    let mut stream = 0u64;
    let mut next_seed = || {
        stream += 1;
        seed.wrapping_add(stream)
    };

    for &t in &cfg.horizons {
        let scale = p.sigma * t.sqrt();
        let tiny = 1e-12 * scale;
        let at_zero = match cfg.model {
            PriceModel::Bachelier => bm::cost_bm(p, rho, tiny, t)?,
            PriceModel::BlackScholes => gbm::cost_gbm(p, rho, tiny, t)?,
        };
        let limit = p.fee - rho.value(0.0, t) * p.c();
        checks.push(Check::exact("cost_at_zero", t, tiny, limit, at_zero, 1e-10));

        for m in [0.5, 1.0, 2.0] {
            let d = m * scale;
            sim.seed = next_seed();
            let closed = match cfg.model {
                PriceModel::Bachelier => bm::cost_bm(p, rho, d, t)?,
                PriceModel::BlackScholes => gbm::cost_gbm(p, rho, d, t)?,
            };
            let mc = simulate_cost_continuous(p, rho, cfg.model, d, t, &sim)?;
            checks.push(Check::statistical("cost_vs_paths", t, d, closed, mc, z));
            sim.seed = next_seed();
            let mc = simulate_hit_probability(p, cfg.model, d, t, &sim)?;
            checks.push(Check::statistical(
                "hit_probability_vs_paths",
                t,
                d,
                h.hit_probability(d, t),
                mc,
                z,
            ));
        }

        let (depth, case, cost) = match cfg.model {
            PriceModel::Bachelier => {
                let s = bm::optimal_x_bm_with(p, rho, t, &opts)?;
                (s.depth, s.boundary_case, s.cost)
            }
            PriceModel::BlackScholes => {
                let s = gbm::optimal_y_gbm_with(p, rho, t, &opts)?;
                (s.y_star, s.boundary_case, s.cost)
            }
        };
        if case == BoundaryCase::Interior {
            let f = |d: f64| match cfg.model {
                PriceModel::Bachelier => bm::cost_bm(p, rho, d, t),
                PriceModel::BlackScholes => gbm::cost_gbm(p, rho, d, t),
            };
            let neighbours = f(0.9 * depth)?.min(f(1.1 * depth)?);
            let mut c = Check::exact("optimum_below_neighbours", t, depth, neighbours, cost, 0.0);
            c.pass = cost <= neighbours;
            checks.push(c);
        }
    }

    if let (Some(q), Some(engine)) = (&loaded.queue, &loaded.engine) {
        let u = cfg.max_horizon();
        let i = q.best_ask.unwrap_or_else(|| q.mean_refill().round().max(1.0) as u32);
        let ell = q.queue_at(1) + 1;
        sim.seed = next_seed();
        let mc = simulate_queue_race(q, u, i, ell, &sim)?;
        checks.push(Check::statistical(
            "queue_race_vs_events",
            u,
            0.0,
            alpha_race(q, u, i, ell)?,
            mc,
            z,
        ));
        let depth = h.model_depth(2.0 * q.tick)?;
        sim.seed = next_seed();
        let mc = simulate_rho(q, &h, depth, u, &sim)?;
        checks.push(Check::statistical(
            "rho_vs_events",
            u,
            depth,
            engine.rho(depth, u)?,
            mc,
            z,
        ));
    }

    let header = [
        "check",
        "t",
        "depth",
        "target",
        "estimate",
        "std_error",
        "z",
        "tolerance",
        "pass",
    ];
    let mut table = Table::create(&ctx.out_dir(), "validate.csv", &header)?;
    let mut failed = 0;
    for c in &checks {
        if !c.pass {
            failed += 1;
        }
        println!(
            "[{}] {} t={} depth={} target={} estimate={} z={:.3}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.t,
            c.depth,
            c.target,
            c.estimate,
            c.z()
        );
        table.row(vec![
            c.name.into(),
            c.t.into(),
            c.depth.into(),
            c.target.into(),
            c.estimate.into(),
            c.std_error.into(),
            c.z().into(),
            c.tolerance.into(),
            Cell::Flag(c.pass),
        ])?;
    }
    table.finish()?;
    println!(
        "{} checks, {} failed, seed {}, {:.1} s",
        checks.len(),
        failed,
        seed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        return Err(CliError {
            code: VALIDATION,
            source: anyhow!("{failed} validation checks failed"),
        });
    }
    Ok(())
}
