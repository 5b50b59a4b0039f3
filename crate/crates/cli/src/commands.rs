use std::path::{Path, PathBuf};

use anyhow::anyhow;
use placekit::lob::{
    build_queue_model, estimate_rates, parse_events, synthetic_log, write_events, EstimateOptions, SyntheticLogConfig,
};
use placekit::placement::{bm, gbm, ExpansionBase};
use placekit::rho::{condition_probe, ProbeOptions, DEFAULT_THETA};
use placekit::sim::{simulate_cost_continuous, simulate_hit_probability};
use placekit::{BoundaryCase, ExecProbability, PriceModel, SolverOptions};

use crate::config::{check_grid, LoadedRho, RunConfig};
use crate::exit::{config_error, numeric_error, CliResult};
use crate::output::{horizon_tag, Cell, Table};

/// Global options shared by every verb.
pub struct Context {
    pub config: Option<RunConfig>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

impl Context {
    pub fn config(&self) -> CliResult<&RunConfig> {
        self.config
            .as_ref()
            .ok_or_else(|| config_error(anyhow!("this command needs --config <path>")))
    }

    pub fn out_dir(&self) -> PathBuf {
        if let Some(o) = &self.out {
            return o.clone();
        }
        match &self.config {
            Some(c) => c
                .output
                .as_ref()
                .map(|o| c.resolve(o))
                .unwrap_or_else(|| PathBuf::from(".")),
            None => PathBuf::from("."),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.or(self.config.as_ref().and_then(|c| c.seed)).unwrap_or(0)
    }

    pub fn solver_options(&self) -> CliResult<SolverOptions> {
        let mut tol = self.config()?.solver_tolerances();
        if let Some(t) = self.tol {
            tol.root = t;
        }
        Ok(SolverOptions {
            tol,
            ..SolverOptions::default()
        })
    }

    /// Pass threshold for the validation suite, in standard errors.
    pub fn z_tolerance(&self) -> CliResult<f64> {
        Ok(self.tol.unwrap_or(self.config()?.tolerances.z))
    }
}

pub fn case_name(c: BoundaryCase) -> &'static str {
    match c {
        BoundaryCase::Interior => "interior",
        BoundaryCase::TrivialZero => "trivial_zero",
        BoundaryCase::Unbounded => "unbounded",
    }
}

fn grid_or(name: &str, given: Option<Vec<f64>>, fallback: Vec<f64>, allow_zero: bool) -> CliResult<Vec<f64>> {
    let values = given.unwrap_or(fallback);
    check_grid(name, &values, allow_zero).map_err(config_error)?;
    Ok(values)
}

fn cost_at(cfg: &RunConfig, rho: &dyn ExecProbability, depth: f64, t: f64) -> CliResult<f64> {
    let v = match cfg.model {
        PriceModel::Bachelier => bm::cost_bm(&cfg.market, rho, depth, t)?,
        PriceModel::BlackScholes => gbm::cost_gbm(&cfg.market, rho, depth, t)?,
    };
    Ok(v)
}

pub fn cost(ctx: &Context, x: Option<Vec<f64>>, t: Option<Vec<f64>>) -> CliResult<()> {
    let cfg = ctx.config()?;
    let depths = grid_or("depth", x, cfg.depths().map_err(config_error)?, false)?;
    let horizons = grid_or("horizon", t, cfg.horizons.clone(), false)?;
    let loaded = cfg.load_rho(max_of(&horizons))?;
    for &t in &horizons {
        let mut table = Table::create(&ctx.out_dir(), &format!("cost_t{}.csv", horizon_tag(t)), &["x", "cost"])?;
        for &d in &depths {
            table.row(vec![d.into(), cost_at(cfg, loaded.rho.as_ref(), d, t)?.into()])?;
        }
        table.finish()?;
    }
    Ok(())
}

pub fn optimal(ctx: &Context, t: Option<Vec<f64>>) -> CliResult<()> {
    let cfg = ctx.config()?;
    let horizons = grid_or("horizon", t, cfg.horizons.clone(), false)?;
    let loaded = cfg.load_rho(max_of(&horizons))?;
    let opts = ctx.solver_options()?;
    let rho = loaded.rho.as_ref();
    let out = ctx.out_dir();
    match cfg.model {
        PriceModel::Bachelier => {
            let mut table = Table::create(&out, "optimal.csv", &["t", "x_star", "cost", "boundary_case"])?;
            for &t in &horizons {
                let s = bm::optimal_x_bm_with(&cfg.market, rho, t, &opts)?;
                table.row(vec![
                    t.into(),
                    s.depth.into(),
                    s.cost.into(),
                    case_name(s.boundary_case).into(),
                ])?;
            }
            table.finish()?;
        }
        PriceModel::BlackScholes => {
            let mut table = Table::create(
                &out,
                "optimal.csv",
                &["t", "y_star", "price_level", "cost", "boundary_case"],
            )?;
            for &t in &horizons {
                let s = gbm::optimal_y_gbm_with(&cfg.market, rho, t, &opts)?;
                table.row(vec![
                    t.into(),
                    s.y_star.into(),
                    s.price_level.into(),
                    s.cost.into(),
                    case_name(s.boundary_case).into(),
                ])?;
            }
            table.finish()?;
        }
    }
    Ok(())
}

pub fn critical_time(ctx: &Context, s0: Option<Vec<f64>>) -> CliResult<()> {
    let cfg = ctx.config()?;
    let prices = grid_or("initial price", s0, vec![cfg.market.s0], false)?;
    let loaded = cfg.load_rho(cfg.max_horizon())?;
    let rho = loaded.rho.as_ref();
    let out = ctx.out_dir();
    match cfg.model {
        PriceModel::Bachelier => {
            let mut table = Table::create(&out, "critical_time.csv", &["s0", "t0", "bar_t0", "within_bound"])?;
            for &s in &prices {
                let p = placekit::MarketParams { s0: s, ..cfg.market };
                let ct = bm::critical_time_bm(&p, rho)?;
                table.row(vec![s.into(), ct.t0.into(), ct.bar_t0.into(), ct.within_bound.into()])?;
            }
            table.finish()?;
        }
        PriceModel::BlackScholes => {
            let header = [
                "s0",
                "t0_star",
                "bar_t",
                "tilde_t",
                "lower",
                "upper",
                "lower_clamped",
                "ordering_holds",
            ];
            let mut table = Table::create(&out, "critical_time.csv", &header)?;
            for &s in &prices {
                let p = placekit::MarketParams { s0: s, ..cfg.market };
                let ct = gbm::critical_time_gbm(&p, rho)?;
                table.row(vec![
                    s.into(),
                    ct.t0_star.into(),
                    ct.bar_t.into(),
                    ct.tilde_t.into(),
                    ct.lower.into(),
                    ct.upper.into(),
                    ct.lower_clamped.into(),
                    ct.ordering_holds.into(),
                ])?;
            }
            table.finish()?;
        }
    }
    Ok(())
}

/// Approximations that do not apply at a horizon are reported as NaN.
pub fn approx(ctx: &Context, t: Option<Vec<f64>>) -> CliResult<()> {
    let cfg = ctx.config()?;
    let horizons = grid_or("horizon", t, cfg.horizons.clone(), false)?;
    let loaded = cfg.load_rho(max_of(&horizons))?;
    let opts = ctx.solver_options()?;
    let rho = loaded.rho.as_ref();
    let p = &cfg.market;
    let constant = rho.is_constant().then(|| rho.rho0());
    let nan = f64::NAN;
    let out = ctx.out_dir();
    match cfg.model {
        PriceModel::Bachelier => {
            let header = [
                "t",
                "x_star",
                "near_critical_1",
                "near_critical_2",
                "large_t_lower",
                "large_t_upper",
                "large_t_2",
            ];
            let mut table = Table::create(&out, "approx.csv", &header)?;
            for &t in &horizons {
                let x = bm::optimal_x_bm_with(p, rho, t, &opts)?.depth;
                let near = bm::approx_xstar_near_t0(p, rho, t, ExpansionBase::CriticalTime).ok();
                let bounds = constant.and_then(|c| bm::xstar_bounds_large_t(p, c, t).ok());
                let second = constant.and_then(|c| {
                    let th0 = bm::theta0(p, c).ok()?;
                    let th1 = bm::theta1_large_t(p, c).ok()?;
                    let sq = p.mu * p.mu * th0 * th0 * t * t + th1 * t;
                    (sq >= 0.0).then(|| sq.sqrt())
                });
                table.row(vec![
                    t.into(),
                    x.into(),
                    near.map_or(nan, |e| e.first_order).into(),
                    near.map_or(nan, |e| e.second_order).into(),
                    bounds.map_or(nan, |b| b.lower).into(),
                    bounds.map_or(nan, |b| b.upper).into(),
                    second.unwrap_or(nan).into(),
                ])?;
            }
            table.finish()?;
        }
        PriceModel::BlackScholes => {
            let header = [
                "t",
                "y_star",
                "near_critical_1",
                "near_critical_2",
                "large_t_1",
                "large_t_2",
                "small_sigma_1",
                "small_sigma_2",
            ];
            let mut table = Table::create(&out, "approx.csv", &header)?;
            for &t in &horizons {
                let y = gbm::optimal_y_gbm_with(p, rho, t, &opts)?.y_star;
                let near = gbm::approx_ystar_near_t0(p, rho, t, ExpansionBase::CriticalTime).ok();
                let large = constant.and_then(|_| gbm::ystar_large_t_gbm(p, t).ok());
                let small = constant.and_then(|c| gbm::ystar_small_sigma(p, c, p.sigma, t).ok());
                table.row(vec![
                    t.into(),
                    y.into(),
                    near.map_or(nan, |e| e.first_order).into(),
                    near.map_or(nan, |e| e.second_order).into(),
                    large.map_or(nan, |l| l.limit_slope * t).into(),
                    large.map_or(nan, |l| l.second_order_depth).into(),
                    small.map_or(nan, |s| s.first_order).into(),
                    small.map_or(nan, |s| s.approx).into(),
                ])?;
            }
            table.finish()?;
        }
    }
    Ok(())
}

pub fn rho_surface(ctx: &Context, depths: Option<Vec<f64>>, times: Option<Vec<f64>>) -> CliResult<()> {
    let cfg = ctx.config()?;
    let depths = grid_or("depth", depths, cfg.depths().map_err(config_error)?, true)?;
    let times = grid_or("time", times, cfg.horizons.clone(), false)?;
    let loaded = cfg.load_rho(max_of(&times))?;
    let mut table = Table::create(&ctx.out_dir(), "rho.csv", &["depth", "t", "rho"])?;
    for &d in &depths {
        for &t in &times {
            let v = rho_value(&loaded, d, t)?;
            table.row(vec![d.into(), t.into(), v.into()])?;
        }
    }
    table.finish()?;
    Ok(())
}

fn rho_value(loaded: &LoadedRho, depth: f64, t: f64) -> CliResult<f64> {
    let v = match &loaded.engine {
        Some(e) => e.rho(depth, t)?,
        None => loaded.rho.value(depth, t),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(numeric_error(anyhow!(
            "execution probability at depth {depth}, t {t} is not finite"
        )))
    }
}

pub fn rho_report(ctx: &Context, t: Option<f64>, points: usize, ceiling: Option<f64>) -> CliResult<()> {
    let cfg = ctx.config()?;
    let t = t.unwrap_or_else(|| cfg.max_horizon());
    check_grid("horizon", &[t], false).map_err(config_error)?;
    let loaded = cfg.load_rho(t)?;
    let queue = loaded
        .queue
        .as_ref()
        .ok_or_else(|| config_error(anyhow!("rho-report needs a queue-backed execution probability")))?;
    let h = cfg.hitting()?;
    let report = condition_probe(loaded.rho.as_ref(), &h, queue, t, &ProbeOptions { ceiling, points });
    let out = ctx.out_dir();
    let mut table = Table::create(&out, "rho_report.csv", &["depth", "rho", "slope", "tail"])?;
    for pt in &report.points {
        table.row(vec![pt.depth.into(), pt.rho.into(), pt.slope.into(), pt.tail.into()])?;
    }
    table.finish()?;
    let mut summary = Table::create(&out, "rho_report_summary.csv", &["key", "value"])?;
    let mut entries = vec![
        ("t".to_string(), report.t),
        ("max_abs_slope".into(), report.max_abs_slope),
        ("slope_at_ceiling".into(), report.slope_at_ceiling),
        ("tail_min".into(), report.tail_min),
        ("tail_at_ceiling".into(), report.tail_at_ceiling),
        ("tail_bound".into(), report.tail_bound),
        ("d_proxy".into(), report.d_proxy),
    ];
    entries.extend(
        report
            .d_series
            .iter()
            .map(|(s, d)| (format!("d_at_{}", horizon_tag(*s)), *d)),
    );
    for (k, v) in entries {
        summary.row(vec![k.into(), v.into()])?;
    }
    summary.row(vec!["d_increasing".into(), Cell::Flag(report.d_increasing)])?;
    summary.finish()?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

pub struct EstimateArgs {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub tick: f64,
    pub theta: Option<Vec<f64>>,
    pub max_gap: f64,
}

pub fn estimate(ctx: &Context, args: EstimateArgs) -> CliResult<()> {
    let parsed = parse_events(&args.input)?;
    for m in &parsed.malformed {
        eprintln!("warning: line {} skipped: {}", m.line, m.reason);
    }
    let est = estimate_rates(&parsed.records, &EstimateOptions { max_gap: args.max_gap })?;
    for name in &est.degenerate {
        eprintln!("warning: {name} estimated as zero");
    }
    let theta = match &args.theta {
        Some(t) => t.clone(),
        None => {
            eprintln!("note: no --theta given; using the default cancellation rates beyond the best quote");
            DEFAULT_THETA.to_vec()
        }
    };
    let queue = build_queue_model(&est, Some(&theta), None, args.tick)?;
    let out = ctx.out_dir();
    std::fs::create_dir_all(&out)?;
    let queue_path = args.output.unwrap_or_else(|| out.join("queue.toml"));
    write_toml(&queue_path, &queue)?;
    write_toml(&out.join("estimates.toml"), &est)?;
    println!(
        "lambda_a {} ± {}, lambda_b {} ± {}, dep_a {} ± {}, dep_b {} ± {} over {} active seconds, {} refills",
        est.lambda_a,
        est.lambda_a_se,
        est.lambda_b,
        est.lambda_b_se,
        est.dep_a,
        est.dep_a_se,
        est.dep_b,
        est.dep_b_se,
        est.active_seconds,
        est.refills
    );
    Ok(())
}

fn write_toml<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = toml::to_string(value).map_err(numeric_error)?;
    std::fs::write(path, text)?;
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SimulateKind {
    /// Expected cost against Monte Carlo paths.
    Cost,
    /// Probability of reaching the level.
    Hit,
    /// Synthetic order-book event log.
    Lob,
}

pub struct SimulateArgs {
    pub kind: SimulateKind,
    pub x: Option<Vec<f64>>,
    pub t: Option<Vec<f64>>,
    pub paths: Option<usize>,
    pub events: usize,
}

pub fn simulate(ctx: &Context, args: SimulateArgs) -> CliResult<()> {
    if args.kind == SimulateKind::Lob {
        let events = synthetic_log(&SyntheticLogConfig::reference(args.events, ctx.seed()))?;
        let out = ctx.out_dir();
        std::fs::create_dir_all(&out)?;
        let path = out.join("synthetic_log.csv");
        write_events(&path, &events)?;
        println!("wrote {}", path.display());
        return Ok(());
    }
    let cfg = ctx.config()?;
    let depths = grid_or("depth", args.x, cfg.depths().map_err(config_error)?, false)?;
    let horizons = grid_or("horizon", args.t, cfg.horizons.clone(), false)?;
    let loaded = cfg.load_rho(max_of(&horizons))?;
    let mut sim = cfg.sim_config(ctx.seed()).map_err(config_error)?;
    if let Some(n) = args.paths {
        sim.n_paths = n;
        sim.validate()?;
    }
    let h = cfg.hitting()?;
    let name = match args.kind {
        SimulateKind::Cost => "simulate_cost.csv",
        _ => "simulate_hit.csv",
    };
    let mut table = Table::create(
        &ctx.out_dir(),
        name,
        &["t", "x", "closed_form", "mc_mean", "mc_std_error", "z"],
    )?;
    let base_seed = sim.seed;
    let mut k = 0u64;
    for &t in &horizons {
        for &d in &depths {
            sim.seed = base_seed.wrapping_add(k);
            k += 1;
            let (exact, mc) = match args.kind {
                SimulateKind::Cost => (
                    cost_at(cfg, loaded.rho.as_ref(), d, t)?,
                    simulate_cost_continuous(&cfg.market, loaded.rho.as_ref(), cfg.model, d, t, &sim)?,
                ),
                _ => (
                    h.hit_probability(d, t),
                    simulate_hit_probability(&cfg.market, cfg.model, d, t, &sim)?,
                ),
            };
            table.row(vec![
                t.into(),
                d.into(),
                exact.into(),
                mc.mean.into(),
                mc.std_error.into(),
                mc.z_score(exact).into(),
            ])?;
        }
    }
    table.finish()?;
    Ok(())
}

pub fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}
