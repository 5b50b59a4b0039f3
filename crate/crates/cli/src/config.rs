use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use placekit::{
    ConstantRho, ExecProbability, HittingModel, MarketParams, PriceModel, QueueModel, QueueRho, RhoEngine, SimConfig,
    TabulatedRho, Tolerances,
};
use serde::Deserialize;

use crate::exit::{config_error, CliError, CliResult};

/// A reproducible run: price model, market, execution probability and grids.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: PriceModel,
    pub market: MarketParams,
    pub rho: RhoSpec,
    pub horizons: Vec<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub grid: Option<DepthGrid>,
    #[serde(default)]
    pub tolerances: ToleranceSection,
    #[serde(default)]
    pub simulation: SimulationSection,
    /// Directory of the config file; relative paths are resolved against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoSpec {
    Constant(f64),
    /// CSV with header `depth,t,rho`.
    Table(PathBuf),
    /// Queue model document.
    Queue(PathBuf),
}

/// Either explicit depths or an evenly spaced range.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepthGrid {
    #[serde(default)]
    pub depths: Option<Vec<f64>>,
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSection {
    pub abs: f64,
    pub rel: f64,
    pub root: f64,
    /// Pass threshold of the validation suite, in standard errors.
    pub z: f64,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        let t = Tolerances::default();
        Self {
            abs: t.abs,
            rel: t.rel,
            root: t.root,
            z: 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub paths: usize,
    pub antithetic: bool,
    pub dt: Option<f64>,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            paths: 100_000,
            antithetic: true,
            dt: None,
        }
    }
}

/// The execution probability of a run, with its queue model when it has one.
pub struct LoadedRho {
    pub rho: Arc<dyn ExecProbability>,
    pub queue: Option<QueueModel>,
    pub engine: Option<Arc<RhoEngine>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))
            .map_err(config_error)?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .with_context(|| format!("invalid config {}", path.display()))
            .map_err(config_error)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate().map_err(config_error)?;
        Ok(cfg)
    }

    fn validate(&self) -> anyhow::Result<()> {
        self.market.validate()?;
        if self.horizons.is_empty() {
            bail!("horizons must not be empty");
        }
        if let Some(t) = self.horizons.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            bail!("horizons must be positive, got {t}");
        }
        if let RhoSpec::Constant(v) = self.rho {
            ConstantRho::new(v)?;
        }
        if let Some(g) = &self.grid {
            g.resolve()?;
        }
        let tol = &self.tolerances;
        if [tol.abs, tol.rel, tol.root, tol.z]
            .iter()
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            bail!("tolerances must be positive");
        }
        self.sim_config(0)?;
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn max_horizon(&self) -> f64 {
        self.horizons.iter().copied().fold(0.0, f64::max)
    }

    pub fn solver_tolerances(&self) -> Tolerances {
        Tolerances {
            abs: self.tolerances.abs,
            rel: self.tolerances.rel,
            root: self.tolerances.root,
        }
    }

    pub fn sim_config(&self, seed: u64) -> anyhow::Result<SimConfig> {
        let s = &self.simulation;
        let mut cfg = SimConfig::new(s.paths, seed).with_antithetic(s.antithetic);
        if let Some(dt) = s.dt {
            cfg = cfg.with_dt(dt);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Depth grid from the config, or 30 evenly spaced positive depths up to
    /// three standard deviations of the longest horizon.
    pub fn depths(&self) -> anyhow::Result<Vec<f64>> {
        match &self.grid {
            Some(g) => g.resolve(),
            None => {
                let top = 3.0 * self.market.sigma * self.max_horizon().sqrt();
                Ok((1..=30).map(|k| top * k as f64 / 30.0).collect())
            }
        }
    }

    pub fn hitting(&self) -> CliResult<HittingModel> {
        HittingModel::new(self.model, self.market).map_err(CliError::from)
    }

    /// Loads the execution probability; queue-backed ones cover horizons up to `horizon`.
    pub fn load_rho(&self, horizon: f64) -> CliResult<LoadedRho> {
        match &self.rho {
            RhoSpec::Constant(v) => Ok(LoadedRho {
                rho: Arc::new(ConstantRho::new(*v)?),
                queue: None,
                engine: None,
            }),
            RhoSpec::Table(path) => Ok(LoadedRho {
                rho: Arc::new(TabulatedRho::from_csv(self.resolve(path))?),
                queue: None,
                engine: None,
            }),
            RhoSpec::Queue(path) => {
                let queue = load_queue(&self.resolve(path))?;
                let engine = Arc::new(RhoEngine::new(queue.clone(), self.hitting()?, horizon)?);
                Ok(LoadedRho {
                    rho: Arc::new(QueueRho::new(engine.clone())),
                    queue: Some(queue),
                    engine: Some(engine),
                })
            }
        }
    }
}

impl DepthGrid {
    pub fn resolve(&self) -> anyhow::Result<Vec<f64>> {
        let depths = match (&self.depths, self.start, self.stop, self.points) {
            (Some(d), None, None, None) => d.clone(),
            (None, Some(a), Some(b), Some(n)) if n >= 1 => {
                if n == 1 {
                    vec![a]
                } else {
                    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
                }
            }
            _ => bail!("grid needs either `depths` or all of `start`, `stop`, `points`"),
        };
        check_grid("depth", &depths, true)?;
        Ok(depths)
    }
}

pub fn check_grid(name: &str, values: &[f64], allow_zero: bool) -> anyhow::Result<()> {
    if values.is_empty() {
        bail!("{name} grid is empty");
    }
    let ok = |v: f64| v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
    if let Some(v) = values.iter().find(|v| !ok(**v)) {
        bail!("invalid {name} {v}");
    }
    Ok(())
}

pub fn load_queue(path: &Path) -> CliResult<QueueModel> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read queue model {}", path.display()))
        .map_err(config_error)?;
    let q: QueueModel = toml::from_str(&text)
        .with_context(|| format!("invalid queue model {}", path.display()))
        .map_err(config_error)?;
    q.validate()?;
    Ok(q)
}
