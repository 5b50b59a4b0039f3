//! Execution probability ρ(depth, t) of a limit order that the price has reached.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecKind {
    Constant,
    Tabulated,
    QueueBacked,
}

/// A conditional execution probability and its partial derivatives.
///
/// `depth` is the depth coordinate of the price model in use: price distance
/// `x` for Bachelier, log-depth `y` for Black-Scholes.
pub trait ExecProbability: Send + Sync {
    fn kind(&self) -> ExecKind;
    fn value(&self, depth: f64, t: f64) -> f64;
    fn d_depth(&self, depth: f64, t: f64) -> f64;
    fn d_time(&self, depth: f64, t: f64) -> f64;
    fn d2_depth(&self, depth: f64, t: f64) -> f64;
    fn d2_time_depth(&self, depth: f64, t: f64) -> f64;

    /// The limit ρ(0⁺) used by the critical-time bounds.
    fn rho0(&self) -> f64;

    fn is_constant(&self) -> bool {
        self.kind() == ExecKind::Constant
    }
}

/// Checks that a probability returned by an [`ExecProbability`] is usable.
pub(crate) fn checked_rho(rho: &dyn ExecProbability, depth: f64, t: f64) -> Result<f64> {
    let v = rho.value(depth, t);
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::InvalidInput(format!(
            "execution probability {v} at depth {depth}, t {t} is outside [0, 1]"
        )))
    }
}

/// Depth- and time-independent execution probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantRho(f64);

impl ConstantRho {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::InvalidInput(format!(
                "constant execution probability must lie in [0, 1], got {value}"
            )))
        }
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

impl ExecProbability for ConstantRho {
    fn kind(&self) -> ExecKind {
        ExecKind::Constant
    }
    fn value(&self, _: f64, _: f64) -> f64 {
        self.0
    }
    fn d_depth(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d_time(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d2_depth(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d2_time_depth(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn rho0(&self) -> f64 {
        self.0
    }
}

/// ρ tabulated on a rectangular (depth, t) grid.
///
/// Interpolation is bicubic Hermite with monotone (PCHIP) node slopes in each
/// direction and zero cross-derivatives. Outside the grid the coordinates are
/// clamped and the partials in the clamped direction vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedRho {
    depths: Vec<f64>,
    times: Vec<f64>,
    // values[i * nt + j] at (depths[i], times[j])
    values: Vec<f64>,
    slope_depth: Vec<f64>,
    slope_time: Vec<f64>,
}

impl TabulatedRho {
    pub fn new(depths: Vec<f64>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let nd = depths.len();
        let nt = times.len();
        if nd < 2 || nt < 1 {
            return Err(Error::InvalidInput(
                "tabulated rho needs at least two depths and one time".into(),
            ));
        }
        if values.len() != nd * nt {
            return Err(Error::InvalidInput(format!(
                "expected {} table values, got {}",
                nd * nt,
                values.len()
            )));
        }
        for axis in [&depths, &times] {
            if axis.iter().any(|v| !v.is_finite()) || axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidInput(
                    "table axes must be finite and strictly increasing".into(),
                ));
            }
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidInput(format!("table value {v} is outside [0, 1]")));
        }
        let mut slope_depth = vec![0.0; nd * nt];
        let mut slope_time = vec![0.0; nd * nt];
        for j in 0..nt {
            let col: Vec<f64> = (0..nd).map(|i| values[i * nt + j]).collect();
            for (i, s) in pchip_slopes(&depths, &col).into_iter().enumerate() {
                slope_depth[i * nt + j] = s;
            }
        }
        if nt >= 2 {
            for i in 0..nd {
                let row = &values[i * nt..(i + 1) * nt];
                for (j, s) in pchip_slopes(&times, row).into_iter().enumerate() {
                    slope_time[i * nt + j] = s;
                }
            }
        }
        Ok(Self {
            depths,
            times,
            values,
            slope_depth,
            slope_time,
        })
    }

    /// Reads a long-format CSV with header `depth,t,rho`, one row per grid node.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)?;
        let headers = reader.headers()?.clone();
        let expected = ["depth", "t", "rho"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::InvalidInput(format!(
                "rho table header must be depth,t,rho; got {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec[k]
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("bad number {:?} in rho table: {e}", &rec[k])))
            };
            rows.push((parse(0)?, parse(1)?, parse(2)?));
        }
        Self::from_triples(&rows)
    }

    /// Builds the grid from (depth, t, rho) triples covering every node exactly once.
    pub fn from_triples(rows: &[(f64, f64, f64)]) -> Result<Self> {
        let mut depths: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut times: Vec<f64> = rows.iter().map(|r| r.1).collect();
        for axis in [&mut depths, &mut times] {
            axis.sort_by(f64::total_cmp);
            axis.dedup();
        }
        let nt = times.len();
        let mut values = vec![f64::NAN; depths.len() * nt];
        for &(d, t, v) in rows {
            let i = depths.binary_search_by(|p| p.total_cmp(&d)).expect("depth present");
            let j = times.binary_search_by(|p| p.total_cmp(&t)).expect("time present");
            if !values[i * nt + j].is_nan() {
                return Err(Error::InvalidInput(format!("duplicate table node ({d}, {t})")));
            }
            values[i * nt + j] = v;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidInput(
                "rho table does not cover the full depth x time grid".into(),
            ));
        }
        Self::new(depths, times, values)
    }

    pub fn depths(&self) -> &[f64] {
        &self.depths
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    fn eval(&self, depth: f64, t: f64, nd_order: usize, nt_order: usize) -> f64 {
        let nt = self.times.len();
        let (i, u, hx, clamped_x) = locate(&self.depths, depth);
        if clamped_x && nd_order > 0 {
            return 0.0;
        }
        let (j, v, ht, clamped_t) = if nt >= 2 {
            locate(&self.times, t)
        } else {
            (0, 0.0, 1.0, true)
        };
        if clamped_t && nt_order > 0 {
            return 0.0;
        }
        let bx = basis(u, nd_order, hx);
        let bt = if nt >= 2 {
            basis(v, nt_order, ht)
        } else {
            // constant in t: unit weight on the single node
            HermiteBasis {
                value: [1.0, 0.0],
                slope: [0.0, 0.0],
            }
        };
        let jb = if nt >= 2 { 2 } else { 1 };
        let mut acc = 0.0;
        for a in 0..2 {
            for b in 0..jb {
                let k = (i + a) * nt + (j + b);
                acc += self.values[k] * bx.value[a] * bt.value[b]
                    + self.slope_depth[k] * bx.slope[a] * bt.value[b]
                    + self.slope_time[k] * bx.value[a] * bt.slope[b];
            }
        }
        acc
    }
}

struct HermiteBasis {
    value: [f64; 2],
    slope: [f64; 2],
}

// Hermite basis (or its derivatives) on a cell of width h, in the cell coordinate u.
fn basis(u: f64, order: usize, h: f64) -> HermiteBasis {
    let (u2, u3) = (u * u, u * u * u);
    match order {
        0 => HermiteBasis {
            value: [2.0 * u3 - 3.0 * u2 + 1.0, -2.0 * u3 + 3.0 * u2],
            slope: [h * (u3 - 2.0 * u2 + u), h * (u3 - u2)],
        },
        1 => HermiteBasis {
            value: [(6.0 * u2 - 6.0 * u) / h, (-6.0 * u2 + 6.0 * u) / h],
            slope: [3.0 * u2 - 4.0 * u + 1.0, 3.0 * u2 - 2.0 * u],
        },
        _ => HermiteBasis {
            value: [(12.0 * u - 6.0) / (h * h), (-12.0 * u + 6.0) / (h * h)],
            slope: [(6.0 * u - 4.0) / h, (6.0 * u - 2.0) / h],
        },
    }
}

// Cell index, local coordinate in [0,1], cell width, and whether the point was clamped.
fn locate(axis: &[f64], x: f64) -> (usize, f64, f64, bool) {
    let n = axis.len();
    let clamped = x < axis[0] || x > axis[n - 1];
    let xc = x.clamp(axis[0], axis[n - 1]);
    let i = match axis.partition_point(|&a| a <= xc) {
        0 => 0,
        p => (p - 1).min(n - 2),
    };
    let h = axis[i + 1] - axis[i];
    (i, (xc - axis[i]) / h, h, clamped)
}

/// Shape-preserving node slopes (Fritsch-Carlson with three-point end conditions).
pub fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s.signum() != d0.signum() || d0 == 0.0 {
            0.0
        } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

impl ExecProbability for TabulatedRho {
    fn kind(&self) -> ExecKind {
        ExecKind::Tabulated
    }
    fn value(&self, depth: f64, t: f64) -> f64 {
        self.eval(depth, t, 0, 0).clamp(0.0, 1.0)
    }
    fn d_depth(&self, depth: f64, t: f64) -> f64 {
        self.eval(depth, t, 1, 0)
    }
    fn d_time(&self, depth: f64, t: f64) -> f64 {
        self.eval(depth, t, 0, 1)
    }
    fn d2_depth(&self, depth: f64, t: f64) -> f64 {
        self.eval(depth, t, 2, 0)
    }
    fn d2_time_depth(&self, depth: f64, t: f64) -> f64 {
        self.eval(depth, t, 1, 1)
    }
    fn rho0(&self) -> f64 {
        self.values[0]
    }
}
