//! Market parameters, the front-fixed grid, solution containers and the
//! readout back to physical option prices.
//!
//! The transformed problem lives on `x = ln(S / (E * S_f))` with the
//! dimensionless price `p = P / E`. The early-exercise boundary is pinned at
//! `x = 0` and its level `S_f` is carried as an extra unknown per time level.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spline::CubicSpline;

/// Relative slack used when deciding the number of time levels, so that
/// `T / dtau` landing a few ulps above an integer does not add a level.
const CEIL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Risk-free rate.
    pub r: f64,
    /// Volatility.
    pub sigma: f64,
    /// Maturity.
    #[serde(rename = "T")]
    pub maturity: f64,
    /// Exercise price.
    #[serde(rename = "E")]
    pub strike: f64,
}

impl ModelParams {
    pub fn new(r: f64, sigma: f64, maturity: f64, strike: f64) -> Result<Self> {
        let p = Self {
            r,
            sigma,
            maturity,
            strike,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r", self.r),
            ("sigma", self.sigma),
            ("T", self.maturity),
            ("E", self.strike),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// Drift of the log-price, `r - sigma^2 / 2`.
    pub fn drift(&self) -> f64 {
        self.r - 0.5 * self.sigma2()
    }
}

impl Default for ModelParams {
    /// r = 0.1, sigma = 0.2, T = 1, E = 1.
    fn default() -> Self {
        Self {
            r: 0.1,
            sigma: 0.2,
            maturity: 1.0,
            strike: 1.0,
        }
    }
}

/// Which finite-difference scheme produced (or should produce) a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Implicit,
    Explicit,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "implicit" => Ok(Scheme::Implicit),
            "explicit" => Ok(Scheme::Explicit),
            other => Err(Error::invalid(format!("unknown scheme '{other}'"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Implicit => "implicit",
            Scheme::Explicit => "explicit",
        })
    }
}

/// Uniform grid on `[0, x_inf] x [0, N * dtau]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_inf: f64,
    /// Number of space intervals.
    #[serde(rename = "J")]
    pub intervals: usize,
    /// Grid ratio `dtau / dx^2`.
    pub mu: f64,
    pub dx: f64,
    pub dtau: f64,
    /// Number of time steps.
    #[serde(rename = "N")]
    pub steps: usize,
}

impl GridSpec {
    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }

    pub fn tau(&self, n: usize) -> f64 {
        n as f64 * self.dtau
    }

    /// Same `x_inf` and `mu` with twice the space intervals; `dx` is halved
    /// exactly so that coarse node `j` coincides with fine node `2j`.
    pub fn refined(&self, maturity: f64) -> GridSpec {
        let dx = self.dx * 0.5;
        let dtau = self.mu * dx * dx;
        GridSpec {
            x_inf: self.x_inf,
            intervals: self.intervals * 2,
            mu: self.mu,
            dx,
            dtau,
            steps: time_steps(maturity, dtau),
        }
    }
}

fn time_steps(maturity: f64, dtau: f64) -> usize {
    let ratio = maturity / dtau;
    let n = (ratio * (1.0 - CEIL_SLACK)).ceil();
    (n as usize).max(1)
}

/// Builds the grid from the truncated boundary, the number of space
/// intervals, the grid ratio and the maturity.
pub fn build_grid(x_inf: f64, intervals: usize, mu: f64, maturity: f64) -> Result<GridSpec> {
    for (name, v) in [("x_inf", x_inf), ("mu", mu), ("T", maturity)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(format!("{name} must be positive, got {v}")));
        }
    }
    if intervals < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 space intervals, got {intervals}"
        )));
    }
    let dx = x_inf / intervals as f64;
    let dtau = mu * dx * dx;
    Ok(GridSpec {
        x_inf,
        intervals,
        mu,
        dx,
        dtau,
        steps: time_steps(maturity, dtau),
    })
}

/// One time level of the front-fixed problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontFixedState {
    /// `p_0 ..= p_J` at `x_j = j * dx`.
    pub p: Vec<f64>,
    /// Dimensionless front `S*(tau) / E`.
    pub sf: f64,
    /// Time index.
    pub n: usize,
}

/// `p = 0` everywhere and `S_f = 1`.
pub fn initial_state(grid: &GridSpec) -> FrontFixedState {
    FrontFixedState {
        p: vec![0.0; grid.intervals + 1],
        sf: 1.0,
        n: 0,
    }
}

/// All time levels of one solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrontFixedSolution {
    pub params: ModelParams,
    pub grid: GridSpec,
    pub scheme: Scheme,
    pub states: Vec<FrontFixedState>,
}

impl FrontFixedSolution {
    pub fn final_state(&self) -> &FrontFixedState {
        self.states.last().expect("a solution holds at least the initial state")
    }

    pub fn final_front(&self) -> f64 {
        self.final_state().sf
    }

    /// `S_f^n` for every level.
    pub fn front(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.sf).collect()
    }

    pub fn taus(&self) -> Vec<f64> {
        (0..self.states.len()).map(|n| self.grid.tau(n)).collect()
    }
}

/// `x = ln(S / (E * S_f))`; negative values lie in the exercise region.
pub fn transform_asset(asset: f64, sf: f64, strike: f64) -> Result<f64> {
    if !(asset > 0.0 && strike > 0.0) {
        return Err(Error::invalid("asset and strike must be positive"));
    }
    if !(sf > 0.0 && sf <= 1.0) {
        return Err(Error::invalid(format!("front value {sf} outside (0, 1]")));
    }
    Ok((asset / (strike * sf)).ln())
}

/// Inverse of [`transform_asset`].
pub fn asset_from_x(x: f64, sf: f64, strike: f64) -> f64 {
    strike * sf * x.exp()
}

/// Physical put prices read off one time level through a not-a-knot spline
/// on the nodes `(E * S_f * e^{x_j}, E * p_j)`.
#[derive(Debug, Clone)]
pub struct PriceCurve {
    strike: f64,
    boundary: f64,
    spline: CubicSpline,
}

impl PriceCurve {
    pub fn new(state: &FrontFixedState, grid: &GridSpec, params: &ModelParams) -> Result<Self> {
        if state.p.len() != grid.intervals + 1 {
            return Err(Error::invalid("state length does not match the grid"));
        }
        if !(state.sf > 0.0) {
            return Err(Error::SingularFront(state.sf));
        }
        let e = params.strike;
        let assets: Vec<f64> = (0..=grid.intervals)
            .map(|j| asset_from_x(grid.x(j), state.sf, e))
            .collect();
        let prices: Vec<f64> = state.p.iter().map(|p| e * p).collect();
        Ok(Self {
            strike: e,
            boundary: assets[0],
            spline: CubicSpline::not_a_knot(&assets, &prices)?,
        })
    }

    /// Early-exercise boundary `S*` in currency units.
    pub fn boundary(&self) -> f64 {
        self.boundary
    }

    /// Largest asset price covered by the truncated domain.
    pub fn max_asset(&self) -> f64 {
        self.spline.upper()
    }

    pub fn price(&self, asset: f64) -> Result<f64> {
        if !(asset > 0.0) {
            return Err(Error::invalid(format!("asset price must be positive, got {asset}")));
        }
        if asset < self.boundary {
            return Ok(self.strike - asset);
        }
        let max = self.max_asset();
        if asset > max * (1.0 + 1e-12) {
            return Err(Error::OutOfDomain { asset, max });
        }
        Ok(self.spline.eval(asset.min(max)))
    }
}

/// Price at one asset level.
pub fn to_physical(state: &FrontFixedState, grid: &GridSpec, params: &ModelParams, asset: f64) -> Result<f64> {
    PriceCurve::new(state, grid, params)?.price(asset)
}

/// Prices at several asset levels; fails on the first out-of-domain asset.
pub fn spline_prices(
    state: &FrontFixedState,
    grid: &GridSpec,
    params: &ModelParams,
    assets: &[f64],
) -> Result<Vec<f64>> {
    let curve = PriceCurve::new(state, grid, params)?;
    assets.iter().map(|&s| curve.price(s)).collect()
}
