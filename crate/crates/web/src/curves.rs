//! Plain-Rust curve builders behind the browser bindings. Results are flat
//! `f64` buffers so they cross the wasm boundary as `Float64Array`s.

use frontfix::stability::{stability_scan, FrozenFrontTerm};
use frontfix::{build_grid, solve_scheme, ModelParams, PriceCurve, Scheme, StepSolverConfig};

/// Largest grid the page accepts; keeps one interaction well under a
/// second in the browser.
pub const MAX_INTERVALS: usize = 640;
pub const MAX_STEPS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inputs {
    pub r: f64,
    pub sigma: f64,
    pub maturity: f64,
    pub strike: f64,
    pub x_inf: f64,
    pub intervals: usize,
    pub mu: f64,
    pub explicit: bool,
}

impl Inputs {
    fn params(&self) -> Result<ModelParams, String> {
        ModelParams::new(self.r, self.sigma, self.maturity, self.strike).map_err(|e| e.to_string())
    }

    fn scheme(&self) -> Scheme {
        if self.explicit {
            Scheme::Explicit
        } else {
            Scheme::Implicit
        }
    }

    fn solve(&self) -> Result<frontfix::FrontFixedSolution, String> {
        if self.intervals > MAX_INTERVALS {
            return Err(format!("J is limited to {MAX_INTERVALS} in the demo"));
        }
        let params = self.params()?;
        let grid = build_grid(self.x_inf, self.intervals, self.mu, self.maturity).map_err(|e| e.to_string())?;
        if grid.steps > MAX_STEPS {
            return Err(format!(
                "{} time steps exceed the demo limit of {MAX_STEPS}",
                grid.steps
            ));
        }
        solve_scheme(self.scheme(), &params, &grid, &StepSolverConfig::default()).map_err(|e| e.to_string())
    }
}

/// Early-exercise boundary over time to expiry, interleaved as
/// `[tau_0, S*_0, tau_1, S*_1, ...]` in currency units.
pub fn front_curve(inputs: &Inputs) -> Result<Vec<f64>, String> {
    let sol = inputs.solve()?;
    Ok(sol
        .states
        .iter()
        .flat_map(|s| [sol.grid.tau(s.n), inputs.strike * s.sf])
        .collect())
}

/// Amplification moduli over `samples` phases on `[0, pi]`, one block of
/// `samples` values per entry of `mus`, with a frozen front term of zero.
pub fn amplification_curves(inputs: &Inputs, mus: &[f64], samples: usize) -> Result<Vec<f64>, String> {
    if mus.is_empty() {
        return Err("the mu list is empty".into());
    }
    let params = inputs.params()?;
    if inputs.intervals < 1 || !(inputs.x_inf > 0.0) {
        return Err("x_inf and J must be positive".into());
    }
    let dx = inputs.x_inf / inputs.intervals as f64;
    let mut out = Vec::with_capacity(mus.len() * samples);
    for &mu in mus {
        let rep = stability_scan(inputs.scheme(), &params, mu, dx, FrozenFrontTerm(0.0), samples)
            .map_err(|e| e.to_string())?;
        out.extend(rep.samples.iter().map(|s| s.1));
    }
    Ok(out)
}

/// Option value at maturity on `points` equally spaced asset prices in
/// `[s_min, s_max]`, interleaved as `[S_0, P_0, ...]`. Assets above the
/// truncated domain get `NaN`.
pub fn price_curve(inputs: &Inputs, s_min: f64, s_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if points < 2 || !(s_min > 0.0) || !(s_max > s_min) {
        return Err("need at least two points on a positive, increasing asset range".into());
    }
    let sol = inputs.solve()?;
    let params = inputs.params()?;
    let curve = PriceCurve::new(sol.final_state(), &sol.grid, &params).map_err(|e| e.to_string())?;
    let step = (s_max - s_min) / (points - 1) as f64;
    Ok((0..points)
        .flat_map(|i| {
            let s = if i == points - 1 {
                s_max
            } else {
                s_min + step * i as f64
            };
            [s, curve.price(s).unwrap_or(f64::NAN)]
        })
        .collect())
}
