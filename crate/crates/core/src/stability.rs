//! Von Neumann amplification factors of the two front-fixing schemes.
//!
//! The nonlinear front-motion coefficient `(1/S_f) dS_f/dtau` is frozen at a
//! constant `g`, which turns both schemes into constant-coefficient
//! difference equations whose Fourier modes grow by a factor `lambda` per
//! step.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FrontFixedSolution, ModelParams, Scheme};

/// Tolerance on `max |lambda| <= 1` absorbing rounding at phase zero.
pub const STABILITY_TOL: f64 = 1e-12;

/// Frozen front-motion coefficient, per unit time.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FrozenFrontTerm(pub f64);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub scheme: Scheme,
    pub mu: f64,
    pub dx: f64,
    pub dtau: f64,
    /// `(phase, |lambda|)` with phases covering `[0, pi]`.
    pub samples: Vec<(f64, f64)>,
    pub max_modulus: f64,
    pub stable: bool,
}

fn terms(phase: f64, params: &ModelParams, mu: f64, dx: f64, front: FrozenFrontTerm) -> (f64, f64, f64) {
    let dtau = mu * dx * dx;
    let half = (0.5 * phase).sin();
    let diffusion = 2.0 * mu * params.sigma2() * half * half;
    let convection = mu * dx * (params.drift() + front.0) * phase.sin();
    (params.r * dtau, diffusion, convection)
}

/// `|lambda|` of the implicit scheme.
pub fn amplification_implicit(phase: f64, params: &ModelParams, mu: f64, dx: f64, front: FrozenFrontTerm) -> f64 {
    let (reaction, diffusion, b) = terms(phase, params, mu, dx, front);
    let a = reaction + diffusion;
    1.0 / ((1.0 + a) * (1.0 + a) + b * b).sqrt()
}

/// `|lambda|` of the explicit scheme.
pub fn amplification_explicit(phase: f64, params: &ModelParams, mu: f64, dx: f64, front: FrozenFrontTerm) -> f64 {
    let (reaction, diffusion, b) = terms(phase, params, mu, dx, front);
    (1.0 - reaction - diffusion).hypot(b)
}

pub fn amplification(
    scheme: Scheme,
    phase: f64,
    params: &ModelParams,
    mu: f64,
    dx: f64,
    front: FrozenFrontTerm,
) -> f64 {
    match scheme {
        Scheme::Implicit => amplification_implicit(phase, params, mu, dx, front),
        Scheme::Explicit => amplification_explicit(phase, params, mu, dx, front),
    }
}

/// Samples `|lambda|` at `n_samples` uniform phases on `[0, pi]`, the last
/// one being `pi` exactly.
pub fn stability_scan(
    scheme: Scheme,
    params: &ModelParams,
    mu: f64,
    dx: f64,
    front: FrozenFrontTerm,
    n_samples: usize,
) -> Result<StabilityReport> {
    if n_samples < 64 {
        return Err(Error::invalid(format!(
            "need at least 64 phase samples, got {n_samples}"
        )));
    }
    if !(mu > 0.0 && mu.is_finite()) || !(dx > 0.0 && dx.is_finite()) {
        return Err(Error::invalid("mu and dx must be positive and finite"));
    }
    let last = n_samples - 1;
    let samples: Vec<(f64, f64)> = (0..n_samples)
        .map(|i| {
            let phase = if i == last {
                std::f64::consts::PI
            } else {
                std::f64::consts::PI * i as f64 / last as f64
            };
            (phase, amplification(scheme, phase, params, mu, dx, front))
        })
        .collect();
    let max_modulus = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(StabilityReport {
        scheme,
        mu,
        dx,
        dtau: mu * dx * dx,
        samples,
        max_modulus,
        stable: max_modulus <= 1.0 + STABILITY_TOL,
    })
}

/// Frozen front terms `g^n`, `n = 1..=N`, of a computed solution. The
/// implicit scheme normalizes the increment by the new front value, the
/// explicit one by the old.
pub fn front_term_series(solution: &FrontFixedSolution) -> Result<Vec<FrozenFrontTerm>> {
    if solution.states.len() < 2 {
        return Err(Error::invalid("front term series needs at least two time levels"));
    }
    let dtau = solution.grid.dtau;
    Ok(solution
        .states
        .windows(2)
        .map(|w| {
            let (prev, next) = (w[0].sf, w[1].sf);
            let norm = match solution.scheme {
                Scheme::Implicit => next,
                Scheme::Explicit => prev,
            };
            FrozenFrontTerm((next - prev) / (norm * dtau))
        })
        .collect())
}
