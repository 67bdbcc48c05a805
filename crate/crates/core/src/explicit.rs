//! Explicit front-fixing scheme, used as the comparison baseline.
//!
//! Diffusion, drift and reaction use level-`n` central differences. The
//! front-motion term `(S_f^{n+1} - S_f^n) / (S_f^n dtau) * p_x` is linear in
//! the unknown front, so combining the `j = 1` update with the boundary
//! closure for `p_1^{n+1}` gives the new front in closed form.

use crate::error::{Error, Result};
use crate::implicit::boundary_pair;
use crate::model::{initial_state, FrontFixedSolution, FrontFixedState, GridSpec, ModelParams, Scheme};

/// Abort threshold on `|p_j|`.
const BLOWUP: f64 = 10.0;

pub fn explicit_step(state_n: &FrontFixedState, grid: &GridSpec, params: &ModelParams) -> Result<FrontFixedState> {
    let jm = grid.intervals;
    if state_n.p.len() != jm + 1 {
        return Err(Error::invalid("state length does not match the grid"));
    }
    let sf = state_n.sf;
    if !(sf > 0.0 && sf <= 1.0) {
        return Err(Error::invalid(format!("front value {sf} outside (0, 1]")));
    }

    let dx = grid.dx;
    let dtau = grid.dtau;
    let half_mu_s2 = 0.5 * grid.mu * params.sigma2();

    // level-n values, boundary pair from the closure, zero ghost at J+1
    let mut q = Vec::with_capacity(jm + 2);
    let (q0, q1) = boundary_pair(sf, grid, params);
    q.push(q0);
    q.push(q1);
    q.extend_from_slice(&state_n.p[2..]);
    q.push(0.0);

    let slope: Vec<f64> = (1..=jm).map(|j| (q[j + 1] - q[j - 1]) / (2.0 * dx)).collect();
    let base: Vec<f64> = (1..=jm)
        .map(|j| {
            q[j] + half_mu_s2 * (q[j - 1] - 2.0 * q[j] + q[j + 1]) + params.drift() * dtau * slope[j - 1]
                - params.r * dtau * q[j]
        })
        .collect();

    // base_1 + k (S - S^n) = 1 + r dx^2 / sigma^2 - (1 + dx + dx^2 / 2) S
    let k = slope[0] / sf;
    let lin = 1.0 + dx + 0.5 * dx * dx;
    let cst = 1.0 + params.r * dx * dx / params.sigma2();
    let denom = k + lin;
    if denom == 0.0 {
        return Err(Error::Instability("front equation is degenerate".into()));
    }
    let sf_next = (cst - base[0] + k * sf) / denom;
    if !sf_next.is_finite() {
        return Err(Error::Overflow);
    }
    if !(sf_next > 0.0 && sf_next <= sf + 1e-12) {
        return Err(Error::Instability(format!("front moved from {sf} to {sf_next}")));
    }

    let ratio = (sf_next - sf) / sf;
    let (p0, p1) = boundary_pair(sf_next, grid, params);
    let mut p = Vec::with_capacity(jm + 1);
    p.push(p0);
    p.push(p1);
    for j in 2..=jm {
        p.push(base[j - 1] + ratio * slope[j - 1]);
    }

    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow);
    }
    if let Some(v) = p.iter().find(|v| v.abs() > BLOWUP) {
        return Err(Error::Instability(format!("|p| reached {v}")));
    }

    Ok(FrontFixedState {
        p,
        sf: sf_next,
        n: state_n.n + 1,
    })
}

pub fn explicit_solve(params: &ModelParams, grid: &GridSpec) -> Result<FrontFixedSolution> {
    params.validate()?;
    let mut states = Vec::with_capacity(grid.steps + 1);
    states.push(initial_state(grid));
    for n in 0..grid.steps {
        let next = explicit_step(&states[n], grid, params).map_err(|e| Error::at_step(n + 1, e))?;
        states.push(next);
    }
    Ok(FrontFixedSolution {
        params: *params,
        grid: *grid,
        scheme: Scheme::Explicit,
        states,
    })
}
