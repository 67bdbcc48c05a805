//! Implicit front-fixing scheme.
//!
//! Each time step couples the prices `p_2 ..= p_J` with the new front value
//! `S_f^{n+1}`. For a trial front the rows `j = 2 ..= J` form a tridiagonal
//! system in the prices; the row `j = 1` is then a scalar equation in the
//! front alone, solved by a bracketed secant iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{initial_state, FrontFixedSolution, FrontFixedState, GridSpec, ModelParams, Scheme};
use crate::tridiag;

/// Band coefficients of one implicit row, `a p_{j-1} + b p_j + c p_{j+1} = p_j^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeCoefficients {
    pub a_bar: f64,
    pub b_bar: f64,
    pub c_bar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSolverConfig {
    /// Absolute tolerance on the scalar front residual.
    pub residual_tol: f64,
    /// Absolute tolerance on successive front iterates.
    pub sf_tol: f64,
    pub max_iters: usize,
    /// Smallest front value tried while bracketing.
    pub bracket_floor: f64,
}

impl Default for StepSolverConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-12,
            sf_tol: 1e-14,
            max_iters: 100,
            bracket_floor: 1e-6,
        }
    }
}

impl StepSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0 && self.sf_tol > 0.0 && self.bracket_floor > 0.0) {
            return Err(Error::invalid("solver tolerances must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub iterations: usize,
    /// Absolute value of the row-1 residual at the accepted front.
    pub residual: f64,
    /// Number of inner solves that fell back to the pivoted elimination.
    pub pivoted_solves: usize,
}

/// Totals over a whole solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub steps: usize,
    pub total_iterations: usize,
    pub max_iterations: usize,
    pub max_residual: f64,
    pub pivoted_solves: usize,
}

impl SolveStats {
    fn record(&mut self, s: &StepStats) {
        self.steps += 1;
        self.total_iterations += s.iterations;
        self.max_iterations = self.max_iterations.max(s.iterations);
        self.max_residual = self.max_residual.max(s.residual);
        self.pivoted_solves += s.pivoted_solves;
    }
}

pub fn coefficients(params: &ModelParams, grid: &GridSpec, sf_prev: f64, sf_next: f64) -> Result<SchemeCoefficients> {
    if !(sf_next > 0.0) {
        return Err(Error::SingularFront(sf_next));
    }
    let half_mu = 0.5 * grid.mu;
    let s2 = params.sigma2();
    let drift = params.drift() * grid.dx;
    let front = (sf_next - sf_prev) / (sf_next * 2.0 * grid.dx);
    Ok(SchemeCoefficients {
        a_bar: half_mu * (-s2 + drift) + front,
        b_bar: 1.0 + grid.mu * s2 + params.r * grid.dtau,
        c_bar: half_mu * (-s2 - drift) - front,
    })
}

/// `(p_0, p_1)` implied by the front value: value matching, smooth pasting
/// and the PDE at `x = 0` with a ghost node at `-dx`.
pub fn boundary_pair(sf: f64, grid: &GridSpec, params: &ModelParams) -> (f64, f64) {
    let dx = grid.dx;
    let p0 = 1.0 - sf;
    let p1 = 1.0 + params.r * dx * dx / params.sigma2() - (1.0 + dx + 0.5 * dx * dx) * sf;
    (p0, p1)
}

/// Level-`n` values entering the right-hand side. `p_0` and `p_1` are
/// reconstructed from `S_f^n` through the boundary closure; for `n >= 1`
/// they equal the stored values, at `n = 0` they replace the flat start.
fn level_values(state: &FrontFixedState, grid: &GridSpec, params: &ModelParams) -> Vec<f64> {
    let mut p = state.p.clone();
    let (p0, p1) = boundary_pair(state.sf, grid, params);
    p[0] = p0;
    p[1] = p1;
    p
}

fn check_state(state: &FrontFixedState, grid: &GridSpec) -> Result<()> {
    if state.p.len() != grid.intervals + 1 {
        return Err(Error::invalid(format!(
            "state has {} nodes, grid expects {}",
            state.p.len(),
            grid.intervals + 1
        )));
    }
    if !(state.sf > 0.0 && state.sf <= 1.0) {
        return Err(Error::invalid(format!("front value {} outside (0, 1]", state.sf)));
    }
    Ok(())
}

/// Residual `F = A(S_f) p - f(S_f)` of the nonlinear step system, one entry
/// per row `j = 1 ..= J`. `candidate_p` holds `p_2 ..= p_J`.
pub fn assemble_residual(
    state_n: &FrontFixedState,
    candidate_p: &[f64],
    candidate_sf: f64,
    grid: &GridSpec,
    params: &ModelParams,
) -> Result<Vec<f64>> {
    check_state(state_n, grid)?;
    let j_max = grid.intervals;
    if candidate_p.len() != j_max - 1 {
        return Err(Error::invalid(format!(
            "candidate has {} prices, expected {}",
            candidate_p.len(),
            j_max - 1
        )));
    }
    let k = coefficients(params, grid, state_n.sf, candidate_sf)?;
    let old = level_values(state_n, grid, params);
    let (p0, p1) = boundary_pair(candidate_sf, grid, params);

    let mut p = Vec::with_capacity(j_max + 2);
    p.push(p0);
    p.push(p1);
    p.extend_from_slice(candidate_p);
    // zero ghost beyond x_inf
    p.push(0.0);

    Ok((1..=j_max)
        .map(|j| k.a_bar * p[j - 1] + k.b_bar * p[j] + k.c_bar * p[j + 1] - old[j])
        .collect())
}

/// Inner problem for a trial front: solves rows 2..=J for the prices and
/// returns the row-1 residual together with them.
struct Inner<'a> {
    params: &'a ModelParams,
    grid: &'a GridSpec,
    sf_prev: f64,
    old: Vec<f64>,
    pivoted: usize,
}

impl<'a> Inner<'a> {
    fn eval(&mut self, sf: f64) -> Result<(f64, Vec<f64>)> {
        let k = coefficients(self.params, self.grid, self.sf_prev, sf)?;
        let (p0, p1) = boundary_pair(sf, self.grid, self.params);
        let m = self.grid.intervals - 1;

        let lower = vec![k.a_bar; m - 1];
        let diag = vec![k.b_bar; m];
        let upper = vec![k.c_bar; m - 1];
        let mut rhs = self.old[2..].to_vec();
        rhs[0] -= k.a_bar * p1;

        let q = if tridiag::is_diagonally_dominant(&lower, &diag, &upper) {
            tridiag::thomas(&lower, &diag, &upper, &rhs)?
        } else {
            self.pivoted += 1;
            log::debug!(
                "step matrix not diagonally dominant at S_f = {sf} (a = {}, b = {}, c = {})",
                k.a_bar,
                k.b_bar,
                k.c_bar
            );
            tridiag::solve_pivoted(&lower, &diag, &upper, &rhs)?
        };

        let r = k.a_bar * p0 + k.b_bar * p1 + k.c_bar * q[0] - self.old[1];
        Ok((r, q))
    }

    fn residual(&mut self, sf: f64) -> Result<f64> {
        Ok(self.eval(sf)?.0)
    }
}

fn opposite(a: f64, b: f64) -> bool {
    (a < 0.0) != (b < 0.0)
}

/// One implicit time step.
pub fn step(
    state_n: &FrontFixedState,
    grid: &GridSpec,
    params: &ModelParams,
    cfg: &StepSolverConfig,
) -> Result<FrontFixedState> {
    step_with_stats(state_n, grid, params, cfg).map(|(s, _)| s)
}

pub fn step_with_stats(
    state_n: &FrontFixedState,
    grid: &GridSpec,
    params: &ModelParams,
    cfg: &StepSolverConfig,
) -> Result<(FrontFixedState, StepStats)> {
    check_state(state_n, grid)?;
    cfg.validate()?;

    let mut inner = Inner {
        params,
        grid,
        sf_prev: state_n.sf,
        old: level_values(state_n, grid, params),
        pivoted: 0,
    };

    let hi = state_n.sf;
    let f_hi = inner.residual(hi)?;
    let mut iterations = 0;

    let root = if f_hi.abs() <= cfg.residual_tol {
        hi
    } else {
        // Walk down from the previous front until the residual changes
        // sign. Steps grow geometrically but never more than halve the last
        // probe, so narrow sign windows close to zero are not jumped over.
        let floor = cfg.bracket_floor.min(hi);
        let mut width = 1e-3 * hi;
        let mut upper = (hi, f_hi);
        let (lo, f_lo) = loop {
            let lo = (hi - width).max(0.5 * upper.0).max(floor);
            let f_lo = inner.residual(lo)?;
            iterations += 1;
            if opposite(f_lo, f_hi) || f_lo == 0.0 {
                break (lo, f_lo);
            }
            if lo <= floor {
                return Err(Error::Bracketing { lo: floor, hi });
            }
            upper = (lo, f_lo);
            width *= 4.0;
        };
        if f_lo == 0.0 {
            lo
        } else {
            secant_in_bracket(&mut inner, (lo, f_lo), upper, cfg, &mut iterations)?
        }
    };

    let (r, q) = inner.eval(root)?;
    if inner.pivoted > 0 {
        log::warn!(
            "step {}: {} inner solves lacked diagonal dominance, used pivoted elimination",
            state_n.n + 1,
            inner.pivoted
        );
    }
    let (p0, p1) = boundary_pair(root, grid, params);
    let mut p = Vec::with_capacity(grid.intervals + 1);
    p.push(p0);
    p.push(p1);
    p.extend(q);

    let stats = StepStats {
        iterations,
        residual: r.abs(),
        pivoted_solves: inner.pivoted,
    };
    Ok((
        FrontFixedState {
            p,
            sf: root,
            n: state_n.n + 1,
        },
        stats,
    ))
}

/// Secant iteration kept inside a sign-change bracket; falls back to
/// bisection when the secant point leaves the bracket or the bracket stops
/// shrinking.
fn secant_in_bracket(
    inner: &mut Inner<'_>,
    lo: (f64, f64),
    hi: (f64, f64),
    cfg: &StepSolverConfig,
    iterations: &mut usize,
) -> Result<f64> {
    let (mut a, mut fa) = lo;
    let (mut b, mut fb) = hi;
    let (mut x0, mut f0) = hi;
    let (mut x1, mut f1) = lo;
    let mut widths = [b - a; 2];

    for it in 0..cfg.max_iters {
        *iterations += 1;
        let width = b - a;
        let stalled = it >= 2 && width > 0.5 * widths[0];
        let mut x = x1 - f1 * (x1 - x0) / (f1 - f0);
        if stalled || !x.is_finite() || x <= a || x >= b {
            x = 0.5 * (a + b);
        }
        let fx = inner.residual(x)?;

        if fx == 0.0 || fx.abs() <= cfg.residual_tol {
            return Ok(x);
        }
        if opposite(fx, fa) {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
        x0 = x1;
        f0 = f1;
        x1 = x;
        f1 = fx;
        widths = [widths[1], b - a];

        if (x1 - x0).abs() <= cfg.sf_tol || b - a <= cfg.sf_tol {
            // settle on the best of the bracket ends and the last iterate
            let best = [(a, fa), (b, fb), (x1, f1)]
                .into_iter()
                .min_by(|u, v| u.1.abs().total_cmp(&v.1.abs()))
                .unwrap();
            return Ok(best.0);
        }
    }
    let best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    Err(Error::NonConvergence {
        iterations: *iterations,
        last_sf: best.0,
        residual: best.1.abs(),
    })
}

/// Marches the implicit scheme from the initial state to maturity.
pub fn solve(params: &ModelParams, grid: &GridSpec, cfg: &StepSolverConfig) -> Result<FrontFixedSolution> {
    solve_with_stats(params, grid, cfg).map(|(s, _)| s)
}

pub fn solve_with_stats(
    params: &ModelParams,
    grid: &GridSpec,
    cfg: &StepSolverConfig,
) -> Result<(FrontFixedSolution, SolveStats)> {
    params.validate()?;
    cfg.validate()?;
    let mut states = Vec::with_capacity(grid.steps + 1);
    states.push(initial_state(grid));
    let mut stats = SolveStats::default();
    for n in 0..grid.steps {
        let (next, s) = step_with_stats(&states[n], grid, params, cfg).map_err(|e| Error::at_step(n + 1, e))?;
        stats.record(&s);
        states.push(next);
    }
    Ok((
        FrontFixedSolution {
            params: *params,
            grid: *grid,
            scheme: Scheme::Implicit,
            states,
        },
        stats,
    ))
}
