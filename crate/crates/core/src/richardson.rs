//! Richardson extrapolation, a posteriori error estimators and the
//! tolerance-driven refinement loop.
//!
//! With the grid ratio `mu` held fixed, halving `dx` quarters `dtau`, so
//! successive grids have refinement ratio `s = 4` in time.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::implicit::StepSolverConfig;
use crate::model::{build_grid, FrontFixedSolution, ModelParams, Scheme};

/// Time refinement ratio between successive grids at fixed `mu`.
pub const TIME_RATIO: f64 = 4.0;

fn check_ratio(s: f64, q0: f64) -> Result<f64> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::invalid(format!("refinement ratio must exceed 1, got {s}")));
    }
    if !(q0 > 0.0 && q0.is_finite()) {
        return Err(Error::invalid(format!("order must be positive, got {q0}")));
    }
    Ok(s.powf(q0) - 1.0)
}

/// `u_fine + (u_fine - u_coarse) / (s^q0 - 1)`.
pub fn extrapolate_once(u_coarse: f64, u_fine: f64, s: f64, q0: f64) -> Result<f64> {
    let d = check_ratio(s, q0)?;
    Ok(u_fine + (u_fine - u_coarse) / d)
}

/// Estimated error of `u_fine`: `(u_fine - u_coarse) / (s^q0 - 1)`.
pub fn estimate_error_r(u_coarse: f64, u_fine: f64, s: f64, q0: f64) -> Result<f64> {
    let d = check_ratio(s, q0)?;
    Ok((u_fine - u_coarse) / d)
}

/// Plain difference `u_fine - u_coarse`, a more conservative estimate.
pub fn estimate_error_s(u_coarse: f64, u_fine: f64) -> f64 {
    u_fine - u_coarse
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "vectors differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Component-wise [`estimate_error_r`].
pub fn estimate_error_r_vec(u_coarse: &[f64], u_fine: &[f64], s: f64, q0: f64) -> Result<Vec<f64>> {
    check_lengths(u_coarse, u_fine)?;
    let d = check_ratio(s, q0)?;
    Ok(u_coarse.iter().zip(u_fine).map(|(c, f)| (f - c) / d).collect())
}

/// Component-wise [`estimate_error_s`].
pub fn estimate_error_s_vec(u_coarse: &[f64], u_fine: &[f64]) -> Result<Vec<f64>> {
    check_lengths(u_coarse, u_fine)?;
    Ok(u_coarse.iter().zip(u_fine).map(|(c, f)| f - c).collect())
}

/// `log(|u_coarse - u_ref| / |u_fine - u_ref|) / log s`.
pub fn observed_order(u_coarse: f64, u_fine: f64, u_ref: f64, s: f64) -> Result<f64> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::invalid(format!("refinement ratio must exceed 1, got {s}")));
    }
    let ec = (u_coarse - u_ref).abs();
    let ef = (u_fine - u_ref).abs();
    if ec == 0.0 || ef == 0.0 {
        return Err(Error::DegenerateOrder);
    }
    Ok((ec.ln() - ef.ln()) / s.ln())
}

/// Triangle of repeated extrapolates `U[g][k]`, `0 <= k <= g <= G`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtrapolationTableau {
    pub s: f64,
    pub q0: f64,
    /// Order increment `q_{k+1} - q_k`.
    pub dq: f64,
    /// Row `g` holds `U[g][0] ..= U[g][g]`.
    pub rows: Vec<Vec<f64>>,
}

impl ExtrapolationTableau {
    /// `q_k = q0 + k dq`.
    pub fn order(&self, k: usize) -> f64 {
        self.q0 + k as f64 * self.dq
    }

    /// Number of levels `G + 1`.
    pub fn levels(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, g: usize, k: usize) -> Option<f64> {
        self.rows.get(g).and_then(|row| row.get(k)).copied()
    }

    /// Column `k`, of length `G + 1 - k`.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows.iter().filter_map(|row| row.get(k).copied()).collect()
    }

    /// The most extrapolated value `U[G][G]`.
    pub fn final_value(&self) -> f64 {
        *self
            .rows
            .last()
            .and_then(|r| r.last())
            .expect("tableau has at least two levels")
    }
}

/// `U[g+1][k+1] = U[g+1][k] + (U[g+1][k] - U[g][k]) / (s^{q_k} - 1)`.
pub fn build_tableau(values: &[f64], s: f64, q0: f64, dq: f64) -> Result<ExtrapolationTableau> {
    if values.len() < 2 {
        return Err(Error::invalid("tableau needs at least two values"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("tableau values must be finite"));
    }
    if !dq.is_finite() {
        return Err(Error::invalid("order increment must be finite"));
    }
    check_ratio(s, q0)?;
    let mut tab = ExtrapolationTableau {
        s,
        q0,
        dq,
        rows: Vec::with_capacity(values.len()),
    };
    for (g, &v) in values.iter().enumerate() {
        let mut row = Vec::with_capacity(g + 1);
        row.push(v);
        for k in 0..g {
            let q = tab.order(k);
            let prev = tab.rows[g - 1][k];
            row.push(extrapolate_once(prev, row[k], s, q)?);
        }
        tab.rows.push(row);
    }
    Ok(tab)
}

/// Estimated errors at one comparable time level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorSample {
    /// Coarse time index.
    pub n: usize,
    pub tau: f64,
    /// `max_j |e_r(p_j^n)|` over nodes shared by both grids.
    pub err_p_inf: f64,
    /// `e_r(S_f^n)`, signed.
    pub err_sf: f64,
}

/// One `(J, 2J)` comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementLevel {
    pub j_coarse: usize,
    pub n_coarse: usize,
    pub j_fine: usize,
    pub n_fine: usize,
    pub series: Vec<ErrorSample>,
    pub max_err_p: f64,
    pub max_abs_err_sf: f64,
    /// `e_s(S_f)` at the final level, reported alongside.
    pub final_err_s_sf: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementReport {
    pub eps: f64,
    pub mu: f64,
    pub x_inf: f64,
    pub scheme: Scheme,
    pub q0: f64,
    pub levels: Vec<RefinementLevel>,
    /// Index into `levels` of the accepted comparison.
    pub accepted_level: Option<usize>,
    pub accepted: bool,
}

impl RefinementReport {
    pub fn accepted(&self) -> Option<&RefinementLevel> {
        self.accepted_level.map(|i| &self.levels[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    pub eps: f64,
    /// Maximum number of `(J, 2J)` comparisons.
    pub max_levels: usize,
    /// Leading error order used by the estimator.
    pub q0: f64,
    pub solver: StepSolverConfig,
}

impl RefineOptions {
    pub fn new(eps: f64, max_levels: usize) -> Self {
        Self {
            eps,
            max_levels,
            q0: 1.0,
            solver: StepSolverConfig::default(),
        }
    }
}

/// Compares a coarse and a fine solve with the same `mu`.
///
/// Coarse level `n` aligns with fine level `4n` and node `j` with `2j`. If
/// the step counts are not in exact ratio, aligned levels stop at
/// `min(N_c, N_f / 4)` and the last levels of both solves are compared in
/// addition.
pub fn compare_levels(coarse: &FrontFixedSolution, fine: &FrontFixedSolution, q0: f64) -> Result<Vec<ErrorSample>> {
    let jc = coarse.grid.intervals;
    if fine.grid.intervals != 2 * jc {
        return Err(Error::invalid(
            "fine grid must have twice the intervals of the coarse grid",
        ));
    }
    let ratio = TIME_RATIO;
    let denom = check_ratio(ratio, q0)?;
    let nc = coarse.states.len() - 1;
    let nf = fine.states.len() - 1;
    let aligned = nc.min(nf / 4);

    let sample = |n: usize, c: usize, f: usize| {
        let (sc, sfi) = (&coarse.states[c], &fine.states[f]);
        let err_p_inf = (0..=jc)
            .map(|j| ((sfi.p[2 * j] - sc.p[j]) / denom).abs())
            .fold(0.0, f64::max);
        ErrorSample {
            n,
            tau: coarse.grid.tau(c),
            err_p_inf,
            err_sf: (sfi.sf - sc.sf) / denom,
        }
    };

    let mut out: Vec<ErrorSample> = (1..=aligned.min(nc.saturating_sub(1)))
        .map(|n| sample(n, n, 4 * n))
        .collect();
    if nc >= 1 {
        out.push(sample(nc, nc, nf));
    }
    Ok(out)
}

/// Doubles `J` from `j_start` until the estimated errors of both the
/// surface and the front stay within `eps` at every comparable time level.
pub fn refine_until(
    params: &ModelParams,
    x_inf: f64,
    mu: f64,
    j_start: usize,
    scheme: Scheme,
    opts: &RefineOptions,
) -> Result<RefinementReport> {
    params.validate()?;
    if !(opts.eps > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {}", opts.eps)));
    }
    if j_start < 3 {
        return Err(Error::invalid(format!("starting J must be at least 3, got {j_start}")));
    }
    if opts.max_levels < 1 {
        return Err(Error::invalid("at least one refinement level is required"));
    }
    check_ratio(TIME_RATIO, opts.q0)?;

    let mut report = RefinementReport {
        eps: opts.eps,
        mu,
        x_inf,
        scheme,
        q0: opts.q0,
        levels: Vec::new(),
        accepted_level: None,
        accepted: false,
    };

    let grid = build_grid(x_inf, j_start, mu, params.maturity)?;
    let mut coarse = crate::solve_scheme(scheme, params, &grid, &opts.solver)?;
    for g in 0..opts.max_levels {
        let fine_grid = coarse.grid.refined(params.maturity);
        let fine = crate::solve_scheme(scheme, params, &fine_grid, &opts.solver)?;
        let series = compare_levels(&coarse, &fine, opts.q0)?;
        let max_err_p = series.iter().map(|e| e.err_p_inf).fold(0.0, f64::max);
        let max_abs_err_sf = series.iter().map(|e| e.err_sf.abs()).fold(0.0, f64::max);
        let passed = max_err_p <= opts.eps && max_abs_err_sf <= opts.eps;
        log::info!(
            "refinement J={} -> {}: max e_r(p) = {max_err_p:.3e}, max |e_r(S_f)| = {max_abs_err_sf:.3e}",
            coarse.grid.intervals,
            fine.grid.intervals
        );
        report.levels.push(RefinementLevel {
            j_coarse: coarse.grid.intervals,
            n_coarse: coarse.grid.steps,
            j_fine: fine.grid.intervals,
            n_fine: fine.grid.steps,
            series,
            max_err_p,
            max_abs_err_sf,
            final_err_s_sf: estimate_error_s(coarse.final_front(), fine.final_front()),
            passed,
        });
        if passed {
            report.accepted_level = Some(g);
            report.accepted = true;
            return Ok(report);
        }
        coarse = fine;
    }
    Err(Error::ToleranceNotMet(Box::new(report)))
}
