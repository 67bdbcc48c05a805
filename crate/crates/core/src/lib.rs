//! Front-fixing finite-difference pricing of American puts without
//! dividends.
//!
//! The early-exercise boundary is mapped to `x = 0` by a logarithmic change
//! of variable and solved for together with the option surface, either by
//! the implicit scheme in [`implicit`] or by the explicit baseline in
//! [`explicit`]. [`stability`] evaluates Von Neumann amplification factors
//! of both schemes and [`richardson`] provides repeated extrapolation,
//! a posteriori error estimates and tolerance-driven grid refinement.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod explicit;
pub mod implicit;
pub mod model;
pub mod richardson;
pub mod spline;
pub mod stability;
pub mod tridiag;

pub use error::{Error, Result};
pub use implicit::{SolveStats, StepSolverConfig};
pub use model::{
    build_grid, initial_state, FrontFixedSolution, FrontFixedState, GridSpec, ModelParams, PriceCurve, Scheme,
};

/// Solves with the requested scheme. The explicit scheme ignores `cfg`.
pub fn solve_scheme(
    scheme: Scheme,
    params: &ModelParams,
    grid: &GridSpec,
    cfg: &StepSolverConfig,
) -> Result<FrontFixedSolution> {
    match scheme {
        Scheme::Implicit => implicit::solve(params, grid, cfg),
        Scheme::Explicit => explicit::explicit_solve(params, grid),
    }
}
