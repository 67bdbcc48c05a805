//! Tridiagonal linear solvers.
//!
//! The system is given by its three bands: `lower[i]` multiplies `x[i]` in
//! row `i + 1`, `upper[i]` multiplies `x[i + 1]` in row `i`. Both off-bands
//! have length `n - 1`.

use crate::error::{Error, Result};

fn check_bands(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<usize> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::invalid("empty tridiagonal system"));
    }
    if lower.len() != n - 1 || upper.len() != n - 1 || rhs.len() != n {
        return Err(Error::invalid(format!(
            "band lengths ({}, {}, {}) and rhs length {} do not match order {}",
            lower.len(),
            n,
            upper.len(),
            rhs.len(),
            n
        )));
    }
    Ok(n)
}

/// Row-wise weak diagonal dominance with at least one strict row.
pub fn is_diagonally_dominant(lower: &[f64], diag: &[f64], upper: &[f64]) -> bool {
    let n = diag.len();
    let mut strict = false;
    for i in 0..n {
        let mut off = 0.0;
        if i > 0 {
            off += lower[i - 1].abs();
        }
        if i + 1 < n {
            off += upper[i].abs();
        }
        let d = diag[i].abs();
        if d < off {
            return false;
        }
        if d > off {
            strict = true;
        }
    }
    strict
}

/// Thomas algorithm, no pivoting.
pub fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = check_bands(lower, diag, upper, rhs)?;
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];

    let mut pivot = diag[0];
    if pivot == 0.0 {
        return Err(Error::invalid("zero pivot in Thomas elimination"));
    }
    if n > 1 {
        c[0] = upper[0] / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i - 1] * c[i - 1];
        if pivot == 0.0 {
            return Err(Error::invalid("zero pivot in Thomas elimination"));
        }
        if i + 1 < n {
            c[i] = upper[i] / pivot;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Gaussian elimination with partial pivoting on the band (LAPACK `gtsv`
/// style). Row swaps introduce a second super-diagonal, kept in `du2`.
pub fn solve_pivoted(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = check_bands(lower, diag, upper, rhs)?;
    let mut dl = lower.to_vec();
    let mut d = diag.to_vec();
    let mut du = upper.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut b = rhs.to_vec();

    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                return Err(Error::invalid("singular tridiagonal system"));
            }
            let m = dl[i] / d[i];
            d[i + 1] -= m * du[i];
            b[i + 1] -= m * b[i];
            dl[i] = 0.0;
        } else {
            // swap rows i and i+1
            let m = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - m * tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -m * du2[i];
            }
            du[i] = tmp;
            b.swap(i, i + 1);
            b[i + 1] -= m * b[i];
        }
    }
    if d[n - 1] == 0.0 {
        return Err(Error::invalid("singular tridiagonal system"));
    }

    let mut x = vec![0.0; n];
    x[n - 1] = b[n - 1] / d[n - 1];
    if n > 1 {
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    Ok(x)
}

/// `y = A x` for a tridiagonal `A`.
pub fn mat_vec(lower: &[f64], diag: &[f64], upper: &[f64], x: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut acc = diag[i] * x[i];
            if i > 0 {
                acc += lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += upper[i] * x[i + 1];
            }
            acc
        })
        .collect()
}
