//! Dense Newton oracle for the implicit step, shared by the property and
//! acceptance suites.

#![allow(dead_code)]

use frontfix::implicit;
use frontfix::{initial_state, Error, FrontFixedState, GridSpec, ModelParams, StepSolverConfig};
use nalgebra::{DMatrix, DVector};

/// Full step residual written out row by row, independent of the solver.
pub fn oracle_residual(prev: &FrontFixedState, z: &[f64], grid: &GridSpec, prm: &ModelParams) -> Vec<f64> {
    let jm = grid.intervals;
    let (dx, mu) = (grid.dx, grid.mu);
    let s2 = prm.sigma * prm.sigma;
    let sf = z[jm - 1];
    let sn = prev.sf;
    let close = |s: f64| (1.0 - s, 1.0 + prm.r * dx * dx / s2 - (1.0 + dx + dx * dx / 2.0) * s);

    let mut old = prev.p.clone();
    let (o0, o1) = close(sn);
    old[0] = o0;
    old[1] = o1;

    let (n0, n1) = close(sf);
    let mut p = vec![n0, n1];
    p.extend_from_slice(&z[..jm - 1]);
    p.push(0.0);

    let mv = (sf - sn) / (sf * 2.0 * dx);
    let a = mu / 2.0 * (-s2 + (prm.r - s2 / 2.0) * dx) + mv;
    let b = 1.0 + mu * s2 + prm.r * mu * dx * dx;
    let c = mu / 2.0 * (-s2 - (prm.r - s2 / 2.0) * dx) - mv;
    (1..=jm)
        .map(|j| a * p[j - 1] + b * p[j] + c * p[j + 1] - old[j])
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Newton on all `J` unknowns `(p_2 ..= p_J, S_f)` with a
/// finite-difference Jacobian and dense LU, started from `sf0`.
pub fn dense_newton(prev: &FrontFixedState, sf0: f64, grid: &GridSpec, prm: &ModelParams) -> Option<Vec<f64>> {
    let jm = grid.intervals;
    let mut z: Vec<f64> = prev.p[2..].to_vec();
    z.push(sf0);
    let mut f = oracle_residual(prev, &z, grid, prm);
    for _ in 0..200 {
        if f.iter().all(|v| v.abs() <= 1e-14) {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(jm, jm);
        for k in 0..jm {
            let h = 1e-7 * z[k].abs().max(1e-3);
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[k] += h;
            zm[k] -= h;
            let fp = oracle_residual(prev, &zp, grid, prm);
            let fm = oracle_residual(prev, &zm, grid, prm);
            for i in 0..jm {
                jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let delta = jac.lu().solve(&DVector::from_column_slice(&f))?;
        let f_norm = norm(&f);
        let mut t = 1.0;
        let mut stuck = false;
        loop {
            if t < 1e-10 {
                stuck = true;
                break;
            }
            let trial: Vec<f64> = z.iter().zip(delta.iter()).map(|(a, d)| a - t * d).collect();
            let sf = trial[jm - 1];
            if sf > 0.0 && sf <= 1.0 {
                let ft = oracle_residual(prev, &trial, grid, prm);
                if norm(&ft) < f_norm {
                    z = trial;
                    f = ft;
                    break;
                }
            }
            t *= 0.5;
        }
        if stuck {
            break;
        }
    }
    f.iter().all(|v| v.abs() <= 1e-13).then_some(z)
}

/// Roots reachable from a spread of starting fronts; the physically
/// relevant one is the largest front not above the previous level.
pub fn oracle_step(prev: &FrontFixedState, grid: &GridSpec, prm: &ModelParams) -> Option<Vec<f64>> {
    let jm = grid.intervals;
    let starts = [
        0.999, 0.99, 0.97, 0.95, 0.9, 0.85, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1,
    ];
    starts
        .iter()
        .filter_map(|f| dense_newton(prev, prev.sf * f, grid, prm))
        .filter(|z| z[jm - 1] <= prev.sf + 1e-14)
        .max_by(|a, b| a[jm - 1].total_cmp(&b[jm - 1]))
}

/// Marches up to `steps` levels comparing with the oracle to `tol`;
/// returns the number of levels that had an admissible root. A level
/// without one must be reported by the solver as a bracketing failure.
pub fn compare_with_oracle(prm: &ModelParams, grid: &GridSpec, steps: usize, tol: f64) -> Result<usize, String> {
    let cfg = StepSolverConfig::default();
    let mut state = initial_state(grid);
    for n in 0..steps {
        let solved = implicit::step(&state, grid, prm, &cfg);
        let Some(z) = oracle_step(&state, grid, prm) else {
            return match solved {
                Err(Error::Bracketing { .. }) => Ok(n),
                other => Err(format!(
                    "oracle has no root at level {} but the solver returned {other:?}",
                    n + 1
                )),
            };
        };
        let next = solved.map_err(|e| format!("solver failed at level {}: {e}", n + 1))?;
        let jm = grid.intervals;
        let mut worst = (next.sf - z[jm - 1]).abs();
        for j in 2..=jm {
            worst = worst.max((next.p[j] - z[j - 2]).abs());
        }
        if worst > tol {
            return Err(format!("level {}: max deviation {worst:e}", n + 1));
        }
        state = next;
    }
    Ok(steps)
}
