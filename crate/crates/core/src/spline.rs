//! Not-a-knot cubic spline interpolation.

use crate::error::{Error, Result};
use crate::tridiag;

/// Piecewise cubic interpolant with continuous third derivative at the
/// second and penultimate knots.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn not_a_knot(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::invalid("spline abscissae and ordinates differ in length"));
        }
        if n < 2 {
            return Err(Error::invalid("spline needs at least two knots"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("spline knots must be strictly increasing"));
        }

        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        let m = match n {
            2 => vec![0.0, 0.0],
            // a single parabola through three points
            3 => {
                let c = 2.0 * (slope[1] - slope[0]) / (h[0] + h[1]);
                vec![c; 3]
            }
            _ => Self::solve_second_derivatives(&h, &slope),
        };

        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    fn solve_second_derivatives(h: &[f64], slope: &[f64]) -> Vec<f64> {
        let n = h.len() + 1;
        // Unknowns M_1 ..= M_{n-2}; M_0 and M_{n-1} are eliminated through the
        // not-a-knot conditions. Requires n >= 4.
        let k = n - 2;
        let mut lower = vec![0.0; k - 1];
        let mut diag = vec![0.0; k];
        let mut upper = vec![0.0; k - 1];
        let mut rhs = vec![0.0; k];

        for r in 0..k {
            let i = r + 1;
            diag[r] = 2.0 * (h[i - 1] + h[i]);
            rhs[r] = 6.0 * (slope[i] - slope[i - 1]);
            if r > 0 {
                lower[r - 1] = h[i - 1];
            }
            if r + 1 < k {
                upper[r] = h[i];
            }
        }

        // M_0 = ((h0 + h1) M_1 - h0 M_2) / h1
        let (h0, h1) = (h[0], h[1]);
        diag[0] += h0 * (h0 + h1) / h1;
        upper[0] -= h0 * h0 / h1;
        // M_{n-1} = ((hb + ha) M_{n-2} - hb M_{n-3}) / ha, ha = h[n-3], hb = h[n-2]
        let (ha, hb) = (h[n - 3], h[n - 2]);
        diag[k - 1] += hb * (ha + hb) / ha;
        lower[k - 2] -= hb * hb / ha;

        let inner = tridiag::thomas(&lower, &diag, &upper, &rhs)
            .or_else(|_| tridiag::solve_pivoted(&lower, &diag, &upper, &rhs))
            .expect("not-a-knot system is nonsingular for increasing knots");

        let mut m = Vec::with_capacity(n);
        m.push(((h0 + h1) * inner[0] - h0 * inner[1]) / h1);
        m.extend_from_slice(&inner);
        m.push(((ha + hb) * inner[k - 1] - hb * inner[k - 2]) / ha);
        m
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn lower(&self) -> f64 {
        self.x[0]
    }

    pub fn upper(&self) -> f64 {
        *self.x.last().unwrap()
    }

    /// Evaluates the spline. Points outside the knot range use the end
    /// polynomial pieces.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let idx = self.x.partition_point(|&v| v <= t);
        if idx > 0 && self.x[idx - 1] == t {
            return self.y[idx - 1];
        }
        let i = idx.clamp(1, n - 1) - 1;
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let (a, b) = (x1 - t, t - x0);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        m0 * a * a * a / (6.0 * h)
            + m1 * b * b * b / (6.0 * h)
            + (self.y[i] / h - m0 * h / 6.0) * a
            + (self.y[i + 1] / h - m1 * h / 6.0) * b
    }
}
