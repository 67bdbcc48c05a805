//! Browser bindings for the front-fixing pricer. The static page in `www/`
//! calls the three exported functions and draws the returned buffers on a
//! canvas.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curves;

use wasm_bindgen::prelude::*;

use curves::Inputs;

#[allow(clippy::too_many_arguments)]
fn inputs(
    r: f64,
    sigma: f64,
    maturity: f64,
    strike: f64,
    x_inf: f64,
    intervals: usize,
    mu: f64,
    explicit: bool,
) -> Inputs {
    Inputs {
        r,
        sigma,
        maturity,
        strike,
        x_inf,
        intervals,
        mu,
        explicit,
    }
}

/// `[tau, S*]` pairs of the early-exercise boundary.
#[wasm_bindgen(js_name = frontCurve)]
#[allow(clippy::too_many_arguments)]
pub fn front_curve(
    r: f64,
    sigma: f64,
    maturity: f64,
    strike: f64,
    x_inf: f64,
    intervals: usize,
    mu: f64,
    explicit: bool,
) -> Result<Vec<f64>, JsError> {
    curves::front_curve(&inputs(r, sigma, maturity, strike, x_inf, intervals, mu, explicit))
        .map_err(|e| JsError::new(&e))
}

/// Amplification moduli, `samples` phases per mu.
#[wasm_bindgen(js_name = amplificationCurves)]
pub fn amplification_curves(
    r: f64,
    sigma: f64,
    x_inf: f64,
    intervals: usize,
    mus: Vec<f64>,
    explicit: bool,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    let inp = inputs(r, sigma, 1.0, 1.0, x_inf, intervals, 1.0, explicit);
    curves::amplification_curves(&inp, &mus, samples).map_err(|e| JsError::new(&e))
}

/// `[S, P]` pairs of the option value at maturity.
#[wasm_bindgen(js_name = priceCurve)]
#[allow(clippy::too_many_arguments)]
pub fn price_curve(
    r: f64,
    sigma: f64,
    maturity: f64,
    strike: f64,
    x_inf: f64,
    intervals: usize,
    mu: f64,
    explicit: bool,
    s_min: f64,
    s_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    let inp = inputs(r, sigma, maturity, strike, x_inf, intervals, mu, explicit);
    curves::price_curve(&inp, s_min, s_max, points).map_err(|e| JsError::new(&e))
}
