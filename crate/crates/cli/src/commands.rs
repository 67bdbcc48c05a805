use std::time::Instant;

use frontfix::explicit::explicit_solve;
use frontfix::implicit::solve_with_stats;
use frontfix::richardson::{build_tableau, extrapolate_once, refine_until, RefineOptions, RefinementReport};
use frontfix::stability::{stability_scan, FrozenFrontTerm};
use frontfix::{
    build_grid, Error, FrontFixedSolution, GridSpec, ModelParams, PriceCurve, Scheme, SolveStats, StepSolverConfig,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt_f64, write_atomic, write_json, Csv};

/// Reference prices for the `E = 100, T = 3` price table, shipped for
/// side-by-side display only.
const REFERENCE_PRICES: &str = include_str!("../data/reference_prices.csv");

/// Phase samples per stability scan.
const STABILITY_SAMPLES: usize = 181;

/// Error marker written in place of a price that cannot be evaluated.
pub const OUT_OF_DOMAIN: &str = "out_of_domain";

fn run_solver(cfg: &RunConfig, grid: &GridSpec) -> Result<(FrontFixedSolution, Option<SolveStats>), CliError> {
    match cfg.scheme {
        Scheme::Implicit => {
            let (sol, stats) = solve_with_stats(&cfg.params, grid, &StepSolverConfig::default())?;
            Ok((sol, Some(stats)))
        }
        Scheme::Explicit => Ok((explicit_solve(&cfg.params, grid)?, None)),
    }
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    params: &'a ModelParams,
    grid: &'a GridSpec,
    scheme: Scheme,
    final_front: f64,
    wall_time_s: f64,
    stats: Option<SolveStats>,
}

pub fn solve(cfg: &RunConfig) -> Result<(), CliError> {
    let grid = cfg.grid()?;
    let start = Instant::now();
    let (sol, stats) = run_solver(cfg, &grid)?;
    let wall = start.elapsed().as_secs_f64();

    let mut surface = Csv::new(&["n", "tau", "j", "x", "p"]);
    let mut front = Csv::new(&["n", "tau", "S_f"]);
    for state in &sol.states {
        let tau = fmt_f64(grid.tau(state.n));
        for (j, p) in state.p.iter().enumerate() {
            surface.row([
                state.n.to_string(),
                tau.clone(),
                j.to_string(),
                fmt_f64(grid.x(j)),
                fmt_f64(*p),
            ]);
        }
        front.row([state.n.to_string(), tau, fmt_f64(state.sf)]);
    }
    let summary = SolveSummary {
        params: &cfg.params,
        grid: &grid,
        scheme: cfg.scheme,
        final_front: sol.final_front(),
        wall_time_s: wall,
        stats,
    };
    write_atomic(&cfg.out, "surface.csv", surface.into_string().as_bytes())?;
    write_atomic(&cfg.out, "front.csv", front.into_string().as_bytes())?;
    write_json(&cfg.out, "summary.json", &summary)?;
    println!(
        "{} J={} N={} S_f^N={:.7} ({wall:.3} s)",
        cfg.scheme,
        grid.intervals,
        grid.steps,
        sol.final_front()
    );
    Ok(())
}

pub fn extrapolate(cfg: &RunConfig, levels: usize) -> Result<(), CliError> {
    if levels < 1 {
        return Err(CliError::Invalid(
            "invalid argument: at least one extrapolation level is required".into(),
        ));
    }
    let grids = (0..=levels)
        .map(|g| {
            let j = cfg
                .intervals
                .checked_shl(g as u32)
                .filter(|j| j >> g == cfg.intervals)
                .ok_or_else(|| {
                    CliError::Invalid(format!("invalid argument: J = {} * 2^{g} overflows", cfg.intervals))
                })?;
            cfg.grid_with(j)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut fronts = Vec::with_capacity(grids.len());
    for grid in &grids {
        let (sol, _) = run_solver(cfg, grid)?;
        log::info!("J={} N={} S_f^N={}", grid.intervals, grid.steps, sol.final_front());
        fronts.push(sol.final_front());
    }
    let tab = build_tableau(&fronts, 4.0, 1.0, 1.0)?;

    let header: Vec<String> = std::iter::once("N".to_string())
        .chain((0..=levels).map(|k| format!("U{k}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&header);
    for (g, grid) in grids.iter().enumerate() {
        let cells = std::iter::once(grid.steps.to_string())
            .chain((0..=levels).map(|k| tab.get(g, k).map(fmt_f64).unwrap_or_default()));
        csv.row(cells);
    }
    write_atomic(&cfg.out, "tableau.csv", csv.into_string().as_bytes())?;
    println!("final extrapolate U{levels},{levels} = {:.7}", tab.final_value());
    Ok(())
}

fn write_refinement(cfg: &RunConfig, rep: &RefinementReport, j_start: usize) -> Result<(), CliError> {
    write_json(&cfg.out, "refine_report.json", rep)?;
    if let Some(level) = rep.accepted() {
        let g = (level.j_fine / j_start).trailing_zeros();
        let mut csv = Csv::new(&["n", "tau", "err_p_inf", "err_sf"]);
        for s in &level.series {
            csv.row([s.n.to_string(), fmt_f64(s.tau), fmt_f64(s.err_p_inf), fmt_f64(s.err_sf)]);
        }
        write_atomic(&cfg.out, &format!("errors_g{g}.csv"), csv.into_string().as_bytes())?;
    }
    Ok(())
}

pub fn refine(cfg: &RunConfig, eps: f64, levels: usize) -> Result<(), CliError> {
    let opts = RefineOptions::new(eps, levels);
    match refine_until(&cfg.params, cfg.x_inf, cfg.mu, cfg.intervals, cfg.scheme, &opts) {
        Ok(rep) => {
            write_refinement(cfg, &rep, cfg.intervals)?;
            if let Some(level) = rep.accepted() {
                println!("accepted J={} N={}", level.j_fine, level.n_fine);
            }
            Ok(())
        }
        Err(Error::ToleranceNotMet(rep)) => {
            write_refinement(cfg, &rep, cfg.intervals)?;
            Err(CliError::ToleranceNotMet(format!(
                "tolerance {eps} not met after {} levels; partial report written",
                rep.levels.len()
            )))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct StabilityVerdict {
    mu: f64,
    steps: usize,
    max_modulus: f64,
    stable: bool,
}

pub fn stability(cfg: &RunConfig, mus: &[f64]) -> Result<(), CliError> {
    if mus.is_empty() {
        return Err(CliError::Invalid("invalid argument: the mu list is empty".into()));
    }
    let mut csv = Csv::new(&["mu", "N", "k_dx", "modulus"]);
    let mut verdicts = Vec::with_capacity(mus.len());
    for &mu in mus {
        let grid = build_grid(cfg.x_inf, cfg.intervals, mu, cfg.params.maturity)?;
        let rep = stability_scan(
            cfg.scheme,
            &cfg.params,
            mu,
            grid.dx,
            FrozenFrontTerm(0.0),
            STABILITY_SAMPLES,
        )?;
        for &(phase, modulus) in &rep.samples {
            csv.row([fmt_f64(mu), grid.steps.to_string(), fmt_f64(phase), fmt_f64(modulus)]);
        }
        println!(
            "{} mu={mu} N={} max|lambda|={:.6} {}",
            cfg.scheme,
            grid.steps,
            rep.max_modulus,
            if rep.stable { "stable" } else { "unstable" }
        );
        verdicts.push(StabilityVerdict {
            mu,
            steps: grid.steps,
            max_modulus: rep.max_modulus,
            stable: rep.stable,
        });
    }
    write_atomic(&cfg.out, "stability.csv", csv.into_string().as_bytes())?;
    write_json(&cfg.out, "stability_summary.json", &verdicts)?;
    Ok(())
}

/// Reference row for one asset level: true value and three comparison
/// methods.
fn reference_row(asset: f64) -> Option<[String; 4]> {
    REFERENCE_PRICES.lines().skip(1).find_map(|line| {
        let cells: Vec<&str> = line.split(',').collect();
        let s: f64 = cells.first()?.parse().ok()?;
        (s == asset && cells.len() == 5).then(|| {
            [
                cells[1].to_string(),
                cells[2].to_string(),
                cells[3].to_string(),
                cells[4].to_string(),
            ]
        })
    })
}

fn price_cell(curve: &PriceCurve, asset: f64) -> Result<String, CliError> {
    match curve.price(asset) {
        Ok(v) => Ok(fmt_f64(v)),
        Err(Error::OutOfDomain { .. }) => Ok(OUT_OF_DOMAIN.to_string()),
        Err(e) => Err(e.into()),
    }
}

pub fn price(cfg: &RunConfig, assets: &[f64], with_extrapolation: bool, with_reference: bool) -> Result<(), CliError> {
    if assets.is_empty() {
        return Err(CliError::Invalid("invalid argument: the asset list is empty".into()));
    }
    if let Some(a) = assets.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(CliError::Invalid(format!(
            "invalid argument: asset prices must be positive, got {a}"
        )));
    }
    let grid = cfg.grid()?;
    let fine_grid = if with_extrapolation {
        Some(cfg.grid_with(2 * cfg.intervals)?)
    } else {
        None
    };
    let (sol, _) = run_solver(cfg, &grid)?;
    let curve = PriceCurve::new(sol.final_state(), &grid, &cfg.params)?;
    let fine_curve = match &fine_grid {
        Some(g) => {
            let (fine, _) = run_solver(cfg, g)?;
            Some(PriceCurve::new(fine.final_state(), g, &cfg.params)?)
        }
        None => None,
    };

    let mut header = vec!["S", "price"];
    if with_extrapolation {
        header.push("extrapolated");
    }
    if with_reference {
        header.extend(["true", "pm", "em", "emr"]);
    }
    let mut csv = Csv::new(&header);
    let mut out_of_domain = Vec::new();
    for &asset in assets {
        let mut row = vec![fmt_f64(asset), price_cell(&curve, asset)?];
        if let Some(fine) = &fine_curve {
            let cell = match (curve.price(asset), fine.price(asset)) {
                (Ok(c), Ok(f)) => fmt_f64(extrapolate_once(c, f, 4.0, 1.0)?),
                _ => OUT_OF_DOMAIN.to_string(),
            };
            row.push(cell);
        }
        if row.iter().any(|c| c == OUT_OF_DOMAIN) {
            out_of_domain.push(asset);
        }
        if with_reference {
            match reference_row(asset) {
                Some(r) => row.extend(r),
                None => row.extend(std::iter::repeat_n(String::new(), 4)),
            }
        }
        println!("{}", row.join(","));
        csv.row(row);
    }
    write_atomic(&cfg.out, "prices.csv", csv.into_string().as_bytes())?;
    if out_of_domain.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invalid(format!(
            "out of domain: asset prices {out_of_domain:?} lie above the truncated domain (max {:.6})",
            curve.max_asset()
        )))
    }
}
