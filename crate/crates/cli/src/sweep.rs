//! Grid sweeps across the three routes.

use std::time::Instant;

use kdv_gas::asymptotics::{self, Region, WhithamState};
use kdv_gas::gas::{self, GasOptions};
use kdv_gas::nsoliton;
use kdv_gas::spectral::{GasSpectrum, ReflectionCoefficient, SolitonEnsemble};
use kdv_gas::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Route, RunConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub x: f64,
    pub t: f64,
    pub u_exact: Option<f64>,
    pub u_gas: Option<f64>,
    pub u_asym: Option<f64>,
    pub region: &'static str,
    /// Why a requested column is empty, plus notes such as `asym_degenerate`.
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RouteTimes {
    pub exact: f64,
    pub gas: f64,
    pub asym: f64,
}

pub struct Sweep {
    pub rows: Vec<ComparisonRow>,
    /// Summed per-point time of each route, in seconds.
    pub route_seconds: RouteTimes,
    pub wall_seconds: f64,
}

fn guard_flag(route: &str, e: &Error) -> String {
    let kind = match e {
        Error::Overflow { .. } => "overflow",
        Error::Conditioning { .. } => "conditioning",
        Error::Range(_) => "range",
        Error::Degeneracy(_) => "degenerate",
        Error::Convergence(_) => "convergence",
        _ => "error",
    };
    format!("{route}_{kind}")
}

/// Region tag at `(x, t)`; at `t = 0` the sign of `x` decides.
pub fn region_at(x: f64, t: f64, spectrum: &GasSpectrum) -> &'static str {
    let xi = if t > 0.0 {
        x / (4.0 * t)
    } else if x < 0.0 {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    WhithamState::new(xi, spectrum)
        .map(|s| s.region)
        .unwrap_or(Region::ExponentialDecay)
        .tag()
}

struct Point {
    row: ComparisonRow,
    times: [f64; 3],
}

fn evaluate_point(
    x: f64,
    t: f64,
    cfg: &RunConfig,
    r: &ReflectionCoefficient,
    ensemble: Option<&SolitonEnsemble>,
) -> Point {
    let s = &cfg.spectrum;
    let mut row = ComparisonRow {
        x,
        t,
        u_exact: None,
        u_gas: None,
        u_asym: None,
        region: region_at(x, t, s),
        flags: Vec::new(),
    };
    let mut times = [0.0; 3];
    if let Some(ens) = ensemble {
        let start = Instant::now();
        match nsoliton::solve_potential(ens, x, t) {
            Ok(u) => row.u_exact = Some(u),
            Err(e) => row.flags.push(guard_flag("exact", &e)),
        }
        times[0] = start.elapsed().as_secs_f64();
    }
    if cfg.routes.contains(&Route::Gas) {
        let start = Instant::now();
        match gas::evaluate_with(s, r, x, t, &GasOptions::with_nodes(cfg.n_nodes)) {
            Ok(g) => row.u_gas = Some(g.u),
            Err(e) => row.flags.push(guard_flag("gas", &e)),
        }
        times[1] = start.elapsed().as_secs_f64();
    }
    if cfg.routes.contains(&Route::Asym) {
        let start = Instant::now();
        match asymptotics::asymptotic_point(x, t, s, r) {
            Ok(p) => {
                row.u_asym = Some(p.u);
                if p.degenerate {
                    row.flags.push("asym_degenerate".into());
                }
            }
            Err(e) => row.flags.push(guard_flag("asym", &e)),
        }
        times[2] = start.elapsed().as_secs_f64();
    }
    Point { row, times }
}

/// Evaluates every requested route on the grid, `t`-major then `x`.
///
/// Points run on a bounded pool; the row order does not depend on scheduling.
/// Guard failures become flags and never abort the sweep.
pub fn run(cfg: &RunConfig, r: &ReflectionCoefficient) -> anyhow::Result<Sweep> {
    let start = Instant::now();
    let ensemble = if cfg.routes.contains(&Route::Exact) {
        Some(SolitonEnsemble::from_gas(cfg.ensemble_n, &cfg.spectrum, r)?)
    } else {
        None
    };
    let xs = cfg.grid.xs();
    let points: Vec<(f64, f64)> = cfg
        .grid
        .t
        .iter()
        .flat_map(|&t| xs.iter().map(move |&x| (x, t)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build()?;
    let done: Vec<Point> = pool.install(|| {
        points
            .par_iter()
            .map(|&(x, t)| evaluate_point(x, t, cfg, r, ensemble.as_ref()))
            .collect()
    });
    let mut route_seconds = RouteTimes::default();
    for p in &done {
        route_seconds.exact += p.times[0];
        route_seconds.gas += p.times[1];
        route_seconds.asym += p.times[2];
    }
    Ok(Sweep {
        rows: done.into_iter().map(|p| p.row).collect(),
        route_seconds,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Largest `|a − b|` over rows where both columns are present.
pub fn max_diff(rows: &[ComparisonRow], a: Route, b: Route) -> Option<f64> {
    let pick = |r: &ComparisonRow, route| match route {
        Route::Exact => r.u_exact,
        Route::Gas => r.u_gas,
        Route::Asym => r.u_asym,
    };
    rows.iter()
        .filter_map(|r| Some((pick(r, a)? - pick(r, b)?).abs()))
        .reduce(f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Grid;

    #[test]
    fn rows_are_t_major_and_flag_guards() {
        let cfg = RunConfig {
            grid: Grid {
                x_min: -1.0,
                x_max: 1.0,
                nx: 3,
                t: vec![0.0, 50.0],
            },
            routes: vec![Route::Gas, Route::Asym],
            n_nodes: 16,
            jobs: Some(2),
            ..RunConfig::default()
        };
        let r = cfg.validate().unwrap();
        let sweep = run(&cfg, &r).unwrap();
        let order: Vec<(f64, f64)> = sweep.rows.iter().map(|r| (r.t, r.x)).collect();
        assert_eq!(
            order,
            vec![(0.0, -1.0), (0.0, 0.0), (0.0, 1.0), (50.0, -1.0), (50.0, 0.0), (50.0, 1.0)]
        );
        // t = 0, x >= 0 has no asymptotic formula; t = 50 overflows the gas route.
        assert_eq!(sweep.rows[1].flags, vec!["asym_range".to_string()]);
        assert!(sweep.rows[3..].iter().all(|r| r.u_gas.is_none() && r.flags.contains(&"gas_overflow".into())));
        assert!(sweep.rows[3..].iter().all(|r| r.u_asym.is_some()));
    }

    #[test]
    fn region_tags() {
        let s = GasSpectrum::reference();
        assert_eq!(region_at(-3.0, 0.0, &s), "unmodulated");
        assert_eq!(region_at(3.0, 0.0, &s), "decay");
        assert_eq!(region_at(0.0, 1.0, &s), "modulated");
    }
}
