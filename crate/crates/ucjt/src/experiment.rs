//! Sweep orchestration: runs the requested engines over the sweep grid and
//! serializes the results as CSV with the full resolved configuration
//! embedded in a commented header, so any output file reproduces its run.
//!
//! Grid points are processed concurrently, but rows are always emitted in
//! grid order, and every grid point reuses the same per-drop random
//! streams — sweep curves vary smoothly because adjacent points share
//! their randomness.

use crate::analytic::{
    eta_analytic_with_grid, tau_analytic_with_grid, tau_farfield_only, AnalyticParams,
    QuadratureSpec,
};
use crate::config::{ExperimentConfig, Mode, SweepVar};
use crate::error::{Error, Result};
use crate::geometry::scheduling_probability;
use crate::schemes::Scheme;
use crate::simulator::simulate_throughput;
use rayon::prelude::*;
use std::fmt::Write as _;

/// One output row: the swept coordinate, the scheme, and whichever engine
/// results the mode produced. For a cell-radius sweep the values are
/// throughput tau (bit/s); for a separation sweep they are spatial
/// throughput eta (bit/s/m^2) and the far-field column is absent.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x_km: f64,
    pub scheme: Scheme,
    pub analytic: Option<f64>,
    pub farfield: Option<f64>,
    pub mc: Option<f64>,
    pub mc_ci95: Option<f64>,
}

/// A completed sweep: the configuration that produced it plus the rows in
/// grid order (schemes in configuration order within each grid point).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub rows: Vec<SweepRow>,
}

const CONFIG_BEGIN: &str = "# ucjt-config-begin";
const CONFIG_END: &str = "# ucjt-config-end";

fn with_point_context(e: Error, x_km: f64) -> Error {
    let ctx = format!("at grid point {x_km} km");
    match e {
        Error::Config(m) => Error::Config(format!("{ctx}: {m}")),
        Error::Numerical(m) => Error::Numerical(format!("{ctx}: {m}")),
        Error::Parse(m) => Error::Parse(format!("{ctx}: {m}")),
        Error::Io(e) => Error::Io(e),
    }
}

/// Runs the configured sweep: one row per (grid point, scheme).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    if cfg.mode != Mode::Montecarlo && cfg.schemes.iter().any(|s| *s != Scheme::Mrt) {
        return Err(Error::Config(
            "the transform engine models maximum ratio transmission only; \
             evaluate other schemes with --mode montecarlo"
                .into(),
        ));
    }
    let q = QuadratureSpec { rtol: cfg.rtol, atol: cfg.atol, ..QuadratureSpec::default() };
    let per_point: Result<Vec<Vec<SweepRow>>> = cfg
        .grid_km
        .par_iter()
        .map(|&x_km| grid_point_rows(cfg, x_km, &q).map_err(|e| with_point_context(e, x_km)))
        .collect();
    Ok(SweepResult { config: cfg.clone(), rows: per_point?.into_iter().flatten().collect() })
}

fn grid_point_rows(cfg: &ExperimentConfig, x_km: f64, q: &QuadratureSpec) -> Result<Vec<SweepRow>> {
    let net = cfg.network_at(x_km);
    let want_analytic = cfg.mode != Mode::Montecarlo;
    let want_mc = cfg.mode != Mode::Analytic;

    let (analytic, farfield) = if want_analytic {
        let p = AnalyticParams::with_split(net, cfg.near_far_split_m(&net));
        match cfg.sweep {
            SweepVar::C => (
                Some(tau_analytic_with_grid(&p, q, cfg.weight_grid)?),
                Some(tau_farfield_only(&p, q)?),
            ),
            SweepVar::D => (Some(eta_analytic_with_grid(&p, q, cfg.weight_grid)?), None),
        }
    } else {
        (None, None)
    };

    let mc = if want_mc {
        let estimates = simulate_throughput(
            &net,
            &cfg.schemes,
            cfg.drops as usize,
            cfg.fadings as usize,
            cfg.seed,
        )?;
        // A separation sweep reports area throughput: scale the per-user
        // rate by the density of scheduled users.
        let factor = match cfg.sweep {
            SweepVar::C => 1.0,
            SweepVar::D => {
                net.lambda_u_per_m2
                    * scheduling_probability(net.lambda_u_per_m2, net.min_separation_m)
            }
        };
        Some(
            estimates
                .into_iter()
                .map(|e| (e.mean * factor, e.ci95_halfwidth * factor))
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };

    Ok(cfg
        .schemes
        .iter()
        .enumerate()
        .map(|(k, &scheme)| SweepRow {
            x_km,
            scheme,
            analytic,
            farfield,
            mc: mc.as_ref().map(|v| v[k].0),
            mc_ci95: mc.as_ref().map(|v| v[k].1),
        })
        .collect())
}

fn x_column(sweep: SweepVar) -> &'static str {
    match sweep {
        SweepVar::C => "C_km",
        SweepVar::D => "D_km",
    }
}

/// Column names after the x column and before the trailing `scheme`.
fn value_columns(sweep: SweepVar, mode: Mode) -> Vec<&'static str> {
    let mut cols = Vec::new();
    match sweep {
        SweepVar::C => {
            if mode != Mode::Montecarlo {
                cols.push("tau_analytic");
                cols.push("tau_farfield");
            }
            if mode != Mode::Analytic {
                cols.push("tau_mc");
                cols.push("tau_mc_ci95");
            }
        }
        SweepVar::D => {
            if mode != Mode::Montecarlo {
                cols.push("eta_analytic");
            }
            if mode != Mode::Analytic {
                cols.push("eta_mc");
                cols.push("eta_mc_ci95");
            }
        }
    }
    cols
}

/// Serializes a sweep as CSV: the resolved config as `#`-commented TOML
/// between marker lines, a header row, then one data row per (grid point,
/// scheme). Floats print in shortest round-trip form, so parsing the file
/// back reproduces every value bit-identically.
pub fn write_csv(result: &SweepResult) -> String {
    let cfg = &result.config;
    let mut out = String::new();
    out.push_str(CONFIG_BEGIN);
    out.push('\n');
    for line in cfg.to_toml().lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(CONFIG_END);
    out.push('\n');

    let cols = value_columns(cfg.sweep, cfg.mode);
    out.push_str(x_column(cfg.sweep));
    for c in &cols {
        out.push(',');
        out.push_str(c);
    }
    out.push_str(",scheme\n");

    for row in &result.rows {
        let _ = write!(out, "{}", row.x_km);
        for c in &cols {
            let v = match *c {
                "tau_analytic" | "eta_analytic" => row.analytic,
                "tau_farfield" => row.farfield,
                "tau_mc" | "eta_mc" => row.mc,
                "tau_mc_ci95" | "eta_mc_ci95" => row.mc_ci95,
                _ => unreachable!("column list is fixed above"),
            };
            let v = v.expect("row fields match the mode's column set");
            let _ = write!(out, ",{v}");
        }
        let _ = writeln!(out, ",{}", row.scheme);
    }
    out
}

/// Parses a CSV file produced by [`write_csv`] back into a [`SweepResult`].
pub fn parse_csv(text: &str) -> Result<SweepResult> {
    let mut lines = text.lines();
    if lines.next() != Some(CONFIG_BEGIN) {
        return Err(Error::Parse(format!("expected `{CONFIG_BEGIN}` as the first line")));
    }
    let mut toml_text = String::new();
    for line in lines.by_ref() {
        if line == CONFIG_END {
            break;
        }
        let body = line
            .strip_prefix("# ")
            .or_else(|| line.strip_prefix('#'))
            .ok_or_else(|| Error::Parse(format!("unterminated config header at `{line}`")))?;
        toml_text.push_str(body);
        toml_text.push('\n');
    }
    let config = ExperimentConfig::from_toml(&toml_text)?;

    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing CSV header row".into()))?;
    let expected: Vec<String> = {
        let mut h = vec![x_column(config.sweep).to_string()];
        h.extend(value_columns(config.sweep, config.mode).iter().map(|s| s.to_string()));
        h.push("scheme".to_string());
        h
    };
    let found: Vec<&str> = header.split(',').collect();
    if found != expected.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(Error::Parse(format!(
            "CSV header `{header}` does not match the configured mode/sweep \
             (expected `{}`)",
            expected.join(",")
        )));
    }

    let cols = value_columns(config.sweep, config.mode);
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() + 2 {
            return Err(Error::Parse(format!(
                "data row {} has {} fields, expected {}",
                lineno + 1,
                fields.len(),
                cols.len() + 2
            )));
        }
        let parse_f64 = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number `{s}` on data row {}: {e}", lineno + 1)))
        };
        let x_km = parse_f64(fields[0])?;
        let mut row = SweepRow {
            x_km,
            scheme: fields[cols.len() + 1].parse()?,
            analytic: None,
            farfield: None,
            mc: None,
            mc_ci95: None,
        };
        for (c, field) in cols.iter().zip(&fields[1..]) {
            let v = Some(parse_f64(field)?);
            match *c {
                "tau_analytic" | "eta_analytic" => row.analytic = v,
                "tau_farfield" => row.farfield = v,
                "tau_mc" | "eta_mc" => row.mc = v,
                "tau_mc_ci95" | "eta_mc_ci95" => row.mc_ci95 = v,
                _ => unreachable!("column list is fixed above"),
            }
        }
        rows.push(row);
    }
    Ok(SweepResult { config, rows })
}
