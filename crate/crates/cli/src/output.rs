use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::config::{Format, Route, RunConfig};
use crate::sweep::{self, ComparisonRow, RouteTimes, Sweep};

pub const HEADER: [&str; 7] = ["x", "t", "u_exact", "u_gas", "u_asym", "region", "flags"];

/// Seventeen significant digits, so every `f64` round-trips.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[ComparisonRow], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            fmt_f64(r.x),
            fmt_f64(r.t),
            fmt_opt(r.u_exact),
            fmt_opt(r.u_gas),
            fmt_opt(r.u_asym),
            r.region.to_string(),
            r.flags.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Generic table writer used by the smaller subcommands.
pub fn write_table<W: Write>(header: &[&str], rows: &[Vec<f64>], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|&v| fmt_f64(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Opens `path`, or standard output when `None`.
pub fn sink(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `run.csv` → `run.summary.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub wall_seconds: f64,
    pub route_seconds: RouteTimes,
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub command: &'a str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub rows: usize,
    pub flagged_rows: usize,
    pub flag_counts: BTreeMap<String, usize>,
    pub max_abs_diff: BTreeMap<&'static str, f64>,
    pub timings: Timings,
}

impl<'a> Summary<'a> {
    pub fn new(command: &'a str, config: &'a RunConfig, sweep: &Sweep) -> Self {
        let mut flag_counts = BTreeMap::new();
        for f in sweep.rows.iter().flat_map(|r| &r.flags) {
            *flag_counts.entry(f.clone()).or_insert(0) += 1;
        }
        let mut max_abs_diff = BTreeMap::new();
        for (name, a, b) in [
            ("exact_gas", Route::Exact, Route::Gas),
            ("gas_asym", Route::Gas, Route::Asym),
            ("exact_asym", Route::Exact, Route::Asym),
        ] {
            if let Some(d) = sweep::max_diff(&sweep.rows, a, b) {
                max_abs_diff.insert(name, d);
            }
        }
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            rows: sweep.rows.len(),
            flagged_rows: sweep.rows.iter().filter(|r| !r.flags.is_empty()).count(),
            flag_counts,
            max_abs_diff,
            timings: Timings {
                wall_seconds: sweep.wall_seconds,
                route_seconds: sweep.route_seconds.clone(),
            },
        }
    }
}

/// Writes the dataset in the configured format plus the sidecar summary.
pub fn emit(command: &str, cfg: &RunConfig, sweep: &Sweep) -> anyhow::Result<()> {
    let path = cfg.output.path.as_deref();
    let mut out = sink(path)?;
    match cfg.output.format {
        Format::Csv => write_csv(&sweep.rows, &mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &sweep.rows)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    let summary = serde_json::to_string_pretty(&Summary::new(command, cfg, sweep))?;
    match path {
        Some(p) => {
            let side = sidecar_path(p);
            std::fs::write(&side, summary + "\n").with_context(|| format!("cannot write {}", side.display()))?;
        }
        None => eprintln!("{summary}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(-0.1), "-1.0000000000000001e-1");
        for v in [std::f64::consts::PI, -2.227551525235824, 1e-300, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn empty_columns_stay_empty() {
        let rows = vec![ComparisonRow {
            x: 1.0,
            t: 0.0,
            u_exact: None,
            u_gas: Some(-0.5),
            u_asym: None,
            region: "decay",
            flags: vec!["asym_range".into()],
        }];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "x,t,u_exact,u_gas,u_asym,region,flags\n1.0000000000000000e0,0.0000000000000000e0,,-5.0000000000000000e-1,,decay,asym_range\n"
        );
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("a/run.csv")), PathBuf::from("a/run.summary.json"));
    }
}
