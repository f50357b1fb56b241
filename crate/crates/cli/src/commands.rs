use std::io::Write;

use anyhow::Context;
use kdv_gas::asymptotics::{self, GMode, WhithamState};
use kdv_gas::special::{self, EllipticData};
use kdv_gas::validation::{Suite, CRITERION_IDS};
use serde::Serialize;
use serde_json::json;

use crate::config::{ConfigError, Format, RunConfig};
use crate::output;
use crate::sweep;
use crate::Common;

pub fn eval(command: &str, cfg: RunConfig) -> anyhow::Result<bool> {
    let r = cfg.validate()?;
    let result = sweep::run(&cfg, &r)?;
    output::emit(command, &cfg, &result)?;
    Ok(true)
}

/// `(ξ, α, m_α, 2K(m_α)/η₂, 2α²)` from `α = η₁` (at `ξ_crit`) up to the
/// largest non-degenerate `α`.
pub fn whitham_rows(cfg: &RunConfig, samples: usize) -> anyhow::Result<Vec<Vec<f64>>> {
    let s = &cfg.spectrum;
    let top = asymptotics::alpha_max(s);
    (0..samples)
        .map(|k| {
            let alpha = s.eta1 + (top - s.eta1) * k as f64 / (samples - 1) as f64;
            let m = alpha / s.eta2;
            let xi = if k == 0 {
                asymptotics::xi_crit(s)
            } else {
                asymptotics::whitham_xi_of_alpha(alpha, s)?
            };
            let period = 2.0 * special::elliptic_k(m)? / s.eta2;
            Ok(vec![xi, alpha, m, period, 2.0 * alpha * alpha])
        })
        .collect()
}

pub fn whitham(cfg: RunConfig, samples: usize) -> anyhow::Result<bool> {
    cfg.validate()?;
    if samples < 2 {
        return Err(ConfigError(format!("--samples must be at least 2, got {samples}")).into());
    }
    let rows = whitham_rows(&cfg, samples)?;
    let s = &cfg.spectrum;
    let markers = json!({
        "xi_crit": asymptotics::xi_crit(s),
        "eta2_squared": s.eta2 * s.eta2,
        "alpha_max": asymptotics::alpha_max(s),
        "samples": samples,
    });
    let header = ["xi", "alpha", "m_alpha", "period", "amplitude"];
    let path = cfg.output.path.as_deref();
    let mut out = output::sink(path)?;
    match cfg.output.format {
        Format::Csv => {
            output::write_table(&header, &rows, &mut out)?;
            let text = serde_json::to_string_pretty(&markers)?;
            match path {
                Some(p) => std::fs::write(output::sidecar_path(p), text + "\n")?,
                None => eprintln!("{text}"),
            }
        }
        Format::Json => {
            let table: Vec<_> = rows
                .iter()
                .map(|r| header.iter().zip(r).map(|(h, v)| (h.to_string(), json!(v))).collect::<serde_json::Map<_, _>>())
                .collect();
            let doc = json!({ "markers": markers, "rows": table });
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(true)
}

pub fn phases(cfg: RunConfig, xi: Option<f64>) -> anyhow::Result<bool> {
    let r = cfg.validate()?;
    let s = &cfg.spectrum;
    let d = EllipticData::new(s.modulus())?;
    let p = asymptotics::phase_data(s, &r)?;
    let g = asymptotics::g_diagnostics(s, GMode::Static, 64)?;
    let mut doc = json!({
        "spectrum": s,
        "reflection": r.spec(),
        "modulus": d.m,
        "elliptic_k": d.k,
        "elliptic_e": d.e,
        "omega": p.omega,
        "delta": p.delta,
        "phi": p.phi,
        "kappa": p.kappa,
        "xi_crit": asymptotics::xi_crit(s),
        "eta2_squared": s.eta2 * s.eta2,
        "g_static": g,
    });
    if let Some(xi) = xi {
        if !xi.is_finite() {
            return Err(ConfigError(format!("--xi must be finite, got {xi}")).into());
        }
        let state = WhithamState::new(xi, s)?;
        let mut at = json!({ "state": state, "region": state.region.tag() });
        if state.region == asymptotics::Region::ModulatedWave && !state.degenerate {
            at["modulated"] = json!(asymptotics::phases_modulated(state.alpha, s, &r)?);
        }
        if state.region != asymptotics::Region::ExponentialDecay {
            at["g_report"] = json!(asymptotics::g_diagnostics(s, GMode::Time { xi }, 64)?);
        }
        doc["at_xi"] = at;
    }
    let mut out = output::sink(cfg.output.path.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    out.flush()?;
    Ok(true)
}

#[derive(Debug, Serialize)]
struct ReportRow {
    criterion: u8,
    title: String,
    check: String,
    value: f64,
    /// `null` for informational entries.
    threshold: Option<f64>,
    pass: bool,
}

fn parse_criteria(list: Option<&str>) -> Result<Vec<u8>, ConfigError> {
    let Some(list) = list else {
        return Ok(CRITERION_IDS.to_vec());
    };
    let mut ids = Vec::new();
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let id: u8 = part
            .parse()
            .ok()
            .filter(|i| CRITERION_IDS.contains(i))
            .ok_or_else(|| ConfigError(format!("unknown criterion '{part}' (expected 1-8)")))?;
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    if ids.is_empty() {
        return Err(ConfigError("--criteria selected nothing".into()));
    }
    Ok(ids)
}

/// Checks on a configured sweep: guard failures are allowed, but every value
/// that was produced must be finite and at least one row must be admissible.
fn sweep_rows(cfg: &RunConfig, r: &kdv_gas::spectral::ReflectionCoefficient) -> anyhow::Result<Vec<ReportRow>> {
    let result = sweep::run(cfg, r)?;
    let values: Vec<f64> = result
        .rows
        .iter()
        .flat_map(|row| [row.u_exact, row.u_gas, row.u_asym])
        .flatten()
        .collect();
    let admissible = result
        .rows
        .iter()
        .filter(|row| row.u_exact.is_some() || row.u_gas.is_some() || row.u_asym.is_some())
        .count();
    let bad = values.iter().filter(|v| !v.is_finite()).count();
    let flagged = result.rows.iter().filter(|row| !row.flags.is_empty()).count();
    let row = |check: &str, value: f64, threshold: Option<f64>, pass: bool| ReportRow {
        criterion: 0,
        title: "configured sweep".into(),
        check: check.into(),
        value,
        threshold,
        pass,
    };
    Ok(vec![
        row("flagged rows", flagged as f64, None, true),
        row("admissible rows", admissible as f64, Some(1.0), admissible >= 1),
        row("non-finite values", bad as f64, Some(0.0), bad == 0),
    ])
}

pub fn validate(common: &Common, criteria: Option<&str>) -> anyhow::Result<bool> {
    let cfg = common.resolve(RunConfig::default())?;
    let r = cfg.validate()?;
    let ids = parse_criteria(criteria)?;
    let nodes = common.n_nodes.unwrap_or(Suite::reference().nodes);
    let suite = Suite::new(cfg.spectrum, r.clone(), nodes).map_err(|e| ConfigError(e.to_string()))?;

    let mut report = Vec::new();
    if common.config.is_some() {
        report.extend(sweep_rows(&cfg, &r).context("configured sweep")?);
    }
    for id in ids {
        match suite.criterion(id) {
            Ok(c) => {
                eprintln!("{}", c.summary_line());
                for k in &c.checks {
                    report.push(ReportRow {
                        criterion: id,
                        title: c.title.into(),
                        check: k.check.clone(),
                        value: k.value,
                        threshold: k.threshold.is_finite().then_some(k.threshold),
                        pass: k.pass,
                    });
                }
            }
            Err(e) => {
                eprintln!("FAIL criterion {id}: error: {e}");
                report.push(ReportRow {
                    criterion: id,
                    title: "error".into(),
                    check: e.to_string(),
                    value: f64::NAN,
                    threshold: None,
                    pass: false,
                });
            }
        }
    }
    let all_pass = report.iter().all(|r| r.pass);

    let mut out = output::sink(cfg.output.path.as_deref())?;
    match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["criterion", "check", "value", "threshold", "pass"])?;
            for r in &report {
                w.write_record([
                    r.criterion.to_string(),
                    r.check.clone(),
                    output::fmt_f64(r.value),
                    r.threshold.map(output::fmt_f64).unwrap_or_default(),
                    r.pass.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(all_pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitham_table_ends() {
        let cfg = RunConfig::default();
        let rows = whitham_rows(&cfg, 50).unwrap();
        let s = cfg.spectrum;
        assert_eq!(rows[0][0], asymptotics::xi_crit(&s));
        assert_eq!(rows[0][1], s.eta1);
        let last = rows.last().unwrap();
        assert!((last[0] - s.eta2 * s.eta2).abs() < 1e-6);
        assert!((last[1] - s.eta2).abs() < 1e-9);
        assert!(rows.iter().all(|r| r[4] == 2.0 * r[1] * r[1]));
        assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    }

    #[test]
    fn criteria_lists() {
        assert_eq!(parse_criteria(Some("1, 7,1")).unwrap(), vec![1, 7]);
        assert!(parse_criteria(Some("9")).is_err());
        assert_eq!(parse_criteria(None).unwrap().len(), 8);
    }
}
