use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use kdv_gas::spectral::{GasSpectrum, ReflectionCoefficient, ReflectionSpec};
use serde::{Deserialize, Serialize};

/// A problem with the configuration. Reported with exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Exact,
    Gas,
    Asym,
}

impl FromStr for Route {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "exact" => Ok(Route::Exact),
            "gas" => Ok(Route::Gas),
            "asym" => Ok(Route::Asym),
            other => Err(ConfigError(format!("unknown route '{other}' (expected exact, gas or asym)"))),
        }
    }
}

/// Parses `exact,gas,asym`.
pub fn parse_routes(list: &str) -> Result<Vec<Route>, ConfigError> {
    let mut out: Vec<Route> = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let r: Route = part.parse()?;
        if !out.contains(&r) {
            out.push(r);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t: Vec<f64>,
}

impl Grid {
    pub fn xs(&self) -> Vec<f64> {
        let h = (self.x_max - self.x_min) / (self.nx - 1) as f64;
        (0..self.nx)
            .map(|i| if i + 1 == self.nx { self.x_max } else { self.x_min + h * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// One JSON document describing a sweep. Every field has a default, and the
/// resolved values are echoed into the run summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub spectrum: GasSpectrum,
    pub reflection: ReflectionSpec,
    pub grid: Grid,
    pub routes: Vec<Route>,
    /// Soliton count for the exact route.
    pub ensemble_n: usize,
    /// Base Nyström node count for the gas route.
    pub n_nodes: usize,
    pub output: Output,
    /// Worker threads; `None` uses every available core.
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            spectrum: GasSpectrum::reference(),
            reflection: ReflectionSpec::Constant { r1: 1.0 },
            grid: Grid {
                x_min: -5.0,
                x_max: 5.0,
                nx: 41,
                t: vec![0.0],
            },
            routes: vec![Route::Exact, Route::Gas, Route::Asym],
            ensemble_n: 100,
            n_nodes: 200,
            output: Output::default(),
            jobs: None,
        }
    }
}

impl RunConfig {
    /// The three-region reference profile: `η = (0.5, 1.5)`, `r₁ ≡ 1`, `t = 10`, asymptotic route.
    pub fn fig1() -> Self {
        Self {
            grid: Grid {
                x_min: -160.0,
                x_max: 110.0,
                nx: 1081,
                t: vec![10.0],
            },
            routes: vec![Route::Asym],
            ..Self::default()
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    /// Checks the invariants and builds the reflection coefficient.
    pub fn validate(&self) -> Result<ReflectionCoefficient, ConfigError> {
        let g = &self.grid;
        if g.nx < 2 {
            return Err(ConfigError(format!("grid.nx must be at least 2, got {}", g.nx)));
        }
        if !(g.x_min.is_finite() && g.x_max.is_finite() && g.x_min < g.x_max) {
            return Err(ConfigError(format!("need x_min < x_max, got {} and {}", g.x_min, g.x_max)));
        }
        if g.t.is_empty() || g.t.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(ConfigError("grid.t must be a nonempty list of times >= 0".into()));
        }
        if self.routes.is_empty() {
            return Err(ConfigError("at least one route is required".into()));
        }
        if self.routes.contains(&Route::Exact) && self.ensemble_n == 0 {
            return Err(ConfigError("the exact route needs ensemble_n >= 1".into()));
        }
        if self.n_nodes < 2 {
            return Err(ConfigError(format!("n_nodes must be at least 2, got {}", self.n_nodes)));
        }
        if self.jobs == Some(0) {
            return Err(ConfigError("jobs must be positive".into()));
        }
        let r = ReflectionCoefficient::new(self.reflection.clone(), &self.spectrum)
            .map_err(|e| ConfigError(format!("reflection: {e}")))?;
        if r.is_zero() && self.routes.iter().any(|&x| x != Route::Gas) {
            return Err(ConfigError(
                "a zero reflection coefficient is only meaningful for the gas route".into(),
            ));
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_fields() {
        let c: RunConfig = serde_json::from_str(r#"{"routes": ["asym"]}"#).unwrap();
        assert_eq!(c.routes, vec![Route::Asym]);
        assert_eq!(c.spectrum, GasSpectrum::reference());
        assert!(c.validate().is_ok());
    }

    #[test]
    fn inverted_band_is_rejected_while_parsing() {
        let r: Result<RunConfig, _> = serde_json::from_str(r#"{"spectrum": {"eta1": 1.5, "eta2": 0.5}}"#);
        assert!(r.is_err());
    }

    #[test]
    fn invariants() {
        let mut c = RunConfig::default();
        c.grid.nx = 1;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.routes.clear();
        assert!(c.validate().is_err());
        let mut c = RunConfig {
            ensemble_n: 0,
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
        c.routes = vec![Route::Gas];
        assert!(c.validate().is_ok());
    }

    #[test]
    fn route_list() {
        assert_eq!(parse_routes("gas, asym,gas").unwrap(), vec![Route::Gas, Route::Asym]);
        assert!(parse_routes("gas,fast").is_err());
    }

    #[test]
    fn grid_ends_exactly() {
        let g = Grid {
            x_min: -1.0,
            x_max: 0.3,
            nx: 14,
            t: vec![0.0],
        };
        let xs = g.xs();
        assert_eq!((xs[0], xs[13]), (-1.0, 0.3));
    }
}
