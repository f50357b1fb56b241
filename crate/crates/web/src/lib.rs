//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes the band `[eta1, eta2]` and a constant reflection
//! coefficient `r1`. Points a route cannot evaluate come back as `NaN`.

use kdv_gas::asymptotics;
use kdv_gas::gas::{self, GasOptions};
use kdv_gas::spectral::{GasSpectrum, ReflectionCoefficient};
use wasm_bindgen::prelude::*;

/// Upper bound on grid sizes accepted from the page.
pub const MAX_POINTS: usize = 20_000;

fn model(eta1: f64, eta2: f64, r1: f64) -> kdv_gas::Result<(GasSpectrum, ReflectionCoefficient)> {
    let s = GasSpectrum::new(eta1, eta2)?;
    let r = ReflectionCoefficient::constant(r1, &s)?;
    Ok((s, r))
}

fn grid(x_min: f64, x_max: f64, nx: usize) -> kdv_gas::Result<Vec<f64>> {
    if !(x_min < x_max) || !(2..=MAX_POINTS).contains(&nx) {
        return Err(kdv_gas::Error::Range(format!(
            "need x_min < x_max and 2 <= nx <= {MAX_POINTS}"
        )));
    }
    let h = (x_max - x_min) / (nx - 1) as f64;
    Ok((0..nx).map(|i| x_min + h * i as f64).collect())
}

/// `u(x, t)` on a uniform grid by the asymptotic (`"asym"`) or Fredholm (`"gas"`) route.
#[allow(clippy::too_many_arguments)]
pub fn profile(
    eta1: f64,
    eta2: f64,
    r1: f64,
    t: f64,
    x_min: f64,
    x_max: f64,
    nx: usize,
    route: &str,
    nodes: usize,
) -> kdv_gas::Result<Vec<f64>> {
    if route != "asym" && route != "gas" {
        return Err(kdv_gas::Error::Range(format!("unknown route '{route}'")));
    }
    let (s, r) = model(eta1, eta2, r1)?;
    let xs = grid(x_min, x_max, nx)?;
    let opts = GasOptions::with_nodes(nodes.max(8));
    let eval = |x: f64| match route {
        "asym" => asymptotics::asymptotic_point(x, t, &s, &r).map(|p| p.u),
        _ => gas::evaluate_with(&s, &r, x, t, &opts).map(|g| g.u),
    };
    Ok(xs.into_iter().map(|x| eval(x).unwrap_or(f64::NAN)).collect())
}

/// Interleaved `(ξ, α)` pairs from `ξ_crit` to the top of the fan.
pub fn whitham(eta1: f64, eta2: f64, samples: usize) -> kdv_gas::Result<Vec<f64>> {
    let s = GasSpectrum::new(eta1, eta2)?;
    let samples = samples.clamp(2, MAX_POINTS);
    let top = asymptotics::alpha_max(&s);
    let mut out = Vec::with_capacity(2 * samples);
    for k in 0..samples {
        let alpha = eta1 + (top - eta1) * k as f64 / (samples - 1) as f64;
        let xi = if k == 0 {
            asymptotics::xi_crit(&s)
        } else {
            asymptotics::whitham_xi_of_alpha(alpha, &s)?
        };
        out.extend([xi, alpha]);
    }
    Ok(out)
}

/// Phase and frequency constants as a JSON object. `Ω` and `Δ` are purely
/// imaginary, so only their imaginary parts are reported.
pub fn phases(eta1: f64, eta2: f64, r1: f64) -> kdv_gas::Result<String> {
    let (s, r) = model(eta1, eta2, r1)?;
    let p = asymptotics::phase_data(&s, &r)?;
    Ok(serde_json::json!({
        "omega_im": p.omega.im,
        "delta_im": p.delta.im,
        "phi": p.phi,
        "kappa": p.kappa,
        "xi_crit": asymptotics::xi_crit(&s),
        "xi_top": eta2 * eta2,
    })
    .to_string())
}

fn js(e: kdv_gas::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = potentialProfile)]
#[allow(clippy::too_many_arguments)]
pub fn potential_profile(
    eta1: f64,
    eta2: f64,
    r1: f64,
    t: f64,
    x_min: f64,
    x_max: f64,
    nx: usize,
    route: &str,
    nodes: usize,
) -> Result<Vec<f64>, JsError> {
    profile(eta1, eta2, r1, t, x_min, x_max, nx, route, nodes).map_err(js)
}

#[wasm_bindgen(js_name = whithamCurve)]
pub fn whitham_curve(eta1: f64, eta2: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    whitham(eta1, eta2, samples).map_err(js)
}

#[wasm_bindgen(js_name = phaseConstants)]
pub fn phase_constants(eta1: f64, eta2: f64, r1: f64) -> Result<String, JsError> {
    phases(eta1, eta2, r1).map_err(js)
}
