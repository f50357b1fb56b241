//! Closed-form long-range and long-time behaviour of the gas potential.
//!
//! Conventions: `R(λ) = √(λ−η₂)√(λ−a)√(λ+a)√(λ+η₂)` with principal roots, where
//! `a` is `η₁` (unmodulated) or `α` (modulated). It is positive on `(η₂, ∞)`,
//! negative on the gap `(−a, a)`, and its boundary value from above is `+i|R|`
//! on `(a, η₂)` and `−i|R|` on `(−η₂, −a)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::{self, EllipticData, MAX_MODULUS};
use crate::spectral::{GasSpectrum, ReflectionCoefficient};

/// Gauss–Chebyshev nodes for band and gap integrals.
const BAND_NODES: usize = 256;
/// Gauss–Legendre nodes for complex path integrals.
const PATH_NODES: usize = 96;
const BISECTION_TOL: f64 = 1e-13;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn csqrt(z: Complex64) -> Complex64 {
    z.sqrt()
}

/// `R(λ)` for branch points `±a`, `±b`.
fn r_branch(lambda: Complex64, a: f64, b: f64) -> Complex64 {
    csqrt(lambda - b) * csqrt(lambda - a) * csqrt(lambda + a) * csqrt(lambda + b)
}

/// `∫_{lo}^{hi} F(ζ)/|R(ζ)| dζ` between two adjacent branch points.
fn segment_abs<F: Fn(f64) -> f64>(lo: f64, hi: f64, a: f64, b: f64, f: F) -> f64 {
    let others: Vec<f64> = [-b, -a, a, b]
        .into_iter()
        .filter(|&e| e != lo && e != hi)
        .collect();
    quadrature::chebyshev_endpoint(lo, hi, BAND_NODES, |z| {
        f(z) / ((z - others[0]).abs() * (z - others[1]).abs()).sqrt()
    })
}

/// Phase of `R₊` on the segment `(lo, hi)`: one of `±1`, `±i`.
fn boundary_phase(lo: f64, hi: f64, a: f64, b: f64) -> Complex64 {
    let mid = 0.5 * (lo + hi);
    let v = r_branch(Complex64::new(mid, 1e-12 * (1.0 + b)), a, b);
    let v = v / v.norm();
    [Complex64::new(1.0, 0.0), -Complex64::new(1.0, 0.0), I, -I]
        .into_iter()
        .min_by(|p, q| (v - p).norm().total_cmp(&(v - q).norm()))
        .unwrap()
}

/// `∫_{lo}^{hi} F/R₊` along the upper side of a segment between branch points.
fn segment_plus<F: Fn(f64) -> f64>(lo: f64, hi: f64, a: f64, b: f64, f: F) -> Complex64 {
    segment_abs(lo, hi, a, b, f) / boundary_phase(lo, hi, a, b)
}

/// `∫_{η₂}^{λ} F(ζ)/R(ζ) dζ` for `Im λ ≥ 0`, along paths in the closed upper half-plane.
///
/// The path runs along the upper side of the real axis to the branch point
/// nearest to `λ`, then straight to `λ` with `ζ = e + (λ − e)u²`, which removes
/// the inverse square root at `e`.
fn abelian_upper<F: Fn(f64) -> f64, G: Fn(Complex64) -> Complex64>(
    lambda: Complex64,
    a: f64,
    b: f64,
    f_real: F,
    f_cplx: G,
) -> Complex64 {
    let pts = [b, a, -a, -b];
    let nearest = (0..4)
        .min_by(|&i, &j| {
            (lambda - pts[i])
                .norm()
                .total_cmp(&(lambda - pts[j]).norm())
        })
        .unwrap();
    let mut base = Complex64::new(0.0, 0.0);
    for k in 0..nearest {
        let (hi, lo) = (pts[k], pts[k + 1]);
        base -= segment_plus(lo, hi, a, b, &f_real);
    }
    let e = pts[nearest];
    let d = lambda - e;
    if d.norm() == 0.0 {
        return base;
    }
    let sd = csqrt(d);
    let (us, ws) = quadrature::gauss_legendre(PATH_NODES, 0.0, 1.0).expect("fixed node count");
    let mut acc = Complex64::new(0.0, 0.0);
    for (u, w) in us.iter().zip(&ws) {
        let z = e + d * u * u;
        let mut rest = Complex64::new(1.0, 0.0);
        for (k, p) in pts.iter().enumerate() {
            if k != nearest {
                rest *= csqrt(z - *p);
            }
        }
        acc += w * 2.0 * sd * f_cplx(z) / rest;
    }
    base + acc
}

/// Frequency `Ω = −iπη₂/K(m)`.
pub fn frequency_omega(spectrum: &GasSpectrum) -> Complex64 {
    let k = special::elliptic_k(spectrum.modulus()).expect("band modulus is in (0,1)");
    Complex64::new(0.0, -PI * spectrum.eta2 / k)
}

/// `κ = η₂²(E/K − 1) < 0`.
pub fn kappa_constant(spectrum: &GasSpectrum) -> f64 {
    let d = special::one_minus_e_over_k(spectrum.modulus()).expect("band modulus is in (0,1)");
    -spectrum.eta2 * spectrum.eta2 * d
}

/// `∫_a^{η₂} log r/|R_a|`, the integral behind every phase constant.
fn log_r_integral(a: f64, spectrum: &GasSpectrum, r: &ReflectionCoefficient) -> Result<f64> {
    r.require_positive()?;
    let v = segment_abs(a, spectrum.eta2, a, spectrum.eta2, |z| r.r(z).ln());
    if !v.is_finite() {
        return Err(Error::Quadrature("log r is not finite on the band".into()));
    }
    Ok(v)
}

/// Phase shift `φ = (1/πi)∫_{η₁}^{η₂} log r/R₊`.
pub fn phase_phi(spectrum: &GasSpectrum, r: &ReflectionCoefficient) -> Result<f64> {
    Ok(-log_r_integral(spectrum.eta1, spectrum, r)? / PI)
}

/// `Δ = −(η₂/K)∫_{η₁}^{η₂} log r/R₊`. Purely imaginary, equal to `Ω·φ`.
pub fn phase_delta(spectrum: &GasSpectrum, r: &ReflectionCoefficient) -> Result<Complex64> {
    let k = special::elliptic_k(spectrum.modulus())?;
    let integral = Complex64::new(log_r_integral(spectrum.eta1, spectrum, r)?, 0.0) / I;
    Ok(-spectrum.eta2 / k * integral)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseData {
    pub omega: Complex64,
    pub delta: Complex64,
    pub phi: f64,
    pub kappa: f64,
}

pub fn phase_data(spectrum: &GasSpectrum, r: &ReflectionCoefficient) -> Result<PhaseData> {
    Ok(PhaseData {
        omega: frequency_omega(spectrum),
        delta: phase_delta(spectrum, r)?,
        phi: phase_phi(spectrum, r)?,
        kappa: kappa_constant(spectrum),
    })
}

/// `W(m) = 1 + m² + 2m²(1 − m²)/(1 − m² − E/K)`.
pub fn whitham_w(m: f64) -> Result<f64> {
    if m > MAX_MODULUS {
        return Err(Error::Degeneracy(m));
    }
    if m == 0.0 {
        return Ok(-3.0);
    }
    let den = special::whitham_denominator(m)?;
    Ok(1.0 + m * m + 2.0 * m * m * (1.0 - m) * (1.0 + m) / den)
}

/// `ξ(α) = (η₂²/2)·W(α/η₂)`.
pub fn whitham_xi_of_alpha(alpha: f64, spectrum: &GasSpectrum) -> Result<f64> {
    if !(alpha > 0.0 && alpha < spectrum.eta2) {
        return Err(Error::Domain(format!(
            "alpha must lie in (0, eta2), got {alpha}"
        )));
    }
    Ok(0.5 * spectrum.eta2 * spectrum.eta2 * whitham_w(alpha / spectrum.eta2)?)
}

/// Boundary between the unmodulated and modulated regions.
pub fn xi_crit(spectrum: &GasSpectrum) -> f64 {
    let (e1, e2) = (spectrum.eta1 * spectrum.eta1, spectrum.eta2 * spectrum.eta2);
    let d = EllipticData::new(spectrum.modulus()).expect("band modulus is in (0,1)");
    0.5 * (e1 + e2) + e1 * (e1 - e2) / (e1 - e2 + e2 * d.e / d.k)
}

/// Largest `α` admitted before the modulus degenerates.
pub fn alpha_max(spectrum: &GasSpectrum) -> f64 {
    let mut a = spectrum.eta2 * MAX_MODULUS;
    // The product can round to a value whose ratio with η₂ exceeds the cap.
    while a / spectrum.eta2 > MAX_MODULUS {
        a = f64::from_bits(a.to_bits() - 1);
    }
    a
}

/// Inverse of [`whitham_xi_of_alpha`] on `[η₁, η₂)` by bisection.
///
/// For `ξ` between `ξ(α_max)` and `η₂²` the result is clamped to `α_max`
/// and a [`Error::Degeneracy`] is returned by the strict variant only.
pub fn whitham_alpha_of_xi(xi: f64, spectrum: &GasSpectrum) -> Result<f64> {
    let (alpha, degenerate) = alpha_of_xi_clamped(xi, spectrum)?;
    if degenerate {
        return Err(Error::Degeneracy(alpha / spectrum.eta2));
    }
    Ok(alpha)
}

fn alpha_of_xi_clamped(xi: f64, spectrum: &GasSpectrum) -> Result<(f64, bool)> {
    let xc = xi_crit(spectrum);
    let e2 = spectrum.eta2 * spectrum.eta2;
    if !(xi >= xc && xi < e2) {
        return Err(Error::Range(format!(
            "xi = {xi} outside the modulated window [{xc}, {e2})"
        )));
    }
    let hi_alpha = alpha_max(spectrum);
    if xi >= whitham_xi_of_alpha(hi_alpha, spectrum)? {
        return Ok((hi_alpha, true));
    }
    let (mut lo, mut hi) = (spectrum.eta1, hi_alpha);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if whitham_xi_of_alpha(mid, spectrum)? < xi {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), false))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    ExponentialDecay,
    ModulatedWave,
    UnmodulatedWave,
}

impl Region {
    pub fn tag(&self) -> &'static str {
        match self {
            Region::ExponentialDecay => "decay",
            Region::ModulatedWave => "modulated",
            Region::UnmodulatedWave => "unmodulated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhithamState {
    pub alpha: f64,
    pub xi: f64,
    pub m_alpha: f64,
    pub region: Region,
    /// `α` was clamped to keep the modulus below one.
    pub degenerate: bool,
}

impl WhithamState {
    /// Region and modulation parameter at `ξ = x/(4t)`; `ξ = −∞` is allowed.
    pub fn new(xi: f64, spectrum: &GasSpectrum) -> Result<Self> {
        if xi.is_nan() {
            return Err(Error::Domain("xi is NaN".into()));
        }
        let e2 = spectrum.eta2 * spectrum.eta2;
        let (alpha, region, degenerate) = if xi >= e2 {
            (spectrum.eta2, Region::ExponentialDecay, false)
        } else if xi <= xi_crit(spectrum) {
            (spectrum.eta1, Region::UnmodulatedWave, false)
        } else {
            let (a, d) = alpha_of_xi_clamped(xi, spectrum)?;
            (a, Region::ModulatedWave, d)
        };
        Ok(Self {
            alpha,
            xi,
            m_alpha: alpha / spectrum.eta2,
            region,
            degenerate,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulatedPhases {
    pub omega_tilde: Complex64,
    pub delta_tilde: Complex64,
    pub phi_tilde: f64,
    /// `Ω_α = −iπη₂/K(m_α)`.
    pub omega_alpha: Complex64,
    pub xi: f64,
}

/// Phase constants of the modulated wave with endpoint `α`.
pub fn phases_modulated(
    alpha: f64,
    spectrum: &GasSpectrum,
    r: &ReflectionCoefficient,
) -> Result<ModulatedPhases> {
    if !(alpha >= spectrum.eta1 && alpha < spectrum.eta2) {
        return Err(Error::Domain(format!(
            "alpha must lie in [eta1, eta2), got {alpha}"
        )));
    }
    let m = alpha / spectrum.eta2;
    if m > MAX_MODULUS {
        return Err(Error::Degeneracy(m));
    }
    let k = special::elliptic_k(m)?;
    let xi = whitham_xi_of_alpha(alpha, spectrum)?;
    let eta2 = spectrum.eta2;
    let integral = log_r_integral(alpha, spectrum, r)?;
    // ∫_{−α}^{α} dζ/R_α, negative.
    let gap = segment_abs(-alpha, alpha, alpha, eta2, |_| 1.0) * boundary_phase(-alpha, alpha, alpha, eta2).re;
    let band = Complex64::new(integral, 0.0) / I;
    Ok(ModulatedPhases {
        omega_tilde: Complex64::new(0.0, 2.0 * PI * eta2 * (alpha * alpha + eta2 * eta2 - 2.0 * xi) / k),
        delta_tilde: 2.0 * band / gap,
        phi_tilde: -integral / PI,
        omega_alpha: Complex64::new(0.0, -PI * eta2 / k),
        xi,
    })
}

/// Detailed asymptotic value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPoint {
    pub u: f64,
    pub region: Region,
    pub alpha: f64,
    /// Phase shift used (`φ` or `φ̃`).
    pub phase: f64,
    pub degenerate: bool,
}

/// Wave parameters at `(x, t)`: band endpoint, phase, and travelling coordinate.
struct Wave {
    alpha: f64,
    phase: f64,
    coordinate: f64,
    region: Region,
    degenerate: bool,
}

fn wave_at(x: f64, t: f64, spectrum: &GasSpectrum, r: &ReflectionCoefficient) -> Result<Wave> {
    if t < 0.0 || !t.is_finite() || !x.is_finite() {
        return Err(Error::Range(format!("no formula for t = {t}, x = {x}")));
    }
    if t == 0.0 && x >= 0.0 {
        return Err(Error::Range(
            "at t = 0 the cnoidal tail is only available for x < 0".into(),
        ));
    }
    let xi = if t == 0.0 { f64::NEG_INFINITY } else { x / (4.0 * t) };
    let state = WhithamState::new(xi, spectrum)?;
    let e2 = spectrum.eta2 * spectrum.eta2;
    let phase = match state.region {
        Region::ExponentialDecay => 0.0,
        Region::UnmodulatedWave => phase_phi(spectrum, r)?,
        Region::ModulatedWave => -log_r_integral(state.alpha, spectrum, r)? / PI,
    };
    let a2 = state.alpha * state.alpha;
    Ok(Wave {
        alpha: state.alpha,
        phase,
        coordinate: x - 2.0 * (a2 + e2) * t + phase,
        region: state.region,
        degenerate: state.degenerate,
    })
}

/// Asymptotic potential with its region and wave parameters.
pub fn asymptotic_point(
    x: f64,
    t: f64,
    spectrum: &GasSpectrum,
    r: &ReflectionCoefficient,
) -> Result<AsymptoticPoint> {
    let w = wave_at(x, t, spectrum, r)?;
    let u = if w.region == Region::ExponentialDecay {
        0.0
    } else {
        let eta2 = spectrum.eta2;
        let m = w.alpha / eta2;
        let k = special::elliptic_k(m)?;
        let dn = special::jacobi_dn(eta2 * w.coordinate + k, m)?;
        eta2 * eta2 - w.alpha * w.alpha - 2.0 * eta2 * eta2 * dn * dn
    };
    Ok(AsymptoticPoint {
        u,
        region: w.region,
        alpha: w.alpha,
        phase: w.phase,
        degenerate: w.degenerate,
    })
}

/// Asymptotic potential in `dn` form, tagged by region.
pub fn u_asymptotic(
    x: f64,
    t: f64,
    spectrum: &GasSpectrum,
    r: &ReflectionCoefficient,
) -> Result<(f64, Region)> {
    let p = asymptotic_point(x, t, spectrum, r)?;
    Ok((p.u, p.region))
}

/// Asymptotic potential in theta form, `α` frozen when differentiating.
pub fn u_theta_form(
    x: f64,
    t: f64,
    spectrum: &GasSpectrum,
    r: &ReflectionCoefficient,
) -> Result<f64> {
    let w = wave_at(x, t, spectrum, r)?;
    if w.region == Region::ExponentialDecay {
        return Ok(0.0);
    }
    let eta2 = spectrum.eta2;
    let d = EllipticData::new(w.alpha / eta2)?;
    let c = eta2 / (2.0 * d.k);
    let l2 = special::dlog_theta3(c * w.coordinate, d.tau2(), 2)?;
    Ok(eta2 * eta2 - w.alpha * w.alpha - 2.0 * eta2 * eta2 * d.e / d.k - 2.0 * c * c * l2)
}

/// Which g-function to examine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum GMode {
    /// `t = 0`, `x → −∞`.
    Static,
    /// `t > 0` at the given `ξ`: modulated if `ξ > ξ_crit`, sub-critical otherwise.
    Time { xi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignCheck {
    pub name: String,
    /// Smallest value of the quantity that must be positive (signs already folded in).
    pub margin: f64,
    pub samples: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GReport {
    pub mode: GMode,
    /// Endpoint of the wave band (`η₁` in static or sub-critical mode).
    pub alpha: f64,
    /// Vanishing-moment residuals.
    pub moment_residuals: Vec<f64>,
    pub sign_checks: Vec<SignCheck>,
    /// Closed-form frequency and its value from the g-function period.
    pub omega_closed: Complex64,
    pub omega_quadrature: Complex64,
    /// Sub-critical only: the printed `Ω̄ = 2πiη₂(2ξ − η₁² − η₂²)/K`.
    pub omega_bar_printed: Option<Complex64>,
    /// Finite-difference errors of `∂ₓ(t g′)` and `∂ₓ(tΩ̃)` (modulated mode only).
    pub derivative_errors: Vec<f64>,
    pub pass: bool,
}

/// Points on the upper lens boundary over `(lo, hi)`.
fn lens_arc(lo: f64, hi: f64, samples: usize) -> Vec<Complex64> {
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    (1..=samples)
        .map(|k| {
            let th = PI * k as f64 / (samples + 1) as f64;
            Complex64::new(mid + half * th.cos(), 0.3 * half * th.sin())
        })
        .collect()
}

fn sign_check<F: Fn(Complex64) -> f64>(name: &str, pts: &[Complex64], positive: F) -> SignCheck {
    let margin = pts.iter().map(|&p| positive(p)).fold(f64::INFINITY, f64::min);
    SignCheck {
        name: name.to_string(),
        margin,
        samples: pts.len(),
        pass: margin > 0.0,
    }
}

/// `c₁`, `c₂` for band endpoint `a`.
pub fn g_constants(a: f64, spectrum: &GasSpectrum) -> Result<(f64, f64)> {
    let e2 = spectrum.eta2 * spectrum.eta2;
    let c1 = -e2 * special::one_minus_e_over_k(a / spectrum.eta2)?;
    let c2 = a * a * e2 / 3.0 + (e2 + a * a) * c1 / 6.0;
    Ok((c1, c2))
}

/// Numerical checks of the g-function constructions.
pub fn g_diagnostics(spectrum: &GasSpectrum, mode: GMode, samples: usize) -> Result<GReport> {
    let (eta1, eta2) = (spectrum.eta1, spectrum.eta2);
    match mode {
        GMode::Static => {
            let kappa = kappa_constant(spectrum);
            let f = |z: f64| z * z + kappa;
            let fc = |z: Complex64| z * z + kappa;
            let moment = segment_abs(-eta1, eta1, eta1, eta2, f);
            let omega_closed = frequency_omega(spectrum);
            let omega_quadrature = 2.0 * segment_plus(eta1, eta2, eta1, eta2, f);
            // Re(g − λ) = −Re ∫_{η₂}^{λ}: negative over Σ₁, positive over Σ₂.
            let s1 = sign_check(
                "Re(g - lambda) < 0 over Sigma1",
                &lens_arc(eta1, eta2, samples),
                |p| abelian_upper(p, eta1, eta2, f, fc).re,
            );
            let s2 = sign_check(
                "Re(g - lambda) > 0 over Sigma2",
                &lens_arc(-eta2, -eta1, samples),
                |p| -abelian_upper(p, eta1, eta2, f, fc).re,
            );
            let ok = moment.abs() < 1e-10
                && (omega_closed - omega_quadrature).norm() < 1e-10
                && s1.pass
                && s2.pass;
            Ok(GReport {
                mode,
                alpha: eta1,
                moment_residuals: vec![moment.abs()],
                sign_checks: vec![s1, s2],
                omega_closed,
                omega_quadrature,
                omega_bar_printed: None,
                derivative_errors: vec![],
                pass: ok,
            })
        }
        GMode::Time { xi } => {
            let state = WhithamState::new(xi, spectrum)?;
            if state.region == Region::ExponentialDecay {
                return Err(Error::Range(format!("xi = {xi} is in the decay region")));
            }
            let a = state.alpha;
            let (c1, c2) = g_constants(a, spectrum)?;
            let half = 0.5 * (a * a + eta2 * eta2);
            let q1 = move |z: f64| z * z + c1;
            let q2 = move |z: f64| z.powi(4) - half * z * z + c2;
            let fr = move |z: f64| 12.0 * q2(z) - 4.0 * xi * q1(z);
            let fc = move |z: Complex64| {
                let z2 = z * z;
                12.0 * (z2 * z2 - half * z2 + c2) - 4.0 * xi * (z2 + c1)
            };
            let gap_phase = boundary_phase(-a, a, a, eta2).re;
            let m1 = segment_abs(-a, a, a, eta2, q1) * gap_phase;
            let m2 = segment_abs(-a, a, a, eta2, q2) * gap_phase;
            let k_a = special::elliptic_k(a / eta2)?;
            let omega_closed =
                Complex64::new(0.0, 2.0 * PI * eta2 * (a * a + eta2 * eta2 - 2.0 * xi) / k_a);
            // Period over the band: 2∫_{η₂}^{a} F/R₊.
            let omega_quadrature = -2.0 * segment_plus(a, eta2, a, eta2, fr);

            let mut checks = vec![
                sign_check(
                    "Re[2g + 8l^3 - 8 xi l] > 0 on C1",
                    &lens_arc(a, eta2, samples),
                    |p| abelian_upper(p, a, eta2, fr, fc).re,
                ),
                sign_check(
                    "Re[2g + 8l^3 - 8 xi l] < 0 on C2",
                    &lens_arc(-eta2, -a, samples),
                    |p| -abelian_upper(p, a, eta2, fr, fc).re,
                ),
            ];
            if state.region == Region::ModulatedWave && a - eta1 > 1e-9 {
                // g₊ + g₋ + 8λ³ − 8ξλ = 2∫_a^λ F/R over the real gap.
                let pts: Vec<Complex64> = (0..samples)
                    .map(|k| Complex64::new(eta1 + (a - eta1) * k as f64 / samples as f64, 0.0))
                    .collect();
                checks.push(sign_check("g+ + g- + 8l^3 - 8 xi l < 0 on [eta1, alpha)", &pts, |p| {
                    let base = abelian_upper(Complex64::new(a, 0.0), a, eta2, fr, fc);
                    -(abelian_upper(p, a, eta2, fr, fc) - base).re
                }));
            }

            let mut derivative_errors = vec![];
            let omega_bar_printed = if state.region == Region::UnmodulatedWave {
                let k = special::elliptic_k(spectrum.modulus())?;
                Some(Complex64::new(
                    0.0,
                    2.0 * PI * eta2 * (2.0 * xi - (eta1 * eta1 + eta2 * eta2)) / k,
                ))
            } else {
                derivative_errors = derivative_identity_errors(xi, spectrum)?;
                None
            };
            let moments_ok = m1.abs() < 1e-10 && m2.abs() < 1e-10;
            let derivs_ok = derivative_errors.iter().all(|e| *e < 1e-6);
            let omega_ok = state.region == Region::UnmodulatedWave
                || (omega_closed - omega_quadrature).norm() < 1e-9;
            let ok = moments_ok && derivs_ok && omega_ok && checks.iter().all(|c| c.pass);
            Ok(GReport {
                mode,
                alpha: a,
                moment_residuals: vec![m1.abs(), m2.abs()],
                sign_checks: checks,
                omega_closed,
                omega_quadrature,
                omega_bar_printed,
                derivative_errors,
                pass: ok,
            })
        }
    }
}

/// `t·g′(λ)` at `(x, t)`, with `α`, `c₁`, `c₂` following `ξ = x/(4t)`.
fn t_gprime(lambda: Complex64, x: f64, t: f64, spectrum: &GasSpectrum) -> Result<Complex64> {
    let a = whitham_alpha_of_xi(x / (4.0 * t), spectrum)?;
    let eta2 = spectrum.eta2;
    let (c1, c2) = g_constants(a, spectrum)?;
    let l2 = lambda * lambda;
    let q1 = l2 + c1;
    let q2 = l2 * l2 - 0.5 * (a * a + eta2 * eta2) * l2 + c2;
    Ok(-12.0 * t * l2 + x + (12.0 * t * q2 - x * q1) / r_branch(lambda, a, eta2))
}

fn t_omega_tilde(x: f64, t: f64, spectrum: &GasSpectrum) -> Result<Complex64> {
    let xi = x / (4.0 * t);
    let a = whitham_alpha_of_xi(xi, spectrum)?;
    let eta2 = spectrum.eta2;
    let k = special::elliptic_k(a / eta2)?;
    Ok(t * Complex64::new(0.0, 2.0 * PI * eta2 * (a * a + eta2 * eta2 - 2.0 * xi) / k))
}

/// Central-difference errors of `∂ₓ(t g′) = 1 − Q₁/R_α` and `∂ₓ(tΩ̃) = −πiη₂/K(m_α)` at `t = 1`.
fn derivative_identity_errors(xi: f64, spectrum: &GasSpectrum) -> Result<Vec<f64>> {
    let (t, x, h) = (1.0, 4.0 * xi, 1e-4);
    let eta2 = spectrum.eta2;
    let a = whitham_alpha_of_xi(xi, spectrum)?;
    let (c1, _) = g_constants(a, spectrum)?;
    let k = special::elliptic_k(a / eta2)?;
    let mut errs = vec![];
    for lambda in [Complex64::new(2.0 * eta2, 0.7), Complex64::new(0.3 * eta2, 0.4)] {
        let fd = (t_gprime(lambda, x + h, t, spectrum)? - t_gprime(lambda, x - h, t, spectrum)?)
            / (2.0 * h);
        let exact = 1.0 - (lambda * lambda + c1) / r_branch(lambda, a, eta2);
        errs.push((fd - exact).norm());
    }
    let fd = (t_omega_tilde(x + h, t, spectrum)? - t_omega_tilde(x - h, t, spectrum)?) / (2.0 * h);
    errs.push((fd - Complex64::new(0.0, -PI * eta2 / k)).norm());
    Ok(errs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> (GasSpectrum, ReflectionCoefficient) {
        let s = GasSpectrum::reference();
        let r = ReflectionCoefficient::constant(1.0, &s).unwrap();
        (s, r)
    }

    #[test]
    fn branch_conventions() {
        let (a, b) = (0.5, 1.5);
        assert!(r_branch(Complex64::new(2.0, 0.0), a, b).re > 0.0);
        assert!(r_branch(Complex64::new(0.2, 1e-14), a, b).re < 0.0);
        assert_eq!(boundary_phase(a, b, a, b), I);
        assert_eq!(boundary_phase(-b, -a, a, b), -I);
        assert_eq!(boundary_phase(-a, a, a, b), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn gap_integral_is_minus_two_k_over_eta2() {
        let (a, b) = (0.5, 1.5);
        let v = segment_abs(-a, a, a, b, |_| 1.0) * boundary_phase(-a, a, a, b).re;
        let k = special::elliptic_k(a / b).unwrap();
        assert!((v + 2.0 * k / b).abs() < 1e-13);
    }

    #[test]
    fn unit_reflection_has_no_phase() {
        let s = GasSpectrum::reference();
        let r = ReflectionCoefficient::constant(0.5, &s).unwrap();
        assert_eq!(phase_phi(&s, &r).unwrap(), 0.0);
        assert_eq!(phase_delta(&s, &r).unwrap().norm(), 0.0);
    }

    #[test]
    fn region_partition() {
        let (s, _) = fig1();
        let xc = xi_crit(&s);
        assert_eq!(WhithamState::new(2.25, &s).unwrap().region, Region::ExponentialDecay);
        assert_eq!(WhithamState::new(2.25 - 1e-6, &s).unwrap().region, Region::ModulatedWave);
        assert_eq!(WhithamState::new(xc, &s).unwrap().region, Region::UnmodulatedWave);
        assert_eq!(
            WhithamState::new(f64::NEG_INFINITY, &s).unwrap().region,
            Region::UnmodulatedWave
        );
    }

    #[test]
    fn static_tail_needs_negative_x() {
        let (s, r) = fig1();
        assert!(matches!(u_asymptotic(1.0, 0.0, &s, &r), Err(Error::Range(_))));
        assert!(u_asymptotic(-1.0, 0.0, &s, &r).is_ok());
    }

    #[test]
    fn static_diagnostics_pass() {
        let (s, _) = fig1();
        let rep = g_diagnostics(&s, GMode::Static, 50).unwrap();
        assert!(rep.pass, "{rep:?}");
    }
}
