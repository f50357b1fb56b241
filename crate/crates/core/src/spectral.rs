//! Spectral data of the gas: the band, the reflection coefficient and the
//! finite soliton ensembles that discretize it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Points used to validate positivity of a reflection coefficient.
const POSITIVITY_GRID: usize = 2001;

/// The band `(η₁, η₂)`, with `0 < η₁ < η₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum")]
pub struct GasSpectrum {
    pub eta1: f64,
    pub eta2: f64,
}

#[derive(Deserialize)]
struct RawSpectrum {
    eta1: f64,
    eta2: f64,
}

impl TryFrom<RawSpectrum> for GasSpectrum {
    type Error = Error;
    fn try_from(raw: RawSpectrum) -> Result<Self> {
        GasSpectrum::new(raw.eta1, raw.eta2)
    }
}

impl GasSpectrum {
    pub fn new(eta1: f64, eta2: f64) -> Result<Self> {
        if !(eta1.is_finite() && eta2.is_finite() && 0.0 < eta1 && eta1 < eta2) {
            return Err(Error::Domain(format!(
                "band needs 0 < eta1 < eta2, got ({eta1}, {eta2})"
            )));
        }
        Ok(Self { eta1, eta2 })
    }

    /// The band used for every figure in the documentation.
    pub fn reference() -> Self {
        Self { eta1: 0.5, eta2: 1.5 }
    }

    /// Modulus `η₁/η₂`.
    pub fn modulus(&self) -> f64 {
        self.eta1 / self.eta2
    }

    pub fn width(&self) -> f64 {
        self.eta2 - self.eta1
    }

    fn contains_closed(&self, z: f64) -> bool {
        self.eta1 <= z && z <= self.eta2
    }
}

/// How a reflection coefficient is specified.
///
/// All data describe `r₁(iζ)` on the band; the stored rotated form is
/// `r(ζ) = 2·r₁(iζ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReflectionSpec {
    /// `r₁ ≡ r1`.
    Constant { r1: f64 },
    /// `r₁(iζ) = Σ coeffs[k]·ζᵏ`.
    Polynomial { coeffs: Vec<f64> },
    /// Samples of `r₁(iζ)` interpolated by a natural cubic spline.
    Tabulated { zeta: Vec<f64>, r1: Vec<f64> },
    /// `r₁ ≡ 0`: the empty gas. Only the direct solver accepts it.
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    fn natural(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal solve for the second derivatives, natural ends.
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
                let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
                c[i] = h1 / diag;
                d[i] = (rhs - h0 * d[i - 1]) / diag;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        Self { x, y, m }
    }

    fn eval(&self, z: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= z) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - z) / h;
        let b = (z - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Constant(f64),
    Polynomial(Vec<f64>),
    Tabulated(Spline),
    Zero,
}

/// A validated reflection coefficient on a given band.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionCoefficient {
    spec: ReflectionSpec,
    repr: Repr,
}

impl ReflectionCoefficient {
    /// Validates `spec` on the closed band: finite data and `r₁ > 0` on a dense grid.
    pub fn new(spec: ReflectionSpec, spectrum: &GasSpectrum) -> Result<Self> {
        let repr = match &spec {
            ReflectionSpec::Constant { r1 } => Repr::Constant(*r1),
            ReflectionSpec::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::Domain("polynomial needs at least one coefficient".into()));
                }
                Repr::Polynomial(coeffs.clone())
            }
            ReflectionSpec::Tabulated { zeta, r1 } => {
                if zeta.len() != r1.len() || zeta.len() < 2 {
                    return Err(Error::Domain(
                        "tabulated data need matching zeta/r1 arrays of length >= 2".into(),
                    ));
                }
                if !zeta.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::Domain("tabulated zeta must be strictly increasing".into()));
                }
                if zeta[0] > spectrum.eta1 || *zeta.last().unwrap() < spectrum.eta2 {
                    return Err(Error::Domain(
                        "tabulated zeta must cover the closed band".into(),
                    ));
                }
                Repr::Tabulated(Spline::natural(zeta.clone(), r1.clone()))
            }
            ReflectionSpec::Zero => Repr::Zero,
        };
        let out = Self { spec, repr };
        if !out.is_zero() {
            for i in 0..POSITIVITY_GRID {
                let z = spectrum.eta1 + spectrum.width() * i as f64 / (POSITIVITY_GRID - 1) as f64;
                let v = out.r1(z);
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Positivity(format!("r1(i*{z}) = {v}")));
                }
            }
        }
        Ok(out)
    }

    pub fn constant(r1: f64, spectrum: &GasSpectrum) -> Result<Self> {
        Self::new(ReflectionSpec::Constant { r1 }, spectrum)
    }

    pub fn zero() -> Self {
        Self {
            spec: ReflectionSpec::Zero,
            repr: Repr::Zero,
        }
    }

    pub fn spec(&self) -> &ReflectionSpec {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// `r₁(iζ)`.
    pub fn r1(&self, zeta: f64) -> f64 {
        match &self.repr {
            Repr::Constant(c) => *c,
            Repr::Polynomial(cs) => cs.iter().rev().fold(0.0, |acc, c| acc * zeta + c),
            Repr::Tabulated(s) => s.eval(zeta),
            Repr::Zero => 0.0,
        }
    }

    /// Rotated form `r(ζ) = 2·r₁(iζ)`.
    pub fn r(&self, zeta: f64) -> f64 {
        2.0 * self.r1(zeta)
    }

    /// `log r(ζ)`; fails for the empty gas.
    pub fn log_r(&self, zeta: f64) -> Result<f64> {
        self.require_positive()?;
        Ok(self.r(zeta).ln())
    }

    pub(crate) fn require_positive(&self) -> Result<()> {
        if self.is_zero() {
            Err(Error::Positivity("the reflection coefficient vanishes identically".into()))
        } else {
            Ok(())
        }
    }
}

/// A gas in one document: band plus reflection coefficient.
///
/// JSON form: `{"eta1":0.5,"eta2":1.5,"reflection":{"kind":"constant","r1":1.0}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    #[serde(flatten)]
    pub spectrum: GasSpectrum,
    pub reflection: ReflectionSpec,
}

impl GasModel {
    /// Validates the reflection data against the band.
    pub fn build(&self) -> Result<(GasSpectrum, ReflectionCoefficient)> {
        let r = ReflectionCoefficient::new(self.reflection.clone(), &self.spectrum)?;
        Ok((self.spectrum, r))
    }
}

/// `N` soliton poles `λⱼ = iκⱼ` with norming constants `cⱼ = i·c̃ⱼ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonEnsemble {
    kappa: Vec<f64>,
    c: Vec<f64>,
}

impl SolitonEnsemble {
    pub fn new(kappa: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if kappa.is_empty() || kappa.len() != c.len() {
            return Err(Error::Domain("ensemble needs N >= 1 poles and N constants".into()));
        }
        if !kappa.iter().all(|&k| k.is_finite() && k > 0.0) {
            return Err(Error::Domain("pole heights must be positive".into()));
        }
        if !kappa.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain("pole heights must be strictly increasing".into()));
        }
        if !c.iter().all(|&v| v.is_finite() && v > 0.0) {
            return Err(Error::Positivity("norming constants must be positive".into()));
        }
        Ok(Self { kappa, c })
    }

    /// Uniform-quantile discretization of a gas with `n` solitons.
    pub fn from_gas(n: usize, spectrum: &GasSpectrum, r: &ReflectionCoefficient) -> Result<Self> {
        let kappa = sample_poles(n, spectrum, None)?;
        let c = norming_constants(&kappa, r, n, spectrum)?;
        Self::new(kappa, c)
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }
}

/// Quantile sampling of pole heights: `∫_{η₁}^{κⱼ} ϱ = j/N`, `j = 1..N`.
///
/// `density` need not be normalized; it must be nonnegative with finite
/// positive mass. `None` means the uniform density.
pub fn sample_poles(
    n: usize,
    spectrum: &GasSpectrum,
    density: Option<&dyn Fn(f64) -> f64>,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Domain("need at least one pole".into()));
    }
    let (a, b) = (spectrum.eta1, spectrum.eta2);
    let Some(rho) = density else {
        let h = spectrum.width() / n as f64;
        let mut out: Vec<f64> = (1..=n).map(|j| a + j as f64 * h).collect();
        out[n - 1] = b;
        return Ok(out);
    };

    const TOL: f64 = 1e-15;
    let mut negative = None;
    let guarded = |z: f64| {
        let v = rho(z);
        if !(v >= 0.0 && v.is_finite()) {
            negative.get_or_insert(z);
        }
        v
    };
    let mass = quadrature::adaptive(guarded, a, b, TOL)?;
    if let Some(z) = negative {
        return Err(Error::Density(format!("density is negative or not finite at {z}")));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::Density(format!("total mass {mass} is not positive and finite")));
    }

    let step = mass / n as f64;
    let mut out = Vec::with_capacity(n);
    let mut lo = a;
    for j in 1..=n {
        if j == n {
            out.push(b);
            break;
        }
        // Solve ∫_{lo}^{κ} ϱ = step by safeguarded Newton on [lo, b].
        let target = step;
        let (mut left, mut right) = (lo, b);
        let mut k = (lo + spectrum.width() / n as f64).min(b);
        for _ in 0..200 {
            let f = quadrature::adaptive(rho, lo, k, TOL * 0.1)? - target;
            if f > 0.0 {
                right = k;
            } else {
                left = k;
            }
            if f.abs() <= 4.0 * TOL * mass || right - left < 1e-15 * b {
                break;
            }
            let d = rho(k);
            let newton = if d > 0.0 { k - f / d } else { f64::NAN };
            k = if newton > left && newton < right {
                newton
            } else {
                0.5 * (left + right)
            };
        }
        out.push(k);
        lo = k;
    }
    Ok(out)
}

/// `c̃ⱼ = (η₂ − η₁)·r(κⱼ)/(2π)` (equivalently `(η₂ − η₁)·r₁(iκⱼ)/π`).
///
/// The `1/N` of the discretization enters the residue system separately.
pub fn norming_constants(
    poles: &[f64],
    r: &ReflectionCoefficient,
    _n: usize,
    spectrum: &GasSpectrum,
) -> Result<Vec<f64>> {
    r.require_positive()?;
    poles
        .iter()
        .map(|&k| {
            if !spectrum.contains_closed(k) {
                return Err(Error::Domain(format!("pole {k} outside the band")));
            }
            let c = spectrum.width() * r.r(k) / (2.0 * PI);
            if c > 0.0 {
                Ok(c)
            } else {
                Err(Error::Positivity(format!("norming constant {c} at {k}")))
            }
        })
        .collect()
}
