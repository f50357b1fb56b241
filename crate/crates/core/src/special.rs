//! Complete elliptic integrals, Jacobi `dn`, and the theta function `ϑ₃`.
//!
//! Everything uses the *modulus* convention: `dn(K(m)|m) = √(1−m²)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const AGM_TOL: f64 = 1e-16;
const AGM_MAX_ITER: usize = 64;
const THETA_TERM_TOL: f64 = 1e-16;
const THETA_MAX_TERMS: usize = 512;
const THETA_NEAR_ZERO: f64 = 1e-12;

/// Largest modulus accepted by the asymptotic formulas before they report degeneracy.
pub const MAX_MODULUS: f64 = 1.0 - 1e-10;

/// Output of the arithmetic-geometric mean started from `(1, mc)` with `c₀ = m`.
///
/// `deficit` is `Σ 2ⁿ⁻¹ cₙ²`, so that `E = K·(1 − deficit)`. It is accumulated
/// without cancellation because `cₙ₊₁ = cₙ²/(4aₙ₊₁)`.
#[derive(Debug, Clone, Copy)]
struct Agm {
    k: f64,
    deficit: f64,
}

fn agm(m: f64, mc: f64) -> Agm {
    let (mut a, mut b) = (1.0_f64, mc);
    let mut c = m;
    let mut deficit = 0.5 * c * c;
    let mut pow = 0.5;
    for _ in 0..AGM_MAX_ITER {
        if c <= AGM_TOL * a {
            break;
        }
        let a_next = 0.5 * (a + b);
        c = c * c / (4.0 * a_next);
        b = (a * b).sqrt();
        a = a_next;
        pow *= 2.0;
        deficit += pow * c * c;
    }
    Agm {
        k: PI / (2.0 * a),
        deficit,
    }
}

fn complement(m: f64) -> f64 {
    ((1.0 - m) * (1.0 + m)).sqrt()
}

/// Complete elliptic integral of the first kind, `K(m) = ∫₀^{π/2} dθ/√(1 − m² sin²θ)`.
pub fn elliptic_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::Domain(format!("elliptic_k needs 0 <= m < 1, got {m}")));
    }
    Ok(agm(m, complement(m)).k)
}

/// Complete elliptic integral of the second kind, `E(m) = ∫₀^{π/2} √(1 − m² sin²θ) dθ`.
pub fn elliptic_e(m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::Domain(format!("elliptic_e needs 0 <= m <= 1, got {m}")));
    }
    if m == 1.0 {
        return Ok(1.0);
    }
    let g = agm(m, complement(m));
    Ok(g.k * (1.0 - g.deficit))
}

/// `1 − E(m)/K(m)`, accurate for small `m` where the naive difference cancels.
pub fn one_minus_e_over_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::Domain(format!("modulus must lie in [0,1), got {m}")));
    }
    Ok(agm(m, complement(m)).deficit)
}

/// `1 − m² − E(m)/K(m)` without cancellation at small `m` (it behaves like `−m²/2`).
pub(crate) fn whitham_denominator(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::Domain(format!("modulus must lie in [0,1), got {m}")));
    }
    let g = agm(m, complement(m));
    // deficit = m²/2 + tail, so deficit − m² = tail − m²/2.
    let tail = g.deficit - 0.5 * m * m;
    Ok(tail - 0.5 * m * m)
}

/// The bundle of elliptic quantities shared by every asymptotic formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticData {
    /// Modulus.
    pub m: f64,
    /// `K(m)`.
    pub k: f64,
    /// `E(m)`.
    pub e: f64,
    /// `K(m′)` with `m′ = √(1 − m²)`; infinite when `m = 0`.
    pub k_prime: f64,
    /// `E(m′)`.
    pub e_prime: f64,
}

impl EllipticData {
    pub fn new(m: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&m) {
            return Err(Error::Domain(format!("modulus must lie in [0,1), got {m}")));
        }
        let mc = complement(m);
        let g = agm(m, mc);
        let (k_prime, e_prime) = if m == 0.0 {
            (f64::INFINITY, 1.0)
        } else {
            let gp = agm(mc, m);
            (gp.k, gp.k * (1.0 - gp.deficit))
        };
        Ok(Self {
            m,
            k: g.k,
            e: g.k * (1.0 - g.deficit),
            k_prime,
            e_prime,
        })
    }

    /// Half-period ratio `τ`, purely imaginary.
    pub fn tau(&self) -> Complex64 {
        Complex64::new(0.0, 0.5 * self.k_prime / self.k)
    }

    /// `2τ = i·K(m′)/K(m)`, the argument used by the theta forms.
    pub fn tau2(&self) -> Complex64 {
        Complex64::new(0.0, self.k_prime / self.k)
    }

    /// Residual of Legendre's relation `EK′ + E′K − KK′ − π/2`.
    pub fn legendre_residual(&self) -> f64 {
        self.e * self.k_prime + self.e_prime * self.k - self.k * self.k_prime - 0.5 * PI
    }
}

/// Jacobi `dn(z|m)` by descending Landen transformation.
pub fn jacobi_dn(z: f64, m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::Domain(format!("jacobi_dn needs 0 <= m < 1, got {m}")));
    }
    if !z.is_finite() {
        return Err(Error::Domain(format!("jacobi_dn needs a finite argument, got {z}")));
    }
    if m == 0.0 {
        return Ok(1.0);
    }

    // Landen sequence.
    let mut a = vec![1.0_f64];
    let mut c = vec![m];
    let mut b = complement(m);
    while *c.last().unwrap() > 1e-16 * a.last().unwrap() && a.len() < AGM_MAX_ITER {
        let an = *a.last().unwrap();
        let cn = *c.last().unwrap();
        let a_next = 0.5 * (an + b);
        c.push(cn * cn / (4.0 * a_next));
        b = (an * b).sqrt();
        a.push(a_next);
    }
    let n = a.len() - 1;
    let k = PI / (2.0 * a[n]);

    // dn is even, 2K-periodic and symmetric about K: fold into [0, K].
    let period = 2.0 * k;
    let mut zr = z - period * (z / period).round();
    zr = zr.abs();
    if zr > k {
        zr = period - zr;
    }

    let mut phi = f64::powi(2.0, n as i32) * a[n] * zr;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] * phi.sin() / a[j]).asin());
    }
    // dn² = m′² + m²cos²φ: a sum of nonnegative terms, so no cancellation near z = K.
    let mc = complement(m);
    let cp = m * phi.cos();
    Ok((mc * mc + cp * cp).sqrt())
}

/// `ϑ₃(z; τ₂) = Σₙ exp(2πinz + πin²τ₂)`.
pub fn theta3(z: Complex64, tau2: Complex64) -> Result<Complex64> {
    if tau2.im <= 0.0 {
        return Err(Error::Domain(format!(
            "theta3 needs Im(tau) > 0, got {}",
            tau2.im
        )));
    }
    let i_pi = Complex64::new(0.0, PI);
    let mut sum = Complex64::new(1.0, 0.0);
    // Terms grow until n ≈ |Im z|/Im τ before they decay.
    let peak = (z.im.abs() / tau2.im).ceil() as usize;
    for n in 1..=THETA_MAX_TERMS {
        let nf = n as f64;
        let q = (i_pi * nf * nf * tau2).exp();
        let plus = q * (2.0 * i_pi * nf * z).exp();
        let minus = q * (-2.0 * i_pi * nf * z).exp();
        sum += plus + minus;
        let mag = plus.norm().max(minus.norm());
        if n > peak && mag < THETA_TERM_TOL * sum.norm().max(1.0) {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!(
        "theta3 series not converged after {THETA_MAX_TERMS} terms (Im tau = {})",
        tau2.im
    )))
}

/// Logarithmic derivative of `ϑ₃(z; τ₂)` for real `z` and purely imaginary `τ₂`.
///
/// `order` is 1 or 2.
pub fn dlog_theta3(z: f64, tau2: Complex64, order: u8) -> Result<f64> {
    if tau2.im <= 0.0 {
        return Err(Error::Domain(format!(
            "dlog_theta3 needs Im(tau) > 0, got {}",
            tau2.im
        )));
    }
    if tau2.re.abs() > 1e-14 * tau2.im {
        return Err(Error::Domain("dlog_theta3 needs a purely imaginary tau".into()));
    }
    if order != 1 && order != 2 {
        return Err(Error::Domain(format!("derivative order must be 1 or 2, got {order}")));
    }
    // With q = e^{−π Im τ₂}: ϑ₃ = 1 + 2Σ qⁿ² cos(2πnz).
    let s = tau2.im;
    let (mut th, mut d1, mut d2) = (1.0_f64, 0.0_f64, 0.0_f64);
    let mut converged = false;
    for n in 1..=THETA_MAX_TERMS {
        let nf = n as f64;
        let qn = (-PI * s * nf * nf).exp();
        let w = 2.0 * PI * nf;
        let (sn, cs) = (w * z).sin_cos();
        th += 2.0 * qn * cs;
        d1 -= 2.0 * qn * w * sn;
        d2 -= 2.0 * qn * w * w * cs;
        if 2.0 * qn * w * w < THETA_TERM_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence(format!(
            "theta3 derivative series not converged (Im tau = {s})"
        )));
    }
    if th.abs() < THETA_NEAR_ZERO {
        return Err(Error::NearZero(th.abs()));
    }
    let l1 = d1 / th;
    Ok(match order {
        1 => l1,
        _ => d2 / th - l1 * l1,
    })
}
