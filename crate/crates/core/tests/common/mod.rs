//! Oracles written independently of the library.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Adaptive Simpson with Richardson correction.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

pub fn k_oracle(m: f64) -> f64 {
    simpson(&|t: f64| 1.0 / (1.0 - (m * t.sin()).powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-15)
}

pub fn e_oracle(m: f64) -> f64 {
    simpson(&|t: f64| (1.0 - (m * t.sin()).powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-15)
}

/// `dn(z|m)` from the amplitude: solve `F(φ|m) = z` by Newton, then `√(1 − m²sin²φ)`.
pub fn dn_oracle(z: f64, m: f64) -> f64 {
    let integrand = |t: f64| 1.0 / (1.0 - (m * t.sin()).powi(2)).sqrt();
    let mut phi = z;
    for _ in 0..50 {
        let f = simpson(&integrand, 0.0, phi, 1e-15) - z;
        let d = integrand(phi);
        phi -= f / d;
        if f.abs() < 1e-15 {
            break;
        }
    }
    (1.0 - (m * phi.sin()).powi(2)).sqrt()
}

/// `∫_a^b f(ζ)/√((ζ² − a²)(b² − ζ²)) dζ` via `ζ² = a²cos²θ + b²sin²θ`, which
/// turns the integrand into the smooth `f(ζ)/ζ`.
pub fn band_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    simpson(
        &|t: f64| {
            let z = (a * a * t.cos().powi(2) + b * b * t.sin().powi(2)).sqrt();
            f(z) / z
        },
        0.0,
        FRAC_PI_2,
        1e-15,
    )
}
