//! Quadrature rules used across the crate.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[a, b]`, nodes increasing.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let deg = NonZeroUsize::new(n).ok_or_else(|| Error::Quadrature("zero nodes".into()))?;
    let rule = GaussLegendre::new(deg);
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    Ok(pairs
        .into_iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .unzip())
}

/// `∫_a^b f(ζ)/√((ζ−a)(b−ζ)) dζ` by the `n`-point Gauss–Chebyshev rule.
pub fn chebyshev_endpoint<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, mut f: F) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let sum: f64 = (1..=n)
        .map(|k| {
            let th = (2 * k - 1) as f64 * PI / (2 * n) as f64;
            f(mid + half * th.cos())
        })
        .sum();
    sum * PI / n as f64
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(mid);
    let mut k = GK_WEIGHTS[7] * fc;
    let mut g = G7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        let s = f(mid - dx) + f(mid + dx);
        k += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += G7_WEIGHTS[i / 2] * s;
        }
    }
    (k * half, ((k - g) * half).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration with an absolute tolerance.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = kronrod15(&mut f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    for _ in 0..MAX_INTERVALS {
        let total_err: f64 = pieces.iter().map(|p| p.3).sum();
        if total_err <= tol {
            return Ok(pieces.iter().map(|p| p.2).sum());
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|p, q| p.1 .3.total_cmp(&q.1 .3))
            .unwrap();
        let (lo, hi, _, _) = pieces.swap_remove(idx);
        let m = 0.5 * (lo + hi);
        let (v1, e1) = kronrod15(&mut f, lo, m);
        let (v2, e2) = kronrod15(&mut f, m, hi);
        pieces.push((lo, m, v1, e1));
        pieces.push((m, hi, v2, e2));
    }
    Err(Error::Quadrature(format!(
        "adaptive rule did not reach tolerance {tol:e} on [{a}, {b}]"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_weights_sum_to_length() {
        let (x, w) = gauss_legendre(200, 0.5, 1.5).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        assert!(x[0] > 0.5 && x[199] < 1.5);
    }

    #[test]
    fn chebyshev_recovers_arcsine_mass() {
        let v = chebyshev_endpoint(0.5, 1.5, 8, |_| 1.0);
        assert!((v - PI).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_kink() {
        let v = adaptive(|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-14).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-13);
    }
}
