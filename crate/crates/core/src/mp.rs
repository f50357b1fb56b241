//! Multiprecision Cholesky for `I + BCB`, `C_ij = 1/(sᵢ + sⱼ)`.
//!
//! For large exponents the potential is carried by eigen-directions of `BCB`
//! that are many orders of magnitude below its norm; double precision loses
//! them. Entries are formed from exact `f64` inputs so the only rounding is at
//! the working precision.

use astro_float::{BigFloat, RoundingMode, Sign, Word};

const RM: RoundingMode = RoundingMode::ToEven;

fn big(v: f64, p: usize) -> BigFloat {
    BigFloat::from_f64(v, p)
}

/// Nearest `f64` to `v` (rounding by truncation of the mantissa tail).
pub(crate) fn to_f64(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, exp, _)) = v.as_raw_parts() else {
        return f64::NAN;
    };
    let wb = Word::BITS as i32;
    let mut acc = 0.0_f64;
    for (k, w) in words.iter().rev().take((128 / Word::BITS as usize).max(2)).enumerate() {
        acc += (*w as f64) * 2f64.powi(-wb * (k as i32 + 1));
    }
    // value = 0.mantissa × 2^exp; split the scaling to avoid spurious overflow.
    let half = exp / 2;
    let out = acc * 2f64.powi(half) * 2f64.powi(exp - half);
    if sign == Sign::Neg {
        -out
    } else {
        out
    }
}

/// Working precision for a Cauchy-kernel system whose trace is `trace`.
pub fn precision_bits(trace: f64) -> usize {
    let need = 96.0 + (1.0 + trace).log2().ceil().max(0.0);
    (need / 64.0).ceil() as usize * 64
}

/// Result of the multiprecision route.
#[derive(Debug, Clone)]
pub(crate) struct MpSolution {
    /// Solution of `(I + BCB)h = b`, rounded to double.
    pub h: Vec<f64>,
    /// `Q = bᵀh`.
    pub q: f64,
    /// `Q² − 2·Σ sᵢbᵢhᵢ`, formed before rounding to double.
    pub dq: f64,
    /// `‖(I + BCB)h − b‖₂/‖b‖₂` evaluated at working precision.
    pub residual: f64,
}

/// Factor `shift·I + BCB` in place (packed lower triangle). `None` if not positive.
fn cholesky(b: &[BigFloat], s: &[BigFloat], shift: &BigFloat, p: usize) -> Option<Vec<BigFloat>> {
    let n = b.len();
    let idx = |i: usize, j: usize| i * (i + 1) / 2 + j;
    let mut l: Vec<BigFloat> = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in 0..=i {
            let mut v = b[i].mul(&b[j], p, RM).div(&s[i].add(&s[j], p, RM), p, RM);
            if i == j {
                v = v.add(shift, p, RM);
            }
            l.push(v);
        }
    }
    for j in 0..n {
        let mut d = l[idx(j, j)].clone();
        for k in 0..j {
            d = d.sub(&l[idx(j, k)].mul(&l[idx(j, k)], p, RM), p, RM);
        }
        if !d.is_positive() {
            return None;
        }
        let d = d.sqrt(p, RM);
        for i in j + 1..n {
            let mut v = l[idx(i, j)].clone();
            for k in 0..j {
                v = v.sub(&l[idx(i, k)].mul(&l[idx(j, k)], p, RM), p, RM);
            }
            l[idx(i, j)] = v.div(&d, p, RM);
        }
        l[idx(j, j)] = d;
    }
    Some(l)
}

/// Solve `(I + BCB)h = b` and return `Q` and `∂ₓQ` using `∂ₓb = −s∘b`.
pub(crate) fn solve(b: &[f64], s: &[f64], p: usize) -> Option<MpSolution> {
    let n = b.len();
    let bb: Vec<BigFloat> = b.iter().map(|&v| big(v, p)).collect();
    let sb: Vec<BigFloat> = s.iter().map(|&v| big(v, p)).collect();
    let one = big(1.0, p);
    let l = cholesky(&bb, &sb, &one, p)?;
    let idx = |i: usize, j: usize| i * (i + 1) / 2 + j;

    let mut y: Vec<BigFloat> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = bb[i].clone();
        for (k, yk) in y.iter().enumerate() {
            v = v.sub(&l[idx(i, k)].mul(yk, p, RM), p, RM);
        }
        y.push(v.div(&l[idx(i, i)], p, RM));
    }
    let mut h = y;
    for i in (0..n).rev() {
        let mut v = h[i].clone();
        for k in i + 1..n {
            v = v.sub(&l[idx(k, i)].mul(&h[k], p, RM), p, RM);
        }
        h[i] = v.div(&l[idx(i, i)], p, RM);
    }

    let mut q = big(0.0, p);
    let mut sm = big(0.0, p);
    for i in 0..n {
        let bh = bb[i].mul(&h[i], p, RM);
        sm = sm.add(&sb[i].mul(&bh, p, RM), p, RM);
        q = q.add(&bh, p, RM);
    }
    let two = big(2.0, p);
    let dq = q.mul(&q, p, RM).sub(&two.mul(&sm, p, RM), p, RM);

    // Residual of the original system, not of the factorization.
    let mut res2 = 0.0_f64;
    let mut b2 = 0.0_f64;
    for i in 0..n {
        let mut acc = big(0.0, p);
        for j in 0..n {
            let c = bb[j].mul(&h[j], p, RM).div(&sb[i].add(&sb[j], p, RM), p, RM);
            acc = acc.add(&c, p, RM);
        }
        let ri = h[i].add(&bb[i].mul(&acc, p, RM), p, RM).sub(&bb[i], p, RM);
        res2 += to_f64(&ri).powi(2);
        b2 += b[i] * b[i];
    }
    let residual = if b2 > 0.0 { (res2 / b2).sqrt() } else { res2.sqrt() };
    Some(MpSolution {
        h: h.iter().map(to_f64).collect(),
        q: to_f64(&q),
        dq: to_f64(&dq),
        residual,
    })
}

/// Whether `(1 − δ)·I + BCB` admits a Cholesky factorization at precision `p`,
/// i.e. a certificate that the smallest eigenvalue of `I + BCB` exceeds `1 − δ`.
pub(crate) fn certify_lower_bound(b: &[f64], s: &[f64], delta: f64, p: usize) -> bool {
    let bb: Vec<BigFloat> = b.iter().map(|&v| big(v, p)).collect();
    let sb: Vec<BigFloat> = s.iter().map(|&v| big(v, p)).collect();
    let shift = big(1.0, p).sub(&big(delta, p), p, RM);
    cholesky(&bb, &sb, &shift, p).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_bigfloat() {
        for v in [1.0, -3.25, 1e-300, 6.02e23, std::f64::consts::PI, -1e-5] {
            assert_eq!(to_f64(&big(v, 256)), v);
        }
        assert_eq!(to_f64(&big(0.0, 128)), 0.0);
    }

    #[test]
    fn precision_grows_with_trace() {
        assert_eq!(precision_bits(0.0), 128);
        assert!(precision_bits(1e60) >= 96 + 200);
    }

    #[test]
    fn scalar_case() {
        // (1 + b²/(2s)) h = b  ⇒  Q = b²/(1 + b²/(2s)).
        let (b, s) = (3.0, 0.7);
        let m = solve(&[b], &[s], 128).unwrap();
        assert!(m.residual < 1e-30);
        let q = b * b / (1.0 + b * b / (2.0 * s));
        assert!((m.q - q).abs() < 1e-15 * q);
    }
}
