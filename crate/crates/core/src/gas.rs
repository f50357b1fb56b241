//! Direct solution of the gas Riemann–Hilbert problem.
//!
//! Seeking `Y₁(λ) = 1 + ∫ f(s)/(s + λ) ds` over the band turns the jump
//! conditions into a second-kind Fredholm equation with the Cauchy kernel
//! `1/(s + λ)`. With `y = i·f/√r̂` it reads, in symmetric form,
//!
//! ```text
//! y(λ)·√r̂(λ) + (1/2π) ∫ √r̂(λ)√r̂(s)/(s + λ) · y(s)√r̂(s) ds = √r̂(λ),
//! r̂(s) = r(s)·exp(8s³t − 2sx),
//! ```
//!
//! and `lim λ(Y₁ − 1)` is `Q = (1/2π)∫ r̂·y`. Gauss–Legendre Nyström with
//! `bᵢ = √(wᵢ r̂(sᵢ)/2π)` gives `(I + BCB)h = b`, `Q = bᵀh`, `C_ij = 1/(sᵢ + sⱼ)`.
//!
//! Because `∂ₓb = −s∘b` the derivative of the matrix is `−bbᵀ`, so
//! `∂ₓQ = Q² − 2Σ sᵢbᵢhᵢ` comes from the same solve and `u = 2∂ₓQ`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mp;
use crate::quadrature;
use crate::spectral::{GasSpectrum, ReflectionCoefficient};

/// Default Nyström node count.
pub const DEFAULT_NODES: usize = 200;

/// Largest admissible exponent `8s³t − 2sx` over the band.
pub const EXPONENT_GUARD: f64 = 690.0;

/// Below this value of `log₂(1 + tr K̂)` the double-precision route is used.
const F64_TRACE_LOG2: f64 = 12.0;

/// Above this norm the eigenvalue report switches to a multiprecision certificate.
const EIGEN_NORM_LIMIT: f64 = 1e6;

/// Tolerance used by the positivity certificate.
pub const POSITIVITY_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NystromGrid {
    pub n: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl NystromGrid {
    pub fn gauss_legendre(n: usize, spectrum: &GasSpectrum) -> Result<Self> {
        let (nodes, weights) = quadrature::gauss_legendre(n, spectrum.eta1, spectrum.eta2)?;
        Ok(Self { n, nodes, weights })
    }
}

/// The discretized operator `I + K̂` at one `(x, t)`.
#[derive(Debug, Clone)]
pub struct Kernel {
    /// `I + K̂` in double precision, exactly symmetric.
    pub matrix: DMatrix<f64>,
    /// Scaled right-hand side `bᵢ = √(wᵢ r̂(sᵢ)/2π)`.
    pub b: Vec<f64>,
    pub nodes: Vec<f64>,
    /// Largest `8s³t − 2sx` over the nodes.
    pub exponent_max: f64,
    /// `tr K̂ = Σ bᵢ²/(2sᵢ)`.
    pub trace: f64,
}

impl Kernel {
    fn needs_multiprecision(&self) -> bool {
        (1.0 + self.trace).log2() > F64_TRACE_LOG2
    }
}

fn band_exponent(s: f64, x: f64, t: f64) -> f64 {
    8.0 * s * s * s * t - 2.0 * s * x
}

/// Largest exponent over the closed band. For `t ≥ 0` the exponent is convex
/// in `s > 0`, so the maximum sits at an endpoint.
pub fn max_band_exponent(spectrum: &GasSpectrum, x: f64, t: f64) -> f64 {
    band_exponent(spectrum.eta1, x, t).max(band_exponent(spectrum.eta2, x, t))
}

fn exponent_span(spectrum: &GasSpectrum, x: f64, t: f64) -> f64 {
    let grid = 64;
    let vals: Vec<f64> = (0..=grid)
        .map(|i| band_exponent(spectrum.eta1 + spectrum.width() * i as f64 / grid as f64, x, t))
        .collect();
    let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
    let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
    hi - lo
}

/// Assemble `I + K̂` on `grid`.
pub fn build_kernel(
    spectrum: &GasSpectrum,
    r: &ReflectionCoefficient,
    x: f64,
    t: f64,
    grid: &NystromGrid,
) -> Result<Kernel> {
    let n = grid.n;
    if grid.nodes.iter().any(|&s| s <= spectrum.eta1 || s >= spectrum.eta2) {
        return Err(Error::Domain("grid nodes must lie inside the band".into()));
    }
    let mut exponent_max = f64::MIN;
    let mut b = vec![0.0; n];
    for i in 0..n {
        let s = grid.nodes[i];
        let e = band_exponent(s, x, t);
        exponent_max = exponent_max.max(e);
        if !r.is_zero() {
            let log_b2 = (grid.weights[i] * r.r(s) / (2.0 * std::f64::consts::PI)).ln() + e;
            b[i] = (0.5 * log_b2).exp();
        }
    }
    if exponent_max > EXPONENT_GUARD {
        return Err(Error::Overflow {
            exponent: exponent_max,
            limit: EXPONENT_GUARD,
        });
    }
    let s = &grid.nodes;
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { 1.0 } else { 0.0 };
        d + b[i] * b[j] / (s[i] + s[j])
    });
    let trace = (0..n).map(|i| b[i] * b[i] / (2.0 * s[i])).sum();
    Ok(Kernel {
        matrix,
        b,
        nodes: s.clone(),
        exponent_max,
        trace,
    })
}

/// How [`PositivityReport::min_eig`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityMethod {
    /// Symmetric eigensolver in double precision.
    Eigen,
    /// Multiprecision Cholesky of `I + K̂ − (1 − slack)I`; the value is the certified bound.
    Certificate,
    /// The certificate failed; the value is the double-precision estimate.
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityReport {
    pub min_eig: f64,
    pub method: PositivityMethod,
}

/// Smallest eigenvalue of `I + K̂`, or a certified lower bound when the norm is large.
pub fn positivity_report(kernel: &Kernel) -> PositivityReport {
    let n = kernel.b.len();
    let norm = (0..n)
        .map(|i| kernel.matrix.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let eigen_min = || {
        SymmetricEigen::new(kernel.matrix.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    };
    if norm <= EIGEN_NORM_LIMIT {
        return PositivityReport {
            min_eig: eigen_min(),
            method: PositivityMethod::Eigen,
        };
    }
    let bits = mp::precision_bits(kernel.trace);
    if mp::certify_lower_bound(&kernel.b, &kernel.nodes, POSITIVITY_SLACK, bits) {
        PositivityReport {
            min_eig: 1.0 - POSITIVITY_SLACK,
            method: PositivityMethod::Certificate,
        }
    } else {
        PositivityReport {
            min_eig: eigen_min(),
            method: PositivityMethod::Failed,
        }
    }
}

/// Solution of the discretized Fredholm equation.
#[derive(Debug, Clone, Serialize)]
pub struct FredholmSolve {
    /// Density at the nodes in the symmetric scaling; `y(sᵢ) = hᵢ/bᵢ`.
    pub h: Vec<f64>,
    pub exponent_max: f64,
    pub min_eig: f64,
    /// `Q = lim λ(Y₁ − 1)`.
    pub q: f64,
    /// `∂ₓQ`.
    pub dq: f64,
    /// Relative residual of the linear system.
    pub residual: f64,
    /// Working precision in bits, `None` for double precision.
    pub bits: Option<usize>,
}

fn solve_f64(kernel: &Kernel) -> Result<FredholmSolve> {
    let chol = kernel.matrix.clone().cholesky().ok_or_else(|| Error::Conditioning {
        estimate: f64::INFINITY,
        limit: 1.0 / f64::EPSILON,
    })?;
    let b = DVector::from_column_slice(&kernel.b);
    let h = chol.solve(&b);
    let res = &kernel.matrix * &h - &b;
    let bn = b.norm();
    let residual = if bn > 0.0 { res.norm() / bn } else { res.norm() };
    let q = b.dot(&h);
    let s: f64 = (0..h.len()).map(|i| kernel.nodes[i] * b[i] * h[i]).sum();
    Ok(FredholmSolve {
        h: h.iter().cloned().collect(),
        exponent_max: kernel.exponent_max,
        min_eig: f64::NAN,
        q,
        dq: q * q - 2.0 * s,
        residual,
        bits: None,
    })
}

fn solve_mp(kernel: &Kernel, bits: usize) -> Result<FredholmSolve> {
    let sol = mp::solve(&kernel.b, &kernel.nodes, bits).ok_or_else(|| Error::Conditioning {
        estimate: f64::INFINITY,
        limit: 2f64.powi(bits as i32),
    })?;
    Ok(FredholmSolve {
        h: sol.h,
        exponent_max: kernel.exponent_max,
        min_eig: f64::NAN,
        q: sol.q,
        dq: sol.dq,
        residual: sol.residual,
        bits: Some(bits),
    })
}

fn solve_internal(kernel: &Kernel, precision: Precision) -> Result<FredholmSolve> {
    match precision {
        Precision::Double => solve_f64(kernel),
        Precision::Bits(p) => solve_mp(kernel, p),
        Precision::Auto if kernel.needs_multiprecision() => {
            solve_mp(kernel, mp::precision_bits(kernel.trace))
        }
        Precision::Auto => solve_f64(kernel),
    }
}

/// Solve `(I + K̂)h = b` with automatic precision and attach the positivity report.
pub fn solve_density(kernel: &Kernel) -> Result<FredholmSolve> {
    let mut sol = solve_internal(kernel, Precision::Auto)?;
    sol.min_eig = positivity_report(kernel).min_eig;
    if !(sol.residual <= 1e-12) {
        return Err(Error::Convergence(format!(
            "linear residual {:e} above 1e-12",
            sol.residual
        )));
    }
    Ok(sol)
}

/// Arithmetic used for the linear solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Precision {
    /// Double precision when the trace is small, otherwise enough bits for the trace.
    #[default]
    Auto,
    Double,
    Bits(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GasOptions {
    /// Requested node count.
    pub n: usize,
    /// Raise the node count when the exponent varies strongly over the band.
    pub auto_nodes: bool,
    pub precision: Precision,
}

impl Default for GasOptions {
    fn default() -> Self {
        Self {
            n: DEFAULT_NODES,
            auto_nodes: true,
            precision: Precision::Auto,
        }
    }
}

impl GasOptions {
    pub fn with_nodes(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    /// Node count actually used at `(x, t)`.
    pub fn nodes_at(&self, spectrum: &GasSpectrum, x: f64, t: f64) -> usize {
        if self.auto_nodes {
            let need = (exponent_span(spectrum, x, t) / 1.5).ceil() as usize + 16;
            self.n.max(need)
        } else {
            self.n
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GasEvaluation {
    pub u: f64,
    pub q: f64,
    pub n: usize,
    pub bits: Option<usize>,
    pub exponent_max: f64,
}

/// `u(x, t)` with explicit options.
pub fn evaluate_with(
    spectrum: &GasSpectrum,
    r: &ReflectionCoefficient,
    x: f64,
    t: f64,
    opts: &GasOptions,
) -> Result<GasEvaluation> {
    let exponent_max = max_band_exponent(spectrum, x, t);
    if exponent_max > EXPONENT_GUARD {
        return Err(Error::Overflow {
            exponent: exponent_max,
            limit: EXPONENT_GUARD,
        });
    }
    let n = opts.nodes_at(spectrum, x, t);
    if r.is_zero() {
        return Ok(GasEvaluation {
            u: 0.0,
            q: 0.0,
            n,
            bits: None,
            exponent_max,
        });
    }
    let grid = NystromGrid::gauss_legendre(n, spectrum)?;
    let kernel = build_kernel(spectrum, r, x, t, &grid)?;
    let sol = solve_internal(&kernel, opts.precision)?;
    Ok(GasEvaluation {
        u: 2.0 * sol.dq,
        q: sol.q,
        n,
        bits: sol.bits,
        exponent_max: kernel.exponent_max,
    })
}

/// `u(x, t)` with default options. With `tol`, the result is recomputed on a
/// doubled grid and a [`Error::Convergence`] is returned if the two differ by
/// more than `tol`.
pub fn evaluate_potential(
    spectrum: &GasSpectrum,
    r: &ReflectionCoefficient,
    x: f64,
    t: f64,
    tol: Option<f64>,
) -> Result<f64> {
    let opts = GasOptions::default();
    let first = evaluate_with(spectrum, r, x, t, &opts)?;
    if let Some(tol) = tol {
        let fine = GasOptions {
            n: 2 * first.n,
            ..opts
        };
        let second = evaluate_with(spectrum, r, x, t, &fine)?;
        let diff = (first.u - second.u).abs();
        if diff > tol {
            return Err(Error::Convergence(format!(
                "u changed by {diff:e} when doubling the grid to {} nodes",
                second.n
            )));
        }
        return Ok(second.u);
    }
    Ok(first.u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_gas() {
        let s = GasSpectrum::reference();
        let r = ReflectionCoefficient::zero();
        let grid = NystromGrid::gauss_legendre(20, &s).unwrap();
        let k = build_kernel(&s, &r, -3.0, 0.5, &grid).unwrap();
        assert_eq!(k.matrix, DMatrix::identity(20, 20));
        let sol = solve_density(&k).unwrap();
        assert!(sol.h.iter().all(|&h| h == 0.0));
        assert_eq!(sol.min_eig, 1.0);
        assert_eq!(evaluate_potential(&s, &r, -2.0, 1.0, None).unwrap(), 0.0);
    }

    #[test]
    fn exactly_symmetric() {
        let s = GasSpectrum::reference();
        let r = ReflectionCoefficient::constant(1.0, &s).unwrap();
        let grid = NystromGrid::gauss_legendre(50, &s).unwrap();
        let k = build_kernel(&s, &r, -2.0, 0.3, &grid).unwrap();
        assert_eq!(k.matrix, k.matrix.transpose());
    }

    #[test]
    fn guard_trips() {
        let s = GasSpectrum::reference();
        let r = ReflectionCoefficient::constant(1.0, &s).unwrap();
        assert!(matches!(
            evaluate_potential(&s, &r, 0.0, 50.0, None).unwrap_err(),
            Error::Overflow { .. }
        ));
    }

    #[test]
    fn max_exponent_sits_at_an_endpoint() {
        let s = GasSpectrum::reference();
        let m = max_band_exponent(&s, 12.0, 1.0);
        let brute = (0..=1000)
            .map(|i| band_exponent(0.5 + i as f64 / 1000.0, 12.0, 1.0))
            .fold(f64::MIN, f64::max);
        assert!((m - brute).abs() < 1e-12);
    }
}
