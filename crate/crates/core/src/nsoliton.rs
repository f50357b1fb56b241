//! Exact N-soliton potentials from the residue conditions.
//!
//! With `λⱼ = iκⱼ` and `cⱼ = i·c̃ⱼ` the residue conditions reduce to the real system
//!
//! ```text
//! βⱼ/wⱼ + Σₖ βₖ/(κⱼ + κₖ) = 1,    wⱼ = c̃ⱼ·exp(−2κⱼx + 8κⱼ³t)/N,
//! ```
//!
//! and `u = 2·∂ₓ Σⱼ βⱼ`. It is solved in the symmetric form
//! `(I + VCV)h = v`, `v = √w`, `β = v∘h`, whose smallest eigenvalue is at least one.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectral::SolitonEnsemble;

/// Coefficient of `κ³t` in the norming-constant exponent.
///
/// Eight is the value for which the one-soliton solution of the system
/// satisfies `u_t − 6uu_x + u_xxx = 0`; sixteen does not.
pub const TIME_EXPONENT: f64 = 8.0;

/// Largest admissible `|2κx| + |8κ³t|`.
pub const EXPONENT_GUARD: f64 = 700.0;

/// Largest admissible condition estimate.
pub const CONDITION_LIMIT: f64 = 1e12;

/// The assembled residue system at one `(x, t)`.
#[derive(Debug, Clone)]
pub struct ResidueSystem {
    /// `I + VCV`, symmetric.
    pub a: DMatrix<f64>,
    /// `v = √w`.
    pub b: DVector<f64>,
    /// `βⱼ`, filled by [`solve_potential`] or [`ResidueSystem::solve`].
    pub beta: Option<DVector<f64>>,
    /// Upper bound on the 2-norm condition number (`‖A‖∞`, since `λ_min ≥ 1`).
    pub condition: f64,
    kappa: Vec<f64>,
}

/// Builds the symmetric residue system at `(x, t)`.
pub fn assemble_system(ensemble: &SolitonEnsemble, x: f64, t: f64) -> Result<ResidueSystem> {
    let kappa = ensemble.kappa();
    let n = kappa.len();
    let nf = n as f64;
    let mut worst = 0.0_f64;
    let mut v = DVector::zeros(n);
    for (j, (&k, &c)) in kappa.iter().zip(ensemble.c()).enumerate() {
        worst = worst.max((2.0 * k * x).abs() + (TIME_EXPONENT * k.powi(3) * t).abs());
        let log_w = (c / nf).ln() - 2.0 * k * x + TIME_EXPONENT * k.powi(3) * t;
        v[j] = (0.5 * log_w).exp();
    }
    if worst > EXPONENT_GUARD {
        return Err(Error::Overflow {
            exponent: worst,
            limit: EXPONENT_GUARD,
        });
    }
    let a = DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { 1.0 } else { 0.0 };
        d + v[i] * v[j] / (kappa[i] + kappa[j])
    });
    let condition = (0..n)
        .map(|i| a.row(i).iter().map(|e| e.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    Ok(ResidueSystem {
        a,
        b: v,
        beta: None,
        condition,
        kappa: kappa.to_vec(),
    })
}

impl ResidueSystem {
    fn check_condition(&self) -> Result<()> {
        if !(self.condition <= CONDITION_LIMIT) {
            return Err(Error::Conditioning {
                estimate: self.condition,
                limit: CONDITION_LIMIT,
            });
        }
        Ok(())
    }

    /// Solves for `β` and `∂ₓβ`, returning `u = 2·Σ ∂ₓβⱼ`.
    pub fn solve(&mut self) -> Result<f64> {
        self.check_condition()?;
        let chol = self
            .a
            .clone()
            .cholesky()
            .ok_or(Error::Conditioning {
                estimate: f64::INFINITY,
                limit: CONDITION_LIMIT,
            })?;
        let h = chol.solve(&self.b);
        // ∂ₓ(1/wⱼ) = 2κⱼ/wⱼ, hence (I + VCV) g = 2κ∘h and ∂ₓβ = −v∘g.
        let rhs = DVector::from_iterator(
            h.len(),
            h.iter().zip(&self.kappa).map(|(hj, k)| 2.0 * k * hj),
        );
        let g = chol.solve(&rhs);
        let u = -2.0 * self.b.dot(&g);
        self.beta = Some(self.b.component_mul(&h));
        Ok(u)
    }

    /// `Σ βⱼ`, solving if needed.
    pub fn beta_sum(&mut self) -> Result<f64> {
        if self.beta.is_none() {
            self.solve()?;
        }
        Ok(self.beta.as_ref().map(|b| b.sum()).unwrap_or(0.0))
    }
}

/// `u(x, t)` of the ensemble.
pub fn solve_potential(ensemble: &SolitonEnsemble, x: f64, t: f64) -> Result<f64> {
    assemble_system(ensemble, x, t)?.solve()
}

/// `−2η²·sech²(η(x − 4η²t − x₀))` with `x₀ = log(c̃/(2η))/(2η)`.
///
/// This is the one-soliton solution of the residue system with `N = 1`.
pub fn one_soliton_closed_form(eta: f64, c_tilde: f64, x: f64, t: f64) -> f64 {
    let x0 = (c_tilde / (2.0 * eta)).ln() / (2.0 * eta);
    let s = 1.0 / (eta * (x - 4.0 * eta * eta * t - x0)).cosh();
    -2.0 * eta * eta * s * s
}
