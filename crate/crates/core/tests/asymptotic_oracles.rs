mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use kdv_gas::asymptotics::{self, GMode, Region, WhithamState};
use kdv_gas::spectral::{GasSpectrum, ReflectionCoefficient, ReflectionSpec};
use kdv_gas::Error;

fn fig1() -> (GasSpectrum, ReflectionCoefficient) {
    let s = GasSpectrum::reference();
    let r = ReflectionCoefficient::constant(1.0, &s).unwrap();
    (s, r)
}

fn bumpy(s: &GasSpectrum) -> ReflectionCoefficient {
    ReflectionCoefficient::new(ReflectionSpec::Polynomial { coeffs: vec![0.3, -0.2, 0.5] }, s).unwrap()
}

#[test]
fn frequency_and_kappa_from_quadrature() {
    let (s, _) = fig1();
    let m = s.modulus();
    let (k, e) = (common::k_oracle(m), common::e_oracle(m));
    let omega = asymptotics::frequency_omega(&s);
    assert_eq!(omega.re, 0.0);
    assert_abs_diff_eq!(omega.im, -PI * s.eta2 / k, epsilon = 1e-13);
    assert_abs_diff_eq!(asymptotics::kappa_constant(&s), s.eta2 * s.eta2 * (e / k - 1.0), epsilon = 1e-13);
}

#[test]
fn phase_shift_from_quadrature() {
    let (s, one) = fig1();
    for r in [one, bumpy(&s)] {
        let want = -common::band_integral(|z| r.r(z).ln(), s.eta1, s.eta2) / PI;
        assert_abs_diff_eq!(asymptotics::phase_phi(&s, &r).unwrap(), want, epsilon = 1e-12);
    }
    // Constant r reduces to a complete integral of the complementary modulus.
    let r = ReflectionCoefficient::constant(1.0, &s).unwrap();
    let mp = (1.0 - s.modulus().powi(2)).sqrt();
    let want = -(2.0_f64).ln() / PI * common::k_oracle(mp) / s.eta2;
    assert_abs_diff_eq!(asymptotics::phase_phi(&s, &r).unwrap(), want, epsilon = 1e-12);
}

#[test]
fn delta_is_omega_times_phi() {
    let s = GasSpectrum::new(0.4, 1.1).unwrap();
    for r in [ReflectionCoefficient::constant(1.0, &s).unwrap(), bumpy(&s)] {
        let p = asymptotics::phase_data(&s, &r).unwrap();
        assert!((p.delta - p.omega * p.phi).norm() < 1e-10);
        assert!(p.delta.re.abs() < 1e-15);
    }
}

#[test]
fn modulated_phases_from_quadrature() {
    let (s, _) = fig1();
    let r = bumpy(&s);
    for alpha in [0.5, 0.8, 1.2] {
        let p = asymptotics::phases_modulated(alpha, &s, &r).unwrap();
        let want = -common::band_integral(|z| r.r(z).ln(), alpha, s.eta2) / PI;
        assert_abs_diff_eq!(p.phi_tilde, want, epsilon = 1e-12);
        let k = common::k_oracle(alpha / s.eta2);
        assert_abs_diff_eq!(p.omega_alpha.im, -PI * s.eta2 / k, epsilon = 1e-12);
        assert!((p.delta_tilde - p.omega_alpha * p.phi_tilde).norm() < 1e-10);
        let expected = 2.0 * PI * s.eta2 * (alpha * alpha + s.eta2 * s.eta2 - 2.0 * p.xi) / k;
        assert_abs_diff_eq!(p.omega_tilde.im, expected, epsilon = 1e-11);
    }
}

#[test]
fn critical_point_from_quadrature() {
    let (s, _) = fig1();
    let m = s.modulus();
    let (k, e) = (common::k_oracle(m), common::e_oracle(m));
    let w = 1.0 + m * m + 2.0 * m * m * (1.0 - m * m) / (1.0 - m * m - e / k);
    assert_abs_diff_eq!(asymptotics::xi_crit(&s), 0.5 * s.eta2 * s.eta2 * w, epsilon = 1e-12);
    assert_abs_diff_eq!(asymptotics::xi_crit(&s), -2.8097605718462724, epsilon = 1e-12);
}

#[test]
fn alpha_of_xi_inverts_xi_of_alpha() {
    let (s, _) = fig1();
    for alpha in [0.55, 0.9, 1.3, 1.45] {
        let xi = asymptotics::whitham_xi_of_alpha(alpha, &s).unwrap();
        assert_abs_diff_eq!(asymptotics::whitham_alpha_of_xi(xi, &s).unwrap(), alpha, epsilon = 1e-12);
    }
    assert!(matches!(asymptotics::whitham_alpha_of_xi(-10.0, &s), Err(Error::Range(_))));
}

#[test]
fn degenerate_edge_of_the_fan() {
    let (s, r) = fig1();
    let e2 = s.eta2 * s.eta2;
    assert!(matches!(asymptotics::whitham_alpha_of_xi(e2 - 1e-14, &s), Err(Error::Degeneracy(_))));
    let t = 2.0;
    let inside = asymptotics::asymptotic_point(4.0 * t * (e2 - 1e-6), t, &s, &r).unwrap();
    assert_eq!(inside.region, Region::ModulatedWave);
    assert!(inside.u.is_finite());
    let edge = asymptotics::asymptotic_point(4.0 * t * e2, t, &s, &r).unwrap();
    assert_eq!(edge.region, Region::ExponentialDecay);
    assert_eq!(edge.u, 0.0);
}

#[test]
fn static_tail_matches_dn_oracle() {
    let (s, r) = fig1();
    let phi = asymptotics::phase_phi(&s, &r).unwrap();
    let m = s.modulus();
    let k = common::k_oracle(m);
    for x in [-30.0, -17.3, -5.5] {
        let dn = common::dn_oracle(s.eta2 * (x + phi) + k, m);
        let want = s.eta2 * s.eta2 - s.eta1 * s.eta1 - 2.0 * s.eta2 * s.eta2 * dn * dn;
        let (u, region) = asymptotics::u_asymptotic(x, 0.0, &s, &r).unwrap();
        assert_eq!(region, Region::UnmodulatedWave);
        assert_abs_diff_eq!(u, want, epsilon = 1e-11);
    }
}

#[test]
fn oscillation_bounds() {
    // dn² ∈ [1 − m², 1] ⇒ u ∈ [−η₁² − η₂², η₁² − η₂²], amplitude 2η₁².
    let (s, r) = fig1();
    let (lo, hi) = (-s.eta1.powi(2) - s.eta2.powi(2), s.eta1.powi(2) - s.eta2.powi(2));
    let mut seen = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..400 {
        let u = asymptotics::u_asymptotic(-20.0 + 0.01 * i as f64, 0.0, &s, &r).unwrap().0;
        seen = (seen.0.min(u), seen.1.max(u));
    }
    assert!(seen.0 >= lo - 1e-12 && seen.1 <= hi + 1e-12);
    assert!(seen.0 < lo + 1e-3 && seen.1 > hi - 1e-3);
}

#[test]
fn theta_form_equals_dn_form() {
    let (s, _) = fig1();
    let r = bumpy(&s);
    for (x, t) in [(-12.0, 0.0), (-30.0, 1.0), (-5.0, 1.0), (3.0, 1.0), (-60.0, 4.0)] {
        let dn = asymptotics::u_asymptotic(x, t, &s, &r).unwrap().0;
        let th = asymptotics::u_theta_form(x, t, &s, &r).unwrap();
        assert_abs_diff_eq!(dn, th, epsilon = 1e-9);
    }
}

#[test]
fn region_partition_at_t10() {
    let (s, r) = fig1();
    let t = 10.0;
    let xc = asymptotics::xi_crit(&s);
    let tag = |x: f64| asymptotics::asymptotic_point(x, t, &s, &r).unwrap().region;
    assert_eq!(tag(4.0 * t * xc - 0.01), Region::UnmodulatedWave);
    assert_eq!(tag(4.0 * t * xc + 0.01), Region::ModulatedWave);
    assert_eq!(tag(4.0 * t * 2.25 - 0.01), Region::ModulatedWave);
    assert_eq!(tag(4.0 * t * 2.25), Region::ExponentialDecay);
    let st = WhithamState::new(f64::NEG_INFINITY, &s).unwrap();
    assert_eq!((st.region, st.alpha), (Region::UnmodulatedWave, s.eta1));
}

#[test]
fn g_function_diagnostics() {
    let (s, _) = fig1();
    let xc = asymptotics::xi_crit(&s);
    for mode in [GMode::Static, GMode::Time { xi: -2.0 }, GMode::Time { xi: 0.0 }, GMode::Time { xi: 2.2 }] {
        let rep = asymptotics::g_diagnostics(&s, mode, 24).unwrap();
        assert!(rep.pass, "{mode:?}: {rep:?}");
        assert!(rep.moment_residuals.iter().all(|&v| v < 1e-10));
    }
    // Below ξ_crit the period of the g-function fixes the sign of the frequency.
    let rep = asymptotics::g_diagnostics(&s, GMode::Time { xi: xc - 0.2 }, 24).unwrap();
    let printed = rep.omega_bar_printed.unwrap();
    assert!((rep.omega_quadrature + printed).norm() < 1e-8 * printed.norm());
    assert!((rep.omega_quadrature - rep.omega_closed).norm() < 1e-8 * printed.norm());
}

#[test]
fn static_constants_satisfy_their_moment() {
    let (s, _) = fig1();
    let (c1, _) = asymptotics::g_constants(s.eta1, &s).unwrap();
    assert_abs_diff_eq!(c1, asymptotics::kappa_constant(&s), epsilon = 1e-14);
}
