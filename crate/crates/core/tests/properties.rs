use kdv_gas::asymptotics;
use kdv_gas::gas::{build_kernel, positivity_report, NystromGrid};
use kdv_gas::nsoliton::solve_potential;
use kdv_gas::special::{self, EllipticData};
use kdv_gas::spectral::{sample_poles, GasSpectrum, ReflectionCoefficient, ReflectionSpec, SolitonEnsemble};
use proptest::prelude::*;

fn spectrum() -> impl Strategy<Value = GasSpectrum> {
    (0.1..1.5f64, 0.1..1.5f64).prop_map(|(a, w)| GasSpectrum::new(a, a + w).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn k_grows_and_e_shrinks(m in 0.0..0.999f64, dm in 1e-4..1e-3f64) {
        let (k0, k1) = (special::elliptic_k(m).unwrap(), special::elliptic_k(m + dm).unwrap());
        let (e0, e1) = (special::elliptic_e(m).unwrap(), special::elliptic_e(m + dm).unwrap());
        prop_assert!(k1 > k0 && e1 < e0);
        prop_assert!(k0 >= std::f64::consts::FRAC_PI_2 && e0 <= std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn legendre_relation(m in 0.01..0.99f64) {
        prop_assert!(EllipticData::new(m).unwrap().legendre_residual().abs() < 1e-12);
    }

    #[test]
    fn dn_bounds_and_period(z in -20.0..20.0f64, m in 0.0..0.99f64) {
        let d = special::jacobi_dn(z, m).unwrap();
        prop_assert!(d >= (1.0 - m * m).sqrt() - 1e-14 && d <= 1.0 + 1e-14);
        let k = special::elliptic_k(m).unwrap();
        prop_assert!((special::jacobi_dn(z + 2.0 * k, m).unwrap() - d).abs() < 1e-12);
    }

    #[test]
    fn uniform_poles_are_equally_spaced(s in spectrum(), n in 1usize..200) {
        let p = sample_poles(n, &s, None).unwrap();
        prop_assert_eq!(p.len(), n);
        let h = s.width() / n as f64;
        prop_assert!((p[0] - s.eta1 - h).abs() < 1e-12);
        prop_assert!(p.windows(2).all(|w| (w[1] - w[0] - h).abs() < 1e-12));
        prop_assert_eq!(p[n - 1], s.eta2);
    }

    #[test]
    fn quantiles_map_affinely(a in 0.1..1.0f64, w in 0.2..1.0f64, scale in 0.5..2.0f64, shift in 0.0..1.0f64) {
        let s1 = GasSpectrum::new(a, a + w).unwrap();
        let s2 = GasSpectrum::new(scale * a + shift, scale * (a + w) + shift).unwrap();
        let rho1 = move |z: f64| 1.0 + (z - a) / w;
        let rho2 = move |z: f64| rho1((z - shift) / scale);
        let p1 = sample_poles(12, &s1, Some(&rho1)).unwrap();
        let p2 = sample_poles(12, &s2, Some(&rho2)).unwrap();
        for (x, y) in p1.iter().zip(&p2) {
            prop_assert!((scale * x + shift - y).abs() < 1e-10);
        }
    }

    #[test]
    fn shifting_norming_constants_translates(x in -3.0..3.0f64, a in -1.0..1.0f64) {
        // cⱼ → cⱼ·e^{2κⱼa} is the translation x → x − a.
        let kappa = vec![0.6, 0.95, 1.3];
        let c = vec![0.8, 1.5, 0.4];
        let moved: Vec<f64> = kappa.iter().zip(&c).map(|(k, c)| c * (2.0 * k * a).exp()).collect();
        let e0 = SolitonEnsemble::new(kappa.clone(), c).unwrap();
        let e1 = SolitonEnsemble::new(kappa, moved).unwrap();
        let u0 = solve_potential(&e0, x - a, 0.0).unwrap();
        let u1 = solve_potential(&e1, x, 0.0).unwrap();
        prop_assert!((u0 - u1).abs() < 1e-12);
    }

    #[test]
    fn whitham_inverse_round_trip(s in spectrum(), f in 0.01..0.95f64) {
        let alpha = s.eta1 + f * (s.eta2 - s.eta1);
        let xi = asymptotics::whitham_xi_of_alpha(alpha, &s).unwrap();
        prop_assert!(xi >= asymptotics::xi_crit(&s) - 1e-12 && xi < s.eta2 * s.eta2);
        let back = asymptotics::whitham_alpha_of_xi(xi, &s).unwrap();
        prop_assert!((back - alpha).abs() < 1e-10);
    }

    #[test]
    fn phase_identities(s in spectrum(), c0 in 0.1..3.0f64, c1 in -0.05..0.5f64) {
        let r = ReflectionCoefficient::new(ReflectionSpec::Polynomial { coeffs: vec![c0, c1] }, &s).unwrap();
        let p = asymptotics::phase_data(&s, &r).unwrap();
        prop_assert!((p.delta - p.omega * p.phi).norm() < 1e-10);
        let m = asymptotics::phases_modulated(0.5 * (s.eta1 + s.eta2), &s, &r).unwrap();
        prop_assert!((m.delta_tilde - m.omega_alpha * m.phi_tilde).norm() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_is_positive(s in spectrum(), r1 in 1e-3..1e3f64, x in -15.0..15.0f64, t in 0.0..1.5f64) {
        let r = ReflectionCoefficient::constant(r1, &s).unwrap();
        let grid = NystromGrid::gauss_legendre(24, &s).unwrap();
        match build_kernel(&s, &r, x, t, &grid) {
            Ok(k) => prop_assert!(positivity_report(&k).min_eig >= 1.0 - 1e-8),
            Err(kdv_gas::Error::Overflow { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn dn_and_theta_forms_agree(x in -40.0..-1.0f64, t in 0.0..5.0f64) {
        let s = GasSpectrum::reference();
        let r = ReflectionCoefficient::constant(1.0, &s).unwrap();
        let dn = asymptotics::u_asymptotic(x, t, &s, &r).unwrap().0;
        let th = asymptotics::u_theta_form(x, t, &s, &r).unwrap();
        prop_assert!((dn - th).abs() < 1e-9);
    }

    #[test]
    fn reflection_spec_round_trips(c0 in 0.1..5.0f64, c2 in 0.0..2.0f64) {
        let spec = ReflectionSpec::Polynomial { coeffs: vec![c0, 0.0, c2] };
        let json = serde_json::to_string(&spec).unwrap();
        prop_assert_eq!(serde_json::from_str::<ReflectionSpec>(&json).unwrap(), spec);
    }
}
