use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use radial_boltzmann::cascade::{project_initial, solve_closed_form};
use radial_boltzmann::field::{
    decay_certificate, gelfand_shilov_diagnostic, l2_norm_squared, lyapunov_monotonicity, reconstruct,
    sharpness_exponent, spectral_norm,
};
use radial_boltzmann::{
    CrossSectionForm, Error, InitialData, ModeCoefficients, NormKind, QuadratureSpec, RadialProfile,
    SingularityModel, SpectrumTables,
};

fn tables(s: f64, n: usize) -> SpectrumTables<f64> {
    let model = SingularityModel::new(s, 1.0, CrossSectionForm::PowerLawSine).unwrap();
    SpectrumTables::build(model, n, &QuadratureSpec::default()).unwrap()
}

fn random_perp(rng: &mut ChaCha8Rng, n: usize, norm: f64) -> InitialData<f64> {
    let mut b = vec![0.0; n + 1];
    for v in b.iter_mut().skip(2) {
        *v = rng.gen_range(-1.0..1.0);
    }
    let s = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    b.iter_mut().for_each(|v| *v *= norm / s);
    InitialData::new(b).unwrap()
}

fn grid(end: f64, h: f64) -> Vec<f64> {
    (0..=(end / h).round() as usize).map(|i| i as f64 * h).collect()
}

/// Mode-2 component of the solution for pure mode-2 data, `0.05 e^{-lambda_4 t}`.
fn mode_two_only(t: &SpectrumTables<f64>, times: &[f64]) -> Vec<ModeCoefficients<f64>> {
    let init = InitialData::new(ModeCoefficients::unit(32, 2, 0.05).b).unwrap();
    let sol = solve_closed_form(t, &init).unwrap();
    sol.evaluate_grid(times)
        .unwrap()
        .into_iter()
        .map(|state| ModeCoefficients::new(state.t, ModeCoefficients::unit(32, 2, state.b[2]).b).unwrap())
        .collect()
}

#[test]
fn reconstruct_ground_state_and_zero() {
    let r = grid(6.0, 0.5);
    let g = reconstruct(&ModeCoefficients::unit(4, 0, 1.0), &r).unwrap();
    for &x in &r {
        let mu_half = (2.0 * std::f64::consts::PI).powf(-0.75) * (-x * x / 4.0).exp();
        assert!((g.eval(x).unwrap() - mu_half).abs() < 1e-14);
    }
    let z = reconstruct(&ModeCoefficients::<f64>::zeros(4), &r).unwrap();
    assert!(r.iter().all(|&x| z.eval(x).unwrap() == 0.0));
}

#[test]
fn reconstruct_project_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let b: Vec<f64> = (0..=20).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let coeffs = ModeCoefficients::new(0.0, b.clone()).unwrap();
    let r = grid(29.0, 0.0025);
    let profile = reconstruct(&coeffs, &r).unwrap();
    let back = project_initial(&profile, 20, &QuadratureSpec::default()).unwrap();
    for n in 0..=20 {
        assert!((back.b[n] - b[n]).abs() < 1e-9, "n={n}: {} vs {}", back.b[n], b[n]);
    }
}

#[test]
fn parseval_against_quadrature_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let b: Vec<f64> = (0..=20).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let t = tables(0.5, 20);
    let coeffs = ModeCoefficients::new(0.0, b.clone()).unwrap();
    let spectral = spectral_norm(&coeffs, NormKind::L2, &t).unwrap();
    let profile = RadialProfile::modes(b);
    let quad = l2_norm_squared(&profile, &QuadratureSpec::default()).unwrap().sqrt();
    assert!((spectral - quad).abs() < 1e-8 * spectral, "{spectral} vs {quad}");
}

#[test]
fn norm_examples() {
    let t = tables(0.5, 16);
    let e2 = ModeCoefficients::unit(16, 2, 1.0);
    assert_eq!(spectral_norm(&e2, NormKind::L2, &t).unwrap(), 1.0);
    for &time in &[0.0, 0.7, 3.0] {
        let v = spectral_norm(&e2, NormKind::WeightedSemigroup { t: time }, &t).unwrap();
        assert!((v - (t.lambda(2) * time / 2.0).exp()).abs() < 1e-14 * v);
    }
    for n in [0usize, 3, 16] {
        let en = ModeCoefficients::unit(16, n, 1.0);
        for &s2 in &[0.1, 0.25, 0.45] {
            let v = spectral_norm(&en, NormKind::FracSobolev { s_over_2: s2 }, &t).unwrap();
            let expect = (2.0 * n as f64 + 1.5f64).powf(s2);
            assert!((v - expect).abs() < 1e-14 * expect);
            let both = spectral_norm(&en, NormKind::SemigroupFracSobolev { t: 1.0, s_over_2: s2 }, &t).unwrap();
            assert!((both - expect * (t.lambda(n) / 2.0).exp()).abs() < 1e-13 * both);
        }
    }
}

#[test]
fn semigroup_norm_at_zero_is_l2() {
    let t = tables(0.5, 24);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let b: Vec<f64> = (0..=24).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c = ModeCoefficients::new(0.0, b).unwrap();
        assert_eq!(
            spectral_norm(&c, NormKind::WeightedSemigroup { t: 0.0 }, &t).unwrap(),
            spectral_norm(&c, NormKind::L2, &t).unwrap()
        );
    }
}

#[test]
fn norm_guards() {
    let t = tables(0.5, 8);
    let e8 = ModeCoefficients::unit(8, 8, 1.0);
    assert!(matches!(
        spectral_norm(&e8, NormKind::WeightedSemigroup { t: 1e6 }, &t),
        Err(Error::Overflow { .. })
    ));
    assert!(spectral_norm(&e8, NormKind::FracSobolev { s_over_2: 0.5 }, &t).is_err());
    assert!(spectral_norm(&ModeCoefficients::<f64>::zeros(9), NormKind::L2, &t).is_err());
}

#[test]
fn decay_certificate_examples() {
    let t = tables(0.5, 32);
    let times = grid(10.0, 0.25);

    let traj = mode_two_only(&t, &times);
    let report = decay_certificate(&traj, &t, 0.5, 0.05).unwrap();
    assert!(report.passed);
    assert!((report.records[0].ratio - 1.0).abs() < 1e-15);
    for r in &report.records {
        let expect = (-t.lambda(2) * 0.5 * r.t / 2.0).exp();
        assert!((r.ratio - expect).abs() < 1e-12, "t={}: {} vs {expect}", r.t, r.ratio);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let init = random_perp(&mut rng, 32, 0.05);
        let traj = solve_closed_form(&t, &init).unwrap().evaluate_grid(&times).unwrap();
        let report = decay_certificate(&traj, &t, 0.5, init.norm()).unwrap();
        assert!(report.passed, "first violation at {:?}", report.first_violation);
        assert!(report.records[0].ratio <= 1.0 + 1e-12);
    }
    assert!(decay_certificate(&traj, &t, 1.5, 0.05).is_err());
}

#[test]
fn decay_certificate_reports_violations() {
    let t = tables(0.5, 8);
    let states: Vec<ModeCoefficients<f64>> = [0.0, 1.0, 2.0]
        .iter()
        .map(|&time| ModeCoefficients::new(time, ModeCoefficients::unit(8, 2, 0.05).b).unwrap())
        .collect();
    let report = decay_certificate(&states, &t, 0.5, 0.05).unwrap();
    assert!(!report.passed);
    assert_eq!(report.first_violation, Some(1.0));
}

#[test]
fn lyapunov_examples() {
    let t = tables(0.5, 32);
    let times = grid(10.0, 0.5);
    let traj = mode_two_only(&t, &times);
    let report = lyapunov_monotonicity(&traj, &t).unwrap();
    assert!(report.passed);
    for w in report.values.windows(2) {
        assert!(w[1].1 < w[0].1);
    }
    for (time, v) in &report.values {
        let expect = 0.05f64.powi(2) * (-t.lambda(2) * time).exp();
        assert!((v - expect).abs() < 1e-12 * 0.05f64.powi(2));
    }

    let zero: Vec<ModeCoefficients<f64>> = times
        .iter()
        .map(|&time| ModeCoefficients::new(time, vec![0.0; 33]).unwrap())
        .collect();
    let report = lyapunov_monotonicity(&zero, &t).unwrap();
    assert!(report.passed && report.values.iter().all(|v| v.1 == 0.0));

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..5 {
        let init = random_perp(&mut rng, 32, 0.05);
        let traj = solve_closed_form(&t, &init).unwrap().evaluate_grid(&times).unwrap();
        assert!(lyapunov_monotonicity(&traj, &t).unwrap().passed);
    }
}

#[test]
fn smoothing_rate_grows_in_time() {
    let n = 32;
    for &s in &[0.25, 0.5, 0.75] {
        let t = tables(s, n);
        let mut b = vec![0.05 / ((n - 1) as f64).sqrt(); n + 1];
        b[0] = 0.0;
        b[1] = 0.0;
        let sol = solve_closed_form(&t, &InitialData::new(b).unwrap()).unwrap();
        let c0 = gelfand_shilov_diagnostic(&sol.evaluate(0.0).unwrap(), &t).unwrap();
        assert!(c0.c_t.abs() < 1e-10);
        let unit_rate = gelfand_shilov_diagnostic(&sol.evaluate(1.0).unwrap(), &t).unwrap().c_t;
        let mut last = 0.0;
        for &time in &[0.1, 0.25, 0.5, 1.0] {
            let fit = gelfand_shilov_diagnostic(&sol.evaluate(time).unwrap(), &t).unwrap();
            assert!(fit.c_t > last, "s={s} t={time}: {} <= {last}", fit.c_t);
            assert!((fit.c_t / time - unit_rate).abs() < 0.1 * unit_rate);
            last = fit.c_t;
        }
    }
}

#[test]
fn smoothing_fit_needs_enough_modes() {
    let t = tables(0.5, 8);
    let e3 = ModeCoefficients::unit(8, 3, 0.05);
    assert!(matches!(
        gelfand_shilov_diagnostic(&e3, &t),
        Err(Error::DegenerateFit { points: 1, .. })
    ));
}

#[test]
fn single_mode_data_saturates_the_semigroup_weight() {
    let t = tables(0.5, 64);
    for n in [2usize, 7, 20] {
        let init = InitialData::new(ModeCoefficients::unit(64, n, 0.05).b).unwrap();
        let sol = solve_closed_form(&t, &init).unwrap();
        for &time in &[0.0, 0.5, 2.0] {
            let state = sol.evaluate(time).unwrap();
            let mode_n = ModeCoefficients::unit(64, n, state.b[n]);
            let v = spectral_norm(&mode_n, NormKind::WeightedSemigroup { t: 2.0 * time }, &t).unwrap();
            assert!((v - 0.05).abs() < 1e-14, "n={n} t={time}: {v}");
        }
    }
}

#[test]
fn stronger_smoothing_index_is_not_uniform() {
    for &s in &[0.25, 0.5, 0.75] {
        let t = tables(s, 64);
        let fit = t.asymptotic_exponent_fit(32, 64).unwrap();
        let c = fit.intercept.exp();
        let above: Vec<f64> = (2..=64).map(|n| sharpness_exponent(&t, n, c, fit.s_est + 0.1, 1.0)).collect();
        assert!(above[above.len() - 1] > 0.0, "s={s}");
        assert!(above.windows(2).rev().take(10).all(|w| w[1] > w[0]), "s={s}");
        let below: Vec<f64> = (2..=64).map(|n| sharpness_exponent(&t, n, c, fit.s_est - 0.1, 1.0)).collect();
        assert!(below.windows(2).rev().take(10).all(|w| w[1] < w[0]), "s={s}");
    }
}
