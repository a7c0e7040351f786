use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use radial_boltzmann::cascade::{
    project_initial, rhs, solve_closed_form, solve_closed_form_with, solve_numeric, ClosedFormOptions,
};
use radial_boltzmann::field::ProfileShape;
use radial_boltzmann::{
    CrossSectionForm, InitialData, ModeCoefficients, QuadratureSpec, RadialProfile, SingularityModel,
    SpectrumTables, StepControl,
};
use radial_boltzmann_oracle as oracle;

fn tables(n: usize) -> SpectrumTables<f64> {
    let model = SingularityModel::new(0.5, 1.0, CrossSectionForm::PowerLawSine).unwrap();
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

fn tight() -> StepControl {
    StepControl {
        atol: 1e-24,
        ..StepControl::default()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn projection_of_basis_functions() {
    let quad = QuadratureSpec::default();
    let mut c = vec![0.0f64; 3];
    c[2] = 1.0;
    let init = project_initial(&RadialProfile::modes(c), 12, &quad).unwrap();
    for (n, v) in init.b.iter().enumerate() {
        let expect = if n == 2 { 1.0 } else { 0.0 };
        assert!((v - expect).abs() < 1e-10, "n={n}: {v}");
    }
    assert!(init.in_n_perp);

    let root = RadialProfile::Closed(ProfileShape::RootMaxwellian { amplitude: 1.0f64 });
    let init = project_initial(&root, 12, &quad).unwrap();
    assert!((init.b[0] - 1.0).abs() < 1e-10);
    assert!(init.b[1..].iter().all(|v| v.abs() < 1e-10));
    assert!(!init.in_n_perp);

    let a = 0.05 / 2f64.sqrt();
    let init = project_initial(&RadialProfile::modes(vec![0.0, 0.0, a, a]), 10, &quad).unwrap();
    assert!((init.b[2] - a).abs() < 1e-10 && (init.b[3] - a).abs() < 1e-10);
}

#[test]
fn projection_satisfies_bessel_inequality() {
    let quad = QuadratureSpec::default();
    let bump = RadialProfile::Closed(ProfileShape::GaussianBump {
        center: 2.0,
        width: 0.4,
        amplitude: 0.3,
    });
    let init = project_initial(&bump, 24, &quad).unwrap();
    let norm_sq = radial_boltzmann::field::l2_norm_squared(&bump, &quad).unwrap();
    let sum: f64 = init.b.iter().map(|v| v * v).sum();
    assert!(sum <= norm_sq * (1.0 + 1e-9), "{sum} > {norm_sq}");
    assert!(sum > 0.9 * norm_sq);
}

#[test]
fn projection_rejects_non_finite_profile() {
    let bad = RadialProfile::Closed(ProfileShape::GaussianBump {
        center: 1.0,
        width: 0.0,
        amplitude: 1.0,
    });
    assert!(project_initial(&bad, 4, &QuadratureSpec::default()).is_err());
}

#[test]
fn rhs_examples() {
    let t = tables(8);
    let zero = rhs(&t, &ModeCoefficients::zeros(8)).unwrap();
    assert!(zero.iter().all(|v| *v == 0.0));

    let d = rhs(&t, &ModeCoefficients::unit(8, 2, 1.0)).unwrap();
    for (n, v) in d.iter().enumerate() {
        let expect = match n {
            2 => -t.lambda(2),
            4 => t.w(2, 2),
            _ => 0.0,
        };
        assert!((v - expect).abs() <= 1e-15 * expect.abs().max(1.0), "n={n}: {v} vs {expect}");
    }

    let d = rhs(&t, &ModeCoefficients::unit(8, 0, 0.7)).unwrap();
    assert!(d.iter().all(|v| *v == 0.0));

    assert!(rhs(&t, &ModeCoefficients::zeros(5)).is_err());
}

#[test]
fn conserved_modes_stay_constant_for_general_data() {
    let t = tables(8);
    let mut b = ModeCoefficients::zeros(8);
    b.b[0] = 0.3;
    b.b[1] = -0.2;
    b.b[3] = 0.1;
    let d = rhs(&t, &b).unwrap();
    assert_eq!(d[0], 0.0);
    assert!(d[1].abs() < 1e-15);
}

#[test]
fn low_modes_are_pure_exponentials() {
    let t = tables(16);
    let mut b = vec![0.0; 17];
    b[2] = 0.03;
    b[3] = -0.02;
    let sol = solve_closed_form(&t, &InitialData::new(b).unwrap()).unwrap();
    assert_eq!(sol.terms(2).unwrap().len(), 1);
    assert_eq!(sol.terms(2).unwrap()[0].rate, t.lambda(2));
    assert_eq!(sol.terms(3).unwrap()[0].rate, t.lambda(3));
    for &time in &[0.1, 1.0, 5.0] {
        let v = sol.evaluate(time).unwrap();
        assert!(rel(v.b[2], 0.03 * (-t.lambda(2) * time).exp()) < 1e-10);
        assert!(rel(v.b[3], -0.02 * (-t.lambda(3) * time).exp()) < 1e-10);
    }
}

#[test]
fn mode_four_matches_two_exponential_formula() {
    let s = 0.5;
    let t = tables(8);
    let b2 = 0.04;
    let sol = solve_closed_form(&t, &InitialData::new(vec![0.0, 0.0, b2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap()).unwrap();
    let terms = sol.terms(4).unwrap();
    assert_eq!(terms.len(), 2);

    let l4 = oracle::sine_model::eigenvalue(s, 1.0, 2);
    let l8 = oracle::sine_model::eigenvalue(s, 1.0, 4);
    let big_lambda = oracle::sine_model::angular_moment(s, 1.0, 2, 2);
    let c84 = 70f64;
    let particular = 0.6 * c84.sqrt() * b2 * b2 * big_lambda / (l8 - 2.0 * l4);

    let forced = terms.iter().find(|e| rel(e.rate, 2.0 * l4) < 1e-9).unwrap();
    assert!(rel(forced.coeff, particular) < 1e-8, "{} vs {particular}", forced.coeff);
    let free = terms.iter().find(|e| rel(e.rate, l8) < 1e-9).unwrap();
    assert!(rel(free.coeff, -particular) < 1e-8);

    for &time in &[0.5, 2.0] {
        let expect = particular * ((-2.0 * l4 * time).exp() - (-l8 * time).exp());
        assert!(rel(sol.evaluate(time).unwrap().b[4], expect) < 1e-8);
    }
}

#[test]
fn single_mode_data_is_a_single_term() {
    let t = tables(24);
    for n in [2usize, 5, 11, 24] {
        let sol = solve_closed_form(&t, &InitialData::new(ModeCoefficients::unit(24, n, 0.05).b).unwrap()).unwrap();
        assert_eq!(sol.terms(n).unwrap(), &[radial_boltzmann::cascade::ExpTerm { rate: t.lambda(n), coeff: 0.05 }]);
        for m in 2..n {
            assert!(sol.terms(m).unwrap().is_empty());
        }
    }
}

#[test]
fn evaluation_at_zero_is_exact_and_decays() {
    let t = tables(16);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let init = random_perp(&mut rng, 16, 0.05);
    let sol = solve_closed_form(&t, &init).unwrap();
    assert_eq!(sol.evaluate(0.0).unwrap().b, init.b);
    for n in 2..=16 {
        let sum: f64 = sol.terms(n).unwrap().iter().map(|e| e.coeff).sum();
        assert!((sum - init.b[n]).abs() <= 1e-12 * init.norm());
    }
    let late = sol.evaluate(200.0).unwrap();
    assert!(late.l2_norm() < 1e-12);
}

#[test]
fn exponents_are_partition_sums_above_the_diagonal() {
    let t = tables(14);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let init = random_perp(&mut rng, 14, 0.08);
    let sol = solve_closed_form(&t, &init).unwrap();
    for n in 2..=14 {
        let sums: Vec<f64> = oracle::partitions(n, 2)
            .iter()
            .map(|p| p.iter().map(|&j| t.lambda(j)).sum())
            .collect();
        for e in sol.terms(n).unwrap() {
            assert!(e.rate >= t.lambda(n));
            assert!(sums.iter().any(|s| rel(e.rate, *s) < 1e-9), "mode {n}: rate {} not a partition sum", e.rate);
        }
    }
}

#[test]
fn closed_form_requires_orthogonal_data() {
    let t = tables(6);
    let init = InitialData::new(vec![0.1, 0.0, 0.02, 0.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(matches!(
        solve_closed_form(&t, &init),
        Err(radial_boltzmann::Error::NotOrthogonalToInvariants)
    ));
}

#[test]
fn numeric_solver_examples() {
    let t = tables(12);
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
    let ctl = StepControl::default();
    let zero = solve_numeric(&t, &InitialData::new(vec![0.0; 13]).unwrap(), &grid, &ctl).unwrap();
    assert!(zero.iter().all(|s| s.b.iter().all(|v| *v == 0.0)));

    let init = InitialData::new(ModeCoefficients::unit(12, 2, 0.05).b).unwrap();
    let num = solve_numeric(&t, &init, &[0.0, 1.0], &ctl).unwrap();
    let closed = solve_closed_form(&t, &init).unwrap().evaluate(1.0).unwrap();
    let scale = closed.b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for n in 0..=12 {
        assert!((num[1].b[n] - closed.b[n]).abs() <= 1e-8 * scale, "n={n}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let init = random_perp(&mut rng, 12, 0.05);
    for state in solve_numeric(&t, &init, &grid, &ctl).unwrap() {
        assert_eq!(state.b[0], 0.0);
        assert_eq!(state.b[1], 0.0);
    }
    assert!(solve_numeric(&t, &init, &[0.5, 1.0], &ctl).is_err());
}

#[test]
fn closed_form_agrees_with_numeric_on_random_data() {
    let t = tables(32);
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..4 {
        let init = random_perp(&mut rng, 32, 0.05);
        let closed = solve_closed_form(&t, &init).unwrap().evaluate_grid(&grid).unwrap();
        let num = solve_numeric(&t, &init, &grid, &tight()).unwrap();
        for (c, m) in closed.iter().zip(&num) {
            let scale = m.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let err = c.b.iter().zip(&m.b).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            assert!(err <= 1e-6 * scale, "t={}: {err:e} vs {scale:e}", c.t);
        }
    }
}

#[test]
fn truncation_does_not_feed_back() {
    let small = tables(16);
    let large = tables(32);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut b = random_perp(&mut rng, 8, 0.05).b;
    let lo = solve_closed_form(&small, &InitialData::new({ b.resize(17, 0.0); b.clone() }).unwrap()).unwrap();
    let hi = solve_closed_form(&large, &InitialData::new({ b.resize(33, 0.0); b }).unwrap()).unwrap();
    for &time in &[0.0, 0.5, 3.0] {
        let a = lo.evaluate(time).unwrap();
        let c = hi.evaluate(time).unwrap();
        for n in 0..=8 {
            assert!((a.b[n] - c.b[n]).abs() <= 1e-12 * a.b[n].abs().max(1e-300), "n={n} t={time}");
        }
    }
}

#[test]
fn resonance_falls_back_to_integration() {
    let t = tables(10);
    let tampered = t.clone().with_lambda(4, 2.0 * t.lambda(2));
    let init = InitialData::new(ModeCoefficients::unit(10, 2, 0.05).b).unwrap();
    let sol = solve_closed_form(&tampered, &init).unwrap();
    let event = sol.resonance().expect("resonance reported");
    assert_eq!(event.mode, 4);
    assert_eq!(sol.closed_modes(), 4);
    assert!(sol.terms(4).is_none());

    let grid = [0.0, 0.5, 1.0, 2.0];
    let mixed = sol.evaluate_grid(&grid).unwrap();
    let num = solve_numeric(&tampered, &init, &grid, &StepControl::default()).unwrap();
    for (a, b) in mixed.iter().zip(&num) {
        for n in 0..=10 {
            assert!((a.b[n] - b.b[n]).abs() < 1e-12, "n={n}");
        }
    }
    // secular growth t e^{-lambda_4 t}
    let b4 = mixed[2].b[4];
    let expect = t.w(2, 2) * 0.05 * 0.05 * (-2.0 * t.lambda(2)).exp();
    assert!(rel(b4, expect) < 1e-6, "{b4} vs {expect}");
}

#[test]
fn term_budget_is_enforced() {
    let t = tables(20);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let init = random_perp(&mut rng, 20, 0.5);
    let opts = ClosedFormOptions {
        term_budget: 3,
        ..ClosedFormOptions::default()
    };
    assert!(matches!(
        solve_closed_form_with(&t, &init, &opts),
        Err(radial_boltzmann::Error::TermBudgetExceeded { .. })
    ));
}

#[test]
fn zero_data_gives_empty_sums() {
    let t = tables(8);
    let sol = solve_closed_form(&t, &InitialData::new(vec![0.0; 9]).unwrap()).unwrap();
    assert!((0..=8).all(|n| sol.terms(n).unwrap().is_empty()));
    assert!(sol.evaluate(3.0).unwrap().b.iter().all(|v| *v == 0.0));
}
