use radial_boltzmann::specfun::incomplete_beta;
use radial_boltzmann::{CrossSectionForm, Error, QuadratureSpec, SingularityModel};
use radial_boltzmann_oracle as oracle;
use std::f64::consts::FRAC_PI_4;

fn model(s: f64, form: CrossSectionForm) -> SingularityModel<f64> {
    SingularityModel::new(s, 1.0, form).unwrap()
}

const FORMS: [CrossSectionForm; 2] = [CrossSectionForm::PowerLawTheta, CrossSectionForm::PowerLawSine];

#[test]
fn beta_eval_direct_values() {
    let theta = model(0.5, CrossSectionForm::PowerLawTheta);
    let v = theta.beta_eval(FRAC_PI_4).unwrap();
    assert!((v - FRAC_PI_4.powi(-2)).abs() < 1e-14);

    let sine = model(0.25, CrossSectionForm::PowerLawSine);
    let expected = 0.1f64.sin().powf(-1.5) * 0.1f64.cos();
    assert!((sine.beta_eval(0.1).unwrap() / expected - 1.0).abs() < 1e-15);

    for form in FORMS {
        let m = SingularityModel::new(0.7, 2.5, form).unwrap();
        for &t in &[1e-8, 0.03, 0.4, FRAC_PI_4] {
            assert_eq!(m.beta_eval(t).unwrap(), m.beta_eval(-t).unwrap());
            assert!(m.beta_eval(t).unwrap() > 0.0);
        }
        assert!(matches!(m.beta_eval(0.0), Err(Error::SingularPoint)));
    }
}

#[test]
fn sine_moments_match_incomplete_beta() {
    let quad = QuadratureSpec::default();
    for &s in &[0.25, 0.5, 0.75] {
        let m = model(s, CrossSectionForm::PowerLawSine);
        let one = m.angular_moment(1, 0, &quad).unwrap();
        assert!((one / incomplete_beta(1.0 - s, 1.0, 0.5).unwrap() - 1.0).abs() < 1e-8);
        let three_two = m.angular_moment(3, 2, &quad).unwrap();
        assert!((three_two / incomplete_beta(3.0 - s, 3.0, 0.5).unwrap() - 1.0).abs() < 1e-8);
        let mut worst = 0.0f64;
        for n in 1..=30u64 {
            for k in 0..=30u64 {
                let got = m.angular_moment(n as usize, k as usize, &quad).unwrap();
                let exact = oracle::sine_model::angular_moment(s, 1.0, n, k);
                worst = worst.max((got / exact - 1.0).abs());
            }
        }
        assert!(worst < 1e-8, "s={s}: worst relative error {worst:e}");
    }
}

#[test]
fn theta_moment_agrees_with_second_integrator() {
    let quad = QuadratureSpec::with_tolerance(1e-12);
    for &s in &[0.25, 0.5, 0.75] {
        let m = model(s, CrossSectionForm::PowerLawTheta);
        let got = m.angular_moment(2, 1, &quad).unwrap();
        let reference = 2.0
            * oracle::tanh_sinh(
                |t: f64| t.powf(3.0 - 2.0 * s) * (t.sin() / t).powi(4) * t.cos().powi(2),
                0.0,
                FRAC_PI_4,
                1e-15,
            );
        assert!((got / reference - 1.0).abs() < 1e-10, "s={s}: {got} vs {reference}");
    }
}

#[test]
fn regularized_moment_trivial_order_vanishes() {
    let quad = QuadratureSpec::default();
    for form in FORMS {
        for &s in &[0.1, 0.5, 0.9] {
            assert_eq!(model(s, form).regularized_moment(1, &quad).unwrap(), 0.0);
        }
    }
}

#[test]
fn regularized_moment_second_order_closed_form() {
    // 1 - (1-t)^2 - t^2 = 2t - 2t^2 under t = sin^2(theta)
    let quad = QuadratureSpec::default();
    for &s in &[0.25, 0.5, 0.75] {
        let got = model(s, CrossSectionForm::PowerLawSine).regularized_moment(2, &quad).unwrap();
        let exact = 2.0 * incomplete_beta(1.0 - s, 1.0, 0.5).unwrap() - 2.0 * incomplete_beta(2.0 - s, 1.0, 0.5).unwrap();
        assert!((got / exact - 1.0).abs() < 1e-9, "s={s}");
        let series = oracle::sine_model::eigenvalue(s, 1.0, 2);
        assert!((got / series - 1.0).abs() < 1e-9);
    }
}

#[test]
fn regularized_moments_increase_with_order() {
    let quad = QuadratureSpec::default();
    for form in FORMS {
        let m = model(0.5, form);
        let lam: Vec<f64> = (2..=50).map(|n| m.regularized_moment(n, &quad).unwrap()).collect();
        assert!(lam.windows(2).all(|w| w[1] > w[0]), "{form}");
        let cos: Vec<f64> = (1..=50).map(|n| m.regularized_cos_moment(n, &quad).unwrap()).collect();
        assert!(cos.windows(2).all(|w| w[1] > w[0]), "{form}");
        assert!(cos[0] > 0.0);
    }
}

#[test]
fn cos_moment_low_orders() {
    let quad = QuadratureSpec::default();
    for &s in &[0.25, 0.5, 0.75] {
        let sine = model(s, CrossSectionForm::PowerLawSine);
        let got = sine.regularized_cos_moment(1, &quad).unwrap();
        assert!((got / incomplete_beta(1.0 - s, 1.0, 0.5).unwrap() - 1.0).abs() < 1e-9);
    }
    let theta = model(0.5, CrossSectionForm::PowerLawTheta);
    let got = theta.regularized_cos_moment(2, &QuadratureSpec::with_tolerance(1e-12)).unwrap();
    let reference = 2.0
        * oracle::tanh_sinh(|t: f64| (t.sin() / t).powi(2) * (1.0 + t.cos().powi(2)), 0.0, FRAC_PI_4, 1e-15);
    assert!((got / reference - 1.0).abs() < 1e-10);
}

#[test]
fn doubled_half_interval_matches_full_interval() {
    let quad = QuadratureSpec::with_tolerance(1e-12);
    for form in FORMS {
        let m = model(0.4, form);
        let integrand = |t: f64| {
            let ln_beta = match form {
                CrossSectionForm::PowerLawTheta => -1.8 * t.abs().ln(),
                CrossSectionForm::PowerLawSine => -1.8 * t.sin().abs().ln() + t.cos().ln(),
            };
            (ln_beta + 6.0 * t.sin().abs().ln() + 4.0 * t.cos().ln()).exp()
        };
        let full = oracle::tanh_sinh(integrand, -FRAC_PI_4, 0.0, 1e-15) + oracle::tanh_sinh(integrand, 0.0, FRAC_PI_4, 1e-15);
        let got = m.angular_moment(3, 2, &quad).unwrap();
        assert!((got / full - 1.0).abs() < 1e-10, "{form}");
    }
}

#[test]
fn amplitude_scales_linearly() {
    let quad = QuadratureSpec::default();
    for form in FORMS {
        let unit = SingularityModel::new(0.3f64, 1.0, form).unwrap();
        let scaled = SingularityModel::new(0.3, 3.5, form).unwrap();
        let a = unit.regularized_moment(7, &quad).unwrap();
        let b = scaled.regularized_moment(7, &quad).unwrap();
        assert!((b / a - 3.5).abs() < 1e-12);
    }
}

#[test]
fn large_orders_stay_finite() {
    let quad = QuadratureSpec::default();
    for form in FORMS {
        let m = model(0.5, form);
        let v = m.angular_moment(64, 64, &quad).unwrap();
        assert!(v > 0.0 && v.is_finite());
        let l = m.ln_angular_moment(200, 200, &quad).unwrap();
        assert!(l.is_finite());
        assert!(m.regularized_moment(200, &quad).unwrap().is_finite());
    }
}
