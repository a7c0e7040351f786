//! Singular angular cross sections and the moments taken against them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::quadrature::{integrate_graded, Estimate, QuadratureSpec};
use crate::{Error, Result, Scalar};

/// Functional form of `beta(theta)` on `0 < |theta| <= pi/4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossSectionForm {
    /// `amplitude |theta|^{-1-2s}`
    PowerLawTheta,
    /// `amplitude |sin theta|^{-1-2s} cos theta`
    #[default]
    PowerLawSine,
}

impl fmt::Display for CrossSectionForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PowerLawTheta => "power-law-theta",
            Self::PowerLawSine => "power-law-sine",
        })
    }
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawModel<T> {
    s: T,
    amplitude: T,
    form: CrossSectionForm,
}

/// Cross section with grazing singularity of order `theta^{-1-2s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel<T>", bound = "T: Scalar")]
pub struct SingularityModel<T> {
    s: T,
    amplitude: T,
    form: CrossSectionForm,
}

impl<T: Scalar> TryFrom<RawModel<T>> for SingularityModel<T> {
    type Error = Error;

    fn try_from(raw: RawModel<T>) -> Result<Self> {
        Self::new(raw.s, raw.amplitude, raw.form)
    }
}

impl<T: Scalar> SingularityModel<T> {
    pub fn new(s: T, amplitude: T, form: CrossSectionForm) -> Result<Self> {
        if !(s > T::zero() && s < T::one()) {
            return Err(Error::InvalidParameter {
                name: "s",
                detail: format!("singularity exponent must lie in (0, 1), got {s}"),
            });
        }
        if !(amplitude > T::zero() && amplitude.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                detail: format!("amplitude must be positive and finite, got {amplitude}"),
            });
        }
        Ok(Self { s, amplitude, form })
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    pub fn form(&self) -> CrossSectionForm {
        self.form
    }

    /// Same model with unit amplitude.
    pub fn unit(&self) -> Self {
        Self {
            amplitude: T::one(),
            ..*self
        }
    }

    pub fn quarter_pi() -> T {
        T::FRAC_PI_4()
    }

    /// `beta(theta)`.
    pub fn beta_eval(&self, theta: T) -> Result<T> {
        let a = theta.abs();
        if a == T::zero() {
            return Err(Error::SingularPoint);
        }
        if !(a <= Self::quarter_pi() * (T::one() + T::epsilon())) {
            return Err(Error::Domain {
                what: "beta_eval",
                value: theta.f64(),
                expected: "0 < |theta| <= pi/4",
            });
        }
        Ok(self.amplitude * self.ln_unit_beta(a).exp())
    }

    /// `ln beta(theta) - ln amplitude` for `0 < theta <= pi/4`.
    pub(crate) fn ln_unit_beta(&self, theta: T) -> T {
        let p = -(T::one() + T::lit(2.0) * self.s);
        match self.form {
            CrossSectionForm::PowerLawTheta => p * theta.ln(),
            CrossSectionForm::PowerLawSine => p * theta.sin().ln() + theta.cos().ln(),
        }
    }

    /// `beta(theta) / amplitude` for `0 < theta <= pi/4`.
    pub(crate) fn unit_beta(&self, theta: T) -> T {
        self.ln_unit_beta(theta).exp()
    }

    /// `Lambda_{n,m} = int beta(theta) sin^{2n} theta cos^{2m} theta dtheta`
    /// over `|theta| <= pi/4`.
    pub fn angular_moment(&self, n: usize, m: usize, quad: &QuadratureSpec) -> Result<T> {
        self.ln_angular_moment(n, m, quad).map(T::exp)
    }

    /// Natural logarithm of [`Self::angular_moment`]; finite even when the
    /// moment itself underflows.
    pub fn ln_angular_moment(&self, n: usize, m: usize, quad: &QuadratureSpec) -> Result<T> {
        if n == 0 {
            return Err(Error::Divergent {
                what: "angular_moment",
            });
        }
        let two = T::lit(2.0);
        let (nn, mm) = (T::of(n), T::of(m));
        let ln_f = |th: T| self.ln_unit_beta(th) + two * nn * th.sin().ln() + two * mm * th.cos().ln();
        let leading = two * nn - T::one() - two * self.s;
        let peak = sampled_max(ln_f);
        let est = integrate_graded(
            |th| (ln_f(th) - peak).exp(),
            Self::quarter_pi(),
            T::lit(quad.grading_for(leading.f64())),
            quad,
        );
        let value = est.require("angular_moment", Some((n, m)), T::lit(quad.abs_tol))?;
        Ok((two * value).ln() + peak + self.amplitude.ln())
    }

    /// `int beta(theta) (1 - cos^{2n} theta - sin^{2n} theta) dtheta`; the
    /// eigenvalue `lambda_{2n}`. Exactly zero for `n = 1`.
    pub fn regularized_moment(&self, n: usize, quad: &QuadratureSpec) -> Result<T> {
        if n == 0 {
            return Err(Error::Domain {
                what: "regularized_moment",
                value: 0.0,
                expected: "n >= 1",
            });
        }
        if n == 1 {
            return Ok(T::zero());
        }
        let nn = T::of(n);
        let two = T::lit(2.0);
        let est = self.integrate_weighted(
            T::lit(2.0),
            |th| {
                let sn = th.sin();
                one_minus_cos_pow(nn, sn) - (two * nn * sn.ln()).exp()
            },
            quad,
        );
        est.require("regularized_moment", Some((n, 0)), T::lit(quad.abs_tol))
    }

    /// `int beta(theta) (1 - cos^{2n} theta) dtheta`, i.e. `-alpha_{0,2n}`.
    pub fn regularized_cos_moment(&self, n: usize, quad: &QuadratureSpec) -> Result<T> {
        if n == 0 {
            return Err(Error::Domain {
                what: "regularized_cos_moment",
                value: 0.0,
                expected: "n >= 1",
            });
        }
        let nn = T::of(n);
        let est = self.integrate_weighted(T::lit(2.0), |th| one_minus_cos_pow(nn, th.sin()), quad);
        est.require("regularized_cos_moment", Some((0, n)), T::lit(quad.abs_tol))
    }

    /// `int_{|theta| <= pi/4} beta(theta) f(theta) dtheta` for an even `f`
    /// vanishing like `theta^{leading_power}` at the origin.
    ///
    /// The integrand is divided by its sampled peak before quadrature, so the
    /// absolute tolerance of `quad` acts relative to the integrand scale.
    pub fn integrate_weighted<F>(&self, leading_power: T, f: F, quad: &QuadratureSpec) -> Estimate<T>
    where
        F: Fn(T) -> T,
    {
        let g = |th: T| self.unit_beta(th) * f(th);
        let scale = sampled_max(|th| g(th).abs()).max(T::min_positive_value());
        let leading = leading_power - T::one() - T::lit(2.0) * self.s;
        let est = integrate_graded(
            |th| g(th) / scale,
            Self::quarter_pi(),
            T::lit(quad.grading_for(leading.f64())),
            quad,
        );
        let factor = T::lit(2.0) * self.amplitude * scale;
        Estimate {
            value: est.value * factor,
            error: est.error * factor,
            ..est
        }
    }
}

/// `1 - cos^{2n} theta` from `sin theta`, without cancellation at small angles.
pub(crate) fn one_minus_cos_pow<T: Scalar>(n: T, sin_theta: T) -> T {
    -(n * (-sin_theta * sin_theta).ln_1p()).exp_m1()
}

/// Max of `f` over a uniform sample of `(0, pi/4]`.
fn sampled_max<T: Scalar, F: Fn(T) -> T>(f: F) -> T {
    const SAMPLES: usize = 96;
    let h = T::FRAC_PI_4() / T::of(SAMPLES);
    (1..=SAMPLES)
        .map(|i| f(h * T::of(i)))
        .fold(T::neg_infinity(), T::max)
}
