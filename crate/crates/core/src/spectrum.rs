//! Eigenvalues and coupling coefficients of the linearized and quadratic
//! collision operators in the radial basis.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cross_section::{one_minus_cos_pow, SingularityModel};
use crate::quadrature::QuadratureSpec;
use crate::specfun::{log_binomial, Limits};
use crate::{Error, Result, Scalar};

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawTables<T> {
    model: SingularityModel<T>,
    quadrature: QuadratureSpec,
    truncation: usize,
    lambda: Vec<T>,
    alpha: Vec<Vec<T>>,
    w: Vec<Vec<T>>,
}

/// Precomputed `lambda_{2n}`, `alpha_{2n,2m}` and `w_{k,l}` up to order `N`.
///
/// Immutable once built. `alpha` is stored for `0 <= n, m <= N`; `w[k][l]`
/// is populated for `k >= 1, k + l <= N` and zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTables<T>", bound = "T: Scalar")]
pub struct SpectrumTables<T> {
    model: SingularityModel<T>,
    quadrature: QuadratureSpec,
    truncation: usize,
    lambda: Vec<T>,
    alpha: Vec<Vec<T>>,
    w: Vec<Vec<T>>,
}

impl<T: Scalar> TryFrom<RawTables<T>> for SpectrumTables<T> {
    type Error = Error;

    fn try_from(raw: RawTables<T>) -> Result<Self> {
        let n = raw.truncation;
        let square = |rows: &Vec<Vec<T>>| rows.len() == n + 1 && rows.iter().all(|r| r.len() == n + 1);
        if raw.lambda.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                found: raw.lambda.len(),
            });
        }
        if !square(&raw.alpha) || !square(&raw.w) {
            return Err(Error::InvalidParameter {
                name: "tables",
                detail: format!("alpha and w must be {0} x {0}", n + 1),
            });
        }
        Ok(Self {
            model: raw.model,
            quadrature: raw.quadrature,
            truncation: n,
            lambda: raw.lambda,
            alpha: raw.alpha,
            w: raw.w,
        })
    }
}

/// `sqrt((2k+2l+1) / ((2k+1)(2l+1)))`
pub fn coupling_factor<T: Scalar>(k: usize, l: usize) -> T {
    let num = T::of(2 * k + 2 * l + 1);
    let den = T::of(2 * k + 1) * T::of(2 * l + 1);
    (num / den).sqrt()
}

/// `lambda_{2n}` for `n = 0..=n_max`, with `lambda_0 = lambda_2 = 0`.
pub fn eigenvalues<T: Scalar>(model: &SingularityModel<T>, n_max: usize, quad: &QuadratureSpec) -> Result<Vec<T>> {
    quad.validate()?;
    (0..=n_max)
        .into_par_iter()
        .map(|n| if n == 0 { Ok(T::zero()) } else { model.regularized_moment(n, quad) })
        .collect()
}

impl<T: Scalar> SpectrumTables<T> {
    /// Fills every table entry by quadrature; rows are computed in parallel.
    pub fn build(model: SingularityModel<T>, truncation: usize, quad: &QuadratureSpec) -> Result<Self> {
        if truncation < 2 {
            return Err(Error::InvalidParameter {
                name: "truncation",
                detail: format!("N must be at least 2, got {truncation}"),
            });
        }
        let lambda = eigenvalues(&model, truncation, quad)?;
        let alpha: Vec<Vec<T>> = (0..=truncation)
            .into_par_iter()
            .map(|n| (0..=truncation).map(|m| alpha_entry(&model, n, m, quad)).collect())
            .collect::<Result<_>>()?;
        let mut w = vec![vec![T::zero(); truncation + 1]; truncation + 1];
        for k in 1..=truncation {
            for l in 0..=truncation - k {
                w[k][l] = alpha[k][l] * coupling_factor::<T>(k, l);
            }
        }
        Ok(Self {
            model,
            quadrature: *quad,
            truncation,
            lambda,
            alpha,
            w,
        })
    }

    pub fn model(&self) -> &SingularityModel<T> {
        &self.model
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quadrature
    }

    /// Truncation order `N`.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `lambda_{2n}`.
    pub fn lambda(&self, n: usize) -> T {
        self.lambda[n]
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambda
    }

    /// `alpha_{2n,2m}`.
    pub fn alpha(&self, n: usize, m: usize) -> T {
        self.alpha[n][m]
    }

    /// `w_{k,l}`; zero outside `k >= 1, k + l <= N`.
    pub fn w(&self, k: usize, l: usize) -> T {
        self.w[k][l]
    }

    /// The tables of the projected system of order `n`; the cascade is
    /// triangular, so this equals a fresh build at `n`.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if !(2..=self.truncation).contains(&n) {
            return Err(Error::InvalidParameter {
                name: "truncation",
                detail: format!("must lie in [2, {}], got {n}", self.truncation),
            });
        }
        let cut = |rows: &[Vec<T>]| -> Vec<Vec<T>> { rows[..=n].iter().map(|r| r[..=n].to_vec()).collect() };
        let mut w = cut(&self.w);
        for (k, row) in w.iter_mut().enumerate() {
            for v in row.iter_mut().skip(n + 1 - k) {
                *v = T::zero();
            }
        }
        Ok(Self {
            model: self.model,
            quadrature: self.quadrature,
            truncation: n,
            lambda: self.lambda[..=n].to_vec(),
            alpha: cut(&self.alpha),
            w,
        })
    }

    /// Largest relative difference over every entry of two equally sized
    /// tables, with its location; NaN counts as infinite.
    pub fn max_relative_difference(&self, other: &Self) -> Result<(T, String)> {
        if self.truncation != other.truncation {
            return Err(Error::DimensionMismatch {
                expected: self.truncation + 1,
                found: other.truncation + 1,
            });
        }
        let mut worst = (T::zero(), String::from("none"));
        let mut see = |a: T, b: T, at: &dyn Fn() -> String| {
            let scale = a.abs().max(b.abs());
            let e = if a == b {
                T::zero()
            } else if scale > T::zero() && scale.is_finite() {
                (a - b).abs() / scale
            } else {
                T::infinity()
            };
            let e = if e.is_nan() { T::infinity() } else { e };
            if e > worst.0 {
                worst = (e, at());
            }
        };
        for n in 0..=self.truncation {
            see(self.lambda[n], other.lambda[n], &|| format!("lambda[{n}]"));
            for m in 0..=self.truncation {
                see(self.alpha[n][m], other.alpha[n][m], &|| format!("alpha[{n}][{m}]"));
                see(self.w[n][m], other.w[n][m], &|| format!("w[{n}][{m}]"));
            }
        }
        Ok(worst)
    }

    /// Test hook for corrupting a table entry.
    pub fn with_lambda(mut self, n: usize, value: T) -> Self {
        self.lambda[n] = value;
        self
    }

    /// Human-readable descriptions of every violated structural invariant.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.truncation;
        for (i, l) in self.lambda.iter().enumerate() {
            if !l.is_finite() {
                out.push(format!("lambda[{i}] is not finite"));
            }
        }
        if self.lambda[0] != T::zero() {
            out.push(format!("lambda[0] = {} (expected 0)", self.lambda[0]));
        }
        if self.lambda[1] != T::zero() {
            out.push(format!("lambda[1] = {} (expected 0)", self.lambda[1]));
        }
        for i in 2..=n {
            if !(self.lambda[i] > T::zero()) {
                out.push(format!("lambda[{i}] = {} is not positive", self.lambda[i]));
            }
            if self.lambda[i] < self.lambda[i - 1] {
                out.push(format!("lambda decreases between n = {} and n = {i}", i - 1));
            }
        }
        if self.alpha[0][0] != T::zero() {
            out.push(format!("alpha[0][0] = {} (expected 0)", self.alpha[0][0]));
        }
        for m in 1..=n {
            if !(self.alpha[0][m] < T::zero()) {
                out.push(format!("alpha[0][{m}] = {} is not negative", self.alpha[0][m]));
            }
        }
        for k in 1..=n {
            for l in 0..=n {
                if !(self.alpha[k][l] > T::zero()) {
                    out.push(format!("alpha[{k}][{l}] = {} is not positive", self.alpha[k][l]));
                }
                if k + l <= n {
                    let expected = self.alpha[k][l] * coupling_factor::<T>(k, l);
                    if (self.w[k][l] - expected).abs() > T::tol_floor() * expected.abs() {
                        out.push(format!("w[{k}][{l}] is inconsistent with alpha"));
                    }
                }
            }
        }
        out
    }

    /// Checks `lambda_{2j+2k} < lambda_{2j} + lambda_{2k}` for `2 <= j, k <= jmax`.
    pub fn no_resonance_check(&self, jmax: usize) -> Result<NoResonanceReport<T>> {
        if jmax < 2 || 2 * jmax > self.truncation {
            return Err(Error::InvalidParameter {
                name: "jmax",
                detail: format!("need 2 <= jmax and 2 jmax <= N = {}, got {jmax}", self.truncation),
            });
        }
        let mut report = NoResonanceReport {
            jmax,
            pairs_checked: 0,
            min_margin: T::infinity(),
            min_pair: (2, 2),
            violations: Vec::new(),
        };
        for j in 2..=jmax {
            for k in j..=jmax {
                let margin = self.lambda[j] + self.lambda[k] - self.lambda[j + k];
                report.pairs_checked += 1;
                if margin < report.min_margin {
                    report.min_margin = margin;
                    report.min_pair = (j, k);
                }
                if !(margin > T::zero()) {
                    report.violations.push((j, k, margin));
                }
            }
        }
        Ok(report)
    }

    /// Least-squares slope of `ln lambda_{2k}` against `ln k` on `[k_min, k_max]`.
    pub fn asymptotic_exponent_fit(&self, k_min: usize, k_max: usize) -> Result<ExponentFit<T>> {
        if k_max > self.truncation {
            return Err(Error::IndexTooLarge {
                what: "asymptotic_exponent_fit",
                index: k_max,
                max: self.truncation,
            });
        }
        exponent_fit(&self.lambda, k_min, k_max)
    }

    /// Scans `w_{n,m} n^{3/4} / (1 + m/n)^s` over `1 <= n, n + m <= N`.
    pub fn coupling_bound_check(&self) -> CouplingReport<T> {
        let s = self.model.s();
        let mut report = CouplingReport {
            c_emp: T::neg_infinity(),
            argmax: (1, 0),
            nonpositive: Vec::new(),
        };
        for n in 1..=self.truncation {
            for m in 0..=self.truncation - n {
                let ratio = self.coupling_ratio(n, m, s);
                if ratio > report.c_emp {
                    report.c_emp = ratio;
                    report.argmax = (n, m);
                }
                if !(self.w[n][m] > T::zero()) {
                    report.nonpositive.push((n, m));
                }
            }
        }
        report
    }

    /// `w_{n,m} n^{3/4} / (1 + m/n)^s`.
    pub fn coupling_ratio(&self, n: usize, m: usize, s: T) -> T {
        let nn = T::of(n);
        self.w[n][m] * nn.powf(T::lit(0.75)) / (T::one() + T::of(m) / nn).powf(s)
    }
}

fn alpha_entry<T: Scalar>(model: &SingularityModel<T>, n: usize, m: usize, quad: &QuadratureSpec) -> Result<T> {
    match (n, m) {
        (0, 0) => Ok(T::zero()),
        (0, m) => Ok(-model.regularized_cos_moment(m, quad)?),
        (n, m) => {
            let ln_binom: T = log_binomial(2 * n + 2 * m, 2 * n);
            let ln_moment = model.ln_angular_moment(n, m, quad)?;
            Ok((T::lit(0.5) * ln_binom + ln_moment).exp())
        }
    }
}

/// Least-squares slope of `ln lambda[k]` against `ln k` on `[k_min, k_max]`.
pub fn exponent_fit<T: Scalar>(lambda: &[T], k_min: usize, k_max: usize) -> Result<ExponentFit<T>> {
    if k_min < 1 || k_max >= lambda.len() || k_min >= k_max {
        return Err(Error::InvalidParameter {
            name: "fit range",
            detail: format!("need 1 <= k_min < k_max < {}, got [{k_min}, {k_max}]", lambda.len()),
        });
    }
    let pts: Vec<(T, T)> = (k_min..=k_max)
        .filter(|&k| lambda[k] > T::zero())
        .map(|k| (T::of(k).ln(), lambda[k].ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::DegenerateFit {
            points: pts.len(),
            required: 3,
        });
    }
    let (slope, intercept, residual) = least_squares(&pts);
    Ok(ExponentFit {
        s_est: slope,
        intercept,
        residual,
        points: pts.len(),
    })
}

/// Ordinary least-squares line; returns slope, intercept and RMS residual.
pub(crate) fn least_squares<T: Scalar>(pts: &[(T, T)]) -> (T, T, T) {
    let n = T::of(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxx = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<T>();
    let slope = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    let intercept = my - slope * mx;
    let ss = pts
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum::<T>();
    (slope, intercept, (ss / n).sqrt())
}

/// General eigenvalue `lambda_B(n, l)` of the linearized operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralEigenvalue<T> {
    pub n: usize,
    pub l: usize,
    pub value: T,
}

/// `lambda_B(n, l) = int beta (1 + delta - P_l(cos) cos^{2n+l} - P_l(sin) sin^{2n+l})`.
///
/// The kernel modes `(0,0)`, `(1,0)` and `(0,1)` have identically vanishing
/// integrands and return exactly zero.
pub fn eigenvalue_general<T: Scalar>(
    model: &SingularityModel<T>,
    n: usize,
    l: usize,
    quad: &QuadratureSpec,
) -> Result<GeneralEigenvalue<T>> {
    if matches!((n, l), (0, 0) | (1, 0) | (0, 1)) {
        return Ok(GeneralEigenvalue { n, l, value: T::zero() });
    }
    let limits = Limits::default();
    let k = 2 * n + l;
    let half_k = T::of(k) / T::lit(2.0);
    let two = T::lit(2.0);
    let failure = std::cell::Cell::new(None);
    let est = model.integrate_weighted(
        two,
        |th| {
            let (s, c) = th.sin_cos();
            let defect_y = two * (th / two).sin().powi(2);
            let ck = (T::of(k) * c.ln()).exp();
            let sk = (T::of(k) * s.ln()).exp();
            let defect = limits.legendre_defect(l, defect_y);
            let p_sin = limits.legendre_p(l, s);
            match (defect, p_sin) {
                (Ok(d), Ok(p)) => one_minus_cos_pow(half_k, s) + d * ck - p * sk,
                (Err(e), _) | (_, Err(e)) => {
                    failure.set(Some(e));
                    T::zero()
                }
            }
        },
        quad,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let value = est.require("eigenvalue_general", Some((n, l)), T::lit(quad.abs_tol))?;
    Ok(GeneralEigenvalue { n, l, value })
}

/// Outcome of the no-resonance scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoResonanceReport<T> {
    pub jmax: usize,
    pub pairs_checked: usize,
    /// `min (lambda_{2j} + lambda_{2k} - lambda_{2j+2k})`
    pub min_margin: T,
    pub min_pair: (usize, usize),
    pub violations: Vec<(usize, usize, T)>,
}

impl<T: Scalar> NoResonanceReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.min_margin > T::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit<T> {
    pub s_est: T,
    pub intercept: T,
    pub residual: T,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingReport<T> {
    pub c_emp: T,
    pub argmax: (usize, usize),
    pub nonpositive: Vec<(usize, usize)>,
}
