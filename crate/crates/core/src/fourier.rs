//! Fourier-side checks: radial transforms, the Bobylev representation of the
//! collision operator, and the product identities behind the coupling tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cross_section::SingularityModel;
use crate::field::{panel_bank, ProfileShape, RadialProfile, SampledProfile};
use crate::quadrature::QuadratureSpec;
use crate::specfun::log_gamma;
use crate::spectrum::SpectrumTables;
use crate::{Error, Result, Scalar};

/// A radial Fourier transform `g^(rho)`, either sampled or as a combination
/// of the closed-form mode transforms.
#[derive(Debug, Clone, PartialEq)]
pub enum FourierProfile<T> {
    Sampled { spline: SampledProfile<T>, at_zero: T },
    /// `sum_n c_n F(mu^{1/2} phi_{n,0,0})(rho)`
    Modes { coefficients: Vec<T> },
}

impl<T: Scalar> FourierProfile<T> {
    pub fn sampled(rho: Vec<T>, values: Vec<T>, at_zero: T) -> Result<Self> {
        if !at_zero.is_finite() {
            return Err(Error::NonFinite { what: "fourier profile" });
        }
        let spline = if rho.first().map_or(false, |r| *r == T::zero()) {
            SampledProfile::even(rho, values)?
        } else {
            SampledProfile::new(rho, values)?
        };
        Ok(Self::Sampled {
            spline,
            at_zero,
        })
    }

    /// Transform of `mu^{1/2} phi_{n,0,0}`.
    pub fn mode(n: usize) -> Self {
        let mut coefficients = vec![T::zero(); n + 1];
        coefficients[n] = T::one();
        Self::Modes { coefficients }
    }

    pub fn at_zero(&self) -> T {
        match self {
            Self::Sampled { at_zero, .. } => *at_zero,
            Self::Modes { coefficients } => coefficients.first().copied().unwrap_or_else(T::zero),
        }
    }

    /// Largest frequency at which the profile is defined.
    pub fn max_rho(&self) -> T {
        match self {
            Self::Sampled { spline, .. } => spline.points()[spline.points().len() - 1],
            Self::Modes { .. } => T::infinity(),
        }
    }

    pub fn eval(&self, rho: T) -> Result<T> {
        if !(rho >= T::zero() && rho <= self.max_rho()) {
            return Err(Error::Domain {
                what: "fourier profile",
                value: rho.f64(),
                expected: "0 <= rho <= last sample",
            });
        }
        Ok(self.value(rho))
    }

    fn value(&self, rho: T) -> T {
        match self {
            Self::Sampled { spline, at_zero } => {
                if rho == T::zero() {
                    *at_zero
                } else {
                    spline.eval(rho)
                }
            }
            Self::Modes { coefficients } => coefficients
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != T::zero())
                .map(|(n, c)| *c * fourier_mode(n, rho))
                .sum(),
        }
    }
}

/// `((2n+1)!)^{-1/2} rho^{2n} e^{-rho^2/2}`, the transform of `mu^{1/2} phi_{n,0,0}`.
pub fn fourier_mode<T: Scalar>(n: usize, rho: T) -> T {
    let rho = rho.abs();
    if n == 0 {
        return (-rho * rho / T::lit(2.0)).exp();
    }
    if rho == T::zero() {
        return T::zero();
    }
    let ln_fact = log_gamma(T::of(2 * n + 2)).expect("positive argument");
    (T::of(2 * n) * rho.ln() - rho * rho / T::lit(2.0) - ln_fact / T::lit(2.0)).exp()
}

/// `g^(rho) = (4 pi / rho) int_0^inf g(r) sin(rho r) r dr` on `rho_grid`,
/// with the `rho -> 0` limit `4 pi int g r^2 dr`.
pub fn fourier_radial<T: Scalar>(g: &RadialProfile<T>, rho_grid: &[T], quad: &QuadratureSpec) -> Result<FourierProfile<T>> {
    if rho_grid.iter().any(|r| !(*r >= T::zero() && r.is_finite())) {
        return Err(Error::InvalidParameter {
            name: "rho grid",
            detail: "frequencies must be finite and nonnegative".into(),
        });
    }
    let mut grid = rho_grid.to_vec();
    if grid.first().map_or(true, |r| *r > T::zero()) {
        grid.insert(0, T::zero());
    }
    let radius = g.support();
    let edge = g.eval(radius)?.abs() * radius * radius;
    let four_pi = T::lit(4.0) * T::PI();
    let mut last = None;
    for refinement in 0..6 {
        let panels = g.panels(radius, refinement);
        let (vals, errs) = panel_bank(&panels, grid.len(), |r, out| {
            let w = g.eval(r)? * four_pi * r * r;
            if !w.is_finite() {
                return Err(Error::NonFinite { what: "profile value" });
            }
            for (o, rho) in out.iter_mut().zip(&grid) {
                let x = *rho * r;
                *o = if x == T::zero() { w } else { w * x.sin() / x };
            }
            Ok(())
        })?;
        let scale = vals.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if refinement == 0 && edge > T::lit(1e-12) * scale.max(T::min_positive_value()) {
            log::warn!("fourier_radial: profile has not decayed at r = {radius} (r^2 |g| = {:e})", edge.f64());
        }
        let failed = vals
            .iter()
            .zip(&errs)
            .enumerate()
            .map(|(i, (v, e))| (i, *e, (T::lit(quad.abs_tol) * scale).max(T::lit(quad.rel_tol) * v.abs())))
            .find(|(_, e, tol)| e > tol);
        match failed {
            None => {
                let at_zero = vals[0];
                let (rho, values) = if grid.len() == 1 {
                    (vec![T::zero(), T::min_positive_value()], vec![at_zero, at_zero])
                } else {
                    (grid.clone(), vals)
                };
                return FourierProfile::sampled(rho, values, at_zero);
            }
            Some(f) => last = Some((f, panels.len() - 1)),
        }
    }
    let ((i, e, tol), count) = last.expect("at least one pass");
    Err(Error::QuadratureFailure {
        what: "radial fourier transform",
        index: Some((i, 0)),
        error: e.f64(),
        requested: tol.f64(),
        subdivisions: count,
    })
}

/// Below this angle the bracket is replaced by its fitted Taylor expansion.
pub const TAYLOR_GUARD: f64 = 1e-3;

/// `int_{|theta| <= pi/4} beta(theta) [g^(rho sin) f^(rho cos) - g^(0) f^(rho)] dtheta`.
///
/// The bracket vanishes like `theta^2` for smooth radial profiles; below
/// [`TAYLOR_GUARD`] it is replaced by `theta^2 P(theta^2)` with a cubic `P`
/// interpolated just above the guard, which avoids cancellation in the
/// difference.
pub fn bobylev_apply<T: Scalar>(
    model: &SingularityModel<T>,
    g_hat: &FourierProfile<T>,
    f_hat: &FourierProfile<T>,
    rho: T,
    quad: &QuadratureSpec,
) -> Result<T> {
    if !(rho >= T::zero() && rho.is_finite()) {
        return Err(Error::Domain {
            what: "bobylev_apply",
            value: rho.f64(),
            expected: "finite rho >= 0",
        });
    }
    if rho > g_hat.max_rho() || rho > f_hat.max_rho() {
        return Err(Error::Domain {
            what: "bobylev_apply",
            value: rho.f64(),
            expected: "rho within the sampled range of both profiles",
        });
    }
    if rho == T::zero() {
        return Ok(T::zero());
    }
    let g0 = g_hat.at_zero();
    let f_rho = f_hat.value(rho);
    let product = |th: T| g_hat.value(rho * th.sin()) * f_hat.value(rho * th.cos());
    let scale = (1..=8)
        .map(|j| product(T::FRAC_PI_4() * T::of(j) / T::lit(8.0)).abs())
        .fold(g0.abs() * f_rho.abs(), T::max);
    let noise = T::lit(16.0) * T::epsilon() * (T::one() + rho * rho) * scale;
    let bracket = |th: T| {
        let b = product(th) - g0 * f_rho;
        if b.abs() <= noise {
            T::zero()
        } else {
            b
        }
    };
    let tiny = T::lit(TAYLOR_GUARD * 1e-3);
    let residual = bracket(tiny).abs();
    if residual > T::lit(1e-6) * scale.max(T::min_positive_value()) {
        return Err(Error::NonRemovableSingularity { residual: residual.f64() });
    }

    let guard = T::lit(TAYLOR_GUARD);
    let nodes: Vec<T> = (0..4).map(|j| guard * (T::one() + T::lit(0.5) * T::of(j))).collect();
    let xs: Vec<T> = nodes.iter().map(|t| *t * *t).collect();
    let ys: Vec<T> = nodes.iter().map(|t| bracket(*t) / (*t * *t)).collect();
    let taylor = |x: T| lagrange(&xs, &ys, x);
    let guarded = |th: T| {
        if th < guard {
            th * th * taylor(th * th)
        } else {
            bracket(th)
        }
    };
    let est = model.integrate_weighted(T::lit(2.0), guarded, quad);
    if !est.value.is_finite() {
        return Err(Error::NonFinite { what: "bobylev integral" });
    }
    est.require("bobylev integral", None, T::lit(quad.abs_tol))
}

fn lagrange<T: Scalar>(xs: &[T], ys: &[T], x: T) -> T {
    let mut acc = T::zero();
    for i in 0..xs.len() {
        let mut w = T::one();
        for j in 0..xs.len() {
            if i != j {
                w = w * (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        acc += w * ys[i];
    }
    acc
}

/// Max over the grid of `|L - R|`, divided by the max of `|R|`.
fn max_relative<T: Scalar>(lhs: &[T], rhs: &[T]) -> T {
    let diff = lhs.iter().zip(rhs).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
    let scale = rhs.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() {
        diff
    } else {
        diff / scale
    }
}

/// Compares `(-1)^n sqrt(2n+1) F(mu^{1/2} phi_{n,0,0})`, computed by
/// quadrature, with the closed form `(-1)^n rho^{2n} e^{-rho^2/2} / sqrt((2n)!)`
/// of the Hermite side. Returns the grid-max error relative to the grid-max
/// of the closed form.
pub fn hermite_link_check<T: Scalar>(n: usize, rho_grid: &[T], quad: &QuadratureSpec) -> Result<T> {
    if n > 40 {
        return Err(Error::IndexTooLarge {
            what: "hermite_link_check",
            index: n,
            max: 40,
        });
    }
    let mut coefficients = vec![T::zero(); n + 1];
    coefficients[n] = T::one();
    let profile = RadialProfile::Closed(ProfileShape::MaxwellianModes { coefficients });
    let transform = fourier_radial(&profile, rho_grid, quad)?;
    let sign = if n % 2 == 0 { T::one() } else { -T::one() };
    let ln_fact = log_gamma(T::of(2 * n + 1))?;
    let mut lhs = Vec::with_capacity(rho_grid.len());
    let mut rhs = Vec::with_capacity(rho_grid.len());
    for &rho in rho_grid {
        lhs.push(sign * T::of(2 * n + 1).sqrt() * transform.value(rho));
        let closed = if rho == T::zero() {
            if n == 0 {
                T::one()
            } else {
                T::zero()
            }
        } else {
            (T::of(2 * n) * rho.ln() - rho * rho / T::lit(2.0) - ln_fact / T::lit(2.0)).exp()
        };
        rhs.push(sign * closed);
    }
    Ok(max_relative(&lhs, &rhs))
}

/// Compares the Bobylev integral on the mode pair `(n, m)` with the table
/// prediction: `w_{n,m} F(mode n+m)` for `n >= 1` and `alpha_{0,m} F(mode m)`
/// for `n = 0`. Returns the grid-max relative error.
pub fn product_identity_check<T: Scalar>(
    tables: &SpectrumTables<T>,
    n: usize,
    m: usize,
    rho_grid: &[T],
    quad: &QuadratureSpec,
) -> Result<T> {
    if n + m > tables.truncation() {
        return Err(Error::IndexTooLarge {
            what: "product_identity_check",
            index: n + m,
            max: tables.truncation(),
        });
    }
    let g_hat = FourierProfile::mode(n);
    let f_hat = FourierProfile::mode(m);
    let mut lhs = Vec::with_capacity(rho_grid.len());
    let mut rhs = Vec::with_capacity(rho_grid.len());
    for &rho in rho_grid {
        lhs.push(bobylev_apply(tables.model(), &g_hat, &f_hat, rho, quad)?);
        rhs.push(if n == 0 {
            tables.alpha(0, m) * fourier_mode(m, rho)
        } else {
            tables.w(n, m) * fourier_mode(n + m, rho)
        });
    }
    Ok(max_relative(&lhs, &rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalEntry<T> {
    pub n: usize,
    /// `int beta (1 - cos^{2n})`, recovered from `Q(mu^{1/2}, mu^{1/2} phi_n)`.
    pub l1: T,
    /// `-int beta sin^{2n}`, recovered from `Q(mu^{1/2} phi_n, mu^{1/2})`.
    pub l2: T,
    pub lambda: T,
    pub rel_err: T,
}

/// Recovers the two halves of the linearized operator on each mode from the
/// Bobylev integral at `rho` and compares their sum with the eigenvalue table.
pub fn diagonalization_check<T: Scalar>(
    tables: &SpectrumTables<T>,
    n_max: usize,
    rho: T,
    quad: &QuadratureSpec,
) -> Result<Vec<DiagonalEntry<T>>> {
    if n_max > tables.truncation() {
        return Err(Error::IndexTooLarge {
            what: "diagonalization_check",
            index: n_max,
            max: tables.truncation(),
        });
    }
    let maxwellian = FourierProfile::mode(0);
    (1..=n_max)
        .map(|n| {
            let mode = FourierProfile::mode(n);
            let f = fourier_mode(n, rho);
            let l1 = -bobylev_apply(tables.model(), &maxwellian, &mode, rho, quad)? / f;
            let l2 = -bobylev_apply(tables.model(), &mode, &maxwellian, rho, quad)? / f;
            let lambda = tables.lambda(n);
            let rel_err = (l1 + l2 - lambda).abs() / lambda.abs().max(l1.abs());
            Ok(DiagonalEntry { n, l1, l2, lambda, rel_err })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrilinearReport<T> {
    pub trials: usize,
    pub mode_cap: usize,
    pub seed: u64,
    pub max_ratio: T,
    pub mean_ratio: T,
    pub skipped: usize,
}

/// `(mu^{-1/2} Q(mu^{1/2} f, mu^{1/2} g), h)` from the coupling tables.
pub fn trilinear_form<T: Scalar>(tables: &SpectrumTables<T>, f: &[T], g: &[T], h: &[T]) -> T {
    let mut acc = T::zero();
    for (n, &fn_) in f.iter().enumerate() {
        if fn_ == T::zero() {
            continue;
        }
        for (m, &gm) in g.iter().enumerate() {
            if n == 0 {
                if let Some(&hm) = h.get(m) {
                    acc += fn_ * gm * tables.alpha(0, m) * hm;
                }
            } else if let Some(&hk) = h.get(n + m) {
                acc += fn_ * gm * tables.w(n, m) * hk;
            }
        }
    }
    acc
}

/// Random scan of `|(Q(f, g), h)| / (||f|| ||H^{s/2} g|| ||H^{s/2} h||)`.
///
/// Coefficient `n` of each factor is drawn uniformly from
/// `[-(n+1)^{-2}, (n+1)^{-2}]` on modes `0..=mode_cap`, a rapidly decaying
/// sequence as for smooth test functions.
pub fn trilinear_ratio_scan<T: Scalar>(
    tables: &SpectrumTables<T>,
    trials: usize,
    mode_cap: usize,
    seed: u64,
) -> Result<(T, TrilinearReport<T>)> {
    if mode_cap > tables.truncation() {
        return Err(Error::IndexTooLarge {
            what: "trilinear_ratio_scan",
            index: mode_cap,
            max: tables.truncation(),
        });
    }
    let s = tables.model().s();
    let weight = |n: usize| (T::lit(2.0) * T::of(n) + T::lit(1.5)).powf(s);
    let weighted = |v: &[T]| v.iter().enumerate().map(|(n, c)| weight(n) * *c * *c).sum::<T>().sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> Vec<T> {
        (0..=mode_cap)
            .map(|n| T::lit(rng.gen_range(-1.0..1.0) / ((n + 1) * (n + 1)) as f64))
            .collect()
    };
    let (mut max_ratio, mut sum, mut used, mut skipped) = (T::zero(), T::zero(), 0usize, 0usize);
    for _ in 0..trials {
        let (f, g, h) = (draw(), draw(), draw());
        let denom = f.iter().map(|v| *v * *v).sum::<T>().sqrt() * weighted(&g) * weighted(&h);
        if denom == T::zero() {
            skipped += 1;
            continue;
        }
        let ratio = trilinear_form(tables, &f, &g, &h).abs() / denom;
        max_ratio = max_ratio.max(ratio);
        sum += ratio;
        used += 1;
    }
    let report = TrilinearReport {
        trials,
        mode_cap,
        seed,
        max_ratio,
        mean_ratio: if used == 0 { T::zero() } else { sum / T::of(used) },
        skipped,
    };
    Ok((max_ratio, report))
}
