//! Radial profiles, spectral norms, and the decay and smoothing diagnostics.

use serde::{Deserialize, Serialize};

use crate::cascade::ModeCoefficients;
use crate::quadrature::QuadratureSpec;
use crate::specfun::{phi_radial_all, EvalPoint, Limits};
use crate::spectrum::{least_squares, SpectrumTables};
use crate::{Error, Result, Scalar};

/// Closed-form radial profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", bound = "T: Scalar")]
pub enum ProfileShape<T> {
    Zero,
    /// `sum_n b_n phi_{n,0,0}(r)`
    Modes { coefficients: Vec<T> },
    /// `amplitude exp(-(r - center)^2 / (2 width^2))`
    GaussianBump { center: T, width: T, amplitude: T },
    /// `amplitude (2 pi)^{-3/4} e^{-r^2/4}`
    RootMaxwellian { amplitude: T },
    /// `mu^{1/2}(r) sum_n c_n phi_{n,0,0}(r)`
    MaxwellianModes { coefficients: Vec<T> },
}

/// A radial function `g(|v|)`, either sampled or in closed form.
///
/// Sampled profiles are interpolated by a natural cubic spline and vanish
/// beyond the last sample.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile<T> {
    Sampled(SampledProfile<T>),
    Closed(ProfileShape<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile<T> {
    r: Vec<T>,
    values: Vec<T>,
    second: Vec<T>,
}

impl<T: Scalar> SampledProfile<T> {
    pub fn new(r: Vec<T>, values: Vec<T>) -> Result<Self> {
        Self::build(r, values, None)
    }

    /// Spline with zero slope at the first sample, for samples of an even
    /// function starting at the origin.
    pub fn even(r: Vec<T>, values: Vec<T>) -> Result<Self> {
        Self::build(r, values, Some(T::zero()))
    }

    fn build(r: Vec<T>, values: Vec<T>, left_slope: Option<T>) -> Result<Self> {
        if r.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: r.len(),
                found: values.len(),
            });
        }
        if r.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "profile",
                detail: "need at least two samples".into(),
            });
        }
        if r[0] < T::zero() || r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter {
                name: "profile",
                detail: "sample points must be nonnegative and strictly increasing".into(),
            });
        }
        if values.iter().chain(&r).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "profile samples" });
        }
        let second = spline_second(&r, &values, left_slope);
        Ok(Self { r, values, second })
    }

    pub fn points(&self) -> &[T] {
        &self.r
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub(crate) fn eval(&self, x: T) -> T {
        let n = self.r.len();
        if x > self.r[n - 1] {
            return T::zero();
        }
        if x <= self.r[0] {
            return self.values[0];
        }
        let i = match self.r.binary_search_by(|p| p.partial_cmp(&x).expect("finite")) {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        let h = self.r[i + 1] - self.r[i];
        let a = (self.r[i + 1] - x) / h;
        let b = (x - self.r[i]) / h;
        let six = T::lit(6.0);
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h / six
    }
}

/// Second derivatives of the cubic spline through `(x, y)`: natural at both
/// ends, or with prescribed slope at the left end.
fn spline_second<T: Scalar>(x: &[T], y: &[T], left_slope: Option<T>) -> Vec<T> {
    let n = x.len();
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let mut sub = vec![T::zero(); n];
    let mut diag = vec![T::one(); n];
    let mut sup = vec![T::zero(); n];
    let mut rhs = vec![T::zero(); n];
    if let Some(d) = left_slope {
        let h = x[1] - x[0];
        diag[0] = two * h;
        sup[0] = h;
        rhs[0] = six * ((y[1] - y[0]) / h - d);
    }
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        sub[i] = h0;
        diag[i] = two * (h0 + h1);
        sup[i] = h1;
        rhs[i] = six * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    for i in 1..n {
        let f = sub[i] / diag[i - 1];
        diag[i] -= f * sup[i - 1];
        rhs[i] = rhs[i] - f * rhs[i - 1];
    }
    let mut m = vec![T::zero(); n];
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
    }
    m
}

impl<T: Scalar> RadialProfile<T> {
    pub fn sampled(r: Vec<T>, values: Vec<T>) -> Result<Self> {
        SampledProfile::new(r, values).map(Self::Sampled)
    }

    pub fn modes(coefficients: Vec<T>) -> Self {
        Self::Closed(ProfileShape::Modes { coefficients })
    }

    pub fn eval(&self, r: T) -> Result<T> {
        let r = EvalPoint::new(r)?.get();
        match self {
            Self::Sampled(p) => Ok(p.eval(r)),
            Self::Closed(shape) => match shape {
                ProfileShape::Zero => Ok(T::zero()),
                ProfileShape::Modes { coefficients } => {
                    let phi = phi_radial_all(coefficients.len().saturating_sub(1), r)?;
                    Ok(coefficients.iter().zip(&phi).map(|(b, p)| *b * *p).sum())
                }
                ProfileShape::GaussianBump {
                    center,
                    width,
                    amplitude,
                } => {
                    if !(*width > T::zero() && width.is_finite()) {
                        return Err(Error::InvalidParameter {
                            name: "gaussian bump width",
                            detail: format!("must be positive and finite, got {width}"),
                        });
                    }
                    let z = (r - *center) / *width;
                    Ok(*amplitude * (-z * z / T::lit(2.0)).exp())
                }
                ProfileShape::RootMaxwellian { amplitude } => Ok(*amplitude * root_maxwellian(r)),
                ProfileShape::MaxwellianModes { coefficients } => {
                    let phi = phi_radial_all(coefficients.len().saturating_sub(1), r)?;
                    let sum: T = coefficients.iter().zip(&phi).map(|(b, p)| *b * *p).sum();
                    Ok(sum * root_maxwellian(r))
                }
            },
        }
    }

    /// Radius beyond which the profile is negligible at double precision.
    pub fn support(&self) -> T {
        match self {
            Self::Sampled(p) => p.r[p.r.len() - 1],
            Self::Closed(shape) => match shape {
                ProfileShape::Zero => T::one(),
                ProfileShape::Modes { coefficients } | ProfileShape::MaxwellianModes { coefficients } => {
                    basis_radius(coefficients.len().saturating_sub(1))
                }
                ProfileShape::GaussianBump { center, width, .. } => (*center + T::lit(14.0) * width.abs()).max(T::one()),
                ProfileShape::RootMaxwellian { .. } => basis_radius(0),
            },
        }
    }

    /// Panel boundaries on which the profile is smooth.
    pub(crate) fn panels(&self, radius: T, refinement: usize) -> Vec<T> {
        let split = 1usize << refinement;
        let base: Vec<T> = match self {
            Self::Sampled(p) => {
                let mut knots = p.r.clone();
                if knots[0] > T::zero() {
                    knots.insert(0, T::zero());
                }
                let width = T::lit(0.25);
                let mut x = knots[knots.len() - 1];
                while x < radius {
                    x = (x + width).min(radius);
                    knots.push(x);
                }
                knots
            }
            Self::Closed(_) => {
                let count = (radius / T::lit(0.25)).ceil().to_usize().unwrap_or(1).max(1);
                (0..=count).map(|i| radius * T::of(i) / T::of(count)).collect()
            }
        };
        let mut out = Vec::with_capacity((base.len() - 1) * split + 1);
        for w in base.windows(2) {
            for j in 0..split {
                out.push(w[0] + (w[1] - w[0]) * T::of(j) / T::of(split));
            }
        }
        out.push(base[base.len() - 1]);
        out
    }
}

/// `mu^{1/2}(r) = (2 pi)^{-3/4} e^{-r^2/4}`, which is also `phi_{0,0,0}`.
pub fn root_maxwellian<T: Scalar>(r: T) -> T {
    (T::lit(2.0) * T::PI()).powf(-T::lit(0.75)) * (-r * r / T::lit(4.0)).exp()
}

/// Integration radius for modes up to `n`: past the last turning point
/// `sqrt(4n+2)` the basis functions decay like a Gaussian.
pub fn basis_radius<T: Scalar>(n: usize) -> T {
    T::lit(1.5) * T::of(4 * n + 2).sqrt() + T::lit(15.0)
}

const KRONROD_NODES: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_693_491_180,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Integrates a bank of functions `f(r) -> [f_0, ..., f_k]` over fixed panels
/// with the 21-point Kronrod rule; returns values and `|Kronrod - Gauss|`.
pub(crate) fn panel_bank<T, F>(panels: &[T], width: usize, mut f: F) -> Result<(Vec<T>, Vec<T>)>
where
    T: Scalar,
    F: FnMut(T, &mut [T]) -> Result<()>,
{
    let mut k_sum = vec![T::zero(); width];
    let mut err = vec![T::zero(); width];
    let mut vals = vec![T::zero(); width];
    let mut k_loc = vec![T::zero(); width];
    let mut g_loc = vec![T::zero(); width];
    for w in panels.windows(2) {
        let (a, b) = (w[0], w[1]);
        let c = (a + b) / T::lit(2.0);
        let h = (b - a) / T::lit(2.0);
        k_loc.iter_mut().for_each(|v| *v = T::zero());
        g_loc.iter_mut().for_each(|v| *v = T::zero());
        for j in 0..11 {
            let wk = T::lit(KRONROD_WEIGHTS[j]);
            let wg = if j % 2 == 1 { T::lit(GAUSS_WEIGHTS[j / 2]) } else { T::zero() };
            let dx = h * T::lit(KRONROD_NODES[j]);
            let pts: &[T] = if j == 10 { &[c][..] } else { &[c - dx, c + dx][..] };
            for &x in pts {
                f(x, &mut vals)?;
                for i in 0..width {
                    k_loc[i] += wk * vals[i];
                    g_loc[i] += wg * vals[i];
                }
            }
        }
        for i in 0..width {
            k_sum[i] += k_loc[i] * h;
            err[i] += ((k_loc[i] - g_loc[i]) * h).abs();
        }
    }
    Ok((k_sum, err))
}

/// `(g, phi_{n,0,0})` against `4 pi r^2 dr` for `n = 0..=n_max`.
pub fn radial_moments<T: Scalar>(profile: &RadialProfile<T>, n_max: usize, quad: &QuadratureSpec) -> Result<Vec<T>> {
    let radius = profile.support().max(basis_radius(n_max));
    let four_pi = T::lit(4.0) * T::PI();
    let limits = Limits::default();
    let mut last = None;
    for refinement in 0..6 {
        let panels = profile.panels(radius, refinement);
        let (vals, errs) = panel_bank(&panels, n_max + 1, |r, out| {
            let g = profile.eval(r)?;
            if !g.is_finite() {
                return Err(Error::NonFinite { what: "profile value" });
            }
            let phi = limits.phi_radial_all(n_max, r)?;
            let w = g * four_pi * r * r;
            for (o, p) in out.iter_mut().zip(&phi) {
                *o = w * *p;
            }
            Ok(())
        })?;
        let worst = vals
            .iter()
            .zip(&errs)
            .enumerate()
            .map(|(n, (v, e))| (n, *e, T::lit(quad.abs_tol).max(T::lit(quad.rel_tol) * v.abs())))
            .find(|(_, e, tol)| e > tol);
        match worst {
            None => return Ok(vals),
            Some(w) => last = Some((w, panels.len() - 1)),
        }
    }
    let ((n, e, tol), count) = last.expect("at least one pass");
    Err(Error::QuadratureFailure {
        what: "radial projection",
        index: Some((n, 0)),
        error: e.f64(),
        requested: tol.f64(),
        subdivisions: count,
    })
}

/// `||g||^2 = int g^2 4 pi r^2 dr` by the same panel rule.
pub fn l2_norm_squared<T: Scalar>(profile: &RadialProfile<T>, quad: &QuadratureSpec) -> Result<T> {
    let radius = profile.support();
    let four_pi = T::lit(4.0) * T::PI();
    let mut last = (T::zero(), T::zero());
    for refinement in 0..6 {
        let panels = profile.panels(radius, refinement);
        let (v, e) = panel_bank(&panels, 1, |r, out| {
            let g = profile.eval(r)?;
            out[0] = g * g * four_pi * r * r;
            Ok(())
        })?;
        if e[0] <= T::lit(quad.abs_tol).max(T::lit(quad.rel_tol) * v[0].abs()) {
            return Ok(v[0]);
        }
        last = (v[0], e[0]);
    }
    Err(Error::QuadratureFailure {
        what: "profile norm",
        index: None,
        error: last.1.f64(),
        requested: quad.abs_tol,
        subdivisions: 6,
    })
}

/// `g(r) = sum_n b_n phi_{n,0,0}(r)` sampled on `r_grid`.
pub fn reconstruct<T: Scalar>(b: &ModeCoefficients<T>, r_grid: &[T]) -> Result<RadialProfile<T>> {
    let n_max = b.b.len().saturating_sub(1);
    let limits = Limits::default();
    let values = r_grid
        .iter()
        .map(|&r| {
            let phi = limits.phi_radial_all(n_max, r)?;
            Ok(b.b.iter().zip(&phi).map(|(c, p)| *c * *p).sum())
        })
        .collect::<Result<Vec<T>>>()?;
    RadialProfile::sampled(r_grid.to_vec(), values)
}

/// Weighted `l^2` norms of the coefficient sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", bound = "T: Scalar")]
pub enum NormKind<T> {
    L2,
    /// weight `e^{lambda_{2n} t}`
    WeightedSemigroup { t: T },
    /// weight `(2n + 3/2)^{2 s_over_2}`
    FracSobolev { s_over_2: T },
    SemigroupFracSobolev { t: T, s_over_2: T },
}

impl<T: Scalar> NormKind<T> {
    fn validate(&self) -> Result<()> {
        let bad_t = |t: T| !(t >= T::zero() && t.is_finite());
        let bad_s = |s: T| !(s > T::zero() && s < T::lit(0.5));
        match *self {
            Self::L2 => Ok(()),
            Self::WeightedSemigroup { t } if bad_t(t) => Err(invalid_norm(format!("t must be >= 0, got {t}"))),
            Self::FracSobolev { s_over_2 } if bad_s(s_over_2) => {
                Err(invalid_norm(format!("s/2 must lie in (0, 1/2), got {s_over_2}")))
            }
            Self::SemigroupFracSobolev { t, s_over_2 } if bad_t(t) || bad_s(s_over_2) => {
                Err(invalid_norm(format!("invalid parameters t = {t}, s/2 = {s_over_2}")))
            }
            _ => Ok(()),
        }
    }

    /// Natural log of the weight on mode `n`.
    fn ln_weight(&self, n: usize, lambda: T) -> T {
        let semigroup = |t: T| lambda * t;
        let sobolev = |s2: T| T::lit(2.0) * s2 * (T::lit(2.0) * T::of(n) + T::lit(1.5)).ln();
        match *self {
            Self::L2 => T::zero(),
            Self::WeightedSemigroup { t } => semigroup(t),
            Self::FracSobolev { s_over_2 } => sobolev(s_over_2),
            Self::SemigroupFracSobolev { t, s_over_2 } => semigroup(t) + sobolev(s_over_2),
        }
    }
}

fn invalid_norm(detail: String) -> Error {
    Error::InvalidParameter { name: "norm kind", detail }
}

/// `(sum_n w_n b_n^2)^{1/2}` for the weight selected by `kind`.
pub fn spectral_norm<T: Scalar>(b: &ModeCoefficients<T>, kind: NormKind<T>, tables: &SpectrumTables<T>) -> Result<T> {
    kind.validate()?;
    if b.b.len() > tables.truncation() + 1 {
        return Err(Error::DimensionMismatch {
            expected: tables.truncation() + 1,
            found: b.b.len(),
        });
    }
    let ln_max = T::max_value().ln();
    let mut acc = T::zero();
    for (n, &c) in b.b.iter().enumerate() {
        if c == T::zero() {
            continue;
        }
        let ln_term = kind.ln_weight(n, tables.lambda(n)) + T::lit(2.0) * c.abs().ln();
        if ln_term >= ln_max {
            return Err(Error::Overflow { what: "spectral_norm" });
        }
        acc += ln_term.exp();
    }
    if !acc.is_finite() {
        return Err(Error::Overflow { what: "spectral_norm" });
    }
    Ok(acc.sqrt())
}

/// Multiplicative slack on the decay bound, absorbing rounding in the
/// weighted norm.
pub const DECAY_SLACK: f64 = 1e-12;

/// Slack of the Lyapunov check relative to the largest value on the grid.
pub const LYAPUNOV_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRecord<T> {
    pub t: T,
    pub norm: T,
    pub bound: T,
    pub ratio: T,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport<T> {
    pub delta: T,
    pub g0_norm: T,
    pub records: Vec<DecayRecord<T>>,
    pub max_ratio: T,
    pub first_violation: Option<T>,
    pub passed: bool,
}

/// Checks `||e^{tL/2} g(t)|| <= e^{-lambda_4 (1 - delta) t / 2} ||g_0||` on
/// every trajectory time.
pub fn decay_certificate<T: Scalar>(
    traj: &[ModeCoefficients<T>],
    tables: &SpectrumTables<T>,
    delta: T,
    g0_norm: T,
) -> Result<DecayReport<T>> {
    if !(delta > T::zero() && delta < T::one()) {
        return Err(Error::InvalidParameter {
            name: "delta",
            detail: format!("must lie in (0, 1), got {delta}"),
        });
    }
    let lambda4 = tables.lambda(2);
    let slack = T::one() + T::lit(DECAY_SLACK);
    let mut records = Vec::with_capacity(traj.len());
    let mut max_ratio = T::zero();
    let mut first_violation = None;
    for state in traj {
        let norm = spectral_norm(state, NormKind::WeightedSemigroup { t: state.t }, tables)?;
        let bound = (-lambda4 * (T::one() - delta) * state.t / T::lit(2.0)).exp() * g0_norm;
        let ratio = if norm == T::zero() { T::zero() } else { norm / bound };
        let pass = norm <= bound * slack;
        if !pass && first_violation.is_none() {
            first_violation = Some(state.t);
        }
        max_ratio = max_ratio.max(ratio);
        records.push(DecayRecord {
            t: state.t,
            norm,
            bound,
            ratio,
            pass,
        });
    }
    Ok(DecayReport {
        delta,
        g0_norm,
        passed: first_violation.is_none(),
        records,
        max_ratio,
        first_violation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovReport<T> {
    /// `(t, sum_n e^{lambda_{2n} t} b_n(t)^2)`
    pub values: Vec<(T, T)>,
    pub max_increase: T,
    pub slack: T,
    pub passed: bool,
}

/// Checks that `t -> sum_n e^{lambda_{2n} t} b_n(t)^2` is nonincreasing.
pub fn lyapunov_monotonicity<T: Scalar>(traj: &[ModeCoefficients<T>], tables: &SpectrumTables<T>) -> Result<LyapunovReport<T>> {
    let values = traj
        .iter()
        .map(|s| {
            let norm = spectral_norm(s, NormKind::WeightedSemigroup { t: s.t }, tables)?;
            Ok((s.t, norm * norm))
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = values.iter().map(|v| v.1).fold(T::zero(), T::max);
    let slack = T::lit(LYAPUNOV_SLACK) * scale;
    let max_increase = values
        .windows(2)
        .map(|w| w[1].1 - w[0].1)
        .fold(T::neg_infinity(), T::max);
    let passed = values.len() < 2 || max_increase <= slack;
    Ok(LyapunovReport {
        values,
        max_increase: if max_increase.is_finite() { max_increase } else { T::zero() },
        slack,
        passed,
    })
}

/// Noise floor of the smoothing fit relative to the largest coefficient.
pub const FIT_NOISE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingFit<T> {
    pub t: T,
    /// Fitted rate in `|b_n| ~ exp(-c_t (2n + 3/2)^s)`.
    pub c_t: T,
    pub intercept: T,
    pub residual: T,
    pub modes_used: usize,
}

/// Fits `ln |b_n(t)| = const - c_t (2n + 3/2)^s` over modes above the noise
/// floor; a positive `c_t` is the coefficient-decay form of Gelfand–Shilov
/// smoothing.
pub fn gelfand_shilov_diagnostic<T: Scalar>(b: &ModeCoefficients<T>, tables: &SpectrumTables<T>) -> Result<SmoothingFit<T>> {
    let s = tables.model().s();
    let peak = b.b.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let floor = T::lit(FIT_NOISE_FLOOR) * peak;
    let pts: Vec<(T, T)> = b
        .b
        .iter()
        .enumerate()
        .filter(|(_, v)| peak > T::zero() && v.abs() > floor)
        .map(|(n, v)| ((T::lit(2.0) * T::of(n) + T::lit(1.5)).powf(s), v.abs().ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::DegenerateFit {
            points: pts.len(),
            required: 4,
        });
    }
    let (slope, intercept, residual) = least_squares(&pts);
    Ok(SmoothingFit {
        t: b.t,
        c_t: -slope,
        intercept,
        residual,
        modes_used: pts.len(),
    })
}

/// Exponent `t (c (2n + 3/2)^r - lambda_{2n})` of the lower bound on
/// `||e^{c t H^r} g(t)||` for data concentrated on mode `n`. Positive values
/// for large `n` witness that no uniform bound holds with index `r`.
pub fn sharpness_exponent<T: Scalar>(tables: &SpectrumTables<T>, n: usize, c: T, r: T, t: T) -> T {
    t * (c * (T::lit(2.0) * T::of(n) + T::lit(1.5)).powf(r) - tables.lambda(n))
}
