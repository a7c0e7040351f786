//! Adaptive Gauss–Kronrod quadrature with a graded map for endpoint
//! singularities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Tolerances and effort limits for every quadrature in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Exponent `q` of the map `theta = b u^q` toward a singular endpoint.
    /// `None` picks it from the singularity exponent.
    pub grading_exponent: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            grading_exponent: None,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |detail: String| Error::InvalidParameter {
            name: "quadrature",
            detail,
        };
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(bad(format!(
                "tolerances must be positive (abs_tol = {}, rel_tol = {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(bad("max_subdivisions must be positive".into()));
        }
        if let Some(q) = self.grading_exponent {
            if !(q >= 1.0 && q.is_finite()) {
                return Err(bad(format!("grading_exponent must be >= 1, got {q}")));
            }
        }
        Ok(())
    }

    /// Grading exponent for an integrand behaving like `theta^{p}` at 0.
    ///
    /// With `theta = u^q` the mapped integrand behaves like `u^{q(p+1)-1}`;
    /// `q (p + 1) >= 3` keeps its first two derivatives bounded.
    pub fn grading_for(&self, p: f64) -> f64 {
        self.grading_exponent
            .unwrap_or_else(|| (3.0 / (p + 1.0).max(1e-3)).max(1.0).min(12.0))
    }
}

/// Result of one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub subdivisions: usize,
    pub converged: bool,
}

impl<T: Scalar> Estimate<T> {
    /// Converts a non-converged estimate into a quadrature failure.
    pub fn require(self, what: &'static str, index: Option<(usize, usize)>, requested: T) -> Result<T> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::QuadratureFailure {
                what,
                index,
                error: self.error.f64(),
                requested: requested.f64(),
                subdivisions: self.subdivisions,
            })
        }
    }
}

const XGK: [f64; 11] = [
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

const WGK: [f64; 11] = [
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

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Rule<T> {
    xgk: [T; 11],
    wgk: [T; 11],
    wg: [T; 5],
}

impl<T: Scalar> Rule<T> {
    fn new() -> Self {
        Self {
            xgk: XGK.map(T::lit),
            wgk: WGK.map(T::lit),
            wg: WG.map(T::lit),
        }
    }

    /// 21-point Kronrod estimate with the embedded 10-point Gauss error.
    fn apply<F: FnMut(T) -> T>(&self, f: &mut F, a: T, b: T) -> (T, T) {
        let half = T::lit(0.5);
        let center = half * (a + b);
        let half_len = half * (b - a);
        let f_center = f(center);
        let mut res_k = f_center * self.wgk[10];
        let mut res_g = T::zero();
        let mut res_abs = res_k.abs();
        let mut fv1 = [T::zero(); 10];
        let mut fv2 = [T::zero(); 10];
        for j in 0..10 {
            let dx = half_len * self.xgk[j];
            let f1 = f(center - dx);
            let f2 = f(center + dx);
            fv1[j] = f1;
            fv2[j] = f2;
            res_k += self.wgk[j] * (f1 + f2);
            res_abs += self.wgk[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                res_g += self.wg[j / 2] * (f1 + f2);
            }
        }
        let mean = res_k * half;
        let mut res_asc = self.wgk[10] * (f_center - mean).abs();
        for j in 0..10 {
            res_asc += self.wgk[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
        }
        let scale = half_len.abs();
        let err = rescale_error((res_k - res_g) * half_len, res_abs * scale, res_asc * scale);
        (res_k * half_len, err)
    }
}

fn rescale_error<T: Scalar>(err: T, res_abs: T, res_asc: T) -> T {
    let mut scaled = err.abs();
    if res_asc != T::zero() && scaled != T::zero() {
        let ratio = (T::lit(200.0) * scaled / res_asc).powf(T::lit(1.5));
        scaled = if ratio < T::one() { res_asc * ratio } else { res_asc };
    }
    let floor = T::lit(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / floor {
        scaled = scaled.max(floor * res_abs);
    }
    scaled
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Scalar> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Panel<T> {}

impl<T: Scalar> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.f64().total_cmp(&other.error.f64())
    }
}

/// Globally adaptive integration of `f` over `[a, b]`, starting from
/// `initial_panels` equal panels and bisecting the worst panel until the
/// summed error estimate drops below `max(abs_tol, rel_tol |I|)`.
pub fn integrate<T, F>(mut f: F, a: T, b: T, initial_panels: usize, spec: &QuadratureSpec) -> Estimate<T>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let rule = Rule::new();
    let abs_tol = T::lit(spec.abs_tol).max(T::min_positive_value());
    let rel_tol = T::lit(spec.rel_tol).max(T::tol_floor() * T::lit(4.0));
    let panels = initial_panels.max(1);
    let width = (b - a) / T::of(panels);

    let mut heap = BinaryHeap::with_capacity(panels + spec.max_subdivisions);
    for i in 0..panels {
        let lo = a + width * T::of(i);
        let hi = if i + 1 == panels { b } else { a + width * T::of(i + 1) };
        let (value, error) = rule.apply(&mut f, lo, hi);
        heap.push(Panel { a: lo, b: hi, value, error });
    }

    let totals = |heap: &BinaryHeap<Panel<T>>| {
        heap.iter()
            .fold((T::zero(), T::zero()), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = totals(&heap);
    let mut subdivisions = 0;
    let target = |v: T| abs_tol.max(rel_tol * v.abs());

    while error > target(value) && subdivisions < spec.max_subdivisions {
        let worst = heap.pop().expect("non-empty panel set");
        let mid = T::lit(0.5) * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            heap.push(worst);
            break;
        }
        let (v1, e1) = rule.apply(&mut f, worst.a, mid);
        let (v2, e2) = rule.apply(&mut f, mid, worst.b);
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        subdivisions += 1;
        if subdivisions % 64 == 0 {
            (value, error) = totals(&heap);
        }
    }
    (value, error) = totals(&heap);
    let converged = value.is_finite() && error <= target(value);
    Estimate {
        value,
        error,
        subdivisions,
        converged,
    }
}

/// Integrates over `[0, b]` after the substitution `x = b u^q`, which
/// clusters nodes toward an integrable singularity at the origin.
pub fn integrate_graded<T, F>(mut f: F, b: T, q: T, spec: &QuadratureSpec) -> Estimate<T>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let one = T::one();
    let mapped = |u: T| {
        if u <= T::zero() {
            return T::zero();
        }
        let uq1 = u.powf(q - one);
        let x = b * uq1 * u;
        if x <= T::zero() {
            return T::zero();
        }
        f(x) * b * q * uq1
    };
    integrate(mapped, T::zero(), one, 8, spec)
}
