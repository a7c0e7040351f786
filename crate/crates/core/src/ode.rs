//! Dormand–Prince 5(4) integrator with steps clamped to output times.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Local error control for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest admissible step relative to `max(1, |t|)`.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
            min_step: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `grid[0]` and returns the state at every
/// grid time. `grid` must be nondecreasing.
pub fn integrate<T, F>(mut f: F, y0: &[T], grid: &[T], ctl: &StepControl) -> Result<Vec<Vec<T>>>
where
    T: Scalar,
    F: FnMut(T, &[T], &mut [T]),
{
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    if grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidParameter {
            name: "time grid",
            detail: "times must be nondecreasing".into(),
        });
    }
    let dim = y0.len();
    let lit = T::lit;
    let rtol = lit(ctl.rtol);
    let atol = lit(ctl.atol);

    let mut t = grid[0];
    let mut y = y0.to_vec();
    check_finite(&y)?;
    let mut k1 = vec![T::zero(); dim];
    let mut k2 = vec![T::zero(); dim];
    let mut k3 = vec![T::zero(); dim];
    let mut k4 = vec![T::zero(); dim];
    let mut k5 = vec![T::zero(); dim];
    let mut k6 = vec![T::zero(); dim];
    let mut k7 = vec![T::zero(); dim];
    let mut tmp = vec![T::zero(); dim];
    let mut y_new = vec![T::zero(); dim];
    f(t, &y, &mut k1);

    let span = grid[grid.len() - 1] - grid[0];
    let mut h = initial_step(&y, &k1, rtol, atol, span);
    let mut steps = 0usize;
    let mut out = Vec::with_capacity(grid.len());

    for &target in grid {
        while t < target {
            steps += 1;
            if steps > ctl.max_steps {
                return Err(Error::TooManySteps {
                    t: t.f64(),
                    max_steps: ctl.max_steps,
                });
            }
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step < lit(ctl.min_step) * t.abs().max(T::one()) && !last {
                return Err(Error::StepSizeUnderflow { t: t.f64(), h: step.f64() });
            }

            stage(&mut tmp, &y, step, &[(A21, &k1)]);
            f(t + lit(C2) * step, &tmp, &mut k2);
            stage(&mut tmp, &y, step, &[(A31, &k1), (A32, &k2)]);
            f(t + lit(C3) * step, &tmp, &mut k3);
            stage(&mut tmp, &y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            f(t + lit(C4) * step, &tmp, &mut k4);
            stage(&mut tmp, &y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            f(t + lit(C5) * step, &tmp, &mut k5);
            stage(&mut tmp, &y, step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
            f(t + step, &tmp, &mut k6);
            stage(&mut y_new, &y, step, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let t_new = if last { target } else { t + step };
            f(t_new, &y_new, &mut k7);

            let mut err_sq = T::zero();
            for i in 0..dim {
                let e = step
                    * (lit(E1) * k1[i] + lit(E3) * k3[i] + lit(E4) * k4[i] + lit(E5) * k5[i] + lit(E6) * k6[i]
                        + lit(E7) * k7[i]);
                let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
                err_sq += (e / sc) * (e / sc);
            }
            let err = if dim == 0 { T::zero() } else { (err_sq / T::of(dim)).sqrt() };
            if !err.is_finite() {
                return Err(Error::NonFinite { what: "integrator state" });
            }
            let factor = if err == T::zero() {
                lit(5.0)
            } else {
                (lit(0.9) * err.powf(lit(-0.2))).max(lit(0.2)).min(lit(5.0))
            };
            if err <= T::one() {
                t = t_new;
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                check_finite(&y)?;
                if !last {
                    h = step * factor;
                }
            } else {
                h = step * factor.min(T::one());
                if h < lit(ctl.min_step) * t.abs().max(T::one()) {
                    return Err(Error::StepSizeUnderflow { t: t.f64(), h: h.f64() });
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn stage<T: Scalar>(out: &mut [T], y: &[T], h: T, terms: &[(f64, &Vec<T>)]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = T::zero();
        for (a, k) in terms {
            acc += T::lit(*a) * k[i];
        }
        *o = y[i] + h * acc;
    }
}

fn check_finite<T: Scalar>(y: &[T]) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what: "integrator state" })
    }
}

fn initial_step<T: Scalar>(y: &[T], dy: &[T], rtol: T, atol: T, span: T) -> T {
    let mut d0 = T::zero();
    let mut d1 = T::zero();
    for (yi, fi) in y.iter().zip(dy) {
        let sc = atol + rtol * yi.abs();
        d0 = d0.max((*yi / sc).abs());
        d1 = d1.max((*fi / sc).abs());
    }
    let guess = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    };
    if span > T::zero() {
        guess.min(span)
    } else {
        guess
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
        let out = integrate(|_, y: &[f64], dy: &mut [f64]| dy[0] = -2.0 * y[0], &[1.0], &grid, &StepControl::default()).unwrap();
        for (t, y) in grid.iter().zip(&out) {
            assert!((y[0] - (-2.0 * t).exp()).abs() < 1e-11);
        }
    }

    #[test]
    fn zero_state_stays_zero() {
        let grid = [0.0, 1.0, 5.0];
        let out = integrate(|_, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0], &[0.0], &grid, &StepControl::default()).unwrap();
        assert!(out.iter().all(|y| y[0] == 0.0));
    }

    #[test]
    fn blow_up_is_reported() {
        let grid = [0.0, 2.0];
        let err = integrate(|_, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0], &[1.0], &grid, &StepControl::default());
        assert!(err.is_err());
    }

    #[test]
    fn rejects_decreasing_grid() {
        let err = integrate(|_, _: &[f64], _: &mut [f64]| {}, &[1.0], &[1.0, 0.5], &StepControl::default());
        assert!(matches!(err, Err(Error::InvalidParameter { .. })));
    }
}
