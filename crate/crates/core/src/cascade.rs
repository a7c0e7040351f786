//! The triangular mode cascade, solved as exponential sums and numerically.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::{radial_moments, RadialProfile};
use crate::ode::{self, StepControl};
use crate::quadrature::QuadratureSpec;
use crate::spectrum::SpectrumTables;
use crate::{Error, Result, Scalar};

/// Spectral coefficients `b_0..b_N` of the fluctuation at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ModeCoefficients<T> {
    pub t: T,
    pub b: Vec<T>,
}

impl<T: Scalar> ModeCoefficients<T> {
    pub fn new(t: T, b: Vec<T>) -> Result<Self> {
        if !(t >= T::zero() && t.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t",
                detail: format!("must be finite and >= 0, got {t}"),
            });
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "mode coefficients" });
        }
        Ok(Self { t, b })
    }

    pub fn zeros(truncation: usize) -> Self {
        Self {
            t: T::zero(),
            b: vec![T::zero(); truncation + 1],
        }
    }

    /// `amplitude` on mode `n`, zero elsewhere.
    pub fn unit(truncation: usize, n: usize, amplitude: T) -> Self {
        let mut c = Self::zeros(truncation);
        c.b[n] = amplitude;
        c
    }

    pub fn truncation(&self) -> usize {
        self.b.len().saturating_sub(1)
    }

    pub fn l2_norm(&self) -> T {
        self.b.iter().map(|v| *v * *v).sum::<T>().sqrt()
    }
}

/// Initial coefficients together with membership in the orthogonal complement
/// of the collisional invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct InitialData<T> {
    pub b: Vec<T>,
    pub in_n_perp: bool,
}

impl<T: Scalar> InitialData<T> {
    pub fn new(b: Vec<T>) -> Result<Self> {
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "initial coefficients" });
        }
        let in_n_perp = b.first().is_none_or(|v| *v == T::zero()) && b.get(1).is_none_or(|v| *v == T::zero());
        Ok(Self { b, in_n_perp })
    }

    pub fn truncation(&self) -> usize {
        self.b.len().saturating_sub(1)
    }

    pub fn norm(&self) -> T {
        self.b.iter().map(|v| *v * *v).sum::<T>().sqrt()
    }

    pub fn as_coefficients(&self) -> ModeCoefficients<T> {
        ModeCoefficients {
            t: T::zero(),
            b: self.b.clone(),
        }
    }
}

/// Invariant components below this fraction of the norm count as zero.
pub const INVARIANT_TOLERANCE: f64 = 1e-12;

/// Projects a radial profile onto `phi_{0,0,0}..phi_{N,0,0}`.
///
/// When `b_0` and `b_1` are below [`INVARIANT_TOLERANCE`] relative to the
/// coefficient norm they are set to zero and the data is flagged as lying in
/// the complement of the invariants.
pub fn project_initial<T: Scalar>(g0: &RadialProfile<T>, truncation: usize, quad: &QuadratureSpec) -> Result<InitialData<T>> {
    let mut b = radial_moments(g0, truncation, quad)?;
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "projected coefficients" });
    }
    let norm = b.iter().map(|v| *v * *v).sum::<T>().sqrt();
    let tol = T::lit(INVARIANT_TOLERANCE) * norm;
    let in_n_perp = b.iter().take(2).all(|v| v.abs() <= tol);
    if in_n_perp {
        b.iter_mut().take(2).for_each(|v| *v = T::zero());
    }
    Ok(InitialData { b, in_n_perp })
}

fn check_len<T: Scalar>(tables: &SpectrumTables<T>, len: usize) -> Result<()> {
    if len != tables.truncation() + 1 {
        return Err(Error::DimensionMismatch {
            expected: tables.truncation() + 1,
            found: len,
        });
    }
    Ok(())
}

/// Time derivative of the truncated cascade.
pub fn rhs<T: Scalar>(tables: &SpectrumTables<T>, b: &ModeCoefficients<T>) -> Result<Vec<T>> {
    check_len(tables, b.b.len())?;
    let mut out = vec![T::zero(); b.b.len()];
    rhs_into(tables, &b.b, &mut out);
    Ok(out)
}

fn rhs_into<T: Scalar>(tables: &SpectrumTables<T>, b: &[T], out: &mut [T]) {
    out[0] = T::zero();
    for n in 1..b.len() {
        let mut acc = -tables.lambda(n) * b[n] + tables.alpha(0, n) * b[0] * b[n];
        for k in 1..=n {
            let l = n - k;
            if b[k] != T::zero() && b[l] != T::zero() {
                acc += tables.w(k, l) * b[k] * b[l];
            }
        }
        out[n] = acc;
    }
}

/// Integrates the full cascade, including the `b_0` coupling, on `t_grid`.
pub fn solve_numeric<T: Scalar>(
    tables: &SpectrumTables<T>,
    init: &InitialData<T>,
    t_grid: &[T],
    ctl: &StepControl,
) -> Result<Vec<ModeCoefficients<T>>> {
    check_len(tables, init.b.len())?;
    if let Some(&t0) = t_grid.first() {
        if t0 != T::zero() {
            return Err(Error::InvalidParameter {
                name: "time grid",
                detail: format!("must start at 0, starts at {t0}"),
            });
        }
    }
    let states = ode::integrate(|_, y: &[T], dy: &mut [T]| rhs_into(tables, y, dy), &init.b, t_grid, ctl)?;
    Ok(t_grid
        .iter()
        .zip(states)
        .map(|(&t, b)| ModeCoefficients { t, b })
        .collect())
}

/// One term `coeff * exp(-rate t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ExpTerm<T> {
    pub rate: T,
    pub coeff: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormOptions {
    /// Relative tolerance under which equal exponents are merged.
    pub merge_tol: f64,
    /// Terms with `|coeff| < prune_rel * ||b(0)||` are dropped.
    pub prune_rel: f64,
    pub term_budget: usize,
    /// Relative gap `|Lambda - lambda_{2n}|` below which a mode is handed to
    /// the numeric integrator.
    pub resonance_tol: f64,
    pub step: StepControl,
}

impl Default for ClosedFormOptions {
    fn default() -> Self {
        Self {
            merge_tol: 1e-9,
            prune_rel: 1e-16,
            term_budget: 100_000,
            resonance_tol: 1e-9,
            step: StepControl::default(),
        }
    }
}

/// A forcing exponent too close to the mode's own decay rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ResonanceEvent<T> {
    pub mode: usize,
    pub forcing_rate: T,
    pub lambda: T,
}

/// Exponential-sum solution of the cascade. Modes from the first resonance
/// on, if any, are evaluated by integrating the full system.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ExpSumSolution<T> {
    modes: Vec<Vec<ExpTerm<T>>>,
    initial: Vec<T>,
    merge_tol: f64,
    pruned: usize,
    resonance: Option<ResonanceEvent<T>>,
    #[serde(skip)]
    fallback: Option<(SpectrumTables<T>, StepControl)>,
}

impl<T: Scalar> ExpSumSolution<T> {
    pub fn truncation(&self) -> usize {
        self.initial.len() - 1
    }

    /// Terms of mode `n`, or `None` when that mode is solved numerically.
    pub fn terms(&self, n: usize) -> Option<&[ExpTerm<T>]> {
        self.modes.get(n).map(Vec::as_slice)
    }

    pub fn closed_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn merge_tol(&self) -> f64 {
        self.merge_tol
    }

    pub fn pruned(&self) -> usize {
        self.pruned
    }

    pub fn resonance(&self) -> Option<&ResonanceEvent<T>> {
        self.resonance.as_ref()
    }

    pub fn initial(&self) -> &[T] {
        &self.initial
    }

    pub fn evaluate(&self, t: T) -> Result<ModeCoefficients<T>> {
        Ok(self.evaluate_grid(&[t])?.remove(0))
    }

    pub fn evaluate_grid(&self, times: &[T]) -> Result<Vec<ModeCoefficients<T>>> {
        if let Some(bad) = times.iter().find(|t| !(**t >= T::zero() && t.is_finite())) {
            return Err(Error::InvalidParameter {
                name: "t",
                detail: format!("must be finite and >= 0, got {bad}"),
            });
        }
        let mut out: Vec<ModeCoefficients<T>> = times
            .iter()
            .map(|&t| {
                let b = if t == T::zero() {
                    self.initial.clone()
                } else {
                    let mut b = vec![T::zero(); self.initial.len()];
                    for (slot, terms) in b.iter_mut().zip(&self.modes) {
                        *slot = terms.iter().map(|e| e.coeff * (-e.rate * t).exp()).sum();
                    }
                    b
                };
                ModeCoefficients { t, b }
            })
            .collect();
        if let Some((tables, ctl)) = &self.fallback {
            let mut order: Vec<usize> = (0..times.len()).collect();
            order.sort_by(|&i, &j| times[i].partial_cmp(&times[j]).expect("finite"));
            let mut grid = vec![T::zero()];
            grid.extend(order.iter().map(|&i| times[i]));
            let init = InitialData {
                b: self.initial.clone(),
                in_n_perp: true,
            };
            let states = solve_numeric(tables, &init, &grid, ctl)?;
            let first = self.modes.len();
            for (state, &i) in states[1..].iter().zip(&order) {
                if times[i] != T::zero() {
                    out[i].b[first..].copy_from_slice(&state.b[first..]);
                }
            }
        }
        Ok(out)
    }
}

/// Solves the cascade for data orthogonal to the invariants as exponential
/// sums, mode by mode.
pub fn solve_closed_form<T: Scalar>(tables: &SpectrumTables<T>, init: &InitialData<T>) -> Result<ExpSumSolution<T>> {
    solve_closed_form_with(tables, init, &ClosedFormOptions::default())
}

pub fn solve_closed_form_with<T: Scalar>(
    tables: &SpectrumTables<T>,
    init: &InitialData<T>,
    opts: &ClosedFormOptions,
) -> Result<ExpSumSolution<T>> {
    check_len(tables, init.b.len())?;
    if !init.in_n_perp || init.b[0] != T::zero() || init.b[1] != T::zero() {
        return Err(Error::NotOrthogonalToInvariants);
    }
    let n_max = tables.truncation();
    let norm = init.norm();
    let prune = T::lit(opts.prune_rel) * norm;
    let merge = T::lit(opts.merge_tol);
    let mut modes: Vec<Vec<ExpTerm<T>>> = vec![Vec::new(), Vec::new()];
    let mut pruned = 0usize;
    let mut resonance = None;

    for n in 2..=n_max {
        let (solved, _) = modes.split_at(n);
        let forcing = merge_terms(forcing_terms(tables, solved, n), merge);
        let lambda = tables.lambda(n);
        let mut terms = Vec::with_capacity(forcing.len() + 1);
        let mut particular_sum = T::zero();
        let mut resonant = None;
        for f in &forcing {
            if f.coeff == T::zero() {
                continue;
            }
            let gap = lambda - f.rate;
            if gap.abs() < T::lit(opts.resonance_tol) * lambda.max(f.rate) {
                resonant = Some(f.rate);
                break;
            }
            let coeff = f.coeff / gap;
            if coeff.abs() < prune {
                pruned += 1;
                continue;
            }
            particular_sum += coeff;
            terms.push(ExpTerm { rate: f.rate, coeff });
        }
        if let Some(rate) = resonant {
            log::warn!("mode {n}: forcing rate {rate} resonates with lambda = {lambda}; switching to numeric integration");
            resonance = Some(ResonanceEvent {
                mode: n,
                forcing_rate: rate,
                lambda,
            });
            break;
        }
        let homogeneous = init.b[n] - particular_sum;
        if homogeneous != T::zero() {
            terms.insert(0, ExpTerm { rate: lambda, coeff: homogeneous });
        }
        if terms.len() > opts.term_budget {
            return Err(Error::TermBudgetExceeded {
                mode: n,
                terms: terms.len(),
                budget: opts.term_budget,
            });
        }
        modes.push(terms);
    }

    let fallback = resonance.map(|_| (tables.clone(), opts.step));
    Ok(ExpSumSolution {
        modes,
        initial: init.b.clone(),
        merge_tol: opts.merge_tol,
        pruned,
        resonance,
        fallback,
    })
}

/// Products `w b_k b_l` with `k + l = n`, `k, l >= 2`, as unmerged terms.
fn forcing_terms<T: Scalar>(tables: &SpectrumTables<T>, solved: &[Vec<ExpTerm<T>>], n: usize) -> Vec<ExpTerm<T>> {
    (2..=n / 2)
        .into_par_iter()
        .flat_map_iter(|k| {
            let l = n - k;
            let w = if k == l { tables.w(k, k) } else { tables.w(k, l) + tables.w(l, k) };
            let (a, b) = (&solved[k], &solved[l]);
            a.iter().flat_map(move |x| {
                b.iter().map(move |y| ExpTerm {
                    rate: x.rate + y.rate,
                    coeff: w * x.coeff * y.coeff,
                })
            })
        })
        .collect()
}

/// Sorts by rate and sums coefficients of rates within `tol` (relative).
fn merge_terms<T: Scalar>(mut terms: Vec<ExpTerm<T>>, tol: T) -> Vec<ExpTerm<T>> {
    terms.sort_by(|a, b| a.rate.partial_cmp(&b.rate).expect("finite rates"));
    let mut out: Vec<ExpTerm<T>> = Vec::with_capacity(terms.len());
    let mut anchor = T::zero();
    for t in terms {
        match out.last_mut() {
            Some(last) if t.rate - anchor <= tol * t.rate.abs() => last.coeff += t.coeff,
            _ => {
                anchor = t.rate;
                out.push(t);
            }
        }
    }
    out
}
