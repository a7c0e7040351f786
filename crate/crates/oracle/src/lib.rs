//! Reference computations used by the test suites.
//!
//! Nothing here shares code with the main crate: polynomials are expanded
//! in exact rational arithmetic, integrals use a double-exponential rule,
//! and incomplete beta values come from a positive hypergeometric series.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(q: &BigRational) -> f64 {
    // Convert numerator and denominator separately when they overflow f64.
    match q.to_f64() {
        Some(v) if v.is_finite() => v,
        _ => {
            let shift = q.numer().bits().max(q.denom().bits()) as i64 - 900;
            let scale = BigInt::one() << shift.max(0) as usize;
            let n = (q.numer() / &scale).to_f64().unwrap();
            let d = (q.denom() / &scale).to_f64().unwrap();
            n / d
        }
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn pow(x: &BigRational, e: u64) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

/// `P_l(x)` by differentiating the Rodrigues formula term by term.
pub fn legendre_rodrigues(l: u64, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for j in 0..=l {
        if 2 * j < l {
            continue;
        }
        let sign = if (l - j) % 2 == 0 { 1 } else { -1 };
        let coeff = binomial(l, j) * factorial(2 * j) / factorial(2 * j - l) * BigInt::from(sign);
        acc += BigRational::from_integer(coeff) * pow(x, 2 * j - l);
    }
    let den = (BigInt::one() << l as usize) * factorial(l);
    acc / BigRational::from_integer(den)
}

/// `L_n^{(alpha)}(x) = sum_i (-1)^i C(n+alpha, n-i) x^i / i!` with rational `alpha`.
pub fn laguerre_explicit(n: u64, alpha: &BigRational, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for i in 0..=n {
        let mut c = BigRational::one();
        for j in 1..=(n - i) {
            let jj = BigRational::from_integer(BigInt::from(j));
            c = c * (alpha + BigRational::from_integer(BigInt::from(i)) + &jj) / jj;
        }
        let term = c * pow(x, i) / BigRational::from_integer(factorial(i));
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// `psi_n(x) = 2^{-1/4} phi_n(x / sqrt 2)` from the explicit physicists'
/// Hermite sum, exact in the rational part.
pub fn hermite_psi_explicit(n: u64, x: &BigRational) -> f64 {
    // H_n(y) with 2y = sqrt(2) x: sum_k (-1)^k n!/(k!(n-2k)!) (sqrt 2 x)^{n-2k}
    let mut acc = BigRational::zero();
    for k in 0..=n / 2 {
        let p = n - 2 * k;
        let c = factorial(n) / (factorial(k) * factorial(p));
        let two_pow = BigRational::from_integer(BigInt::one() << (p / 2) as usize);
        let term = BigRational::from_integer(c) * two_pow * pow(x, p);
        if k % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    let xf = to_f64(x);
    let odd_root = if n % 2 == 1 { 2f64.sqrt() } else { 1.0 };
    let ln_norm = 0.5 * (n as f64 * 2f64.ln() + ln_factorial(n) + 0.5 * std::f64::consts::PI.ln());
    2f64.powf(-0.25) * odd_root * to_f64(&acc) * (-xf * xf / 4.0 - ln_norm).exp()
}

/// `ln n!` by direct summation.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln Gamma(k/2)` for positive integer `k`, by the product recursion from
/// `Gamma(1/2) = sqrt(pi)` or `Gamma(1) = 1`.
pub fn ln_gamma_half_integer(k: u64) -> f64 {
    assert!(k > 0);
    if k % 2 == 0 {
        ln_factorial(k / 2 - 1)
    } else {
        let mut acc = 0.5 * std::f64::consts::PI.ln();
        let mut x = 0.5;
        while x < k as f64 / 2.0 - 0.25 {
            acc += x.ln();
            x += 1.0;
        }
        acc
    }
}

/// `B_x(a, b) = x^a (1-x)^b / a * 2F1(a+b, 1; a+1; x)`; every series term is
/// positive, so there is no cancellation.
pub fn incomplete_beta_series(a: f64, b: f64, x: f64) -> f64 {
    assert!(x < 1.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        term *= (a + b + k) / (a + 1.0 + k) * x;
        sum += term;
        k += 1.0;
        let ratio = (a + b + k) / (a + 1.0 + k) * x;
        if ratio < 1.0 && term * ratio / (1.0 - ratio) < 1e-18 * sum {
            break;
        }
        assert!(k < 1e7, "series did not converge");
    }
    (a * x.ln() + b * (-x).ln_1p()).exp() / a * sum
}

/// Closed forms of the moments of the `|sin|^{-1-2s} cos` cross section.
pub mod sine_model {
    use super::incomplete_beta_series;

    /// `Lambda_{n,m} = A B_{1/2}(n - s, m + 1)`
    pub fn angular_moment(s: f64, amplitude: f64, n: u64, m: u64) -> f64 {
        amplitude * incomplete_beta_series(n as f64 - s, m as f64 + 1.0, 0.5)
    }

    /// `int beta (1 - cos^{2n}) = A sum_{l<n} B_{1/2}(1 - s, l + 1)`
    pub fn cos_moment(s: f64, amplitude: f64, n: u64) -> f64 {
        amplitude * (0..n).map(|l| incomplete_beta_series(1.0 - s, l as f64 + 1.0, 0.5)).sum::<f64>()
    }

    /// `lambda_{2n}`
    pub fn eigenvalue(s: f64, amplitude: f64, n: u64) -> f64 {
        if n <= 1 {
            return 0.0;
        }
        cos_moment(s, amplitude, n) - amplitude * incomplete_beta_series(n as f64 - s, 1.0, 0.5)
    }
}

/// Coefficients `c_i` of `P_l(x) = sum_i c_i x^i`.
pub fn legendre_coefficients(l: u64) -> Vec<BigRational> {
    let mut c = vec![BigRational::zero(); l as usize + 1];
    let den = BigRational::from_integer((BigInt::one() << l as usize) * factorial(l));
    for j in 0..=l {
        if 2 * j < l {
            continue;
        }
        let sign = if (l - j) % 2 == 0 { 1 } else { -1 };
        let coeff = binomial(l, j) * factorial(2 * j) / factorial(2 * j - l) * BigInt::from(sign);
        c[(2 * j - l) as usize] += BigRational::from_integer(coeff) / &den;
    }
    c
}

/// `lambda_B(n, l)` for the `|sin|^{-1-2s} cos` cross section with unit
/// amplitude. With `t = sin^2 theta` the bracket is an exact polynomial
/// `sum_j a_j t^j`, and each monomial integrates to `(1/2)^{j-s} / (j-s)`.
pub fn general_eigenvalue_sine(s: f64, n: u64, l: u64) -> f64 {
    let k = 2 * n + l;
    let p = legendre_coefficients(l);
    let top = ((l + k) / 2) as usize;
    let mut a = vec![BigRational::zero(); top + 1];
    a[0] += BigRational::one();
    if n == 0 && l == 0 {
        a[0] += BigRational::one();
    }
    for (i, pi) in p.iter().enumerate() {
        if pi.is_zero() {
            continue;
        }
        let q = (i as u64 + k) / 2;
        // cos^{2q} = (1 - t)^q
        for j in 0..=q {
            let c = BigRational::from_integer(binomial(q, j)) * pi;
            if j % 2 == 0 {
                a[j as usize] -= c;
            } else {
                a[j as usize] += c;
            }
        }
        // sin^{2q} = t^q
        a[q as usize] -= pi.clone();
    }
    assert!(a[0].is_zero(), "bracket must vanish at theta = 0");
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(j, aj)| {
            let e = j as f64 - s;
            to_f64(aj) * 0.5f64.powf(e) / e
        })
        .sum()
}

/// Double-exponential (tanh-sinh) quadrature on `[a, b]`, refined by halving
/// the step until successive levels agree to `tol` (relative to the sum of
/// absolute values). Endpoint singularities are never sampled.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> (f64, f64) {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        let weight = std::f64::consts::FRAC_PI_2 * t.cosh() * 4.0 * e / (1.0 + e).powi(2);
        // distance from the nearer endpoint, computed without cancellation
        let gap = half * (-u.abs()).exp() / u.abs().cosh();
        let x = if u >= 0.0 { b - gap } else { a + gap };
        if gap == 0.0 || weight == 0.0 || x <= a || x >= b {
            (0.0, 0.0)
        } else {
            let v = f(x);
            (weight * v, weight * v.abs())
        }
    };
    let t_max = 6.5;
    let mut h = 0.5;
    let (mut sum, mut abs_sum) = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let (p, pa) = eval(k as f64 * h);
        let (q, qa) = eval(-(k as f64) * h);
        sum += p + q;
        abs_sum += pa + qa;
        k += 1;
    }
    let mut estimate = sum * h * half;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            let (p, pa) = eval(k as f64 * h);
            let (q, qa) = eval(-(k as f64) * h);
            sum += p + q;
            abs_sum += pa + qa;
            k += 2;
        }
        let next = sum * h * half;
        let scale = abs_sum * h * half.abs();
        let converged = (next - estimate).abs() <= tol * scale.max(f64::MIN_POSITIVE);
        estimate = next;
        if converged {
            break;
        }
    }
    estimate
}

/// `tanh_sinh` applied panel by panel over `pieces` equal subintervals.
pub fn tanh_sinh_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, pieces: usize, tol: f64) -> f64 {
    let w = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| tanh_sinh(&f, a + w * i as f64, a + w * (i + 1) as f64, tol))
        .sum()
}

/// All partitions of `n` into parts `>= min_part`, parts nonincreasing.
pub fn partitions(n: usize, min_part: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (min..=max.min(rest)).rev() {
            cur.push(p);
            go(rest - p, p, min, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n >= min_part {
        go(n, n, min_part.max(1), &mut Vec::new(), &mut out);
    }
    out
}

/// Radial basis function from the explicit Laguerre sum (rational `x`).
pub fn phi_radial_explicit(n: u64, r2_over_2: &BigRational) -> f64 {
    let l = laguerre_explicit(n, &rational(1, 2), r2_over_2);
    let x = to_f64(r2_over_2);
    let ln_norm = 0.5 * (ln_factorial(n) - ln_gamma_half_integer(2 * n + 3));
    let pre = 2f64.powf(-0.25) / (4.0 * std::f64::consts::PI).sqrt();
    pre * to_f64(&l) * (ln_norm - x / 2.0).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rodrigues_low_orders() {
        let x = rational(1, 2);
        assert_eq!(legendre_rodrigues(0, &x), BigRational::one());
        assert_eq!(legendre_rodrigues(2, &x), rational(-1, 8));
        // P_5(1/2) = 23/256
        assert_eq!(legendre_rodrigues(5, &x), rational(23, 256));
    }

    #[test]
    fn general_eigenvalue_kernel_modes_vanish() {
        assert_eq!(general_eigenvalue_sine(0.5, 0, 0), 0.0);
        assert_eq!(general_eigenvalue_sine(0.5, 1, 0), 0.0);
        assert_eq!(general_eigenvalue_sine(0.5, 0, 1), 0.0);
        assert!(general_eigenvalue_sine(0.5, 2, 0) > 0.0);
    }

    #[test]
    fn laguerre_first_order() {
        let v = laguerre_explicit(1, &rational(1, 2), &rational(1, 1));
        assert_eq!(v, rational(1, 2));
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        let v = tanh_sinh(|x| x.powf(-0.75), 0.0, 1.0, 1e-14);
        assert!((v - 4.0).abs() < 1e-10);
    }

    #[test]
    fn beta_series_matches_elementary_case() {
        // B_x(1, 1) = x, B_x(2, 1) = x^2/2
        assert!((incomplete_beta_series(1.0, 1.0, 0.3) - 0.3).abs() < 1e-15);
        assert!((incomplete_beta_series(2.0, 1.0, 0.5) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn partition_counts() {
        // parts >= 2: p(n) - p(n-1)
        assert_eq!(partitions(8, 2).len(), 7);
        assert_eq!(partitions(1, 2).len(), 0);
        assert_eq!(partitions(4, 2), vec![vec![4], vec![2, 2]]);
    }
}
