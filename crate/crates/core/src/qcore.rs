//! q-calculus primitives: q-integers, q-factorials, q-binomials, the
//! q-difference quotient and the two q-exponentials.
//!
//! Everything here is a pure function of its arguments. The q-exponentials
//! report how many terms (or product factors) they consumed so callers can
//! log the truncation depth.

use crate::error::{Error, Result};

/// Upper bound on terms any series in this crate is allowed to consume.
pub const MAX_TERMS: usize = 1_000_000;

/// Below this gap `1 - q` the q-integer is summed explicitly.
const NEAR_ONE: f64 = 1e-8;

/// Step of the symmetric difference used for `D_q f(0)`.
pub const ZERO_STEP: f64 = 1e-6;

/// The deformation parameter, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QValue(f64);

impl QValue {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > 0.0 && q < 1.0 {
            Ok(QValue(q))
        } else {
            Err(Error::InvalidParameter(format!("q must lie in (0, 1), got {q}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `1 - q`, always positive.
    #[inline]
    pub fn gap(self) -> f64 {
        1.0 - self.0
    }
}

impl std::fmt::Display for QValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `[n]_q = (1 - q^n) / (1 - q)`.
pub fn q_integer(n: u32, q: QValue) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if q.gap() < NEAR_ONE {
        return q_integer_by_sum(n, q);
    }
    // 1 - q^n without cancellation
    -(n as f64 * (-q.gap()).ln_1p()).exp_m1() / q.gap()
}

/// `[n]_q` as the explicit geometric sum `1 + q + ... + q^(n-1)`.
pub fn q_integer_by_sum(n: u32, q: QValue) -> f64 {
    // Horner form keeps the sum exact-ish in the last place.
    (0..n).fold(0.0, |acc, _| 1.0 + q.get() * acc)
}

/// `[n]_q! = [n]_q [n-1]_q ... [1]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: u32, q: QValue) -> Result<f64> {
    let mut acc = 1.0;
    for k in 1..=n {
        acc *= q_integer(k, q);
        if !acc.is_finite() {
            return Err(Error::Overflow(format!("[{n}]_q! exceeds f64 range (q = {q})")));
        }
    }
    Ok(acc)
}

/// Gaussian binomial `[n]_q! / ([k]_q! [n-k]_q!)`, built as a running ratio
/// so it stays finite whenever the result is.
pub fn q_binomial(n: u32, k: u32, q: QValue) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidParameter(format!("q-binomial needs k <= n, got n = {n}, k = {k}")));
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 1..=k {
        acc *= q_integer(n - k + i, q) / q_integer(i, q);
    }
    if acc.is_finite() {
        Ok(acc)
    } else {
        Err(Error::Overflow(format!("q-binomial [{n} {k}]_q exceeds f64 range")))
    }
}

/// A truncated series (or product) value with the number of terms used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QExp {
    pub value: f64,
    pub terms: usize,
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")))
    }
}

/// `e_q^x = sum x^n / [n]_q!`, convergent for `|x| (1 - q) < 1`.
///
/// Summation stops once the current term times `1 / (1 - rho)` falls below
/// `tol` relative to the partial sum, where `rho` bounds every later term
/// ratio. Negative arguments go through `1 / prod_j (1 + (1-q) q^j |x|)`,
/// which has no cancellation.
pub fn q_exp_small(x: f64, q: QValue, tol: f64) -> Result<QExp> {
    check_tol(tol)?;
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("argument must be finite, got {x}")));
    }
    if x.abs() * q.gap() >= 1.0 {
        return Err(Error::Domain(format!("e_q^x diverges: |x|(1-q) = {} >= 1 (x = {x}, q = {q})", x.abs() * q.gap())));
    }
    if x == 0.0 {
        return Ok(QExp { value: 1.0, terms: 1 });
    }
    if x < 0.0 {
        let inv = euler_product(q.gap() * -x, q, tol)?;
        return Ok(QExp { value: 1.0 / inv.value, terms: inv.terms });
    }

    let qv = q.get();
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut qint = 0.0; // [n]_q, built incrementally
    for n in 1..MAX_TERMS {
        qint = 1.0 + qv * qint;
        term *= x / qint;
        sum += term;
        if !sum.is_finite() {
            return Err(Error::Overflow(format!("e_q^{x} exceeds f64 range")));
        }
        let rho = x / (1.0 + qv * qint);
        if rho < 1.0 && term / (1.0 - rho) < tol * sum {
            return Ok(QExp { value: sum, terms: n + 1 });
        }
    }
    Err(Error::Truncation { terms: MAX_TERMS, tail_bound: term })
}

/// `E_q^x = sum q^{n(n-1)/2} x^n / [n]_q!`, entire in `x`.
///
/// Nonnegative arguments sum the series directly. Negative arguments use
/// `prod_j (1 - (1-q) q^j |x|)`, the same function without the alternating
/// cancellation of the series.
pub fn q_exp_big(x: f64, q: QValue, tol: f64) -> Result<QExp> {
    check_tol(tol)?;
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("argument must be finite, got {x}")));
    }
    if x == 0.0 {
        return Ok(QExp { value: 1.0, terms: 1 });
    }
    if x < 0.0 {
        return signed_euler_product(q.gap() * -x, q, tol);
    }

    let qv = q.get();
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut qint = 0.0;
    let mut qpow = 1.0; // q^(n-1)
    for n in 1..MAX_TERMS {
        qint = 1.0 + qv * qint;
        term *= qpow * x / qint;
        qpow *= qv;
        sum += term;
        if !sum.is_finite() {
            return Err(Error::Overflow(format!("E_q^{x} exceeds f64 range")));
        }
        // Later ratios q^m x / [m+1]_q shrink monotonically.
        let rho = qpow * x / (1.0 + qv * qint);
        if rho < 1.0 && term / (1.0 - rho) < tol * sum {
            return Ok(QExp { value: sum, terms: n + 1 });
        }
    }
    Err(Error::Truncation { terms: MAX_TERMS, tail_bound: term })
}

/// `prod_{j>=0} (1 + c q^j)` for `c > 0`.
fn euler_product(c: f64, q: QValue, tol: f64) -> Result<QExp> {
    let qv = q.get();
    let mut prod = 1.0;
    let mut u = c;
    for j in 0..MAX_TERMS {
        // log of the remaining factors is below u / (1 - q)
        if u / q.gap() < tol {
            return Ok(QExp { value: prod, terms: j });
        }
        prod *= 1.0 + u;
        u *= qv;
    }
    Err(Error::Truncation { terms: MAX_TERMS, tail_bound: u / q.gap() })
}

/// `prod_{j>=0} (1 - c q^j)` for `c > 0`; factors may be negative while `c q^j > 1`.
fn signed_euler_product(c: f64, q: QValue, tol: f64) -> Result<QExp> {
    let qv = q.get();
    let mut prod = 1.0;
    let mut u = c;
    for j in 0..MAX_TERMS {
        // |log(1 - u)| <= 2u for u <= 1/2
        if u <= 0.5 && 2.0 * u / q.gap() < tol {
            return Ok(QExp { value: prod, terms: j });
        }
        prod *= 1.0 - u;
        if prod == 0.0 {
            return Ok(QExp { value: 0.0, terms: j + 1 });
        }
        u *= qv;
    }
    Err(Error::Truncation { terms: MAX_TERMS, tail_bound: 2.0 * u / q.gap() })
}

/// q-difference quotient `(f(x) - f(qx)) / ((1 - q) x)`.
///
/// At `x = 0` the ordinary derivative is used, estimated by a symmetric
/// difference with step [`ZERO_STEP`].
pub fn q_derivative_numeric<F: Fn(f64) -> f64>(f: F, x: f64, q: QValue) -> f64 {
    if x == 0.0 {
        return (f(ZERO_STEP) - f(-ZERO_STEP)) / (2.0 * ZERO_STEP);
    }
    (f(x) - f(q.get() * x)) / (q.gap() * x)
}
