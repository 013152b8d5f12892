//! The generating polynomial `A(u)` and the q-Appell weights it induces.
//!
//! The operator kernel is `E_q^{-y} P_k(q; y) / (A(1) [k]_q!)`. Raw `P_k` and
//! `[k]_q!` overflow long before the kernel does, so [`appell_weights`]
//! never forms them: it runs the recurrence `u_m = u_{m-1} y / [m]_q` on
//! `u_m = E_q^{-y} y^m / [m]_q!` and convolves with the coefficients.

use crate::error::{Error, Result};
use crate::qcore::{q_exp_big, q_exp_small, q_integer, QValue, MAX_TERMS};

/// Tolerance used internally for the exponential prefactors.
const EXP_TOL: f64 = 1e-17;

/// A plain finite polynomial `sum c_k u^k`. The empty polynomial is zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Horner evaluation.
    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    /// `D_q` applied termwise: `b_k = c_{k+1} [k+1]_q`.
    pub fn q_derivative(&self, q: QValue) -> Polynomial {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * q_integer(k as u32, q)).collect();
        Polynomial { coeffs }
    }
}

/// The generator `A(u) = sum a_k u^k` with `A(1) != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    poly: Polynomial,
    at_one: f64,
    positive: bool,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("A(u) needs at least one coefficient".into()));
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!("A(u) coefficient {c} is not finite")));
        }
        let at_one: f64 = coeffs.iter().sum();
        if at_one == 0.0 {
            return Err(Error::InvalidParameter("A(1) = 0; the operator is undefined".into()));
        }
        let positive = at_one > 0.0 && coeffs.iter().all(|&c| c >= 0.0);
        Ok(PowerSeries { poly: Polynomial::new(coeffs), at_one, positive })
    }

    pub fn coeffs(&self) -> &[f64] {
        self.poly.coeffs()
    }

    pub fn degree(&self) -> usize {
        self.poly.coeffs().len() - 1
    }

    pub fn at_one(&self) -> f64 {
        self.at_one
    }

    /// All coefficients nonnegative and `A(1) > 0`; the operator is positive.
    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.poly.eval(u)
    }

    pub fn as_polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn q_derivative(&self, q: QValue) -> Polynomial {
        self.poly.q_derivative(q)
    }
}

/// Every scalar of `A` that enters the moment formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesScalars {
    /// `A(1)`
    pub at_one: f64,
    /// `A(q)`
    pub at_q: f64,
    /// `D_q A(1)`
    pub d1_at_one: f64,
    /// `(D_q A)(q)`
    pub d1_at_q: f64,
    /// `D_q^2 A(1)`
    pub d2_at_one: f64,
}

impl SeriesScalars {
    pub fn new(a: &PowerSeries, q: QValue) -> Self {
        let d1 = a.q_derivative(q);
        let d2 = d1.q_derivative(q);
        SeriesScalars {
            at_one: a.at_one(),
            at_q: a.eval(q.get()),
            d1_at_one: d1.eval(1.0),
            d1_at_q: d1.eval(q.get()),
            d2_at_one: d2.eval(1.0),
        }
    }
}

/// `P_k(q; y)`, the k-th q-Appell polynomial of `A` at `y`:
/// `[k]_q! sum_{j <= min(k, deg)} a_j y^{k-j} / [k-j]_q!`.
pub fn appell_coefficient(a: &PowerSeries, q: QValue, y: f64, k: u32) -> Result<f64> {
    let mut total = 0.0;
    for (j, &aj) in a.coeffs().iter().enumerate().take(k as usize + 1) {
        let j = j as u32;
        // [k]_q! / [k-j]_q! = [k-j+1]_q ... [k]_q
        let falling: f64 = (k - j + 1..=k).map(|i| q_integer(i, q)).product();
        total += aj * falling * y.powi((k - j) as i32);
    }
    let scale = (1..=k).map(|i| q_integer(i, q)).product::<f64>() * y.abs().powi(k as i32);
    if total.is_finite() && scale.is_finite() {
        Ok(total)
    } else {
        Err(Error::Overflow(format!("P_{k}(q; {y}) exceeds f64 range; use appell_weights instead")))
    }
}

/// Normalized operator kernel at one `y = [n]_q t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AppellWeights {
    pub y: f64,
    pub weights: Vec<f64>,
    /// Certified upper bound on the mass of the discarded tail.
    pub tail_mass_bound: f64,
    /// Index of the last retained weight.
    pub truncation_index: usize,
}

impl AppellWeights {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `sum_k w_k g(k)`.
    pub fn expect<G: Fn(usize) -> f64>(&self, g: G) -> f64 {
        self.weights.iter().enumerate().map(|(k, &w)| w * g(k)).sum()
    }
}

/// Operator weights `w_k = E_q^{-y} P_k(q; y) / (A(1) [k]_q!)`.
///
/// Terms are added until the certified tail bound drops below `tol`. The
/// bound convolves the coefficients with the ratio-bounded tail of the
/// `e_q` series: after index `m` that tail is at most
/// `u_{m+1} / (1 - y / [m+2]_q)`.
pub fn appell_weights(a: &PowerSeries, q: QValue, y: f64, tol: f64) -> Result<AppellWeights> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if !(y.is_finite() && y >= 0.0) {
        return Err(Error::InvalidParameter(format!("y = [n]_q t must be >= 0, got {y}")));
    }
    if y * q.gap() >= 1.0 {
        return Err(Error::Domain(format!("e_q^y diverges: y(1-q) = {} >= 1 (y = {y}, q = {q})", y * q.gap())));
    }
    if !a.is_positive() {
        return Err(Error::Positivity(format!("A = {:?} must have nonnegative coefficients and A(1) > 0", a.coeffs())));
    }

    let prefactor = q_exp_big(-y, q, EXP_TOL)?.value;
    let coeffs = a.coeffs();
    let deg = a.degree();
    let inv_a1 = 1.0 / a.at_one();
    let qv = q.get();

    // u[m] = E_q^{-y} y^m / [m]_q!, and qint[m] = [m]_q
    let mut u = vec![prefactor];
    let mut qint = vec![0.0];
    let push_next = |u: &mut Vec<f64>, qint: &mut Vec<f64>| {
        let m = u.len();
        let next_q = 1.0 + qv * qint[m - 1];
        qint.push(next_q);
        u.push(u[m - 1] * y / next_q);
    };

    let mut weights = Vec::new();
    for k in 0..MAX_TERMS {
        while u.len() < k + 2 {
            push_next(&mut u, &mut qint);
        }
        let w: f64 = coeffs.iter().enumerate().take(k + 1).map(|(j, &aj)| aj * u[k - j]).sum::<f64>() * inv_a1;
        weights.push(w);
        if k < deg {
            continue;
        }
        // ratio bound for every term after u[k - deg + 1]
        let rho = y / (1.0 + qv * qint[k - deg + 1]);
        if rho >= 1.0 {
            continue;
        }
        let tail: f64 = coeffs.iter().enumerate().map(|(j, &aj)| aj * u[k + 1 - j]).sum::<f64>() * inv_a1 / (1.0 - rho);
        if !tail.is_finite() {
            return Err(Error::Overflow(format!("Appell weights at y = {y} left f64 range")));
        }
        if tail < tol {
            return Ok(AppellWeights { y, truncation_index: weights.len() - 1, weights, tail_mass_bound: tail });
        }
    }
    Err(Error::Truncation { terms: MAX_TERMS, tail_bound: f64::NAN })
}

/// Closed forms for the normalized sums `sum_k w_k [k]_q^p`, `p = 1, 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSums {
    /// `E_q^{-y} (A(1) y e_q^y + e_q^{qy} D_qA(1)) / A(1)`
    pub first: f64,
    /// The closed-form second-order identity, normalized the same way.
    pub second_closed_form: f64,
    /// Second-order sum from `D_q(u D_q[A(u) e_q^{yu}])` at `u = 1`.
    pub second_derived: f64,
}

pub fn kernel_sums(a: &PowerSeries, q: QValue, y: f64) -> Result<KernelSums> {
    let s = SeriesScalars::new(a, q);
    let qv = q.get();
    let e_neg = q_exp_big(-y, q, EXP_TOL)?.value;
    let e_y = q_exp_small(y, q, EXP_TOL)?.value;
    let e_qy = q_exp_small(qv * y, q, EXP_TOL)?.value;
    let e_qqy = q_exp_small(qv * qv * y, q, EXP_TOL)?.value;
    let norm = e_neg / s.at_one;

    let first = norm * (s.at_one * y * e_y + e_qy * s.d1_at_one);
    let second_closed_form =
        norm * (s.d2_at_one * e_y + s.d1_at_one * y * e_y + y * s.d1_at_q * e_qy + s.at_one * y * y * e_y);
    let second_derived = norm
        * (y * (s.at_one * y * e_y + e_qy * (s.d1_at_one + s.at_q))
            + s.d1_at_one * qv * y * e_qy
            + e_qqy * (s.d2_at_one + s.d1_at_q));
    Ok(KernelSums { first, second_closed_form, second_derived })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::q_factorial;

    fn q(v: f64) -> QValue {
        QValue::new(v).unwrap()
    }

    fn ps(c: &[f64]) -> PowerSeries {
        PowerSeries::new(c.to_vec()).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(ps(&[1.0]).eval(1.0), 1.0);
        assert_eq!(ps(&[1.0, 1.0]).eval(1.0), 2.0);
        assert_eq!(ps(&[1.0, 1.0]).eval(0.5), 1.5);
        assert_eq!(ps(&[2.0, 1.0, 0.5]).eval(2.0), 6.0);
    }

    #[test]
    fn rejects_zero_sum_and_flags_positivity() {
        assert!(PowerSeries::new(vec![1.0, -1.0]).is_err());
        assert!(PowerSeries::new(vec![]).is_err());
        assert!(PowerSeries::new(vec![f64::NAN]).is_err());
        assert!(ps(&[1.0, 0.0, 2.0]).is_positive());
        assert!(!ps(&[2.0, -0.5]).is_positive());
        assert!(!ps(&[-1.0]).is_positive());
    }

    #[test]
    fn q_derivative_examples() {
        let qq = q(0.5);
        assert!(ps(&[3.0]).q_derivative(qq).is_zero());
        assert_eq!(ps(&[3.0]).q_derivative(qq).eval(1.0), 0.0);
        let d = ps(&[1.0, 1.0]).q_derivative(qq);
        assert_eq!(d.coeffs(), &[1.0]);
        assert_eq!(d.eval(1.0), 1.0);
        assert_eq!(ps(&[0.0, 0.0, 1.0]).q_derivative(qq).eval(1.0), 1.5);
    }

    #[test]
    fn q_derivative_matches_difference_quotient() {
        let qq = q(0.7);
        let a = ps(&[2.0, 1.0, 0.5, 0.25]);
        for &x in &[0.3, 1.0, 1.7] {
            let numeric = crate::qcore::q_derivative_numeric(|u| a.eval(u), x, qq);
            let series = a.q_derivative(qq).eval(x);
            assert!((numeric - series).abs() < 1e-12);
        }
    }

    #[test]
    fn appell_coefficient_examples() {
        let qq = q(0.5);
        for k in 0..6 {
            let p = appell_coefficient(&ps(&[1.0]), qq, 0.8, k).unwrap();
            assert!((p - 0.8f64.powi(k as i32)).abs() < 1e-14);
        }
        assert_eq!(appell_coefficient(&ps(&[3.0, 1.0]), qq, 0.8, 0).unwrap(), 3.0);
        assert!((appell_coefficient(&ps(&[1.0, 1.0]), qq, 1.0, 1).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn appell_coefficient_overflow() {
        assert!(matches!(appell_coefficient(&ps(&[1.0]), q(0.99), 50.0, 400), Err(Error::Overflow(_))));
    }

    #[test]
    fn weights_reduce_to_q_szasz() {
        let qq = q(0.5);
        let y = 0.75;
        let w = appell_weights(&ps(&[1.0]), qq, y, 1e-12).unwrap();
        let e = q_exp_big(-y, qq, 1e-16).unwrap().value;
        for (k, &wk) in w.weights.iter().enumerate() {
            let direct = e * y.powi(k as i32) / q_factorial(k as u32, qq).unwrap();
            assert!((wk - direct).abs() < 1e-12, "k={k}");
        }
        assert!((w.total() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn weights_match_raw_appell_form() {
        let qq = q(0.6);
        let a = ps(&[2.0, 1.0, 0.5]);
        let y = 1.1;
        let w = appell_weights(&a, qq, y, 1e-13).unwrap();
        let e = q_exp_big(-y, qq, 1e-16).unwrap().value;
        for k in 0..20u32 {
            let raw = e * appell_coefficient(&a, qq, y, k).unwrap() / (a.at_one() * q_factorial(k, qq).unwrap());
            assert!((w.weights[k as usize] - raw).abs() < 1e-13);
        }
    }

    #[test]
    fn weights_partition_unity_and_bound() {
        let a = ps(&[1.0, 1.0]);
        let w = appell_weights(&a, q(0.5), 0.75, 1e-12).unwrap();
        let s = w.total();
        assert!((1.0 - 1e-10..=1.0 + 1e-12).contains(&s));
        assert!(w.tail_mass_bound < 1e-12);
        assert!((s + w.tail_mass_bound - 1.0).abs() < 1e-10);
        assert_eq!(w.truncation_index + 1, w.len());
        assert!(w.weights.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn weights_at_zero_are_coefficients() {
        let a = ps(&[2.0, 1.0, 1.0]);
        let w = appell_weights(&a, q(0.5), 0.0, 1e-12).unwrap();
        assert_eq!(w.weights, vec![0.5, 0.25, 0.25]);
        assert_eq!(w.tail_mass_bound, 0.0);
    }

    #[test]
    fn weights_errors() {
        assert!(matches!(appell_weights(&ps(&[1.0]), q(0.5), 2.1, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(appell_weights(&ps(&[2.0, -1.0]), q(0.5), 0.5, 1e-12), Err(Error::Positivity(_))));
        assert!(appell_weights(&ps(&[1.0]), q(0.5), -0.1, 1e-12).is_err());
    }

    #[test]
    fn first_order_identity() {
        for &(qv, y) in &[(0.3, 0.4), (0.6, 1.2), (0.9, 5.0), (0.99, 9.0)] {
            let qq = q(qv);
            for c in [&[1.0][..], &[1.0, 1.0], &[2.0, 1.0, 0.5]] {
                let a = ps(c);
                let w = appell_weights(&a, qq, y, 1e-14).unwrap();
                let direct = w.expect(|k| q_integer(k as u32, qq));
                let closed = kernel_sums(&a, qq, y).unwrap().first;
                assert!((direct - closed).abs() < 1e-8, "q={qv} y={y} A={c:?}");
            }
        }
    }

    #[test]
    fn derived_second_order_matches_summation() {
        for &(qv, y) in &[(0.3, 0.4), (0.6, 1.2), (0.9, 5.0), (0.99, 9.0)] {
            let qq = q(qv);
            for c in [&[1.0][..], &[1.0, 1.0], &[2.0, 1.0, 0.5], &[0.0, 0.0, 0.0, 1.0]] {
                let a = ps(c);
                let w = appell_weights(&a, qq, y, 1e-15).unwrap();
                let direct = w.expect(|k| q_integer(k as u32, qq).powi(2));
                let sums = kernel_sums(&a, qq, y).unwrap();
                assert!(
                    (direct - sums.second_derived).abs() < 1e-8 * direct.max(1.0),
                    "q={qv} y={y} A={c:?}: {direct} vs {}",
                    sums.second_derived
                );
            }
        }
    }

    #[test]
    fn closed_form_second_order_differs_for_a_one() {
        // With A = 1 the closed-form identity gives y^2 while the true sum is y^2 + yR.
        let qq = q(0.5);
        let y = 0.8;
        let sums = kernel_sums(&ps(&[1.0]), qq, y).unwrap();
        assert!((sums.second_closed_form - y * y).abs() < 1e-12);
        assert!(sums.second_derived - sums.second_closed_form > 0.1);
    }
}
