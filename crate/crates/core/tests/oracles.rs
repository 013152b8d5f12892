//! Exact rational references for the q-calculus primitives.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use qszasz::qcore::{q_binomial, q_exp_big, q_exp_small, q_factorial, q_integer, QValue};

fn rat(p: i64, r: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(r))
}

fn q_int_exact(k: u32, q: &BigRational) -> BigRational {
    let mut s = BigRational::zero();
    let mut p = BigRational::one();
    for _ in 0..k {
        s += &p;
        p *= q;
    }
    s
}

/// `E_q^x = sum q^{k(k-1)/2} x^k / [k]_q!` summed exactly until the term is
/// below `1e-30` in magnitude.
fn big_exp_exact(x: &BigRational, q: &BigRational) -> f64 {
    let cutoff = rat(1, 1_000_000_000_000_000) * rat(1, 1_000_000_000_000_000);
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    let mut qpow = BigRational::one(); // q^k
    for k in 1u32.. {
        sum += &term;
        term = term * x * &qpow / q_int_exact(k, q);
        qpow *= q;
        if term.abs() < cutoff && k > 5 {
            break;
        }
        assert!(k < 2000, "reference series did not converge");
    }
    sum.to_f64().unwrap()
}

#[test]
fn alternating_series_matches_product_route() {
    // E_q^{-y} is computed through its product form; the alternating series
    // summed in exact arithmetic has no cancellation error.
    for (p, r) in [(3i64, 10i64), (3, 5), (9, 10)] {
        let qr = rat(p, r);
        let q = QValue::new(p as f64 / r as f64).unwrap();
        let ymax = 0.9 * r as f64 / (r - p) as f64;
        for i in 1..=8 {
            let y_num = (ymax * i as f64 / 8.0 * 64.0).round() as i64;
            let y = y_num as f64 / 64.0;
            let exact = big_exp_exact(&rat(-y_num, 64), &qr);
            let got = q_exp_big(-y, q, 1e-16).unwrap().value;
            assert!(
                (got - exact).abs() <= 1e-13 * exact.abs().max(1e-300) + 1e-300,
                "q={q} y={y}: {got:e} vs {exact:e}"
            );
        }
    }
}

#[test]
fn positive_series_matches_exact_sum() {
    for (p, r) in [(1i64, 2i64), (4, 5)] {
        let qr = rat(p, r);
        let q = QValue::new(p as f64 / r as f64).unwrap();
        for x_num in [1i64, 5, 13] {
            let exact = big_exp_exact(&rat(x_num, 4), &qr);
            let got = q_exp_big(x_num as f64 / 4.0, q, 1e-16).unwrap().value;
            assert!((got - exact).abs() <= 1e-14 * exact, "{got} vs {exact}");
        }
    }
}

#[test]
fn small_exp_reciprocal_of_exact_big() {
    // e_q^x E_q^{-x} = 1 with E_q^{-x} taken from the exact reference
    for (p, r) in [(1i64, 2i64), (9, 10)] {
        let qr = rat(p, r);
        let q = QValue::new(p as f64 / r as f64).unwrap();
        for x_num in [1i64, 10, 40] {
            let x = x_num as f64 / 8.0;
            if x * (1.0 - q.get()) >= 1.0 {
                continue;
            }
            let e = q_exp_small(x, q, 1e-16).unwrap().value;
            let big = big_exp_exact(&rat(-x_num, 8), &qr);
            assert!((e * big - 1.0).abs() < 1e-13, "q={q} x={x}: {}", e * big);
        }
    }
}

#[test]
fn integers_factorials_binomials_exact() {
    for (p, r) in [(1i64, 3i64), (7, 8), (99, 100)] {
        let qr = rat(p, r);
        let q = QValue::new(p as f64 / r as f64).unwrap();
        let mut fact = BigRational::one();
        for n in 0..=25u32 {
            if n > 0 {
                fact *= q_int_exact(n, &qr);
            }
            let qi = q_int_exact(n, &qr).to_f64().unwrap();
            assert!((q_integer(n, q) - qi).abs() <= 1e-14 * qi.max(1.0));
            let qf = fact.to_f64().unwrap();
            assert!((q_factorial(n, q).unwrap() - qf).abs() <= 1e-13 * qf);
        }
        let mut fk = vec![BigRational::one()];
        for k in 1..=16u32 {
            let next = fk.last().unwrap() * q_int_exact(k, &qr);
            fk.push(next);
        }
        for n in 0..=16u32 {
            for k in 0..=n {
                let exact = (&fk[n as usize] / (&fk[k as usize] * &fk[(n - k) as usize])).to_f64().unwrap();
                let got = q_binomial(n, k, q).unwrap();
                assert!((got - exact).abs() <= 1e-13 * exact, "[{n} {k}] at q={q}");
            }
        }
    }
}
