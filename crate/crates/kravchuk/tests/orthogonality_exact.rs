//! Orthogonality structure of the polynomial family, checked two ways.
//!
//! The signed-weight relation sum_j C(N,j)(p-1)^j k_n(j) k_m(j)
//! = p^N (p-1)^n C(N,n) delta_nm is an identity of the generating-function
//! normalization k_n(j) = [x^n] (1 + (p-1)x)^{N-j} (1-x)^j. Verifying it in
//! floating point at N = 40 is hopeless — the summands dwarf the result by
//! ~16 orders of magnitude — so the first test proves it EXACTLY in rational
//! arithmetic, building the polynomials by convolution with no shared code
//! with the library.
//!
//! The hypergeometric convention the library ships satisfies the
//! probabilistic-weight relation sum_j C(N,j) p^j (1-p)^{N-j} k_n(j) k_m(j)
//! = C(N,n) (p(1-p))^n delta_nm, which is well-conditioned and is checked in
//! floating point against the library's scalar evaluator.
//!
//! A big-integer binomial oracle pins the log-domain prefactor machinery.

use kravchuk::kravchuk::kravchuk_polynomial;
use kravchuk::specfun::log_binomial;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};

fn big_binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn poly_pow(base: &[BigRational], e: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::one()];
    for _ in 0..e {
        out = poly_mul(&out, base);
    }
    out
}

/// Coefficient table gf[j][n] of the generating-function family at
/// rational p: the x^n coefficient of (1 + (p-1)x)^{N-j} (1-x)^j.
fn gf_family(order: usize, p: &BigRational) -> Vec<Vec<BigRational>> {
    let p_minus_one = p - BigRational::one();
    let rising = [BigRational::one(), p_minus_one.clone()];
    let falling = [BigRational::one(), -BigRational::one()];
    (0..=order)
        .map(|j| {
            let mut coeffs = poly_mul(&poly_pow(&rising, order - j), &poly_pow(&falling, j));
            coeffs.resize(order + 1, BigRational::zero());
            coeffs
        })
        .collect()
}

#[test]
fn signed_weight_orthogonality_is_exact_for_the_gf_family() {
    for order in [5usize, 12, 40] {
        for (num, den) in [(3, 10), (1, 2), (7, 10)] {
            let p = BigRational::new(BigInt::from(num), BigInt::from(den));
            let p_minus_one = &p - BigRational::one();
            let family = gf_family(order, &p);
            // weight per j: C(N,j)(p-1)^j
            let weights: Vec<BigRational> = (0..=order)
                .map(|j| {
                    BigRational::from(big_binomial(order, j))
                        * num::pow::pow(p_minus_one.clone(), j)
                })
                .collect();
            let p_to_order = num::pow::pow(p.clone(), order);
            for n in 0..=order {
                for m in n..=order {
                    let mut acc = BigRational::zero();
                    for j in 0..=order {
                        acc += &weights[j] * &family[j][n] * &family[j][m];
                    }
                    let expected = if n == m {
                        &p_to_order
                            * num::pow::pow(p_minus_one.clone(), n)
                            * BigRational::from(big_binomial(order, n))
                    } else {
                        BigRational::zero()
                    };
                    assert_eq!(acc, expected, "N={order} p={num}/{den} n={n} m={m}");
                }
            }
        }
    }
}

#[test]
fn probabilistic_weight_orthogonality_of_the_shipped_convention() {
    for order in [3usize, 8, 13, 18, 23, 28, 33, 38, 40] {
        for &p in &[0.3, 0.5, 0.7] {
            let q = 1.0 - p;
            // one scalar evaluation per (n, x); each goes through the exact
            // rational hypergeometric path internally
            let table: Vec<Vec<f64>> = (0..=order)
                .map(|n| {
                    (0..=order)
                        .map(|x| kravchuk_polynomial(n, x, order, p).unwrap())
                        .collect()
                })
                .collect();
            let weights: Vec<f64> = (0..=order)
                .map(|j| {
                    (log_binomial(order as u64, j as i64).log_magnitude()
                        + j as f64 * p.ln()
                        + (order - j) as f64 * q.ln())
                    .exp()
                })
                .collect();
            for n in 0..=order {
                let norm_n = (log_binomial(order as u64, n as i64).log_magnitude()
                    + n as f64 * (p * q).ln())
                .exp();
                for m in n..=order {
                    let acc: f64 = (0..=order)
                        .map(|j| weights[j] * table[n][j] * table[m][j])
                        .sum();
                    let norm_m = (log_binomial(order as u64, m as i64).log_magnitude()
                        + m as f64 * (p * q).ln())
                    .exp();
                    let scale = (norm_n * norm_m).sqrt();
                    let expected = if n == m { norm_n } else { 0.0 };
                    assert!(
                        (acc - expected).abs() / scale < 1e-10,
                        "N={order} p={p} n={n} m={m}: {acc} vs {expected} (scale {scale})"
                    );
                }
            }
        }
    }
}

#[test]
fn log_binomial_matches_big_integer_binomials() {
    for n in 0..=64usize {
        for k in 0..=n {
            let exact_log = {
                let b = big_binomial(n, k);
                // C(64,32) ~ 1.8e18 still converts to f64 exactly enough
                let digits = b.to_string();
                let mantissa: f64 = digits[..digits.len().min(17)].parse().unwrap();
                let shift = digits.len().saturating_sub(17) as f64;
                mantissa.ln() + shift * std::f64::consts::LN_10
            };
            let log = log_binomial(n as u64, k as i64);
            assert_eq!(log.sign(), 1);
            let rel = if exact_log == 0.0 {
                log.log_magnitude().abs()
            } else {
                ((log.log_magnitude() - exact_log) / exact_log.max(1.0)).abs()
            };
            assert!(rel < 1e-12, "C({n},{k}): log {} vs {exact_log}", log.log_magnitude());
        }
    }
}
