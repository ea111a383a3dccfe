use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use super::{RandomElem, Semiring, Tolerance};

/// Ordinary real arithmetic on `f64`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Real;

impl Semiring for Real {
    type Elem = f64;

    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }
    fn eq_within(&self, a: &f64, b: &f64, tol: Tolerance) -> bool {
        tol.close(*a, *b)
    }
    fn is_cancellative(&self) -> bool {
        true
    }
    fn name(&self) -> String {
        "real".into()
    }
    fn repeat_u64(&self, n: u64, a: &f64) -> f64 {
        n as f64 * a
    }
    fn pow(&self, a: &f64, k: u32) -> f64 {
        a.powi(k as i32)
    }
}

impl RandomElem for Real {
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.gen_range(-2.0..2.0)
    }
}

/// Exact rational arithmetic. Used where floating round-off would blur an
/// identity that holds exactly.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Rational;

impl Rational {
    pub fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    pub fn frac(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }
}

impl Semiring for Rational {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn eq_within(&self, a: &BigRational, b: &BigRational, _tol: Tolerance) -> bool {
        a == b
    }
    fn is_cancellative(&self) -> bool {
        true
    }
    fn name(&self) -> String {
        "rational".into()
    }
    fn repeat_u64(&self, n: u64, a: &BigRational) -> BigRational {
        a * BigRational::from_integer(BigInt::from(n))
    }
    fn repeat(&self, n: &BigUint, a: &BigRational) -> BigRational {
        a * BigRational::from_integer(BigInt::from(n.clone()))
    }
}

impl RandomElem for Rational {
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        Rational::frac(rng.gen_range(-9..=9), rng.gen_range(1..=9))
    }
}

/// Log-domain reals: values are natural logarithms, `+` is log-sum-exp and
/// `·` is addition. `ln 0 = -inf` is the zero.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct LogReal;

pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

impl Semiring for LogReal {
    type Elem = f64;

    fn zero(&self) -> f64 {
        f64::NEG_INFINITY
    }
    fn one(&self) -> f64 {
        0.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        log_add_exp(*a, *b)
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == f64::NEG_INFINITY
    }
    /// Compares log values with the absolute part of the tolerance, which
    /// bounds the relative error of the represented reals.
    fn eq_within(&self, a: &f64, b: &f64, tol: Tolerance) -> bool {
        a == b || (a.is_finite() && b.is_finite() && (a - b).abs() <= tol.abs.max(tol.rel))
    }
    fn is_cancellative(&self) -> bool {
        true
    }
    fn name(&self) -> String {
        "logreal".into()
    }
    fn repeat_u64(&self, n: u64, a: &f64) -> f64 {
        if n == 0 {
            f64::NEG_INFINITY
        } else {
            a + (n as f64).ln()
        }
    }
    fn pow(&self, a: &f64, k: u32) -> f64 {
        if k == 0 {
            0.0
        } else {
            a * k as f64
        }
    }
}

impl RandomElem for LogReal {
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.gen_ratio(1, 20) {
            f64::NEG_INFINITY
        } else {
            rng.gen_range(-3.0..3.0)
        }
    }
}

/// Tropical `(max, +)` semiring. Idempotent, hence not cancellative.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct MaxPlus;

impl Semiring for MaxPlus {
    type Elem = f64;

    fn zero(&self) -> f64 {
        f64::NEG_INFINITY
    }
    fn one(&self) -> f64 {
        0.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a.max(*b)
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == f64::NEG_INFINITY
    }
    fn eq_within(&self, a: &f64, b: &f64, tol: Tolerance) -> bool {
        tol.close(*a, *b)
    }
    fn is_cancellative(&self) -> bool {
        false
    }
    fn name(&self) -> String {
        "maxplus".into()
    }
    fn repeat_u64(&self, n: u64, a: &f64) -> f64 {
        if n == 0 {
            f64::NEG_INFINITY
        } else {
            *a
        }
    }
}

impl RandomElem for MaxPlus {
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.gen_ratio(1, 10) {
            f64::NEG_INFINITY
        } else {
            rng.gen_range(-50..50) as f64
        }
    }
}

/// Pairs `(a, b)` with `(a,b)·(c,d) = (ac - bd, ad + bc)`, i.e. complex
/// numbers.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Complex2;

impl Semiring for Complex2 {
    type Elem = (f64, f64);

    fn zero(&self) -> (f64, f64) {
        (0.0, 0.0)
    }
    fn one(&self) -> (f64, f64) {
        (1.0, 0.0)
    }
    fn add(&self, a: &(f64, f64), b: &(f64, f64)) -> (f64, f64) {
        (a.0 + b.0, a.1 + b.1)
    }
    fn mul(&self, a: &(f64, f64), b: &(f64, f64)) -> (f64, f64) {
        (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
    }
    fn is_zero(&self, a: &(f64, f64)) -> bool {
        a.0 == 0.0 && a.1 == 0.0
    }
    /// The tolerance is applied to the modulus of the difference.
    fn eq_within(&self, a: &(f64, f64), b: &(f64, f64), tol: Tolerance) -> bool {
        if a == b {
            return true;
        }
        let d = (a.0 - b.0).hypot(a.1 - b.1);
        let m = a.0.hypot(a.1).max(b.0.hypot(b.1));
        d.is_finite() && d <= tol.abs.max(tol.rel * m)
    }
    fn is_cancellative(&self) -> bool {
        true
    }
    fn name(&self) -> String {
        "complex2".into()
    }
    fn repeat_u64(&self, n: u64, a: &(f64, f64)) -> (f64, f64) {
        (n as f64 * a.0, n as f64 * a.1)
    }
}

impl RandomElem for Complex2 {
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
    }
}
