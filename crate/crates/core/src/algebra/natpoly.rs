use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use super::{AlgebraError, RandomElem, Semiring, Tolerance};

/// A polynomial in `n_vars` indeterminates with non-negative integer
/// coefficients, stored sparsely with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NatPoly {
    n_vars: usize,
    terms: BTreeMap<Vec<u32>, BigUint>,
}

impl NatPoly {
    pub fn zero(n_vars: usize) -> Self {
        Self {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n_vars: usize) -> Self {
        Self::constant(n_vars, BigUint::one())
    }

    pub fn constant(n_vars: usize, c: BigUint) -> Self {
        let mut p = Self::zero(n_vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; n_vars], c);
        }
        p
    }

    /// The indeterminate `x_i`.
    pub fn var(n_vars: usize, i: usize) -> Self {
        assert!(
            i < n_vars,
            "indeterminate x{i} out of range for {n_vars} variables"
        );
        let mut e = vec![0; n_vars];
        e[i] = 1;
        let mut p = Self::zero(n_vars);
        p.terms.insert(e, BigUint::one());
        p
    }

    /// Sums duplicate exponent vectors and drops zero coefficients.
    pub fn from_terms(
        n_vars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, BigUint)>,
    ) -> Result<Self, AlgebraError> {
        let mut p = Self::zero(n_vars);
        for (e, c) in terms {
            if e.len() != n_vars {
                return Err(AlgebraError::ArityMismatch {
                    left: n_vars,
                    right: e.len(),
                });
            }
            if !c.is_zero() {
                *p.terms.entry(e).or_default() += c;
            }
        }
        Ok(p)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending exponent-lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&[u32], &BigUint)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coefficient(&self, exponents: &[u32]) -> BigUint {
        self.terms.get(exponents).cloned().unwrap_or_default()
    }

    /// Sum of all coefficients, i.e. the value at `x = (1, …, 1)`.
    pub fn coefficient_sum(&self) -> BigUint {
        self.terms.values().sum()
    }

    pub fn constant_term(&self) -> BigUint {
        self.coefficient(&vec![0; self.n_vars])
    }

    fn check_arity(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.n_vars == other.n_vars {
            Ok(())
        } else {
            Err(AlgebraError::ArityMismatch {
                left: self.n_vars,
                right: other.n_vars,
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            *out.terms.entry(e.clone()).or_default() += c;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_arity(other)?;
        let mut out = Self::zero(self.n_vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1
                    .iter()
                    .zip(e2)
                    .map(|(a, b)| a.checked_add(*b))
                    .collect::<Option<Vec<u32>>>()
                    .ok_or(AlgebraError::ExponentOverflow)?;
                *out.terms.entry(e).or_default() += c1 * c2;
            }
        }
        Ok(out)
    }

    /// `∂/∂x_k`.
    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (e, c) in &self.terms {
            if e[k] > 0 {
                let mut d = e.clone();
                d[k] -= 1;
                *out.terms.entry(d).or_default() += c * BigUint::from(e[k]);
            }
        }
        out
    }

    /// Evaluates `Σ c_i · v₁^{i₁} ⋯ vₙ^{iₙ}` in `s`, with the coefficient
    /// acting by repetition.
    pub fn eval<S: Semiring>(&self, s: &S, values: &[S::Elem]) -> Result<S::Elem, AlgebraError> {
        if values.len() != self.n_vars {
            return Err(AlgebraError::ArityMismatch {
                left: self.n_vars,
                right: values.len(),
            });
        }
        let mut acc = s.zero();
        for (e, c) in &self.terms {
            let mut term = s.one();
            for (k, &i) in e.iter().enumerate() {
                if i > 0 {
                    term = s.mul(&term, &s.pow(&values[k], i));
                }
            }
            let term = if c.is_one() { term } else { s.repeat(c, &term) };
            acc = s.add(&acc, &term);
        }
        Ok(acc)
    }
}

/// Canonical text: terms in descending exponent-lexicographic order joined
/// by ` + `, factors `x{k}` or `x{k}^{e}` joined by `*`, coefficient 1
/// elided except on the constant term.
impl fmt::Display for NatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (e, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !c.is_one() {
                factors.push(c.to_string());
            }
            for (k, &i) in e.iter().enumerate() {
                match i {
                    0 => {}
                    1 => factors.push(format!("x{k}")),
                    _ => factors.push(format!("x{k}^{i}")),
                }
            }
            if factors.is_empty() {
                factors.push("1".into());
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

/// `ℕ₀[x₀, …, x_{n-1}]` as a semiring. Operations panic on exponent
/// overflow or mixed arity; use the checked methods on [`NatPoly`] to
/// handle those cases as errors.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct NatPolySemiring {
    pub n_vars: usize,
}

impl NatPolySemiring {
    pub fn new(n_vars: usize) -> Self {
        Self { n_vars }
    }
}

impl Semiring for NatPolySemiring {
    type Elem = NatPoly;

    fn zero(&self) -> NatPoly {
        NatPoly::zero(self.n_vars)
    }
    fn one(&self) -> NatPoly {
        NatPoly::one(self.n_vars)
    }
    fn add(&self, a: &NatPoly, b: &NatPoly) -> NatPoly {
        a.add(b).expect("natpoly add")
    }
    fn mul(&self, a: &NatPoly, b: &NatPoly) -> NatPoly {
        a.mul(b).expect("natpoly mul")
    }
    fn is_zero(&self, a: &NatPoly) -> bool {
        a.is_zero()
    }
    fn eq_within(&self, a: &NatPoly, b: &NatPoly, _tol: Tolerance) -> bool {
        a == b
    }
    fn is_cancellative(&self) -> bool {
        true
    }
    fn name(&self) -> String {
        format!("natpoly({})", self.n_vars)
    }
    fn repeat_u64(&self, n: u64, a: &NatPoly) -> NatPoly {
        self.repeat(&BigUint::from(n), a)
    }
    fn repeat(&self, n: &BigUint, a: &NatPoly) -> NatPoly {
        if n.is_zero() {
            return self.zero();
        }
        let mut out = a.clone();
        for c in out.terms.values_mut() {
            *c *= n;
        }
        out
    }
}

impl RandomElem for NatPolySemiring {
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> NatPoly {
        let k = rng.gen_range(0..=3);
        let terms = (0..k).map(|_| {
            let e = (0..self.n_vars).map(|_| rng.gen_range(0..=2)).collect();
            (e, BigUint::from(rng.gen_range(1u32..=3)))
        });
        NatPoly::from_terms(self.n_vars, terms.collect::<Vec<_>>()).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Real;

    fn x(i: usize) -> NatPoly {
        NatPoly::var(3, i)
    }

    #[test]
    fn distributes() {
        let p = x(0).add(&x(1)).unwrap().mul(&x(0)).unwrap();
        assert_eq!(p.to_string(), "x0^2 + x0*x1");
    }

    #[test]
    fn identities() {
        let p = x(0).add(&x(2)).unwrap();
        assert_eq!(p.mul(&NatPoly::one(3)).unwrap(), p);
        assert_eq!(p.add(&NatPoly::zero(3)).unwrap(), p);
        assert!(p.mul(&NatPoly::zero(3)).unwrap().is_zero());
    }

    #[test]
    fn square_of_sum() {
        let s = x(0).add(&x(1)).unwrap();
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq.to_string(), "x0^2 + 2*x0*x1 + x1^2");
        assert_eq!(sq.coefficient(&[1, 1, 0]), BigUint::from(2u32));
    }

    #[test]
    fn arity_mismatch() {
        assert_eq!(
            NatPoly::var(2, 0).add(&NatPoly::var(3, 0)).unwrap_err(),
            AlgebraError::ArityMismatch { left: 2, right: 3 }
        );
    }

    #[test]
    fn exponent_overflow_is_checked() {
        let big = NatPoly::from_terms(1, [(vec![u32::MAX], BigUint::one())]).unwrap();
        assert_eq!(
            big.mul(&NatPoly::var(1, 0)).unwrap_err(),
            AlgebraError::ExponentOverflow
        );
    }

    #[test]
    fn evaluation() {
        let p = x(0)
            .mul(&x(1))
            .unwrap()
            .add(&x(0).mul(&x(2)).unwrap())
            .unwrap()
            .add(&x(2))
            .unwrap();
        assert_eq!(p.to_string(), "x0*x1 + x0*x2 + x2");
        assert_eq!(p.eval(&Real, &[2.0, 3.0, 1.0]).unwrap(), 9.0);
        assert_eq!(p.eval(&Real, &[0.0, 0.0, 0.0]).unwrap(), 0.0);
        let sq = NatPoly::from_terms(1, [(vec![2], BigUint::one())]).unwrap();
        assert_eq!(sq.eval(&Real, &[5.0]).unwrap(), 25.0);
        assert!(p.eval(&Real, &[1.0]).is_err());
    }

    #[test]
    fn constant_term_survives_zero_point() {
        let p = NatPoly::from_terms(
            2,
            [
                (vec![0, 0], BigUint::from(4u32)),
                (vec![1, 3], BigUint::one()),
            ],
        )
        .unwrap();
        assert_eq!(p.eval(&Real, &[0.0, 0.0]).unwrap(), 4.0);
        assert_eq!(p.to_string(), "x0*x1^3 + 4");
    }

    #[test]
    fn derivative() {
        let p = NatPoly::from_terms(
            2,
            [
                (vec![3, 1], BigUint::from(2u32)),
                (vec![0, 1], BigUint::one()),
            ],
        )
        .unwrap();
        assert_eq!(p.derivative(0).to_string(), "6*x0^2*x1");
        assert_eq!(p.derivative(1).to_string(), "2*x0^3 + 1");
    }
}
