//! Commutative semirings, their instances, and monoid homomorphisms into
//! their multiplicative monoids.

mod bc;
mod codec;
mod counted;
mod hom;
pub mod laws;
mod natpoly;
mod registry;
mod scalars;

pub(crate) mod codec_support {
    pub(crate) use super::codec::{parse_err, split_tuple};
}

use std::fmt::Debug;

use num_bigint::BigUint;
use rand::Rng;
use thiserror::Error;

pub use bc::{binomial, Bc, MAX_BC_ORDER};
pub use codec::{format_f64, ValueCodec};
pub use counted::{Counted, OpCount, OpCounters};
pub use hom::{CosSinHom, ExpHom, IdentityHom, MonoidHom, PowersHom};
pub use natpoly::{NatPoly, NatPolySemiring};
pub use registry::{
    check_structure_constants, dispatch, BaseKind, FactorKind, NameOf, SemiringKind,
    SemiringVisitor,
};
pub use scalars::{Complex2, LogReal, MaxPlus, Rational, Real};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("unknown semiring instance `{0}`")]
    UnknownInstance(String),
    #[error("invalid semiring instance: {0}")]
    InvalidInstance(String),
    #[error("polynomials over {left} and {right} indeterminates cannot be combined")]
    ArityMismatch { left: usize, right: usize },
    #[error("binomial-convolution values of order {left} and {right} cannot be combined")]
    OrderMismatch { left: usize, right: usize },
    #[error("binomial-convolution order {0} exceeds the supported maximum")]
    OrderTooLarge(usize),
    #[error("exponent overflow in polynomial product")]
    ExponentOverflow,
    #[error("cannot parse `{text}` as a {semiring} value: {reason}")]
    Parse {
        semiring: String,
        text: String,
        reason: String,
    },
}

/// Floating comparison contract: `|a - b| <= max(abs, rel * max(|a|, |b|))`.
/// Exact carriers ignore it.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-9,
            rel: 1e-9,
        }
    }
}

impl Tolerance {
    pub const EXACT: Tolerance = Tolerance { abs: 0.0, rel: 0.0 };

    /// Same bound used as both the absolute floor and the relative factor.
    pub fn uniform(t: f64) -> Self {
        Self { abs: t, rel: t }
    }

    pub fn close(&self, a: f64, b: f64) -> bool {
        if a == b {
            return true;
        }
        if !a.is_finite() || !b.is_finite() {
            return false;
        }
        (a - b).abs() <= self.abs.max(self.rel * a.abs().max(b.abs()))
    }
}

/// A commutative semiring `(S, +, ·, 0, 1)`.
///
/// Methods take `&self` so that instances can carry parameters (polynomial
/// arity, convolution order, tensor structure constants, counters).
pub trait Semiring: Send + Sync {
    type Elem: Clone + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn eq_within(&self, a: &Self::Elem, b: &Self::Elem, tol: Tolerance) -> bool;
    fn is_cancellative(&self) -> bool;
    fn name(&self) -> String;

    /// `n·a`, the n-fold sum (`0·a = 0`).
    fn repeat_u64(&self, n: u64, a: &Self::Elem) -> Self::Elem {
        let mut acc = self.zero();
        let mut base = a.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.add(&base, &base);
            }
        }
        acc
    }

    /// `n·a` for an arbitrary-precision count.
    fn repeat(&self, n: &BigUint, a: &Self::Elem) -> Self::Elem {
        if let Ok(small) = u64::try_from(n) {
            return self.repeat_u64(small, a);
        }
        let mut acc = self.zero();
        let mut base = a.clone();
        for i in 0..n.bits() {
            if n.bit(i) {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
        }
        acc
    }

    /// `aᵏ` (`a⁰ = 1`).
    fn pow(&self, a: &Self::Elem, k: u32) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn eq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.eq_within(a, b, Tolerance::EXACT)
    }
}

/// Random element sampling for property tests and the law suites.
pub trait RandomElem: Semiring {
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
}

impl<S: Semiring + ?Sized> Semiring for &S {
    type Elem = S::Elem;

    fn zero(&self) -> Self::Elem {
        (**self).zero()
    }
    fn one(&self) -> Self::Elem {
        (**self).one()
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (**self).add(a, b)
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (**self).mul(a, b)
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        (**self).is_zero(a)
    }
    fn eq_within(&self, a: &Self::Elem, b: &Self::Elem, tol: Tolerance) -> bool {
        (**self).eq_within(a, b, tol)
    }
    fn is_cancellative(&self) -> bool {
        (**self).is_cancellative()
    }
    fn name(&self) -> String {
        (**self).name()
    }
    fn repeat_u64(&self, n: u64, a: &Self::Elem) -> Self::Elem {
        (**self).repeat_u64(n, a)
    }
    fn repeat(&self, n: &BigUint, a: &Self::Elem) -> Self::Elem {
        (**self).repeat(n, a)
    }
    fn pow(&self, a: &Self::Elem, k: u32) -> Self::Elem {
        (**self).pow(a, k)
    }
}
