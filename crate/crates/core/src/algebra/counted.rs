use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

use super::{RandomElem, Semiring, Tolerance};

/// Shared add/mul invocation counters.
#[derive(Clone, Debug, Default)]
pub struct OpCounters {
    adds: Arc<AtomicU64>,
    muls: Arc<AtomicU64>,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct OpCount {
    pub adds: u64,
    pub muls: u64,
}

impl OpCount {
    pub fn total(&self) -> u64 {
        self.adds + self.muls
    }
}

impl std::ops::Sub for OpCount {
    type Output = OpCount;
    fn sub(self, rhs: OpCount) -> OpCount {
        OpCount {
            adds: self.adds - rhs.adds,
            muls: self.muls - rhs.muls,
        }
    }
}

impl OpCounters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn snapshot(&self) -> OpCount {
        OpCount {
            adds: self.adds.load(Ordering::Relaxed),
            muls: self.muls.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.adds.store(0, Ordering::Relaxed);
        self.muls.store(0, Ordering::Relaxed);
    }
}

/// Wraps a semiring and counts every `add` and `mul` it performs.
///
/// Repetition `n·a` with `n > 1` counts as one multiplication by an
/// integer constant. Wrap the innermost scalar (e.g. `Bc<Counted<Real>>`)
/// to count scalar work regardless of how values are structured.
#[derive(Clone, Debug)]
pub struct Counted<S> {
    inner: S,
    counters: OpCounters,
}

impl<S> Counted<S> {
    pub fn new(inner: S, counters: OpCounters) -> Self {
        Self { inner, counters }
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }

    pub fn counters(&self) -> &OpCounters {
        &self.counters
    }
}

impl<S: PartialEq> PartialEq for Counted<S> {
    fn eq(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

impl<S: Semiring> Semiring for Counted<S> {
    type Elem = S::Elem;

    fn zero(&self) -> S::Elem {
        self.inner.zero()
    }
    fn one(&self) -> S::Elem {
        self.inner.one()
    }
    fn add(&self, a: &S::Elem, b: &S::Elem) -> S::Elem {
        self.counters.adds.fetch_add(1, Ordering::Relaxed);
        self.inner.add(a, b)
    }
    fn mul(&self, a: &S::Elem, b: &S::Elem) -> S::Elem {
        self.counters.muls.fetch_add(1, Ordering::Relaxed);
        self.inner.mul(a, b)
    }
    fn is_zero(&self, a: &S::Elem) -> bool {
        self.inner.is_zero(a)
    }
    fn eq_within(&self, a: &S::Elem, b: &S::Elem, tol: Tolerance) -> bool {
        self.inner.eq_within(a, b, tol)
    }
    fn is_cancellative(&self) -> bool {
        self.inner.is_cancellative()
    }
    fn name(&self) -> String {
        self.inner.name()
    }
    fn repeat_u64(&self, n: u64, a: &S::Elem) -> S::Elem {
        if n > 1 {
            self.counters.muls.fetch_add(1, Ordering::Relaxed);
        }
        self.inner.repeat_u64(n, a)
    }
    fn repeat(&self, n: &BigUint, a: &S::Elem) -> S::Elem {
        if *n > BigUint::one() {
            self.counters.muls.fetch_add(1, Ordering::Relaxed);
        }
        self.inner.repeat(n, a)
    }
}

impl<S: RandomElem> RandomElem for Counted<S> {
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> S::Elem {
        self.inner.random_elem(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Bc, Real};

    #[test]
    fn counts_scalar_work_inside_bc() {
        let c = OpCounters::new();
        let bc = Bc::new(Counted::new(Real, c.clone()), 1).unwrap();
        bc.mul(&vec![1.0, 2.0], &vec![3.0, 4.0]);
        // three products, one sum
        assert_eq!(c.snapshot(), OpCount { adds: 1, muls: 3 });
        c.reset();
        assert_eq!(c.snapshot().total(), 0);
    }

    #[test]
    fn repetition_counts_once() {
        let c = OpCounters::new();
        let r = Counted::new(Real, c.clone());
        assert_eq!(r.repeat_u64(7, &2.0), 14.0);
        r.repeat_u64(1, &2.0);
        assert_eq!(c.snapshot(), OpCount { adds: 0, muls: 1 });
    }
}
