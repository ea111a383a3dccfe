use std::sync::OnceLock;

use rand::Rng;

use super::{AlgebraError, RandomElem, Semiring, Tolerance};

/// Largest supported convolution order; `C(64, 32)` still fits in a `u64`.
pub const MAX_BC_ORDER: usize = 64;

fn pascal() -> &'static [Vec<u64>] {
    static TABLE: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(MAX_BC_ORDER + 1);
        for n in 0..=MAX_BC_ORDER {
            let mut row = vec![1u64; n + 1];
            for k in 1..n {
                row[k] = rows[n - 1][k - 1] + rows[n - 1][k];
            }
            rows.push(row);
        }
        rows
    })
}

/// `C(n, k)` for `n <= 64`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    assert!(
        n <= MAX_BC_ORDER,
        "binomial table only covers n <= {MAX_BC_ORDER}"
    );
    if k > n {
        0
    } else {
        pascal()[n][k]
    }
}

/// The order-`n` binomial convolution semiring over `S`: sequences
/// `(a₀, …, aₙ)` with componentwise `+` and
/// `(a ⋄ b)_i = Σ_{j ≤ i} C(i, j) · a_j · b_{i-j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bc<S> {
    base: S,
    order: usize,
}

impl<S: Semiring> Bc<S> {
    pub fn new(base: S, order: usize) -> Result<Self, AlgebraError> {
        if order > MAX_BC_ORDER {
            return Err(AlgebraError::OrderTooLarge(order));
        }
        Ok(Self { base, order })
    }

    pub fn base(&self) -> &S {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The basis vector `ê_i`.
    pub fn unit_vector(&self, i: usize) -> Vec<S::Elem> {
        (0..=self.order)
            .map(|k| {
                if k == i {
                    self.base.one()
                } else {
                    self.base.zero()
                }
            })
            .collect()
    }

    /// `(a, 0, …, 0)`.
    pub fn lift(&self, a: &S::Elem) -> Vec<S::Elem> {
        let mut v = vec![self.base.zero(); self.order + 1];
        v[0] = a.clone();
        v
    }

    fn check(&self, a: &[S::Elem], b: &[S::Elem]) -> Result<(), AlgebraError> {
        for v in [a, b] {
            if v.len() != self.order + 1 {
                return Err(AlgebraError::OrderMismatch {
                    left: self.order,
                    right: v.len().saturating_sub(1),
                });
            }
        }
        Ok(())
    }

    pub fn try_add(&self, a: &[S::Elem], b: &[S::Elem]) -> Result<Vec<S::Elem>, AlgebraError> {
        self.check(a, b)?;
        Ok(self.add(&a.to_vec(), &b.to_vec()))
    }

    pub fn try_mul(&self, a: &[S::Elem], b: &[S::Elem]) -> Result<Vec<S::Elem>, AlgebraError> {
        self.check(a, b)?;
        Ok(self.mul(&a.to_vec(), &b.to_vec()))
    }
}

impl<S: Semiring> Semiring for Bc<S> {
    type Elem = Vec<S::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![self.base.zero(); self.order + 1]
    }

    fn one(&self) -> Self::Elem {
        self.unit_vector(0)
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        debug_assert_eq!(a.len(), self.order + 1);
        debug_assert_eq!(b.len(), self.order + 1);
        (0..=self.order)
            .map(|i| {
                let mut acc = self.base.zero();
                for j in 0..=i {
                    let p = self.base.mul(&a[j], &b[i - j]);
                    let c = binomial(i, j);
                    let term = if c == 1 {
                        p
                    } else {
                        self.base.repeat_u64(c, &p)
                    };
                    acc = if j == 0 {
                        term
                    } else {
                        self.base.add(&acc, &term)
                    };
                }
                acc
            })
            .collect()
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|x| self.base.is_zero(x))
    }

    fn eq_within(&self, a: &Self::Elem, b: &Self::Elem, tol: Tolerance) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.base.eq_within(x, y, tol))
    }

    fn is_cancellative(&self) -> bool {
        self.base.is_cancellative()
    }

    fn name(&self) -> String {
        format!("bc({},{})", self.base.name(), self.order)
    }

    fn repeat_u64(&self, n: u64, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.repeat_u64(n, x)).collect()
    }
}

impl<S: RandomElem> RandomElem for Bc<S> {
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        (0..=self.order)
            .map(|_| self.base.random_elem(rng))
            .collect()
    }
}
