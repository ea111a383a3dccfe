use super::{Bc, Complex2, Real, Semiring};

/// A monoid homomorphism `f: M -> (S, ·, 1)` into the multiplicative
/// monoid of a semiring.
pub trait MonoidHom: Send + Sync {
    type Source: Clone + std::fmt::Debug + Send + Sync;
    type Target: Semiring;

    fn target(&self) -> &Self::Target;
    fn source_identity(&self) -> Self::Source;
    fn source_op(&self, a: &Self::Source, b: &Self::Source) -> Self::Source;
    fn apply(&self, m: &Self::Source) -> <Self::Target as Semiring>::Elem;
}

/// `id_S` on the multiplicative monoid of `S`.
#[derive(Clone, Debug)]
pub struct IdentityHom<S>(pub S);

impl<S: Semiring> MonoidHom for IdentityHom<S> {
    type Source = S::Elem;
    type Target = S;

    fn target(&self) -> &S {
        &self.0
    }
    fn source_identity(&self) -> S::Elem {
        self.0.one()
    }
    fn source_op(&self, a: &S::Elem, b: &S::Elem) -> S::Elem {
        self.0.mul(a, b)
    }
    fn apply(&self, m: &S::Elem) -> S::Elem {
        m.clone()
    }
}

/// `exp: (ℝ, +, 0) -> (ℝ, ·, 1)`.
#[derive(Copy, Clone, Debug, Default)]
pub struct ExpHom;

impl MonoidHom for ExpHom {
    type Source = f64;
    type Target = Real;

    fn target(&self) -> &Real {
        &Real
    }
    fn source_identity(&self) -> f64 {
        0.0
    }
    fn source_op(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn apply(&self, m: &f64) -> f64 {
        m.exp()
    }
}

/// `θ ↦ (cos θ, sin θ)` from `(ℝ, +, 0)` into complex pairs.
#[derive(Copy, Clone, Debug, Default)]
pub struct CosSinHom;

impl MonoidHom for CosSinHom {
    type Source = f64;
    type Target = Complex2;

    fn target(&self) -> &Complex2 {
        &Complex2
    }
    fn source_identity(&self) -> f64 {
        0.0
    }
    fn source_op(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn apply(&self, m: &f64) -> (f64, f64) {
        let (s, c) = m.sin_cos();
        (c, s)
    }
}

/// `a ↦ (a⁰, a¹, …, aⁿ)` from `(S, +, 0)` into `BCⁿ_S`. Multiplicativity
/// is the binomial theorem.
#[derive(Clone, Debug)]
pub struct PowersHom<S> {
    bc: Bc<S>,
}

impl<S: Semiring> PowersHom<S> {
    pub fn new(bc: Bc<S>) -> Self {
        Self { bc }
    }
}

impl<S: Semiring> MonoidHom for PowersHom<S> {
    type Source = S::Elem;
    type Target = Bc<S>;

    fn target(&self) -> &Bc<S> {
        &self.bc
    }
    fn source_identity(&self) -> S::Elem {
        self.bc.base().zero()
    }
    fn source_op(&self, a: &S::Elem, b: &S::Elem) -> S::Elem {
        self.bc.base().add(a, b)
    }
    fn apply(&self, m: &S::Elem) -> Vec<S::Elem> {
        let s = self.bc.base();
        let mut out = Vec::with_capacity(self.bc.order() + 1);
        let mut p = s.one();
        for k in 0..=self.bc.order() {
            if k > 0 {
                p = s.mul(&p, m);
            }
            out.push(p.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Tolerance;

    #[test]
    fn identity_values() {
        let h = IdentityHom(Real);
        assert_eq!(h.apply(&7.0), 7.0);
        assert_eq!(h.apply(&h.source_identity()), 1.0);
    }

    #[test]
    fn exp_and_cos_sin_at_zero() {
        assert_eq!(ExpHom.apply(&0.0), 1.0);
        assert_eq!(CosSinHom.apply(&0.0), (1.0, 0.0));
    }

    #[test]
    fn cos_sin_is_multiplicative() {
        let (a, b) = (0.7, -2.3);
        let lhs = CosSinHom.apply(&(a + b));
        let rhs = Complex2.mul(&CosSinHom.apply(&a), &CosSinHom.apply(&b));
        assert!(Complex2.eq_within(&lhs, &rhs, Tolerance::uniform(1e-12)));
    }

    #[test]
    fn powers() {
        let p1 = PowersHom::new(Bc::new(Real, 1).unwrap());
        assert_eq!(p1.apply(&0.0), vec![1.0, 0.0]);
        let p2 = PowersHom::new(Bc::new(Real, 2).unwrap());
        assert_eq!(p2.apply(&3.0), vec![1.0, 3.0, 9.0]);
        let (a, b) = (1.5, -0.25);
        assert_eq!(
            p1.apply(&(a + b)),
            p1.target().mul(&p1.apply(&a), &p1.apply(&b))
        );
    }
}
