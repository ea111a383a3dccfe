use std::fmt::Debug;

use crate::algebra::Semiring;

use super::{SemialgebraError, SemialgebraSpec, TensorValue};

/// The target of a linear map: a commutative monoid with a scalar action.
pub trait TargetModule<K> {
    type Value: Clone + Debug;

    fn zero(&self) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn scale(&self, c: &K, v: &Self::Value) -> Self::Value;
}

/// The scalar semiring as a module over itself.
#[derive(Clone, Debug)]
pub struct ScalarTarget<S>(pub S);

impl<S: Semiring> TargetModule<S::Elem> for ScalarTarget<S> {
    type Value = S::Elem;

    fn zero(&self) -> S::Elem {
        self.0.zero()
    }
    fn add(&self, a: &S::Elem, b: &S::Elem) -> S::Elem {
        self.0.add(a, b)
    }
    fn scale(&self, c: &S::Elem, v: &S::Elem) -> S::Elem {
        self.0.mul(c, v)
    }
}

/// `Σ σ_w w ↦ Σ σ_w·L(w)`, determined by the images of the basis.
#[derive(Clone, Debug)]
pub struct LinearMap<T: TargetModule<K>, K> {
    images: Vec<T::Value>,
    target: T,
}

/// Builds the linear map with `images[w] = L(w)`. Every basis element of
/// `source` must have an image.
pub fn extend_by_linearity<S, T>(
    source: &SemialgebraSpec<S>,
    images: Vec<T::Value>,
    target: T,
) -> Result<LinearMap<T, S::Elem>, SemialgebraError>
where
    S: Semiring,
    T: TargetModule<S::Elem>,
{
    if images.len() != source.dim() {
        return Err(SemialgebraError::IncompleteImages {
            dim: source.dim(),
            got: images.len(),
        });
    }
    Ok(LinearMap { images, target })
}

impl<T: TargetModule<K>, K> LinearMap<T, K> {
    pub fn images(&self) -> &[T::Value] {
        &self.images
    }

    pub fn target(&self) -> &T {
        &self.target
    }

    pub fn apply(&self, t: &TensorValue<K>) -> T::Value {
        t.coeffs().iter().fold(self.target.zero(), |acc, (w, c)| {
            self.target
                .add(&acc, &self.target.scale(c, &self.images[*w]))
        })
    }
}
