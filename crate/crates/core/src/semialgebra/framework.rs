use crate::algebra::{Bc, MonoidHom, PowersHom, Semiring};

use super::{
    bc_semialgebra, extend_by_linearity, semialgebra_from_semiring, tensor_product, LinearMap,
    ScalarTarget, SemialgebraError, SemialgebraSpec, TensorValue,
};

/// One factor of a multilinear pipeline: a semialgebra `A_j`, the source
/// values `f_j(φ_j(v))` as coefficient vectors over the basis of `A_j`
/// (one per source, in source order), and the images `L_j(u)` of a linear
/// extractor into the scalar semiring.
#[derive(Clone, Debug)]
pub struct FrameworkPart<S: Semiring> {
    algebra: SemialgebraSpec<S>,
    xi: Vec<Vec<S::Elem>>,
    extractor: Vec<S::Elem>,
}

impl<S: Semiring + Clone> FrameworkPart<S> {
    pub fn new(
        algebra: SemialgebraSpec<S>,
        xi: Vec<Vec<S::Elem>>,
        extractor: Vec<S::Elem>,
    ) -> Result<Self, SemialgebraError> {
        if extractor.len() != algebra.dim() {
            return Err(SemialgebraError::IncompleteImages {
                dim: algebra.dim(),
                got: extractor.len(),
            });
        }
        if xi.iter().any(|v| v.len() != algebra.dim()) {
            return Err(SemialgebraError::Invalid(format!(
                "source values must have {} coordinates",
                algebra.dim()
            )));
        }
        Ok(Self {
            algebra,
            xi,
            extractor,
        })
    }

    /// Source values `f(φ(v))` for an arbitrary homomorphism, converted to
    /// coordinates by `coords`.
    pub fn from_hom<H: MonoidHom>(
        algebra: SemialgebraSpec<S>,
        hom: &H,
        phi: &[H::Source],
        coords: impl Fn(&<H::Target as Semiring>::Elem) -> Vec<S::Elem>,
        extractor: Vec<S::Elem>,
    ) -> Result<Self, SemialgebraError> {
        let xi = phi.iter().map(|m| coords(&hom.apply(m))).collect();
        Self::new(algebra, xi, extractor)
    }

    /// `(S, id_S, φ)` with extractor `L(1) = extract`.
    pub fn identity(
        scalar: S,
        phi: Vec<S::Elem>,
        extract: S::Elem,
    ) -> Result<Self, SemialgebraError> {
        let algebra = semialgebra_from_semiring(scalar)?;
        Self::new(
            algebra,
            phi.into_iter().map(|x| vec![x]).collect(),
            vec![extract],
        )
    }

    /// `(BCⁿ_S, 𝒫ⁿ_S, φ)` with extractor images `L(ê_i) = extract[i]`.
    pub fn powers(
        scalar: S,
        order: usize,
        phi: &[S::Elem],
        extract: Vec<S::Elem>,
    ) -> Result<Self, SemialgebraError> {
        let algebra = bc_semialgebra(scalar.clone(), order)?;
        let bc = Bc::new(scalar, order).map_err(|e| SemialgebraError::Invalid(e.to_string()))?;
        let hom = PowersHom::new(bc);
        Self::from_hom(algebra, &hom, phi, |v| v.clone(), extract)
    }

    pub fn algebra(&self) -> &SemialgebraSpec<S> {
        &self.algebra
    }

    pub fn num_sources(&self) -> usize {
        self.xi.len()
    }
}

/// The composed pipeline: the product semialgebra, the product source
/// values `f₁(φ₁(v)) ⊗ ⋯ ⊗ f_m(φ_m(v))`, and the extractor
/// `u₁ ⊗ ⋯ ⊗ u_m ↦ L₁(u₁)⋯L_m(u_m)` extended by linearity.
#[derive(Clone, Debug)]
pub struct Framework<S: Semiring> {
    pub spec: SemialgebraSpec<S>,
    pub xi: Vec<TensorValue<S::Elem>>,
    pub extractor: LinearMap<ScalarTarget<S>, S::Elem>,
}

pub fn compose_framework<S: Semiring + Clone>(
    parts: Vec<FrameworkPart<S>>,
) -> Result<Framework<S>, SemialgebraError> {
    let first = parts
        .first()
        .ok_or_else(|| SemialgebraError::Invalid("framework needs at least one part".into()))?;
    let n_src = first.num_sources();
    let mut spec = first.algebra.clone();
    for p in &parts[1..] {
        if p.num_sources() != n_src {
            return Err(SemialgebraError::SourceSetMismatch(n_src, p.num_sources()));
        }
        spec = tensor_product(&spec, &p.algebra)?;
    }
    let s = spec.scalar().clone();

    let mut xi = Vec::with_capacity(n_src);
    for v in 0..n_src {
        let mut coeffs = vec![s.one()];
        for p in &parts {
            let mut next = Vec::with_capacity(coeffs.len() * p.algebra.dim());
            for c in &coeffs {
                for x in &p.xi[v] {
                    next.push(s.mul(c, x));
                }
            }
            coeffs = next;
        }
        xi.push(spec.from_dense(coeffs));
    }

    let mut images = vec![s.one()];
    for p in &parts {
        let mut next = Vec::with_capacity(images.len() * p.algebra.dim());
        for c in &images {
            for x in &p.extractor {
                next.push(s.mul(c, x));
            }
        }
        images = next;
    }
    let extractor = extend_by_linearity(&spec, images, ScalarTarget(s))?;
    Ok(Framework {
        spec,
        xi,
        extractor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Rational, Real};

    #[test]
    fn single_part_is_plain_evaluation() {
        let fw = compose_framework(vec![
            FrameworkPart::identity(Real, vec![2.0, 3.0], 1.0).unwrap()
        ])
        .unwrap();
        let prod = fw.spec.mul(&fw.xi[0], &fw.xi[1]);
        assert_eq!(fw.extractor.apply(&prod), 6.0);
    }

    #[test]
    fn expectation_pipeline_on_one_product() {
        // one MUL of two sources: Z = p1 p2, E = p1 p2 (f1 + f2)
        let (p, f) = ([0.3, 0.5], [2.0, -1.0]);
        let fw = compose_framework(vec![
            FrameworkPart::identity(Real, p.to_vec(), 1.0).unwrap(),
            FrameworkPart::powers(Real, 1, &f, vec![0.0, 1.0]).unwrap(),
        ])
        .unwrap();
        let prod = fw.spec.mul(&fw.xi[0], &fw.xi[1]);
        let e = fw.extractor.apply(&prod);
        assert!((e - 0.15 * 1.0).abs() < 1e-15);
    }

    #[test]
    fn second_order_pipeline() {
        let (mu, phi, psi) = (
            [Rational::int(2), Rational::int(3)],
            [Rational::int(1), Rational::int(4)],
            [Rational::int(-1), Rational::int(2)],
        );
        let e1 = vec![Rational::int(0), Rational::int(1)];
        let fw = compose_framework(vec![
            FrameworkPart::identity(Rational, mu.to_vec(), Rational::int(1)).unwrap(),
            FrameworkPart::powers(Rational, 1, &phi, e1.clone()).unwrap(),
            FrameworkPart::powers(Rational, 1, &psi, e1).unwrap(),
        ])
        .unwrap();
        let prod = fw.spec.mul(&fw.xi[0], &fw.xi[1]);
        // μ-monomial 6, (Σφ)(Σψ) = 5·1
        assert_eq!(fw.extractor.apply(&prod), Rational::int(30));
    }

    #[test]
    fn source_counts_must_agree() {
        let err = compose_framework(vec![
            FrameworkPart::identity(Real, vec![1.0], 1.0).unwrap(),
            FrameworkPart::powers(Real, 1, &[1.0, 2.0], vec![0.0, 1.0]).unwrap(),
        ])
        .unwrap_err();
        assert_eq!(err, SemialgebraError::SourceSetMismatch(1, 2));
    }
}
