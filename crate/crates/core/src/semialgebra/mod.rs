//! Finite-dimensional commutative semialgebras given by structure constants,
//! their tensor products, extension by linearity, and composition of
//! multilinear pipelines.
//!
//! Tensor products are kept flat: `A₁ ⊗ ⋯ ⊗ A_k` is one spec whose basis is
//! the set of index tuples `(u₁, …, u_k)`, numbered in mixed radix with the
//! last factor varying fastest (lexicographic tuple order).

mod framework;
mod linear;

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::algebra::codec_support::{parse_err, split_tuple};
use crate::algebra::{binomial, AlgebraError, RandomElem, Semiring, Tolerance, ValueCodec};

pub use framework::{compose_framework, Framework, FrameworkPart};
pub use linear::{extend_by_linearity, LinearMap, ScalarTarget, TargetModule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemialgebraError {
    #[error("scalar semiring `{0}` is not cancellative")]
    NotCancellative(String),
    #[error("scalar semirings differ: `{0}` vs `{1}`")]
    ScalarMismatch(String, String),
    #[error("value does not belong to the {expected}-dimensional spec (found index {found})")]
    SpecMismatch { expected: usize, found: usize },
    #[error("expected a value over a product whose last factor is bc1, got `{0}`")]
    ShapeMismatch(String),
    #[error("linear map images cover {got} of {dim} basis elements")]
    IncompleteImages { dim: usize, got: usize },
    #[error("framework parts disagree on the number of sources: {0} vs {1}")]
    SourceSetMismatch(usize, usize),
    #[error("structure constants violate {law} at basis {at:?}")]
    LawViolation { law: &'static str, at: Vec<usize> },
    #[error("{0}")]
    Invalid(String),
}

/// A structure-constant entry, with the common case `1_S` kept symbolic so
/// that multiplying by it costs nothing.
#[derive(Clone, Debug, PartialEq)]
pub enum Coef<T> {
    One,
    Scalar(T),
}

/// One tensor factor: basis size, unit and structure constants
/// `u·v = Σ_w σ^w_{u,v} w`, stored sparsely.
#[derive(Clone, Debug)]
pub struct Factor<T> {
    name: String,
    dim: usize,
    unit: Vec<(usize, Coef<T>)>,
    table: Vec<Vec<(usize, Coef<T>)>>,
}

impl<T> Factor<T> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn product(&self, u: usize, v: usize) -> &[(usize, Coef<T>)] {
        &self.table[u * self.dim + v]
    }
}

/// A tensor-product value: sparse coefficients sorted by flat basis index,
/// none of them zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorValue<T> {
    dim: usize,
    coeffs: Vec<(usize, T)>,
}

impl<T> TensorValue<T> {
    /// `coeffs` must be sorted by index, non-zero and below `dim`.
    pub(crate) fn from_raw(dim: usize, coeffs: Vec<(usize, T)>) -> Self {
        debug_assert!(coeffs.windows(2).all(|w| w[0].0 < w[1].0));
        Self { dim, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[(usize, T)] {
        &self.coeffs
    }

    pub fn get(&self, index: usize) -> Option<&T> {
        self.coeffs
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|k| &self.coeffs[k].1)
    }
}

/// A commutative unital associative semialgebra over the scalar semiring
/// `S`, possibly a flat tensor product of several factors.
#[derive(Clone, Debug)]
pub struct SemialgebraSpec<S: Semiring> {
    scalar: S,
    factors: Vec<Factor<S::Elem>>,
    dim: usize,
}

fn unit_factor<T>(name: String) -> Factor<T> {
    Factor {
        name,
        dim: 1,
        unit: vec![(0, Coef::One)],
        table: vec![vec![(0, Coef::One)]],
    }
}

/// `S` regarded as a one-dimensional semialgebra over itself with basis
/// `{1_S}` and `σ¹_{1,1} = 1`.
pub fn semialgebra_from_semiring<S: Semiring>(
    s: S,
) -> Result<SemialgebraSpec<S>, SemialgebraError> {
    if !s.is_cancellative() {
        return Err(SemialgebraError::NotCancellative(s.name()));
    }
    Ok(SemialgebraSpec {
        factors: vec![unit_factor(s.name())],
        scalar: s,
        dim: 1,
    })
}

/// `BCⁿ_S` with basis `ê₀ … êₙ` and `ê_i·ê_j = C(i+j, i) ê_{i+j}` when
/// `i + j <= n`, zero otherwise.
pub fn bc_semialgebra<S: Semiring>(s: S, n: usize) -> Result<SemialgebraSpec<S>, SemialgebraError> {
    if !s.is_cancellative() {
        return Err(SemialgebraError::NotCancellative(s.name()));
    }
    if n > crate::algebra::MAX_BC_ORDER {
        return Err(SemialgebraError::Invalid(
            AlgebraError::OrderTooLarge(n).to_string(),
        ));
    }
    let dim = n + 1;
    let mut table = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let entry = if i + j <= n {
                let c = binomial(i + j, i);
                let coef = if c == 1 {
                    Coef::One
                } else {
                    Coef::Scalar(s.repeat_u64(c, &s.one()))
                };
                vec![(i + j, coef)]
            } else {
                Vec::new()
            };
            table.push(entry);
        }
    }
    let factor = Factor {
        name: format!("bc{n}"),
        dim,
        unit: vec![(0, Coef::One)],
        table,
    };
    Ok(SemialgebraSpec {
        scalar: s,
        factors: vec![factor],
        dim,
    })
}

/// Complex numbers as a two-dimensional algebra over a real scalar
/// semiring: basis `{1, i}` with `i·i = -1`.
pub fn complex_semialgebra<S: Semiring<Elem = f64>>(s: S) -> SemialgebraSpec<S> {
    let minus_one = Coef::Scalar(-1.0);
    let table = vec![
        vec![(0, Coef::One)],
        vec![(1, Coef::One)],
        vec![(1, Coef::One)],
        vec![(0, minus_one)],
    ];
    SemialgebraSpec {
        scalar: s,
        factors: vec![Factor {
            name: "complex2".into(),
            dim: 2,
            unit: vec![(0, Coef::One)],
            table,
        }],
        dim: 2,
    }
}

/// `A ⊗_S B`. Structure constants are products of the factors' constants
/// and the unit is `1_A ⊗ 1_B`.
pub fn tensor_product<S: Semiring + Clone>(
    a: &SemialgebraSpec<S>,
    b: &SemialgebraSpec<S>,
) -> Result<SemialgebraSpec<S>, SemialgebraError> {
    if a.scalar.name() != b.scalar.name() {
        return Err(SemialgebraError::ScalarMismatch(
            a.scalar.name(),
            b.scalar.name(),
        ));
    }
    if !a.scalar.is_cancellative() {
        return Err(SemialgebraError::NotCancellative(a.scalar.name()));
    }
    let mut factors = a.factors.clone();
    factors.extend(b.factors.iter().cloned());
    Ok(SemialgebraSpec {
        scalar: a.scalar.clone(),
        factors,
        dim: a.dim * b.dim,
    })
}

impl<S: Semiring> SemialgebraSpec<S> {
    /// A single-factor semialgebra from explicit structure constants.
    /// `constants(u, v)` lists the non-zero `(w, σ^w_{u,v})`; `unit` lists
    /// the coefficients of `1_A`. Laws are checked before returning.
    pub fn from_structure_constants(
        scalar: S,
        name: &str,
        dim: usize,
        mut constants: impl FnMut(usize, usize) -> Vec<(usize, S::Elem)>,
        unit: Vec<(usize, S::Elem)>,
    ) -> Result<Self, SemialgebraError> {
        if !scalar.is_cancellative() {
            return Err(SemialgebraError::NotCancellative(scalar.name()));
        }
        let wrap = |s: &S, c: S::Elem| {
            if s.eq(&c, &s.one()) {
                Coef::One
            } else {
                Coef::Scalar(c)
            }
        };
        let mut table = Vec::with_capacity(dim * dim);
        for u in 0..dim {
            for v in 0..dim {
                let mut entry: Vec<(usize, Coef<S::Elem>)> = constants(u, v)
                    .into_iter()
                    .filter(|(_, c)| !scalar.is_zero(c))
                    .map(|(w, c)| (w, wrap(&scalar, c)))
                    .collect();
                entry.sort_by_key(|(w, _)| *w);
                if entry.iter().any(|(w, _)| *w >= dim) {
                    return Err(SemialgebraError::Invalid(format!(
                        "structure constant index out of range for ({u}, {v})"
                    )));
                }
                table.push(entry);
            }
        }
        let unit = unit
            .into_iter()
            .map(|(w, c)| (w, wrap(&scalar, c)))
            .collect();
        let spec = Self {
            scalar,
            factors: vec![Factor {
                name: name.into(),
                dim,
                unit,
                table,
            }],
            dim,
        };
        spec.check_structure()?;
        Ok(spec)
    }

    pub fn scalar(&self) -> &S {
        &self.scalar
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[Factor<S::Elem>] {
        &self.factors
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    /// Flat index -> per-factor basis indices.
    pub fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (k, f) in self.factors.iter().enumerate().rev() {
            out[k] = flat % f.dim;
            flat /= f.dim;
        }
        out
    }

    pub fn flat_index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (d, f)| acc * f.dim + d)
    }

    /// Drops the last factor. Used to recover `A` from `A ⊗ BC¹`.
    pub fn without_last_factor(&self) -> Option<Self>
    where
        S: Clone,
    {
        if self.factors.len() < 2 {
            return None;
        }
        let last = self.factors.last().unwrap().dim;
        Some(Self {
            scalar: self.scalar.clone(),
            factors: self.factors[..self.factors.len() - 1].to_vec(),
            dim: self.dim / last,
        })
    }

    fn coef_value(&self, c: &Coef<S::Elem>) -> S::Elem {
        match c {
            Coef::One => self.scalar.one(),
            Coef::Scalar(x) => x.clone(),
        }
    }

    /// The materialized constants `σ^w_{u,v}` of the whole product.
    pub fn structure_constants(&self, u: usize, v: usize) -> Vec<(usize, S::Elem)> {
        let mut out = Vec::new();
        self.for_each_product(u, v, |w, coef| {
            out.push((w, coef.map_or_else(|| self.scalar.one(), |c| c.clone())));
        });
        out.sort_by_key(|(w, _)| *w);
        out
    }

    /// Calls `f(w, σ)` for every non-zero `σ^w_{u,v}`; `None` means `1_S`.
    fn for_each_product(&self, u: usize, v: usize, mut f: impl FnMut(usize, Option<&S::Elem>)) {
        let ud = self.digits(u);
        let vd = self.digits(v);
        let lists: Vec<_> = self
            .factors
            .iter()
            .enumerate()
            .map(|(k, fac)| fac.product(ud[k], vd[k]))
            .collect();
        if lists.iter().any(|l| l.is_empty()) {
            return;
        }
        let mut pick = vec![0usize; lists.len()];
        loop {
            let mut w = 0;
            let mut coef: Option<S::Elem> = None;
            for (k, l) in lists.iter().enumerate() {
                let (wk, c) = &l[pick[k]];
                w = w * self.factors[k].dim + wk;
                if let Coef::Scalar(x) = c {
                    coef = Some(match coef {
                        None => x.clone(),
                        Some(acc) => self.scalar.mul(&acc, x),
                    });
                }
            }
            f(w, coef.as_ref());
            let mut k = lists.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                pick[k] += 1;
                if pick[k] < lists[k].len() {
                    break;
                }
                pick[k] = 0;
            }
        }
    }

    /// Builds a value from a dense coefficient vector, dropping zeros.
    pub fn from_dense(&self, dense: Vec<S::Elem>) -> TensorValue<S::Elem> {
        assert_eq!(dense.len(), self.dim, "dense vector length");
        TensorValue {
            dim: self.dim,
            coeffs: dense
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !self.scalar.is_zero(c))
                .collect(),
        }
    }

    pub fn from_sparse(
        &self,
        mut coeffs: Vec<(usize, S::Elem)>,
    ) -> Result<TensorValue<S::Elem>, SemialgebraError> {
        coeffs.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, S::Elem)> = Vec::with_capacity(coeffs.len());
        for (i, c) in coeffs {
            if i >= self.dim {
                return Err(SemialgebraError::SpecMismatch {
                    expected: self.dim,
                    found: i,
                });
            }
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc = self.scalar.add(acc, &c),
                _ => out.push((i, c)),
            }
        }
        out.retain(|(_, c)| !self.scalar.is_zero(c));
        Ok(TensorValue {
            dim: self.dim,
            coeffs: out,
        })
    }

    pub fn to_dense(&self, t: &TensorValue<S::Elem>) -> Vec<S::Elem> {
        let mut out = vec![self.scalar.zero(); self.dim];
        for (i, c) in &t.coeffs {
            out[*i] = c.clone();
        }
        out
    }

    pub fn coefficient(&self, t: &TensorValue<S::Elem>, index: usize) -> S::Elem {
        t.get(index).cloned().unwrap_or_else(|| self.scalar.zero())
    }

    /// `c · b_index`.
    pub fn basis_scaled(&self, index: usize, c: S::Elem) -> TensorValue<S::Elem> {
        let coeffs = if self.scalar.is_zero(&c) {
            Vec::new()
        } else {
            vec![(index, c)]
        };
        TensorValue {
            dim: self.dim,
            coeffs,
        }
    }

    pub fn basis(&self, index: usize) -> TensorValue<S::Elem> {
        self.basis_scaled(index, self.scalar.one())
    }

    /// `a₁ ⊗ ⋯ ⊗ a_k` from per-factor dense coefficient vectors.
    pub fn elementary(
        &self,
        parts: &[Vec<S::Elem>],
    ) -> Result<TensorValue<S::Elem>, SemialgebraError> {
        if parts.len() != self.factors.len()
            || parts
                .iter()
                .zip(&self.factors)
                .any(|(p, f)| p.len() != f.dim)
        {
            return Err(SemialgebraError::Invalid(
                "elementary tensor parts do not match the factor dimensions".into(),
            ));
        }
        let mut coeffs: Vec<(usize, S::Elem)> = vec![(0, self.scalar.one())];
        for (p, f) in parts.iter().zip(&self.factors) {
            let mut next = Vec::new();
            for (i, c) in &coeffs {
                for (j, x) in p.iter().enumerate() {
                    if !self.scalar.is_zero(x) {
                        next.push((i * f.dim + j, self.scalar.mul(c, x)));
                    }
                }
            }
            coeffs = next;
        }
        coeffs.retain(|(_, c)| !self.scalar.is_zero(c));
        Ok(TensorValue {
            dim: self.dim,
            coeffs,
        })
    }

    /// `c · t`.
    pub fn scale(&self, c: &S::Elem, t: &TensorValue<S::Elem>) -> TensorValue<S::Elem> {
        let coeffs = t
            .coeffs
            .iter()
            .map(|(i, x)| (*i, self.scalar.mul(c, x)))
            .filter(|(_, x)| !self.scalar.is_zero(x))
            .collect();
        TensorValue {
            dim: self.dim,
            coeffs,
        }
    }

    fn check_value(&self, t: &TensorValue<S::Elem>) -> Result<(), SemialgebraError> {
        if t.dim != self.dim {
            return Err(SemialgebraError::SpecMismatch {
                expected: self.dim,
                found: t.dim,
            });
        }
        Ok(())
    }

    pub fn tensor_add(
        &self,
        a: &TensorValue<S::Elem>,
        b: &TensorValue<S::Elem>,
    ) -> Result<TensorValue<S::Elem>, SemialgebraError> {
        self.check_value(a)?;
        self.check_value(b)?;
        Ok(self.add(a, b))
    }

    pub fn tensor_mul(
        &self,
        a: &TensorValue<S::Elem>,
        b: &TensorValue<S::Elem>,
    ) -> Result<TensorValue<S::Elem>, SemialgebraError> {
        self.check_value(a)?;
        self.check_value(b)?;
        Ok(self.mul(a, b))
    }

    /// Associativity, commutativity and unitality of the structure
    /// constants, checked on every basis pair and triple.
    pub fn check_structure(&self) -> Result<(), SemialgebraError> {
        let n = self.dim;
        let s = &self.scalar;
        let dense = |u: usize, v: usize| {
            let mut d = vec![s.zero(); n];
            for (w, c) in self.structure_constants(u, v) {
                d[w] = c;
            }
            d
        };
        let consts: Vec<Vec<S::Elem>> = (0..n * n).map(|k| dense(k / n, k % n)).collect();
        let sigma = |w: usize, u: usize, v: usize| &consts[u * n + v][w];
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    if !s.eq(sigma(w, u, v), sigma(w, v, u)) {
                        return Err(SemialgebraError::LawViolation {
                            law: "commutativity",
                            at: vec![u, v, w],
                        });
                    }
                }
            }
        }
        for u in 0..n {
            for u1 in 0..n {
                for u2 in 0..n {
                    for w1 in 0..n {
                        let mut l = s.zero();
                        let mut r = s.zero();
                        for w in 0..n {
                            l = s.add(&l, &s.mul(sigma(w, u, u1), sigma(w1, w, u2)));
                            r = s.add(&r, &s.mul(sigma(w, u1, u2), sigma(w1, u, w)));
                        }
                        if !s.eq(&l, &r) {
                            return Err(SemialgebraError::LawViolation {
                                law: "associativity",
                                at: vec![u, u1, u2, w1],
                            });
                        }
                    }
                }
            }
        }
        let one = self.one();
        for u in 0..n {
            let b = self.basis(u);
            if !self.eq(&self.mul(&one, &b), &b) {
                return Err(SemialgebraError::LawViolation {
                    law: "unit",
                    at: vec![u],
                });
            }
        }
        Ok(())
    }
}

impl<S: Semiring> Semiring for SemialgebraSpec<S> {
    type Elem = TensorValue<S::Elem>;

    fn zero(&self) -> Self::Elem {
        TensorValue {
            dim: self.dim,
            coeffs: Vec::new(),
        }
    }

    fn one(&self) -> Self::Elem {
        let parts: Vec<Vec<S::Elem>> = self
            .factors
            .iter()
            .map(|f| {
                let mut d = vec![self.scalar.zero(); f.dim];
                for (w, c) in &f.unit {
                    d[*w] = self.coef_value(c);
                }
                d
            })
            .collect();
        self.elementary(&parts).expect("unit parts match factors")
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        debug_assert_eq!(a.dim, b.dim);
        let mut out = Vec::with_capacity(a.coeffs.len() + b.coeffs.len());
        let (mut i, mut j) = (0, 0);
        while i < a.coeffs.len() || j < b.coeffs.len() {
            let ka = a.coeffs.get(i).map(|c| c.0);
            let kb = b.coeffs.get(j).map(|c| c.0);
            match (ka, kb) {
                (Some(x), Some(y)) if x == y => {
                    let c = self.scalar.add(&a.coeffs[i].1, &b.coeffs[j].1);
                    if !self.scalar.is_zero(&c) {
                        out.push((x, c));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    out.push(a.coeffs[i].clone());
                    i += 1;
                }
                (Some(_), None) => {
                    out.push(a.coeffs[i].clone());
                    i += 1;
                }
                _ => {
                    out.push(b.coeffs[j].clone());
                    j += 1;
                }
            }
        }
        TensorValue {
            dim: a.dim,
            coeffs: out,
        }
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        debug_assert_eq!(a.dim, b.dim);
        let mut acc: Vec<Option<S::Elem>> = vec![None; self.dim];
        for (u, x) in &a.coeffs {
            for (v, y) in &b.coeffs {
                let mut xy: Option<S::Elem> = None;
                self.for_each_product(*u, *v, |w, sigma| {
                    let base = xy.get_or_insert_with(|| self.scalar.mul(x, y));
                    let term = match sigma {
                        None => base.clone(),
                        Some(c) => self.scalar.mul(base, c),
                    };
                    acc[w] = Some(match acc[w].take() {
                        None => term,
                        Some(prev) => self.scalar.add(&prev, &term),
                    });
                });
            }
        }
        TensorValue {
            dim: self.dim,
            coeffs: acc
                .into_iter()
                .enumerate()
                .filter_map(|(w, c)| c.filter(|c| !self.scalar.is_zero(c)).map(|c| (w, c)))
                .collect(),
        }
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.coeffs.iter().all(|(_, c)| self.scalar.is_zero(c))
    }

    fn eq_within(&self, a: &Self::Elem, b: &Self::Elem, tol: Tolerance) -> bool {
        if a.dim != b.dim {
            return false;
        }
        let zero = self.scalar.zero();
        let (mut i, mut j) = (0, 0);
        while i < a.coeffs.len() || j < b.coeffs.len() {
            let ka = a.coeffs.get(i).map_or(usize::MAX, |c| c.0);
            let kb = b.coeffs.get(j).map_or(usize::MAX, |c| c.0);
            let (x, y) = if ka == kb {
                i += 1;
                j += 1;
                (&a.coeffs[i - 1].1, &b.coeffs[j - 1].1)
            } else if ka < kb {
                i += 1;
                (&a.coeffs[i - 1].1, &zero)
            } else {
                j += 1;
                (&zero, &b.coeffs[j - 1].1)
            };
            if !self.scalar.eq_within(x, y, tol) {
                return false;
            }
        }
        true
    }

    fn is_cancellative(&self) -> bool {
        self.scalar.is_cancellative()
    }

    fn name(&self) -> String {
        let names: Vec<&str> = self.factors.iter().map(|f| f.name.as_str()).collect();
        if names.len() == 1 {
            names[0].to_string()
        } else {
            format!("tensor({})", names.join(","))
        }
    }

    fn repeat_u64(&self, n: u64, a: &Self::Elem) -> Self::Elem {
        TensorValue {
            dim: a.dim,
            coeffs: a
                .coeffs
                .iter()
                .map(|(i, c)| (*i, self.scalar.repeat_u64(n, c)))
                .filter(|(_, c)| !self.scalar.is_zero(c))
                .collect(),
        }
    }
}

impl<S: RandomElem> RandomElem for SemialgebraSpec<S> {
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        let dense = (0..self.dim)
            .map(|_| {
                if rng.gen_ratio(1, 5) {
                    self.scalar.zero()
                } else {
                    self.scalar.random_elem(rng)
                }
            })
            .collect();
        self.from_dense(dense)
    }
}

/// Flat coefficient vector `(c₀;…;c_{d-1})` in basis-tuple order.
impl<S: ValueCodec> ValueCodec for SemialgebraSpec<S> {
    fn parse_value(&self, text: &str) -> Result<Self::Elem, AlgebraError> {
        let name = self.name();
        let parts = split_tuple(&name, text)?;
        if parts.len() != self.dim {
            return Err(parse_err(
                &name,
                text,
                format!("expected {} coefficients", self.dim),
            ));
        }
        let dense = parts
            .iter()
            .map(|p| self.scalar.parse_value(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.from_dense(dense))
    }

    fn format_value(&self, v: &Self::Elem) -> String {
        let parts: Vec<String> = self
            .to_dense(v)
            .iter()
            .map(|c| self.scalar.format_value(c))
            .collect();
        format!("({})", parts.join(";"))
    }
}

impl<S: Semiring> fmt::Display for SemialgebraSpec<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self.name(), self.scalar.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Bc, MaxPlus, Rational, Real};

    fn expectation2() -> SemialgebraSpec<Real> {
        let r = semialgebra_from_semiring(Real).unwrap();
        let b = bc_semialgebra(Real, 1).unwrap();
        tensor_product(&tensor_product(&r, &b).unwrap(), &b).unwrap()
    }

    #[test]
    fn one_dimensional_real() {
        let r = semialgebra_from_semiring(Real).unwrap();
        assert_eq!(r.dim(), 1);
        assert_eq!(r.structure_constants(0, 0), vec![(0, 1.0)]);
        assert_eq!(
            semialgebra_from_semiring(MaxPlus).unwrap_err(),
            SemialgebraError::NotCancellative("maxplus".into())
        );
    }

    #[test]
    fn bc_structure_constants() {
        let b1 = bc_semialgebra(Real, 1).unwrap();
        assert_eq!(b1.structure_constants(0, 1), vec![(1, 1.0)]);
        assert!(b1.structure_constants(1, 1).is_empty());
        let b2 = bc_semialgebra(Real, 2).unwrap();
        assert_eq!(b2.structure_constants(1, 1), vec![(2, 2.0)]);
        for n in 0..=4 {
            bc_semialgebra(Rational, n)
                .unwrap()
                .check_structure()
                .unwrap();
        }
    }

    #[test]
    fn bc_semialgebra_matches_bc_mul() {
        let spec = bc_semialgebra(Rational, 3).unwrap();
        let bc = Bc::new(Rational, 3).unwrap();
        let a: Vec<_> = [1, -2, 3, 5].iter().map(|&x| Rational::int(x)).collect();
        let b: Vec<_> = [2, 0, -1, 4]
            .iter()
            .map(|&x| Rational::frac(x, 3))
            .collect();
        let got = spec.mul(&spec.from_dense(a.clone()), &spec.from_dense(b.clone()));
        assert_eq!(spec.to_dense(&got), bc.mul(&a, &b));
    }

    #[test]
    fn second_order_worked_instance() {
        let spec = expectation2();
        assert_eq!(spec.dim(), 4);
        let a = spec.from_dense(vec![1.0, 2.0, 3.0, 4.0]);
        let b = spec.from_dense(vec![5.0, 6.0, 7.0, 8.0]);
        assert_eq!(
            spec.to_dense(&spec.mul(&a, &b)),
            vec![5.0, 16.0, 22.0, 60.0]
        );
        spec.check_structure().unwrap();
    }

    #[test]
    fn mixed_basis_product() {
        let spec = expectation2();
        // (1⊗ê1⊗ê0)(1⊗ê0⊗ê1) = 1⊗ê1⊗ê1
        let x = spec.basis(spec.flat_index(&[0, 1, 0]));
        let y = spec.basis(spec.flat_index(&[0, 0, 1]));
        assert_eq!(spec.mul(&x, &y), spec.basis(3));
    }

    #[test]
    fn unit_and_zero() {
        let spec = expectation2();
        let t = spec.from_dense(vec![0.5, -1.0, 0.0, 2.0]);
        assert_eq!(spec.mul(&t, &spec.one()), t);
        assert!(spec.is_zero(&spec.mul(&spec.zero(), &t)));
        assert_eq!(t.coeffs().len(), 3);
    }

    #[test]
    fn elementary_tensors_multiply_factorwise() {
        let spec = tensor_product(
            &bc_semialgebra(Rational, 2).unwrap(),
            &bc_semialgebra(Rational, 1).unwrap(),
        )
        .unwrap();
        let bc2 = Bc::new(Rational, 2).unwrap();
        let bc1 = Bc::new(Rational, 1).unwrap();
        let a = vec![Rational::int(1), Rational::int(2), Rational::int(-1)];
        let a2 = vec![Rational::int(3), Rational::frac(1, 2)];
        let b = vec![Rational::int(0), Rational::int(4), Rational::int(1)];
        let b2 = vec![Rational::int(-2), Rational::int(5)];
        let lhs = spec.mul(
            &spec.elementary(&[a.clone(), a2.clone()]).unwrap(),
            &spec.elementary(&[b.clone(), b2.clone()]).unwrap(),
        );
        let rhs = spec
            .elementary(&[bc2.mul(&a, &b), bc1.mul(&a2, &b2)])
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn complex_factor() {
        let c = complex_semialgebra(Real);
        c.check_structure().unwrap();
        let i = c.basis(1);
        assert_eq!(c.to_dense(&c.mul(&i, &i)), vec![-1.0, 0.0]);
    }

    #[test]
    fn spec_mismatch_is_reported() {
        let spec = expectation2();
        let other = bc_semialgebra(Real, 1).unwrap();
        assert!(matches!(
            spec.tensor_mul(&spec.one(), &other.one()),
            Err(SemialgebraError::SpecMismatch { .. })
        ));
    }

    #[test]
    fn broken_constants_are_rejected() {
        // u·u = 1, 1·1 = u: not unital
        let err = SemialgebraSpec::from_structure_constants(
            Rational,
            "broken",
            2,
            |u, v| vec![((u + v + 1) % 2, Rational::int(1))],
            vec![(0, Rational::int(1))],
        )
        .unwrap_err();
        assert!(matches!(err, SemialgebraError::LawViolation { .. }));
    }

    #[test]
    fn codec_round_trip() {
        let spec = expectation2();
        let t = spec.parse_value("(1;0;-2.5;4)").unwrap();
        assert_eq!(spec.format_value(&t), "(1;0;-2.5;4)");
        assert_eq!(spec.name(), "tensor(real,bc1,bc1)");
    }
}
