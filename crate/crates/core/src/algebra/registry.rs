use std::fmt;
use std::str::FromStr;

use super::{
    AlgebraError, Bc, Complex2, Counted, LogReal, MaxPlus, NatPolySemiring, OpCounters, RandomElem,
    Rational, Real, ValueCodec,
};
use crate::semialgebra::{
    bc_semialgebra, complex_semialgebra, semialgebra_from_semiring, tensor_product, SemialgebraSpec,
};

/// Scalar instances, usable directly or as the base of `bc(...)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BaseKind {
    Real,
    Rational,
    LogReal,
    MaxPlus,
    Complex2,
}

/// A factor of a registered tensor product.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum FactorKind {
    /// The scalar semiring itself (one-dimensional).
    Scalar,
    /// Complex numbers over the reals (two-dimensional).
    Complex2,
    /// `BCⁿ` over the scalar semiring.
    Bc(usize),
}

/// A semiring named by a command-line style string such as `real`,
/// `natpoly(3)`, `bc(real,2)`, `bc1` or `tensor(real,bc1,bc1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemiringKind {
    Base(BaseKind),
    NatPoly(usize),
    Bc(BaseKind, usize),
    Tensor {
        scalar: BaseKind,
        factors: Vec<FactorKind>,
    },
}

impl BaseKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "real" => Self::Real,
            "rational" => Self::Rational,
            "logreal" => Self::LogReal,
            "maxplus" => Self::MaxPlus,
            "complex2" => Self::Complex2,
            _ => return None,
        })
    }

    fn as_str(self) -> &'static str {
        match self {
            Self::Real => "real",
            Self::Rational => "rational",
            Self::LogReal => "logreal",
            Self::MaxPlus => "maxplus",
            Self::Complex2 => "complex2",
        }
    }
}

/// Splits `name(a, b(c, d))` into `name` and its top-level arguments.
fn split_call(s: &str) -> Result<(&str, Vec<&str>), AlgebraError> {
    let s = s.trim();
    let Some(open) = s.find('(') else {
        return Ok((s, Vec::new()));
    };
    let bad = || AlgebraError::UnknownInstance(s.to_string());
    let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
    let mut args = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                args.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(bad());
        }
    }
    if depth != 0 {
        return Err(bad());
    }
    args.push(inner[start..].trim());
    Ok((s[..open].trim(), args))
}

fn parse_order(s: &str, whole: &str) -> Result<usize, AlgebraError> {
    let n: usize = s
        .trim()
        .parse()
        .map_err(|_| AlgebraError::UnknownInstance(whole.to_string()))?;
    if n > super::MAX_BC_ORDER {
        return Err(AlgebraError::OrderTooLarge(n));
    }
    Ok(n)
}

/// `bcN` shorthand for `bc(real,N)`.
fn short_bc(s: &str) -> Option<&str> {
    s.strip_prefix("bc")
        .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

fn parse_bc(s: &str) -> Result<Option<(BaseKind, usize)>, AlgebraError> {
    if let Some(d) = short_bc(s) {
        return Ok(Some((BaseKind::Real, parse_order(d, s)?)));
    }
    let (name, args) = split_call(s)?;
    if name != "bc" || args.len() != 2 {
        return Ok(None);
    }
    let base = BaseKind::parse(args[0]).ok_or_else(|| AlgebraError::UnknownInstance(s.into()))?;
    Ok(Some((base, parse_order(args[1], s)?)))
}

impl FromStr for SemiringKind {
    type Err = AlgebraError;

    fn from_str(text: &str) -> Result<Self, AlgebraError> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let unknown = || AlgebraError::UnknownInstance(text.to_string());
        if let Some(b) = BaseKind::parse(&s) {
            return Ok(Self::Base(b));
        }
        if let Some((base, n)) = parse_bc(&s)? {
            return Ok(Self::Bc(base, n));
        }
        let (name, args) = split_call(&s)?;
        match name {
            "natpoly" if args.len() == 1 => {
                let n = args[0].parse().map_err(|_| unknown())?;
                Ok(Self::NatPoly(n))
            }
            "tensor" if !args.is_empty() => {
                let mut scalar: Option<BaseKind> = None;
                let mut factors = Vec::new();
                let mut unify = |k: BaseKind| -> Result<(), AlgebraError> {
                    match scalar {
                        Some(prev) if prev != k => Err(AlgebraError::InvalidInstance(format!(
                            "tensor factors over different scalars `{}` and `{}`",
                            prev.as_str(),
                            k.as_str()
                        ))),
                        _ => {
                            scalar = Some(k);
                            Ok(())
                        }
                    }
                };
                for a in args {
                    let f = match BaseKind::parse(a) {
                        Some(BaseKind::Real) => {
                            unify(BaseKind::Real)?;
                            FactorKind::Scalar
                        }
                        Some(BaseKind::Rational) => {
                            unify(BaseKind::Rational)?;
                            FactorKind::Scalar
                        }
                        Some(BaseKind::Complex2) => {
                            unify(BaseKind::Real)?;
                            FactorKind::Complex2
                        }
                        Some(other) => {
                            return Err(AlgebraError::InvalidInstance(format!(
                                "`{}` cannot be a tensor factor",
                                other.as_str()
                            )))
                        }
                        None => match parse_bc(a)? {
                            Some((b @ (BaseKind::Real | BaseKind::Rational), n)) => {
                                unify(b)?;
                                FactorKind::Bc(n)
                            }
                            Some((b, _)) => {
                                return Err(AlgebraError::InvalidInstance(format!(
                                    "bc over `{}` cannot be a tensor factor",
                                    b.as_str()
                                )))
                            }
                            None => return Err(unknown()),
                        },
                    };
                    factors.push(f);
                }
                Ok(Self::Tensor {
                    scalar: scalar.unwrap_or(BaseKind::Real),
                    factors,
                })
            }
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for SemiringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Base(b) => f.write_str(b.as_str()),
            Self::NatPoly(n) => write!(f, "natpoly({n})"),
            Self::Bc(b, n) => write!(f, "bc({},{n})", b.as_str()),
            Self::Tensor { scalar, factors } => {
                let parts: Vec<String> = factors
                    .iter()
                    .map(|k| match (k, scalar) {
                        (FactorKind::Scalar, s) => s.as_str().to_string(),
                        (FactorKind::Complex2, _) => "complex2".into(),
                        (FactorKind::Bc(n), BaseKind::Real) => format!("bc{n}"),
                        (FactorKind::Bc(n), s) => format!("bc({},{n})", s.as_str()),
                    })
                    .collect();
                write!(f, "tensor({})", parts.join(","))
            }
        }
    }
}

impl SemiringKind {
    /// Dimension of the carrier over its scalars, where meaningful.
    pub fn tensor_dim(&self) -> Option<usize> {
        match self {
            Self::Tensor { factors, .. } => Some(
                factors
                    .iter()
                    .map(|f| match f {
                        FactorKind::Scalar => 1,
                        FactorKind::Complex2 => 2,
                        FactorKind::Bc(n) => n + 1,
                    })
                    .product(),
            ),
            _ => None,
        }
    }

    /// The instances exercised by the law suites: every scalar, a
    /// polynomial semiring, `BCⁿ` for `n <= 4` over the cancellative
    /// scalars, and every tensor product of up to three small factors
    /// whose dimension is at most 8.
    pub fn registered() -> Vec<SemiringKind> {
        use BaseKind::*;
        let mut out: Vec<SemiringKind> = [Real, Rational, LogReal, MaxPlus, Complex2]
            .into_iter()
            .map(Self::Base)
            .collect();
        out.push(Self::NatPoly(2));
        for base in [Real, Rational, Complex2] {
            for n in 0..=4 {
                out.push(Self::Bc(base, n));
            }
        }
        let real_factors = [
            FactorKind::Scalar,
            FactorKind::Complex2,
            FactorKind::Bc(1),
            FactorKind::Bc(2),
            FactorKind::Bc(3),
        ];
        let mut tensors: Vec<Vec<FactorKind>> = Vec::new();
        for &a in &real_factors {
            for &b in &real_factors {
                tensors.push(vec![a, b]);
                for &c in &real_factors {
                    tensors.push(vec![a, b, c]);
                }
            }
        }
        for factors in tensors {
            let k = Self::Tensor {
                scalar: Real,
                factors,
            };
            if k.tensor_dim().unwrap() <= 8 {
                out.push(k);
            }
        }
        out.push(Self::Tensor {
            scalar: Rational,
            factors: vec![FactorKind::Scalar, FactorKind::Bc(1), FactorKind::Bc(1)],
        });
        out
    }
}

/// Receives a concrete semiring chosen at run time.
pub trait SemiringVisitor {
    type Output;

    fn visit<S>(self, s: S) -> Self::Output
    where
        S: RandomElem + ValueCodec + Clone + 'static;
}

fn real_factor(
    s: &Counted<Real>,
    f: FactorKind,
) -> Result<SemialgebraSpec<Counted<Real>>, AlgebraError> {
    let spec = match f {
        FactorKind::Scalar => semialgebra_from_semiring(s.clone()),
        FactorKind::Complex2 => Ok(complex_semialgebra(s.clone())),
        FactorKind::Bc(n) => bc_semialgebra(s.clone(), n),
    };
    spec.map_err(|e| AlgebraError::InvalidInstance(e.to_string()))
}

fn rational_factor(
    s: &Counted<Rational>,
    f: FactorKind,
) -> Result<SemialgebraSpec<Counted<Rational>>, AlgebraError> {
    let spec = match f {
        FactorKind::Scalar => semialgebra_from_semiring(s.clone()),
        FactorKind::Bc(n) => bc_semialgebra(s.clone(), n),
        FactorKind::Complex2 => {
            return Err(AlgebraError::InvalidInstance(
                "complex2 factors need real scalars".into(),
            ))
        }
    };
    spec.map_err(|e| AlgebraError::InvalidInstance(e.to_string()))
}

fn fold_tensor<S: crate::algebra::Semiring + Clone>(
    specs: Vec<SemialgebraSpec<S>>,
) -> Result<SemialgebraSpec<S>, AlgebraError> {
    let mut it = specs.into_iter();
    let mut acc = it
        .next()
        .ok_or_else(|| AlgebraError::InvalidInstance("empty tensor product".into()))?;
    for s in it {
        acc = tensor_product(&acc, &s).map_err(|e| AlgebraError::InvalidInstance(e.to_string()))?;
    }
    Ok(acc)
}

/// Instantiates `kind` with every scalar operation counted on `counters`
/// and hands it to `v`.
pub fn dispatch<V: SemiringVisitor>(
    kind: &SemiringKind,
    counters: &OpCounters,
    v: V,
) -> Result<V::Output, AlgebraError> {
    let c = counters.clone();
    let bc = |n| AlgebraError::OrderTooLarge(n);
    Ok(match kind {
        SemiringKind::Base(b) => match b {
            BaseKind::Real => v.visit(Counted::new(Real, c)),
            BaseKind::Rational => v.visit(Counted::new(Rational, c)),
            BaseKind::LogReal => v.visit(Counted::new(LogReal, c)),
            BaseKind::MaxPlus => v.visit(Counted::new(MaxPlus, c)),
            BaseKind::Complex2 => v.visit(Counted::new(Complex2, c)),
        },
        SemiringKind::NatPoly(n) => v.visit(Counted::new(NatPolySemiring::new(*n), c)),
        SemiringKind::Bc(b, n) => match b {
            BaseKind::Real => v.visit(Bc::new(Counted::new(Real, c), *n).map_err(|_| bc(*n))?),
            BaseKind::Rational => {
                v.visit(Bc::new(Counted::new(Rational, c), *n).map_err(|_| bc(*n))?)
            }
            BaseKind::LogReal => {
                v.visit(Bc::new(Counted::new(LogReal, c), *n).map_err(|_| bc(*n))?)
            }
            BaseKind::MaxPlus => {
                v.visit(Bc::new(Counted::new(MaxPlus, c), *n).map_err(|_| bc(*n))?)
            }
            BaseKind::Complex2 => {
                v.visit(Bc::new(Counted::new(Complex2, c), *n).map_err(|_| bc(*n))?)
            }
        },
        SemiringKind::Tensor { scalar, factors } => match scalar {
            BaseKind::Real => {
                let s = Counted::new(Real, c);
                let specs = factors
                    .iter()
                    .map(|&f| real_factor(&s, f))
                    .collect::<Result<Vec<_>, _>>()?;
                v.visit(fold_tensor(specs)?)
            }
            BaseKind::Rational => {
                let s = Counted::new(Rational, c);
                let specs = factors
                    .iter()
                    .map(|&f| rational_factor(&s, f))
                    .collect::<Result<Vec<_>, _>>()?;
                v.visit(fold_tensor(specs)?)
            }
            other => {
                return Err(AlgebraError::InvalidInstance(format!(
                    "tensor products over `{}` are not supported",
                    other.as_str()
                )))
            }
        },
    })
}

/// Runs the structure-constant checks (commutativity, associativity, unit)
/// on instances that are built from structure constants: tensor products
/// and `bc(real, n)` / `bc(rational, n)`. `Ok(false)` means the instance has
/// no structure constants to check.
pub fn check_structure_constants(kind: &SemiringKind) -> Result<bool, AlgebraError> {
    let c = OpCounters::new();
    let invalid =
        |e: crate::semialgebra::SemialgebraError| AlgebraError::InvalidInstance(e.to_string());
    match kind {
        SemiringKind::Tensor {
            scalar: BaseKind::Real,
            factors,
        } => {
            let s = Counted::new(Real, c);
            let specs = factors
                .iter()
                .map(|&f| real_factor(&s, f))
                .collect::<Result<Vec<_>, _>>()?;
            fold_tensor(specs)?.check_structure().map_err(invalid)?;
        }
        SemiringKind::Tensor {
            scalar: BaseKind::Rational,
            factors,
        } => {
            let s = Counted::new(Rational, c);
            let specs = factors
                .iter()
                .map(|&f| rational_factor(&s, f))
                .collect::<Result<Vec<_>, _>>()?;
            fold_tensor(specs)?.check_structure().map_err(invalid)?;
        }
        SemiringKind::Bc(BaseKind::Real, n) => {
            bc_semialgebra(Real, *n)
                .map_err(invalid)?
                .check_structure()
                .map_err(invalid)?;
        }
        SemiringKind::Bc(BaseKind::Rational, n) => {
            bc_semialgebra(Rational, *n)
                .map_err(invalid)?
                .check_structure()
                .map_err(invalid)?;
        }
        _ => return Ok(false),
    }
    Ok(true)
}

/// Convenience visitor returning the instance name.
pub struct NameOf;

impl SemiringVisitor for NameOf {
    type Output = String;
    fn visit<S>(self, s: S) -> String
    where
        S: RandomElem + ValueCodec + Clone + 'static,
    {
        s.name()
    }
}
