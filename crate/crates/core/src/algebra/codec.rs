use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{
    AlgebraError, Bc, Complex2, Counted, LogReal, MaxPlus, NatPoly, NatPolySemiring, Rational,
    Real, Semiring,
};

/// Text encoding of semiring values, as used by source-value files and
/// command-line output.
pub trait ValueCodec: Semiring {
    fn parse_value(&self, text: &str) -> Result<Self::Elem, AlgebraError>;
    fn format_value(&self, v: &Self::Elem) -> String;
}

pub(crate) fn parse_err(semiring: &str, text: &str, reason: impl Into<String>) -> AlgebraError {
    AlgebraError::Parse {
        semiring: semiring.into(),
        text: text.into(),
        reason: reason.into(),
    }
}

pub(crate) fn parse_f64(semiring: &str, text: &str) -> Result<f64, AlgebraError> {
    text.trim()
        .parse::<f64>()
        .map_err(|e| parse_err(semiring, text, e.to_string()))
}

/// `%.17g`-style rendering with trailing zeros removed.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if neg { "-" } else { "" };
    if (-5..17).contains(&exp) {
        let (int, frac) = if exp >= 0 {
            let k = exp as usize + 1;
            (digits[..k].to_string(), digits[k..].to_string())
        } else {
            ("0".to_string(), "0".repeat((-exp - 1) as usize) + &digits)
        };
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    } else {
        let frac = digits[1..].trim_end_matches('0');
        let head = &digits[..1];
        if frac.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{frac}e{exp}")
        }
    }
}

/// Splits `(a;b;c)` into its components.
pub(crate) fn split_tuple<'a>(semiring: &str, text: &'a str) -> Result<Vec<&'a str>, AlgebraError> {
    let t = text.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| parse_err(semiring, text, "expected `(c0;...;cn)`"))?;
    Ok(inner.split(';').map(str::trim).collect())
}

impl ValueCodec for Real {
    fn parse_value(&self, text: &str) -> Result<f64, AlgebraError> {
        parse_f64("real", text)
    }
    fn format_value(&self, v: &f64) -> String {
        format_f64(*v)
    }
}

impl ValueCodec for LogReal {
    fn parse_value(&self, text: &str) -> Result<f64, AlgebraError> {
        parse_f64("logreal", text)
    }
    fn format_value(&self, v: &f64) -> String {
        format_f64(*v)
    }
}

impl ValueCodec for MaxPlus {
    fn parse_value(&self, text: &str) -> Result<f64, AlgebraError> {
        parse_f64("maxplus", text)
    }
    fn format_value(&self, v: &f64) -> String {
        format_f64(*v)
    }
}

impl ValueCodec for Complex2 {
    fn parse_value(&self, text: &str) -> Result<(f64, f64), AlgebraError> {
        let (a, b) = text
            .split_once(',')
            .ok_or_else(|| parse_err("complex2", text, "expected `a,b`"))?;
        Ok((parse_f64("complex2", a)?, parse_f64("complex2", b)?))
    }
    fn format_value(&self, v: &(f64, f64)) -> String {
        format!("{},{}", format_f64(v.0), format_f64(v.1))
    }
}

/// Accepts `p/q`, integers and plain decimals, all parsed exactly.
impl ValueCodec for Rational {
    fn parse_value(&self, text: &str) -> Result<BigRational, AlgebraError> {
        let t = text.trim();
        let int = |s: &str| {
            s.parse::<BigInt>()
                .map_err(|e| parse_err("rational", text, e.to_string()))
        };
        if let Some((p, q)) = t.split_once('/') {
            let q = int(q.trim())?;
            if q.is_zero() {
                return Err(parse_err("rational", text, "zero denominator"));
            }
            return Ok(BigRational::new(int(p.trim())?, q));
        }
        if let Some((whole, frac)) = t.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(parse_err("rational", text, "malformed decimal"));
            }
            let num = int(&format!("{whole}{frac}").replace('+', ""))?;
            let den = num_traits::pow(BigInt::from(10), frac.len());
            return Ok(BigRational::new(num, den));
        }
        Ok(BigRational::from_integer(int(t)?))
    }
    fn format_value(&self, v: &BigRational) -> String {
        if v.denom().is_one() {
            v.numer().to_string()
        } else {
            format!("{}/{}", v.numer(), v.denom())
        }
    }
}

/// Sums of `*`-products of naturals, `xK` and `xK^E`, as printed.
impl ValueCodec for NatPolySemiring {
    fn parse_value(&self, text: &str) -> Result<NatPoly, AlgebraError> {
        let err = |reason: String| parse_err("natpoly", text, reason);
        let mut terms = Vec::new();
        for term in text.split('+') {
            let mut exps = vec![0u32; self.n_vars];
            let mut coef = BigUint::one();
            for factor in term.split('*').map(str::trim) {
                if let Some(var) = factor.strip_prefix('x') {
                    let (i, e) = var.split_once('^').unwrap_or((var, "1"));
                    let i: usize = i
                        .parse()
                        .map_err(|_| err(format!("bad indeterminate `{factor}`")))?;
                    let e: u32 = e
                        .parse()
                        .map_err(|_| err(format!("bad exponent in `{factor}`")))?;
                    let slot = exps
                        .get_mut(i)
                        .ok_or_else(|| err(format!("x{i} outside {} variables", self.n_vars)))?;
                    *slot = slot.checked_add(e).ok_or(AlgebraError::ExponentOverflow)?;
                } else {
                    let c: BigUint = factor
                        .parse()
                        .map_err(|_| err(format!("bad factor `{factor}`")))?;
                    coef *= c;
                }
            }
            terms.push((exps, coef));
        }
        NatPoly::from_terms(self.n_vars, terms)
    }
    fn format_value(&self, v: &NatPoly) -> String {
        v.to_string()
    }
}

impl<S: ValueCodec> ValueCodec for Bc<S> {
    fn parse_value(&self, text: &str) -> Result<Vec<S::Elem>, AlgebraError> {
        let parts = split_tuple(&self.name(), text)?;
        if parts.len() != self.order() + 1 {
            return Err(parse_err(
                &self.name(),
                text,
                format!("expected {} components", self.order() + 1),
            ));
        }
        parts.iter().map(|p| self.base().parse_value(p)).collect()
    }
    fn format_value(&self, v: &Vec<S::Elem>) -> String {
        let parts: Vec<String> = v.iter().map(|x| self.base().format_value(x)).collect();
        format!("({})", parts.join(";"))
    }
}

impl<S: ValueCodec> ValueCodec for Counted<S> {
    fn parse_value(&self, text: &str) -> Result<S::Elem, AlgebraError> {
        self.inner().parse_value(text)
    }
    fn format_value(&self, v: &S::Elem) -> String {
        self.inner().format_value(v)
    }
}
