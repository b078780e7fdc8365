use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::ln_biguint;

use super::GeometryError;

/// Relative width of the floating-point band inside which comparisons fall
/// back to exact integer arithmetic.
const LOG_BAND: f64 = 1e-9;

/// A height bound `B`: an exact positive rational together with the text it
/// was parsed from, which is echoed verbatim in outputs.
#[derive(Clone, Debug)]
pub struct Bound {
    text: String,
    value: BigRational,
}

impl Bound {
    pub fn from_rational(value: BigRational) -> Self {
        Bound {
            text: format_rational_decimal(&value),
            value,
        }
    }

    pub fn from_integer(n: u64) -> Self {
        Bound {
            text: n.to_string(),
            value: BigRational::from_integer(n.into()),
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn ln(&self) -> f64 {
        ln_big_rational(&self.value)
    }

    /// `⌊B⌋`, saturating at `u64::MAX`.
    pub fn floor_u64(&self) -> u64 {
        if self.value.is_negative() {
            return 0;
        }
        self.value.to_integer().to_u64().unwrap_or(u64::MAX)
    }
}

impl PartialEq for Bound {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Eq for Bound {}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl FromStr for Bound {
    type Err = GeometryError;

    /// Accepts integers, decimals, scientific notation (`1e5`, `2.5E3`) and
    /// fractions `p/q`; the conversion is exact.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim().to_string();
        let bad = || GeometryError::Parse(format!("invalid bound {s:?}"));
        let value = if let Some((n, d)) = text.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            BigRational::new(n, d)
        } else {
            parse_decimal(&text).ok_or_else(bad)?
        };
        if !value.is_positive() {
            return Err(GeometryError::Parse(format!("bound must be positive, got {s:?}")));
        }
        Ok(Bound { text, value })
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().ok()? / 10;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow((-scale) as u32))
    };
    if neg {
        value = -value;
    }
    Some(value)
}

fn format_rational_decimal(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn ln_big_rational(r: &BigRational) -> f64 {
    ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude())
}

/// A positive real of the form `∏ base_i^{exp_i}` with positive rational
/// bases and rational exponents, kept exactly so that ties at `H = B` can be
/// decided without rounding.
#[derive(Clone, Debug, Default)]
pub struct HeightValue {
    terms: Vec<(BigRational, BigRational)>,
}

impl HeightValue {
    pub fn one() -> Self {
        Self::default()
    }

    /// `base^exponent`; `base` must be positive.
    pub fn power(base: BigRational, exponent: BigRational) -> Self {
        assert!(base.is_positive(), "height base must be positive");
        let mut h = HeightValue::one();
        h.push(base, exponent);
        h
    }

    pub fn integer_power(base: u64, exponent: BigRational) -> Self {
        Self::power(BigRational::from_integer(base.into()), exponent)
    }

    fn push(&mut self, base: BigRational, exponent: BigRational) {
        if base.is_one() || exponent.is_zero() {
            return;
        }
        self.terms.push((base, exponent));
    }

    pub fn terms(&self) -> &[(BigRational, BigRational)] {
        &self.terms
    }

    pub fn mul(&self, other: &HeightValue) -> HeightValue {
        let mut out = self.clone();
        for (b, e) in &other.terms {
            out.push(b.clone(), e.clone());
        }
        out
    }

    pub fn ln(&self) -> f64 {
        self.terms
            .iter()
            .map(|(b, e)| ln_big_rational(b) * e.to_f64().unwrap_or(f64::NAN))
            .sum()
    }

    /// Integer exponents of moderate size are applied by repeated
    /// multiplication so that integral heights come out exact.
    pub fn to_f64(&self) -> f64 {
        let mut out = 1.0;
        let mut ln_rest = 0.0;
        for (b, e) in &self.terms {
            match (e.is_integer(), e.to_integer().to_i32(), b.to_f64()) {
                (true, Some(k), Some(x)) if k.abs() <= 64 && x.is_normal() => out *= x.powi(k),
                _ => ln_rest += ln_big_rational(b) * e.to_f64().unwrap_or(f64::NAN),
            }
        }
        out * ln_rest.exp()
    }

    /// Exact comparison of two heights.
    pub fn exact_cmp(&self, other: &HeightValue) -> Ordering {
        let mut ratio = self.clone();
        for (b, e) in &other.terms {
            ratio.terms.push((b.clone(), -e.clone()));
        }
        ratio.cmp_one_exact()
    }

    /// `H` compared with `B`: decided in log space unless the two are within
    /// the rounding band, in which case exact integer powers are compared.
    pub fn cmp_bound(&self, bound: &Bound) -> Ordering {
        let diff = self.ln() - bound.ln();
        let band = LOG_BAND * (1.0 + bound.ln().abs());
        if diff > band {
            return Ordering::Greater;
        }
        if diff < -band {
            return Ordering::Less;
        }
        self.exact_cmp(&HeightValue::power(bound.value().clone(), BigRational::one()))
    }

    pub fn le_bound(&self, bound: &Bound) -> bool {
        self.cmp_bound(bound) != Ordering::Greater
    }

    fn cmp_one_exact(&self) -> Ordering {
        let denom = self
            .terms
            .iter()
            .fold(BigInt::one(), |acc, (_, e)| acc.lcm(e.denom()));
        let mut top = BigUint::one();
        let mut bottom = BigUint::one();
        for (b, e) in &self.terms {
            let k = (e.numer() * (&denom / e.denom()))
                .to_i64()
                .expect("height exponent overflow");
            let num = b.numer().magnitude();
            let den = b.denom().magnitude();
            let k_abs = u32::try_from(k.unsigned_abs()).expect("height exponent overflow");
            if k > 0 {
                top *= num.pow(k_abs);
                bottom *= den.pow(k_abs);
            } else if k < 0 {
                top *= den.pow(k_abs);
                bottom *= num.pow(k_abs);
            }
        }
        top.cmp(&bottom)
    }
}

impl PartialEq for HeightValue {
    fn eq(&self, other: &Self) -> bool {
        self.exact_cmp(other) == Ordering::Equal
    }
}
