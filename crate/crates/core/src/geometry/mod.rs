//! Points of the built-in geometries, their intersection multiplicities with
//! the boundary, Darmon and Campana classification, and heights.
//!
//! Every quantity has a definitional route (valuations of coordinate ratios,
//! place-by-place heights) and a closed-form route used by the enumerators.

mod height;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{
    bigint_valuation, factorize, is_prime, primitive_coords, primitive_integers, ArithError, Rational, Valuation,
};
use crate::orbifold::{ModelKind, OrbifoldModel, PlaceSet, Weight};

pub use height::{Bound, HeightValue};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("point lies on boundary divisor")]
    BoundaryPoint,
    #[error("point does not belong to model {0}")]
    ModelMismatch(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Primitive integer coordinates `(x_0 : … : x_n)` of a point of `ℙⁿ(ℚ)`,
/// first nonzero coordinate positive. The boundary is `x_n = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjectivePoint {
    coords: Vec<BigInt>,
}

impl ProjectivePoint {
    /// Normalizes `coords`; rejects points on the boundary `x_n = 0`.
    pub fn new(coords: Vec<BigInt>) -> Result<Self, GeometryError> {
        if coords.len() < 2 {
            return Err(GeometryError::Parse("need at least two coordinates".into()));
        }
        let coords = primitive_integers(&coords)?;
        if coords.last().is_some_and(Zero::is_zero) {
            return Err(GeometryError::BoundaryPoint);
        }
        Ok(ProjectivePoint { coords })
    }

    pub fn from_rationals(xs: &[Rational]) -> Result<Self, GeometryError> {
        if xs.len() < 2 {
            return Err(GeometryError::Parse("need at least two coordinates".into()));
        }
        if xs.last().is_some_and(Rational::is_zero) {
            return Err(GeometryError::BoundaryPoint);
        }
        Ok(ProjectivePoint {
            coords: primitive_coords(xs)?,
        })
    }

    /// The point with affine coordinates `x_i / x_n = a_i`.
    pub fn from_affine(affine: &[Rational]) -> Result<Self, GeometryError> {
        let mut xs = affine.to_vec();
        xs.push(Rational::one());
        Self::from_rationals(&xs)
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn dimension(&self) -> usize {
        self.coords.len() - 1
    }

    fn last(&self) -> &BigInt {
        self.coords.last().expect("nonempty")
    }

    /// `x_i / x_n` for `i < n`.
    pub fn affine(&self) -> Vec<Rational> {
        let xn = self.last();
        self.coords[..self.dimension()]
            .iter()
            .map(|x| Rational::new(x.clone(), xn.clone()).expect("x_n nonzero"))
            .collect()
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(":"))
    }
}

/// A point of the open orbit of the blow-up, given by the affine coordinates
/// `u = x_1/x_0`, `w = x_2/x_0`. The `ℙ¹` coordinates `(y_0 : y_1)` equal
/// `(x_0 : x_1)` and are not stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlowupPoint {
    u: Rational,
    w: Rational,
    triple: [BigInt; 3],
}

impl BlowupPoint {
    pub fn from_affine(u: Rational, w: Rational) -> Self {
        let v = primitive_coords(&[Rational::one(), u.clone(), w.clone()])
            .expect("first coordinate is 1");
        let [x0, x1, x2]: [BigInt; 3] = v.try_into().expect("three coordinates");
        BlowupPoint {
            u,
            w,
            triple: [x0, x1, x2],
        }
    }

    /// From `(x_0 : x_1 : x_2)` with `x_0 ≠ 0`.
    pub fn from_triple(x0: BigInt, x1: BigInt, x2: BigInt) -> Result<Self, GeometryError> {
        if x0.is_zero() {
            return Err(GeometryError::BoundaryPoint);
        }
        let u = Rational::new(x1, x0.clone())?;
        let w = Rational::new(x2, x0)?;
        Ok(Self::from_affine(u, w))
    }

    pub fn u(&self) -> &Rational {
        &self.u
    }

    pub fn w(&self) -> &Rational {
        &self.w
    }

    /// Primitive `(x_0, x_1, x_2)` with `x_0 > 0`.
    pub fn triple(&self) -> &[BigInt; 3] {
        &self.triple
    }
}

impl fmt::Display for BlowupPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.u, self.w)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Projective(ProjectivePoint),
    Blowup(BlowupPoint),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Projective(p) => p.fmt(f),
            Point::Blowup(p) => p.fmt(f),
        }
    }
}

impl From<ProjectivePoint> for Point {
    fn from(p: ProjectivePoint) -> Self {
        Point::Projective(p)
    }
}

impl From<BlowupPoint> for Point {
    fn from(p: BlowupPoint) -> Self {
        Point::Blowup(p)
    }
}

/// Parses point text for `model`: `p/q` or `x0:x1` on ℙ¹, `x0:…:xn` on ℙⁿ,
/// `u,w` on the blow-up.
pub fn parse_point(text: &str, model: &OrbifoldModel) -> Result<Point, GeometryError> {
    let text = text.trim();
    match model.kind {
        ModelKind::ProjectiveSpace { n } => {
            let p = if text.contains(':') {
                let coords = text
                    .split(':')
                    .map(|c| c.trim().parse::<Rational>())
                    .collect::<Result<Vec<_>, _>>()?;
                if coords.len() != n as usize + 1 {
                    return Err(GeometryError::Parse(format!(
                        "expected {} coordinates, got {}",
                        n + 1,
                        coords.len()
                    )));
                }
                ProjectivePoint::from_rationals(&coords)?
            } else if n == 1 {
                ProjectivePoint::from_affine(&[text.parse::<Rational>()?])?
            } else {
                return Err(GeometryError::Parse(format!(
                    "expected x0:…:x{n}, got {text:?}"
                )));
            };
            Ok(Point::Projective(p))
        }
        ModelKind::BlowupP2 => {
            let (u, w) = text
                .split_once(',')
                .ok_or_else(|| GeometryError::Parse(format!("expected u,w, got {text:?}")))?;
            Ok(Point::Blowup(BlowupPoint::from_affine(
                u.trim().parse()?,
                w.trim().parse()?,
            )))
        }
        ModelKind::Custom(ref name) => Err(GeometryError::ModelMismatch(name.clone())),
    }
}

/// Intersection multiplicities `n_p(D_α, P)`, in the model's component order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityVector(pub Vec<u64>);

impl MultiplicityVector {
    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }
}

fn finite_or(v: Valuation, default: i64) -> i64 {
    v.finite().unwrap_or(default)
}

/// `max{0, v_p(x_n/x_0), …, v_p(x_n/x_{n-1})}` evaluated literally on
/// arbitrary (not necessarily primitive) rational coordinates.
pub fn pn_multiplicity(coords: &[Rational], p: u64) -> Result<u64, GeometryError> {
    let (xn, rest) = coords.split_last().ok_or(GeometryError::BoundaryPoint)?;
    if xn.is_zero() {
        return Err(GeometryError::BoundaryPoint);
    }
    let mut best = 0i64;
    for xi in rest {
        if xi.is_zero() {
            continue; // v(x_n / 0) = -∞
        }
        let v = (xn / xi).valuation(p)?;
        best = best.max(finite_or(v, 0));
    }
    Ok(best as u64)
}

pub fn multiplicities_pn(point: &ProjectivePoint, p: u64) -> Result<MultiplicityVector, GeometryError> {
    let coords: Vec<Rational> = point.coords.iter().cloned().map(Rational::from_integer).collect();
    Ok(MultiplicityVector(vec![pn_multiplicity(&coords, p)?]))
}

fn int_valuation(x: &BigInt, p: u64) -> Result<Valuation, GeometryError> {
    Ok(Rational::from_integer(x.clone()).valuation(p)?)
}

/// `n(D1) = min{v(x_0), v(x_1)}` and `n(D2) = max{0, v(x_0) - v(x_1)}` on the
/// primitive triple. The second is the convention compatible with the height
/// pairing; see [`d2_convention_diagnostic`].
pub fn multiplicities_blowup(point: &BlowupPoint, p: u64) -> Result<MultiplicityVector, GeometryError> {
    let [x0, x1, _] = &point.triple;
    let v0 = finite_or(int_valuation(x0, p)?, 0);
    let v1 = int_valuation(x1, p)?;
    let n1 = match v1 {
        Valuation::Infinity => v0,
        Valuation::Finite(v1) => v0.min(v1),
    };
    let n2 = match v1 {
        Valuation::Infinity => 0,
        Valuation::Finite(v1) => (v0 - v1).max(0),
    };
    Ok(MultiplicityVector(vec![n1 as u64, n2 as u64]))
}

pub fn multiplicities(
    point: &Point,
    model: &OrbifoldModel,
    p: u64,
) -> Result<MultiplicityVector, GeometryError> {
    match (point, &model.kind) {
        (Point::Projective(x), ModelKind::ProjectiveSpace { n }) if x.dimension() == *n as usize => {
            multiplicities_pn(x, p)
        }
        (Point::Blowup(x), ModelKind::BlowupP2) => multiplicities_blowup(x, p),
        _ => Err(mismatch(model)),
    }
}

fn mismatch(model: &OrbifoldModel) -> GeometryError {
    GeometryError::ModelMismatch(format!("{:?}", model.kind))
}

/// Primes at which some multiplicity can be nonzero.
pub fn relevant_primes(point: &Point) -> Result<Vec<u64>, GeometryError> {
    let n: &BigInt = match point {
        Point::Projective(x) => x.last(),
        Point::Blowup(x) => &x.triple[0],
    };
    let f = factorize(n.magnitude())?;
    f.iter()
        .map(|(p, _)| {
            p.to_u64()
                .ok_or_else(|| GeometryError::Parse("prime exceeds u64".into()))
        })
        .collect()
}

/// Admissible multiplicities per component weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `m | n`.
    Darmon,
    /// `n = 0` or `n >= m`.
    Campana,
}

impl Condition {
    pub fn admits(self, n: u64, weight: Weight) -> bool {
        match (self, weight) {
            (_, Weight::Infinite) => n == 0,
            (Condition::Darmon, Weight::Finite(m)) => n % m as u64 == 0,
            (Condition::Campana, Weight::Finite(m)) => campana_admits(n, m),
        }
    }
}

/// The Campana multiplicity condition, isolated so the convention can be swapped.
pub fn campana_admits(n: u64, m: u32) -> bool {
    n == 0 || n >= m as u64
}

pub fn satisfies(
    point: &Point,
    model: &OrbifoldModel,
    s: &PlaceSet,
    condition: Condition,
) -> Result<bool, GeometryError> {
    check_compatible(point, model)?;
    // Multiplicities vanish at primes not dividing the relevant coordinate.
    for p in relevant_primes(point)? {
        if s.contains(p) {
            continue;
        }
        let mult = multiplicities(point, model, p)?;
        let ok = mult
            .0
            .iter()
            .zip(&model.components)
            .all(|(&n, c)| condition.admits(n, c.weight));
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_compatible(point: &Point, model: &OrbifoldModel) -> Result<(), GeometryError> {
    match (point, &model.kind) {
        (Point::Projective(x), ModelKind::ProjectiveSpace { n }) if x.dimension() == *n as usize => Ok(()),
        (Point::Blowup(_), ModelKind::BlowupP2) => Ok(()),
        _ => Err(mismatch(model)),
    }
}

pub fn is_darmon(point: &Point, model: &OrbifoldModel, s: &PlaceSet) -> Result<bool, GeometryError> {
    satisfies(point, model, s, Condition::Darmon)
}

pub fn is_campana(point: &Point, model: &OrbifoldModel, s: &PlaceSet) -> Result<bool, GeometryError> {
    satisfies(point, model, s, Condition::Campana)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Finite(u64),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinity => f.write_str("inf"),
        }
    }
}

fn blowup_exponents(model: &OrbifoldModel) -> (BigRational, BigRational) {
    let l1 = model.components[0].lambda.clone();
    let l2 = model.components[1].lambda.clone();
    let mu = &l2 - &l1;
    (l1, mu)
}

fn max_abs(xs: impl IntoIterator<Item = BigRational>) -> BigRational {
    xs.into_iter()
        .map(|x| x.abs())
        .fold(BigRational::one(), |a, b| if b > a { b } else { a })
}

/// `-v_p(x)` for a prime `p` already checked by the caller; `|0|_p = 0`
/// contributes nothing to a max with 1.
fn neg_val(x: &Rational, p: u64) -> i64 {
    if x.is_zero() {
        return i64::MIN;
    }
    bigint_valuation(x.denom(), p) as i64 - bigint_valuation(x.numer(), p) as i64
}

fn check_prime(p: u64) -> Result<(), GeometryError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p.to_string()).into());
    }
    Ok(())
}

/// `H_v(P)`. At a finite prime the result is a single power `p^{e}`.
pub fn local_height(point: &Point, model: &OrbifoldModel, place: Place) -> Result<HeightValue, GeometryError> {
    match (point, &model.kind) {
        (Point::Projective(x), ModelKind::ProjectiveSpace { n }) if x.dimension() == *n as usize => {
            let affine = x.affine();
            match place {
                Place::Infinity => Ok(HeightValue::power(
                    max_abs(affine.iter().map(|a| a.as_big().clone())),
                    BigRational::one(),
                )),
                Place::Finite(p) => {
                    check_prime(p)?;
                    let mut e = 0i64;
                    for a in &affine {
                        e = e.max(neg_val(a, p));
                    }
                    Ok(HeightValue::integer_power(p, BigRational::from_integer(e.into())))
                }
            }
        }
        (Point::Blowup(x), ModelKind::BlowupP2) => {
            let (l1, mu) = blowup_exponents(model);
            match place {
                Place::Infinity => {
                    let first = max_abs([x.u.as_big().clone(), x.w.as_big().clone()]);
                    let second = max_abs([x.u.as_big().clone()]);
                    Ok(HeightValue::power(first, l1).mul(&HeightValue::power(second, mu)))
                }
                Place::Finite(p) => {
                    check_prime(p)?;
                    let a = 0.max(neg_val(&x.u, p)).max(neg_val(&x.w, p));
                    let b = 0.max(neg_val(&x.u, p));
                    let e = l1 * BigRational::from_integer(a.into())
                        + mu * BigRational::from_integer(b.into());
                    Ok(HeightValue::integer_power(p, e))
                }
            }
        }
        _ => Err(mismatch(model)),
    }
}

/// Exponent `e` with `H_p(P) = p^e` at a finite prime.
pub fn local_height_exponent(point: &Point, model: &OrbifoldModel, p: u64) -> Result<BigRational, GeometryError> {
    let h = local_height(point, model, Place::Finite(p))?;
    Ok(h.terms().first().map(|(_, e)| e.clone()).unwrap_or_else(BigRational::zero))
}

/// Places where `H_v(P)` can differ from 1, `∞` last.
pub fn height_places(point: &Point) -> Result<Vec<Place>, GeometryError> {
    let mut out: Vec<Place> = relevant_primes(point)?.into_iter().map(Place::Finite).collect();
    out.push(Place::Infinity);
    Ok(out)
}

/// `∏_v H_v(P)` computed place by place.
pub fn global_height(point: &Point, model: &OrbifoldModel) -> Result<HeightValue, GeometryError> {
    let mut h = HeightValue::one();
    for place in height_places(point)? {
        h = h.mul(&local_height(point, model, place)?);
    }
    Ok(h)
}

/// Closed-form global height: `max |x_i|` on ℙⁿ, and
/// `max(|x_0|,|x_1|,|x_2|)^{λ_1} (max(|x_0|,|x_1|)/gcd(x_0,x_1))^{λ_2-λ_1}` on the blow-up.
pub fn global_height_closed(point: &Point, model: &OrbifoldModel) -> Result<HeightValue, GeometryError> {
    match (point, &model.kind) {
        (Point::Projective(x), ModelKind::ProjectiveSpace { n }) if x.dimension() == *n as usize => {
            let m = x.coords.iter().map(|c| c.magnitude().clone()).max().expect("nonempty");
            Ok(HeightValue::power(big_uint_rational(m), BigRational::one()))
        }
        (Point::Blowup(x), ModelKind::BlowupP2) => {
            let (l1, mu) = blowup_exponents(model);
            let [x0, x1, x2] = &x.triple;
            let big_m = x0.magnitude().max(x1.magnitude()).max(x2.magnitude()).clone();
            let pair = x0.magnitude().max(x1.magnitude()).clone();
            let g = x0.gcd(x1).magnitude().clone();
            Ok(HeightValue::power(big_uint_rational(big_m), l1)
                .mul(&HeightValue::power(big_uint_rational(pair / g), mu)))
        }
        _ => Err(mismatch(model)),
    }
}

fn big_uint_rational(n: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Both readings of the `D2` multiplicity at `p`, against the local height exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D2Diagnostic {
    pub height_exponent: BigRational,
    /// `λ_1 n_1 + λ_2 n_2` with `n_2 = max{0, v(x_0) - v(x_1)}`.
    pub pairing_with_implemented: BigRational,
    /// `λ_1 n_1 + λ_2 n_2` with the literal `n_2 = max{0, v(x_1/x_0)}`.
    pub pairing_with_literal: BigRational,
}

impl D2Diagnostic {
    pub fn literal_is_consistent(&self) -> bool {
        self.pairing_with_literal == self.height_exponent
    }
}

pub fn d2_convention_diagnostic(
    point: &BlowupPoint,
    model: &OrbifoldModel,
    p: u64,
) -> Result<D2Diagnostic, GeometryError> {
    if model.kind != ModelKind::BlowupP2 {
        return Err(mismatch(model));
    }
    let as_point = Point::Blowup(point.clone());
    let height_exponent = local_height_exponent(&as_point, model, p)?;
    let mult = multiplicities_blowup(point, p)?;
    let l1 = &model.components[0].lambda;
    let l2 = &model.components[1].lambda;
    let lit_n2 = match point.u.valuation(p)? {
        Valuation::Infinity => 0,
        Valuation::Finite(v) => v.max(0),
    };
    let q = |n: u64| BigRational::from_integer(BigInt::from(n));
    let q_i = |n: i64| BigRational::from_integer(BigInt::from(n));
    Ok(D2Diagnostic {
        height_exponent,
        pairing_with_implemented: l1 * q(mult.0[0]) + l2 * q(mult.0[1]),
        pairing_with_literal: l1 * q(mult.0[0]) + l2 * q_i(lit_n2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn pn(coords: &[i64]) -> ProjectivePoint {
        ProjectivePoint::new(coords.iter().map(|&c| BigInt::from(c)).collect()).unwrap()
    }

    fn bp(u: &str, w: &str) -> BlowupPoint {
        BlowupPoint::from_affine(q(u), q(w))
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pn_multiplicity_examples() {
        assert_eq!(multiplicities_pn(&pn(&[4, 9]), 3).unwrap().0, vec![2]);
        assert_eq!(multiplicities_pn(&pn(&[4, 9]), 2).unwrap().0, vec![0]);
        for p in [2, 3, 5] {
            assert_eq!(multiplicities_pn(&pn(&[1, 0, 1]), p).unwrap().0, vec![0]);
        }
    }

    #[test]
    fn boundary_rejected() {
        assert_eq!(
            ProjectivePoint::new(vec![BigInt::from(1), BigInt::from(0)]),
            Err(GeometryError::BoundaryPoint)
        );
        assert_eq!(BlowupPoint::from_triple(0.into(), 1.into(), 1.into()), Err(GeometryError::BoundaryPoint));
        let p1 = OrbifoldModel::projective_space(1, 2).unwrap();
        assert_eq!(parse_point("1:0", &p1), Err(GeometryError::BoundaryPoint));
        assert!(matches!(parse_point("1/0", &p1), Err(GeometryError::Arith(ArithError::ZeroDenominator))));
    }

    #[test]
    fn blowup_multiplicity_examples() {
        let p = bp("1/4", "3/2");
        assert_eq!(p.triple(), &[BigInt::from(4), BigInt::from(1), BigInt::from(6)]);
        assert_eq!(multiplicities_blowup(&p, 2).unwrap().0, vec![0, 2]);
        assert_eq!(multiplicities_blowup(&bp("4", "1"), 2).unwrap().0, vec![0, 0]);
        assert_eq!(multiplicities_blowup(&bp("2/9", "5/9"), 3).unwrap().0, vec![0, 2]);
        // x_1 = 0: the point sits over the centre's fibre direction, n(D1) = v(x_0).
        assert_eq!(multiplicities_blowup(&bp("0", "1/8"), 2).unwrap().0, vec![3, 0]);
    }

    #[test]
    fn p1_classification() {
        let m2 = OrbifoldModel::projective_space(1, 2).unwrap();
        let inf = PlaceSet::archimedean();
        let pt = |s: &str| parse_point(s, &m2).unwrap();
        assert!(is_darmon(&pt("4/9"), &m2, &inf).unwrap());
        assert!(!is_darmon(&pt("1/2"), &m2, &inf).unwrap());
        assert!(is_darmon(&pt("1/2"), &m2, &PlaceSet::new([2]).unwrap()).unwrap());
        assert!(is_campana(&pt("1/8"), &m2, &inf).unwrap());
        assert!(!is_campana(&pt("1/2"), &m2, &inf).unwrap());
        assert!(!is_darmon(&pt("1/8"), &m2, &inf).unwrap());
    }

    #[test]
    fn blowup_classification_example() {
        let m = OrbifoldModel::blowup_p2(2, 1).unwrap();
        let p = parse_point("1/4,3/2", &m).unwrap();
        assert!(is_darmon(&p, &m, &PlaceSet::archimedean()).unwrap());
    }

    #[test]
    fn p1_heights() {
        let m = OrbifoldModel::projective_space(1, 1).unwrap();
        let x = parse_point("3/2", &m).unwrap();
        assert!((local_height(&x, &m, Place::Infinity).unwrap().to_f64() - 1.5).abs() < 1e-15);
        assert_eq!(local_height_exponent(&x, &m, 2).unwrap(), rat(1, 1));
        assert_eq!(local_height_exponent(&x, &m, 3).unwrap(), rat(0, 1));
        let h = |s: &str| global_height(&parse_point(s, &m).unwrap(), &m).unwrap();
        assert!(h("-7/4") == HeightValue::integer_power(7, rat(1, 1)));
        assert!(h("0") == HeightValue::one());
    }

    #[test]
    fn blowup_heights() {
        let m = OrbifoldModel::blowup_p2(1, 1).unwrap();
        let x = parse_point("1/2,3", &m).unwrap();
        assert!((local_height(&x, &m, Place::Infinity).unwrap().to_f64() - 9.0).abs() < 1e-12);
        assert_eq!(local_height_exponent(&x, &m, 2).unwrap(), rat(3, 1));
        let place_by_place = global_height(&x, &m).unwrap();
        let closed = global_height_closed(&x, &m).unwrap();
        assert!(place_by_place == closed);
        assert!(closed == HeightValue::integer_power(72, rat(1, 1)));
        // The finite part is the pairing p^{λ1 n1 + λ2 n2}.
        let mult = multiplicities(&x, &m, 2).unwrap();
        assert_eq!(mult.0, vec![0, 1]);
    }

    #[test]
    fn literal_d2_reading_breaks_pairing() {
        let m = OrbifoldModel::blowup_p2(1, 1).unwrap();
        let d = d2_convention_diagnostic(&bp("1/4", "3/2"), &m, 2).unwrap();
        assert_eq!(d.pairing_with_implemented, d.height_exponent);
        assert!(!d.literal_is_consistent());
    }

    #[test]
    fn parse_errors() {
        let b = OrbifoldModel::blowup_p2(1, 1).unwrap();
        assert!(parse_point("1/2", &b).is_err());
        let p2 = OrbifoldModel::projective_space(2, 1).unwrap();
        assert!(parse_point("1:2", &p2).is_err());
        assert!(parse_point("1/2", &p2).is_err());
        assert!(parse_point("1:2:3", &p2).is_ok());
    }
}
