//! Campana orbifold descriptors: boundary components with their anticanonical
//! and height coefficients, weights `m_α`, and the boundary stratum counts used
//! by the local-factor evaluator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::arith::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrbifoldError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse model description: {0}")]
    Parse(String),
}

/// The weight of a boundary component: `Finite(m)` is `ε = 1 - 1/m`,
/// `Infinite` is `ε = 1` (an integrality condition).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Weight {
    Finite(u32),
    Infinite,
}

impl Weight {
    pub fn epsilon(self) -> BigRational {
        match self {
            Weight::Finite(m) => BigRational::one() - BigRational::new(1.into(), m.into()),
            Weight::Infinite => BigRational::one(),
        }
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Weight::Finite(m) => Some(m),
            Weight::Infinite => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryComponent {
    pub label: String,
    /// Coefficient of the component in `-K_X`.
    pub rho: i64,
    /// Coefficient of the component in the height line bundle `L`.
    pub lambda: BigRational,
    pub weight: Weight,
}

impl BoundaryComponent {
    pub fn new(label: impl Into<String>, rho: i64, lambda: BigRational, weight: Weight) -> Self {
        BoundaryComponent {
            label: label.into(),
            rho,
            lambda,
            weight,
        }
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64().unwrap_or(f64::NAN)
    }

    /// `(ρ - ε) / λ`.
    pub fn ratio(&self) -> BigRational {
        (BigRational::from_integer(self.rho.into()) - self.weight.epsilon()) / &self.lambda
    }

    /// The exponent `m (sλ - ρ + 1)` of the local zeta factor, as a float
    /// function of real `s`; `m` is replaced by 1 when the condition is waived.
    pub fn zeta_exponent(&self, s: f64, waived: bool) -> Option<f64> {
        let m = if waived { 1 } else { self.weight.finite()? };
        let lambda = self.lambda.to_f64().unwrap_or(f64::NAN);
        Some(m as f64 * (s * lambda - self.rho as f64 + 1.0))
    }
}

/// Integer polynomial in `q`, coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountPoly(pub Vec<i64>);

impl CountPoly {
    pub fn monomial(degree: usize) -> Self {
        let mut c = vec![0; degree + 1];
        c[degree] = 1;
        CountPoly(c)
    }

    /// `1 + q + … + q^{n-1}`, the point count of `ℙ^{n-1}`.
    pub fn projective(n: usize) -> Self {
        CountPoly(vec![1; n.max(1)])
    }

    pub fn eval_i128(&self, q: i128) -> i128 {
        self.0.iter().rev().fold(0i128, |acc, &c| acc * q + c as i128)
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * q + c as f64)
    }
}

/// Point counts `#D°_B(k_v)` of the open boundary strata, keyed by the sorted
/// set of component labels `B` (the empty key is the open orbit).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StratumTable {
    entries: BTreeMap<Vec<String>, CountPoly>,
}

impl StratumTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert<S: AsRef<str>>(&mut self, labels: &[S], count: CountPoly) {
        let mut key: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        key.sort();
        key.dedup();
        self.entries.insert(key, count);
    }

    pub fn get<S: AsRef<str>>(&self, labels: &[S]) -> Option<&CountPoly> {
        let mut key: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        key.sort();
        self.entries.get(&key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[String], &CountPoly)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// `#X(k) = Σ_B #D°_B(k)` at `q`.
    pub fn total_count(&self, q: i128) -> i128 {
        self.entries.values().map(|c| c.eval_i128(q)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelKind {
    ProjectiveSpace { n: u32 },
    BlowupP2,
    Custom(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbifoldModel {
    pub kind: ModelKind,
    pub dimension: u32,
    pub components: Vec<BoundaryComponent>,
    pub strata: StratumTable,
}

impl OrbifoldModel {
    /// `(ℙⁿ, (1 - 1/m) D)` with `D = {x_n = 0}` and `L = O(1)`.
    pub fn projective_space(n: u32, m: u32) -> Result<Self, OrbifoldError> {
        if n == 0 {
            return Err(OrbifoldError::InvalidParameter("n must be >= 1".into()));
        }
        check_m("m", m)?;
        let mut strata = StratumTable::new();
        strata.insert::<&str>(&[], CountPoly::monomial(n as usize));
        strata.insert(&["D"], CountPoly::projective(n as usize));
        Ok(OrbifoldModel {
            kind: ModelKind::ProjectiveSpace { n },
            dimension: n,
            components: vec![BoundaryComponent::new(
                "D",
                n as i64 + 1,
                BigRational::one(),
                Weight::Finite(m),
            )],
            strata,
        })
    }

    /// The blow-up of ℙ² at a point with `L = -(K_X + D_ε)`.
    pub fn blowup_p2(m1: u32, m2: u32) -> Result<Self, OrbifoldError> {
        check_m("m1", m1)?;
        check_m("m2", m2)?;
        let inv = |m: u32| BigRational::new(BigInt::one(), m.into());
        let mut strata = StratumTable::new();
        strata.insert::<&str>(&[], CountPoly::monomial(2));
        strata.insert(&["D1"], CountPoly::monomial(1));
        strata.insert(&["D2"], CountPoly::monomial(1));
        strata.insert(&["D1", "D2"], CountPoly::monomial(0));
        Ok(OrbifoldModel {
            kind: ModelKind::BlowupP2,
            dimension: 2,
            components: vec![
                BoundaryComponent::new("D1", 2, BigRational::one() + inv(m1), Weight::Finite(m1)),
                BoundaryComponent::new(
                    "D2",
                    3,
                    BigRational::from_integer(2.into()) + inv(m2),
                    Weight::Finite(m2),
                ),
            ],
            strata,
        })
    }

    /// Arbitrary component and stratum data; only the invariants and the
    /// stratum-table local factor are available for such models.
    pub fn custom(
        name: impl Into<String>,
        dimension: u32,
        components: Vec<BoundaryComponent>,
        strata: StratumTable,
    ) -> Self {
        OrbifoldModel {
            kind: ModelKind::Custom(name.into()),
            dimension,
            components,
            strata,
        }
    }

    pub fn component(&self, label: &str) -> Option<&BoundaryComponent> {
        self.components.iter().find(|c| c.label == label)
    }

    pub fn weights(&self) -> Vec<Weight> {
        self.components.iter().map(|c| c.weight).collect()
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.kind, ModelKind::Custom(_))
    }

    /// `a = max_α (ρ_α - ε_α) / λ_α`. Panics on a model without components.
    pub fn a_invariant(&self) -> BigRational {
        self.components
            .iter()
            .map(BoundaryComponent::ratio)
            .max()
            .expect("model has no boundary components")
    }

    /// Labels of the components attaining the maximum in [`Self::a_invariant`].
    pub fn critical_set(&self) -> Vec<String> {
        let a = self.a_invariant();
        self.components
            .iter()
            .filter(|c| c.ratio() == a)
            .map(|c| c.label.clone())
            .collect()
    }

    pub fn b_invariant(&self) -> usize {
        self.critical_set().len()
    }

    /// Structural problems with the model; empty when valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.components.is_empty() {
            out.push(Violation::NoComponents);
        }
        let mut seen = BTreeSet::new();
        for c in &self.components {
            if !seen.insert(c.label.as_str()) {
                out.push(Violation::DuplicateLabel(c.label.clone()));
            }
            if c.rho < 2 {
                out.push(Violation::RhoTooSmall {
                    label: c.label.clone(),
                    rho: c.rho,
                });
            }
            if !c.lambda.is_positive() {
                out.push(Violation::NonPositiveLambda(c.label.clone()));
            }
            if c.weight == Weight::Finite(0) {
                out.push(Violation::ZeroWeight(c.label.clone()));
            }
        }
        match self.strata.get::<&str>(&[]) {
            Some(p) if *p == CountPoly::monomial(self.dimension as usize) => {}
            _ => out.push(Violation::MissingOpenStratum),
        }
        for (key, poly) in self.strata.iter() {
            for label in key {
                if self.component(label).is_none() {
                    out.push(Violation::UnknownLabel(label.clone()));
                }
            }
            for q in [2i128, 3, 5, 7] {
                if poly.eval_i128(q) < 0 {
                    out.push(Violation::NegativeCount {
                        stratum: key.to_vec(),
                        q: q as u64,
                    });
                }
            }
        }
        out
    }

    /// Plain-text `key=value` description of a built-in model.
    pub fn to_kv(&self) -> Result<String, OrbifoldError> {
        let m = |i: usize| self.components[i].weight.finite().unwrap_or(0);
        match self.kind {
            ModelKind::ProjectiveSpace { n: 1 } => Ok(format!("name=p1\nm={}\n", m(0))),
            ModelKind::ProjectiveSpace { n } => Ok(format!("name=pn\nn={n}\nm={}\n", m(0))),
            ModelKind::BlowupP2 => Ok(format!("name=blowup\nm1={}\nm2={}\n", m(0), m(1))),
            ModelKind::Custom(ref name) => Err(OrbifoldError::InvalidParameter(format!(
                "custom model {name:?} has no key=value form"
            ))),
        }
    }

    pub fn from_kv(text: &str) -> Result<Self, OrbifoldError> {
        let kv = parse_kv(text)?;
        Self::from_map(&kv)
    }

    /// Builds a model from `name`, `n`, `m`, `m1`, `m2` entries; absent
    /// parameters default to 1.
    pub fn from_map(kv: &BTreeMap<String, String>) -> Result<Self, OrbifoldError> {
        let int = |key: &str| -> Result<u32, OrbifoldError> {
            match kv.get(key) {
                None => Ok(1),
                Some(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| OrbifoldError::Parse(format!("{key}={v}"))),
            }
        };
        let name = kv
            .get("name")
            .or_else(|| kv.get("model"))
            .ok_or_else(|| OrbifoldError::Parse("missing name".into()))?;
        match name.trim() {
            "p1" => Self::projective_space(1, int("m")?),
            "pn" => Self::projective_space(int("n")?, int("m")?),
            "blowup" => Self::blowup_p2(int("m1")?, int("m2")?),
            other => Err(OrbifoldError::Parse(format!("unknown model {other:?}"))),
        }
    }
}

fn check_m(name: &str, m: u32) -> Result<(), OrbifoldError> {
    if m == 0 {
        return Err(OrbifoldError::InvalidParameter(format!("{name} must be >= 1")));
    }
    Ok(())
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, OrbifoldError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| OrbifoldError::Parse(format!("line {}: expected key=value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoComponents,
    DuplicateLabel(String),
    RhoTooSmall { label: String, rho: i64 },
    NonPositiveLambda(String),
    ZeroWeight(String),
    MissingOpenStratum,
    UnknownLabel(String),
    NegativeCount { stratum: Vec<String>, q: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoComponents => f.write_str("model has no boundary components"),
            Violation::DuplicateLabel(l) => write!(f, "duplicate component label {l}"),
            Violation::RhoTooSmall { label, rho } => write!(f, "rho < 2 for {label} (rho = {rho})"),
            Violation::NonPositiveLambda(l) => write!(f, "lambda must be positive for {l}"),
            Violation::ZeroWeight(l) => write!(f, "weight m = 0 for {l}"),
            Violation::MissingOpenStratum => f.write_str("stratum table lacks the open stratum q^n"),
            Violation::UnknownLabel(l) => write!(f, "stratum refers to unknown component {l}"),
            Violation::NegativeCount { stratum, q } => {
                write!(f, "negative count for stratum {stratum:?} at q = {q}")
            }
        }
    }
}

/// The finite part of `S`; the archimedean place is always included.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PlaceSet {
    finite_primes: BTreeSet<u64>,
}

impl PlaceSet {
    /// `S = {∞}`.
    pub fn archimedean() -> Self {
        Self::default()
    }

    pub fn new(primes: impl IntoIterator<Item = u64>) -> Result<Self, OrbifoldError> {
        let mut finite_primes = BTreeSet::new();
        for p in primes {
            if !is_prime(p) {
                return Err(OrbifoldError::InvalidParameter(format!("{p} is not a prime")));
            }
            finite_primes.insert(p);
        }
        Ok(PlaceSet { finite_primes })
    }

    pub fn contains(&self, p: u64) -> bool {
        self.finite_primes.contains(&p)
    }

    pub fn finite_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.finite_primes.iter().copied()
    }

    pub fn is_archimedean_only(&self) -> bool {
        self.finite_primes.is_empty()
    }

    /// Part of `n` supported on the finite primes of `S`.
    pub fn s_part(&self, n: u64) -> u64 {
        let mut out = 1;
        let mut rest = n;
        for &p in &self.finite_primes {
            while rest % p == 0 {
                rest /= p;
                out *= p;
            }
        }
        out
    }

    pub fn union(&self, other: &PlaceSet) -> PlaceSet {
        PlaceSet {
            finite_primes: self.finite_primes.union(&other.finite_primes).copied().collect(),
        }
    }
}

impl fmt::Display for PlaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{inf")?;
        for p in &self.finite_primes {
            write!(f, ",{p}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn projective_invariants() {
        let x = OrbifoldModel::projective_space(2, 3).unwrap();
        assert_eq!(x.a_invariant(), r(7, 3));
        assert_eq!(x.b_invariant(), 1);
        let x = OrbifoldModel::projective_space(3, 5).unwrap();
        assert_eq!(x.b_invariant(), 1);
        assert_eq!(OrbifoldModel::projective_space(1, 2).unwrap().critical_set(), vec!["D"]);
    }

    #[test]
    fn blowup_invariants() {
        for m1 in 1..=4 {
            for m2 in 1..=4 {
                let x = OrbifoldModel::blowup_p2(m1, m2).unwrap();
                assert_eq!(x.a_invariant(), r(1, 1));
                assert_eq!(x.b_invariant(), 2);
            }
        }
        assert_eq!(OrbifoldModel::blowup_p2(1, 1).unwrap().critical_set(), vec!["D1", "D2"]);
    }

    #[test]
    fn single_component_direct_formula() {
        let x = OrbifoldModel::custom(
            "one",
            1,
            vec![BoundaryComponent::new("E", 2, r(2, 1), Weight::Finite(1))],
            StratumTable::new(),
        );
        assert_eq!(x.a_invariant(), r(1, 1));
        assert_eq!(x.b_invariant(), 1);
    }

    #[test]
    fn strict_max_picks_first() {
        let x = OrbifoldModel::custom(
            "two",
            2,
            vec![
                BoundaryComponent::new("A", 2, r(2, 1), Weight::Finite(1)),
                BoundaryComponent::new("B", 2, r(4, 1), Weight::Finite(1)),
            ],
            StratumTable::new(),
        );
        assert_eq!(x.critical_set(), vec!["A"]);
    }

    #[test]
    fn infinite_weight_uses_epsilon_one() {
        let x = OrbifoldModel::custom(
            "int",
            1,
            vec![BoundaryComponent::new("D", 2, r(1, 1), Weight::Infinite)],
            StratumTable::new(),
        );
        assert_eq!(x.a_invariant(), r(1, 1));
    }

    #[test]
    fn validation() {
        assert!(OrbifoldModel::projective_space(1, 1).unwrap().validate().is_empty());
        assert!(OrbifoldModel::blowup_p2(2, 3).unwrap().validate().is_empty());
        let mut strata = StratumTable::new();
        strata.insert::<&str>(&[], CountPoly::monomial(1));
        let bad = OrbifoldModel::custom(
            "bad",
            1,
            vec![BoundaryComponent::new("D", 1, r(1, 1), Weight::Finite(2))],
            strata,
        );
        let v = bad.validate();
        assert!(v.iter().any(|v| v.to_string().starts_with("rho < 2")));
        let missing = OrbifoldModel::custom(
            "missing",
            1,
            vec![BoundaryComponent::new("D", 2, r(1, 1), Weight::Finite(2))],
            StratumTable::new(),
        );
        assert!(missing.validate().contains(&Violation::MissingOpenStratum));
        let mut neg = StratumTable::new();
        neg.insert::<&str>(&[], CountPoly::monomial(1));
        neg.insert(&["D"], CountPoly(vec![1, -1]));
        let neg = OrbifoldModel::custom(
            "neg",
            1,
            vec![BoundaryComponent::new("D", 2, r(1, 1), Weight::Finite(2))],
            neg,
        );
        assert!(neg.validate().iter().any(|v| matches!(v, Violation::NegativeCount { .. })));
        assert!(OrbifoldModel::blowup_p2(0, 1).is_err());
    }

    #[test]
    fn total_point_counts() {
        let b = OrbifoldModel::blowup_p2(1, 1).unwrap();
        for n in 1..=3u32 {
            let p = OrbifoldModel::projective_space(n, 1).unwrap();
            for q in [2i128, 3, 5, 7, 11] {
                assert_eq!(b.strata.total_count(q), q * q + 2 * q + 1);
                assert_eq!(p.strata.total_count(q), (q.pow(n + 1) - 1) / (q - 1));
            }
        }
    }

    #[test]
    fn scaling_lambda_scales_a() {
        let base = OrbifoldModel::blowup_p2(2, 3).unwrap();
        for t in [r(2, 1), r(1, 3), r(5, 7)] {
            let mut scaled = base.clone();
            for c in &mut scaled.components {
                c.lambda = &c.lambda * &t;
            }
            assert_eq!(scaled.a_invariant(), base.a_invariant() / &t);
            assert_eq!(scaled.critical_set(), base.critical_set());
        }
    }

    #[test]
    fn kv_round_trip() {
        for m in [
            OrbifoldModel::projective_space(1, 3).unwrap(),
            OrbifoldModel::projective_space(2, 2).unwrap(),
            OrbifoldModel::blowup_p2(1, 2).unwrap(),
        ] {
            let text = m.to_kv().unwrap();
            assert_eq!(OrbifoldModel::from_kv(&text).unwrap(), m);
        }
        assert!(OrbifoldModel::from_kv("name=torus").is_err());
        assert!(OrbifoldModel::from_kv("just text").is_err());
    }

    #[test]
    fn place_set() {
        let s = PlaceSet::new([3, 2]).unwrap();
        assert!(s.contains(2) && !s.contains(5));
        assert_eq!(s.to_string(), "{inf,2,3}");
        assert_eq!(s.s_part(360), 72);
        assert!(PlaceSet::new([4]).is_err());
    }
}
