//! Exact counts of rational, Campana and Darmon points of bounded height on
//! the built-in models.
//!
//! The fast paths sieve over denominators (projective space) or over the
//! gcd decomposition of `(x0, x1)` (blow-up) and never test points one at a
//! time. [`naive`] holds the point-by-point oracle they are checked against.

mod blowup;
mod csv;
pub mod naive;
mod projective;
mod segment;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::geometry::Bound;
use crate::orbifold::{ModelKind, OrbifoldModel, PlaceSet, Weight};

pub use csv::{parse_csv, CsvTable};
pub use projective::pn_points_by_height;
pub use blowup::blowup_points_by_height;

/// Default cap on enumeration work units.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;
/// Hard cap on rows produced by [`dump_points`].
pub const DUMP_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerateError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("enumeration needs about {needed} work units, over the budget of {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("enumeration is not available for {0}")]
    Unsupported(String),
}

/// Which points to count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Campana,
    Darmon,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Rational, Mode::Campana, Mode::Darmon];
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Rational => "rational",
            Mode::Campana => "campana",
            Mode::Darmon => "darmon",
        })
    }
}

impl FromStr for Mode {
    type Err = EnumerateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rational" => Ok(Mode::Rational),
            "campana" => Ok(Mode::Campana),
            "darmon" => Ok(Mode::Darmon),
            other => Err(EnumerateError::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

/// Point counts for the three modes at a single bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Counts {
    pub rational: u128,
    pub campana: u128,
    pub darmon: u128,
}

impl Counts {
    pub fn get(&self, mode: Mode) -> u128 {
        match mode {
            Mode::Rational => self.rational,
            Mode::Campana => self.campana,
            Mode::Darmon => self.darmon,
        }
    }

    pub fn add(&mut self, other: &Counts) {
        self.rational += other.rational;
        self.campana += other.campana;
        self.darmon += other.darmon;
    }

    /// Adds `k` points whose classification is given by the flags.
    #[inline]
    pub(crate) fn add_class(&mut self, k: u128, campana: bool, darmon: bool) {
        self.rational += k;
        if campana {
            self.campana += k;
        }
        if darmon {
            self.darmon += k;
        }
    }
}

pub(crate) fn sum_counts(parts: Vec<Vec<Counts>>, len: usize) -> Vec<Counts> {
    let mut out = vec![Counts::default(); len];
    for part in parts {
        for (o, c) in out.iter_mut().zip(&part) {
            o.add(c);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountRecord {
    pub bound: Bound,
    pub n_rational: u128,
    pub n_campana: u128,
    pub n_darmon: u128,
}

impl CountRecord {
    fn new(bound: Bound, c: Counts) -> Self {
        CountRecord {
            bound,
            n_rational: c.rational,
            n_campana: c.campana,
            n_darmon: c.darmon,
        }
    }

    pub fn get(&self, mode: Mode) -> u128 {
        match mode {
            Mode::Rational => self.n_rational,
            Mode::Campana => self.n_campana,
            Mode::Darmon => self.n_darmon,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSeries {
    pub model: OrbifoldModel,
    pub s: PlaceSet,
    pub records: Vec<CountRecord>,
}

impl CountSeries {
    pub const CSV_HEADER: &'static str = "B,n_rational,n_campana,n_darmon";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.bound.text(),
                r.n_rational,
                r.n_campana,
                r.n_darmon
            ));
        }
        out
    }
}

/// Worker count and work budget for an enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumConfig {
    pub workers: usize,
    pub budget: u64,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            budget: DEFAULT_BUDGET,
        }
    }
}

impl EnumConfig {
    pub fn with_workers(workers: usize) -> Self {
        EnumConfig {
            workers,
            ..Default::default()
        }
    }

    pub(crate) fn check_budget(&self, needed: u64) -> Result<(), EnumerateError> {
        if needed > self.budget {
            return Err(EnumerateError::BudgetExceeded {
                needed,
                budget: self.budget,
            });
        }
        Ok(())
    }

    pub(crate) fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T, EnumerateError> {
        if self.workers == 0 {
            return Err(EnumerateError::InvalidArgument("workers must be >= 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| EnumerateError::InvalidArgument(e.to_string()))?;
        Ok(pool.install(f))
    }
}

/// Finite weight of a built-in component; enumeration needs every `m_α` finite.
fn finite_weight(w: Weight) -> Result<u32, EnumerateError> {
    w.finite()
        .ok_or_else(|| EnumerateError::Unsupported("infinite weights".into()))
}

fn check_grid(bounds: &[Bound]) -> Result<(), EnumerateError> {
    if bounds.is_empty() {
        return Err(EnumerateError::InvalidArgument("empty grid of bounds".into()));
    }
    if bounds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EnumerateError::InvalidArgument(
            "bounds must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Counts of all three modes at every bound of an increasing grid, in one pass.
pub fn count_series(
    model: &OrbifoldModel,
    s: &PlaceSet,
    bounds: &[Bound],
    config: &EnumConfig,
) -> Result<CountSeries, EnumerateError> {
    check_grid(bounds)?;
    let counts = match model.kind {
        ModelKind::ProjectiveSpace { n } => {
            let m = finite_weight(model.components[0].weight)?;
            projective::scan(n, m, s, bounds, config)?
        }
        ModelKind::BlowupP2 => {
            let m1 = finite_weight(model.components[0].weight)?;
            let m2 = finite_weight(model.components[1].weight)?;
            blowup::count(m1, m2, s, bounds, config)?
        }
        ModelKind::Custom(ref name) => return Err(EnumerateError::Unsupported(name.clone())),
    };
    Ok(CountSeries {
        model: model.clone(),
        s: s.clone(),
        records: bounds
            .iter()
            .cloned()
            .zip(counts)
            .map(|(b, c)| CountRecord::new(b, c))
            .collect(),
    })
}

/// `N(B)` on ℙ¹ for a single mode. Darmon and Campana counts iterate only
/// the admissible denominators.
pub fn enumerate_p1(m: u32, s: &PlaceSet, bound: &Bound, mode: Mode) -> Result<u128, EnumerateError> {
    enumerate_pn(1, m, s, bound, mode)
}

/// `N(B)` on ℙⁿ for a single mode.
pub fn enumerate_pn(n: u32, m: u32, s: &PlaceSet, bound: &Bound, mode: Mode) -> Result<u128, EnumerateError> {
    if n == 0 || m == 0 {
        return Err(EnumerateError::InvalidArgument("n and m must be >= 1".into()));
    }
    projective::generate(n, m, s, bound.floor_u64(), mode, &EnumConfig::default())
}

/// `N(B)` on the blow-up for a single mode.
pub fn enumerate_blowup(
    m1: u32,
    m2: u32,
    s: &PlaceSet,
    bound: &Bound,
    mode: Mode,
) -> Result<u128, EnumerateError> {
    let model = OrbifoldModel::blowup_p2(m1, m2)
        .map_err(|e| EnumerateError::InvalidArgument(e.to_string()))?;
    let series = count_series(&model, s, std::slice::from_ref(bound), &EnumConfig::default())?;
    Ok(series.records[0].get(mode))
}

/// Explicit points of height at most `bound` in the given mode, as
/// coordinate tuples (`x0:…:xn` for ℙⁿ, `x0:x1:x2` for the blow-up), at
/// most [`DUMP_CAP`] of them.
pub fn dump_points(
    model: &OrbifoldModel,
    s: &PlaceSet,
    bound: &Bound,
    mode: Mode,
) -> Result<Vec<Vec<i64>>, EnumerateError> {
    let mut out = Vec::new();
    let mut push = |p: Vec<i64>, class: (bool, bool)| {
        let keep = match mode {
            Mode::Rational => true,
            Mode::Campana => class.0,
            Mode::Darmon => class.1,
        };
        if keep && out.len() < DUMP_CAP {
            out.push(p);
        }
        out.len() < DUMP_CAP
    };
    match model.kind {
        ModelKind::ProjectiveSpace { n } => {
            let m = finite_weight(model.components[0].weight)?;
            projective::visit_points(n, m, s, bound.floor_u64(), &mut push);
        }
        ModelKind::BlowupP2 => {
            let m1 = finite_weight(model.components[0].weight)?;
            let m2 = finite_weight(model.components[1].weight)?;
            blowup::visit_points(m1, m2, s, bound, &mut push);
        }
        ModelKind::Custom(ref name) => return Err(EnumerateError::Unsupported(name.clone())),
    }
    Ok(out)
}

/// Signed squarefree divisors `(d, μ(d))` of the radical of a factored integer.
pub(crate) fn mobius_divisors(factors: &[(u64, u32)], out: &mut Vec<(u64, i8)>) {
    out.clear();
    out.push((1, 1));
    for &(p, _) in factors {
        let len = out.len();
        for i in 0..len {
            let (d, mu) = out[i];
            out.push((d.saturating_mul(p), -mu));
        }
    }
}

/// `#{x ∈ [-X, X]ⁿ : gcd(x, q) = 1}` from the signed divisors of `rad q`.
#[inline]
pub(crate) fn coprime_box(divisors: &[(u64, i8)], x: u64, n: u32) -> u128 {
    let mut total: i128 = 0;
    for &(d, mu) in divisors {
        let side = (2 * (x / d) + 1) as i128;
        total += mu as i128 * side.pow(n);
    }
    debug_assert!(total >= 0);
    total as u128
}

/// Darmon and Campana flags for the non-`S` part of a factored integer.
#[inline]
pub(crate) fn classify_factors(factors: &[(u64, u32)], m: u32, s: &PlaceSet) -> (bool, bool) {
    let mut campana = true;
    let mut darmon = true;
    for &(p, e) in factors {
        if s.contains(p) {
            continue;
        }
        if e % m != 0 {
            darmon = false;
        }
        if e < m {
            campana = false;
        }
    }
    (campana, darmon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Factorizer;

    #[test]
    fn coprime_box_small() {
        let mut divs = Vec::new();
        mobius_divisors(&Factorizer::global().factorize_u64(6), &mut divs);
        // x in [-6, 6] coprime to 6: ±1, ±5
        assert_eq!(coprime_box(&divs, 6, 1), 4);
        mobius_divisors(&[], &mut divs);
        assert_eq!(coprime_box(&divs, 3, 2), 49);
    }

    #[test]
    fn grid_checks() {
        let model = OrbifoldModel::projective_space(1, 1).unwrap();
        let s = PlaceSet::archimedean();
        let cfg = EnumConfig::with_workers(1);
        assert!(matches!(
            count_series(&model, &s, &[], &cfg),
            Err(EnumerateError::InvalidArgument(_))
        ));
        let unsorted = [Bound::from_integer(100), Bound::from_integer(10)];
        assert!(count_series(&model, &s, &unsorted, &cfg).is_err());
    }
}
