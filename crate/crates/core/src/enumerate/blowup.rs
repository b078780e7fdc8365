//! Counting on the blow-up of ℙ² at a point.
//!
//! Write a primitive triple with `x0 > 0` as `(g·a, g·b, x2)` where
//! `g = gcd(x0, x1)`, `gcd(a, b) = 1` and `gcd(g, x2) = 1`. With
//! `t = max(a, |b|)` the height is `M^{λ1}·t^{μ}` for `M = max(g·t, |x2|)`,
//! `λ1 = 1 + 1/m1` and `μ = 1 + 1/m2 - 1/m1`. Away from `S` the first
//! multiplicity is carried by `g` and the second by `a`, so every condition
//! factors into a condition on `g` and one on `a`. For fixed `t` the count
//! splits as (weighted number of admissible `a`) × (sum over admissible `g`
//! of the number of `x2` coprime to `g`).

use num_bigint::BigUint;
use num_integer::Integer;
use rayon::prelude::*;

use crate::arith::SpfTable;
use crate::geometry::Bound;
use crate::orbifold::PlaceSet;

use super::{classify_factors, coprime_box, mobius_divisors, sum_counts, Counts, EnumConfig, EnumerateError};

const CHUNK: u64 = 1 << 12;
const LOG_BAND: f64 = 1e-10;

/// Exponents of `M^{λ1}·t^{μ} ≤ B` after raising to the power `m1·m2`:
/// `M^{am}·t^{at} ≤ B^{ab}`.
#[derive(Clone, Copy)]
struct Shape {
    lambda1: f64,
    mu: f64,
    am: u32,
    at: u32,
    ab: u32,
}

impl Shape {
    fn new(m1: u32, m2: u32) -> Self {
        Shape {
            lambda1: 1.0 + 1.0 / m1 as f64,
            mu: 1.0 + 1.0 / m2 as f64 - 1.0 / m1 as f64,
            am: (m1 + 1) * m2,
            at: m1 * m2 + m1 - m2,
            ab: m1 * m2,
        }
    }

    fn ln_height(&self, big_m: u64, t: u64) -> f64 {
        self.lambda1 * (big_m as f64).ln() + self.mu * (t as f64).ln()
    }

    /// `M^{λ1} t^{μ} ≤ B`, exact near ties.
    fn fits(&self, big_m: u64, t: u64, bound: &Bound, ln_b: f64) -> bool {
        if big_m == 0 {
            return true;
        }
        let diff = self.ln_height(big_m, t) - ln_b;
        let band = LOG_BAND * (1.0 + ln_b.abs());
        if diff > band {
            return false;
        }
        if diff < -band {
            return true;
        }
        let v = bound.value();
        let p = v.numer().magnitude();
        let q = v.denom().magnitude();
        let lhs = BigUint::from(big_m).pow(self.am) * BigUint::from(t).pow(self.at) * q.pow(self.ab);
        lhs <= p.pow(self.ab)
    }

    /// Largest `M` with `M^{λ1} t^{μ} ≤ B`.
    fn max_m(&self, t: u64, bound: &Bound, ln_b: f64) -> u64 {
        let est = ((ln_b - self.mu * (t as f64).ln()) / self.lambda1).exp();
        let mut r = if est.is_finite() && est > 0.0 { est.floor() as u64 } else { 0 };
        while self.fits(r + 1, t, bound, ln_b) {
            r += 1;
        }
        while r > 0 && !self.fits(r, t, bound, ln_b) {
            r -= 1;
        }
        r
    }
}

/// Per-`t` data shared by all `g`: the admissible `M` ranges for every bound
/// and the weighted number of pairs `(a, b)` per mode.
struct Tables {
    /// `r[j][t-1]` = largest `M` at bound `j`.
    r: Vec<Vec<u64>>,
    /// `(rational, campana, darmon)` weights per `t`.
    w: Vec<[u128; 3]>,
    gmax: u64,
}

fn flags_upto(limit: u64, m: u32, s: &PlaceSet, spf: &SpfTable) -> Vec<(bool, bool)> {
    let mut out = Vec::with_capacity(limit as usize + 1);
    out.push((true, true));
    let mut f = Vec::new();
    for n in 1..=limit {
        spf.factor(n, &mut f);
        out.push(classify_factors(&f, m, s));
    }
    out
}

fn build_tables(m1: u32, m2: u32, s: &PlaceSet, bounds: &[Bound], config: &EnumConfig) -> Result<(Tables, Shape), EnumerateError> {
    let shape = Shape::new(m1, m2);
    let last = bounds.last().expect("grid checked nonempty");
    let ln_last = last.ln();
    // t runs while some g ≥ 1 fits: R(t) ≥ t.
    let mut rmax = Vec::new();
    let mut t = 1u64;
    loop {
        let r = shape.max_m(t, last, ln_last);
        if r < t {
            break;
        }
        rmax.push(r);
        t += 1;
    }
    let tmax = rmax.len() as u64;
    let gmax = rmax.first().copied().unwrap_or(0);
    let needed = (1..=tmax).fold(0u64, |acc, t| {
        acc.saturating_add(t).saturating_add(rmax[t as usize - 1] / t)
    });
    config.check_budget(needed)?;

    let r: Vec<Vec<u64>> = bounds
        .iter()
        .map(|b| {
            let ln_b = b.ln();
            (1..=tmax).map(|t| shape.max_m(t, b, ln_b)).collect()
        })
        .collect();
    let spf = SpfTable::new(tmax.max(1));
    let a_flags = flags_upto(tmax, m2, s, &spf);
    let w = config.run(|| {
        (1..=tmax)
            .into_par_iter()
            .map(|t| {
                let mut w = [0u128; 3];
                for a in 1..=t {
                    let k: u128 = if a == t {
                        if t == 1 {
                            3
                        } else {
                            2 * euler_phi(t, &spf) as u128
                        }
                    } else if a.gcd(&t) == 1 {
                        2
                    } else {
                        0
                    };
                    let (c, d) = a_flags[a as usize];
                    w[0] += k;
                    if c {
                        w[1] += k;
                    }
                    if d {
                        w[2] += k;
                    }
                }
                w
            })
            .collect::<Vec<_>>()
    })?;
    Ok((Tables { r, w, gmax }, shape))
}

fn euler_phi(n: u64, spf: &SpfTable) -> u64 {
    let mut f = Vec::new();
    spf.factor(n, &mut f);
    f.iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub(crate) fn count(
    m1: u32,
    m2: u32,
    s: &PlaceSet,
    bounds: &[Bound],
    config: &EnumConfig,
) -> Result<Vec<Counts>, EnumerateError> {
    let (tables, _) = build_tables(m1, m2, s, bounds, config)?;
    let k = bounds.len();
    if tables.gmax == 0 {
        return Ok(vec![Counts::default(); k]);
    }
    let spf = SpfTable::new(tables.gmax);
    let tmax = tables.w.len() as u64;
    let chunks = tables.gmax.div_ceil(CHUNK);
    let parts = config.run(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = 1 + c * CHUNK;
                let hi = (lo + CHUNK).min(tables.gmax + 1);
                let mut local = vec![Counts::default(); k];
                let mut f = Vec::new();
                let mut divs = Vec::new();
                for g in lo..hi {
                    spf.factor(g, &mut f);
                    let (c1, d1) = classify_factors(&f, m1, s);
                    mobius_divisors(&f, &mut divs);
                    for t in 1..=tmax {
                        let ti = t as usize - 1;
                        if g * t > tables.r[k - 1][ti] {
                            break;
                        }
                        let w = tables.w[ti];
                        for j in (0..k).rev() {
                            let r = tables.r[j][ti];
                            if g * t > r {
                                break;
                            }
                            let x2 = coprime_box(&divs, r, 1);
                            local[j].rational += w[0] * x2;
                            if c1 {
                                local[j].campana += w[1] * x2;
                            }
                            if d1 {
                                local[j].darmon += w[2] * x2;
                            }
                        }
                    }
                }
                local
            })
            .collect::<Vec<_>>()
    })?;
    Ok(sum_counts(parts, k))
}

/// Calls `visit` with primitive triples `x0:x1:x2` (`x0 > 0`) of height at
/// most `bound` and their `(campana, darmon)` flags until it returns false.
pub(crate) fn visit_points(
    m1: u32,
    m2: u32,
    s: &PlaceSet,
    bound: &Bound,
    visit: &mut dyn FnMut(Vec<i64>, (bool, bool)) -> bool,
) {
    let cfg = EnumConfig {
        workers: 1,
        budget: u64::MAX,
    };
    let Ok((tables, _)) = build_tables(m1, m2, s, std::slice::from_ref(bound), &cfg) else {
        return;
    };
    let spf = SpfTable::new(tables.gmax.max(1));
    let mut f = Vec::new();
    for (ti, &r) in tables.r[0].iter().enumerate() {
        let t = ti as i64 + 1;
        for a in 1..=t {
            spf.factor(a as u64, &mut f);
            let (c2, d2) = classify_factors(&f, m2, s);
            let bs: Vec<i64> = if a == t {
                (-t..=t).filter(|b| b.unsigned_abs().gcd(&(t as u64)) == 1).collect()
            } else if a.gcd(&t) == 1 {
                vec![-t, t]
            } else {
                continue;
            };
            for g in 1..=(r as i64 / t) {
                spf.factor(g as u64, &mut f);
                let (c1, d1) = classify_factors(&f, m1, s);
                for &b in &bs {
                    for x2 in -(r as i64)..=(r as i64) {
                        if x2.unsigned_abs().gcd(&(g as u64)) != 1 {
                            continue;
                        }
                        if !visit(vec![g * a, g * b, x2], (c1 && c2, d1 && d2)) {
                            return;
                        }
                    }
                }
            }
        }
    }
}

/// Calls `visit(M, t, counts)` with batches of points of the blow-up whose
/// height is exactly `M^{λ1}·t^{μ} ≤ bound`; used for height-zeta partial sums.
pub fn blowup_points_by_height(
    m1: u32,
    m2: u32,
    s: &PlaceSet,
    bound: &Bound,
    visit: &mut dyn FnMut(u64, u64, Counts),
) {
    let cfg = EnumConfig {
        workers: 1,
        budget: u64::MAX,
    };
    let Ok((tables, _)) = build_tables(m1, m2, s, std::slice::from_ref(bound), &cfg) else {
        return;
    };
    let spf = SpfTable::new(tables.gmax.max(1));
    let mut f = Vec::new();
    let mut divs = Vec::new();
    for (ti, &r) in tables.r[0].iter().enumerate() {
        let t = ti as u64 + 1;
        let w = tables.w[ti];
        for g in 1..=r / t {
            spf.factor(g, &mut f);
            let (c1, d1) = classify_factors(&f, m1, s);
            mobius_divisors(&f, &mut divs);
            let batch = |k: u128| Counts {
                rational: w[0] * k,
                campana: if c1 { w[1] * k } else { 0 },
                darmon: if d1 { w[2] * k } else { 0 },
            };
            visit(g * t, t, batch(coprime_box(&divs, g * t, 1)));
            for big_m in g * t + 1..=r {
                if big_m.gcd(&g) == 1 {
                    visit(big_m, t, batch(2));
                }
            }
        }
    }
}
