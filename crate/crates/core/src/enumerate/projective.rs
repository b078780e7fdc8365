//! Denominator sieve on ℙⁿ.
//!
//! A point of `G = {x_n ≠ 0}` has a unique primitive representative with
//! `q = x_n > 0`; its height is `max(|x_i|, q)` and its multiplicities are
//! the exponents of `q`. So for each `q ≤ ⌊B⌋` the points are the
//! `x ∈ [-⌊B⌋, ⌊B⌋]ⁿ` coprime to `q`, counted by inclusion-exclusion over
//! the primes of `q`.

use rayon::prelude::*;

use crate::arith::{primes_up_to, Factorizer};
use crate::geometry::Bound;
use crate::orbifold::PlaceSet;

use super::segment::{sieving_primes, Segment};
use super::{
    classify_factors, coprime_box, mobius_divisors, sum_counts, Counts, EnumConfig, EnumerateError, Mode,
};

const CHUNK: u64 = 1 << 14;

fn check_size(n: u32, x: u64) -> Result<(), EnumerateError> {
    // (2X + 1)^n must fit comfortably in an i128.
    if (n as f64) * ((2 * x + 1) as f64).log2() > 120.0 {
        return Err(EnumerateError::Unsupported(format!(
            "counts for n = {n} at bound {x} overflow 128-bit integers"
        )));
    }
    Ok(())
}

/// All three modes at every bound, one pass over the denominators.
pub(crate) fn scan(
    n: u32,
    m: u32,
    s: &PlaceSet,
    bounds: &[Bound],
    config: &EnumConfig,
) -> Result<Vec<Counts>, EnumerateError> {
    let xs: Vec<u64> = bounds.iter().map(Bound::floor_u64).collect();
    let xmax = *xs.last().expect("grid checked nonempty");
    check_size(n, xmax)?;
    config.check_budget(xmax)?;
    if xmax == 0 {
        return Ok(vec![Counts::default(); xs.len()]);
    }
    let primes = sieving_primes(xmax + 1);
    let chunks = xmax.div_ceil(CHUNK);
    let parts = config.run(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = 1 + c * CHUNK;
                let hi = (lo + CHUNK).min(xmax + 1);
                let seg = Segment::new(lo, hi, &primes);
                let mut local = vec![Counts::default(); xs.len()];
                let mut divs = Vec::new();
                for q in lo..hi {
                    let f = seg.get(q);
                    let (campana, darmon) = classify_factors(f, m, s);
                    mobius_divisors(f, &mut divs);
                    let j0 = xs.partition_point(|&x| x < q);
                    for j in j0..xs.len() {
                        local[j].add_class(coprime_box(&divs, xs[j], n), campana, darmon);
                    }
                }
                local
            })
            .collect::<Vec<_>>()
    })?;
    Ok(sum_counts(parts, xs.len()))
}

/// One mode at one bound. Darmon and Campana counts (for `m ≥ 2`) visit only
/// the admissible denominators `q = s·r`, with `s` supported on `S` and `r`
/// built prime by prime from the allowed exponents.
pub(crate) fn generate(
    n: u32,
    m: u32,
    s: &PlaceSet,
    x: u64,
    mode: Mode,
    config: &EnumConfig,
) -> Result<u128, EnumerateError> {
    if x == 0 {
        return Ok(0);
    }
    check_size(n, x)?;
    if mode == Mode::Rational || m == 1 {
        let c = scan(n, m, s, &[Bound::from_integer(x)], config)?;
        return Ok(c[0].get(mode));
    }
    let mut s_units = vec![(1u64, Vec::<(u64, u32)>::new())];
    for p in s.finite_primes() {
        let mut next = Vec::new();
        for (u, f) in &s_units {
            let mut v = *u;
            let mut e = 0;
            while let Some(w) = v.checked_mul(p).filter(|&w| w <= x) {
                v = w;
                e += 1;
                let mut g = f.clone();
                g.push((p, e));
                next.push((v, g));
            }
        }
        s_units.extend(next);
    }
    let root = (x as f64).powf(1.0 / m as f64) as u64 + 2;
    let primes: Vec<u64> = primes_up_to(root).into_iter().filter(|&p| !s.contains(p)).collect();
    config.check_budget(s_units.len() as u64 * primes.len() as u64)?;
    let step = |e: u32| match mode {
        Mode::Darmon => e + m,
        _ => e + 1,
    };
    let mut total = 0u128;
    let mut divs = Vec::new();
    for (u, f) in &s_units {
        let mut factors = f.clone();
        let mut visit = |_q: u64, factors: &[(u64, u32)]| {
            mobius_divisors(factors, &mut divs);
            total += coprime_box(&divs, x, n);
        };
        dfs(*u, 0, x, m, &primes, &step, &mut factors, &mut visit);
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    q: u64,
    idx: usize,
    x: u64,
    m: u32,
    primes: &[u64],
    step: &dyn Fn(u32) -> u32,
    factors: &mut Vec<(u64, u32)>,
    visit: &mut dyn FnMut(u64, &[(u64, u32)]),
) {
    visit(q, factors);
    for (j, &p) in primes.iter().enumerate().skip(idx) {
        let Some(first) = p.checked_pow(m).and_then(|pm| q.checked_mul(pm)).filter(|&v| v <= x) else {
            break;
        };
        let mut v = first;
        let mut e = m;
        loop {
            factors.push((p, e));
            dfs(v, j + 1, x, m, primes, step, factors, visit);
            factors.pop();
            let e2 = step(e);
            match p
                .checked_pow(e2 - e)
                .and_then(|k| v.checked_mul(k))
                .filter(|&w| w <= x)
            {
                Some(w) => {
                    v = w;
                    e = e2;
                }
                None => break,
            }
        }
    }
}

/// Calls `visit` with primitive points `x_0:…:x_{n-1}:q` of height at most
/// `x` and their `(campana, darmon)` flags until it returns false.
pub(crate) fn visit_points(
    n: u32,
    m: u32,
    s: &PlaceSet,
    x: u64,
    visit: &mut dyn FnMut(Vec<i64>, (bool, bool)) -> bool,
) {
    let f = Factorizer::global();
    let x = x as i64;
    for q in 1..=x {
        let factors = f.factorize_u64(q as u64);
        let class = classify_factors(&factors, m, s);
        let mut coords = vec![-x; n as usize];
        loop {
            let g = coords
                .iter()
                .fold(q as u64, |g, &c| num_integer::gcd(g, c.unsigned_abs()));
            if g == 1 {
                let mut p = coords.clone();
                p.push(q);
                if !visit(p, class) {
                    return;
                }
            }
            // odometer over [-x, x]^n
            let mut i = 0;
            loop {
                if i == coords.len() {
                    break;
                }
                if coords[i] < x {
                    coords[i] += 1;
                    break;
                }
                coords[i] = -x;
                i += 1;
            }
            if i == coords.len() {
                break;
            }
        }
    }
}

/// Calls `visit(h, counts)` with the number of points of ℙⁿ of exact
/// integer height `h ≤ x`; used for height-zeta partial sums.
///
/// Points with `q = h` are a coprime box. Points with `q < h` have
/// `max|x_i| = h`, and by inclusion-exclusion over `d | q` their number
/// depends on `h` only through `⌊h/d⌋`, which moves only when `d | h`.
/// So it suffices to keep, for every squarefree `d`, how many `q < h` of
/// each class it divides.
pub fn pn_points_by_height(n: u32, m: u32, s: &PlaceSet, x: u64, visit: &mut dyn FnMut(u64, Counts)) {
    let f = Factorizer::global();
    let len = x as usize + 1;
    let (mut all, mut campana_q, mut darmon_q) = (vec![0u64; len], vec![0u64; len], vec![0u64; len]);
    let shell = |k: u64| ((2 * k + 1) as i128).pow(n) - ((2 * k - 1) as i128).pow(n);
    let mut divs = Vec::new();
    for h in 1..=x {
        let factors = f.factorize_u64(h);
        let (campana, darmon) = classify_factors(&factors, m, s);
        mobius_divisors(&factors, &mut divs);
        let mut below = [0i128; 3];
        for &(d, mu) in &divs {
            let w = mu as i128 * shell(h / d);
            let d = d as usize;
            below[0] += w * all[d] as i128;
            below[1] += w * campana_q[d] as i128;
            below[2] += w * darmon_q[d] as i128;
        }
        let mut c = Counts {
            rational: below[0] as u128,
            campana: below[1] as u128,
            darmon: below[2] as u128,
        };
        c.add_class(coprime_box(&divs, h, n), campana, darmon);
        if c.rational > 0 {
            visit(h, c);
        }
        for &(d, _) in &divs {
            let d = d as usize;
            all[d] += 1;
            campana_q[d] += campana as u64;
            darmon_q[d] += darmon as u64;
        }
    }
}
