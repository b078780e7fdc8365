use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::primes::{is_prime, pollard_rho, primes_up_to};
use super::ArithError;

pub const DEFAULT_SIEVE_BOUND: u64 = 1_000_000;

/// Prime factorization: distinct primes in increasing order with positive
/// exponents. The factorization of 1 is empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactorMap(BTreeMap<BigUint, u32>);

impl FactorMap {
    pub fn iter(&self) -> impl Iterator<Item = (&BigUint, u32)> {
        self.0.iter().map(|(p, &e)| (p, e))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, p: &BigUint) -> u32 {
        self.0.get(p).copied().unwrap_or(0)
    }

    pub fn product(&self) -> BigUint {
        self.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(e))
    }

    /// `(p, e)` pairs as `u64`, if every prime fits.
    pub fn to_u64_pairs(&self) -> Option<Vec<(u64, u32)>> {
        self.iter().map(|(p, e)| p.to_u64().map(|p| (p, e))).collect()
    }

    fn insert(&mut self, p: BigUint, e: u32) {
        *self.0.entry(p).or_insert(0) += e;
    }
}

/// Trial division against a precomputed prime table, then Pollard rho.
#[derive(Clone, Debug)]
pub struct Factorizer {
    primes: Vec<u64>,
    bound: u64,
}

impl Default for Factorizer {
    fn default() -> Self {
        Factorizer::with_sieve_bound(DEFAULT_SIEVE_BOUND)
    }
}

impl Factorizer {
    pub fn with_sieve_bound(bound: u64) -> Self {
        Factorizer {
            primes: primes_up_to(bound.max(2)),
            bound: bound.max(2),
        }
    }

    /// The shared instance with the default sieve bound.
    pub fn global() -> &'static Factorizer {
        static GLOBAL: OnceLock<Factorizer> = OnceLock::new();
        GLOBAL.get_or_init(Factorizer::default)
    }

    pub fn factorize(&self, n: &BigUint) -> Result<FactorMap, ArithError> {
        if n.is_zero() {
            return Err(ArithError::ZeroInput("factorize"));
        }
        let mut out = FactorMap::default();
        if let Some(small) = n.to_u64() {
            for (p, e) in self.factorize_u64(small) {
                out.insert(BigUint::from(p), e);
            }
            return Ok(out);
        }
        let mut rest = n.clone();
        for &p in &self.primes {
            let pb = BigUint::from(p);
            if &pb * &pb > rest {
                break;
            }
            let mut e = 0;
            loop {
                let (q, r) = rest.div_rem(&pb);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                e += 1;
            }
            if e > 0 {
                out.insert(pb, e);
            }
        }
        if rest.is_one() {
            return Ok(out);
        }
        if let Some(small) = rest.to_u64() {
            for (p, e) in self.factorize_u64(small) {
                out.insert(BigUint::from(p), e);
            }
            return Ok(out);
        }
        let bound = BigUint::from(self.bound);
        if rest < &bound * &bound {
            out.insert(rest, 1);
            return Ok(out);
        }
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if let Some(small) = m.to_u64() {
                for (p, e) in self.factorize_u64(small) {
                    out.insert(BigUint::from(p), e);
                }
            } else if is_probable_prime_big(&m) {
                out.insert(m, 1);
            } else {
                let d = pollard_rho_big(&m);
                stack.push(&m / &d);
                stack.push(d);
            }
        }
        Ok(out)
    }

    /// Factorization of a nonzero `u64` as increasing `(prime, exponent)` pairs.
    pub fn factorize_u64(&self, mut n: u64) -> Vec<(u64, u32)> {
        assert!(n != 0, "factorize_u64(0)");
        let mut out = Vec::new();
        for &p in &self.primes {
            if p.saturating_mul(p) > n {
                break;
            }
            if n % p == 0 {
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                out.push((p, e));
            }
        }
        if n == 1 {
            return out;
        }
        if n <= self.bound.saturating_mul(self.bound) || is_prime(n) {
            out.push((n, 1));
            return out;
        }
        let mut found = Vec::new();
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if m == 1 {
                continue;
            }
            if is_prime(m) {
                found.push(m);
            } else {
                let d = pollard_rho(m);
                stack.push(m / d);
                stack.push(d);
            }
        }
        found.sort_unstable();
        for p in found {
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }
}

pub fn factorize(n: &BigUint) -> Result<FactorMap, ArithError> {
    Factorizer::global().factorize(n)
}

/// True iff every exponent of `n` is divisible by `k` (so `n` is a `k`-th power).
pub fn is_kth_power(n: &BigUint, k: u32) -> Result<bool, ArithError> {
    check_power_args(n, k)?;
    Ok(factorize(n)?.iter().all(|(_, e)| e % k == 0))
}

/// True iff every exponent of `n` is at least `k`; 1 is vacuously `k`-full.
pub fn is_k_full(n: &BigUint, k: u32) -> Result<bool, ArithError> {
    check_power_args(n, k)?;
    Ok(factorize(n)?.iter().all(|(_, e)| e >= k))
}

fn check_power_args(n: &BigUint, k: u32) -> Result<(), ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroInput("power test"));
    }
    if k == 0 {
        return Err(ArithError::ZeroInput("exponent k"));
    }
    Ok(())
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    let one = BigUint::one();
    let two = &one + &one;
    if n < &two {
        return false;
    }
    let n_minus_one = n - &one;
    let mut d = n_minus_one.clone();
    let mut r = 0u32;
    while d.is_even() {
        d >>= 1;
        r += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let a = BigUint::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..r {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho_big(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    use rand_core_shim::SplitMix;
    let mut rng = SplitMix(0x9e37_79b9_7f4a_7c15);
    loop {
        let c = rng.gen_biguint_below(n);
        let mut x = rng.gen_biguint_below(n);
        let mut y = x.clone();
        let mut d = BigUint::one();
        while d.is_one() {
            x = (&x * &x + &c) % n;
            y = (&y * &y + &c) % n;
            y = (&y * &y + &c) % n;
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
    }
}

mod rand_core_shim {
    //! Minimal generator so the fallback factorizer does not depend on `rand`.
    use num_bigint::BigUint;

    pub struct SplitMix(pub u64);

    impl SplitMix {
        fn next(&mut self) -> u64 {
            self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^ (z >> 31)
        }

        pub fn gen_biguint_below(&mut self, n: &BigUint) -> BigUint {
            let words = (n.bits() / 64 + 2) as usize;
            let digits: Vec<u64> = (0..words).map(|_| self.next()).collect();
            BigUint::from_slice(
                &digits
                    .iter()
                    .flat_map(|d| [*d as u32, (*d >> 32) as u32])
                    .collect::<Vec<_>>(),
            ) % n
        }
    }
}
