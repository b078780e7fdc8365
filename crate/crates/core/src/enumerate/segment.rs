//! Segmented factorization of consecutive integers.

use crate::arith::primes_up_to;

pub(crate) const MAX_DISTINCT: usize = 15;

/// Factorizations of every integer in `[lo, hi)`, computed by sieving with
/// the primes up to `sqrt(hi)`.
pub(crate) struct Segment {
    lo: u64,
    lens: Vec<u8>,
    factors: Vec<[(u64, u32); MAX_DISTINCT]>,
}

impl Segment {
    pub(crate) fn new(lo: u64, hi: u64, primes: &[u64]) -> Self {
        let len = (hi - lo) as usize;
        let mut rem: Vec<u64> = (lo..hi).collect();
        let mut lens = vec![0u8; len];
        let mut factors = vec![[(0u64, 0u32); MAX_DISTINCT]; len];
        for &p in primes {
            if p.saturating_mul(p) >= hi {
                break;
            }
            let mut idx = ((lo + p - 1) / p * p - lo) as usize;
            while idx < len {
                let mut e = 0;
                while rem[idx] % p == 0 {
                    rem[idx] /= p;
                    e += 1;
                }
                let l = lens[idx] as usize;
                factors[idx][l] = (p, e);
                lens[idx] += 1;
                idx += p as usize;
            }
        }
        for idx in 0..len {
            if rem[idx] > 1 {
                let l = lens[idx] as usize;
                factors[idx][l] = (rem[idx], 1);
                lens[idx] += 1;
            }
        }
        Segment { lo, lens, factors }
    }

    /// Factorization of `n`, increasing primes.
    pub(crate) fn get(&self, n: u64) -> &[(u64, u32)] {
        let i = (n - self.lo) as usize;
        &self.factors[i][..self.lens[i] as usize]
    }
}

/// Primes sufficient to sieve any segment below `hi`.
pub(crate) fn sieving_primes(hi: u64) -> Vec<u64> {
    primes_up_to((hi as f64).sqrt() as u64 + 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Factorizer;

    #[test]
    fn matches_trial_division() {
        let primes = sieving_primes(20_000);
        let seg = Segment::new(9_000, 20_000, &primes);
        let f = Factorizer::global();
        for n in 9_000..20_000u64 {
            assert_eq!(seg.get(n), f.factorize_u64(n).as_slice(), "n = {n}");
        }
        let seg = Segment::new(1, 50, &sieving_primes(50));
        assert!(seg.get(1).is_empty());
        assert_eq!(seg.get(49), &[(7, 2)]);
    }
}
