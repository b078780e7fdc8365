//! Exact integer and rational arithmetic: p-adic valuations, factorization,
//! perfect-power tests and primitive projective coordinates.

mod coords;
mod factor;
pub mod primes;
mod rational;

pub use coords::{primitive_coords, primitive_integers};
pub use factor::{factorize, is_k_full, is_kth_power, FactorMap, Factorizer, DEFAULT_SIEVE_BOUND};
pub use primes::{is_prime, primes_up_to, SpfTable};
pub use rational::{Rational, Valuation};

pub(crate) use rational::{bigint_valuation, ln_biguint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("{0} is not a prime")]
    NotPrime(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} requires a positive integer")]
    ZeroInput(&'static str),
    #[error("all coordinates are zero")]
    AllZero,
    #[error("cannot parse rational number from {0:?}")]
    Parse(String),
}

/// True iff every exponent in `factors` is divisible by `k`.
pub fn exponents_divisible_by(factors: &[(u64, u32)], k: u32) -> bool {
    factors.iter().all(|&(_, e)| e % k == 0)
}

/// True iff every exponent in `factors` is at least `k`.
pub fn exponents_at_least(factors: &[(u64, u32)], k: u32) -> bool {
    factors.iter().all(|&(_, e)| e >= k)
}
