//! Truncated Euler products with a rigorous bound on the discarded tail.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primes_up_to;

use super::ConstantError;

/// Primes per parallel block; the block sums are added in prime order so the
/// result does not depend on the number of threads.
const BLOCK: usize = 4096;

/// A product `∏_p factor(p)` together with what is known about the factors
/// beyond the cutoff: `|factor(p) - 1| ≤ c·p^{-σ}` for every `p > cutoff`.
pub struct EulerProductSpec<'a> {
    pub factor: &'a (dyn Fn(u64) -> Result<f64, ConstantError> + Sync),
    pub cutoff: u64,
    pub sigma: f64,
    pub c: f64,
}

/// `∏_{p ≤ cutoff} factor(p)`; the full product lies within `tail_bound`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EulerProduct {
    pub value: f64,
    pub tail_bound: f64,
    pub cutoff: u64,
}

impl EulerProduct {
    pub fn contains(&self, x: f64) -> bool {
        (self.value - x).abs() <= self.tail_bound
    }
}

/// Bound on `Σ_{p > P0} |log factor(p)|` from `|factor - 1| ≤ c·p^{-σ}`,
/// summed over all integers past `P0` by the integral test.
fn log_tail(cutoff: u64, sigma: f64, c: f64) -> Result<f64, ConstantError> {
    if c == 0.0 {
        return Ok(0.0);
    }
    let p0 = cutoff as f64;
    let first = c * p0.powf(-sigma);
    if !(first < 1.0) {
        return Err(ConstantError::InvalidArgument(format!(
            "decay constant {c} is too large for the cutoff {cutoff}"
        )));
    }
    // |log(1 + x)| ≤ |x|/(1 - |x|)
    Ok(c * p0.powf(1.0 - sigma) / (sigma - 1.0) / (1.0 - first))
}

pub fn truncated_euler_product(spec: &EulerProductSpec) -> Result<EulerProduct, ConstantError> {
    if !(spec.sigma > 1.0) {
        return Err(ConstantError::InvalidArgument(format!(
            "tail decay exponent must exceed 1, got {}",
            spec.sigma
        )));
    }
    if !(spec.c >= 0.0) || spec.cutoff < 2 {
        return Err(ConstantError::InvalidArgument(
            "need a nonnegative decay constant and a cutoff of at least 2".into(),
        ));
    }
    let primes = primes_up_to(spec.cutoff);
    let blocks: Vec<(f64, usize)> = primes
        .par_chunks(BLOCK)
        .map(|chunk| {
            let mut sum = 0.0;
            let mut nontrivial = 0;
            for &p in chunk {
                let f = (spec.factor)(p)?;
                if !(f > 0.0) || !f.is_finite() {
                    return Err(ConstantError::Domain(format!(
                        "local factor at p = {p} is {f}; s is outside the convergence region"
                    )));
                }
                if f != 1.0 {
                    sum += f.ln();
                    nontrivial += 1;
                }
            }
            Ok((sum, nontrivial))
        })
        .collect::<Result<_, _>>()?;
    let (log_sum, nontrivial) = blocks.iter().fold((0.0, 0), |(s, n), &(b, k)| (s + b, n + k));
    let value = log_sum.exp();
    let tail = log_tail(spec.cutoff, spec.sigma, spec.c)?;
    // Each factor and logarithm is off by a few ulps.
    let rounding = 8.0 * nontrivial as f64 * f64::EPSILON * value;
    Ok(EulerProduct {
        value,
        tail_bound: value * tail.exp_m1() + rounding,
        cutoff: spec.cutoff,
    })
}
