//! Local factors by direct summation over valuation shells.
//!
//! On ℙⁿ the affine coordinates with `min v(a_i) = -l` form a set of measure
//! `p^{nl}(1 - p^{-n})` on which `H_p = p^l` and the multiplicity is `l`. On
//! the blow-up the shell `{v(u) = j, v(w) = l}` has measure
//! `p^{-j}(1-1/p)·p^{-l}(1-1/p)`; with `t = -min(0, j, l)` the
//! multiplicities are `n1 = t + min(0, j)` and `n2 = max(0, -j)` and the
//! height exponent is `λ1 n1 + λ2 n2`.

use serde::Serialize;

use crate::orbifold::{ModelKind, Weight};

use super::{check_prime, LocalFactorError, LocalFactorInput};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleConfig {
    /// Valuation shells are summed over `[-depth, depth]`.
    pub depth: u32,
    /// Requested accuracy; the oracle fails if its own bound exceeds it.
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            depth: 60,
            tolerance: 1e-9,
        }
    }
}

/// A truncated sum, a rigorous bound on what the truncation left out, and
/// a worst-case allowance for floating-point rounding in the sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: f64,
    pub bound: f64,
    pub rounding: f64,
}

impl OracleValue {
    /// Whether `x` is within the combined truncation and rounding bound.
    pub fn contains(&self, x: f64) -> bool {
        (self.value - x).abs() <= self.bound + self.rounding + 4.0 * f64::EPSILON * x.abs()
    }
}

/// Admits multiplicity `n` for weight `w`, waived at `p ∈ S`.
fn admits(n: i64, w: Weight, in_s: bool) -> bool {
    if in_s {
        return true;
    }
    match w {
        Weight::Finite(m) => n % m as i64 == 0,
        Weight::Infinite => n == 0,
    }
}

pub fn shell_sum_oracle(input: &LocalFactorInput, config: &OracleConfig) -> Result<OracleValue, LocalFactorError> {
    if config.depth < 10 {
        return Err(LocalFactorError::InvalidArgument("oracle depth must be >= 10".into()));
    }
    check_prime(input.p)?;
    let out = match input.model.kind {
        ModelKind::ProjectiveSpace { n } => projective(input, n, config.depth)?,
        ModelKind::BlowupP2 => blowup(input, config.depth)?,
        ModelKind::Custom(ref name) => {
            return Err(LocalFactorError::InvalidArgument(format!("no shell oracle for {name}")))
        }
    };
    if !(out.bound <= config.tolerance) {
        return Err(LocalFactorError::InvalidArgument(format!(
            "truncation bound {:e} at depth {} exceeds tolerance {:e}",
            out.bound, config.depth, config.tolerance
        )));
    }
    Ok(out)
}

/// Allowance for rounding in a sum of `terms` nonnegative terms.
fn rounding(value: f64, terms: f64) -> f64 {
    4.0 * terms * f64::EPSILON * value
}

fn projective(input: &LocalFactorInput, n: u32, depth: u32) -> Result<OracleValue, LocalFactorError> {
    let p = input.p as f64;
    let s = input.s;
    let n_f = n as f64;
    if !(s > n_f) {
        return Err(LocalFactorError::Divergent(format!("the shell sum on ℙ{n} needs s > {n}")));
    }
    let weight = input.model.components[0].weight;
    let shell = 1.0 - p.powf(-n_f);
    let r = p.powf(n_f - s);
    let mut value = 1.0;
    for l in 1..=depth as i64 {
        if admits(l, weight, input.in_s) {
            value += shell * r.powi(l as i32);
        }
    }
    let tail = shell * r.powi(depth as i32 + 1) / (1.0 - r);
    Ok(OracleValue {
        value,
        bound: tail,
        rounding: rounding(value, depth as f64),
    })
}

fn blowup(input: &LocalFactorInput, depth: u32) -> Result<OracleValue, LocalFactorError> {
    let model = input.model;
    let l1 = model.components[0].lambda_f64();
    let l2 = model.components[1].lambda_f64();
    let (w1, w2) = (model.components[0].weight, model.components[1].weight);
    let p = input.p as f64;
    let s = input.s;
    let c = 1.0 - 1.0 / p;
    let r1 = p.powf(1.0 - s * l1);
    let r2 = p.powf(1.0 - s * l2);
    let rho = p.powf(2.0 - s * l2);
    if !(r1 < 1.0) || !(rho < 1.0) {
        return Err(LocalFactorError::Divergent(format!("the blow-up shell sum diverges at s = {s}")));
    }
    let k = depth as i64;
    let mut value = 0.0;
    for j in -k..=k {
        for l in -k..=k {
            let t = -(0.min(j).min(l));
            let n1 = t + 0.min(j);
            let n2 = 0.max(-j);
            if !(admits(n1, w1, input.in_s) && admits(n2, w2, input.in_s)) {
                continue;
            }
            let e = l1 * n1 as f64 + l2 * n2 as f64;
            let ln_term = -((j + l) as f64) * p.ln() - s * e * p.ln();
            value += c * c * ln_term.exp();
        }
    }
    // Shells outside the box, bounded without the congruence indicator.
    let q = p.powf(1.0 - s * (l2 - l1));
    let q_sum: f64 = (1..=k).map(|i| q.powi(i as i32)).sum();
    let pk = p.powi(-(depth as i32));
    let geo1 = 1.0 + c * r1 / (1.0 - r1);
    let tail = pk * geo1
        + pk * (1.0 + c * r2 / (1.0 - r2))
        + c * geo1 * rho.powi(depth as i32 + 1) / (1.0 - rho)
        + c * (1.0 + c * q_sum) * r1.powi(depth as i32 + 1) / (1.0 - r1);
    Ok(OracleValue {
        value,
        bound: tail,
        rounding: rounding(value, ((2 * k + 1) * (2 * k + 1)) as f64),
    })
}
