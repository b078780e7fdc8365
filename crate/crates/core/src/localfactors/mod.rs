//! Local height integrals at the finite primes and at infinity.
//!
//! [`denef_factor`] evaluates the stratum sum
//! `Σ_B #D_B°(F_p)/p^{n-#B} ∏_{β∈B} (1-1/p)·t_β/(1-t_β)` with
//! `t_β = p^{-m_β(sλ_β - ρ_β + 1)}`; [`shell_sum_oracle`] recomputes the same
//! integral by summing over valuation shells.

mod archimedean;
mod oracle;
pub mod quadrature;

use serde::Serialize;

use crate::arith::is_prime;
use crate::orbifold::{BoundaryComponent, ModelKind, OrbifoldModel, Weight};

pub use archimedean::{archimedean_blowup, archimedean_p1, ArchimedeanValue};
pub use oracle::{shell_sum_oracle, OracleConfig, OracleValue};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LocalFactorError {
    #[error("{0}")]
    Divergent(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// A finite local factor request.
#[derive(Clone, Debug)]
pub struct LocalFactorInput<'a> {
    pub model: &'a OrbifoldModel,
    pub p: u64,
    pub s: f64,
    pub in_s: bool,
}

pub(crate) fn check_prime(p: u64) -> Result<(), LocalFactorError> {
    if !is_prime(p) {
        return Err(LocalFactorError::NotPrime(p));
    }
    Ok(())
}

/// `sλ - ρ + 1`, which must be positive for the integral to converge.
fn shifted_exponent(c: &BoundaryComponent, s: f64) -> Result<f64, LocalFactorError> {
    let u = c.zeta_exponent(s, true).expect("waived exponent is finite");
    if !(u > 0.0) {
        return Err(LocalFactorError::Divergent(format!(
            "s = {s} is outside the convergence region of component {} (s·λ - ρ + 1 = {u})",
            c.label
        )));
    }
    Ok(u)
}

/// `t = p^{-m(sλ - ρ + 1)}` with `m = 1` when the condition is waived at
/// `p ∈ S`, and `t = 0` for an infinite weight outside `S`.
fn component_t(c: &BoundaryComponent, p: u64, s: f64, in_s: bool) -> Result<f64, LocalFactorError> {
    let u = shifted_exponent(c, s)?;
    let m = match (in_s, c.weight) {
        (true, _) => 1.0,
        (false, Weight::Finite(m)) => m as f64,
        (false, Weight::Infinite) => return Ok(0.0),
    };
    Ok((-(m * u) * (p as f64).ln()).exp())
}

/// `(1 - 1/p)·t/(1 - t)`, with `1 - t` computed without cancellation.
fn stratum_term(p: u64, t: f64, ln_t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    (1.0 - 1.0 / p as f64) * t / -ln_t.exp_m1()
}

/// The stratum-sum local factor at a finite prime.
pub fn denef_factor(input: &LocalFactorInput) -> Result<f64, LocalFactorError> {
    check_prime(input.p)?;
    let model = input.model;
    let p = input.p as f64;
    let n = model.dimension as i32;
    let mut terms = Vec::with_capacity(model.components.len());
    for c in &model.components {
        let t = component_t(c, input.p, input.s, input.in_s)?;
        terms.push((c.label.clone(), stratum_term(input.p, t, t.ln())));
    }
    let mut total = 0.0;
    for (labels, count) in model.strata.iter() {
        let mut term = count.eval_f64(p) / p.powi(n - labels.len() as i32);
        for label in labels {
            let (_, a) = terms
                .iter()
                .find(|(l, _)| l == label)
                .ok_or_else(|| LocalFactorError::InvalidArgument(format!("stratum names unknown component {label}")))?;
            term *= a;
        }
        total += term;
    }
    Ok(total)
}

/// `1 + (1 - 1/p)·x/(1 - x)` with `x = p^{m(1-s)}`, and `m = 1` for `p ∈ S`.
pub fn p1_factor(p: u64, m: u32, s: f64, in_s: bool) -> Result<f64, LocalFactorError> {
    check_prime(p)?;
    if m == 0 {
        return Err(LocalFactorError::InvalidArgument("m must be >= 1".into()));
    }
    if !(s > 1.0) {
        return Err(LocalFactorError::Divergent(format!("the local factor on ℙ¹ needs s > 1, got {s}")));
    }
    let m = if in_s { 1.0 } else { m as f64 };
    let ln_x = m * (1.0 - s) * (p as f64).ln();
    Ok(1.0 + stratum_term(p, ln_x.exp(), ln_x))
}

/// The blow-up local factor written out term by term:
/// `1 + (1-1/p)x/(1-x) + (1-1/p)y/(1-y) + (1-1/p)²·x/(1-x)·y/(1-y)` with
/// `x = p^{-m1(s(1+1/m1)-1)}` and `y = p^{-m2(s(2+1/m2)-2)}`; for `p ∈ S`
/// the outer factors `m1`, `m2` become 1.
pub fn blowup_factor(p: u64, m1: u32, m2: u32, s: f64, in_s: bool) -> Result<f64, LocalFactorError> {
    check_prime(p)?;
    if m1 == 0 || m2 == 0 {
        return Err(LocalFactorError::InvalidArgument("m1 and m2 must be >= 1".into()));
    }
    // m·(s(k + 1/m) - k) = s(mk + 1) - mk keeps the exponent exact at the
    // critical point. At p ∈ S only the congruence multiplier m drops out;
    // the height coefficients keep their m.
    let shifted = |m: f64, k: f64| {
        if in_s {
            s * (k + 1.0 / m) - k
        } else {
            s * (m * k + 1.0) - m * k
        }
    };
    let e1 = shifted(m1 as f64, 1.0);
    let e2 = shifted(m2 as f64, 2.0);
    if !(e1 > 0.0) || !(e2 > 0.0) {
        return Err(LocalFactorError::Divergent(format!("the blow-up local factor diverges at s = {s}")));
    }
    let lp = (p as f64).ln();
    let g = |e: f64| (-e * lp).exp() / -(-e * lp).exp_m1();
    let c = 1.0 - 1.0 / p as f64;
    let (x, y) = (g(e1), g(e2));
    Ok(1.0 + c * x + c * y + c * c * x * y)
}

/// The closed-form local factor of a built-in model.
pub fn closed_form_factor(input: &LocalFactorInput) -> Result<f64, LocalFactorError> {
    let m = |i: usize| {
        input.model.components[i]
            .weight
            .finite()
            .ok_or_else(|| LocalFactorError::InvalidArgument("closed forms need finite weights".into()))
    };
    match input.model.kind {
        ModelKind::ProjectiveSpace { n: 1 } => p1_factor(input.p, m(0)?, input.s, input.in_s),
        ModelKind::ProjectiveSpace { n } => {
            // 1 + (1 - p^{-n})·x/(1 - x), x = p^{-m(s - n)}.
            check_prime(input.p)?;
            let m = if input.in_s { 1.0 } else { m(0)? as f64 };
            if !(input.s > n as f64) {
                return Err(LocalFactorError::Divergent(format!("needs s > {n}")));
            }
            let lp = (input.p as f64).ln();
            let ln_x = -m * (input.s - n as f64) * lp;
            Ok(1.0 + (1.0 - (-(n as f64) * lp).exp()) * ln_x.exp() / -ln_x.exp_m1())
        }
        ModelKind::BlowupP2 => blowup_factor(input.p, m(0)?, m(1)?, input.s, input.in_s),
        ModelKind::Custom(_) => denef_factor(input),
    }
}

/// `denef_factor × ∏_α (1 - t_α)` outside `S`: the regularized local factor
/// whose product over primes converges at `s = a`.
pub fn normalized_factor(model: &OrbifoldModel, p: u64, s: f64) -> Result<f64, LocalFactorError> {
    let f = denef_factor(&LocalFactorInput {
        model,
        p,
        s,
        in_s: false,
    })?;
    let mut out = f;
    for c in &model.components {
        let t = component_t(c, p, s, false)?;
        out *= 1.0 - t;
    }
    Ok(out)
}

/// `min_α m_α(sλ_α - ρ_α + 1)`, the exponent governing how fast normalized
/// factors approach 1.
pub fn decay_exponent(model: &OrbifoldModel, s: f64) -> Result<f64, LocalFactorError> {
    let mut best = f64::INFINITY;
    for c in &model.components {
        let u = shifted_exponent(c, s)?;
        let m = c.weight.finite().map_or(f64::INFINITY, |m| m as f64);
        best = best.min(m * u);
    }
    Ok(best)
}

/// Everything the `local-factor` subcommand reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalFactorReport {
    pub p: u64,
    pub s: f64,
    pub in_s: bool,
    pub closed_form: f64,
    pub denef: f64,
    pub oracle: f64,
    pub oracle_bound: f64,
}

pub fn local_factor_report(input: &LocalFactorInput, config: &OracleConfig) -> Result<LocalFactorReport, LocalFactorError> {
    let oracle = shell_sum_oracle(input, config)?;
    Ok(LocalFactorReport {
        p: input.p,
        s: input.s,
        in_s: input.in_s,
        closed_form: closed_form_factor(input)?,
        denef: denef_factor(input)?,
        oracle: oracle.value,
        oracle_bound: oracle.bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(model: &OrbifoldModel, p: u64, s: f64, in_s: bool) -> LocalFactorInput<'_> {
        LocalFactorInput { model, p, s, in_s }
    }

    #[test]
    fn p1_examples() {
        assert!((p1_factor(2, 1, 2.0, false).unwrap() - 1.5).abs() < 1e-15);
        assert!((p1_factor(3, 2, 2.0, false).unwrap() - 13.0 / 12.0).abs() < 1e-15);
        assert_eq!(p1_factor(5, 3, 2.5, true).unwrap(), p1_factor(5, 1, 2.5, false).unwrap());
        assert!((p1_factor(7, 4, 1e6, false).unwrap() - 1.0).abs() < 1e-15);
        assert!(p1_factor(4, 1, 2.0, false).is_err());
        assert!(p1_factor(2, 1, 1.0, false).is_err());
    }

    #[test]
    fn denef_matches_closed_forms() {
        for m in 1..=3 {
            let p1 = OrbifoldModel::projective_space(1, m).unwrap();
            let p3 = OrbifoldModel::projective_space(3, m).unwrap();
            for p in [2, 3, 5, 7, 101] {
                for s in [1.3, 2.0, 3.7] {
                    for in_s in [false, true] {
                        let i = input(&p1, p, s, in_s);
                        let (a, b) = (denef_factor(&i).unwrap(), p1_factor(p, m, s, in_s).unwrap());
                        assert!((a - b).abs() <= 1e-12 * b);
                    }
                }
                let i = input(&p3, p, 3.5, false);
                let (a, b) = (denef_factor(&i).unwrap(), closed_form_factor(&i).unwrap());
                assert!((a - b).abs() <= 1e-12 * b);
            }
        }
        for m1 in 1..=3 {
            for m2 in 1..=3 {
                let model = OrbifoldModel::blowup_p2(m1, m2).unwrap();
                for p in [2, 3, 5, 7] {
                    for s in [1.0, 1.2, 2.0] {
                        for in_s in [false, true] {
                            let i = input(&model, p, s, in_s);
                            let a = denef_factor(&i).unwrap();
                            let b = blowup_factor(p, m1, m2, s, in_s).unwrap();
                            assert!((a - b).abs() <= 1e-12 * b, "{m1} {m2} {p} {s}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn blowup_factor_splits() {
        for (m1, m2, p, s) in [(1, 1, 2, 1.0), (2, 3, 3, 1.5), (3, 1, 5, 1.1)] {
            let model = OrbifoldModel::blowup_p2(m1, m2).unwrap();
            let c = 1.0 - 1.0 / p as f64;
            let mut prod = 1.0;
            for comp in &model.components {
                let t = component_t(comp, p, s, false).unwrap();
                prod *= 1.0 + c * t / (1.0 - t);
            }
            let f = blowup_factor(p, m1, m2, s, false).unwrap();
            assert!((f - prod).abs() < 1e-13);
        }
    }

    #[test]
    fn normalized_at_critical_point() {
        let p1 = OrbifoldModel::projective_space(1, 1).unwrap();
        assert!((normalized_factor(&p1, 2, 2.0).unwrap() - 0.75).abs() < 1e-15);
        for m in 1..=3 {
            let p1 = OrbifoldModel::projective_space(1, m).unwrap();
            let a = 1.0 + 1.0 / m as f64;
            for p in [2u64, 3, 11] {
                let v = normalized_factor(&p1, p, a).unwrap();
                assert!((v - (1.0 - 1.0 / (p * p) as f64)).abs() < 1e-14);
            }
        }
        let bl = OrbifoldModel::blowup_p2(2, 3).unwrap();
        for p in [2u64, 3, 11] {
            let v = normalized_factor(&bl, p, 1.0).unwrap();
            let e = 1.0 - 1.0 / (p * p) as f64;
            assert!((v - e * e).abs() < 1e-14);
        }
    }

    #[test]
    fn divergence_is_reported() {
        let bl = OrbifoldModel::blowup_p2(1, 1).unwrap();
        assert!(matches!(
            denef_factor(&input(&bl, 2, 0.5, false)),
            Err(LocalFactorError::Divergent(_))
        ));
    }
}
