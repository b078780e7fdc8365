//! Partial sums `Σ_{H(x) ≤ B} H(x)^{-s}` of the height zeta function.

use serde::Serialize;

use crate::enumerate::{blowup_points_by_height, pn_points_by_height, Counts, EnumerateError, Mode};
use crate::geometry::Bound;
use crate::orbifold::{ModelKind, OrbifoldModel, PlaceSet};

use super::FitError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZetaPartialSum {
    pub s: f64,
    pub bound: String,
    pub mode: Mode,
    pub value: f64,
    pub points: u128,
    /// False when `s ≤ a`, where the full series diverges.
    pub converges: bool,
}

fn weights(model: &OrbifoldModel) -> Result<Vec<u32>, FitError> {
    model
        .weights()
        .into_iter()
        .map(|w| {
            w.finite()
                .ok_or_else(|| FitError::Enumerate(EnumerateError::Unsupported("infinite weights".into())))
        })
        .collect()
}

/// Calls `visit(ln H, k)` for batches of `k` points; heights ascend within
/// each batch family but not globally.
fn visit_heights(
    model: &OrbifoldModel,
    s_set: &PlaceSet,
    bound: &Bound,
    mode: Mode,
    visit: &mut dyn FnMut(f64, u128),
) -> Result<(), FitError> {
    let m = weights(model)?;
    match model.kind {
        ModelKind::ProjectiveSpace { n } => {
            // Heights are integers here, so the points are tallied per height.
            let x = bound.floor_u64();
            let mut tally = vec![0u128; x as usize + 1];
            pn_points_by_height(n, m[0], s_set, x, &mut |h, c: Counts| tally[h as usize] += c.get(mode));
            for (h, &k) in tally.iter().enumerate().skip(1) {
                if k > 0 {
                    visit((h as f64).ln(), k);
                }
            }
        }
        ModelKind::BlowupP2 => {
            let c = &model.components;
            let l1 = c[0].lambda_f64();
            let mu = c[1].lambda_f64() - l1;
            blowup_points_by_height(m[0], m[1], s_set, bound, &mut |big_m, t, c: Counts| {
                let k = c.get(mode);
                if k > 0 {
                    visit(l1 * (big_m as f64).ln() + mu * (t as f64).ln(), k);
                }
            });
        }
        ModelKind::Custom(ref name) => return Err(FitError::Enumerate(EnumerateError::Unsupported(name.clone()))),
    }
    Ok(())
}

/// Partial sums for several exponents in one pass over the points.
pub fn zeta_partial_sums(
    model: &OrbifoldModel,
    s_set: &PlaceSet,
    exponents: &[f64],
    bound: &Bound,
    mode: Mode,
) -> Result<Vec<ZetaPartialSum>, FitError> {
    if let Some(bad) = exponents.iter().find(|s| !s.is_finite()) {
        return Err(FitError::InvalidArgument(format!("exponent {bad} is not finite")));
    }
    let mut sums = vec![0.0; exponents.len()];
    let mut points = 0u128;
    visit_heights(model, s_set, bound, mode, &mut |ln_h, k| {
        points += k;
        for (sum, s) in sums.iter_mut().zip(exponents) {
            *sum += k as f64 * (-s * ln_h).exp();
        }
    })?;
    let a = model.a_invariant();
    let a = num_traits::ToPrimitive::to_f64(&a).unwrap_or(f64::NAN);
    Ok(exponents
        .iter()
        .zip(sums)
        .map(|(&s, value)| ZetaPartialSum {
            s,
            bound: bound.text().to_string(),
            mode,
            value,
            points,
            converges: s > a,
        })
        .collect())
}

pub fn zeta_partial_sum(
    model: &OrbifoldModel,
    s_set: &PlaceSet,
    s: f64,
    bound: &Bound,
    mode: Mode,
) -> Result<ZetaPartialSum, FitError> {
    Ok(zeta_partial_sums(model, s_set, &[s], bound, mode)?.remove(0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbePoint {
    pub s: f64,
    /// `(s - a)^b · Σ_{H ≤ B} H^{-s}`.
    pub value: f64,
}

/// `(s - a)^b` times the partial sum, which should level off near `c` as
/// `s` decreases to `a` with `B` large. Only a diagnostic.
pub fn residue_probe(
    model: &OrbifoldModel,
    s_set: &PlaceSet,
    s_grid: &[f64],
    bound: &Bound,
    mode: Mode,
) -> Result<Vec<ProbePoint>, FitError> {
    let a = num_traits::ToPrimitive::to_f64(&model.a_invariant()).unwrap_or(f64::NAN);
    if let Some(bad) = s_grid.iter().find(|&&s| !(s > a)) {
        return Err(FitError::InvalidArgument(format!("probe point {bad} is not above a = {a}")));
    }
    let b = model.b_invariant() as i32;
    Ok(zeta_partial_sums(model, s_set, s_grid, bound, mode)?
        .into_iter()
        .map(|z| ProbePoint {
            s: z.s,
            value: (z.s - a).powi(b) * z.value,
        })
        .collect())
}
