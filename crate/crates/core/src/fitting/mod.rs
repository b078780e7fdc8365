//! Height zeta partial sums and fits of count series to the predicted
//! shape `κ·Bᵃ(log B)^{b-1}`.
//!
//! Fits work in ratio space: each grid point contributes
//! `N(B) / (Bᵃ(log B)^{b-1})`. The leading-term fit takes the mean ratio.
//! The two-term fits add a correction that is linear in ratio space: either
//! `κ'·Bᵃ(log B)^{b-2}` (a line in `1/log B`) or `κ'·B^{a-δ}(log B)^{b-1}`
//! (a line in `B^{-δ}`).

mod zeta;

use serde::Serialize;

use crate::enumerate::{CountSeries, EnumerateError, Mode};

pub use zeta::{residue_probe, zeta_partial_sum, zeta_partial_sums, ProbePoint, ZetaPartialSum};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `N ≈ κ·Bᵃ(log B)^{b-1}`
    #[default]
    Leading,
    /// `N ≈ κ·Bᵃ(log B)^{b-1} + κ'·Bᵃ(log B)^{b-2}`, for `b ≥ 2`.
    WithLogSecondary,
    /// `N ≈ (κ + κ'·B^{-δ})·Bᵃ(log B)^{b-1}`, for `δ > 0`.
    WithPowerSecondary { delta: f64 },
}

impl FitModel {
    /// The ratio-space regressor of the secondary term.
    fn regressor(&self, bound: f64) -> f64 {
        match *self {
            FitModel::Leading => 0.0,
            FitModel::WithLogSecondary => 1.0 / bound.ln(),
            FitModel::WithPowerSecondary { delta } => bound.powf(-delta),
        }
    }
}

/// Closed range of bounds used by a fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    /// The top two decades below `hi`.
    pub fn top_decades(hi: f64) -> Self {
        Window { lo: hi / 100.0, hi }
    }

    fn contains(&self, b: f64) -> bool {
        // Grid points parsed from text may sit an ulp off a decade.
        let slack = 1e-12;
        b >= self.lo * (1.0 - slack) && b <= self.hi * (1.0 + slack)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    /// `κ·a·(b-1)!`, the estimate of `c`.
    pub c_hat: f64,
    /// `κ`, the coefficient of `Bᵃ(log B)^{b-1}`.
    pub coefficient: f64,
    /// `κ'` in the two-term fit.
    pub secondary: Option<f64>,
    pub a_used: f64,
    pub b_used: u32,
    pub model: FitModel,
    /// Relative RMS misfit over the window.
    pub residual: f64,
    pub window: Window,
    pub points_used: usize,
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Fits `(B, N(B))` pairs inside `window` (all of them when `None`).
pub fn fit_counts(
    data: &[(f64, f64)],
    a: f64,
    b: u32,
    window: Option<Window>,
    model: FitModel,
) -> Result<FitResult, FitError> {
    if !(a > 0.0) || b == 0 {
        return Err(FitError::InvalidArgument(format!("need a > 0 and b >= 1, got a = {a}, b = {b}")));
    }
    match model {
        FitModel::WithLogSecondary if b < 2 => {
            return Err(FitError::InvalidArgument("the log-secondary fit needs b >= 2".into()));
        }
        FitModel::WithPowerSecondary { delta } if !(delta > 0.0) => {
            return Err(FitError::InvalidArgument(format!("secondary exponent must be positive, got {delta}")));
        }
        _ => {}
    }
    let window = window.unwrap_or(Window {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    });
    let used: Vec<(f64, f64)> = data.iter().copied().filter(|&(bound, _)| window.contains(bound)).collect();
    if used.is_empty() {
        return Err(FitError::InvalidArgument(format!(
            "window [{}, {}] contains no grid points",
            window.lo, window.hi
        )));
    }
    // (secondary regressor, ratio to the leading shape)
    let mut rows = Vec::with_capacity(used.len());
    for &(bound, n) in &used {
        let lb = bound.ln();
        if b >= 2 && !(lb > 0.0) {
            return Err(FitError::InvalidArgument(format!("log B vanishes at B = {bound}")));
        }
        let shape = bound.powf(a) * lb.powi(b as i32 - 1);
        rows.push((model.regressor(bound), n / shape));
    }
    let k = rows.len() as f64;
    let mean_r = rows.iter().map(|r| r.1).sum::<f64>() / k;
    let (kappa, secondary) = match model {
        FitModel::Leading => (mean_r, None),
        FitModel::WithLogSecondary | FitModel::WithPowerSecondary { .. } => {
            let mean_x = rows.iter().map(|r| r.0).sum::<f64>() / k;
            let sxx: f64 = rows.iter().map(|r| (r.0 - mean_x).powi(2)).sum();
            if !(sxx > 0.0) {
                return Err(FitError::InvalidArgument(
                    "the two-term fit needs at least two distinct bounds".into(),
                ));
            }
            let sxy: f64 = rows.iter().map(|r| (r.0 - mean_x) * (r.1 - mean_r)).sum();
            let slope = sxy / sxx;
            (mean_r - slope * mean_x, Some(slope))
        }
    };
    let predict = |x: f64| kappa + secondary.unwrap_or(0.0) * x;
    let residual = (rows.iter().map(|&(x, r)| (r / predict(x) - 1.0).powi(2)).sum::<f64>() / k).sqrt();
    Ok(FitResult {
        c_hat: kappa * a * factorial(b - 1),
        coefficient: kappa,
        secondary,
        a_used: a,
        b_used: b,
        model,
        residual,
        window: Window {
            lo: used.iter().map(|u| u.0).fold(f64::INFINITY, f64::min),
            hi: used.iter().map(|u| u.0).fold(f64::NEG_INFINITY, f64::max),
        },
        points_used: used.len(),
    })
}

/// `(B, N(B))` pairs of one mode of a series.
pub fn series_points(series: &CountSeries, mode: Mode) -> Vec<(f64, f64)> {
    series
        .records
        .iter()
        .map(|r| (r.bound.to_f64(), r.get(mode) as f64))
        .collect()
}

/// Fits a series with its own model's `a` and `b`.
pub fn fit_series(series: &CountSeries, mode: Mode, window: Option<Window>, model: FitModel) -> Result<FitResult, FitError> {
    let a = num_traits::ToPrimitive::to_f64(&series.model.a_invariant()).unwrap_or(f64::NAN);
    let b = series.model.b_invariant() as u32;
    fit_counts(&series_points(series, mode), a, b, window, model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_own_model() {
        let data: Vec<(f64, f64)> = (2..=5)
            .map(|e| {
                let b = 10f64.powi(e);
                (b, (1.2159 * b * b).round())
            })
            .collect();
        let f = fit_counts(&data, 2.0, 1, None, FitModel::Leading).unwrap();
        assert!((f.coefficient - 1.2159).abs() < 1e-3);
        assert!((f.c_hat - 2.0 * 1.2159).abs() < 2e-3);

        let data: Vec<(f64, f64)> = (2..=6).map(|e| 10f64.powi(e)).map(|b| (b, b * b.ln())).collect();
        let f = fit_counts(&data, 1.0, 2, None, FitModel::Leading).unwrap();
        assert!((f.coefficient - 1.0).abs() < 1e-6);
        assert!(f.residual < 1e-12);

        let data: Vec<(f64, f64)> = (2..=6)
            .map(|e| 10f64.powi(e))
            .map(|b| (b, 0.7 * b * b.ln() + 3.0 * b))
            .collect();
        let f = fit_counts(&data, 1.0, 2, None, FitModel::WithLogSecondary).unwrap();
        assert!((f.coefficient - 0.7).abs() < 1e-9);
        assert!((f.secondary.unwrap() - 3.0).abs() < 1e-8);
        assert!(f.residual < 1e-12);

        let data: Vec<(f64, f64)> = (2..=6)
            .map(|e| 10f64.powi(e))
            .map(|b| (b, 2.25 * b.powf(1.5) - 1.1 * b.powf(4.0 / 3.0)))
            .collect();
        let f = fit_counts(&data, 1.5, 1, None, FitModel::WithPowerSecondary { delta: 1.0 / 6.0 }).unwrap();
        assert!((f.coefficient - 2.25).abs() < 1e-9);
        assert!((f.secondary.unwrap() + 1.1).abs() < 1e-8);
    }

    #[test]
    fn window_errors() {
        let data = [(10.0, 100.0), (100.0, 10000.0)];
        let w = Window { lo: 1e3, hi: 1e4 };
        assert!(fit_counts(&data, 2.0, 1, Some(w), FitModel::Leading).is_err());
        assert!(fit_counts(&data, 2.0, 1, None, FitModel::WithLogSecondary).is_err());
        let f = fit_counts(&data, 2.0, 1, Some(Window::top_decades(100.0)), FitModel::Leading).unwrap();
        assert_eq!(f.points_used, 2);
        assert_eq!(f.window, Window { lo: 10.0, hi: 100.0 });
    }
}
