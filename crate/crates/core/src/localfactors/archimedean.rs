//! Archimedean local factors `∫ H_∞(x)^{-s} dx` for the built-in models,
//! by exact piecewise integration and by independent quadrature.

use serde::Serialize;

use super::quadrature::tanh_sinh;
use super::LocalFactorError;

const TOL: f64 = 1e-11;

/// Both evaluations of an archimedean factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArchimedeanValue {
    pub closed_form: f64,
    pub quadrature: f64,
    pub difference: f64,
}

impl ArchimedeanValue {
    fn new(closed_form: f64, quadrature: f64) -> Self {
        ArchimedeanValue {
            closed_form,
            quadrature,
            difference: (closed_form - quadrature).abs(),
        }
    }
}

/// `∫_0^∞ g`, as `∫_0^1 g(x) dx + ∫_0^1 g(1/t)/t² dt`.
fn half_line(g: &dyn Fn(f64) -> f64) -> f64 {
    let head = tanh_sinh(&|x| g(x), TOL).value;
    let tail = tanh_sinh(&|t| inverted(g, 1.0, t), TOL).value;
    head + tail
}

/// `∫_c^∞ g`, through `x = c/t`.
fn beyond(c: f64, g: &dyn Fn(f64) -> f64) -> f64 {
    tanh_sinh(&|t| inverted(g, c, t), TOL).value
}

/// `g(c/t)·c/t²`, taken as 0 where `g` has already decayed to 0 (the
/// Jacobian alone overflows at the extreme nodes).
fn inverted(g: &dyn Fn(f64) -> f64, c: f64, t: f64) -> f64 {
    let x = c / t;
    let v = g(x);
    if v == 0.0 {
        0.0
    } else {
        (v * x) / t
    }
}

/// `∫_{ℝⁿ} max(1, ‖x‖_∞)^{-s} dx = 2ⁿ s/(s - n)` for `s > n`.
pub fn archimedean_p1(n: u32, s: f64) -> Result<ArchimedeanValue, LocalFactorError> {
    if n == 0 {
        return Err(LocalFactorError::InvalidArgument("n must be >= 1".into()));
    }
    if !(s > n as f64) {
        return Err(LocalFactorError::Divergent(format!(
            "archimedean integral on {n}-space needs s > {n}, got {s}"
        )));
    }
    let closed = 2f64.powi(n as i32) * s / (s - n as f64);
    let quad = match n {
        1 => 2.0 * half_line(&|x| x.max(1.0).powf(-s)),
        2 => {
            // First quadrant, inner integral over y split at max(1, x).
            let inner = |x: f64| {
                let c = x.max(1.0);
                let near = tanh_sinh(&|y| c * (c * y).max(1.0).max(x).powf(-s), TOL).value;
                near + beyond(c, &|y| y.max(x).max(1.0).powf(-s))
            };
            4.0 * half_line(&inner)
        }
        _ => {
            // Sup-norm shells: vol{‖x‖_∞ ≤ r} = (2r)ⁿ.
            let n_f = n as f64;
            let shell = |r: f64| {
                let e = if r <= 1.0 { n_f - 1.0 } else { n_f - 1.0 - s };
                n_f * 2f64.powf(n_f) * r.powf(e)
            };
            half_line(&shell)
        }
    };
    Ok(ArchimedeanValue::new(closed, quad))
}

/// `∫_{ℝ²} max(1,|u|,|w|)^{-A} max(1,|u|)^{-B} du dw` with `A = s(1 + 1/m1)`
/// and `B = s(1 + 1/m2 - 1/m1)`; equals `4·A/(A-1)·(A+B-1)/(A+B-2)`.
pub fn archimedean_blowup(m1: u32, m2: u32, s: f64) -> Result<ArchimedeanValue, LocalFactorError> {
    if m1 == 0 || m2 == 0 {
        return Err(LocalFactorError::InvalidArgument("m1 and m2 must be >= 1".into()));
    }
    let a = s * (1.0 + 1.0 / m1 as f64);
    let b = s * (1.0 + 1.0 / m2 as f64 - 1.0 / m1 as f64);
    if !(a > 1.0) || !(a + b > 2.0) {
        return Err(LocalFactorError::Divergent(format!(
            "blow-up archimedean integral diverges at s = {s}"
        )));
    }
    let closed = 4.0 * a / (a - 1.0) * (a + b - 1.0) / (a + b - 2.0);
    let f = |u: f64, w: f64| u.max(w).max(1.0).powf(-a) * u.max(1.0).powf(-b);
    let inner = |u: f64| {
        let c = u.max(1.0);
        // On [0, c] the first factor is constant in w.
        let near = tanh_sinh(&|y| c * f(u, c * y), TOL).value;
        near + beyond(c, &|w| f(u, w))
    };
    let quad = 4.0 * half_line(&inner);
    Ok(ArchimedeanValue::new(closed, quad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_values() {
        let v = archimedean_p1(1, 2.0).unwrap();
        assert_eq!(v.closed_form, 4.0);
        assert!(v.difference < 1e-9, "{v:?}");
        let v = archimedean_p1(2, 3.0).unwrap();
        assert!((v.closed_form - 12.0).abs() < 1e-12);
        assert!(v.difference < 1e-8, "{v:?}");
        let v = archimedean_p1(3, 4.5).unwrap();
        assert!(v.difference < 1e-8, "{v:?}");
        assert!((archimedean_p1(1, 1e9).unwrap().closed_form - 2.0).abs() < 1e-8);
        assert!(archimedean_p1(1, 1.0).is_err());
    }

    #[test]
    fn blowup_values() {
        let v = archimedean_blowup(1, 1, 1.0).unwrap();
        assert!((v.closed_form - 16.0).abs() < 1e-12);
        assert!(v.difference < 1e-6, "{v:?}");
        for (m1, m2) in [(2, 1), (1, 3), (3, 2), (3, 3)] {
            let v = archimedean_blowup(m1, m2, 1.0).unwrap();
            let expected = 4.0 * (1 + m1) as f64 * (1 + m2) as f64;
            assert!((v.closed_form - expected).abs() < 1e-9 * expected);
            assert!(v.difference < 1e-6 * expected, "{m1} {m2} {v:?}");
        }
        assert!((archimedean_blowup(2, 2, 1e8).unwrap().closed_form - 4.0).abs() < 1e-6);
        assert!(archimedean_blowup(1, 1, 0.4).is_err());
    }
}
