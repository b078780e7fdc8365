//! The Riemann zeta function on the real half-line `s > 1`.

use std::f64::consts::PI;

use super::ConstantError;

/// `B_{2k}/(2k)!` for `k = 1..=10`.
const BERNOULLI_OVER_FACTORIAL: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
];

/// Terms summed directly before the Euler–Maclaurin correction takes over.
const HEAD: u32 = 16;

/// `ζ(s)` for real `s > 1`, exact closed forms at 2 and 4.
pub fn riemann_zeta(s: f64) -> Result<f64, ConstantError> {
    if !(s > 1.0) {
        return Err(ConstantError::Domain(format!("ζ(s) needs s > 1, got {s}")));
    }
    if s == 2.0 {
        return Ok(PI * PI / 6.0);
    }
    if s == 4.0 {
        return Ok(PI.powi(4) / 90.0);
    }
    let n = HEAD as f64;
    // Smallest terms first.
    let mut head = 0.0;
    for k in (1..HEAD).rev() {
        head += (k as f64).powf(-s);
    }
    let ns = n.powf(-s);
    let mut tail = n * ns / (s - 1.0) + ns / 2.0;
    // Σ B_{2k}/(2k)! · s(s+1)…(s+2k-2) · N^{-s-2k+1}
    let mut rising = s;
    let mut power = ns / n;
    for (k, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if k > 0 {
            let j = (2 * k) as f64;
            rising *= (s + j - 1.0) * (s + j);
            power /= n * n;
        }
        tail += c * rising * power;
    }
    Ok(head + tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(riemann_zeta(2.0).unwrap(), PI * PI / 6.0);
        assert!((riemann_zeta(3.0).unwrap() - 1.202_056_903_159_594_3).abs() < 1e-14);
        assert!((riemann_zeta(1.5).unwrap() - 2.612_375_348_685_488).abs() < 1e-13);
        assert!((riemann_zeta(2.0 + 1e-12).unwrap() - PI * PI / 6.0).abs() < 1e-10);
        assert!((riemann_zeta(60.0).unwrap() - 1.0).abs() < 1e-17);
        assert!(riemann_zeta(1.0).is_err());
        assert!(riemann_zeta(f64::NAN).is_err());
    }

    #[test]
    fn near_the_pole() {
        // ζ(1 + h) = 1/h + γ + O(h)
        let s = 1.0 + 1e-6;
        let h = s - 1.0;
        let z = riemann_zeta(s).unwrap();
        assert!((z - 1.0 / h - 0.577_215_664_901_532_9).abs() < 1e-5);
    }
}
