use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{ArithError, Rational};

/// Integer coordinates `(y_0, …, y_k)` proportional to `xs`, with
/// `gcd = 1` and the first nonzero entry positive.
pub fn primitive_coords(xs: &[Rational]) -> Result<Vec<BigInt>, ArithError> {
    if xs.iter().all(Rational::is_zero) {
        return Err(ArithError::AllZero);
    }
    let lcm = xs
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ys: Vec<BigInt> = xs
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    let g = ys.iter().fold(BigInt::zero(), |acc, y| acc.gcd(y));
    let flip = ys.iter().find(|y| !y.is_zero()).is_some_and(|y| y.is_negative());
    for y in &mut ys {
        *y /= &g;
        if flip {
            *y = -&*y;
        }
    }
    Ok(ys)
}

/// Same normalization for integer input.
pub fn primitive_integers(xs: &[BigInt]) -> Result<Vec<BigInt>, ArithError> {
    let qs: Vec<Rational> = xs.iter().cloned().map(Rational::from_integer).collect();
    primitive_coords(&qs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qs(v: &[&str]) -> Vec<Rational> {
        v.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(primitive_coords(&qs(&["1", "1/4", "3/2"])).unwrap(), ints(&[4, 1, 6]));
        assert_eq!(primitive_coords(&qs(&["0", "0", "5"])).unwrap(), ints(&[0, 0, 1]));
        assert_eq!(primitive_coords(&qs(&["1", "-2/3"])).unwrap(), ints(&[3, -2]));
    }

    #[test]
    fn sign_tie_break() {
        assert_eq!(primitive_coords(&qs(&["0", "-2", "4"])).unwrap(), ints(&[0, 1, -2]));
    }

    #[test]
    fn all_zero_rejected() {
        assert_eq!(primitive_coords(&qs(&["0", "0"])), Err(ArithError::AllZero));
    }
}
