//! Small float helpers for the `no_std` build (std float methods live behind
//! libm here).

pub(crate) use libm::{cos, exp, fabs, log, sin, sqrt};

/// `x^k` by binary exponentiation; exact whenever the true value is an
/// integer below 2^53.
pub(crate) fn powi(x: f64, mut k: u32) -> f64 {
    let mut base = x;
    let mut acc = 1.0;
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

/// `n!` as a float; exact up to `n = 22`, then correctly rounded products.
pub(crate) fn factorial(n: u64) -> f64 {
    let mut acc = 1.0;
    for i in 2..=n {
        acc *= i as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_repeated_multiplication() {
        assert_eq!(powi(10.0, 6), 1_000_000.0);
        assert_eq!(powi(2.0, 0), 1.0);
        assert_eq!(powi(3.0, 5), 243.0);
    }

    #[test]
    fn small_factorials() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(5), 120.0);
        assert_eq!(factorial(10), 3_628_800.0);
    }
}
