//! Exact integer combinatorics, converted to floating point only at the end.

use crate::scalar::Real;

/// Largest argument for which every binomial coefficient fits in `u128`.
pub const MAX_EXACT_N: usize = 120;

/// Exact binomial coefficient `n choose k` (zero when `k > n`).
pub fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Exact multinomial `n! / (k1! k2! (n - k1 - k2)!)`; zero when `k1 + k2 > n`.
///
/// Panics if the value exceeds `u128` (possible from `n` around 80 up).
pub fn multinomial_u128(n: usize, k1: usize, k2: usize) -> u128 {
    if k1 + k2 > n {
        return 0;
    }
    binomial_u128(n, k1)
        .checked_mul(binomial_u128(n - k1, k2))
        .expect("multinomial overflows u128")
}

pub fn binomial<T: Real>(n: usize, k: usize) -> T {
    T::from_u128(binomial_u128(n, k)).expect("binomial representable")
}

/// Multinomial as a product of two exact binomials, valid up to [`MAX_EXACT_N`].
pub fn multinomial<T: Real>(n: usize, k1: usize, k2: usize) -> T {
    if k1 + k2 > n {
        return T::zero();
    }
    binomial::<T>(n, k1) * binomial::<T>(n - k1, k2)
}
