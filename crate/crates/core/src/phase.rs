//! Unit phases `e(theta) = exp(2 pi i theta)` for exact rational `theta`.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// `theta - floor(theta)`, exact.
pub fn frac(theta: &Rational) -> Rational {
    theta - theta.floor()
}

/// `e(theta)` from the reduced residue of `theta` mod 1. Quarter turns are exact.
pub fn unit_phase(theta: &Rational) -> Complex64 {
    let t = frac(theta);
    let q = t.denom();
    let p = t.numer();
    match q.to_u64() {
        Some(1) => return Complex64::new(1.0, 0.0),
        Some(2) => return Complex64::new(-1.0, 0.0),
        Some(4) => {
            return if p.is_one() {
                Complex64::new(0.0, 1.0)
            } else {
                Complex64::new(0.0, -1.0)
            }
        }
        _ => {}
    }
    // fold the numerator into (-q/2, q/2] so that e(-theta) is the exact conjugate
    let folded = if p * 2 > *q { p - q } else { p.clone() };
    let x = folded.to_f64().unwrap_or(0.0) / q.to_f64().unwrap_or(1.0);
    Complex64::from_polar(1.0, TAU * x)
}

/// `e(p / q)` for machine integers, `q > 0`.
pub fn unit_phase_int(p: i64, q: i64) -> Complex64 {
    unit_phase(&Rational::new(BigInt::from(p), BigInt::from(q)))
}

/// Table of `e(k / q)` for `k = 0..q`.
pub fn phase_table(q: u64) -> Vec<Complex64> {
    (0..q)
        .map(|k| unit_phase_int(k as i64, q as i64))
        .collect()
}

/// Least common multiple of the denominators of `values` (1 for an empty list).
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Sign of an exact rational: -1, 0 or 1.
pub fn sign(x: &Rational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    #[test]
    fn frac_of_negative() {
        assert_eq!(frac(&q(-7, 3)), q(2, 3));
        assert_eq!(frac(&q(7, 3)), q(1, 3));
        assert_eq!(frac(&q(-2, 1)), q(0, 1));
    }

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(unit_phase(&q(1, 2)), Complex64::new(-1.0, 0.0));
        assert_eq!(unit_phase(&q(5, 4)), Complex64::new(0.0, 1.0));
        assert_eq!(unit_phase(&q(-1, 4)), Complex64::new(0.0, -1.0));
        assert_eq!(unit_phase(&q(3, 1)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn generic_phase() {
        let z = unit_phase(&q(1, 3));
        assert!((z - Complex64::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
        let w = unit_phase(&q(-1, 3));
        assert_eq!(w, z.conj());
    }
}
