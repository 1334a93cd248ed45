//! Exact Bernoulli numbers and polynomials.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::Rational;

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `B_0 .. B_N` and the polynomials `B_n(x)` as ascending coefficient lists.
///
/// Uses the convention `B_1 = -1/2`, so `t e^{xt} / (e^t - 1) = sum B_n(x) t^n / n!`.
#[derive(Debug, Clone)]
pub struct BernoulliTable {
    numbers: Vec<Rational>,
    polys: Vec<Vec<Rational>>,
}

impl BernoulliTable {
    pub fn new(max_degree: usize) -> Self {
        // sum_{k<=n} C(n+1, k) B_k = 0
        let mut numbers: Vec<Rational> = Vec::with_capacity(max_degree + 1);
        numbers.push(Rational::one());
        for n in 1..=max_degree {
            let s: Rational = (0..n)
                .map(|k| Rational::from_integer(binomial(n + 1, k)) * &numbers[k])
                .sum();
            numbers.push(-s / Rational::from_integer(BigInt::from(n + 1)));
        }
        let polys = (0..=max_degree)
            .map(|n| {
                (0..=n)
                    .map(|k| Rational::from_integer(binomial(n, k)) * &numbers[n - k])
                    .collect()
            })
            .collect();
        BernoulliTable { numbers, polys }
    }

    pub fn max_degree(&self) -> usize {
        self.numbers.len() - 1
    }

    pub fn number(&self, n: usize) -> &Rational {
        &self.numbers[n]
    }

    pub fn polynomial(&self, n: usize) -> &[Rational] {
        &self.polys[n]
    }

    /// `B_n(x)`, exact.
    pub fn eval(&self, n: usize, x: &Rational) -> Rational {
        self.polys[n]
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    #[test]
    fn first_numbers() {
        let t = BernoulliTable::new(12);
        assert_eq!(t.number(0), &q(1, 1));
        assert_eq!(t.number(1), &q(-1, 2));
        assert_eq!(t.number(2), &q(1, 6));
        assert_eq!(t.number(3), &q(0, 1));
        assert_eq!(t.number(4), &q(-1, 30));
        assert_eq!(t.number(6), &q(1, 42));
        assert_eq!(t.number(12), &q(-691, 2730));
    }

    #[test]
    fn polynomial_values() {
        let t = BernoulliTable::new(8);
        assert_eq!(t.polynomial(1), &[q(-1, 2), q(1, 1)]);
        assert_eq!(t.eval(1, &q(1, 2)), q(0, 1));
        // B_n(1) = B_n except n = 1
        for n in 0..=8 {
            let want = if n == 1 { q(1, 2) } else { t.number(n).clone() };
            assert_eq!(t.eval(n, &q(1, 1)), want);
        }
        // B_2(x) = x^2 - x + 1/6
        assert_eq!(t.eval(2, &q(1, 3)), q(1, 9) - q(1, 3) + q(1, 6));
    }

    #[test]
    fn appell_property() {
        let t = BernoulliTable::new(15);
        for n in 1..=15 {
            let p = t.polynomial(n);
            let prev = t.polynomial(n - 1);
            for k in 1..=n {
                let derivative = &p[k] * Rational::from_integer(BigInt::from(k));
                assert_eq!(derivative, &prev[k - 1] * Rational::from_integer(BigInt::from(n)));
            }
        }
    }
}
