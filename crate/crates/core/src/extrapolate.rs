//! Limit estimation for slowly convergent partial sums.
//!
//! Partial sums of the lattice sums handled here behave like
//! `S(n) = S + sum_{p >= 1} sum_{q <= Q} c_pq ln(n)^q / n^p` once `n` runs over
//! multiples of the period of the summand's phases. The limit is estimated by
//! least-squares fits of truncations of that expansion over the upper part of the
//! range, for a ladder of model orders. The reported value comes from the order whose
//! neighbours agree best, and that disagreement is the uncertainty.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Highest power `1/n^p` tried.
const MAX_ORDER: usize = 6;
/// At most this many sample points enter a fit.
const MAX_SAMPLES: usize = 40;
/// Fits use `n` in `[M / LOWER_FRACTION, M]`.
const LOWER_FRACTION: u64 = 8;
/// Relative rounding floor on the reported uncertainty.
const ROUNDING_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub value: Complex64,
    /// `None` when too few sample points were available to fit anything.
    pub uncertainty: Option<f64>,
    /// `(order, log power)` of the selected model.
    pub model: Option<(usize, usize)>,
    pub samples: usize,
}

/// Sample points: multiples of `period` in `[M/8, M]`, roughly geometric, deduplicated.
fn sample_points(m: u64, period: u64) -> Vec<u64> {
    let period = period.max(1);
    let hi = m / period;
    let lo = (m / LOWER_FRACTION).div_ceil(period).max(1);
    if hi < lo {
        return Vec::new();
    }
    let count = hi - lo + 1;
    if count as usize <= MAX_SAMPLES {
        return (lo..=hi).map(|k| k * period).collect();
    }
    let ratio = (hi as f64 / lo as f64).powf(1.0 / (MAX_SAMPLES - 1) as f64);
    let mut pts: Vec<u64> = (0..MAX_SAMPLES)
        .map(|i| ((lo as f64) * ratio.powi(i as i32)).round() as u64)
        .map(|k| k.clamp(lo, hi) * period)
        .collect();
    pts.dedup();
    pts
}

fn fit(points: &[u64], values: &[Complex64], m: u64, order: usize, logs: usize) -> Option<Complex64> {
    let ncols = 1 + order * (logs + 1);
    if points.len() < ncols + 2 {
        return None;
    }
    let mf = m as f64;
    let lm = mf.ln();
    let mut x = DMatrix::<f64>::zeros(points.len(), ncols);
    for (row, &n) in points.iter().enumerate() {
        let nf = n as f64;
        let ln = nf.ln();
        x[(row, 0)] = 1.0;
        let mut col = 1;
        for p in 1..=order {
            for q in 0..=logs {
                x[(row, col)] = (ln / lm).powi(q as i32) * (mf / nf).powi(p as i32);
                col += 1;
            }
        }
    }
    let svd = x.svd(true, true);
    let solve = |b: DVector<f64>| -> Option<f64> { svd.solve(&b, 1e-14).ok().map(|c| c[0]) };
    let re = solve(DVector::from_iterator(points.len(), values.iter().map(|z| z.re)))?;
    let im = solve(DVector::from_iterator(points.len(), values.iter().map(|z| z.im)))?;
    (re.is_finite() && im.is_finite()).then_some(Complex64::new(re, im))
}

/// Estimates `lim S(n)` from `partials[n - 1] = S(n)`, `n = 1..=M`.
pub fn extrapolate(partials: &[Complex64], period: u64, max_log_power: usize) -> Extrapolation {
    let m = partials.len() as u64;
    let last = partials.last().copied().unwrap_or_default();
    let points = sample_points(m, period);
    let values: Vec<Complex64> = points.iter().map(|&n| partials[n as usize - 1]).collect();
    let top = points.last().copied().unwrap_or(m);

    let mut best: Option<(f64, Complex64, (usize, usize))> = None;
    for logs in 0..=max_log_power {
        let estimates: Vec<Option<Complex64>> = (1..=MAX_ORDER)
            .map(|p| fit(&points, &values, top, p, logs))
            .collect();
        for p in 1..MAX_ORDER {
            let (Some(prev), Some(cur)) = (estimates[p - 1], estimates[p]) else {
                continue;
            };
            let mut spread = (cur - prev).norm();
            if let Some(next) = estimates.get(p + 1).copied().flatten() {
                spread = spread.max((next - cur).norm());
            }
            if best.is_none_or(|(s, _, _)| spread < s) {
                best = Some((spread, cur, (p + 1, logs)));
            }
        }
    }
    match best {
        Some((spread, value, model)) => Extrapolation {
            value,
            uncertainty: Some(spread + ROUNDING_FLOOR * (1.0 + value.norm())),
            model: Some(model),
            samples: points.len(),
        },
        None => Extrapolation {
            value: last,
            uncertainty: None,
            model: None,
            samples: points.len(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summation::prefix_sums;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn basel_partial_sums() {
        let terms: Vec<Complex64> = (1..=2000).map(|n| c(1.0 / (n as f64).powi(2))).collect();
        let ex = extrapolate(&prefix_sums(&terms), 1, 1);
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!((ex.value.re - exact).abs() < 1e-11, "{:?}", ex);
        assert!(ex.uncertainty.unwrap() < 1e-8);
        assert!((ex.value.re - exact).abs() <= ex.uncertainty.unwrap());
    }

    #[test]
    fn logarithmic_tail() {
        // sum H_n / n^2 = 2 zeta(3)
        let mut h = 0.0;
        let terms: Vec<Complex64> = (1..=3000)
            .map(|n| {
                h += 1.0 / n as f64;
                c(h / (n as f64).powi(2))
            })
            .collect();
        let ex = extrapolate(&prefix_sums(&terms), 1, 2);
        let zeta3 = 1.2020569031595942;
        assert!((ex.value.re - 2.0 * zeta3).abs() < 1e-9, "{:?}", ex);
    }

    #[test]
    fn alternating_with_period() {
        let terms: Vec<Complex64> = (1..=1000)
            .map(|n| c(if n % 2 == 0 { 1.0 } else { -1.0 } / (n as f64).powi(2)))
            .collect();
        let ex = extrapolate(&prefix_sums(&terms), 2, 1);
        let exact = -std::f64::consts::PI.powi(2) / 12.0;
        assert!((ex.value.re - exact).abs() < 1e-11, "{:?}", ex);
    }

    #[test]
    fn too_short_to_fit() {
        let terms = vec![c(1.0), c(0.5)];
        let ex = extrapolate(&prefix_sums(&terms), 1, 1);
        assert!(ex.uncertainty.is_none());
        assert_eq!(ex.value, c(1.5));
    }
}
