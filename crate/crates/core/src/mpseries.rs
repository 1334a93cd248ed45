//! Truncated multivariate power series with `Complex64` coefficients.
//!
//! A [`Shape`] fixes the number of variables, a per-variable cap on each exponent and
//! a cap on the total degree. Every operation truncates to the shape, so the ring
//! operations are exact on all stored coefficients.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::bernoulli::BernoulliTable;
use crate::error::SeriesError;
use crate::Rational;

/// Relative threshold under which a constant term counts as zero in [`invert_unit`].
pub const DEFAULT_UNIT_THRESHOLD: f64 = 1e-12;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    caps: Vec<usize>,
    total: usize,
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "caps={:?} total={}", self.caps, self.total)
    }
}

impl Shape {
    /// Per-variable caps and a total-degree cap.
    pub fn new(caps: Vec<usize>, total: usize) -> Shape {
        Shape { caps, total }
    }

    /// Per-variable caps; the total cap is their sum (no extra truncation).
    pub fn from_caps(caps: Vec<usize>) -> Shape {
        let total = caps.iter().sum();
        Shape { caps, total }
    }

    /// Every variable capped by the total degree only.
    pub fn total_degree(nvars: usize, total: usize) -> Shape {
        Shape {
            caps: vec![total; nvars],
            total,
        }
    }

    pub fn nvars(&self) -> usize {
        self.caps.len()
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn contains(&self, idx: &[usize]) -> bool {
        idx.len() == self.caps.len()
            && idx.iter().zip(&self.caps).all(|(e, c)| e <= c)
            && idx.iter().sum::<usize>() <= self.total
    }
}

/// Shape plus the index tables derived from it.
struct Layout {
    shape: Shape,
    strides: Vec<usize>,
    len: usize,
    /// exponent vector of every slot in the box
    exps: Vec<Vec<usize>>,
    /// slots inside the total-degree cap, sorted by (degree, slot)
    valid: Vec<(usize, usize)>,
}

impl Layout {
    fn new(shape: Shape) -> Layout {
        let mut strides = Vec::with_capacity(shape.nvars());
        let mut len = 1usize;
        for &c in shape.caps.iter().rev() {
            strides.push(len);
            len *= c + 1;
        }
        strides.reverse();
        let exps: Vec<Vec<usize>> = (0..len)
            .map(|slot| {
                shape
                    .caps
                    .iter()
                    .zip(&strides)
                    .map(|(c, s)| slot / s % (c + 1))
                    .collect()
            })
            .collect();
        let mut valid: Vec<(usize, usize)> = exps
            .iter()
            .enumerate()
            .map(|(slot, e)| (e.iter().sum::<usize>(), slot))
            .filter(|&(deg, _)| deg <= shape.total)
            .collect();
        valid.sort_unstable();
        Layout {
            shape,
            strides,
            len,
            exps,
            valid,
        }
    }

    fn slot(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(e, s)| e * s).sum()
    }

    /// Whether slot `a` plus slot `b` stays inside the box caps.
    fn fits(&self, a: usize, b: usize) -> bool {
        self.exps[a]
            .iter()
            .zip(&self.exps[b])
            .zip(&self.shape.caps)
            .all(|((x, y), c)| x + y <= *c)
    }

    fn leq(&self, a: usize, b: usize) -> bool {
        self.exps[a].iter().zip(&self.exps[b]).all(|(x, y)| x <= y)
    }
}

#[derive(Clone)]
pub struct MultiSeries {
    layout: Arc<Layout>,
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .terms()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| format!("{e:?}:{c}"))
            .collect();
        write!(f, "MultiSeries[{:?}]{{{}}}", self.layout.shape, terms.join(", "))
    }
}

impl MultiSeries {
    pub fn zero(shape: &Shape) -> MultiSeries {
        let layout = Arc::new(Layout::new(shape.clone()));
        let coeffs = vec![Complex64::zero(); layout.len];
        MultiSeries { layout, coeffs }
    }

    /// A fresh zero series sharing this series' layout.
    pub fn zero_like(&self) -> MultiSeries {
        MultiSeries {
            layout: Arc::clone(&self.layout),
            coeffs: vec![Complex64::zero(); self.layout.len],
        }
    }

    pub fn constant(shape: &Shape, c: Complex64) -> MultiSeries {
        let mut s = Self::zero(shape);
        s.coeffs[0] = c;
        s
    }

    pub fn one(shape: &Shape) -> MultiSeries {
        Self::constant(shape, Complex64::new(1.0, 0.0))
    }

    /// `sum_v c_v t_v` (terms past a zero cap are dropped).
    pub fn linear(shape: &Shape, terms: &[(usize, Complex64)]) -> Result<MultiSeries, SeriesError> {
        let mut s = Self::zero(shape);
        for &(v, c) in terms {
            s.add_monomial(v, 1, c)?;
        }
        Ok(s)
    }

    pub fn variable(shape: &Shape, v: usize) -> Result<MultiSeries, SeriesError> {
        Self::linear(shape, &[(v, Complex64::new(1.0, 0.0))])
    }

    fn add_monomial(&mut self, v: usize, power: usize, c: Complex64) -> Result<(), SeriesError> {
        let n = self.layout.shape.nvars();
        if v >= n {
            return Err(SeriesError::UnknownVariable { var: v, nvars: n });
        }
        if power <= self.layout.shape.caps[v] && power <= self.layout.shape.total {
            self.coeffs[power * self.layout.strides[v]] += c;
        }
        Ok(())
    }

    /// Univariate series `sum_n coeffs[n] t_v^n` embedded in `shape`.
    pub fn univariate(
        shape: &Shape,
        v: usize,
        coeffs: &[Complex64],
    ) -> Result<MultiSeries, SeriesError> {
        let mut s = Self::zero(shape);
        for (n, &c) in coeffs.iter().enumerate() {
            s.add_monomial(v, n, c)?;
        }
        Ok(s)
    }

    pub fn shape(&self) -> &Shape {
        &self.layout.shape
    }

    /// `(exponent, coefficient)` pairs over the valid region, by increasing degree.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], Complex64)> + '_ {
        self.layout
            .valid
            .iter()
            .map(move |&(_, slot)| (self.layout.exps[slot].as_slice(), self.coeffs[slot]))
    }

    pub fn coefficient(&self, idx: &[usize]) -> Result<Complex64, SeriesError> {
        if !self.layout.shape.contains(idx) {
            return Err(SeriesError::CapExceeded {
                index: idx.to_vec(),
                caps: self.layout.shape.caps.clone(),
                total: self.layout.shape.total,
            });
        }
        Ok(self.coeffs[self.layout.slot(idx)])
    }

    pub fn set_coefficient(&mut self, idx: &[usize], c: Complex64) -> Result<(), SeriesError> {
        if !self.layout.shape.contains(idx) {
            return Err(SeriesError::CapExceeded {
                index: idx.to_vec(),
                caps: self.layout.shape.caps.clone(),
                total: self.layout.shape.total,
            });
        }
        let slot = self.layout.slot(idx);
        self.coeffs[slot] = c;
        Ok(())
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn check_shape(&self, other: &MultiSeries) -> Result<(), SeriesError> {
        if self.layout.shape != other.layout.shape {
            return Err(SeriesError::CapMismatch {
                left: format!("{:?}", self.layout.shape),
                right: format!("{:?}", other.layout.shape),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiSeries) -> Result<MultiSeries, SeriesError> {
        self.check_shape(other)?;
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &MultiSeries) -> Result<(), SeriesError> {
        self.check_shape(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(())
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &MultiSeries, c: Complex64) -> Result<(), SeriesError> {
        self.check_shape(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &MultiSeries) -> Result<MultiSeries, SeriesError> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> MultiSeries {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|a| *a *= c);
        out
    }

    /// Cauchy product truncated to the shape.
    pub fn mul(&self, other: &MultiSeries) -> Result<MultiSeries, SeriesError> {
        self.check_shape(other)?;
        let lay = &self.layout;
        let total = lay.shape.total;
        let mut out = self.zero_like();
        for &(da, a) in &lay.valid {
            let ca = self.coeffs[a];
            if ca.is_zero() {
                continue;
            }
            for &(db, b) in &lay.valid {
                if da + db > total {
                    break;
                }
                let cb = other.coeffs[b];
                if cb.is_zero() || !lay.fits(a, b) {
                    continue;
                }
                out.coeffs[a + b] += ca * cb;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: usize) -> Result<MultiSeries, SeriesError> {
        let mut acc = MultiSeries::one(self.shape());
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `exp(self)`, truncated. The constant term is factored out as `exp(c0)`.
    pub fn exp(&self) -> Result<MultiSeries, SeriesError> {
        let c0 = self.constant_term();
        let mut nil = self.clone();
        nil.coeffs[0] = Complex64::zero();
        let mut term = MultiSeries::one(self.shape());
        let mut acc = term.clone();
        for n in 1..=self.layout.shape.total {
            term = term.mul(&nil)?.scale(Complex64::new(1.0 / n as f64, 0.0));
            acc.add_assign(&term)?;
        }
        Ok(acc.scale(c0.exp()))
    }

    /// Copies the coefficients that fit into `shape`; others are dropped, new slots
    /// are zero.
    pub fn reshape(&self, shape: &Shape) -> Result<MultiSeries, SeriesError> {
        if shape.nvars() != self.shape().nvars() {
            return Err(SeriesError::CapMismatch {
                left: format!("{:?}", self.shape()),
                right: format!("{shape:?}"),
            });
        }
        let mut out = MultiSeries::zero(shape);
        for (e, c) in self.terms() {
            if shape.contains(e) {
                let slot = out.layout.slot(e);
                out.coeffs[slot] = c;
            }
        }
        Ok(out)
    }

    /// Exact quotient by a homogeneous linear form `sum_v form[v] t_v`.
    ///
    /// The caller guarantees divisibility; the quotient is reconstructed from the
    /// monomials that contain the pivot variable, so the valid total degree of the
    /// result drops by one. The shape must not truncate any single variable below the
    /// total degree.
    pub fn divide_by_linear(&self, form: &[f64]) -> Result<MultiSeries, SeriesError> {
        let lay = &self.layout;
        let n = lay.shape.nvars();
        if form.len() != n {
            return Err(SeriesError::CapMismatch {
                left: format!("{:?}", lay.shape),
                right: format!("linear form with {} coefficients", form.len()),
            });
        }
        let pivot = (0..n)
            .max_by(|&a, &b| form[a].abs().total_cmp(&form[b].abs()))
            .filter(|&v| form[v] != 0.0)
            .ok_or(SeriesError::SingularConfiguration)?;
        let total = lay.shape.total;
        let mut q = self.zero_like();
        if total == 0 {
            return Ok(q);
        }
        // Q_d from N_{d+1}: coefficient of t^alpha in N at alpha + e_pivot equals
        // sum_v form[v] * Q[alpha + e_pivot - e_v]; solve in decreasing pivot power.
        let mut by_degree: Vec<Vec<usize>> = vec![Vec::new(); total];
        for &(deg, slot) in &lay.valid {
            if deg < total {
                by_degree[deg].push(slot);
            }
        }
        let ps = lay.strides[pivot];
        for slots in &mut by_degree {
            slots.sort_by_key(|&s| std::cmp::Reverse(lay.exps[s][pivot]));
            for &s in slots.iter() {
                let e = &lay.exps[s];
                if e[pivot] + 1 > lay.shape.caps[pivot] {
                    continue;
                }
                let mut acc = self.coeffs[s + ps];
                for v in 0..n {
                    if v == pivot || form[v] == 0.0 || e[v] == 0 {
                        continue;
                    }
                    // alpha + e_pivot - e_v
                    let t = s + ps - lay.strides[v];
                    acc -= q.coeffs[t] * form[v];
                }
                q.coeffs[s] = acc / form[pivot];
            }
        }
        Ok(q)
    }

    /// Largest coefficient difference against `other` on the common valid region.
    pub fn max_diff(&self, other: &MultiSeries) -> Result<f64, SeriesError> {
        self.check_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Whether `self * other` is the identity through the shape, with absolute
    /// tolerance `tol`.
    pub fn is_one(&self, tol: f64) -> bool {
        self.terms().all(|(e, c)| {
            let want = if e.iter().all(|&x| x == 0) { 1.0 } else { 0.0 };
            (c - Complex64::new(want, 0.0)).norm() <= tol
        })
    }
}

pub fn series_add(a: &MultiSeries, b: &MultiSeries) -> Result<MultiSeries, SeriesError> {
    a.add(b)
}

pub fn series_mul(a: &MultiSeries, b: &MultiSeries) -> Result<MultiSeries, SeriesError> {
    a.mul(b)
}

pub fn series_scale(a: &MultiSeries, c: Complex64) -> MultiSeries {
    a.scale(c)
}

/// Multiplicative inverse of a unit series, `threshold` relative to the largest
/// coefficient.
pub fn invert_unit_with(s: &MultiSeries, threshold: f64) -> Result<MultiSeries, SeriesError> {
    let c0 = s.constant_term();
    let limit = threshold * s.max_abs();
    if c0.norm() <= limit || c0.is_zero() {
        return Err(SeriesError::NonUnitSeries {
            constant: c0.norm(),
            threshold: limit,
        });
    }
    let lay = &s.layout;
    let inv0 = c0.inv();
    let mut inv = s.zero_like();
    inv.coeffs[0] = inv0;
    for &(deg, a) in lay.valid.iter().skip(1) {
        let mut acc = Complex64::zero();
        for &(db, b) in lay.valid.iter().skip(1) {
            if db > deg {
                break;
            }
            if !lay.leq(b, a) {
                continue;
            }
            acc += s.coeffs[b] * inv.coeffs[a - b];
        }
        inv.coeffs[a] = -acc * inv0;
    }
    Ok(inv)
}

pub fn invert_unit(s: &MultiSeries) -> Result<MultiSeries, SeriesError> {
    invert_unit_with(s, DEFAULT_UNIT_THRESHOLD)
}

/// `(2 pi i)^n / n!` for `n = 0..=max`.
pub fn two_pi_i_powers(max: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    out.push(acc);
    for n in 1..=max {
        acc *= Complex64::new(0.0, TAU / n as f64);
        out.push(acc);
    }
    out
}

/// Univariate coefficients `B_n(c) (2 pi i)^n / n!`, `n = 0..=degree`: the expansion of
/// `2 pi i t e(t c) / (e(t) - 1)`.
pub fn bernoulli_coefficients(c: &Rational, degree: usize, table: &BernoulliTable) -> Vec<Complex64> {
    assert!(degree <= table.max_degree(), "Bernoulli table too short");
    two_pi_i_powers(degree)
        .into_iter()
        .enumerate()
        .map(|(n, w)| w * table.eval(n, c).to_f64().unwrap_or(f64::NAN))
        .collect()
}

/// `phase * 2 pi i t e(t c) / (e(t) - 1)` in the variable `var`.
pub fn bernoulli_factor(
    shape: &Shape,
    var: usize,
    c: &Rational,
    phase: Complex64,
    table: &BernoulliTable,
) -> Result<MultiSeries, SeriesError> {
    if var >= shape.nvars() {
        return Err(SeriesError::UnknownVariable {
            var,
            nvars: shape.nvars(),
        });
    }
    let degree = shape.caps[var].min(shape.total);
    let coeffs: Vec<Complex64> = bernoulli_coefficients(c, degree, table)
        .into_iter()
        .map(|z| z * phase)
        .collect();
    MultiSeries::univariate(shape, var, &coeffs)
}

/// `-t_g / (d - L(t))` with `L(t) = t_g - sum_f p_f t_f`, expanded as
/// `(-t_g / d) sum_n (L / d)^n`.
pub fn rational_factor(
    shape: &Shape,
    g: usize,
    d: Complex64,
    pairings: &[(usize, f64)],
) -> Result<MultiSeries, SeriesError> {
    if d.is_zero() {
        return Err(SeriesError::SingularConfiguration);
    }
    let inv_d = d.inv();
    let mut terms = vec![(g, -inv_d)];
    terms.extend(pairings.iter().map(|&(f, p)| (f, inv_d * p)));
    // 1 - L/d
    let mut denom = MultiSeries::linear(shape, &terms)?;
    denom.coeffs[0] = Complex64::new(1.0, 0.0);
    let geometric = invert_unit(&denom)?;
    let numer = MultiSeries::linear(shape, &[(g, -inv_d)])?;
    numer.mul(&geometric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    #[test]
    fn one_plus_t_times_one_minus_t() {
        let shape = Shape::from_caps(vec![2]);
        let a = MultiSeries::univariate(&shape, 0, &[c(1.0), c(1.0)]).unwrap();
        let b = MultiSeries::univariate(&shape, 0, &[c(1.0), c(-1.0)]).unwrap();
        let p = series_mul(&a, &b).unwrap();
        assert_eq!(p.coefficient(&[0]).unwrap(), c(1.0));
        assert_eq!(p.coefficient(&[1]).unwrap(), c(0.0));
        assert_eq!(p.coefficient(&[2]).unwrap(), c(-1.0));
        assert!(p.coefficient(&[3]).is_err());
    }

    #[test]
    fn geometric_inverse() {
        let shape = Shape::from_caps(vec![5]);
        let s = MultiSeries::univariate(&shape, 0, &[c(1.0), c(-1.0)]).unwrap();
        let inv = invert_unit(&s).unwrap();
        for n in 0..=5 {
            assert_eq!(inv.coefficient(&[n]).unwrap(), c(1.0));
        }
        assert!(s.mul(&inv).unwrap().is_one(0.0));
        let two = MultiSeries::constant(&shape, c(2.0));
        assert_eq!(invert_unit(&two).unwrap().constant_term(), c(0.5));
    }

    #[test]
    fn bivariate_inverse_matches_hand_solve() {
        // (1 + a + b)^-1 with caps (1,1): 1 - a - b + 2ab
        let shape = Shape::from_caps(vec![1, 1]);
        let mut s = MultiSeries::linear(&shape, &[(0, c(1.0)), (1, c(1.0))]).unwrap();
        s.set_coefficient(&[0, 0], c(1.0)).unwrap();
        let inv = invert_unit(&s).unwrap();
        assert_eq!(inv.coefficient(&[0, 0]).unwrap(), c(1.0));
        assert_eq!(inv.coefficient(&[1, 0]).unwrap(), c(-1.0));
        assert_eq!(inv.coefficient(&[0, 1]).unwrap(), c(-1.0));
        assert_eq!(inv.coefficient(&[1, 1]).unwrap(), c(2.0));
    }

    #[test]
    fn non_unit_rejected() {
        let shape = Shape::from_caps(vec![2]);
        let s = MultiSeries::univariate(&shape, 0, &[c(0.0), c(1.0)]).unwrap();
        assert!(matches!(invert_unit(&s), Err(SeriesError::NonUnitSeries { .. })));
    }

    #[test]
    fn cross_terms() {
        let shape = Shape::from_caps(vec![1, 1, 1, 1]);
        let a = MultiSeries::linear(&shape, &[(0, c(1.0)), (1, c(1.0))]).unwrap();
        let b = MultiSeries::linear(&shape, &[(2, c(1.0)), (3, c(1.0))]).unwrap();
        let p = a.mul(&b).unwrap();
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            let mut idx = [0; 4];
            idx[i] = 1;
            idx[j] = 1;
            assert_eq!(p.coefficient(&idx).unwrap(), c(1.0));
        }
    }

    #[test]
    fn shape_mismatch() {
        let a = MultiSeries::one(&Shape::from_caps(vec![1]));
        let b = MultiSeries::one(&Shape::from_caps(vec![2]));
        assert!(matches!(a.mul(&b), Err(SeriesError::CapMismatch { .. })));
    }

    #[test]
    fn total_degree_truncation() {
        let shape = Shape::new(vec![2, 2], 2);
        let a = MultiSeries::linear(&shape, &[(0, c(1.0)), (1, c(1.0))]).unwrap();
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq.coefficient(&[1, 1]).unwrap(), c(2.0));
        let cube = sq.mul(&a).unwrap();
        assert!(cube.terms().all(|(_, z)| z.is_zero()));
        assert!(sq.coefficient(&[2, 1]).is_err());
    }

    #[test]
    fn bernoulli_factor_at_zero_matches_taylor() {
        // oracle: invert (e(t) - 1) / (2 pi i t) = sum (2 pi i t)^n / (n+1)!
        let n = 8;
        let shape = Shape::from_caps(vec![n]);
        let direct: Vec<Complex64> = (0..=n)
            .map(|k| {
                (1..=k).fold(Complex64::new(1.0, 0.0), |z, i| {
                    z * Complex64::new(0.0, TAU) / (i + 1) as f64
                })
            })
            .collect();
        let denom = MultiSeries::univariate(&shape, 0, &direct).unwrap();
        let oracle = invert_unit(&denom).unwrap();
        let table = BernoulliTable::new(n);
        let f = bernoulli_factor(&shape, 0, &q(0, 1), c(1.0), &table).unwrap();
        assert!(f.max_diff(&oracle).unwrap() < 1e-10);
        // t^2 coefficient: B_2 (2 pi i)^2 / 2 = -pi^2 / 3
        let t2 = f.coefficient(&[2]).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((t2 - c(-pi2 / 3.0)).norm() < 1e-13);
        assert!((f.coefficient(&[1]).unwrap() - Complex64::new(0.0, -std::f64::consts::PI)).norm() < 1e-14);
        // odd coefficients vanish from n = 3
        for k in (3..=n).step_by(2) {
            assert_eq!(f.coefficient(&[k]).unwrap(), c(0.0));
        }
    }

    #[test]
    fn bernoulli_factor_at_one_and_half() {
        let shape = Shape::from_caps(vec![6]);
        let table = BernoulliTable::new(6);
        let at0 = bernoulli_factor(&shape, 0, &q(0, 1), c(1.0), &table).unwrap();
        let at1 = bernoulli_factor(&shape, 0, &q(1, 1), c(1.0), &table).unwrap();
        for k in 0..=6 {
            let d = (at0.coefficient(&[k]).unwrap() - at1.coefficient(&[k]).unwrap()).norm();
            if k == 1 {
                assert!((d - TAU).abs() < 1e-13);
            } else {
                assert_eq!(d, 0.0);
            }
        }
        let half = bernoulli_factor(&shape, 0, &q(1, 2), c(1.0), &table).unwrap();
        assert_eq!(half.coefficient(&[1]).unwrap(), c(0.0));
    }

    #[test]
    fn rational_factor_geometric() {
        // d = 1, L = t_g: -t - t^2
        let shape = Shape::from_caps(vec![2]);
        let f = rational_factor(&shape, 0, c(1.0), &[]).unwrap();
        assert_eq!(f.coefficient(&[1]).unwrap(), c(-1.0));
        assert_eq!(f.coefficient(&[2]).unwrap(), c(-1.0));
        assert!(matches!(
            rational_factor(&shape, 0, c(0.0), &[]),
            Err(SeriesError::SingularConfiguration)
        ));
    }

    #[test]
    fn rational_factor_two_variables() {
        // d = 2, L = t_g - t_f; oracle: -t_g/2 * sum_n ((t_g - t_f)/2)^n
        let shape = Shape::from_caps(vec![2, 1]);
        let f = rational_factor(&shape, 0, c(2.0), &[(1, 1.0)]).unwrap();
        let expect = [
            ([1, 0], -0.5),
            ([2, 0], -0.25),
            ([1, 1], 0.25),
            ([2, 1], 0.25),
            ([0, 1], 0.0),
        ];
        for (idx, v) in expect {
            assert!((f.coefficient(&idx).unwrap() - c(v)).norm() < 1e-15, "{idx:?}");
        }
        // times its denominator (d - L) reproduces -t_g
        let mut denom = MultiSeries::linear(&shape, &[(0, c(-1.0)), (1, c(1.0))]).unwrap();
        denom.set_coefficient(&[0, 0], c(2.0)).unwrap();
        let back = f.mul(&denom).unwrap();
        let target = MultiSeries::linear(&shape, &[(0, c(-1.0))]).unwrap();
        assert!(back.max_diff(&target).unwrap() < 1e-12);
    }

    #[test]
    fn divide_by_linear_recovers_factor() {
        let shape = Shape::total_degree(3, 6);
        let a = MultiSeries::linear(&shape, &[(0, c(1.0)), (1, c(-2.0)), (2, c(0.5))]).unwrap();
        let b = a.mul(&a).unwrap().add(&MultiSeries::one(&shape)).unwrap().exp().unwrap();
        let form = [3.0, -1.0, 2.0];
        let l = MultiSeries::linear(&shape, &[(0, c(3.0)), (1, c(-1.0)), (2, c(2.0))]).unwrap();
        let n = b.mul(&l).unwrap();
        let back = n.divide_by_linear(&form).unwrap();
        let want = b.reshape(&Shape::total_degree(3, 5)).unwrap();
        let got = back.reshape(&Shape::total_degree(3, 5)).unwrap();
        assert!(got.max_diff(&want).unwrap() < 1e-9 * want.max_abs());
    }

    #[test]
    fn exp_of_linear() {
        let shape = Shape::total_degree(2, 4);
        let s = MultiSeries::linear(&shape, &[(0, c(1.0)), (1, c(2.0))]).unwrap();
        let e = s.exp().unwrap();
        // coefficient of x^a y^b = 2^b / (a! b!)
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        for (idx, z) in e.terms() {
            let want = 2f64.powi(idx[1] as i32) / (fact[idx[0]] * fact[idx[1]]);
            assert!((z - c(want)).norm() < 1e-14);
        }
    }

    fn arb_series(shape: Shape) -> impl Strategy<Value = MultiSeries> {
        let n = MultiSeries::zero(&shape).terms().count();
        proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n).prop_map(move |vals| {
            let mut s = MultiSeries::zero(&shape);
            let idx: Vec<Vec<usize>> = s.terms().map(|(e, _)| e.to_vec()).collect();
            for (e, (re, im)) in idx.iter().zip(vals) {
                s.set_coefficient(e, Complex64::new(re, im)).unwrap();
            }
            s
        })
    }

    proptest! {
        #[test]
        fn ring_laws(
            a in arb_series(Shape::new(vec![2, 2, 1], 4)),
            b in arb_series(Shape::new(vec![2, 2, 1], 4)),
            c3 in arb_series(Shape::new(vec![2, 2, 1], 4)),
        ) {
            let ab = a.mul(&b).unwrap();
            prop_assert!(ab.max_diff(&b.mul(&a).unwrap()).unwrap() < 1e-12);
            let l = ab.mul(&c3).unwrap();
            let r = a.mul(&b.mul(&c3).unwrap()).unwrap();
            prop_assert!(l.max_diff(&r).unwrap() < 1e-12 * (1.0 + l.max_abs()));
            let d1 = a.mul(&b.add(&c3).unwrap()).unwrap();
            let d2 = ab.add(&a.mul(&c3).unwrap()).unwrap();
            prop_assert!(d1.max_diff(&d2).unwrap() < 1e-12 * (1.0 + d1.max_abs()));
        }

        #[test]
        fn inverse_is_inverse(mut a in arb_series(Shape::new(vec![2, 1, 2], 3))) {
            a.set_coefficient(&[0, 0, 0], Complex64::new(3.0, 1.0)).unwrap();
            let inv = invert_unit(&a).unwrap();
            prop_assert!(a.mul(&inv).unwrap().is_one(1e-12));
        }
    }
}
