//! Independent closed forms used to cross-check the main computation.
//!
//! Nothing here goes through basis enumeration, cosets or fractional parts:
//! - the Mordell-Tornheim generating function in product form,
//! - the telescoping identity behind that product form,
//! - Bernoulli numbers from the Akiyama-Tanigawa algorithm, even zeta values from them,
//! - `zeta(3)` from a rapidly convergent central binomial series.
//!
//! [`selftest`] runs all of them against the production code paths.

use std::f64::consts::{PI, TAU};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::bernoulli::BernoulliTable;
use crate::error::SeriesError;
use crate::evaluator::zeta_direct;
use crate::genfun::{build_lambda, compute_g, extract_d, RhoChoice, SingularPolicy};
use crate::model::{subset_context, validate_spec};
use crate::mpseries::{invert_unit, MultiSeries, Shape};
use crate::Rational;

/// `e(L(t)) = exp(2 pi i L(t))` for a linear form given as `(variable, coefficient)`.
fn exp_linear(shape: &Shape, terms: &[(usize, f64)]) -> Result<MultiSeries, SeriesError> {
    let scaled: Vec<(usize, Complex64)> =
        terms.iter().map(|&(v, c)| (v, Complex64::new(0.0, TAU * c))).collect();
    MultiSeries::linear(shape, &scaled)?.exp()
}

/// `2 pi i t / (e(t) - 1)` in variable `var`, as the inverse of `sum_n (2 pi i t)^n / (n+1)!`.
pub fn bernoulli_generating(shape: &Shape, var: usize) -> Result<MultiSeries, SeriesError> {
    let degree = shape.caps()[var].min(shape.total());
    let mut coeffs = Vec::with_capacity(degree + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    for n in 0..=degree {
        coeffs.push(acc);
        acc *= Complex64::new(0.0, TAU) / (n as f64 + 2.0);
    }
    invert_unit(&MultiSeries::univariate(shape, var, &coeffs)?)
}

/// The Mordell-Tornheim generating function for `y = 0` in product form:
///
/// ```text
/// G = (-e(t_R) / 2 pi i) * (e(s) - 1) / (n - s) * prod_{j in J, R} 2 pi i t_j / (e(t_j) - 1)
/// ```
///
/// with `s = sum_J t_j - t_R` and `n = sum_{Jbar} m_j`. Variables `0..size` are the
/// `t_j`, variable `size` is `t_R` (the row functional).
pub fn mt_closed_form_g(size: usize, n: u64, shape: &Shape) -> Result<MultiSeries, SeriesError> {
    let row = size;
    let s_terms: Vec<(usize, f64)> = (0..size).map(|j| (j, 1.0)).chain([(row, -1.0)]).collect();
    let s = MultiSeries::linear(
        shape,
        &s_terms
            .iter()
            .map(|&(v, c)| (v, Complex64::new(c, 0.0)))
            .collect::<Vec<_>>(),
    )?;
    let quotient = if n == 0 {
        // (e(s) - 1) / (-s) = -sum_k (2 pi i)^(k+1) s^k / (k+1)!
        let mut acc = MultiSeries::zero(shape);
        let mut power = MultiSeries::one(shape);
        let mut c = Complex64::new(0.0, TAU);
        for k in 0..=shape.total() {
            acc.add_scaled(&power, -c)?;
            power = power.mul(&s)?;
            c *= Complex64::new(0.0, TAU) / (k as f64 + 2.0);
        }
        acc
    } else {
        // (e(s) - 1) * (1/n) sum_k (s/n)^k
        let mut numer = exp_linear(shape, &s_terms)?;
        numer.add_scaled(&MultiSeries::one(shape), Complex64::new(-1.0, 0.0))?;
        let nf = n as f64;
        let mut geometric = MultiSeries::zero(shape);
        let mut power = MultiSeries::constant(shape, Complex64::new(1.0 / nf, 0.0));
        let step = s.scale(Complex64::new(1.0 / nf, 0.0));
        for _ in 0..=shape.total() {
            geometric.add_assign(&power)?;
            power = power.mul(&step)?;
        }
        numer.mul(&geometric)?
    };
    let prefactor = exp_linear(shape, &[(row, 1.0)])?.scale(-Complex64::new(0.0, TAU).inv());
    let mut g = prefactor.mul(&quotient)?;
    for v in 0..=size {
        g = g.mul(&bernoulli_generating(shape, v)?)?;
    }
    Ok(g)
}

/// Largest relative coefficient gap (see [`relative_coefficient_gap`]) between
/// `sum_i (e(t_i) - 1) prod_{j < i} e(t_j)` and `e(sum_j t_j) - 1` up to total degree
/// `degree`.
pub fn telescoping_residual(size: usize, degree: usize) -> Result<f64, SeriesError> {
    let shape = Shape::total_degree(size, degree);
    let one = MultiSeries::one(&shape);
    let mut lhs = MultiSeries::zero(&shape);
    let mut prefix = one.clone();
    for i in 0..size {
        let e_i = exp_linear(&shape, &[(i, 1.0)])?;
        lhs.add_assign(&e_i.sub(&one)?.mul(&prefix)?)?;
        prefix = prefix.mul(&e_i)?;
    }
    let all: Vec<(usize, f64)> = (0..size).map(|j| (j, 1.0)).collect();
    let rhs = exp_linear(&shape, &all)?.sub(&one)?;
    Ok(relative_coefficient_gap(&lhs, &rhs))
}

/// Bernoulli numbers `B_0..=B_n` by the Akiyama-Tanigawa algorithm, converted to the
/// `B_1 = -1/2` convention.
pub fn akiyama_tanigawa(n: usize) -> Vec<Rational> {
    let mut a: Vec<Rational> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(Rational::new(BigInt::one(), BigInt::from(m + 1)));
        for j in (1..=m).rev() {
            let diff = &a[j - 1] - &a[j];
            a[j - 1] = diff * Rational::from_integer(BigInt::from(j));
        }
        out.push(a[0].clone());
    }
    if n >= 1 {
        out[1] = -out[1].clone();
    }
    out
}

/// `zeta(2n) = (-1)^(n+1) B_2n (2 pi)^2n / (2 (2n)!)` from Akiyama-Tanigawa numbers.
pub fn even_zeta(two_n: usize) -> f64 {
    assert!(two_n >= 2 && two_n.is_multiple_of(2), "even argument >= 2 expected");
    let b = akiyama_tanigawa(two_n)[two_n].to_f64().unwrap_or(f64::NAN);
    let fact: f64 = (1..=two_n).map(|v| v as f64).product();
    let sign = if (two_n / 2) % 2 == 1 { 1.0 } else { -1.0 };
    sign * b * (2.0 * PI).powi(two_n as i32) / (2.0 * fact)
}

/// `zeta(3) = (5/2) sum_n (-1)^(n+1) / (n^3 C(2n, n))`.
pub fn zeta3() -> f64 {
    let mut sum = 0.0;
    let mut central = 1.0;
    for n in 1..=30u32 {
        let nf = f64::from(n);
        central *= 2.0 * (2.0 * nf - 1.0) / nf;
        let term = 1.0 / (nf.powi(3) * central);
        sum += if n % 2 == 1 { term } else { -term };
    }
    2.5 * sum
}

/// `sum'_{m != 0} m^-h = (1 + (-1)^h) zeta(h)`, zero for odd `h`.
pub fn symmetric_power_sum(h: usize) -> f64 {
    if h % 2 == 1 {
        0.0
    } else {
        2.0 * even_zeta(h)
    }
}

/// Outcome of one selftest case.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfTestCase {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn case(name: impl Into<String>, passed: bool, detail: String) -> SelfTestCase {
    SelfTestCase {
        name: name.into(),
        passed,
        detail,
    }
}

/// Largest `|a - b| / max(1, |b|)` over the coefficients of two series with the same
/// shape.
pub fn relative_coefficient_gap(a: &MultiSeries, b: &MultiSeries) -> f64 {
    a.terms()
        .map(|(idx, x)| {
            let y = b.coefficient(idx).unwrap_or(Complex64::new(f64::NAN, 0.0));
            (x - y).norm() / y.norm().max(1.0)
        })
        .fold(0.0, |acc, v| if v.is_nan() || v > acc { v } else { acc })
}

/// Closed-form versus assembled `G` for the Mordell-Tornheim matrix, `y = 0`.
///
/// `j_size` columns in `J`, `outer` is the tuple for the remaining `r - j_size`
/// columns, `caps` one cap per functional (units then the row), total degree `total`.
pub fn mt_closed_form_gap(
    j_size: usize,
    outer: &[u64],
    caps: &[usize],
    total: usize,
    rho: &RhoChoice,
) -> Result<f64, crate::EvalError> {
    let r = j_size + outer.len();
    let zeros = vec![Rational::zero(); r];
    let spec = validate_spec(&[vec![1; r]], &vec![1; r], &[1], &zeros)?;
    let ctx = subset_context(&spec, &(0..j_size).collect::<Vec<_>>())?;
    let lambda = build_lambda(&spec, &ctx, outer)?;
    let shape = Shape::new(caps.to_vec(), total);
    let assembled = compute_g(&lambda, &zeros[..j_size], rho, &shape, SingularPolicy::Resolve)?;
    let closed = mt_closed_form_g(j_size, outer.iter().sum(), &shape)
        .map_err(crate::GenFunError::from)?;
    Ok(relative_coefficient_gap(&assembled.series, &closed))
}

/// Runs every oracle against the production code.
pub fn selftest() -> Vec<SelfTestCase> {
    let mut cases = Vec::new();

    for (j_size, outer) in [(2usize, vec![]), (3, vec![]), (1, vec![5u64]), (2, vec![3])] {
        let caps = vec![5; j_size + 1];
        let name = format!("closed-form G, |J|={j_size}, outer={outer:?}");
        cases.push(match mt_closed_form_gap(j_size, &outer, &caps, 5, &RhoChoice::Ladder) {
            Ok(gap) => case(name, gap < 1e-12, format!("max relative gap {gap:.3e}")),
            Err(e) => case(name, false, e.to_string()),
        });
    }

    for size in 2..=4 {
        let name = format!("telescoping identity, |J|={size}");
        cases.push(match telescoping_residual(size, 6) {
            Ok(gap) => case(name, gap < 1e-12, format!("max relative gap {gap:.3e}")),
            Err(e) => case(name, false, e.to_string()),
        });
    }

    let table = BernoulliTable::new(24);
    let reference = akiyama_tanigawa(24);
    let mismatches = (0..=24).filter(|&n| *table.number(n) != reference[n]).count();
    cases.push(case(
        "Bernoulli numbers vs Akiyama-Tanigawa, n <= 24",
        mismatches == 0,
        format!("{mismatches} mismatches"),
    ));

    for h in [2usize, 3, 4, 6] {
        let name = format!("one-dimensional D, h={h}");
        let spec = validate_spec(&[vec![1]], &[h as i64], &[1], &[Rational::zero()]);
        let result = spec.map_err(crate::EvalError::from).and_then(|s| {
            let ctx = subset_context(&s, &[0])?;
            // the unit functional alone: drop the row functional
            let lambda = build_lambda(&s, &ctx, &[])?[..1].to_vec();
            let asm = compute_g(
                &lambda,
                &[Rational::zero()],
                &RhoChoice::Ladder,
                &Shape::from_caps(vec![h]),
                SingularPolicy::Fatal,
            )?;
            Ok(extract_d(&asm, &[h])?)
        });
        cases.push(match result {
            Ok(d) => {
                let fact: f64 = (1..=h).map(|v| v as f64).product();
                let got = -d / fact;
                let want = symmetric_power_sum(h);
                let gap = (got - want).norm();
                case(name, gap < 1e-10, format!("-D/h! = {:.15e}, expected {want:.15e}", got.re))
            }
            Err(e) => case(name, false, e.to_string()),
        });
    }

    let name = "Mordell-Tornheim direct sum vs 2 zeta(3), M=600";
    let spec = validate_spec(&[vec![1, 1]], &[1, 1], &[1], &[Rational::zero(), Rational::zero()]);
    cases.push(
        match spec.map_err(crate::EvalError::from).and_then(|s| zeta_direct(&s, 600)) {
            Ok(p) => {
                let gap = (p.extrapolated.re - 2.0 * zeta3()).abs();
                case(name, gap < 1e-6, format!("extrapolated {:.15e}, gap {gap:.3e}", p.extrapolated.re))
            }
            Err(e) => case(name, false, e.to_string()),
        },
    );
    cases
}
