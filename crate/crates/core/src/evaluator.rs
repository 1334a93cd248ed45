//! Direct summation of the series, the per-subset terms of the identity's right-hand
//! side, and the verifier.
//!
//! All index boxes are walked shell by shell (shell `n` holds the tuples whose largest
//! coordinate is `n`). Shells are summed in parallel, each one sequentially with
//! compensation, and the partial sums `S(1..=M)` are accumulated in order, so results
//! do not depend on the thread count. The limit is then estimated from the partial
//! sums by [`crate::extrapolate`].

use dashmap::DashMap;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{EvalError, GenFunError};
use crate::extrapolate::extrapolate;
use crate::genfun::{GeneratingFunction, RhoChoice, SingularPolicy, Tag};
use crate::model::{
    convergence_check, subset_context, ConvergenceVerdict, SeriesSpec, SubsetContext,
};
use crate::mpseries::Shape;
use crate::phase::unit_phase_int;
use crate::summation::{prefix_sums, ComplexSum};
use crate::Rational;

/// Highest power of `ln n` in the fitted tail expansions.
const TAIL_LOG_POWER: usize = 2;
/// Phase tables are built for denominators up to this size.
const PHASE_TABLE_LIMIT: i64 = 1 << 16;
/// Relative error attributed to a closed (non-summed) term.
const CLOSED_TERM_ERROR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    /// Truncation bound for the direct sums.
    pub m: u64,
    /// Truncation bound for the outer sums of the right-hand side terms.
    pub m_outer: u64,
    pub tol: f64,
    pub rho: RhoChoice,
    pub singular: SingularPolicy,
    pub assert_convergence: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            m: 2000,
            m_outer: 2000,
            tol: 1e-6,
            rho: RhoChoice::Ladder,
            singular: SingularPolicy::Resolve,
            assert_convergence: false,
        }
    }
}

/// A truncated sum together with its limit estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSum {
    /// Compensated sum over the box `[1, m]^dim`.
    pub value: Complex64,
    pub m: u64,
    /// Heuristic size of the omitted tail of `value`.
    pub tail_estimate: f64,
    /// The tail heuristic does not apply (decay exponent at most 1).
    pub slow: bool,
    pub terms_summed: u64,
    /// Estimated limit as `m -> infinity`.
    pub extrapolated: Complex64,
    /// Uncertainty of `extrapolated`; `None` when no fit was possible.
    pub extrapolation_error: Option<f64>,
}

impl PartialSum {
    fn closed(value: Complex64) -> PartialSum {
        PartialSum {
            value,
            m: 0,
            tail_estimate: 0.0,
            slow: false,
            terms_summed: 1,
            extrapolated: value,
            extrapolation_error: Some(CLOSED_TERM_ERROR * (1.0 + value.norm())),
        }
    }

    /// Best available limit estimate.
    pub fn estimate(&self) -> Complex64 {
        self.extrapolated
    }

    /// Uncertainty of [`PartialSum::estimate`], falling back to the tail heuristic.
    pub fn uncertainty(&self) -> f64 {
        self.extrapolation_error.unwrap_or(self.tail_estimate)
    }

    fn scaled(mut self, s: f64) -> PartialSum {
        self.value *= s;
        self.extrapolated *= s;
        self
    }
}

enum TailRule {
    /// `|shell_M| * M / (w - 1)` for summands decaying like `n^-(w + dim - 1)`.
    Shell { w: i64 },
    /// Change over the last doubling, `|S(M) - S(M/2)|`.
    Doubling,
}

fn partial_from_shells(shells: &[Complex64], period: u64, dim: usize, rule: TailRule) -> PartialSum {
    let m = shells.len() as u64;
    let partials = prefix_sums(shells);
    let value = partials.last().copied().unwrap_or_default();
    let last_shell = shells.last().map_or(0.0, |z| z.norm());
    let (tail_estimate, slow) = match rule {
        TailRule::Shell { w } if w > 1 => (last_shell * m as f64 / (w - 1) as f64, false),
        TailRule::Shell { .. } => (last_shell, true),
        TailRule::Doubling => {
            let half = partials.get((m / 2).max(1) as usize - 1).copied().unwrap_or_default();
            ((value - half).norm(), false)
        }
    };
    let ex = extrapolate(&partials, period, TAIL_LOG_POWER);
    PartialSum {
        value,
        m,
        tail_estimate,
        slow,
        terms_summed: m.saturating_pow(dim as u32),
        extrapolated: ex.value,
        extrapolation_error: ex.uncertainty,
    }
}

/// Calls `f` on every tuple of `[1, n]^dim` with maximum coordinate `n`.
fn for_each_in_shell(dim: usize, n: u64, mut f: impl FnMut(&[u64])) {
    let mut m = vec![1u64; dim];
    // p is the first coordinate equal to n
    for p in 0..dim {
        if p > 0 && n == 1 {
            break;
        }
        for (q, v) in m.iter_mut().enumerate() {
            *v = if q == p { n } else { 1 };
        }
        loop {
            f(&m);
            let mut advanced = false;
            for q in (0..dim).rev() {
                if q == p {
                    continue;
                }
                let hi = if q < p { n - 1 } else { n };
                if m[q] < hi {
                    m[q] += 1;
                    advanced = true;
                    break;
                }
                m[q] = 1;
            }
            if !advanced {
                break;
            }
        }
    }
}

/// Sums `f` over each shell `n = 1..=bound` in parallel.
fn shell_sums<F>(dim: usize, bound: u64, f: F) -> Result<Vec<Complex64>, GenFunError>
where
    F: Fn(&[u64]) -> Result<Complex64, GenFunError> + Sync,
{
    (1..=bound)
        .into_par_iter()
        .map(|n| {
            let mut acc = ComplexSum::new();
            let mut err = None;
            for_each_in_shell(dim, n, |m| {
                if err.is_some() {
                    return;
                }
                match f(m) {
                    Ok(z) => acc.add(z),
                    Err(e) => err = Some(e),
                }
            });
            err.map_or(Ok(acc.value()), Err)
        })
        .collect()
}

/// `e(m p / q)` by table lookup.
struct Twist {
    p: i64,
    q: i64,
    table: Vec<Complex64>,
}

impl Twist {
    fn new(y: &Rational) -> Twist {
        let p = y.numer().to_i64().unwrap_or(0);
        let q = y.denom().to_i64().unwrap_or(1);
        let table = if q <= PHASE_TABLE_LIMIT {
            (0..q).map(|t| unit_phase_int(t, q)).collect()
        } else {
            Vec::new()
        };
        Twist { p, q, table }
    }

    fn is_trivial(&self) -> bool {
        self.q == 1
    }

    fn at(&self, m: u64) -> Complex64 {
        let t = ((self.p as i128 * m as i128).rem_euclid(self.q as i128)) as i64;
        if self.table.is_empty() {
            unit_phase_int(t, self.q)
        } else {
            self.table[t as usize]
        }
    }
}

fn inverse_powers(max: u64, e: u32) -> Vec<f64> {
    (0..=max)
        .map(|n| if n == 0 { f64::NAN } else { 1.0 / (n as f64).powi(e as i32) })
        .collect()
}

fn period_of(twists: &[Twist]) -> u64 {
    twists
        .iter()
        .fold(BigInt::from(1), |acc, t| num_integer::Integer::lcm(&acc, &BigInt::from(t.q)))
        .to_u64()
        .unwrap_or(u64::MAX)
}

/// `zeta(h, k, y, A)` summed over `[1, m]^r`, with its limit estimate.
pub fn zeta_direct(spec: &SeriesSpec, m: u64) -> Result<PartialSum, EvalError> {
    if m == 0 {
        return Err(EvalError::ZeroBound);
    }
    let r = spec.r();
    let twists: Vec<Twist> = spec.y().iter().map(Twist::new).collect();
    let twisted = twists.iter().any(|t| !t.is_trivial());
    let inv_h: Vec<Vec<f64>> = spec.h().iter().map(|&e| inverse_powers(m, e)).collect();
    let form_max = m * u64::from(spec.max_row_sum());
    let inv_k: Vec<Vec<f64>> = spec.k().iter().map(|&e| inverse_powers(form_max, e)).collect();
    let rows: Vec<Vec<u64>> = spec
        .a()
        .iter()
        .map(|row| row.iter().map(|&v| u64::from(v)).collect())
        .collect();

    let shells = shell_sums(r, m, |idx| {
        let mut w = 1.0;
        for (j, &mj) in idx.iter().enumerate() {
            w *= inv_h[j][mj as usize];
        }
        for (i, row) in rows.iter().enumerate() {
            let s: u64 = row.iter().zip(idx).map(|(a, b)| a * b).sum();
            w *= inv_k[i][s as usize];
        }
        if !twisted {
            return Ok(Complex64::new(w, 0.0));
        }
        let mut phase = Complex64::new(1.0, 0.0);
        for (t, &mj) in twists.iter().zip(idx) {
            phase *= t.at(mj);
        }
        Ok(phase * w)
    })?;
    let w = i64::from(spec.weight()) - r as i64 + 1;
    Ok(partial_from_shells(&shells, period_of(&twists), r, TailRule::Shell { w }))
}

/// One term of the right-hand side: its subset data and value.
#[derive(Debug, Clone, PartialEq)]
pub struct TermValue {
    pub ctx: SubsetContext,
    /// `(-1)^(wt(h_Jbar) + wt(k_Ibar) + r + |I|)`.
    pub sign: i32,
    pub rho: Vec<Rational>,
    pub bases: usize,
    /// The signed term, including the outer sum.
    pub sum: PartialSum,
}

/// Prepared data for one subset `J`: the generating function for its functional
/// geometry and a cache of coefficients keyed by the outer row sums.
pub struct SubsetTerm<'a> {
    spec: &'a SeriesSpec,
    ctx: SubsetContext,
    sign: i32,
    exps: Vec<usize>,
    gf: GeneratingFunction,
    policy: SingularPolicy,
    cache: DashMap<Vec<i64>, Complex64>,
}

impl<'a> SubsetTerm<'a> {
    pub fn new(
        spec: &'a SeriesSpec,
        ctx: &SubsetContext,
        opts: &EvalOptions,
    ) -> Result<SubsetTerm<'a>, EvalError> {
        let exps: Vec<usize> = ctx
            .j
            .iter()
            .map(|&j| spec.h()[j] as usize)
            .chain(ctx.i.iter().map(|&i| spec.k()[i] as usize))
            .collect();
        let shape = Shape::new(exps.clone(), exps.iter().sum());
        let tags: Vec<Tag> = ctx
            .j
            .iter()
            .map(|&j| Tag::Unit(j))
            .chain(ctx.i.iter().map(|&i| Tag::Row(i)))
            .collect();
        let vecs: Vec<Vec<i64>> = ctx
            .j
            .iter()
            .map(|&j| ctx.j.iter().map(|&k| i64::from(k == j)).collect())
            .chain(ctx.i.iter().map(|&i| {
                ctx.j.iter().map(|&j| i64::from(spec.entry(i, j))).collect()
            }))
            .collect();
        let y: Vec<Rational> = ctx.j.iter().map(|&j| spec.y()[j].clone()).collect();
        let rho = opts.rho.select(&vecs)?;
        let gf = GeneratingFunction::new(tags, vecs, y, rho, shape)?;
        let parity = ctx.wt_h_jbar(spec) + ctx.wt_k_ibar(spec) + (spec.r() + ctx.i.len()) as u32;
        Ok(SubsetTerm {
            spec,
            ctx: ctx.clone(),
            sign: if parity.is_multiple_of(2) { 1 } else { -1 },
            exps,
            gf,
            policy: opts.singular,
            cache: DashMap::new(),
        })
    }

    pub fn context(&self) -> &SubsetContext {
        &self.ctx
    }

    pub fn generating_function(&self) -> &GeneratingFunction {
        &self.gf
    }

    pub fn sign(&self) -> i32 {
        self.sign
    }

    /// `(sum_{j in Jbar} a_ij m_j)_{i in I}`: everything the coefficient depends on.
    fn key(&self, m_outer: &[u64]) -> Vec<i64> {
        self.ctx
            .i
            .iter()
            .map(|&i| {
                self.ctx
                    .jbar
                    .iter()
                    .zip(m_outer)
                    .map(|(&j, &m)| i64::from(self.spec.entry(i, j)) * m as i64)
                    .sum()
            })
            .collect()
    }

    /// Taylor coefficient of `prod t_j^h_j t_{r+i}^k_i` in `G` for the outer tuple
    /// (indexed like `ctx.jbar`), i.e. `D / (h_J! k_I!)`.
    pub fn coefficient(&self, m_outer: &[u64]) -> Result<Complex64, GenFunError> {
        let key = self.key(m_outer);
        if let Some(c) = self.cache.get(&key) {
            return Ok(*c);
        }
        let dots: Vec<Rational> = std::iter::repeat_n(Rational::zero(), self.ctx.j.len())
            .chain(key.iter().map(|&s| Rational::from_integer(BigInt::from(-s))))
            .collect();
        let c = self.gf.coefficient(&dots, &self.exps, self.policy).map_err(|e| match e {
            GenFunError::SingularConfiguration { basis, functional, .. } => {
                GenFunError::SingularConfiguration {
                    basis,
                    functional: format!("{functional} (J={})", self.ctx.label()),
                    outer: m_outer.iter().map(|&m| m as i64).collect(),
                }
            }
            other => other,
        })?;
        self.cache.insert(key, c);
        Ok(c)
    }

    /// `D(h_J, k_I, y_J; Lambda)` for the outer tuple.
    pub fn d_value(&self, m_outer: &[u64]) -> Result<Complex64, GenFunError> {
        let fact: f64 = self
            .exps
            .iter()
            .map(|&e| (1..=e).map(|v| v as f64).product::<f64>())
            .product();
        Ok(self.coefficient(m_outer)? * fact)
    }

    /// The first `count` outer tuples in shell order with their `D` values.
    pub fn d_samples(&self, count: usize) -> Result<Vec<(Vec<u64>, Complex64)>, GenFunError> {
        let dim = self.ctx.jbar.len();
        if dim == 0 {
            return Ok(vec![(Vec::new(), self.d_value(&[])?)]);
        }
        let mut tuples = Vec::new();
        let mut n = 1;
        while tuples.len() < count {
            for_each_in_shell(dim, n, |m| {
                if tuples.len() < count {
                    tuples.push(m.to_vec());
                }
            });
            n += 1;
        }
        tuples
            .into_iter()
            .map(|m| self.d_value(&m).map(|d| (m, d)))
            .collect()
    }

    /// The signed term with its outer sum truncated at `m_outer`.
    pub fn evaluate(&self, m_outer: u64) -> Result<TermValue, EvalError> {
        let sign = f64::from(self.sign);
        let dim = self.ctx.jbar.len();
        let sum = if dim == 0 {
            PartialSum::closed(self.coefficient(&[])?).scaled(sign)
        } else {
            if m_outer == 0 {
                return Err(EvalError::ZeroBound);
            }
            let spec = self.spec;
            let twists: Vec<Twist> = self
                .ctx
                .jbar
                .iter()
                .map(|&j| Twist::new(&crate::phase::frac(&-&spec.y()[j])))
                .collect();
            let twisted = twists.iter().any(|t| !t.is_trivial());
            let inv_h: Vec<Vec<f64>> = self
                .ctx
                .jbar
                .iter()
                .map(|&j| inverse_powers(m_outer, spec.h()[j]))
                .collect();
            let outer_rows: Vec<(Vec<u64>, Vec<f64>)> = self
                .ctx
                .ibar
                .iter()
                .map(|&i| {
                    let row: Vec<u64> = self.ctx.jbar.iter().map(|&j| u64::from(spec.entry(i, j))).collect();
                    let max = m_outer * row.iter().sum::<u64>();
                    (row, inverse_powers(max, spec.k()[i]))
                })
                .collect();
            let shells = shell_sums(dim, m_outer, |idx| {
                let mut w = 1.0;
                for (table, &mj) in inv_h.iter().zip(idx) {
                    w *= table[mj as usize];
                }
                for (row, table) in &outer_rows {
                    let s: u64 = row.iter().zip(idx).map(|(a, b)| a * b).sum();
                    w *= table[s as usize];
                }
                let mut z = self.coefficient(idx)? * w;
                if twisted {
                    for (t, &mj) in twists.iter().zip(idx) {
                        z *= t.at(mj);
                    }
                }
                Ok(z)
            })?;
            let period = num_integer::Integer::lcm(&period_of(&twists), &self.gf.period().max(1));
            partial_from_shells(&shells, period, dim, TailRule::Doubling).scaled(sign)
        };
        Ok(TermValue {
            ctx: self.ctx.clone(),
            sign: self.sign,
            rho: self.gf.rho().coords.clone(),
            bases: self.gf.bases().count(),
            sum,
        })
    }
}

/// `T_{r, ell, J}` for the subset in `ctx`.
pub fn term_t(
    spec: &SeriesSpec,
    ctx: &SubsetContext,
    opts: &EvalOptions,
) -> Result<TermValue, EvalError> {
    SubsetTerm::new(spec, ctx, opts)?.evaluate(opts.m_outer)
}

/// Right-hand side of the identity: the sum over all non-empty subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsTotal {
    /// Sum of the extrapolated terms.
    pub total: Complex64,
    /// Sum of the truncated terms.
    pub truncated: Complex64,
    /// Sum of the term uncertainties.
    pub uncertainty: f64,
    pub terms: Vec<TermValue>,
}

pub fn rhs_total(spec: &SeriesSpec, opts: &EvalOptions) -> Result<RhsTotal, EvalError> {
    let terms = spec
        .nonempty_subsets()
        .iter()
        .map(|j| term_t(spec, &subset_context(spec, j)?, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RhsTotal {
        total: terms.iter().map(|t| t.sum.estimate()).collect::<ComplexSum>().value(),
        truncated: terms.iter().map(|t| t.sum.value).collect::<ComplexSum>().value(),
        uncertainty: terms.iter().map(|t| t.sum.uncertainty()).sum(),
        terms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The residual exceeds the tolerance but not the tolerance plus the uncertainty.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    fn judge(residual: f64, tol: f64, slack: f64) -> Verdict {
        if residual <= tol {
            Verdict::Pass
        } else if residual <= tol + slack {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        }
    }
}

/// Whether `wt(h) + wt(k)` and `r` have the same parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityCase {
    Same,
    Different,
}

/// `Re zeta(y)` against half the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryCheck {
    pub re_zeta: f64,
    pub half_rhs: f64,
    pub residual: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub spec: SeriesSpec,
    pub m: u64,
    pub m_outer: u64,
    pub tol: f64,
    pub convergence: ConvergenceVerdict,
    /// `zeta(h, k, y, A)`.
    pub lhs_plus: PartialSum,
    /// `zeta(h, k, -y, A)`.
    pub lhs_minus: PartialSum,
    /// `(-1)^(wt(h) + wt(k) + r + 1)`.
    pub lhs_sign: i32,
    /// `zeta(y) + lhs_sign * zeta(-y)` from the extrapolated sums.
    pub lhs: Complex64,
    pub rhs: RhsTotal,
    /// `|lhs - rhs|` from the extrapolated values.
    pub residual: f64,
    /// The same from the truncated sums.
    pub truncated_residual: f64,
    /// Combined uncertainty of both sides.
    pub slack: f64,
    pub parity: ParityCase,
    pub corollary: Option<CorollaryCheck>,
    pub verdict: Verdict,
}

impl VerificationReport {
    /// `Ok` on a pass, otherwise [`EvalError::ToleranceExceeded`].
    pub fn into_result(self) -> Result<VerificationReport, EvalError> {
        match self.verdict {
            Verdict::Pass => Ok(self),
            v => Err(EvalError::ToleranceExceeded {
                residual: self.residual,
                tol: self.tol,
                slack: self.slack,
                inconclusive: v == Verdict::Inconclusive,
            }),
        }
    }
}

/// Evaluates both sides of the parity identity and compares them.
pub fn verify_parity(
    spec: &SeriesSpec,
    opts: &EvalOptions,
) -> Result<VerificationReport, EvalError> {
    let mut convergence = convergence_check(spec);
    if opts.assert_convergence {
        convergence = convergence.asserted();
    }
    if !convergence.licensed() {
        return Err(EvalError::ConvergenceUnknown(convergence.detail));
    }
    let lhs_plus = zeta_direct(spec, opts.m)?;
    let lhs_minus = zeta_direct(&spec.negated_twist(), opts.m)?;
    let odd = (spec.weight() as usize + spec.r()) % 2 == 1;
    let lhs_sign = if odd { 1 } else { -1 };
    let lhs = lhs_plus.estimate() + lhs_minus.estimate() * f64::from(lhs_sign);
    let lhs_truncated = lhs_plus.value + lhs_minus.value * f64::from(lhs_sign);
    let rhs = rhs_total(spec, opts)?;

    let residual = (lhs - rhs.total).norm();
    let slack = lhs_plus.uncertainty() + lhs_minus.uncertainty() + rhs.uncertainty;
    let parity = if odd { ParityCase::Different } else { ParityCase::Same };
    let corollary = (parity == ParityCase::Different).then(|| {
        let re_zeta = lhs_plus.estimate().re;
        let half_rhs = rhs.total.re / 2.0;
        let residual = (re_zeta - half_rhs).abs();
        let slack = lhs_plus.uncertainty() + rhs.uncertainty / 2.0;
        CorollaryCheck {
            re_zeta,
            half_rhs,
            residual,
            verdict: Verdict::judge(residual, opts.tol, slack),
        }
    });
    Ok(VerificationReport {
        spec: spec.clone(),
        m: opts.m,
        m_outer: opts.m_outer,
        tol: opts.tol,
        convergence,
        truncated_residual: (lhs_truncated - rhs.truncated).norm(),
        lhs_plus,
        lhs_minus,
        lhs_sign,
        lhs,
        rhs,
        residual,
        slack,
        parity,
        corollary,
        verdict: Verdict::judge(residual, opts.tol, slack),
    })
}
