//! The functional set `Lambda_J`, its bases, and the generating function
//!
//! ```text
//! G(t) = sum_B prod_{g not in B} -t_g / (d_g - L_g(t))
//!          * 1/|Z^m/<B>| sum_w prod_{f in B} 2 pi i t_f e((t_f - fdot) {y + w}_{B,f}) / (e(t_f) - 1)
//! ```
//!
//! with `L_g(t) = t_g - sum_{f in B} t_f <g, f^B>` and `d_g = gdot - sum_{f in B} fdot <g, f^B>`.
//!
//! When some `d_g` vanishes the corresponding basis term has a pole along the
//! hyperplane `L_g = 0` through the origin. The poles cancel in the sum, so those terms
//! are brought over the common denominator `prod L^mu`, added, and the numerator is
//! divided back exactly. This happens for `J = [r]` (all dots vanish) and whenever
//! a row of `A` has no support outside `J`.
//!
//! Everything that depends only on the vector parts (bases, duals, cosets, `rho`,
//! fractional parts and the Bernoulli products) is prepared once in
//! [`GeneratingFunction`]; evaluation for a given set of dot parts only recomputes the
//! geometric factors and phases.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::bernoulli::BernoulliTable;
use crate::error::{GenFunError, SpecError};
use crate::linalg::{
    basis_subsets, choose_rho_from, coset_representatives, dot_int, dual_basis,
    fractional_part_dual, rho_ladder, Basis, RationalMatrix, RhoVector,
};
use crate::model::{SeriesSpec, SubsetContext};
use crate::mpseries::{bernoulli_coefficients, rational_factor, MultiSeries, Shape};
use crate::phase::{denominator_lcm, unit_phase};
use crate::Rational;

/// Which functional an element of `Lambda` realizes; indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    /// `f_j` for a column `j` in `J`.
    Unit(usize),
    /// `f_{r+i}` for a row `i` in `I`.
    Row(usize),
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Unit(j) => write!(f, "f_{}", j + 1),
            Tag::Row(i) => write!(f, "f_r+{}", i + 1),
        }
    }
}

/// `f = (vec, dot)`, evaluated as `f(m) = <vec, m> + dot`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineFunctional {
    pub vec: Vec<i64>,
    pub dot: Rational,
    pub tag: Tag,
}

impl AffineFunctional {
    pub fn eval(&self, m: &[i64]) -> Rational {
        let lin: i64 = self.vec.iter().zip(m).map(|(a, b)| a * b).sum();
        Rational::from_integer(BigInt::from(lin)) + &self.dot
    }
}

/// `{f_j : j in J} u {f_{r+i} : i in I}` for the outer tuple `m_outer` (indexed like
/// `ctx.jbar`).
pub fn build_lambda(
    spec: &SeriesSpec,
    ctx: &SubsetContext,
    m_outer: &[u64],
) -> Result<Vec<AffineFunctional>, SpecError> {
    if m_outer.len() != ctx.jbar.len() {
        return Err(SpecError::DimensionMismatch {
            what: "outer tuple".into(),
            expected: ctx.jbar.len(),
            found: m_outer.len(),
        });
    }
    let mut lambda: Vec<AffineFunctional> = ctx
        .j
        .iter()
        .map(|&j| AffineFunctional {
            vec: ctx.j.iter().map(|&k| i64::from(k == j)).collect(),
            dot: Rational::zero(),
            tag: Tag::Unit(j),
        })
        .collect();
    for &i in &ctx.i {
        let outer: i64 = ctx
            .jbar
            .iter()
            .zip(m_outer)
            .map(|(&j, &m)| i64::from(spec.entry(i, j)) * m as i64)
            .sum();
        lambda.push(AffineFunctional {
            vec: ctx.j.iter().map(|&j| i64::from(spec.entry(i, j))).collect(),
            dot: Rational::from_integer(BigInt::from(-outer)),
            tag: Tag::Row(i),
        });
    }
    Ok(lambda)
}

fn check_rank(vecs: &[Vec<i64>]) -> Result<usize, GenFunError> {
    let m = vecs.first().map_or(0, Vec::len);
    let rank = RationalMatrix::from_int_rows(vecs).rank();
    if rank != m || m == 0 {
        return Err(GenFunError::RankDeficientLambda { rank, expected: m });
    }
    Ok(m)
}

/// All `|J|`-element subsets of `lambda` whose vector parts form a basis, in
/// lexicographic order of positions (which is tag order for [`build_lambda`] output).
pub fn enumerate_bases(lambda: &[AffineFunctional]) -> Result<Vec<Basis>, GenFunError> {
    let vecs: Vec<Vec<i64>> = lambda.iter().map(|f| f.vec.clone()).collect();
    check_rank(&vecs)?;
    basis_subsets(&vecs)
        .into_iter()
        .map(|subset| {
            Basis::new(subset.iter().map(|&i| vecs[i].clone()).collect(), subset)
                .map_err(GenFunError::from)
        })
        .collect()
}

/// Family of orientation-vector candidates. Each family is walked until a candidate
/// is certified; distinct families give distinct certified vectors for `m >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum RhoChoice {
    /// `(1, 2, ..., m)`, then `(1, t, ..., t^(m-1))`.
    #[default]
    Ladder,
    /// The ladder with all signs flipped.
    Negated,
    /// The ladder with coordinates in reverse order.
    Reversed,
    /// The ladder, skipping the first `n` certified vectors.
    Skip(usize),
}

impl RhoChoice {
    pub fn select(&self, vecs: &[Vec<i64>]) -> Result<RhoVector, GenFunError> {
        let m = vecs.first().map_or(0, Vec::len);
        let rho = match self {
            RhoChoice::Ladder => choose_rho_from(vecs, rho_ladder(m))?,
            RhoChoice::Negated => {
                choose_rho_from(vecs, rho_ladder(m).map(|v| v.iter().map(|x| -x).collect()))?
            }
            RhoChoice::Reversed => choose_rho_from(
                vecs,
                rho_ladder(m).map(|mut v| {
                    v.reverse();
                    v
                }),
            )?,
            RhoChoice::Skip(n) => {
                let mut remaining = *n;
                let mut ladder = rho_ladder(m);
                loop {
                    let rho = choose_rho_from(vecs, &mut ladder)?;
                    if remaining == 0 {
                        break rho;
                    }
                    remaining -= 1;
                }
            }
        };
        Ok(rho)
    }
}

/// What to do when a geometric factor has `d_g = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SingularPolicy {
    /// Cancel the poles across bases and divide the common denominator back out.
    #[default]
    Resolve,
    /// Report [`GenFunError::SingularConfiguration`].
    Fatal,
}

struct OutsideTerm {
    g: usize,
    pairings: Vec<Rational>,
    pairings_f64: Vec<(usize, f64)>,
    form: usize,
    scale: f64,
}

struct CosetTerm {
    fracs: Vec<Rational>,
    /// prod_f of the Bernoulli expansions, in the requested shape
    product: MultiSeries,
}

struct BasisTerm {
    basis: Basis,
    dual: RationalMatrix,
    outside: Vec<OutsideTerm>,
    cosets: Vec<CosetTerm>,
    extended: OnceLock<Vec<MultiSeries>>,
}

/// Generating function for a fixed functional geometry, twist and orientation,
/// evaluated at any dot parts.
pub struct GeneratingFunction {
    tags: Vec<Tag>,
    vecs: Vec<Vec<i64>>,
    y: Vec<Rational>,
    rho: RhoVector,
    shape: Shape,
    extended_shape: Shape,
    table: BernoulliTable,
    terms: Vec<BasisTerm>,
    /// distinct normalized singular-candidate forms, as f64 coefficient vectors
    forms: Vec<Vec<f64>>,
    period: u64,
}

impl fmt::Debug for GeneratingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratingFunction")
            .field("tags", &self.tags)
            .field("vecs", &self.vecs)
            .field("rho", &self.rho.coords)
            .field("shape", &self.shape)
            .field("bases", &self.terms.len())
            .finish()
    }
}

fn product_of_factors(
    shape: &Shape,
    members: &[usize],
    fracs: &[Rational],
    table: &BernoulliTable,
) -> Result<MultiSeries, GenFunError> {
    let mut acc = MultiSeries::one(shape);
    for (&var, c) in members.iter().zip(fracs) {
        let degree = shape.caps()[var].min(shape.total());
        let coeffs = bernoulli_coefficients(c, degree, table);
        acc = acc.mul(&MultiSeries::univariate(shape, var, &coeffs)?)?;
    }
    Ok(acc)
}

impl GeneratingFunction {
    /// Prepares the dot-independent structure. `y` has one entry per coordinate of the
    /// functional vectors; `shape` has one variable per functional, in `lambda` order.
    pub fn new(
        tags: Vec<Tag>,
        vecs: Vec<Vec<i64>>,
        y: Vec<Rational>,
        rho: RhoVector,
        shape: Shape,
    ) -> Result<GeneratingFunction, GenFunError> {
        let m = check_rank(&vecs)?;
        let n = vecs.len();
        if shape.nvars() != n || tags.len() != n {
            return Err(GenFunError::ExponentMismatch {
                expected: n,
                found: shape.nvars(),
            });
        }
        if y.len() != m {
            return Err(GenFunError::ExponentMismatch {
                expected: m,
                found: y.len(),
            });
        }
        let mut forms_exact: Vec<Vec<Rational>> = Vec::new();
        let mut terms = Vec::new();
        let mut period = BigInt::from(1);
        // per form: max count of outside elements in one basis
        let mut form_max: Vec<usize> = Vec::new();

        let max_cap = shape.caps().iter().copied().max().unwrap_or(0).min(shape.total());
        let table = BernoulliTable::new(max_cap);

        for subset in basis_subsets(&vecs) {
            let basis = Basis::new(subset.iter().map(|&i| vecs[i].clone()).collect(), subset)?;
            let dual = dual_basis(&basis)?;
            let members = basis.provenance().to_vec();

            let mut outside = Vec::new();
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for g in (0..n).filter(|g| !members.contains(g)) {
                let pairings: Vec<Rational> =
                    (0..m).map(|k| dot_int(&vecs[g], dual.row(k))).collect();
                // L_g = t_g - sum p_f t_f over all variables
                let mut form = vec![Rational::zero(); n];
                form[g] = Rational::from_integer(1.into());
                for (k, &f) in members.iter().enumerate() {
                    form[f] = -pairings[k].clone();
                }
                let lead = form.iter().find(|v| !v.is_zero()).cloned().unwrap();
                let normalized: Vec<Rational> = form.iter().map(|v| v / &lead).collect();
                let idx = match forms_exact.iter().position(|f| *f == normalized) {
                    Some(i) => i,
                    None => {
                        forms_exact.push(normalized);
                        form_max.push(0);
                        forms_exact.len() - 1
                    }
                };
                *counts.entry(idx).or_default() += 1;
                outside.push(OutsideTerm {
                    g,
                    pairings_f64: members
                        .iter()
                        .zip(&pairings)
                        .map(|(&f, p)| (f, p.to_f64().unwrap_or(f64::NAN)))
                        .collect(),
                    pairings,
                    form: idx,
                    scale: lead.to_f64().unwrap_or(f64::NAN),
                });
            }
            for (idx, c) in counts {
                form_max[idx] = form_max[idx].max(c);
            }

            let lattice = coset_representatives(basis.vectors())?;
            let mut cosets = Vec::with_capacity(lattice.representatives.len());
            for w in &lattice.representatives {
                let shifted: Vec<Rational> = y
                    .iter()
                    .zip(w)
                    .map(|(yv, &wv)| yv + Rational::from_integer(BigInt::from(wv)))
                    .collect();
                let fracs = (0..m)
                    .map(|k| fractional_part_dual(&shifted, dual.row(k), &rho))
                    .collect::<Result<Vec<_>, _>>()?;
                period = period.lcm(&denominator_lcm(&fracs));
                let product = product_of_factors(&shape, &members, &fracs, &table)?;
                cosets.push(CosetTerm { fracs, product });
            }
            terms.push(BasisTerm {
                basis,
                dual,
                outside,
                cosets,
                extended: OnceLock::new(),
            });
        }

        let max_steps: usize = form_max.iter().sum();
        let extended_shape = Shape::total_degree(n, shape.total() + max_steps);
        let forms = forms_exact
            .iter()
            .map(|f| f.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect())
            .collect();
        Ok(GeneratingFunction {
            tags,
            vecs,
            y,
            rho,
            shape,
            table: BernoulliTable::new(extended_shape.total()),
            extended_shape,
            terms,
            forms,
            period: period.to_u64().unwrap_or(u64::MAX),
        })
    }

    /// Prepares the generating function for `lambda`, choosing `rho` from `choice`.
    pub fn for_lambda(
        lambda: &[AffineFunctional],
        y: &[Rational],
        choice: &RhoChoice,
        shape: Shape,
    ) -> Result<GeneratingFunction, GenFunError> {
        let vecs: Vec<Vec<i64>> = lambda.iter().map(|f| f.vec.clone()).collect();
        check_rank(&vecs)?;
        let rho = choice.select(&vecs)?;
        GeneratingFunction::new(
            lambda.iter().map(|f| f.tag).collect(),
            vecs,
            y.to_vec(),
            rho,
            shape,
        )
    }

    pub fn rho(&self) -> &RhoVector {
        &self.rho
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn y(&self) -> &[Rational] {
        &self.y
    }

    pub fn bases(&self) -> impl Iterator<Item = &Basis> {
        self.terms.iter().map(|t| &t.basis)
    }

    /// Rows `f^B` of the dual basis for the `index`-th basis.
    pub fn dual(&self, index: usize) -> &RationalMatrix {
        &self.terms[index].dual
    }

    /// Pairings `<g, f^B>` of every non-member `g` with the dual basis, for the
    /// `index`-th basis.
    pub fn outside_pairings(&self, index: usize) -> Vec<(usize, Vec<Rational>)> {
        self.terms[index]
            .outside
            .iter()
            .map(|o| (o.g, o.pairings.clone()))
            .collect()
    }

    /// Fractional parts `{y + w}_{B,f}` for every coset of the `index`-th basis.
    pub fn fractional_parts(&self, index: usize) -> Vec<Vec<Rational>> {
        self.terms[index]
            .cosets
            .iter()
            .map(|c| c.fracs.clone())
            .collect()
    }

    /// Least common period (in every outer variable) of the phases `e(-fdot c)`.
    pub fn period(&self) -> u64 {
        self.period
    }

    fn extended_products<'s>(
        &'s self,
        term: &'s BasisTerm,
    ) -> Result<&'s Vec<MultiSeries>, GenFunError> {
        if let Some(p) = term.extended.get() {
            return Ok(p);
        }
        let members = term.basis.provenance();
        let products = term
            .cosets
            .iter()
            .map(|c| product_of_factors(&self.extended_shape, members, &c.fracs, &self.table))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(term.extended.get_or_init(|| products))
    }

    fn coset_average(
        &self,
        term: &BasisTerm,
        dots: &[Rational],
        products: &[MultiSeries],
    ) -> Result<MultiSeries, GenFunError> {
        let members = term.basis.provenance();
        let mut acc = products[0].zero_like();
        let weight = 1.0 / term.cosets.len() as f64;
        for (coset, product) in term.cosets.iter().zip(products) {
            let theta: Rational = members
                .iter()
                .zip(&coset.fracs)
                .map(|(&f, c)| -(&dots[f] * c))
                .sum();
            acc.add_scaled(product, unit_phase(&theta) * weight)?;
        }
        Ok(acc)
    }

    fn singular_error(&self, term: &BasisTerm, g: usize, dots: &[Rational]) -> GenFunError {
        GenFunError::SingularConfiguration {
            basis: term
                .basis
                .provenance()
                .iter()
                .map(|&i| self.tags[i].to_string())
                .collect(),
            functional: self.tags[g].to_string(),
            outer: dots
                .iter()
                .map(|d| d.to_integer().to_i64().unwrap_or(i64::MIN))
                .collect(),
        }
    }

    /// `G` at the given dot parts (one per functional), truncated to the shape.
    pub fn evaluate(
        &self,
        dots: &[Rational],
        policy: SingularPolicy,
    ) -> Result<MultiSeries, GenFunError> {
        if dots.len() != self.vecs.len() {
            return Err(GenFunError::ExponentMismatch {
                expected: self.vecs.len(),
                found: dots.len(),
            });
        }
        // d_g for every (basis, outside functional)
        let ds: Vec<Vec<Rational>> = self
            .terms
            .iter()
            .map(|term| {
                let members = term.basis.provenance();
                term.outside
                    .iter()
                    .map(|o| {
                        let s: Rational = members
                            .iter()
                            .zip(&o.pairings)
                            .map(|(&f, p)| &dots[f] * p)
                            .sum();
                        &dots[o.g] - s
                    })
                    .collect()
            })
            .collect();

        let singular = ds.iter().flatten().any(Zero::is_zero);
        if !singular {
            let mut g = MultiSeries::zero(&self.shape);
            for (term, d_row) in self.terms.iter().zip(&ds) {
                let products: Vec<MultiSeries> =
                    term.cosets.iter().map(|c| c.product.clone()).collect();
                let mut acc = self.coset_average(term, dots, &products)?;
                for (o, d) in term.outside.iter().zip(d_row) {
                    let d = Complex64::new(d.to_f64().unwrap_or(f64::NAN), 0.0);
                    acc = acc.mul(&rational_factor(&self.shape, o.g, d, &o.pairings_f64)?)?;
                }
                g.add_assign(&acc)?;
            }
            return Ok(g);
        }

        if policy == SingularPolicy::Fatal {
            for (term, d_row) in self.terms.iter().zip(&ds) {
                if let Some(o) = term.outside.iter().zip(d_row).find(|(_, d)| d.is_zero()) {
                    return Err(self.singular_error(term, o.0.g, dots));
                }
            }
        }

        let ext = &self.extended_shape;
        let nforms = self.forms.len();
        let mut mult: Vec<Vec<usize>> = Vec::with_capacity(self.terms.len());
        let mut mu = vec![0usize; nforms];
        for (term, d_row) in self.terms.iter().zip(&ds) {
            let mut counts = vec![0usize; nforms];
            for (o, d) in term.outside.iter().zip(d_row) {
                if d.is_zero() {
                    counts[o.form] += 1;
                }
            }
            for (m, c) in mu.iter_mut().zip(&counts) {
                *m = (*m).max(*c);
            }
            mult.push(counts);
        }
        let form_series: Vec<MultiSeries> = self
            .forms
            .iter()
            .map(|f| {
                let terms: Vec<(usize, Complex64)> = f
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(k, &v)| (k, Complex64::new(v, 0.0)))
                    .collect();
                MultiSeries::linear(ext, &terms)
            })
            .collect::<Result<_, _>>()?;

        let mut numerator = MultiSeries::zero(ext);
        for ((term, d_row), counts) in self.terms.iter().zip(&ds).zip(&mult) {
            let products = self.extended_products(term)?;
            let mut acc = self.coset_average(term, dots, products)?;
            for (o, d) in term.outside.iter().zip(d_row) {
                if d.is_zero() {
                    // t_g / L_g with L_g = scale * form
                    let t = MultiSeries::linear(ext, &[(o.g, Complex64::new(1.0 / o.scale, 0.0))])?;
                    acc = acc.mul(&t)?;
                } else {
                    let d = Complex64::new(d.to_f64().unwrap_or(f64::NAN), 0.0);
                    acc = acc.mul(&rational_factor(ext, o.g, d, &o.pairings_f64)?)?;
                }
            }
            for (f, (&m, &c)) in mu.iter().zip(counts).enumerate() {
                for _ in c..m {
                    acc = acc.mul(&form_series[f])?;
                }
            }
            numerator.add_assign(&acc)?;
        }
        for (f, &m) in mu.iter().enumerate() {
            for _ in 0..m {
                numerator = numerator.divide_by_linear(&self.forms[f])?;
            }
        }
        Ok(numerator.reshape(&self.shape)?)
    }

    /// Taylor coefficient of `prod t^exps` at the given dot parts.
    pub fn coefficient(
        &self,
        dots: &[Rational],
        exps: &[usize],
        policy: SingularPolicy,
    ) -> Result<Complex64, GenFunError> {
        Ok(self.evaluate(dots, policy)?.coefficient(exps)?)
    }
}

/// `G` for a concrete functional set, with its provenance.
#[derive(Debug)]
pub struct GfAssembly {
    pub lambda: Vec<AffineFunctional>,
    pub bases: Vec<Basis>,
    pub rho: RhoVector,
    pub series: MultiSeries,
}

/// Builds `G(t, y; lambda)` truncated to `shape` (one variable per functional).
pub fn compute_g(
    lambda: &[AffineFunctional],
    y: &[Rational],
    choice: &RhoChoice,
    shape: &Shape,
    policy: SingularPolicy,
) -> Result<GfAssembly, GenFunError> {
    let gf = GeneratingFunction::for_lambda(lambda, y, choice, shape.clone())?;
    let dots: Vec<Rational> = lambda.iter().map(|f| f.dot.clone()).collect();
    let series = gf.evaluate(&dots, policy)?;
    Ok(GfAssembly {
        lambda: lambda.to_vec(),
        bases: gf.bases().cloned().collect(),
        rho: gf.rho.clone(),
        series,
    })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `D = (prod exps!) * [t^exps] G`.
pub fn extract_d(assembly: &GfAssembly, exps: &[usize]) -> Result<Complex64, GenFunError> {
    let c = assembly.series.coefficient(exps)?;
    Ok(c * exps.iter().map(|&e| factorial(e)).product::<f64>())
}
