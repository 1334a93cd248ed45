//! Exact rational and integer linear algebra.
//!
//! Everything here is exact: dual bases, determinants, Smith normal form, the
//! enumeration of `Z^m / <B>`, the orientation vector `rho` and the multi-dimensional
//! fractional part. No floating point is used, so the sign tests that pick a branch of
//! the fractional part can never be perturbed by rounding.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::LinalgError;
use crate::phase::frac;
use crate::Rational;

fn rat(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Dense matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.to_string()).collect())
            .collect();
        write!(f, "RationalMatrix{rows:?}")
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        RationalMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        let rows: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| rat(v)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Row-echelon reduction; returns the rank and the determinant (when square).
    fn eliminate(&self) -> (usize, Rational) {
        let mut a = self.clone();
        let mut det = Rational::one();
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let Some(p) = (rank..a.rows).find(|&i| !a.get(i, col).is_zero()) else {
                det = Rational::zero();
                continue;
            };
            if p != rank {
                a.swap_rows(p, rank);
                det = -det;
            }
            let pivot = a.get(rank, col).clone();
            det *= &pivot;
            for i in rank + 1..a.rows {
                if a.get(i, col).is_zero() {
                    continue;
                }
                let factor = a.get(i, col) / &pivot;
                for j in col..a.cols {
                    let v = a.get(i, j) - &factor * a.get(rank, j);
                    a.set(i, j, v);
                }
            }
            rank += 1;
        }
        if self.rows != self.cols || rank < self.rows {
            det = Rational::zero();
        }
        (rank, det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.eliminate().0
    }

    pub fn determinant(&self) -> Result<Rational, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.eliminate().1)
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let p = (col..n)
                .find(|&i| !a.get(i, col).is_zero())
                .ok_or(LinalgError::SingularMatrix)?;
            a.swap_rows(p, col);
            inv.swap_rows(p, col);
            let pivot = a.get(col, col).clone();
            for j in 0..n {
                let v = a.get(col, j) / &pivot;
                a.set(col, j, v);
                let w = inv.get(col, j) / &pivot;
                inv.set(col, j, w);
            }
            for i in 0..n {
                if i == col || a.get(i, col).is_zero() {
                    continue;
                }
                let factor = a.get(i, col).clone();
                for j in 0..n {
                    let v = a.get(i, j) - &factor * a.get(col, j);
                    a.set(i, j, v);
                    let w = inv.get(i, j) - &factor * inv.get(col, j);
                    inv.set(i, j, w);
                }
            }
        }
        Ok(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }
}

/// Exact inner product of two rational vectors.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Inner product of an integer vector with a rational one.
pub fn dot_int(a: &[i64], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, _)| **x != 0)
        .map(|(x, y)| y * rat(*x))
        .sum()
}

/// A candidate basis: `m` integer vectors of `Q^m` with non-zero determinant, plus
/// the positions of the functionals they came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    vectors: Vec<Vec<i64>>,
    provenance: Vec<usize>,
    determinant: i64,
}

impl Basis {
    pub fn new(vectors: Vec<Vec<i64>>, provenance: Vec<usize>) -> Result<Self, LinalgError> {
        let m = vectors.len();
        if let Some(v) = vectors.iter().find(|v| v.len() != m) {
            return Err(LinalgError::DimensionMismatch {
                expected: m,
                found: v.len(),
            });
        }
        if provenance.len() != m {
            return Err(LinalgError::DimensionMismatch {
                expected: m,
                found: provenance.len(),
            });
        }
        let det = RationalMatrix::from_int_rows(&vectors).determinant()?;
        if det.is_zero() {
            return Err(LinalgError::SingularBasis);
        }
        let determinant = det.to_integer().to_i64().ok_or(LinalgError::Overflow)?;
        Ok(Basis {
            vectors,
            provenance,
            determinant,
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    pub fn provenance(&self) -> &[usize] {
        &self.provenance
    }

    pub fn determinant(&self) -> i64 {
        self.determinant
    }

    pub fn matrix(&self) -> RationalMatrix {
        RationalMatrix::from_int_rows(&self.vectors)
    }
}

/// Rows of the result are the dual vectors `f^B`: `<f_i, f_j^B> = delta_ij`.
pub fn dual_basis(basis: &Basis) -> Result<RationalMatrix, LinalgError> {
    let inv = basis
        .matrix()
        .inverse()
        .map_err(|_| LinalgError::SingularBasis)?;
    Ok(inv.transpose())
}

/// `U * M * V = diag(d)` with `d_1 | d_2 | ...`, `d_i > 0` and `U`, `V` unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: Vec<Vec<i64>>,
    pub d: Vec<i64>,
    pub v: Vec<Vec<i64>>,
}

fn narrow(v: i128) -> Result<i64, LinalgError> {
    i64::try_from(v).map_err(|_| LinalgError::Overflow)
}

pub fn smith_normal_form(m: &[Vec<i64>]) -> Result<SmithForm, LinalgError> {
    let n = m.len();
    if let Some(row) = m.iter().find(|r| r.len() != n) {
        return Err(LinalgError::NotSquare {
            rows: n,
            cols: row.len(),
        });
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let ident = |n: usize| -> Vec<Vec<i128>> {
        (0..n)
            .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
            .collect()
    };
    let mut u = ident(n);
    let mut v = ident(n);
    let checked = |x: Option<i128>| x.ok_or(LinalgError::Overflow);

    for t in 0..n {
        loop {
            let pivot = (t..n)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| (a[i][j].abs(), i, j));
            let Some((pi, pj)) = pivot else {
                return Err(LinalgError::SingularMatrix);
            };
            a.swap(t, pi);
            u.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }

            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..n {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in 0..n {
                        a[i][j] = checked(a[i][j].checked_sub(checked(q.checked_mul(a[t][j]))?))?;
                        u[i][j] = checked(u[i][j].checked_sub(checked(q.checked_mul(u[t][j]))?))?;
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..n {
                let q = a[t][j] / p;
                if q != 0 {
                    for i in 0..n {
                        a[i][j] = checked(a[i][j].checked_sub(checked(q.checked_mul(a[i][t]))?))?;
                        v[i][j] = checked(v[i][j].checked_sub(checked(q.checked_mul(v[i][t]))?))?;
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let bad = (t + 1..n).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in 0..n {
                        a[t][j] = checked(a[t][j].checked_add(a[i][j]))?;
                        u[t][j] = checked(u[t][j].checked_add(u[i][j]))?;
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for j in 0..n {
                a[t][j] = -a[t][j];
                u[t][j] = -u[t][j];
            }
        }
    }

    let to64 = |mat: Vec<Vec<i128>>| -> Result<Vec<Vec<i64>>, LinalgError> {
        mat.into_iter()
            .map(|r| r.into_iter().map(narrow).collect())
            .collect()
    };
    let d = (0..n).map(|i| narrow(a[i][i])).collect::<Result<_, _>>()?;
    Ok(SmithForm {
        u: to64(u)?,
        d,
        v: to64(v)?,
    })
}

/// Representatives of `Z^m / <B>` where `<B>` is the row lattice of an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetSet {
    pub representatives: Vec<Vec<i64>>,
    pub group_order: u64,
    basis_inverse: RationalMatrix,
}

impl CosetSet {
    /// `w1 == w2 (mod <B>)`, decided by an exact solve.
    pub fn same_coset(&self, w1: &[i64], w2: &[i64]) -> bool {
        let diff: Vec<Rational> = w1.iter().zip(w2).map(|(a, b)| rat(a - b)).collect();
        (0..self.basis_inverse.cols()).all(|j| {
            let coord: Rational = (0..diff.len())
                .map(|i| &diff[i] * self.basis_inverse.get(i, j))
                .sum();
            coord.is_integer()
        })
    }
}

/// Enumerates `Z^m / <B>` through the Smith form, in lexicographic order of the
/// Smith coordinates mapped back by `V^-1`.
pub fn coset_representatives(b: &[Vec<i64>]) -> Result<CosetSet, LinalgError> {
    let snf = smith_normal_form(b)?;
    let n = b.len();
    let v_inv = RationalMatrix::from_int_rows(&snf.v).inverse()?;
    let v_inv: Vec<Vec<i64>> = v_inv
        .to_rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_integer().to_i64().ok_or(LinalgError::Overflow))
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()?;
    let order: u64 = snf.d.iter().map(|&d| d as u64).product();

    let mut reps = Vec::with_capacity(order as usize);
    let mut c = vec![0i64; n];
    loop {
        let w: Vec<i64> = (0..n)
            .map(|j| (0..n).map(|i| c[i] * v_inv[i][j]).sum())
            .collect();
        reps.push(w);
        // odometer, last coordinate fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                let basis_inverse = RationalMatrix::from_int_rows(b).inverse()?;
                return Ok(CosetSet {
                    representatives: reps,
                    group_order: order,
                    basis_inverse,
                });
            }
            pos -= 1;
            c[pos] += 1;
            if c[pos] < snf.d[pos] {
                break;
            }
            c[pos] = 0;
        }
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(p) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return out;
        };
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Subsets of `vectors` of size `m` (the ambient dimension) with non-zero determinant.
pub fn basis_subsets(vectors: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let m = vectors.first().map_or(0, Vec::len);
    combinations(vectors.len(), m)
        .into_iter()
        .filter(|subset| {
            let rows: Vec<Vec<i64>> = subset.iter().map(|&i| vectors[i].clone()).collect();
            !RationalMatrix::from_int_rows(&rows)
                .determinant()
                .map(|d| d.is_zero())
                .unwrap_or(true)
        })
        .collect()
}

/// Normal vector of the hyperplane spanned by `m - 1` independent vectors of `Q^m`,
/// by cofactor expansion. For `m = 1` the "hyperplane" is `{0}` and the normal is `(1)`.
pub fn hyperplane_normal(vectors: &[Vec<i64>], m: usize) -> Vec<Rational> {
    (0..m)
        .map(|col| {
            let minor: Vec<Vec<i64>> = vectors
                .iter()
                .map(|v| {
                    v.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != col)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let det = if minor.is_empty() {
                Rational::one()
            } else {
                RationalMatrix::from_int_rows(&minor)
                    .determinant()
                    .unwrap_or_else(|_| Rational::zero())
            };
            if col % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect()
}

/// One verified pairing `<rho, f^B>` for basis `basis` (positions into the functional
/// list) and its member at position `member` of that basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoPairing {
    pub basis: Vec<usize>,
    pub member: usize,
    pub value: Rational,
}

/// Orientation vector with its exhaustive certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoVector {
    pub coords: Vec<Rational>,
    pub certificate: Vec<RhoPairing>,
}

impl RhoVector {
    /// Pairing of `rho` with a dual vector.
    pub fn pairing(&self, dual_row: &[Rational]) -> Rational {
        dot(&self.coords, dual_row)
    }
}

/// The candidate ladder `(1, 2, ..., m)`, then `(1, t, t^2, ..., t^(m-1))` for
/// `t = m + 1, m + 2, ...`.
pub fn rho_ladder(m: usize) -> impl Iterator<Item = Vec<i64>> {
    let first = (1..=m as i64).collect::<Vec<_>>();
    std::iter::once(first).chain((m as i64 + 1..).map(move |t| {
        let mut v = Vec::with_capacity(m);
        let mut p = 1i64;
        for _ in 0..m {
            v.push(p);
            p = p.saturating_mul(t);
        }
        v
    }))
}

/// Checks a candidate against every basis and every `(m-1)`-element independent
/// subset of the functional vectors; returns the certified vector.
pub fn certify_rho(vectors: &[Vec<i64>], coords: &[Rational]) -> Result<RhoVector, LinalgError> {
    let m = vectors.first().map_or(0, Vec::len);
    if coords.len() != m {
        return Err(LinalgError::DimensionMismatch {
            expected: m,
            found: coords.len(),
        });
    }
    let rank = RationalMatrix::from_int_rows(vectors).rank();
    if rank != m {
        return Err(LinalgError::RankDeficient { rank, expected: m });
    }
    // hyperplanes spanned by independent (m-1)-subsets
    for subset in combinations(vectors.len(), m.saturating_sub(1)) {
        let rows: Vec<Vec<i64>> = subset.iter().map(|&i| vectors[i].clone()).collect();
        if !rows.is_empty() && RationalMatrix::from_int_rows(&rows).rank() != rows.len() {
            continue;
        }
        let normal = hyperplane_normal(&rows, m);
        if dot(coords, &normal).is_zero() {
            return Err(LinalgError::ZeroPairing);
        }
    }
    let mut certificate = Vec::new();
    for subset in basis_subsets(vectors) {
        let basis = Basis::new(
            subset.iter().map(|&i| vectors[i].clone()).collect(),
            subset.clone(),
        )?;
        let dual = dual_basis(&basis)?;
        for member in 0..m {
            let value = dot(coords, dual.row(member));
            if value.is_zero() {
                return Err(LinalgError::ZeroPairing);
            }
            certificate.push(RhoPairing {
                basis: subset.clone(),
                member,
                value,
            });
        }
    }
    Ok(RhoVector {
        coords: coords.to_vec(),
        certificate,
    })
}

const RHO_CANDIDATE_LIMIT: usize = 4096;

/// First certified vector from `candidates`.
pub fn choose_rho_from(
    vectors: &[Vec<i64>],
    candidates: impl IntoIterator<Item = Vec<i64>>,
) -> Result<RhoVector, LinalgError> {
    let mut tried = 0;
    for cand in candidates.into_iter().take(RHO_CANDIDATE_LIMIT) {
        tried += 1;
        let coords: Vec<Rational> = cand.iter().map(|&v| rat(v)).collect();
        match certify_rho(vectors, &coords) {
            Ok(rho) => return Ok(rho),
            Err(LinalgError::ZeroPairing) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(LinalgError::ExhaustedCandidates { tried })
}

/// Deterministic orientation vector from the standard ladder.
pub fn choose_rho(vectors: &[Vec<i64>]) -> Result<RhoVector, LinalgError> {
    let m = vectors.first().map_or(0, Vec::len);
    choose_rho_from(vectors, rho_ladder(m))
}

/// `{y}_{B,f}` from the dual vector `f^B`: `{<y, f^B>}` when `<rho, f^B> > 0`, else
/// `1 - {-<y, f^B>}`. The value 1 is attained on the negative branch when the pairing
/// with `y` is an integer.
pub fn fractional_part_dual(
    y: &[Rational],
    dual_row: &[Rational],
    rho: &RhoVector,
) -> Result<Rational, LinalgError> {
    let orient = rho.pairing(dual_row);
    let p = dot(y, dual_row);
    if orient.is_positive() {
        Ok(frac(&p))
    } else if orient.is_negative() {
        Ok(Rational::one() - frac(&-p))
    } else {
        Err(LinalgError::ZeroPairing)
    }
}

/// `{y}_{B,f}` for the member of `basis` at position `member`.
pub fn fractional_part(
    y: &[Rational],
    basis: &Basis,
    member: usize,
    rho: &RhoVector,
) -> Result<Rational, LinalgError> {
    let dual = dual_basis(basis)?;
    if member >= basis.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: basis.dim(),
            found: member,
        });
    }
    fractional_part_dual(y, dual.row(member), rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    fn ints(rows: &[Vec<Rational>]) -> Vec<Vec<i64>> {
        rows.iter()
            .map(|r| r.iter().map(|v| v.to_integer().to_i64().unwrap()).collect())
            .collect()
    }

    #[test]
    fn identity_is_self_dual() {
        let b = Basis::new(vec![vec![1, 0], vec![0, 1]], vec![0, 1]).unwrap();
        assert!(dual_basis(&b).unwrap().is_identity());
    }

    #[test]
    fn dual_of_shear() {
        let b = Basis::new(vec![vec![1, 0], vec![1, 1]], vec![0, 1]).unwrap();
        let d = dual_basis(&b).unwrap();
        assert_eq!(ints(&d.to_rows()), vec![vec![1, -1], vec![0, 1]]);
        let gram = b.matrix().mul(&d.transpose()).unwrap();
        assert!(gram.is_identity());
    }

    #[test]
    fn mordell_tornheim_duals() {
        // B = {e_j : j != i} u {(1,...,1)} in R^3, i = 2 (0-based 1)
        let vecs = vec![vec![1, 0, 0], vec![0, 0, 1], vec![1, 1, 1]];
        let b = Basis::new(vecs, vec![0, 2, 3]).unwrap();
        let d = ints(&dual_basis(&b).unwrap().to_rows());
        // f_j^B = e_j - e_i, f_{r+1}^B = e_i
        assert_eq!(d, vec![vec![1, -1, 0], vec![0, -1, 1], vec![0, 1, 0]]);
    }

    #[test]
    fn singular_basis_rejected() {
        assert_eq!(
            Basis::new(vec![vec![1, 2], vec![2, 4]], vec![0, 1]),
            Err(LinalgError::SingularBasis)
        );
    }

    fn check_smith(m: &[Vec<i64>], expected: &[i64]) {
        let s = smith_normal_form(m).unwrap();
        assert_eq!(s.d, expected);
        let um = RationalMatrix::from_int_rows(&s.u)
            .mul(&RationalMatrix::from_int_rows(m))
            .unwrap()
            .mul(&RationalMatrix::from_int_rows(&s.v))
            .unwrap();
        let n = m.len();
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { expected[i] } else { 0 };
                assert_eq!(um.get(i, j), &rat(want));
            }
        }
        for w in [&s.u, &s.v] {
            let det = RationalMatrix::from_int_rows(w).determinant().unwrap();
            assert!(det == rat(1) || det == rat(-1));
        }
    }

    #[test]
    fn smith_examples() {
        check_smith(&[vec![1, 0], vec![0, 1]], &[1, 1]);
        check_smith(&[vec![2, 0], vec![0, 3]], &[1, 6]);
        check_smith(&[vec![1, 1], vec![0, 2]], &[1, 2]);
        check_smith(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], &[2, 6, 12]);
        assert_eq!(
            smith_normal_form(&[vec![1, 2], vec![2, 4]]),
            Err(LinalgError::SingularMatrix)
        );
    }

    #[test]
    fn coset_examples() {
        let c = coset_representatives(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(c.representatives, vec![vec![0, 0]]);
        let c = coset_representatives(&[vec![1, 0], vec![0, 2]]).unwrap();
        assert_eq!(c.group_order, 2);
        assert_eq!(c.representatives, vec![vec![0, 0], vec![0, 1]]);
        assert!(c.same_coset(&[0, 1], &[5, 3]));
        assert!(!c.same_coset(&[0, 1], &[0, 2]));
        let c = coset_representatives(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(c.group_order, 1);
    }

    #[test]
    fn combinations_lexicographic() {
        assert_eq!(
            combinations(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn rho_for_mordell_tornheim() {
        for m in 1..=4 {
            let mut vecs: Vec<Vec<i64>> = (0..m)
                .map(|i| (0..m).map(|j| i64::from(i == j)).collect())
                .collect();
            vecs.push(vec![1; m]);
            let rho = choose_rho(&vecs).unwrap();
            let want: Vec<Rational> = (1..=m as i64).map(rat).collect();
            assert_eq!(rho.coords, want);
            assert_eq!(rho.certificate.len(), (m + 1) * m);
        }
    }

    #[test]
    fn rho_one_dimensional() {
        let rho = choose_rho(&[vec![1]]).unwrap();
        assert_eq!(rho.coords, vec![rat(1)]);
    }

    #[test]
    fn rho_ladder_advances_past_bad_candidate() {
        // (1,2) spans a line through rho = (1,2), so the first rung fails
        let vecs = vec![vec![1, 0], vec![0, 1], vec![1, 2]];
        let rho = choose_rho(&vecs).unwrap();
        assert_eq!(rho.coords, vec![rat(1), rat(3)]);
        assert!(certify_rho(&vecs, &[rat(1), rat(2)]).is_err());
        // deterministic
        assert_eq!(choose_rho(&vecs).unwrap(), rho);
    }

    #[test]
    fn fractional_part_branches() {
        let b = Basis::new(vec![vec![1]], vec![0]).unwrap();
        let pos = RhoVector {
            coords: vec![rat(1)],
            certificate: vec![],
        };
        let neg = RhoVector {
            coords: vec![rat(-1)],
            certificate: vec![],
        };
        assert_eq!(fractional_part(&[rat(0)], &b, 0, &pos).unwrap(), rat(0));
        assert_eq!(fractional_part(&[rat(0)], &b, 0, &neg).unwrap(), rat(1));
        assert_eq!(fractional_part(&[q(7, 3)], &b, 0, &pos).unwrap(), q(1, 3));
        assert_eq!(fractional_part(&[q(7, 3)], &b, 0, &neg).unwrap(), q(1, 3));
        assert_eq!(fractional_part(&[q(-1, 4)], &b, 0, &neg).unwrap(), q(3, 4));
        let zero = RhoVector {
            coords: vec![rat(0)],
            certificate: vec![],
        };
        assert_eq!(
            fractional_part(&[rat(0)], &b, 0, &zero),
            Err(LinalgError::ZeroPairing)
        );
    }

    #[test]
    fn mordell_tornheim_fractional_parts_at_zero() {
        // J = {1,2,3}, basis without f_2: members f_1, f_3, f_{r+1}
        let vecs = vec![vec![1, 0, 0], vec![0, 0, 1], vec![1, 1, 1]];
        let b = Basis::new(vecs, vec![0, 2, 3]).unwrap();
        let rho = RhoVector {
            coords: vec![rat(1), rat(2), rat(3)],
            certificate: vec![],
        };
        let y = vec![rat(0); 3];
        // i = 2: f_1 has 1 < 2 -> 1; f_3 has 3 > 2 -> 0; f_{r+1} -> 0
        let got: Vec<Rational> = (0..3)
            .map(|m| fractional_part(&y, &b, m, &rho).unwrap())
            .collect();
        assert_eq!(got, vec![rat(1), rat(0), rat(0)]);
    }
}
