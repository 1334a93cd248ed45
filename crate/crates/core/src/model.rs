//! Problem statement: the tuple `(r, ell, h, k, y, A)`, the subset contexts
//! `(J, Jbar, I, Ibar)` and the convergence-hypothesis checker.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::SpecError;
use crate::phase::frac;
use crate::Rational;

/// A validated multiple Dirichlet series.
///
/// `a` is `ell x r`, non-negative, with no zero row and no zero column; all
/// exponents are at least 1; twists are stored reduced into `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesSpec {
    r: usize,
    ell: usize,
    h: Vec<u32>,
    k: Vec<u32>,
    y: Vec<Rational>,
    a: Vec<Vec<u32>>,
}

impl SeriesSpec {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn h(&self) -> &[u32] {
        &self.h
    }

    pub fn k(&self) -> &[u32] {
        &self.k
    }

    pub fn y(&self) -> &[Rational] {
        &self.y
    }

    pub fn a(&self) -> &[Vec<u32>] {
        &self.a
    }

    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.a[i][j]
    }

    /// `wt(h) + wt(k)`.
    pub fn weight(&self) -> u32 {
        self.h.iter().sum::<u32>() + self.k.iter().sum::<u32>()
    }

    /// Largest row sum of `A`; bounds `|a_i . m|` by `a * M` on the box `[1, M]^r`.
    pub fn max_row_sum(&self) -> u32 {
        self.a.iter().map(|row| row.iter().sum()).max().unwrap_or(0)
    }

    /// True when every twist is zero.
    pub fn is_untwisted(&self) -> bool {
        self.y.iter().all(Zero::is_zero)
    }

    /// The same series with `y` replaced by `-y` (reduced mod 1).
    pub fn negated_twist(&self) -> SeriesSpec {
        SeriesSpec {
            y: self.y.iter().map(|v| frac(&-v)).collect(),
            ..self.clone()
        }
    }

    /// Same series with different twists.
    pub fn with_twist(&self, y: Vec<Rational>) -> Result<SeriesSpec, SpecError> {
        if y.len() != self.r {
            return Err(SpecError::DimensionMismatch {
                what: "y".into(),
                expected: self.r,
                found: y.len(),
            });
        }
        Ok(SeriesSpec {
            y: y.iter().map(frac).collect(),
            ..self.clone()
        })
    }

    /// All non-empty subsets of `[r]` as sorted 0-based index lists, ordered by
    /// their bitmask (`{1}, {2}, {1,2}, {3}, ...`).
    pub fn nonempty_subsets(&self) -> Vec<Vec<usize>> {
        (1u64..(1u64 << self.r))
            .map(|mask| (0..self.r).filter(|j| mask >> j & 1 == 1).collect())
            .collect()
    }
}

impl fmt::Display for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let y: Vec<String> = self.y.iter().map(|v| v.to_string()).collect();
        write!(
            f,
            "r={} ell={} h={:?} k={:?} y=[{}] A={:?}",
            self.r,
            self.ell,
            self.h,
            self.k,
            y.join(", "),
            self.a
        )
    }
}

/// Checks the matrix conditions and exponent positivity, and reduces `y` mod 1.
pub fn validate_spec(
    a: &[Vec<i64>],
    h: &[i64],
    k: &[i64],
    y: &[Rational],
) -> Result<SeriesSpec, SpecError> {
    let ell = a.len();
    if ell == 0 || a[0].is_empty() {
        return Err(SpecError::EmptyMatrix);
    }
    let r = a[0].len();
    for row in a {
        if row.len() != r {
            return Err(SpecError::DimensionMismatch {
                what: "row of A".into(),
                expected: r,
                found: row.len(),
            });
        }
    }
    for (what, len, expected) in [("h", h.len(), r), ("k", k.len(), ell), ("y", y.len(), r)] {
        if len != expected {
            return Err(SpecError::DimensionMismatch {
                what: what.into(),
                expected,
                found: len,
            });
        }
    }
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v < 0 || v > u32::MAX as i64 {
                return Err(SpecError::Parse(format!(
                    "A[{}][{}] = {v} is not a non-negative integer",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    for (name, exps) in [("h", h), ("k", k)] {
        if let Some(idx) = exps.iter().position(|&e| e < 1 || e > u32::MAX as i64) {
            return Err(SpecError::NonPositiveExponent {
                name,
                index: idx + 1,
            });
        }
    }
    if let Some(i) = a.iter().position(|row| row.iter().all(|&v| v == 0)) {
        return Err(SpecError::ZeroRow(i + 1));
    }
    if let Some(j) = (0..r).find(|&j| a.iter().all(|row| row[j] == 0)) {
        return Err(SpecError::ZeroColumn(j + 1));
    }
    Ok(SeriesSpec {
        r,
        ell,
        h: h.iter().map(|&v| v as u32).collect(),
        k: k.iter().map(|&v| v as u32).collect(),
        y: y.iter().map(frac).collect(),
        a: a.iter()
            .map(|row| row.iter().map(|&v| v as u32).collect())
            .collect(),
    })
}

/// The sets `J`, `Jbar`, `I_J`, `Ibar_J`, all 0-based and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetContext {
    pub j: Vec<usize>,
    pub jbar: Vec<usize>,
    pub i: Vec<usize>,
    pub ibar: Vec<usize>,
}

impl SubsetContext {
    /// Sum of `h_j` over `J`.
    pub fn wt_h_j(&self, spec: &SeriesSpec) -> u32 {
        self.j.iter().map(|&j| spec.h[j]).sum()
    }

    /// Sum of `h_j` over `Jbar`; zero when `Jbar` is empty.
    pub fn wt_h_jbar(&self, spec: &SeriesSpec) -> u32 {
        self.jbar.iter().map(|&j| spec.h[j]).sum()
    }

    pub fn wt_k_i(&self, spec: &SeriesSpec) -> u32 {
        self.i.iter().map(|&i| spec.k[i]).sum()
    }

    pub fn wt_k_ibar(&self, spec: &SeriesSpec) -> u32 {
        self.ibar.iter().map(|&i| spec.k[i]).sum()
    }

    /// 1-based label such as `{1,3}`.
    pub fn label(&self) -> String {
        one_based_label(&self.j)
    }
}

/// Formats a 0-based index set as a 1-based brace list.
pub fn one_based_label(idx: &[usize]) -> String {
    let parts: Vec<String> = idx.iter().map(|v| (v + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Builds the subset context for a non-empty `J` given as 0-based indices.
pub fn subset_context(spec: &SeriesSpec, j: &[usize]) -> Result<SubsetContext, SpecError> {
    if j.is_empty() {
        return Err(SpecError::EmptySubset);
    }
    let mut j: Vec<usize> = j.to_vec();
    j.sort_unstable();
    j.dedup();
    if let Some(&bad) = j.iter().find(|&&v| v >= spec.r) {
        return Err(SpecError::SubsetOutOfRange {
            index: bad + 1,
            r: spec.r,
        });
    }
    let jbar = (0..spec.r).filter(|v| !j.contains(v)).collect();
    let (i, ibar) = (0..spec.ell).partition(|&row| j.iter().any(|&col| spec.a[row][col] != 0));
    Ok(SubsetContext { j, jbar, i, ibar })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceStatus {
    ProvedSufficient,
    Unknown,
    UserAsserted,
}

impl fmt::Display for ConvergenceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConvergenceStatus::ProvedSufficient => "proved-sufficient",
            ConvergenceStatus::Unknown => "unknown",
            ConvergenceStatus::UserAsserted => "user-asserted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub status: ConvergenceStatus,
    pub detail: String,
}

impl ConvergenceVerdict {
    /// Applies a user override; a proved verdict is kept as is.
    pub fn asserted(self) -> ConvergenceVerdict {
        match self.status {
            ConvergenceStatus::ProvedSufficient | ConvergenceStatus::UserAsserted => self,
            ConvergenceStatus::Unknown => ConvergenceVerdict {
                status: ConvergenceStatus::UserAsserted,
                detail: format!("asserted by user ({})", self.detail),
            },
        }
    }

    pub fn licensed(&self) -> bool {
        self.status != ConvergenceStatus::Unknown
    }
}

/// Conservative check of the hypothesis that, for every subset `J`, the sum of
/// `prod m_j^-h_j prod |sum_J a m - sum_Jbar a m|^-k_i` over tuples with non-vanishing
/// forms converges.
///
/// Two sufficient conditions are recognised:
/// - the Mordell-Tornheim matrix (`ell = 1`, all-ones row), where the hypothesis is a
///   known lemma for all positive exponents;
/// - every variable has effective exponent at least 2, where the effective exponent of
///   `m_j` is `h_j` plus `k_i` for each row `i` supported on column `j` alone. Every
///   non-vanishing integer form is at least 1 in absolute value, and a single-column
///   form equals `a_ij |m_j| >= |m_j|`, so the hypothesis sum is dominated by a product
///   of one-variable zeta values.
pub fn convergence_check(spec: &SeriesSpec) -> ConvergenceVerdict {
    if spec.ell == 1 && spec.a[0].iter().all(|&v| v == 1) {
        return ConvergenceVerdict {
            status: ConvergenceStatus::ProvedSufficient,
            detail: "Mordell-Tornheim matrix: hypothesis holds for all positive exponents"
                .into(),
        };
    }
    let mut effective: Vec<u32> = spec.h.clone();
    for (i, row) in spec.a.iter().enumerate() {
        let support: Vec<usize> = (0..spec.r).filter(|&j| row[j] != 0).collect();
        if let [j] = support[..] {
            effective[j] += spec.k[i];
        }
    }
    match effective.iter().position(|&e| e < 2) {
        None => ConvergenceVerdict {
            status: ConvergenceStatus::ProvedSufficient,
            detail: format!(
                "effective exponents {effective:?} all >= 2: dominated by a product of zeta values"
            ),
        },
        Some(j) => ConvergenceVerdict {
            status: ConvergenceStatus::Unknown,
            detail: format!(
                "variable m_{} has effective exponent {} < 2 and the matrix is not Mordell-Tornheim",
                j + 1,
                effective[j]
            ),
        },
    }
}

/// On-disk JSON form: `{"A": [[...]], "h": [...], "k": [...], "y": ["p/q", ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    pub h: Vec<i64>,
    pub k: Vec<i64>,
    #[serde(default)]
    pub y: Option<Vec<TwistEntry>>,
}

/// A twist written either as a rational string (`"1/3"`, `"-2/5"`, `"0"`) or an integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TwistEntry {
    Text(String),
    Int(i64),
}

impl TwistEntry {
    pub fn to_rational(&self) -> Result<Rational, SpecError> {
        match self {
            TwistEntry::Int(v) => Ok(Rational::from_integer((*v).into())),
            TwistEntry::Text(s) => {
                let t = s.trim();
                let parsed = Rational::from_str(t)
                    .map_err(|_| SpecError::Parse(format!("twist entry {t:?} is not p/q")))?;
                Ok(parsed)
            }
        }
    }
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<SpecFile, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<SeriesSpec, SpecError> {
        let r = self.a.first().map_or(0, Vec::len);
        let y = match &self.y {
            None => vec![Rational::zero(); r],
            Some(entries) => entries
                .iter()
                .map(TwistEntry::to_rational)
                .collect::<Result<_, _>>()?,
        };
        validate_spec(&self.a, &self.h, &self.k, &y)
    }

    pub fn from_spec(spec: &SeriesSpec) -> SpecFile {
        SpecFile {
            a: spec
                .a
                .iter()
                .map(|row| row.iter().map(|&v| v as i64).collect())
                .collect(),
            h: spec.h.iter().map(|&v| v as i64).collect(),
            k: spec.k.iter().map(|&v| v as i64).collect(),
            y: Some(
                spec.y
                    .iter()
                    .map(|v| TwistEntry::Text(v.to_string()))
                    .collect(),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zeros(n: usize) -> Vec<Rational> {
        vec![Rational::zero(); n]
    }

    fn mt(r: usize, h: &[i64], k: i64) -> SeriesSpec {
        validate_spec(&[vec![1; r]], h, &[k], &zeros(r)).unwrap()
    }

    #[test]
    fn mordell_tornheim_matrix_is_valid() {
        let spec = mt(2, &[1, 1], 1);
        assert_eq!(spec.r(), 2);
        assert_eq!(spec.ell(), 1);
        assert_eq!(spec.max_row_sum(), 2);
        assert_eq!(spec.weight(), 3);
    }

    #[test]
    fn zero_row_rejected() {
        let err = validate_spec(&[vec![1, 0], vec![0, 0]], &[1, 1], &[1, 1], &zeros(2));
        assert_eq!(err, Err(SpecError::ZeroRow(2)));
    }

    #[test]
    fn zero_column_rejected() {
        let err = validate_spec(&[vec![1, 0], vec![1, 0]], &[1, 1], &[1, 1], &zeros(2));
        assert_eq!(err, Err(SpecError::ZeroColumn(2)));
    }

    #[test]
    fn exponents_and_dimensions() {
        assert_eq!(
            validate_spec(&[vec![1, 1]], &[1, 0], &[1], &zeros(2)),
            Err(SpecError::NonPositiveExponent { name: "h", index: 2 })
        );
        assert_eq!(
            validate_spec(&[vec![1, 1]], &[1, 1], &[-3], &zeros(2)),
            Err(SpecError::NonPositiveExponent { name: "k", index: 1 })
        );
        assert!(matches!(
            validate_spec(&[vec![1, 1]], &[1], &[1], &zeros(2)),
            Err(SpecError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn twists_reduced_mod_one() {
        let y = vec![Rational::new((-1).into(), 3.into()), Rational::new(7.into(), 2.into())];
        let spec = validate_spec(&[vec![1, 1]], &[1, 1], &[1], &y).unwrap();
        assert_eq!(spec.y()[0], Rational::new(2.into(), 3.into()));
        assert_eq!(spec.y()[1], Rational::new(1.into(), 2.into()));
        let neg = spec.negated_twist();
        assert_eq!(neg.y()[0], Rational::new(1.into(), 3.into()));
        assert_eq!(neg.y()[1], Rational::new(1.into(), 2.into()));
    }

    #[test]
    fn subset_contexts() {
        let spec = mt(2, &[1, 1], 1);
        let ctx = subset_context(&spec, &[0]).unwrap();
        assert_eq!(ctx.i, vec![0]);
        assert!(ctx.ibar.is_empty());
        assert_eq!(ctx.jbar, vec![1]);

        let diag = validate_spec(&[vec![1, 0], vec![0, 1]], &[1, 1], &[1, 1], &zeros(2)).unwrap();
        let ctx = subset_context(&diag, &[0]).unwrap();
        assert_eq!(ctx.i, vec![0]);
        assert_eq!(ctx.ibar, vec![1]);

        let full = subset_context(&spec, &[0, 1]).unwrap();
        assert_eq!(full.i, vec![0]);
        assert!(full.jbar.is_empty());
        assert_eq!(full.wt_h_jbar(&spec), 0);

        assert_eq!(subset_context(&spec, &[]), Err(SpecError::EmptySubset));
    }

    #[test]
    fn subsets_in_mask_order() {
        let spec = mt(2, &[1, 1], 1);
        assert_eq!(spec.nonempty_subsets(), vec![vec![0], vec![1], vec![0, 1]]);
        assert_eq!(mt(1, &[2], 1).nonempty_subsets(), vec![vec![0]]);
    }

    #[test]
    fn convergence_verdicts() {
        assert_eq!(
            convergence_check(&mt(3, &[1, 1, 1], 1)).status,
            ConvergenceStatus::ProvedSufficient
        );
        // root-system style: unit rows lift both effective exponents to 2
        let rs = validate_spec(
            &[vec![1, 0], vec![0, 1], vec![1, 1]],
            &[1, 1],
            &[1, 1, 1],
            &zeros(2),
        )
        .unwrap();
        assert_eq!(convergence_check(&rs).status, ConvergenceStatus::ProvedSufficient);

        let unknown = validate_spec(&[vec![1, 1], vec![1, 2]], &[1, 1], &[1, 1], &zeros(2)).unwrap();
        let verdict = convergence_check(&unknown);
        assert_eq!(verdict.status, ConvergenceStatus::Unknown);
        assert!(!verdict.licensed());
        let forced = verdict.asserted();
        assert_eq!(forced.status, ConvergenceStatus::UserAsserted);
        assert!(forced.licensed());
    }

    #[test]
    fn spec_file_parsing() {
        let text = r#"{"A": [[1, 1]], "h": [2, 2], "k": [2], "y": ["1/2", 0]}"#;
        let spec = SpecFile::from_json(text).unwrap().validate().unwrap();
        assert_eq!(spec.y()[0], Rational::new(1.into(), 2.into()));
        assert!(SpecFile::from_json(r#"{"A": [[1]], "h": [1], "k": [1], "y": ["x"]}"#)
            .unwrap()
            .validate()
            .is_err());
        let back = SpecFile::from_spec(&spec).validate().unwrap();
        assert_eq!(back, spec);
    }

    fn brute_force_valid(a: &[Vec<i64>]) -> bool {
        let rows_ok = a.iter().all(|row| row.iter().any(|&v| v != 0));
        let cols_ok = (0..a[0].len()).all(|j| a.iter().any(|row| row[j] != 0));
        rows_ok && cols_ok
    }

    proptest! {
        #[test]
        fn validation_matches_row_column_scan(
            (ell, r, entries) in (1usize..4, 1usize..4)
                .prop_flat_map(|(ell, r)| (Just(ell), Just(r), proptest::collection::vec(0i64..3, ell * r)))
        ) {
            let a: Vec<Vec<i64>> = entries.chunks(r).map(|c| c.to_vec()).collect();
            let res = validate_spec(&a, &vec![1; r], &vec![1; ell], &zeros(r));
            prop_assert_eq!(res.is_ok(), brute_force_valid(&a));
        }

        #[test]
        fn subset_rows_monotone(
            entries in proptest::collection::vec(0i64..2, 9),
            j_mask in 1u32..8,
            extra in 0u32..8,
        ) {
            let a: Vec<Vec<i64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            prop_assume!(brute_force_valid(&a));
            let spec = validate_spec(&a, &[1, 1, 1], &[1, 1, 1], &zeros(3)).unwrap();
            let j: Vec<usize> = (0..3).filter(|b| j_mask >> b & 1 == 1).collect();
            let big: Vec<usize> = (0..3).filter(|b| (j_mask | extra) >> b & 1 == 1).collect();
            let ctx = subset_context(&spec, &j).unwrap();
            prop_assert_eq!(&subset_context(&spec, &ctx.j).unwrap(), &ctx);
            let ctx_big = subset_context(&spec, &big).unwrap();
            prop_assert!(ctx.i.iter().all(|i| ctx_big.i.contains(i)));
            prop_assert!(!ctx.i.is_empty());
        }
    }
}
