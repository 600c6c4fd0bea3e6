//! Exact verifiers.
//!
//! Each verifier first checks the shape (a mismatch is an `Err`, never an
//! invalid verdict) and then scans in a fixed order, reporting the first
//! violation found:
//!
//! 1. entry ranges, row-major;
//! 2. symmetry / skewness (weighing matrices), row-major over the upper
//!    triangle including the diagonal;
//! 3. per-row structure (permutation, multiplicities, weights), by row;
//! 4. column sums (ternary designs), by column;
//! 5. pairwise row constraints, over row pairs `(i, j)` with `i < j` in
//!    lexicographic order.
//!
//! When the first violation comes from the pairwise phase, the report also
//! carries the total number of violating row pairs.

use std::fmt;

use serde::Serialize;

use super::{
    BtdParams, DesignError, DesignMatrix, EpaParams, FrParams, InstanceSpec, PaParams,
    WeighingParams,
};

/// The first constraint found violated by a verifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: i32,
    },
    /// A row repeats a symbol, so it is not a permutation.
    NotPermutation {
        row: usize,
        col: usize,
        symbol: i32,
    },
    /// Two packing-array rows agree in (at least) these two columns.
    RowsAgree {
        rows: (usize, usize),
        cols: (usize, usize),
    },
    NotSymmetric {
        row: usize,
        col: usize,
    },
    NotSkew {
        row: usize,
        col: usize,
    },
    RowWeight {
        row: usize,
        expected: i64,
        actual: i64,
    },
    NotOrthogonal {
        rows: (usize, usize),
        dot: i64,
    },
    RowMultiplicity {
        row: usize,
        ones: usize,
        twos: usize,
        expected_ones: usize,
        expected_twos: usize,
    },
    ColumnSum {
        col: usize,
        expected: i64,
        actual: i64,
    },
    PairProduct {
        rows: (usize, usize),
        expected: i64,
        actual: i64,
    },
    /// Both rows place `second` exactly `step` positions right of `first`.
    RepeatedStep {
        rows: (usize, usize),
        first: i32,
        second: i32,
        step: usize,
    },
    HammingDistance {
        rows: (usize, usize),
        expected: usize,
        actual: usize,
    },
}

impl Violation {
    /// The row pair involved, for pairwise violations.
    pub fn row_pair(&self) -> Option<(usize, usize)> {
        match *self {
            Violation::RowsAgree { rows, .. }
            | Violation::NotOrthogonal { rows, .. }
            | Violation::PairProduct { rows, .. }
            | Violation::RepeatedStep { rows, .. }
            | Violation::HammingDistance { rows, .. } => Some(rows),
            _ => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::EntryOutOfRange { row, col, value } => {
                write!(f, "entry ({row}, {col}) = {value} is out of range")
            }
            Violation::NotPermutation { row, col, symbol } => {
                write!(f, "row {row} repeats symbol {symbol} at column {col}")
            }
            Violation::RowsAgree { rows: (i, j), cols: (a, b) } => {
                write!(f, "rows {i} and {j} agree in columns {a} and {b}")
            }
            Violation::NotSymmetric { row, col } => {
                write!(f, "entries ({row}, {col}) and ({col}, {row}) differ")
            }
            Violation::NotSkew { row, col } => {
                write!(f, "entry ({col}, {row}) is not the negation of ({row}, {col})")
            }
            Violation::RowWeight { row, expected, actual } => {
                write!(f, "row {row} has weight {actual}, expected {expected}")
            }
            Violation::NotOrthogonal { rows: (i, j), dot } => {
                write!(f, "rows {i} and {j} have inner product {dot}")
            }
            Violation::RowMultiplicity { row, ones, twos, expected_ones, expected_twos } => write!(
                f,
                "row {row} has {ones} ones and {twos} twos, expected {expected_ones} and {expected_twos}"
            ),
            Violation::ColumnSum { col, expected, actual } => {
                write!(f, "column {col} sums to {actual}, expected {expected}")
            }
            Violation::PairProduct { rows: (i, j), expected, actual } => {
                write!(f, "rows {i} and {j} have product sum {actual}, expected {expected}")
            }
            Violation::RepeatedStep { rows: (i, j), first, second, step } => write!(
                f,
                "rows {i} and {j} both place {second} {step} steps right of {first}"
            ),
            Violation::HammingDistance { rows: (i, j), expected, actual } => {
                write!(f, "rows {i} and {j} are at distance {actual}, expected {expected}")
            }
        }
    }
}

/// Verdict of a verifier. `valid` holds exactly when `violation` is `None`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
    /// Number of row pairs violating the pairwise constraint, filled in
    /// when the first violation is pairwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violated_pairs: Option<usize>,
}

impl VerificationReport {
    pub fn valid() -> Self {
        Self {
            valid: true,
            violation: None,
            violated_pairs: None,
        }
    }

    pub fn invalid(violation: Violation) -> Self {
        Self {
            valid: false,
            violation: Some(violation),
            violated_pairs: None,
        }
    }

    fn pairwise(first: Option<Violation>, count: usize) -> Self {
        match first {
            None => Self::valid(),
            Some(v) => Self {
                valid: false,
                violation: Some(v),
                violated_pairs: Some(count),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeighingKind {
    Symmetric,
    Skew,
}

/// Dispatches to the family verifier.
pub fn verify(spec: &InstanceSpec, m: &DesignMatrix) -> Result<VerificationReport, DesignError> {
    match spec {
        InstanceSpec::Pa(p) => verify_pa(p, m),
        InstanceSpec::SymmW(p) => verify_weighing(p, WeighingKind::Symmetric, m),
        InstanceSpec::SkewW(p) => verify_weighing(p, WeighingKind::Skew, m),
        InstanceSpec::Btd(p) => verify_btd(p, m),
        InstanceSpec::Fr(p) => verify_fr(p, m),
        InstanceSpec::Epa(p) => verify_epa(p, m),
    }
}

fn check_range(m: &DesignMatrix, allowed: impl Fn(i32) -> bool) -> Option<Violation> {
    for r in 0..m.rows() {
        for (c, &value) in m.row(r).iter().enumerate() {
            if !allowed(value) {
                return Some(Violation::EntryOutOfRange { row: r, col: c, value });
            }
        }
    }
    None
}

/// Rows are already known to hold values in `0..n`.
fn check_permutations(m: &DesignMatrix) -> Option<Violation> {
    let n = m.cols();
    let mut seen = vec![usize::MAX; n];
    for r in 0..m.rows() {
        for (c, &value) in m.row(r).iter().enumerate() {
            let slot = &mut seen[value as usize];
            if *slot == r {
                return Some(Violation::NotPermutation { row: r, col: c, symbol: value });
            }
            *slot = r;
        }
    }
    None
}

/// Packing array check.
///
/// The definition asks that every pair of columns contain each ordered pair
/// of symbols at most once. Columns `c1, c2` repeat an ordered pair exactly
/// when two distinct rows hold the same symbol in `c1` and the same symbol
/// in `c2`, i.e. when those rows agree in both columns. So the condition is
/// equivalent to: any two distinct rows agree in at most one column.
pub fn verify_pa(p: &PaParams, m: &DesignMatrix) -> Result<VerificationReport, DesignError> {
    m.check_shape(p.rows, p.cols)?;
    let v = p.symbols as i32;
    if let Some(bad) = check_range(m, |x| (0..v).contains(&x)) {
        return Ok(VerificationReport::invalid(bad));
    }
    let mut first = None;
    let mut count = 0;
    for i in 0..m.rows() {
        for j in i + 1..m.rows() {
            let mut agree = m
                .row(i)
                .iter()
                .zip(m.row(j))
                .enumerate()
                .filter(|(_, (a, b))| a == b)
                .map(|(c, _)| c);
            if let (Some(c1), Some(c2)) = (agree.next(), agree.next()) {
                count += 1;
                first.get_or_insert(Violation::RowsAgree {
                    rows: (i, j),
                    cols: (c1, c2),
                });
            }
        }
    }
    Ok(VerificationReport::pairwise(first, count))
}

/// Weighing matrix check: `W Wᵀ = wI` plus symmetry or skewness.
///
/// Only row weights and row orthogonality are checked. Column weights and
/// column orthogonality follow: `W Wᵀ = wI` makes `W/√w` orthogonal when
/// `w > 0`, hence `Wᵀ W = wI` too.
pub fn verify_weighing(
    p: &WeighingParams,
    kind: WeighingKind,
    m: &DesignMatrix,
) -> Result<VerificationReport, DesignError> {
    m.check_shape(p.order, p.order)?;
    if let Some(bad) = check_range(m, |x| (-1..=1).contains(&x)) {
        return Ok(VerificationReport::invalid(bad));
    }
    let n = p.order;
    for i in 0..n {
        for j in i..n {
            let (a, b) = (m.get(i, j), m.get(j, i));
            match kind {
                WeighingKind::Symmetric if a != b => {
                    return Ok(VerificationReport::invalid(Violation::NotSymmetric {
                        row: i,
                        col: j,
                    }))
                }
                WeighingKind::Skew if a != -b => {
                    return Ok(VerificationReport::invalid(Violation::NotSkew { row: i, col: j }))
                }
                _ => {}
            }
        }
    }
    let w = p.weight as i64;
    for i in 0..n {
        let actual: i64 = m.row(i).iter().map(|&x| (x * x) as i64).sum();
        if actual != w {
            return Ok(VerificationReport::invalid(Violation::RowWeight {
                row: i,
                expected: w,
                actual,
            }));
        }
    }
    let mut first = None;
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            let dot: i64 = m
                .row(i)
                .iter()
                .zip(m.row(j))
                .map(|(&a, &b)| (a * b) as i64)
                .sum();
            if dot != 0 {
                count += 1;
                first.get_or_insert(Violation::NotOrthogonal { rows: (i, j), dot });
            }
        }
    }
    Ok(VerificationReport::pairwise(first, count))
}

/// Balanced ternary design check on the V×B incidence matrix.
pub fn verify_btd(p: &BtdParams, m: &DesignMatrix) -> Result<VerificationReport, DesignError> {
    m.check_shape(p.elements, p.blocks)?;
    if let Some(bad) = check_range(m, |x| (0..=2).contains(&x)) {
        return Ok(VerificationReport::invalid(bad));
    }
    for r in 0..m.rows() {
        let ones = m.row(r).iter().filter(|&&x| x == 1).count();
        let twos = m.row(r).iter().filter(|&&x| x == 2).count();
        if ones != p.singles || twos != p.doubles {
            return Ok(VerificationReport::invalid(Violation::RowMultiplicity {
                row: r,
                ones,
                twos,
                expected_ones: p.singles,
                expected_twos: p.doubles,
            }));
        }
    }
    let k = p.block_size as i64;
    for c in 0..m.cols() {
        let actual: i64 = (0..m.rows()).map(|r| m.get(r, c) as i64).sum();
        if actual != k {
            return Ok(VerificationReport::invalid(Violation::ColumnSum {
                col: c,
                expected: k,
                actual,
            }));
        }
    }
    let l = p.pair_index as i64;
    let mut first = None;
    let mut count = 0;
    for i in 0..m.rows() {
        for j in i + 1..m.rows() {
            let actual: i64 = m
                .row(i)
                .iter()
                .zip(m.row(j))
                .map(|(&a, &b)| (a * b) as i64)
                .sum();
            if actual != l {
                count += 1;
                first.get_or_insert(Violation::PairProduct {
                    rows: (i, j),
                    expected: l,
                    actual,
                });
            }
        }
    }
    Ok(VerificationReport::pairwise(first, count))
}

/// Florentine rectangle check. Steps are measured along the row without
/// wraparound: a row of length `n` holds `n - s` pairs at step `s`.
///
/// "At most one row holds `b` exactly `s` places right of `a`" is a
/// pairwise condition, so it is checked over row pairs: rows `i` and `j`
/// clash when some `(a, b, s)` occurs in both.
pub fn verify_fr(p: &FrParams, m: &DesignMatrix) -> Result<VerificationReport, DesignError> {
    m.check_shape(p.rows, p.symbols)?;
    let n = p.symbols as i32;
    if let Some(bad) = check_range(m, |x| (0..n).contains(&x)) {
        return Ok(VerificationReport::invalid(bad));
    }
    if let Some(bad) = check_permutations(m) {
        return Ok(VerificationReport::invalid(bad));
    }
    let positions: Vec<Vec<usize>> = m.iter_rows().map(inverse_permutation).collect();
    let mut first = None;
    let mut count = 0;
    for i in 0..m.rows() {
        for j in i + 1..m.rows() {
            if let Some(v) = first_shared_step(m.row(i), &positions[j], (i, j)) {
                count += 1;
                first.get_or_insert(v);
            }
        }
    }
    Ok(VerificationReport::pairwise(first, count))
}

fn inverse_permutation(row: &[i32]) -> Vec<usize> {
    let mut pos = vec![0; row.len()];
    for (idx, &s) in row.iter().enumerate() {
        pos[s as usize] = idx;
    }
    pos
}

fn first_shared_step(row: &[i32], other_pos: &[usize], rows: (usize, usize)) -> Option<Violation> {
    for p in 0..row.len() {
        for q in p + 1..row.len() {
            let (a, b) = (row[p], row[q]);
            let (pa, pb) = (other_pos[a as usize], other_pos[b as usize]);
            if pb > pa && pb - pa == q - p {
                return Some(Violation::RepeatedStep {
                    rows,
                    first: a,
                    second: b,
                    step: q - p,
                });
            }
        }
    }
    None
}

/// Equidistant permutation array check.
pub fn verify_epa(p: &EpaParams, m: &DesignMatrix) -> Result<VerificationReport, DesignError> {
    m.check_shape(p.rows, p.length)?;
    let n = p.length as i32;
    if let Some(bad) = check_range(m, |x| (0..n).contains(&x)) {
        return Ok(VerificationReport::invalid(bad));
    }
    if let Some(bad) = check_permutations(m) {
        return Ok(VerificationReport::invalid(bad));
    }
    let mut first = None;
    let mut count = 0;
    for i in 0..m.rows() {
        for j in i + 1..m.rows() {
            let actual = m.row(i).iter().zip(m.row(j)).filter(|(a, b)| a != b).count();
            if actual != p.distance {
                count += 1;
                first.get_or_insert(Violation::HammingDistance {
                    rows: (i, j),
                    expected: p.distance,
                    actual,
                });
            }
        }
    }
    Ok(VerificationReport::pairwise(first, count))
}
