//! Partitions, the Schubert basis `P_k(n)` of a Grassmannian, hooks and the
//! hook-length dimension of polynomial `U(k)` representations.
//!
//! Partitions are stored with trailing zeros trimmed, so `(2,1)` and
//! `(2,1,0)` are the same value (and the same hash key). Padding back to `k`
//! parts happens on demand.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition, rejecting sequences that are not weakly decreasing.
    pub fn new(parts: impl Into<Vec<usize>>) -> Result<Self> {
        let parts = parts.into();
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::param(format!(
                "parts {parts:?} are not weakly decreasing"
            )));
        }
        Ok(Self::from_decreasing(parts))
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// Caller guarantees `parts` is weakly decreasing.
    pub(crate) fn from_decreasing(mut parts: Vec<usize>) -> Self {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Partition { parts }
    }

    /// Nonzero parts, largest first.
    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// The `i`-th part (0-based); zero past the end.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// Number of nonzero parts.
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Largest part, `λ_1`.
    pub fn first(&self) -> usize {
        self.part(0)
    }

    pub fn padded(&self, k: usize) -> Vec<usize> {
        (0..k.max(self.length())).map(|i| self.part(i)).collect()
    }

    pub fn transpose(&self) -> Partition {
        let cols = self.first();
        let parts = (1..=cols)
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count())
            .collect();
        Partition { parts }
    }

    /// Diagram containment `other ⊆ self`.
    pub fn contains(&self, other: &Partition) -> bool {
        other.length() <= self.length() && other.parts.iter().zip(&self.parts).all(|(a, b)| a <= b)
    }

    pub fn fits_box(&self, rows: usize, cols: usize) -> bool {
        self.length() <= rows && self.first() <= cols
    }

    /// `λ_1 = ⋯ = λ_k` once padded to `k` parts. The empty partition counts.
    pub fn is_rectangular(&self, k: usize) -> bool {
        self.length() <= k
            && self.parts.iter().all(|&p| p == self.first())
            && (self.length() == k || self.is_empty())
    }
}

/// Degree-graded order: weight ascending, then parts lexicographically
/// descending. In this order classical cup products strictly move forward.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| other.parts.cmp(&self.parts))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(s);
        if s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::param(format!("bad partition part {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl TryFrom<&[usize]> for Partition {
    type Error = Error;

    fn try_from(parts: &[usize]) -> Result<Self> {
        Partition::new(parts.to_vec())
    }
}

pub fn transpose(lambda: &Partition) -> Partition {
    lambda.transpose()
}

/// Binomial coefficient, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    u64::try_from(acc).ok()
}

/// All partitions fitting in a `rows × cols` box, in graded order.
pub fn partitions_in_box(rows: usize, cols: usize) -> Vec<Partition> {
    fn fill(rows: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if cur.len() == rows {
            out.push(Partition::from_decreasing(cur.clone()));
            return;
        }
        for p in 0..=max {
            cur.push(p);
            fill(rows, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    fill(rows, cols, &mut Vec::with_capacity(rows), &mut out);
    out.sort();
    out
}

/// All partitions of `weight` with at most `max_rows` parts, each at most
/// `max_part`, in graded order.
pub fn partitions_of_weight(weight: usize, max_rows: usize, max_part: usize) -> Vec<Partition> {
    fn fill(left: usize, rows: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if left == 0 {
            out.push(Partition::from_decreasing(cur.clone()));
            return;
        }
        if rows == 0 || max * rows < left {
            return;
        }
        for p in (1..=max.min(left)).rev() {
            cur.push(p);
            fill(left - p, rows - 1, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    fill(weight, max_rows, max_part, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Enumerates `P_k(n)`, the partitions in the `k × (n−k)` box, in graded order.
pub fn enumerate_basis(k: usize, n: usize) -> Result<Vec<Partition>> {
    check_grassmannian(k, n)?;
    Ok(partitions_in_box(k, n - k))
}

/// Largest basis `GrContext::new` will enumerate.
pub const MAX_RANK: u64 = 5_000_000;

pub fn check_grassmannian(k: usize, n: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::param(format!(
            "Gr(k, n) needs 1 <= k < n, got k = {k}, n = {n}"
        )));
    }
    Ok(())
}

/// Checks `λ ∈ P_k(n)` without enumerating the basis.
pub fn check_in_box(lambda: &Partition, k: usize, n: usize) -> Result<()> {
    check_grassmannian(k, n)?;
    if !lambda.fits_box(k, n - k) {
        return Err(Error::param(format!(
            "partition {lambda} is not in P_{k}({n}) (box {k} x {})",
            n - k
        )));
    }
    Ok(())
}

/// The Grassmannian `Gr(k, n)` together with its ordered Schubert basis.
#[derive(Debug, Clone)]
pub struct GrContext {
    k: usize,
    n: usize,
    basis: Vec<Partition>,
    index: HashMap<Partition, usize>,
}

impl GrContext {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        check_grassmannian(k, n)?;
        match binomial(n as u64, k as u64) {
            Some(rank) if rank <= MAX_RANK => {}
            _ => {
                return Err(Error::param(format!(
                    "Gr({k},{n}) has more than {MAX_RANK} Schubert classes"
                )))
            }
        }
        let basis = enumerate_basis(k, n)?;
        let index = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        Ok(GrContext { k, n, basis, index })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Width of the box, `n − k`.
    pub fn cols(&self) -> usize {
        self.n - self.k
    }

    /// Complex dimension `k(n − k)`, the top degree.
    pub fn dimension(&self) -> usize {
        self.k * self.cols()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Partition] {
        &self.basis
    }

    pub fn index_of(&self, lambda: &Partition) -> Option<usize> {
        self.index.get(lambda).copied()
    }

    pub fn contains(&self, lambda: &Partition) -> bool {
        lambda.fits_box(self.k, self.cols())
    }

    /// Basis position of `lambda`, or a parameter error naming the box.
    pub fn position(&self, lambda: &Partition) -> Result<usize> {
        self.index_of(lambda).ok_or_else(|| {
            Error::param(format!(
                "partition {lambda} is not in P_{}({}) (box {} x {})",
                self.k,
                self.n,
                self.k,
                self.cols()
            ))
        })
    }
}

/// `λ^∨ = (n−k−λ_k, …, n−k−λ_1)`.
pub fn complement(lambda: &Partition, ctx: &GrContext) -> Result<Partition> {
    ctx.position(lambda)?;
    let cols = ctx.cols();
    let parts = lambda
        .padded(ctx.k())
        .iter()
        .rev()
        .map(|&p| cols - p)
        .collect();
    Ok(Partition::from_decreasing(parts))
}

/// One box `(row, col)` of a Young diagram, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
    /// `k − i + j`
    pub content: usize,
    /// `λ_i + λᵗ_j − i − j + 1`
    pub hook: usize,
}

/// Cells of `λ` with contents and hooks, plus the paired sequences used by
/// the sine-product formula: for each cell, `a = k − i + λ_i − j + 1`
/// against `b = hook(i, j)`. The `a` values are the contents reflected
/// within each row, so they form the same multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HookData {
    pub k: usize,
    pub cells: Vec<Cell>,
    pub a_seq: Vec<usize>,
    pub b_seq: Vec<usize>,
}

pub fn hook_data(lambda: &Partition, k: usize) -> Result<HookData> {
    if lambda.length() > k {
        return Err(Error::param(format!(
            "partition {lambda} has more than k = {k} parts"
        )));
    }
    let lt = lambda.transpose();
    let mut cells = Vec::with_capacity(lambda.weight());
    let mut a_seq = Vec::with_capacity(lambda.weight());
    let mut b_seq = Vec::with_capacity(lambda.weight());
    for (i0, &li) in lambda.parts().iter().enumerate() {
        let i = i0 + 1;
        for j in 1..=li {
            let hook = li + lt.part(j - 1) + 1 - i - j;
            cells.push(Cell {
                row: i,
                col: j,
                content: k + j - i,
                hook,
            });
            a_seq.push(k + li + 1 - i - j);
            b_seq.push(hook);
        }
    }
    Ok(HookData {
        k,
        cells,
        a_seq,
        b_seq,
    })
}

/// `dim 𝕊_λ(ℂ^k) = ∏ (k − i + j) / ∏ hook(i, j)`, exactly.
pub fn hook_dimension(lambda: &Partition, k: usize) -> Result<BigUint> {
    let data = hook_data(lambda, k)?;
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for c in &data.cells {
        num *= c.content;
        den *= c.hook;
    }
    if (&num % &den) != BigUint::zero() {
        return Err(Error::InvariantViolation(format!(
            "hook product for {lambda} (k = {k}) is not an integer: {num} / {den}"
        )));
    }
    Ok(num / den)
}

pub fn hook_dimension_f64(lambda: &Partition, k: usize) -> Result<f64> {
    let d = hook_dimension(lambda, k)?;
    Ok(d.to_f64().unwrap_or(f64::INFINITY))
}
