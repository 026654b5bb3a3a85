//! Small quantum cohomology of `Gr(k, n)` in the Schubert basis.
//!
//! Products are computed with the rim-hook rule: expand `s_λ s_μ` in `k`
//! variables by Littlewood–Richardson, then push every shape that sticks
//! out of the `k × (n−k)` box back inside. On a `k`-bead abacus (bead
//! positions `ρ_i + k − i`) removing an `n`-rim hook is sliding one bead
//! down by `n`; a bead landing on an occupied position kills the term. Each
//! slide costs one power of `q` and a factor `(−1)^{k−1}` from
//! `x^n = (−1)^{k−1} q`, and re-sorting the beads contributes the sign of
//! the permutation. Net sign per hook: `(−1)^{k − height}`.
//!
//! The multiplication by the divisor class `σ_1` has a second, independent
//! implementation (quantum Pieri) used to certify the general code path.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lr::{cup_product, schur_product};
use crate::partition::{GrContext, Partition};
use crate::spectral::SparseMatrix;

/// Which product a table realises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProductMode {
    /// The quantum product `⋆`.
    Quantum,
    /// The cup product with everything outside the box discarded.
    ClassicalTruncated,
}

impl ProductMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ProductMode::Quantum => "quantum",
            ProductMode::ClassicalTruncated => "classical",
        }
    }
}

impl std::str::FromStr for ProductMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum" => Ok(ProductMode::Quantum),
            "classical" | "classical-truncated" => Ok(ProductMode::ClassicalTruncated),
            other => Err(Error::param(format!("unknown product mode {other:?}"))),
        }
    }
}

/// `Σ N^{ν,d}_{λμ} q^d σ_ν`, keyed by `(d, ν)` so iteration runs in
/// `(d, ν)` order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuantumExpansion {
    terms: BTreeMap<(usize, Partition), u64>,
}

impl QuantumExpansion {
    pub(crate) fn from_terms(terms: BTreeMap<(usize, Partition), u64>) -> Self {
        debug_assert!(terms.values().all(|&c| c > 0));
        QuantumExpansion { terms }
    }

    /// `(ν, d, N^{ν,d})` sorted by `(d, ν)`.
    pub fn terms(&self) -> impl Iterator<Item = (&Partition, usize, u64)> + '_ {
        self.terms.iter().map(|((d, nu), &c)| (nu, *d, c))
    }

    /// The underlying `(d, ν) → N` map.
    pub fn as_map(&self) -> &BTreeMap<(usize, Partition), u64> {
        &self.terms
    }

    pub fn coefficient(&self, nu: &Partition, d: usize) -> u64 {
        self.terms.get(&(d, nu.clone())).copied().unwrap_or(0)
    }

    /// The coefficient of `σ_ν` after setting `q = 1`.
    pub fn q_one_coefficient(&self, nu: &Partition) -> u64 {
        self.terms
            .iter()
            .filter(|((_, p), _)| p == nu)
            .map(|(_, &c)| c)
            .sum()
    }

    /// Everything summed over `d`, i.e. the product at `q = 1`.
    pub fn at_q_one(&self) -> BTreeMap<Partition, u64> {
        let mut out = BTreeMap::new();
        for ((_, nu), &c) in &self.terms {
            *out.entry(nu.clone()).or_insert(0) += c;
        }
        out
    }

    /// The `q^0` layer.
    pub fn classical_part(&self) -> BTreeMap<Partition, u64> {
        self.terms
            .iter()
            .filter(|((d, _), _)| *d == 0)
            .map(|((_, nu), &c)| (nu.clone(), c))
            .collect()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|(d, _)| *d).max()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Pushes a shape with at most `k` rows into the `k × (n−k)` box.
/// Returns `(ν, d, sign)`, or `None` when two beads collide.
fn reduce_rim_hooks(rho: &Partition, k: usize, n: usize) -> Option<(Partition, usize, i64)> {
    debug_assert!(rho.length() <= k);
    let mut beads: Vec<usize> = (0..k).map(|i| rho.part(i) + k - 1 - i).collect();
    let mut d = 0;
    for b in beads.iter_mut() {
        d += *b / n;
        *b %= n;
    }
    let mut inversions = 0;
    for i in 0..k {
        for j in i + 1..k {
            match beads[i].cmp(&beads[j]) {
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Less => inversions += 1,
                std::cmp::Ordering::Greater => {}
            }
        }
    }
    let odd = ((k - 1) * d + inversions) % 2 == 1;
    beads.sort_unstable_by(|a, b| b.cmp(a));
    let parts = beads
        .iter()
        .enumerate()
        .map(|(i, &b)| b - (k - 1 - i))
        .collect();
    Some((
        Partition::from_decreasing(parts),
        d,
        if odd { -1 } else { 1 },
    ))
}

/// `σ_λ ⋆ σ_μ` in `QH*(Gr(k, n))`.
pub fn quantum_product(
    lambda: &Partition,
    mu: &Partition,
    ctx: &GrContext,
) -> Result<QuantumExpansion> {
    ctx.position(lambda)?;
    ctx.position(mu)?;
    let (k, n) = (ctx.k(), ctx.n());
    let mut signed: BTreeMap<(usize, Partition), i64> = BTreeMap::new();
    for (rho, c) in schur_product(lambda, mu, k, usize::MAX) {
        let Some((nu, d, sign)) = reduce_rim_hooks(&rho, k, n) else {
            continue;
        };
        let c = i64::try_from(c)
            .ok()
            .and_then(|c| c.checked_mul(sign))
            .ok_or_else(|| Error::Overflow(format!("reducing {lambda} * {mu}")))?;
        let slot = signed.entry((d, nu)).or_insert(0);
        *slot = slot
            .checked_add(c)
            .ok_or_else(|| Error::Overflow(format!("summing {lambda} * {mu}")))?;
    }
    let mut terms = BTreeMap::new();
    for ((d, nu), c) in signed {
        if c < 0 {
            return Err(Error::InvariantViolation(format!(
                "negative structure constant {c} for q^{d} {nu} in {lambda} * {mu} on Gr({k},{n})"
            )));
        }
        if c > 0 {
            terms.insert((d, nu), c as u64);
        }
    }
    Ok(QuantumExpansion { terms })
}

/// `σ_1 ⋆ σ_μ` by quantum Pieri: every way of adding one box inside the
/// box, plus `q σ_{(μ_2−1, …, μ_k−1)}` when `μ` has a full first row and
/// `k` nonzero rows (the augmented shape then loses one `n`-rim hook).
pub fn divisor_product_pieri(mu: &Partition, ctx: &GrContext) -> Result<QuantumExpansion> {
    ctx.position(mu)?;
    let (k, cols) = (ctx.k(), ctx.cols());
    let parts = mu.padded(k);
    let mut terms = BTreeMap::new();
    for i in 0..k {
        let fits = parts[i] < cols && (i == 0 || parts[i - 1] > parts[i]);
        if fits {
            let mut grown = parts.clone();
            grown[i] += 1;
            terms.insert((0, Partition::from_decreasing(grown)), 1);
        }
    }
    if parts[0] == cols && parts[k - 1] >= 1 {
        let shrunk = parts[1..].iter().map(|&p| p - 1).collect();
        terms.insert((1, Partition::from_decreasing(shrunk)), 1);
    }
    Ok(QuantumExpansion { terms })
}

/// The product in the requested mode; the classical mode returns only
/// `d = 0` terms.
pub fn product_in_mode(
    lambda: &Partition,
    mu: &Partition,
    ctx: &GrContext,
    mode: ProductMode,
) -> Result<QuantumExpansion> {
    match mode {
        ProductMode::Quantum => quantum_product(lambda, mu, ctx),
        ProductMode::ClassicalTruncated => {
            let cup = cup_product(lambda, mu, ctx)?;
            Ok(QuantumExpansion {
                terms: cup.terms.into_iter().map(|(nu, c)| ((0, nu), c)).collect(),
            })
        }
    }
}

/// All products of basis classes for one Grassmannian, immutable once built.
/// Only the upper triangle `i ≤ j` is stored; the product is commutative.
#[derive(Debug, Clone)]
pub struct ProductTable {
    ctx: Arc<GrContext>,
    mode: ProductMode,
    entries: Vec<QuantumExpansion>,
}

impl ProductTable {
    pub(crate) fn from_entries(
        ctx: Arc<GrContext>,
        mode: ProductMode,
        entries: Vec<QuantumExpansion>,
    ) -> Result<Self> {
        let n = ctx.rank();
        if entries.len() != n * (n + 1) / 2 {
            return Err(Error::InvariantViolation(format!(
                "table for Gr({},{}) has {} entries, expected {}",
                ctx.k(),
                ctx.n(),
                entries.len(),
                n * (n + 1) / 2
            )));
        }
        Ok(ProductTable { ctx, mode, entries })
    }

    pub fn ctx(&self) -> &GrContext {
        &self.ctx
    }

    pub fn shared_ctx(&self) -> Arc<GrContext> {
        Arc::clone(&self.ctx)
    }

    pub fn mode(&self) -> ProductMode {
        self.mode
    }

    pub fn rank(&self) -> usize {
        self.ctx.rank()
    }

    /// Product of basis elements `i` and `j`.
    pub fn get(&self, i: usize, j: usize) -> &QuantumExpansion {
        &self.entries[pair_slot(i, j, self.rank())]
    }

    pub fn product(&self, lambda: &Partition, mu: &Partition) -> Result<&QuantumExpansion> {
        let i = self.ctx.position(lambda)?;
        let j = self.ctx.position(mu)?;
        Ok(self.get(i, j))
    }

    /// Number of nonzero `N^{ν,d}_{λμ}` over unordered pairs.
    pub fn nonzero_constants(&self) -> usize {
        self.entries.iter().map(QuantumExpansion::len).sum()
    }

    /// Multiplies a `q`-graded combination of basis classes by basis class
    /// `j`, keeping track of `q` degrees.
    pub fn multiply_combination(
        &self,
        lhs: &BTreeMap<(usize, Partition), u64>,
        j: usize,
    ) -> Result<BTreeMap<(usize, Partition), u64>> {
        let mut out: BTreeMap<(usize, Partition), u64> = BTreeMap::new();
        for ((d1, rho), &c) in lhs {
            let i = self.ctx.position(rho)?;
            for (nu, d2, c2) in self.get(i, j).terms() {
                let add = c
                    .checked_mul(c2)
                    .ok_or_else(|| Error::Overflow("multiplying combinations".into()))?;
                let slot = out.entry((d1 + d2, nu.clone())).or_insert(0);
                *slot = slot
                    .checked_add(add)
                    .ok_or_else(|| Error::Overflow("multiplying combinations".into()))?;
            }
        }
        Ok(out)
    }
}

/// Position of the unordered pair `{i, j}` in row-major upper-triangular
/// storage of an `n × n` symmetric table.
fn pair_slot(i: usize, j: usize, n: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

/// Computes every product `σ_i σ_j` with `i ≤ j`, in parallel over pairs.
/// The result does not depend on the thread count.
pub fn build_table(ctx: &GrContext, mode: ProductMode) -> Result<ProductTable> {
    let ctx = Arc::new(ctx.clone());
    build_table_shared(ctx, mode)
}

pub fn build_table_shared(ctx: Arc<GrContext>, mode: ProductMode) -> Result<ProductTable> {
    let n = ctx.rank();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let basis = ctx.basis();
    let entries = pairs
        .par_iter()
        .map(|&(i, j)| product_in_mode(&basis[i], &basis[j], &ctx, mode))
        .collect::<Result<Vec<_>>>()?;
    ProductTable::from_entries(ctx, mode, entries)
}

/// Dense matrix of `β ↦ σ_λ ⋆ β |_{q=1}` in the table's basis; column `c`
/// is the image of basis element `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicationMatrix {
    pub lambda: Partition,
    pub mode: ProductMode,
    dim: usize,
    data: Vec<u64>,
}

impl MultiplicationMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> u64 {
        self.data[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.data.chunks(self.dim)
    }

    pub fn column_sums(&self) -> Vec<u64> {
        (0..self.dim)
            .map(|c| (0..self.dim).map(|r| self.entry(r, c)).sum())
            .collect()
    }

    pub fn is_strictly_lower_triangular(&self) -> bool {
        (0..self.dim).all(|r| (r..self.dim).all(|c| self.entry(r, c) == 0))
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        let triplets = (0..self.dim)
            .flat_map(|r| (0..self.dim).map(move |c| (r, c)))
            .filter_map(|(r, c)| {
                let v = self.entry(r, c);
                (v > 0).then_some((r, c, v as f64))
            });
        SparseMatrix::from_triplets(self.dim, triplets)
    }
}

pub fn multiplication_matrix(
    lambda: &Partition,
    table: &ProductTable,
) -> Result<MultiplicationMatrix> {
    let i = table.ctx().position(lambda)?;
    let dim = table.rank();
    let mut data = vec![0u64; dim * dim];
    for c in 0..dim {
        for (nu, _, coeff) in table.get(i, c).terms() {
            let r = table.ctx().position(nu)?;
            let slot = &mut data[r * dim + c];
            *slot = slot
                .checked_add(coeff)
                .ok_or_else(|| Error::Overflow(format!("summing q-degrees for {lambda}")))?;
        }
    }
    Ok(MultiplicationMatrix {
        lambda: lambda.clone(),
        mode: table.mode(),
        dim,
        data,
    })
}

/// The sparse operator of left multiplication by `σ_λ` at `q = 1`, built
/// column by column without materialising a full product table.
pub fn multiplication_operator(
    lambda: &Partition,
    ctx: &GrContext,
    mode: ProductMode,
) -> Result<SparseMatrix> {
    ctx.position(lambda)?;
    let columns = ctx
        .basis()
        .par_iter()
        .map(|beta| product_in_mode(lambda, beta, ctx, mode))
        .collect::<Result<Vec<_>>>()?;
    let mut triplets = Vec::new();
    for (c, expansion) in columns.iter().enumerate() {
        for (nu, coeff) in expansion.at_q_one() {
            triplets.push((ctx.position(&nu)?, c, coeff as f64));
        }
    }
    Ok(SparseMatrix::from_triplets(ctx.rank(), triplets))
}
