//! Spectral radii of nonnegative matrices and Frobenius–Perron dimensions of
//! finite-rank ℤ₊-rings.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::ProductTable;

/// Square matrix in compressed sparse row form. Entries are stored sorted by
/// column within each row; explicit zeros are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in triplets {
            assert!(
                r < dim && c < dim,
                "entry ({r},{c}) outside a {dim}x{dim} matrix"
            );
            *rows[r].entry(c).or_insert(0.0) += v;
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix {
            dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Builds from dense rows. Panics if the rows are not square.
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix is not square");
        Self::from_triplets(
            dim,
            rows.iter()
                .enumerate()
                .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| (r, c, v))),
        )
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_triplets(dim, std::iter::empty())
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, 1.0)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.col_idx[range.clone()].binary_search(&col) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        let kernel = |(r, out): (usize, &mut f64)| {
            *out = self.row(r).map(|(c, v)| v * x[c]).sum();
        };
        if self.nnz() > 50_000 {
            y.par_iter_mut().enumerate().for_each(kernel);
        } else {
            y.iter_mut().enumerate().for_each(kernel);
        }
    }

    /// Whether every stored entry is finite and nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v.is_finite() && v >= 0.0)
    }

    /// Whether the digraph of nonzero entries is acyclic (self-loops count
    /// as cycles). Such a matrix is permutation-similar to a strictly
    /// triangular one and therefore nilpotent.
    pub fn has_acyclic_pattern(&self) -> bool {
        let mut indegree = vec![0usize; self.dim];
        for &c in &self.col_idx {
            indegree[c] += 1;
        }
        let mut queue: VecDeque<usize> = (0..self.dim).filter(|&v| indegree[v] == 0).collect();
        let mut removed = 0;
        while let Some(r) = queue.pop_front() {
            removed += 1;
            for (c, _) in self.row(r) {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        removed == self.dim
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralOptions {
    /// Convergence threshold on `‖Av − ρv‖∞ / max(1, ρ)` with `‖v‖∞ = 1`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

impl SpectralOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::param(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMethod {
    PowerIteration,
    ExactZeroByNilpotency,
}

impl SpectralMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectralMethod::PowerIteration => "power-iteration",
            SpectralMethod::ExactZeroByNilpotency => "exact-zero-by-nilpotency",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub radius: f64,
    pub iterations: usize,
    pub residual: f64,
    pub method: SpectralMethod,
}

/// Spectral radius of a nonnegative matrix.
///
/// Matrices with an acyclic nonzero pattern return exactly 0. Otherwise power
/// iteration runs on `A + I` from the all-ones vector with sup-norm
/// normalisation; the shift makes the Perron root strictly dominant even when
/// `A` has several eigenvalues of maximal modulus.
pub fn spectral_radius(m: &SparseMatrix, opts: &SpectralOptions) -> Result<SpectralEstimate> {
    opts.validate()?;
    if !m.is_nonnegative() {
        return Err(Error::param(
            "spectral_radius needs a finite nonnegative matrix",
        ));
    }
    if m.has_acyclic_pattern() {
        return Ok(SpectralEstimate {
            radius: 0.0,
            iterations: 0,
            residual: 0.0,
            method: SpectralMethod::ExactZeroByNilpotency,
        });
    }
    let dim = m.dim();
    let mut v = vec![1.0; dim];
    let mut av = vec![0.0; dim];
    let mut estimate = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        m.matvec(&v, &mut av);
        let shifted_norm = av.iter().zip(&v).map(|(a, b)| a + b).fold(0.0, f64::max);
        estimate = (shifted_norm - 1.0).max(0.0);
        residual = av
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - estimate * b).abs())
            .fold(0.0, f64::max);
        if residual <= opts.tol * estimate.max(1.0) {
            return Ok(SpectralEstimate {
                radius: estimate,
                iterations: it,
                residual,
                method: SpectralMethod::PowerIteration,
            });
        }
        for (x, a) in v.iter_mut().zip(&av) {
            *x = (*x + a) / shifted_norm;
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        last_estimate: estimate,
        residual,
        last_vector: v,
    })
}

/// A finite-rank ℤ₊-ring: labelled basis, a two-sided identity element, and
/// nonnegative integer structure constants `β_i β_j = Σ_r c^r_{ij} β_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZPlusRingTable {
    labels: Vec<String>,
    identity: usize,
    /// `constants[i * rank + j]` lists `(r, c^r_{ij})` with `c > 0`, sorted by `r`.
    constants: Vec<Vec<(usize, u64)>>,
}

impl ZPlusRingTable {
    /// `constants[i][j]` is the expansion of `β_i β_j`.
    pub fn new(
        labels: Vec<String>,
        identity: usize,
        constants: Vec<Vec<BTreeMap<usize, u64>>>,
    ) -> Result<Self> {
        let rank = labels.len();
        if identity >= rank {
            return Err(Error::param(format!(
                "identity index {identity} outside rank {rank}"
            )));
        }
        if constants.len() != rank || constants.iter().any(|row| row.len() != rank) {
            return Err(Error::param(format!(
                "structure constants are not {rank}x{rank}"
            )));
        }
        let mut flat = Vec::with_capacity(rank * rank);
        for row in constants {
            for expansion in row {
                if let Some((&r, _)) = expansion.iter().find(|(&r, _)| r >= rank) {
                    return Err(Error::param(format!("basis index {r} outside rank {rank}")));
                }
                flat.push(expansion.into_iter().filter(|&(_, c)| c > 0).collect());
            }
        }
        let ring = ZPlusRingTable {
            labels,
            identity,
            constants: flat,
        };
        ring.check_identity()?;
        Ok(ring)
    }

    /// The ring `QH*(Gr(k, n))|_{q=1}` (or the truncated cup-product ring),
    /// with partitions as labels.
    pub fn from_product_table(table: &ProductTable) -> Result<Self> {
        let ctx = table.ctx();
        let rank = ctx.rank();
        let mut constants = vec![Vec::new(); rank * rank];
        for i in 0..rank {
            for j in 0..rank {
                let mut row = Vec::new();
                for (nu, c) in table.get(i, j).at_q_one() {
                    row.push((ctx.position(&nu)?, c));
                }
                row.sort_unstable();
                constants[i * rank + j] = row;
            }
        }
        let labels = ctx.basis().iter().map(|p| p.to_string()).collect();
        let identity = ctx.position(&crate::partition::Partition::empty())?;
        let ring = ZPlusRingTable {
            labels,
            identity,
            constants,
        };
        ring.check_identity()?;
        Ok(ring)
    }

    fn check_identity(&self) -> Result<()> {
        let e = self.identity;
        for j in 0..self.rank() {
            let expect = [(j, 1)];
            if self.product(e, j) != expect || self.product(j, e) != expect {
                return Err(Error::InvariantViolation(format!(
                    "{} is not a two-sided identity (fails on {})",
                    self.labels[e], self.labels[j]
                )));
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    /// `(r, c^r_{ij})` pairs of `β_i β_j`.
    pub fn product(&self, i: usize, j: usize) -> &[(usize, u64)] {
        &self.constants[i * self.rank() + j]
    }

    pub fn constant(&self, i: usize, j: usize, r: usize) -> u64 {
        self.product(i, j)
            .iter()
            .find(|&&(s, _)| s == r)
            .map_or(0, |&(_, c)| c)
    }

    /// Matrix of `β ↦ β_i β`; column `j` is the expansion of `β_i β_j`.
    pub fn left_multiplication(&self, i: usize) -> SparseMatrix {
        SparseMatrix::from_triplets(
            self.rank(),
            (0..self.rank()).flat_map(|j| {
                self.product(i, j)
                    .iter()
                    .map(move |&(r, c)| (r, j, c as f64))
            }),
        )
    }

    /// Copy with `c^r_{ij}` raised by one (and `c^r_{ji}`, to keep the
    /// table commutative). The identity axiom is not rechecked, so this can
    /// produce an invalid ring on purpose.
    pub fn with_bumped_constant(&self, i: usize, j: usize, r: usize) -> Self {
        let mut out = self.clone();
        let rank = self.rank();
        let mut slots = vec![i * rank + j];
        if i != j {
            slots.push(j * rank + i);
        }
        for slot in slots {
            let row = &mut out.constants[slot];
            match row.iter_mut().find(|(s, _)| *s == r) {
                Some((_, c)) => *c += 1,
                None => {
                    row.push((r, 1));
                    row.sort_unstable();
                }
            }
        }
        out
    }
}

/// Frobenius–Perron dimensions of all basis elements of a ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub labels: Vec<String>,
    pub estimates: Vec<SpectralEstimate>,
}

impl SpectralReport {
    pub fn radius(&self, i: usize) -> f64 {
        self.estimates[i].radius
    }

    pub fn radii(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.radius).collect()
    }

    /// Linear extension `FPdim(Σ a_i β_i) = Σ a_i FPdim(β_i)`.
    pub fn fpdim(&self, combination: &[(usize, f64)]) -> f64 {
        combination.iter().map(|&(i, a)| a * self.radius(i)).sum()
    }
}

/// Spectral radius of every left-multiplication operator, in parallel.
/// The identity gets exactly 1.
pub fn fpdim_basis(ring: &ZPlusRingTable, opts: &SpectralOptions) -> Result<SpectralReport> {
    opts.validate()?;
    let estimates = (0..ring.rank())
        .into_par_iter()
        .map(|i| {
            if i == ring.identity_index() {
                return Ok(SpectralEstimate {
                    radius: 1.0,
                    iterations: 0,
                    residual: 0.0,
                    method: SpectralMethod::PowerIteration,
                });
            }
            spectral_radius(&ring.left_multiplication(i), opts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralReport {
        labels: ring.labels().to_vec(),
        estimates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomomorphismViolation {
    pub i: usize,
    pub j: usize,
    /// `FPdim(β_i β_j)` by linear extension.
    pub of_product: f64,
    /// `FPdim(β_i) FPdim(β_j)`.
    pub product_of: f64,
}

/// Pairs `(i, j)` where `FPdim(β_i β_j)` and `FPdim(β_i) FPdim(β_j)` differ
/// by more than `tol · max(|lhs|, |rhs|, 1)`.
pub fn check_ring_homomorphism(
    ring: &ZPlusRingTable,
    report: &SpectralReport,
    tol: f64,
) -> Vec<HomomorphismViolation> {
    let rank = ring.rank();
    (0..rank)
        .flat_map(|i| (0..rank).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let of_product: f64 = ring
                .product(i, j)
                .iter()
                .map(|&(r, c)| c as f64 * report.radius(r))
                .sum();
            let product_of = report.radius(i) * report.radius(j);
            let scale = of_product.abs().max(product_of.abs()).max(1.0);
            ((of_product - product_of).abs() > tol * scale).then_some(HomomorphismViolation {
                i,
                j,
                of_product,
                product_of,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::GrContext;
    use crate::quantum::{build_table, ProductMode};
    use proptest::prelude::*;

    fn radius(rows: &[Vec<f64>]) -> SpectralEstimate {
        spectral_radius(&SparseMatrix::from_dense(rows), &SpectralOptions::default()).unwrap()
    }

    #[test]
    fn zero_matrix_is_exactly_zero() {
        let e = radius(&[vec![0.0; 3], vec![0.0; 3], vec![0.0; 3]]);
        assert_eq!(e.radius, 0.0);
        assert_eq!(e.method, SpectralMethod::ExactZeroByNilpotency);
    }

    #[test]
    fn strictly_triangular_is_exactly_zero() {
        let e = radius(&[
            vec![0.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0],
            vec![1.0, 5.0, 0.0],
        ]);
        assert_eq!(e.radius, 0.0);
        assert_eq!(e.method, SpectralMethod::ExactZeroByNilpotency);
    }

    #[test]
    fn self_loop_is_not_nilpotent() {
        let e = radius(&[vec![0.0, 0.0], vec![1.0, 3.0]]);
        assert!((e.radius - 3.0).abs() < 1e-9);
    }

    #[test]
    fn swap_matrix_has_radius_one() {
        let e = radius(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!((e.radius - 1.0).abs() < 1e-12);
        assert_eq!(e.method, SpectralMethod::PowerIteration);
    }

    #[test]
    fn identity_has_radius_exactly_one() {
        let m = SparseMatrix::identity(5);
        assert_eq!(
            spectral_radius(&m, &SpectralOptions::default())
                .unwrap()
                .radius,
            1.0
        );
    }

    #[test]
    fn cyclic_permutation() {
        let mut rows = vec![vec![0.0; 5]; 5];
        for i in 0..5 {
            rows[(i + 1) % 5][i] = 1.0;
        }
        assert!((radius(&rows).radius - 1.0).abs() < 1e-9);
    }

    #[test]
    fn known_eigenvalue() {
        // [[2,1],[1,2]] has eigenvalues 3 and 1.
        let e = radius(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((e.radius - 3.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_negative_entries_and_bad_options() {
        let m = SparseMatrix::from_dense(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
        assert!(spectral_radius(&m, &SpectralOptions::default()).is_err());
        let bad = SpectralOptions {
            tol: 0.0,
            max_iter: 10,
        };
        assert!(spectral_radius(&SparseMatrix::identity(2), &bad).is_err());
    }

    #[test]
    fn non_convergence_carries_last_iterate() {
        let m = SparseMatrix::from_dense(&[vec![1.0, 1.0], vec![0.5, 2.0]]);
        let opts = SpectralOptions {
            tol: 1e-14,
            max_iter: 2,
        };
        match spectral_radius(&m, &opts) {
            Err(Error::NonConvergence {
                iterations,
                last_vector,
                ..
            }) => {
                assert_eq!(iterations, 2);
                assert_eq!(last_vector.len(), 2);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn sparse_accessors() {
        let m = SparseMatrix::from_triplets(3, [(0, 1, 2.0), (0, 1, 1.0), (2, 0, 0.0)]);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(2, 0), 0.0);
        assert_eq!(m.nnz(), 1);
        let mut y = vec![0.0; 3];
        m.matvec(&[1.0, 2.0, 3.0], &mut y);
        assert_eq!(y, vec![6.0, 0.0, 0.0]);
    }

    fn ring(k: usize, n: usize, mode: ProductMode) -> ZPlusRingTable {
        let ctx = GrContext::new(k, n).unwrap();
        ZPlusRingTable::from_product_table(&build_table(&ctx, mode).unwrap()).unwrap()
    }

    #[test]
    fn gr23_divisor_radius_is_one() {
        let r = ring(2, 3, ProductMode::Quantum);
        let i = r.index_of("1").unwrap();
        let e = spectral_radius(&r.left_multiplication(i), &SpectralOptions::default()).unwrap();
        assert!((e.radius - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gr24_quantum_fpdims() {
        let r = ring(2, 4, ProductMode::Quantum);
        let report = fpdim_basis(&r, &SpectralOptions::default()).unwrap();
        assert_eq!(report.radius(r.identity_index()), 1.0);
        let s2 = std::f64::consts::SQRT_2;
        for (label, expect) in [
            ("1", s2),
            ("2", 1.0),
            ("1,1", 1.0),
            ("2,1", s2),
            ("2,2", 1.0),
        ] {
            let got = report.radius(r.index_of(label).unwrap());
            assert!((got - expect).abs() < 1e-8, "{label}: {got}");
        }
        assert!(check_ring_homomorphism(&r, &report, 1e-6).is_empty());
    }

    #[test]
    fn classical_ring_fpdims_are_indicator_of_identity() {
        let r = ring(2, 4, ProductMode::ClassicalTruncated);
        let report = fpdim_basis(&r, &SpectralOptions::default()).unwrap();
        for i in 0..r.rank() {
            let expect = if i == r.identity_index() { 1.0 } else { 0.0 };
            assert_eq!(report.radius(i), expect);
        }
        assert!(check_ring_homomorphism(&r, &report, 1e-6).is_empty());
    }

    #[test]
    fn corrupted_table_breaks_homomorphism() {
        let r = ring(2, 4, ProductMode::Quantum);
        let one = r.index_of("1").unwrap();
        let bad = r.with_bumped_constant(one, one, r.index_of("2").unwrap());
        let report = fpdim_basis(&bad, &SpectralOptions::default()).unwrap();
        assert!(!check_ring_homomorphism(&bad, &report, 1e-6).is_empty());
    }

    #[test]
    fn ring_constructor_validates_identity() {
        let labels = vec!["e".to_string(), "x".to_string()];
        let unit = |r: usize| BTreeMap::from([(r, 1u64)]);
        let good = vec![vec![unit(0), unit(1)], vec![unit(1), unit(0)]];
        let r = ZPlusRingTable::new(labels.clone(), 0, good).unwrap();
        assert_eq!(r.constant(1, 1, 0), 1);
        let bad = vec![vec![unit(0), unit(0)], vec![unit(1), unit(0)]];
        assert!(ZPlusRingTable::new(labels, 0, bad).is_err());
    }

    #[test]
    fn linear_extension() {
        let r = ring(2, 4, ProductMode::Quantum);
        let report = fpdim_basis(&r, &SpectralOptions::default()).unwrap();
        let one = r.index_of("1").unwrap();
        let value = report.fpdim(&[(r.identity_index(), 3.0), (one, -2.0)]);
        assert!((value - (3.0 - 2.0 * std::f64::consts::SQRT_2)).abs() < 1e-8);
    }

    fn matrix_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        let cells = 64;
        (
            proptest::collection::vec(0.0f64..4.0, cells),
            proptest::collection::vec(0.0f64..2.0, cells),
            proptest::collection::vec(proptest::bool::weighted(0.6), cells),
        )
            .prop_map(|(a, extra, keep)| {
                let a: Vec<f64> = a
                    .iter()
                    .zip(&keep)
                    .map(|(&v, &k)| if k { v } else { 0.0 })
                    .collect();
                let b = a.iter().zip(&extra).map(|(x, e)| x + e).collect();
                (a, b)
            })
    }

    fn to_rows(flat: &[f64]) -> Vec<Vec<f64>> {
        flat.chunks(8).map(<[f64]>::to_vec).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn monotone_under_domination((a, b) in matrix_strategy()) {
            let opts = SpectralOptions { tol: 1e-9, max_iter: 200_000 };
            let ra = spectral_radius(&SparseMatrix::from_dense(&to_rows(&a)), &opts).unwrap();
            let rb = spectral_radius(&SparseMatrix::from_dense(&to_rows(&b)), &opts).unwrap();
            prop_assert!(ra.radius <= rb.radius + 1e-7, "{} > {}", ra.radius, rb.radius);
        }
    }
}
