//! Littlewood–Richardson coefficients by direct enumeration of LR tableaux,
//! and the degree-truncated cup product on `H*(Gr(k, n))`.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use crate::error::Result;
use crate::partition::{GrContext, Partition};

/// A single coefficient request `c^ν_{λμ}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LrQuery {
    pub lambda: Partition,
    pub mu: Partition,
    pub nu: Partition,
}

impl LrQuery {
    pub fn new(lambda: Partition, mu: Partition, nu: Partition) -> Self {
        LrQuery { lambda, mu, nu }
    }

    pub fn coefficient(&self) -> u64 {
        lr_coefficient(&self.lambda, &self.mu, &self.nu)
    }
}

/// Number of LR tableaux of skew shape `ν/λ` and content `μ`: rows weakly
/// increasing, columns strictly increasing, and the reverse reading word a
/// lattice word. Degenerate inputs give 0.
pub fn lr_coefficient(lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
    if nu.weight() != lambda.weight() + mu.weight() || !nu.contains(lambda) || !nu.contains(mu) {
        return 0;
    }
    if mu.is_empty() {
        return 1;
    }
    let rows = nu.length();
    let lam: Vec<usize> = (0..rows).map(|i| lambda.part(i)).collect();
    let nu_parts = nu.parts().to_vec();
    // Cells in reverse reading order: top row first, right to left.
    let cells: Vec<(usize, usize)> = (0..rows)
        .flat_map(|i| (lam[i]..nu_parts[i]).rev().map(move |j| (i, j)))
        .collect();
    let mut search = LrSearch {
        lam: &lam,
        nu: &nu_parts,
        content: mu.parts(),
        cells: &cells,
        grid: nu_parts.iter().map(|&w| vec![0u16; w]).collect(),
        used: vec![0; mu.length() + 1],
        count: 0,
    };
    search.place(0);
    search.count
}

struct LrSearch<'a> {
    lam: &'a [usize],
    nu: &'a [usize],
    content: &'a [usize],
    cells: &'a [(usize, usize)],
    grid: Vec<Vec<u16>>,
    used: Vec<usize>,
    count: u64,
}

impl LrSearch<'_> {
    fn place(&mut self, pos: usize) {
        let Some(&(i, j)) = self.cells.get(pos) else {
            self.count += 1;
            return;
        };
        let mut hi = self.content.len();
        if j + 1 < self.nu[i] {
            hi = hi.min(self.grid[i][j + 1] as usize);
        }
        let lo = if i > 0 && j >= self.lam[i - 1] {
            self.grid[i - 1][j] as usize + 1
        } else {
            1
        };
        for v in lo..=hi {
            if self.used[v] == self.content[v - 1] {
                continue;
            }
            // Lattice condition on the reading word read so far.
            if v > 1 && self.used[v] + 1 > self.used[v - 1] {
                continue;
            }
            self.used[v] += 1;
            self.grid[i][j] = v as u16;
            self.place(pos + 1);
            self.used[v] -= 1;
        }
        self.grid[i][j] = 0;
    }
}

/// Thread-safe memo for repeated coefficient queries.
#[derive(Debug, Default)]
pub struct LrCache {
    map: RwLock<HashMap<LrQuery, u64>>,
}

impl LrCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn coefficient(&self, lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
        let key = LrQuery::new(lambda.clone(), mu.clone(), nu.clone());
        if let Some(&c) = self.map.read().expect("lr cache poisoned").get(&key) {
            return c;
        }
        let c = key.coefficient();
        self.map.write().expect("lr cache poisoned").insert(key, c);
        c
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("lr cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Partitions `ν ⊇ λ ∪ μ` of weight `|λ| + |μ|` with at most `max_rows` rows
/// and `ν_1 ≤ min(max_cols, λ_1 + μ_1)`: every shape that can carry a
/// nonzero `c^ν_{λμ}` inside the given bounds.
fn candidate_shapes(
    lambda: &Partition,
    mu: &Partition,
    max_rows: usize,
    max_cols: usize,
) -> Vec<Partition> {
    let rows = max_rows.min(lambda.length() + mu.length());
    let cols = max_cols.min(lambda.first() + mu.first());
    let total = lambda.weight() + mu.weight();
    let mut out = Vec::new();
    if lambda.length() > rows || mu.length() > rows {
        return out;
    }
    // Row i of ν is at least max(λ_i, μ_i).
    let floor: Vec<usize> = (0..rows).map(|i| lambda.part(i).max(mu.part(i))).collect();
    fn fill(
        i: usize,
        left: usize,
        cap: usize,
        floor: &[usize],
        cur: &mut Vec<usize>,
        out: &mut Vec<Partition>,
    ) {
        let rows = floor.len();
        if i == rows {
            if left == 0 {
                out.push(Partition::from_decreasing(cur.clone()));
            }
            return;
        }
        if floor[i] > cap || cap * (rows - i) < left {
            return;
        }
        for p in floor[i]..=cap.min(left) {
            cur.push(p);
            fill(i + 1, left - p, p, floor, cur, out);
            cur.pop();
        }
    }
    fill(
        0,
        total,
        cols,
        &floor,
        &mut Vec::with_capacity(rows),
        &mut out,
    );
    out
}

/// `s_λ · s_μ` restricted to shapes with at most `max_rows` rows and at most
/// `max_cols` columns. With `max_rows = k` and unbounded columns this is the
/// product of Schur polynomials in `k` variables.
pub fn schur_product(
    lambda: &Partition,
    mu: &Partition,
    max_rows: usize,
    max_cols: usize,
) -> BTreeMap<Partition, u64> {
    candidate_shapes(lambda, mu, max_rows, max_cols)
        .into_iter()
        .filter_map(|nu| {
            let c = lr_coefficient(lambda, mu, &nu);
            (c > 0).then_some((nu, c))
        })
        .collect()
}

/// The image of a cup product in `H*(Gr(k, n))`: classes outside the
/// `k × (n−k)` box are dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CupExpansion {
    pub terms: BTreeMap<Partition, u64>,
}

impl CupExpansion {
    pub fn coefficient(&self, nu: &Partition) -> u64 {
        self.terms.get(nu).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

pub fn cup_product(lambda: &Partition, mu: &Partition, ctx: &GrContext) -> Result<CupExpansion> {
    ctx.position(lambda)?;
    ctx.position(mu)?;
    Ok(CupExpansion {
        terms: schur_product(lambda, mu, ctx.k(), ctx.cols()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{partitions_in_box, partitions_of_weight};

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn identity_coefficients() {
        for mu in partitions_in_box(3, 3) {
            for nu in partitions_in_box(3, 3) {
                let expect = u64::from(mu == nu);
                assert_eq!(lr_coefficient(&Partition::empty(), &mu, &nu), expect);
                assert_eq!(lr_coefficient(&mu, &Partition::empty(), &nu), expect);
            }
        }
    }

    #[test]
    fn one_box_times_one_box() {
        assert_eq!(lr_coefficient(&p(&[1]), &p(&[1]), &p(&[2])), 1);
        assert_eq!(lr_coefficient(&p(&[1]), &p(&[1]), &p(&[1, 1])), 1);
    }

    #[test]
    fn classic_multiplicity_two() {
        assert_eq!(lr_coefficient(&p(&[2, 1]), &p(&[2, 1]), &p(&[3, 2, 1])), 2);
    }

    #[test]
    fn degenerate_inputs_are_zero() {
        assert_eq!(lr_coefficient(&p(&[2]), &p(&[1]), &p(&[2])), 0);
        assert_eq!(lr_coefficient(&p(&[3]), &p(&[1]), &p(&[2, 2])), 0);
    }

    #[test]
    fn lr_is_symmetric_in_lambda_mu() {
        for w in 0..=12 {
            for nu in partitions_of_weight(w, 4, 5) {
                for wl in 0..=w {
                    for lambda in partitions_of_weight(wl, 4, 5) {
                        for mu in partitions_of_weight(w - wl, 4, 5) {
                            assert_eq!(
                                lr_coefficient(&lambda, &mu, &nu),
                                lr_coefficient(&mu, &lambda, &nu),
                                "{lambda:?} {mu:?} {nu:?}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cup_product_examples() {
        let ctx = GrContext::new(2, 4).unwrap();
        let e = cup_product(&Partition::empty(), &p(&[2, 1]), &ctx).unwrap();
        assert_eq!(e.terms, BTreeMap::from([(p(&[2, 1]), 1)]));
        let e = cup_product(&p(&[1]), &p(&[1]), &ctx).unwrap();
        assert_eq!(e.terms, BTreeMap::from([(p(&[2]), 1), (p(&[1, 1]), 1)]));
        assert!(cup_product(&p(&[2, 2]), &p(&[1]), &ctx).unwrap().is_empty());
        assert!(cup_product(&p(&[3]), &p(&[1]), &ctx).is_err());
    }

    fn cup_linear(
        a: &BTreeMap<Partition, u64>,
        b: &Partition,
        ctx: &GrContext,
    ) -> BTreeMap<Partition, u64> {
        let mut out = BTreeMap::new();
        for (x, c) in a {
            for (y, d) in cup_product(x, b, ctx).unwrap().terms {
                *out.entry(y).or_insert(0) += c * d;
            }
        }
        out
    }

    #[test]
    fn cup_product_commutative_associative_and_graded() {
        for (k, n) in [(2, 5), (3, 6)] {
            let ctx = GrContext::new(k, n).unwrap();
            let basis = ctx.basis();
            for a in basis {
                for b in basis {
                    let ab = cup_product(a, b, &ctx).unwrap();
                    assert_eq!(ab, cup_product(b, a, &ctx).unwrap());
                    assert!(ab
                        .terms
                        .keys()
                        .all(|nu| nu.weight() == a.weight() + b.weight()));
                    for c in basis {
                        let left = cup_linear(&ab.terms, c, &ctx);
                        let bc = cup_product(b, c, &ctx).unwrap().terms;
                        let mut right = BTreeMap::new();
                        for (x, m) in bc {
                            for (y, d) in cup_product(a, &x, &ctx).unwrap().terms {
                                *right.entry(y).or_insert(0) += m * d;
                            }
                        }
                        assert_eq!(left, right, "({a:?} {b:?}) {c:?} in Gr({k},{n})");
                    }
                }
            }
        }
    }

    #[test]
    fn cache_agrees_with_direct() {
        let cache = LrCache::new();
        let (a, b, c) = (p(&[2, 1]), p(&[2, 1]), p(&[3, 2, 1]));
        assert_eq!(cache.coefficient(&a, &b, &c), 2);
        assert_eq!(cache.coefficient(&a, &b, &c), 2);
        assert_eq!(cache.len(), 1);
    }
}
