//! Oracles built from first principles, sharing no code with the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

/// A polynomial in `m` variables: exponent vector to coefficient.
pub type Poly = BTreeMap<Vec<usize>, i64>;

/// Drops trailing zeros.
pub fn trim(parts: &[usize]) -> Vec<usize> {
    let mut v = parts.to_vec();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// `s_λ(x_1, …, x_m)` by enumerating semistandard tableaux with entries in `1..=m`.
pub fn schur_poly(lambda: &[usize], m: usize) -> Poly {
    let lambda = trim(lambda);
    let mut out = Poly::new();
    if lambda.len() > m {
        return out;
    }
    let cells: Vec<(usize, usize)> = lambda
        .iter()
        .enumerate()
        .flat_map(|(i, &len)| (0..len).map(move |j| (i, j)))
        .collect();
    let mut grid: Vec<Vec<usize>> = lambda.iter().map(|&len| vec![0; len]).collect();
    fn fill(
        idx: usize,
        cells: &[(usize, usize)],
        grid: &mut Vec<Vec<usize>>,
        m: usize,
        out: &mut Poly,
    ) {
        if idx == cells.len() {
            let mut exps = vec![0; m];
            for row in grid.iter() {
                for &e in row {
                    exps[e - 1] += 1;
                }
            }
            *out.entry(exps).or_insert(0) += 1;
            return;
        }
        let (i, j) = cells[idx];
        let left = if j > 0 { grid[i][j - 1] } else { 1 };
        let above = if i > 0 { grid[i - 1][j] + 1 } else { 1 };
        for e in left.max(above)..=m {
            grid[i][j] = e;
            fill(idx + 1, cells, grid, m, out);
        }
        grid[i][j] = 0;
    }
    fill(0, &cells, &mut grid, m, &mut out);
    out
}

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<usize> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// `s_λ s_μ` expanded in Schur polynomials of `m` variables by repeatedly
/// removing the lexicographically leading monomial, which is always the
/// leading term of a Schur polynomial. Shapes with more than `m` rows vanish.
pub fn schur_expansion(lambda: &[usize], mu: &[usize], m: usize) -> BTreeMap<Vec<usize>, i64> {
    let mut memo: HashMap<Vec<usize>, Poly> = HashMap::new();
    let mut rest = poly_mul(&schur_poly(lambda, m), &schur_poly(mu, m));
    let mut out = BTreeMap::new();
    while let Some((lead, &c)) = rest.iter().next_back() {
        let lead = lead.clone();
        assert!(
            lead.windows(2).all(|w| w[0] >= w[1]),
            "leading exponent {lead:?} is not a partition"
        );
        let s = memo
            .entry(lead.clone())
            .or_insert_with(|| schur_poly(&lead, m));
        for (e, cs) in s.iter() {
            *rest.entry(e.clone()).or_insert(0) -= c * cs;
        }
        rest.retain(|_, v| *v != 0);
        out.insert(trim(&lead), c);
    }
    out
}

/// Cup product in `H*(Gr(k, n))`: Schur expansion in `k` variables with shapes
/// wider than `n − k` dropped.
pub fn cup_product_oracle(
    lambda: &[usize],
    mu: &[usize],
    k: usize,
    n: usize,
) -> BTreeMap<Vec<usize>, i64> {
    schur_expansion(lambda, mu, k)
        .into_iter()
        .filter(|(nu, _)| nu.first().copied().unwrap_or(0) <= n - k)
        .collect()
}

/// Cells `(row, col)` of the Young diagram, zero-based.
fn cells(lambda: &[usize]) -> Vec<(usize, usize)> {
    lambda
        .iter()
        .enumerate()
        .flat_map(|(i, &len)| (0..len).map(move |j| (i, j)))
        .collect()
}

fn hook(lambda: &[usize], i: usize, j: usize) -> usize {
    let arm = lambda[i] - j - 1;
    let leg = lambda.iter().skip(i + 1).filter(|&&len| len > j).count();
    arm + leg + 1
}

/// `∏ sin(π(k + c)/x) / sin(π h/x)` over the cells, with `c` the content
/// and `h` the hook length.
pub fn quantum_dimension(lambda: &[usize], k: usize, x: f64) -> f64 {
    let lambda = trim(lambda);
    cells(&lambda)
        .into_iter()
        .map(|(i, j)| {
            let content = k as f64 + j as f64 - i as f64;
            let h = hook(&lambda, i, j) as f64;
            (PI * content / x).sin() / (PI * h / x).sin()
        })
        .product()
}

/// `dim S_λ(C^k) = ∏ (k + c) / h`, in floating point.
pub fn schur_dimension(lambda: &[usize], k: usize) -> f64 {
    let lambda = trim(lambda);
    cells(&lambda)
        .into_iter()
        .map(|(i, j)| (k as f64 + j as f64 - i as f64) / hook(&lambda, i, j) as f64)
        .product()
}

/// Every partition with at most `rows` parts, each at most `cols`.
pub fn box_partitions(rows: usize, cols: usize) -> Vec<Vec<usize>> {
    fn go(rows: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if cur.len() == rows {
            return;
        }
        for p in 1..=cap {
            cur.push(p);
            go(rows, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(rows, cols, &mut Vec::new(), &mut out);
    out
}

pub fn transpose(lambda: &[usize]) -> Vec<usize> {
    let first = lambda.first().copied().unwrap_or(0);
    (0..first)
        .map(|j| lambda.iter().filter(|&&p| p > j).count())
        .collect()
}
