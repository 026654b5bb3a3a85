//! The sine-product formula for Frobenius–Perron dimensions of Schubert
//! classes, viewed as a smooth function of the ambient dimension, and numeric
//! checks of its limit, lower bound, monotonicity and symmetry properties.
//!
//! For `λ` with at most `k` rows,
//! `ρ_{k,λ}(x) = ∏_r sin(a_r π / x) / sin(b_r π / x)` where each cell `(i, j)`
//! contributes `a_r = k − i + λ_i − j + 1` and its hook length `b_r`.

use std::f64::consts::PI;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{check_grassmannian, check_in_box, hook_data, hook_dimension, Partition};

/// Above this many cells the product is accumulated as a sum of logarithms.
const LOG_SPACE_CELLS: usize = 40;

/// `sin(π t)` for `t ∈ (0, 1)`, reflected so the argument never exceeds
/// `π / 2`.
fn sin_pi(t: f64) -> f64 {
    (PI * t.min(1.0 - t)).sin()
}

/// `x ↦ ρ_{k,λ}(x)` on its domain `x > k + λ_1 − 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoFunction {
    k: usize,
    lambda: Partition,
    a_seq: Vec<usize>,
    b_seq: Vec<usize>,
    x_min: usize,
}

impl RhoFunction {
    pub fn new(lambda: &Partition, k: usize) -> Result<Self> {
        let hooks = hook_data(lambda, k)?;
        debug_assert!(hooks.a_seq.iter().zip(&hooks.b_seq).all(|(a, b)| a >= b));
        Ok(RhoFunction {
            k,
            lambda: lambda.clone(),
            a_seq: hooks.a_seq,
            b_seq: hooks.b_seq,
            x_min: (k + lambda.first()).saturating_sub(1),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> &Partition {
        &self.lambda
    }

    pub fn a_seq(&self) -> &[usize] {
        &self.a_seq
    }

    pub fn b_seq(&self) -> &[usize] {
        &self.b_seq
    }

    /// Evaluation requires `x > x_min`.
    pub fn x_min(&self) -> f64 {
        self.x_min as f64
    }

    /// True when every factor cancels, i.e. the function is identically 1.
    pub fn is_constant(&self) -> bool {
        self.a_seq == self.b_seq
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x <= self.x_min() {
            return Err(Error::Domain(format!(
                "rho for k={} lambda={} needs x > {}, got {x}",
                self.k, self.lambda, self.x_min
            )));
        }
        let factors = self.a_seq.iter().zip(&self.b_seq).filter(|(a, b)| a != b);
        let ratio = |(&a, &b): (&usize, &usize)| sin_pi(a as f64 / x) / sin_pi(b as f64 / x);
        if self.a_seq.len() > LOG_SPACE_CELLS {
            Ok(factors.map(|f| ratio(f).ln()).sum::<f64>().exp())
        } else {
            Ok(factors.map(ratio).product())
        }
    }

    /// The limit as `x → ∞`: `dim 𝕊_λ(ℂ^k)`.
    pub fn limit(&self) -> Result<BigUint> {
        hook_dimension(&self.lambda, self.k)
    }

    /// Coefficient `C` in `dim − ρ(x) ≈ C / x²`:
    /// `dim · π² Σ (a_r² − b_r²) / 6`.
    pub fn taylor_gap_constant(&self) -> Result<f64> {
        let s: f64 = self
            .a_seq
            .iter()
            .zip(&self.b_seq)
            .map(|(&a, &b)| (a * a - b * b) as f64)
            .sum();
        Ok(big_to_f64(&self.limit()?) * PI * PI * s / 6.0)
    }

    /// `dim · π² Σ a_r² / 6`; `C / x²` bounds `dim − ρ(x)` from above
    /// wherever the lower bound holds with all factors in `[0, 1]`.
    pub fn rigorous_gap_constant(&self) -> Result<f64> {
        let s: f64 = self.a_seq.iter().map(|&a| (a * a) as f64).sum();
        Ok(big_to_f64(&self.limit()?) * PI * PI * s / 6.0)
    }
}

pub(crate) fn big_to_f64(v: &BigUint) -> f64 {
    num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::INFINITY)
}

/// `ρ_{k,λ}(x)`.
pub fn rho_closed_form(lambda: &Partition, k: usize, x: f64) -> Result<f64> {
    RhoFunction::new(lambda, k)?.eval(x)
}

/// `sin((λ_1 − λ_2 + 1) π / n) / sin(π / n)`, the `k = 2` case after
/// cancellation.
pub fn k2_simplified(lambda: &Partition, k: usize, n: usize) -> Result<f64> {
    if k != 2 {
        return Err(Error::param(format!(
            "the simplified formula needs k = 2, got k = {k}"
        )));
    }
    check_in_box(lambda, 2, n)?;
    let m = (lambda.part(0) - lambda.part(1) + 1) as f64;
    let n = n as f64;
    Ok(sin_pi(m / n) / sin_pi(1.0 / n))
}

/// `dim 𝕊_λ · ∏_{cells} (1 − π² c² / (6 n²))` with `c = k − i + j` the
/// content of the cell.
pub fn lower_bound(lambda: &Partition, k: usize, n: usize) -> Result<f64> {
    check_in_box(lambda, k, n)?;
    let hooks = hook_data(lambda, k)?;
    let dim = big_to_f64(&hook_dimension(lambda, k)?);
    let n2 = (n * n) as f64;
    Ok(hooks
        .cells
        .iter()
        .map(|c| 1.0 - PI * PI * (c.content * c.content) as f64 / (6.0 * n2))
        .fold(dim, |acc, f| acc * f))
}

/// `points` geometrically spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && points >= 2) {
        return Err(Error::param(format!(
            "bad log grid [{lo}, {hi}] with {points} points"
        )));
    }
    let step = (hi / lo).ln() / (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points).map(|i| lo * (step * i as f64).exp()).collect();
    grid[points - 1] = hi;
    Ok(grid)
}

fn check_grid(grid: &[f64], lower: f64, min_points: usize) -> Result<()> {
    if grid.len() < min_points {
        return Err(Error::param(format!(
            "grid needs at least {min_points} points"
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("grid must be strictly increasing"));
    }
    if grid.iter().any(|x| !x.is_finite() || *x <= lower) {
        return Err(Error::Domain(format!("grid must lie in ({lower}, ∞)")));
    }
    Ok(())
}

/// Central-difference slope with step `max(1e−4 x, 1e−6)`, shrunk if
/// needed so that `x − h` stays above `lower`.
fn central_slope(f: impl Fn(f64) -> Result<f64>, x: f64, lower: f64) -> Result<f64> {
    let h = (1e-4 * x).max(1e-6).min((x - lower) / 2.0);
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    pub x: f64,
    pub value: f64,
    /// `dim − ρ(x)`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub k: usize,
    pub lambda: String,
    /// `dim 𝕊_λ` as an exact decimal string.
    pub target_exact: String,
    pub target: f64,
    pub points: Vec<LimitPoint>,
    /// Gaps strictly decrease (non-increasing when the function is constant).
    pub gaps_shrink: bool,
    pub final_gap: f64,
    /// `final_gap · x²` at the last point.
    pub fitted_constant: f64,
    /// Leading Taylor coefficient of the gap.
    pub taylor_constant: f64,
    /// Whether `final_gap ≤ rigorous_constant / x²`.
    pub within_envelope: bool,
}

/// Evaluates `ρ_{k,λ}` along an increasing schedule and compares it with
/// `dim 𝕊_λ`.
pub fn limit_check(lambda: &Partition, k: usize, schedule: &[f64]) -> Result<LimitReport> {
    let rf = RhoFunction::new(lambda, k)?;
    check_grid(schedule, rf.x_min(), 1)?;
    let exact = rf.limit()?;
    let target = big_to_f64(&exact);
    let points = schedule
        .iter()
        .map(|&x| {
            let value = rf.eval(x)?;
            Ok(LimitPoint {
                x,
                value,
                gap: target - value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let gaps_shrink = points.windows(2).all(|w| {
        if rf.is_constant() {
            w[1].gap <= w[0].gap
        } else {
            w[1].gap < w[0].gap
        }
    });
    let last = points.last().expect("schedule is nonempty");
    let x2 = last.x * last.x;
    Ok(LimitReport {
        k,
        lambda: lambda.to_string(),
        target_exact: exact.to_string(),
        target,
        gaps_shrink,
        final_gap: last.gap,
        fitted_constant: last.gap * x2,
        taylor_constant: rf.taylor_gap_constant()?,
        within_envelope: last.gap <= rf.rigorous_gap_constant()? / x2 + 1e-15 * target,
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub k: usize,
    pub lambda: String,
    /// The function is identically 1, so there is nothing to scan.
    pub vacuous: bool,
    /// Every first difference over the grid is positive.
    pub increasing: bool,
    /// Grid points where the next first difference is not positive.
    pub non_increasing_at: Vec<f64>,
    /// Smallest central-difference slope over the grid.
    pub min_slope: f64,
    /// Smallest grid point from which every second divided difference is
    /// negative; `None` if the last one is not.
    pub concavity_threshold: Option<f64>,
    pub grid_points: usize,
}

/// First and second divided differences of `ρ_{k,λ}` on a grid above the
/// domain threshold.
pub fn monotonicity_concavity_scan(
    lambda: &Partition,
    k: usize,
    grid: &[f64],
) -> Result<ScanReport> {
    let rf = RhoFunction::new(lambda, k)?;
    check_grid(grid, rf.x_min(), 3)?;
    if rf.is_constant() {
        return Ok(ScanReport {
            k,
            lambda: lambda.to_string(),
            vacuous: true,
            increasing: false,
            non_increasing_at: Vec::new(),
            min_slope: 0.0,
            concavity_threshold: None,
            grid_points: grid.len(),
        });
    }
    let values = grid
        .iter()
        .map(|&x| rf.eval(x))
        .collect::<Result<Vec<_>>>()?;
    let slopes: Vec<f64> = grid
        .windows(2)
        .zip(values.windows(2))
        .map(|(x, f)| (f[1] - f[0]) / (x[1] - x[0]))
        .collect();
    let non_increasing_at = grid
        .iter()
        .zip(&slopes)
        .filter(|(_, &s)| s <= 0.0)
        .map(|(&x, _)| x)
        .collect();
    let second: Vec<f64> = (0..grid.len() - 2)
        .map(|i| (slopes[i + 1] - slopes[i]) / (grid[i + 2] - grid[i]))
        .collect();
    let concave_from = second.iter().rposition(|&s| s >= 0.0).map_or(0, |i| i + 1);
    let concavity_threshold = (concave_from < second.len()).then(|| grid[concave_from]);
    let min_slope = grid
        .iter()
        .map(|&x| central_slope(|y| rf.eval(y), x, rf.x_min()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(ScanReport {
        k,
        lambda: lambda.to_string(),
        vacuous: false,
        increasing: slopes.iter().all(|&s| s > 0.0),
        non_increasing_at,
        min_slope,
        concavity_threshold,
        grid_points: grid.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub a: f64,
    pub b: f64,
    pub min_slope: f64,
    pub all_positive: bool,
}

/// Central-difference slopes of `f(x) = sin(a/x) / sin(b/x)` on a grid in
/// `(a/π, ∞)`, for `a > b > 0`.
pub fn sine_ratio_slope_check(a: f64, b: f64, grid: &[f64]) -> Result<SlopeReport> {
    if !(a.is_finite() && b > 0.0 && a > b) {
        return Err(Error::param(format!(
            "need a > b > 0, got a = {a}, b = {b}"
        )));
    }
    let lower = a / PI;
    check_grid(grid, lower, 1)?;
    let f = |x: f64| Ok((a / x).sin() / (b / x).sin());
    let min_slope = grid
        .iter()
        .map(|&x| central_slope(f, x, lower))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(SlopeReport {
        a,
        b,
        min_slope,
        all_positive: min_slope > 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub value: f64,
    pub dual_value: f64,
    pub difference: f64,
    pub holds: bool,
}

/// `ρ_{k,λ}(n)` against `ρ_{n−k,λᵗ}(n)`, tolerance `1e−12`.
pub fn transpose_duality_check(lambda: &Partition, k: usize, n: usize) -> Result<DualityReport> {
    check_in_box(lambda, k, n)?;
    let value = rho_closed_form(lambda, k, n as f64)?;
    let dual_value = rho_closed_form(&lambda.transpose(), n - k, n as f64)?;
    let difference = (value - dual_value).abs();
    Ok(DualityReport {
        value,
        dual_value,
        difference,
        holds: difference <= 1e-12,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalkinReport {
    pub k: usize,
    pub n: usize,
    /// `n · ρ_{k,(1)}(n)`.
    pub lhs: f64,
    /// `k(n − k) + 1`.
    pub rhs: f64,
    /// `|lhs − rhs| ≤ 1e−9`.
    pub equality: bool,
    /// Inequality holds and equality occurs exactly when `k ∈ {1, n − 1}`.
    pub holds: bool,
}

/// `n · ρ_{k,(1)}(n) ≥ k(n − k) + 1` for the divisor class of `Gr(k, n)`.
pub fn galkin_check(k: usize, n: usize) -> Result<GalkinReport> {
    check_grassmannian(k, n)?;
    let divisor = Partition::new(vec![1])?;
    let lhs = n as f64 * rho_closed_form(&divisor, k, n as f64)?;
    let rhs = (k * (n - k) + 1) as f64;
    let equality = (lhs - rhs).abs() <= 1e-9;
    let expect_equality = k == 1 || k == n - 1;
    Ok(GalkinReport {
        k,
        n,
        lhs,
        rhs,
        equality,
        holds: lhs >= rhs - 1e-9 && equality == expect_equality,
    })
}
