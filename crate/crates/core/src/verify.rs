//! Named self-check suites run by `fpdim verify`.
//!
//! Each check returns a pass/fail flag with a one-line detail; a suite never
//! stops at the first failure.

use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{
    galkin_check, k2_simplified, log_grid, lower_bound, monotonicity_concavity_scan,
    rho_closed_form, transpose_duality_check, RhoFunction,
};
use crate::error::{Error, Result};
use crate::filtration::{FilteredFamily, FiltrationMode};
use crate::lr::{cup_product, lr_coefficient};
use crate::partition::{
    binomial, complement, enumerate_basis, hook_data, hook_dimension, partitions_in_box,
    partitions_of_weight, GrContext, Partition,
};
use crate::quantum::{
    build_table, divisor_product_pieri, multiplication_matrix, quantum_product, ProductMode,
};
use crate::spectral::{
    check_ring_homomorphism, fpdim_basis, spectral_radius, SpectralOptions, ZPlusRingTable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Partition,
    Lr,
    Quantum,
    Spectral,
    ClosedForm,
    Filtration,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = [
        "partition",
        "lr",
        "quantum",
        "spectral",
        "closed-form",
        "filtration",
        "all",
    ];

    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Partition,
                Suite::Lr,
                Suite::Quantum,
                Suite::Spectral,
                Suite::ClosedForm,
                Suite::Filtration,
            ],
            s => vec![s],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Partition => "partition",
            Suite::Lr => "lr",
            Suite::Quantum => "quantum",
            Suite::Spectral => "spectral",
            Suite::ClosedForm => "closed-form",
            Suite::Filtration => "filtration",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::NAMES
            .iter()
            .position(|&n| n == s)
            .map(|i| {
                [
                    Suite::Partition,
                    Suite::Lr,
                    Suite::Quantum,
                    Suite::Spectral,
                    Suite::ClosedForm,
                    Suite::Filtration,
                    Suite::All,
                ][i]
            })
            .ok_or_else(|| {
                Error::param(format!(
                    "unknown suite {s:?}; expected one of {}",
                    Suite::NAMES.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type Check = (&'static str, fn(&SpectralOptions) -> Result<(bool, String)>);

/// Runs every check of `suite`. Errors raised inside a check count as
/// failures and are reported in its detail.
pub fn run_suite(suite: Suite, opts: &SpectralOptions) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for part in suite.parts() {
        let checks: &[Check] = match part {
            Suite::Partition => PARTITION_CHECKS,
            Suite::Lr => LR_CHECKS,
            Suite::Quantum => QUANTUM_CHECKS,
            Suite::Spectral => SPECTRAL_CHECKS,
            Suite::ClosedForm => CLOSED_FORM_CHECKS,
            Suite::Filtration => FILTRATION_CHECKS,
            Suite::All => unreachable!("expanded above"),
        };
        for (name, check) in checks {
            let (passed, detail) = match check(opts) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            out.push(CheckOutcome {
                suite: part.as_str().to_string(),
                name: name.to_string(),
                passed,
                detail,
            });
        }
    }
    out
}

/// Counts failures of `pred` over `items`, keeping the first for the detail.
fn tally<T: Sync>(
    items: &[T],
    pred: impl Fn(&T) -> Result<Option<String>> + Sync,
) -> Result<(bool, String)> {
    let failures = items
        .par_iter()
        .map(&pred)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    Ok(match failures.first() {
        None => (true, format!("{} cases", items.len())),
        Some(first) => (
            false,
            format!(
                "{} of {} cases fail; first: {first}",
                failures.len(),
                items.len()
            ),
        ),
    })
}

fn grassmannians(k_max: usize, n_max: usize) -> Vec<GrContext> {
    (2..=n_max)
        .flat_map(|n| (1..n.min(k_max + 1)).map(move |k| (k, n)))
        .map(|(k, n)| GrContext::new(k, n).expect("valid box"))
        .collect()
}

fn pairs(ctx: &GrContext) -> Vec<(Partition, Partition)> {
    let b = ctx.basis();
    b.iter()
        .flat_map(|x| b.iter().map(move |y| (x.clone(), y.clone())))
        .collect()
}

const PARTITION_CHECKS: &[Check] = &[
    ("basis sizes are binomial coefficients", |_| {
        let cases: Vec<(usize, usize)> =
            (2..=12).flat_map(|n| (1..n).map(move |k| (k, n))).collect();
        tally(&cases, |&(k, n)| {
            let len = enumerate_basis(k, n)?.len() as u64;
            let expect = binomial(n as u64, k as u64).unwrap_or(0);
            Ok((len != expect).then(|| format!("Gr({k},{n}): {len} != {expect}")))
        })
    }),
    ("transpose is an involution", |_| {
        let all: Vec<Partition> = (0..=20)
            .flat_map(|w| partitions_of_weight(w, w, w))
            .collect();
        tally(&all, |p| {
            Ok((p.transpose().transpose() != *p).then(|| p.to_string()))
        })
    }),
    ("complement is a weight-reversing involution", |_| {
        tally(&grassmannians(9, 10), |ctx| {
            for p in ctx.basis() {
                let c = complement(p, ctx)?;
                if complement(&c, ctx)? != *p || p.weight() + c.weight() != ctx.dimension() {
                    return Ok(Some(format!("{p} in Gr({},{})", ctx.k(), ctx.n())));
                }
            }
            Ok(None)
        })
    }),
    (
        "paired hook sequences dominate, equal iff rectangular",
        |_| {
            tally(&grassmannians(4, 10), |ctx| {
                for p in ctx.basis() {
                    let h = hook_data(p, ctx.k())?;
                    let dominated = h.a_seq.iter().zip(&h.b_seq).all(|(a, b)| a >= b);
                    let max_ok = h
                        .a_seq
                        .iter()
                        .max()
                        .is_none_or(|&m| m == ctx.k() + p.first() - 1);
                    if !dominated || !max_ok || (h.a_seq == h.b_seq) != p.is_rectangular(ctx.k()) {
                        return Ok(Some(format!("{p} k={}", ctx.k())));
                    }
                }
                Ok(None)
            })
        },
    ),
    ("hook-length dimension is integral", |_| {
        let all: Vec<Partition> = (0..=24)
            .flat_map(|w| partitions_of_weight(w, 6, w))
            .collect();
        tally(&all, |p| hook_dimension(p, 6).map(|_| None))
    }),
];

const LR_CHECKS: &[Check] = &[
    ("coefficients are symmetric in the two factors", |_| {
        let shapes: Vec<Partition> = (0..=10)
            .flat_map(|w| partitions_of_weight(w, 4, 5))
            .collect();
        tally(&shapes, |nu| {
            for wl in 0..=nu.weight() {
                for l in partitions_of_weight(wl, 4, 5) {
                    for m in partitions_of_weight(nu.weight() - wl, 4, 5) {
                        if lr_coefficient(&l, &m, nu) != lr_coefficient(&m, &l, nu) {
                            return Ok(Some(format!("{l} {m} {nu}")));
                        }
                    }
                }
            }
            Ok(None)
        })
    }),
    ("cup product is commutative, associative and graded", |_| {
        let ctxs = [GrContext::new(2, 5)?, GrContext::new(3, 6)?];
        tally(&ctxs, |ctx| {
            let table = build_table(ctx, ProductMode::ClassicalTruncated)?;
            for (a, b) in pairs(ctx) {
                let ab = cup_product(&a, &b, ctx)?;
                if ab != cup_product(&b, &a, ctx)?
                    || ab
                        .terms
                        .keys()
                        .any(|nu| nu.weight() != a.weight() + b.weight())
                {
                    return Ok(Some(format!("{a} {b}")));
                }
            }
            associativity_failure(&table)
        })
    }),
    ("nonzero classes act nilpotently", |opts| {
        tally(&grassmannians(3, 7), |ctx| {
            let table = build_table(ctx, ProductMode::ClassicalTruncated)?;
            for p in ctx.basis().iter().skip(1) {
                let m = multiplication_matrix(p, &table)?;
                let est = spectral_radius(&m.to_sparse(), opts)?;
                if !m.is_strictly_lower_triangular() || est.radius != 0.0 {
                    return Ok(Some(format!("{p} in Gr({},{})", ctx.k(), ctx.n())));
                }
            }
            Ok(None)
        })
    }),
];

fn associativity_failure(table: &crate::quantum::ProductTable) -> Result<Option<String>> {
    let ctx = table.ctx();
    let n = ctx.rank();
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let left = table.multiply_combination(table.get(i, j).as_map(), l)?;
                let right = table.multiply_combination(table.get(j, l).as_map(), i)?;
                if left != right {
                    let b = ctx.basis();
                    return Ok(Some(format!("({} {}) {}", b[i], b[j], b[l])));
                }
            }
        }
    }
    Ok(None)
}

const QUANTUM_CHECKS: &[Check] = &[
    (
        "constants are nonnegative, graded, commutative; q^0 layer is classical",
        |_| {
            tally(&grassmannians(3, 8), |ctx| {
                for (a, b) in pairs(ctx) {
                    let e = quantum_product(&a, &b, ctx)?;
                    let graded = e
                        .terms()
                        .all(|(nu, d, _)| a.weight() + b.weight() == nu.weight() + d * ctx.n());
                    let classical = e.classical_part() == cup_product(&a, &b, ctx)?.terms;
                    if !graded || !classical || e != quantum_product(&b, &a, ctx)? {
                        return Ok(Some(format!("{a} * {b} in Gr({},{})", ctx.k(), ctx.n())));
                    }
                }
                Ok(None)
            })
        },
    ),
    ("divisor products agree with quantum Pieri", |_| {
        let one = Partition::new(vec![1])?;
        tally(&grassmannians(9, 10), |ctx| {
            for mu in ctx.basis() {
                if quantum_product(&one, mu, ctx)? != divisor_product_pieri(mu, ctx)? {
                    return Ok(Some(format!("{mu} in Gr({},{})", ctx.k(), ctx.n())));
                }
            }
            Ok(None)
        })
    }),
    ("quantum product is associative with q-degrees", |_| {
        let ctxs = [
            GrContext::new(2, 4)?,
            GrContext::new(2, 5)?,
            GrContext::new(3, 6)?,
        ];
        tally(&ctxs, |ctx| {
            associativity_failure(&build_table(ctx, ProductMode::Quantum)?)
        })
    }),
];

const SPECTRAL_CHECKS: &[Check] = &[
    ("power iteration matches the closed form", |opts| {
        tally(&grassmannians(3, 8), |ctx| {
            let ring =
                ZPlusRingTable::from_product_table(&build_table(ctx, ProductMode::Quantum)?)?;
            let report = fpdim_basis(&ring, opts)?;
            for (i, p) in ctx.basis().iter().enumerate() {
                let cf = rho_closed_form(p, ctx.k(), ctx.n() as f64)?;
                if (report.radius(i) - cf).abs() > 1e-8 {
                    return Ok(Some(format!(
                        "{p} in Gr({},{}): {} vs {cf}",
                        ctx.k(),
                        ctx.n(),
                        report.radius(i)
                    )));
                }
            }
            Ok(None)
        })
    }),
    ("FPdim is a ring homomorphism on quantum rings", |opts| {
        let ctxs = [
            GrContext::new(2, 4)?,
            GrContext::new(2, 5)?,
            GrContext::new(3, 6)?,
        ];
        tally(&ctxs, |ctx| {
            let ring =
                ZPlusRingTable::from_product_table(&build_table(ctx, ProductMode::Quantum)?)?;
            let report = fpdim_basis(&ring, opts)?;
            let v = check_ring_homomorphism(&ring, &report, 1e-6);
            Ok((!v.is_empty())
                .then(|| format!("{} violations in Gr({},{})", v.len(), ctx.k(), ctx.n())))
        })
    }),
    ("a corrupted table is caught", |opts| {
        let ctx = GrContext::new(2, 4)?;
        let ring = ZPlusRingTable::from_product_table(&build_table(&ctx, ProductMode::Quantum)?)?;
        let one = ctx.position(&Partition::new(vec![1])?)?;
        let bad = ring.with_bumped_constant(one, one, one);
        let report = fpdim_basis(&bad, opts)?;
        let caught = !check_ring_homomorphism(&bad, &report, 1e-6).is_empty();
        Ok((caught, "negative control".into()))
    }),
];

const CLOSED_FORM_CHECKS: &[Check] = &[
    ("lower bound holds", |_| {
        tally(&grassmannians(4, 12), |ctx| {
            for p in ctx.basis() {
                let rho = rho_closed_form(p, ctx.k(), ctx.n() as f64)?;
                let lb = lower_bound(p, ctx.k(), ctx.n())?;
                if lb > rho + 1e-12 {
                    return Ok(Some(format!(
                        "{p} in Gr({},{}): {lb} > {rho}",
                        ctx.k(),
                        ctx.n()
                    )));
                }
            }
            Ok(None)
        })
    }),
    ("transpose duality", |_| {
        tally(&grassmannians(4, 10), |ctx| {
            for p in ctx.basis() {
                let r = transpose_duality_check(p, ctx.k(), ctx.n())?;
                if !r.holds {
                    return Ok(Some(format!(
                        "{p} in Gr({},{}): diff {}",
                        ctx.k(),
                        ctx.n(),
                        r.difference
                    )));
                }
            }
            Ok(None)
        })
    }),
    (
        "divisor bound n·rho >= k(n-k)+1 with equality iff k in {1, n-1}",
        |_| {
            let cases: Vec<(usize, usize)> =
                (2..=30).flat_map(|n| (1..n).map(move |k| (k, n))).collect();
            tally(&cases, |&(k, n)| {
                let r = galkin_check(k, n)?;
                Ok((!r.holds).then(|| format!("k={k} n={n}: {} vs {}", r.lhs, r.rhs)))
            })
        },
    ),
    ("k = 2 simplified formula", |_| {
        tally(
            &grassmannians(2, 30)
                .into_iter()
                .filter(|c| c.k() == 2)
                .collect::<Vec<_>>(),
            |ctx| {
                for p in ctx.basis() {
                    let a = k2_simplified(p, 2, ctx.n())?;
                    let b = rho_closed_form(p, 2, ctx.n() as f64)?;
                    if (a - b).abs() > 1e-12 {
                        return Ok(Some(format!("{p} n={}", ctx.n())));
                    }
                }
                Ok(None)
            },
        )
    }),
    ("constant exactly for rectangular shapes", |_| {
        let ctx = GrContext::new(3, 7)?;
        tally(ctx.basis(), |p| {
            let rf = RhoFunction::new(p, 3)?;
            let grid = log_grid(rf.x_min() + 0.25, 1e4, 25)?;
            let mut constant = true;
            for x in grid {
                constant &= (rf.eval(x)? - 1.0).abs() <= 1e-12;
            }
            Ok((constant != p.is_rectangular(3)).then(|| p.to_string()))
        })
    }),
    ("increasing below the limit for sample shapes", |_| {
        let shapes: Vec<(Vec<usize>, usize)> = vec![
            (vec![1], 2),
            (vec![2, 1], 2),
            (vec![2, 1], 3),
            (vec![3, 1], 4),
            (vec![6, 4, 2, 1], 4),
        ];
        tally(&shapes, |(parts, k)| {
            let p = Partition::new(parts.clone())?;
            let rf = RhoFunction::new(&p, *k)?;
            let grid = log_grid(rf.x_min() * 1.01 + 0.01, 1e4, 200)?;
            let scan = monotonicity_concavity_scan(&p, *k, &grid)?;
            let dim = crate::closed_form::big_to_f64(&rf.limit()?);
            let below = rf.eval(1e4)? < dim;
            Ok(
                (!(scan.increasing && below && scan.concavity_threshold.is_some()))
                    .then(|| format!("{p} k={k}")),
            )
        })
    }),
    ("series envelope", |_| {
        // ρ_{2,(1)}(x) = 2cos(π/x), so the gap to 2 is 2(1 − cos(π/x)).
        let p = Partition::new(vec![1])?;
        let x = 200.0;
        let got = 2.0 - rho_closed_form(&p, 2, x)?;
        let expect = 2.0 * (1.0 - (PI / x).cos());
        Ok(((got - expect).abs() < 1e-14, format!("gap {got:e}")))
    }),
];

const FILTRATION_CHECKS: &[Check] = &[
    ("filtration axioms", |opts| {
        let cases = [
            (1, FiltrationMode::Verlinde, 5),
            (2, FiltrationMode::Verlinde, 3),
            (2, FiltrationMode::Classical, 3),
            (3, FiltrationMode::Verlinde, 3),
        ];
        tally(&cases, |&(k, mode, top)| {
            let fam = FilteredFamily::new(k, mode)?.with_spectral_options(*opts);
            let levels: Vec<usize> = (0..=top).collect();
            let report = fam.check_zbullet_axioms(&levels, 1e-6)?;
            Ok((!report.passed).then(|| format!("k={k} {}", mode.as_str())))
        })
    }),
    ("classical FPd is the indicator of the identity", |opts| {
        let cases: Vec<(usize, Partition)> = (1..=3)
            .flat_map(|k| partitions_in_box(k, 5).into_iter().map(move |p| (k, p)))
            .collect();
        tally(&cases, |(k, p)| {
            let fam =
                FilteredFamily::new(*k, FiltrationMode::Classical)?.with_spectral_options(*opts);
            let schedule: Vec<usize> = (p.first()..=5).collect();
            let r = fam.fpd_bullet(p, &schedule, 0.0)?;
            Ok((!r.converged).then(|| format!("{p} k={k}")))
        })
    }),
    ("Verlinde FPd of the divisor tends to k", |opts| {
        let cases = [2usize, 3];
        tally(&cases, |&k| {
            let fam =
                FilteredFamily::new(k, FiltrationMode::Verlinde)?.with_spectral_options(*opts);
            let p = Partition::new(vec![1])?;
            let r = fam.fpd_bullet(&p, &[20, 30, 40], 1e-3)?;
            Ok((!r.converged).then(|| format!("k={k}: extrapolated {}", r.extrapolated)))
        })
    }),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().as_str(), name);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn fast_suites_pass() {
        for suite in [Suite::Partition, Suite::ClosedForm, Suite::Filtration] {
            let outcomes = run_suite(suite, &SpectralOptions::default());
            for o in &outcomes {
                assert!(o.passed, "{}: {} ({})", o.suite, o.name, o.detail);
            }
        }
    }
}
