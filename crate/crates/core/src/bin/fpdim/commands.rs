use fpdim::cache::table_with_cache;
use fpdim::closed_form::{galkin_check, RhoFunction};
use fpdim::filtration::{FilteredFamily, FiltrationMode, LevelMethod};
use fpdim::lr::{cup_product, lr_coefficient, schur_product};
use fpdim::output::{real, OutputRecord};
use fpdim::partition::{check_grassmannian, check_in_box, hook_dimension};
use fpdim::quantum::{multiplication_operator, quantum_product, ProductMode};
use fpdim::spectral::{check_ring_homomorphism, fpdim_basis, spectral_radius, ZPlusRingTable};
use fpdim::verify::{run_suite, Suite};
use fpdim::{Error, GrContext, Partition, Result};

use crate::{Command, GlobalOpts};

/// Absolute gap above which a spectral radius and its closed form disagree.
const CLOSED_FORM_GAP: f64 = 1e-8;

/// Relative tolerance for `FPdim(xy) = FPdim(x) FPdim(y)`.
const HOMOMORPHISM_TOL: f64 = 1e-6;

pub fn run(command: &Command, global: &GlobalOpts) -> Result<OutputRecord> {
    global.spectral().validate()?;
    match command {
        Command::Rho {
            k,
            n,
            lambda,
            exact_check,
        } => rho(*k, *n, lambda, *exact_check, global),
        Command::Dim { k, lambda } => dim(*k, lambda),
        Command::Lr {
            lambda,
            mu,
            nu,
            k,
            n,
        } => lr(lambda, mu, nu.as_ref(), k.zip(*n)),
        Command::Qprod { k, n, lambda, mu } => qprod(*k, *n, lambda, mu),
        Command::Fpdim { k, n, r, mode } => {
            let r = match (n, r) {
                (Some(n), _) => {
                    check_grassmannian(*k, *n)?;
                    n - k
                }
                (None, Some(r)) => *r,
                (None, None) => return Err(Error::Parameter("give --n or --r".into())),
            };
            fpdim(*k, r, *mode, global)
        }
        Command::Fusion {
            k,
            r,
            lambda,
            mu,
            nu,
        } => fusion(*k, *r, lambda, mu, nu.as_ref()),
        Command::Limit {
            k,
            lambda,
            r_max,
            r_min,
            spectral_rank,
            limit_tol,
        } => limit(
            *k,
            lambda,
            *r_min,
            *r_max,
            *spectral_rank,
            *limit_tol,
            global,
        ),
        Command::Galkin { k_max, n_max } => galkin(*k_max, *n_max),
        Command::Verify { suite } => verify(suite.parse()?, global),
    }
}

fn rho(
    k: usize,
    n: usize,
    lambda: &Partition,
    exact_check: bool,
    global: &GlobalOpts,
) -> Result<OutputRecord> {
    check_in_box(lambda, k, n)?;
    let rf = RhoFunction::new(lambda, k)?;
    let value = rf.eval(n as f64)?;
    let mut rec = OutputRecord::new("rho");
    rec.param("k", k).param("n", n).param("lambda", lambda);
    rec.summary("rho", real(value));
    rec.note(format!("closed form, defined for x > {}", rf.x_min()));
    if exact_check {
        let ctx = GrContext::new(k, n)?;
        let operator = multiplication_operator(lambda, &ctx, ProductMode::Quantum)?;
        let est = spectral_radius(&operator, &global.spectral())?;
        let gap = (est.radius - value).abs();
        rec.summary("spectral_radius", real(est.radius));
        rec.summary("gap", real(gap));
        rec.summary("method", est.method.as_str());
        rec.summary("iterations", est.iterations);
        rec.note(format!("power iteration tolerance {:e}", global.tol));
        if gap > CLOSED_FORM_GAP {
            rec.violation(format!(
                "spectral radius differs from the closed form by {gap:e}"
            ));
        }
    }
    Ok(rec)
}

fn dim(k: usize, lambda: &Partition) -> Result<OutputRecord> {
    let value = hook_dimension(lambda, k)?;
    let mut rec = OutputRecord::new("dim");
    rec.param("k", k).param("lambda", lambda);
    rec.summary("dim", value);
    Ok(rec)
}

fn lr(
    lambda: &Partition,
    mu: &Partition,
    nu: Option<&Partition>,
    grassmannian: Option<(usize, usize)>,
) -> Result<OutputRecord> {
    let mut rec = OutputRecord::new("lr");
    rec.param("lambda", lambda).param("mu", mu);
    if let Some((k, n)) = grassmannian {
        rec.param("k", k).param("n", n);
    }
    if let Some(nu) = nu {
        rec.param("nu", nu);
        if let Some((k, n)) = grassmannian {
            for p in [lambda, mu, nu] {
                check_in_box(p, k, n)?;
            }
        }
        rec.summary("coefficient", lr_coefficient(lambda, mu, nu));
        return Ok(rec);
    }
    let terms = match grassmannian {
        Some((k, n)) => cup_product(lambda, mu, &GrContext::new(k, n)?)?.terms,
        None => schur_product(lambda, mu, usize::MAX, usize::MAX),
    };
    rec.columns(&["nu", "coefficient"]);
    for (nu, c) in &terms {
        rec.row(vec![nu.to_string(), c.to_string()]);
    }
    rec.summary("terms", terms.len());
    Ok(rec)
}

fn qprod(k: usize, n: usize, lambda: &Partition, mu: &Partition) -> Result<OutputRecord> {
    let ctx = GrContext::new(k, n)?;
    let product = quantum_product(lambda, mu, &ctx)?;
    let mut rec = OutputRecord::new("qprod");
    rec.param("k", k)
        .param("n", n)
        .param("lambda", lambda)
        .param("mu", mu);
    rec.columns(&["nu", "d", "coefficient"]);
    for ((d, nu), c) in product.as_map() {
        rec.row(vec![nu.to_string(), d.to_string(), c.to_string()]);
    }
    rec.summary("terms", product.len());
    Ok(rec)
}

fn family(k: usize, mode: FiltrationMode, global: &GlobalOpts) -> Result<FilteredFamily> {
    let mut fam = FilteredFamily::new(k, mode)?.with_spectral_options(global.spectral());
    if let Some(cache) = global.cache() {
        fam = fam.with_table_cache(cache);
    }
    Ok(fam)
}

fn fpdim(k: usize, r: usize, mode: ProductMode, global: &GlobalOpts) -> Result<OutputRecord> {
    let n = k + r;
    let mut rec = OutputRecord::new("fpdim");
    rec.param("k", k)
        .param("n", n)
        .param("r", r)
        .param("mode", mode.as_str());
    let ring = match r {
        0 => family(k, mode.into(), global)?.build_level(0)?.ring.clone(),
        _ => {
            let ctx = GrContext::new(k, n)?;
            let cache = global.cache();
            ZPlusRingTable::from_product_table(&table_with_cache(&ctx, mode, cache.as_ref())?)?
        }
    };
    let report = fpdim_basis(&ring, &global.spectral())?;
    let quantum = mode == ProductMode::Quantum;
    if quantum {
        rec.columns(&[
            "lambda",
            "fpdim",
            "method",
            "iterations",
            "closed_form",
            "gap",
        ]);
    } else {
        rec.columns(&["lambda", "fpdim", "method", "iterations"]);
    }
    for (i, est) in report.estimates.iter().enumerate() {
        let label = ring.label(i);
        let mut row = vec![
            label.to_string(),
            real(est.radius),
            est.method.as_str().to_string(),
            est.iterations.to_string(),
        ];
        if quantum {
            let lambda: Partition = label.parse()?;
            let closed = RhoFunction::new(&lambda, k)?.eval(n as f64)?;
            let gap = (closed - est.radius).abs();
            if gap > CLOSED_FORM_GAP {
                rec.violation(format!(
                    "FPdim({label}) differs from the closed form by {gap:e}"
                ));
            }
            row.push(real(closed));
            row.push(real(gap));
        } else {
            let expected = if i == ring.identity_index() { 1.0 } else { 0.0 };
            if est.radius != expected {
                rec.violation(format!(
                    "classical FPdim({label}) = {} is not {expected}",
                    est.radius
                ));
            }
        }
        rec.row(row);
    }
    let violations = check_ring_homomorphism(&ring, &report, HOMOMORPHISM_TOL);
    for v in &violations {
        rec.violation(format!(
            "FPdim({} * {}) = {} but FPdim({}) FPdim({}) = {}",
            ring.label(v.i),
            ring.label(v.j),
            v.of_product,
            ring.label(v.i),
            ring.label(v.j),
            v.product_of
        ));
    }
    rec.summary("rank", ring.rank());
    rec.summary("homomorphism_violations", violations.len());
    rec.note(format!(
        "power iteration tolerance {:e}, step limit {}",
        global.tol, global.max_iter
    ));
    Ok(rec)
}

fn fusion(
    k: usize,
    r: usize,
    lambda: &Partition,
    mu: &Partition,
    nu: Option<&Partition>,
) -> Result<OutputRecord> {
    let fam = FilteredFamily::new(k, FiltrationMode::Verlinde)?;
    let mut rec = OutputRecord::new("fusion");
    rec.param("k", k)
        .param("r", r)
        .param("lambda", lambda)
        .param("mu", mu);
    if let Some(nu) = nu {
        rec.param("nu", nu);
        rec.summary("coefficient", fam.fusion_coefficient(lambda, mu, nu, r)?);
        return Ok(rec);
    }
    rec.columns(&["nu", "coefficient"]);
    let terms = if r == 0 {
        fam.fusion_coefficient(lambda, mu, &Partition::empty(), 0)?;
        [(Partition::empty(), 1)].into_iter().collect()
    } else {
        quantum_product(lambda, mu, &GrContext::new(k, k + r)?)?.at_q_one()
    };
    for (nu, c) in &terms {
        rec.row(vec![nu.to_string(), c.to_string()]);
    }
    rec.summary("terms", terms.len());
    Ok(rec)
}

fn limit(
    k: usize,
    lambda: &Partition,
    r_min: Option<usize>,
    r_max: usize,
    spectral_rank: usize,
    limit_tol: f64,
    global: &GlobalOpts,
) -> Result<OutputRecord> {
    let r_min = r_min.unwrap_or(lambda.first().max(1));
    if r_min > r_max {
        return Err(Error::Parameter(format!(
            "--r-min {r_min} exceeds --r-max {r_max}"
        )));
    }
    let schedule: Vec<usize> = (r_min..=r_max).collect();
    let fam = family(k, FiltrationMode::Verlinde, global)?.with_max_spectral_rank(spectral_rank);
    let report = fam.fpd_bullet(lambda, &schedule, limit_tol)?;
    let mut rec = OutputRecord::new("limit");
    rec.param("k", k)
        .param("lambda", lambda)
        .param("r_min", r_min)
        .param("r_max", r_max);
    rec.param("spectral_rank", spectral_rank);
    rec.columns(&["r", "n", "rank", "fpdim", "method", "iterations"]);
    for l in &report.levels {
        rec.row(vec![
            l.r.to_string(),
            l.n.to_string(),
            l.rank.to_string(),
            real(l.value),
            l.method.as_str().to_string(),
            l.iterations.to_string(),
        ]);
    }
    rec.summary("target", &report.target_exact);
    rec.summary("last", real(report.raw_last));
    rec.summary("extrapolated", real(report.extrapolated));
    rec.summary(
        "extrapolated_gap",
        real((report.extrapolated - report.target).abs()),
    );
    rec.summary("strictly_increasing", report.strictly_increasing);
    rec.summary("converged", report.converged);
    rec.note("extrapolation fits a + b/n^2 through the last two levels");
    let spectral = report
        .levels
        .iter()
        .filter(|l| l.method != LevelMethod::ClosedForm)
        .count();
    rec.note(format!(
        "{spectral} levels by power iteration, the rest by closed form"
    ));
    if !report.constant && !report.strictly_increasing {
        rec.violation("per-level FPdim is not strictly increasing");
    }
    if !report.bounded_by_target {
        rec.violation("a per-level FPdim exceeds the limit");
    }
    if report.max_closed_form_deviation > CLOSED_FORM_GAP {
        rec.violation(format!(
            "power iteration differs from the closed form by {:e}",
            report.max_closed_form_deviation
        ));
    }
    Ok(rec)
}

fn galkin(k_max: usize, n_max: usize) -> Result<OutputRecord> {
    let mut rec = OutputRecord::new("galkin");
    rec.param("k_max", k_max).param("n_max", n_max);
    rec.columns(&["k", "n", "n_rho", "k(n-k)+1", "equality"]);
    let mut cases = 0usize;
    let mut equalities = 0usize;
    for k in 1..=k_max {
        for n in k + 1..=n_max {
            let g = galkin_check(k, n)?;
            cases += 1;
            equalities += usize::from(g.equality);
            rec.row(vec![
                k.to_string(),
                n.to_string(),
                real(g.lhs),
                real(g.rhs),
                g.equality.to_string(),
            ]);
            if g.lhs < g.rhs - 1e-9 {
                rec.violation(format!("Gr({k},{n}): {} < {}", g.lhs, g.rhs));
            }
            if g.equality != (k == 1 || k == n - 1) {
                rec.violation(format!(
                    "Gr({k},{n}): equality is {} but k = {k}",
                    g.equality
                ));
            }
        }
    }
    if cases == 0 {
        return Err(Error::Parameter("no Grassmannians in range".into()));
    }
    rec.summary("cases", cases);
    rec.summary("equality_cases", equalities);
    Ok(rec)
}

fn verify(suite: Suite, global: &GlobalOpts) -> Result<OutputRecord> {
    let mut rec = OutputRecord::new("verify");
    rec.param("suite", suite.as_str());
    rec.columns(&["suite", "check", "passed", "detail"]);
    let outcomes = run_suite(suite, &global.spectral());
    for o in &outcomes {
        rec.row(vec![
            o.suite.clone(),
            o.name.clone(),
            o.passed.to_string(),
            o.detail.clone(),
        ]);
        if !o.passed {
            rec.violation(format!("{}: {}: {}", o.suite, o.name, o.detail));
        }
    }
    rec.summary("checks", outcomes.len());
    rec.summary("failed", outcomes.iter().filter(|o| !o.passed).count());
    Ok(rec)
}
