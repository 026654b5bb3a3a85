//! Filtered families of ℤ₊-rings indexed by a level `r ≥ 0`, with level `r`
//! living on the basis `P_k(k + r)`.
//!
//! * Classical: the cup product of `Gr(k, k+r)` with classes outside the box
//!   dropped. Every non-identity class acts nilpotently.
//! * Verlinde: the fusion ring of `U(k)` at level `r`, realised as the
//!   quantum cohomology of `Gr(k, k+r)` at `q = 1`.
//!
//! Level 0 is the rank-one ring spanned by the identity.

use std::collections::BTreeSet;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::{table_with_cache, TableCache};
use crate::closed_form::{big_to_f64, RhoFunction};
use crate::error::{Error, Result};
use crate::partition::{binomial, GrContext, Partition};
use crate::quantum::{multiplication_operator, quantum_product, ProductMode};
use crate::spectral::{
    check_ring_homomorphism, fpdim_basis, spectral_radius, SparseMatrix, SpectralMethod,
    SpectralOptions, ZPlusRingTable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiltrationMode {
    Classical,
    Verlinde,
}

impl FiltrationMode {
    pub fn product_mode(self) -> ProductMode {
        match self {
            FiltrationMode::Classical => ProductMode::ClassicalTruncated,
            FiltrationMode::Verlinde => ProductMode::Quantum,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FiltrationMode::Classical => "classical",
            FiltrationMode::Verlinde => "verlinde",
        }
    }
}

impl From<ProductMode> for FiltrationMode {
    fn from(mode: ProductMode) -> Self {
        match mode {
            ProductMode::Quantum => FiltrationMode::Verlinde,
            ProductMode::ClassicalTruncated => FiltrationMode::Classical,
        }
    }
}

/// One built level.
#[derive(Debug, Clone)]
pub struct Level {
    pub r: usize,
    /// `None` at level 0, where there is no Grassmannian.
    pub ctx: Option<Arc<GrContext>>,
    pub ring: ZPlusRingTable,
}

/// Default number of built levels kept in memory.
pub const DEFAULT_LEVEL_CAPACITY: usize = 8;

/// Default largest level rank on which `fpd_bullet` runs power iteration.
pub const DEFAULT_MAX_SPECTRAL_RANK: usize = 20_000;

#[derive(Debug)]
pub struct FilteredFamily {
    k: usize,
    mode: FiltrationMode,
    capacity: usize,
    max_spectral_rank: usize,
    spectral: SpectralOptions,
    table_cache: Option<TableCache>,
    /// Most recently used last.
    levels: Mutex<Vec<Arc<Level>>>,
    corrupted: Mutex<BTreeSet<usize>>,
}

impl FilteredFamily {
    pub fn new(k: usize, mode: FiltrationMode) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("k must be positive"));
        }
        Ok(FilteredFamily {
            k,
            mode,
            capacity: DEFAULT_LEVEL_CAPACITY,
            max_spectral_rank: DEFAULT_MAX_SPECTRAL_RANK,
            spectral: SpectralOptions::default(),
            table_cache: None,
            levels: Mutex::new(Vec::new()),
            corrupted: Mutex::new(BTreeSet::new()),
        })
    }

    pub fn with_table_cache(mut self, cache: TableCache) -> Self {
        self.table_cache = Some(cache);
        self
    }

    pub fn with_level_capacity(mut self, capacity: usize) -> Self {
        self.capacity = capacity.max(1);
        self
    }

    /// Levels of larger rank are evaluated by the closed form in
    /// `fpd_bullet` instead of power iteration.
    pub fn with_max_spectral_rank(mut self, rank: usize) -> Self {
        self.max_spectral_rank = rank;
        self
    }

    pub fn with_spectral_options(mut self, opts: SpectralOptions) -> Self {
        self.spectral = opts;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mode(&self) -> FiltrationMode {
        self.mode
    }

    /// Negative control: from now on level `r` is built with one structure
    /// constant raised by one (`σ_1 σ_1` gains an extra `σ_1`). Needs `r ≥ 1`.
    #[doc(hidden)]
    pub fn corrupt_level(&self, r: usize) -> Result<()> {
        if r == 0 {
            return Err(Error::param("level 0 has no divisor class to corrupt"));
        }
        self.corrupted
            .lock()
            .expect("family lock poisoned")
            .insert(r);
        self.levels
            .lock()
            .expect("family lock poisoned")
            .retain(|l| l.r != r);
        Ok(())
    }

    /// Number of levels currently held in memory.
    pub fn cached_levels(&self) -> Vec<usize> {
        self.levels
            .lock()
            .expect("family lock poisoned")
            .iter()
            .map(|l| l.r)
            .collect()
    }

    fn context(&self, r: usize) -> Result<Option<GrContext>> {
        if r == 0 {
            Ok(None)
        } else {
            GrContext::new(self.k, self.k + r).map(Some)
        }
    }

    /// The ring at level `r`, built on first use.
    pub fn build_level(&self, r: usize) -> Result<Arc<Level>> {
        {
            let mut levels = self.levels.lock().expect("family lock poisoned");
            if let Some(pos) = levels.iter().position(|l| l.r == r) {
                let level = levels.remove(pos);
                levels.push(Arc::clone(&level));
                return Ok(level);
            }
        }
        let level = Arc::new(self.construct_level(r)?);
        let mut levels = self.levels.lock().expect("family lock poisoned");
        if let Some(existing) = levels.iter().find(|l| l.r == r) {
            return Ok(Arc::clone(existing));
        }
        levels.push(Arc::clone(&level));
        if levels.len() > self.capacity {
            levels.remove(0);
        }
        Ok(level)
    }

    /// Builds several levels in parallel.
    pub fn build_levels(&self, rs: &[usize]) -> Result<Vec<Arc<Level>>> {
        rs.par_iter().map(|&r| self.build_level(r)).collect()
    }

    fn construct_level(&self, r: usize) -> Result<Level> {
        let Some(ctx) = self.context(r)? else {
            let ring = ZPlusRingTable::new(
                vec![Partition::empty().to_string()],
                0,
                vec![vec![[(0, 1)].into_iter().collect()]],
            )?;
            return Ok(Level { r, ctx: None, ring });
        };
        let table = table_with_cache(&ctx, self.mode.product_mode(), self.table_cache.as_ref())?;
        let mut ring = ZPlusRingTable::from_product_table(&table)?;
        if self
            .corrupted
            .lock()
            .expect("family lock poisoned")
            .contains(&r)
        {
            let one = ctx.position(&Partition::new(vec![1])?)?;
            ring = ring.with_bumped_constant(one, one, one);
        }
        Ok(Level {
            r,
            ctx: Some(Arc::new(ctx)),
            ring,
        })
    }

    /// Coefficient of `ν` in `λ ⋆_r μ`: the quantum structure constants of
    /// `Gr(k, k+r)` summed over `q`-degrees.
    pub fn fusion_coefficient(
        &self,
        lambda: &Partition,
        mu: &Partition,
        nu: &Partition,
        r: usize,
    ) -> Result<u64> {
        if self.mode != FiltrationMode::Verlinde {
            return Err(Error::param("fusion coefficients need a Verlinde family"));
        }
        match self.context(r)? {
            None => {
                if [lambda, mu, nu].iter().all(|p| p.is_empty()) {
                    Ok(1)
                } else {
                    Err(Error::param("level 0 contains only the empty partition"))
                }
            }
            Some(ctx) => {
                ctx.position(nu)?;
                Ok(quantum_product(lambda, mu, &ctx)?.q_one_coefficient(nu))
            }
        }
    }

    /// `FPdim_{A_r}(λ)` at one level.
    pub fn level_fpdim(&self, lambda: &Partition, r: usize) -> Result<LevelFpdim> {
        if lambda.first() > r || lambda.length() > self.k {
            return Err(Error::param(format!(
                "{lambda} is not in level {r} of the k = {} family",
                self.k
            )));
        }
        let n = self.k + r;
        let rank = binomial(n as u64, self.k as u64)
            .and_then(|b| usize::try_from(b).ok())
            .ok_or_else(|| Error::Overflow(format!("rank of level {r}")))?;
        let closed_form = match self.mode {
            FiltrationMode::Verlinde => Some(RhoFunction::new(lambda, self.k)?.eval(n as f64)?),
            FiltrationMode::Classical => None,
        };
        let use_spectral = self.mode == FiltrationMode::Classical || rank <= self.max_spectral_rank;
        if !use_spectral {
            return Ok(LevelFpdim {
                r,
                n,
                rank,
                value: closed_form.expect("verlinde mode"),
                method: LevelMethod::ClosedForm,
                iterations: 0,
                closed_form,
            });
        }
        let operator = match self.context(r)? {
            None => SparseMatrix::identity(1),
            Some(ctx) => multiplication_operator(lambda, &ctx, self.mode.product_mode())?,
        };
        let est = spectral_radius(&operator, &self.spectral)?;
        Ok(LevelFpdim {
            r,
            n,
            rank,
            value: est.radius,
            method: est.method.into(),
            iterations: est.iterations,
            closed_form,
        })
    }

    /// Per-level Frobenius–Perron dimensions of `λ` along `schedule` and an
    /// estimate of their limit.
    ///
    /// Levels below `λ_1` do not contain `λ` and are rejected rather than
    /// counted as 0. In Verlinde mode the limit is estimated by fitting
    /// `a + b / n²` through the last two levels; the target is
    /// `dim 𝕊_λ(ℂ^k)`. In classical mode the target is 1 for the identity
    /// and 0 otherwise, and every level must hit it exactly.
    pub fn fpd_bullet(
        &self,
        lambda: &Partition,
        schedule: &[usize],
        tol: f64,
    ) -> Result<FpdLimitReport> {
        if schedule.is_empty() || schedule.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param(
                "level schedule must be nonempty and strictly increasing",
            ));
        }
        if lambda.length() > self.k {
            return Err(Error::param(format!(
                "{lambda} has more than k = {} rows",
                self.k
            )));
        }
        if schedule[0] < lambda.first() {
            return Err(Error::param(format!(
                "schedule starts at level {} but {lambda} first appears at level {}",
                schedule[0],
                lambda.first()
            )));
        }
        let levels = schedule
            .par_iter()
            .map(|&r| self.level_fpdim(lambda, r))
            .collect::<Result<Vec<_>>>()?;
        let rf = RhoFunction::new(lambda, self.k)?;
        let (target, target_exact) = match self.mode {
            FiltrationMode::Verlinde => {
                let dim = rf.limit()?;
                (big_to_f64(&dim), dim.to_string())
            }
            FiltrationMode::Classical => {
                let t = u8::from(lambda.is_empty());
                (f64::from(t), t.to_string())
            }
        };
        let last = levels.last().expect("schedule is nonempty");
        let raw_last = last.value;
        let extrapolated = match (self.mode, levels.len()) {
            (FiltrationMode::Verlinde, len) if len >= 2 => {
                let prev = &levels[len - 2];
                let (n1, n2) = ((prev.n * prev.n) as f64, (last.n * last.n) as f64);
                (n2 * last.value - n1 * prev.value) / (n2 - n1)
            }
            _ => raw_last,
        };
        let constant = self.mode == FiltrationMode::Classical || rf.is_constant();
        let strictly_increasing = levels.windows(2).all(|w| w[1].value > w[0].value);
        let bounded_by_target = levels.iter().all(|l| l.value <= target * (1.0 + 1e-12));
        let max_closed_form_deviation = levels
            .iter()
            .filter(|l| l.method != LevelMethod::ClosedForm)
            .filter_map(|l| l.closed_form.map(|c| (c - l.value).abs()))
            .fold(0.0, f64::max);
        let converged = match self.mode {
            FiltrationMode::Classical => levels.iter().all(|l| l.value == target),
            FiltrationMode::Verlinde => {
                (extrapolated - target).abs() <= tol
                    && max_closed_form_deviation <= 1e-8
                    && bounded_by_target
                    && (constant || strictly_increasing)
            }
        };
        Ok(FpdLimitReport {
            k: self.k,
            mode: self.mode,
            lambda: lambda.to_string(),
            target,
            target_exact,
            raw_last,
            extrapolated,
            constant,
            strictly_increasing,
            bounded_by_target,
            max_closed_form_deviation,
            tol,
            converged,
            levels,
        })
    }

    /// Checks the filtration axioms on the given levels: consecutive label
    /// sets are nested, level `r` has rank `C(k+r, k)`, the empty partition
    /// is a two-sided identity everywhere, and each level's FPdim is a ring
    /// homomorphism to relative tolerance `tol`.
    pub fn check_zbullet_axioms(&self, rs: &[usize], tol: f64) -> Result<AxiomReport> {
        if rs.len() < 3 || rs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param(
                "need at least three strictly increasing levels",
            ));
        }
        let built = self.build_levels(rs)?;
        let identity_label = Partition::empty().to_string();
        let mut levels = Vec::with_capacity(built.len());
        for (idx, level) in built.iter().enumerate() {
            let ring = &level.ring;
            let expected_rank = binomial((self.k + level.r) as u64, self.k as u64)
                .and_then(|b| usize::try_from(b).ok())
                .ok_or_else(|| Error::Overflow("binomial coefficient".into()))?;
            let nested = idx == 0 || {
                let labels: BTreeSet<&String> = ring.labels().iter().collect();
                built[idx - 1]
                    .ring
                    .labels()
                    .iter()
                    .all(|l| labels.contains(l))
            };
            let identity = ring.index_of(&identity_label).is_some_and(|e| {
                (0..ring.rank())
                    .all(|j| ring.product(e, j) == [(j, 1)] && ring.product(j, e) == [(j, 1)])
            });
            let report = fpdim_basis(ring, &self.spectral)?;
            let violations = check_ring_homomorphism(ring, &report, tol).len();
            let rank_ok = ring.rank() == expected_rank;
            levels.push(LevelAxioms {
                r: level.r,
                rank: ring.rank(),
                expected_rank,
                rank_ok,
                nested,
                identity,
                homomorphism_violations: violations,
                passed: rank_ok && nested && identity && violations == 0,
            });
        }
        let passed = levels.iter().all(|l| l.passed);
        Ok(AxiomReport {
            k: self.k,
            mode: self.mode,
            levels,
            passed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelMethod {
    PowerIteration,
    ExactZeroByNilpotency,
    ClosedForm,
}

impl LevelMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            LevelMethod::PowerIteration => "power-iteration",
            LevelMethod::ExactZeroByNilpotency => "exact-zero-by-nilpotency",
            LevelMethod::ClosedForm => "closed-form",
        }
    }
}

impl From<SpectralMethod> for LevelMethod {
    fn from(m: SpectralMethod) -> Self {
        match m {
            SpectralMethod::PowerIteration => LevelMethod::PowerIteration,
            SpectralMethod::ExactZeroByNilpotency => LevelMethod::ExactZeroByNilpotency,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelFpdim {
    pub r: usize,
    pub n: usize,
    pub rank: usize,
    pub value: f64,
    pub method: LevelMethod,
    pub iterations: usize,
    /// The sine-product value at `n = k + r` (Verlinde mode only).
    pub closed_form: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FpdLimitReport {
    pub k: usize,
    pub mode: FiltrationMode,
    pub lambda: String,
    pub levels: Vec<LevelFpdim>,
    pub target: f64,
    pub target_exact: String,
    pub raw_last: f64,
    pub extrapolated: f64,
    /// The per-level sequence is constant by theory (classical mode or a
    /// rectangular `λ`), so strict increase is not expected.
    pub constant: bool,
    pub strictly_increasing: bool,
    pub bounded_by_target: bool,
    /// Largest `|spectral − closed form|` over levels computed spectrally.
    pub max_closed_form_deviation: f64,
    pub tol: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelAxioms {
    pub r: usize,
    pub rank: usize,
    pub expected_rank: usize,
    pub rank_ok: bool,
    /// The previous checked level's labels are all present here.
    pub nested: bool,
    pub identity: bool,
    pub homomorphism_violations: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub k: usize,
    pub mode: FiltrationMode,
    pub levels: Vec<LevelAxioms>,
    pub passed: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::build_table;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn verlinde_level_is_quantum_table_at_q_one() {
        let fam = FilteredFamily::new(2, FiltrationMode::Verlinde).unwrap();
        let level = fam.build_level(2).unwrap();
        let ctx = GrContext::new(2, 4).unwrap();
        let expect =
            ZPlusRingTable::from_product_table(&build_table(&ctx, ProductMode::Quantum).unwrap())
                .unwrap();
        assert_eq!(level.ring, expect);
    }

    #[test]
    fn level_zero_is_trivial() {
        for mode in [FiltrationMode::Classical, FiltrationMode::Verlinde] {
            let fam = FilteredFamily::new(3, mode).unwrap();
            let level = fam.build_level(0).unwrap();
            assert_eq!(level.ring.rank(), 1);
            assert_eq!(fam.level_fpdim(&Partition::empty(), 0).unwrap().value, 1.0);
        }
    }

    #[test]
    fn fusion_coefficients() {
        let fam = FilteredFamily::new(2, FiltrationMode::Verlinde).unwrap();
        assert_eq!(
            fam.fusion_coefficient(&p(&[2, 2]), &p(&[1]), &p(&[1]), 2)
                .unwrap(),
            1
        );
        assert_eq!(
            fam.fusion_coefficient(&p(&[1]), &p(&[1]), &p(&[1]), 2)
                .unwrap(),
            0
        );
        for nu in GrContext::new(2, 5).unwrap().basis() {
            let expect = u64::from(nu == &p(&[2, 1]));
            assert_eq!(
                fam.fusion_coefficient(&Partition::empty(), &p(&[2, 1]), nu, 3)
                    .unwrap(),
                expect
            );
        }
        assert!(fam
            .fusion_coefficient(&p(&[3]), &p(&[1]), &p(&[1]), 2)
            .is_err());
        let classical = FilteredFamily::new(2, FiltrationMode::Classical).unwrap();
        assert!(classical
            .fusion_coefficient(&p(&[1]), &p(&[1]), &p(&[2]), 2)
            .is_err());
    }

    #[test]
    fn lru_keeps_capacity() {
        let fam = FilteredFamily::new(1, FiltrationMode::Verlinde)
            .unwrap()
            .with_level_capacity(2);
        for r in 0..5 {
            fam.build_level(r).unwrap();
        }
        assert_eq!(fam.cached_levels(), vec![3, 4]);
        fam.build_level(3).unwrap();
        assert_eq!(fam.cached_levels(), vec![4, 3]);
    }

    #[test]
    fn classical_fpd_is_indicator() {
        let fam = FilteredFamily::new(2, FiltrationMode::Classical).unwrap();
        let r = fam.fpd_bullet(&p(&[1]), &[1, 2, 3, 5], 1e-9).unwrap();
        assert!(r.converged && r.levels.iter().all(|l| l.value == 0.0));
        assert!(r
            .levels
            .iter()
            .all(|l| l.method == LevelMethod::ExactZeroByNilpotency));
        let r = fam
            .fpd_bullet(&Partition::empty(), &[0, 1, 2], 1e-9)
            .unwrap();
        assert!(r.converged && r.levels.iter().all(|l| l.value == 1.0));
    }

    #[test]
    fn verlinde_fpd_of_divisor() {
        let fam = FilteredFamily::new(2, FiltrationMode::Verlinde).unwrap();
        let schedule: Vec<usize> = (1..=40).collect();
        let r = fam.fpd_bullet(&p(&[1]), &schedule, 1e-5).unwrap();
        assert_eq!(r.target_exact, "2");
        assert!(
            r.strictly_increasing && r.bounded_by_target && r.converged,
            "{r:?}"
        );
        assert!(r.max_closed_form_deviation <= 1e-8);
    }

    #[test]
    fn closed_form_fallback_above_rank_cap() {
        let fam = FilteredFamily::new(2, FiltrationMode::Verlinde)
            .unwrap()
            .with_max_spectral_rank(10);
        let r = fam.fpd_bullet(&p(&[1]), &[1, 2, 3, 10], 1e-1).unwrap();
        let methods: Vec<_> = r.levels.iter().map(|l| l.method).collect();
        assert_eq!(
            methods,
            vec![
                LevelMethod::PowerIteration,
                LevelMethod::PowerIteration,
                LevelMethod::PowerIteration,
                LevelMethod::ClosedForm
            ]
        );
    }

    #[test]
    fn schedule_validation() {
        let fam = FilteredFamily::new(2, FiltrationMode::Verlinde).unwrap();
        assert!(fam.fpd_bullet(&p(&[2, 1]), &[1, 2, 3], 1e-3).is_err());
        assert!(fam.fpd_bullet(&p(&[1]), &[3, 2], 1e-3).is_err());
        assert!(fam.fpd_bullet(&p(&[1]), &[], 1e-3).is_err());
        assert!(fam.fpd_bullet(&p(&[1, 1, 1]), &[3], 1e-3).is_err());
    }

    #[test]
    fn axioms_hold_and_corruption_is_caught() {
        let fam = FilteredFamily::new(2, FiltrationMode::Verlinde).unwrap();
        let report = fam.check_zbullet_axioms(&[0, 1, 2, 3], 1e-6).unwrap();
        assert!(report.passed, "{report:?}");
        fam.corrupt_level(2).unwrap();
        let report = fam.check_zbullet_axioms(&[0, 1, 2, 3], 1e-6).unwrap();
        assert!(!report.passed);
        assert!(report.levels.iter().filter(|l| !l.passed).all(|l| l.r == 2));
        assert!(fam.check_zbullet_axioms(&[0, 1], 1e-6).is_err());
    }
}
