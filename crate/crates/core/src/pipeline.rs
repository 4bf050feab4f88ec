//! End-to-end approximation: for increasing `N`, enumerate `u0` candidates,
//! complete each with `u1` from the four-squares solver, synthesize the
//! resulting isometry and keep the best verified circuit.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{evaluate, stats, Circuit, CircuitStats};
use crate::enumerate::{solve_problem31, GUARD};
use crate::isometry::{approx_error, build_plan, isometry_from_vectors, RusPlan};
use crate::norm_eq::{four_squares_multi, rank_by_spread};
use crate::params::{check_epsilon, check_probability, ParamError};
use crate::pauli::{quat_mul_f64, QuatVec, TargetUnitary};
use crate::synth::{match_columns, synthesize, SynthError, SynthOptions, DEFAULT_BUDGET, DEFAULT_HEURISTIC_SCALE};

/// Upper bound on region points kept per `N` before ranking.
pub const DEFAULT_ENUM_BUDGET: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Selection {
    /// Fewest CS gates, then fewest gates.
    #[default]
    MinCs,
    /// Fewest gates, then fewest CS gates.
    MinTotal,
    /// First success in enumeration order.
    First,
}

impl Selection {
    pub fn name(self) -> &'static str {
        match self {
            Selection::MinCs => "min_cs",
            Selection::MinTotal => "min_total",
            Selection::First => "first",
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Selection {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min_cs" => Ok(Selection::MinCs),
            "min_total" => Ok(Selection::MinTotal),
            "first" => Ok(Selection::First),
            other => Err(ConfigError::Selection(other.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("n_start ({n_start}) must not exceed n_max ({n_max})")]
    NRange { n_start: u32, n_max: u32 },
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("unknown selection '{0}' (expected min_cs, min_total or first)")]
    Selection(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub epsilon: f64,
    /// Maximum failure probability of the first round, held exactly.
    pub p_fail: BigRational,
    pub n_start: u32,
    pub n_max: u32,
    pub candidates_per_n: usize,
    pub norm_solutions_per_candidate: usize,
    pub search_budget: usize,
    pub heuristic_scale: u32,
    pub enum_budget: usize,
    pub seed: u64,
    pub selection: Selection,
    /// Extra `N` levels searched after the first level with a success.
    pub lookahead: u32,
}

impl Config {
    pub fn new(epsilon: f64, p_fail: BigRational) -> Self {
        Self {
            epsilon,
            p_fail,
            n_start: 2,
            n_max: 20,
            candidates_per_n: 16,
            norm_solutions_per_candidate: 4,
            search_budget: DEFAULT_BUDGET,
            heuristic_scale: DEFAULT_HEURISTIC_SCALE,
            enum_budget: DEFAULT_ENUM_BUDGET,
            seed: 0,
            selection: Selection::MinCs,
            lookahead: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        check_epsilon(self.epsilon)?;
        check_probability(&self.p_fail)?;
        if self.n_start > self.n_max {
            return Err(ConfigError::NRange {
                n_start: self.n_start,
                n_max: self.n_max,
            });
        }
        for (name, v) in [
            ("candidates_per_n", self.candidates_per_n),
            ("norm_solutions_per_candidate", self.norm_solutions_per_candidate),
            ("search_budget", self.search_budget),
            ("enum_budget", self.enum_budget),
            ("heuristic_scale", self.heuristic_scale as usize),
        ] {
            if v == 0 {
                return Err(ConfigError::ZeroCount(name));
            }
        }
        Ok(())
    }

    fn synth_options(&self) -> SynthOptions {
        SynthOptions {
            budget: self.search_budget,
            heuristic_scale: self.heuristic_scale,
        }
    }
}

/// One `(u0, u1)` synthesis task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub n: u32,
    pub candidate: usize,
    pub solution: usize,
    pub u0: QuatVec,
    pub u1: QuatVec,
}

pub type JobOutcome = Result<(RusPlan, crate::synth::Synthesis), SynthError>;

/// Executes independent synthesis jobs. Implementations may run them in
/// parallel but must return outcomes in job order.
pub trait JobRunner {
    fn run(&self, jobs: &[Job], work: &(dyn Fn(&Job) -> JobOutcome + Sync)) -> Vec<JobOutcome>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SequentialRunner;

impl JobRunner for SequentialRunner {
    fn run(&self, jobs: &[Job], work: &(dyn Fn(&Job) -> JobOutcome + Sync)) -> Vec<JobOutcome> {
        jobs.iter().map(work).collect()
    }
}

/// What happened at one value of `N`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LevelStats {
    pub n: u32,
    /// Region points passing the exact re-check (before truncation).
    pub points: usize,
    pub candidates: usize,
    pub jobs: usize,
    pub synthesized: usize,
    pub exhausted: usize,
    pub expanded: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Attempts {
    pub levels: Vec<LevelStats>,
}

impl Attempts {
    pub fn jobs(&self) -> usize {
        self.levels.iter().map(|l| l.jobs).sum()
    }

    pub fn synthesized(&self) -> usize {
        self.levels.iter().map(|l| l.synthesized).sum()
    }

    pub fn expanded(&self) -> usize {
        self.levels.iter().map(|l| l.expanded).sum()
    }
}

/// Independent checks of a result; each is computed from scratch.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    /// The circuit's first two columns equal `ζ8^phase_exp · W'`.
    pub exact_match: bool,
    /// `⟨u0,u0⟩ + ⟨u1,u1⟩ = 2^N`.
    pub norm_identity: bool,
    pub success_prob: BigRational,
    /// `success_prob ≥ 1 − p`, exactly.
    pub success_bound_ok: bool,
    pub error_bound: f64,
    /// `error_bound ≤ ε` up to [`GUARD`].
    pub error_ok: bool,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.exact_match && self.norm_identity && self.success_bound_ok && self.error_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub target: TargetUnitary,
    pub circuit: Circuit,
    pub plan: RusPlan,
    pub phase_exp: u8,
    pub counts: CircuitStats,
    pub verification: Verification,
    pub attempts: Attempts,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApproxError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("no synthesizable candidate for N in {n_start}..={n_max}")]
    Exhausted { n_start: u32, n_max: u32, attempts: Attempts },
}

fn job_seed(seed: u64, n: u32, candidate: usize) -> u64 {
    // splitmix64 finalizer over (seed, N, candidate)
    let mut z = seed ^ ((n as u64) << 40) ^ (candidate as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Jobs for one value of `N`, plus the number of region points found.
fn level_jobs(target: &TargetUnitary, cfg: &Config, n: u32) -> Result<(Vec<Job>, usize, usize), ConfigError> {
    let mut points = solve_problem31(target, cfg.epsilon, &cfg.p_fail, n, cfg.enum_budget)?;
    let found = points.len();
    points.truncate(cfg.candidates_per_n);
    let two_n = BigInt::one() << n as usize;
    let mut jobs = Vec::new();
    for (candidate, u0) in points.iter().enumerate() {
        let rest = &two_n - u0.norm_sq();
        let mut rng = ChaCha8Rng::seed_from_u64(job_seed(cfg.seed, n, candidate));
        let Ok(mut sols) = four_squares_multi(&rest, cfg.norm_solutions_per_candidate, &mut rng) else {
            continue;
        };
        rank_by_spread(&mut sols);
        for (solution, fs) in sols.into_iter().enumerate() {
            jobs.push(Job {
                n,
                candidate,
                solution,
                u0: u0.clone(),
                u1: fs.to_quat(),
            });
        }
    }
    Ok((jobs, found, points.len()))
}

fn run_job(job: &Job, opts: &SynthOptions) -> JobOutcome {
    let plan = build_plan(job.n, job.u0.clone(), job.u1.clone()).expect("four-squares output completes the norm");
    let out = synthesize(plan.w_prime(), opts)?;
    Ok((plan, out))
}

type SelectionKey = (usize, usize, u32, usize, usize);

fn selection_key(sel: Selection, job: &Job, counts: &CircuitStats) -> SelectionKey {
    let order = (job.n, job.candidate, job.solution);
    match sel {
        Selection::MinCs => (counts.cs, counts.total, order.0, order.1, order.2),
        Selection::MinTotal => (counts.total, counts.cs, order.0, order.1, order.2),
        Selection::First => (0, 0, order.0, order.1, order.2),
    }
}

/// Runs the full pipeline sequentially.
pub fn approximate(target: &TargetUnitary, cfg: &Config) -> Result<SynthesisResult, ApproxError> {
    approximate_with(target, cfg, &SequentialRunner)
}

pub fn approximate_with(target: &TargetUnitary, cfg: &Config, runner: &dyn JobRunner) -> Result<SynthesisResult, ApproxError> {
    cfg.validate()?;
    let opts = cfg.synth_options();
    let work = |job: &Job| run_job(job, &opts);
    let mut attempts = Attempts::default();
    let mut best: Option<(SelectionKey, RusPlan, crate::synth::Synthesis)> = None;
    let mut last_n = cfg.n_max;
    let mut n = cfg.n_start;
    while n <= last_n {
        let (jobs, points, candidates) = level_jobs(target, cfg, n)?;
        let outcomes = runner.run(&jobs, &work);
        let mut level = LevelStats {
            n,
            points,
            candidates,
            jobs: jobs.len(),
            ..LevelStats::default()
        };
        for (job, outcome) in jobs.iter().zip(outcomes) {
            match outcome {
                Ok((plan, synth)) => {
                    level.synthesized += 1;
                    level.expanded += synth.expanded;
                    let key = selection_key(cfg.selection, job, &stats(&synth.circuit));
                    if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
                        best = Some((key, plan, synth));
                    }
                }
                Err(SynthError::BudgetExhausted { expanded }) => {
                    level.exhausted += 1;
                    level.expanded += expanded;
                }
                Err(_) => level.exhausted += 1,
            }
        }
        if level.synthesized > 0 && last_n == cfg.n_max {
            last_n = n.saturating_add(cfg.lookahead).min(cfg.n_max);
        }
        attempts.levels.push(level);
        n += 1;
    }
    let Some((_, plan, synth)) = best else {
        return Err(ApproxError::Exhausted {
            n_start: cfg.n_start,
            n_max: cfg.n_max,
            attempts,
        });
    };
    let verification = verify(&synth.circuit, &plan, synth.phase_exp, target, cfg.epsilon, &cfg.p_fail);
    debug_assert!(verification.passed());
    Ok(SynthesisResult {
        target: *target,
        counts: stats(&synth.circuit),
        circuit: synth.circuit,
        plan,
        phase_exp: synth.phase_exp,
        verification,
        attempts,
    })
}

/// Re-checks a claimed result using only its circuit, `(N, u0, u1)` and the
/// reported phase.
pub fn verify(
    circuit: &Circuit,
    plan: &RusPlan,
    phase_exp: u8,
    target: &TargetUnitary,
    epsilon: f64,
    p_fail: &BigRational,
) -> Verification {
    verify_parts(circuit, plan.n(), plan.u0(), plan.u1(), phase_exp, target, epsilon, p_fail)
}

/// As [`verify`], for claims whose vectors may not even satisfy the norm
/// identity.
#[allow(clippy::too_many_arguments)]
pub fn verify_parts(
    circuit: &Circuit,
    n: u32,
    u0: &QuatVec,
    u1: &QuatVec,
    phase_exp: u8,
    target: &TargetUnitary,
    epsilon: f64,
    p_fail: &BigRational,
) -> Verification {
    let two_n = BigInt::one() << n as usize;
    let w = isometry_from_vectors(n, u0, u1);
    let exact_match = match_columns(&evaluate(circuit), &w) == Some(phase_exp % 8);
    let success_prob = BigRational::new(u0.norm_sq(), two_n.clone());
    let error_bound = approx_error(u0, target).unwrap_or(f64::INFINITY);
    Verification {
        exact_match,
        norm_identity: u0.norm_sq() + u1.norm_sq() == two_n,
        success_bound_ok: success_prob >= BigRational::one() - p_fail,
        success_prob,
        error_ok: error_bound <= epsilon + GUARD,
        error_bound,
    }
}

/// Verifies a result against the configuration it claims to satisfy.
pub fn verify_result(result: &SynthesisResult, cfg: &Config) -> Verification {
    verify(&result.circuit, &result.plan, result.phase_exp, &result.target, cfg.epsilon, &cfg.p_fail)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("the failure branch is unreachable (u1 = 0), so there is no follow-up target")]
pub struct UnreachableRecovery;

/// The target for the next round after a failure: `U · R1†`.
pub fn failure_followup(target: &TargetUnitary, plan: &RusPlan) -> Result<TargetUnitary, UnreachableRecovery> {
    if plan.u1().is_zero() {
        return Err(UnreachableRecovery);
    }
    let norm = libm::sqrt(plan.r1_norm_sq().to_f64().unwrap_or(f64::INFINITY));
    let r1 = plan.u1().conj().to_f64().map(|x| x / norm);
    let v = quat_mul_f64(target.vector(), &r1);
    let len = libm::sqrt(v.iter().map(|x| x * x).sum());
    TargetUnitary::from_vector(v.map(|x| x / len)).map_err(|_| UnreachableRecovery)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;
    use crate::params::parse_decimal;
    use crate::pauli::vector_to_complex_matrix;
    use num_complex::Complex64;
    use rand::Rng;

    fn cfg(eps: f64, p: &str) -> Config {
        Config::new(eps, parse_decimal(p).unwrap())
    }

    fn target(v: [f64; 4]) -> TargetUnitary {
        TargetUnitary::from_vector(v).unwrap()
    }

    #[test]
    fn identity_target() {
        let r = approximate(&TargetUnitary::identity(), &cfg(0.1, "0.5")).unwrap();
        assert_eq!(r.plan.n(), 2);
        assert_eq!(r.plan.u0(), &QuatVec::from_i64([2, 0, 0, 0]));
        assert!(r.plan.u1().is_zero());
        assert_eq!(r.verification.success_prob, BigRational::one());
        assert_eq!(r.verification.error_bound, 0.0);
        assert!(r.circuit.gates.iter().all(|g| g.kind().is_clifford()));
        assert!(r.verification.passed());
    }

    #[test]
    fn pauli_x_target() {
        let r = approximate(&target([0.0, 1.0, 0.0, 0.0]), &cfg(0.1, "0.5")).unwrap();
        assert_eq!(r.plan.n(), 2);
        assert_eq!(r.plan.u0(), &QuatVec::from_i64([0, 2, 0, 0]));
        assert_eq!(r.verification.error_bound, 0.0);
    }

    #[test]
    fn random_targets_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..4 {
            let t = TargetUnitary::random(&mut rng);
            let c = cfg(0.3, "0.5");
            let r = approximate(&t, &c).unwrap();
            assert!(r.verification.passed());
            assert_eq!(verify_result(&r, &c), r.verification);
        }
    }

    #[test]
    fn tampering_is_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = TargetUnitary::random(&mut rng);
        let c = cfg(0.3, "0.5");
        let r = approximate(&t, &c).unwrap();
        let non_clifford = r.circuit.gates.iter().position(|g| g.kind() == GateKind::CS || g.kind() == GateKind::CSdg);
        if let Some(i) = non_clifford {
            let mut tampered = r.circuit.clone();
            tampered.gates.remove(i);
            let v = verify(&tampered, &r.plan, r.phase_exp, &t, c.epsilon, &c.p_fail);
            assert!(!v.exact_match);
        }
        let strict = parse_decimal("0.0001").unwrap();
        let v = verify(&r.circuit, &r.plan, r.phase_exp, &t, c.epsilon, &strict);
        assert!(v.exact_match && !v.success_bound_ok && !v.passed());
        let v = verify(&r.circuit, &r.plan, (r.phase_exp + 1) % 8, &t, c.epsilon, &c.p_fail);
        assert!(!v.exact_match);
    }

    #[test]
    fn deterministic_under_seed() {
        let t = target([0.6, 0.0, 0.8, 0.0]);
        let mut c = cfg(0.1, "0.25");
        c.seed = 17;
        assert_eq!(approximate(&t, &c).unwrap(), approximate(&t, &c).unwrap());
    }

    #[test]
    fn selection_modes_agree_on_guarantees() {
        let t = target([0.6, 0.0, 0.8, 0.0]);
        let mut best_cs = None;
        for sel in [Selection::MinCs, Selection::MinTotal, Selection::First] {
            let mut c = cfg(0.3, "0.5");
            c.selection = sel;
            let r = approximate(&t, &c).unwrap();
            assert!(r.verification.passed());
            if sel == Selection::MinCs {
                best_cs = Some(r.counts.cs);
            } else {
                assert!(r.counts.cs >= best_cs.unwrap());
            }
        }
    }

    #[test]
    fn lookahead_never_worsens_cs() {
        let t = target([0.6, 0.0, 0.8, 0.0]);
        let c0 = cfg(0.3, "0.5");
        let mut c1 = c0.clone();
        c1.lookahead = 1;
        let a = approximate(&t, &c0).unwrap();
        let b = approximate(&t, &c1).unwrap();
        assert!(b.counts.cs <= a.counts.cs);
        assert_eq!(b.attempts.levels.len(), a.attempts.levels.len() + 1);
    }

    #[test]
    fn exhaustion_and_progress() {
        // nothing within 0.01 of this target at N ≤ 3
        let t = target([libm::cos(0.3), libm::sin(0.3), 0.0, 0.0]);
        let mut c = cfg(0.01, "0.5");
        c.n_max = 3;
        match approximate(&t, &c) {
            Err(ApproxError::Exhausted { attempts, .. }) => {
                let ns: Vec<u32> = attempts.levels.iter().map(|l| l.n).collect();
                assert_eq!(ns, [2, 3]);
            }
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(matches!(cfg(3.0, "0.5").validate(), Err(ConfigError::Param(ParamError::Epsilon(_)))));
        assert!(cfg(0.1, "1").validate().is_err());
        let mut c = cfg(0.1, "0.5");
        c.n_start = 5;
        c.n_max = 4;
        assert!(matches!(c.validate(), Err(ConfigError::NRange { .. })));
        c.n_max = 6;
        c.candidates_per_n = 0;
        assert_eq!(c.validate(), Err(ConfigError::ZeroCount("candidates_per_n")));
        assert_eq!("min_total".parse::<Selection>(), Ok(Selection::MinTotal));
        assert!("best".parse::<Selection>().is_err());
    }

    fn plan_with_u1(u1: [i64; 4]) -> RusPlan {
        let u1 = QuatVec::from_i64(u1);
        let n = 4;
        let rest = (BigInt::one() << n) - u1.norm_sq();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u0 = crate::norm_eq::four_squares(&rest, &mut rng).unwrap().to_quat();
        build_plan(n, u0, u1).unwrap()
    }

    #[test]
    fn followup_examples() {
        let plan = plan_with_u1([0, 1, 0, 0]);
        let f = failure_followup(&target([0.0, 1.0, 0.0, 0.0]), &plan).unwrap();
        assert!(f.vector().iter().zip([1.0, 0.0, 0.0, 0.0]).all(|(a, b)| (a - b).abs() < 1e-15));

        let plan = plan_with_u1([1, 1, 1, 0]);
        let u = plan.u1().to_f64().map(|x| x / libm::sqrt(3.0));
        let f = failure_followup(&target(u), &plan).unwrap();
        assert!((f.vector()[0] - 1.0).abs() < 1e-12);

        let unreachable = build_plan(2, QuatVec::from_i64([2, 0, 0, 0]), QuatVec::zero()).unwrap();
        assert_eq!(failure_followup(&TargetUnitary::identity(), &unreachable), Err(UnreachableRecovery));
    }

    #[test]
    fn followup_matches_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let u1: [i64; 4] = core::array::from_fn(|_| rng.gen_range(-2..=2));
            if u1 == [0; 4] || u1.iter().map(|x| x * x).sum::<i64>() >= 16 {
                continue;
            }
            let plan = plan_with_u1(u1);
            let t = TargetUnitary::random(&mut rng);
            let f = failure_followup(&t, &plan).unwrap();
            let norm = libm::sqrt(plan.r1_norm_sq().to_f64().unwrap());
            let r1 = vector_to_complex_matrix(&plan.u1().to_f64().map(|x| x / norm));
            let u = t.to_complex_matrix();
            let want: [[Complex64; 2]; 2] = core::array::from_fn(|a| {
                core::array::from_fn(|b| (0..2).map(|k| u[a][k] * r1[b][k].conj()).sum())
            });
            let got = f.to_complex_matrix();
            for a in 0..2 {
                for b in 0..2 {
                    assert!((got[a][b] - want[a][b]).norm() < 1e-10);
                }
            }
        }
    }
}
