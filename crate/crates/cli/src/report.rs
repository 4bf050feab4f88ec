//! JSON documents: approximation results, their verification reports and
//! isometry inputs for `synth-isometry`.

use num_bigint::BigInt;
use num_rational::BigRational;
use rus_core::circuit::{stats, Circuit};
use rus_core::isometry::{isometry_from_vectors, recovery_unitary, Isometry, Recovery};
use rus_core::params::parse_decimal;
use rus_core::pauli::{QuatVec, TargetUnitary};
use rus_core::pipeline::{verify_parts, Attempts, Config, Selection, SynthesisResult};
use rus_core::ring::{GaussianInt, RingElem};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::export::{gates_from_json, gates_to_json, FormatError, GateJson};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
}

fn field(field: &'static str, reason: impl ToString) -> ReportError {
    ReportError::Field {
        field,
        reason: reason.to_string(),
    }
}

/// `a/b` in lowest terms, with `b = 1` kept explicit.
pub fn fraction(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `a/b` or a plain decimal.
pub fn parse_fraction(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (BigInt, BigInt) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            (b != BigInt::from(0)).then(|| BigRational::new(a, b))
        }
        None => parse_decimal(s).ok(),
    }
}

fn quat_strings(v: &QuatVec) -> [String; 4] {
    v.components().clone().map(|x| x.to_string())
}

fn parse_quat(name: &'static str, v: &[String; 4]) -> Result<QuatVec, ReportError> {
    let mut out = [BigInt::from(0), BigInt::from(0), BigInt::from(0), BigInt::from(0)];
    for (slot, s) in out.iter_mut().zip(v) {
        *slot = s.parse().map_err(|_| field(name, format!("`{s}` is not an integer")))?;
    }
    Ok(QuatVec(out))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetJson {
    pub vector: [f64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub epsilon: f64,
    pub p_fail: String,
    pub n_start: u32,
    pub n_max: u32,
    pub candidates_per_n: usize,
    pub norm_solutions_per_candidate: usize,
    pub search_budget: usize,
    pub heuristic_scale: u32,
    pub enum_budget: usize,
    pub seed: u64,
    pub selection: String,
    pub lookahead: u32,
}

impl From<&Config> for ConfigJson {
    fn from(c: &Config) -> Self {
        Self {
            epsilon: c.epsilon,
            p_fail: fraction(&c.p_fail),
            n_start: c.n_start,
            n_max: c.n_max,
            candidates_per_n: c.candidates_per_n,
            norm_solutions_per_candidate: c.norm_solutions_per_candidate,
            search_budget: c.search_budget,
            heuristic_scale: c.heuristic_scale,
            enum_budget: c.enum_budget,
            seed: c.seed,
            selection: c.selection.name().into(),
            lookahead: c.lookahead,
        }
    }
}

impl ConfigJson {
    pub fn to_config(&self) -> Result<Config, ReportError> {
        let p = parse_fraction(&self.p_fail).ok_or_else(|| field("config.p_fail", "not a fraction"))?;
        let selection: Selection = self.selection.parse().map_err(|e| field("config.selection", e))?;
        Ok(Config {
            epsilon: self.epsilon,
            p_fail: p,
            n_start: self.n_start,
            n_max: self.n_max,
            candidates_per_n: self.candidates_per_n,
            norm_solutions_per_candidate: self.norm_solutions_per_candidate,
            search_budget: self.search_budget,
            heuristic_scale: self.heuristic_scale,
            enum_budget: self.enum_budget,
            seed: self.seed,
            selection,
            lookahead: self.lookahead,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsJson {
    pub total: usize,
    pub cs: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationJson {
    pub exact_match: bool,
    pub norm_identity: bool,
    pub success_bound_ok: bool,
    pub error_ok: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelJson {
    #[serde(rename = "N")]
    pub n: u32,
    pub points: usize,
    pub candidates: usize,
    pub jobs: usize,
    pub synthesized: usize,
    pub exhausted: usize,
    pub expanded: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptsJson {
    pub jobs: usize,
    pub synthesized: usize,
    pub expanded: usize,
    pub levels: Vec<LevelJson>,
}

impl From<&Attempts> for AttemptsJson {
    fn from(a: &Attempts) -> Self {
        Self {
            jobs: a.jobs(),
            synthesized: a.synthesized(),
            expanded: a.expanded(),
            levels: a
                .levels
                .iter()
                .map(|l| LevelJson {
                    n: l.n,
                    points: l.points,
                    candidates: l.candidates,
                    jobs: l.jobs,
                    synthesized: l.synthesized,
                    exhausted: l.exhausted,
                    expanded: l.expanded,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryJson {
    pub u1: [String; 4],
    pub norm_sq: String,
}

/// The result of `approximate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultJson {
    pub target: TargetJson,
    pub config: ConfigJson,
    #[serde(rename = "N")]
    pub n: u32,
    pub u0: [String; 4],
    pub u1: [String; 4],
    pub success_prob: String,
    pub failure_prob: String,
    pub error_bound: f64,
    pub phase_exp: u8,
    pub gates: Vec<GateJson>,
    pub counts: CountsJson,
    pub verification: VerificationJson,
    pub attempts: AttemptsJson,
    /// Recovery `R1` after the failure outcome; `null` when that branch is
    /// unreachable.
    pub recovery: Option<RecoveryJson>,
    /// Results for the follow-up targets `U·R1†` of later rounds.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub followups: Vec<ResultJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl ResultJson {
    pub fn new(result: &SynthesisResult, cfg: &Config, spec: Option<&str>) -> Self {
        let plan = &result.plan;
        let v = &result.verification;
        Self {
            target: TargetJson {
                vector: *result.target.vector(),
                spec: spec.map(str::to_string),
            },
            config: ConfigJson::from(cfg),
            n: plan.n(),
            u0: quat_strings(plan.u0()),
            u1: quat_strings(plan.u1()),
            success_prob: fraction(&plan.success_prob()),
            failure_prob: fraction(&plan.failure_prob()),
            error_bound: v.error_bound,
            phase_exp: result.phase_exp,
            gates: gates_to_json(&result.circuit.gates),
            counts: CountsJson {
                total: result.counts.total,
                cs: result.counts.cs,
                depth: result.counts.depth,
            },
            verification: VerificationJson {
                exact_match: v.exact_match,
                norm_identity: v.norm_identity,
                success_bound_ok: v.success_bound_ok,
                error_ok: v.error_ok,
                passed: v.passed(),
            },
            attempts: AttemptsJson::from(&result.attempts),
            recovery: match recovery_unitary(plan) {
                Recovery::Unitary { u1, norm_sq } => Some(RecoveryJson {
                    u1: quat_strings(&u1),
                    norm_sq: norm_sq.to_string(),
                }),
                Recovery::Unreachable => None,
            },
            followups: Vec::new(),
            timestamp: None,
        }
    }

    pub fn to_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Slack allowed between a claimed and a recomputed error bound; the target
/// is renormalised when read back, which can move the last few bits.
const ERROR_CLAIM_TOLERANCE: f64 = 1e-12;

/// Independent re-check of one round of a result document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundCheck {
    pub round: usize,
    pub exact_match: bool,
    pub norm_identity: bool,
    pub success_prob: String,
    pub success_bound_ok: bool,
    pub error_bound: f64,
    pub error_ok: bool,
    /// Claimed probability, error and counts agree with the recomputed ones.
    pub claims_consistent: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub rounds: Vec<RoundCheck>,
}

fn check_round(round: usize, doc: &ResultJson, cfg: &Config) -> Result<RoundCheck, ReportError> {
    let target = TargetUnitary::from_vector(doc.target.vector).map_err(|e| field("target.vector", e))?;
    let circuit = Circuit::new(gates_from_json(&doc.gates)?);
    let u0 = parse_quat("u0", &doc.u0)?;
    let u1 = parse_quat("u1", &doc.u1)?;
    let v = verify_parts(&circuit, doc.n, &u0, &u1, doc.phase_exp, &target, cfg.epsilon, &cfg.p_fail);
    let counts = stats(&circuit);
    let claims_consistent = parse_fraction(&doc.success_prob).as_ref() == Some(&v.success_prob)
        && (doc.error_bound - v.error_bound).abs() <= ERROR_CLAIM_TOLERANCE
        && (doc.counts.total, doc.counts.cs, doc.counts.depth) == (counts.total, counts.cs, counts.depth);
    Ok(RoundCheck {
        round,
        exact_match: v.exact_match,
        norm_identity: v.norm_identity,
        success_prob: fraction(&v.success_prob),
        success_bound_ok: v.success_bound_ok,
        error_bound: v.error_bound,
        error_ok: v.error_ok,
        claims_consistent,
        passed: v.passed() && claims_consistent,
    })
}

/// Re-verifies a result document, including any follow-up rounds, from its
/// gates and `(N, u0, u1)` alone.
pub fn verify_document(doc: &ResultJson) -> Result<VerifyReport, ReportError> {
    let cfg = doc.config.to_config()?;
    let mut rounds = vec![check_round(0, doc, &cfg)?];
    for (i, f) in doc.followups.iter().enumerate() {
        rounds.push(check_round(i + 1, f, &cfg)?);
    }
    Ok(VerifyReport {
        passed: rounds.iter().all(|r| r.passed),
        rounds,
    })
}

/// An exact ring entry `(re + i·im) / (1+i)^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub re: String,
    pub im: String,
    pub k: u32,
}

impl From<&RingElem> for EntryJson {
    fn from(e: &RingElem) -> Self {
        Self {
            re: e.num().re.to_string(),
            im: e.num().im.to_string(),
            k: e.k(),
        }
    }
}

impl EntryJson {
    fn to_ring(&self) -> Result<RingElem, ReportError> {
        let re: BigInt = self.re.parse().map_err(|_| field("rows", format!("`{}` is not an integer", self.re)))?;
        let im: BigInt = self.im.parse().map_err(|_| field("rows", format!("`{}` is not an integer", self.im)))?;
        Ok(RingElem::reduce(GaussianInt::new(re, im), self.k))
    }
}

/// Input to `synth-isometry`: explicit rows, or the vectors of a plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IsometryJson {
    Rows {
        rows: Vec<Vec<EntryJson>>,
    },
    Plan {
        #[serde(rename = "N")]
        n: u32,
        u0: [String; 4],
        u1: [String; 4],
    },
}

impl IsometryJson {
    pub fn from_isometry(w: &Isometry) -> Self {
        IsometryJson::Rows {
            rows: w.iter().map(|row| row.iter().map(EntryJson::from).collect()).collect(),
        }
    }

    pub fn to_isometry(&self) -> Result<Isometry, ReportError> {
        match self {
            IsometryJson::Rows { rows } => {
                if rows.len() != 4 || rows.iter().any(|r| r.len() != 2) {
                    return Err(field("rows", "expected 4 rows of 2 entries"));
                }
                let mut w: Isometry = Default::default();
                for (r, row) in rows.iter().enumerate() {
                    for (c, e) in row.iter().enumerate() {
                        w[r][c] = e.to_ring()?;
                    }
                }
                Ok(w)
            }
            IsometryJson::Plan { n, u0, u1 } => Ok(isometry_from_vectors(*n, &parse_quat("u0", u0)?, &parse_quat("u1", u1)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions() {
        assert_eq!(fraction(&BigRational::from_integer(1.into())), "1/1");
        assert_eq!(parse_fraction("3/4"), Some(BigRational::new(3.into(), 4.into())));
        assert_eq!(parse_fraction("0.75"), Some(BigRational::new(3.into(), 4.into())));
        assert_eq!(parse_fraction("1/0"), None);
    }

    #[test]
    fn isometry_round_trip() {
        let w = isometry_from_vectors(3, &QuatVec::from_i64([2, 1, 1, 0]), &QuatVec::from_i64([1, 1, 0, 0]));
        let doc = IsometryJson::from_isometry(&w);
        let text = serde_json::to_string(&doc).unwrap();
        let back: IsometryJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_isometry().unwrap(), w);
        let plan: IsometryJson = serde_json::from_str(r#"{"N":3,"u0":["2","1","1","0"],"u1":["1","1","0","0"]}"#).unwrap();
        assert_eq!(plan.to_isometry().unwrap(), w);
    }

    #[test]
    fn entries_are_reduced() {
        // 2/(1+i)^2 = -i
        let e = EntryJson { re: "2".into(), im: "0".into(), k: 2 };
        assert_eq!(e.to_ring().unwrap(), RingElem::from_gaussian(GaussianInt::new(0, -1)));
    }

    #[test]
    fn bad_rows() {
        let doc: IsometryJson = serde_json::from_str(r#"{"rows":[[{"re":"1","im":"0","k":0}]]}"#).unwrap();
        assert!(doc.to_isometry().is_err());
    }
}
