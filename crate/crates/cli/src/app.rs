//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rus_core::circuit::{evaluate, stats, Circuit};
use rus_core::enumerate::solve_problem31;
use rus_core::isometry::approx_error;
use rus_core::norm_eq::four_squares_multi;
use rus_core::params::{check_epsilon, check_probability, parse_decimal, rational_to_f64};
use rus_core::pauli::TargetUnitary;
use rus_core::pipeline::{approximate_with, failure_followup, ApproxError, Config, Selection};
use rus_core::synth::{match_columns, synthesize, SynthError, SynthOptions, DEFAULT_BUDGET, DEFAULT_HEURISTIC_SCALE};
use num_rational::BigRational;
use num_traits::One;
use serde_json::json;

use crate::export::{gates_to_json, to_qasm, Format, QasmOptions};
use crate::report::{fraction, verify_document, AttemptsJson, IsometryJson, ResultJson};
use crate::runner::ThreadedRunner;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_EXHAUSTED: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "rus-synth", version, about = "Repeat-until-success Clifford+CS approximation of one-qubit unitaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Approximate a target unitary by an RUS circuit.
    Approximate(ApproximateArgs),
    /// Re-verify a result JSON produced by `approximate`.
    Verify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Exact synthesis of a 4×2 isometry given as JSON.
    SynthIsometry {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = DEFAULT_HEURISTIC_SCALE)]
        heuristic_scale: u32,
    },
    /// Write a nonnegative integer as a sum of four squares.
    FourSquares {
        m: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List candidate u0 vectors for a single N.
    Enumerate {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        n: u32,
        /// Maximum number of candidates printed.
        #[arg(long, default_value_t = 64)]
        limit: usize,
    },
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// coeffs:a,b,c,d | axis:x|y|z|nx,ny,nz:theta | matrix:re00,im00,...,re11,im11
    #[arg(long, allow_hyphen_values = true)]
    target: String,
    #[arg(long)]
    epsilon: String,
    #[arg(long = "p-fail")]
    p_fail: String,
}

#[derive(Debug, Args)]
struct ApproximateArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 2)]
    n_start: u32,
    #[arg(long, default_value_t = 20)]
    n_max: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Node budget for each exact-synthesis search.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, default_value = "min_cs")]
    select: String,
    #[arg(long, default_value = "json")]
    format: String,
    /// Follow-up rounds computed for the failure branch.
    #[arg(long, default_value_t = 0)]
    rounds: u32,
    #[arg(long, default_value_t = 16)]
    candidates: usize,
    #[arg(long, default_value_t = 4)]
    norm_solutions: usize,
    /// Extra N levels searched after the first success.
    #[arg(long, default_value_t = 0)]
    lookahead: u32,
    #[arg(long, default_value_t = DEFAULT_HEURISTIC_SCALE)]
    heuristic_scale: u32,
    /// Omit the timestamp so identical runs print identical bytes.
    #[arg(long)]
    deterministic: bool,
    /// In QASM output, define cs/csdg as named gates.
    #[arg(long)]
    qasm_named_cs: bool,
    /// In QASM output, reset the ancilla first and measure it at the end.
    #[arg(long)]
    qasm_rus: bool,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

type Outcome = Result<String, Failure>;

/// Runs the CLI on `argv` (including the program name), writing results to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let rendered = e.render().to_string();
            if shown {
                let _ = write!(out, "{rendered}");
                return EXIT_OK;
            }
            let _ = write!(err, "{rendered}");
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Approximate(args) => cmd_approximate(&args, err),
        Command::Verify { input } => cmd_verify(&input),
        Command::SynthIsometry {
            input,
            budget,
            heuristic_scale,
        } => cmd_synth_isometry(&input, budget, heuristic_scale),
        Command::FourSquares { m, count, seed } => cmd_four_squares(&m, count, seed),
        Command::Enumerate { problem, n, limit } => cmd_enumerate(&problem, n, limit),
    };
    match result {
        Ok(text) => {
            let _ = writeln!(out, "{text}");
            EXIT_OK
        }
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

struct Problem {
    target: TargetUnitary,
    epsilon: f64,
    p_fail: BigRational,
}

fn parse_problem(p: &ProblemArgs) -> Result<Problem, Failure> {
    let target: TargetUnitary = p.target.parse().map_err(|e| usage(format!("--target: {e}")))?;
    let epsilon = rational_to_f64(&parse_decimal(&p.epsilon).map_err(|e| usage(format!("--epsilon: {e}")))?);
    check_epsilon(epsilon).map_err(|e| usage(format!("--epsilon: {e}")))?;
    let p_fail = parse_decimal(&p.p_fail).map_err(|e| usage(format!("--p-fail: {e}")))?;
    check_probability(&p_fail).map_err(|e| usage(format!("--p-fail: {e}")))?;
    Ok(Problem { target, epsilon, p_fail })
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn cmd_approximate(args: &ApproximateArgs, err: &mut dyn Write) -> Outcome {
    let problem = parse_problem(&args.problem)?;
    let format: Format = args.format.parse().map_err(|e| usage(format!("--format: {e}")))?;
    let selection: Selection = args.select.parse().map_err(|e| usage(format!("--select: {e}")))?;
    let cfg = Config {
        n_start: args.n_start,
        n_max: args.n_max,
        candidates_per_n: args.candidates,
        norm_solutions_per_candidate: args.norm_solutions,
        search_budget: args.budget,
        heuristic_scale: args.heuristic_scale,
        seed: args.seed,
        selection,
        lookahead: args.lookahead,
        ..Config::new(problem.epsilon, problem.p_fail)
    };
    cfg.validate().map_err(usage)?;
    let runner = ThreadedRunner::from_env();

    let first = match approximate_with(&problem.target, &cfg, &runner) {
        Ok(r) => r,
        Err(ApproxError::Config(e)) => return Err(usage(e)),
        Err(ApproxError::Exhausted { n_start, n_max, attempts }) => {
            let report = json!({
                "status": "exhausted",
                "n_start": n_start,
                "n_max": n_max,
                "attempts": AttemptsJson::from(&attempts),
            });
            for l in &attempts.levels {
                let _ = writeln!(
                    err,
                    "N={}: {} points, {} candidates, {} jobs, {} synthesized, {} over budget",
                    l.n, l.points, l.candidates, l.jobs, l.synthesized, l.exhausted
                );
            }
            return Err(Failure {
                code: EXIT_EXHAUSTED,
                message: format!(
                    "no synthesizable candidate for N in {n_start}..={n_max}\n{}",
                    serde_json::to_string_pretty(&report).expect("plain data serializes")
                ),
            });
        }
    };

    let mut doc = ResultJson::new(&first, &cfg, Some(&args.problem.target));
    let (mut target, mut plan) = (first.target, first.plan.clone());
    for round in 1..=args.rounds {
        let Ok(next) = failure_followup(&target, &plan) else {
            let _ = writeln!(err, "round {round}: failure branch unreachable, stopping");
            break;
        };
        match approximate_with(&next, &cfg, &runner) {
            Ok(r) => {
                doc.followups.push(ResultJson::new(&r, &cfg, None));
                target = r.target;
                plan = r.plan;
            }
            Err(e) => {
                let _ = writeln!(err, "round {round}: {e}, stopping");
                break;
            }
        }
    }
    if !args.deterministic {
        doc.timestamp = Some(now());
    }

    Ok(match format {
        Format::Json => doc.to_pretty(),
        Format::Qasm => {
            let circuit = Circuit::new(first.circuit.gates.clone());
            let opts = QasmOptions {
                named_cs: args.qasm_named_cs,
                rus_wrapper: args.qasm_rus,
            };
            let mut text = to_qasm(&circuit, opts);
            text.push_str(&format!(
                "// N={} u0=({}) u1=({}) success_prob={} error_bound={} global_phase=zeta8^{}",
                doc.n,
                doc.u0.join(","),
                doc.u1.join(","),
                doc.success_prob,
                doc.error_bound,
                doc.phase_exp
            ));
            text
        }
    })
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn cmd_verify(input: &PathBuf) -> Outcome {
    let text = read(input)?;
    let doc: ResultJson = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", input.display())))?;
    let report = verify_document(&doc).map_err(usage)?;
    let text = serde_json::to_string_pretty(&report).expect("plain data serializes");
    if report.passed {
        Ok(text)
    } else {
        Err(Failure {
            code: EXIT_VERIFY_FAILED,
            message: format!("verification failed\n{text}"),
        })
    }
}

fn cmd_synth_isometry(input: &PathBuf, budget: usize, heuristic_scale: u32) -> Outcome {
    let text = read(input)?;
    let doc: IsometryJson = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", input.display())))?;
    let w = doc.to_isometry().map_err(usage)?;
    let opts = SynthOptions { budget, heuristic_scale };
    match synthesize(&w, &opts) {
        Ok(s) => {
            let exact = match_columns(&evaluate(&s.circuit), &w) == Some(s.phase_exp);
            let c = stats(&s.circuit);
            Ok(serde_json::to_string_pretty(&json!({
                "phase_exp": s.phase_exp,
                "gates": gates_to_json(&s.circuit.gates),
                "counts": {"total": c.total, "cs": c.cs, "depth": c.depth},
                "expanded": s.expanded,
                "exact_match": exact,
            }))
            .expect("plain data serializes"))
        }
        Err(e @ SynthError::BudgetExhausted { .. }) => Err(Failure {
            code: EXIT_EXHAUSTED,
            message: e.to_string(),
        }),
        Err(e) => Err(usage(e)),
    }
}

fn cmd_four_squares(m: &str, count: usize, seed: u64) -> Outcome {
    let value: BigInt = m.trim().parse().map_err(|_| usage(format!("M must be a nonnegative integer, got `{m}`")))?;
    if count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sols = four_squares_multi(&value, count, &mut rng).map_err(usage)?;
    let sols: Vec<[String; 4]> = sols.iter().map(|s| s.0.clone().map(|x| x.to_string())).collect();
    Ok(serde_json::to_string_pretty(&json!({ "m": value.to_string(), "solutions": sols })).expect("plain data serializes"))
}

fn cmd_enumerate(problem: &ProblemArgs, n: u32, limit: usize) -> Outcome {
    let p = parse_problem(problem)?;
    let pts = solve_problem31(&p.target, p.epsilon, &p.p_fail, n, usize::MAX).map_err(usage)?;
    let two_n = BigInt::one() << n as usize;
    let candidates: Vec<_> = pts
        .iter()
        .take(limit)
        .map(|u0| {
            json!({
                "u0": u0.components().clone().map(|x| x.to_string()),
                "norm_sq": u0.norm_sq().to_string(),
                "success_prob": fraction(&BigRational::new(u0.norm_sq(), two_n.clone())),
                "error_bound": approx_error(u0, &p.target).expect("region excludes zero"),
            })
        })
        .collect();
    Ok(serde_json::to_string_pretty(&json!({ "N": n, "count": pts.len(), "candidates": candidates })).expect("plain data serializes"))
}
