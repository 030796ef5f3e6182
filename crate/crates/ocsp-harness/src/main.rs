//! `ocsp`: generate hard instances, solve them, certify expansion, simulate
//! the masked-vector game, and run the seeded experiment suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use ocsp_core::coarsen::CoarsePredicate;
use ocsp_core::dist::{sample_no, sample_yes};
use ocsp_core::hypergraph::{sphe_certify, sshe_certify, CertifyMode};
use ocsp_core::irmd::{
    estimate_advantage, run_reduction, sample_irmd, ConstantAlg, CountThresholdAlg,
    DegreeSketchAlg, ExactThresholdAlg, IrmdCase, StreamingAlgorithm,
};
use ocsp_core::json as fmtjson;
use ocsp_core::perm::Permutation;
use ocsp_core::solve::{
    random_ordering_baseline, solve_csp_exact, solve_ocsp_exact, subsample_and_solve, SolveMode,
    SolveReport, Witness,
};
use ocsp_core::stats::wilson_interval;
use ocsp_core::Rational;

use ocsp_harness::config::{parse_rational, predicate_by_name, ExperimentConfig};
use ocsp_harness::defaults::derive_defaults;
use ocsp_harness::experiments::{
    exp_expansion, exp_no_trend, exp_reduction_equivalence, exp_value_gap, ExperimentReport,
};
use ocsp_harness::HarnessError;

#[derive(Parser)]
#[command(
    name = "ocsp",
    about = "Ordering-CSP hard instances, solvers, and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DistArgs {
    /// Alphabet size.
    #[arg(long)]
    q: usize,
    /// Variable count.
    #[arg(long)]
    n: usize,
    /// Matching density (rational, e.g. 1/8).
    #[arg(long)]
    alpha: String,
    /// Number of matching rounds.
    #[arg(long = "T", visible_alias = "rounds")]
    rounds: usize,
    /// Predicate: MAS, Btwn, or a predicate JSON file path.
    #[arg(long, default_value = "MAS")]
    predicate: String,
    /// Constraint arity; must match the predicate when given.
    #[arg(long)]
    k: Option<usize>,
    /// Pattern permutation in one-line notation, e.g. "0 1" (YES only;
    /// defaults to the predicate's first accepted permutation).
    #[arg(long)]
    pi: Option<String>,
}

impl DistArgs {
    fn to_params(
        &self,
        need_pattern: bool,
    ) -> Result<ocsp_core::dist::DistributionParams, HarnessError> {
        let predicate = predicate_by_name(&self.predicate)?;
        if let Some(k) = self.k {
            if k != predicate.arity() {
                return Err(HarnessError::Config(format!(
                    "--k {k} does not match predicate arity {}",
                    predicate.arity()
                )));
            }
        }
        let pattern = match (&self.pi, need_pattern) {
            (Some(text), _) => Some(text.parse::<Permutation>()?),
            (None, true) => Some(predicate.support().into_iter().next().ok_or_else(|| {
                HarnessError::Config("predicate accepts no permutation; supply --pi".into())
            })?),
            (None, false) => None,
        };
        let params = ocsp_core::dist::DistributionParams {
            q: self.q,
            n: self.n,
            alpha: parse_rational(&self.alpha)?,
            rounds: self.rounds,
            predicate,
            pattern,
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample an instance from the YES or NO distribution into a JSON file.
    Gen {
        /// Which distribution: yes or no.
        #[arg(long)]
        dist: String,
        #[command(flatten)]
        dist_args: DistArgs,
        #[arg(long)]
        seed: u64,
        /// Output instance file; YES also writes `<stem>.secret.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance file exactly, over orderings or assignments.
    Solve {
        instance: PathBuf,
        /// Exact search over all orderings (default).
        #[arg(long, conflicts_with = "coarse")]
        exact: bool,
        /// Exact search over assignments of the coarsened predicate.
        #[arg(long)]
        coarse: bool,
        /// Alphabet for --coarse.
        #[arg(long)]
        q: Option<usize>,
    },
    /// Monte Carlo estimate of the value under uniformly random orderings.
    Baseline {
        instance: PathBuf,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reservoir-sample constraints and solve the subinstance.
    Subsample {
        instance: PathBuf,
        /// Number of constraints to keep.
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Coarsen a predicate to alphabet [q] and print or save it.
    Coarsen {
        #[arg(long)]
        predicate: String,
        #[arg(long)]
        q: usize,
        /// Also print the predicate's width.
        #[arg(long)]
        width: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify small-set or small-partition expansion of a hypergraph or
    /// instance file; prints {gamma, delta_min, mode}.
    ExpandCheck {
        graph: PathBuf,
        #[arg(long)]
        gamma: String,
        /// Certify partitions instead of sets (requires --q).
        #[arg(long)]
        sphe: bool,
        #[arg(long)]
        q: Option<usize>,
        /// Sampling budget when the exact scan is out of range.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Simulate the masked-vector game and its streaming reduction.
    IrmdSim {
        /// yes, no, or both (both reports the distinguishing advantage).
        #[arg(long)]
        case: String,
        #[command(flatten)]
        dist_args: DistArgs,
        /// Built-in algorithm: constant, count-threshold, degree-sketch, or
        /// exact-threshold.
        #[arg(long, default_value = "constant")]
        alg: String,
        /// Threshold parameter for the threshold-style algorithms.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Run a named experiment suite: value-gap, expansion,
    /// reduction-equivalence, or no-trend. Exit code 0 iff all asserted
    /// invariants held.
    Experiment {
        name: String,
        #[arg(long, default_value = "MAS")]
        predicate: String,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long = "T", visible_alias = "rounds")]
        rounds: Option<usize>,
        #[arg(long)]
        pi: Option<String>,
        #[arg(long)]
        gamma: Option<String>,
        /// Partition alphabet for expansion (defaults to --q).
        #[arg(long)]
        coarse_q: Option<usize>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Print the derived parameter defaults for an accuracy target.
    Defaults {
        /// Accuracy target epsilon in (0,1), e.g. 1/2.
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "MAS")]
        predicate: String,
    },
}

fn rational_json(r: Rational) -> serde_json::Value {
    json!({
        "exact": format!("{}/{}", r.numer(), r.denom()),
        "float": *r.numer() as f64 / *r.denom() as f64,
    })
}

fn report_json(report: &SolveReport) -> serde_json::Value {
    let witness = match &report.witness {
        Witness::Ordering(sigma) => json!({ "ordering": sigma.image() }),
        Witness::Assignment(b) => json!({ "assignment": b.labels(), "q": b.q() }),
    };
    json!({
        "optimum": rational_json(report.optimum),
        "witness": witness,
        "explored": report.explored,
        "mode": match report.mode { SolveMode::Exact => "exact", SolveMode::Heuristic => "heuristic" },
    })
}

fn read_to_string(path: &Path) -> Result<String, HarnessError> {
    Ok(std::fs::read_to_string(path)?)
}

fn build_algorithm(
    name: &str,
    threshold: Option<f64>,
    predicate: &ocsp_core::predicate::OrderingPredicate,
) -> Result<Box<dyn StreamingAlgorithm>, HarnessError> {
    match name {
        "constant" => Ok(Box::new(ConstantAlg { output: false })),
        "count-threshold" => Ok(Box::new(CountThresholdAlg::new(
            threshold.unwrap_or(1.0) as u64
        ))),
        "degree-sketch" => Ok(Box::new(DegreeSketchAlg::new(threshold.unwrap_or(0.5)))),
        "exact-threshold" => {
            let t = threshold.ok_or_else(|| {
                HarnessError::Config("exact-threshold needs --threshold".into())
            })?;
            Ok(Box::new(ExactThresholdAlg::new(predicate.clone(), t)))
        }
        other => Err(HarnessError::Config(format!(
            "unknown algorithm {other:?} (try constant, count-threshold, degree-sketch, exact-threshold)"
        ))),
    }
}

fn run_experiment_command(
    name: &str,
    config: ExperimentConfig,
    out: Option<&Path>,
) -> Result<ExperimentReport, HarnessError> {
    let report = match name {
        "value-gap" => exp_value_gap(&config)?,
        "expansion" => exp_expansion(&config)?,
        "reduction-equivalence" => exp_reduction_equivalence(&config)?,
        "no-trend" => exp_no_trend(&config)?,
        other => {
            return Err(HarnessError::Config(format!(
                "unknown experiment {other:?} (try value-gap, expansion, reduction-equivalence, no-trend)"
            )))
        }
    };
    match out {
        Some(path) => std::fs::write(path, &report.csv)?,
        None => print!("{}", report.csv),
    }
    eprintln!("{}", report.summary);
    Ok(report)
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Gen {
            dist,
            dist_args,
            seed,
            out,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match dist.as_str() {
                "yes" => {
                    let params = dist_args.to_params(true)?;
                    let sample = sample_yes(&params, &mut rng)?;
                    std::fs::write(&out, fmtjson::instance_to_json(&sample.instance))?;
                    let secret = out.with_extension("secret.json");
                    std::fs::write(
                        &secret,
                        fmtjson::partition_to_json(&sample.hidden_partition),
                    )?;
                    eprintln!(
                        "wrote {} ({} constraints) and {}",
                        out.display(),
                        sample.instance.m(),
                        secret.display()
                    );
                }
                "no" => {
                    let params = dist_args.to_params(false)?;
                    let sample = sample_no(&params, &mut rng)?;
                    std::fs::write(&out, fmtjson::instance_to_json(&sample.instance))?;
                    eprintln!(
                        "wrote {} ({} constraints)",
                        out.display(),
                        sample.instance.m()
                    );
                }
                other => {
                    return Err(HarnessError::Config(format!(
                        "--dist must be yes or no, got {other:?}"
                    )))
                }
            }
            Ok(true)
        }
        Command::Solve {
            instance,
            exact: _,
            coarse,
            q,
        } => {
            let inst = fmtjson::parse_instance_json(&read_to_string(&instance)?)?;
            let report = if coarse {
                let q = q.ok_or_else(|| HarnessError::Config("--coarse needs --q".into()))?;
                let f = CoarsePredicate::coarsen(inst.predicate(), q)?;
                solve_csp_exact(&inst, &f)?
            } else {
                solve_ocsp_exact(&inst)?
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&report_json(&report)).unwrap()
            );
            Ok(true)
        }
        Command::Baseline {
            instance,
            trials,
            seed,
        } => {
            let inst = fmtjson::parse_instance_json(&read_to_string(&instance)?)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let est = random_ordering_baseline(&inst, trials, &mut rng)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "mean": rational_json(est.mean),
                    "stderr": est.stderr,
                    "trials": est.trials,
                    "rho": rational_json(inst.predicate().rho()),
                }))
                .unwrap()
            );
            Ok(true)
        }
        Command::Subsample { instance, s, seed } => {
            let inst = fmtjson::parse_instance_json(&read_to_string(&instance)?)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let report = subsample_and_solve(
                inst.n(),
                inst.predicate(),
                inst.constraints().to_vec(),
                s,
                &mut rng,
            )?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report_json(&report)).unwrap()
            );
            Ok(true)
        }
        Command::Coarsen {
            predicate,
            q,
            width,
            out,
        } => {
            let pred = predicate_by_name(&predicate)?;
            let f = CoarsePredicate::coarsen(&pred, q)?;
            let mut payload = json!({
                "k": f.k(),
                "q": f.q(),
                "satisfied_count": f.satisfied_count(),
                "rho": rational_json(f.rho()?),
                "unsatisfiable_alphabet": f.is_unsatisfiable_alphabet(),
            });
            if width {
                payload["width"] = rational_json(f.width()?);
            }
            if let Some(path) = out {
                std::fs::write(&path, fmtjson::coarse_predicate_to_json(&f))?;
                eprintln!("wrote {}", path.display());
            }
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
            Ok(true)
        }
        Command::ExpandCheck {
            graph,
            gamma,
            sphe,
            q,
            trials,
            seed,
        } => {
            let text = read_to_string(&graph)?;
            // Accept either a hypergraph file or an instance file.
            let g = fmtjson::parse_hypergraph_json(&text)
                .or_else(|_| fmtjson::parse_instance_json(&text).map(|i| i.hypergraph()))?;
            let gamma = parse_rational(&gamma)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let report = if sphe {
                let q = q.ok_or_else(|| HarnessError::Config("--sphe needs --q".into()))?;
                sphe_certify(&g, gamma, q, trials, &mut rng)?
            } else {
                sshe_certify(&g, gamma, trials, &mut rng)?
            };
            let mode = match report.mode {
                CertifyMode::Exact => "exact".to_string(),
                CertifyMode::LowerBound { trials } => format!("lower-bound({trials})"),
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "gamma": rational_json(report.gamma),
                    "delta_min": rational_json(report.delta),
                    "mode": mode,
                }))
                .unwrap()
            );
            Ok(true)
        }
        Command::IrmdSim {
            case,
            dist_args,
            alg,
            threshold,
            trials,
            seed,
        } => {
            let params = dist_args.to_params(true)?;
            let game = params.game_params();
            let pattern = params.pattern.clone().expect("pattern required");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match case.as_str() {
                "both" => {
                    let report = estimate_advantage(
                        || build_algorithm(&alg, threshold, &params.predicate).expect("validated"),
                        &game,
                        &pattern,
                        trials,
                        &mut rng,
                    )?;
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "advantage": report.advantage,
                            "yes_rate": report.yes_rate,
                            "no_rate": report.no_rate,
                            "interval": report.interval,
                            "trials": report.trials,
                            "max_state_bits": report.max_state_bits,
                        }))
                        .unwrap()
                    );
                }
                "yes" | "no" => {
                    build_algorithm(&alg, threshold, &params.predicate)?;
                    let irmd_case = if case == "yes" {
                        IrmdCase::Yes
                    } else {
                        IrmdCase::No
                    };
                    let mut ones = 0u64;
                    let mut emitted = 0usize;
                    let mut max_bits = 0usize;
                    for _ in 0..trials {
                        let inst = sample_irmd(&game, irmd_case, &mut rng)?;
                        let mut alg_box = build_algorithm(&alg, threshold, &params.predicate)?;
                        let outcome = run_reduction(alg_box.as_mut(), &inst, &pattern)?;
                        ones += outcome.output as u64;
                        emitted += outcome.constraints_emitted;
                        max_bits = max_bits.max(outcome.max_state_bits);
                    }
                    let (lo, hi) = wilson_interval(ones, trials);
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "case": case,
                            "output_one_rate": ones as f64 / trials as f64,
                            "wilson95": [lo, hi],
                            "mean_constraints": emitted as f64 / trials as f64,
                            "max_state_bits": max_bits,
                            "trials": trials,
                        }))
                        .unwrap()
                    );
                }
                other => {
                    return Err(HarnessError::Config(format!(
                        "--case must be yes, no, or both, got {other:?}"
                    )))
                }
            }
            Ok(true)
        }
        Command::Experiment {
            name,
            predicate,
            q,
            n,
            alpha,
            rounds,
            pi,
            gamma,
            coarse_q,
            trials,
            seed,
            out,
            threads,
        } => {
            let mut config = ExperimentConfig::new(&name, &predicate, seed)?;
            if let Some(q) = q {
                config.q = q;
            }
            if let Some(n) = n {
                config.n = n;
            }
            if let Some(alpha) = alpha {
                config.alpha = parse_rational(&alpha)?;
            }
            if let Some(rounds) = rounds {
                config.rounds = rounds;
            }
            if let Some(pi) = pi {
                config.pattern = Some(pi.parse::<Permutation>()?);
            }
            if let Some(gamma) = gamma {
                config.gamma = Some(parse_rational(&gamma)?);
            }
            config.coarse_q = coarse_q;
            if let Some(trials) = trials {
                config.trials = trials;
            }
            config.threads = threads;
            let report = run_experiment_command(&name, config, out.as_deref())?;
            Ok(report.passed)
        }
        Command::Defaults {
            epsilon,
            k,
            alpha,
            predicate,
        } => {
            let pred = predicate_by_name(&predicate)?;
            if let Some(k) = k {
                if k != pred.arity() {
                    return Err(HarnessError::Config(format!(
                        "--k {k} does not match predicate arity {}",
                        pred.arity()
                    )));
                }
            }
            let params =
                derive_defaults(parse_rational(&epsilon)?, parse_rational(&alpha)?, &pred)?;
            println!("{}", serde_json::to_string_pretty(&params).unwrap());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
