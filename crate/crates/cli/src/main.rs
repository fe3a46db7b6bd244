//! Command-line surface for the finite-field consensus toolkit.
//!
//! Subcommands map onto the library: `check` runs the admissibility test,
//! `gen` runs the randomized generators, `enumerate` and `stats` expose the
//! brute-force sets and the closed-form cardinalities, `transform` applies
//! a similarity transformation, `gain` synthesizes the nilpotent-placing
//! feedback, and `simulate` iterates the exact dynamics to a CSV trace.
//!
//! Every command is deterministic given its inputs; generator commands
//! require an explicit `--seed`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use modcon::generators::DEFAULT_MAX_ATTEMPTS;
use modcon::{
    cardinalities, check_admissible, coset_representatives, enumerate_sets, generate_matrix,
    similar_transform, simulate_lti, simulate_scalar, staircase, stabilizing_gain, textio,
    AgentSystem, FMatrix, GenConfig, GenVariant, SarRejection,
};

#[derive(Parser)]
#[command(
    name = "modcon",
    about = "Consensus and synchronization of linear systems over GF(p)",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Sar,
    TfUpper,
    TfLower,
    Stabilizer,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RejectRule {
    Orthogonality,
    Permutation,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SetName {
    Mrs,
    Grs,
    GrsNonperm,
    Urs,
    Perm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Scalar,
    Lti,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph matrix for admissibility and print the report
    Check {
        /// Matrix file in the shared text format
        matrix: PathBuf,
    },
    /// Generate transformation matrices with a seeded PRNG
    Gen {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// PRNG seed; required so runs are reproducible
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
        max_attempts: u64,
        /// Keep one representative per left coset w.r.t. column permutations
        #[arg(long)]
        dedup_cosets: bool,
        /// Rejection rule for the sar method
        #[arg(long, value_enum, default_value = "orthogonality")]
        reject: RejectRule,
        /// Write matrices here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exhaustively enumerate a row-stochastic subset and print its count
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum)]
        set: SetName,
        /// Candidate budget (default 10^7)
        #[arg(long)]
        budget: Option<u128>,
        /// Write matrices here; the count still goes to stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the closed-form cardinalities, or sweep a grid to CSV
    Stats {
        #[arg(long, required_unless_present = "sweep")]
        n: Option<usize>,
        #[arg(long, required_unless_present = "sweep")]
        p: Option<u64>,
        /// Two ranges `NMIN:NMAX PMIN:PMAX`; emits CSV rows for every
        /// (N, prime p) in the grid
        #[arg(long, num_args = 2, value_names = ["NMIN:NMAX", "PMIN:PMAX"])]
        sweep: Option<Vec<String>>,
        /// Also print delta as a decimal
        #[arg(long)]
        approx: bool,
    },
    /// Apply a similarity transformation: prints T^{-1} E T
    Transform {
        #[arg(short = 'E', long)]
        graph: PathBuf,
        #[arg(short = 'T', long)]
        transform: PathBuf,
    },
    /// Synthesize the stabilizing gain K for the pair (A, B)
    Gain {
        #[arg(short = 'A', long)]
        a: PathBuf,
        #[arg(short = 'B', long)]
        b: PathBuf,
    },
    /// Simulate scalar consensus or LTI synchronization
    Simulate {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(short = 'E', long)]
        graph: PathBuf,
        #[arg(short = 'A', long, required_if_eq("mode", "lti"))]
        a: Option<PathBuf>,
        #[arg(short = 'B', long, required_if_eq("mode", "lti"))]
        b: Option<PathBuf>,
        /// Feedback gain; synthesized from (A, B) when omitted
        #[arg(short = 'K', long)]
        k: Option<PathBuf>,
        /// Initial state vector (length N for scalar, N*n stacked for lti)
        #[arg(long)]
        x0: PathBuf,
        /// Number of steps; defaults to N*n + 2
        #[arg(long)]
        kmax: Option<usize>,
        /// Write the trace CSV here
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

fn parse_matrix_file(path: &Path) -> Result<FMatrix, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("IoError: cannot read {}: {e}", path.display()))?;
    textio::parse_matrix(&text).map_err(|e| format!("{}: {}: {e}", e.token(), path.display()))
}

fn parse_vector_file(path: &Path) -> Result<Vec<u64>, String> {
    let m = parse_matrix_file(path)?;
    textio::matrix_as_vector(&m).map_err(|e| format!("{}: {}: {e}", e.token(), path.display()))
}

fn lib_err(e: modcon::Error) -> String {
    format!("{}: {e}", e.token())
}

fn write_or_print(output: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| format!("IoError: cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_range(spec: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = spec
        .split_once(':')
        .ok_or_else(|| format!("ParseError: range must be MIN:MAX, got `{spec}`"))?;
    let lo = lo
        .parse::<u64>()
        .map_err(|_| format!("ParseError: invalid range bound `{lo}`"))?;
    let hi = hi
        .parse::<u64>()
        .map_err(|_| format!("ParseError: invalid range bound `{hi}`"))?;
    if lo > hi {
        return Err(format!("ParseError: empty range `{spec}`"));
    }
    Ok((lo, hi))
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Check { matrix } => {
            let e = parse_matrix_file(&matrix)?;
            let report = check_admissible(&e).map_err(lib_err)?;
            print!("{}", report.to_kv_block());
            Ok(())
        }
        Command::Gen {
            method,
            n,
            p,
            count,
            seed,
            max_attempts,
            dedup_cosets,
            reject,
            output,
        } => {
            let field = modcon::FieldSpec::new(p).map_err(lib_err)?;
            let mut cfg = GenConfig::new(n, field, seed).map_err(lib_err)?;
            cfg.max_attempts = max_attempts;
            cfg.variant = match method {
                Method::Sar => GenVariant::Sar,
                Method::TfUpper => GenVariant::TfUpper,
                Method::TfLower => GenVariant::TfLower,
                Method::Stabilizer => GenVariant::Stabilizer,
            };
            cfg.sar_rejection = match reject {
                RejectRule::Orthogonality => SarRejection::Orthogonality,
                RejectRule::Permutation => SarRejection::Permutation,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut mats = Vec::with_capacity(count);
            for _ in 0..count {
                mats.push(generate_matrix(&cfg, &mut rng).map_err(lib_err)?);
            }
            if dedup_cosets {
                mats = coset_representatives(&mats);
            }
            write_or_print(output.as_ref(), &textio::matrices_to_text(&mats))
        }
        Command::Enumerate {
            n,
            p,
            set,
            budget,
            output,
        } => {
            let field = modcon::FieldSpec::new(p).map_err(lib_err)?;
            let sets = enumerate_sets(n, field, budget).map_err(lib_err)?;
            let chosen = match set {
                SetName::Mrs => &sets.m_rs,
                SetName::Grs => &sets.g_rs,
                SetName::GrsNonperm => &sets.g_rs_nonperm,
                SetName::Urs => &sets.u_rs_upper,
                SetName::Perm => &sets.perms,
            };
            let text = textio::matrices_to_text(chosen);
            match &output {
                Some(_) => write_or_print(output.as_ref(), &text)?,
                None => {
                    print!("{text}");
                    if !chosen.is_empty() {
                        println!();
                    }
                }
            }
            println!("count={}", chosen.len());
            Ok(())
        }
        Command::Stats {
            n,
            p,
            sweep,
            approx,
        } => {
            if let Some(ranges) = sweep {
                let (nmin, nmax) = parse_range(&ranges[0])?;
                let (pmin, pmax) = parse_range(&ranges[1])?;
                let mut header = String::from("N,p,m_all,gl,m_rs,g_rs,u_rs,perms,delta");
                if approx {
                    header.push_str(",delta_approx");
                }
                println!("{header}");
                for dim in nmin..=nmax {
                    for q in pmin..=pmax {
                        let Ok(field) = modcon::FieldSpec::new(q) else {
                            continue;
                        };
                        let r = cardinalities(dim as usize, field).map_err(lib_err)?;
                        let mut line = format!(
                            "{},{},{},{},{},{},{},{},{}",
                            r.n,
                            r.p,
                            r.m_all,
                            r.gl,
                            r.m_rs,
                            r.g_rs,
                            r.u_rs,
                            r.perms,
                            r.delta_string()
                        );
                        if approx {
                            line.push_str(&format!(",{}", r.delta_f64()));
                        }
                        println!("{line}");
                    }
                }
                return Ok(());
            }
            let (n, p) = (n.expect("clap enforces"), p.expect("clap enforces"));
            let field = modcon::FieldSpec::new(p).map_err(lib_err)?;
            let r = cardinalities(n, field).map_err(lib_err)?;
            print!("{}", r.to_kv_block());
            if approx {
                println!("delta_approx={}", r.delta_f64());
            }
            Ok(())
        }
        Command::Transform { graph, transform } => {
            let e = parse_matrix_file(&graph)?;
            let t = parse_matrix_file(&transform)?;
            let out = similar_transform(&e, &t).map_err(lib_err)?;
            print!("{}", textio::matrix_to_text(&out));
            Ok(())
        }
        Command::Gain { a, b } => {
            let a = parse_matrix_file(&a)?;
            let b = parse_matrix_file(&b)?;
            let stair = staircase(&a, &b).map_err(lib_err)?;
            println!("controllable_dim={}", stair.verdict.controllable_dim);
            println!("stabilizable={}", stair.verdict.stabilizable);
            println!("reason={}", stair.verdict.reason);
            let k = stabilizing_gain(&a, &b).map_err(lib_err)?;
            println!();
            print!("{}", textio::matrix_to_text(&k));
            Ok(())
        }
        Command::Simulate {
            mode,
            graph,
            a,
            b,
            k,
            x0,
            kmax,
            trace,
        } => {
            let e = parse_matrix_file(&graph)?;
            let x0 = parse_vector_file(&x0)?;
            let result = match mode {
                Mode::Scalar => {
                    let kmax = kmax.unwrap_or(e.rows() + 2);
                    simulate_scalar(&e, &x0, kmax).map_err(lib_err)?
                }
                Mode::Lti => {
                    let a = parse_matrix_file(a.as_ref().expect("clap enforces"))?;
                    let b = parse_matrix_file(b.as_ref().expect("clap enforces"))?;
                    let mut sys = AgentSystem::new(a, b).map_err(lib_err)?;
                    match k {
                        Some(path) => {
                            let gain = parse_matrix_file(&path)?;
                            sys = sys.with_gain(gain).map_err(lib_err)?;
                        }
                        None => {
                            sys.synthesize_gain().map_err(lib_err)?;
                        }
                    }
                    let kmax = kmax.unwrap_or(e.rows() * sys.state_dim() + 2);
                    simulate_lti(&e, &sys, &x0, kmax).map_err(lib_err)?
                }
            };
            match result.sync_step {
                Some(step) => println!("sync_step={step}"),
                None => println!("sync_step=none"),
            }
            let alpha = result.sync_step.and_then(|step| {
                result.alpha_traj.as_ref().map(|traj| {
                    traj[step]
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
            });
            match alpha {
                Some(a) => println!("alpha={a}"),
                None => println!("alpha=none"),
            }
            println!("alpha_recursion_ok={}", result.alpha_recursion_ok);
            if let Some(path) = trace {
                fs::write(&path, result.to_csv())
                    .map_err(|e| format!("IoError: cannot write {}: {e}", path.display()))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
