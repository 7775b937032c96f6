//! The `coin` binary: explicit-state model checking for hierarchical
//! component-interaction automata.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coin_cli::families::Family;
use coin_cli::{
    cmd_bench, cmd_gen, cmd_metrics, cmd_property, cmd_verify, exit_codes, BenchConfig,
    CmdOutput, OutputFormat, Property, RunConfig,
};
use coin_core::succgen::Algorithm;

#[derive(Parser)]
#[command(
    name = "coin",
    about = "Model checker for hierarchical component-interaction automata",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum AlgorithmArg {
    Recursive,
    Lca,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Algorithm {
        match a {
            AlgorithmArg::Recursive => Algorithm::Recursive,
            AlgorithmArg::Lca => Algorithm::Lca,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum FormatArg {
    Human,
    Machine,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Successor generation algorithm.
    #[arg(long, value_enum, default_value = "lca")]
    algorithm: AlgorithmArg,
    /// Enable partial-order reduction.
    #[arg(long)]
    por: bool,
    /// Number of exploration workers.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Memory cap in bytes for the state store.
    #[arg(long, default_value_t = coin_core::explore::DEFAULT_MEM_LIMIT)]
    mem_limit: u64,
    /// Output format.
    #[arg(long, value_enum, default_value = "human")]
    format: FormatArg,
    /// Seed for ownership hashing and randomized harness runs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the state space and print size/time/memory metrics.
    Metrics {
        /// CoIn model file.
        model: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
        /// Also generate the reduced space and print both with the ratio.
        #[arg(long)]
        por_stats: bool,
    },
    /// Check a CI-LTL property (or search for deadlocks).
    Verify {
        /// CoIn model file.
        model: PathBuf,
        /// CI-LTL formula (inline).
        #[arg(long, short = 'f', conflicts_with_all = ["formula_file", "claim", "deadlock"])]
        formula: Option<String>,
        /// File containing one CI-LTL formula.
        #[arg(long, conflicts_with_all = ["claim", "deadlock"])]
        formula_file: Option<PathBuf>,
        /// File containing a never-claim block (as emitted by `property`).
        #[arg(long, conflicts_with = "deadlock")]
        claim: Option<PathBuf>,
        /// Search for deadlocked states instead of checking a formula.
        #[arg(long)]
        deadlock: bool,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Translate a CI-LTL formula into a never-claim block.
    Property {
        /// The formula text.
        formula: String,
    },
    /// Emit a generated benchmark model.
    Gen {
        /// Family: toggles, pipeline-tree, ring.
        family: String,
        /// Size parameter.
        #[arg(long, short = 'n')]
        n: usize,
        /// Depth parameter (pipeline-tree only; 2*n must equal 2^d).
        #[arg(long, short = 'd')]
        d: Option<usize>,
    },
    /// Run the generation-time matrix over algorithms and worker counts.
    Bench {
        /// Family: toggles, pipeline-tree, ring.
        #[arg(long, default_value = "pipeline-tree")]
        family: String,
        #[arg(long, short = 'n', default_value_t = 16)]
        n: usize,
        #[arg(long, short = 'd')]
        d: Option<usize>,
        /// Comma-separated worker counts.
        #[arg(long, default_value = "1,2,4", value_delimiter = ',')]
        workers: Vec<usize>,
        /// Comma-separated algorithms.
        #[arg(long, default_value = "recursive,lca", value_delimiter = ',')]
        algorithms: Vec<AlgorithmArg>,
        /// Timed repetitions per cell (median reported).
        #[arg(long, default_value_t = 3)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run_config(model: &PathBuf, common: &CommonFlags, por_stats: bool) -> Result<RunConfig, CmdOutput> {
    let model_text = std::fs::read_to_string(model).map_err(|e| CmdOutput {
        exit_code: exit_codes::INPUT_ERROR,
        stdout: String::new(),
        stderr: format!("cannot read {}: {e}\n", model.display()),
    })?;
    Ok(RunConfig {
        model_text,
        algorithm: common.algorithm.into(),
        por: common.por,
        por_stats,
        workers: common.workers.max(1),
        mem_limit_bytes: common.mem_limit,
        format: match common.format {
            FormatArg::Human => OutputFormat::Human,
            FormatArg::Machine => OutputFormat::Machine,
        },
        seed: common.seed,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match cli.command {
        Command::Metrics { model, common, por_stats } => match run_config(&model, &common, por_stats) {
            Ok(cfg) => cmd_metrics(&cfg),
            Err(out) => out,
        },
        Command::Verify { model, formula, formula_file, claim, deadlock, common } => {
            match run_config(&model, &common, false) {
                Ok(cfg) => {
                    let property = if deadlock {
                        Ok(Property::Deadlock)
                    } else if let Some(text) = formula {
                        Ok(Property::Formula(text))
                    } else if let Some(path) = formula_file {
                        std::fs::read_to_string(&path)
                            .map(|t| Property::Formula(t.trim().to_string()))
                            .map_err(|e| format!("cannot read {}: {e}", path.display()))
                    } else if let Some(path) = claim {
                        std::fs::read_to_string(&path)
                            .map(Property::ClaimText)
                            .map_err(|e| format!("cannot read {}: {e}", path.display()))
                    } else {
                        Err("one of --formula, --formula-file, --claim or --deadlock is required"
                            .to_string())
                    };
                    match property {
                        Ok(p) => cmd_verify(&cfg, &p),
                        Err(message) => CmdOutput {
                            exit_code: exit_codes::INPUT_ERROR,
                            stdout: String::new(),
                            stderr: format!("{message}\n"),
                        },
                    }
                }
                Err(out) => out,
            }
        }
        Command::Property { formula } => cmd_property(&formula),
        Command::Gen { family, n, d } => match family.parse::<Family>() {
            Ok(f) => cmd_gen(f, n, d),
            Err(e) => CmdOutput {
                exit_code: exit_codes::INPUT_ERROR,
                stdout: String::new(),
                stderr: format!("{e}\n"),
            },
        },
        Command::Bench { family, n, d, workers, algorithms, runs, seed } => {
            match family.parse::<Family>() {
                Ok(f) => cmd_bench(&BenchConfig {
                    family: f,
                    n,
                    d,
                    workers,
                    algorithms: algorithms.into_iter().map(Into::into).collect(),
                    runs,
                    seed,
                }),
                Err(e) => CmdOutput {
                    exit_code: exit_codes::INPUT_ERROR,
                    stdout: String::new(),
                    stderr: format!("{e}\n"),
                },
            }
        }
    };

    print!("{}", output.stdout);
    let _ = std::io::stdout().flush();
    eprint!("{}", output.stderr);
    ExitCode::from(output.exit_code as u8)
}
