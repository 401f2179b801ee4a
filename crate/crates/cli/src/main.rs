//! Command-line driver for the experiment suite.
//!
//! Each subcommand names an experiment, flags map onto its parameters, and
//! the resolved report is written as JSON or CSV. Identical argv and seed
//! produce byte-identical output files.
//!
//! Exit codes: 0 when the experiment verdict is "pass", 2 when it is
//! "fail", 1 for usage or runtime errors. CI can therefore tell a broken
//! run from a scientifically failing one.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use psdlab::harness::experiments::{run_experiment, ExperimentConfig, ExperimentDocument};

#[derive(Parser)]
#[command(
    name = "psdlab",
    version,
    about = "Query-model experiments on pseudo-deterministic search algorithms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed; every random draw in a run derives from it.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Trials per input (experiment-specific default when omitted).
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Comma-separated problem sizes (experiment-specific default when omitted).
    #[arg(long, global = true, value_delimiter = ',')]
    sizes: Option<Vec<u64>>,

    /// Output file; default is <out dir>/<experiment>.<format>, where the
    /// out dir comes from $PSDLAB_OUT or is the working directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for trial-level parallelism; 0 means all cores.
    /// The report bytes do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// First marked index by windowed quantum search: concentration on the
    /// minimum and square-root query scaling.
    PsdGrover {
        /// Random inputs per size.
        #[arg(long)]
        inputs: Option<u64>,
    },
    /// Canonical k-subset finding by pruned binary search over a
    /// bounded-error inner solver.
    Prunable {
        /// Problem families to run, comma-separated:
        /// ksum|kdistinct|graph-collision|triangle.
        #[arg(long)]
        problem: Option<String>,
        /// Inner solver: grover|simulated.
        #[arg(long)]
        inner: Option<String>,
        /// Failure probability of the simulated inner solver.
        #[arg(long)]
        p: Option<f64>,
        /// Random instances per family.
        #[arg(long)]
        instances: Option<u64>,
        /// Ground-set size override.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Hidden-shift recovery from orthogonal samples against the classical
    /// collision baseline.
    Simon {
        /// Width for the classical baseline measurement.
        #[arg(long)]
        classical_n: Option<u64>,
        /// Instances for the classical baseline measurement.
        #[arg(long)]
        classical_instances: Option<u64>,
    },
    /// Weight-encoded shift recovery: the quantum solver canonizes the
    /// window-sampling classical one.
    SimonHamming {
        /// Which property to check: canonization|psd|classical-psd.
        #[arg(long)]
        check: Option<String>,
        /// Oracle width (string length is 2^n).
        #[arg(long)]
        n: Option<u64>,
        /// Target Hamming weight of the generated instance.
        #[arg(long)]
        target_weight: Option<u64>,
        /// Sample factor of the classical estimator.
        #[arg(long)]
        c: Option<f64>,
        /// Instances for the psd checks.
        #[arg(long)]
        instances: Option<u64>,
        /// Reference-side trials for the canonization check.
        #[arg(long)]
        reference_trials: Option<u64>,
    },
    /// Parity-block avoidance: samplers, the deterministic solver, and the
    /// randomized parity reduction.
    Aoes {
        /// Which algorithm: sample|det|reduction|psd-reduction.
        #[arg(long)]
        algo: Option<String>,
        /// Single block count (shorthand for --sizes <m>).
        #[arg(long)]
        m: Option<u64>,
        /// Bits per block.
        #[arg(long)]
        block_len: Option<u64>,
    },
    /// Minimum of a uniform support from independent draws.
    Suppfind {
        /// Single support size (shorthand for --sizes <d>).
        #[arg(long)]
        d: Option<u64>,
        /// Draw count factor: ceil(c * d) draws.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Completeness reduction: solve first-marked-index over a majority
    /// string assembled from candidate-solver outcomes.
    Find1Complete {
        /// Input length.
        #[arg(long)]
        n: Option<u64>,
        /// Draws per input position.
        #[arg(long)]
        sample_factor: Option<u64>,
        /// Random inputs.
        #[arg(long)]
        instances: Option<u64>,
        /// Minimum weight of generated inputs.
        #[arg(long)]
        min_weight: Option<u64>,
    },
    /// Harness self-check: a valid-but-scattered sampler must fail the
    /// concentration bar that the deterministic solver passes.
    VerifyPsd {
        /// Block count of the probe instances.
        #[arg(long)]
        m: Option<u64>,
        /// Bits per block of the probe instances.
        #[arg(long)]
        block_len: Option<u64>,
        /// Probe instances.
        #[arg(long)]
        instances: Option<u64>,
    },
    /// Log-log query-growth fits across solvers.
    Scaling {
        /// Which fit: psd-grover|aoes-det|simon|all.
        #[arg(long)]
        target: Option<String>,
    },
}

impl Command {
    fn experiment_name(&self) -> &'static str {
        match self {
            Command::PsdGrover { .. } => "psd-grover",
            Command::Prunable { .. } => "prunable",
            Command::Simon { .. } => "simon",
            Command::SimonHamming { .. } => "simon-hamming",
            Command::Aoes { .. } => "aoes",
            Command::Suppfind { .. } => "suppfind",
            Command::Find1Complete { .. } => "find1-complete",
            Command::VerifyPsd { .. } => "verify-psd",
            Command::Scaling { .. } => "scaling",
        }
    }
}

fn build_config(cli: &Cli) -> ExperimentConfig {
    let mut config = ExperimentConfig::new(cli.command.experiment_name(), cli.seed);
    config.trials = cli.trials;
    config.sizes = cli.sizes.clone();
    config.threads = cli.threads;
    let params = &mut config.params;
    fn set_u64(
        params: &mut std::collections::BTreeMap<String, String>,
        key: &str,
        v: &Option<u64>,
    ) {
        if let Some(v) = v {
            params.insert(key.to_string(), v.to_string());
        }
    }
    match &cli.command {
        Command::PsdGrover { inputs } => set_u64(params, "inputs", inputs),
        Command::Prunable {
            problem,
            inner,
            p,
            instances,
            n,
        } => {
            if let Some(v) = problem {
                params.insert("problem".into(), v.clone());
            }
            if let Some(v) = inner {
                params.insert("inner".into(), v.clone());
            }
            if let Some(v) = p {
                params.insert("p".into(), v.to_string());
            }
            set_u64(params, "instances", instances);
            set_u64(params, "n", n);
        }
        Command::Simon {
            classical_n,
            classical_instances,
        } => {
            set_u64(params, "classical_n", classical_n);
            set_u64(params, "classical_instances", classical_instances);
        }
        Command::SimonHamming {
            check,
            n,
            target_weight,
            c,
            instances,
            reference_trials,
        } => {
            if let Some(v) = check {
                params.insert("check".into(), v.clone());
            }
            if let Some(v) = c {
                params.insert("c".into(), v.to_string());
            }
            set_u64(params, "n", n);
            set_u64(params, "target_weight", target_weight);
            set_u64(params, "instances", instances);
            set_u64(params, "reference_trials", reference_trials);
        }
        Command::Aoes { algo, m, block_len } => {
            if let Some(v) = algo {
                params.insert("algo".into(), v.clone());
            }
            set_u64(params, "block_len", block_len);
            if let Some(m) = m {
                config.sizes = Some(vec![*m]);
            }
        }
        Command::Suppfind { d, c } => {
            if let Some(v) = c {
                params.insert("c".into(), v.to_string());
            }
            if let Some(d) = d {
                config.sizes = Some(vec![*d]);
            }
        }
        Command::Find1Complete {
            n,
            sample_factor,
            instances,
            min_weight,
        } => {
            set_u64(params, "n", n);
            set_u64(params, "sample_factor", sample_factor);
            set_u64(params, "instances", instances);
            set_u64(params, "min_weight", min_weight);
        }
        Command::VerifyPsd {
            m,
            block_len,
            instances,
        } => {
            set_u64(params, "m", m);
            set_u64(params, "block_len", block_len);
            set_u64(params, "instances", instances);
        }
        Command::Scaling { target } => {
            if let Some(v) = target {
                params.insert("target".into(), v.clone());
            }
        }
    }
    config
}

fn output_path(cli: &Cli, name: &str) -> PathBuf {
    if let Some(path) = &cli.out {
        return path.clone();
    }
    let dir = std::env::var_os("PSDLAB_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    let ext = match cli.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    dir.join(format!("{name}.{ext}"))
}

fn write_report(cli: &Cli, doc: &ExperimentDocument) -> std::io::Result<PathBuf> {
    let path = output_path(cli, &doc.experiment);
    let body = match cli.format {
        Format::Json => doc.to_json_string(),
        Format::Csv => doc.to_csv_string(),
    };
    std::fs::write(&path, body)?;
    Ok(path)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own help/version output counts as success
            if e.use_stderr() {
                let _ = e.print();
                return ExitCode::from(1);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let config = build_config(&cli);
    let doc = match run_experiment(&config) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let path = match write_report(&cli, &doc) {
        Ok(path) => path,
        Err(e) => {
            eprintln!("error: cannot write report: {e}");
            return ExitCode::from(1);
        }
    };
    println!(
        "{}: {} rows, verdict {} -> {}",
        doc.experiment,
        doc.rows.len(),
        doc.verdict,
        path.display()
    );
    if doc.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
