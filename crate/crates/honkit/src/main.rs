use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use honkit::commands::{self, SynthParams};
use honkit::{emit, read_corpus, Direction, Error, Format, OutputFormat, RunConfig};

/// Higher-order network models from path data.
///
/// Settings can also come from `HONKIT_*` environment variables; flags take
/// precedence over the environment, which takes precedence over defaults.
#[derive(Parser, Debug)]
#[command(name = "honkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Args, Debug)]
struct Settings {
    /// Highest order to build.
    #[arg(long, global = true, env = "HONKIT_MAX_ORDER", default_value_t = 5)]
    max_order: usize,
    /// Significance level of the order-selection tests.
    #[arg(long, global = true, env = "HONKIT_EPSILON", default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, global = true, env = "HONKIT_DAMPING", default_value_t = 0.85)]
    damping: f64,
    /// L1 convergence threshold of PageRank.
    #[arg(
        long,
        global = true,
        env = "HONKIT_PAGERANK_TOL",
        default_value_t = 1e-12
    )]
    pagerank_tol: f64,
    #[arg(
        long,
        global = true,
        env = "HONKIT_PAGERANK_MAX_ITER",
        default_value_t = 1000
    )]
    pagerank_max_iter: usize,
    /// Additive smoothing of the KL divergence.
    #[arg(
        long,
        global = true,
        env = "HONKIT_KL_EPSILON",
        default_value_t = 1e-10
    )]
    kl_epsilon: f64,
    /// Degrees compared by the KL divergence.
    #[arg(long, global = true, env = "HONKIT_DIRECTION", value_enum, default_value_t = Direction::Out)]
    direction: Direction,
    /// Fraction of path instances held out by `predict --holdout`.
    #[arg(long, global = true, env = "HONKIT_SPLIT", default_value_t = 0.2)]
    split: f64,
    #[arg(long, global = true, env = "HONKIT_SEED", default_value_t = 42)]
    seed: u64,
    /// Largest layer whose shortest paths are computed from every source.
    #[arg(
        long,
        global = true,
        env = "HONKIT_EXACT_SP_THRESHOLD",
        default_value_t = 20_000
    )]
    exact_sp_threshold: usize,
    /// Sources sampled for shortest paths above the threshold.
    #[arg(long, global = true, env = "HONKIT_SP_SAMPLES", default_value_t = 1000)]
    sp_samples: usize,
    /// Layout of input path files.
    #[arg(long, global = true, env = "HONKIT_INPUT_FORMAT", value_enum, default_value_t = Format::Lines)]
    input_format: Format,
    /// Report format; each command has its own default.
    #[arg(long, global = true, env = "HONKIT_FORMAT", value_enum)]
    format: Option<OutputFormat>,
    /// Write the report here instead of standard output.
    #[arg(short, long, global = true, env = "HONKIT_OUTPUT")]
    output: Option<PathBuf>,
}

impl Settings {
    fn config(&self) -> RunConfig {
        RunConfig {
            max_order: self.max_order,
            epsilon: self.epsilon,
            damping: self.damping,
            pagerank_tol: self.pagerank_tol,
            pagerank_max_iter: self.pagerank_max_iter,
            kl_epsilon: self.kl_epsilon,
            degree_direction: self.direction,
            split_fraction: self.split,
            seed: self.seed,
            exact_sp_threshold: self.exact_sp_threshold,
            sp_sample_sources: self.sp_samples,
            input_format: self.input_format,
            format: self.format,
        }
    }
}

#[derive(Args, Debug)]
struct Input {
    /// Path file, or `-` for standard input.
    #[arg(short, long)]
    input: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Path counts and length distribution.
    Stats(Input),
    /// Serialize the network of one order.
    Build {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        order: usize,
        /// Emit `u,v,count` instead of the full edge table.
        #[arg(long)]
        edge_list: bool,
    },
    /// Likelihood-ratio order selection.
    Order(Input),
    /// Structural metrics for orders 1..=max-order.
    Report(Input),
    /// Agreement between aggregated PageRank and visit counts per order.
    Pagerank {
        #[command(flatten)]
        input: Input,
        /// Also write per-node aggregated scores as CSV.
        #[arg(long)]
        scores: Option<PathBuf>,
    },
    /// Next-node prediction accuracy per order.
    Predict {
        #[command(flatten)]
        input: Input,
        /// Add a curve for a model trained on a seeded split.
        #[arg(long)]
        holdout: bool,
    },
    /// Compare two scenarios.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Sample paths from a planted chain of known order.
    Synth {
        #[arg(long, default_value_t = 10)]
        nodes: usize,
        /// Memory of the planted chain.
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, default_value_t = 3)]
        branching: usize,
        #[arg(long, default_value_t = 0.9)]
        determinism: f64,
        #[arg(long, default_value_t = 1000)]
        paths: usize,
        #[arg(long, default_value_t = 8)]
        min_len: usize,
        #[arg(long, default_value_t = 15)]
        max_len: usize,
    },
}

fn label(p: &Path) -> String {
    p.display().to_string()
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = cli.settings.config();
    cfg.validate()?;
    let out = cli.settings.output.as_deref();
    let load = |input: &Path| read_corpus(input, cfg.input_format);
    let text = match cli.command {
        Command::Stats(i) => commands::stats(&load(&i.input)?, &cfg),
        Command::Build {
            input,
            order,
            edge_list,
        } => commands::build(&load(&input.input)?, order, edge_list, &cfg)?,
        Command::Order(i) => commands::order(&load(&i.input)?, &cfg)?,
        Command::Report(i) => commands::report(&load(&i.input)?, &cfg)?,
        Command::Pagerank { input, scores } => {
            let (text, per_node) = commands::pagerank(&load(&input.input)?, &cfg)?;
            if let Some(path) = scores {
                emit(Some(&path), &per_node)?;
            }
            text
        }
        Command::Predict { input, holdout } => {
            commands::predict(&load(&input.input)?, holdout, &cfg)?
        }
        Command::Compare { a, b } => {
            let (ca, cb) = (load(&a)?, load(&b)?);
            commands::compare(&label(&a), &ca, &label(&b), &cb, &cfg)?
        }
        Command::Synth {
            nodes,
            order,
            branching,
            determinism,
            paths,
            min_len,
            max_len,
        } => commands::synth(
            &SynthParams {
                nodes,
                order,
                branching,
                determinism,
                paths,
                min_len,
                max_len,
            },
            &cfg,
        )?,
    };
    emit(out, &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests print to stdout and succeed.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("honkit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
