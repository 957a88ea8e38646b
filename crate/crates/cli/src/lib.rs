//! Command implementations behind the `ptgp` binary.
//!
//! Exit codes: 0 on success (or a true equivalence verdict), 1 on a false
//! verdict, 2 on usage, validation or I/O errors.

pub mod config;
pub mod equiv;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ptgp::expr::count_search_space;
use ptgp::tempering::{run_with_observer, HistoryRow, RunResult};
use ptgp::{parse_infix, BoxSpec, Dataset};

use config::{DataConfig, RunFile};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERDICT_FALSE: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

pub const HISTORY_FILE: &str = "history.csv";
pub const RESULT_FILE: &str = "result.json";

#[derive(Debug, Parser)]
#[command(name = "ptgp", version, about = "Parallel-tempering GP search for pair potentials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Manufacture a Lennard-Jones training set.
    GenData {
        /// Key/value config (box spec, k_box, seed); defaults if omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Run the tempering search.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Dataset file; overrides `dataset_path` in the config.
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        output_dir: PathBuf,
        /// Worker threads; overrides `threads` in the config.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the number of maximal trees for m operators, depth k, constants in [-p, p].
    CountSpace {
        #[arg(long, default_value_t = 5)]
        m: u64,
        #[arg(long, default_value_t = 4)]
        k: u32,
        #[arg(long, default_value_t = 20)]
        p: u64,
    },
    /// Compare a candidate tree with Lennard-Jones on a dense grid.
    CheckEquiv(CheckEquivArgs),
}

#[derive(Debug, Args)]
pub struct CheckEquivArgs {
    /// Candidate in infix form.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    pub tree: Option<String>,
    /// Read the candidate from a file.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Take r_lo, r_hi, epsilon and sigma from a dataset file.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub r_lo: Option<f64>,
    #[arg(long)]
    pub r_hi: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = equiv::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = equiv::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Runs a parsed command and returns its exit code.
pub fn execute(cli: Cli) -> u8 {
    let outcome = match cli.command {
        Command::GenData { config, output } => gen_data(config.as_deref(), &output),
        Command::Run { config, dataset, output_dir, threads } => {
            run(config.as_deref(), dataset.as_deref(), &output_dir, threads)
        }
        Command::CountSpace { m, k, p } => count_space(m, k, p),
        Command::CheckEquiv(args) => check_equiv(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

pub fn gen_data(config: Option<&Path>, output: &Path) -> Result<u8> {
    let cfg: DataConfig = config::load(config)?;
    let dataset = Dataset::build(cfg.box_spec(), cfg.k_box, cfg.seed)?;
    dataset.save(output).with_context(|| format!("writing {}", output.display()))?;
    println!(
        "wrote {} boxes to {} (mean {:.2} distances per box)",
        dataset.k_box(),
        output.display(),
        dataset.mean_distances_per_box()
    );
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ResultDocument<'a> {
    best_tree_infix: String,
    /// `null` when no finite tree was ever found.
    best_fitness: Option<f64>,
    best_mse: Option<f64>,
    generation_found: usize,
    generations_run: usize,
    converged: bool,
    swap_attempts: u64,
    swap_accepts: u64,
    master_seed: u64,
    dataset: String,
    config: &'a RunFile,
}

pub fn run(
    config: Option<&Path>,
    dataset: Option<&Path>,
    output_dir: &Path,
    threads: Option<usize>,
) -> Result<u8> {
    let mut file: RunFile = config::load(config)?;
    if let Some(t) = threads {
        file.threads = t;
    }
    let dataset_path = match (dataset, &file.dataset_path) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => p.clone(),
        (None, None) => bail!("no dataset given (use --dataset or dataset_path)"),
    };
    let run_config = file.to_run_config()?;
    let data = Dataset::load(&dataset_path)
        .with_context(|| format!("loading dataset {}", dataset_path.display()))?;

    fs::create_dir_all(output_dir)
        .with_context(|| format!("creating {}", output_dir.display()))?;
    let history_path = output_dir.join(HISTORY_FILE);
    let mut history = BufWriter::new(File::create(&history_path)?);
    writeln!(history, "{}", HistoryRow::CSV_HEADER)?;
    history.flush()?;
    let mut write_error = None;
    let result = run_with_observer(&run_config, &data, |row| {
        if write_error.is_none() {
            if let Err(e) = writeln!(history, "{}", row.to_csv()).and_then(|_| history.flush()) {
                write_error = Some(e);
            }
        }
    })?;
    if let Some(e) = write_error {
        return Err(e).context("writing history");
    }
    write_result(&output_dir.join(RESULT_FILE), &result, &file, &dataset_path)?;
    println!(
        "best mse {:e} at generation {} after {} generations: {}",
        result.best_mse(),
        result.generation_found,
        result.generations_run,
        result.best_infix()
    );
    Ok(EXIT_OK)
}

fn write_result(path: &Path, result: &RunResult, file: &RunFile, dataset: &Path) -> Result<()> {
    let finite = result.best_fitness.is_finite();
    let doc = ResultDocument {
        best_tree_infix: result.best_infix(),
        best_fitness: finite.then(|| result.best_fitness.value()),
        best_mse: finite.then(|| result.best_mse()),
        generation_found: result.generation_found,
        generations_run: result.generations_run,
        converged: result.converged,
        swap_attempts: result.swaps.attempted,
        swap_accepts: result.swaps.accepted,
        master_seed: file.seed,
        dataset: dataset.display().to_string(),
        config: file,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn count_space(m: u64, k: u32, p: u64) -> Result<u8> {
    if m < 1 || k < 1 {
        bail!("m and k must be at least 1");
    }
    if k >= 32 {
        bail!("k must be below 32");
    }
    println!("{}", count_search_space(m, k, p));
    Ok(EXIT_OK)
}

pub fn check_equiv(args: &CheckEquivArgs) -> Result<u8> {
    let text = match (&args.tree, &args.file) {
        (Some(t), _) => t.clone(),
        (None, Some(f)) => {
            fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?
        }
        (None, None) => bail!("no candidate tree given"),
    };
    let tree = parse_infix(text.trim())?;
    if args.samples < 2 {
        bail!("--samples must be at least 2");
    }
    if !(args.tolerance > 0.0) {
        bail!("--tolerance must be positive");
    }
    let mut spec = match &args.dataset {
        Some(p) => Dataset::load(p).with_context(|| format!("loading {}", p.display()))?.spec,
        None => BoxSpec::default(),
    };
    spec.r_lo = args.r_lo.unwrap_or(spec.r_lo);
    spec.r_hi = args.r_hi.unwrap_or(spec.r_hi);
    spec.epsilon = args.epsilon.unwrap_or(spec.epsilon);
    spec.sigma = args.sigma.unwrap_or(spec.sigma);
    if !(spec.r_lo > 0.0 && spec.r_lo < spec.r_hi && spec.epsilon > 0.0 && spec.sigma > 0.0) {
        bail!("need 0 < r_lo < r_hi and positive epsilon, sigma");
    }
    let report = equiv::check(&tree, &spec, args.samples, args.tolerance);
    let json = serde_json::to_string_pretty(&report)?;
    match &args.output {
        Some(p) => fs::write(p, json + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{json}"),
    }
    match (&report.diagnostic, report.max_rel_error) {
        (Some(d), _) => eprintln!("not equivalent: {d}"),
        (None, Some(e)) => eprintln!(
            "{}: max relative error {e:e}",
            if report.verdict { "equivalent" } else { "not equivalent" }
        ),
        (None, None) => {}
    }
    Ok(if report.verdict { EXIT_OK } else { EXIT_VERDICT_FALSE })
}
