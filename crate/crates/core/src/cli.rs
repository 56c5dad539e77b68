//! `gen`, `train`, `eval` and `infer` commands.
//!
//! All randomness comes from the `--seed` flags. `train` owns the
//! train/test split and writes the held-out tracks to `<out-model>.test.csv`
//! so `eval` sees exactly the samples the network never trained on.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::{build_pairs, split, NormSpec, Scheme};
use crate::eval::{evaluate, infer_corrupted, EvalMode, DEFAULT_THRESHOLD};
use crate::model::{load_model, save_model};
use crate::nn::{init_network, CANONICAL_DIMS};
use crate::trackgen::{gen_dataset, load_csv, save_csv, GenConfig, DEFAULT_WIRES, SUPERLAYERS};
use crate::train::{train, TrainConfig};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "segrestore", version, about = "Restore a missing drift-chamber segment with a denoising autoencoder")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic tracks as CSV.
    Gen(GenArgs),
    /// Split, corrupt, normalize and train; writes the model, history and test split.
    Train(TrainArgs),
    /// Evaluate a model on a test CSV; writes report.txt, histogram.csv, per_index.csv.
    Eval(EvalArgs),
    /// Predict the one missing segment of a single track.
    Infer(InferArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_WIRES)]
    pub wires: u32,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// A: one random missing slot per track; B: all six slots per track.
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Scheme,
    #[arg(long)]
    pub train_n: usize,
    #[arg(long)]
    pub test_n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out_model: PathBuf,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub momentum: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub target_mse: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_WIRES)]
    pub wires: u32,
    /// Defaults to `history.csv` beside the model.
    #[arg(long)]
    pub history: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Random,
    All,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_WIRES)]
    pub wires: u32,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Six comma-separated wire positions, exactly one of them 0.
    #[arg(long, allow_hyphen_values = true)]
    pub input: String,
    #[arg(long, default_value_t = DEFAULT_WIRES)]
    pub wires: u32,
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Fully resolved settings of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data: PathBuf,
    pub scheme: Scheme,
    pub train_n: usize,
    pub test_n: usize,
    pub seed: u64,
    pub model_path: PathBuf,
    pub history_path: PathBuf,
    pub test_path: PathBuf,
    pub norm: NormSpec,
    pub train: TrainConfig,
}

impl RunConfig {
    pub fn from_args(args: &TrainArgs) -> Result<Self> {
        let defaults = TrainConfig::default();
        let train = TrainConfig {
            learning_rate: args.lr.unwrap_or(defaults.learning_rate),
            momentum: args.momentum.unwrap_or(defaults.momentum),
            max_epochs: args.epochs.unwrap_or(defaults.max_epochs),
            target_mse: args.target_mse.unwrap_or(defaults.target_mse),
            shuffle_seed: args.seed.wrapping_add(3),
            ..defaults
        };
        train.validate().map_err(|e| Error::Usage(e.to_string()))?;
        let history_path = args.history.clone().unwrap_or_else(|| {
            args.out_model
                .parent()
                .unwrap_or(Path::new(""))
                .join("history.csv")
        });
        Ok(Self {
            data: args.data.clone(),
            scheme: args.scheme,
            train_n: args.train_n,
            test_n: args.test_n,
            seed: args.seed,
            test_path: test_split_path(&args.out_model),
            model_path: args.out_model.clone(),
            history_path,
            norm: NormSpec::new(args.wires)?,
            train,
        })
    }

    pub fn split_seed(&self) -> u64 {
        self.seed
    }

    pub fn corruption_seed(&self) -> u64 {
        self.seed.wrapping_add(1)
    }

    pub fn init_seed(&self) -> u64 {
        self.seed.wrapping_add(2)
    }
}

/// `<model>.test.csv`
pub fn test_split_path(model: &Path) -> PathBuf {
    let mut s = model.as_os_str().to_owned();
    s.push(".test.csv");
    PathBuf::from(s)
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Usage(e.to_string()))?;
    execute(cli.command, out)
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Train(a) => cmd_train(&a, out),
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Infer(a) => cmd_infer(&a, out),
    }
}

fn emit(out: &mut dyn Write, line: String) -> Result<()> {
    writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<()> {
    if args.n == 0 {
        return Err(Error::Usage("--n must be >= 1".into()));
    }
    let cfg = GenConfig {
        wires: args.wires,
        seed: args.seed,
        ..GenConfig::default()
    };
    cfg.validate().map_err(|e| Error::Usage(e.to_string()))?;
    let samples = gen_dataset(args.n, &cfg)?;
    save_csv(&samples, &args.out)?;
    emit(out, format!("wrote {} tracks to {}", samples.len(), args.out.display()))
}

pub fn cmd_train(args: &TrainArgs, out: &mut dyn Write) -> Result<()> {
    let run = RunConfig::from_args(args)?;
    let samples = load_csv(&run.data, run.norm.wires())?;
    let (train_set, test_set) = split(&samples, run.train_n, run.test_n, run.split_seed())?;
    if train_set.is_empty() {
        return Err(Error::Usage("--train-n must be >= 1".into()));
    }

    let pairs = build_pairs(&train_set, run.scheme, run.corruption_seed())
        .iter()
        .map(|p| p.normalized(&run.norm))
        .collect::<Result<Vec<_>>>()?;

    let mut net = init_network(&CANONICAL_DIMS, run.init_seed())?;
    let report = train(&pairs, &run.train, &mut net)?;

    save_model(&net, &run.model_path)?;
    report.save_history(&run.history_path)?;
    save_csv(&test_set, &run.test_path)?;

    emit(
        out,
        format!(
            "scheme {:?}: {} pairs, {} epochs, mse {:.3e} -> {:.3e}",
            run.scheme,
            pairs.len(),
            report.epochs_run,
            report.initial_mse,
            report.final_mse
        ),
    )?;
    emit(out, format!("model: {}", run.model_path.display()))?;
    emit(out, format!("history: {}", run.history_path.display()))?;
    emit(out, format!("test split ({} tracks): {}", test_set.len(), run.test_path.display()))
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let spec = NormSpec::new(args.wires)?;
    let net = load_model(&args.model)?;
    let test = load_csv(&args.test, spec.wires())?;
    let mode = match args.mode {
        ModeArg::Random => EvalMode::RandomIndex(args.seed),
        ModeArg::All => EvalMode::AllIndices,
    };
    let report = evaluate(&net, &test, mode, &spec, args.threshold)?;
    report.write_to_dir(&args.out)?;
    emit(
        out,
        format!(
            "n = {}, mean = {:.4}, std = {:.4} wires, recovery@{} = {:.4}",
            report.n, report.mean, report.std, args.threshold, report.recovery_rate
        ),
    )
}

pub fn cmd_infer(args: &InferArgs, out: &mut dyn Write) -> Result<()> {
    let spec = NormSpec::new(args.wires)?;
    let fields: Vec<&str> = args.input.split(',').map(str::trim).collect();
    if fields.len() != SUPERLAYERS {
        return Err(Error::Usage(format!(
            "--input needs {SUPERLAYERS} comma-separated values, got {}",
            fields.len()
        )));
    }
    let mut input = [0.0; SUPERLAYERS];
    for (v, f) in input.iter_mut().zip(&fields) {
        *v = f
            .parse()
            .map_err(|_| Error::Usage(format!("--input field {f:?} is not a number")))?;
    }
    // Validate the sentinel count before touching the model file.
    let zeros = input.iter().filter(|&&v| v == 0.0).count();
    if zeros != 1 {
        return Err(Error::Usage(format!(
            "--input must contain exactly one 0 (the missing segment), found {zeros}"
        )));
    }
    let net = load_model(&args.model)?;
    let (_, predicted) = infer_corrupted(&net, &input, &spec)?;
    emit(out, format!("{predicted:.4}"))
}
