use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use pcai::data::{apply_mcar, restore_column_order, MaskedDataset, Matrix};
use pcai::eval::{mse_masked, CvPlan};
use pcai::harness::{
    default_q, emit_report, generate_synthetic, load_csv, render_table, run_experiments, write_csv,
    write_mask_csv, ConfigFile, SyntheticSpec,
};
use pcai::pipeline::{cross_validate, run_imputation};
use pcai::{Error, ImputerKind, ImputerSpec, PipelineSpec, Strategy};

#[derive(Parser)]
#[command(name = "pcai", version, about = "PCA-accelerated imputation and classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic low-rank ground-truth CSV.
    Synth(SynthArgs),
    /// Apply MCAR masking to the trailing columns of a complete CSV.
    Mask(MaskArgs),
    /// Impute a masked CSV with one strategy and imputer.
    Impute(ImputeArgs),
    /// Run a sweep described by a config file.
    Bench(BenchArgs),
    /// Cross-validate a PIC pipeline on a masked, labeled CSV.
    Pic(PicArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    rows: usize,
    #[arg(long, default_value_t = 300)]
    cols: usize,
    #[arg(long, default_value_t = 8)]
    rank: usize,
    #[arg(long, default_value_t = 0.01)]
    noise: f64,
    #[arg(long, default_value_t = 3)]
    classes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Name of the label column; omit labels with --no-labels.
    #[arg(long, default_value = "label")]
    label_column: String,
    #[arg(long)]
    no_labels: bool,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct MaskArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long)]
    rate: f64,
    /// Leading columns kept fully observed; default ceil(5p/6).
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
    /// 0/1 mask sidecar; default `<out>.mask.csv`.
    #[arg(long)]
    mask_out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ImputerArgs {
    #[arg(long, default_value = "soft_impute")]
    imputer: ImputerKind,
    #[arg(long)]
    knn_k: Option<usize>,
    #[arg(long)]
    soft_lambda_frac: Option<f64>,
    #[arg(long)]
    soft_max_iter: Option<usize>,
    #[arg(long)]
    svd_rank: Option<usize>,
    #[arg(long)]
    mice_cycles: Option<usize>,
    #[arg(long)]
    mice_ridge_alpha: Option<f64>,
    #[arg(long, default_value_t = 0.95)]
    variance_target: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = pcai::pipeline::DEFAULT_TIME_BUDGET_SECONDS)]
    time_budget: f64,
}

impl ImputerArgs {
    fn spec(&self, strategy: Strategy) -> PipelineSpec {
        let d = ImputerSpec::new(self.imputer);
        let imputer = ImputerSpec {
            knn_k: self.knn_k.unwrap_or(d.knn_k),
            soft_lambda_frac: self.soft_lambda_frac.unwrap_or(d.soft_lambda_frac),
            soft_max_iter: self.soft_max_iter.unwrap_or(d.soft_max_iter),
            svd_rank: self.svd_rank.unwrap_or(d.svd_rank),
            mice_cycles: self.mice_cycles.unwrap_or(d.mice_cycles),
            mice_ridge_alpha: self.mice_ridge_alpha.unwrap_or(d.mice_ridge_alpha),
            ..d
        };
        PipelineSpec {
            variance_target: self.variance_target,
            time_budget_seconds: self.time_budget,
            ..PipelineSpec::new(strategy, imputer).with_seed(self.seed)
        }
    }
}

#[derive(Args)]
struct ImputeArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long)]
    label_column: Option<String>,
    /// traditional or pcai
    #[arg(long, default_value = "pcai")]
    strategy: Strategy,
    #[command(flatten)]
    imputer: ImputerArgs,
    /// Complete CSV with the same columns; when given, the MSE over masked cells is printed.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Flat TOML config; flags below override its keys.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    imputers: Option<Vec<String>>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    time_budget: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Report base path; `.jsonl` / `.txt` extensions are added.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// jsonl, table or both
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct PicArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long)]
    label_column: String,
    /// pic, pic_reduce or pca_on_full
    #[arg(long, default_value = "pic")]
    strategy: Strategy,
    #[command(flatten)]
    imputer: ImputerArgs,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Metrics JSON path; printed to stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Parse { .. } | Error::Input { .. } | Error::Contract(_) => {
                Failure::Config(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Mask(a) => mask(a),
        Command::Impute(a) => impute(a),
        Command::Bench(a) => bench(a),
        Command::Pic(a) => pic(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn feature_names(cols: usize) -> Vec<String> {
    (0..cols).map(|j| format!("f{j}")).collect()
}

fn synth(a: SynthArgs) -> CmdResult {
    let spec = SyntheticSpec {
        rows: a.rows,
        cols: a.cols,
        rank: a.rank,
        noise: a.noise,
        classes: a.classes,
        seed: a.seed,
    };
    let ds = generate_synthetic(&spec)?;
    let labels: Option<Vec<String>> = ds
        .labels()
        .filter(|_| !a.no_labels)
        .map(|l| l.iter().map(usize::to_string).collect());
    write_csv(
        &a.out,
        &feature_names(a.cols),
        ds.data(),
        None,
        labels.as_deref().map(|l| (a.label_column.as_str(), l)),
    )?;
    Ok(())
}

fn mask(a: MaskArgs) -> CmdResult {
    let loaded = load_csv(&a.input, a.label_column.as_deref())?;
    let ds = &loaded.dataset;
    if ds.mask().any_missing() {
        return Err(Failure::Config(format!(
            "{}: input already has missing cells",
            a.input.display()
        )));
    }
    let q = a.q.unwrap_or_else(|| default_q(ds.cols()));
    let masked = apply_mcar(&ds.with_partition(q)?, a.rate, a.seed)?;
    let label_strings = loaded.label_strings();
    let labels = loaded
        .label_column
        .as_deref()
        .zip(label_strings.as_deref());
    write_csv(&a.out, &loaded.feature_names, masked.data(), Some(masked.mask()), labels)?;
    let mask_path = a.mask_out.unwrap_or_else(|| a.out.with_extension("mask.csv"));
    write_mask_csv(&mask_path, &loaded.feature_names, masked.mask())?;
    eprintln!(
        "masked {} of {} cells in columns {q}..{}",
        masked.mask().count_missing(),
        masked.rows() * (masked.cols() - q),
        masked.cols()
    );
    Ok(())
}

/// Loaded masked CSV with `q` set to its fully observed column count.
fn require_split(loaded: &MaskedDataset, path: &std::path::Path) -> CmdResult {
    if loaded.q() == 0 {
        return Err(Failure::Config(format!(
            "{}: every column has missing cells; PCA needs at least one fully observed column",
            path.display()
        )));
    }
    Ok(())
}

fn impute(a: ImputeArgs) -> CmdResult {
    if a.strategy.is_classification() {
        return Err(Failure::Config(format!("{} is not an imputation strategy", a.strategy)));
    }
    let loaded = load_csv(&a.input, a.label_column.as_deref())?;
    let ds = &loaded.dataset;
    if a.strategy == Strategy::Pcai {
        require_split(ds, &a.input)?;
    }
    let spec = a.imputer.spec(a.strategy);
    let out = run_imputation(ds, &spec)?;
    let q = ds.q();
    let mut full = ds.data().clone();
    full.columns_mut(q, ds.cols() - q).copy_from(&out.m_prime);
    let completed = restore_column_order(&full, &loaded.permutation);
    let label_strings = loaded.label_strings();
    let labels = loaded
        .label_column
        .as_deref()
        .zip(label_strings.as_deref());
    write_csv(&a.out, &loaded.feature_names, &completed, None, labels)?;

    let mut metrics = json!({
        "strategy": a.strategy.name(),
        "imputer": a.imputer.imputer.name(),
        "q": q,
        "iterations_run": out.iterations_run,
        "converged": out.converged,
        "stage_seconds": out.timings.stages(),
        "total_seconds": out.timings.total(),
    });
    if let Some(k) = out.pca.as_ref().map(|m| m.k()) {
        metrics["pca_components"] = json!(k);
    }
    if let Some(truth_path) = &a.truth {
        let truth = load_csv(truth_path, a.label_column.as_deref())?;
        let truth_data: &Matrix = truth.dataset.data();
        let original_mask = ds.mask().permute_columns(&inverse(&loaded.permutation));
        let truth_orig = restore_column_order(truth_data, &truth.permutation);
        if truth_orig.shape() != completed.shape() {
            return Err(Failure::Config("truth and input shapes differ".into()));
        }
        metrics["mse"] = json!(mse_masked(&completed, &truth_orig, &original_mask)?);
    }
    println!("{metrics}");
    Ok(())
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    inv
}

fn bench(a: BenchArgs) -> CmdResult {
    let base = match &a.config {
        Some(path) => ConfigFile::from_file(path)?,
        None => ConfigFile::default(),
    };
    let flags = ConfigFile {
        csv: a.csv,
        label_column: a.label_column,
        q: a.q,
        missing_rates: a.rates,
        strategies: a.strategies,
        imputers: a.imputers,
        folds: a.folds,
        seed: a.seed,
        time_budget_seconds: a.time_budget,
        workers: a.workers,
        output: a.output,
        format: a.format,
        ..ConfigFile::default()
    };
    let config = base.overlay(flags).into_run_config()?;
    let records = run_experiments(&config)?;
    print!("{}", render_table(&records, config.workers));
    if let Some(base) = &config.output {
        for path in emit_report(&records, base, config.format, config.workers)? {
            eprintln!("wrote {}", path.display());
        }
    }
    if records.iter().all(|r| r.na) {
        return Err(Failure::Runtime("every cell is NA".into()));
    }
    Ok(())
}

fn pic(a: PicArgs) -> CmdResult {
    if !a.strategy.is_classification() {
        return Err(Failure::Config(format!("{} is not a classification strategy", a.strategy)));
    }
    let loaded = load_csv(&a.input, Some(&a.label_column))?;
    let ds = &loaded.dataset;
    require_split(ds, &a.input)?;
    let spec = a.imputer.spec(a.strategy);
    let plan = CvPlan::stratified(a.folds, a.imputer.seed);
    let out = cross_validate(ds, &spec, &plan)?;
    let metrics = json!({
        "strategy": a.strategy.name(),
        "imputer": a.imputer.imputer.name(),
        "q": ds.q(),
        "folds": a.folds,
        "accuracy": out.score.mean,
        "fold_accuracies": out.score.folds,
        "input_widths": out.input_widths,
        "stage_seconds": out.timings.stages(),
        "total_seconds": out.timings.total(),
    });
    let text = serde_json::to_string_pretty(&metrics).map_err(|e| Failure::Runtime(e.to_string()))?;
    match &a.out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| Failure::Runtime(e.to_string()))?,
        None => println!("{text}"),
    }
    Ok(())
}
