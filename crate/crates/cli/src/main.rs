//! `aead` — train autoencoders on tabular energy data and detect anomalies.
//!
//! Subcommands: `train`, `score`, `detect`, `sweep`, `synth`, `gradcheck`,
//! `hist`. Every command prints one `config:` line with all defaults
//! resolved, so any run is reproducible from its output. All file writes are
//! atomic (a `.partial` sibling is renamed into place).
//!
//! Exit codes: 0 success, 1 runtime/data error, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use aead_core::data::{gen_synthetic, probe_record, split_holdout, Dataset, Normalizer};
use aead_core::detect::{
    classify, evaluate, export_histogram, histogram_to_csv_string, score_dataset, sweep_thresholds,
    ScoreReport, SweepObjective, ThresholdPair,
};
use aead_core::loss::LossConfig;
use aead_core::model::{build_model, train, ArchKind, ArchitectureSpec, Checkpoint, TrainConfig};
use aead_core::nn::gradient_check;
use aead_core::{fsio, Error};

#[derive(Parser)]
#[command(
    name = "aead",
    version,
    about = "Autoencoder-based anomaly detection for tabular building-energy data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ArchArg {
    Simple,
    Deep,
    Sdae,
}

impl ArchArg {
    fn kind(self) -> ArchKind {
        match self {
            ArchArg::Simple => ArchKind::SimpleAe,
            ArchArg::Deep => ArchKind::DeepAe,
            ArchArg::Sdae => ArchKind::Sdae,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ArchArg::Simple => "simple",
            ArchArg::Deep => "deep",
            ArchArg::Sdae => "sdae",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    /// Maximize F1.
    F1,
    /// Maximize F_beta (see --beta).
    Fbeta,
    /// Maximize true positives subject to a false-positive cap (--fp-cap).
    Fpcap,
}

/// Loss weights shared by the training-side commands.
#[derive(Args)]
struct LossArgs {
    /// Supervised loss weight (SDAE only).
    #[arg(long = "w-s", env = "AEAD_WS", default_value_t = 1.0)]
    w_s: f64,
    /// Reconstruction loss weight (SDAE only).
    #[arg(long = "w-ae", env = "AEAD_WAE", default_value_t = 1.0)]
    w_ae: f64,
    /// Probability clamp for the supervised BCE term.
    #[arg(long, env = "AEAD_CLAMP_EPS", default_value_t = 1e-7)]
    clamp_eps: f64,
}

impl LossArgs {
    fn config(&self) -> LossConfig {
        LossConfig {
            w_s: self.w_s,
            w_ae: self.w_ae,
            clamp_eps: self.clamp_eps,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write a checkpoint plus a loss-history CSV.
    Train {
        /// Architecture to train.
        #[arg(long, value_enum)]
        arch: ArchArg,
        /// Training CSV (features, with a final `anomaly` column for sdae).
        #[arg(long)]
        data: PathBuf,
        #[arg(long, env = "AEAD_EPOCHS", default_value_t = 1000)]
        epochs: usize,
        #[arg(long, env = "AEAD_BATCH", default_value_t = 32)]
        batch: usize,
        #[arg(long, env = "AEAD_LR", default_value_t = 1e-3)]
        lr: f64,
        #[arg(long, env = "AEAD_SEED", default_value_t = 0)]
        seed: u64,
        /// Fraction of rows held out from training (0 disables).
        #[arg(long, default_value_t = 0.0)]
        holdout: f64,
        #[command(flatten)]
        loss: LossArgs,
        /// Checkpoint output path; the loss history lands at <out>.loss.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a dataset with a trained checkpoint and write a report CSV.
    Score {
        #[arg(long)]
        ckpt: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify a dataset with explicit thresholds; prints metrics when the
    /// data is labeled.
    Detect {
        #[arg(long)]
        ckpt: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        lower: f64,
        #[arg(long, allow_negative_numbers = true)]
        upper: f64,
        /// Optional flagged score-report CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for the objective-maximizing threshold pair on labeled data.
    Sweep {
        #[arg(long)]
        ckpt: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::F1)]
        objective: ObjectiveArg,
        /// Beta for --objective fbeta.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// False-positive cap for --objective fpcap.
        #[arg(long, default_value_t = 0)]
        fp_cap: usize,
        /// Optional flagged score-report CSV using the best thresholds.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a labeled synthetic dataset near a 2-D manifold.
    Synth {
        #[arg(long, env = "AEAD_SEED", default_value_t = 0)]
        seed: u64,
        /// Number of normal rows.
        #[arg(long)]
        normal: usize,
        /// Number of anomalous rows.
        #[arg(long)]
        anomalies: usize,
        /// Feature width.
        #[arg(long, default_value_t = 13)]
        dim: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare analytic gradients against finite differences on a fresh
    /// network; prints the maximum relative error.
    Gradcheck {
        #[arg(long, value_enum)]
        arch: ArchArg,
        #[arg(long, env = "AEAD_SEED", default_value_t = 0)]
        seed: u64,
        /// Finite-difference step.
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
        #[command(flatten)]
        loss: LossArgs,
    },
    /// Bin a score-report CSV into a label-split histogram CSV.
    Hist {
        /// Score report CSV (from `score`, `detect`, or `sweep`).
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Train {
            arch,
            data,
            epochs,
            batch,
            lr,
            seed,
            holdout,
            loss,
            out,
        } => cmd_train(arch, &data, epochs, batch, lr, seed, holdout, &loss, &out),
        Command::Score { ckpt, data, out } => cmd_score(&ckpt, &data, &out),
        Command::Detect {
            ckpt,
            data,
            lower,
            upper,
            out,
        } => cmd_detect(&ckpt, &data, lower, upper, out.as_deref()),
        Command::Sweep {
            ckpt,
            data,
            objective,
            beta,
            fp_cap,
            out,
        } => cmd_sweep(&ckpt, &data, objective, beta, fp_cap, out.as_deref()),
        Command::Synth {
            seed,
            normal,
            anomalies,
            dim,
            out,
        } => cmd_synth(seed, normal, anomalies, dim, &out),
        Command::Gradcheck {
            arch,
            seed,
            eps,
            loss,
        } => cmd_gradcheck(arch, seed, eps, &loss),
        Command::Hist { scores, bins, out } => cmd_hist(&scores, bins, &out),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_train(
    arch: ArchArg,
    data_path: &Path,
    epochs: usize,
    batch: usize,
    lr: f64,
    seed: u64,
    holdout: f64,
    loss: &LossArgs,
    out: &Path,
) -> Result<(), Error> {
    println!(
        "config: train arch={} data={} epochs={epochs} batch={batch} lr={lr} seed={seed} \
         holdout={holdout} w_s={} w_ae={} clamp_eps={} out={}",
        arch.name(),
        data_path.display(),
        loss.w_s,
        loss.w_ae,
        loss.clamp_eps,
        out.display()
    );
    if !(0.0..1.0).contains(&holdout) {
        return Err(Error::Config(format!(
            "holdout must be in [0, 1), got {holdout}"
        )));
    }

    let dataset = Dataset::from_csv_path(data_path)?;
    if dataset.is_empty() {
        return Err(Error::Precondition("training dataset is empty".to_string()));
    }

    let mut spec = ArchitectureSpec::new(arch.kind());
    spec.input_dim = dataset.feature_dim();
    spec.validate()?;

    // Optional holdout: split after a seeded shuffle so the partition is
    // reproducible; the normalizer is fit on the training partition only.
    let (holdout_set, train_set) = split_holdout(&dataset, holdout, seed ^ 0xB5AD_4ECE_DA1C_E2A9)?;
    let normalizer = Normalizer::fit(&train_set)?;
    let train_scaled = normalizer.apply(&train_set)?;

    let config = TrainConfig {
        epochs,
        batch_size: batch,
        learning_rate: lr,
        seed,
        loss: loss.config(),
    };
    let net = build_model(&spec, seed)?;
    let supervised = arch.kind().is_supervised();
    let (net, history) = train(net, train_scaled.records(), &config, supervised)?;

    let checkpoint = Checkpoint::new(&spec, &net, &normalizer, seed, &config.loss)?;
    checkpoint.save(out)?;
    let history_path = loss_history_path(out);
    fsio::write_atomic(&history_path, &history.to_csv_string())?;

    println!(
        "trained {} epochs on {} rows; final loss {:.6}",
        history.len(),
        train_set.len(),
        history.total.last().expect("epochs >= 1")
    );
    println!("checkpoint: {}", out.display());
    println!("loss history: {}", history_path.display());

    if !holdout_set.is_empty() {
        let holdout_scaled = normalizer.apply(&holdout_set)?;
        let mut loss_sum = 0.0;
        for record in holdout_scaled.records() {
            let reconstructed = aead_core::model::reconstruct(&net, record)?;
            loss_sum += aead_core::loss::mse(&record.features, &reconstructed)?;
        }
        println!(
            "holdout: {} rows, mean reconstruction loss {:.6}",
            holdout_set.len(),
            loss_sum / holdout_set.len() as f64
        );
    }
    Ok(())
}

/// `model.json` → `model.json.loss.csv`.
fn loss_history_path(checkpoint: &Path) -> PathBuf {
    let mut os = checkpoint.as_os_str().to_owned();
    os.push(".loss.csv");
    PathBuf::from(os)
}

/// Load a checkpoint and a dataset, scale the features with the stored
/// normalizer, and score every row.
fn load_and_score(ckpt: &Path, data_path: &Path) -> Result<(Vec<f64>, Option<Vec<bool>>), Error> {
    let checkpoint = Checkpoint::load(ckpt)?;
    let net = checkpoint.network()?;
    let dataset = Dataset::from_csv_path(data_path)?;
    let scaled = checkpoint.normalization.apply(&dataset)?;
    let scores = score_dataset(&net, &scaled)?;
    Ok((scores, dataset.labels()))
}

fn cmd_score(ckpt: &Path, data: &Path, out: &Path) -> Result<(), Error> {
    println!(
        "config: score ckpt={} data={} out={}",
        ckpt.display(),
        data.display(),
        out.display()
    );
    let (scores, labels) = load_and_score(ckpt, data)?;
    let n = scores.len();
    let report = ScoreReport::new(scores, labels)?;
    fsio::write_atomic(out, &report.to_csv_string())?;
    println!("scored {n} rows");
    println!("report: {}", out.display());
    Ok(())
}

fn cmd_detect(
    ckpt: &Path,
    data: &Path,
    lower: f64,
    upper: f64,
    out: Option<&Path>,
) -> Result<(), Error> {
    println!(
        "config: detect ckpt={} data={} lower={lower} upper={upper} out={}",
        ckpt.display(),
        data.display(),
        out.map_or("-".to_string(), |p| p.display().to_string())
    );
    let thresholds = ThresholdPair::new(lower, upper)?;
    let (scores, labels) = load_and_score(ckpt, data)?;
    let flags = classify(&scores, &thresholds);
    let detected = flags.iter().filter(|&&f| f).count();
    println!("flagged {detected} of {} rows", scores.len());
    if let Some(labels) = &labels {
        let metrics = evaluate(&flags, labels)?;
        println!("{metrics}");
    }
    if let Some(out) = out {
        let report = ScoreReport::new(scores, labels)?.with_thresholds(thresholds);
        fsio::write_atomic(out, &report.to_csv_string())?;
        println!("report: {}", out.display());
    }
    Ok(())
}

fn cmd_sweep(
    ckpt: &Path,
    data: &Path,
    objective: ObjectiveArg,
    beta: f64,
    fp_cap: usize,
    out: Option<&Path>,
) -> Result<(), Error> {
    let (objective, objective_text) = match objective {
        ObjectiveArg::F1 => (SweepObjective::F1, "f1".to_string()),
        ObjectiveArg::Fbeta => (SweepObjective::FBeta(beta), format!("fbeta(beta={beta})")),
        ObjectiveArg::Fpcap => (
            SweepObjective::MaxTpWithFpCap(fp_cap),
            format!("fpcap(cap={fp_cap})"),
        ),
    };
    println!(
        "config: sweep ckpt={} data={} objective={objective_text} out={}",
        ckpt.display(),
        data.display(),
        out.map_or("-".to_string(), |p| p.display().to_string())
    );
    let (scores, labels) = load_and_score(ckpt, data)?;
    let Some(labels) = labels else {
        return Err(Error::Precondition(
            "sweep requires a labeled dataset (final `anomaly` column)".to_string(),
        ));
    };
    let (thresholds, metrics) = sweep_thresholds(&scores, &labels, objective)?;
    println!("lower threshold: {}", thresholds.lower());
    println!("upper threshold: {}", thresholds.upper());
    println!("{metrics}");
    if let Some(out) = out {
        let report = ScoreReport::new(scores, Some(labels))?.with_thresholds(thresholds);
        fsio::write_atomic(out, &report.to_csv_string())?;
        println!("report: {}", out.display());
    }
    Ok(())
}

fn cmd_synth(
    seed: u64,
    normal: usize,
    anomalies: usize,
    dim: usize,
    out: &Path,
) -> Result<(), Error> {
    println!(
        "config: synth seed={seed} normal={normal} anomalies={anomalies} dim={dim} out={}",
        out.display()
    );
    let dataset = gen_synthetic(seed, normal, anomalies, dim)?;
    fsio::write_atomic(out, &dataset.to_csv_string())?;
    println!(
        "wrote {} rows ({} anomalous)",
        dataset.len(),
        dataset.anomaly_count()
    );
    println!("data: {}", out.display());
    Ok(())
}

fn cmd_gradcheck(arch: ArchArg, seed: u64, eps: f64, loss: &LossArgs) -> Result<(), Error> {
    println!(
        "config: gradcheck arch={} seed={seed} eps={eps} w_s={} w_ae={} clamp_eps={}",
        arch.name(),
        loss.w_s,
        loss.w_ae,
        loss.clamp_eps
    );
    let spec = ArchitectureSpec::new(arch.kind());
    let net = build_model(&spec, seed)?;
    // A fixed probe row in the normalized input range; labeled for the
    // supervised variant so the combined loss is exercised.
    let label = arch
        .kind()
        .is_supervised()
        .then_some(seed.is_multiple_of(2));
    let record = probe_record(spec.input_dim, seed.wrapping_mul(0x9E3779B97F4A7C15), label);
    let rel = gradient_check(&net, &record, &loss.config(), eps)?;
    println!("max relative error: {rel:e}");
    Ok(())
}

fn cmd_hist(scores_path: &Path, bins: usize, out: &Path) -> Result<(), Error> {
    println!(
        "config: hist scores={} bins={bins} out={}",
        scores_path.display(),
        out.display()
    );
    let text = fsio::read_to_string(scores_path)?;
    let report = ScoreReport::from_csv_str(&text, &scores_path.display().to_string())?;
    let histogram = export_histogram(report.scores(), report.labels(), bins)?;
    fsio::write_atomic(out, &histogram_to_csv_string(&histogram))?;
    println!(
        "binned {} scores into {} bins",
        report.scores().len(),
        histogram.len()
    );
    println!("histogram: {}", out.display());
    Ok(())
}
