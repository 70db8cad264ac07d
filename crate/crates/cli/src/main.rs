//! `trueset`: select, augment and score binary segmentation datasets.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};

use trueset_core::augment::augmenter_registry;
use trueset_core::data::Split;
use trueset_core::embed::provider_registry;

#[derive(Debug, Parser)]
#[command(
    name = "trueset",
    version,
    about = "Select, augment and score binary segmentation datasets"
)]
pub struct Cli {
    /// Worker threads (0 = one per CPU). Outputs do not depend on this value.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    /// Treat dark mask pixels as foreground (for datasets with inverted ground truth).
    #[arg(long, global = true)]
    pub invert_masks: bool,

    #[command(subcommand)]
    pub command: Command,
}

fn provider_names() -> PossibleValuesParser {
    PossibleValuesParser::new(provider_registry().names())
}

fn parse_split(s: &str) -> Result<Split, String> {
    s.parse()
}

fn mode_names() -> PossibleValuesParser {
    PossibleValuesParser::new(augmenter_registry().names())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute or import per-image feature vectors and write them as a TDF1 table.
    Features(FeaturesArgs),
    /// Choose a distribution-representative train/val subset from a dataset.
    Select(SelectArgs),
    /// Generate augmented ground-truth masks for the training part of a split.
    Augment(AugmentArgs),
    /// Plain sorted 90/10 train/val split of a dataset.
    Split(SplitArgs),
    /// Score prediction maps against ground truth.
    Evaluate(EvaluateArgs),
    /// Emit ROC or precision-recall points over the threshold grid.
    Curves(CurvesArgs),
    /// Focal + dice loss of prediction maps against ground truth.
    Loss(LossArgs),
}

#[derive(Debug, Args)]
pub struct ProviderArgs {
    /// Feature source. Defaults to `file` when --features is given, else `builtin`.
    #[arg(long, value_parser = provider_names())]
    pub provider: Option<String>,

    /// TDF1 feature table for the `file` provider.
    #[arg(long)]
    pub features: Option<PathBuf>,

    /// Grid cells per side for the `builtin` descriptor.
    #[arg(long, default_value_t = 16)]
    pub grid: usize,

    /// Gradient-histogram buckets for the `builtin` descriptor.
    #[arg(long, default_value_t = 8)]
    pub bins: usize,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    /// Dataset manifest.
    #[arg(long)]
    pub manifest: PathBuf,

    #[command(flatten)]
    pub provider: ProviderArgs,

    /// Output TDF1 file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Dataset manifest; test entries are ignored.
    #[arg(long)]
    pub manifest: PathBuf,

    #[command(flatten)]
    pub provider: ProviderArgs,

    /// Histogram bins over distances from the mean coordinate.
    #[arg(long, default_value_t = 10)]
    pub n_bins: usize,

    /// Selection parameter in [0, 1].
    #[arg(long = "s", default_value_t = 0.5)]
    pub s: f64,

    /// Principal components written to the coordinate CSV (1 or 2).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub components: u8,

    /// Output manifest of the selected train/val entries.
    #[arg(long)]
    pub out: PathBuf,

    /// Coordinate CSV (default: <out>.coords.csv).
    #[arg(long)]
    pub coords: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// Manifest with train/val entries (e.g. the output of `select`).
    #[arg(long)]
    pub trueset: PathBuf,

    /// Augmentation mode.
    #[arg(long, default_value = "sw", value_parser = mode_names())]
    pub mode: String,

    /// Dilation kernel sizes for sw and ss.
    #[arg(long, value_delimiter = ',', default_value = "3,5,8")]
    pub kernels: Vec<usize>,

    /// Dilation kernel sizes used by mix.
    #[arg(long, value_delimiter = ',', default_value = "3,5")]
    pub mix_kernels: Vec<usize>,

    /// Upscaling factor for ss.
    #[arg(long, default_value_t = 4)]
    pub scale: usize,

    /// Components up to this area (px²) are never masked.
    #[arg(long, default_value_t = 50)]
    pub t0: usize,

    /// Upper area for 1-3 masking squares.
    #[arg(long, default_value_t = 100)]
    pub t1: usize,

    /// Upper area for 2-5 masking squares; larger components get 5-8.
    #[arg(long, default_value_t = 200)]
    pub t2: usize,

    /// Global seed, mixed with each image id.
    #[arg(long, env = "TRUESET_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Directory for the generated masks.
    #[arg(long)]
    pub out_dir: PathBuf,

    /// Output manifest (default: <out-dir>/manifest.tsv).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Dataset manifest; test entries are ignored.
    #[arg(long)]
    pub manifest: PathBuf,

    /// Training fraction.
    #[arg(long, default_value_t = 0.9)]
    pub ratio: f64,

    /// Output manifest.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictionArgs {
    /// Directory of 8-bit prediction PNGs named <id>.png.
    #[arg(long)]
    pub pred_dir: PathBuf,

    /// Manifest whose masks are the ground truth; entries without a mask are skipped.
    #[arg(long)]
    pub gt_manifest: PathBuf,

    /// Only score entries with this split tag (train, val, test, unassigned).
    #[arg(long, value_parser = parse_split)]
    pub split: Option<Split>,

    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: PredictionArgs,

    /// Binarization threshold: a pixel is crack iff its probability is > T.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,

    /// Search T over 0.00..=0.99 (step 0.01) and report the best F.
    #[arg(long)]
    pub grid: bool,

    /// Dataset label for the CSV (default: manifest file stem).
    #[arg(long)]
    pub dataset: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Curve {
    Roc,
    Pr,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub input: PredictionArgs,

    /// Curve type.
    #[arg(long, value_enum, default_value_t = Curve::Pr)]
    pub curve: Curve,
}

#[derive(Debug, Args)]
pub struct LossArgs {
    #[command(flatten)]
    pub input: PredictionArgs,

    /// Focal-loss class weight.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,

    /// Focal-loss focusing exponent.
    #[arg(long, default_value_t = 3.33)]
    pub gamma: f64,

    /// Dice F-beta weight.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let _ = err.print();
            return ExitCode::from(code as u8);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
