use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use trueset_core::augment::{
    augmenter, build_augmented_manifest, AssemblyOptions, AugmentSpec, MaskingThresholds,
};
use trueset_core::data::{
    load_manifest, read_mask, read_probability_map, write_feature_table, BinaryMask,
    DatasetManifest, ManifestEntry, ProbabilityMap, Split,
};
use trueset_core::embed::{provider_registry, FeatureProvider, ProviderOptions};
use trueset_core::eval::{
    curve_csv, curve_points, evaluate_set, focal_dice_loss, grid_search_threshold, report_row,
    CurveKind, LossParams, REPORT_HEADER,
};
use trueset_core::select::{
    allset_split, check_split, emit_coordinates, run_selection, SelectionConfig, TrueSplit,
};

use crate::{
    AugmentArgs, Cli, Command, Curve, CurvesArgs, EvaluateArgs, FeaturesArgs, LossArgs,
    PredictionArgs, ProviderArgs, SelectArgs, SplitArgs,
};

pub fn run(cli: Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .context("building the worker pool")?;
    let invert = cli.invert_masks;
    pool.install(|| match cli.command {
        Command::Features(args) => features(args),
        Command::Select(args) => select(args),
        Command::Augment(args) => augment(args, invert),
        Command::Split(args) => split(args),
        Command::Evaluate(args) => evaluate(args, invert),
        Command::Curves(args) => curves(args, invert),
        Command::Loss(args) => loss(args, invert),
    })
}

fn make_provider(args: &ProviderArgs) -> Result<Box<dyn FeatureProvider>> {
    let name = match (&args.provider, &args.features) {
        (Some(name), _) => name.as_str(),
        (None, Some(_)) => "file",
        (None, None) => "builtin",
    };
    let opts = ProviderOptions {
        features_path: args.features.clone(),
        grid: args.grid,
        bins: args.bins,
    };
    let registry = provider_registry();
    Ok(registry.get(name)?(&opts)?)
}

fn load(path: &Path) -> Result<DatasetManifest> {
    load_manifest(path).with_context(|| format!("loading manifest {}", path.display()))
}

/// Entries eligible for selection and splitting (everything but the test split).
fn without_test(manifest: &DatasetManifest) -> Result<DatasetManifest> {
    let entries: Vec<ManifestEntry> = manifest
        .entries()
        .iter()
        .filter(|e| e.split != Split::Test)
        .cloned()
        .collect();
    Ok(DatasetManifest::new(manifest.root(), entries)?)
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

fn write_split(split: &TrueSplit, source: &DatasetManifest, out: &Path) -> Result<()> {
    create_parent(out)?;
    split.to_manifest(source)?.write(out)?;
    Ok(())
}

fn features(args: FeaturesArgs) -> Result<()> {
    let manifest = load(&args.manifest)?;
    let provider = make_provider(&args.provider)?;
    let table = provider.features(&manifest)?;
    create_parent(&args.out)?;
    write_feature_table(&table, &args.out)?;
    Ok(())
}

fn select(args: SelectArgs) -> Result<()> {
    let manifest = without_test(&load(&args.manifest)?)?;
    if manifest.is_empty() {
        bail!(
            "manifest {} has no train/val candidates",
            args.manifest.display()
        );
    }
    let provider = make_provider(&args.provider)?;
    let table = provider.features(&manifest)?;
    let config = SelectionConfig {
        n_bins: args.n_bins,
        s0: args.s,
        components: usize::from(args.components),
    };
    let result = run_selection(&table, &config)?;
    let universe: Vec<String> = manifest.ids().map(str::to_owned).collect();
    check_split(&result.split, &universe)?;

    write_split(&result.split, &manifest, &args.out)?;
    let coords = args.coords.unwrap_or_else(|| {
        let mut name = args.out.as_os_str().to_owned();
        name.push(".coords.csv");
        PathBuf::from(name)
    });
    create_parent(&coords)?;
    emit_coordinates(&result, &coords)?;
    eprintln!(
        "selected {} images ({} train, {} val) from {}",
        result.split.len(),
        result.split.train_ids.len(),
        result.split.val_ids.len(),
        manifest.len()
    );
    Ok(())
}

fn split_from_tags(manifest: &DatasetManifest) -> TrueSplit {
    let tagged = |tag: Split| {
        manifest
            .entries()
            .iter()
            .filter(|e| e.split == tag)
            .map(|e| e.id.clone())
            .collect()
    };
    TrueSplit {
        train_ids: tagged(Split::Train),
        val_ids: tagged(Split::Val),
    }
}

fn augment(args: AugmentArgs, invert: bool) -> Result<()> {
    let manifest = load(&args.trueset)?;
    let split = split_from_tags(&manifest);
    if split.train_ids.is_empty() {
        bail!("manifest {} has no train entries", args.trueset.display());
    }
    let thresholds = MaskingThresholds {
        t0: args.t0,
        t1: args.t1,
        t2: args.t2,
    };
    thresholds.validate()?;
    let spec = AugmentSpec {
        kernels: args.kernels,
        mix_kernels: args.mix_kernels,
        scale: args.scale,
        thresholds,
        seed: args.seed,
    };
    let aug = augmenter(&args.mode, &spec)?;
    let options = AssemblyOptions {
        invert_masks: invert,
    };
    let out = build_augmented_manifest(
        &split,
        aug.as_ref(),
        args.seed,
        &manifest,
        &args.out_dir,
        &options,
    )?;
    let path = args
        .out
        .unwrap_or_else(|| args.out_dir.join("manifest.tsv"));
    create_parent(&path)?;
    out.write(&path)?;
    eprintln!("wrote {} entries to {}", out.len(), path.display());
    Ok(())
}

fn split(args: SplitArgs) -> Result<()> {
    let manifest = without_test(&load(&args.manifest)?)?;
    let split = allset_split(&manifest, args.ratio)?;
    write_split(&split, &manifest, &args.out)
}

type Pair = (ProbabilityMap, BinaryMask);

/// Loads ids and `(prediction, ground truth)` pairs in manifest order.
fn load_pairs(args: &PredictionArgs, invert: bool) -> Result<(Vec<String>, Vec<Pair>)> {
    let manifest = load(&args.gt_manifest)?;
    let wanted = args.split;
    let entries: Vec<&ManifestEntry> = manifest
        .entries()
        .iter()
        .filter(|e| e.mask_path.is_some())
        .filter(|e| wanted.is_none_or(|w| e.split == w))
        .collect();
    if entries.is_empty() {
        bail!(
            "no ground-truth masks to score in {}",
            args.gt_manifest.display()
        );
    }
    let ids = entries.iter().map(|e| e.id.clone()).collect();
    let pairs = entries
        .par_iter()
        .map(|entry| {
            let pred_path = args.pred_dir.join(format!("{}.png", entry.id));
            let pred = read_probability_map(&pred_path)?;
            let mut gt = read_mask(
                manifest
                    .mask_path(entry)
                    .expect("filtered on mask presence"),
            )?;
            if invert {
                gt = gt.inverted();
            }
            if pred.width() != gt.width() || pred.height() != gt.height() {
                bail!(
                    "{}: prediction is {}x{} but ground truth is {}x{}",
                    entry.id,
                    pred.width(),
                    pred.height(),
                    gt.width(),
                    gt.height()
                );
            }
            Ok((pred, gt))
        })
        .collect::<Result<_>>()?;
    Ok((ids, pairs))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            create_parent(path)?;
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn evaluate(args: EvaluateArgs, invert: bool) -> Result<()> {
    if !(0.0..=1.0).contains(&args.threshold) {
        bail!("--threshold must lie in [0, 1]");
    }
    let (_, pairs) = load_pairs(&args.input, invert)?;
    let report = if args.grid {
        grid_search_threshold(&pairs)?
    } else {
        evaluate_set(&pairs, args.threshold)?
    };
    let dataset = args.dataset.unwrap_or_else(|| {
        args.input
            .gt_manifest
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let text = format!("{REPORT_HEADER}\n{}\n", report_row(&dataset, &report));
    emit(args.input.out.as_deref(), &text)
}

fn curves(args: CurvesArgs, invert: bool) -> Result<()> {
    let (_, pairs) = load_pairs(&args.input, invert)?;
    let kind = match args.curve {
        Curve::Roc => CurveKind::Roc,
        Curve::Pr => CurveKind::Pr,
    };
    let points = curve_points(&pairs, kind)?;
    emit(args.input.out.as_deref(), &curve_csv(&points, kind))
}

fn loss(args: LossArgs, invert: bool) -> Result<()> {
    let params = LossParams {
        alpha: args.alpha,
        gamma: args.gamma,
        beta: args.beta,
        ..LossParams::default()
    };
    params.validate()?;
    let (ids, pairs) = load_pairs(&args.input, invert)?;
    let values = pairs
        .par_iter()
        .map(|(pred, gt)| focal_dice_loss(gt, pred, &params))
        .collect::<trueset_core::Result<Vec<_>>>()?;

    let mut text = String::from("id,focal,dice,total\n");
    for (id, v) in ids.iter().zip(&values) {
        text.push_str(&format!("{id},{},{},{}\n", v.focal, v.dice, v.total));
    }
    let n = values.len() as f64;
    let mean = |f: fn(&trueset_core::eval::LossValue) -> f64| values.iter().map(f).sum::<f64>() / n;
    text.push_str(&format!(
        "mean,{},{},{}\n",
        mean(|v| v.focal),
        mean(|v| v.dice),
        mean(|v| v.total)
    ));
    emit(args.input.out.as_deref(), &text)
}
