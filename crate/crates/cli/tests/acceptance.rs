//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trueset_core::augment::{augmenter, AugmentSpec, SeededRng};
use trueset_core::data::{load_manifest, BinaryMask, FeatureTable, ProbabilityMap, Split};
use trueset_core::eval::{
    confusion, evaluate_set, focal_dice_loss, grid_search_threshold, grid_threshold, metrics,
    LossParams, GRID_SIZE,
};
use trueset_core::imageops::{connected_components, dilate, Kernel};
use trueset_core::select::{allset_split, build_bins, pca_project, selection_quotas};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_trueset")
}

fn trueset(args: &[&str]) -> Check {
    let out = Command::new(bin())
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "trueset {} exited with {}: {}",
        args.join(" "),
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(())
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

fn quota_trace() -> Check {
    let ids: Vec<String> = (0..300).map(|i| format!("i{i}")).collect();
    let distances: Vec<f64> = (0..300).map(|i| (i * i) as f64).collect();
    let bins = build_bins(&ids, &distances, 10).map_err(|e| e.to_string())?;
    let quotas = selection_quotas(&bins, 300, 0.5).map_err(|e| e.to_string())?;
    let got = quotas.along(&bins.idx_descending);
    ensure!(got == [17, 15, 13, 11, 9, 7, 6, 4, 2, 0], "quotas {got:?}");
    Ok(())
}

fn dataset_arithmetic() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest = common::write_dataset(tmp.path(), 70, 48, 11, |i| {
        if i < 63 {
            Split::Train
        } else {
            Split::Val
        }
    });
    for (mode, want_train) in [("sw", 252), ("sl", 126), ("ss", 252), ("mix", 252)] {
        let out_dir = tmp.path().join(format!("aug_{mode}"));
        trueset(&[
            "augment",
            "--mode",
            mode,
            "--trueset",
            p(&manifest),
            "--out-dir",
            p(&out_dir),
        ])?;
        let out = load_manifest(out_dir.join("manifest.tsv")).map_err(|e| e.to_string())?;
        let count = |s: Split| out.entries().iter().filter(|e| e.split == s).count();
        ensure!(
            count(Split::Train) == want_train && count(Split::Val) == 7,
            "{mode}: {} train + {} val",
            count(Split::Train),
            count(Split::Val)
        );
    }
    Ok(())
}

fn allset_counts() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let entries = (0..300)
        .map(|i| {
            trueset_core::data::ManifestEntry::new(
                format!("x{i:03}"),
                format!("{i}.png"),
                None,
                Split::Unassigned,
            )
        })
        .collect();
    let manifest =
        trueset_core::data::DatasetManifest::new(tmp.path(), entries).map_err(|e| e.to_string())?;
    let split = allset_split(&manifest, 0.9).map_err(|e| e.to_string())?;
    ensure!(
        split.train_ids.len() == 270 && split.val_ids.len() == 30,
        "{} train / {} val",
        split.train_ids.len(),
        split.val_ids.len()
    );
    Ok(())
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix: (eigenvalues, eigenvectors as columns).
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect())
        .collect();
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

fn pca_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    const DIM: usize = 20;
    for set in 0..50 {
        let n = rng.gen_range(5..=40);
        let scales: Vec<f64> = (0..DIM).map(|j| 4.0 / (1.0 + j as f64).sqrt()).collect();
        let rows: Vec<Vec<f32>> = (0..n)
            .map(|_| {
                scales
                    .iter()
                    .map(|s| (rng.gen_range(-1.0..1.0) * s + 0.5) as f32)
                    .collect()
            })
            .collect();
        let ids: Vec<String> = (0..n).map(|i| format!("r{i}")).collect();
        let table = FeatureTable::from_rows(ids.into_iter().zip(rows.iter().cloned()).collect())
            .map_err(|e| e.to_string())?;
        let coords = pca_project(&table, 1).map_err(|e| e.to_string())?;

        let x: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| v as f64).collect())
            .collect();
        let mean: Vec<f64> = (0..DIM)
            .map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64)
            .collect();
        let cov: Vec<Vec<f64>> = (0..DIM)
            .map(|a| {
                (0..DIM)
                    .map(|b| {
                        x.iter()
                            .map(|r| (r[a] - mean[a]) * (r[b] - mean[b]))
                            .sum::<f64>()
                            / (n - 1) as f64
                    })
                    .collect()
            })
            .collect();
        let (values, vectors) = jacobi_eigen(cov);
        let top = (0..DIM)
            .max_by(|&a, &b| values[a].total_cmp(&values[b]))
            .unwrap();
        let mut dir: Vec<f64> = vectors.iter().map(|row| row[top]).collect();
        let pivot = (0..DIM)
            .max_by(|&a, &b| dir[a].abs().total_cmp(&dir[b].abs()))
            .unwrap();
        if dir[pivot] < 0.0 {
            dir.iter_mut().for_each(|d| *d = -*d);
        }
        for (i, row) in x.iter().enumerate() {
            let want: f64 = row
                .iter()
                .zip(&mean)
                .zip(&dir)
                .map(|((v, m), d)| (v - m) * d)
                .sum();
            let got = coords.first()[i];
            ensure!(
                (got - want).abs() <= 1e-6,
                "set {set} row {i}: {got} vs {want}"
            );
        }
        let var = coords.variances()[0];
        ensure!(
            (var - values[top]).abs() <= 1e-6,
            "set {set}: variance {var} vs {}",
            values[top]
        );
        let n_f = n as f64;
        let sample_var = coords.first().iter().map(|c| c * c).sum::<f64>() / (n_f - 1.0);
        ensure!(
            (sample_var - values[top]).abs() <= 1e-6,
            "set {set}: coordinate variance {sample_var}"
        );
    }
    Ok(())
}

/// Per-pixel max filter over the window that a lone pixel's stamp implies.
fn max_filter(mask: &BinaryMask, k: usize) -> BinaryMask {
    let anchor = k / 2;
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    BinaryMask::from_fn(mask.width(), mask.height(), |r, c| {
        let (r, c) = (r as i64, c as i64);
        for i in 0..k as i64 {
            for j in 0..k as i64 {
                // input p covers q when p - anchor <= q <= p + k - 1 - anchor
                let pr = r - (k as i64 - 1 - anchor as i64) + i;
                let pc = c - (k as i64 - 1 - anchor as i64) + j;
                if (0..h).contains(&pr)
                    && (0..w).contains(&pc)
                    && mask.get(pr as usize, pc as usize)
                {
                    return true;
                }
            }
        }
        false
    })
}

fn dilation_oracle() -> Check {
    for k in [1, 3] {
        let kernel = Kernel::new(k).map_err(|e| e.to_string())?;
        for bits in 0u32..1 << 16 {
            let mask = BinaryMask::from_fn(4, 4, |r, c| bits >> (r * 4 + c) & 1 == 1);
            ensure!(
                dilate(&mask, kernel) == max_filter(&mask, k),
                "k={k} mask bits {bits:#06x}"
            );
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in [5, 8] {
        let kernel = Kernel::new(k).map_err(|e| e.to_string())?;
        for case in 0..1000 {
            let density: f64 = rng.gen_range(0.0..0.1);
            let mask = BinaryMask::from_fn(32, 32, |_, _| rng.gen_bool(density));
            ensure!(
                dilate(&mask, kernel) == max_filter(&mask, k),
                "k={k} random case {case}"
            );
        }
    }
    Ok(())
}

fn metrics_oracle() -> Check {
    const ALL: u32 = (1 << 9) - 1;
    let ratio = |num: u32, den: u32, absent: bool| {
        if den == 0 {
            if absent {
                1.0
            } else {
                0.0
            }
        } else {
            num as f64 / den as f64
        }
    };
    for pred_bits in 0..=ALL {
        let pred = BinaryMask::from_fn(3, 3, |r, c| pred_bits >> (r * 3 + c) & 1 == 1);
        for gt_bits in 0..=ALL {
            let gt = BinaryMask::from_fn(3, 3, |r, c| gt_bits >> (r * 3 + c) & 1 == 1);
            let report = metrics(confusion(&pred, &gt).map_err(|e| e.to_string())?, 0.5);

            let (np, ng) = (!pred_bits & ALL, !gt_bits & ALL);
            let both = (pred_bits & gt_bits).count_ones();
            let neither = (np & ng).count_ones();
            let crack_absent = pred_bits == 0 && gt_bits == 0;
            let bg_absent = np == 0 && ng == 0;
            let g = (both + neither) as f64 / 9.0;
            let r = ratio(both, gt_bits.count_ones(), crack_absent);
            let pr = ratio(both, pred_bits.count_ones(), crack_absent);
            let c = 0.5 * (r + ratio(neither, ng.count_ones(), bg_absent));
            let miou = 0.5
                * (ratio(both, (pred_bits | gt_bits).count_ones(), crack_absent)
                    + ratio(neither, (np | ng).count_ones(), bg_absent));
            let f = if pr + r == 0.0 {
                0.0
            } else {
                2.0 * pr * r / (pr + r)
            };
            let got = [
                report.g,
                report.c,
                report.miou,
                report.p,
                report.r,
                report.f,
            ];
            let want = [g, c, miou, pr, r, f];
            for (name, (a, b)) in ["G", "C", "mIoU", "P", "R", "F"]
                .iter()
                .zip(got.iter().zip(&want))
            {
                ensure!(
                    (a - b).abs() <= 1e-12,
                    "pred {pred_bits:#05x} gt {gt_bits:#05x}: {name} {a} vs {b}"
                );
            }
        }
    }
    Ok(())
}

fn loss_spot_check() -> Check {
    let params = LossParams::default();
    let gt = BinaryMask::ones(1, 1);
    let pred = ProbabilityMap::new(1, 1, vec![0.5]).map_err(|e| e.to_string())?;
    let v = focal_dice_loss(&gt, &pred, &params).map_err(|e| e.to_string())?;
    let focal = 0.5 * 0.5f64.powf(3.33) * std::f64::consts::LN_2;
    ensure!((v.focal - 0.03446).abs() <= 1e-4, "focal {}", v.focal);
    ensure!(
        (v.total - (focal + 1.0 / 3.0)).abs() <= 1e-4,
        "total {}",
        v.total
    );
    ensure!(
        (v.total - (0.03446 + 1.0 / 3.0)).abs() <= 1e-4,
        "total {}",
        v.total
    );

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gt = BinaryMask::from_fn(16, 16, |_, _| rng.gen_bool(0.3));
    let perfect = focal_dice_loss(&gt, &ProbabilityMap::from_mask(&gt), &params)
        .map_err(|e| e.to_string())?;
    ensure!(
        perfect.total <= 1e-5,
        "perfect prediction loss {}",
        perfect.total
    );
    Ok(())
}

fn brute_force_best(pairs: &[(ProbabilityMap, BinaryMask)]) -> Result<(f64, f64), String> {
    let mut best = (f64::NAN, -1.0);
    for k in 0..GRID_SIZE {
        let t = grid_threshold(k);
        let f = evaluate_set(pairs, t).map_err(|e| e.to_string())?.f;
        if f > best.1 {
            best = (t, f);
        }
    }
    Ok(best)
}

fn grid_search() -> Check {
    let gt = BinaryMask::from_pixels(2, 1, &[(0, 0)]);
    let pred = ProbabilityMap::new(2, 1, vec![0.8, 0.3]).map_err(|e| e.to_string())?;
    let report = grid_search_threshold(&[(pred, gt)]).map_err(|e| e.to_string())?;
    ensure!(
        report.threshold == 0.30 && report.f == 1.0,
        "known set: T={} F={}",
        report.threshold,
        report.f
    );

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..40 {
        let pairs: Vec<(ProbabilityMap, BinaryMask)> = (0..rng.gen_range(1..4))
            .map(|_| {
                let gt = BinaryMask::from_fn(12, 12, |_, _| rng.gen_bool(0.2));
                let data = gt
                    .data()
                    .iter()
                    .map(|&g| {
                        // coarse levels so that ties across thresholds are common
                        let noisy = g as f64 * 0.5 + rng.gen_range(0.0..0.5);
                        (noisy * 20.0).round() / 20.0
                    })
                    .collect();
                (ProbabilityMap::new(12, 12, data).unwrap(), gt)
            })
            .collect();
        let (want_t, want_f) = brute_force_best(&pairs)?;
        let got = grid_search_threshold(&pairs).map_err(|e| e.to_string())?;
        ensure!(
            got.threshold == want_t && (got.f - want_f).abs() <= 1e-12,
            "case {case}: T={} F={} vs T={want_t} F={want_f}",
            got.threshold,
            got.f
        );
    }
    Ok(())
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = tmp.path().join("data");
    let manifest = common::write_dataset(&data, 300, 40, 99, |_| Split::Unassigned);
    let features = tmp.path().join("features.tdf");
    trueset(&[
        "features",
        "--manifest",
        p(&manifest),
        "--provider",
        "builtin",
        "--out",
        p(&features),
    ])?;

    let mut trueset_paths = Vec::new();
    for (run, jobs) in [("a", "1"), ("b", "8")] {
        let out = tmp.path().join(format!("select_{run}")).join("trueset.tsv");
        trueset(&[
            "--jobs",
            jobs,
            "select",
            "--manifest",
            p(&manifest),
            "--provider",
            "builtin",
            "--out",
            p(&out),
        ])?;
        trueset_paths.push(out);
    }
    let read = |path: &Path| fs::read(path).map_err(|e| format!("{}: {e}", path.display()));
    ensure!(
        read(&trueset_paths[0])? == read(&trueset_paths[1])?,
        "select manifests differ"
    );
    let coords = |path: &Path| path.with_file_name("trueset.tsv.coords.csv");
    ensure!(
        read(&coords(&trueset_paths[0]))? == read(&coords(&trueset_paths[1]))?,
        "coordinate CSVs differ"
    );

    // the file provider must reach the same selection as computing features in-process
    let via_file = tmp.path().join("select_file.tsv");
    trueset(&[
        "select",
        "--manifest",
        p(&manifest),
        "--features",
        p(&features),
        "--out",
        p(&via_file),
    ])?;
    ensure!(
        read(&via_file)? == read(&trueset_paths[0])?,
        "file provider selection differs"
    );

    for mode in ["sw", "sl", "ss", "mix"] {
        let mut snapshots = Vec::new();
        for jobs in ["1", "8"] {
            let out_dir = tmp.path().join(format!("aug_{mode}_{jobs}"));
            trueset(&[
                "--jobs",
                jobs,
                "augment",
                "--mode",
                mode,
                "--seed",
                "7",
                "--trueset",
                p(&trueset_paths[0]),
                "--out-dir",
                p(&out_dir),
            ])?;
            snapshots.push(common::dir_snapshot(&out_dir));
        }
        ensure!(
            snapshots[0] == snapshots[1],
            "augment --mode {mode} outputs differ between job counts"
        );
    }
    Ok(())
}

fn augmentation_relations() -> Check {
    let spec = AugmentSpec::default();
    let sw = augmenter("sw", &spec).map_err(|e| e.to_string())?;
    let ss = augmenter("ss", &spec).map_err(|e| e.to_string())?;
    let sl = augmenter("sl", &spec).map_err(|e| e.to_string())?;
    let mix = augmenter("mix", &spec).map_err(|e| e.to_string())?;
    let mut gen = ChaCha8Rng::seed_from_u64(200);
    let mut masked_something = false;
    for case in 0..200 {
        let mask = common::crack_mask(&mut gen, 64, 64);
        let mut rng = SeededRng::new(case);
        for (name, out) in [
            ("sw", sw.augment(&mask, &mut rng)),
            ("ss", ss.augment(&mask, &mut rng)),
        ] {
            for (i, v) in out.iter().enumerate() {
                ensure!(
                    mask.is_subset_of(v),
                    "case {case}: {name}{i} does not contain the input"
                );
            }
        }
        let mixed = mix.augment(&mask, &mut rng);
        let (widened, masked) = mixed.split_at(mixed.len() - 1);
        for v in widened {
            ensure!(
                mask.is_subset_of(v),
                "case {case}: mix dilation does not contain the input"
            );
        }
        let small: Vec<_> = connected_components(&mask)
            .into_iter()
            .filter(|c| c.area() <= 50)
            .collect();
        for (name, out) in [
            ("sl", sl.augment(&mask, &mut rng)),
            ("mix", masked.to_vec()),
        ] {
            for v in &out {
                ensure!(
                    v.is_subset_of(&mask),
                    "case {case}: {name} masking adds pixels"
                );
                masked_something |= v.count_ones() < mask.count_ones();
                for comp in &small {
                    ensure!(
                        comp.pixels.iter().all(|&(r, c)| v.get(r, c)),
                        "case {case}: {name} touched a {}-pixel component",
                        comp.area()
                    );
                }
            }
        }
    }
    ensure!(masked_something, "random masking never removed a pixel");
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("quota recurrence trace", quota_trace),
        ("dataset-size arithmetic (252/126 + 7)", dataset_arithmetic),
        ("allset split 270/30", allset_counts),
        ("PCA eigendecomposition oracle", pca_oracle),
        ("dilation max-filter oracle", dilation_oracle),
        ("metrics exhaustive 3x3 oracle", metrics_oracle),
        ("focal-dice loss spot check", loss_spot_check),
        ("threshold grid search", grid_search),
        ("select/augment determinism across --jobs", determinism),
        ("augmentation set relations", augmentation_relations),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panicked".into()))
        });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(()) => println!("PASS {name} ({ms} ms)"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({ms} ms): {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
