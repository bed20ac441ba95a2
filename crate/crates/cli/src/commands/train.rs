use std::path::Path;

use sigmode_core::error::Result;
use sigmode_core::pipeline::checkpoint::{Checkpoint, CHECKPOINT_VERSION};
use sigmode_core::pipeline::{cross_validate, CvOutcome, Dataset, ModalityGroup};
use sigmode_core::vmd::{self, FeatureSpec};

use crate::config::RunConfig;
use crate::out::{write_cv_outputs, OutDir};

/// Shared by `train` and the final retrain of `optimize`: decompose if
/// configured, cross-validate, and emit metrics plus per-fold checkpoints.
#[allow(clippy::too_many_arguments)]
pub fn run_cv(
    cfg: &RunConfig,
    out: &OutDir,
    dataset: &Dataset,
    grouping: &[ModalityGroup],
    vmd_spec: Option<&FeatureSpec>,
    attention: bool,
    threads: usize,
    prefix: &str,
) -> Result<CvOutcome> {
    let decomposed;
    let table = match vmd_spec {
        Some(spec) if !spec.columns.is_empty() => {
            decomposed = vmd::features(dataset, &spec.columns, &spec.config)?;
            &decomposed
        }
        _ => dataset,
    };

    let outcome = cross_validate(table, &cfg.model_spec(attention), &cfg.protocol(), threads)?;
    write_cv_outputs(out, &outcome, prefix)?;

    for fold in &outcome.folds {
        let ckpt = Checkpoint {
            version: CHECKPOINT_VERSION,
            model: fold.config.clone(),
            params: fold.params.clone(),
            threshold: cfg.protocol.threshold,
            label_column: cfg.data.label().to_string(),
            grouping: grouping.to_vec(),
            categories: dataset.categories.clone(),
            preprocessing: dataset.stats.clone(),
            vmd: vmd_spec.cloned(),
        };
        ckpt.save(&out.path(&format!("{prefix}checkpoint_fold{}.json", fold.fold + 1)))?;
    }
    Ok(outcome)
}

pub fn run(cfg: &RunConfig, out: &OutDir, input: Option<&Path>, threads: usize) -> Result<()> {
    let (table, _) = super::load_table(cfg, input)?;
    let (dataset, grouping) = super::prepare_dataset(cfg, &table)?;
    let vmd_spec = FeatureSpec {
        columns: cfg.vmd.columns.clone(),
        config: cfg.vmd.to_config(),
    };
    let outcome = run_cv(
        cfg,
        out,
        &dataset,
        &grouping,
        Some(&vmd_spec),
        true,
        threads,
        "",
    )?;
    match (outcome.aggregate.auc_mean, outcome.aggregate.auc_std) {
        (Some(m), Some(s)) => println!("mean AUC {m:.4} +- {s:.4} over {} folds", outcome.folds.len()),
        _ => println!("AUC undefined (single-class folds)"),
    }
    Ok(())
}
