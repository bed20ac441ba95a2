use std::path::Path;

use sigmode_core::error::{Error, Result};
use sigmode_core::math::SeededRng;
use sigmode_core::model::forward;
use sigmode_core::pipeline::checkpoint::Checkpoint;
use sigmode_core::pipeline::{
    apply_preprocessing, build_sequences, evaluate_scores, load_csv, SequenceSpec,
};
use sigmode_core::vmd;

use crate::config::RunConfig;
use crate::out::{write_eval_outputs, OutDir};

/// Scores a labeled CSV with a saved checkpoint, replaying the fitted
/// preprocessing, grouping, category codes, and decomposition.
pub fn run(cfg: &RunConfig, out: &OutDir, checkpoint: &Path, input: &Path) -> Result<()> {
    super::require_file(checkpoint)?;
    super::require_file(input)?;
    let ckpt = Checkpoint::load(checkpoint)?;
    let table = load_csv(input, &cfg.data.csv_options())?;
    let table = apply_preprocessing(&table, &ckpt.preprocessing)?;
    let mut dataset = build_sequences(
        &table,
        SequenceSpec {
            grouping: &ckpt.grouping,
            label_column: &ckpt.label_column,
            categories: Some(&ckpt.categories),
            stats: ckpt.preprocessing.clone(),
        },
    )?;
    if let Some(spec) = &ckpt.vmd {
        if !spec.columns.is_empty() {
            dataset = vmd::features(&dataset, &spec.columns, &spec.config)?;
        }
    }
    if dataset.step_dim() != ckpt.model.input_dim || dataset.seq_len() != ckpt.model.seq_len {
        return Err(Error::data(format!(
            "dataset shape {}x{} does not match checkpoint model {}x{}",
            dataset.seq_len(),
            dataset.step_dim(),
            ckpt.model.seq_len,
            ckpt.model.input_dim
        )));
    }

    let mut rng = SeededRng::new(0);
    let mut scores = Vec::with_capacity(dataset.records());
    for i in 0..dataset.records() {
        let (yhat, _) = forward(&ckpt.params, &ckpt.model, &dataset.sequence(i), &mut rng, false)?;
        scores.push(yhat);
    }
    let report = evaluate_scores(&dataset.labels, &scores, ckpt.threshold)?;
    write_eval_outputs(out, &report)?;
    match report.auc {
        Some(auc) => println!("AUC {auc:.4} on {} records", dataset.records()),
        None => println!("AUC undefined on {} records (single-class labels)", dataset.records()),
    }
    Ok(())
}
