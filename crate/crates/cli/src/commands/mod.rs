//! Subcommand implementations and the shared data-preparation path.

pub mod ablate;
pub mod decompose;
pub mod evaluate;
pub mod optimize;
pub mod synth;
pub mod train;

use std::path::{Path, PathBuf};

use sigmode_core::error::{Error, Result};
use sigmode_core::pipeline::{
    build_sequences, load_csv, preprocess, Dataset, ModalityGroup, RawTable, SequenceSpec,
};

use crate::config::RunConfig;

/// Missing files are argument errors (exit 2), not data errors.
pub fn require_file(path: &Path) -> Result<()> {
    if !path.is_file() {
        return Err(Error::config(format!(
            "input file not found: {}",
            path.display()
        )));
    }
    Ok(())
}

pub fn load_table(cfg: &RunConfig, input: Option<&Path>) -> Result<(RawTable, PathBuf)> {
    let path = input
        .map(Path::to_path_buf)
        .or_else(|| cfg.data.csv.clone())
        .ok_or_else(|| Error::config("no input CSV: pass --input or set data.csv in the config"))?;
    require_file(&path)?;
    let table = load_csv(&path, &cfg.data.csv_options())?;
    Ok((table, path))
}

/// The grouping from the config, or a single group holding every feature
/// column when none is configured.
pub fn resolve_grouping(cfg: &RunConfig, table: &RawTable) -> Vec<ModalityGroup> {
    if !cfg.data.groups.is_empty() {
        return cfg.data.groups.clone();
    }
    let label = cfg.data.label();
    vec![ModalityGroup {
        name: "features".into(),
        columns: table
            .column_names()
            .into_iter()
            .filter(|c| *c != label)
            .map(String::from)
            .collect(),
    }]
}

/// Preprocess and structure a raw table into a model-ready dataset.
pub fn prepare_dataset(cfg: &RunConfig, table: &RawTable) -> Result<(Dataset, Vec<ModalityGroup>)> {
    let (clean, stats) = preprocess(table, &cfg.preprocessing)?;
    let grouping = resolve_grouping(cfg, &clean);
    let dataset = build_sequences(
        &clean,
        SequenceSpec {
            grouping: &grouping,
            label_column: cfg.data.label(),
            categories: None,
            stats,
        },
    )?;
    Ok((dataset, grouping))
}
