use std::path::Path;

use serde::Serialize;

use sigmode_core::error::Result;
use sigmode_core::tune::{tune, HyperParams, ObjectiveContext};
use sigmode_core::vmd::{FeatureSpec, VmdConfig};

use crate::config::RunConfig;
use crate::out::{float_field, opt_float_field, CsvBuilder, OutDir};

#[derive(Serialize)]
struct BestFile<'a> {
    strategy: &'a str,
    best: &'a HyperParams,
    best_score: f64,
    evaluations: usize,
    iterations: usize,
    history: &'a [f64],
    warnings: &'a [String],
    diagnostics: &'a [String],
}

pub fn run(cfg: &RunConfig, out: &OutDir, input: Option<&Path>, threads: usize) -> Result<()> {
    let (table, _) = super::load_table(cfg, input)?;
    let (dataset, grouping) = super::prepare_dataset(cfg, &table)?;

    let space = cfg.search.search_space()?;
    let base = HyperParams {
        hidden_size: cfg.model.hidden_size,
        num_heads: cfg.model.num_heads,
        vmd_modes: cfg.vmd.modes,
        dropout: cfg.model.dropout,
    };
    let protocol = cfg.protocol();
    let vmd_base = cfg.vmd.to_config();
    let ctx = ObjectiveContext {
        data: &dataset,
        vmd_columns: &cfg.vmd.columns,
        vmd_config: &vmd_base,
        protocol: &protocol,
        search_epoch_cap: cfg.search.epoch_cap,
    };
    let outcome = tune(
        &cfg.search.strategy,
        cfg.search.pso_config(cfg.seed),
        &space,
        &ctx,
        &base,
        threads,
    )?;

    // Search trace: iteration, particle, decoded dimensions, score.
    let mut header = vec!["iteration".to_string(), "particle".to_string()];
    header.extend(space.dims.iter().map(|d| d.name.clone()));
    header.push("score".to_string());
    let mut csv = CsvBuilder::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for row in &outcome.result.trace {
        let mut fields = vec![row.iteration.to_string(), row.particle.to_string()];
        fields.extend(row.decoded.iter().map(|&v| float_field(v)));
        fields.push(float_field(row.score));
        csv.row(&fields);
    }
    out.write_text("trace.csv", &csv.finish())?;

    out.write_json(
        "best.json",
        &BestFile {
            strategy: &cfg.search.strategy,
            best: &outcome.best,
            best_score: outcome.result.best_score,
            evaluations: outcome.result.evaluations,
            iterations: outcome.result.history.len(),
            history: &outcome.result.history,
            warnings: &outcome.result.warnings,
            diagnostics: &outcome.diagnostics,
        },
    )?;
    println!(
        "best validation AUC {} after {} evaluations",
        float_field(outcome.result.best_score),
        outcome.result.evaluations
    );

    // Full retrain at the best candidate.
    let mut final_cfg = cfg.clone();
    final_cfg.model.hidden_size = outcome.best.hidden_size;
    final_cfg.model.num_heads = outcome.best.num_heads;
    final_cfg.model.dropout = outcome.best.dropout;
    let final_vmd = FeatureSpec {
        columns: cfg.vmd.columns.clone(),
        config: VmdConfig {
            k_modes: outcome.best.vmd_modes,
            ..vmd_base
        },
    };
    let cv = super::train::run_cv(
        &final_cfg,
        out,
        &dataset,
        &grouping,
        Some(&final_vmd),
        true,
        threads,
        "final_",
    )?;
    println!(
        "final model: mean AUC {} +- {} over {} folds",
        opt_float_field(cv.aggregate.auc_mean),
        opt_float_field(cv.aggregate.auc_std),
        cv.folds.len()
    );
    Ok(())
}
