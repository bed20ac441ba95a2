use std::path::Path;

use sigmode_core::error::Result;
use sigmode_core::pipeline::{run_ablation, VariantRegistry};
use sigmode_core::vmd::FeatureSpec;

use crate::config::RunConfig;
use crate::out::{float_field, opt_float_field, CsvBuilder, OutDir};

pub fn run(
    cfg: &RunConfig,
    out: &OutDir,
    input: Option<&Path>,
    variants_flag: Option<&[String]>,
    threads: usize,
) -> Result<()> {
    let (table, _) = super::load_table(cfg, input)?;
    let (dataset, _) = super::prepare_dataset(cfg, &table)?;

    let variants: Vec<String> = match variants_flag {
        Some(v) if !v.is_empty() => v.to_vec(),
        _ if !cfg.variants.is_empty() => cfg.variants.clone(),
        _ => VariantRegistry::builtin()
            .names()
            .into_iter()
            .map(String::from)
            .collect(),
    };
    let vmd_spec = FeatureSpec {
        columns: cfg.vmd.columns.clone(),
        config: cfg.vmd.to_config(),
    };
    let rows = run_ablation(
        &dataset,
        &variants,
        &vmd_spec,
        &cfg.model_spec(true),
        &cfg.protocol(),
        threads,
    )?;

    let mut csv = CsvBuilder::new(&["variant", "auc", "f1", "sensitivity", "specificity"]);
    for row in &rows {
        csv.row(&[
            row.variant.clone(),
            opt_float_field(row.auc),
            float_field(row.f1),
            float_field(row.sensitivity),
            float_field(row.specificity),
        ]);
        println!(
            "{}: auc={} f1={} sens={} spec={}",
            row.variant,
            opt_float_field(row.auc),
            float_field(row.f1),
            float_field(row.sensitivity),
            float_field(row.specificity),
        );
    }
    out.write_text("ablation.csv", &csv.finish())?;
    Ok(())
}
