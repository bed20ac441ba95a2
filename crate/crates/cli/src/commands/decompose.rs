use std::path::Path;

use serde::Serialize;

use sigmode_core::error::{Error, Result};
use sigmode_core::pipeline::{load_csv, ColumnData};
use sigmode_core::vmd::{self, Signal};

use crate::config::RunConfig;
use crate::out::{float_field, CsvBuilder, OutDir};

#[derive(Serialize)]
struct DecomposeSidecar {
    column: String,
    modes: usize,
    center_frequencies: Vec<f64>,
    iterations_used: usize,
    converged: bool,
    reconstruction_relative_error: f64,
}

pub fn run(
    cfg: &RunConfig,
    out: &OutDir,
    input: &Path,
    column: Option<&str>,
    modes: Option<usize>,
) -> Result<()> {
    super::require_file(input)?;
    let table = load_csv(input, &cfg.data.csv_options())?;

    let col = match column {
        Some(name) => table
            .column(name)
            .ok_or_else(|| Error::config(format!("column '{name}' not found in {}", input.display())))?,
        None => {
            if table.columns.len() != 1 {
                return Err(Error::config(format!(
                    "{} has {} columns; pick one with --column",
                    input.display(),
                    table.columns.len()
                )));
            }
            &table.columns[0]
        }
    };
    let samples = match &col.data {
        ColumnData::Continuous(v) => v
            .iter()
            .enumerate()
            .map(|(r, x)| {
                x.ok_or_else(|| Error::data(format!("column '{}' row {r} is missing", col.name)))
            })
            .collect::<Result<Vec<f64>>>()?,
        ColumnData::Categorical(_) => {
            return Err(Error::Input(format!(
                "column '{}' is categorical; decomposition needs numbers",
                col.name
            )))
        }
    };

    let mut vmd_cfg = cfg.vmd.to_config();
    if let Some(k) = modes {
        vmd_cfg.k_modes = k;
    }
    if vmd_cfg.k_modes < 1 {
        return Err(Error::config("--modes must be at least 1"));
    }

    let signal = Signal::new(samples);
    let set = vmd::decompose(&signal, &vmd_cfg)?;
    let restored = vmd::reconstruct(&set);
    let err_num: f64 = restored
        .samples
        .iter()
        .zip(&signal.samples)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let err_den: f64 = signal.samples.iter().map(|v| v * v).sum();
    let rel_err = if err_den > 0.0 {
        (err_num / err_den).sqrt()
    } else {
        0.0
    };

    let header: Vec<String> = (1..=set.k()).map(|k| format!("mode_{k}")).collect();
    let mut csv = CsvBuilder::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for r in 0..signal.len() {
        csv.row(&set.modes.iter().map(|m| float_field(m[r])).collect::<Vec<_>>());
    }
    out.write_text("modes.csv", &csv.finish())?;
    out.write_json(
        "decompose.json",
        &DecomposeSidecar {
            column: col.name.clone(),
            modes: set.k(),
            center_frequencies: set.center_freqs.clone(),
            iterations_used: set.iterations_used,
            converged: set.converged,
            reconstruction_relative_error: rel_err,
        },
    )?;
    println!("reconstruction relative error: {}", float_field(rel_err));
    Ok(())
}
