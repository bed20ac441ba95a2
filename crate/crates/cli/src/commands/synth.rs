use serde::Serialize;

use sigmode_core::error::Result;
use sigmode_core::pipeline::{synth_generate, write_csv, ColumnKind, ModalityGroup, SynthConfig};

use crate::config::RunConfig;
use crate::out::OutDir;

#[derive(Serialize)]
struct SchemaFile<'a> {
    label_column: &'a str,
    columns: Vec<SchemaColumn>,
    groups: Vec<ModalityGroup>,
    generator: &'a SynthConfig,
}

#[derive(Serialize)]
struct SchemaColumn {
    name: String,
    kind: ColumnKind,
}

pub struct SynthOverrides {
    pub rows: Option<usize>,
    pub separation: Option<f64>,
    pub positive_rate: Option<f64>,
    pub missing_rate: Option<f64>,
    pub outlier_rate: Option<f64>,
}

pub fn run(cfg: &RunConfig, out: &OutDir, overrides: &SynthOverrides) -> Result<()> {
    let mut synth = cfg.synth.clone();
    synth.seed = cfg.seed;
    if let Some(rows) = overrides.rows {
        synth.rows = rows;
    }
    if let Some(s) = overrides.separation {
        synth.separation = s;
    }
    if let Some(p) = overrides.positive_rate {
        synth.positive_rate = p;
    }
    if let Some(m) = overrides.missing_rate {
        synth.missing_rate = m;
    }
    if let Some(o) = overrides.outlier_rate {
        synth.outlier_rate = o;
    }

    let table = synth_generate(&synth)?;
    write_csv(&table, &out.path("data.csv"))?;
    let schema = SchemaFile {
        label_column: &synth.label_column,
        columns: table
            .columns
            .iter()
            .map(|c| SchemaColumn {
                name: c.name.clone(),
                kind: c.kind(),
            })
            .collect(),
        groups: synth.grouping(),
        generator: &synth,
    };
    out.write_json("schema.json", &schema)?;
    println!("wrote {} rows to {}", table.rows(), out.path("data.csv").display());
    Ok(())
}
