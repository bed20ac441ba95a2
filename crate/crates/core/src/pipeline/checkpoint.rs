//! Versioned model checkpoint: everything needed to score unseen raw CSV
//! rows exactly as the training run would have.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelConfig, ModelParams};
use crate::util::to_json_string;
use crate::vmd::FeatureSpec;

use super::dataset::ModalityGroup;
use super::table::PreprocessStats;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub model: ModelConfig,
    pub params: ModelParams,
    pub threshold: f64,
    pub label_column: String,
    pub grouping: Vec<ModalityGroup>,
    pub categories: BTreeMap<String, Vec<String>>,
    pub preprocessing: PreprocessStats,
    pub vmd: Option<FeatureSpec>,
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, to_json_string(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Checkpoint> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        let ckpt: Checkpoint = serde_json::from_str(&text)?;
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::Input(format!(
                "checkpoint version {} is not supported (expected {CHECKPOINT_VERSION})",
                ckpt.version
            )));
        }
        if !ckpt.params.is_finite() {
            return Err(Error::data("checkpoint parameters contain non-finite values"));
        }
        Ok(ckpt)
    }
}
