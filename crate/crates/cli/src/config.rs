//! Run configuration: a single JSON file with per-section defaults, plus
//! command-line flag overrides (flags win).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use sigmode_core::error::{Error, Result};
use sigmode_core::pipeline::{
    ColumnKind, CsvOptions, ModalityGroup, PreprocessConfig, SynthConfig, TrainProtocol,
};
use sigmode_core::pso::{Dimension, PsoConfig, SearchSpace};
use sigmode_core::tune::HyperParams;
use sigmode_core::vmd::VmdConfig;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Input CSV path; the `--input` flag overrides it.
    pub csv: Option<PathBuf>,
    pub label_column: Option<String>,
    pub missing_token: Option<String>,
    /// Pinned column kinds; anything else is inferred.
    pub kinds: std::collections::BTreeMap<String, ColumnKind>,
    /// Ordered modality groups; empty means one group holding every feature
    /// column.
    pub groups: Vec<ModalityGroup>,
}

impl DataConfig {
    pub fn csv_options(&self) -> CsvOptions {
        CsvOptions {
            missing_token: self.missing_token.clone(),
            kinds: self.kinds.clone(),
        }
    }

    pub fn label(&self) -> &str {
        self.label_column.as_deref().unwrap_or("label")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VmdSection {
    /// Columns to decompose; empty disables the stage.
    pub columns: Vec<String>,
    pub modes: usize,
    pub alpha: f64,
    pub tau: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub init: sigmode_core::vmd::InitScheme,
}

impl Default for VmdSection {
    fn default() -> Self {
        let d = VmdConfig::default();
        VmdSection {
            columns: Vec::new(),
            modes: d.k_modes,
            alpha: d.alpha,
            tau: d.tau,
            tol: d.tol,
            max_iter: d.max_iter,
            init: d.init,
        }
    }
}

impl VmdSection {
    pub fn to_config(&self) -> VmdConfig {
        VmdConfig {
            k_modes: self.modes,
            alpha: self.alpha,
            tau: self.tau,
            tol: self.tol,
            max_iter: self.max_iter,
            init: self.init,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub hidden_size: usize,
    pub num_heads: usize,
    pub dropout: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        let hp = HyperParams::default();
        ModelSection {
            hidden_size: hp.hidden_size,
            num_heads: hp.num_heads,
            dropout: hp.dropout,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSection {
    pub strategy: String,
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub velocity_clamp: f64,
    /// Epoch cap while scoring candidates; the final retrain uses the full
    /// protocol cap.
    pub epoch_cap: usize,
    pub space: Vec<Dimension>,
}

impl Default for SearchSection {
    fn default() -> Self {
        let pso = PsoConfig::default();
        SearchSection {
            strategy: "pso".into(),
            swarm_size: pso.swarm_size,
            iterations: pso.iterations,
            inertia: pso.inertia,
            cognitive: pso.cognitive,
            social: pso.social,
            velocity_clamp: pso.velocity_clamp,
            epoch_cap: 30,
            space: vec![
                Dimension::integer("hidden_size", 8.0, 64.0),
                Dimension::width_divisor("num_heads", "hidden_size", 1.0, 8.0),
                Dimension::integer("vmd_modes", 1.0, 6.0),
                Dimension::continuous("dropout", 0.0, 0.5),
            ],
        }
    }
}

impl SearchSection {
    pub fn pso_config(&self, seed: u64) -> PsoConfig {
        PsoConfig {
            swarm_size: self.swarm_size,
            iterations: self.iterations,
            inertia: self.inertia,
            cognitive: self.cognitive,
            social: self.social,
            velocity_clamp: self.velocity_clamp,
            seed,
        }
    }

    pub fn search_space(&self) -> Result<SearchSpace> {
        SearchSpace::new(self.space.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolSection {
    pub folds: usize,
    pub patience: usize,
    pub epoch_cap: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub threshold: f64,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        let p = TrainProtocol::default();
        ProtocolSection {
            folds: p.folds,
            patience: p.patience,
            epoch_cap: p.epoch_cap,
            batch_size: p.batch_size,
            learning_rate: p.learning_rate,
            threshold: p.threshold,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub data: DataConfig,
    pub synth: SynthConfig,
    pub preprocessing: PreprocessConfig,
    pub vmd: VmdSection,
    pub model: ModelSection,
    pub protocol: ProtocolSection,
    pub search: SearchSection,
    /// Ablation variants to run; empty means all four.
    pub variants: Vec<String>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::config(format!("cannot read config {}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::config(format!("config {}: {e}", p.display())))
            }
        }
    }

    pub fn protocol(&self) -> TrainProtocol {
        TrainProtocol {
            folds: self.protocol.folds,
            patience: self.protocol.patience,
            epoch_cap: self.protocol.epoch_cap,
            batch_size: self.protocol.batch_size,
            learning_rate: self.protocol.learning_rate,
            threshold: self.protocol.threshold,
            seed: self.seed,
        }
    }

    pub fn model_spec(&self, attention: bool) -> sigmode_core::pipeline::ModelSpec {
        sigmode_core::pipeline::ModelSpec {
            hidden_size: self.model.hidden_size,
            num_heads: self.model.num_heads,
            dropout: self.model.dropout,
            attention,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_uses_defaults() {
        let cfg: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg.protocol.folds, 5);
        assert_eq!(cfg.protocol.batch_size, 32);
        assert_eq!(cfg.protocol.learning_rate, 1e-3);
        assert_eq!(cfg.protocol.patience, 10);
        assert_eq!(cfg.synth.rows, 648);
        assert_eq!(cfg.search.strategy, "pso");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = serde_json::from_str::<RunConfig>("{\"protocl\": {}}");
        assert!(err.is_err());
    }

    #[test]
    fn partial_sections_merge_over_defaults() {
        let cfg: RunConfig =
            serde_json::from_str("{\"protocol\": {\"folds\": 3}, \"seed\": 9}").unwrap();
        assert_eq!(cfg.protocol.folds, 3);
        assert_eq!(cfg.protocol.patience, 10);
        assert_eq!(cfg.protocol().seed, 9);
    }
}
