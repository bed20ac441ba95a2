//! Architecture variants behind a common trait, registered by name and
//! selected at runtime. Each variant toggles the attention stage (off means
//! plain mean pooling over the BiLSTM states) and the decomposition stage
//! (off means the raw feature columns).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vmd::{self, FeatureSpec};

use super::dataset::Dataset;
use super::train::{cross_validate, ModelSpec, TrainProtocol};

pub trait Variant: Send + Sync {
    /// Registry key, also the `variant` value in emitted tables.
    fn name(&self) -> &'static str;
    fn uses_attention(&self) -> bool;
    fn uses_vmd(&self) -> bool;
    fn describe(&self) -> &'static str;
}

struct BilstmOnly;
struct BilstmAm;
struct BilstmVmd;
struct BilstmAmVmd;

impl Variant for BilstmOnly {
    fn name(&self) -> &'static str {
        "bilstm-only"
    }
    fn uses_attention(&self) -> bool {
        false
    }
    fn uses_vmd(&self) -> bool {
        false
    }
    fn describe(&self) -> &'static str {
        "BiLSTM encoder with mean pooling, raw feature columns"
    }
}

impl Variant for BilstmAm {
    fn name(&self) -> &'static str {
        "bilstm-am"
    }
    fn uses_attention(&self) -> bool {
        true
    }
    fn uses_vmd(&self) -> bool {
        false
    }
    fn describe(&self) -> &'static str {
        "BiLSTM with multi-head attention, raw feature columns"
    }
}

impl Variant for BilstmVmd {
    fn name(&self) -> &'static str {
        "bilstm-vmd"
    }
    fn uses_attention(&self) -> bool {
        false
    }
    fn uses_vmd(&self) -> bool {
        true
    }
    fn describe(&self) -> &'static str {
        "BiLSTM with mean pooling over decomposed feature columns"
    }
}

impl Variant for BilstmAmVmd {
    fn name(&self) -> &'static str {
        "bilstm-am-vmd"
    }
    fn uses_attention(&self) -> bool {
        true
    }
    fn uses_vmd(&self) -> bool {
        true
    }
    fn describe(&self) -> &'static str {
        "Full model: decomposition, BiLSTM, and multi-head attention"
    }
}

/// Name-keyed store of model variants.
pub struct VariantRegistry {
    entries: Vec<Box<dyn Variant>>,
}

impl VariantRegistry {
    /// The four built-in architecture variants.
    pub fn builtin() -> Self {
        let mut r = VariantRegistry { entries: Vec::new() };
        r.register(Box::new(BilstmOnly));
        r.register(Box::new(BilstmAm));
        r.register(Box::new(BilstmVmd));
        r.register(Box::new(BilstmAmVmd));
        r
    }

    pub fn register(&mut self, v: Box<dyn Variant>) {
        self.entries.push(v);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|v| v.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn Variant> {
        self.entries
            .iter()
            .map(AsRef::as_ref)
            .find(|v| v.name() == name)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown variant '{name}'; registered: {}",
                    self.names().join(", ")
                ))
            })
    }
}

impl Default for VariantRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

/// One line of the ablation comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub variant: String,
    pub auc: Option<f64>,
    pub f1: f64,
    pub sensitivity: f64,
    pub specificity: f64,
}

/// Trains and evaluates each named variant under identical folds and seeds
/// and returns one aggregate row per variant, in request order.
pub fn run_ablation(
    data: &Dataset,
    variant_names: &[String],
    vmd_spec: &FeatureSpec,
    base: &ModelSpec,
    protocol: &TrainProtocol,
    threads: usize,
) -> Result<Vec<AblationRow>> {
    if variant_names.is_empty() {
        return Err(Error::config("no variants requested"));
    }
    let registry = VariantRegistry::builtin();
    let variants = variant_names
        .iter()
        .map(|n| registry.get(n))
        .collect::<Result<Vec<_>>>()?;

    // The decomposed dataset is shared by every *-vmd variant.
    let decomposed = if variants.iter().any(|v| v.uses_vmd()) {
        Some(vmd::features(data, &vmd_spec.columns, &vmd_spec.config)?)
    } else {
        None
    };

    let mut rows = Vec::with_capacity(variants.len());
    for v in variants {
        let table = if v.uses_vmd() {
            decomposed.as_ref().expect("prepared above")
        } else {
            data
        };
        let spec = ModelSpec {
            attention: v.uses_attention(),
            ..base.clone()
        };
        let outcome = cross_validate(table, &spec, protocol, threads)?;
        rows.push(AblationRow {
            variant: v.name().to_string(),
            auc: outcome.aggregate.auc_mean,
            f1: outcome.aggregate.f1_mean,
            sensitivity: outcome.aggregate.sensitivity_mean,
            specificity: outcome.aggregate.specificity_mean,
        });
    }
    Ok(rows)
}
