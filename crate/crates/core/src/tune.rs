//! Hyperparameter search: the validation-AUC objective over decoded
//! positions, and the search strategies behind a common trait, registered by
//! name and selected via config.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::SeededRng;
use crate::pipeline::{
    evaluate_model, kfold_split, train_with_early_stopping, Dataset, ModelSpec, TrainProtocol,
};
use crate::pso::{PsoConfig, SearchSpace, Swarm, SwarmResult};
use crate::vmd::{self, VmdConfig};

/// The searched hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub hidden_size: usize,
    pub num_heads: usize,
    pub vmd_modes: usize,
    pub dropout: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            hidden_size: 16,
            num_heads: 4,
            vmd_modes: 3,
            dropout: 0.1,
        }
    }
}

impl HyperParams {
    /// Reads a decoded position by dimension name; dimensions absent from
    /// the space keep the base values.
    pub fn from_decoded(space: &SearchSpace, decoded: &[f64], base: &HyperParams) -> HyperParams {
        let pick = |name: &str| space.index_of(name).map(|i| decoded[i]);
        HyperParams {
            hidden_size: pick("hidden_size").map_or(base.hidden_size, |v| v as usize),
            num_heads: pick("num_heads").map_or(base.num_heads, |v| v as usize),
            vmd_modes: pick("vmd_modes").map_or(base.vmd_modes, |v| v as usize),
            dropout: pick("dropout").unwrap_or(base.dropout),
        }
    }
}

/// Everything the objective needs besides the candidate itself.
pub struct ObjectiveContext<'a> {
    /// Preprocessed dataset, before any decomposition.
    pub data: &'a Dataset,
    /// Columns to decompose when `vmd_modes > 0`; empty disables the stage.
    pub vmd_columns: &'a [String],
    /// Base decomposition settings; `k_modes` is overridden per candidate.
    pub vmd_config: &'a VmdConfig,
    pub protocol: &'a TrainProtocol,
    /// Reduced epoch cap during search; the final model retrains fully.
    pub search_epoch_cap: usize,
}

/// Trains one candidate on the first stratified split and returns its
/// validation AUC. Failures (divergence, impossible configs) score 0.0 with
/// a diagnostic instead of failing the whole search.
pub fn validation_auc(hp: &HyperParams, ctx: &ObjectiveContext) -> (f64, Option<String>) {
    match try_validation_auc(hp, ctx) {
        Ok(score) => (score, None),
        Err(e) => (0.0, Some(format!("{hp:?}: {e}"))),
    }
}

fn try_validation_auc(hp: &HyperParams, ctx: &ObjectiveContext) -> Result<f64> {
    let decomposed;
    let data = if ctx.vmd_columns.is_empty() {
        ctx.data
    } else {
        let cfg = VmdConfig {
            k_modes: hp.vmd_modes,
            ..ctx.vmd_config.clone()
        };
        decomposed = vmd::features(ctx.data, ctx.vmd_columns, &cfg)?;
        &decomposed
    };
    let plan = kfold_split(
        data.records(),
        ctx.protocol.folds,
        ctx.protocol.seed,
        &data.labels,
    )?;
    let fold = &plan.folds[0];
    let spec = ModelSpec {
        hidden_size: hp.hidden_size,
        num_heads: hp.num_heads,
        dropout: hp.dropout,
        attention: true,
    };
    let protocol = TrainProtocol {
        epoch_cap: ctx.search_epoch_cap,
        ..ctx.protocol.clone()
    };
    // Seeded purely from the protocol so identical candidates score
    // identically no matter which particle or iteration asks.
    let mut rng = SeededRng::new(protocol.seed).derive(0x747565);
    let (params, cfg, _) =
        train_with_early_stopping(data, &fold.train, &fold.val, &spec, &protocol, &mut rng)?;
    let report = evaluate_model(&params, &cfg, data, &fold.val, protocol.threshold)?;
    report
        .auc
        .ok_or_else(|| Error::data("validation AUC undefined (single-class fold)"))
}

/// A hyperparameter search algorithm. Implementations are looked up by name
/// in the [`SearchRegistry`].
pub trait SearchStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn run(
        &self,
        objective: &(dyn Fn(&[f64]) -> f64 + Sync),
        space: &SearchSpace,
        threads: usize,
    ) -> Result<SwarmResult>;
}

/// Particle swarm strategy (the only built-in).
pub struct ParticleSwarmStrategy {
    pub cfg: PsoConfig,
}

impl SearchStrategy for ParticleSwarmStrategy {
    fn name(&self) -> &'static str {
        "pso"
    }
    fn describe(&self) -> &'static str {
        "particle swarm over the relaxed hyperparameter box"
    }
    fn run(
        &self,
        objective: &(dyn Fn(&[f64]) -> f64 + Sync),
        space: &SearchSpace,
        threads: usize,
    ) -> Result<SwarmResult> {
        Ok(Swarm::new(space.clone(), self.cfg.clone())?.run(objective, threads))
    }
}

pub struct SearchRegistry {
    strategies: Vec<Box<dyn SearchStrategy>>,
}

impl SearchRegistry {
    pub fn builtin(pso: PsoConfig) -> Self {
        let mut r = SearchRegistry { strategies: Vec::new() };
        r.register(Box::new(ParticleSwarmStrategy { cfg: pso }));
        r
    }

    pub fn register(&mut self, s: Box<dyn SearchStrategy>) {
        self.strategies.push(s);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn SearchStrategy> {
        self.strategies
            .iter()
            .map(AsRef::as_ref)
            .find(|s| s.name() == name)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown search strategy '{name}'; registered: {}",
                    self.names().join(", ")
                ))
            })
    }
}

/// Outcome of a full search: the swarm result plus the decoded best
/// candidate and any objective diagnostics (sorted for reproducibility).
pub struct TuneOutcome {
    pub result: SwarmResult,
    pub best: HyperParams,
    pub diagnostics: Vec<String>,
}

/// Runs the named strategy over `space`, maximizing validation AUC.
pub fn tune(
    strategy: &str,
    pso: PsoConfig,
    space: &SearchSpace,
    ctx: &ObjectiveContext,
    base: &HyperParams,
    threads: usize,
) -> Result<TuneOutcome> {
    let registry = SearchRegistry::builtin(pso);
    let strategy = registry.get(strategy)?;
    let diagnostics = Mutex::new(Vec::new());
    let objective = |decoded: &[f64]| {
        let hp = HyperParams::from_decoded(space, decoded, base);
        let (score, diag) = validation_auc(&hp, ctx);
        if let Some(d) = diag {
            diagnostics.lock().expect("no poisoned locks").push(d);
        }
        score
    };
    let result = strategy.run(&objective, space, threads)?;
    let best = HyperParams::from_decoded(space, &result.best_position, base);
    let mut diagnostics = diagnostics.into_inner().expect("no poisoned locks");
    diagnostics.sort();
    Ok(TuneOutcome {
        result,
        best,
        diagnostics,
    })
}
