//! Mini-batch training with validation-loss early stopping, plus the
//! stratified cross-validation driver used by the CLI, the ablation harness,
//! and the hyperparameter search objective.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{Matrix, SeededRng};
use crate::model::{adam::AdamState, backward, bce_loss, forward, ModelConfig, ModelParams};
use crate::util::parallel_map_indexed;

use super::dataset::Dataset;
use super::folds::{kfold_split, FoldPlan};
use super::metrics::{evaluate_scores, EvalReport};

/// Training protocol knobs shared across folds and variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainProtocol {
    pub folds: usize,
    pub patience: usize,
    pub epoch_cap: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for TrainProtocol {
    fn default() -> Self {
        TrainProtocol {
            folds: 5,
            patience: 10,
            epoch_cap: 200,
            batch_size: 32,
            learning_rate: 1e-3,
            threshold: 0.5,
            seed: 0,
        }
    }
}

impl TrainProtocol {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::config("folds must be at least 2"));
        }
        if self.epoch_cap < 1 || self.batch_size < 1 || self.patience < 1 {
            return Err(Error::config(
                "epoch_cap, batch_size, and patience must be positive",
            ));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::config("learning_rate must be positive"));
        }
        Ok(())
    }
}

/// Structural hyperparameters plus the architecture switches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub hidden_size: usize,
    pub num_heads: usize,
    pub dropout: f64,
    pub attention: bool,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            hidden_size: 16,
            num_heads: 4,
            dropout: 0.1,
            attention: true,
        }
    }
}

pub fn model_config_for(data: &Dataset, spec: &ModelSpec, seed: u64) -> Result<ModelConfig> {
    ModelConfig::new(
        data.step_dim(),
        data.seq_len(),
        spec.hidden_size,
        spec.num_heads,
        spec.dropout,
        seed,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochStats>,
    /// 1-based epoch whose parameters were returned.
    pub best_epoch: usize,
    pub stopped_early: bool,
}

fn mean_val_loss(
    params: &ModelParams,
    cfg: &ModelConfig,
    seqs: &[Matrix],
    labels: &[u8],
    idx: &[usize],
) -> Result<f64> {
    let mut rng = SeededRng::new(0); // inference path never draws
    let mut total = 0.0;
    for &i in idx {
        let (yhat, _) = forward(params, cfg, &seqs[i], &mut rng, false)?;
        total += bce_loss(labels[i], yhat);
    }
    Ok(total / idx.len() as f64)
}

/// Trains with shuffled mini-batches and Adam, monitoring validation loss;
/// stops after `patience` consecutive non-improving epochs and returns the
/// parameters from the best-validation epoch.
pub fn train_with_early_stopping(
    data: &Dataset,
    train_idx: &[usize],
    val_idx: &[usize],
    spec: &ModelSpec,
    protocol: &TrainProtocol,
    rng: &mut SeededRng,
) -> Result<(ModelParams, ModelConfig, TrainHistory)> {
    protocol.validate()?;
    if train_idx.is_empty() || val_idx.is_empty() {
        return Err(Error::config("train and validation splits must be non-empty"));
    }
    let overlap = {
        let vs: std::collections::HashSet<usize> = val_idx.iter().copied().collect();
        train_idx.iter().any(|i| vs.contains(i))
    };
    if overlap {
        return Err(Error::config("train and validation splits overlap"));
    }

    let cfg = model_config_for(data, spec, protocol.seed)?;
    let seqs: Vec<Matrix> = (0..data.records()).map(|i| data.sequence(i)).collect();
    let labels = &data.labels;

    let mut params = ModelParams::init(&cfg, spec.attention, rng)?;
    let mut adam = AdamState::new(&params, protocol.learning_rate);

    let mut best_params = params.clone();
    let mut best_val = f64::INFINITY;
    let mut best_epoch = 0usize;
    let mut bad_epochs = 0usize;
    let mut stopped_early = false;
    let mut history = Vec::new();
    let mut order: Vec<usize> = train_idx.to_vec();

    for epoch in 1..=protocol.epoch_cap {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(protocol.batch_size) {
            let mut grads = params.zeros_like();
            let inv = 1.0 / batch.len() as f64;
            for &i in batch {
                let (yhat, cache) = forward(&params, &cfg, &seqs[i], rng, true)?;
                epoch_loss += bce_loss(labels[i], yhat);
                let g = backward(&params, &cfg, cache, labels[i])?;
                for (acc, src) in grads.buffers_mut().into_iter().zip(g.buffers()) {
                    for (a, &s) in acc.iter_mut().zip(src) {
                        *a += s * inv;
                    }
                }
            }
            adam.step(&mut params, &grads)?;
        }
        let train_loss = epoch_loss / order.len() as f64;
        let val_loss = mean_val_loss(&params, &cfg, &seqs, labels, val_idx)?;
        if !train_loss.is_finite() || !val_loss.is_finite() {
            return Err(Error::Training(format!(
                "non-finite loss at epoch {epoch} (train {train_loss}, val {val_loss})"
            )));
        }
        history.push(EpochStats {
            epoch,
            train_loss,
            val_loss,
        });

        if val_loss < best_val {
            best_val = val_loss;
            best_epoch = epoch;
            best_params = params.clone();
            bad_epochs = 0;
        } else {
            bad_epochs += 1;
            if bad_epochs >= protocol.patience {
                stopped_early = true;
                break;
            }
        }
    }

    Ok((
        best_params,
        cfg,
        TrainHistory {
            epochs: history,
            best_epoch,
            stopped_early,
        },
    ))
}

/// Scores `idx` with a trained model (inference mode) and evaluates.
pub fn evaluate_model(
    params: &ModelParams,
    cfg: &ModelConfig,
    data: &Dataset,
    idx: &[usize],
    threshold: f64,
) -> Result<EvalReport> {
    let mut rng = SeededRng::new(0);
    let mut scores = Vec::with_capacity(idx.len());
    let mut labels = Vec::with_capacity(idx.len());
    for &i in idx {
        let (yhat, _) = forward(params, cfg, &data.sequence(i), &mut rng, false)?;
        scores.push(yhat);
        labels.push(data.labels[i]);
    }
    evaluate_scores(&labels, &scores, threshold)
}

/// Mean and population standard deviation of per-fold metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub auc_mean: Option<f64>,
    pub auc_std: Option<f64>,
    pub f1_mean: f64,
    pub f1_std: f64,
    pub sensitivity_mean: f64,
    pub sensitivity_std: f64,
    pub specificity_mean: f64,
    pub specificity_std: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn aggregate_reports(reports: &[EvalReport]) -> AggregateMetrics {
    let aucs: Vec<f64> = reports.iter().filter_map(|r| r.auc).collect();
    let (auc_mean, auc_std) = if aucs.is_empty() {
        (None, None)
    } else {
        let (m, s) = mean_std(&aucs);
        (Some(m), Some(s))
    };
    let pick = |f: fn(&EvalReport) -> f64| {
        let vals: Vec<f64> = reports.iter().map(f).collect();
        mean_std(&vals)
    };
    let (f1_mean, f1_std) = pick(|r| r.f1);
    let (sensitivity_mean, sensitivity_std) = pick(|r| r.sensitivity);
    let (specificity_mean, specificity_std) = pick(|r| r.specificity);
    AggregateMetrics {
        auc_mean,
        auc_std,
        f1_mean,
        f1_std,
        sensitivity_mean,
        sensitivity_std,
        specificity_mean,
        specificity_std,
    }
}

#[derive(Debug, Clone)]
pub struct FoldOutcome {
    pub fold: usize,
    pub report: EvalReport,
    pub params: ModelParams,
    pub config: ModelConfig,
    pub history: TrainHistory,
}

#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub plan: FoldPlan,
    pub folds: Vec<FoldOutcome>,
    pub aggregate: AggregateMetrics,
}

/// Stratified k-fold cross-validation. Folds run independently on derived
/// RNG streams, so results are identical for any thread count.
pub fn cross_validate(
    data: &Dataset,
    spec: &ModelSpec,
    protocol: &TrainProtocol,
    threads: usize,
) -> Result<CvOutcome> {
    protocol.validate()?;
    let plan = kfold_split(data.records(), protocol.folds, protocol.seed, &data.labels)?;
    let root = SeededRng::new(protocol.seed);
    let results: Vec<Result<FoldOutcome>> = parallel_map_indexed(plan.folds.len(), threads, |f| {
        let fold = &plan.folds[f];
        let mut rng = root.derive(0x666f6c64 + f as u64);
        let (params, config, history) =
            train_with_early_stopping(data, &fold.train, &fold.val, spec, protocol, &mut rng)?;
        let report = evaluate_model(&params, &config, data, &fold.val, protocol.threshold)?;
        Ok(FoldOutcome {
            fold: f,
            report,
            params,
            config,
            history,
        })
    });
    let folds: Vec<FoldOutcome> = results.into_iter().collect::<Result<_>>()?;
    let reports: Vec<EvalReport> = folds.iter().map(|f| f.report.clone()).collect();
    Ok(CvOutcome {
        plan,
        folds,
        aggregate: aggregate_reports(&reports),
    })
}
