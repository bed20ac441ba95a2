//! Data ingestion, preprocessing, pseudo-temporal structuring, synthetic
//! cohort generation, cross-validated training, metrics, and the ablation
//! harness.

pub mod ablation;
pub mod checkpoint;
pub mod dataset;
pub mod folds;
pub mod metrics;
pub mod synth;
pub mod table;
pub mod train;

pub use ablation::{run_ablation, AblationRow, Variant, VariantRegistry};
pub use dataset::{build_sequences, Dataset, GroupSpan, ModalityGroup, SequenceSpec};
pub use folds::{kfold_split, Fold, FoldPlan};
pub use metrics::{auc_rank, evaluate_scores, roc_points, ConfusionCounts, EvalReport, RocPoint};
pub use synth::{generate as synth_generate, SynthConfig, SynthModality};
pub use table::{
    apply_preprocessing, filter_outliers, impute, load_csv, normalize_minmax, parse_csv,
    preprocess, write_csv, Column, ColumnData, ColumnKind, CsvOptions, NormStats,
    PreprocessConfig, PreprocessStats, RawTable,
};
pub use train::{
    aggregate_reports, cross_validate, evaluate_model, model_config_for,
    train_with_early_stopping, AggregateMetrics, CvOutcome, EpochStats, FoldOutcome, ModelSpec,
    TrainHistory, TrainProtocol,
};
