//! Artifact writers. Every float in emitted JSON and CSV is rendered with
//! 17 significant digits so text round trips are exact.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use sigmode_core::error::Result;
use sigmode_core::pipeline::{AggregateMetrics, ConfusionCounts, CvOutcome, EvalReport};
use sigmode_core::util::{format_f64, to_json_string};

/// Output directory handle; commands never write outside it.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<OutDir> {
        std::fs::create_dir_all(root)?;
        Ok(OutDir { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.path(name);
        std::fs::write(&path, to_json_string(value)?)?;
        Ok(path)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.path(name);
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

/// CSV assembly with the shared float policy.
pub struct CsvBuilder {
    text: String,
    width: usize,
}

impl CsvBuilder {
    pub fn new(header: &[&str]) -> Self {
        CsvBuilder {
            text: format!("{}\n", header.join(",")),
            width: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.width, "csv row width mismatch");
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn float_field(v: f64) -> String {
    format_f64(v)
}

pub fn opt_float_field(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

/// Provenance record written alongside every run's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub seed: u64,
    pub threads: usize,
    pub output_dir: String,
    pub tool_version: String,
    pub duration_seconds: f64,
}

pub struct ManifestTimer {
    command: String,
    config_path: Option<String>,
    started: Instant,
}

impl ManifestTimer {
    pub fn start(command: &str, config_path: Option<&Path>) -> Self {
        ManifestTimer {
            command: command.to_string(),
            config_path: config_path.map(|p| p.display().to_string()),
            started: Instant::now(),
        }
    }

    pub fn finish(self, out: &OutDir, seed: u64, threads: usize) -> Result<()> {
        let manifest = RunManifest {
            command: self.command,
            config_path: self.config_path,
            seed,
            threads,
            output_dir: out.root.display().to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds: self.started.elapsed().as_secs_f64(),
        };
        out.write_json("manifest.json", &manifest)?;
        Ok(())
    }
}

#[derive(Serialize)]
struct FoldMetrics<'a> {
    fold: usize,
    auc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    auc_note: &'a Option<String>,
    f1: f64,
    sensitivity: f64,
    specificity: f64,
    threshold: f64,
    best_epoch: usize,
    epochs_trained: usize,
    stopped_early: bool,
}

#[derive(Serialize)]
struct MetricsFile<'a> {
    folds: Vec<FoldMetrics<'a>>,
    aggregate: &'a AggregateMetrics,
}

#[derive(Serialize)]
struct ConfusionFile<'a> {
    folds: Vec<FoldConfusion<'a>>,
    total: ConfusionCounts,
}

#[derive(Serialize)]
struct FoldConfusion<'a> {
    fold: usize,
    #[serde(flatten)]
    counts: &'a ConfusionCounts,
}

pub fn roc_csv(report: &EvalReport) -> String {
    let mut csv = CsvBuilder::new(&["fpr", "tpr", "threshold"]);
    for p in &report.roc {
        csv.row(&[
            float_field(p.fpr),
            float_field(p.tpr),
            float_field(p.threshold),
        ]);
    }
    csv.finish()
}

/// Writes metrics.json, per-fold ROC CSVs, and confusion.json for a
/// cross-validation outcome. `prefix` distinguishes e.g. the final retrain
/// of an optimize run.
pub fn write_cv_outputs(out: &OutDir, outcome: &CvOutcome, prefix: &str) -> Result<()> {
    let folds: Vec<FoldMetrics> = outcome
        .folds
        .iter()
        .map(|f| FoldMetrics {
            fold: f.fold + 1,
            auc: f.report.auc,
            auc_note: &f.report.auc_note,
            f1: f.report.f1,
            sensitivity: f.report.sensitivity,
            specificity: f.report.specificity,
            threshold: f.report.threshold,
            best_epoch: f.history.best_epoch,
            epochs_trained: f.history.epochs.len(),
            stopped_early: f.history.stopped_early,
        })
        .collect();
    out.write_json(
        &format!("{prefix}metrics.json"),
        &MetricsFile {
            folds,
            aggregate: &outcome.aggregate,
        },
    )?;

    for f in &outcome.folds {
        out.write_text(&format!("{prefix}roc_fold{}.csv", f.fold + 1), &roc_csv(&f.report))?;
    }

    let total = outcome.folds.iter().fold(
        ConfusionCounts {
            true_pos: 0,
            false_pos: 0,
            true_neg: 0,
            false_neg: 0,
        },
        |acc, f| ConfusionCounts {
            true_pos: acc.true_pos + f.report.confusion.true_pos,
            false_pos: acc.false_pos + f.report.confusion.false_pos,
            true_neg: acc.true_neg + f.report.confusion.true_neg,
            false_neg: acc.false_neg + f.report.confusion.false_neg,
        },
    );
    let confusion = ConfusionFile {
        folds: outcome
            .folds
            .iter()
            .map(|f| FoldConfusion {
                fold: f.fold + 1,
                counts: &f.report.confusion,
            })
            .collect(),
        total,
    };
    out.write_json(&format!("{prefix}confusion.json"), &confusion)?;
    Ok(())
}

/// Single-evaluation outputs (the `evaluate` command).
pub fn write_eval_outputs(out: &OutDir, report: &EvalReport) -> Result<()> {
    #[derive(Serialize)]
    struct EvalFile<'a> {
        auc: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        auc_note: &'a Option<String>,
        f1: f64,
        sensitivity: f64,
        specificity: f64,
        threshold: f64,
    }
    out.write_json(
        "metrics.json",
        &EvalFile {
            auc: report.auc,
            auc_note: &report.auc_note,
            f1: report.f1,
            sensitivity: report.sensitivity,
            specificity: report.specificity,
            threshold: report.threshold,
        },
    )?;
    out.write_text("roc.csv", &roc_csv(report))?;
    #[derive(Serialize)]
    struct ConfusionOnly<'a> {
        #[serde(flatten)]
        counts: &'a ConfusionCounts,
    }
    out.write_json("confusion.json", &ConfusionOnly { counts: &report.confusion })?;
    Ok(())
}
