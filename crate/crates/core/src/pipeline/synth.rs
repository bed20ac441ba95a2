//! Seeded synthetic cohort generator: class-conditional Gaussian continuous
//! features and class-tilted categorical features, with configurable missing
//! and outlier injection. Stands in for clinical data that cannot ship.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::SeededRng;

use super::dataset::ModalityGroup;
use super::table::{Column, ColumnData, RawTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthModality {
    pub name: String,
    pub continuous: usize,
    pub categorical: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub rows: usize,
    pub modalities: Vec<SynthModality>,
    /// Fraction of positive labels.
    pub positive_rate: f64,
    /// Class-1 mean shift on continuous features, in units of the noise
    /// standard deviation (alternating sign across features).
    pub separation: f64,
    pub missing_rate: f64,
    pub outlier_rate: f64,
    pub categorical_levels: usize,
    pub label_column: String,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            rows: 648,
            modalities: vec![
                SynthModality { name: "demographics".into(), continuous: 5, categorical: 0 },
                SynthModality { name: "clinical".into(), continuous: 2, categorical: 2 },
                SynthModality { name: "hormonal_metabolic".into(), continuous: 8, categorical: 0 },
                SynthModality { name: "imaging".into(), continuous: 4, categorical: 0 },
            ],
            positive_rate: 0.5,
            separation: 3.0,
            missing_rate: 0.02,
            outlier_rate: 0.005,
            categorical_levels: 3,
            label_column: "label".into(),
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 {
            return Err(Error::config("rows must be positive"));
        }
        if self.modalities.is_empty()
            || self.modalities.iter().all(|m| m.continuous + m.categorical == 0)
        {
            return Err(Error::config("at least one feature is required"));
        }
        for (name, rate) in [("positive_rate", self.positive_rate)] {
            if !(0.0 < rate && rate < 1.0) {
                return Err(Error::config(format!("{name} must be in (0, 1), got {rate}")));
            }
        }
        for (name, rate) in [("missing_rate", self.missing_rate), ("outlier_rate", self.outlier_rate)] {
            if !(0.0..1.0).contains(&rate) {
                return Err(Error::config(format!("{name} must be in [0, 1), got {rate}")));
            }
        }
        if self.separation < 0.0 {
            return Err(Error::config("separation must be non-negative"));
        }
        if self.categorical_levels < 2 {
            return Err(Error::config("categorical_levels must be at least 2"));
        }
        Ok(())
    }

    /// The modality grouping matching the generated column names.
    pub fn grouping(&self) -> Vec<ModalityGroup> {
        self.modalities
            .iter()
            .map(|m| ModalityGroup {
                name: m.name.clone(),
                columns: (0..m.continuous)
                    .map(|i| format!("{}_c{}", m.name, i + 1))
                    .chain((0..m.categorical).map(|i| format!("{}_k{}", m.name, i + 1)))
                    .collect(),
            })
            .collect()
    }
}

/// Level probabilities for a categorical feature in the given class:
/// uniform for class 0, exponentially tilted by the separation for class 1.
fn level_probs(levels: usize, label: u8, separation: f64) -> Vec<f64> {
    let tilt = if label == 1 { 0.3 * separation } else { 0.0 };
    let weights: Vec<f64> = (0..levels).map(|l| (tilt * l as f64).exp()).collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

pub fn generate(cfg: &SynthConfig) -> Result<RawTable> {
    cfg.validate()?;
    let mut rng = SeededRng::new(cfg.seed);
    let n = cfg.rows;

    let labels: Vec<u8> = (0..n)
        .map(|_| u8::from(rng.next_f64() < cfg.positive_rate))
        .collect();

    let mut columns: Vec<Column> = Vec::new();
    let mut feature_index = 0usize;
    for m in &cfg.modalities {
        for i in 0..m.continuous {
            // Alternating shift direction keeps single features individually
            // informative without making the sum degenerate.
            let direction = if feature_index.is_multiple_of(2) { 1.0 } else { -1.0 };
            feature_index += 1;
            let mut vals: Vec<Option<f64>> = Vec::with_capacity(n);
            for &y in &labels {
                let mut v = rng.normal() + f64::from(y) * cfg.separation * direction;
                if cfg.outlier_rate > 0.0 && rng.next_f64() < cfg.outlier_rate {
                    v += if rng.next_f64() < 0.5 { 12.0 } else { -12.0 };
                }
                let missing = cfg.missing_rate > 0.0 && rng.next_f64() < cfg.missing_rate;
                vals.push(if missing { None } else { Some(v) });
            }
            columns.push(Column {
                name: format!("{}_c{}", m.name, i + 1),
                data: ColumnData::Continuous(vals),
            });
        }
        for i in 0..m.categorical {
            feature_index += 1;
            let mut vals: Vec<Option<String>> = Vec::with_capacity(n);
            for &y in &labels {
                let probs = level_probs(cfg.categorical_levels, y, cfg.separation);
                let draw = rng.next_f64();
                let mut acc = 0.0;
                let mut level = cfg.categorical_levels - 1;
                for (l, p) in probs.iter().enumerate() {
                    acc += p;
                    if draw < acc {
                        level = l;
                        break;
                    }
                }
                let missing = cfg.missing_rate > 0.0 && rng.next_f64() < cfg.missing_rate;
                vals.push(if missing {
                    None
                } else {
                    Some(format!("lv{level}"))
                });
            }
            columns.push(Column {
                name: format!("{}_k{}", m.name, i + 1),
                data: ColumnData::Categorical(vals),
            });
        }
    }
    columns.push(Column {
        name: cfg.label_column.clone(),
        data: ColumnData::Continuous(labels.iter().map(|&y| Some(f64::from(y))).collect()),
    });
    RawTable::new(columns)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Single-feature threshold oracle: AUC of one column used directly as a
    /// score against the labels.
    fn single_feature_auc(table: &RawTable, feature: &str, label: &str) -> f64 {
        let scores: Vec<f64> = match &table.column(feature).unwrap().data {
            ColumnData::Continuous(v) => v.iter().map(|x| x.unwrap_or(0.0)).collect(),
            _ => panic!("continuous expected"),
        };
        let labels: Vec<u8> = match &table.column(label).unwrap().data {
            ColumnData::Continuous(v) => v.iter().map(|x| x.unwrap() as u8).collect(),
            _ => panic!(),
        };
        // Brute-force pairwise AUC.
        let mut wins = 0.0;
        let mut total = 0.0;
        for (i, &yi) in labels.iter().enumerate() {
            for (j, &yj) in labels.iter().enumerate() {
                if yi == 1 && yj == 0 {
                    total += 1.0;
                    if scores[i] > scores[j] {
                        wins += 1.0;
                    } else if scores[i] == scores[j] {
                        wins += 0.5;
                    }
                }
            }
        }
        wins / total
    }

    #[test]
    fn default_emits_648_rows() {
        let t = generate(&SynthConfig::default()).unwrap();
        assert_eq!(t.rows(), 648);
        assert_eq!(t.columns.len(), 5 + 4 + 8 + 4 + 1);
    }

    #[test]
    fn strong_separation_gives_high_single_feature_auc() {
        let cfg = SynthConfig {
            separation: 3.0,
            missing_rate: 0.0,
            outlier_rate: 0.0,
            ..Default::default()
        };
        let t = generate(&cfg).unwrap();
        let auc = single_feature_auc(&t, "demographics_c1", "label");
        assert!(auc >= 0.95, "auc {auc}");
    }

    #[test]
    fn zero_separation_gives_null_auc() {
        for seed in 0..5 {
            let cfg = SynthConfig {
                separation: 0.0,
                missing_rate: 0.0,
                outlier_rate: 0.0,
                seed,
                ..Default::default()
            };
            let t = generate(&cfg).unwrap();
            let auc = single_feature_auc(&t, "demographics_c1", "label");
            assert!((auc - 0.5).abs() < 0.1, "seed {seed}: auc {auc}");
        }
    }

    #[test]
    fn same_seed_is_identical() {
        let cfg = SynthConfig::default();
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
    }

    #[test]
    fn missing_rate_injects_gaps() {
        let cfg = SynthConfig {
            missing_rate: 0.2,
            ..Default::default()
        };
        let t = generate(&cfg).unwrap();
        let gaps: usize = t
            .columns
            .iter()
            .filter(|c| c.name != "label")
            .map(Column::missing_count)
            .sum();
        let cells = 19 * t.rows();
        let rate = gaps as f64 / cells as f64;
        assert!((rate - 0.2).abs() < 0.03, "rate {rate}");
    }

    #[test]
    fn invalid_rates_are_config_errors() {
        let cfg = SynthConfig {
            missing_rate: 1.5,
            ..Default::default()
        };
        assert!(generate(&cfg).is_err());
        let cfg = SynthConfig {
            positive_rate: 0.0,
            ..Default::default()
        };
        assert!(generate(&cfg).is_err());
    }
}
