//! Pseudo-temporal structuring: feature columns are grouped by modality,
//! each group becomes one timestep, and groups are right-padded with zeros
//! to the widest group's width so every timestep has the same dimension.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::Matrix;

use super::table::{ColumnData, ColumnKind, PreprocessStats, RawTable};

/// Named, ordered set of columns forming one pseudo-timestep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalityGroup {
    pub name: String,
    pub columns: Vec<String>,
}

/// A group's contiguous span inside the flat feature matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpan {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

/// Preprocessed feature matrix with binary labels and modality structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// `N x D`, columns ordered group by group.
    pub features: Matrix,
    pub labels: Vec<u8>,
    pub feature_names: Vec<String>,
    pub feature_kinds: Vec<ColumnKind>,
    pub groups: Vec<GroupSpan>,
    /// First-seen category order per categorical column, fixing the integer
    /// codes for unseen data.
    pub categories: BTreeMap<String, Vec<String>>,
    pub stats: PreprocessStats,
}

impl Dataset {
    pub fn records(&self) -> usize {
        self.features.rows
    }

    /// Number of pseudo-timesteps (one per modality group).
    pub fn seq_len(&self) -> usize {
        self.groups.len()
    }

    /// Width of one timestep: the widest group.
    pub fn step_dim(&self) -> usize {
        self.groups.iter().map(|g| g.len).max().unwrap_or(0)
    }

    /// One record as a zero-padded `T x d` sequence.
    pub fn sequence(&self, record: usize) -> Matrix {
        let d = self.step_dim();
        let mut m = Matrix::zeros(self.seq_len(), d);
        for (t, g) in self.groups.iter().enumerate() {
            let row = self.features.row(record);
            m.row_mut(t)[..g.len].copy_from_slice(&row[g.start..g.start + g.len]);
        }
        m
    }

    /// 1.0 where a timestep position carries data, 0.0 where it is padding.
    pub fn padding_mask(&self) -> Matrix {
        let d = self.step_dim();
        let mut m = Matrix::zeros(self.seq_len(), d);
        for (t, g) in self.groups.iter().enumerate() {
            for c in 0..g.len {
                m[(t, c)] = 1.0;
            }
        }
        m
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    /// The group a feature column belongs to.
    pub fn group_of(&self, feature_index: usize) -> usize {
        self.groups
            .iter()
            .position(|g| feature_index >= g.start && feature_index < g.start + g.len)
            .expect("spans cover all columns")
    }
}

/// Everything [`build_sequences`] needs besides the table itself.
pub struct SequenceSpec<'a> {
    pub grouping: &'a [ModalityGroup],
    pub label_column: &'a str,
    /// Category orders fixed at training time; `None` learns them from the
    /// table in first-seen order.
    pub categories: Option<&'a BTreeMap<String, Vec<String>>>,
    pub stats: PreprocessStats,
}

/// Turns a preprocessed table into a [`Dataset`]: validates that the
/// grouping covers every feature column exactly once, encodes categorical
/// columns as integer codes, and extracts binary labels.
pub fn build_sequences(table: &RawTable, spec: SequenceSpec) -> Result<Dataset> {
    let label_col = table
        .column(spec.label_column)
        .ok_or_else(|| Error::config(format!("unknown label column '{}'", spec.label_column)))?;
    let labels = extract_labels(label_col.name.as_str(), &label_col.data)?;

    // Every non-label column must appear in exactly one group.
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for g in spec.grouping {
        for c in &g.columns {
            if c == spec.label_column {
                return Err(Error::config(format!(
                    "label column '{c}' cannot be grouped as a feature"
                )));
            }
            if table.column(c).is_none() {
                return Err(Error::config(format!(
                    "group '{}' references unknown column '{c}'",
                    g.name
                )));
            }
            *seen.entry(c.as_str()).or_insert(0) += 1;
        }
    }
    for (c, n) in &seen {
        if *n > 1 {
            return Err(Error::config(format!("column '{c}' appears in {n} groups")));
        }
    }
    for col in &table.columns {
        if col.name != spec.label_column && !seen.contains_key(col.name.as_str()) {
            return Err(Error::config(format!(
                "column '{}' is not assigned to any modality group",
                col.name
            )));
        }
    }

    let n = table.rows();
    let mut feature_names = Vec::new();
    let mut feature_kinds = Vec::new();
    let mut groups = Vec::new();
    let mut columns_data: Vec<Vec<f64>> = Vec::new();
    let mut categories: BTreeMap<String, Vec<String>> =
        spec.categories.cloned().unwrap_or_default();

    for g in spec.grouping {
        let start = feature_names.len();
        for cname in &g.columns {
            let col = table.column(cname).expect("validated above");
            let values = match &col.data {
                ColumnData::Continuous(v) => v
                    .iter()
                    .enumerate()
                    .map(|(r, x)| {
                        x.ok_or_else(|| {
                            Error::data(format!("column '{cname}' row {r} is missing"))
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?,
                ColumnData::Categorical(v) => {
                    let codes = categories.entry(cname.clone()).or_default();
                    let learned = spec.categories.is_none();
                    v.iter()
                        .enumerate()
                        .map(|(r, x)| {
                            let s = x.as_ref().ok_or_else(|| {
                                Error::data(format!("column '{cname}' row {r} is missing"))
                            })?;
                            Ok(match codes.iter().position(|c| c == s) {
                                Some(i) => i as f64,
                                None if learned => {
                                    codes.push(s.clone());
                                    (codes.len() - 1) as f64
                                }
                                // Category unseen at fit time: overflow bucket.
                                None => codes.len() as f64,
                            })
                        })
                        .collect::<Result<Vec<f64>>>()?
                }
            };
            feature_names.push(cname.clone());
            feature_kinds.push(col.kind());
            columns_data.push(values);
        }
        groups.push(GroupSpan {
            name: g.name.clone(),
            start,
            len: feature_names.len() - start,
        });
    }

    let d = feature_names.len();
    let mut features = Matrix::zeros(n, d);
    for (c, col) in columns_data.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            features[(r, c)] = v;
        }
    }

    Ok(Dataset {
        features,
        labels,
        feature_names,
        feature_kinds,
        groups,
        categories,
        stats: spec.stats,
    })
}

fn extract_labels(name: &str, data: &ColumnData) -> Result<Vec<u8>> {
    let parse = |r: usize, v: f64| -> Result<u8> {
        if v == 0.0 {
            Ok(0)
        } else if v == 1.0 {
            Ok(1)
        } else {
            Err(Error::data(format!(
                "label column '{name}' row {r} has non-binary value {v}"
            )))
        }
    };
    match data {
        ColumnData::Continuous(v) => v
            .iter()
            .enumerate()
            .map(|(r, x)| {
                let x = x.ok_or_else(|| {
                    Error::data(format!("label column '{name}' row {r} is missing"))
                })?;
                parse(r, x)
            })
            .collect(),
        ColumnData::Categorical(v) => v
            .iter()
            .enumerate()
            .map(|(r, x)| {
                let x = x.as_ref().ok_or_else(|| {
                    Error::data(format!("label column '{name}' row {r} is missing"))
                })?;
                x.parse::<f64>()
                    .map_err(|_| {
                        Error::data(format!(
                            "label column '{name}' row {r} has non-binary value '{x}'"
                        ))
                    })
                    .and_then(|v| parse(r, v))
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::table::Column;

    fn cont(name: &str, vals: &[f64]) -> Column {
        Column {
            name: name.into(),
            data: ColumnData::Continuous(vals.iter().map(|&v| Some(v)).collect()),
        }
    }

    fn groups(spec: &[(&str, &[&str])]) -> Vec<ModalityGroup> {
        spec.iter()
            .map(|(name, cols)| ModalityGroup {
                name: name.to_string(),
                columns: cols.iter().map(|c| c.to_string()).collect(),
            })
            .collect()
    }

    fn table_4x4() -> RawTable {
        RawTable::new(vec![
            cont("a1", &[0.1, 0.2]),
            cont("a2", &[0.3, 0.4]),
            cont("a3", &[0.5, 0.6]),
            cont("b1", &[0.7, 0.8]),
            cont("b2", &[0.9, 1.0]),
            cont("b3", &[0.11, 0.12]),
            cont("b4", &[0.13, 0.14]),
            cont("b5", &[0.15, 0.16]),
            cont("c1", &[0.17, 0.18]),
            cont("c2", &[0.19, 0.20]),
            cont("d1", &[0.21, 0.22]),
            cont("d2", &[0.23, 0.24]),
            cont("d3", &[0.25, 0.26]),
            cont("d4", &[0.27, 0.28]),
            cont("label", &[0.0, 1.0]),
        ])
        .unwrap()
    }

    #[test]
    fn padding_arithmetic_matches_widest_group() {
        let t = table_4x4();
        let g = groups(&[
            ("a", &["a1", "a2", "a3"]),
            ("b", &["b1", "b2", "b3", "b4", "b5"]),
            ("c", &["c1", "c2"]),
            ("d", &["d1", "d2", "d3", "d4"]),
        ]);
        let ds = build_sequences(
            &t,
            SequenceSpec {
                grouping: &g,
                label_column: "label",
                categories: None,
                stats: PreprocessStats::default(),
            },
        )
        .unwrap();
        assert_eq!(ds.seq_len(), 4);
        assert_eq!(ds.step_dim(), 5);
        let seq = ds.sequence(0);
        assert_eq!((seq.rows, seq.cols), (4, 5));
        // Group "c" has width 2; its padded tail reads zero.
        assert_eq!(seq[(2, 0)], 0.17);
        assert_eq!(seq[(2, 1)], 0.19);
        assert_eq!(seq[(2, 2)], 0.0);
        assert_eq!(seq[(2, 4)], 0.0);
        let mask = ds.padding_mask();
        assert_eq!(mask[(2, 1)], 1.0);
        assert_eq!(mask[(2, 2)], 0.0);
        assert_eq!(ds.labels, vec![0, 1]);
    }

    #[test]
    fn single_group_is_one_timestep() {
        let t = RawTable::new(vec![cont("x", &[1.0]), cont("label", &[1.0])]).unwrap();
        let g = groups(&[("all", &["x"])]);
        let ds = build_sequences(
            &t,
            SequenceSpec {
                grouping: &g,
                label_column: "label",
                categories: None,
                stats: PreprocessStats::default(),
            },
        )
        .unwrap();
        assert_eq!(ds.seq_len(), 1);
    }

    #[test]
    fn within_group_column_order_does_not_change_shape() {
        let t = table_4x4();
        let g1 = groups(&[("a", &["a1", "a2", "a3"]), ("rest", &["b1", "b2", "b3", "b4", "b5", "c1", "c2", "d1", "d2", "d3", "d4"])]);
        let g2 = groups(&[("a", &["a3", "a1", "a2"]), ("rest", &["b1", "b2", "b3", "b4", "b5", "c1", "c2", "d1", "d2", "d3", "d4"])]);
        let mk = |g: &[ModalityGroup]| {
            build_sequences(
                &t,
                SequenceSpec {
                    grouping: g,
                    label_column: "label",
                    categories: None,
                    stats: PreprocessStats::default(),
                },
            )
            .unwrap()
        };
        let d1 = mk(&g1);
        let d2 = mk(&g2);
        assert_eq!(d1.groups, d2.groups);
        assert_eq!(d1.labels, d2.labels);
        // Same cell set per group, reordered within it.
        let mut r1: Vec<f64> = d1.sequence(0).row(0).to_vec();
        let mut r2: Vec<f64> = d2.sequence(0).row(0).to_vec();
        r1.sort_by(|a, b| a.partial_cmp(b).unwrap());
        r2.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(r1, r2);
    }

    #[test]
    fn duplicate_and_orphan_columns_are_config_errors() {
        let t = RawTable::new(vec![cont("x", &[1.0]), cont("y", &[2.0]), cont("label", &[0.0])])
            .unwrap();
        let dup = groups(&[("g1", &["x", "y"]), ("g2", &["y"])]);
        let err = build_sequences(
            &t,
            SequenceSpec {
                grouping: &dup,
                label_column: "label",
                categories: None,
                stats: PreprocessStats::default(),
            },
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("'y'"), "{err}");

        let orphan = groups(&[("g1", &["x"])]);
        let err = build_sequences(
            &t,
            SequenceSpec {
                grouping: &orphan,
                label_column: "label",
                categories: None,
                stats: PreprocessStats::default(),
            },
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("'y'"), "{err}");
    }

    #[test]
    fn unknown_label_column_is_a_config_error() {
        let t = RawTable::new(vec![cont("x", &[1.0])]).unwrap();
        let g = groups(&[("g", &["x"])]);
        let err = build_sequences(
            &t,
            SequenceSpec {
                grouping: &g,
                label_column: "nope",
                categories: None,
                stats: PreprocessStats::default(),
            },
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("nope"));
    }

    #[test]
    fn categorical_codes_are_first_seen_and_reusable() {
        let t = RawTable::new(vec![
            Column {
                name: "c".into(),
                data: ColumnData::Categorical(vec![
                    Some("m".into()),
                    Some("f".into()),
                    Some("m".into()),
                ]),
            },
            cont("label", &[0.0, 1.0, 0.0]),
        ])
        .unwrap();
        let g = groups(&[("g", &["c"])]);
        let ds = build_sequences(
            &t,
            SequenceSpec {
                grouping: &g,
                label_column: "label",
                categories: None,
                stats: PreprocessStats::default(),
            },
        )
        .unwrap();
        assert_eq!(ds.features.data, vec![0.0, 1.0, 0.0]);
        assert_eq!(ds.categories["c"], vec!["m".to_string(), "f".to_string()]);

        // Re-encoding new data with stored categories keeps codes stable and
        // buckets unseen values past the end.
        let t2 = RawTable::new(vec![
            Column {
                name: "c".into(),
                data: ColumnData::Categorical(vec![Some("f".into()), Some("x".into())]),
            },
            cont("label", &[1.0, 0.0]),
        ])
        .unwrap();
        let ds2 = build_sequences(
            &t2,
            SequenceSpec {
                grouping: &g,
                label_column: "label",
                categories: Some(&ds.categories),
                stats: PreprocessStats::default(),
            },
        )
        .unwrap();
        assert_eq!(ds2.features.data, vec![1.0, 2.0]);
    }

    #[test]
    fn non_binary_labels_are_rejected() {
        let t = RawTable::new(vec![cont("x", &[1.0]), cont("label", &[2.0])]).unwrap();
        let g = groups(&[("g", &["x"])]);
        assert!(build_sequences(
            &t,
            SequenceSpec {
                grouping: &g,
                label_column: "label",
                categories: None,
                stats: PreprocessStats::default(),
            },
        )
        .is_err());
    }
}
