//! Raw tabular data: CSV loading with explicit missing markers, median/mode
//! imputation, z-score outlier row removal, and min-max normalization with
//! stats retained for unseen data.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnKind {
    Continuous,
    Categorical,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Continuous(Vec<Option<f64>>),
    Categorical(Vec<Option<String>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

impl Column {
    pub fn kind(&self) -> ColumnKind {
        match self.data {
            ColumnData::Continuous(_) => ColumnKind::Continuous,
            ColumnData::Categorical(_) => ColumnKind::Categorical,
        }
    }

    pub fn len(&self) -> usize {
        match &self.data {
            ColumnData::Continuous(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn missing_count(&self) -> usize {
        match &self.data {
            ColumnData::Continuous(v) => v.iter().filter(|c| c.is_none()).count(),
            ColumnData::Categorical(v) => v.iter().filter(|c| c.is_none()).count(),
        }
    }
}

/// Rectangular table with per-column kind and explicit missing markers.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub columns: Vec<Column>,
    rows: usize,
}

impl RawTable {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let rows = columns.first().map_or(0, Column::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::data("columns have unequal lengths"));
        }
        Ok(RawTable { columns, rows })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    fn retain_rows(&self, keep: &[bool]) -> RawTable {
        let filter_opt = |v: &[Option<f64>]| -> Vec<Option<f64>> {
            v.iter().zip(keep).filter(|(_, &k)| k).map(|(c, _)| *c).collect()
        };
        let filter_cat = |v: &[Option<String>]| -> Vec<Option<String>> {
            v.iter().zip(keep).filter(|(_, &k)| k).map(|(c, _)| c.clone()).collect()
        };
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                data: match &c.data {
                    ColumnData::Continuous(v) => ColumnData::Continuous(filter_opt(v)),
                    ColumnData::Categorical(v) => ColumnData::Categorical(filter_cat(v)),
                },
            })
            .collect();
        RawTable::new(columns).expect("filtered columns stay rectangular")
    }
}

/// Options for CSV parsing. Column kinds are inferred (continuous when every
/// non-missing cell parses as a number) unless pinned in `kinds`.
#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    /// Cell text treated as missing, besides the empty cell.
    pub missing_token: Option<String>,
    pub kinds: BTreeMap<String, ColumnKind>,
}

pub fn load_csv(path: &Path, opts: &CsvOptions) -> Result<RawTable> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Input(format!("cannot open {}: {e}", path.display())))?;
    parse_csv(std::io::BufReader::new(file), opts)
}

pub fn parse_csv<R: BufRead>(reader: R, opts: &CsvOptions) -> Result<RawTable> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(Error::Parse { line: 1, msg: "missing header row".into() }),
    };
    let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let width = names.len();

    let mut cells: Vec<Vec<Option<String>>> = vec![Vec::new(); width];
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected {width} fields, found {}", fields.len()),
            });
        }
        for (c, field) in fields.iter().enumerate() {
            let v = field.trim();
            let missing =
                v.is_empty() || opts.missing_token.as_deref().is_some_and(|t| t == v);
            cells[c].push(if missing { None } else { Some(v.to_string()) });
        }
    }

    let columns = names
        .into_iter()
        .zip(cells)
        .map(|(name, raw)| {
            let kind = opts.kinds.get(&name).copied().unwrap_or_else(|| {
                let all_numeric = raw
                    .iter()
                    .flatten()
                    .all(|v| v.parse::<f64>().is_ok());
                if all_numeric {
                    ColumnKind::Continuous
                } else {
                    ColumnKind::Categorical
                }
            });
            let data = match kind {
                ColumnKind::Continuous => {
                    let mut vals = Vec::with_capacity(raw.len());
                    for (r, cell) in raw.iter().enumerate() {
                        match cell {
                            None => vals.push(None),
                            Some(s) => match s.parse::<f64>() {
                                Ok(v) => vals.push(Some(v)),
                                Err(_) => {
                                    return Err(Error::Parse {
                                        line: r + 2,
                                        msg: format!("column '{name}': '{s}' is not numeric"),
                                    })
                                }
                            },
                        }
                    }
                    ColumnData::Continuous(vals)
                }
                ColumnKind::Categorical => ColumnData::Categorical(raw),
            };
            Ok(Column { name, data })
        })
        .collect::<Result<Vec<_>>>()?;
    RawTable::new(columns)
}

pub fn write_csv(table: &RawTable, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&table.column_names().join(","));
    out.push('\n');
    for r in 0..table.rows() {
        let row: Vec<String> = table
            .columns
            .iter()
            .map(|c| match &c.data {
                ColumnData::Continuous(v) => {
                    v[r].map(crate::util::format_f64).unwrap_or_default()
                }
                ColumnData::Categorical(v) => v[r].clone().unwrap_or_default(),
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Continuous gaps get the column median; categorical gaps get the column
/// mode, ties broken by first appearance.
pub fn impute(table: &RawTable) -> Result<RawTable> {
    let columns = table
        .columns
        .iter()
        .map(|c| {
            let data = match &c.data {
                ColumnData::Continuous(v) => {
                    let mut present: Vec<f64> = v.iter().flatten().copied().collect();
                    if present.is_empty() {
                        return Err(Error::data(format!(
                            "column '{}' has no observed values to impute from",
                            c.name
                        )));
                    }
                    present.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    let fill = median(&present);
                    ColumnData::Continuous(v.iter().map(|x| x.or(Some(fill))).collect())
                }
                ColumnData::Categorical(v) => {
                    let fill = mode_first_seen(v).ok_or_else(|| {
                        Error::data(format!(
                            "column '{}' has no observed values to impute from",
                            c.name
                        ))
                    })?;
                    ColumnData::Categorical(
                        v.iter().map(|x| x.clone().or(Some(fill.clone()))).collect(),
                    )
                }
            };
            Ok(Column { name: c.name.clone(), data })
        })
        .collect::<Result<Vec<_>>>()?;
    RawTable::new(columns)
}

fn mode_first_seen(values: &[Option<String>]) -> Option<String> {
    let mut order: Vec<&String> = Vec::new();
    let mut counts: BTreeMap<&String, usize> = BTreeMap::new();
    for v in values.iter().flatten() {
        if !counts.contains_key(v) {
            order.push(v);
        }
        *counts.entry(v).or_insert(0) += 1;
    }
    // Strict comparison keeps the first-seen value on ties.
    let mut best: Option<(&String, usize)> = None;
    for v in order {
        let c = counts[v];
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((v, c));
        }
    }
    best.map(|(v, _)| v.clone())
}

/// Removes every row where some continuous column's z-score strictly exceeds
/// 3 in magnitude. The z-score uses the column's mean and population standard
/// deviation over all rows; zero-variance columns never trigger removal.
/// Returns the filtered table and the removed row indices.
pub fn filter_outliers(table: &RawTable) -> Result<(RawTable, Vec<usize>)> {
    let n = table.rows();
    let mut keep = vec![true; n];
    for c in &table.columns {
        if let ColumnData::Continuous(v) = &c.data {
            if v.iter().any(Option::is_none) {
                return Err(Error::data(format!(
                    "column '{}' still has missing values; impute before filtering",
                    c.name
                )));
            }
            let vals: Vec<f64> = v.iter().map(|x| x.unwrap()).collect();
            let mean = vals.iter().sum::<f64>() / n as f64;
            let var = vals.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
            let sd = var.sqrt();
            if sd == 0.0 {
                continue;
            }
            for (r, x) in vals.iter().enumerate() {
                if ((x - mean) / sd).abs() > 3.0 {
                    keep[r] = false;
                }
            }
        }
    }
    let removed: Vec<usize> = keep
        .iter()
        .enumerate()
        .filter(|(_, &k)| !k)
        .map(|(i, _)| i)
        .collect();
    Ok((table.retain_rows(&keep), removed))
}

/// Per-column min/max captured at fit time, reusable on unseen data.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub min_max: BTreeMap<String, (f64, f64)>,
}

impl NormStats {
    /// Applies stored ranges, clamping results into [0, 1]; columns without
    /// stored stats are left untouched.
    pub fn apply(&self, table: &RawTable) -> RawTable {
        let columns = table
            .columns
            .iter()
            .map(|c| {
                let data = match (&c.data, self.min_max.get(&c.name)) {
                    (ColumnData::Continuous(v), Some(&(lo, hi))) => ColumnData::Continuous(
                        v.iter()
                            .map(|x| x.map(|x| scale_into_unit(x, lo, hi)))
                            .collect(),
                    ),
                    (d, _) => d.clone(),
                };
                Column { name: c.name.clone(), data }
            })
            .collect();
        RawTable::new(columns).expect("shape preserved")
    }
}

fn scale_into_unit(x: f64, lo: f64, hi: f64) -> f64 {
    if hi == lo {
        0.0
    } else {
        ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
    }
}

/// Scales every continuous column into [0, 1] by its own min/max; constant
/// columns map to 0.
pub fn normalize_minmax(table: &RawTable) -> Result<(RawTable, NormStats)> {
    let mut stats = NormStats::default();
    for c in &table.columns {
        if let ColumnData::Continuous(v) = &c.data {
            if v.iter().any(Option::is_none) {
                return Err(Error::data(format!(
                    "column '{}' still has missing values; impute before normalizing",
                    c.name
                )));
            }
            let lo = v.iter().map(|x| x.unwrap()).fold(f64::INFINITY, f64::min);
            let hi = v.iter().map(|x| x.unwrap()).fold(f64::NEG_INFINITY, f64::max);
            stats.min_max.insert(c.name.clone(), (lo, hi));
        }
    }
    Ok((stats.apply(table), stats))
}

/// Which preprocessing stages to run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessConfig {
    pub impute: bool,
    pub outlier_filter: bool,
    pub normalize: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            impute: true,
            outlier_filter: true,
            normalize: true,
        }
    }
}

/// Everything needed to replay the fitted preprocessing on unseen data.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PreprocessStats {
    pub medians: BTreeMap<String, f64>,
    pub modes: BTreeMap<String, String>,
    pub norm: NormStats,
    pub removed_rows: Vec<usize>,
}

/// Runs imputation, outlier filtering, and normalization in that order,
/// per the enabled stages, and captures the fitted statistics.
pub fn preprocess(table: &RawTable, cfg: &PreprocessConfig) -> Result<(RawTable, PreprocessStats)> {
    let mut stats = PreprocessStats::default();
    let mut t = table.clone();
    if cfg.impute {
        t = impute(&t)?;
        for c in &t.columns {
            match &c.data {
                ColumnData::Continuous(v) => {
                    let mut vals: Vec<f64> = v.iter().flatten().copied().collect();
                    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    if !vals.is_empty() {
                        stats.medians.insert(c.name.clone(), median(&vals));
                    }
                }
                ColumnData::Categorical(v) => {
                    if let Some(m) = mode_first_seen(v) {
                        stats.modes.insert(c.name.clone(), m);
                    }
                }
            }
        }
    }
    if cfg.outlier_filter {
        let (filtered, removed) = filter_outliers(&t)?;
        t = filtered;
        stats.removed_rows = removed;
    }
    if cfg.normalize {
        let (normed, norm) = normalize_minmax(&t)?;
        t = normed;
        stats.norm = norm;
    }
    Ok((t, stats))
}

/// Replays fitted preprocessing on unseen data: impute with the stored
/// medians/modes, normalize with the stored ranges (clamped). Rows are never
/// removed here.
pub fn apply_preprocessing(table: &RawTable, stats: &PreprocessStats) -> Result<RawTable> {
    let columns = table
        .columns
        .iter()
        .map(|c| {
            let data = match &c.data {
                ColumnData::Continuous(v) => {
                    let fill = stats.medians.get(&c.name);
                    ColumnData::Continuous(
                        v.iter()
                            .map(|x| match (x, fill) {
                                (Some(v), _) => Ok(Some(*v)),
                                (None, Some(&f)) => Ok(Some(f)),
                                (None, None) => Err(Error::data(format!(
                                    "column '{}' has a missing value and no stored median",
                                    c.name
                                ))),
                            })
                            .collect::<Result<_>>()?,
                    )
                }
                ColumnData::Categorical(v) => {
                    let fill = stats.modes.get(&c.name);
                    ColumnData::Categorical(
                        v.iter()
                            .map(|x| match (x, fill) {
                                (Some(v), _) => Ok(Some(v.clone())),
                                (None, Some(f)) => Ok(Some(f.clone())),
                                (None, None) => Err(Error::data(format!(
                                    "column '{}' has a missing value and no stored mode",
                                    c.name
                                ))),
                            })
                            .collect::<Result<_>>()?,
                    )
                }
            };
            Ok(Column { name: c.name.clone(), data })
        })
        .collect::<Result<Vec<_>>>()?;
    let t = RawTable::new(columns)?;
    Ok(stats.norm.apply(&t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn cont(name: &str, vals: &[Option<f64>]) -> Column {
        Column {
            name: name.into(),
            data: ColumnData::Continuous(vals.to_vec()),
        }
    }

    fn cat(name: &str, vals: &[Option<&str>]) -> Column {
        Column {
            name: name.into(),
            data: ColumnData::Categorical(vals.iter().map(|v| v.map(String::from)).collect()),
        }
    }

    #[test]
    fn csv_parses_missing_cells() {
        let data = "a,b,label\n1.0,x,0\n,y,1\n3.0,,0\n";
        let t = parse_csv(Cursor::new(data), &CsvOptions::default()).unwrap();
        assert_eq!(t.rows(), 3);
        assert_eq!(t.column("a").unwrap().missing_count(), 1);
        assert_eq!(t.column("b").unwrap().missing_count(), 1);
        assert_eq!(t.column("a").unwrap().kind(), ColumnKind::Continuous);
        assert_eq!(t.column("b").unwrap().kind(), ColumnKind::Categorical);
    }

    #[test]
    fn csv_missing_token() {
        let data = "a\nNA\n2\n";
        let opts = CsvOptions {
            missing_token: Some("NA".into()),
            ..Default::default()
        };
        let t = parse_csv(Cursor::new(data), &opts).unwrap();
        assert_eq!(t.column("a").unwrap().missing_count(), 1);
    }

    #[test]
    fn header_only_file_is_a_valid_empty_table() {
        let t = parse_csv(Cursor::new("a,b\n"), &CsvOptions::default()).unwrap();
        assert_eq!(t.rows(), 0);
        assert_eq!(t.columns.len(), 2);
    }

    #[test]
    fn ragged_row_reports_line_number() {
        let err = parse_csv(Cursor::new("a,b\n1,2\n3\n"), &CsvOptions::default()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn csv_round_trip_preserves_values() {
        let dir = std::env::temp_dir().join("sigmode_table_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("round_trip.csv");
        let t = RawTable::new(vec![
            cont("a", &[Some(0.1), Some(-3.5e-9), Some(2.0f64.sqrt())]),
            cat("b", &[Some("x"), None, Some("z")]),
        ])
        .unwrap();
        write_csv(&t, &path).unwrap();
        let back = load_csv(&path, &CsvOptions::default()).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn impute_median_of_two() {
        let t = RawTable::new(vec![cont("x", &[Some(1.0), None, Some(3.0)])]).unwrap();
        let fixed = impute(&t).unwrap();
        match &fixed.column("x").unwrap().data {
            ColumnData::Continuous(v) => assert_eq!(v, &vec![Some(1.0), Some(2.0), Some(3.0)]),
            _ => unreachable!(),
        }
    }

    #[test]
    fn impute_mode_breaks_ties_by_first_seen() {
        let t = RawTable::new(vec![cat("c", &[Some("b"), Some("a"), Some("a"), Some("b"), None])])
            .unwrap();
        let fixed = impute(&t).unwrap();
        match &fixed.column("c").unwrap().data {
            ColumnData::Categorical(v) => assert_eq!(v[4].as_deref(), Some("b")),
            _ => unreachable!(),
        }

        let t = RawTable::new(vec![cat("c", &[Some("a"), Some("a"), Some("b"), None])]).unwrap();
        let fixed = impute(&t).unwrap();
        match &fixed.column("c").unwrap().data {
            ColumnData::Categorical(v) => assert_eq!(v[3].as_deref(), Some("a")),
            _ => unreachable!(),
        }
    }

    #[test]
    fn impute_without_missing_is_identity() {
        let t = RawTable::new(vec![cont("x", &[Some(5.0), Some(6.0)])]).unwrap();
        assert_eq!(impute(&t).unwrap(), t);
    }

    #[test]
    fn impute_rejects_fully_missing_column() {
        let t = RawTable::new(vec![cont("ghost", &[None, None])]).unwrap();
        let err = impute(&t).unwrap_err().to_string();
        assert!(err.contains("ghost"));
    }

    #[test]
    fn outlier_removal_uses_population_z_over_all_rows() {
        // Twelve zeros and a 100: z = sqrt(12) = 3.46 > 3, so the last row
        // goes. A lone spike among only five rows can never exceed |z| = 3
        // against full-column stats (max possible is sqrt(n-1) = 2), so that
        // case is kept.
        let mut vals = vec![Some(0.0); 12];
        vals.push(Some(100.0));
        let t = RawTable::new(vec![cont("x", &vals)]).unwrap();
        let (filtered, removed) = filter_outliers(&t).unwrap();
        assert_eq!(removed, vec![12]);
        assert_eq!(filtered.rows(), 12);

        let t5 = RawTable::new(vec![cont("x", &[Some(0.0), Some(0.0), Some(0.0), Some(0.0), Some(100.0)])]).unwrap();
        let (_, removed) = filter_outliers(&t5).unwrap();
        assert!(removed.is_empty(), "max |z| is 2.0 for a 5-row single spike");
    }

    #[test]
    fn outlier_zero_variance_never_triggers() {
        let t = RawTable::new(vec![cont("x", &[Some(7.0); 6])]).unwrap();
        let (_, removed) = filter_outliers(&t).unwrap();
        assert!(removed.is_empty());
    }

    #[test]
    fn outlier_boundary_exactly_three_is_retained() {
        // A single spike among n-1 zeros has z = sqrt(n-1) regardless of its
        // size; with n = 10 that is exactly 3.0, and every intermediate
        // (mean 1, sd 3, deviation 9) is exact in binary floating point.
        let mut vals = vec![Some(0.0); 9];
        vals.push(Some(10.0));
        let t = RawTable::new(vec![cont("x", &vals)]).unwrap();
        let (_, removed) = filter_outliers(&t).unwrap();
        assert!(removed.is_empty(), "strict inequality keeps |z| = 3");
    }

    #[test]
    fn normalize_scales_to_unit_interval() {
        let t = RawTable::new(vec![cont("x", &[Some(2.0), Some(4.0), Some(6.0)])]).unwrap();
        let (normed, stats) = normalize_minmax(&t).unwrap();
        match &normed.column("x").unwrap().data {
            ColumnData::Continuous(v) => {
                assert_eq!(v, &vec![Some(0.0), Some(0.5), Some(1.0)])
            }
            _ => unreachable!(),
        }
        assert_eq!(stats.min_max["x"], (2.0, 6.0));
    }

    #[test]
    fn normalize_constant_column_maps_to_zero() {
        let t = RawTable::new(vec![cont("x", &[Some(7.0), Some(7.0)])]).unwrap();
        let (normed, _) = normalize_minmax(&t).unwrap();
        match &normed.column("x").unwrap().data {
            ColumnData::Continuous(v) => assert_eq!(v, &vec![Some(0.0), Some(0.0)]),
            _ => unreachable!(),
        }
    }

    #[test]
    fn stored_stats_clamp_unseen_values() {
        let t = RawTable::new(vec![cont("x", &[Some(2.0), Some(6.0)])]).unwrap();
        let (_, stats) = normalize_minmax(&t).unwrap();
        let unseen = RawTable::new(vec![cont("x", &[Some(1.0), Some(8.0), Some(4.0)])]).unwrap();
        let applied = stats.apply(&unseen);
        match &applied.column("x").unwrap().data {
            ColumnData::Continuous(v) => {
                assert_eq!(v, &vec![Some(0.0), Some(1.0), Some(0.5)])
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn normalize_is_idempotent_with_stored_stats() {
        let t = RawTable::new(vec![cont("x", &[Some(-1.0), Some(0.5), Some(9.0)])]).unwrap();
        let (normed, _) = normalize_minmax(&t).unwrap();
        let (again, _) = normalize_minmax(&normed).unwrap();
        for (a, b) in normed
            .columns
            .iter()
            .zip(&again.columns)
        {
            if let (ColumnData::Continuous(x), ColumnData::Continuous(y)) = (&a.data, &b.data) {
                for (p, q) in x.iter().zip(y) {
                    assert!((p.unwrap() - q.unwrap()).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn preprocess_pipeline_runs_in_order() {
        let mut vals: Vec<Option<f64>> = (0..12).map(|i| Some(i as f64 * 0.1)).collect();
        vals.push(None);
        vals.push(Some(1000.0));
        let t = RawTable::new(vec![cont("x", &vals)]).unwrap();
        let (clean, stats) = preprocess(&t, &PreprocessConfig::default()).unwrap();
        assert_eq!(stats.removed_rows, vec![13]);
        assert_eq!(clean.rows(), 13);
        match &clean.column("x").unwrap().data {
            ColumnData::Continuous(v) => {
                assert!(v.iter().all(|x| (0.0..=1.0).contains(&x.unwrap())))
            }
            _ => unreachable!(),
        }
    }
}
