//! Stratified k-fold plans: every index validates exactly once, per-class
//! fold sizes differ by at most one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<Fold>,
    pub warnings: Vec<String>,
}

pub fn kfold_split(n: usize, k: usize, seed: u64, labels: &[u8]) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::config(format!("k must be at least 2, got {k}")));
    }
    if n < k {
        return Err(Error::config(format!("cannot split {n} records into {k} folds")));
    }
    if labels.len() != n {
        return Err(Error::shape(format!(
            "{} labels for {n} records",
            labels.len()
        )));
    }

    let mut rng = SeededRng::new(seed);
    let mut warnings = Vec::new();
    let mut val_sets: Vec<Vec<usize>> = vec![Vec::new(); k];
    for class in [0u8, 1u8] {
        let mut idx: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
        if idx.is_empty() {
            continue;
        }
        if idx.len() < k {
            warnings.push(format!(
                "class {class} has only {} members for {k} folds; stratification is degenerate",
                idx.len()
            ));
        }
        rng.shuffle(&mut idx);
        for (pos, i) in idx.into_iter().enumerate() {
            val_sets[pos % k].push(i);
        }
    }

    let folds = val_sets
        .into_iter()
        .map(|mut val| {
            val.sort_unstable();
            let in_val: std::collections::HashSet<usize> = val.iter().copied().collect();
            let train: Vec<usize> = (0..n).filter(|i| !in_val.contains(i)).collect();
            Fold { train, val }
        })
        .collect();

    Ok(FoldPlan {
        k,
        seed,
        folds,
        warnings,
    })
}
