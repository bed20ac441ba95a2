//! Variational mode decomposition: splits a 1-D signal into K band-limited
//! components by alternating Wiener-filter mode updates and power-weighted
//! center-frequency updates in the frequency domain, with optional dual
//! ascent on the reconstruction constraint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{fft, ifft, ComplexVec, SeededRng};

/// Shortest signal accepted for decomposition.
pub const MIN_SIGNAL_LEN: usize = 8;

/// Seed for the `Random` frequency initialization, fixed so that even the
/// random scheme is reproducible.
const RANDOM_INIT_SEED: u64 = 0x564d44;

/// A real-valued 1-D series.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub samples: Vec<f64>,
}

impl Signal {
    pub fn new(samples: Vec<f64>) -> Self {
        Signal { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn validate_for_decomposition(&self) -> Result<()> {
        if self.len() < MIN_SIGNAL_LEN {
            return Err(Error::input(format!(
                "signal too short for decomposition: {} samples, need at least {MIN_SIGNAL_LEN}",
                self.len()
            )));
        }
        if !self.samples.iter().all(|v| v.is_finite()) {
            return Err(Error::input("signal contains non-finite samples"));
        }
        Ok(())
    }
}

/// How the K center frequencies start out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitScheme {
    /// All frequencies at zero.
    Zero,
    /// Frequency k (1-based) at (k - 0.5) / (2K).
    UniformSpread,
    /// Log-uniform draws in (1/N, 0.5), sorted. Seeded by a fixed constant.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VmdConfig {
    pub k_modes: usize,
    /// Bandwidth penalty; larger values give narrower modes.
    pub alpha: f64,
    /// Dual-ascent step enforcing the reconstruction constraint. Zero
    /// disables it, which tolerates noise but leaves a Wiener residual that
    /// the modes never absorb.
    pub tau: f64,
    /// Convergence threshold on the summed relative change of the modes.
    pub tol: f64,
    pub max_iter: usize,
    pub init: InitScheme,
}

impl Default for VmdConfig {
    fn default() -> Self {
        VmdConfig {
            k_modes: 3,
            alpha: 2000.0,
            tau: 0.5,
            tol: 1e-8,
            max_iter: 500,
            init: InitScheme::UniformSpread,
        }
    }
}

impl VmdConfig {
    pub fn with_modes(k: usize) -> Self {
        VmdConfig {
            k_modes: k,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k_modes < 1 {
            return Err(Error::config("k_modes must be at least 1"));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::config("alpha must be positive"));
        }
        if self.tau < 0.0 {
            return Err(Error::config("tau must be non-negative"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::config("tol must be positive"));
        }
        if self.max_iter < 1 {
            return Err(Error::config("max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// Result of a decomposition: K modes of the original length plus their
/// center frequencies in normalized cycles/sample, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub modes: Vec<Vec<f64>>,
    pub center_freqs: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
}

impl ModeSet {
    pub fn k(&self) -> usize {
        self.modes.len()
    }

    pub fn signal_len(&self) -> usize {
        self.modes.first().map_or(0, Vec::len)
    }
}

/// One-sided spectrum workspace: bins 0..half carry frequencies i/T.
struct HalfSpectrum {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl HalfSpectrum {
    fn zeros(n: usize) -> Self {
        HalfSpectrum {
            re: vec![0.0; n],
            im: vec![0.0; n],
        }
    }
}

/// Decompose `x` into `cfg.k_modes` band-limited modes.
///
/// The signal is mirror-extended by half its length on each side before the
/// transform and cropped back afterwards, which suppresses edge artifacts.
pub fn decompose(x: &Signal, cfg: &VmdConfig) -> Result<ModeSet> {
    cfg.validate()?;
    x.validate_for_decomposition()?;
    let n = x.len();
    let k_modes = cfg.k_modes;
    if k_modes > n / 2 {
        return Err(Error::input(format!(
            "more modes than resolvable bands: K={k_modes} with {n} samples (max {})",
            n / 2
        )));
    }

    // Mirror extension to length 2N: reversed first half, signal, reversed
    // second half.
    let left = n.div_ceil(2);
    let mut extended = Vec::with_capacity(2 * n);
    extended.extend(x.samples[..left].iter().rev());
    extended.extend_from_slice(&x.samples);
    extended.extend(x.samples[left..].iter().rev());
    let t = extended.len();
    let half = t / 2;

    let spectrum = fft(&ComplexVec::from_real(&extended))?;
    let mut f_plus = HalfSpectrum::zeros(half);
    f_plus.re.copy_from_slice(&spectrum.re[..half]);
    f_plus.im.copy_from_slice(&spectrum.im[..half]);

    let freqs: Vec<f64> = (0..half).map(|i| i as f64 / t as f64).collect();
    let mut omega = init_frequencies(cfg, n)?;

    let mut modes: Vec<HalfSpectrum> = (0..k_modes).map(|_| HalfSpectrum::zeros(half)).collect();
    let mut total = HalfSpectrum::zeros(half);
    let mut lambda = HalfSpectrum::zeros(half);

    let mut converged = false;
    let mut iterations_used = 0;
    for _ in 0..cfg.max_iter {
        let mut change = 0.0;
        for k in 0..k_modes {
            let omega_k = omega[k];
            let mut delta_energy = 0.0;
            let mut old_energy = 0.0;
            let mut freq_weighted = 0.0;
            let mut power_total = 0.0;
            for i in 0..half {
                // Wiener filter on the residual left by the other modes.
                let num_re = f_plus.re[i] - (total.re[i] - modes[k].re[i]) - lambda.re[i] / 2.0;
                let num_im = f_plus.im[i] - (total.im[i] - modes[k].im[i]) - lambda.im[i] / 2.0;
                let df = freqs[i] - omega_k;
                let den = 1.0 + cfg.alpha * df * df;
                let new_re = num_re / den;
                let new_im = num_im / den;

                let old_re = modes[k].re[i];
                let old_im = modes[k].im[i];
                let dr = new_re - old_re;
                let di = new_im - old_im;
                delta_energy += dr * dr + di * di;
                old_energy += old_re * old_re + old_im * old_im;

                total.re[i] += dr;
                total.im[i] += di;
                modes[k].re[i] = new_re;
                modes[k].im[i] = new_im;

                let p = new_re * new_re + new_im * new_im;
                freq_weighted += freqs[i] * p;
                power_total += p;
            }
            change += delta_energy / (old_energy + f64::EPSILON);
            // Power-weighted centroid; an all-zero mode keeps its frequency.
            if power_total > 0.0 {
                omega[k] = freq_weighted / power_total;
            }
        }
        if cfg.tau > 0.0 {
            for i in 0..half {
                lambda.re[i] += cfg.tau * (total.re[i] - f_plus.re[i]);
                lambda.im[i] += cfg.tau * (total.im[i] - f_plus.im[i]);
            }
        }
        iterations_used += 1;
        if change <= cfg.tol {
            converged = true;
            break;
        }
    }

    // Back to the time domain: rebuild the full Hermitian spectrum per mode,
    // invert, and crop the mirror padding.
    let mut time_modes = Vec::with_capacity(k_modes);
    for spec in &modes {
        let mut full = ComplexVec::zeros(t);
        full.re[..half].copy_from_slice(&spec.re);
        full.im[..half].copy_from_slice(&spec.im);
        for i in 1..half {
            full.re[t - i] = spec.re[i];
            full.im[t - i] = -spec.im[i];
        }
        let restored = ifft(&full)?;
        time_modes.push(restored.re[left..left + n].to_vec());
    }

    let mut order: Vec<usize> = (0..k_modes).collect();
    order.sort_by(|&a, &b| omega[a].partial_cmp(&omega[b]).expect("finite frequencies"));
    let modes = order.iter().map(|&i| std::mem::take(&mut time_modes[i])).collect();
    let center_freqs = order.iter().map(|&i| omega[i]).collect();

    Ok(ModeSet {
        modes,
        center_freqs,
        iterations_used,
        converged,
    })
}

fn init_frequencies(cfg: &VmdConfig, n: usize) -> Result<Vec<f64>> {
    let k_modes = cfg.k_modes;
    Ok(match cfg.init {
        InitScheme::Zero => vec![0.0; k_modes],
        InitScheme::UniformSpread => (0..k_modes)
            .map(|k| (k as f64 + 0.5) / (2.0 * k_modes as f64))
            .collect(),
        InitScheme::Random => {
            let mut rng = SeededRng::new(RANDOM_INIT_SEED);
            let lo = (1.0 / n as f64).ln();
            let hi = 0.5f64.ln();
            let mut draws: Vec<f64> = (0..k_modes)
                .map(|_| (lo + (hi - lo) * rng.next_f64()).exp())
                .collect();
            draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
            draws
        }
    })
}

/// Element-wise sum of all modes.
pub fn reconstruct(set: &ModeSet) -> Signal {
    let len = set.signal_len();
    let mut out = vec![0.0; len];
    for mode in &set.modes {
        for (o, &v) in out.iter_mut().zip(mode) {
            *o += v;
        }
    }
    Signal::new(out)
}

/// Which dataset columns get decomposed, and how.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeatureSpec {
    pub columns: Vec<String>,
    pub config: VmdConfig,
}

/// Replaces each selected continuous column with K mode-value columns.
///
/// The decomposition axis depends on the column's modality group: when the
/// group is wide enough (>= [`MIN_SIGNAL_LEN`] columns) each record's
/// within-group value sequence is the signal and the column contributes its
/// position's mode values; otherwise the column itself, read across records
/// in index order, is the signal.
pub fn features(
    data: &crate::pipeline::Dataset,
    columns: &[String],
    cfg: &VmdConfig,
) -> Result<crate::pipeline::Dataset> {
    use crate::pipeline::dataset::GroupSpan;
    use crate::pipeline::table::ColumnKind;

    if columns.is_empty() {
        return Ok(data.clone());
    }
    let mut selected = vec![false; data.feature_names.len()];
    for name in columns {
        let idx = data
            .feature_index(name)
            .ok_or_else(|| Error::config(format!("unknown column '{name}'")))?;
        if data.feature_kinds[idx] != ColumnKind::Continuous {
            return Err(Error::input(format!(
                "column '{name}' is categorical; decomposition needs continuous values"
            )));
        }
        selected[idx] = true;
    }

    let n = data.records();
    let k_modes = cfg.k_modes;
    let mut names = Vec::new();
    let mut kinds = Vec::new();
    let mut groups = Vec::new();
    let mut new_columns: Vec<Vec<f64>> = Vec::new();

    for g in &data.groups {
        let span_start = names.len();
        // Per-record decompositions are shared by every selected column of
        // the group.
        let mut record_modes: Option<Vec<ModeSet>> = None;
        if g.len >= MIN_SIGNAL_LEN && (g.start..g.start + g.len).any(|c| selected[c]) {
            let sets = (0..n)
                .map(|r| {
                    let row = data.features.row(r);
                    decompose(&Signal::new(row[g.start..g.start + g.len].to_vec()), cfg)
                })
                .collect::<Result<Vec<_>>>()?;
            record_modes = Some(sets);
        }
        for c in g.start..g.start + g.len {
            if !selected[c] {
                names.push(data.feature_names[c].clone());
                kinds.push(data.feature_kinds[c]);
                new_columns.push((0..n).map(|r| data.features[(r, c)]).collect());
                continue;
            }
            let position_in_group = c - g.start;
            let mode_values: Vec<Vec<f64>> = match &record_modes {
                Some(sets) => (0..k_modes)
                    .map(|k| (0..n).map(|r| sets[r].modes[k][position_in_group]).collect())
                    .collect(),
                None => {
                    let column: Vec<f64> = (0..n).map(|r| data.features[(r, c)]).collect();
                    let set = decompose(&Signal::new(column), cfg)?;
                    set.modes
                }
            };
            for (k, vals) in mode_values.into_iter().enumerate() {
                names.push(format!("{}_mode{}", data.feature_names[c], k + 1));
                kinds.push(ColumnKind::Continuous);
                new_columns.push(vals);
            }
        }
        groups.push(GroupSpan {
            name: g.name.clone(),
            start: span_start,
            len: names.len() - span_start,
        });
    }

    let d = names.len();
    let mut features = crate::math::Matrix::zeros(n, d);
    for (c, col) in new_columns.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            features[(r, c)] = v;
        }
    }
    Ok(crate::pipeline::Dataset {
        features,
        labels: data.labels.clone(),
        feature_names: names,
        feature_kinds: kinds,
        groups,
        categories: data.categories.clone(),
        stats: data.stats.clone(),
    })
}
