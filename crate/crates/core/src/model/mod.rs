//! The sequence classifier: BiLSTM encoder, multi-head self-attention,
//! mean pooling over timesteps, and a sigmoid output head, trained with
//! binary cross-entropy. The backward pass is derived by hand and checked
//! against central finite differences in the tests.

pub mod adam;
pub mod attention;
pub mod lstm;

pub use adam::AdamState;
pub use attention::AttentionParams;
pub use lstm::LstmParams;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{sigmoid, Matrix, SeededRng};

/// Probabilities are clamped to `[BCE_EPS, 1 - BCE_EPS]` inside the loss.
pub const BCE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub input_dim: usize,
    pub seq_len: usize,
    /// Hidden size per LSTM direction; the attention width is twice this.
    pub hidden_size: usize,
    pub num_heads: usize,
    pub head_dim: usize,
    pub dropout_rate: f64,
    pub seed: u64,
}

impl ModelConfig {
    pub fn new(
        input_dim: usize,
        seq_len: usize,
        hidden_size: usize,
        num_heads: usize,
        dropout_rate: f64,
        seed: u64,
    ) -> Result<Self> {
        let cfg = ModelConfig {
            input_dim,
            seq_len,
            hidden_size,
            num_heads,
            head_dim: attention::head_dim(2 * hidden_size, num_heads)?,
            dropout_rate,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn width(&self) -> usize {
        2 * self.hidden_size
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.seq_len == 0 || self.hidden_size == 0 {
            return Err(Error::config("model dimensions must be positive"));
        }
        if self.num_heads * self.head_dim != self.width() {
            return Err(Error::config(format!(
                "num_heads ({}) x head_dim ({}) must equal 2 x hidden_size ({})",
                self.num_heads,
                self.head_dim,
                self.width()
            )));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::config("dropout_rate must be in [0, 1)"));
        }
        Ok(())
    }
}

/// Final projection from the pooled representation to a logit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputHead {
    pub weight: Vec<f64>,
    pub bias: f64,
}

impl OutputHead {
    pub fn zeros(width: usize) -> Self {
        OutputHead {
            weight: vec![0.0; width],
            bias: 0.0,
        }
    }

    pub fn init(width: usize, rng: &mut SeededRng) -> Self {
        let bound = 1.0 / (width as f64).sqrt();
        OutputHead {
            weight: (0..width).map(|_| rng.uniform(-bound, bound).unwrap()).collect(),
            bias: 0.0,
        }
    }
}

/// All trainable weights. `attention` is absent in the ablation variants
/// that replace it with plain mean pooling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lstm: LstmParams,
    pub attention: Option<AttentionParams>,
    pub head: OutputHead,
}

impl ModelParams {
    pub fn init(cfg: &ModelConfig, with_attention: bool, rng: &mut SeededRng) -> Result<Self> {
        cfg.validate()?;
        Ok(ModelParams {
            lstm: LstmParams::init(cfg.input_dim, cfg.hidden_size, rng),
            attention: if with_attention {
                Some(AttentionParams::init(cfg.width(), cfg.num_heads, rng)?)
            } else {
                None
            },
            head: OutputHead::init(cfg.width(), rng),
        })
    }

    pub fn zeros_like(&self) -> ModelParams {
        let mut z = self.clone();
        for buf in z.buffers_mut() {
            for v in buf {
                *v = 0.0;
            }
        }
        z
    }

    /// All parameter storage in a fixed canonical order. The Adam state and
    /// the gradient structures iterate in the same order, so element i of
    /// buffer j always lines up across mirrored structures.
    pub fn buffers_mut(&mut self) -> Vec<&mut [f64]> {
        let mut bufs: Vec<&mut [f64]> = vec![
            &mut self.lstm.fwd.w_input.data,
            &mut self.lstm.fwd.w_hidden.data,
            &mut self.lstm.fwd.bias,
            &mut self.lstm.bwd.w_input.data,
            &mut self.lstm.bwd.w_hidden.data,
            &mut self.lstm.bwd.bias,
        ];
        if let Some(att) = &mut self.attention {
            for h in &mut att.heads {
                bufs.push(&mut h.w_query.data);
                bufs.push(&mut h.w_key.data);
                bufs.push(&mut h.w_value.data);
            }
            bufs.push(&mut att.w_output.data);
        }
        bufs.push(&mut self.head.weight);
        bufs.push(std::slice::from_mut(&mut self.head.bias));
        bufs
    }

    pub fn buffers(&self) -> Vec<&[f64]> {
        let mut bufs: Vec<&[f64]> = vec![
            &self.lstm.fwd.w_input.data,
            &self.lstm.fwd.w_hidden.data,
            &self.lstm.fwd.bias,
            &self.lstm.bwd.w_input.data,
            &self.lstm.bwd.w_hidden.data,
            &self.lstm.bwd.bias,
        ];
        if let Some(att) = &self.attention {
            for h in &att.heads {
                bufs.push(&h.w_query.data);
                bufs.push(&h.w_key.data);
                bufs.push(&h.w_value.data);
            }
            bufs.push(&att.w_output.data);
        }
        bufs.push(&self.head.weight);
        bufs.push(std::slice::from_ref(&self.head.bias));
        bufs
    }

    pub fn param_count(&self) -> usize {
        self.buffers().iter().map(|b| b.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.buffers().iter().all(|b| b.iter().all(|v| v.is_finite()))
    }
}

/// Intermediates of one forward pass, consumed by [`backward`]. Taking it by
/// value makes reuse of a stale cache a compile error.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    x: Matrix,
    lstm_trace: lstm::BilstmTrace,
    hseq: Matrix,
    attention: Option<attention::AttentionTrace>,
    /// Per-element inverted-dropout factors (0 or 1/(1-p)); `None` when
    /// dropout was inactive.
    dropout: Option<Vec<f64>>,
    pooled: Vec<f64>,
    pub yhat: f64,
}

/// Full forward pass: BiLSTM, attention (if present), mean pooling over
/// timesteps, then the sigmoid head. Dropout hits the attention output rows
/// only while `training` is set, with inverted scaling.
pub fn forward(
    params: &ModelParams,
    cfg: &ModelConfig,
    x: &Matrix,
    rng: &mut SeededRng,
    training: bool,
) -> Result<(f64, ForwardCache)> {
    if x.rows != cfg.seq_len || x.cols != cfg.input_dim {
        return Err(Error::shape(format!(
            "input is {}x{}, model expects {}x{}",
            x.rows, x.cols, cfg.seq_len, cfg.input_dim
        )));
    }
    let (hseq, lstm_trace) = lstm::forward(&params.lstm, x)?;

    let (mut pooled_src, attention_trace) = match &params.attention {
        Some(att) => {
            let (out, trace) = attention::forward(att, &hseq)?;
            (out, Some(trace))
        }
        None => (hseq.clone(), None),
    };

    let dropout = if training && cfg.dropout_rate > 0.0 && params.attention.is_some() {
        let keep = 1.0 - cfg.dropout_rate;
        let mask: Vec<f64> = (0..pooled_src.data.len())
            .map(|_| if rng.next_f64() < keep { 1.0 / keep } else { 0.0 })
            .collect();
        for (v, m) in pooled_src.data.iter_mut().zip(&mask) {
            *v *= m;
        }
        Some(mask)
    } else {
        None
    };

    let t = cfg.seq_len as f64;
    let mut pooled = vec![0.0; pooled_src.cols];
    for r in 0..pooled_src.rows {
        for (p, &v) in pooled.iter_mut().zip(pooled_src.row(r)) {
            *p += v / t;
        }
    }

    let z: f64 = params.head.weight.iter().zip(&pooled).map(|(w, p)| w * p).sum::<f64>()
        + params.head.bias;
    let yhat = sigmoid(z);

    Ok((
        yhat,
        ForwardCache {
            x: x.clone(),
            lstm_trace,
            hseq,
            attention: attention_trace,
            dropout,
            pooled,
            yhat,
        },
    ))
}

/// Binary cross-entropy with the prediction clamped away from 0 and 1.
pub fn bce_loss(y: u8, yhat: f64) -> f64 {
    let p = yhat.clamp(BCE_EPS, 1.0 - BCE_EPS);
    if y == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Exact gradients of `bce_loss(y, forward(...))` w.r.t. every parameter.
pub fn backward(
    params: &ModelParams,
    cfg: &ModelConfig,
    cache: ForwardCache,
    y: u8,
) -> Result<ModelParams> {
    let mut grads = params.zeros_like();
    // d loss / d logit for sigmoid + BCE.
    let dz = cache.yhat - y as f64;

    for (g, p) in grads.head.weight.iter_mut().zip(&cache.pooled) {
        *g = dz * p;
    }
    grads.head.bias = dz;

    let width = cfg.width();
    let t = cfg.seq_len as f64;
    // Mean pooling spreads the pooled gradient evenly over rows.
    let mut d_rows = Matrix::zeros(cfg.seq_len, width);
    for r in 0..cfg.seq_len {
        for (c, d) in d_rows.row_mut(r).iter_mut().enumerate() {
            *d = dz * params.head.weight[c] / t;
        }
    }
    if let Some(mask) = &cache.dropout {
        for (d, m) in d_rows.data.iter_mut().zip(mask) {
            *d *= m;
        }
    }

    let d_hseq = match (&params.attention, &cache.attention) {
        (Some(att), Some(trace)) => {
            let g_att = grads.attention.as_mut().expect("grads mirror params");
            attention::backward(att, &cache.hseq, trace, &d_rows, g_att)?
        }
        (None, None) => d_rows,
        _ => unreachable!("cache and params disagree about attention"),
    };

    lstm::backward(&params.lstm, &cache.x, &cache.lstm_trace, &d_hseq, &mut grads.lstm)?;
    Ok(grads)
}
