//! Multi-head scaled dot-product self-attention over the BiLSTM outputs,
//! with the exact softmax Jacobian in the backward pass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{softmax_rows, Matrix, SeededRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadParams {
    pub w_query: Matrix,
    pub w_key: Matrix,
    pub w_value: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttentionParams {
    /// Per-head projections, each `width x head_dim`.
    pub heads: Vec<HeadParams>,
    /// Output projection, `width x width` where width = num_heads * head_dim.
    pub w_output: Matrix,
}

impl AttentionParams {
    pub fn zeros(width: usize, num_heads: usize) -> Result<Self> {
        let head_dim = head_dim(width, num_heads)?;
        Ok(AttentionParams {
            heads: (0..num_heads)
                .map(|_| HeadParams {
                    w_query: Matrix::zeros(width, head_dim),
                    w_key: Matrix::zeros(width, head_dim),
                    w_value: Matrix::zeros(width, head_dim),
                })
                .collect(),
            w_output: Matrix::zeros(width, width),
        })
    }

    pub fn init(width: usize, num_heads: usize, rng: &mut SeededRng) -> Result<Self> {
        let head_dim = head_dim(width, num_heads)?;
        let bound = 1.0 / (width as f64).sqrt();
        Ok(AttentionParams {
            heads: (0..num_heads)
                .map(|_| HeadParams {
                    w_query: Matrix::random_uniform(width, head_dim, -bound, bound, rng),
                    w_key: Matrix::random_uniform(width, head_dim, -bound, bound, rng),
                    w_value: Matrix::random_uniform(width, head_dim, -bound, bound, rng),
                })
                .collect(),
            w_output: Matrix::random_uniform(width, width, -bound, bound, rng),
        })
    }

    pub fn width(&self) -> usize {
        self.w_output.rows
    }

    pub fn head_dim(&self) -> usize {
        self.heads[0].w_query.cols
    }
}

pub fn head_dim(width: usize, num_heads: usize) -> Result<usize> {
    if num_heads == 0 || !width.is_multiple_of(num_heads) {
        return Err(Error::config(format!(
            "attention width {width} is not divisible by {num_heads} heads"
        )));
    }
    Ok(width / num_heads)
}

#[derive(Debug, Clone)]
pub struct HeadTrace {
    pub queries: Matrix,
    pub keys: Matrix,
    pub values: Matrix,
    /// Row-stochastic attention weights, `T x T`.
    pub weights: Matrix,
}

#[derive(Debug, Clone)]
pub struct AttentionTrace {
    pub heads: Vec<HeadTrace>,
    /// Concatenated head outputs before the output projection, `T x width`.
    pub concat: Matrix,
}

/// Forward pass: per head project, scale by 1/sqrt(d_k), row-softmax, weight
/// the values; concatenate heads and apply the output projection.
pub fn forward(p: &AttentionParams, hseq: &Matrix) -> Result<(Matrix, AttentionTrace)> {
    let width = p.width();
    if hseq.cols != width {
        return Err(Error::shape(format!(
            "attention expects width {width}, got {}",
            hseq.cols
        )));
    }
    let dk = p.head_dim();
    let scale = 1.0 / (dk as f64).sqrt();
    let seq_len = hseq.rows;
    let mut concat = Matrix::zeros(seq_len, width);
    let mut traces = Vec::with_capacity(p.heads.len());
    for (h, head) in p.heads.iter().enumerate() {
        let queries = hseq.matmul(&head.w_query)?;
        let keys = hseq.matmul(&head.w_key)?;
        let values = hseq.matmul(&head.w_value)?;
        let mut logits = queries.matmul(&keys.transpose())?;
        logits.scale(scale);
        let weights = softmax_rows(&logits);
        let head_out = weights.matmul(&values)?;
        for t in 0..seq_len {
            concat.row_mut(t)[h * dk..(h + 1) * dk].copy_from_slice(head_out.row(t));
        }
        traces.push(HeadTrace {
            queries,
            keys,
            values,
            weights,
        });
    }
    let out = concat.matmul(&p.w_output)?;
    Ok((
        out,
        AttentionTrace {
            heads: traces,
            concat,
        },
    ))
}

/// Backward pass. `d_out` is the gradient w.r.t. the projected output;
/// returns the gradient w.r.t. `hseq` and accumulates parameter gradients
/// into `grad`.
pub fn backward(
    p: &AttentionParams,
    hseq: &Matrix,
    trace: &AttentionTrace,
    d_out: &Matrix,
    grad: &mut AttentionParams,
) -> Result<Matrix> {
    let dk = p.head_dim();
    let scale = 1.0 / (dk as f64).sqrt();
    let seq_len = hseq.rows;

    grad.w_output.add_assign(&trace.concat.transpose().matmul(d_out)?);
    let d_concat = d_out.matmul(&p.w_output.transpose())?;

    let mut d_hseq = Matrix::zeros(seq_len, hseq.cols);
    for (h, (head, ht)) in p.heads.iter().zip(&trace.heads).enumerate() {
        let mut d_head = Matrix::zeros(seq_len, dk);
        for t in 0..seq_len {
            d_head.row_mut(t).copy_from_slice(&d_concat.row(t)[h * dk..(h + 1) * dk]);
        }

        let d_weights = d_head.matmul(&ht.values.transpose())?;
        let d_values = ht.weights.transpose().matmul(&d_head)?;

        // Softmax Jacobian per row: ds_j = a_j * (dw_j - sum_k dw_k a_k),
        // then the 1/sqrt(d_k) logit scaling.
        let mut d_logits = Matrix::zeros(seq_len, seq_len);
        for r in 0..seq_len {
            let a = ht.weights.row(r);
            let dw = d_weights.row(r);
            let inner: f64 = a.iter().zip(dw).map(|(x, y)| x * y).sum();
            for c in 0..seq_len {
                d_logits[(r, c)] = a[c] * (dw[c] - inner) * scale;
            }
        }

        let d_queries = d_logits.matmul(&ht.keys)?;
        let d_keys = d_logits.transpose().matmul(&ht.queries)?;

        grad.heads[h].w_query.add_assign(&hseq.transpose().matmul(&d_queries)?);
        grad.heads[h].w_key.add_assign(&hseq.transpose().matmul(&d_keys)?);
        grad.heads[h].w_value.add_assign(&hseq.transpose().matmul(&d_values)?);

        d_hseq.add_assign(&d_queries.matmul(&head.w_query.transpose())?);
        d_hseq.add_assign(&d_keys.matmul(&head.w_key.transpose())?);
        d_hseq.add_assign(&d_values.matmul(&head.w_value.transpose())?);
    }
    Ok(d_hseq)
}
