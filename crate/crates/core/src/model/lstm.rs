//! Bidirectional LSTM with hand-derived backpropagation through time.
//!
//! Gate layout: the four gate blocks are stacked row-wise in the order
//! input, forget, candidate, output, so `w_input` is `4H x d`, `w_hidden`
//! is `4H x H`, and `bias` has length `4H`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{sigmoid, Matrix, SeededRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionParams {
    pub w_input: Matrix,
    pub w_hidden: Matrix,
    pub bias: Vec<f64>,
}

impl DirectionParams {
    pub fn zeros(input_dim: usize, hidden: usize) -> Self {
        DirectionParams {
            w_input: Matrix::zeros(4 * hidden, input_dim),
            w_hidden: Matrix::zeros(4 * hidden, hidden),
            bias: vec![0.0; 4 * hidden],
        }
    }

    /// Weights uniform in +-1/sqrt(H); forget-gate bias 1.0, others 0.
    pub fn init(input_dim: usize, hidden: usize, rng: &mut SeededRng) -> Self {
        let bound = 1.0 / (hidden as f64).sqrt();
        let mut p = DirectionParams {
            w_input: Matrix::random_uniform(4 * hidden, input_dim, -bound, bound, rng),
            w_hidden: Matrix::random_uniform(4 * hidden, hidden, -bound, bound, rng),
            bias: vec![0.0; 4 * hidden],
        };
        for b in &mut p.bias[hidden..2 * hidden] {
            *b = 1.0;
        }
        p
    }

    pub fn hidden_size(&self) -> usize {
        self.w_hidden.cols
    }

    pub fn input_dim(&self) -> usize {
        self.w_input.cols
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub fwd: DirectionParams,
    pub bwd: DirectionParams,
}

impl LstmParams {
    pub fn zeros(input_dim: usize, hidden: usize) -> Self {
        LstmParams {
            fwd: DirectionParams::zeros(input_dim, hidden),
            bwd: DirectionParams::zeros(input_dim, hidden),
        }
    }

    pub fn init(input_dim: usize, hidden: usize, rng: &mut SeededRng) -> Self {
        LstmParams {
            fwd: DirectionParams::init(input_dim, hidden, rng),
            bwd: DirectionParams::init(input_dim, hidden, rng),
        }
    }
}

/// Per-step activations retained for the backward pass.
#[derive(Debug, Clone)]
pub struct StepTrace {
    pub gate_i: Vec<f64>,
    pub gate_f: Vec<f64>,
    pub gate_g: Vec<f64>,
    pub gate_o: Vec<f64>,
    pub cell: Vec<f64>,
    pub cell_tanh: Vec<f64>,
    pub hidden: Vec<f64>,
}

/// Trace of one direction, indexed by processing order (step 0 is the first
/// step that direction consumed).
#[derive(Debug, Clone)]
pub struct DirectionTrace {
    pub steps: Vec<StepTrace>,
}

#[derive(Debug, Clone)]
pub struct BilstmTrace {
    pub fwd: DirectionTrace,
    pub bwd: DirectionTrace,
}

fn step(
    p: &DirectionParams,
    x_t: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
) -> Result<StepTrace> {
    let hidden = p.hidden_size();
    let mut z = p.w_input.matvec(x_t)?;
    let zh = p.w_hidden.matvec(h_prev)?;
    for (a, (b, c)) in z.iter_mut().zip(zh.iter().zip(&p.bias)) {
        *a += b + c;
    }
    let mut t = StepTrace {
        gate_i: vec![0.0; hidden],
        gate_f: vec![0.0; hidden],
        gate_g: vec![0.0; hidden],
        gate_o: vec![0.0; hidden],
        cell: vec![0.0; hidden],
        cell_tanh: vec![0.0; hidden],
        hidden: vec![0.0; hidden],
    };
    for j in 0..hidden {
        t.gate_i[j] = sigmoid(z[j]);
        t.gate_f[j] = sigmoid(z[hidden + j]);
        t.gate_g[j] = z[2 * hidden + j].tanh();
        t.gate_o[j] = sigmoid(z[3 * hidden + j]);
        t.cell[j] = t.gate_f[j] * c_prev[j] + t.gate_i[j] * t.gate_g[j];
        t.cell_tanh[j] = t.cell[j].tanh();
        t.hidden[j] = t.gate_o[j] * t.cell_tanh[j];
    }
    Ok(t)
}

fn run_direction(p: &DirectionParams, x: &Matrix, reverse: bool) -> Result<DirectionTrace> {
    let hidden = p.hidden_size();
    let seq_len = x.rows;
    let mut steps = Vec::with_capacity(seq_len);
    let mut h = vec![0.0; hidden];
    let mut c = vec![0.0; hidden];
    for i in 0..seq_len {
        let t = if reverse { seq_len - 1 - i } else { i };
        let trace = step(p, x.row(t), &h, &c)?;
        h = trace.hidden.clone();
        c = trace.cell.clone();
        steps.push(trace);
    }
    Ok(DirectionTrace { steps })
}

/// Runs both directions over `x` (`T x d`) and returns the per-step
/// concatenation `[h_fwd_t ; h_bwd_t]` as a `T x 2H` matrix plus the trace.
pub fn forward(p: &LstmParams, x: &Matrix) -> Result<(Matrix, BilstmTrace)> {
    let hidden = p.fwd.hidden_size();
    if x.cols != p.fwd.input_dim() {
        return Err(Error::shape(format!(
            "input has {} columns, lstm expects {}",
            x.cols,
            p.fwd.input_dim()
        )));
    }
    if !x.is_finite() {
        return Err(Error::input("lstm input contains non-finite values"));
    }
    let fwd = run_direction(&p.fwd, x, false)?;
    let bwd = run_direction(&p.bwd, x, true)?;
    let seq_len = x.rows;
    let mut out = Matrix::zeros(seq_len, 2 * hidden);
    for t in 0..seq_len {
        out.row_mut(t)[..hidden].copy_from_slice(&fwd.steps[t].hidden);
        // bwd step i processed input row seq_len-1-i, so input row t is step
        // seq_len-1-t.
        out.row_mut(t)[hidden..].copy_from_slice(&bwd.steps[seq_len - 1 - t].hidden);
    }
    Ok((out, BilstmTrace { fwd, bwd }))
}

fn backward_direction(
    p: &DirectionParams,
    x: &Matrix,
    trace: &DirectionTrace,
    d_hidden_by_step: &[Vec<f64>],
    reverse: bool,
    grad: &mut DirectionParams,
) -> Result<()> {
    let hidden = p.hidden_size();
    let seq_len = x.rows;
    let zeros = vec![0.0; hidden];
    let mut dh_next = vec![0.0; hidden];
    let mut dc_next = vec![0.0; hidden];
    for i in (0..seq_len).rev() {
        let t = if reverse { seq_len - 1 - i } else { i };
        let s = &trace.steps[i];
        let (h_prev, c_prev) = if i == 0 {
            (&zeros, &zeros)
        } else {
            (&trace.steps[i - 1].hidden, &trace.steps[i - 1].cell)
        };
        let mut dz = vec![0.0; 4 * hidden];
        let mut dc = vec![0.0; hidden];
        for j in 0..hidden {
            let dh = d_hidden_by_step[i][j] + dh_next[j];
            let d_o = dh * s.cell_tanh[j];
            dc[j] = dh * s.gate_o[j] * (1.0 - s.cell_tanh[j] * s.cell_tanh[j]) + dc_next[j];
            let d_i = dc[j] * s.gate_g[j];
            let d_g = dc[j] * s.gate_i[j];
            let d_f = dc[j] * c_prev[j];
            dz[j] = d_i * s.gate_i[j] * (1.0 - s.gate_i[j]);
            dz[hidden + j] = d_f * s.gate_f[j] * (1.0 - s.gate_f[j]);
            dz[2 * hidden + j] = d_g * (1.0 - s.gate_g[j] * s.gate_g[j]);
            dz[3 * hidden + j] = d_o * s.gate_o[j] * (1.0 - s.gate_o[j]);
        }
        grad.w_input.add_outer(&dz, x.row(t));
        grad.w_hidden.add_outer(&dz, h_prev);
        for (b, d) in grad.bias.iter_mut().zip(&dz) {
            *b += d;
        }
        dh_next = p.w_hidden.matvec_transposed(&dz)?;
        for j in 0..hidden {
            dc_next[j] = dc[j] * s.gate_f[j];
        }
    }
    Ok(())
}

/// Backpropagates `d_out` (`T x 2H`, gradient w.r.t. the concatenated hidden
/// states) through both directions, accumulating into `grad`.
pub fn backward(
    p: &LstmParams,
    x: &Matrix,
    trace: &BilstmTrace,
    d_out: &Matrix,
    grad: &mut LstmParams,
) -> Result<()> {
    let hidden = p.fwd.hidden_size();
    let seq_len = x.rows;
    // Upstream gradient rows are indexed by input position; re-index to each
    // direction's processing order.
    let d_fwd: Vec<Vec<f64>> = (0..seq_len).map(|t| d_out.row(t)[..hidden].to_vec()).collect();
    let d_bwd: Vec<Vec<f64>> = (0..seq_len)
        .map(|i| d_out.row(seq_len - 1 - i)[hidden..].to_vec())
        .collect();
    backward_direction(&p.fwd, x, &trace.fwd, &d_fwd, false, &mut grad.fwd)?;
    backward_direction(&p.bwd, x, &trace.bwd, &d_bwd, true, &mut grad.bwd)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent scalar-loop oracle: one LSTM direction written with raw
    /// index arithmetic and no Matrix helpers.
    fn scalar_lstm(p: &DirectionParams, x: &Matrix, reverse: bool) -> Vec<Vec<f64>> {
        let hh = p.hidden_size();
        let d = p.input_dim();
        let n = x.rows;
        let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
        let mut h = vec![0.0; hh];
        let mut c = vec![0.0; hh];
        let mut out = vec![vec![0.0; hh]; n];
        for i in 0..n {
            let t = if reverse { n - 1 - i } else { i };
            let mut hn = vec![0.0; hh];
            let mut cn = vec![0.0; hh];
            for j in 0..hh {
                let mut zi = p.bias[j];
                let mut zf = p.bias[hh + j];
                let mut zg = p.bias[2 * hh + j];
                let mut zo = p.bias[3 * hh + j];
                for k in 0..d {
                    zi += p.w_input.data[j * d + k] * x.data[t * d + k];
                    zf += p.w_input.data[(hh + j) * d + k] * x.data[t * d + k];
                    zg += p.w_input.data[(2 * hh + j) * d + k] * x.data[t * d + k];
                    zo += p.w_input.data[(3 * hh + j) * d + k] * x.data[t * d + k];
                }
                for k in 0..hh {
                    zi += p.w_hidden.data[j * hh + k] * h[k];
                    zf += p.w_hidden.data[(hh + j) * hh + k] * h[k];
                    zg += p.w_hidden.data[(2 * hh + j) * hh + k] * h[k];
                    zo += p.w_hidden.data[(3 * hh + j) * hh + k] * h[k];
                }
                cn[j] = sig(zf) * c[j] + sig(zi) * zg.tanh();
                hn[j] = sig(zo) * cn[j].tanh();
            }
            h = hn;
            c = cn;
            out[t] = h.clone();
        }
        out
    }

    #[test]
    fn zero_params_give_zero_states() {
        let p = LstmParams::zeros(3, 4);
        let x = Matrix::from_rows(&[vec![1.0, -2.0, 0.5], vec![0.3, 0.0, 9.0]]);
        let (out, _) = forward(&p, &x).unwrap();
        assert!(out.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_step_sequence_has_width_2h() {
        let mut rng = SeededRng::new(8);
        let p = LstmParams::init(2, 5, &mut rng);
        let x = Matrix::from_rows(&[vec![0.4, -0.1]]);
        let (out, _) = forward(&p, &x).unwrap();
        assert_eq!((out.rows, out.cols), (1, 10));
        // Both directions see the same single input row with zero state.
        let f = scalar_lstm(&p.fwd, &x, false);
        let b = scalar_lstm(&p.bwd, &x, true);
        for j in 0..5 {
            assert!((out[(0, j)] - f[0][j]).abs() < 1e-12);
            assert!((out[(0, 5 + j)] - b[0][j]).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_scalar_loop_oracle() {
        let mut rng = SeededRng::new(21);
        let p = LstmParams::init(2, 4, &mut rng);
        let x = Matrix::random_uniform(3, 2, -1.0, 1.0, &mut rng);
        let (out, _) = forward(&p, &x).unwrap();
        let f = scalar_lstm(&p.fwd, &x, false);
        let b = scalar_lstm(&p.bwd, &x, true);
        for t in 0..3 {
            for j in 0..4 {
                assert!((out[(t, j)] - f[t][j]).abs() < 1e-12);
                assert!((out[(t, 4 + j)] - b[t][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let p = LstmParams::zeros(3, 4);
        let x = Matrix::zeros(2, 5);
        assert!(forward(&p, &x).is_err());
    }

    #[test]
    fn forget_bias_initialized_to_one() {
        let mut rng = SeededRng::new(1);
        let p = DirectionParams::init(2, 3, &mut rng);
        assert!(p.bias[..3].iter().all(|&b| b == 0.0));
        assert!(p.bias[3..6].iter().all(|&b| b == 1.0));
        assert!(p.bias[6..].iter().all(|&b| b == 0.0));
        let bound = 1.0 / 3.0f64.sqrt();
        assert!(p.w_input.data.iter().all(|&w| w.abs() <= bound));
    }
}
