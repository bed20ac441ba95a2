//! Dense matrix/vector arithmetic, a complex FFT, a seeded RNG, and
//! numerically stable activations. Everything downstream builds on this.

mod fft;
mod matrix;
mod rng;

pub use fft::{dft_naive, fft, ifft, ComplexVec};
pub use matrix::Matrix;
pub use rng::SeededRng;

/// Numerically stable logistic sigmoid.
///
/// Output is clamped into `[f64::MIN_POSITIVE, 1 - 2^-53]` so it is strictly
/// inside (0, 1) even for arguments far out in either tail.
pub fn sigmoid(x: f64) -> f64 {
    let s = if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    };
    s.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// Row-wise softmax with per-row max subtraction.
pub fn softmax_rows(m: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(m.rows, m.cols);
    for r in 0..m.rows {
        let row = m.row(r);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for (c, &v) in row.iter().enumerate() {
            let e = (v - max).exp();
            out[(r, c)] = e;
            sum += e;
        }
        for c in 0..m.cols {
            out[(r, c)] /= sum;
        }
    }
    out
}
