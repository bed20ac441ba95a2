use crate::error::{Error, Result};

/// Complex vector stored as parallel real/imaginary arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVec {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexVec {
    pub fn zeros(n: usize) -> Self {
        ComplexVec {
            re: vec![0.0; n],
            im: vec![0.0; n],
        }
    }

    pub fn from_real(x: &[f64]) -> Self {
        ComplexVec {
            re: x.to_vec(),
            im: vec![0.0; x.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    /// Squared magnitude of element `i`.
    pub fn power(&self, i: usize) -> f64 {
        self.re[i] * self.re[i] + self.im[i] * self.im[i]
    }
}

/// Unnormalized forward DFT. Power-of-two lengths take the radix-2 path;
/// everything else goes through Bluestein's chirp transform, so any length
/// is exact (no zero padding of the input).
pub fn fft(x: &ComplexVec) -> Result<ComplexVec> {
    if x.is_empty() {
        return Err(Error::input("fft of empty input"));
    }
    if x.re.len() != x.im.len() {
        return Err(Error::shape("complex vector re/im length mismatch"));
    }
    let n = x.len();
    let mut out = x.clone();
    if n.is_power_of_two() {
        radix2_in_place(&mut out.re, &mut out.im, false);
    } else {
        out = bluestein(x)?;
    }
    Ok(out)
}

/// Inverse DFT via the conjugate trick, scaled by 1/N.
pub fn ifft(x: &ComplexVec) -> Result<ComplexVec> {
    let n = x.len();
    let mut conj = x.clone();
    for v in &mut conj.im {
        *v = -*v;
    }
    let mut y = fft(&conj)?;
    let scale = 1.0 / n as f64;
    for i in 0..n {
        y.re[i] *= scale;
        y.im[i] = -y.im[i] * scale;
    }
    Ok(y)
}

/// Direct O(N^2) DFT. Kept as a reference transform; the fast paths are
/// tested against it.
pub fn dft_naive(x: &ComplexVec) -> ComplexVec {
    let n = x.len();
    let mut out = ComplexVec::zeros(n);
    for k in 0..n {
        let mut sr = 0.0;
        let mut si = 0.0;
        for (j, (&re, &im)) in x.re.iter().zip(&x.im).enumerate() {
            let ang = -2.0 * std::f64::consts::PI * (k * j % n) as f64 / n as f64;
            let (s, c) = ang.sin_cos();
            sr += re * c - im * s;
            si += re * s + im * c;
        }
        out.re[k] = sr;
        out.im[k] = si;
    }
    out
}

fn radix2_in_place(re: &mut [f64], im: &mut [f64], _inverse: bool) {
    let n = re.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }
    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            re.swap(i, j);
            im.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = -2.0 * std::f64::consts::PI / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let ang = step * k as f64;
                let (ws, wc) = ang.sin_cos();
                let i = start + k;
                let j = i + half;
                let tr = re[j] * wc - im[j] * ws;
                let ti = re[j] * ws + im[j] * wc;
                re[j] = re[i] - tr;
                im[j] = im[i] - ti;
                re[i] += tr;
                im[i] += ti;
            }
        }
        len *= 2;
    }
}

/// Arbitrary-length DFT as a chirp-modulated convolution carried out with
/// power-of-two FFTs of size >= 2N-1.
fn bluestein(x: &ComplexVec) -> Result<ComplexVec> {
    let n = x.len();
    let m = (2 * n - 1).next_power_of_two();

    // Chirp w[j] = exp(-i*pi*j^2/n); j^2 reduced mod 2n exactly in integers.
    let mut chirp_re = vec![0.0; n];
    let mut chirp_im = vec![0.0; n];
    for j in 0..n {
        let sq = ((j as u128 * j as u128) % (2 * n as u128)) as f64;
        let ang = -std::f64::consts::PI * sq / n as f64;
        let (s, c) = ang.sin_cos();
        chirp_re[j] = c;
        chirp_im[j] = s;
    }

    // a[j] = x[j] * chirp[j], zero padded to m.
    let mut a = ComplexVec::zeros(m);
    for j in 0..n {
        a.re[j] = x.re[j] * chirp_re[j] - x.im[j] * chirp_im[j];
        a.im[j] = x.re[j] * chirp_im[j] + x.im[j] * chirp_re[j];
    }

    // b[j] = conj(chirp[j]) wrapped so b[m - j] = b[j].
    let mut b = ComplexVec::zeros(m);
    b.re[0] = chirp_re[0];
    b.im[0] = -chirp_im[0];
    for j in 1..n {
        b.re[j] = chirp_re[j];
        b.im[j] = -chirp_im[j];
        b.re[m - j] = b.re[j];
        b.im[m - j] = b.im[j];
    }

    radix2_in_place(&mut a.re, &mut a.im, false);
    radix2_in_place(&mut b.re, &mut b.im, false);
    for j in 0..m {
        let tr = a.re[j] * b.re[j] - a.im[j] * b.im[j];
        let ti = a.re[j] * b.im[j] + a.im[j] * b.re[j];
        a.re[j] = tr;
        a.im[j] = ti;
    }
    // Inverse of size m via conjugate trick.
    for v in a.im.iter_mut() {
        *v = -*v;
    }
    radix2_in_place(&mut a.re, &mut a.im, false);
    let scale = 1.0 / m as f64;
    let mut out = ComplexVec::zeros(n);
    for k in 0..n {
        let cr = a.re[k] * scale;
        let ci = -a.im[k] * scale;
        out.re[k] = cr * chirp_re[k] - ci * chirp_im[k];
        out.im[k] = cr * chirp_im[k] + ci * chirp_re[k];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::SeededRng;

    fn random_vec(n: usize, rng: &mut SeededRng) -> ComplexVec {
        let mut v = ComplexVec::zeros(n);
        for i in 0..n {
            v.re[i] = rng.uniform(-1.0, 1.0).unwrap();
            v.im[i] = rng.uniform(-1.0, 1.0).unwrap();
        }
        v
    }

    fn max_rel_err(a: &ComplexVec, b: &ComplexVec) -> f64 {
        let norm: f64 = (0..b.len()).map(|i| b.power(i)).sum::<f64>().sqrt();
        (0..a.len())
            .map(|i| {
                let dr = a.re[i] - b.re[i];
                let di = a.im[i] - b.im[i];
                (dr * dr + di * di).sqrt() / norm.max(1e-300)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let x = ComplexVec::from_real(&[1.0, 0.0, 0.0, 0.0]);
        let y = fft(&x).unwrap();
        for i in 0..4 {
            assert!((y.re[i] - 1.0).abs() < 1e-15);
            assert!(y.im[i].abs() < 1e-15);
        }
    }

    #[test]
    fn round_trip_recovers_input() {
        let mut rng = SeededRng::new(2);
        for n in [1usize, 2, 7, 12, 64, 100, 257] {
            let x = random_vec(n, &mut rng);
            let y = ifft(&fft(&x).unwrap()).unwrap();
            assert!(max_rel_err(&y, &x) < 1e-12, "n={n}");
        }
    }

    #[test]
    fn matches_naive_dft() {
        let mut rng = SeededRng::new(3);
        for n in [8usize, 12, 64, 100] {
            let x = random_vec(n, &mut rng);
            let fast = fft(&x).unwrap();
            let slow = dft_naive(&x);
            assert!(max_rel_err(&fast, &slow) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn parseval_energy_identity() {
        let mut rng = SeededRng::new(4);
        for n in [16usize, 48, 100] {
            let x = random_vec(n, &mut rng);
            let y = fft(&x).unwrap();
            let et: f64 = (0..n).map(|i| x.power(i)).sum();
            let ef: f64 = (0..n).map(|i| y.power(i)).sum::<f64>() / n as f64;
            assert!((et - ef).abs() / et < 1e-9, "n={n}");
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(fft(&ComplexVec::zeros(0)).is_err());
    }
}
