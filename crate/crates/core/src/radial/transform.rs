//! Discrete sine transform (type I) built on a complex FFT of twice the length.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// DST-I of length `m = n − 1`:
///
/// ```text
/// forward  X_j = Σ_k x_k sin(π j k / n)
/// inverse  x_k = (2/n) Σ_j X_j sin(π j k / n)
/// ```
///
/// so that `inverse(forward(x)) == x`. Internally the odd extension of
/// length `2n` goes through one complex FFT; when `n` is a power of two so
/// is the FFT.
pub struct SineTransform {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for SineTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SineTransform").field("len", &(self.n - 1)).finish()
    }
}

impl Clone for SineTransform {
    fn clone(&self) -> Self {
        Self {
            n: self.n,
            fft: Arc::clone(&self.fft),
            buf: vec![Complex64::default(); 2 * self.n],
            scratch: vec![Complex64::default(); self.scratch.len()],
        }
    }
}

impl SineTransform {
    /// Transform for `n − 1` samples (`n ≥ 2`).
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "sine transform needs n >= 2");
        let fft = FftPlanner::new().plan_fft_forward(2 * n);
        let scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        Self { n, fft, buf: vec![Complex64::default(); 2 * n], scratch }
    }

    /// Number of samples transformed.
    pub fn len(&self) -> usize {
        self.n - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn transform(&mut self, data: &mut [Complex64], dir: Direction) -> Result<()> {
        if data.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: data.len() });
        }
        match dir {
            Direction::Forward => self.forward(data),
            Direction::Inverse => self.inverse(data),
        }
        Ok(())
    }

    /// In-place forward transform. Panics on a length mismatch.
    pub fn forward(&mut self, data: &mut [Complex64]) {
        self.apply(data, 0.5);
    }

    /// In-place inverse transform. Panics on a length mismatch.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        self.apply(data, 1.0 / self.n as f64);
    }

    fn apply(&mut self, data: &mut [Complex64], scale: f64) {
        let n = self.n;
        assert_eq!(data.len(), n - 1);
        self.buf[0] = Complex64::default();
        self.buf[n] = Complex64::default();
        for (k, &x) in data.iter().enumerate() {
            self.buf[k + 1] = x;
            self.buf[2 * n - 1 - k] = -x;
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        // Y_j = −2i Σ x_k sin(π j k/n)  ⇒  X_j = (i/2) Y_j
        let f = Complex64::new(0.0, scale);
        for (j, x) in data.iter_mut().enumerate() {
            *x = self.buf[j + 1] * f;
        }
    }

    /// Forward transform of real data.
    pub fn forward_real(&mut self, data: &[f64]) -> Vec<f64> {
        let mut c: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&mut c);
        c.into_iter().map(|z| z.re).collect()
    }

    /// Inverse transform of real data.
    pub fn inverse_real(&mut self, data: &[f64]) -> Vec<f64> {
        let mut c: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.inverse(&mut c);
        c.into_iter().map(|z| z.re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn naive(x: &[Complex64], n: usize) -> Vec<Complex64> {
        (1..n)
            .map(|j| {
                x.iter()
                    .enumerate()
                    .map(|(k, &v)| v * (PI * j as f64 * (k + 1) as f64 / n as f64).sin())
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_direct_sum() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for n in [2usize, 3, 8, 17, 64] {
            let x: Vec<Complex64> =
                (0..n - 1).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
            let mut y = x.clone();
            SineTransform::new(n).forward(&mut y);
            for (a, b) in y.iter().zip(naive(&x, n)) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trip_and_length_check() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let mut t = SineTransform::new(1024);
        let x: Vec<Complex64> = (0..1023).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        let mut y = x.clone();
        t.transform(&mut y, Direction::Forward).unwrap();
        t.transform(&mut y, Direction::Inverse).unwrap();
        let err = x.iter().zip(&y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        let mut short = vec![Complex64::default(); 10];
        assert!(matches!(
            t.transform(&mut short, Direction::Forward),
            Err(Error::LengthMismatch { expected: 1023, got: 10 })
        ));
    }

    #[test]
    fn linearity() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        let mut t = SineTransform::new(128);
        let f: Vec<f64> = (0..127).map(|_| rng.gen()).collect();
        let g: Vec<f64> = (0..127).map(|_| rng.gen()).collect();
        let (a, b) = (2.5, -0.75);
        let mix: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let tf = t.forward_real(&f);
        let tg = t.forward_real(&g);
        let tm = t.forward_real(&mix);
        for k in 0..127 {
            assert!((tm[k] - (a * tf[k] + b * tg[k])).abs() < 1e-12);
        }
    }
}
