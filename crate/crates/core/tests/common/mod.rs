//! Reference solutions built without the crate's transform or shooting code.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// DST-I of length `n − 1` through a `2n` FFT of the odd extension.
pub struct OracleDst {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl OracleDst {
    pub fn new(n: usize) -> Self {
        Self { n, fft: FftPlanner::new().plan_fft_forward(2 * n) }
    }

    /// `X_j = Σ_k x_k sin(π j k / n)`, `j, k = 1 … n − 1`.
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![Complex64::default(); 2 * n];
        for k in 1..n {
            y[k] = Complex64::new(x[k - 1], 0.0);
            y[2 * n - k] = Complex64::new(-x[k - 1], 0.0);
        }
        self.fft.process(&mut y);
        (1..n).map(|j| -0.5 * y[j].im).collect()
    }

    pub fn inverse(&self, c: &[f64]) -> Vec<f64> {
        let s = 2.0 / self.n as f64;
        self.forward(c).into_iter().map(|v| v * s).collect()
    }
}

/// Ground state by normalized gradient flow in imaginary time,
/// preconditioned by the free propagator:
/// `ψ̃ = ψ − τ (1 − τΔ)⁻¹ (H[ψ] − ε)ψ` with `ε = ⟨ψ|H[ψ]|ψ⟩`,
/// then `ψ ← ψ̃ / ‖ψ̃‖`.
pub struct ImaginaryTime {
    pub n: usize,
    pub r_max: f64,
    pub tau: f64,
    pub tol: f64,
    pub max_iter: usize,
}

pub struct OracleState {
    pub r: Vec<f64>,
    pub psi: Vec<f64>,
    pub eps: f64,
    pub iterations: usize,
}

impl ImaginaryTime {
    pub fn new(n: usize, r_max: f64) -> Self {
        Self { n, r_max, tau: 0.5, tol: 1e-14, max_iter: 200_000 }
    }

    fn radii(&self) -> Vec<f64> {
        let dr = self.r_max / self.n as f64;
        (1..self.n).map(|k| k as f64 * dr).collect()
    }

    fn momenta(&self) -> Vec<f64> {
        (1..self.n).map(|j| j as f64 * PI / self.r_max).collect()
    }

    fn norm_sq(&self, r: &[f64], psi: &[f64]) -> f64 {
        let dr = self.r_max / self.n as f64;
        4.0 * PI * dr * psi.iter().zip(r).map(|(p, r)| p * p * r * r).sum::<f64>()
    }

    /// `−2∫ρ/|r−r'|` from the sine-series solution of `χ'' = −4π r ρ`.
    pub fn monopolar(&self, dst: &OracleDst, r: &[f64], p: &[f64], rho: &[f64]) -> Vec<f64> {
        let dr = self.r_max / self.n as f64;
        let q = 4.0 * PI * dr * rho.iter().zip(r).map(|(d, r)| d * r * r).sum::<f64>();
        let src: Vec<f64> = rho.iter().zip(r).map(|(d, r)| d * r).collect();
        let c: Vec<f64> = dst.forward(&src).iter().zip(p).map(|(c, p)| 4.0 * PI * c / (p * p)).collect();
        let chi = dst.inverse(&c);
        chi.iter().zip(r).map(|(x, r)| -2.0 * (x + q * r / self.r_max) / r).collect()
    }

    fn potential(&self, dst: &OracleDst, r: &[f64], p: &[f64], psi: &[f64], a: f64) -> Vec<f64> {
        let rho: Vec<f64> = psi.iter().map(|v| v * v).collect();
        let vu = self.monopolar(dst, r, p, &rho);
        rho.iter().zip(&vu).map(|(d, u)| 8.0 * PI * a * d + u).collect()
    }

    /// `−Δψ` through the sine series of `rψ`.
    fn laplacian(&self, dst: &OracleDst, r: &[f64], p: &[f64], psi: &[f64]) -> Vec<f64> {
        let u: Vec<f64> = psi.iter().zip(r).map(|(v, r)| v * r).collect();
        let c: Vec<f64> = dst.forward(&u).iter().zip(p).map(|(c, p)| c * p * p).collect();
        dst.inverse(&c).iter().zip(r).map(|(v, r)| v / r).collect()
    }

    pub fn solve(&self, a: f64) -> OracleState {
        let dst = OracleDst::new(self.n);
        let r = self.radii();
        let p = self.momenta();
        let mut psi: Vec<f64> = r.iter().map(|r| (-0.1 * r * r).exp()).collect();
        let s = self.norm_sq(&r, &psi).sqrt();
        psi.iter_mut().for_each(|v| *v /= s);
        let mut iterations = 0;
        let dr = self.r_max / self.n as f64;
        let mut eps = 0.0;
        for it in 0..self.max_iter {
            iterations = it + 1;
            let lap = self.laplacian(&dst, &r, &p, &psi);
            let v = self.potential(&dst, &r, &p, &psi, a);
            let h: Vec<f64> = psi.iter().zip(&lap).zip(&v).map(|((y, l), v)| l + v * y).collect();
            eps = 4.0 * PI * dr * h.iter().zip(&psi).zip(&r).map(|((h, y), r)| h * y * r * r).sum::<f64>();
            let u: Vec<f64> = h.iter().zip(&psi).zip(&r).map(|((h, y), r)| (h - eps * y) * r).collect();
            let c: Vec<f64> = dst.forward(&u).iter().zip(&p).map(|(c, p)| c / (1.0 + self.tau * p * p)).collect();
            let step: Vec<f64> = dst.inverse(&c).iter().zip(&r).map(|(v, r)| v / r).collect();
            let mut next: Vec<f64> = psi.iter().zip(&step).map(|(y, s)| y - self.tau * s).collect();
            let s = self.norm_sq(&r, &next).sqrt();
            next.iter_mut().for_each(|v| *v /= s);
            let change = next.iter().zip(&psi).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            psi = next;
            if change < self.tol {
                break;
            }
        }
        OracleState { r, psi, eps, iterations }
    }
}

/// `‖f − g‖` with the radial trapezoid weight.
pub fn l2_distance(r: &[f64], f: &[f64], g: &[f64]) -> f64 {
    let dr = r[0];
    (4.0 * PI * dr * f.iter().zip(g).zip(r).map(|((x, y), r)| (x - y).powi(2) * r * r).sum::<f64>()).sqrt()
}

/// Slope and `R²` of the least-squares line through `(x, y)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxy / sxx, sxy * sxy / (sxx * syy))
}

/// Times of local maxima of a sampled signal, refined by a parabola
/// through each peak and its neighbours.
pub fn peak_times(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 1..y.len().saturating_sub(1) {
        if y[k] > y[k - 1] && y[k] >= y[k + 1] {
            let (a, b, c) = (y[k - 1], y[k], y[k + 1]);
            let denom = a - 2.0 * b + c;
            let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            out.push(t[k] + shift * (t[k + 1] - t[k]));
        }
    }
    out
}
