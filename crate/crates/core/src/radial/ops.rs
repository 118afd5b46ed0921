use std::f64::consts::PI;

use num_complex::Complex64;

use super::{RadialGrid, RadialWaveFunction, SineTransform};
use crate::error::{Error, Result};

/// Mean-field observables of a wave function. Expectation values are taken
/// per unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub norm: f64,
    pub width: f64,
    /// `⟨T⟩ + ½⟨V_c⟩ + ½⟨V_u⟩`
    pub energy: f64,
    /// `⟨T⟩ + ⟨V_c⟩ + ⟨V_u⟩`
    pub eps: f64,
    pub kinetic: f64,
    pub contact: f64,
    pub monopolar: f64,
}

/// Sine-transform machinery bound to one grid. Owns its scratch buffers,
/// so each propagation or solver keeps its own instance.
#[derive(Debug, Clone)]
pub struct SpectralOps {
    grid: RadialGrid,
    dst: SineTransform,
    r: Vec<f64>,
    p: Vec<f64>,
    work: Vec<Complex64>,
}

impl SpectralOps {
    pub fn new(grid: RadialGrid) -> Self {
        Self {
            grid,
            dst: SineTransform::new(grid.n()),
            r: grid.radii(),
            p: grid.momenta(),
            work: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn momenta(&self) -> &[f64] {
        &self.p
    }

    pub fn transform(&mut self) -> &mut SineTransform {
        &mut self.dst
    }

    fn check(&self, psi: &RadialWaveFunction) -> Result<()> {
        if psi.grid() != &self.grid {
            return Err(Error::LengthMismatch { expected: self.grid.len(), got: psi.values().len() });
        }
        Ok(())
    }

    /// Sine coefficients `X_j` of `u = r ψ`.
    pub fn u_coefficients(&mut self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut u: Vec<Complex64> = psi.iter().zip(&self.r).map(|(v, r)| v * r).collect();
        self.dst.forward(&mut u);
        u
    }

    /// Inverse of [`Self::u_coefficients`].
    pub fn from_u_coefficients(&mut self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut u = coeffs.to_vec();
        self.dst.inverse(&mut u);
        u.iter_mut().zip(&self.r).for_each(|(v, r)| *v /= r);
        u
    }

    /// Three-dimensional Fourier transform `φ(p) = ∫ψ(r) e^{−ip·r} d³r`
    /// sampled at `p_j`: `φ(p) = (4π/p) ∫ u(r) sin(pr) dr`.
    pub fn to_momentum(&mut self, psi: &RadialWaveFunction) -> Result<Vec<Complex64>> {
        self.check(psi)?;
        let dr = self.grid.dr();
        let mut c = self.u_coefficients(psi.values());
        c.iter_mut().zip(&self.p).for_each(|(v, p)| *v *= 4.0 * PI * dr / p);
        Ok(c)
    }

    /// Inverse of [`Self::to_momentum`].
    pub fn from_momentum(&mut self, phi: &[Complex64]) -> Result<RadialWaveFunction> {
        if phi.len() != self.grid.len() {
            return Err(Error::LengthMismatch { expected: self.grid.len(), got: phi.len() });
        }
        let dr = self.grid.dr();
        let c: Vec<Complex64> = phi.iter().zip(&self.p).map(|(v, p)| v * p / (4.0 * PI * dr)).collect();
        let values = self.from_u_coefficients(&c);
        RadialWaveFunction::new(self.grid, values)
    }

    /// `‖ψ‖²` evaluated from the sine coefficients (Parseval).
    pub fn norm_sq_momentum(&mut self, psi: &RadialWaveFunction) -> Result<f64> {
        self.check(psi)?;
        let c = self.u_coefficients(psi.values());
        let n = self.grid.n() as f64;
        Ok(8.0 * PI * self.grid.dr() / n * c.iter().map(|z| z.norm_sqr()).sum::<f64>())
    }

    /// `−Δψ`, spectrally.
    pub fn minus_laplacian(&mut self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut c = self.u_coefficients(psi);
        c.iter_mut().zip(&self.p).for_each(|(v, p)| *v *= p * p);
        self.from_u_coefficients(&c)
    }

    /// `⟨ψ|−Δ|ψ⟩` (not divided by the norm).
    pub fn kinetic(&mut self, psi: &[Complex64]) -> f64 {
        let c = self.u_coefficients(psi);
        let n = self.grid.n() as f64;
        8.0 * PI * self.grid.dr() / n
            * c.iter().zip(&self.p).map(|(z, p)| p * p * z.norm_sqr()).sum::<f64>()
    }

    /// `V_u = −2∫ρ(r')/|r−r'| d³r'` for a spherically symmetric density.
    ///
    /// `χ = r Φ` obeys `χ'' = −4π r ρ`; the sine series solves it with
    /// `χ(0) = χ(r_max) = 0`, and the linear term `Q r / r_max` restores the
    /// outer value `χ(r_max) = Q`, the total charge.
    pub fn monopolar_from_density(&mut self, density: &[f64]) -> Vec<f64> {
        let dr = self.grid.dr();
        let r_max = self.grid.r_max();
        for ((w, d), r) in self.work.iter_mut().zip(density).zip(&self.r) {
            *w = Complex64::new(r * d, 0.0);
        }
        let charge = 4.0 * PI * dr * self.work.iter().zip(&self.r).map(|(w, r)| w.re * r).sum::<f64>();
        self.dst.forward(&mut self.work);
        for (w, p) in self.work.iter_mut().zip(&self.p) {
            *w *= 4.0 * PI / (p * p);
        }
        self.dst.inverse(&mut self.work);
        self.work
            .iter()
            .zip(&self.r)
            .map(|(chi, r)| -2.0 * (chi.re + charge * r / r_max) / r)
            .collect()
    }

    pub fn monopolar_potential(&mut self, psi: &RadialWaveFunction) -> Result<Vec<f64>> {
        self.check(psi)?;
        Ok(self.monopolar_from_density(&psi.density()))
    }

    pub fn observables(&mut self, psi: &RadialWaveFunction, a: f64) -> Result<Observables> {
        self.check(psi)?;
        let rho = psi.density();
        let norm = self.grid.integrate(&rho);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::ZeroNorm);
        }
        let vu = self.monopolar_from_density(&rho);
        let g = self.grid;
        let kinetic = self.kinetic(psi.values()) / norm;
        let contact = g.integrate(&rho.iter().map(|d| 8.0 * PI * a * d * d).collect::<Vec<_>>()) / norm;
        let monopolar = g.integrate(&rho.iter().zip(&vu).map(|(d, v)| d * v).collect::<Vec<_>>()) / norm;
        let r2 = g.integrate(&rho.iter().zip(&self.r).map(|(d, r)| d * r * r).collect::<Vec<_>>());
        Ok(Observables {
            norm,
            width: (r2 / norm).sqrt(),
            energy: kinetic + 0.5 * (contact + monopolar),
            eps: kinetic + contact + monopolar,
            kinetic,
            contact,
            monopolar,
        })
    }

    /// Evaluates the trigonometric interpolant of `u = rψ` at arbitrary radii
    /// and returns `ψ` there; zero outside `(0, r_max)`.
    pub fn interpolate(&mut self, psi: &[Complex64], radii: &[f64]) -> Vec<Complex64> {
        let c = self.u_coefficients(psi);
        let n = self.grid.n() as f64;
        let dp = self.grid.dp();
        let r_max = self.grid.r_max();
        radii
            .iter()
            .map(|&x| {
                if !(x > 0.0 && x < r_max) {
                    return Complex64::default();
                }
                // sin(jθ) by the three-term recurrence
                let theta = dp * x;
                let two_cos = 2.0 * theta.cos();
                let (mut s_prev, mut s) = (0.0, theta.sin());
                let mut acc = Complex64::default();
                for cj in &c {
                    acc += cj * s;
                    let next = two_cos * s - s_prev;
                    s_prev = s;
                    s = next;
                }
                acc * (2.0 / n) / x
            })
            .collect()
    }
}
