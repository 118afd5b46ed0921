//! Spherically symmetric wave functions on an equidistant radial grid.
//!
//! A grid of `n` intervals on `[0, r_max]` carries the `n − 1` interior
//! samples `r_k = k·dr`. The reduced function `u = r ψ` vanishes at both
//! ends, so the radial Laplacian `Δψ = u''/r` is diagonal in the sine
//! basis with eigenvalues `−p_j²`, `p_j = jπ/r_max`. All integrals use the
//! trapezoid rule, which on this grid is the plain sum `4π dr Σ r_k² f_k`.

mod io;
mod ops;
mod potentials;
mod states;
mod transform;

pub use io::{read_snapshot, write_snapshot, Snapshot};
pub use ops::{Observables, SpectralOps};
pub use potentials::{contact_potential, monopolar_potential};
pub use states::{deform, gaussian_state};
pub use transform::{Direction, SineTransform};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Default number of grid intervals.
pub const DEFAULT_POINTS: usize = 1024;
/// Default outer radius.
pub const DEFAULT_R_MAX: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    n: usize,
    dr: f64,
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self::new(DEFAULT_POINTS, DEFAULT_R_MAX).expect("valid defaults")
    }
}

impl RadialGrid {
    /// `n` intervals on `[0, r_max]`. Powers of two give the fastest transforms.
    pub fn new(n: usize, r_max: f64) -> Result<Self> {
        if n < 4 {
            return Err(domain(format!("grid needs at least 4 intervals, got {n}")));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(domain(format!("r_max must be positive, got {r_max}")));
        }
        Ok(Self { n, dr: r_max / n as f64 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored samples, `n − 1`.
    pub fn len(&self) -> usize {
        self.n - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn r_max(&self) -> f64 {
        self.n as f64 * self.dr
    }

    pub fn dp(&self) -> f64 {
        PI / self.r_max()
    }

    pub fn p_max(&self) -> f64 {
        self.len() as f64 * self.dp()
    }

    pub fn radius(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.dr
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.radius(k)).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        let dp = self.dp();
        (1..self.n).map(|j| j as f64 * dp).collect()
    }

    /// `4π dr Σ r_k² f_k`
    pub fn integrate(&self, f: &[f64]) -> f64 {
        4.0 * PI * self.dr * f.iter().enumerate().map(|(k, v)| self.radius(k).powi(2) * v).sum::<f64>()
    }
}

/// Complex samples `ψ(r_k)` of a spherically symmetric wave function.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialWaveFunction {
    grid: RadialGrid,
    values: Vec<Complex64>,
}

impl RadialWaveFunction {
    pub fn new(grid: RadialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.radii().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn from_real(grid: RadialGrid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `‖ψ‖² = 4π Σ |ψ_k|² r_k² dr`
    pub fn norm_sq(&self) -> f64 {
        self.grid.integrate(&self.density())
    }

    /// `√⟨r²⟩`
    pub fn width(&self) -> f64 {
        let rho = self.density();
        let r2: Vec<f64> =
            rho.iter().enumerate().map(|(k, d)| d * self.grid.radius(k).powi(2)).collect();
        (self.grid.integrate(&r2) / self.grid.integrate(&rho)).sqrt()
    }

    /// Largest |ψ| over the outermost `count` samples relative to max |ψ|.
    pub fn edge_ratio(&self, count: usize) -> f64 {
        edge_ratio(&self.values, count)
    }

    pub fn scale(&mut self, c: f64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }

    /// L² distance `‖ψ − φ‖`.
    pub fn distance(&self, other: &RadialWaveFunction) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(Error::LengthMismatch { expected: self.values.len(), got: other.values.len() });
        }
        let d: Vec<f64> =
            self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).collect();
        Ok(self.grid.integrate(&d).sqrt())
    }
}

pub(crate) fn edge_ratio(values: &[Complex64], count: usize) -> f64 {
    let max = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let edge = values.iter().rev().take(count).map(|z| z.norm()).fold(0.0, f64::max);
    edge / max
}
