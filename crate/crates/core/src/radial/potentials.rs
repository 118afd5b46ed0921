use std::f64::consts::PI;

use super::{RadialWaveFunction, SpectralOps};
use crate::error::Result;

/// `V_c(r_k) = 8πa|ψ(r_k)|²`
pub fn contact_potential(psi: &RadialWaveFunction, a: f64) -> Vec<f64> {
    psi.values().iter().map(|z| 8.0 * PI * a * z.norm_sqr()).collect()
}

/// Self-consistent `1/r` potential `V_u = −2∫|ψ(r')|²/|r − r'| d³r'`.
///
/// Builds a one-shot [`SpectralOps`]; loops should keep their own instance.
pub fn monopolar_potential(psi: &RadialWaveFunction) -> Result<Vec<f64>> {
    SpectralOps::new(*psi.grid()).monopolar_potential(psi)
}
