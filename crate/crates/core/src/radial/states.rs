use num_complex::Complex64;

use super::{RadialGrid, RadialWaveFunction, SpectralOps};
use crate::error::{domain, Result};
use crate::variational::gamma_i_of;

/// Samples `exp(i(A r² + γ))`. With `normalize`, `γ = i γ_i(A_i)` makes the
/// state unit-norm; otherwise `γ = 0` and `ψ(0) = 1`.
pub fn gaussian_state(grid: RadialGrid, a: Complex64, normalize: bool) -> Result<RadialWaveFunction> {
    if !(a.im > 0.0 && a.re.is_finite() && a.im.is_finite()) {
        return Err(domain(format!("Gaussian needs Im A > 0, got {a}")));
    }
    let gamma = if normalize { Complex64::new(0.0, gamma_i_of(a.im)?) } else { Complex64::default() };
    Ok(RadialWaveFunction::from_fn(grid, |r| (Complex64::i() * (a * r * r + gamma)).exp()))
}

/// Amplitude fraction allowed past the outer radius before a deformation
/// is refused.
const DEFORM_EDGE_LIMIT: f64 = 1e-8;

/// Norm-preserving stretch `ψ(r) → f ψ(f^{2/3} r)`; the width scales by
/// `f^{−2/3}`. The stretched function is read off the trigonometric
/// interpolant of `rψ`, so smooth states keep their norm to round-off.
pub fn deform(psi: &RadialWaveFunction, f: f64) -> Result<RadialWaveFunction> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(domain(format!("stretching factor must be positive, got {f}")));
    }
    if f == 1.0 {
        return Ok(psi.clone());
    }
    let grid = *psi.grid();
    let s = f.powf(2.0 / 3.0);
    if s < 1.0 {
        // samples beyond r_max·s are pushed off the grid
        let cut = grid.r_max() * s;
        let lost: Vec<f64> = grid
            .radii()
            .iter()
            .zip(psi.density())
            .map(|(r, d)| if *r > cut { d } else { 0.0 })
            .collect();
        let frac = grid.integrate(&lost) / psi.norm_sq();
        if frac > DEFORM_EDGE_LIMIT {
            return Err(domain(format!(
                "deformation f={f} pushes a norm fraction {frac:.3e} past r_max; enlarge the grid"
            )));
        }
    }
    let mut ops = SpectralOps::new(grid);
    let targets: Vec<f64> = grid.radii().iter().map(|r| r * s).collect();
    let values = ops.interpolate(psi.values(), &targets).into_iter().map(|v| v * f).collect();
    RadialWaveFunction::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> RadialGrid {
        RadialGrid::new(1024, 40.0).unwrap()
    }

    #[test]
    fn unit_gaussian_norm_and_width() {
        let psi = gaussian_state(grid(), Complex64::new(0.0, 0.3), true).unwrap();
        assert!((psi.norm_sq() - 1.0).abs() < 1e-8);
        assert!((psi.width() - (3.0 / (4.0 * 0.3f64)).sqrt()).abs() < 1e-8);
        assert!(psi.values().iter().all(|z| z.im == 0.0 && z.re > 0.0));
        let chirped = gaussian_state(grid(), Complex64::new(0.7, 0.3), true).unwrap();
        for (a, b) in psi.values().iter().zip(chirped.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-14);
        }
        assert!(gaussian_state(grid(), Complex64::new(0.1, 0.0), true).is_err());
    }

    #[test]
    fn momentum_space_gaussian() {
        let alpha = 0.6;
        let psi = gaussian_state(grid(), Complex64::new(0.0, alpha), false).unwrap();
        let mut ops = SpectralOps::new(*psi.grid());
        let phi = ops.to_momentum(&psi).unwrap();
        for (p, v) in ops.momenta().to_vec().iter().zip(&phi).take(300) {
            let exact = (PI / alpha).powf(1.5) * (-p * p / (4.0 * alpha)).exp();
            assert!((v.re - exact).abs() < 1e-10 && v.im.abs() < 1e-14, "{p}");
        }
        let back = ops.from_momentum(&phi).unwrap();
        assert!(back.distance(&psi).unwrap() < 1e-12);
        let pn = ops.norm_sq_momentum(&psi).unwrap();
        assert!((pn - psi.norm_sq()).abs() < 1e-10 * pn);
    }

    #[test]
    fn deform_preserves_norm_and_scales_width() {
        let psi = gaussian_state(grid(), Complex64::new(0.0, 0.2), true).unwrap();
        assert_eq!(deform(&psi, 1.0).unwrap(), psi);
        for f in [0.99, 1.001, 1.01, 1.25] {
            let d = deform(&psi, f).unwrap();
            assert!((d.norm_sq() - psi.norm_sq()).abs() < 1e-8, "f={f}");
            let w = psi.width() / f.powf(2.0 / 3.0);
            assert!((d.width() - w).abs() < 1e-8, "f={f}");
        }
        assert!(deform(&psi, 0.0).is_err());
        // wide state on a tight box: amplitude would leave the grid
        let wide = gaussian_state(RadialGrid::new(256, 12.0).unwrap(), Complex64::new(0.0, 0.05), true).unwrap();
        assert!(deform(&wide, 0.5).is_err());
    }
}
