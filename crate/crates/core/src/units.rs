//! Scaled units and the norm-based rescaling shared by all solvers.
//!
//! The extended GPE depends on the particle number `N` and the physical
//! scattering length only through the combination `a = N² a_phys / a_u`.
//! Everything else in the crate works in these scaled units; the conversion
//! from physical units lives here and nowhere else.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

/// Critical scaled scattering length of the variational tangent bifurcation, `-3π/8`.
pub const A_CRITICAL: f64 = -3.0 * PI / 8.0;

/// Dimensionless scaled scattering length.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ScaledScattering(f64);

impl ScaledScattering {
    pub fn new(a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(domain(format!("scattering length must be finite, got {a}")));
        }
        Ok(Self(a))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// True strictly above the variational bifurcation `a > -3π/8`.
    pub fn is_above_bifurcation(self) -> bool {
        self.0 > A_CRITICAL
    }
}

/// Norm-derived scale factor, `1/ν = ‖ψ‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFactor(f64);

impl ScaleFactor {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(domain(format!("scale factor must be positive, got {nu}")));
        }
        Ok(Self(nu))
    }

    /// Scale factor that maps a state of squared norm `norm_sq` to unit norm.
    pub fn from_norm_sq(norm_sq: f64) -> Result<Self> {
        if !(norm_sq.is_finite() && norm_sq > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Self::new(1.0 / norm_sq)
    }

    pub fn nu(self) -> f64 {
        self.0
    }

    /// ψ → ν²ψ
    pub fn wave_function(self, psi: f64) -> f64 {
        self.0 * self.0 * psi
    }
    /// r → r/ν
    pub fn radius(self, r: f64) -> f64 {
        r / self.0
    }
    /// ε → ν²ε; also used for U, λ.
    pub fn energy(self, eps: f64) -> f64 {
        self.0 * self.0 * eps
    }
    /// t → t/ν²
    pub fn time(self, t: f64) -> f64 {
        t / (self.0 * self.0)
    }
    /// a → a/ν²
    pub fn scattering(self, a: f64) -> f64 {
        a / (self.0 * self.0)
    }
}

/// Converts a physical scattering length and time (in units of `a_u`, `t_u`)
/// for `n` bosons to scaled units.
pub fn to_scaled(n: f64, a_phys: f64, t_phys: f64) -> Result<(f64, f64)> {
    check_particle_count(n)?;
    let n2 = n * n;
    Ok((n2 * a_phys, n2 * t_phys))
}

/// Inverse of [`to_scaled`].
pub fn from_scaled(n: f64, a_scaled: f64, t_scaled: f64) -> Result<(f64, f64)> {
    check_particle_count(n)?;
    let n2 = n * n;
    Ok((a_scaled / n2, t_scaled / n2))
}

fn check_particle_count(n: f64) -> Result<()> {
    if n.is_finite() && n >= 1.0 {
        Ok(())
    } else {
        Err(domain(format!("particle count must be >= 1, got {n}")))
    }
}

/// Radial profile sampled at arbitrary (increasing) radii.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub psi: Vec<f64>,
}

/// Result of [`rescale_solution`].
#[derive(Debug, Clone, PartialEq)]
pub struct Rescaled {
    pub profile: RadialProfile,
    pub eps: f64,
    pub a: f64,
    pub lambda: Option<f64>,
    pub scale: ScaleFactor,
}

/// Squared norm `4π∫|ψ|² r² dr` by the composite trapezoid rule on the
/// sample abscissae. The profile is taken to vanish beyond its last sample.
pub fn norm_sq(profile: &RadialProfile) -> f64 {
    let f: Vec<f64> = profile
        .r
        .iter()
        .zip(&profile.psi)
        .map(|(r, p)| p * p * r * r)
        .collect();
    4.0 * PI * trapezoid(&profile.r, &f)
}

pub(crate) fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2)
        .zip(f.windows(2))
        .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
        .sum()
}

/// Maps a non-normalized stationary solution onto the unit-norm solution of
/// the same family: `ψ→ν²ψ`, `r→r/ν`, `ε→ν²ε`, `a→a/ν²`, `λ→ν²λ` with
/// `1/ν = ‖ψ‖²`.
pub fn rescale_solution(
    raw: &RadialProfile,
    eps: f64,
    a: f64,
    lambda: Option<f64>,
) -> Result<Rescaled> {
    if raw.r.len() != raw.psi.len() {
        return Err(Error::LengthMismatch { expected: raw.r.len(), got: raw.psi.len() });
    }
    let scale = ScaleFactor::from_norm_sq(norm_sq(raw))?;
    let profile = RadialProfile {
        r: raw.r.iter().map(|&r| scale.radius(r)).collect(),
        psi: raw.psi.iter().map(|&p| scale.wave_function(p)).collect(),
    };
    Ok(Rescaled {
        profile,
        eps: scale.energy(eps),
        a: scale.scattering(a),
        lambda: lambda.map(|l| scale.energy(l)),
        scale,
    })
}
