//! Time-dependent variational dynamics of a complex Gaussian
//! `ψ(r,t) = exp(i(A r² + γ))` with `A = A_r + i A_i`, `γ = γ_r + i γ_i`.
//!
//! The Gaussian parameters obey three real ODEs; `γ_i` is slaved to `A_i`
//! by normalization. The system has an energy integral and, in the
//! variables `q = √⟨r²⟩` and `p = A_r √(3/A_i)`, the form of a particle in
//! a one-dimensional potential `V(q)`.

mod orbit;
mod portrait;

pub use orbit::{
    collapse_time, integrate_orbit, integrate_canonical, CollapseOutcome, OrbitOptions,
    OrbitRecord, OrbitSeries, Termination, A_DIVERGENCE,
};
pub use portrait::{
    classify_fixed_points, phase_portrait, separatrix, Contour, FixedPointKind, PortraitPlane,
    PortraitSpec,
};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::units::A_CRITICAL;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Gaussian parameters `(A_r, A_i, γ_r)`; `A_i > 0` for normalizability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalState {
    pub a_r: f64,
    pub a_i: f64,
    pub gamma_r: f64,
}

impl VariationalState {
    pub fn new(a_r: f64, a_i: f64, gamma_r: f64) -> Result<Self> {
        check_ai(a_i)?;
        Ok(Self { a_r, a_i, gamma_r })
    }

    /// Real Gaussian at rest, the usual initial condition.
    pub fn at_rest(a_i: f64) -> Result<Self> {
        Self::new(0.0, a_i, 0.0)
    }

    /// Imaginary phase fixed by normalization.
    pub fn gamma_i(&self) -> f64 {
        -0.75 * (2.0 * self.a_i / PI).ln()
    }

    /// `√⟨r²⟩ = √(3/(4A_i))`
    pub fn width(&self) -> f64 {
        (0.75 / self.a_i).sqrt()
    }
}

/// Canonical pair `q = √⟨r²⟩`, `p = A_r √(3/A_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalState {
    pub q: f64,
    pub p: f64,
}

/// Stationary branch of the condensate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Wider state, elliptic fixed point (ground state).
    Stable,
    /// Narrower state, hyperbolic fixed point (collectively excited state).
    Unstable,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Stable => "ground",
            Branch::Unstable => "excited",
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ground" | "stable" | "+" => Ok(Branch::Stable),
            "excited" | "unstable" | "-" => Ok(Branch::Unstable),
            _ => Err(format!("unknown branch `{s}` (expected ground|excited)")),
        }
    }
}

/// One stationary Gaussian: `A_r = 0`, width parameter `a_i` and chemical potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub a_i: f64,
    pub eps: f64,
}

impl FixedPoint {
    pub fn state(&self) -> VariationalState {
        VariationalState { a_r: 0.0, a_i: self.a_i, gamma_r: 0.0 }
    }
}

/// The two stationary Gaussians born in the tangent bifurcation. For
/// `a ≥ 0` only the stable one exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointPair {
    pub stable: FixedPoint,
    pub unstable: Option<FixedPoint>,
}

impl FixedPointPair {
    pub fn get(&self, branch: Branch) -> Option<FixedPoint> {
        match branch {
            Branch::Stable => Some(self.stable),
            Branch::Unstable => self.unstable,
        }
    }
}

fn check_ai(a_i: f64) -> Result<()> {
    if a_i.is_finite() && a_i > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("A_i must be positive for a normalizable Gaussian, got {a_i}")))
    }
}

/// Right-hand side `(dA_r/dt, dA_i/dt, dγ_r/dt)`.
pub fn eom_rhs(s: &VariationalState, a: f64) -> Result<[f64; 3]> {
    check_ai(s.a_i)?;
    Ok(rhs_unchecked(s.a_r, s.a_i, a))
}

#[inline]
pub(crate) fn rhs_unchecked(a_r: f64, a_i: f64, a: f64) -> [f64; 3] {
    let sqrt_ai = a_i.sqrt();
    let dar = -4.0 * (a_r * a_r - a_i * a_i) + 8.0 / SQRT_PI * a_i * sqrt_ai * (a * a_i - 1.0 / 6.0);
    let dai = -8.0 * a_r * a_i;
    let dgr = -6.0 * a_i + sqrt_ai / SQRT_PI * (5.0 - 14.0 * a * a_i);
    [dar, dai, dgr]
}

/// `γ_i = -(3/4) ln(2A_i/π)`, the value that normalizes the Gaussian.
pub fn gamma_i_of(a_i: f64) -> Result<f64> {
    check_ai(a_i)?;
    Ok(-0.75 * (2.0 * a_i / PI).ln())
}

/// `√(1 + 8a/3π)`, real only at or above the bifurcation.
fn root_d(a: f64) -> Option<f64> {
    let d = 1.0 + 8.0 * a / (3.0 * PI);
    // tolerate roundoff exactly at the bifurcation
    if d < 0.0 && d > -8.0 * f64::EPSILON {
        return Some(0.0);
    }
    (d >= 0.0).then(|| d.sqrt())
}

/// Chemical potential `ε = -dγ_r/dt` of the stationary Gaussian with width parameter `a_i`.
fn chemical_potential(a_i: f64, a: f64) -> f64 {
    -rhs_unchecked(0.0, a_i, a)[2]
}

/// Stationary Gaussians: `A_r = 0` and
/// `A_i = 1/(6a) + π/(8a²)(1 ± √(1+8a/3π))`, written in a cancellation-free
/// form. Returns `None` below the bifurcation.
pub fn fixed_points(a: f64) -> Option<FixedPointPair> {
    let sd = root_d(a)?;
    let stable_ai = 4.0 / (9.0 * PI * (1.0 + sd).powi(2));
    let stable = FixedPoint { a_i: stable_ai, eps: chemical_potential(stable_ai, a) };
    let unstable = (a < 0.0).then(|| {
        let ai = PI * (1.0 + sd).powi(2) / (16.0 * a * a);
        FixedPoint { a_i: ai, eps: chemical_potential(ai, a) }
    });
    Some(FixedPointPair { stable, unstable })
}

fn branch_root(a: f64, branch: Branch) -> Result<f64> {
    if !(a > A_CRITICAL) {
        return Err(domain(format!("a = {a} is not above the bifurcation a_cr = -3π/8")));
    }
    if branch == Branch::Unstable && a >= 0.0 {
        return Err(domain("the unstable fixed point exists only for a < 0"));
    }
    Ok(root_d(a).expect("checked above bifurcation"))
}

/// Linearization eigenvalues `±λ` of the fixed point on `branch`: purely
/// imaginary for the stable one, real for the unstable one.
pub fn analytic_eigenvalues(a: f64, branch: Branch) -> Result<[Complex64; 2]> {
    let sd = branch_root(a, branch)?;
    let lam = match branch {
        Branch::Stable => {
            let m = 16.0 / (9.0 * PI) * sd.sqrt() / (sd + 1.0).powi(2);
            Complex64::new(0.0, m)
        }
        Branch::Unstable => Complex64::new(16.0 / (9.0 * PI) * sd.sqrt() / one_minus_sd_sq(a, sd), 0.0),
    };
    Ok([lam, -lam])
}

/// `(1 - √D)²` without cancellation for small |a|.
fn one_minus_sd_sq(a: f64, sd: f64) -> f64 {
    let x = 8.0 * a / (3.0 * PI) / (1.0 + sd);
    x * x
}

/// Linearized flow `d(δA_r, δA_i)/dt = J (δA_r, δA_i)` at the fixed point on `branch`.
/// The matrix is off-diagonal.
pub fn jacobian(a: f64, branch: Branch) -> Result<[[f64; 2]; 2]> {
    let sd = branch_root(a, branch)?;
    let (j12, j21) = match branch {
        Branch::Stable => {
            let den = (sd + 1.0).powi(2);
            (8.0 / (9.0 * PI) * sd / den, -32.0 / (9.0 * PI) / den)
        }
        Branch::Unstable => {
            let den = one_minus_sd_sq(a, sd);
            (-8.0 / (9.0 * PI) * sd / den, -32.0 / (9.0 * PI) / den)
        }
    };
    Ok([[0.0, j12], [j21, 0.0]])
}

/// Eigenvalues of a real 2×2 matrix.
pub fn eigenvalues_2x2(m: &[[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
    [tr / 2.0 + disc, tr / 2.0 - disc]
}

/// Mean-field energy `E = 3(A_i²+A_r²)/A_i + 2√A_i(2aA_i − 1)/√π`, conserved by the flow.
pub fn mean_field_energy(s: &VariationalState, a: f64) -> Result<f64> {
    check_ai(s.a_i)?;
    Ok(energy_unchecked(s.a_r, s.a_i, a))
}

#[inline]
pub(crate) fn energy_unchecked(a_r: f64, a_i: f64, a: f64) -> f64 {
    3.0 * (a_i * a_i + a_r * a_r) / a_i + 2.0 * a_i.sqrt() * (2.0 * a * a_i - 1.0) / SQRT_PI
}

pub fn to_canonical(s: &VariationalState) -> Result<CanonicalState> {
    check_ai(s.a_i)?;
    let k = (3.0 / s.a_i).sqrt();
    Ok(CanonicalState { q: 0.5 * k, p: s.a_r * k })
}

/// Back-substitution `A_r = p/2q`, `A_i = 3/4q²`; `γ_r` is set to zero.
pub fn from_canonical(c: &CanonicalState) -> Result<VariationalState> {
    check_q(c.q)?;
    Ok(VariationalState { a_r: c.p / (2.0 * c.q), a_i: 0.75 / (c.q * c.q), gamma_r: 0.0 })
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("q must be positive, got {q}")))
    }
}

/// "Potential" part of the energy, `V(q) = 9/4q² + 3√3 a/(2√π q³) − √3/(√π q)`.
pub fn potential_v(q: f64, a: f64) -> Result<f64> {
    check_q(q)?;
    Ok(potential_unchecked(q, a))
}

#[inline]
fn potential_unchecked(q: f64, a: f64) -> f64 {
    let s3 = 3f64.sqrt();
    9.0 / (4.0 * q * q) + 3.0 * s3 * a / (2.0 * SQRT_PI * q.powi(3)) - s3 / (SQRT_PI * q)
}

/// `dV/dq`.
pub fn potential_dv(q: f64, a: f64) -> Result<f64> {
    check_q(q)?;
    Ok(potential_dv_unchecked(q, a))
}

#[inline]
fn potential_dv_unchecked(q: f64, a: f64) -> f64 {
    let s3p = (3.0 / PI).sqrt();
    -9.0 / (2.0 * q.powi(3)) - s3p * 9.0 * a / (2.0 * q.powi(4)) + s3p / (q * q)
}

/// `H(q, p) = p² + V(q)`.
pub fn hamiltonian(c: &CanonicalState, a: f64) -> Result<f64> {
    Ok(c.p * c.p + potential_v(c.q, a)?)
}

/// Hamilton's equations `(dq/dt, dp/dt) = (2p, −V'(q))`.
pub fn hamilton_rhs(c: &CanonicalState, a: f64) -> Result<[f64; 2]> {
    check_q(c.q)?;
    Ok([2.0 * c.p, -potential_dv_unchecked(c.q, a)])
}

/// Stationary points `q̂` of `V`, in increasing order.
pub fn potential_stationary_points(a: f64) -> Vec<f64> {
    match fixed_points(a) {
        None => Vec::new(),
        Some(fp) => {
            let mut qs: Vec<f64> = std::iter::once(fp.stable)
                .chain(fp.unstable)
                .map(|p| 0.5 * (3.0 / p.a_i).sqrt())
                .collect();
            qs.sort_by(|x, y| x.partial_cmp(y).unwrap());
            qs.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs());
            qs
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_at_stable_fixed_point_gives_chemical_potential() {
        let fp = fixed_points(-1.0).unwrap();
        assert!((fp.stable.a_i - 0.073_35).abs() < 2e-5);
        let r = eom_rhs(&fp.stable.state(), -1.0).unwrap();
        assert!(r[0].abs() < 1e-14 && r[1] == 0.0);
        assert!((r[2] - 0.4808).abs() < 1e-4);
    }

    #[test]
    fn rhs_direct_evaluation() {
        let s = VariationalState::at_rest(0.3).unwrap();
        let r = eom_rhs(&s, -1.0).unwrap();
        // 4·0.09 + (8/√π)·0.3^{3/2}·(−0.3 − 1/6) = 0.36 − 0.34606… = 0.0139…
        assert!((r[0] - 0.013_93).abs() < 1e-4, "{}", r[0]);
        assert_eq!(r[1], 0.0);
        assert!((r[2] - 1.0430).abs() < 1e-4, "{}", r[2]);
    }

    #[test]
    fn rhs_rejects_non_normalizable() {
        let s = VariationalState { a_r: 0.0, a_i: 0.0, gamma_r: 0.0 };
        assert!(eom_rhs(&s, -1.0).is_err());
        assert!(VariationalState::new(0.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn gamma_i_values() {
        assert!(gamma_i_of(PI / 2.0).unwrap().abs() < 1e-15);
        assert!(gamma_i_of(0.0).is_err());
        let xs: Vec<f64> = (1..100).map(|k| k as f64 * 0.05).collect();
        for w in xs.windows(2) {
            assert!(gamma_i_of(w[1]).unwrap() < gamma_i_of(w[0]).unwrap());
        }
    }

    #[test]
    fn gamma_i_normalizes_gaussian() {
        // 4π∫ e^{-2(A_i r² + γ_i)} r² dr by Simpson quadrature
        let a_i = 0.3;
        let gi = gamma_i_of(a_i).unwrap();
        let n = 20_000;
        let h = 15.0 / n as f64;
        let f = |r: f64| (-2.0 * (a_i * r * r + gi)).exp() * r * r;
        let mut s = f(0.0) + f(15.0);
        for k in 1..n {
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
        }
        let norm = 4.0 * PI * s * h / 3.0;
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fixed_points_at_bifurcation() {
        let fp = fixed_points(A_CRITICAL).unwrap();
        let u = fp.unstable.unwrap();
        assert!((fp.stable.a_i - 4.0 / (9.0 * PI)).abs() < 1e-12);
        assert!((u.a_i - fp.stable.a_i).abs() < 1e-7);
        assert!((fp.stable.eps + 20.0 / (9.0 * PI)).abs() < 1e-12);
        assert!((fp.stable.a_i - 0.141_47).abs() < 1e-5);
        assert!((fp.stable.eps + 0.707_36).abs() < 1e-5);
    }

    #[test]
    fn fixed_points_at_minus_one() {
        let fp = fixed_points(-1.0).unwrap();
        let u = fp.unstable.unwrap();
        assert!((u.a_i - 0.3787).abs() < 5e-5);
        assert!((fp.stable.eps + 0.4808).abs() < 1e-4);
        assert!((u.eps + 1.3045).abs() < 2e-4);
        // closed-form root, evaluated directly
        let a: f64 = -1.0;
        let direct = 1.0 / (6.0 * a) + PI / (8.0 * a * a) * (1.0 + (1.0 + 8.0 * a / (3.0 * PI)).sqrt());
        assert!((u.a_i - direct).abs() < 1e-14);
        // ε± closed form with its anti-correlated labels
        let sd = (1.0 + 8.0 * a / (3.0 * PI)).sqrt();
        let eps_plus = -4.0 / (9.0 * PI) * (5.0 + 4.0 * sd) / (1.0 + sd).powi(2);
        let eps_minus = -4.0 / (9.0 * PI) * (5.0 - 4.0 * sd) / (1.0 - sd).powi(2);
        assert!((fp.stable.eps - eps_plus).abs() < 1e-13);
        assert!((u.eps - eps_minus).abs() < 1e-12);
    }

    #[test]
    fn no_fixed_points_below_bifurcation() {
        assert!(fixed_points(-1.3).is_none());
        assert!(fixed_points(-1.17811).is_none());
        assert!(fixed_points(-1.17809).is_some());
    }

    #[test]
    fn fixed_points_zero_and_positive_a() {
        let fp = fixed_points(0.0).unwrap();
        assert!((fp.stable.a_i - 1.0 / (9.0 * PI)).abs() < 1e-15);
        assert!(fp.unstable.is_none());
        let fp = fixed_points(0.5).unwrap();
        let r = eom_rhs(&fp.stable.state(), 0.5).unwrap();
        assert!(r[0].abs() < 1e-14);
    }

    #[test]
    fn rhs_vanishes_at_fixed_points() {
        for k in 0..50 {
            let a = A_CRITICAL + (k as f64 + 0.5) / 50.0 * (-A_CRITICAL);
            let fp = fixed_points(a).unwrap();
            for p in std::iter::once(fp.stable).chain(fp.unstable) {
                let r = eom_rhs(&p.state(), a).unwrap();
                let scale = p.a_i * p.a_i;
                assert!(r[0].abs() < 1e-12 * scale.max(1.0), "a={a} r={r:?}");
                assert!(r[1] == 0.0);
                assert!(p.a_i > 0.0);
            }
            assert!(fp.stable.a_i <= fp.unstable.unwrap().a_i);
        }
    }

    #[test]
    fn eigenvalues_at_minus_one() {
        let s = analytic_eigenvalues(-1.0, Branch::Stable).unwrap();
        assert!(s[0].re == 0.0 && (s[0].im - 0.18295).abs() < 1e-5);
        assert_eq!(s[1], -s[0]);
        let u = analytic_eigenvalues(-1.0, Branch::Unstable).unwrap();
        assert!(u[0].im == 0.0 && (u[0].re - 0.94460).abs() < 1e-5);
        assert!(analytic_eigenvalues(-1.2, Branch::Stable).is_err());
        assert!(analytic_eigenvalues(0.1, Branch::Unstable).is_err());
    }

    #[test]
    fn eigenvalues_vanish_at_bifurcation() {
        let a = A_CRITICAL + 1e-12;
        for b in [Branch::Stable, Branch::Unstable] {
            let l = analytic_eigenvalues(a, b).unwrap();
            assert!(l[0].norm() < 1e-3, "{b:?} {}", l[0]);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let a = -1.0;
        let fp = fixed_points(a).unwrap();
        for (branch, p) in [(Branch::Stable, fp.stable), (Branch::Unstable, fp.unstable.unwrap())] {
            let j = jacobian(a, branch).unwrap();
            assert_eq!(j[0][0], 0.0);
            assert_eq!(j[1][1], 0.0);
            let h = 1e-5;
            let f = |ar: f64, ai: f64| rhs_unchecked(ar, ai, a);
            let d_ar = |i: usize| (f(h, p.a_i)[i] - f(-h, p.a_i)[i]) / (2.0 * h);
            let d_ai = |i: usize| (f(0.0, p.a_i + h)[i] - f(0.0, p.a_i - h)[i]) / (2.0 * h);
            let fd = [[d_ar(0), d_ai(0)], [d_ar(1), d_ai(1)]];
            for i in 0..2 {
                for k in 0..2 {
                    assert!((fd[i][k] - j[i][k]).abs() < 1e-8, "{branch:?} {i}{k}: {fd:?} vs {j:?}");
                }
            }
            let ev = eigenvalues_2x2(&j);
            let an = analytic_eigenvalues(a, branch).unwrap();
            let hit = |z: Complex64| an.iter().any(|w| (z - w).norm() < 1e-12);
            assert!(hit(ev[0]) && hit(ev[1]));
        }
    }

    #[test]
    fn energy_limits_and_canonical_equivalence() {
        let e = mean_field_energy(&VariationalState::at_rest(1e-12).unwrap(), -1.0).unwrap();
        assert!(e < 0.0 && e > -1e-5);
        let c = to_canonical(&VariationalState::at_rest(0.75).unwrap()).unwrap();
        assert!((c.q - 1.0).abs() < 1e-15 && c.p == 0.0);
    }

    #[test]
    fn potential_limits_and_extrema() {
        assert!(potential_v(0.0, -1.0).is_err());
        let far = potential_v(1e8, -1.0).unwrap();
        assert!(far < 0.0 && far > -1e-7);
        let a = -0.8;
        let fp = fixed_points(a).unwrap();
        for p in [fp.stable, fp.unstable.unwrap()] {
            let q = 0.5 * (3.0 / p.a_i).sqrt();
            let h = 1e-6 * q;
            let dv = (potential_v(q + h, a).unwrap() - potential_v(q - h, a).unwrap()) / (2.0 * h);
            assert!(dv.abs() < 1e-7, "{dv}");
            assert!(potential_dv(q, a).unwrap().abs() < 1e-12);
        }
        assert_eq!(potential_stationary_points(-1.0).len(), 2);
        assert_eq!(potential_stationary_points(-1.3).len(), 0);
    }

    #[test]
    fn potential_stationary_points_by_sign_changes() {
        // count sign changes of V' on a fine grid as an independent check
        let count = |a: f64| {
            let qs: Vec<f64> = (1..200_000).map(|k| k as f64 * 1e-4).collect();
            qs.windows(2)
                .filter(|w| {
                    potential_dv(w[0], a).unwrap().signum() != potential_dv(w[1], a).unwrap().signum()
                })
                .count()
        };
        assert_eq!(count(-1.0), 2);
        assert_eq!(count(-0.5), 2);
        assert_eq!(count(-1.3), 0);
    }
}
