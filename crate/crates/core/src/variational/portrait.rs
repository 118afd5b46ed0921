//! Phase portraits as iso-energy contours of the conserved mean-field energy.

use super::{
    eigenvalues_2x2, energy_unchecked, fixed_points, jacobian, potential_v, Branch, FixedPoint,
};
use crate::error::{domain, Result};

/// Plane in which the portrait is drawn and its bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PortraitPlane {
    /// `(A_r, A_i)`; `A_i` range must be positive.
    Amplitude { a_r: (f64, f64), a_i: (f64, f64) },
    /// `(q, p)`; `q` range must be positive.
    Canonical { q: (f64, f64), p: (f64, f64) },
}

impl PortraitPlane {
    fn ranges(&self) -> ((f64, f64), (f64, f64)) {
        match *self {
            PortraitPlane::Amplitude { a_r, a_i } => (a_r, a_i),
            PortraitPlane::Canonical { q, p } => (q, p),
        }
    }

    /// Energy at plane coordinates `(x, y)`.
    pub fn energy(&self, x: f64, y: f64, a: f64) -> f64 {
        match self {
            PortraitPlane::Amplitude { .. } => energy_unchecked(x, y, a),
            PortraitPlane::Canonical { .. } => y * y + potential_v(x, a).unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortraitSpec {
    pub plane: PortraitPlane,
    pub nx: usize,
    pub ny: usize,
    /// Energy levels; when empty, levels are spread around the fixed-point energies.
    pub levels: Vec<f64>,
}

/// Line segments of one iso-energy level.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub level: f64,
    pub segments: Vec<[(f64, f64); 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointKind {
    /// Elliptic: purely imaginary linearization eigenvalues.
    Center,
    /// Hyperbolic: a real pair.
    Saddle,
}

/// Fixed points of the variational flow at `a` classified by their
/// linearization.
pub fn classify_fixed_points(a: f64) -> Vec<(Branch, FixedPoint, FixedPointKind)> {
    let Some(fp) = fixed_points(a) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (branch, p) in [(Branch::Stable, Some(fp.stable)), (Branch::Unstable, fp.unstable)] {
        let Some(p) = p else { continue };
        let Ok(j) = jacobian(a, branch) else { continue };
        let ev = eigenvalues_2x2(&j);
        let kind = if ev[0].re.abs() <= 1e-12 * ev[0].norm().max(1e-300) {
            FixedPointKind::Center
        } else {
            FixedPointKind::Saddle
        };
        out.push((branch, p, kind));
    }
    out
}

fn auto_levels(a: f64, plane: &PortraitPlane) -> Vec<f64> {
    let ((x0, x1), (y0, y1)) = plane.ranges();
    match fixed_points(a) {
        Some(fp) => {
            let e_s = fp.stable.state();
            let e_min = energy_unchecked(e_s.a_r, e_s.a_i, a);
            let e_top = fp
                .unstable
                .map(|u| energy_unchecked(0.0, u.a_i, a))
                .unwrap_or(e_min + 1.0);
            let span = (e_top - e_min).max(1e-6);
            let mut levels: Vec<f64> = (1..=16).map(|k| e_min + span * k as f64 / 12.0).collect();
            levels.push(e_top);
            levels.sort_by(|p, q| p.partial_cmp(q).unwrap());
            levels
        }
        None => {
            // spread over the values seen in the box
            let mid = plane.energy(0.5 * (x0 + x1), 0.5 * (y0 + y1), a);
            (-8..=8).map(|k| mid + 0.1 * k as f64 * mid.abs().max(0.1)).collect()
        }
    }
}

/// Iso-energy contours by marching squares on an `nx × ny` lattice.
pub fn phase_portrait(a: f64, spec: &PortraitSpec) -> Result<Vec<Contour>> {
    let ((x0, x1), (y0, y1)) = spec.plane.ranges();
    if spec.nx < 2 || spec.ny < 2 || !(x1 > x0) || !(y1 > y0) {
        return Err(domain("portrait box must be non-empty with at least 2×2 nodes"));
    }
    let positive_axis = match spec.plane {
        PortraitPlane::Amplitude { .. } => y0,
        PortraitPlane::Canonical { .. } => x0,
    };
    if !(positive_axis > 0.0) {
        return Err(domain("A_i (or q) range must be strictly positive"));
    }
    let levels = if spec.levels.is_empty() { auto_levels(a, &spec.plane) } else { spec.levels.clone() };
    let dx = (x1 - x0) / (spec.nx - 1) as f64;
    let dy = (y1 - y0) / (spec.ny - 1) as f64;
    let xs: Vec<f64> = (0..spec.nx).map(|i| x0 + i as f64 * dx).collect();
    let ys: Vec<f64> = (0..spec.ny).map(|j| y0 + j as f64 * dy).collect();
    let field: Vec<f64> = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
        .map(|(x, y)| spec.plane.energy(x, y, a))
        .collect();
    let at = |i: usize, j: usize| field[j * spec.nx + i];
    Ok(levels
        .into_iter()
        .map(|level| {
            let mut segments = Vec::new();
            for j in 0..spec.ny - 1 {
                for i in 0..spec.nx - 1 {
                    let corners = [
                        (xs[i], ys[j], at(i, j)),
                        (xs[i + 1], ys[j], at(i + 1, j)),
                        (xs[i + 1], ys[j + 1], at(i + 1, j + 1)),
                        (xs[i], ys[j + 1], at(i, j + 1)),
                    ];
                    cell_segments(&corners, level, &mut segments);
                }
            }
            Contour { level, segments }
        })
        .collect())
}

fn cell_segments(c: &[(f64, f64, f64); 4], level: f64, out: &mut Vec<[(f64, f64); 2]>) {
    if c.iter().any(|p| !p.2.is_finite()) {
        return;
    }
    let above: [bool; 4] = std::array::from_fn(|k| c[k].2 >= level);
    let case = above.iter().enumerate().fold(0usize, |acc, (k, &b)| acc | ((b as usize) << k));
    if case == 0 || case == 15 {
        return;
    }
    // crossing point on edge k (between corner k and k+1)
    let edge = |k: usize| {
        let (p, q) = (c[k], c[(k + 1) % 4]);
        let s = (level - p.2) / (q.2 - p.2);
        (p.0 + s * (q.0 - p.0), p.1 + s * (q.1 - p.1))
    };
    let crossing: Vec<usize> = (0..4).filter(|&k| above[k] != above[(k + 1) % 4]).collect();
    if crossing.len() == 2 {
        out.push([edge(crossing[0]), edge(crossing[1])]);
        return;
    }
    // saddle cell: resolve with the cell average
    let center_above = c.iter().map(|p| p.2).sum::<f64>() / 4.0 >= level;
    if center_above == above[0] {
        out.push([edge(0), edge(1)]);
        out.push([edge(2), edge(3)]);
    } else {
        out.push([edge(3), edge(0)]);
        out.push([edge(1), edge(2)]);
    }
}

/// Contour through the hyperbolic point, dividing oscillation from
/// collapse. `None` when no saddle exists.
pub fn separatrix(a: f64, plane: PortraitPlane, nx: usize, ny: usize) -> Result<Option<Contour>> {
    let Some(u) = fixed_points(a).and_then(|fp| fp.unstable) else {
        return Ok(None);
    };
    let level = energy_unchecked(0.0, u.a_i, a);
    let spec = PortraitSpec { plane, nx, ny, levels: vec![level] };
    Ok(phase_portrait(a, &spec)?.pop())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_center_one_saddle_at_minus_one() {
        let kinds = classify_fixed_points(-1.0);
        assert_eq!(kinds.len(), 2);
        assert_eq!(kinds[0].2, FixedPointKind::Center);
        assert_eq!(kinds[1].2, FixedPointKind::Saddle);
        assert!(classify_fixed_points(-1.3).is_empty());
    }

    #[test]
    fn fixed_points_coalesce_near_critical() {
        let fp = fixed_points(-1.178).unwrap();
        let u = fp.unstable.unwrap();
        assert!((u.a_i - fp.stable.a_i) / fp.stable.a_i < 0.05);
    }

    #[test]
    fn contour_points_lie_on_level() {
        let plane = PortraitPlane::Amplitude { a_r: (-0.3, 0.3), a_i: (0.01, 0.6) };
        let spec = PortraitSpec { plane, nx: 200, ny: 200, levels: vec![-0.1] };
        let c = phase_portrait(-1.0, &spec).unwrap();
        assert!(!c[0].segments.is_empty());
        for s in &c[0].segments {
            for p in s {
                let e = plane.energy(p.0, p.1, -1.0);
                assert!((e + 0.1).abs() < 2e-3, "{e}");
            }
        }
    }

    #[test]
    fn separatrix_passes_through_saddle() {
        let plane = PortraitPlane::Amplitude { a_r: (-0.3, 0.3), a_i: (0.01, 0.8) };
        let sep = separatrix(-1.0, plane, 301, 301).unwrap().unwrap();
        let u = fixed_points(-1.0).unwrap().unstable.unwrap();
        let closest = sep
            .segments
            .iter()
            .flat_map(|s| s.iter())
            .map(|p| (p.0.powi(2) + (p.1 - u.a_i).powi(2)).sqrt())
            .fold(f64::MAX, f64::min);
        assert!(closest < 5e-3, "{closest}");
        assert!(separatrix(-1.3, plane, 50, 50).unwrap().is_none());
    }

    #[test]
    fn canonical_plane_rejects_nonpositive_q() {
        let plane = PortraitPlane::Canonical { q: (0.0, 5.0), p: (-1.0, 1.0) };
        let spec = PortraitSpec { plane, nx: 10, ny: 10, levels: vec![] };
        assert!(phase_portrait(-0.8, &spec).is_err());
    }
}
