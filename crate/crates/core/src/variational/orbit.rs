//! Orbit integration of the variational equations with collapse detection.

use std::f64::consts::PI;

use super::{
    energy_unchecked, hamilton_rhs, hamiltonian, potential_stationary_points, potential_v,
    rhs_unchecked, to_canonical, CanonicalState, VariationalState,
};
use crate::error::{domain, Error, Result};
use crate::ode::{Stepper, Tolerances};

/// Width parameter beyond which an orbit is treated as collapsed.
pub const A_DIVERGENCE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitOptions {
    pub tol: Tolerances,
    pub a_div: f64,
    /// Spacing of recorded rows; defaults to `t_end / 2000`.
    pub record_interval: Option<f64>,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self { tol: Tolerances::default(), a_div: A_DIVERGENCE, record_interval: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitRecord {
    pub t: f64,
    pub a_r: f64,
    pub a_i: f64,
    pub gamma_r: f64,
    pub width: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    /// Width reached zero. `bracket` encloses the collapse time; `t_collapse`
    /// adds the analytic terminal approach to the last integrated time.
    Collapse { t_collapse: f64, bracket: (f64, f64) },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSeries {
    pub records: Vec<OrbitRecord>,
    pub termination: Termination,
}

impl OrbitSeries {
    pub fn collapse_time(&self) -> Option<f64> {
        match self.termination {
            Termination::Collapse { t_collapse, .. } => Some(t_collapse),
            Termination::Completed => None,
        }
    }
}

fn record(t: f64, y: &[f64; 3], a: f64) -> OrbitRecord {
    OrbitRecord {
        t,
        a_r: y[0],
        a_i: y[1],
        gamma_r: y[2],
        width: (0.75 / y[1]).sqrt(),
        energy: energy_unchecked(y[0], y[1], a),
    }
}

/// Remaining time to zero width from `A_i`. Near the singularity the
/// `a/q³` term dominates `V`, so `q̇ = −2√(c/q³)` with `c = −3√3 a/(2√π)`,
/// giving `T_c − t = q^{5/2}/(5√c)`.
fn terminal_time(a_i: f64, a: f64) -> f64 {
    if a >= 0.0 {
        return 0.0;
    }
    let q = (0.75 / a_i).sqrt();
    let c = -3.0 * 3f64.sqrt() * a / (2.0 * PI.sqrt());
    q.powf(2.5) / (5.0 * c.sqrt())
}

/// Integrates the variational equations from `s0` up to `t_end`, stopping
/// early on collapse (`A_i > a_div`).
pub fn integrate_orbit(
    s0: &VariationalState,
    a: f64,
    t_end: f64,
    opts: &OrbitOptions,
) -> Result<OrbitSeries> {
    if !(s0.a_i > 0.0) {
        return Err(domain("initial A_i must be positive"));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(domain(format!("t_end must be positive, got {t_end}")));
    }
    let dt_rec = opts.record_interval.unwrap_or(t_end / 2000.0);
    if !(dt_rec > 0.0) {
        return Err(domain("record interval must be positive"));
    }
    let f = |_t: f64, y: &[f64; 3]| rhs_unchecked(y[0], y[1], a);
    let y0 = [s0.a_r, s0.a_i, s0.gamma_r];
    let h0 = 1e-3 * dt_rec.min(1.0);
    let mut stepper = Stepper::new(f, 0.0, y0, h0, opts.tol);
    let mut records = vec![record(0.0, &y0, a)];
    let mut k = 1u64;
    loop {
        let target = (k as f64 * dt_rec).min(t_end);
        let t_prev = stepper.t();
        if let Err(e) = stepper.step(target) {
            let y = stepper.y();
            // runaway A_i: the step size collapsed on the way to the singularity
            if matches!(e, Error::Integration { .. }) && a < 0.0 && y[1] > 1e3 * s0.a_i {
                let t = stepper.t();
                records.push(record(t, y, a));
                let tc = t + terminal_time(y[1], a);
                return Ok(OrbitSeries {
                    records,
                    termination: Termination::Collapse { t_collapse: tc, bracket: (t_prev, tc.max(t)) },
                });
            }
            return Err(e);
        }
        let t = stepper.t();
        let y = *stepper.y();
        if y[1] > opts.a_div {
            records.push(record(t, &y, a));
            let tc = t + terminal_time(y[1], a);
            return Ok(OrbitSeries {
                records,
                termination: Termination::Collapse { t_collapse: tc, bracket: (t, tc) },
            });
        }
        if t == target {
            records.push(record(t, &y, a));
            if target >= t_end {
                break;
            }
            k += 1;
        }
    }
    Ok(OrbitSeries { records, termination: Termination::Completed })
}

/// Integrates Hamilton's equations in `(q, p)`; rows are `(t, state)` at
/// the same cadence as [`integrate_orbit`].
pub fn integrate_canonical(
    c0: &CanonicalState,
    a: f64,
    t_end: f64,
    opts: &OrbitOptions,
) -> Result<Vec<(f64, CanonicalState)>> {
    hamilton_rhs(c0, a)?;
    let dt_rec = opts.record_interval.unwrap_or(t_end / 2000.0);
    let f = |_t: f64, y: &[f64; 2]| {
        let r = hamilton_rhs(&CanonicalState { q: y[0], p: y[1] }, a)
            .unwrap_or([f64::NAN, f64::NAN]);
        r
    };
    let mut stepper = Stepper::new(f, 0.0, [c0.q, c0.p], 1e-3 * dt_rec.min(1.0), opts.tol);
    let mut out = vec![(0.0, *c0)];
    let mut k = 1u64;
    loop {
        let target = (k as f64 * dt_rec).min(t_end);
        stepper.advance_to(target)?;
        let y = stepper.y();
        out.push((target, CanonicalState { q: y[0], p: y[1] }));
        if target >= t_end {
            return Ok(out);
        }
        k += 1;
    }
}

/// Outcome of [`collapse_time`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CollapseOutcome {
    /// Extrapolated time at which the width vanishes.
    Collapse(f64),
    /// The energy surface through the initial state never reaches zero
    /// width: the orbit is bounded or escapes to infinite width.
    NoCollapse,
    /// Collapse is expected but did not happen before `t_max`.
    Inconclusive { t_max: f64, a_i: f64 },
}

/// Whether the level set of `H` through `c` reaches `q → 0` in forward time.
fn reaches_zero_width(c: &CanonicalState, a: f64) -> Result<bool> {
    if a >= 0.0 {
        return Ok(false);
    }
    let e = hamiltonian(c, a)?;
    let qs = potential_stationary_points(a);
    let inward = c.p < 0.0;
    if qs.len() < 2 {
        // V rises monotonically from −∞ to 0⁻
        return Ok(e < 0.0 || inward);
    }
    let q_u = qs[0];
    let v_u = potential_v(q_u, a)?;
    if e > v_u {
        // no barrier; only a turning point on the far tail when E < 0
        Ok(e < 0.0 || inward)
    } else {
        Ok(c.q < q_u)
    }
}

/// Time at which the width of the variational orbit from `s0` vanishes.
pub fn collapse_time(
    s0: &VariationalState,
    a: f64,
    t_max: f64,
    opts: &OrbitOptions,
) -> Result<CollapseOutcome> {
    let c = to_canonical(s0)?;
    if !reaches_zero_width(&c, a)? {
        return Ok(CollapseOutcome::NoCollapse);
    }
    let opts = OrbitOptions { record_interval: Some(opts.record_interval.unwrap_or(t_max)), ..*opts };
    let series = integrate_orbit(s0, a, t_max, &opts)?;
    Ok(match series.termination {
        Termination::Collapse { t_collapse, .. } => CollapseOutcome::Collapse(t_collapse),
        Termination::Completed => CollapseOutcome::Inconclusive {
            t_max,
            a_i: series.records.last().map(|r| r.a_i).unwrap_or(s0.a_i),
        },
    })
}
