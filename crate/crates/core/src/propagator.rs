//! Real-time split-operator propagation.
//!
//! One step is the symmetric product
//!
//! ```text
//! ψ ← e^{−i dt T/2} e^{−i dt V[ψ]} e^{−i dt T/2} ψ,   T = −Δ,  V = 8πa|ψ|² + V_u[|ψ|²]
//! ```
//!
//! with `T` diagonal in the sine basis of `rψ` and `V` rebuilt from the
//! density after the first half step. Consecutive kinetic half steps are
//! fused between recording points. The norm is never renormalized.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::radial::{edge_ratio, RadialGrid, RadialWaveFunction, SpectralOps};

/// Amplitude floor at the grid edges relative to the maximum.
pub const DEFAULT_BOUNDARY_FLOOR: f64 = 1e-8;
pub const DEFAULT_DRIFT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_DT: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Steps between recorded rows.
    pub record_every: usize,
    pub grid: RadialGrid,
    /// Allowed `|E(t) − E(0)|` of a converged run.
    pub drift_tolerance: f64,
    /// Abort when `|ψ|` on the outermost `boundary_points` samples exceeds
    /// this fraction of its maximum, in position or momentum space.
    pub boundary_floor: f64,
    pub boundary_points: usize,
    /// Include the `1/r` interaction.
    pub monopolar: bool,
    /// Times at which the wave function is kept.
    pub snapshot_times: Vec<f64>,
    /// `(t_switch, dt_fine)`: step with `dt_fine` up to `t_switch`, then with `dt`.
    pub fine_start: Option<(f64, f64)>,
}

impl PropagationConfig {
    pub fn new(grid: RadialGrid, dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            record_every: ((0.01 / dt).round() as usize).max(1),
            grid,
            drift_tolerance: DEFAULT_DRIFT_TOLERANCE,
            boundary_floor: DEFAULT_BOUNDARY_FLOOR,
            boundary_points: 3,
            monopolar: true,
            snapshot_times: Vec::new(),
            fine_start: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(domain(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(domain(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.record_every == 0 {
            return Err(domain("record_every must be at least 1"));
        }
        if let Some((until, dt)) = self.fine_start {
            if !(dt > 0.0 && until > 0.0 && until < self.t_end) {
                return Err(domain("fine start needs 0 < t_switch < t_end and a positive step"));
            }
        }
        if !(self.drift_tolerance > 0.0) || !(self.boundary_floor > 0.0) || self.boundary_points == 0 {
            return Err(domain("drift tolerance, boundary floor and boundary points must be positive"));
        }
        Ok(())
    }
}

/// One recorded row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeRecord {
    pub t: f64,
    pub norm: f64,
    pub width: f64,
    pub energy: f64,
    pub eps: f64,
    /// `√⟨p²⟩`
    pub p_width: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    pub records: Vec<TimeRecord>,
}

pub const TIME_SERIES_HEADER: &str = "t,norm,width,energy,eps";

impl TimeSeries {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{TIME_SERIES_HEADER}")?;
        for r in &self.records {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", r.t, r.norm, r.width, r.energy, r.eps)?;
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.width).collect()
    }

    /// `max |E(t) − E(0)|`
    pub fn energy_drift(&self) -> f64 {
        let Some(e0) = self.records.first().map(|r| r.energy) else { return 0.0 };
        self.records.iter().map(|r| (r.energy - e0).abs()).fold(0.0, f64::max)
    }

    /// `max |‖ψ‖² − ‖ψ(0)‖²|`
    pub fn norm_drift(&self) -> f64 {
        let Some(n0) = self.records.first().map(|r| r.norm) else { return 0.0 };
        self.records.iter().map(|r| (r.norm - n0).abs()).fold(0.0, f64::max)
    }
}

/// Why an evolution stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    /// Amplitude reached the edge of the position (`"position"`) or
    /// momentum (`"momentum"`) grid.
    GridViolation { space: &'static str, t: f64, ratio: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub series: TimeSeries,
    /// State at the last recorded time.
    pub psi: RadialWaveFunction,
    pub termination: Termination,
    /// Energy drift within the tolerance.
    pub converged: bool,
    pub snapshots: Vec<(f64, RadialWaveFunction)>,
}

impl Evolution {
    /// The grid violation as an error, for callers that treat it as fatal.
    pub fn violation(&self) -> Option<Error> {
        match self.termination {
            Termination::Completed => None,
            Termination::GridViolation { space, t, ratio } => Some(Error::GridViolation { space, t, ratio }),
        }
    }
}

/// Split-operator stepper bound to one grid, scattering length and time step.
#[derive(Debug, Clone)]
pub struct SplitOperator {
    ops: SpectralOps,
    a: f64,
    dt: f64,
    monopolar: bool,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    /// Edge ratio of the momentum distribution seen in the last kinetic step.
    last_p_edge: f64,
    edge_points: usize,
}

impl SplitOperator {
    pub fn new(grid: RadialGrid, a: f64, dt: f64) -> Self {
        let ops = SpectralOps::new(grid);
        let phase = |tau: f64| -> Vec<Complex64> {
            ops.momenta().iter().map(|p| Complex64::from_polar(1.0, -tau * p * p)).collect()
        };
        let half = phase(0.5 * dt);
        let full = phase(dt);
        Self { ops, a, dt, monopolar: true, half, full, last_p_edge: 0.0, edge_points: 3 }
    }

    pub fn with_monopolar(mut self, on: bool) -> Self {
        self.monopolar = on;
        self
    }

    pub fn with_edge_points(mut self, k: usize) -> Self {
        self.edge_points = k.max(1);
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn ops(&mut self) -> &mut SpectralOps {
        &mut self.ops
    }

    fn kinetic(&mut self, psi: &mut [Complex64], full: bool) {
        let mut c = self.ops.u_coefficients(psi);
        // momentum amplitude ∝ X_j / p_j
        let p = self.ops.momenta();
        let amp: Vec<Complex64> = c.iter().zip(p).map(|(x, p)| x / p).collect();
        self.last_p_edge = edge_ratio(&amp, self.edge_points);
        let f = if full { &self.full } else { &self.half };
        c.iter_mut().zip(f).for_each(|(x, e)| *x *= e);
        let back = self.ops.from_u_coefficients(&c);
        psi.copy_from_slice(&back);
    }

    fn potential(&mut self, psi: &mut [Complex64]) {
        let rho: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        let vu = if self.monopolar { self.ops.monopolar_from_density(&rho) } else { vec![0.0; rho.len()] };
        for ((z, d), v) in psi.iter_mut().zip(&rho).zip(&vu) {
            *z *= Complex64::from_polar(1.0, -self.dt * (8.0 * PI * self.a * d + v));
        }
    }

    /// One full step.
    pub fn step(&mut self, psi: &mut RadialWaveFunction) {
        self.steps(psi, 1);
    }

    /// `m` steps with the inner kinetic halves fused.
    pub fn steps(&mut self, psi: &mut RadialWaveFunction, m: usize) {
        if m == 0 {
            return;
        }
        let v = psi.values_mut();
        self.kinetic(v, false);
        for i in 0..m {
            self.potential(v);
            self.kinetic(v, i + 1 < m);
        }
    }

    /// Largest momentum-space edge ratio seen in the last kinetic step.
    pub fn momentum_edge(&self) -> f64 {
        self.last_p_edge
    }

    fn record(&mut self, psi: &RadialWaveFunction, t: f64) -> Result<TimeRecord> {
        let o = if self.monopolar {
            self.ops.observables(psi, self.a)?
        } else {
            let mut o = self.ops.observables(psi, self.a)?;
            o.energy -= 0.5 * o.monopolar;
            o.eps -= o.monopolar;
            o.monopolar = 0.0;
            o
        };
        Ok(TimeRecord { t, norm: o.norm, width: o.width, energy: o.energy, eps: o.eps, p_width: o.kinetic.sqrt() })
    }
}

/// One step of length `dt` at scattering length `a`.
pub fn step(psi: &RadialWaveFunction, a: f64, dt: f64) -> RadialWaveFunction {
    let mut out = psi.clone();
    SplitOperator::new(*psi.grid(), a, dt).step(&mut out);
    out
}

/// Evolves `psi0` to `config.t_end`, recording every `record_every` steps.
/// A boundary violation stops the run early; the partial series is kept.
pub fn evolve(psi0: &RadialWaveFunction, a: f64, config: &PropagationConfig) -> Result<Evolution> {
    config.validate()?;
    if psi0.grid() != &config.grid {
        return Err(domain("initial state lives on a different grid than the configuration"));
    }
    let stages = match config.fine_start {
        Some((until, dt)) => {
            let every = ((config.record_every as f64 * config.dt / dt).round() as usize).max(1);
            vec![(dt, (until / dt).round() as usize, every), (config.dt, ((config.t_end - until) / config.dt).round() as usize, config.record_every)]
        }
        None => vec![(config.dt, (config.t_end / config.dt).round() as usize, config.record_every)],
    };
    let mut psi = psi0.clone();
    let mut series = TimeSeries::default();
    let mut snap_times: Vec<f64> = config.snapshot_times.clone();
    snap_times.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut snapshots = Vec::new();
    let mut next_snap = 0;
    let mut take_snaps = |t: f64, psi: &RadialWaveFunction, snapshots: &mut Vec<(f64, RadialWaveFunction)>| {
        while next_snap < snap_times.len() && snap_times[next_snap] <= t + 0.5 * config.dt {
            snapshots.push((t, psi.clone()));
            next_snap += 1;
        }
    };
    let mut termination = Termination::Completed;
    let mut t0 = 0.0;
    'stages: for (k, &(dt, total, every)) in stages.iter().enumerate() {
        let mut prop = SplitOperator::new(config.grid, a, dt)
            .with_monopolar(config.monopolar)
            .with_edge_points(config.boundary_points);
        if k == 0 {
            series.records.push(prop.record(&psi, 0.0)?);
            take_snaps(0.0, &psi, &mut snapshots);
        }
        let mut done = 0;
        while done < total {
            let m = every.min(total - done);
            // single steps so the edges are checked after every one
            let mut violated = None;
            for _ in 0..m {
                prop.step(&mut psi);
                done += 1;
                let t = t0 + done as f64 * dt;
                let pr = prop.momentum_edge();
                if pr > config.boundary_floor {
                    violated = Some(Termination::GridViolation { space: "momentum", t, ratio: pr });
                    break;
                }
                let rr = psi.edge_ratio(config.boundary_points);
                if rr > config.boundary_floor {
                    violated = Some(Termination::GridViolation { space: "position", t, ratio: rr });
                    break;
                }
            }
            let t = t0 + done as f64 * dt;
            let rec = prop.record(&psi, t)?;
            if !(rec.norm.is_finite() && rec.energy.is_finite()) {
                return Err(Error::Integration { t, reason: "non-finite wave function".into() });
            }
            series.records.push(rec);
            take_snaps(t, &psi, &mut snapshots);
            if let Some(v) = violated {
                termination = v;
                break 'stages;
            }
        }
        t0 += total as f64 * dt;
    }
    let converged = series.energy_drift() <= config.drift_tolerance;
    if !converged {
        log::warn!(
            "energy drift {:.3e} exceeds tolerance {:.3e}; consider a smaller dt",
            series.energy_drift(),
            config.drift_tolerance
        );
    }
    Ok(Evolution { series, psi, termination, converged, snapshots })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunClass {
    Stationary,
    Oscillating,
    Collapsing,
    Expanding,
    Indeterminate,
}

impl RunClass {
    pub fn name(self) -> &'static str {
        match self {
            RunClass::Stationary => "stationary",
            RunClass::Oscillating => "oscillating",
            RunClass::Collapsing => "collapsing",
            RunClass::Expanding => "expanding",
            RunClass::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseReport {
    pub class: RunClass,
    /// Last time at which the state was resolved on the grid.
    pub last_time: f64,
    /// `√⟨p²⟩` at the end relative to the start.
    pub momentum_growth: f64,
    pub min_width: f64,
    pub max_width: f64,
}

/// Relative width deviation below which a run counts as stationary.
const STATIONARY_BAND: f64 = 0.01;

/// Classifies a run from its width history and termination.
pub fn collapse_monitor(series: &TimeSeries, termination: &Termination) -> CollapseReport {
    let recs = &series.records;
    let (Some(first), Some(last)) = (recs.first(), recs.last()) else {
        return CollapseReport {
            class: RunClass::Indeterminate,
            last_time: 0.0,
            momentum_growth: f64::NAN,
            min_width: f64::NAN,
            max_width: f64::NAN,
        };
    };
    let w: Vec<f64> = series.widths();
    let w0 = w[0];
    let min_width = w.iter().copied().fold(f64::MAX, f64::min);
    let max_width = w.iter().copied().fold(f64::MIN, f64::max);
    let momentum_growth = last.p_width / first.p_width;
    let mut report = CollapseReport { class: RunClass::Indeterminate, last_time: last.t, momentum_growth, min_width, max_width };
    let n = w.len();
    let tail = &w[n - (n / 3).max(2).min(n)..];
    let shrinking = tail.windows(2).all(|p| p[1] <= p[0]);
    let growing = tail.windows(2).all(|p| p[1] >= p[0]);
    match termination {
        Termination::GridViolation { space: "momentum", .. } if shrinking || last.width < 0.9 * w0 => {
            report.class = RunClass::Collapsing;
            return report;
        }
        Termination::GridViolation { space: "position", .. } if growing => {
            report.class = RunClass::Expanding;
            return report;
        }
        _ => {}
    }
    if n < 3 {
        return report;
    }
    if w.iter().all(|x| (x - w0).abs() < STATIONARY_BAND * w0) {
        report.class = RunClass::Stationary;
        return report;
    }
    if shrinking && last.width < 0.5 * w0 && momentum_growth > 2.0 {
        report.class = RunClass::Collapsing;
        return report;
    }
    // trend over the second half
    let h = n / 2;
    let (t, y): (Vec<f64>, Vec<f64>) = recs[h..].iter().map(|r| (r.t, r.width)).unzip();
    let (slope, _, r2) = linear_fit(&t, &y);
    let span = t.last().unwrap() - t[0];
    if slope > 0.0 && r2 > 0.9 && slope * span > 0.2 * w0 {
        report.class = RunClass::Expanding;
        return report;
    }
    let extrema = w.windows(3).filter(|p| (p[1] - p[0]) * (p[2] - p[1]) < 0.0).count();
    if extrema >= 3 && max_width < 3.0 * min_width {
        report.class = RunClass::Oscillating;
    }
    report
}

/// Least-squares line `y = slope·x + intercept` and its `R²`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r2 = if sxx > 0.0 && syy > 0.0 { sxy * sxy / (sxx * syy) } else { 0.0 };
    (slope, my - slope * mx, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::gaussian_state;

    fn grid() -> RadialGrid {
        RadialGrid::new(512, 40.0).unwrap()
    }

    #[test]
    fn norm_conserved_per_step() {
        let psi = gaussian_state(grid(), Complex64::new(0.0, 0.3), true).unwrap();
        let next = step(&psi, -1.0, 1e-2);
        assert!((next.norm_sq() - psi.norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn free_gaussian_spreads_analytically() {
        // i ψ_t = −Δψ: e^{−αr²} keeps Gaussian form, ⟨r²⟩ = 3/(4α) + 12 α t²
        let alpha = 0.5;
        let psi = gaussian_state(grid(), Complex64::new(0.0, alpha), true).unwrap();
        let mut cfg = PropagationConfig::new(grid(), 1e-2, 2.0);
        cfg.monopolar = false;
        let ev = evolve(&psi, 0.0, &cfg).unwrap();
        assert_eq!(ev.termination, Termination::Completed);
        for r in &ev.series.records {
            let exact = (0.75 / alpha + 12.0 * alpha * r.t * r.t).sqrt();
            assert!((r.width - exact).abs() < 1e-9, "t={} {} {}", r.t, r.width, exact);
        }
    }

    #[test]
    fn step_halving_shows_second_order() {
        let psi = gaussian_state(grid(), Complex64::new(0.0, 0.3), true).unwrap();
        let run = |dt: f64| {
            let mut p = psi.clone();
            let mut op = SplitOperator::new(grid(), -1.0, dt);
            op.steps(&mut p, (0.4 / dt).round() as usize);
            p
        };
        let (a, b, c) = (run(0.04), run(0.02), run(0.01));
        let ratio = a.distance(&b).unwrap() / b.distance(&c).unwrap();
        assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
    }

    #[test]
    fn fused_steps_match_single_steps() {
        let psi = gaussian_state(grid(), Complex64::new(0.0, 0.3), true).unwrap();
        let mut a = psi.clone();
        let mut b = psi.clone();
        let mut op = SplitOperator::new(grid(), -1.0, 1e-2);
        op.steps(&mut a, 10);
        for _ in 0..10 {
            op.step(&mut b);
        }
        assert!(a.distance(&b).unwrap() < 1e-13);
    }

    #[test]
    fn boundary_violation_aborts() {
        // free Gaussian on a small box reaches the wall
        let g = RadialGrid::new(128, 8.0).unwrap();
        let psi = gaussian_state(g, Complex64::new(0.0, 1.0), true).unwrap();
        let mut cfg = PropagationConfig::new(g, 1e-2, 10.0);
        cfg.monopolar = false;
        let ev = evolve(&psi, 0.0, &cfg).unwrap();
        assert!(matches!(ev.termination, Termination::GridViolation { space: "position", .. }));
        assert!(ev.series.records.last().unwrap().t < 10.0);
        assert!(ev.violation().is_some());
        let rep = collapse_monitor(&ev.series, &ev.termination);
        assert_eq!(rep.class, RunClass::Expanding);
    }

    #[test]
    fn fine_start_keeps_time_grid() {
        let psi = gaussian_state(grid(), Complex64::new(0.0, 0.3), true).unwrap();
        let mut cfg = PropagationConfig::new(grid(), 1e-2, 1.0);
        cfg.record_every = 10;
        cfg.fine_start = Some((0.5, 1e-3));
        let ev = evolve(&psi, -1.0, &cfg).unwrap();
        let t = ev.series.times();
        assert_eq!(t.len(), 11);
        for (k, v) in t.iter().enumerate() {
            assert!((v - 0.1 * k as f64).abs() < 1e-9, "{v}");
        }
        let mut plain = cfg.clone();
        plain.fine_start = None;
        let ev2 = evolve(&psi, -1.0, &plain).unwrap();
        let d = ev.psi.distance(&ev2.psi).unwrap();
        assert!(d > 0.0 && d < 1e-2, "{d}");
    }

    #[test]
    fn config_validation() {
        let mut c = PropagationConfig::new(grid(), 1e-2, 1.0);
        assert!(c.validate().is_ok());
        c.record_every = 0;
        assert!(c.validate().is_err());
        c = PropagationConfig::new(grid(), -1.0, 1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn csv_layout() {
        let ts = TimeSeries {
            records: vec![TimeRecord { t: 0.0, norm: 1.0, width: 2.0, energy: -0.1, eps: -0.3, p_width: 1.0 }],
        };
        let mut buf = Vec::new();
        ts.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some(TIME_SERIES_HEADER));
        assert_eq!(lines.next().unwrap().split(',').count(), 5);
    }

    #[test]
    fn linear_fit_exact_line() {
        let x: Vec<f64> = (0..10).map(|v| v as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let (s, i, r2) = linear_fit(&x, &y);
        assert!((s - 3.0).abs() < 1e-12 && (i + 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }
}
