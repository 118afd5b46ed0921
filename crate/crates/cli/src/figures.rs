//! Figure presets. Each writes plot-ready CSV (and wave-function snapshots
//! for the propagation figures) named after the preset.
//!
//! | preset | content |
//! |--------|---------|
//! | fig1   | `ε(a)` of both branches, variational and numeric |
//! | fig2   | dominant stability eigenvalue vs `a`, variational and numeric |
//! | fig3   | `(A_r, A_i)` portraits at `a = −1, −1.18, −1.3`; orbit `a = −1`, `A_i(0) = 0.3` |
//! | fig4a  | variational orbit started next to the hyperbolic point, `a = −1` |
//! | fig4b  | variational collapse at `a = −1.3` |
//! | fig5   | excited state deformed by `f = 1.001`, `a = −0.85`: collapse |
//! | fig6   | excited state, `a = −1`: plateau then oscillation |
//! | fig7   | excited state deformed by `f = 0.99`, `a = −0.85`: linear expansion |
//! | fig8   | ground state deformed by `f = 1.01` (a) and `f = 1.25` (b), `a = −0.85` |
//! | fig9   | `V(q)` for several `a` |
//! | fig10  | `(q, p)` portrait at `a = −0.8` |

use selfbound::propagator::PropagationConfig;
use selfbound::radial::RadialGrid;
use selfbound::stability::{solve_modes, StabilityOptions};
use selfbound::stationary::StationarySolver;
use selfbound::units::A_CRITICAL;
use selfbound::variational::{
    analytic_eigenvalues, fixed_points, integrate_orbit, potential_v, OrbitOptions, VariationalState,
};
use selfbound::Branch;

use crate::commands::{
    default_plane, dominant, orbit_summary, portrait_contours, require_state, run_propagation, write_contours,
    write_orbit, Output, PropagationRun, Report,
};
use crate::config::{Plane, ScenarioConfig};
use crate::error::CliError;

pub const PRESETS: [&str; 11] =
    ["fig1", "fig2", "fig3", "fig4a", "fig4b", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"];

const BRANCHES: [Branch; 2] = [Branch::Stable, Branch::Unstable];

pub fn run_preset(name: &str, cfg: &ScenarioConfig) -> Result<Report, CliError> {
    match name {
        "all" => run_all(cfg),
        "fig4" => {
            let mut r = run_preset("fig4a", cfg)?;
            r.merge(run_preset("fig4b", cfg)?);
            Ok(r)
        }
        _ => {
            let mut out = Output::new(&cfg.output)?;
            match name {
                "fig1" => fig1(&mut out)?,
                "fig2" => fig2(cfg, &mut out)?,
                "fig3" => fig3(&mut out)?,
                "fig4a" => fig4a(&mut out)?,
                "fig4b" => fig4b(&mut out)?,
                "fig5" => fig5(cfg, &mut out)?,
                "fig6" => fig6(cfg, &mut out)?,
                "fig7" => fig7(cfg, &mut out)?,
                "fig8" => fig8(cfg, &mut out)?,
                "fig9" => fig9(&mut out)?,
                "fig10" => fig10(&mut out)?,
                _ => {
                    return Err(CliError::Validation(format!(
                        "unknown preset `{name}` (expected {}, fig4 or all)",
                        PRESETS.join(", ")
                    )))
                }
            }
            Ok(out.report)
        }
    }
}

/// Runs every preset on its own thread; reports are merged in preset order.
fn run_all(cfg: &ScenarioConfig) -> Result<Report, CliError> {
    let results: Vec<Result<Report, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = PRESETS.iter().map(|p| s.spawn(move || run_preset(p, cfg))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(CliError::Other("preset thread panicked".into()))))
            .collect()
    });
    let mut report = Report::default();
    for r in results {
        report.merge(r?);
    }
    Ok(report)
}

fn nan_or(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

fn fig1(out: &mut Output) -> Result<(), CliError> {
    let solver = StationarySolver::default();
    let a_num = solver.critical_scattering()?;
    let mut a_values: Vec<f64> = (1..=117).map(|k| -(k as f64) / 100.0).collect();
    a_values.extend([-1.178, -1.175, -1.025, -1.0245, -1.024, -1.0225]);
    a_values.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut rows = Vec::new();
    for &a in &a_values {
        for b in BRANCHES {
            let var = fixed_points(a).and_then(|p| p.get(b)).map(|p| p.eps);
            let num = match solver.solve_raw_for(a, b) {
                Ok(s) => s.map(|s| s.scaled_eps()),
                Err(e) => {
                    log::warn!("fig1: numeric {} state at a = {a}: {e}", b.name());
                    None
                }
            };
            rows.push((a, b, nan_or(var), nan_or(num)));
        }
    }
    out.write("fig1.csv", |w| {
        writeln!(w, "a,branch,eps_variational,eps_numeric")?;
        for (a, b, v, n) in &rows {
            writeln!(w, "{a:.16e},{},{v:.16e},{n:.16e}", b.name())?;
        }
        Ok(())
    })?;
    out.line(format!("fig1: variational branches meet at a = {A_CRITICAL:.7}, numeric branches at a = {a_num:.7}"));
    Ok(())
}

fn fig2(cfg: &ScenarioConfig, out: &mut Output) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for k in 0..100 {
        let a = -0.2 - (-A_CRITICAL - 0.2) * k as f64 / 100.0;
        for b in BRANCHES {
            let l = dominant(analytic_eigenvalues(a, b)?);
            rows.push((a, b, "variational", l));
        }
    }
    let solver = StationarySolver::default();
    let grid = RadialGrid::new(cfg.n.unwrap_or(2048), cfg.r_max_or_default())?;
    for a in [-0.5, -0.6, -0.7, -0.8, -0.9, -0.95, -1.0, -1.01, -1.02, -1.024] {
        for b in BRANCHES {
            let modes = require_state(&solver, a, b, grid)
                .and_then(|st| solve_modes(&st, &StabilityOptions::default()).map_err(CliError::from));
            match modes {
                Ok(m) => rows.push((a, b, "numeric", m.dominant())),
                Err(e) => log::warn!("fig2: numeric {} modes at a = {a}: {e}", b.name()),
            }
        }
    }
    out.write("fig2.csv", |w| {
        writeln!(w, "a,branch,source,re_lambda,im_lambda")?;
        for (a, b, src, l) in &rows {
            writeln!(w, "{a:.16e},{},{src},{:.16e},{:.16e}", b.name(), l.re, l.im)?;
        }
        Ok(())
    })?;
    out.line(format!("fig2: {} eigenvalue rows", rows.len()));
    Ok(())
}

fn fig3(out: &mut Output) -> Result<(), CliError> {
    for (panel, a) in [("a", -1.0), ("b", -1.18), ("c", -1.3)] {
        let contours = portrait_contours(a, default_plane(Plane::Amplitude))?;
        out.write(&format!("fig3{panel}.csv"), |w| write_contours(w, a, &contours))?;
    }
    let s0 = VariationalState::at_rest(0.3)?;
    let series = integrate_orbit(&s0, -1.0, 100.0, &OrbitOptions::default())?;
    out.write("fig3_orbit.csv", |w| write_orbit(w, &series))?;
    out.line(format!("fig3: orbit a = -1, A_i(0) = 0.3: {}", orbit_summary(&series)));
    Ok(())
}

fn fig4a(out: &mut Output) -> Result<(), CliError> {
    let a = -1.0;
    let hyperbolic = fixed_points(a).and_then(|p| p.unstable).ok_or_else(|| CliError::Other("no hyperbolic point".into()))?;
    // slightly narrower than the hyperbolic point
    let s0 = VariationalState::at_rest(hyperbolic.a_i + 1e-4)?;
    let series = integrate_orbit(&s0, a, 200.0, &OrbitOptions::default())?;
    out.write("fig4a.csv", |w| write_orbit(w, &series))?;
    out.line(format!("fig4a: A_i(0) = {:.6}: {}", s0.a_i, orbit_summary(&series)));
    Ok(())
}

fn fig4b(out: &mut Output) -> Result<(), CliError> {
    let a: f64 = -1.3;
    let ai0 = 1.0 / (6.0 * a) + std::f64::consts::PI / (8.0 * a * a);
    let s0 = VariationalState::at_rest(ai0)?;
    let series = integrate_orbit(&s0, a, 50.0, &OrbitOptions::default())?;
    out.write("fig4b.csv", |w| write_orbit(w, &series))?;
    out.line(format!("fig4b: A_i(0) = {ai0:.5}: {}", orbit_summary(&series)));
    Ok(())
}

/// Defaults of a propagation preset before command-line overrides.
struct Setup {
    n: usize,
    r_max: f64,
    dt: f64,
    t_end: f64,
    fine_start: Option<(f64, f64)>,
    record_interval: f64,
    snapshots: &'static [f64],
}

fn configure(cfg: &ScenarioConfig, s: Setup) -> Result<PropagationConfig, CliError> {
    let grid = RadialGrid::new(cfg.n.unwrap_or(s.n), cfg.r_max.unwrap_or(s.r_max))?;
    let dt = cfg.dt.unwrap_or(s.dt);
    let mut c = PropagationConfig::new(grid, dt, cfg.t_end.unwrap_or(s.t_end));
    c.record_every = cfg.record_every.unwrap_or(((s.record_interval / dt).round() as usize).max(1));
    if let Some(tol) = cfg.drift_tolerance {
        c.drift_tolerance = tol;
    }
    // an explicit dt replaces the staged stepping
    c.fine_start = if cfg.dt.is_some() { None } else { s.fine_start.filter(|(t, _)| *t < c.t_end) };
    c.snapshot_times = s.snapshots.iter().copied().filter(|t| *t <= c.t_end).collect();
    Ok(c)
}

fn fig5(cfg: &ScenarioConfig, out: &mut Output) -> Result<(), CliError> {
    let setup = Setup {
        n: 1024,
        r_max: 60.0,
        dt: 1e-4,
        t_end: 8.0,
        fine_start: None,
        record_interval: 0.01,
        snapshots: &[0.0, 4.0, 5.0, 5.5],
    };
    let config = configure(cfg, setup)?;
    let run = PropagationRun { stem: "fig5", a: -0.85, branch: Branch::Unstable, f: 1.001, config };
    let (ev, rep) = run_propagation(&run, out)?;
    let w4 = ev.series.records.iter().min_by(|x, y| (x.t - 4.0).abs().total_cmp(&(y.t - 4.0).abs())).map(|r| r.width);
    out.line(format!(
        "fig5: width {:.4} at t = 0, {:.4} at t = 4; last resolved t = {:.4}, momentum width grew {:.2}x",
        ev.series.records[0].width,
        nan_or(w4),
        rep.last_time,
        rep.momentum_growth
    ));
    Ok(())
}

fn fig6(cfg: &ScenarioConfig, out: &mut Output) -> Result<(), CliError> {
    let setup = Setup {
        n: 2048,
        r_max: 120.0,
        dt: 1e-3,
        t_end: 80.0,
        fine_start: Some((30.0, 1e-4)),
        record_interval: 0.1,
        snapshots: &[0.0, 25.0, 40.0, 52.0, 60.0, 70.0],
    };
    let config = configure(cfg, setup)?;
    let run = PropagationRun { stem: "fig6", a: -1.0, branch: Branch::Unstable, f: 1.0, config };
    let (ev, _) = run_propagation(&run, out)?;
    let w0 = ev.series.records[0].width;
    let onset = ev.series.records.iter().find(|r| (r.width - w0).abs() > 0.01 * w0).map(|r| r.t);
    out.line(match onset {
        Some(t) => format!("fig6: width leaves the 1% band at t = {t:.2}"),
        None => "fig6: width stayed within 1% for the whole run".to_owned(),
    });
    Ok(())
}

fn fig7(cfg: &ScenarioConfig, out: &mut Output) -> Result<(), CliError> {
    let setup = Setup {
        n: 16384,
        r_max: 2400.0,
        dt: 1e-2,
        t_end: 300.0,
        fine_start: Some((20.0, 5e-4)),
        record_interval: 0.1,
        snapshots: &[0.0, 20.0, 100.0, 240.0, 300.0],
    };
    let config = configure(cfg, setup)?;
    let run = PropagationRun { stem: "fig7", a: -0.85, branch: Branch::Unstable, f: 0.99, config };
    let (ev, _) = run_propagation(&run, out)?;
    let (t, w): (Vec<f64>, Vec<f64>) =
        ev.series.records.iter().filter(|r| r.t >= 100.0).map(|r| (r.t, r.width)).unzip();
    if t.len() > 2 {
        let (slope, _, r2) = selfbound::propagator::linear_fit(&t, &w);
        out.line(format!("fig7: width slope {slope:.5} for t >= 100, R^2 = {r2:.6}"));
    }
    Ok(())
}

fn fig8(cfg: &ScenarioConfig, out: &mut Output) -> Result<(), CliError> {
    let a_setup = Setup {
        n: 8192,
        r_max: 480.0,
        dt: 1e-2,
        t_end: 150.0,
        fine_start: None,
        record_interval: 0.1,
        snapshots: &[],
    };
    let config = configure(cfg, a_setup)?;
    let run = PropagationRun { stem: "fig8a", a: -0.85, branch: Branch::Stable, f: 1.01, config };
    let (_, rep) = run_propagation(&run, out)?;
    out.line(format!("fig8a: width band [{:.4}, {:.4}]", rep.min_width, rep.max_width));
    let b_setup = Setup {
        n: 16384,
        r_max: 2400.0,
        dt: 1e-2,
        t_end: 500.0,
        fine_start: None,
        record_interval: 0.1,
        snapshots: &[],
    };
    let config = configure(cfg, b_setup)?;
    let run = PropagationRun { stem: "fig8b", a: -0.85, branch: Branch::Stable, f: 1.25, config };
    run_propagation(&run, out)?;
    Ok(())
}

fn fig9(out: &mut Output) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for a in [-0.8, -1.0, A_CRITICAL, -1.3] {
        for k in 0..=310 {
            let q = 0.25 + 0.025 * k as f64;
            rows.push((q, a, potential_v(q, a)?));
        }
    }
    out.write("fig9.csv", |w| {
        writeln!(w, "q,a,v")?;
        for (q, a, v) in &rows {
            writeln!(w, "{q:.16e},{a:.16e},{v:.16e}")?;
        }
        Ok(())
    })?;
    out.line("fig9: V(q) for a = -0.8, -1.0, -3pi/8, -1.3");
    Ok(())
}

fn fig10(out: &mut Output) -> Result<(), CliError> {
    let a = -0.8;
    let contours = portrait_contours(a, default_plane(Plane::Canonical))?;
    out.write("fig10.csv", |w| write_contours(w, a, &contours))?;
    out.line(format!("fig10: {} contour levels in the (q, p) plane", contours.len()));
    Ok(())
}
