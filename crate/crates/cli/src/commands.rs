use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use selfbound::propagator::{collapse_monitor, evolve, CollapseReport, Evolution, PropagationConfig, Termination};
use selfbound::radial::{deform, write_snapshot, RadialGrid, RadialWaveFunction};
use selfbound::stability::{solve_modes, StabilityOptions, CSV_HEADER};
use selfbound::stationary::{StationarySolver, StationaryState};
use selfbound::variational::{integrate_orbit, OrbitOptions, OrbitSeries};
use selfbound::variational::{
    classify_fixed_points, phase_portrait, separatrix, Contour, PortraitPlane, PortraitSpec,
};
use selfbound::variational::{analytic_eigenvalues, fixed_points, VariationalState};
use selfbound::Branch;

use crate::config::{Command, Plane, ScenarioConfig};
use crate::error::{exit, CliError};
use crate::figures;

/// Files written and one-line results of a run.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
    pub code: i32,
}

impl Report {
    pub fn merge(&mut self, other: Report) {
        self.files.extend(other.files);
        self.lines.extend(other.lines);
        self.code = self.code.max(other.code);
    }
}

/// Output directory that remembers what was written to it.
pub struct Output {
    dir: PathBuf,
    pub report: Report,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), report: Report::default() })
    }

    pub fn write(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        body(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.report.files.push(path);
        Ok(())
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.report.lines.push(s.into());
    }
}

pub fn run(cfg: &ScenarioConfig) -> Result<Report, CliError> {
    let mut out = Output::new(&cfg.output)?;
    match cfg.command {
        Command::VariationalEvolve => variational_evolve(cfg, &mut out)?,
        Command::FixedPoints => fixed_point_table(cfg, &mut out)?,
        Command::Portrait => portrait(cfg, &mut out)?,
        Command::Stationary => stationary(cfg, &mut out)?,
        Command::StabilityModes => stability_modes(cfg, &mut out)?,
        Command::Propagate => propagate(cfg, &mut out)?,
        Command::Figure => {
            let name = cfg.preset.as_deref().unwrap_or_default();
            return figures::run_preset(name, cfg);
        }
    }
    Ok(out.report)
}

pub fn grid_of(cfg: &ScenarioConfig) -> Result<RadialGrid, CliError> {
    Ok(RadialGrid::new(cfg.n_or_default(), cfg.r_max_or_default())?)
}

pub const ORBIT_HEADER: &str = "t,a_r,a_i,gamma_r,width,energy";

pub fn write_orbit(w: &mut dyn Write, series: &OrbitSeries) -> std::io::Result<()> {
    writeln!(w, "{ORBIT_HEADER}")?;
    for r in &series.records {
        writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", r.t, r.a_r, r.a_i, r.gamma_r, r.width, r.energy)?;
    }
    Ok(())
}

pub fn orbit_summary(series: &OrbitSeries) -> String {
    let e0 = series.records.first().map(|r| r.energy).unwrap_or(0.0);
    let drift = series.records.iter().map(|r| ((r.energy - e0) / e0).abs()).fold(0.0, f64::max);
    match series.collapse_time() {
        Some(tc) => format!("collapse at T_c = {tc:.6}"),
        None => format!("no collapse up to t = {:.3}; relative energy drift {drift:.2e}", series.records.last().map(|r| r.t).unwrap_or(0.0)),
    }
}

fn variational_evolve(cfg: &ScenarioConfig, out: &mut Output) -> Result<(), CliError> {
    let a = cfg.require_a()?;
    let s0 = VariationalState::new(cfg.ar0, cfg.ai0.unwrap_or_default(), 0.0)?;
    let t_end = cfg.t_end.unwrap_or(100.0);
    let series = integrate_orbit(&s0, a, t_end, &OrbitOptions::default())?;
    out.write("variational_evolve.csv", |w| write_orbit(w, &series))?;
    out.line(orbit_summary(&series));
    Ok(())
}

/// Eigenvalue with non-negative real, else imaginary, part.
pub fn dominant(ev: [Complex64; 2]) -> Complex64 {
    if ev[0].re > ev[1].re || (ev[0].re == ev[1].re && ev[0].im >= ev[1].im) {
        ev[0]
    } else {
        ev[1]
    }
}

fn fixed_point_table(cfg: &ScenarioConfig, out: &mut Output) -> Result<(), CliError> {
    let a = cfg.require_a()?;
    let mut rows = Vec::new();
    if let Some(pair) = fixed_points(a) {
        for b in [Branch::Stable, Branch::Unstable] {
            if let Some(fp) = pair.get(b) {
                let lambda = dominant(analytic_eigenvalues(a, b)?);
                rows.push((b, fp, lambda));
            }
        }
    }
    out.write("fixed_points.csv", |w| {
        writeln!(w, "a,branch,a_i,width,eps,re_lambda,im_lambda")?;
        for (b, fp, l) in &rows {
            let width = (0.75 / fp.a_i).sqrt();
            writeln!(w, "{a:.16e},{},{:.16e},{width:.16e},{:.16e},{:.16e},{:.16e}", b.name(), fp.a_i, fp.eps, l.re, l.im)?;
        }
        Ok(())
    })?;
    if rows.is_empty() {
        out.line(format!("a = {a}: no stationary Gaussian (below the bifurcation)"));
    }
    for (b, fp, l) in &rows {
        out.line(format!("{}: A_i = {:.6}, eps = {:.6}, lambda = {:.6}{:+.6}i", b.name(), fp.a_i, fp.eps, l.re, l.im));
    }
    Ok(())
}

pub fn write_contours(w: &mut dyn Write, a: f64, contours: &[Contour]) -> std::io::Result<()> {
    writeln!(w, "a,level,x0,y0,x1,y1")?;
    for c in contours {
        for [(x0, y0), (x1, y1)] in &c.segments {
            writeln!(w, "{a:.16e},{:.16e},{x0:.16e},{y0:.16e},{x1:.16e},{y1:.16e}", c.level)?;
        }
    }
    Ok(())
}

pub fn default_plane(plane: Plane) -> PortraitPlane {
    match plane {
        Plane::Amplitude => PortraitPlane::Amplitude { a_r: (-0.5, 0.5), a_i: (0.02, 0.8) },
        Plane::Canonical => PortraitPlane::Canonical { q: (0.25, 8.0), p: (-1.2, 1.2) },
    }
}

pub const PORTRAIT_NODES: usize = 241;

pub fn portrait_contours(a: f64, plane: PortraitPlane) -> Result<Vec<Contour>, CliError> {
    let spec = PortraitSpec { plane, nx: PORTRAIT_NODES, ny: PORTRAIT_NODES, levels: Vec::new() };
    let mut contours = phase_portrait(a, &spec)?;
    if let Some(s) = separatrix(a, plane, PORTRAIT_NODES, PORTRAIT_NODES)? {
        contours.push(s);
    }
    Ok(contours)
}

fn portrait(cfg: &ScenarioConfig, out: &mut Output) -> Result<(), CliError> {
    let a = cfg.require_a()?;
    let contours = portrait_contours(a, default_plane(cfg.plane))?;
    out.write("portrait.csv", |w| write_contours(w, a, &contours))?;
    for (b, fp, kind) in classify_fixed_points(a) {
        out.line(format!("{}: A_i = {:.6} ({kind:?})", b.name(), fp.a_i));
    }
    Ok(())
}

/// Stationary state on `grid`; absence is a validation failure.
pub fn require_state(solver: &StationarySolver, a: f64, b: Branch, grid: RadialGrid) -> Result<StationaryState, CliError> {
    match solver.solve(a, b, grid)? {
        Some(s) => Ok(s),
        None => {
            let a_cr = solver.critical_scattering()?;
            Err(CliError::Validation(format!(
                "no {} stationary state at a = {a} (states exist for a > {a_cr:.7}{})",
                b.name(),
                if b == Branch::Unstable { " and a < 0" } else { "" }
            )))
        }
    }
}

fn stationary(cfg: &ScenarioConfig, out: &mut Output) -> Result<(), CliError> {
    let a = cfg.require_a()?;
    let b = cfg.require_branch()?;
    let st = require_state(&StationarySolver::default(), a, b, grid_of(cfg)?)?;
    out.write(&format!("stationary_{}.dat", b.name()), |w| st.write_snapshot(w))?;
    out.line(format!("{}: eps = {:.10}, width = {:.6}, residual = {:.2e}", b.name(), st.eps, st.width(), st.residual));
    Ok(())
}

fn stability_modes(cfg: &ScenarioConfig, out: &mut Output) -> Result<(), CliError> {
    let a = cfg.require_a()?;
    let branches = match cfg.branch {
        Some(b) => vec![b],
        None => vec![Branch::Stable, Branch::Unstable],
    };
    let solver = StationarySolver::default();
    let grid = grid_of(cfg)?;
    let mut sets = Vec::new();
    for b in branches {
        let st = require_state(&solver, a, b, grid)?;
        sets.push(solve_modes(&st, &StabilityOptions::default())?);
    }
    out.write("stability.csv", |w| {
        writeln!(w, "{CSV_HEADER}")?;
        sets.iter().try_for_each(|s| s.write_csv(&mut *w))
    })?;
    for s in &sets {
        let l = s.dominant();
        out.line(format!("{}: lambda = {:.8}{:+.8}i, neutral residual {:.1e}", s.branch.name(), l.re, l.im, s.neutral_residual));
    }
    Ok(())
}

/// One propagation with its outputs: `<stem>.csv`, `<stem>_t<t>.dat` per
/// snapshot time and `<stem>_final.dat`.
pub struct PropagationRun<'a> {
    pub stem: &'a str,
    pub a: f64,
    pub branch: Branch,
    pub f: f64,
    pub config: PropagationConfig,
}

pub fn initial_state(solver: &StationarySolver, a: f64, b: Branch, f: f64, grid: RadialGrid) -> Result<RadialWaveFunction, CliError> {
    let st = require_state(solver, a, b, grid)?;
    Ok(if f == 1.0 { st.wave_function() } else { deform(&st.wave_function(), f)? })
}

pub fn run_propagation(run: &PropagationRun, out: &mut Output) -> Result<(Evolution, CollapseReport), CliError> {
    let psi0 = initial_state(&StationarySolver::default(), run.a, run.branch, run.f, run.config.grid)?;
    let ev = evolve(&psi0, run.a, &run.config)?;
    let report = collapse_monitor(&ev.series, &ev.termination);
    out.write(&format!("{}.csv", run.stem), |w| ev.series.write_csv(w))?;
    for (t, psi) in &ev.snapshots {
        let meta = [format!("t={t:.6} a={:.16e} f={} branch={}", run.a, run.f, run.branch.name())];
        out.write(&format!("{}_t{t:.1}.dat", run.stem), |w| write_snapshot(w, psi, &meta))?;
    }
    let t_last = ev.series.records.last().map(|r| r.t).unwrap_or(0.0);
    let meta = [format!("t={t_last:.6} a={:.16e} f={} branch={}", run.a, run.f, run.branch.name())];
    out.write(&format!("{}_final.dat", run.stem), |w| write_snapshot(w, &ev.psi, &meta))?;
    let stop = match ev.termination {
        Termination::Completed => "completed".to_owned(),
        Termination::GridViolation { space, t, ratio } => format!("stopped at t = {t:.4} ({space} edge ratio {ratio:.1e})"),
    };
    out.line(format!(
        "{}: a = {}, {} f = {}: {}, class {}, width {:.4}..{:.4}, energy drift {:.2e}{}",
        run.stem,
        run.a,
        run.branch.name(),
        run.f,
        stop,
        report.class.name(),
        report.min_width,
        report.max_width,
        ev.series.energy_drift(),
        if ev.converged { "" } else { " (above tolerance; reduce dt)" }
    ));
    Ok((ev, report))
}

fn propagate(cfg: &ScenarioConfig, out: &mut Output) -> Result<(), CliError> {
    let a = cfg.require_a()?;
    let branch = cfg.require_branch()?;
    let dt = cfg.dt.unwrap_or(selfbound::propagator::DEFAULT_DT);
    let mut config = PropagationConfig::new(grid_of(cfg)?, dt, cfg.t_end.unwrap_or(50.0));
    if let Some(k) = cfg.record_every {
        config.record_every = k;
    }
    if let Some(tol) = cfg.drift_tolerance {
        config.drift_tolerance = tol;
    }
    let run = PropagationRun { stem: "propagate", a, branch, f: cfg.f, config };
    let (ev, _) = run_propagation(&run, out)?;
    out.report.code = if ev.violation().is_some() {
        exit::GRID_VIOLATION
    } else if !ev.converged {
        exit::NO_CONVERGENCE
    } else {
        exit::SUCCESS
    };
    Ok(())
}
