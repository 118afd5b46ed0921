//! Acceptance suite. Runs every criterion in sequence, prints one
//! `PASS`/`FAIL` line each and exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use selfbound::propagator::{collapse_monitor, evolve, Evolution, PropagationConfig, RunClass, Termination};
use selfbound::radial::{deform, gaussian_state, monopolar_potential, RadialGrid};
use selfbound::stability::{solve_modes, StabilityOptions};
use selfbound::stationary::{solve_stationary, StationaryState};
use selfbound::units::A_CRITICAL;
use selfbound::variational::{
    analytic_eigenvalues, collapse_time, eigenvalues_2x2, eom_rhs, fixed_points, integrate_orbit, jacobian,
    CollapseOutcome, OrbitOptions, VariationalState,
};
use selfbound::{Branch, Error};
use statrs::function::erf::erf;

use common::{fit_line, l2_distance, ImaginaryTime};

type Outcome = Result<(bool, String), Error>;

fn default_grid() -> RadialGrid {
    RadialGrid::new(1024, 60.0).expect("valid grid")
}

fn state(a: f64, branch: Branch, grid: RadialGrid) -> Result<StationaryState, Error> {
    solve_stationary(a, branch, grid)?.ok_or_else(|| Error::Domain(format!("no {} state at a = {a}", branch.name())))
}

fn propagate(a: f64, branch: Branch, f: f64, grid: RadialGrid, cfg: PropagationConfig) -> Result<Evolution, Error> {
    let s = state(a, branch, grid)?;
    evolve(&deform(&s.wave_function(), f)?, a, &cfg)
}

fn width_at(run: &Evolution, t: f64) -> Option<f64> {
    run.series.records.iter().find(|r| (r.t - t).abs() < 1e-9).map(|r| r.width)
}

fn bifurcation() -> Outcome {
    let above = fixed_points(-1.17809).is_some_and(|p| p.unstable.is_some());
    let below = fixed_points(-1.17811).is_none();
    // locate the fold by bisection on existence alone
    let (mut lo, mut hi) = (-1.2, -1.1);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if fixed_points(mid).is_some_and(|p| p.unstable.is_some()) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let four = ((hi * 1e4).round() - (-3.0 * PI / 8.0 * 1e4).round()).abs() < 0.5;
    let ok = above && below && four && (A_CRITICAL + 3.0 * PI / 8.0).abs() < 1e-15;
    Ok((ok, format!("pair at -1.17809: {above}, none at -1.17811: {below}, fold {hi:.8} vs -3pi/8 = {:.8}", -3.0 * PI / 8.0)))
}

fn variational_collapse() -> Outcome {
    let s0 = VariationalState::at_rest(0.10416)?;
    match collapse_time(&s0, -1.3, 50.0, &OrbitOptions::default())? {
        CollapseOutcome::Collapse(tc) => Ok(((tc - 9.2522).abs() <= 1e-3, format!("T_c = {tc:.6} (target 9.2522 +- 1e-3)"))),
        other => Ok((false, format!("no collapse: {other:?}"))),
    }
}

/// Jacobian of the `(A_r, A_i)` flow by Richardson-extrapolated central differences.
fn numeric_jacobian(a: f64, a_i: f64) -> Result<[[f64; 2]; 2], Error> {
    let rhs = |x: f64, y: f64| -> Result<[f64; 2], Error> {
        let d = eom_rhs(&VariationalState::new(x, y, 0.0)?, a)?;
        Ok([d[0], d[1]])
    };
    let central = |h: f64, k: usize| -> Result<[f64; 2], Error> {
        let (p, m) = if k == 0 { (rhs(h, a_i)?, rhs(-h, a_i)?) } else { (rhs(0.0, a_i + h)?, rhs(0.0, a_i - h)?) };
        Ok([(p[0] - m[0]) / (2.0 * h), (p[1] - m[1]) / (2.0 * h)])
    };
    let h = 1e-3 * a_i;
    let mut j = [[0.0; 2]; 2];
    for k in 0..2 {
        let (c1, c2) = (central(h, k)?, central(0.5 * h, k)?);
        for row in 0..2 {
            j[row][k] = (4.0 * c2[row] - c1[row]) / 3.0;
        }
    }
    Ok(j)
}

fn eigenvalue_consistency() -> Outcome {
    let (mut worst, mut worst_fd) = (0.0_f64, 0.0_f64);
    let mut shape = true;
    for k in 0..50 {
        let a = -0.2 - (3.0 * PI / 8.0 - 0.2) * k as f64 / 50.0;
        let pair = fixed_points(a).ok_or_else(|| Error::Domain(format!("no fixed points at a = {a}")))?;
        for branch in [Branch::Stable, Branch::Unstable] {
            let lam = analytic_eigenvalues(a, branch)?;
            let jac = eigenvalues_2x2(&jacobian(a, branch)?);
            let a_i = pair.get(branch).expect("both branches above the fold").a_i;
            let fd = eigenvalues_2x2(&numeric_jacobian(a, a_i)?);
            let key = |z: &Complex64| z.re + z.im;
            let mut x = lam.to_vec();
            let mut y = jac.to_vec();
            let mut z = fd.to_vec();
            for v in [&mut x, &mut y, &mut z] {
                v.sort_by(|p, q| key(p).total_cmp(&key(q)));
            }
            for i in 0..2 {
                worst = worst.max((x[i] - y[i]).norm());
                worst_fd = worst_fd.max((x[i] - z[i]).norm() / x[i].norm());
            }
            shape &= match branch {
                Branch::Stable => lam[0].re == 0.0 && lam[0].im > 0.0,
                Branch::Unstable => lam[0].im == 0.0 && lam[0].re > 0.0,
            };
        }
    }
    let ok = worst < 1e-10 && worst_fd < 1e-7 && shape;
    Ok((ok, format!("max |lambda_jac - lambda_formula| = {worst:.2e}, finite-difference rel {worst_fd:.2e}, imaginary/real split: {shape}")))
}

fn energy_conservation(oscillating: &Evolution) -> Outcome {
    let a = -1.0;
    let s0 = VariationalState::at_rest(1.1 * fixed_points(a).expect("above fold").stable.a_i)?;
    let orbit = integrate_orbit(&s0, a, 200.0, &OrbitOptions::default())?;
    let e0 = orbit.records[0].energy;
    let var = orbit.records.iter().map(|r| ((r.energy - e0) / e0).abs()).fold(0.0, f64::max);
    let recs: Vec<_> = oscillating.series.records.iter().filter(|r| r.t <= 50.0 + 1e-9).collect();
    let t_last = recs.last().map_or(0.0, |r| r.t);
    let num = recs.iter().map(|r| (r.energy - recs[0].energy).abs()).fold(0.0, f64::max);
    let ok = var < 1e-8 && num < 1e-6 && t_last >= 50.0 - 1e-9;
    Ok((ok, format!("variational rel drift {var:.2e} over t=200; split-operator drift {num:.2e} over t={t_last:.1} at dt=1e-2")))
}

fn monopolar_oracle() -> Outcome {
    let grid = default_grid();
    let (mut worst, mut worst_mean) = (0.0_f64, 0.0_f64);
    for a_i in [0.05, 0.1, 0.3] {
        let psi = gaussian_state(grid, Complex64::new(0.0, a_i), true)?;
        let vu = monopolar_potential(&psi)?;
        for (r, v) in grid.radii().iter().zip(&vu) {
            worst = worst.max((v + 2.0 / r * erf((2.0 * a_i).sqrt() * r)).abs());
        }
        let dens = psi.density();
        let mean = grid.integrate(&dens.iter().zip(&vu).map(|(d, v)| d * v).collect::<Vec<_>>());
        worst_mean = worst_mean.max((mean + 4.0 * (a_i / PI).sqrt()).abs());
    }
    Ok((worst < 1e-6 && worst_mean < 1e-8, format!("max |V_u - erf form| = {worst:.2e}, |<V_u> + 4 sqrt(A_i/pi)| = {worst_mean:.2e}")))
}

fn stationary_fidelity() -> Outcome {
    let grid = default_grid();
    let g = state(-1.0, Branch::Stable, grid)?;
    let oracle = ImaginaryTime::new(grid.n(), grid.r_max()).solve(-1.0);
    let d = l2_distance(&oracle.r, &g.psi, &oracle.psi);
    let mut dev = [0.0; 2];
    for (k, branch) in [Branch::Stable, Branch::Unstable].into_iter().enumerate() {
        let s = state(-1.0, branch, grid)?;
        let run = evolve(&s.wave_function(), -1.0, &PropagationConfig::new(grid, 1e-3, 10.0))?;
        if run.termination != Termination::Completed {
            return Ok((false, format!("{} run stopped: {:?}", branch.name(), run.termination)));
        }
        dev[k] = run.series.widths().iter().map(|w| (w / s.width() - 1.0).abs()).fold(0.0, f64::max);
    }
    let ok = d < 1e-6 && dev.iter().all(|&x| x < 0.01);
    Ok((ok, format!("L2 to imaginary-time oracle {d:.2e}; width deviation to t=10: ground {:.2e}, excited {:.2e}", dev[0], dev[1])))
}

fn mode_structure() -> Outcome {
    let grid = default_grid();
    let opts = StabilityOptions::default();
    let g = solve_modes(&state(-1.0, Branch::Stable, grid)?, &opts)?;
    let e = solve_modes(&state(-1.0, Branch::Unstable, grid)?, &opts)?;
    let (lg, le) = (g.dominant(), e.dominant());
    let imaginary = lg.re.abs() <= 1e-6 * lg.norm() && lg.im > 0.0;
    let real = le.im.abs() <= 1e-6 * le.norm() && le.re > 0.0;
    let neutral = [&g, &e].iter().all(|m| m.neutral.lambda.norm() == 0.0 && m.neutral_residual < 1e-6);
    let path = [-0.95, -1.0, -1.02, -1.024, -1.025];
    let mut trend = true;
    let mut ends = Vec::new();
    for branch in [Branch::Stable, Branch::Unstable] {
        let mags = path
            .iter()
            .map(|&a| Ok(solve_modes(&state(a, branch, grid)?, &opts)?.dominant().norm()))
            .collect::<Result<Vec<f64>, Error>>()?;
        trend &= mags.windows(2).all(|w| w[1] < w[0]) && mags[4] < 0.4 * mags[0];
        ends.push((mags[0], mags[4]));
    }
    let ok = imaginary && real && neutral && trend;
    Ok((
        ok,
        format!(
            "ground {lg:.6}, excited {le:.6}, neutral mode: {neutral}, |lambda| -0.95 -> -1.025: ground {:.4} -> {:.4}, excited {:.4} -> {:.4}",
            ends[0].0, ends[0].1, ends[1].0, ends[1].1
        ),
    ))
}

fn excited_onset() -> Outcome {
    let cfg = PropagationConfig::new(default_grid(), 1e-4, 60.0);
    let run = propagate(-1.0, Branch::Unstable, 1.0, default_grid(), cfg)?;
    let w0 = run.series.records[0].width;
    let departure = run.series.records.iter().find(|r| (r.width / w0 - 1.0).abs() > 0.01).map(|r| r.t);
    let ok = departure.is_some_and(|t| t >= 10.0);
    let shown = departure.map_or("none".to_string(), |t| format!("{t:.2}"));
    Ok((ok, format!("plateau until width leaves the 1% band at t = {shown}; stopped {:?}", run.termination)))
}

fn propagation_checks(oscillating: &Evolution) -> Outcome {
    // collapse through the 1.44 waypoint
    let mut cfg = PropagationConfig::new(default_grid(), 1e-4, 8.0);
    cfg.record_every = 100;
    let collapsing = propagate(-0.85, Branch::Unstable, 1.001, default_grid(), cfg)?;
    let w4 = width_at(&collapsing, 4.0).unwrap_or(f64::NAN);
    let class = collapse_monitor(&collapsing.series, &collapsing.termination).class;
    let collapse = (w4 - 1.44).abs() <= 0.02 && class == RunClass::Collapsing;

    let w = oscillating.series.widths();
    let (lo, hi) = w.iter().fold((f64::MAX, f64::MIN), |(l, h), &x| (l.min(x), h.max(x)));
    let band = (lo / 3.336 - 1.0).abs() <= 0.01 && (hi / 3.385 - 1.0).abs() <= 0.01;
    let band_done = oscillating.termination == Termination::Completed;

    let grid = RadialGrid::new(16384, 2400.0)?;
    let mut cfg = PropagationConfig::new(grid, 1e-2, 300.0);
    cfg.fine_start = Some((20.0, 5e-4));
    let growing = propagate(-0.85, Branch::Unstable, 0.99, grid, cfg)?;
    let (t, y): (Vec<f64>, Vec<f64>) =
        growing.series.records.iter().filter(|r| (100.0..=300.0).contains(&r.t)).map(|r| (r.t, r.width)).unzip();
    let covered = t.last().is_some_and(|&x| x >= 300.0 - 1e-9) && t.first().is_some_and(|&x| x <= 100.0 + 1e-9);
    let (slope, r2) = if t.len() > 2 { fit_line(&t, &y) } else { (f64::NAN, f64::NAN) };
    let linear = covered && r2 > 0.99;

    let ok = collapse && band && band_done && linear;
    Ok((
        ok,
        format!(
            "f=1.001: width(4) = {w4:.4}, {}; f=1.01: band [{lo:.4}, {hi:.4}]; f=0.99: slope {slope:.4}, R^2 {r2:.5} on [100, 300]",
            class.name()
        ),
    ))
}

fn deformation_norm() -> Outcome {
    let grid = default_grid();
    let mut worst = 0.0_f64;
    for branch in [Branch::Stable, Branch::Unstable] {
        let psi = state(-0.85, branch, grid)?.wave_function();
        for f in [0.99, 1.001, 1.01, 1.25] {
            worst = worst.max((deform(&psi, f)?.norm_sq() - psi.norm_sq()).abs());
        }
    }
    Ok((worst < 1e-8, format!("max |norm change| = {worst:.2e}")))
}

fn main() -> ExitCode {
    // shared by the conservation and band criteria
    let oscillating = {
        let grid = RadialGrid::new(8192, 480.0).expect("valid grid");
        propagate(-0.85, Branch::Stable, 1.01, grid, PropagationConfig::new(grid, 1e-2, 150.0))
    };
    let with_oscillating = |f: fn(&Evolution) -> Outcome| -> Outcome {
        match &oscillating {
            Ok(run) => f(run),
            Err(e) => Err(e.clone()),
        }
    };

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("bifurcation point", Box::new(bifurcation)),
        ("variational collapse time", Box::new(variational_collapse)),
        ("eigenvalue consistency", Box::new(eigenvalue_consistency)),
        ("energy conservation", Box::new(|| with_oscillating(energy_conservation))),
        ("spectral 1/r oracle", Box::new(monopolar_oracle)),
        ("stationary-state fidelity", Box::new(stationary_fidelity)),
        ("linearized-mode structure", Box::new(mode_structure)),
        ("oscillation onset after plateau", Box::new(excited_onset)),
        ("quantitative propagation checks", Box::new(|| with_oscillating(propagation_checks))),
        ("deformation norm invariance", Box::new(deformation_norm)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {detail} [{:.1} s]", k + 1, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
