//! Numerically exact stationary states by outward shooting.
//!
//! The raw problem fixes `ψ(0) = ψ₀` and integrates
//!
//! ```text
//! ψ'' = −(2/r)ψ' + (8πa ψ² − U − ε) ψ
//! U'' = −(2/r)U' − 8π ψ²
//! ```
//!
//! from the origin. `U = −V_u` is the self-consistent `1/r` potential, so
//! `U(∞) = 0` and `U(0) = 8π∫ψ² r dr`. Only `s = U(0) + ε` enters the
//! integration; the bound state is the separatrix between trajectories
//! that cross zero (`s` too large) and ones that turn up again (`s` too
//! small). The tail beyond the matching radius is the decaying solution
//! of the linear equation with the harmonic continuation of `U`,
//! integrated inward.
//!
//! A raw solution of norm `Q` maps to unit norm by `ψ̂(r) = ψ(r/Q)/Q²`,
//! `a = a_raw Q²`, `ε = ε_raw / Q²`. The map `a_raw ↦ a` has a single
//! minimum, the bifurcation point of the exact problem. The ground
//! state lies on the side `a_raw` above the fold, the excited state below.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;

use num_complex::Complex64;
use roots::{find_root_brent, Convergency};

use crate::error::{domain, Error, Result};
use crate::ode::{Stepper, Tolerances};
use crate::radial::{write_snapshot, RadialGrid, RadialWaveFunction, SpectralOps};
use crate::variational::Branch;

/// Outer limit of a classification shot, in units of the initial length scale.
const SHOT_LIMIT: f64 = 1e4;
const MAX_STEPS: usize = 2_000_000;
/// Decay lengths covered by the tail.
const TAIL_DECAY_LENGTHS: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryOptions {
    pub tol: Tolerances,
    /// `ψ/ψ₀` at which the outward solution hands over to the tail.
    pub psi_match: f64,
    /// Bound on the grid-norm residual of an accepted state.
    pub residual_tol: f64,
    /// Relative tolerance on the scaled scattering length.
    pub a_rtol: f64,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances { rtol: 1e-12, atol: 1e-16 },
            psi_match: 1e-4,
            residual_tol: 1e-8,
            a_rtol: 1e-12,
        }
    }
}

/// How an outward shot ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    /// `ψ` crossed zero: `ε` (or `U(0)`) too large.
    Node { radius: f64 },
    /// `ψ` turned up while positive: `ε` too small.
    TurnsUp { radius: f64 },
    /// Neither happened before `r_max`.
    Undecided,
}

/// Samples of one outward shot at the accepted integration steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Shot {
    pub r: Vec<f64>,
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
    pub u: Vec<f64>,
    pub divergence: Divergence,
}

/// Right-hand side of the raw stationary system, state
/// `[ψ, ψ', W, W', 4π∫ψ²r², 8π∫ψ²r]` with `W = U − U(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RawProblem {
    pub a: f64,
    pub s: f64,
    pub psi0: f64,
}

impl RawProblem {
    pub fn rhs(&self, r: f64, y: &[f64; 6]) -> [f64; 6] {
        let (psi, dpsi, w, dw) = (y[0], y[1], y[2], y[3]);
        let rho = psi * psi;
        [
            dpsi,
            -2.0 * dpsi / r + (8.0 * PI * self.a * rho - w - self.s) * psi,
            dw,
            -2.0 * dw / r - 8.0 * PI * rho,
            4.0 * PI * rho * r * r,
            8.0 * PI * rho * r,
        ]
    }

    /// Natural length of the problem near the origin.
    pub fn length_scale(&self) -> f64 {
        let p2 = self.psi0 * self.psi0;
        1.0 / (1.0 + 8.0 * PI * (self.a.abs() + 1.0) * p2 + self.s.abs()).sqrt()
    }

    pub fn start_radius(&self) -> f64 {
        1e-5 * self.length_scale()
    }

    /// Regular series at small `r`.
    pub fn series(&self, r: f64) -> [f64; 6] {
        let p0 = self.psi0;
        let c = (8.0 * PI * self.a * p0 * p0 - self.s) * p0 / 6.0;
        let cw = -4.0 * PI * p0 * p0 / 3.0;
        [
            p0 + c * r * r,
            2.0 * c * r,
            cw * r * r,
            2.0 * cw * r,
            4.0 * PI * p0 * p0 * r.powi(3) / 3.0,
            4.0 * PI * p0 * p0 * r * r,
        ]
    }

    fn stepper(&self, tol: Tolerances) -> Stepper<impl FnMut(f64, &[f64; 6]) -> [f64; 6], 6> {
        let p = *self;
        let r0 = self.start_radius();
        Stepper::new(move |r, y: &[f64; 6]| p.rhs(r, y), r0, self.series(r0), r0, tol)
    }

    /// Integrates outward until divergence or `r_end`; `visit` sees every step.
    fn run(
        &self,
        r_end: f64,
        tol: Tolerances,
        mut visit: impl FnMut(f64, &[f64; 6]),
    ) -> Result<(Divergence, f64, [f64; 6])> {
        let mut st = self.stepper(tol);
        visit(st.t(), st.y());
        for _ in 0..MAX_STEPS {
            st.step(r_end)?;
            let (r, y) = (st.t(), *st.y());
            visit(r, &y);
            if y[0] <= 0.0 {
                return Ok((Divergence::Node { radius: r }, r, y));
            }
            if y[1] > 0.0 {
                return Ok((Divergence::TurnsUp { radius: r }, r, y));
            }
            if y[0].abs() > 1e200 {
                return Err(Error::Overflow { radius: r });
            }
            if r >= r_end {
                return Ok((Divergence::Undecided, r, y));
            }
        }
        Err(Error::Integration { t: st.t(), reason: "step limit reached".into() })
    }
}

/// One outward shot with `ψ(0) = psi0`, `U(0) = u0` and chemical potential `eps`.
pub fn shoot_once(psi0: f64, u0: f64, eps: f64, a: f64, r_max: f64) -> Result<Shot> {
    if !(psi0 > 0.0 && psi0.is_finite()) {
        return Err(domain(format!("ψ(0) must be positive, got {psi0}")));
    }
    if !(r_max > 0.0) || ![u0, eps, a].iter().all(|v| v.is_finite()) {
        return Err(domain("shot parameters must be finite and r_max positive"));
    }
    let prob = RawProblem { a, s: u0 + eps, psi0 };
    let mut shot = Shot { r: vec![], psi: vec![], dpsi: vec![], u: vec![], divergence: Divergence::Undecided };
    let (div, _, _) = prob.run(r_max, StationaryOptions::default().tol, |r, y| {
        shot.r.push(r);
        shot.psi.push(y[0]);
        shot.dpsi.push(y[1]);
        shot.u.push(u0 + y[2]);
    })?;
    shot.divergence = div;
    Ok(shot)
}

/// Decaying tail beyond the matching radius.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Tail {
    pub r_match: f64,
    pub r_end: f64,
    /// `W(r_m)`, `W'(r_m)` for the harmonic continuation.
    pub w_m: f64,
    pub dw_m: f64,
    pub s: f64,
    /// Amplitude that joins the inward solution to `ψ(r_m)`.
    pub scale: f64,
    /// Tail contributions to `4π∫ψ²r²` and `8π∫ψ²r`.
    pub q: f64,
    pub u: f64,
    /// Log-derivative jump at the matching radius.
    pub mismatch: f64,
}

impl Tail {
    pub fn w(&self, r: f64) -> f64 {
        self.w_m + self.dw_m * self.r_match * self.r_match * (1.0 / self.r_match - 1.0 / r)
    }

    fn kappa_sq(&self, r: f64) -> f64 {
        -self.w(r) - self.s
    }

    fn stepper(&self, tol: Tolerances) -> Result<Stepper<impl FnMut(f64, &[f64; 4]) -> [f64; 4], 4>> {
        let k2 = self.kappa_sq(self.r_end);
        if !(k2 > 0.0) {
            return Err(domain("no bound state: chemical potential is not negative"));
        }
        let t = self.clone();
        let r = self.r_end;
        let f = move |r: f64, y: &[f64; 4]| {
            let rho = y[0] * y[0];
            [y[1], -2.0 * y[1] / r + t.kappa_sq(r) * y[0], -4.0 * PI * rho * r * r, -8.0 * PI * rho * r]
        };
        let y0 = [1.0, -(k2.sqrt() + 1.0 / r), 0.0, 0.0];
        Ok(Stepper::new(f, r, y0, -0.01 * (r - self.r_match), tol))
    }

    fn build(
        r_match: f64,
        y_m: &[f64; 6],
        s: f64,
        tol: Tolerances,
    ) -> Result<Self> {
        let w_inf = y_m[2] + y_m[3] * r_match;
        let k2 = -w_inf - s;
        if !(k2 > 0.0) {
            return Err(domain("no bound state: chemical potential is not negative"));
        }
        let mut t = Tail {
            r_match,
            r_end: r_match + TAIL_DECAY_LENGTHS / k2.sqrt(),
            w_m: y_m[2],
            dw_m: y_m[3],
            s,
            scale: 1.0,
            q: 0.0,
            u: 0.0,
            mismatch: 0.0,
        };
        let mut st = t.stepper(tol)?;
        st.advance_to(r_match)?;
        let yi = *st.y();
        t.scale = y_m[0] / yi[0];
        t.q = yi[2] * t.scale * t.scale;
        t.u = yi[3] * t.scale * t.scale;
        t.mismatch = y_m[1] / y_m[0] - yi[1] / yi[0];
        Ok(t)
    }

    /// `ψ` at descending radii `rs` (all `≥ r_match`).
    fn sample_desc(&self, rs: &[f64], tol: Tolerances) -> Result<Vec<f64>> {
        let mut st = self.stepper(tol)?;
        let mut out = Vec::with_capacity(rs.len());
        for &r in rs {
            if r >= self.r_end {
                out.push(0.0);
                continue;
            }
            st.advance_to(r)?;
            out.push(st.y()[0] * self.scale);
        }
        Ok(out)
    }
}

/// A converged raw solution (`ψ(0) = ψ₀`, unnormalized).
#[derive(Debug, Clone, PartialEq)]
pub struct RawSolution {
    pub a: f64,
    pub psi0: f64,
    /// `U(0) + ε`
    pub s: f64,
    pub eps: f64,
    /// `U(0) = 8π∫ψ²r dr`
    pub u0: f64,
    /// `‖ψ‖²`
    pub norm_sq: f64,
    pub r_match: f64,
    pub(crate) tail: Tail,
}

impl RawSolution {
    pub(crate) fn problem(&self) -> RawProblem {
        RawProblem { a: self.a, s: self.s, psi0: self.psi0 }
    }

    /// Scaled scattering length `a Q²` of the normalized state.
    pub fn scaled_a(&self) -> f64 {
        self.a * self.norm_sq * self.norm_sq
    }

    pub fn scaled_eps(&self) -> f64 {
        self.eps / (self.norm_sq * self.norm_sq)
    }

    /// `ψ` at ascending raw radii.
    pub fn sample(&self, rs: &[f64], tol: Tolerances) -> Result<Vec<f64>> {
        let split = rs.partition_point(|&r| r <= self.r_match);
        let mut out = Vec::with_capacity(rs.len());
        let prob = self.problem();
        let mut st = prob.stepper(tol);
        let r0 = prob.start_radius();
        for &r in &rs[..split] {
            if r <= r0 {
                out.push(prob.series(r.max(0.0))[0]);
                continue;
            }
            st.advance_to(r)?;
            out.push(st.y()[0]);
        }
        let desc: Vec<f64> = rs[split..].iter().rev().copied().collect();
        let mut tail = self.tail.sample_desc(&desc, tol)?;
        tail.reverse();
        out.extend(tail);
        Ok(out)
    }

    /// Jump of `ψ'/ψ` where the outward solution meets the tail.
    pub fn match_mismatch(&self) -> f64 {
        self.tail.mismatch
    }

    /// `U(r)` outside the matching radius.
    pub fn u_tail(&self, r: f64) -> f64 {
        self.u0 + self.tail.w(r)
    }
}

/// Solves the raw problem at fixed `a` and `ψ(0) = psi0`.
pub fn solve_raw(a: f64, psi0: f64, opts: &StationaryOptions) -> Result<RawSolution> {
    if !(a.is_finite() && psi0 > 0.0 && psi0.is_finite()) {
        return Err(domain("raw problem needs finite a and positive ψ(0)"));
    }
    let tol = opts.tol;
    let classify = |s: f64| -> Result<Divergence> {
        let p = RawProblem { a, s, psi0 };
        Ok(p.run(SHOT_LIMIT * p.length_scale(), tol, |_, _| {})?.0)
    };
    // below s_lo the effective potential is positive everywhere and ψ rises at once
    let mut lo = (8.0 * PI * a * psi0 * psi0).min(0.0) - 1.0;
    let mut step = 1.0;
    let mut hi = lo + step;
    loop {
        match classify(hi)? {
            Divergence::Node { .. } => break,
            Divergence::TurnsUp { .. } => {
                lo = hi;
                step *= 2.0;
                hi = lo + step;
            }
            Divergence::Undecided => return Err(no_conv("stationary shooting bracket", hi)),
        }
        if step > 1e12 {
            return Err(no_conv("stationary shooting bracket", hi));
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match classify(mid)? {
            Divergence::Node { .. } => hi = mid,
            Divergence::TurnsUp { .. } => lo = mid,
            Divergence::Undecided => {
                lo = mid;
                break;
            }
        }
    }
    let s = lo;
    let prob = RawProblem { a, s, psi0 };
    // handover radius: first step below the target amplitude, kept well above the
    // floor where the growing solution takes over
    let mut path: Vec<(f64, [f64; 6])> = Vec::new();
    prob.run(SHOT_LIMIT * prob.length_scale(), tol, |r, y| path.push((r, *y)))?;
    let psi_min = path.iter().map(|p| p.1[0]).fold(f64::MAX, f64::min).max(0.0);
    let target = (opts.psi_match * psi0).max(1e3 * psi_min);
    let (r_match, y_m) = path
        .iter()
        .find(|p| p.1[0] <= target && p.1[1] < 0.0)
        .copied()
        .ok_or_else(|| no_conv("stationary matching radius", psi_min))?;
    let tail = Tail::build(r_match, &y_m, s, tol)?;
    let norm_sq = y_m[4] + tail.q;
    let u0 = y_m[5] + tail.u;
    Ok(RawSolution { a, psi0, s, eps: s - u0, u0, norm_sq, r_match, tail })
}

fn no_conv(what: &str, residual: f64) -> Error {
    Error::NoConvergence { what: what.into(), residual }
}

/// Stationary state normalized to unit norm at scaled scattering length `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryState {
    pub grid: RadialGrid,
    /// `ψ̂(r_k)`, real and nodeless.
    pub psi: Vec<f64>,
    pub eps: f64,
    pub a: f64,
    pub branch: Branch,
    /// Self-consistent potential `U = −V_u` at the grid points.
    pub u: Vec<f64>,
    /// Grid-norm residual of the stationary equation.
    pub residual: f64,
    pub raw: RawSolution,
}

impl StationaryState {
    pub fn wave_function(&self) -> RadialWaveFunction {
        RadialWaveFunction::from_real(self.grid, &self.psi).expect("grid-sized samples")
    }

    /// `ν = 1/‖ψ_raw‖²`, relating raw and scaled quantities.
    pub fn nu(&self) -> f64 {
        1.0 / self.raw.norm_sq
    }

    pub fn width(&self) -> f64 {
        self.wave_function().width()
    }

    /// `# eps=<v> a=<v> branch=<name>`
    pub fn sidecar(&self) -> String {
        format!("eps={:.16e} a={:.16e} branch={}", self.eps, self.a, self.branch.name())
    }

    pub fn write_snapshot<W: Write>(&self, w: W) -> std::io::Result<()> {
        write_snapshot(w, &self.wave_function(), &[self.sidecar()])
    }
}

/// Grid-norm of `−Δψ + (8πa|ψ|² + V_u[ψ] − ε)ψ`.
pub fn stationary_residual(psi: &RadialWaveFunction, a: f64, eps: f64) -> Result<f64> {
    let mut ops = SpectralOps::new(*psi.grid());
    let vu = ops.monopolar_potential(psi)?;
    let kin = ops.minus_laplacian(psi.values());
    let res: Vec<f64> = psi
        .values()
        .iter()
        .zip(&kin)
        .zip(&vu)
        .map(|((p, k), v)| (k + p * (8.0 * PI * a * p.norm_sqr() + v - eps)).norm_sqr())
        .collect();
    Ok(psi.grid().integrate(&res).sqrt())
}

/// Solver that remembers the fold of the raw-to-scaled map.
#[derive(Debug, Default)]
pub struct StationarySolver {
    opts: StationaryOptions,
    fold: OnceLock<std::result::Result<(f64, f64), Error>>,
}

impl StationarySolver {
    pub fn new(opts: StationaryOptions) -> Self {
        Self { opts, fold: OnceLock::new() }
    }

    pub fn options(&self) -> &StationaryOptions {
        &self.opts
    }

    fn scaled_a(&self, a_raw: f64) -> Result<f64> {
        Ok(solve_raw(a_raw, 1.0, &self.opts)?.scaled_a())
    }

    /// `(a_raw*, a_cr)`: location and value of the minimum of `a_raw Q²`.
    fn fold(&self) -> Result<(f64, f64)> {
        self.fold
            .get_or_init(|| {
                // geometric scan for a bracket, then golden section
                let mut pts = vec![(0.0, 0.0)];
                let mut x = -0.01;
                loop {
                    pts.push((x, self.scaled_a(x)?));
                    let n = pts.len();
                    if n >= 3 && pts[n - 1].1 > pts[n - 2].1 {
                        break;
                    }
                    x *= 1.5;
                    if x < -1e8 {
                        return Err(no_conv("bifurcation bracket", x));
                    }
                }
                let n = pts.len();
                let (mut lo, mut hi) = (pts[n - 1].0, pts[n - 3].0);
                let g = 0.5 * (5f64.sqrt() - 1.0);
                let mut x1 = hi - g * (hi - lo);
                let mut x2 = lo + g * (hi - lo);
                let mut f1 = self.scaled_a(x1)?;
                let mut f2 = self.scaled_a(x2)?;
                while (hi - lo) > 1e-9 * lo.abs() {
                    if f1 < f2 {
                        hi = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = hi - g * (hi - lo);
                        f1 = self.scaled_a(x1)?;
                    } else {
                        lo = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = lo + g * (hi - lo);
                        f2 = self.scaled_a(x2)?;
                    }
                }
                Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
            })
            .clone()
    }

    /// Scattering length below which no stationary state exists.
    pub fn critical_scattering(&self) -> Result<f64> {
        Ok(self.fold()?.1)
    }

    /// Raw solution whose normalized form has scattering length `a`;
    /// `None` when the branch does not exist there.
    pub fn solve_raw_for(&self, a: f64, branch: Branch) -> Result<Option<RawSolution>> {
        if !a.is_finite() {
            return Err(domain(format!("scattering length must be finite, got {a}")));
        }
        let (a_fold, a_cr) = self.fold()?;
        if a < a_cr {
            return Ok(None);
        }
        let (mut x0, mut x1) = match branch {
            Branch::Stable => (a_fold, 0.0),
            Branch::Unstable => {
                if a >= 0.0 {
                    return Ok(None);
                }
                (2.0 * a_fold, a_fold)
            }
        };
        // widen the bracket away from the fold until it encloses `a`
        loop {
            let far = if branch == Branch::Stable { x1 } else { x0 };
            if self.scaled_a(far)? >= a {
                break;
            }
            match branch {
                Branch::Stable => {
                    x0 = x1;
                    x1 = if x1 == 0.0 { 1.0 } else { 2.0 * x1 }
                }
                Branch::Unstable => {
                    x1 = x0;
                    x0 *= 2.0;
                }
            }
            if x0.abs() > 1e12 || x1 > 1e12 {
                return Err(no_conv("scattering-length bracket", a));
            }
        }
        if a == a_cr {
            return solve_raw(a_fold, 1.0, &self.opts).map(Some);
        }
        let mut failure = None;
        let mut conv = ScatteringConvergency { rtol: self.opts.a_rtol, target: a };
        let root = find_root_brent(
            x0,
            x1,
            |x| match self.scaled_a(x) {
                Ok(g) => g - a,
                Err(e) => {
                    failure = Some(e);
                    f64::NAN
                }
            },
            &mut conv,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let x = root.map_err(|e| no_conv(&format!("scattering-length root ({e})"), a))?;
        solve_raw(x, 1.0, &self.opts).map(Some)
    }

    /// Stationary state on `grid`; `Ok(None)` below the bifurcation point.
    pub fn solve(&self, a: f64, branch: Branch, grid: RadialGrid) -> Result<Option<StationaryState>> {
        let Some(raw) = self.solve_raw_for(a, branch)? else {
            return Ok(None);
        };
        let q = raw.norm_sq;
        let xs = grid.radii();
        let rs: Vec<f64> = xs.iter().map(|x| x / q).collect();
        let psi: Vec<f64> = raw.sample(&rs, self.opts.tol)?.into_iter().map(|v| v / (q * q)).collect();
        let wf = RadialWaveFunction::from_real(grid, &psi)?;
        let eps = raw.scaled_eps();
        let mut ops = SpectralOps::new(grid);
        let u: Vec<f64> = ops.monopolar_potential(&wf)?.into_iter().map(|v| -v).collect();
        let residual = stationary_residual(&wf, a, eps)?;
        if !(residual < self.opts.residual_tol) {
            return Err(no_conv(
                &format!("stationary residual (grid spacing {:.3e} may be too coarse for this state)", grid.dr()),
                residual,
            ));
        }
        Ok(Some(StationaryState { grid, psi, eps, a, branch, u, residual, raw }))
    }
}

struct ScatteringConvergency {
    rtol: f64,
    target: f64,
}

impl Convergency<f64> for ScatteringConvergency {
    fn is_root_found(&mut self, y: f64) -> bool {
        y.abs() <= self.rtol * self.target.abs().max(1e-300)
    }
    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() <= 1e-15 * x1.abs().max(x2.abs())
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= 200
    }
}

/// One-shot convenience around [`StationarySolver::solve`].
pub fn solve_stationary(a: f64, branch: Branch, grid: RadialGrid) -> Result<Option<StationaryState>> {
    StationarySolver::default().solve(a, branch, grid)
}

/// Complex samples of a state, for the propagator.
pub fn to_complex(psi: &[f64]) -> Vec<Complex64> {
    psi.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}
