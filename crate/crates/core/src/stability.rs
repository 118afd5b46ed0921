//! Linear stability of stationary states.
//!
//! Writing `ψ = (ψ̂ + δψ_R + iδψ_I) e^{−iεt}` with `δψ ∝ e^{λt}` and
//! `U = −V_u` gives
//!
//! ```text
//! λ δψ_R =  (−Δ + 8πaψ̂² − U − ε) δψ_I
//! λ δψ_I = −(−Δ + 24πaψ̂² − U − ε) δψ_R + U₁ ψ̂
//! ΔU₁ = −16π ψ̂ δψ_R
//! ```
//!
//! For fixed `λ` the regular solutions form a three-dimensional space,
//! spanned by the solutions with unit `δψ_R(0)`, `δψ_I(0)` and `U₁(0)`.
//! Far out the perturbations decouple into `δψ_R ± iδψ_I ∝ e^{−k± r}/r`
//! with `k± = √(κ² ∓ iλ)`, and `U₁ → C/r`. An eigenvalue is a `λ` for which
//! some combination meets all three decay conditions, i.e. a zero of the
//! 3×3 matching determinant. The global phase mode makes `λ = 0` a double
//! zero, which is divided out.
//!
//! Everything is integrated in the raw units of the stationary solver;
//! eigenvalues scale as `λ = λ_raw / ‖ψ_raw‖⁴`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use roots::{find_root_brent, Convergency};

use crate::error::{domain, Error, Result};
use crate::ode::{Stepper, Tolerances};
use crate::stationary::{RawSolution, StationaryState};
use crate::variational::Branch;

const N: usize = 46;
const FUND: usize = 14;
/// Decay lengths between the matching radius and the boundary point.
const EXTRA_DECAY: f64 = 20.0;
/// Roots below this fraction of `−ε` are attributed to the neutral mode.
const NEUTRAL_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityOptions {
    pub tol: Tolerances,
    /// Sample points of an axis scan.
    pub scan_points: usize,
    /// Relative tolerance of the complex root refinement.
    pub lambda_rtol: f64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self { tol: Tolerances { rtol: 1e-11, atol: 1e-14 }, scan_points: 400, lambda_rtol: 1e-12 }
    }
}

/// Direction of a root scan in the complex `λ` plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Real,
    Imaginary,
}

/// One eigenmode in scaled units.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityMode {
    pub lambda: Complex64,
    /// `(δψ_R(0), δψ_I(0)) = (cos α, sin α e^{iβ})`
    pub alpha: f64,
    pub beta: f64,
    pub u1_0: Complex64,
    /// Mode functions on the state's grid.
    pub d_psi_r: Vec<Complex64>,
    pub d_psi_i: Vec<Complex64>,
    /// `|U₁(0) − 16π∫ψ̂ δψ_R r dr| / |U₁(0)|`; zero for the neutral mode.
    pub u1_residual: f64,
}

/// The dominant pair and the neutral mode of one state.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub a: f64,
    pub branch: Branch,
    /// `λ` and `−λ`.
    pub pair: [StabilityMode; 2],
    pub neutral: StabilityMode,
    /// `|det M(0)|` relative to the product of its row norms.
    pub neutral_residual: f64,
}

impl ModeSet {
    /// `λ` with non-negative real or imaginary part.
    pub fn dominant(&self) -> Complex64 {
        self.pair[0].lambda
    }

    /// CSV rows `a,branch,re_lambda,im_lambda`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for m in self.pair.iter().chain(std::iter::once(&self.neutral)) {
            writeln!(w, "{:.16e},{},{:.16e},{:.16e}", self.a, self.branch.name(), m.lambda.re, m.lambda.im)?;
        }
        Ok(())
    }
}

pub const CSV_HEADER: &str = "a,branch,re_lambda,im_lambda";

#[inline]
fn c(y: &[f64; N], i: usize) -> Complex64 {
    Complex64::new(y[i], y[i + 1])
}

#[inline]
fn put(d: &mut [f64; N], i: usize, v: Complex64) {
    d[i] = v.re;
    d[i + 1] = v.im;
}

/// Values of `(δψ_R, δψ_R', δψ_I, δψ_I', U₁, U₁', 16π∫ψ̂δψ_R r dr)` of one solution.
#[derive(Debug, Clone, Copy)]
struct Fields {
    r: Complex64,
    dr: Complex64,
    i: Complex64,
    di: Complex64,
    u: Complex64,
    du: Complex64,
    integral: Complex64,
}

impl Fields {
    fn read(y: &[f64; N], j: usize) -> Self {
        let b = 4 + FUND * j;
        Self {
            r: c(y, b),
            dr: c(y, b + 2),
            i: c(y, b + 4),
            di: c(y, b + 6),
            u: c(y, b + 8),
            du: c(y, b + 10),
            integral: c(y, b + 12),
        }
    }

    fn combine(y: &[f64; N], coef: &[Complex64; 3]) -> Self {
        let f: Vec<Fields> = (0..3).map(|j| Fields::read(y, j)).collect();
        let mut out = Fields { r: 0.0.into(), dr: 0.0.into(), i: 0.0.into(), di: 0.0.into(), u: 0.0.into(), du: 0.0.into(), integral: 0.0.into() };
        for (fj, cj) in f.iter().zip(coef) {
            out.r += fj.r * cj;
            out.dr += fj.dr * cj;
            out.i += fj.i * cj;
            out.di += fj.di * cj;
            out.u += fj.u * cj;
            out.du += fj.du * cj;
            out.integral += fj.integral * cj;
        }
        out
    }
}

/// Linearized system around one raw stationary solution.
#[derive(Debug, Clone)]
struct Linearization {
    a: f64,
    s: f64,
    psi0: f64,
    r0: f64,
    r_m: f64,
    r_e: f64,
    /// Stationary state at `r_m`, for the analytic continuation beyond it.
    psi_m: f64,
    kbar: f64,
    raw: RawSolution,
    /// `λ_raw = λ · scale`
    scale: f64,
    tol: Tolerances,
}

/// Derivatives of the perturbations of solution `j` given the background.
#[allow(clippy::too_many_arguments)]
fn perturbation_rhs(
    d: &mut [f64; N],
    y: &[f64; N],
    j: usize,
    r: f64,
    psi: f64,
    w: f64,
    a: f64,
    s: f64,
    lam: Complex64,
) {
    let f = Fields::read(y, j);
    let b = 4 + FUND * j;
    let rho = psi * psi;
    let a_plus = 24.0 * PI * a * rho - w - s;
    let a_minus = 8.0 * PI * a * rho - w - s;
    put(d, b, f.dr);
    put(d, b + 2, -2.0 * f.dr / r + a_plus * f.r - f.u * psi + lam * f.i);
    put(d, b + 4, f.di);
    put(d, b + 6, -2.0 * f.di / r + a_minus * f.i - lam * f.r);
    put(d, b + 8, f.du);
    put(d, b + 10, -2.0 * f.du / r - 16.0 * PI * psi * f.r);
    put(d, b + 12, 16.0 * PI * psi * f.r * r);
}

impl Linearization {
    fn new(state: &StationaryState, tol: Tolerances) -> Result<Self> {
        let raw = state.raw.clone();
        let prob = raw_problem(&raw);
        let r0 = prob.0;
        // stationary values at the matching radius
        let p = raw.clone();
        let mut st = Stepper::new(
            move |r, y: &[f64; 4]| {
                let full = [y[0], y[1], y[2], y[3], 0.0, 0.0];
                let d = stationary_rhs(&p, r, &full);
                [d[0], d[1], d[2], d[3]]
            },
            r0,
            prob.1,
            r0,
            tol,
        );
        st.advance_to(raw.r_match)?;
        let y = *st.y();
        let (psi_m, dpsi_m) = (y[0], y[1]);
        if !(psi_m > 0.0) {
            return Err(domain("stationary state is not positive at the matching radius"));
        }
        let kbar = -dpsi_m / psi_m - 1.0 / raw.r_match;
        let k_inf = (-raw.eps).sqrt();
        let q = raw.norm_sq;
        Ok(Self {
            a: raw.a,
            s: raw.s,
            psi0: raw.psi0,
            r0,
            r_m: raw.r_match,
            r_e: raw.r_match + EXTRA_DECAY / k_inf,
            psi_m,
            kbar: kbar.max(0.5 * k_inf),
            raw,
            scale: q * q,
            tol,
        })
    }

    fn background_tail(&self, r: f64) -> (f64, f64) {
        let psi = self.psi_m * (self.r_m / r) * (-self.kbar * (r - self.r_m)).exp();
        (psi, self.raw.u_tail(r) - self.raw.u0)
    }

    fn initial(&self, lam: Complex64) -> [f64; N] {
        let r = self.r0;
        let mut y = [0.0; N];
        let st = raw_problem(&self.raw).1;
        y[..4].copy_from_slice(&st);
        let p0 = self.psi0;
        let a_plus = 24.0 * PI * self.a * p0 * p0 - self.s;
        let a_minus = 8.0 * PI * self.a * p0 * p0 - self.s;
        let units = [
            (Complex64::new(1.0, 0.0), Complex64::default(), Complex64::default()),
            (Complex64::default(), Complex64::new(1.0, 0.0), Complex64::default()),
            (Complex64::default(), Complex64::default(), Complex64::new(1.0, 0.0)),
        ];
        for (j, (r0v, i0v, u0v)) in units.into_iter().enumerate() {
            let b = 4 + FUND * j;
            let cr = (a_plus * r0v - u0v * p0 + lam * i0v) / 6.0;
            let ci = (a_minus * i0v - lam * r0v) / 6.0;
            let cu = -16.0 * PI * p0 * r0v / 6.0;
            put(&mut y, b, r0v + cr * r * r);
            put(&mut y, b + 2, 2.0 * cr * r);
            put(&mut y, b + 4, i0v + ci * r * r);
            put(&mut y, b + 6, 2.0 * ci * r);
            put(&mut y, b + 8, u0v + cu * r * r);
            put(&mut y, b + 10, 2.0 * cu * r);
            put(&mut y, b + 12, 8.0 * PI * p0 * r0v * r * r);
        }
        y
    }

    fn inner_rhs(&self, lam: Complex64) -> impl FnMut(f64, &[f64; N]) -> [f64; N] + '_ {
        move |r, y| {
            let mut d = [0.0; N];
            let full = [y[0], y[1], y[2], y[3], 0.0, 0.0];
            let ds = stationary_rhs(&self.raw, r, &full);
            d[..4].copy_from_slice(&ds[..4]);
            for j in 0..3 {
                perturbation_rhs(&mut d, y, j, r, y[0], y[2], self.a, self.s, lam);
            }
            d
        }
    }

    fn outer_rhs(&self, lam: Complex64) -> impl FnMut(f64, &[f64; N]) -> [f64; N] + '_ {
        move |r, y| {
            let mut d = [0.0; N];
            let (psi, w) = self.background_tail(r);
            for j in 0..3 {
                perturbation_rhs(&mut d, y, j, r, psi, w, self.a, self.s, lam);
            }
            d
        }
    }

    /// Integrates the three fundamental solutions, calling `visit` at each
    /// requested radius (ascending) and returning the state at `r_e`.
    fn integrate(
        &self,
        lam: Complex64,
        radii: &[f64],
        mut visit: impl FnMut(usize, f64, &[f64; N]),
    ) -> Result<[f64; N]> {
        let mut idx = 0;
        let mut inner = Stepper::new(self.inner_rhs(lam), self.r0, self.initial(lam), self.r0, self.tol);
        while idx < radii.len() && radii[idx] <= self.r_m {
            if radii[idx] > self.r0 {
                inner.advance_to(radii[idx])?;
            }
            visit(idx, radii[idx], inner.y());
            idx += 1;
        }
        inner.advance_to(self.r_m)?;
        let y_m = *inner.y();
        let h = inner.step_size();
        let mut outer = Stepper::new(self.outer_rhs(lam), self.r_m, y_m, h, self.tol);
        while idx < radii.len() && radii[idx] <= self.r_e {
            outer.advance_to(radii[idx])?;
            visit(idx, radii[idx], outer.y());
            idx += 1;
        }
        outer.advance_to(self.r_e)?;
        Ok(*outer.y())
    }

    fn decay_rates(&self, lam: Complex64) -> (Complex64, Complex64) {
        let k2 = -(self.raw.u_tail(self.r_e) - self.raw.u0) - self.s;
        let kp = (Complex64::new(k2, 0.0) - Complex64::i() * lam).sqrt();
        let km = (Complex64::new(k2, 0.0) + Complex64::i() * lam).sqrt();
        (kp, km)
    }

    /// Matching matrix: rows are the two decay conditions and the `U₁`
    /// condition, columns the fundamental solutions.
    fn matrix(&self, lam_raw: Complex64) -> Result<[[Complex64; 3]; 3]> {
        let y = self.integrate(lam_raw, &[], |_, _, _| {})?;
        let (kp, km) = self.decay_rates(lam_raw);
        let r = self.r_e;
        let np = (-kp * r).exp();
        let nm = (-km * r).exp();
        let mut m = [[Complex64::default(); 3]; 3];
        for j in 0..3 {
            let f = Fields::read(&y, j);
            let yp = f.r + Complex64::i() * f.i;
            let dyp = f.dr + Complex64::i() * f.di;
            let ym = f.r - Complex64::i() * f.i;
            let dym = f.dr - Complex64::i() * f.di;
            m[0][j] = (yp + r * dyp + kp * r * yp) * np;
            m[1][j] = (ym + r * dym + km * r * ym) * nm;
            m[2][j] = f.u + r * f.du;
        }
        Ok(m)
    }

    /// `det M(λ)/λ²` at scaled `λ`.
    fn reduced_det(&self, lam: Complex64) -> Result<Complex64> {
        let lr = lam * self.scale;
        Ok(det3(&self.matrix(lr)?) / (lr * lr))
    }

    fn mode(&self, lam: Complex64, grid_radii: &[f64]) -> Result<StabilityMode> {
        let lr = lam * self.scale;
        let m = self.matrix(lr)?;
        let v = null_vector(&m);
        // normalize: (cos α, sin α e^{iβ}) with δψ_R(0) real and non-negative
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if !(n > 0.0) {
            return Err(domain("mode has no perturbation at the origin"));
        }
        let phase = if v[0].norm() > 1e-300 { Complex64::from_polar(1.0, -v[0].arg()) } else { Complex64::from_polar(1.0, -v[1].arg()) };
        let coef = [v[0] * phase / n, v[1] * phase / n, v[2] * phase / n];
        let alpha = coef[1].norm().atan2(coef[0].re.max(0.0));
        let beta = if coef[1].norm() > 0.0 { coef[1].arg() } else { 0.0 };
        // samples; beyond r_e the asymptotic decay continues the solution
        let q = self.raw.norm_sq;
        let raw_r: Vec<f64> = grid_radii.iter().map(|x| x / q).collect();
        let mut d_r = vec![Complex64::default(); raw_r.len()];
        let mut d_i = vec![Complex64::default(); raw_r.len()];
        let y_e = self.integrate(lr, &raw_r, |k, _, y| {
            let f = Fields::combine(y, &coef);
            d_r[k] = f.r;
            d_i[k] = f.i;
        })?;
        let fe = Fields::combine(&y_e, &coef);
        let (kp, km) = self.decay_rates(lr);
        let yp = fe.r + Complex64::i() * fe.i;
        let ym = fe.r - Complex64::i() * fe.i;
        for (k, &r) in raw_r.iter().enumerate() {
            if r > self.r_e {
                let p = yp * (self.r_e / r) * (-kp * (r - self.r_e)).exp();
                let mm = ym * (self.r_e / r) * (-km * (r - self.r_e)).exp();
                d_r[k] = 0.5 * (p + mm);
                d_i[k] = (p - mm) / (2.0 * Complex64::i());
            }
        }
        // scaled amplitudes: δψ̂(x) = δψ(x/Q)/Q²
        let s2 = 1.0 / (q * q);
        d_r.iter_mut().chain(d_i.iter_mut()).for_each(|v| *v *= s2);
        let u1_residual = if coef[2].norm() > 0.0 { (coef[2] - fe.integral).norm() / coef[2].norm() } else { 0.0 };
        Ok(StabilityMode { lambda: lam, alpha, beta, u1_0: coef[2], d_psi_r: d_r, d_psi_i: d_i, u1_residual })
    }

    /// Refines a root of the reduced determinant in the full complex plane.
    fn refine(&self, lam0: Complex64, rtol: f64) -> Result<Complex64> {
        let mut x0 = lam0;
        let mut x1 = lam0 * Complex64::new(1.0 + 1e-7, 1e-7);
        let mut f0 = self.reduced_det(x0)?;
        let mut f1 = self.reduced_det(x1)?;
        for _ in 0..60 {
            if f1 == f0 {
                break;
            }
            let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
            if !(x2.re.is_finite() && x2.im.is_finite()) {
                break;
            }
            x0 = x1;
            f0 = f1;
            x1 = x2;
            if (x1 - x0).norm() <= rtol * x1.norm() {
                return Ok(x1);
            }
            f1 = self.reduced_det(x1)?;
        }
        Err(Error::NoConvergence { what: "stability eigenvalue refinement".into(), residual: f1.norm() })
    }
}

fn raw_problem(raw: &RawSolution) -> (f64, [f64; 4]) {
    let p = raw.problem();
    let r0 = p.start_radius();
    let s = p.series(r0);
    (r0, [s[0], s[1], s[2], s[3]])
}

fn stationary_rhs(raw: &RawSolution, r: f64, y: &[f64; 6]) -> [f64; 6] {
    raw.problem().rhs(r, y)
}

fn det3(m: &[[Complex64; 3]; 3]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn cross(a: &[Complex64; 3], b: &[Complex64; 3]) -> [Complex64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Null vector of a (numerically) singular 3×3 matrix: the largest cross
/// product of two rows after scaling every row to unit length.
fn null_vector(m: &[[Complex64; 3]; 3]) -> [Complex64; 3] {
    let mut m = *m;
    for row in m.iter_mut() {
        let n = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            row.iter_mut().for_each(|z| *z /= n);
        }
    }
    let cands = [cross(&m[0], &m[1]), cross(&m[0], &m[2]), cross(&m[1], &m[2])];
    let norm = |v: &[Complex64; 3]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mut best = cands[0];
    for v in &cands[1..] {
        if norm(v) > norm(&best) {
            best = *v;
        }
    }
    best
}

fn row_norm_product(m: &[[Complex64; 3]; 3]) -> f64 {
    m.iter().map(|row| row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).product()
}

/// Right-hand side of the linearized equations for one mode: returns
/// `(λδψ_R, λδψ_I, ΔU₁)` predicted from the mode functions and their radial
/// derivatives, as a residual check.
///
/// Inputs are scaled: `psi` and `u` from the stationary state, `eps`, `a`,
/// and for the perturbation the values `(f, f', f'')` of `δψ_R`, `δψ_I`.
#[allow(clippy::too_many_arguments)]
pub fn linearized_rhs(
    r: f64,
    psi: f64,
    u: f64,
    eps: f64,
    a: f64,
    d_r: [Complex64; 3],
    d_i: [Complex64; 3],
    u1: Complex64,
) -> (Complex64, Complex64) {
    let lap = |f: [Complex64; 3]| f[2] + 2.0 * f[1] / r;
    let rho = psi * psi;
    let lm = -lap(d_i) + (8.0 * PI * a * rho - u - eps) * d_i[0];
    let lp = -lap(d_r) + (24.0 * PI * a * rho - u - eps) * d_r[0];
    (lm, -(lp - u1 * psi))
}

struct AbsTol(f64);

impl Convergency<f64> for AbsTol {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }
    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() <= self.0 * x1.abs().max(x2.abs())
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= 200
    }
}

/// Roots of the reduced matching determinant on one axis in `(0, max]`.
pub fn scan_axis(state: &StationaryState, axis: Axis, max: f64, opts: &StabilityOptions) -> Result<Vec<Complex64>> {
    let lin = Linearization::new(state, opts.tol)?;
    scan_with(&lin, axis, max, opts)
}

fn scan_with(lin: &Linearization, axis: Axis, max: f64, opts: &StabilityOptions) -> Result<Vec<Complex64>> {
    if !(max > 0.0) || opts.scan_points < 4 {
        return Err(domain("scan needs a positive range and at least 4 points"));
    }
    let unit = match axis {
        Axis::Real => Complex64::new(1.0, 0.0),
        Axis::Imaginary => Complex64::new(0.0, 1.0),
    };
    let n = opts.scan_points;
    let xs: Vec<f64> = (1..=n).map(|j| max * (j as f64 / n as f64).powi(2)).collect();
    let vals: Vec<Complex64> = xs.iter().map(|&x| lin.reduced_det(unit * x)).collect::<Result<_>>()?;
    // the determinant keeps a fixed phase along either axis
    let big = vals.iter().copied().fold(Complex64::default(), |m, v| if v.norm() > m.norm() { v } else { m });
    if big.norm() == 0.0 {
        return Err(domain("matching determinant vanishes identically"));
    }
    let rot = big.conj() / big.norm();
    let g: Vec<f64> = vals.iter().map(|v| (v * rot).re).collect();
    let mut roots = Vec::new();
    for k in 0..n - 1 {
        if g[k] == 0.0 {
            roots.push(unit * xs[k]);
        } else if g[k] * g[k + 1] < 0.0 {
            let mut failure = None;
            let x = find_root_brent(
                xs[k],
                xs[k + 1],
                |x| match lin.reduced_det(unit * x) {
                    Ok(v) => (v * rot).re,
                    Err(e) => {
                        failure = Some(e);
                        f64::NAN
                    }
                },
                &mut AbsTol(1e-13),
            );
            if let Some(e) = failure {
                return Err(e);
            }
            if let Ok(x) = x {
                roots.push(unit * x);
            }
        }
    }
    Ok(roots)
}

/// Dominant ± pair and neutral mode of a stationary state.
///
/// The ground state is searched on the imaginary axis below the continuum
/// threshold `|λ| < −ε` (lowest root), the excited state on the real axis
/// (largest root). Each root is then refined off the axis, so the reported
/// `λ` is not constrained to be purely real or imaginary.
pub fn solve_modes(state: &StationaryState, opts: &StabilityOptions) -> Result<ModeSet> {
    let lin = Linearization::new(state, opts.tol)?;
    let kappa2 = -state.eps;
    if !(kappa2 > 0.0) {
        return Err(domain("stationary state must have negative chemical potential"));
    }
    let (axis, max) = match state.branch {
        Branch::Stable => (Axis::Imaginary, 0.98 * kappa2),
        Branch::Unstable => (Axis::Real, (4.0 * kappa2).max(2.0)),
    };
    // remnants of the divided-out neutral zero sit at tiny |λ|
    let floor = NEUTRAL_FLOOR * kappa2;
    let roots: Vec<Complex64> = scan_with(&lin, axis, max, opts)?.into_iter().filter(|z| z.norm() > floor).collect();
    let pick = match state.branch {
        Branch::Stable => roots.first(),
        Branch::Unstable => roots.last(),
    };
    let lam0 = *pick.ok_or_else(|| Error::NoConvergence {
        what: format!("{} eigenvalue scan", state.branch.name()),
        residual: f64::NAN,
    })?;
    let lam = lin.refine(lam0, opts.lambda_rtol)?;
    let radii = state.grid.radii();
    let plus = lin.mode(lam, &radii)?;
    let minus = lin.mode(-lam, &radii)?;
    // neutral mode at exactly λ = 0
    let m0 = lin.matrix(Complex64::default())?;
    let neutral_residual = det3(&m0).norm() / row_norm_product(&m0);
    let neutral = lin.mode(Complex64::default(), &radii)?;
    Ok(ModeSet { a: state.a, branch: state.branch, pair: [plus, minus], neutral, neutral_residual })
}
