//! Adaptive Dormand–Prince 5(4) integrator over fixed-size real state vectors.
//!
//! The stepper advances one accepted step at a time so that callers can
//! inspect the state between steps (event checks, collapse detection,
//! sampling at prescribed abscissae). Integration may run in either
//! direction.

use crate::error::{Error, Result};

/// Relative and absolute error tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between 5th and 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

/// One-step-at-a-time adaptive integrator for `dy/dt = f(t, y)`.
pub struct Stepper<F, const N: usize>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    f: F,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    tol: Tolerances,
    accepted: u64,
    rejected: u64,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        let hc = h * c;
        for i in 0..N {
            out[i] += hc * k[i];
        }
    }
    out
}

impl<F, const N: usize> Stepper<F, N>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    /// Starts at `(t0, y0)` with a trial step `h0` whose sign sets the
    /// integration direction.
    pub fn new(mut f: F, t0: f64, y0: [f64; N], h0: f64, tol: Tolerances) -> Self {
        let k1 = f(t0, &y0);
        Self { f, t: t0, y: y0, k1, h: h0, tol, accepted: 0, rejected: 0 }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Derivative at the current point.
    pub fn dy(&self) -> &[f64; N] {
        &self.k1
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    pub fn stats(&self) -> (u64, u64) {
        (self.accepted, self.rejected)
    }

    /// Takes one accepted step, never passing `t_limit`.
    pub fn step(&mut self, t_limit: f64) -> Result<()> {
        let dir = if t_limit >= self.t { 1.0 } else { -1.0 };
        if self.h * dir <= 0.0 {
            self.h = -self.h;
        }
        let span = t_limit - self.t;
        if span == 0.0 {
            return Ok(());
        }
        let h_min = 16.0 * f64::EPSILON * self.t.abs().max(span.abs().min(1.0));
        loop {
            let mut h = self.h;
            let mut clipped = false;
            if (h - span) * dir >= 0.0 {
                h = span;
                clipped = true;
            }
            if h.abs() < h_min && !clipped {
                return Err(Error::Integration { t: self.t, reason: "step size underflow".into() });
            }
            let (y_new, k7, err) = self.trial(h);
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                if h.abs() < h_min {
                    return Err(Error::Integration {
                        t: self.t,
                        reason: "non-finite state".into(),
                    });
                }
                self.h = 0.25 * h;
                self.rejected += 1;
                continue;
            }
            if err <= 1.0 {
                self.t = if clipped { t_limit } else { self.t + h };
                self.y = y_new;
                self.k1 = k7;
                self.accepted += 1;
                let factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                // a clipped step says nothing about the natural step size
                if !clipped || factor < 1.0 {
                    self.h = h * factor;
                }
                return Ok(());
            }
            self.rejected += 1;
            self.h = h * (SAFETY * err.powf(-0.2)).max(MIN_FACTOR);
            if self.h.abs() < h_min {
                return Err(Error::Integration { t: self.t, reason: "step size underflow".into() });
            }
        }
    }

    /// Steps until exactly `t_target` is reached.
    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        while self.t != t_target {
            self.step(t_target)?;
        }
        Ok(())
    }

    fn trial(&mut self, h: f64) -> ([f64; N], [f64; N], f64) {
        let t = self.t;
        let y = &self.y;
        let k1 = self.k1;
        let k2 = (self.f)(t + C2 * h, &axpy(y, h, &[(A21, &k1)]));
        let k3 = (self.f)(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = (self.f)(t + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = (self.f)(
            t + C5 * h,
            &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = (self.f)(
            t + h,
            &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = (self.f)(t + h, &y_new);
        let mut sum = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.tol.atol + self.tol.rtol * y[i].abs().max(y_new[i].abs());
            sum += (e / sc).powi(2);
        }
        (y_new, k7, (sum / N as f64).sqrt())
    }
}
