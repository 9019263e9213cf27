//! Unit-CFL Strang splitting for
//!   i(u_t + u_x) + v + u|v|^2 = 0,   i(v_t - v_x) + u + |u|^2 v = 0.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::core::FieldState;
use crate::error::{Error, Result};

/// Recorded in run metadata.
pub const STRANG_ORDER: &str = "C(dt/2) M(dt/2) T(dt) M(dt/2) C(dt/2)";

/// Boundary amplitude above which wrap-around/outflow loss is flagged.
pub const BOUNDARY_WARN: f64 = 1e-10;

const CHUNK: usize = 8192;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepReport {
    /// Largest |u|, |v| seen in the two end cells.
    pub boundary_max: f64,
}

impl StepReport {
    pub fn contaminated(&self) -> bool {
        self.boundary_max > BOUNDARY_WARN
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveReport {
    pub steps: usize,
    pub charge_initial: f64,
    pub charge_final: f64,
    pub boundary_max: f64,
}

impl EvolveReport {
    pub fn relative_drift(&self) -> f64 {
        if self.charge_initial == 0.0 {
            (self.charge_final - self.charge_initial).abs()
        } else {
            ((self.charge_final - self.charge_initial) / self.charge_initial).abs()
        }
    }
}

pub fn charge(state: &FieldState) -> f64 {
    let dens = |k: usize| state.u[k].norm_sqr() + state.v[k].norm_sqr();
    let n = state.len();
    if n == 0 {
        return 0.0;
    }
    let mut s = 0.0;
    for k in 0..n {
        s += dens(k);
    }
    s -= 0.5 * (dens(0) + dens(n - 1));
    s * state.dx
}

fn boundary_max(u: &[C64], v: &[C64]) -> f64 {
    let n = u.len();
    [u[0], u[n - 1], v[0], v[n - 1]].iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[inline]
fn mass(u: &mut C64, v: &mut C64, c: f64, s: f64) {
    let (a, b) = (*u, *v);
    *u = C64::new(a.re * c - b.im * s, a.im * c + b.re * s);
    *v = C64::new(b.re * c - a.im * s, b.im * c + a.re * s);
}

#[inline]
fn cubic(u: &mut C64, v: &mut C64, s: f64) {
    let (pu, pv) = (u.norm_sqr(), v.norm_sqr());
    let (sv, cv) = (s * pv).sin_cos();
    let (su, cu) = (s * pu).sin_cos();
    *u *= C64::new(cv, sv);
    *v *= C64::new(cu, su);
}

fn pointwise<F: Fn(&mut C64, &mut C64) + Sync>(u: &mut [C64], v: &mut [C64], f: F) {
    u.par_chunks_mut(CHUNK).zip(v.par_chunks_mut(CHUNK)).for_each(|(uc, vc)| {
        for (a, b) in uc.iter_mut().zip(vc.iter_mut()) {
            f(a, b);
        }
    });
}

/// Exact shift along characteristics; `dir = +1` moves u right and v left.
fn transport(u: &mut [C64], v: &mut [C64], dir: i32) {
    let n = u.len();
    let zero = C64::new(0.0, 0.0);
    if dir > 0 {
        u.copy_within(0..n - 1, 1);
        u[0] = zero;
        v.copy_within(1..n, 0);
        v[n - 1] = zero;
    } else {
        u.copy_within(1..n, 0);
        u[n - 1] = zero;
        v.copy_within(0..n - 1, 1);
        v[0] = zero;
    }
}

fn check_dt(state: &FieldState, dt: f64) -> Result<i32> {
    if (dt.abs() - state.dx).abs() > 1e-12 * state.dx {
        return Err(Error::Contract(format!("unit CFL requires |dt| == dx (dt={dt}, dx={})", state.dx)));
    }
    Ok(if dt > 0.0 { 1 } else { -1 })
}

/// One Strang step. A negative `dt = -dx` applies the inverse step.
pub fn split_step(state: &FieldState, dt: f64) -> Result<(FieldState, StepReport)> {
    let dir = check_dt(state, dt)?;
    let mut s = state.clone();
    let half = 0.5 * dt;
    let (sh, ch) = half.sin_cos();
    pointwise(&mut s.u, &mut s.v, |a, b| {
        cubic(a, b, half);
        mass(a, b, ch, sh);
    });
    transport(&mut s.u, &mut s.v, dir);
    pointwise(&mut s.u, &mut s.v, |a, b| {
        mass(a, b, ch, sh);
        cubic(a, b, half);
    });
    s.t = state.t + dt;
    let report = StepReport { boundary_max: boundary_max(&s.u, &s.v) };
    Ok((s, report))
}

/// Number of unit-CFL steps from `state.t` to `t_final`.
pub fn step_count(state: &FieldState, t_final: f64) -> Result<usize> {
    if t_final < state.t {
        return Err(Error::Contract("t_final precedes state.t".into()));
    }
    let span = t_final - state.t;
    let n = (span / state.dx).round();
    if (span - n * state.dx).abs() > 1e-12 * t_final.abs().max(1.0) {
        return Err(Error::Contract(format!(
            "t_final - t = {} is not a multiple of dx = {}",
            t_final - state.t,
            state.dx
        )));
    }
    Ok(n as usize)
}

/// Repeated split steps, with the half cubic substeps of neighbouring steps
/// merged. Agrees with iterating `split_step` up to rounding.
pub fn evolve(state: &FieldState, t_final: f64) -> Result<(FieldState, EvolveReport)> {
    let n = step_count(state, t_final)?;
    let q0 = charge(state);
    let mut s = state.clone();
    let mut bmax = 0.0f64;
    if n > 0 {
        let h = s.dx;
        let (sh, ch) = (0.5 * h).sin_cos();
        pointwise(&mut s.u, &mut s.v, |a, b| {
            cubic(a, b, 0.5 * h);
            mass(a, b, ch, sh);
        });
        for k in 0..n {
            transport(&mut s.u, &mut s.v, 1);
            if k + 1 < n {
                pointwise(&mut s.u, &mut s.v, |a, b| {
                    mass(a, b, ch, sh);
                    cubic(a, b, h);
                    mass(a, b, ch, sh);
                });
            } else {
                pointwise(&mut s.u, &mut s.v, |a, b| {
                    mass(a, b, ch, sh);
                    cubic(a, b, 0.5 * h);
                });
            }
            bmax = bmax.max(boundary_max(&s.u, &s.v));
        }
        s.t = state.t + n as f64 * h;
    }
    let report = EvolveReport { steps: n, charge_initial: q0, charge_final: charge(&s), boundary_max: bmax };
    Ok((s, report))
}

/// Evolve through an ascending list of times, returning a snapshot at each.
pub fn evolve_snapshots(state: &FieldState, times: &[f64]) -> Result<Vec<FieldState>> {
    let mut out = Vec::with_capacity(times.len());
    let mut cur = state.clone();
    for &t in times {
        let (next, _) = evolve(&cur, t)?;
        cur = next;
        out.push(cur.clone());
    }
    Ok(out)
}

/// Domain half-width recommended for data supported in [-support, support].
pub fn default_half_width(support: f64, t_final: f64) -> f64 {
    support + t_final + 8.0
}
