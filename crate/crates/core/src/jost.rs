//! Jost solutions of the transformed spectral problems
//!
//!   Psi_x = L(w) Psi,   Psi-hat_x = L-hat(z) Psi-hat,
//!
//! with the coefficient matrices hard-coded (see docs/lax_transform.md).
//! Both are written as -i k sigma_3 + A0(x) + A1(x)/s with s = w or z and
//! k = (w - 1/w)/4 on the w-side, k = -(z - 1/z)/4 on the z-side.
//!
//! The potential is band-limited interpolated (FFT zero padding) onto
//! refined grids, so every RK4 stage sees exact coefficient samples and
//! Richardson extrapolation between step h and 2h is clean.

use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::core::{FieldState, I};
use crate::error::{Error, Result};

/// Which transformed problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    W,
    Z,
}

/// Fields below this modulus are treated as zero when trimming the support.
pub const TRIM: f64 = 1e-15;

/// Target bound on (rate * step) for the RK4 step; sub-steps are powers of two.
const MAX_RATE_STEP: f64 = 0.3;

/// Refinement levels 2^1 ..= 2^MAX_LEVEL points per field cell.
const MAX_LEVEL: usize = 8;

/// Zero cells added on either side of the trimmed support.
const PAD: usize = 16;

/// u, v, u_x, v_x at one refined node.
type Sample = [C64; 4];

/// Potential-dependent data shared by both sides.
pub struct JostContext {
    /// left end of the padded support
    pub x_left: f64,
    pub dx: f64,
    /// number of field cells (even)
    cells: usize,
    u: Vec<C64>,
    v: Vec<C64>,
    levels: Vec<OnceLock<Vec<Sample>>>,
    /// largest |A0| and |A1| entries over the support, per side
    a0_max: f64,
    a1_max: f64,
    /// int (|u|^2 + |v|^2) dx over the support
    pub charge: f64,
    pub empty: bool,
}

/// Trigonometric interpolation of f (period n dx) onto `factor` points per
/// cell, with its spectral derivative.
fn spectral_refine(f: &[C64], dx: f64, factor: usize, planner: &mut FftPlanner<f64>) -> (Vec<C64>, Vec<C64>) {
    let n = f.len();
    let mut spec = f.to_vec();
    planner.plan_fft_forward(n).process(&mut spec);
    let m = factor * n;
    let mut fine = vec![C64::new(0.0, 0.0); m];
    let mut dfine = vec![C64::new(0.0, 0.0); m];
    let len = n as f64 * dx;
    let tau = 2.0 * std::f64::consts::PI / len;
    for (k, &sk) in spec.iter().enumerate() {
        let c = sk / n as f64;
        if n.is_multiple_of(2) && k == n / 2 {
            // the Nyquist mode is shared between +n/2 and -n/2
            let kk = (n / 2) as f64;
            fine[n / 2] += 0.5 * c;
            fine[m - n / 2] += 0.5 * c;
            dfine[n / 2] += 0.5 * c * I * tau * kk;
            dfine[m - n / 2] -= 0.5 * c * I * tau * kk;
        } else if k <= n / 2 {
            fine[k] += c;
            dfine[k] += c * I * tau * k as f64;
        } else {
            fine[m - (n - k)] += c;
            dfine[m - (n - k)] += c * I * tau * (k as f64 - n as f64);
        }
    }
    let inv = planner.plan_fft_inverse(m);
    inv.process(&mut fine);
    inv.process(&mut dfine);
    (fine, dfine)
}

#[inline]
fn coef_w(s: &Sample, si: C64) -> (C64, C64, C64) {
    let [u, v, ux, _] = *s;
    let (uu, vv) = (u.norm_sqr(), v.norm_sqr());
    let vb = v.conj();
    (
        -0.25 * I * (uu + vv) + 0.5 * I * u * vb * si,
        0.5 * I * (u.conj() - vb * si),
        ux - 0.5 * I * (v + u * vv) + 0.5 * I * (u + u * u * vb) * si,
    )
}

#[inline]
fn coef_z(s: &Sample, si: C64) -> (C64, C64, C64) {
    let [u, v, _, vx] = *s;
    let (uu, vv) = (u.norm_sqr(), v.norm_sqr());
    let ub = u.conj();
    (
        0.25 * I * (uu + vv) - 0.5 * I * v * ub * si,
        -0.5 * I * (v.conj() - ub * si),
        vx + 0.5 * I * (u + v * uu) - 0.5 * I * (v + v * v * ub) * si,
    )
}

impl JostContext {
    pub fn new(fields: &FieldState) -> Result<Self> {
        let n = fields.len();
        let big = |k: usize| fields.u[k].norm().max(fields.v[k].norm()) > TRIM;
        let empty = Self {
            x_left: fields.x_start,
            dx: fields.dx,
            cells: 0,
            u: vec![],
            v: vec![],
            levels: vec![],
            a0_max: 0.0,
            a1_max: 0.0,
            charge: 0.0,
            empty: true,
        };
        let Some(first) = (0..n).find(|&k| big(k)) else {
            return Ok(empty);
        };
        let last = (0..n).rev().find(|&k| big(k)).unwrap();
        let lo = first.saturating_sub(PAD);
        let hi = (last + PAD).min(n - 1);
        // zeros beyond the grid keep the periodic extension smooth
        let extra_l = PAD - (first - lo);
        let mut extra_r = PAD - (hi - last);
        if (extra_l + hi - lo + extra_r) % 2 == 1 {
            extra_r += 1;
        }
        let zero = C64::new(0.0, 0.0);
        let pad = |f: &[C64]| {
            let mut out = vec![zero; extra_l];
            out.extend_from_slice(&f[lo..=hi]);
            out.extend(std::iter::repeat_n(zero, extra_r));
            out
        };
        let (u, v) = (pad(&fields.u), pad(&fields.v));
        let dx = fields.dx;
        let charge = u.iter().chain(&v).map(|z| z.norm_sqr()).sum::<f64>() * dx;
        let mut a0_max: f64 = 0.0;
        let mut a1_max: f64 = 0.0;
        for (u, v) in u.iter().zip(&v) {
            let (a, b) = (u.norm(), v.norm());
            a0_max = a0_max.max(0.25 * (a * a + b * b)).max(0.5 * a.max(b)).max(0.5 * (a + b) * (1.0 + a * b));
            a1_max = a1_max.max(0.5 * a.max(b) * (1.0 + a * b));
        }
        Ok(Self {
            x_left: fields.x(lo) - extra_l as f64 * dx,
            dx,
            cells: u.len() - 1,
            u,
            v,
            levels: (0..=MAX_LEVEL).map(|_| OnceLock::new()).collect(),
            a0_max,
            a1_max,
            charge,
            empty: false,
        })
    }

    pub fn x_right(&self) -> f64 {
        self.x_left + self.cells as f64 * self.dx
    }

    /// Samples with 2^level points per field cell.
    fn level(&self, level: usize) -> &[Sample] {
        self.levels[level].get_or_init(|| {
            let factor = 1 << level;
            let mut planner = FftPlanner::new();
            let (uf, uxf) = spectral_refine(&self.u, self.dx, factor, &mut planner);
            let (vf, vxf) = spectral_refine(&self.v, self.dx, factor, &mut planner);
            // the last padded cell wraps around and is not needed
            (0..=self.cells * factor).map(|k| [uf[k], vf[k], uxf[k], vxf[k]]).collect()
        })
    }

    /// Sub-steps per field cell (a power of two) for spectral parameter s.
    fn substeps(&self, side: Side, s: C64) -> usize {
        let rate = 2.0 * wavenumber(side, s).norm() + self.a0_max + self.a1_max / s.norm();
        let need = (rate * self.dx / MAX_RATE_STEP).ceil().max(1.0) as usize;
        need.next_power_of_two().min(1 << (MAX_LEVEL - 1))
    }
}

pub fn wavenumber(side: Side, s: C64) -> C64 {
    match side {
        Side::W => 0.25 * (s - s.inv()),
        Side::Z => -0.25 * (s - s.inv()),
    }
}

fn is_real(k: C64) -> bool {
    k.im.abs() <= 1e-14 * k.norm().max(1.0)
}

#[inline]
fn rk4<F: Fn(usize, [C64; 2]) -> [C64; 2]>(f: &F, j: usize, half: usize, fwd: bool, h: f64, y: [C64; 2]) -> [C64; 2] {
    let (jm, je) = if fwd { (j + half, j + 2 * half) } else { (j - half, j - 2 * half) };
    let k1 = f(j, y);
    let k2 = f(jm, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = f(jm, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = f(je, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Which column and which end it starts from.
#[derive(Clone, Copy)]
enum Column {
    Left,
    Right,
}

/// RK4 for one column between the start end and field node `stop_cell`,
/// with step dx/sub (or 2dx/sub when `coarse`).
///
/// Left, real k: returns (m1, m2) with Psi_1 = (e^{-ikx} m1, e^{ikx} m2).
/// Left, otherwise: returns (m1, n2) with Psi_1 = e^{-ikx} (m1, n2).
/// Right: returns (p1, p2) with Psi_2 = e^{ikx} (p1, p2).
fn march(ctx: &JostContext, side: Side, s: C64, col: Column, stop_cell: usize, coarse: bool) -> [C64; 2] {
    let sub = ctx.substeps(side, s);
    let level = (2 * sub).trailing_zeros() as usize;
    let per_cell = 2 * sub;
    let samples = ctx.level(level);
    let half = if coarse { 2 } else { 1 };
    let k = wavenumber(side, s);
    let si = s.inv();
    let tk = 2.0 * I * k;
    let coef = |j: usize| match side {
        Side::W => coef_w(&samples[j], si),
        Side::Z => coef_z(&samples[j], si),
    };
    let hstep = ctx.dx / per_cell as f64;
    let (from, to) = match col {
        Column::Left => (0, stop_cell * per_cell),
        Column::Right => (ctx.cells * per_cell, stop_cell * per_cell),
    };
    let fwd = to >= from;
    let steps = from.abs_diff(to) / (2 * half);
    let h = if fwd { 2.0 * half as f64 * hstep } else { -2.0 * half as f64 * hstep };
    let mut y;
    let mut j = from;
    match col {
        Column::Left if is_real(k) => {
            let kr = k.re;
            let f = |j: usize, y: [C64; 2]| {
                let (q11, q12, q21) = coef(j);
                let e = C64::from_polar(1.0, 2.0 * kr * (ctx.x_left + j as f64 * hstep));
                [q11 * y[0] + q12 * e * y[1], q21 * e.conj() * y[0] - q11 * y[1]]
            };
            y = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
            for _ in 0..steps {
                y = rk4(&f, j, half, fwd, h, y);
                j += 2 * half;
            }
        }
        Column::Left => {
            let f = |j: usize, y: [C64; 2]| {
                let (q11, q12, q21) = coef(j);
                [q11 * y[0] + q12 * y[1], q21 * y[0] + (tk - q11) * y[1]]
            };
            y = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
            for _ in 0..steps {
                y = rk4(&f, j, half, fwd, h, y);
                j += 2 * half;
            }
        }
        Column::Right => {
            let f = |j: usize, y: [C64; 2]| {
                let (q11, q12, q21) = coef(j);
                [(q11 - tk) * y[0] + q12 * y[1], q21 * y[0] - q11 * y[1]]
            };
            y = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
            for _ in 0..steps {
                y = rk4(&f, j, half, fwd, h, y);
                j -= 2 * half;
            }
        }
    }
    y
}

/// Richardson combination of the step-h and step-2h RK4 results.
fn column(ctx: &JostContext, side: Side, s: C64, col: Column, stop_cell: usize) -> [C64; 2] {
    let f = march(ctx, side, s, col, stop_cell, false);
    let c = march(ctx, side, s, col, stop_cell, true);
    [(16.0 * f[0] - c[0]) / 15.0, (16.0 * f[1] - c[1]) / 15.0]
}

/// Transition coefficients of one side at spectral parameter s: the first
/// column of T is (a, s b) on the real line. For non-real s only `a` is
/// meaningful and b is returned as zero.
pub fn transition(ctx: &JostContext, side: Side, s: C64) -> Result<(C64, C64)> {
    // Inside the unit interval the oscillation rate grows like 1/|s| and RK4
    // loses digits; the other side at 1/s carries the same coefficients:
    // a(s) = a-hat(1/s), b(s) = b-hat(1/s) / s.
    if s.im == 0.0 && s.re != 0.0 && s.re.abs() < 1.0 {
        let other = match side {
            Side::W => Side::Z,
            Side::Z => Side::W,
        };
        let (a, b) = transition_direct(ctx, other, s.inv())?;
        return Ok((a, b / s));
    }
    transition_direct(ctx, side, s)
}

/// Transition coefficients from integrating this side alone, whatever |s|.
pub fn transition_direct(ctx: &JostContext, side: Side, s: C64) -> Result<(C64, C64)> {
    if s.norm() == 0.0 {
        return Err(Error::Domain("spectral parameter 0".into()));
    }
    if ctx.empty {
        return Ok((C64::new(1.0, 0.0), C64::new(0.0, 0.0)));
    }
    let y = column(ctx, side, s, Column::Left, ctx.cells);
    if !(y[0].is_finite() && y[1].is_finite()) {
        return Err(Error::Convergence(format!("Jost integration overflow at {s}")));
    }
    if is_real(wavenumber(side, s)) {
        Ok((y[0], y[1] / s))
    } else {
        Ok((y[0], C64::new(0.0, 0.0)))
    }
}

/// Gamma with Psi_1^(-) = Gamma Psi_2^(+) at a zero of a (non-real s), from
/// a least-squares fit at mid-support. Returns (Gamma, relative residual).
pub fn proportionality(ctx: &JostContext, side: Side, s: C64) -> Result<(C64, f64)> {
    if ctx.empty {
        return Err(Error::Inaccurate("zero potential has no bound states".into()));
    }
    let k = wavenumber(side, s);
    if is_real(k) {
        return Err(Error::Domain(format!("{s} is on the continuous spectrum")));
    }
    let mid = (ctx.cells / 4) * 2;
    let m = column(ctx, side, s, Column::Left, mid);
    let p = column(ctx, side, s, Column::Right, mid);
    let x = ctx.x_left + mid as f64 * ctx.dx;
    let den = p[0].norm_sqr() + p[1].norm_sqr();
    let g = (p[0].conj() * m[0] + p[1].conj() * m[1]) / den;
    let res = ((m[0] - g * p[0]).norm_sqr() + (m[1] - g * p[1]).norm_sqr()).sqrt()
        / (m[0].norm_sqr() + m[1].norm_sqr()).sqrt();
    Ok((g * (-2.0 * I * k * x).exp(), res))
}
