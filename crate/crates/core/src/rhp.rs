//! Cauchy transforms on the real line, Plemelj boundary values, a small-norm
//! Riemann-Hilbert solver and reconstruction of (u, v) from scattering data.
//!
//! All jump problems live on a uniform grid of the real line. The boundary
//! values use the odd/even (Kress-Martensen) discrete Hilbert transform,
//!
//!   PV (1/pi) int f(s)/(x_k - s) ds  ~  (2/pi) sum_{m odd} f_{k-m} / m,
//!
//! which is spectrally accurate for smooth decaying f and is evaluated as an
//! FFT convolution.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::core::{FieldState, SampledComplexFunction, I};
use crate::error::{Error, Result};
use crate::scattering::ScatteringData;
use crate::solitons;

type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Distance from the axis (in grid spacings) below which the Cauchy
/// transform switches from the trapezoid rule to boundary extrapolation.
const NEAR_AXIS: f64 = 5.0;

/// Reusable FFT plan for the grid Hilbert transform of length-n samples.
pub struct HilbertPlan {
    n: usize,
    padded: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    kernel: Vec<C64>,
}

impl HilbertPlan {
    pub fn new(n: usize) -> Self {
        let len = (2 * n).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let mut kernel = vec![ZERO; len];
        for m in (1..n as isize).step_by(2) {
            let k = 2.0 / (PI * m as f64);
            kernel[m as usize] = C64::new(k, 0.0);
            kernel[len - m as usize] = C64::new(-k, 0.0);
        }
        fwd.process(&mut kernel);
        let scale = 1.0 / len as f64;
        kernel.iter_mut().for_each(|k| *k *= scale);
        Self { n, padded: len, fwd, inv, kernel }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// (1/pi) PV int f(s)/(x_k - s) ds at every node.
    pub fn hilbert(&self, f: &[C64]) -> Vec<C64> {
        assert_eq!(f.len(), self.n);
        let mut buf = vec![ZERO; self.padded];
        buf[..self.n].copy_from_slice(f);
        self.fwd.process(&mut buf);
        buf.iter_mut().zip(&self.kernel).for_each(|(b, k)| *b *= k);
        self.inv.process(&mut buf);
        buf.truncate(self.n);
        buf
    }

    /// C^{+} (plus = true) or C^{-} boundary values at the nodes.
    pub fn boundary(&self, f: &[C64], plus: bool) -> Vec<C64> {
        let h = self.hilbert(f);
        let s = if plus { 0.5 } else { -0.5 };
        f.iter().zip(h).map(|(f, h)| s * f + 0.5 * I * h).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundarySide {
    Plus,
    Minus,
}

/// C[f](zeta) = (1/2 pi i) int f(s)/(s - zeta) ds for zeta off the real line.
pub fn cauchy_transform(f: &SampledComplexFunction, zeta: C64) -> Result<C64> {
    if zeta.im == 0.0 {
        return Err(Error::Domain("cauchy_transform needs Im zeta != 0; use cauchy_boundary".into()));
    }
    if zeta.im.abs() >= NEAR_AXIS * f.h {
        return Ok(trapezoid_cauchy(f, zeta));
    }
    // C[f](s0 + i e) is smooth in e down to the boundary value at e = 0;
    // interpolate through the boundary value and four far-enough samples.
    let sgn = zeta.im.signum();
    let plus = sgn > 0.0;
    let side = if plus { BoundarySide::Plus } else { BoundarySide::Minus };
    let b = cauchy_boundary(f, side).eval(zeta.re);
    let mut es = vec![0.0];
    let mut vs = vec![b];
    for k in 0..4 {
        let e = sgn * (NEAR_AXIS + k as f64) * f.h;
        es.push(e);
        vs.push(trapezoid_cauchy(f, C64::new(zeta.re, e)));
    }
    Ok(lagrange(&es, &vs, zeta.im))
}

fn lagrange(xs: &[f64], ys: &[C64], x: f64) -> C64 {
    let mut s = ZERO;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut l = 1.0;
        for (j, &xj) in xs.iter().enumerate() {
            if j != i {
                l *= (x - xj) / (xi - xj);
            }
        }
        s += yi * l;
    }
    s
}

fn trapezoid_cauchy(f: &SampledComplexFunction, zeta: C64) -> C64 {
    let s: C64 = (0..f.len()).map(|k| f.values[k] / (f.node(k) - zeta)).sum();
    s * f.h / (2.0 * PI * I)
}

/// C^{+}[f] or C^{-}[f] on the nodes of f.
pub fn cauchy_boundary(f: &SampledComplexFunction, side: BoundarySide) -> SampledComplexFunction {
    let plan = HilbertPlan::new(f.len());
    let values = plan.boundary(&f.values, side == BoundarySide::Plus);
    SampledComplexFunction { values, ..f.clone() }
}

/// Jump M_+ = M_-(1 + R) on a uniform grid of the real line.
#[derive(Clone, Debug)]
pub struct JumpProblem {
    pub start: f64,
    pub h: f64,
    /// R at each node, row-major 2x2
    pub r: Vec<Mat2>,
}

impl JumpProblem {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn node(&self, k: usize) -> f64 {
        self.start + k as f64 * self.h
    }

    /// max |det(1 + R) - 1| over the nodes.
    pub fn det_defect(&self) -> f64 {
        self.r.iter().map(|r| ((ONE + r[0][0]) * (ONE + r[1][1]) - r[0][1] * r[1][0] - ONE).norm()).fold(0.0, f64::max)
    }

    /// max over nodes of the spectral-norm bound sqrt(sum |R_ij|^2).
    pub fn sup_norm(&self) -> f64 {
        self.r.iter().map(|r| r.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).fold(0.0, f64::max)
    }

    /// int sqrt(sum |R_ij|^2) ds, trapezoid.
    pub fn l1_norm(&self) -> f64 {
        self.r.iter().map(|r| r.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).sum::<f64>() * self.h
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// contraction proxy |R|_inf must stay below this
    pub norm_limit: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Krylov dimension of the restarted GMRES fallback
    pub restart: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { norm_limit: 0.5, tol: 1e-12, max_iter: 400, restart: 60 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    FixedPoint,
    Gmres,
}

/// mu = M_- - 1 at the nodes, with everything needed to evaluate M.
#[derive(Clone, Debug)]
pub struct SmallNormSolution {
    pub start: f64,
    pub h: f64,
    /// (1 + mu) R at the nodes, one vector per matrix entry
    density: [Vec<C64>; 4],
    pub mu: Vec<Mat2>,
    /// lim zeta (M(zeta) - 1) = -(1/2 pi i) int (1 + mu) R
    pub moment: Mat2,
    pub iterations: usize,
    pub method: SolveMethod,
}

impl SmallNormSolution {
    /// M(zeta) = 1 + C[(1 + mu) R](zeta), zeta off the real line.
    pub fn m_at(&self, zeta: C64) -> Result<Mat2> {
        let mut m = [[ONE, ZERO], [ZERO, ONE]];
        for (e, d) in self.density.iter().enumerate() {
            let f = SampledComplexFunction { start: self.start, h: self.h, values: d.clone() };
            m[e / 2][e % 2] += cauchy_transform(&f, zeta)?;
        }
        Ok(m)
    }

    /// Entry (row, col) of (1 + mu) R on the contour.
    pub fn density(&self, row: usize, col: usize) -> SampledComplexFunction {
        SampledComplexFunction { start: self.start, h: self.h, values: self.density[2 * row + col].clone() }
    }

    /// M at 0, where R vanishes to all orders and M is continuous.
    pub fn m_at_origin(&self) -> Mat2 {
        let mut m = [[ONE, ZERO], [ZERO, ONE]];
        for (e, d) in self.density.iter().enumerate() {
            let mut s = ZERO;
            for (k, v) in d.iter().enumerate() {
                let x = self.start + k as f64 * self.h;
                if x != 0.0 {
                    s += v / x;
                }
            }
            m[e / 2][e % 2] += s * self.h / (2.0 * PI * I);
        }
        m
    }
}

/// Row vector times matrix.
#[inline]
fn row_times(m: [C64; 2], r: &Mat2) -> [C64; 2] {
    [m[0] * r[0][0] + m[1] * r[1][0], m[0] * r[0][1] + m[1] * r[1][1]]
}

/// Solves mu = C^-[(1 + mu) R] row by row.
pub fn solve_small_norm(j: &JumpProblem, plan: &HilbertPlan, cfg: &SolverConfig) -> Result<SmallNormSolution> {
    let n = j.len();
    if plan.len() != n {
        return Err(Error::Contract("Hilbert plan size differs from the contour".into()));
    }
    let norm = j.sup_norm();
    if !(norm < cfg.norm_limit) {
        return Err(Error::SmallNorm(format!("|R|_inf = {norm:.3} is not below {}", cfg.norm_limit)));
    }
    let mut mu = vec![[[ZERO; 2]; 2]; n];
    let mut iterations = 0;
    let mut method = SolveMethod::FixedPoint;
    for row in 0..2 {
        let mut e = [ZERO; 2];
        e[row] = ONE;
        // T m = C^-[m R]
        let apply = |m: &[Vec<C64>; 2]| -> [Vec<C64>; 2] {
            let mut g0 = vec![ZERO; n];
            let mut g1 = vec![ZERO; n];
            for k in 0..n {
                let p = row_times([m[0][k], m[1][k]], &j.r[k]);
                g0[k] = p[0];
                g1[k] = p[1];
            }
            [plan.boundary(&g0, false), plan.boundary(&g1, false)]
        };
        let rhs = apply(&[vec![e[0]; n], vec![e[1]; n]]);
        let (m, it, used) = match fixed_point(&apply, &rhs, cfg) {
            Some((m, it)) => (m, it, SolveMethod::FixedPoint),
            None => {
                let (m, it) = gmres(&apply, &rhs, cfg)?;
                (m, it, SolveMethod::Gmres)
            }
        };
        iterations += it;
        if used == SolveMethod::Gmres {
            method = used;
        }
        for k in 0..n {
            mu[k][row] = [m[0][k], m[1][k]];
        }
    }
    let mut density: [Vec<C64>; 4] = Default::default();
    for d in density.iter_mut() {
        d.resize(n, ZERO);
    }
    let mut moment = [[ZERO; 2]; 2];
    for k in 0..n {
        for row in 0..2 {
            let mut m = mu[k][row];
            m[row] += ONE;
            let p = row_times(m, &j.r[k]);
            for col in 0..2 {
                density[2 * row + col][k] = p[col];
                moment[row][col] += p[col];
            }
        }
    }
    let scale = -j.h / (2.0 * PI * I);
    moment.iter_mut().flatten().for_each(|m| *m *= scale);
    Ok(SmallNormSolution { start: j.start, h: j.h, density, mu, moment, iterations, method })
}

fn sup(v: &[Vec<C64>; 2]) -> f64 {
    v.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// m <- rhs + T m. None when the iteration fails to contract.
fn fixed_point<F>(apply: &F, rhs: &[Vec<C64>; 2], cfg: &SolverConfig) -> Option<([Vec<C64>; 2], usize)>
where
    F: Fn(&[Vec<C64>; 2]) -> [Vec<C64>; 2],
{
    let mut m = rhs.clone();
    let mut prev = f64::INFINITY;
    for it in 1..=cfg.max_iter {
        let t = apply(&m);
        let next: [Vec<C64>; 2] = [0, 1].map(|c| rhs[c].iter().zip(&t[c]).map(|(a, b)| a + b).collect());
        let diff = (0..2).flat_map(|c| next[c].iter().zip(&m[c]).map(|(a, b)| (a - b).norm())).fold(0.0, f64::max);
        m = next;
        let scale = sup(&m).max(1.0);
        if diff <= cfg.tol * scale {
            return Some((m, it));
        }
        if it > 5 && diff > 0.95 * prev {
            return None;
        }
        prev = diff;
    }
    None
}

/// Restarted GMRES for (1 - T) m = rhs.
fn gmres<F>(apply: &F, rhs: &[Vec<C64>; 2], cfg: &SolverConfig) -> Result<([Vec<C64>; 2], usize)>
where
    F: Fn(&[Vec<C64>; 2]) -> [Vec<C64>; 2],
{
    let n = rhs[0].len();
    let flat = |v: &[Vec<C64>; 2]| -> Vec<C64> { v[0].iter().chain(&v[1]).copied().collect() };
    let split = |v: &[C64]| -> [Vec<C64>; 2] { [v[..n].to_vec(), v[n..].to_vec()] };
    let op = |x: &[C64]| -> Vec<C64> {
        let t = flat(&apply(&split(x)));
        x.iter().zip(t).map(|(a, b)| a - b).collect()
    };
    let dot = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(a, b)| a.conj() * b).sum() };
    let nrm = |a: &[C64]| dot(a, a).re.sqrt();
    let b = flat(rhs);
    let bnorm = nrm(&b).max(1e-300);
    let mut x = vec![ZERO; 2 * n];
    let mut total = 0;
    let m = cfg.restart;
    while total < cfg.max_iter {
        let ax = op(&x);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = nrm(&r);
        if beta <= cfg.tol * bnorm {
            return Ok((split(&x), total));
        }
        let mut v: Vec<Vec<C64>> = vec![r.iter().map(|z| z / beta).collect()];
        let mut hm = vec![vec![ZERO; m]; m + 1];
        let mut cs = vec![ZERO; m];
        let mut sn = vec![ZERO; m];
        let mut g = vec![ZERO; m + 1];
        g[0] = C64::new(beta, 0.0);
        let mut k_used = 0;
        for k in 0..m {
            total += 1;
            let mut w = op(&v[k]);
            for i in 0..=k {
                let hik = dot(&v[i], &w);
                hm[i][k] = hik;
                w.iter_mut().zip(&v[i]).for_each(|(w, vi)| *w -= hik * vi);
            }
            let hn = nrm(&w);
            hm[k + 1][k] = C64::new(hn, 0.0);
            for i in 0..k {
                let t = cs[i].conj() * hm[i][k] + sn[i].conj() * hm[i + 1][k];
                hm[i + 1][k] = -sn[i] * hm[i][k] + cs[i] * hm[i + 1][k];
                hm[i][k] = t;
            }
            let (a, bb) = (hm[k][k], hm[k + 1][k]);
            let den = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            cs[k] = a / den;
            sn[k] = bb / den;
            hm[k][k] = C64::new(den, 0.0);
            hm[k + 1][k] = ZERO;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k].conj() * g[k];
            k_used = k + 1;
            if g[k + 1].norm() <= cfg.tol * bnorm || hn == 0.0 {
                break;
            }
            v.push(w.iter().map(|z| z / hn).collect());
        }
        let mut y = vec![ZERO; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for l in i + 1..k_used {
                s -= hm[i][l] * y[l];
            }
            y[i] = s / hm[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            x.iter_mut().zip(&v[i]).for_each(|(x, vi)| *x += yi * vi);
        }
    }
    Err(Error::SmallNorm("GMRES did not converge; small-norm hypothesis violated".into()))
}

/// Contour discretization for the reconstruction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RhpConfig {
    pub half_width: f64,
    pub nodes: usize,
    pub solver: SolverConfig,
}

impl Default for RhpConfig {
    fn default() -> Self {
        Self { half_width: 16.0, nodes: 4096, solver: SolverConfig::default() }
    }
}

impl RhpConfig {
    fn h(&self) -> f64 {
        2.0 * self.half_width / (self.nodes - 1) as f64
    }
}

/// Jump of the w-problem at (t, x): with e = exp((i/2)(w - 1/w)x - (i/2)(w + 1/w)t),
///   R = [[w |r|^2, conj(r) / e], [w r e, 0]],   R(0) = 0.
pub fn jump_w(r: &SampledComplexFunction, t: f64, x: f64, cfg: &RhpConfig) -> JumpProblem {
    let h = cfg.h();
    let start = -cfg.half_width;
    let jump = (0..cfg.nodes)
        .map(|k| {
            let w = start + k as f64 * h;
            let rw = r.eval(w);
            if w == 0.0 || rw == ZERO {
                return [[ZERO; 2]; 2];
            }
            let e = C64::from_polar(1.0, 0.5 * (w - 1.0 / w) * x - 0.5 * (w + 1.0 / w) * t);
            [[C64::new(w * rw.norm_sqr(), 0.0), rw.conj() * e.conj()], [w * rw * e, ZERO]]
        })
        .collect();
    JumpProblem { start, h, r: jump }
}

/// Jump of the z-problem at (t, x): with e = exp(-(i/2)(z - 1/z)x - (i/2)(z + 1/z)t),
///   R-hat = [[0, -conj(r-hat) / e], [-z r-hat e, z |r-hat|^2]],   R-hat(0) = 0.
pub fn jump_z(r_hat: &SampledComplexFunction, t: f64, x: f64, cfg: &RhpConfig) -> JumpProblem {
    let h = cfg.h();
    let start = -cfg.half_width;
    let jump = (0..cfg.nodes)
        .map(|k| {
            let z = start + k as f64 * h;
            let rz = r_hat.eval(z);
            if z == 0.0 || rz == ZERO {
                return [[ZERO; 2]; 2];
            }
            let e = C64::from_polar(1.0, -0.5 * (z - 1.0 / z) * x - 0.5 * (z + 1.0 / z) * t);
            [[ZERO, -rz.conj() * e.conj()], [-z * rz * e, C64::new(z * rz.norm_sqr(), 0.0)]]
        })
        .collect();
    JumpProblem { start, h, r: jump }
}

/// [M(0)]_11 conj(lim s [M]_12): the reconstruction shared by both problems.
fn recover(sol: &SmallNormSolution) -> C64 {
    sol.m_at_origin()[0][0] * sol.moment[0][1].conj()
}

/// (u, v) at one point from soliton-free scattering data.
pub fn reconstruct_point(
    s: &ScatteringData,
    t: f64,
    x: f64,
    plan: &HilbertPlan,
    cfg: &RhpConfig,
) -> Result<(C64, C64)> {
    let jw = jump_w(&s.r, t, x, cfg);
    let u = recover(&solve_small_norm(&jw, plan, &cfg.solver)?);
    let jz = jump_z(&s.r_hat, t, x, cfg);
    let v = recover(&solve_small_norm(&jz, plan, &cfg.solver)?);
    Ok((u, v))
}

/// Fields at time t on the grid x_start + k dx, k < n.
///
/// Soliton-free data go through the small-norm solver; reflectionless data
/// are handed to the exact N-soliton formula. Mixed data are not supported.
pub fn reconstruct_fields(
    s: &ScatteringData,
    t: f64,
    x_start: f64,
    dx: f64,
    n: usize,
    cfg: &RhpConfig,
) -> Result<FieldState> {
    let reflectionless = s.r.sup_norm() == 0.0 && s.r_hat.sup_norm() == 0.0;
    if !s.spectrum.is_empty() {
        if reflectionless {
            return solitons::n_soliton(&s.spectrum, t, x_start, dx, n);
        }
        return Err(Error::Contract("reconstruction with both radiation and solitons is not supported".into()));
    }
    if reflectionless {
        return FieldState::new(t, x_start, dx, vec![ZERO; n], vec![ZERO; n]);
    }
    let plan = HilbertPlan::new(cfg.nodes);
    let pts: Vec<(C64, C64)> = (0..n)
        .into_par_iter()
        .map(|k| reconstruct_point(s, t, x_start + k as f64 * dx, &plan, cfg))
        .collect::<Result<_>>()?;
    let (u, v) = pts.into_iter().unzip();
    FieldState::new(t, x_start, dx, u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hilbert_of_lorentzian() {
        // f = 1/(1+s^2): (1/pi) PV int f(s)/(x-s) ds = x/(1+x^2)
        let f = SampledComplexFunction::sample(-400.0, 400.0, 8001, |s| C64::new(1.0 / (1.0 + s * s), 0.0));
        let plan = HilbertPlan::new(f.len());
        let h = plan.hilbert(&f.values);
        for k in (3000..5000).step_by(97) {
            let x = f.node(k);
            assert!((h[k].re - x / (1.0 + x * x)).abs() < 1e-5, "{x}");
        }
    }

    #[test]
    fn plemelj_difference_is_identity() {
        let f = SampledComplexFunction::sample(-10.0, 10.0, 1001, |s| C64::new((-s * s).exp(), s * (-s * s).exp()));
        let p = cauchy_boundary(&f, BoundarySide::Plus);
        let m = cauchy_boundary(&f, BoundarySide::Minus);
        for k in 0..f.len() {
            assert!((p.values[k] - m.values[k] - f.values[k]).norm() < 1e-14);
        }
        let z = SampledComplexFunction::zeros(-1.0, 1.0, 11);
        assert_eq!(cauchy_boundary(&z, BoundarySide::Plus).sup_norm(), 0.0);
    }

    #[test]
    fn zero_jump() {
        let cfg = RhpConfig { nodes: 256, ..Default::default() };
        let r = SampledComplexFunction::zeros(-12.0, 12.0, 16);
        let j = jump_w(&r, 0.0, 0.0, &cfg);
        let sol = solve_small_norm(&j, &HilbertPlan::new(256), &cfg.solver).unwrap();
        assert!(sol.moment.iter().flatten().all(|m| m.norm() == 0.0));
        let m = sol.m_at(C64::new(0.3, 0.7)).unwrap();
        assert_eq!(m, [[ONE, ZERO], [ZERO, ONE]]);
    }
}
