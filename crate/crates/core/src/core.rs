//! Shared domain types: light-cone coordinates, the Joukowsky map, the
//! oscillatory phase and sampled spectral functions.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Light-cone coordinates of a point (t, x) with t > |x|.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeCoords {
    pub tau: f64,
    pub w0: f64,
    pub z0: f64,
}

pub fn cone_coords(t: f64, x: f64) -> Result<ConeCoords> {
    if !(t > x.abs()) || !t.is_finite() || !x.is_finite() {
        return Err(Error::Domain(format!("point (t={t}, x={x}) is outside the open light cone")));
    }
    // (t-x)(t+x) avoids cancellation in t^2 - x^2
    let tau = ((t - x) * (t + x)).sqrt();
    let w0 = ((t + x) / (t - x)).sqrt();
    Ok(ConeCoords { tau, w0, z0: 1.0 / w0 })
}

pub fn joukowsky(zeta: C64) -> Result<C64> {
    if zeta == C64::new(0.0, 0.0) {
        return Err(Error::Domain("joukowsky at zeta = 0".into()));
    }
    Ok(0.5 * (zeta + zeta.inv()))
}

/// -(i/2)(w - 1/w) x + (i/2)(w + 1/w) t
pub fn phase_exponent(w: C64, t: f64, x: f64) -> Result<C64> {
    if w == C64::new(0.0, 0.0) {
        return Err(Error::Domain("phase exponent at w = 0".into()));
    }
    let wi = w.inv();
    Ok(-0.5 * I * (w - wi) * x + 0.5 * I * (w + wi) * t)
}

/// Principal branch power `base^expo` with -pi < arg(base) <= pi.
///
/// Every complex power with a non-integer exponent in the crate goes through
/// here, e.g. (-(zeta+1))^{i nu} is `principal_pow(-(zeta + 1), i nu)`.
pub fn principal_pow(base: C64, expo: C64) -> Result<C64> {
    if base == C64::new(0.0, 0.0) {
        return Err(Error::Domain("power of zero with complex exponent".into()));
    }
    Ok((expo * base.ln()).exp())
}

/// Complex-valued function of a real variable sampled on a uniform grid.
/// Cubic (four-point Lagrange) interpolation inside, identically zero outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledComplexFunction {
    pub start: f64,
    pub h: f64,
    pub values: Vec<C64>,
}

impl SampledComplexFunction {
    pub fn new(start: f64, h: f64, values: Vec<C64>) -> Result<Self> {
        if !(h > 0.0) || values.len() < 2 {
            return Err(Error::Contract("sampled function needs h > 0 and at least two nodes".into()));
        }
        Ok(Self { start, h, values })
    }

    /// Build from an explicit grid, checking uniformity.
    pub fn from_grid(grid: &[f64], values: Vec<C64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(Error::Contract("grid and values differ in length".into()));
        }
        let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
        for (k, g) in grid.iter().enumerate() {
            let expect = grid[0] + k as f64 * h;
            if (g - expect).abs() > 1e-12 * h.max(expect.abs()).max(1.0) {
                return Err(Error::Contract("grid is not uniform".into()));
            }
        }
        Self::new(grid[0], h, values)
    }

    pub fn sample<F: Fn(f64) -> C64>(start: f64, end: f64, n: usize, f: F) -> Self {
        let h = (end - start) / (n - 1) as f64;
        let values = (0..n).map(|k| f(start + k as f64 * h)).collect();
        Self { start, h, values }
    }

    pub fn zeros(start: f64, end: f64, n: usize) -> Self {
        Self::sample(start, end, n, |_| C64::new(0.0, 0.0))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, k: usize) -> f64 {
        self.start + k as f64 * self.h
    }

    pub fn end(&self) -> f64 {
        self.node(self.len() - 1)
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.node(k)).collect()
    }

    pub fn eval(&self, s: f64) -> C64 {
        let n = self.len();
        let p = (s - self.start) / self.h;
        let tol = 1e-9;
        if !(p >= -tol && p <= (n - 1) as f64 + tol) {
            return C64::new(0.0, 0.0);
        }
        let near = p.round();
        if (p - near).abs() < 1e-12 {
            return self.values[(near as usize).min(n - 1)];
        }
        if n < 4 {
            let k = (p.floor() as usize).min(n - 2);
            let th = p - k as f64;
            return self.values[k] * (1.0 - th) + self.values[k + 1] * th;
        }
        let k = (p.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let th = p - k as f64;
        let y = &self.values[k..k + 4];
        // Lagrange basis on nodes 0,1,2,3
        let l0 = -(th - 1.0) * (th - 2.0) * (th - 3.0) / 6.0;
        let l1 = th * (th - 2.0) * (th - 3.0) / 2.0;
        let l2 = -th * (th - 1.0) * (th - 3.0) / 2.0;
        let l3 = th * (th - 1.0) * (th - 2.0) / 6.0;
        y[0] * l0 + y[1] * l1 + y[2] * l2 + y[3] * l3
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Anything that can be evaluated as a complex function of a real variable.
pub trait Spectral: Sync {
    fn at(&self, s: f64) -> C64;
}

impl Spectral for SampledComplexFunction {
    fn at(&self, s: f64) -> C64 {
        self.eval(s)
    }
}

impl<F: Fn(f64) -> C64 + Sync> Spectral for F {
    fn at(&self, s: f64) -> C64 {
        self(s)
    }
}

/// Sampled fields (u, v) at time t on x_k = x_start + k dx.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub x_start: f64,
    pub dx: f64,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
}

impl FieldState {
    pub fn new(t: f64, x_start: f64, dx: f64, u: Vec<C64>, v: Vec<C64>) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::Contract("dx must be positive".into()));
        }
        if u.len() != v.len() || u.len() < 2 {
            return Err(Error::Contract("u and v must have identical length >= 2".into()));
        }
        Ok(Self { t, x_start, dx, u, v })
    }

    /// Grid of `n` nodes on [x_start, x_start + (n-1) dx] filled by `f(x) -> (u, v)`.
    pub fn from_fn<F: Fn(f64) -> (C64, C64)>(t: f64, x_start: f64, dx: f64, n: usize, f: F) -> Self {
        let (u, v) = (0..n).map(|k| f(x_start + k as f64 * dx)).unzip();
        Self { t, x_start, dx, u, v }
    }

    /// Symmetric grid [-half_width, half_width] with spacing dx.
    pub fn on_interval<F: Fn(f64) -> (C64, C64)>(t: f64, half_width: f64, dx: f64, f: F) -> Self {
        let m = (half_width / dx).round() as usize;
        Self::from_fn(t, -(m as f64) * dx, dx, 2 * m + 1, f)
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x_start + k as f64 * self.dx
    }

    pub fn x_end(&self) -> f64 {
        self.x(self.len() - 1)
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.x(k)).collect()
    }

    /// Index of the node nearest to x, if inside the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let p = ((x - self.x_start) / self.dx).round();
        if p < 0.0 || p > (self.len() - 1) as f64 {
            None
        } else {
            Some(p as usize)
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.len() * 96);
        let _ = writeln!(s, "# t={:e}", self.t);
        s.push_str("x,re_u,im_u,re_v,im_v\n");
        for k in 0..self.len() {
            let _ = writeln!(
                s,
                "{:e},{:e},{:e},{:e},{:e}",
                self.x(k),
                self.u[k].re,
                self.u[k].im,
                self.v[k].re,
                self.v[k].im
            );
        }
        s
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let bad = |m: &str| Error::Config(format!("field csv: {m}"));
        let mut t = None;
        let mut xs = Vec::new();
        let mut u = Vec::new();
        let mut v = Vec::new();
        for line in BufReader::new(reader).lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(val) = rest.strip_prefix("t=") {
                    t = Some(val.trim().parse::<f64>().map_err(|_| bad("bad t"))?);
                }
                continue;
            }
            if line.starts_with('x') {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("non-numeric column"))?;
            if cols.len() != 5 {
                return Err(bad("expected 5 columns"));
            }
            xs.push(cols[0]);
            u.push(C64::new(cols[1], cols[2]));
            v.push(C64::new(cols[3], cols[4]));
        }
        let t = t.ok_or_else(|| bad("missing '# t=' header"))?;
        if xs.len() < 2 {
            return Err(bad("fewer than two rows"));
        }
        let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        Self::new(t, xs[0], dx, u, v)
    }
}
