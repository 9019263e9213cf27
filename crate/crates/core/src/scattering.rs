//! Direct scattering: Jost solutions, transition coefficients, reflection
//! coefficients, eigenvalues and norming constants.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::core::{FieldState, SampledComplexFunction, I};
use crate::error::{Error, Result};
pub use crate::jost::Side;
use crate::jost::{self, proportionality, transition, JostContext};

/// Eigenvalues lambda_j (open second quadrant) with norming constants C_j.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiscreteSpectrum {
    pub eigenvalues: Vec<C64>,
    pub norming: Vec<C64>,
}

impl DiscreteSpectrum {
    pub fn new(eigenvalues: Vec<C64>, norming: Vec<C64>) -> Result<Self> {
        let s = Self { eigenvalues, norming };
        s.validate()?;
        Ok(s)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        if self.eigenvalues.len() != self.norming.len() {
            return Err(Error::InvalidData("eigenvalue/norming length mismatch".into()));
        }
        for (j, l) in self.eigenvalues.iter().enumerate() {
            if !(l.re < 0.0 && l.im > 0.0) {
                return Err(Error::InvalidData(format!("eigenvalue {l} is not in the open second quadrant")));
            }
            for m in &self.eigenvalues[..j] {
                if (l - m).norm() <= 1e-12 * l.norm() {
                    return Err(Error::InvalidData("eigenvalues not distinct".into()));
                }
            }
        }
        if self.norming.iter().any(|c| c.norm() == 0.0) {
            return Err(Error::InvalidData("norming constant is zero".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// w_j = lambda_j^{-2}
    pub fn w(&self, j: usize) -> C64 {
        self.eigenvalues[j].powi(-2)
    }

    /// z_j = lambda_j^2
    pub fn z(&self, j: usize) -> C64 {
        self.eigenvalues[j].powi(2)
    }

    /// c_j = -2 C_j / lambda_j^4
    pub fn c(&self, j: usize) -> C64 {
        c_from_big(self.eigenvalues[j], self.norming[j])
    }

    /// c-hat_j = 2 C_j
    pub fn c_hat(&self, j: usize) -> C64 {
        c_hat_from_big(self.norming[j])
    }
}

pub fn c_from_big(lambda: C64, big: C64) -> C64 {
    -2.0 * big / lambda.powi(4)
}

pub fn big_from_c(lambda: C64, c: C64) -> C64 {
    -0.5 * c * lambda.powi(4)
}

pub fn c_hat_from_big(big: C64) -> C64 {
    2.0 * big
}

/// Transformed reflection coefficients plus the discrete spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringData {
    pub r: SampledComplexFunction,
    pub r_hat: SampledComplexFunction,
    pub spectrum: DiscreteSpectrum,
}

#[derive(Serialize, Deserialize)]
struct SpectrumEntry {
    lambda: [f64; 2],
    #[serde(rename = "C")]
    c: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct ScatteringJson {
    r: Vec<[f64; 3]>,
    r_hat: Vec<[f64; 3]>,
    spectrum: Vec<SpectrumEntry>,
}

fn samples_to_json(f: &SampledComplexFunction) -> Vec<[f64; 3]> {
    (0..f.len()).map(|k| [f.node(k), f.values[k].re, f.values[k].im]).collect()
}

fn samples_from_json(rows: &[[f64; 3]]) -> Result<SampledComplexFunction> {
    let grid: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let vals = rows.iter().map(|r| C64::new(r[1], r[2])).collect();
    SampledComplexFunction::from_grid(&grid, vals)
}

pub fn spectrum_to_json_value(s: &DiscreteSpectrum) -> serde_json::Value {
    let entries: Vec<SpectrumEntry> = s
        .eigenvalues
        .iter()
        .zip(&s.norming)
        .map(|(l, c)| SpectrumEntry { lambda: [l.re, l.im], c: [c.re, c.im] })
        .collect();
    serde_json::to_value(entries).expect("spectrum serializes")
}

pub fn spectrum_from_json_value(v: &serde_json::Value) -> Result<DiscreteSpectrum> {
    let entries: Vec<SpectrumEntry> = serde_json::from_value(v.clone())?;
    DiscreteSpectrum::new(
        entries.iter().map(|e| C64::new(e.lambda[0], e.lambda[1])).collect(),
        entries.iter().map(|e| C64::new(e.c[0], e.c[1])).collect(),
    )
}

impl ScatteringData {
    pub fn to_json(&self) -> String {
        let j = ScatteringJson {
            r: samples_to_json(&self.r),
            r_hat: samples_to_json(&self.r_hat),
            spectrum: self
                .spectrum
                .eigenvalues
                .iter()
                .zip(&self.spectrum.norming)
                .map(|(l, c)| SpectrumEntry { lambda: [l.re, l.im], c: [c.re, c.im] })
                .collect(),
        };
        serde_json::to_string_pretty(&j).expect("scattering data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: ScatteringJson = serde_json::from_str(text)?;
        let spectrum = DiscreteSpectrum::new(
            j.spectrum.iter().map(|e| C64::new(e.lambda[0], e.lambda[1])).collect(),
            j.spectrum.iter().map(|e| C64::new(e.c[0], e.c[1])).collect(),
        )?;
        Ok(Self { r: samples_from_json(&j.r)?, r_hat: samples_from_json(&j.r_hat)?, spectrum })
    }

    /// min over the w-grid of 1 + w|r(w)|^2
    pub fn positivity_margin(&self) -> f64 {
        (0..self.r.len()).map(|k| 1.0 + self.r.node(k) * self.r.values[k].norm_sqr()).fold(f64::INFINITY, f64::min)
    }
}

/// Multiplier e^{-it(s + 1/s)/2}; zero at s = 0 where the data vanish anyway.
fn time_factor(s: C64, t: f64) -> C64 {
    if s.norm() == 0.0 {
        return C64::new(0.0, 0.0);
    }
    (-0.5 * I * t * (s + s.inv())).exp()
}

pub fn evolve_scattering(s: &ScatteringData, t: f64) -> ScatteringData {
    let mut out = s.clone();
    if t == 0.0 {
        return out;
    }
    for k in 0..out.r.len() {
        let w = C64::new(out.r.node(k), 0.0);
        out.r.values[k] *= time_factor(w, t);
    }
    for k in 0..out.r_hat.len() {
        let z = C64::new(out.r_hat.node(k), 0.0);
        out.r_hat.values[k] *= time_factor(z, t);
    }
    for (l, c) in out.spectrum.eigenvalues.iter().zip(out.spectrum.norming.iter_mut()) {
        let l2 = l * l;
        *c *= (-0.5 * I * t * (l2 + l2.inv())).exp();
    }
    out
}

/// Grid and search-box settings for the direct transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScatterConfig {
    pub w_min: f64,
    pub w_max: f64,
    pub n_grid: usize,
    pub search_box: SearchBox,
    pub resonance_tol: f64,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        Self { w_min: -12.0, w_max: 12.0, n_grid: 2048, search_box: SearchBox::default(), resonance_tol: 1e-6 }
    }
}

/// The rectangle [-re_max, re_max] x (0, im_max] of the w-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub re_max: f64,
    pub im_max: f64,
}

impl Default for SearchBox {
    fn default() -> Self {
        Self { re_max: 12.0, im_max: 12.0 }
    }
}

/// Norming data recovered at one eigenvalue.
#[derive(Clone, Copy, Debug)]
pub struct NormingConstant {
    pub w: C64,
    /// Gamma / a'(w) on the w-side
    pub c: C64,
    /// C = -lambda^4 c / 2
    pub big: C64,
    /// Gamma-hat / a-hat'(z) from the z-side problem; equals z_j c-hat_j = 2 lambda_j^2 C_j
    pub c_hat_jost: C64,
    /// |c_hat_jost - 2 lambda^2 C| / |c_hat_jost|: agreement of the two sides
    pub mismatch: f64,
    /// worst least-squares residual of the two proportionality fits
    pub residual: f64,
}

/// Half-width of the gap around w = 0 on the real axis left out of contours;
/// a is continuous there, so the chord across it carries no winding.
const ORIGIN_GAP: f64 = 0.05;
const ARG_STEP: f64 = std::f64::consts::FRAC_PI_4;
const MAX_BISECT: usize = 40;
const MAX_QUAD_DEPTH: usize = 40;
const CAUCHY_NODES: usize = 32;
const PROPORTIONALITY_TOL: f64 = 1e-4;

/// Direct transform of one potential; caches values of a in the upper half plane.
pub struct Scatterer {
    ctx: JostContext,
    cache: Mutex<HashMap<(u64, u64), C64>>,
}

impl Scatterer {
    pub fn new(fields: &FieldState) -> Result<Self> {
        Ok(Self { ctx: JostContext::new(fields)?, cache: Mutex::new(HashMap::new()) })
    }

    /// int (|u|^2 + |v|^2) dx; a(w) tends to exp(-i Q/4) as |w| grows.
    pub fn charge(&self) -> f64 {
        self.ctx.charge
    }

    pub fn transition_w(&self, w: C64) -> Result<(C64, C64)> {
        transition(&self.ctx, Side::W, w)
    }

    pub fn transition_z(&self, z: C64) -> Result<(C64, C64)> {
        transition(&self.ctx, Side::Z, z)
    }

    /// Integrates only the given side, also inside the unit interval where
    /// `transition_w` / `transition_z` switch to the other side. For
    /// cross-checks between the two problems.
    pub fn transition_direct(&self, side: Side, s: C64) -> Result<(C64, C64)> {
        jost::transition_direct(&self.ctx, side, s)
    }

    /// a(w) for Im w >= 0, w != 0, through a-hat(1/w) inside the unit disc.
    pub fn a(&self, w: C64) -> Result<C64> {
        let key = (w.re.to_bits(), w.im.to_bits());
        if let Some(a) = self.cache.lock().unwrap().get(&key) {
            return Ok(*a);
        }
        let a = if w.norm() >= 1.0 { self.transition_w(w)?.0 } else { self.transition_z(w.inv())?.0 };
        self.cache.lock().unwrap().insert(key, a);
        Ok(a)
    }

    /// a'(w) from the Cauchy integral on a circle around w.
    pub fn a_prime(&self, w: C64) -> Result<C64> {
        let rad = 0.25 * w.norm().min(1.0);
        let mut s = C64::new(0.0, 0.0);
        for k in 0..CAUCHY_NODES {
            let e = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / CAUCHY_NODES as f64);
            s += self.a_any(w + rad * e)? / e;
        }
        Ok(s / (CAUCHY_NODES as f64 * rad))
    }

    /// a off the cache, valid on either half plane for compact support.
    fn a_any(&self, w: C64) -> Result<C64> {
        if w.norm() >= 1.0 {
            Ok(self.transition_w(w)?.0)
        } else {
            Ok(self.transition_z(w.inv())?.0)
        }
    }

    /// r(w) = b(w)/a(w) on a uniform real grid.
    pub fn reflection_w(&self, start: f64, end: f64, n: usize, tol: f64) -> Result<SampledComplexFunction> {
        self.reflection(Side::W, start, end, n, tol)
    }

    /// r-hat(z) = b-hat(z)/a-hat(z) from the z-side problem.
    pub fn reflection_z(&self, start: f64, end: f64, n: usize, tol: f64) -> Result<SampledComplexFunction> {
        self.reflection(Side::Z, start, end, n, tol)
    }

    /// r(s) (W) or r-hat(s) (Z) at a single real point.
    pub fn reflection_at(&self, side: Side, s: f64) -> Result<C64> {
        let (a, b) = transition(&self.ctx, side, C64::new(s, 0.0))?;
        Ok(b / a)
    }

    fn reflection(&self, side: Side, start: f64, end: f64, n: usize, tol: f64) -> Result<SampledComplexFunction> {
        let grid = SampledComplexFunction::zeros(start, end, n);
        let vals: Result<Vec<C64>> = (0..n)
            .into_par_iter()
            .map(|k| {
                let s = grid.node(k);
                if s == 0.0 {
                    // s r(s) stays bounded and r decays at the far end of the other side
                    return Ok(C64::new(0.0, 0.0));
                }
                let (a, b) = transition(&self.ctx, side, C64::new(s, 0.0))?;
                if a.norm() < tol {
                    return Err(Error::Resonance(format!("|a({s})| = {:e} below {tol:e}", a.norm())));
                }
                Ok(b / a)
            })
            .collect();
        Ok(SampledComplexFunction { values: vals?, ..grid })
    }

    /// Zeros w_j of a in the search box.
    pub fn eigenvalues_w(&self, bx: SearchBox) -> Result<Vec<C64>> {
        let rect = Rect { x0: -bx.re_max, x1: bx.re_max, y0: 0.0, y1: bx.im_max };
        let coarse = self.winding(rect, 16)?;
        let fine = self.winding(rect, 32)?;
        if coarse != fine {
            return Err(Error::Resolution(format!(
                "zero count {coarse} on the coarse contour, {fine} on the refined one"
            )));
        }
        let mut out = Vec::new();
        self.isolate(rect, fine, 0, &mut out)?;
        out.sort_by(|a, b| a.re.total_cmp(&b.re));
        Ok(out)
    }

    fn isolate(&self, r: Rect, count: i64, depth: usize, out: &mut Vec<C64>) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        if count < 0 {
            return Err(Error::Resolution("negative winding number".into()));
        }
        if count == 1 && r.size() < 2.0 {
            if let Ok(w) = self.newton(r.center()) {
                if r.contains(w, 1e-9) {
                    out.push(w);
                    return Ok(());
                }
            }
        }
        if depth >= MAX_QUAD_DEPTH {
            return Err(Error::Resolution("quadrisection did not isolate the zeros".into()));
        }
        let parts = r.split();
        let mut counts = [0; 4];
        for (c, p) in counts.iter_mut().zip(&parts) {
            *c = self.winding(*p, 16)?;
        }
        if counts.iter().sum::<i64>() != count {
            return Err(Error::Resolution("zero counts of sub-rectangles do not add up".into()));
        }
        for (c, p) in counts.iter().zip(parts) {
            self.isolate(p, *c, depth + 1, out)?;
        }
        Ok(())
    }

    fn newton(&self, mut w: C64) -> Result<C64> {
        for _ in 0..60 {
            let a = self.a_any(w)?;
            if a.norm() <= 1e-13 {
                break;
            }
            let d = self.a_prime(w)?;
            if d.norm() == 0.0 {
                return Err(Error::Convergence("a' vanished during Newton".into()));
            }
            let step = a / d;
            w -= step;
            if w.im <= 0.0 || !w.is_finite() {
                return Err(Error::Convergence("Newton left the upper half plane".into()));
            }
            if step.norm() <= 1e-15 * w.norm() {
                break;
            }
        }
        let a = self.a_any(w)?;
        if a.norm() > 1e-10 {
            return Err(Error::Convergence(format!("|a| = {:e} after Newton at {w}", a.norm())));
        }
        let d = self.a_prime(w)?;
        if d.norm() < 1e-8 {
            return Err(Error::NonSimple(format!("|a'({w})| = {:e}", d.norm())));
        }
        Ok(w)
    }

    /// Winding number of a around the rectangle, starting from `per_edge`
    /// samples per side and bisecting until every argument step is small.
    fn winding(&self, r: Rect, per_edge: usize) -> Result<i64> {
        let mut pts: Vec<C64> = Vec::with_capacity(4 * per_edge);
        let corners = [C64::new(r.x0, r.y0), C64::new(r.x1, r.y0), C64::new(r.x1, r.y1), C64::new(r.x0, r.y1)];
        for e in 0..4 {
            let (p, q) = (corners[e], corners[(e + 1) % 4]);
            for k in 0..per_edge {
                let w = p + (q - p) * (k as f64 / per_edge as f64);
                if !self.in_gap(w) {
                    pts.push(w);
                }
                // pin the gap ends so only the short chord skips the origin
                if e == 0 && r.y0 == 0.0 {
                    let next = p.re + (q.re - p.re) * ((k + 1) as f64 / per_edge as f64);
                    for g in [-ORIGIN_GAP, ORIGIN_GAP] {
                        if w.re < g && g < next {
                            pts.push(C64::new(g, 0.0));
                        }
                    }
                }
            }
        }
        let vals: Result<Vec<C64>> = pts.par_iter().map(|&w| self.a(w)).collect();
        let vals = vals?;
        let mut total = 0.0;
        for k in 0..pts.len() {
            let j = (k + 1) % pts.len();
            total += self.arg_change(pts[k], vals[k], pts[j], vals[j], 0)?;
        }
        let turns = total / (2.0 * std::f64::consts::PI);
        let n = turns.round();
        if (turns - n).abs() > 0.05 {
            return Err(Error::Resolution(format!("winding {turns} is not an integer")));
        }
        Ok(n as i64)
    }

    fn in_gap(&self, w: C64) -> bool {
        w.im == 0.0 && w.re.abs() < ORIGIN_GAP
    }

    fn arg_change(&self, p: C64, ap: C64, q: C64, aq: C64, depth: usize) -> Result<f64> {
        if ap.norm() == 0.0 || aq.norm() == 0.0 {
            return Err(Error::Resolution(format!("a vanishes on the contour near {p}")));
        }
        let d = (aq / ap).arg();
        let mid = 0.5 * (p + q);
        let across_gap = p.im == 0.0 && q.im == 0.0 && p.re * q.re < 0.0 && (q.re - p.re).abs() <= 2.0 * ORIGIN_GAP;
        if across_gap {
            return Ok(d);
        }
        // a segment is accepted only if its midpoint confirms a small, consistent turn;
        // this guards against a whole extra turn hiding between two samples
        let am = self.a(mid)?;
        if am.norm() == 0.0 {
            return Err(Error::Resolution(format!("a vanishes on the contour near {mid}")));
        }
        let (d1, d2) = ((am / ap).arg(), (aq / am).arg());
        if d.abs() <= ARG_STEP && d1.abs() <= ARG_STEP && d2.abs() <= ARG_STEP && (d1 + d2 - d).abs() < 1e-9 {
            return Ok(d);
        }
        if depth >= MAX_BISECT {
            return Err(Error::Resolution(format!("argument of a not resolved near {p}")));
        }
        Ok(self.arg_change(p, ap, mid, am, depth + 1)? + self.arg_change(mid, am, q, aq, depth + 1)?)
    }

    /// c, c-hat and C at each w_j.
    pub fn norming(&self, ws: &[C64]) -> Result<Vec<NormingConstant>> {
        ws.par_iter()
            .map(|&w| {
                let a = self.a_any(w)?;
                if a.norm() > 1e-8 {
                    return Err(Error::Inaccurate(format!("|a({w})| = {:e} is not a zero", a.norm())));
                }
                let (g, r1) = proportionality(&self.ctx, Side::W, w)?;
                let z = w.inv();
                let (gh, r2) = proportionality(&self.ctx, Side::Z, z)?;
                let residual = r1.max(r2);
                if residual > PROPORTIONALITY_TOL {
                    return Err(Error::Inaccurate(format!("proportionality residual {residual:e} at {w}")));
                }
                let da = self.a_prime(w)?;
                // a-hat(z) = a(1/z)
                let da_hat = -da * w * w;
                let c = g / da;
                let c_hat_jost = gh / da_hat;
                let lambda = lambda_from_w(w);
                let big = big_from_c(lambda, c);
                let mismatch = (c_hat_jost - 2.0 * lambda * lambda * big).norm() / c_hat_jost.norm();
                Ok(NormingConstant { w, c, big, c_hat_jost, mismatch, residual })
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
struct Rect {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Rect {
    fn size(&self) -> f64 {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }

    fn center(&self) -> C64 {
        C64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn contains(&self, w: C64, slack: f64) -> bool {
        w.re >= self.x0 - slack && w.re <= self.x1 + slack && w.im >= self.y0 - slack && w.im <= self.y1 + slack
    }

    /// Off-centre split so a zero on a symmetric line never sits on an edge.
    fn split(&self) -> [Rect; 4] {
        let xm = self.x0 + 0.5037 * (self.x1 - self.x0);
        let ym = self.y0 + 0.4961 * (self.y1 - self.y0);
        [
            Rect { x0: self.x0, x1: xm, y0: self.y0, y1: ym },
            Rect { x0: xm, x1: self.x1, y0: self.y0, y1: ym },
            Rect { x0: self.x0, x1: xm, y0: ym, y1: self.y1 },
            Rect { x0: xm, x1: self.x1, y0: ym, y1: self.y1 },
        ]
    }
}

/// lambda in the open second quadrant with lambda^{-2} = w.
pub fn lambda_from_w(w: C64) -> C64 {
    let l = w.inv().sqrt();
    if l.re < 0.0 {
        l
    } else {
        -l
    }
}

pub fn transition_w(fields: &FieldState, w: C64) -> Result<(C64, C64)> {
    Scatterer::new(fields)?.transition_w(w)
}

pub fn transition_z(fields: &FieldState, z: C64) -> Result<(C64, C64)> {
    Scatterer::new(fields)?.transition_z(z)
}

pub fn reflection(fields: &FieldState, start: f64, end: f64, n: usize) -> Result<SampledComplexFunction> {
    Scatterer::new(fields)?.reflection_w(start, end, n, ScatterConfig::default().resonance_tol)
}

pub fn reflection_hat(fields: &FieldState, start: f64, end: f64, n: usize) -> Result<SampledComplexFunction> {
    Scatterer::new(fields)?.reflection_z(start, end, n, ScatterConfig::default().resonance_tol)
}

/// Eigenvalues lambda_j (second quadrant), ordered by Re w_j.
pub fn find_eigenvalues(fields: &FieldState, bx: SearchBox) -> Result<Vec<C64>> {
    Ok(Scatterer::new(fields)?.eigenvalues_w(bx)?.into_iter().map(lambda_from_w).collect())
}

pub fn norming_constants(fields: &FieldState, ws: &[C64]) -> Result<Vec<NormingConstant>> {
    Scatterer::new(fields)?.norming(ws)
}

/// The full direct transform.
pub fn scattering_data(fields: &FieldState, cfg: &ScatterConfig) -> Result<ScatteringData> {
    let sc = Scatterer::new(fields)?;
    let r = sc.reflection_w(cfg.w_min, cfg.w_max, cfg.n_grid, cfg.resonance_tol)?;
    let r_hat = sc.reflection_z(cfg.w_min, cfg.w_max, cfg.n_grid, cfg.resonance_tol)?;
    let ws = sc.eigenvalues_w(cfg.search_box)?;
    let norming = sc.norming(&ws)?;
    let spectrum =
        DiscreteSpectrum::new(ws.iter().map(|&w| lambda_from_w(w)).collect(), norming.iter().map(|n| n.big).collect())?;
    Ok(ScatteringData { r, r_hat, spectrum })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_data() -> ScatteringData {
        let r = SampledComplexFunction::sample(-4.0, 4.0, 33, |w| C64::new((-w * w).exp(), 0.3 * w));
        let r_hat = SampledComplexFunction::sample(-4.0, 4.0, 33, |z| C64::new(0.1 * z, -(-z * z).exp()));
        let spectrum = DiscreteSpectrum::new(
            vec![C64::new(-0.5, 0.9), C64::new(-1.2, 0.3)],
            vec![C64::new(1.0, -0.5), C64::new(0.2, 0.0)],
        );
        ScatteringData { r, r_hat, spectrum: spectrum.unwrap() }
    }

    #[test]
    fn spectrum_invariants() {
        let l = C64::new(-0.6, 1.1);
        let s = DiscreteSpectrum::new(vec![l], vec![C64::new(0.4, -0.2)]).unwrap();
        assert!((s.w(0) * s.z(0) - 1.0).norm() < 1e-14);
        assert!((s.c(0) * l.powi(4) + 2.0 * s.norming[0]).norm() < 1e-14);
        assert!((s.c_hat(0) - 2.0 * s.norming[0]).norm() == 0.0);
        assert!((big_from_c(l, s.c(0)) - s.norming[0]).norm() < 1e-14);
        assert!(DiscreteSpectrum::new(vec![C64::new(0.5, 1.0)], vec![C64::new(1.0, 0.0)]).is_err());
        assert!(DiscreteSpectrum::new(vec![l], vec![C64::new(0.0, 0.0)]).is_err());
        assert!(DiscreteSpectrum::new(vec![l, l], vec![C64::new(1.0, 0.0); 2]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = sample_data();
        let back = ScatteringData::from_json(&d.to_json()).unwrap();
        assert_eq!(back.spectrum, d.spectrum);
        assert_eq!(back.r.values, d.r.values);
        assert!((back.r.h - d.r.h).abs() < 1e-15);
    }

    #[test]
    fn evolution_examples() {
        let d = sample_data();
        assert_eq!(evolve_scattering(&d, 0.0), d);
        let e = evolve_scattering(&d, 3.7);
        for k in (0..d.r.len()).filter(|&k| d.r.node(k) != 0.0) {
            assert!((e.r.values[k].norm() - d.r.values[k].norm()).abs() < 1e-15);
        }
        // purely imaginary lambda = i s
        let s = 0.8;
        let sp = DiscreteSpectrum { eigenvalues: vec![C64::new(0.0, s)], norming: vec![C64::new(1.0, 0.0)] };
        let d2 = ScatteringData { spectrum: sp, ..d };
        let t = 2.5;
        let e2 = evolve_scattering(&d2, t);
        let expect = (I * t * (s * s + 1.0 / (s * s)) / 2.0).exp();
        assert!((e2.spectrum.norming[0] - expect).norm() < 1e-14);
    }
}
