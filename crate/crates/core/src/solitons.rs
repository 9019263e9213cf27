//! Exact soliton solutions from the reflectionless Riemann-Hilbert problems,
//! cone restriction of scattering data and modified norming constants.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::core::{FieldState, SampledComplexFunction, I};
use crate::error::{Error, Result};
use crate::linalg::{solve_scaled, Dense};
use crate::quad;
use crate::scattering::{DiscreteSpectrum, ScatteringData};

pub const MAX_SOLITONS: usize = 16;
pub const COND_LIMIT: f64 = 1e12;

/// Pairs (lambda_j, C_j); same invariants as a discrete spectrum.
pub type SolitonData = DiscreteSpectrum;

/// Physical parameters of a one-soliton. `gamma = arg(lambda^{-2})` lies in
/// (0, pi), so lambda = -delta e^{-i gamma/2}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OneSolitonParams {
    pub delta: f64,
    pub gamma: f64,
    pub e: f64,
    pub beta: f64,
    pub nu: f64,
    /// centre and phase carried by u
    pub x0: f64,
    pub phi0: f64,
    /// centre and phase carried by v
    pub x0_hat: f64,
    pub phi0_hat: f64,
}

pub fn one_soliton_params(lambda: C64, big_c: C64) -> Result<OneSolitonParams> {
    let spec = DiscreteSpectrum::new(vec![lambda], vec![big_c])?;
    let delta = lambda.norm();
    let w1 = spec.w(0);
    let gamma = w1.arg();
    let rho = w1.norm();
    let sg = gamma.sin();
    let e = 0.5 * (delta * delta + delta.powi(-2)) * sg;
    let beta = 0.5 * (delta * delta + delta.powi(-2)) * gamma.cos();
    let nu = (delta.powi(-2) - delta * delta) / (delta.powi(-2) + delta * delta);
    let c = spec.c(0) / w1;
    let ch = spec.c_hat(0);
    let x0 = (c.norm() / (2.0 * rho.sqrt() * sg)).ln() / e;
    let x0_hat = (rho.sqrt() * ch.norm() / (2.0 * sg)).ln() / e;
    let phi0 = (-(c / c.norm()) * (-0.5 * I * gamma).exp()).arg();
    let phi0_hat = ((ch / ch.norm()) * (0.5 * I * gamma).exp()).arg();
    Ok(OneSolitonParams { delta, gamma, e, beta, nu, x0, phi0, x0_hat, phi0_hat })
}

fn sech(z: C64) -> C64 {
    z.cosh().inv()
}

/// u = delta^{-1} sin(g) sech[E(x - nu t - x0) - i g/2] e^{-i beta (t - nu x) + i phi0}
/// v = -delta sin(g) sech[E(x - nu t - x0') + i g/2] e^{-i beta (t - nu x) + i phi0'}
pub fn one_soliton(lambda: C64, big_c: C64, t: f64, x: f64) -> Result<(C64, C64)> {
    let p = one_soliton_params(lambda, big_c)?;
    Ok(one_soliton_eval(&p, t, x))
}

pub fn one_soliton_eval(p: &OneSolitonParams, t: f64, x: f64) -> (C64, C64) {
    let sg = p.gamma.sin();
    let carrier = -p.beta * (t - p.nu * x);
    let u =
        sech(C64::new(p.e * (x - p.nu * t - p.x0), -0.5 * p.gamma)) * (I * (carrier + p.phi0)).exp() * (sg / p.delta);
    let v = sech(C64::new(p.e * (x - p.nu * t - p.x0_hat), 0.5 * p.gamma))
        * (I * (carrier + p.phi0_hat)).exp()
        * (-p.delta * sg);
    (u, v)
}

/// Solves the residue system of a reflectionless RHP whose poles are
/// `poles[j]` (coupling `ln_x[j]`, column 2 -> column 1) and their conjugates
/// (coupling `ln_y[j]`, column 1 -> column 2). Couplings are passed as logs.
///
/// Returns (lim s M_12(s), M_11(0)).
fn residue_system(poles: &[C64], ln_x: &[C64], ln_y: &[C64]) -> Result<(C64, C64)> {
    let n = poles.len();
    if n == 0 {
        return Ok((C64::new(0.0, 0.0), C64::new(1.0, 0.0)));
    }
    if n > MAX_SOLITONS {
        return Err(Error::InvalidData(format!("at most {MAX_SOLITONS} solitons")));
    }
    // unknowns: alpha_j = res_{p_j} M_11 (0..n), beta_j = res_{conj p_j} M_12 (n..2n)
    //   alpha_j - X_j sum_k beta_k/(p_j - conj p_k) = 0
    //   beta_j  - Y_j sum_k alpha_k/(conj p_j - p_k) = Y_j
    // rows with |X_j| or |Y_j| > 1 are divided by the coupling (in log form).
    let mut m = Dense::zeros(2 * n);
    let mut b = vec![C64::new(0.0, 0.0); 2 * n];
    for j in 0..n {
        let (diag, off) =
            if ln_x[j].re > 0.0 { ((-ln_x[j]).exp(), C64::new(1.0, 0.0)) } else { (C64::new(1.0, 0.0), ln_x[j].exp()) };
        m.set(j, j, diag);
        for k in 0..n {
            m.set(j, n + k, -off / (poles[j] - poles[k].conj()));
        }
        let (diag, off, rhs) = if ln_y[j].re > 0.0 {
            ((-ln_y[j]).exp(), C64::new(1.0, 0.0), C64::new(1.0, 0.0))
        } else {
            (C64::new(1.0, 0.0), ln_y[j].exp(), ln_y[j].exp())
        };
        m.set(n + j, n + j, diag);
        for k in 0..n {
            m.set(n + j, k, -off / (poles[j].conj() - poles[k]));
        }
        b[n + j] = rhs;
    }
    let (sol, cond) = solve_scaled(m, b)?;
    if !(cond <= COND_LIMIT) {
        return Err(Error::Singular(format!("residue system condition number {cond:e}")));
    }
    let lim: C64 = sol[n..].iter().sum();
    let m11 = C64::new(1.0, 0.0) - (0..n).map(|k| sol[k] / poles[k]).sum::<C64>();
    Ok((lim, m11))
}

/// (i/2)(w - 1/w) x - (i/2)(w + 1/w) t
fn phi_w(w: C64, t: f64, x: f64) -> C64 {
    let wi = w.inv();
    0.5 * I * (w - wi) * x - 0.5 * I * (w + wi) * t
}

/// -(i/2)(z - 1/z) x - (i/2)(z + 1/z) t
fn phi_z(z: C64, t: f64, x: f64) -> C64 {
    let zi = z.inv();
    -0.5 * I * (z - zi) * x - 0.5 * I * (z + zi) * t
}

/// Multi-soliton (u, v) at one space-time point.
pub fn n_soliton_point(d: &SolitonData, t: f64, x: f64) -> Result<(C64, C64)> {
    let n = d.len();
    let ws: Vec<C64> = (0..n).map(|j| d.w(j)).collect();
    // X_j = c_j e^{phi(w_j)}, Y_j = -conj(c_j / w_j) e^{-phi(conj w_j)}
    let lx: Vec<C64> = (0..n).map(|j| d.c(j).ln() + phi_w(ws[j], t, x)).collect();
    let ly: Vec<C64> = (0..n).map(|j| (-(d.c(j) / ws[j]).conj()).ln() - phi_w(ws[j].conj(), t, x)).collect();
    let (lim, m11) = residue_system(&ws, &lx, &ly)?;
    let u = m11 * lim.conj();

    let zs: Vec<C64> = (0..n).map(|j| d.z(j)).collect();
    // X_j = z_j c-hat_j e^{phi-hat(z_j)}, Y_j = -conj(c-hat_j) e^{-phi-hat(conj z_j)}
    let lx: Vec<C64> = (0..n).map(|j| (zs[j] * d.c_hat(j)).ln() + phi_z(zs[j], t, x)).collect();
    let ly: Vec<C64> = (0..n).map(|j| (-d.c_hat(j).conj()).ln() - phi_z(zs[j].conj(), t, x)).collect();
    let (lim, m11) = residue_system(&zs, &lx, &ly)?;
    let v = m11 * lim.conj();
    Ok((u, v))
}

/// Multi-soliton on a uniform grid of `n` nodes starting at `x_start`.
pub fn n_soliton(d: &SolitonData, t: f64, x_start: f64, dx: f64, n: usize) -> Result<FieldState> {
    d.validate()?;
    let pts: Vec<(C64, C64)> =
        (0..n).into_par_iter().map(|k| n_soliton_point(d, t, x_start + k as f64 * dx)).collect::<Result<_>>()?;
    let (u, v) = pts.into_iter().unzip();
    FieldState::new(t, x_start, dx, u, v)
}

/// L = sqrt((1 - v)/(1 + v))
pub fn cone_parameter(v: f64) -> f64 {
    ((1.0 - v) / (1.0 + v)).sqrt()
}

/// Index partition of the spectrum relative to a cone.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConePartition {
    pub inside: Vec<usize>,
    /// |lambda|^2 below the cone range
    pub below: Vec<usize>,
    /// |lambda|^2 above the cone range
    pub above: Vec<usize>,
}

/// Classifies eigenvalues for the cone with velocities v1 <= v2.
/// The cone in z_0 is [L(v2), L(v1)]: faster solitons have smaller |lambda|^2.
pub fn cone_partition(spec: &DiscreteSpectrum, v1: f64, v2: f64) -> Result<ConePartition> {
    if !(-1.0 < v1 && v1 <= v2 && v2 < 1.0) {
        return Err(Error::Domain(format!("cone velocities must satisfy -1 < v1 <= v2 < 1, got {v1}, {v2}")));
    }
    let (lo, hi) = (cone_parameter(v2), cone_parameter(v1));
    let mut p = ConePartition::default();
    for (k, l) in spec.eigenvalues.iter().enumerate() {
        let m = l.norm_sqr();
        if m < lo {
            p.below.push(k);
        } else if m > hi {
            p.above.push(k);
        } else {
            p.inside.push(k);
        }
    }
    Ok(p)
}

/// (conj(p)/p) ((s - p)/(s - conj p))^2, the Blaschke factor in any of the
/// variables lambda^2, z or w (the three forms agree).
pub fn blaschke(s: C64, p: C64) -> C64 {
    let q = (s - p) / (s - p.conj());
    p.conj() / p * q * q
}

/// Scattering data with the solitons that left the cone removed:
/// `removed` eigenvalues contribute Blaschke factors, the rest outside the
/// cone are dropped.
pub fn cone_restrict_with(s: &ScatteringData, keep: &[usize], removed: &[usize]) -> ScatteringData {
    let spec = &s.spectrum;
    let ws: Vec<C64> = removed.iter().map(|&j| spec.w(j)).collect();
    let zs: Vec<C64> = removed.iter().map(|&j| spec.z(j)).collect();
    let prod = |s: C64, ps: &[C64]| ps.iter().fold(C64::new(1.0, 0.0), |acc, p| acc * blaschke(s, *p));
    let mut r = s.r.clone();
    for k in 0..r.len() {
        let f = prod(C64::new(r.node(k), 0.0), &ws);
        r.values[k] *= f;
    }
    let mut r_hat = s.r_hat.clone();
    for k in 0..r_hat.len() {
        let f = prod(C64::new(r_hat.node(k), 0.0), &zs);
        r_hat.values[k] *= f;
    }
    let eigenvalues: Vec<C64> = keep.iter().map(|&k| spec.eigenvalues[k]).collect();
    let norming = keep.iter().map(|&k| spec.norming[k] * prod(spec.z(k), &zs)).collect();
    ScatteringData { r, r_hat, spectrum: DiscreteSpectrum { eigenvalues, norming } }
}

/// Restriction to the cone K(v1, v2, x1, x2); the initial points x1, x2 do
/// not enter the formulas.
pub fn cone_restrict(s: &ScatteringData, v1: f64, v2: f64) -> Result<ScatteringData> {
    let p = cone_partition(&s.spectrum, v1, v2)?;
    Ok(cone_restrict_with(s, &p.inside, &p.below))
}

/// Both integral forms of the modified norming constant for eigenvalue j.
#[derive(Clone, Copy, Debug)]
pub struct ResolutionConstant {
    pub c_tilde: C64,
    pub c_tilde_w: C64,
}

/// log(1 + s|f(s)|^2), with the argument checked.
fn log_weight(f: &SampledComplexFunction, s: f64) -> f64 {
    (1.0 + s * f.eval(s).norm_sqr()).max(f64::MIN_POSITIVE).ln()
}

/// Modified norming constants for eigenvalues sharing |lambda_j|^2 = l0.
pub fn resolution_constants(s: &ScatteringData, l0: f64) -> Result<Vec<ResolutionConstant>> {
    let spec = &s.spectrum;
    for l in &spec.eigenvalues {
        if (l.norm_sqr() - l0).abs() > 1e-8 * l0.max(1.0) {
            return Err(Error::InvalidData(format!(
                "eigenvalue modulus |lambda|^2 = {} differs from L0 = {l0}",
                l.norm_sqr()
            )));
        }
    }
    let r_hat = &s.r_hat;
    let r = &s.r;
    let w_max = r.end().min(-r.start);
    let mut out = Vec::with_capacity(spec.len());
    for j in 0..spec.len() {
        let zj = spec.z(j);
        let wj = spec.w(j);
        if zj.im == 0.0 {
            return Err(Error::Domain("real z_j in resolution integral".into()));
        }
        let gz = |z: f64| {
            let kern = (z - zj).inv() - 0.5 / z;
            kern * log_weight(r_hat, z)
        };
        let iz = quad::integrate(-l0, 0.0, gz) + quad::integrate(0.0, l0, gz);
        let c_tilde = spec.norming[j] * (iz / (std::f64::consts::PI * I)).exp();

        // w-side: sampled r on 1/l0 < |w| < w_max, r_hat-closed tail beyond
        let gw = |w: f64| {
            let kern = (w - wj).inv() - 0.5 / w;
            kern * log_weight(r, w)
        };
        let a = 1.0 / l0;
        let mut iw = C64::new(0.0, 0.0);
        if w_max > a {
            let panels = (((w_max - a) / 0.25).ceil() as usize).max(quad::PANELS);
            iw += quad::integrate_panels(a, w_max, panels, gw);
            iw += quad::integrate_panels(-w_max, -a, panels, gw);
        }
        let tail_z = if w_max > a { 1.0 / w_max } else { l0 };
        iw -= quad::integrate(-tail_z, 0.0, gz) + quad::integrate(0.0, tail_z, gz);
        let c_tilde_w = spec.norming[j] * (-iw / (std::f64::consts::PI * I)).exp();
        out.push(ResolutionConstant { c_tilde, c_tilde_w });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lam(r: f64, arg: f64) -> C64 {
        C64::from_polar(r, arg)
    }

    #[test]
    fn parameter_examples() {
        // |lambda| = 1, gamma = pi/2  <=>  lambda = e^{3 i pi/4}
        let p = one_soliton_params(lam(1.0, 0.75 * PI), C64::new(0.3, 0.1)).unwrap();
        assert!((p.e - 1.0).abs() < 1e-14 && p.beta.abs() < 1e-14 && p.nu.abs() < 1e-15);
        assert!((p.gamma - 0.5 * PI).abs() < 1e-14);
        assert!(one_soliton(lam(1.0, 0.25 * PI), C64::new(1.0, 0.0), 0.0, 0.0).is_err());
        assert!(one_soliton(lam(1.0, 0.75 * PI), C64::new(0.0, 0.0), 0.0, 0.0).is_err());
    }

    #[test]
    fn peak_amplitude() {
        let l = lam(0.8, 0.62 * PI);
        let p = one_soliton_params(l, C64::new(0.5, -0.2)).unwrap();
        let mut best: f64 = 0.0;
        let n = 200001;
        for k in 0..n {
            let x = p.x0 - 10.0 + 20.0 * k as f64 / (n - 1) as f64;
            best = best.max(one_soliton_eval(&p, 0.0, x).0.norm());
        }
        let expect = 2.0 / p.delta * (0.5 * p.gamma).sin();
        assert!((best - expect).abs() < 1e-8, "{best} vs {expect}");
    }

    #[test]
    fn n0_is_zero() {
        let f = n_soliton(&DiscreteSpectrum::empty(), 1.0, -2.0, 0.5, 9).unwrap();
        assert!(f.u.iter().chain(&f.v).all(|z| z.norm() == 0.0));
    }

    #[test]
    fn blaschke_forms_agree_and_are_unimodular_on_axes() {
        let l = lam(0.9, 0.7 * PI);
        let (l2, z, w) = (l * l, l * l, (l * l).inv());
        for &s in &[C64::new(0.3, 0.2), C64::new(-1.5, 0.7)] {
            let a = blaschke(s, l2);
            let b = blaschke(s, z);
            let c = blaschke(s.inv(), w);
            assert!((a - b).norm() < 1e-14 && (a - c).norm() < 1e-13);
        }
        for &s in &[0.3, -2.0, 7.0] {
            assert!((blaschke(C64::new(s, 0.0), z).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cone_parameter_at_rest() {
        assert_eq!(cone_parameter(0.0), 1.0);
        let spec = DiscreteSpectrum::new(
            vec![C64::from_polar(0.5f64.sqrt(), 0.6 * PI), C64::from_polar(2.0f64.sqrt(), 0.7 * PI)],
            vec![C64::new(1.0, 0.0); 2],
        )
        .unwrap();
        let p = cone_partition(&spec, 0.5, 0.7).unwrap();
        // L(0.6) = 0.5: soliton 0 moves at 0.6, inside; soliton 1 (speed -0.6) is slower
        assert_eq!(p.inside, vec![0]);
        assert_eq!(p.above, vec![1]);
        assert!(cone_partition(&spec, 0.5, 0.2).is_err());
    }
}
