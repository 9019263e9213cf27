//! Long-time predictions inside the light cone: the scalar function delta,
//! its connection constants at the stationary points, and the profiles
//! f_-(x/t), f_+(x/t) of the radiation.
//!
//! Conventions: kappa(w) = (1/2pi) ln(1 + w |r(w)|^2), kappa-hat(z) the same
//! with r-hat, so kappa-hat(z) = kappa(1/z). Along the ray x/t = speed,
//! z0 = sqrt((1 - speed)/(1 + speed)) and w0 = 1/z0.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::core::{cone_coords, principal_pow, SampledComplexFunction, Spectral, I};
use crate::error::{Error, Result};
use crate::quad;
use crate::scattering::Side;

/// Lanczos coefficients (g = 7, n = 9).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// A logarithm of Gamma(z): exp(ln_gamma(z)) = Gamma(z). For Re z >= 1/2 it is
/// the principal branch continuous from the positive axis.
pub fn ln_gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        // reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        return C64::new(PI.ln(), 0.0) - (PI * z).sin().ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: C64) -> C64 {
    ln_gamma(z).exp()
}

/// 1/Gamma(z), finite at the poles.
pub fn rgamma(z: C64) -> C64 {
    if z.re < 0.5 && (z.im == 0.0 && z.re == z.re.round()) {
        return C64::new(0.0, 0.0);
    }
    if z.norm() < 0.25 {
        // 1/Gamma(z) = z / Gamma(1 + z)
        return z * (-ln_gamma(1.0 + z)).exp();
    }
    (-ln_gamma(z)).exp()
}

/// A reflection coefficient on the real line: samples or any evaluable
/// function, taken to vanish outside [lo, hi].
#[derive(Clone, Copy)]
pub struct ReflectionFn<'a> {
    f: &'a dyn Spectral,
    pub lo: f64,
    pub hi: f64,
}

impl<'a> ReflectionFn<'a> {
    /// Wraps samples; rejects 1 + s|r(s)|^2 <= 0 at any node.
    pub fn sampled(r: &'a SampledComplexFunction) -> Result<Self> {
        let out = Self { f: r, lo: r.start, hi: r.end() };
        for k in 0..r.len() {
            out.kappa(r.node(k))?;
        }
        Ok(out)
    }

    /// Wraps a function supported in [lo, hi] (infinite bounds allowed),
    /// checked on `checks` points of [-1, 1] and their reciprocals.
    pub fn new(f: &'a dyn Spectral, lo: f64, hi: f64, checks: usize) -> Result<Self> {
        if !(lo < 0.0 && hi > 0.0) {
            return Err(Error::Domain(format!("support [{lo}, {hi}] must contain 0")));
        }
        let out = Self { f, lo, hi };
        for k in 0..checks {
            let s = -1.0 + 2.0 * (k as f64 + 0.5) / checks as f64;
            out.kappa(s)?;
            out.kappa(1.0 / s)?;
        }
        Ok(out)
    }

    pub fn at(&self, s: f64) -> C64 {
        if s < self.lo || s > self.hi {
            return C64::new(0.0, 0.0);
        }
        self.f.at(s)
    }

    /// (1/2pi) ln(1 + s |r(s)|^2)
    pub fn kappa(&self, s: f64) -> Result<f64> {
        let arg = 1.0 + s * self.at(s).norm_sqr();
        if !(arg > 0.0) {
            return Err(Error::InvalidData(format!("1 + s|r(s)|^2 = {arg} is not positive at s = {s}")));
        }
        Ok(arg.ln() / (2.0 * PI))
    }

    /// `kappa` for use inside quadrature, after validation.
    fn k(&self, s: f64) -> f64 {
        (1.0 + s * self.at(s).norm_sqr()).max(f64::MIN_POSITIVE).ln() / (2.0 * PI)
    }

    /// PV int kappa(s)/(s - w) ds over the support; |s| > 1 is mapped to z = 1/s.
    fn hilbert(&self, w: f64) -> f64 {
        let k = |s: f64| self.k(s);
        let inner = pv(&k, self.lo.max(-1.0), self.hi.min(1.0), w);
        // int kappa(s)/(s - w) ds over |s| > 1 equals int F(z)/(1 - w z) dz, F(z) = kappa(1/z)/z
        let big = |z: f64| if z == 0.0 { 0.0 } else { self.k(1.0 / z) / z };
        let outer = |a: f64, b: f64| {
            if w == 0.0 {
                quad::integrate_real(a, b, big)
            } else {
                -pv(&big, a, b, 1.0 / w) / w
            }
        };
        let mut total = inner;
        if self.hi > 1.0 {
            total += outer(1.0 / self.hi, 1.0);
        }
        if self.lo < -1.0 {
            total += outer(-1.0, 1.0 / self.lo);
        }
        total
    }

    /// (d_- d_+)(w) = exp(-2i PV int kappa(s)/(s - w) ds), unimodular on the real line.
    fn dd(&self, w: f64) -> C64 {
        C64::from_polar(1.0, -2.0 * self.hilbert(w))
    }

    /// d(0) = exp(-i int kappa(s)/s ds).
    fn d_at_zero(&self) -> C64 {
        C64::from_polar(1.0, -self.hilbert(0.0))
    }

    /// int kappa(s)/s ds over the support.
    fn kappa_over_s(&self) -> f64 {
        self.hilbert(0.0)
    }
}

/// kappa-hat(z) = (1/2pi) ln(1 + z |r-hat(z)|^2); the same map gives kappa from r.
pub fn kappa_hat(r_hat: &SampledComplexFunction, z: f64) -> Result<f64> {
    ReflectionFn { f: r_hat, lo: r_hat.start, hi: r_hat.end() }.kappa(z)
}

/// Scaled reflection data in the variable zeta of the model problem:
///   z-side: rho(zeta) = -z0 zeta r-hat(z0 zeta),  rho-breve(zeta) = -conj r-hat(z0 zeta),
///   w-side: rho(zeta) = w0 zeta r(w0 zeta) / (d_- d_+)(w0 zeta),
///           rho-breve(zeta) = conj r(w0 zeta) (d_- d_+)(w0 zeta).
#[derive(Clone, Copy)]
pub struct RhoPair<'a> {
    pub side: Side,
    /// w0 (w-side) or z0 (z-side)
    pub scale: f64,
    data: ReflectionFn<'a>,
}

/// Builds the pair for the stationary point `scale` (w0 or z0) from r or r-hat.
pub fn rho_pair<'a>(data: &ReflectionFn<'a>, scale: f64, side: Side) -> Result<RhoPair<'a>> {
    if !(scale > 0.0) {
        return Err(Error::Domain(format!("stationary point {scale} must be positive")));
    }
    if scale > data.hi.min(-data.lo) {
        return Err(Error::Domain(format!("stationary point {scale} outside the sampled support")));
    }
    Ok(RhoPair { side, scale, data: *data })
}

impl RhoPair<'_> {
    pub fn rho(&self, zeta: f64) -> C64 {
        let s = self.scale * zeta;
        match self.side {
            Side::Z => -s * self.data.at(s),
            Side::W => s * self.data.at(s) / self.data.dd(s),
        }
    }

    pub fn rho_breve(&self, zeta: f64) -> C64 {
        let s = self.scale * zeta;
        match self.side {
            Side::Z => -self.data.at(s).conj(),
            Side::W => self.data.at(s).conj() * self.data.dd(s),
        }
    }

    /// nu(zeta) = (1/2pi) ln(1 + rho rho-breve) = kappa(scale zeta); the d factors cancel.
    pub fn nu(&self, zeta: f64) -> f64 {
        self.data.k(self.scale * zeta)
    }

    /// (rho, rho-breve) sampled on n uniform nodes of [-zmax, zmax].
    pub fn sample(&self, zmax: f64, n: usize) -> (SampledComplexFunction, SampledComplexFunction) {
        (
            SampledComplexFunction::sample(-zmax, zmax, n, |z| self.rho(z)),
            SampledComplexFunction::sample(-zmax, zmax, n, |z| self.rho_breve(z)),
        )
    }

    pub fn coefficients(&self) -> Result<AsymptoticCoefficients> {
        coefficients(&|s| self.nu(s))
    }
}

/// PV int_a^b f(s)/(s - x) ds, by subtracting f(x); x may lie outside [a, b].
fn pv<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, x: f64) -> f64 {
    let fx = f(x);
    let g = |s: f64| if s == x { 0.0 } else { (f(s) - fx) / (s - x) };
    let body = if a < x && x < b {
        quad::integrate_real(a, x, g) + quad::integrate_real(x, b, g)
    } else {
        quad::integrate_real(a, b, g)
    };
    body + fx * ((b - x).abs() / (x - a).abs()).ln()
}

/// nu at the stationary points and the constants of delta there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCoefficients {
    pub nu0_minus: f64,
    pub nu0_plus: f64,
    pub delta0_minus: C64,
    pub delta0_plus: C64,
    pub delta_at_zero: C64,
}

pub fn coefficients(nu: &dyn Fn(f64) -> f64) -> Result<AsymptoticCoefficients> {
    let (delta0_minus, delta0_plus) = delta0_pm(nu)?;
    Ok(AsymptoticCoefficients {
        nu0_minus: nu(-1.0),
        nu0_plus: nu(1.0),
        delta0_minus,
        delta0_plus,
        delta_at_zero: delta_at_zero(nu),
    })
}

/// delta(zeta) = exp(-i int_{-1}^{1} nu(s)/(s - zeta) ds), zeta off [-1, 1].
/// Near the cut the Cauchy integral is computed with nu(Re zeta) subtracted.
pub fn delta_fn(nu: &dyn Fn(f64) -> f64, zeta: C64) -> Result<C64> {
    if zeta.im == 0.0 && zeta.re.abs() <= 1.0 {
        return Err(Error::Domain(format!(
            "delta is singular on [-1, 1] (zeta = {zeta}); use delta_boundary or delta0_pm"
        )));
    }
    let x = zeta.re.clamp(-1.0, 1.0);
    let nx = nu(x);
    let f = |s: f64| (nu(s) - nx) / (C64::new(s, 0.0) - zeta);
    let mut c = if x > -1.0 && x < 1.0 {
        quad::integrate(-1.0, x, f) + quad::integrate(x, 1.0, f)
    } else {
        quad::integrate(-1.0, 1.0, f)
    };
    // int_{-1}^{1} ds/(s - zeta)
    c += nx * ((1.0 - zeta).ln() - (-1.0 - zeta).ln());
    Ok((-I * c).exp())
}

/// Boundary values delta_+(s) (plus) or delta_-(s) on (-1, 1).
pub fn delta_boundary(nu: &dyn Fn(f64) -> f64, s: f64, plus: bool) -> Result<C64> {
    if !(s > -1.0 && s < 1.0) {
        return Err(Error::Domain(format!("boundary value needs -1 < s < 1, got {s}")));
    }
    let ns = nu(s);
    let p = pv(&|t| nu(t), -1.0, 1.0, s);
    // the limits from above/below add +-i pi nu(s) to the principal value
    let side = if plus { I * PI } else { -I * PI };
    Ok((-I * (C64::new(p, 0.0) + side * ns)).exp())
}

/// delta(0) = exp(-i int_{-1}^{1} nu(s)/s ds); regular since nu(0) = 0.
pub fn delta_at_zero(nu: &dyn Fn(f64) -> f64) -> C64 {
    let f = |s: f64| if s == 0.0 { 0.0 } else { nu(s) / s };
    let c = quad::integrate_real(-1.0, 0.0, f) + quad::integrate_real(0.0, 1.0, f);
    C64::from_polar(1.0, -c)
}

/// Connection constants with
///   delta(zeta) ~ delta0^- (-(zeta + 1))^{i nu0^-}   near -1,
///   delta(zeta) ~ delta0^+ (zeta - 1)^{-i nu0^+}     near +1.
pub fn delta0_pm(nu: &dyn Fn(f64) -> f64) -> Result<(C64, C64)> {
    let (nm, np) = (nu(-1.0), nu(1.0));
    if !nm.is_finite() || !np.is_finite() {
        return Err(Error::InvalidData("nu is not finite at the stationary points".into()));
    }
    // removable singularities at s = -+1 after subtracting the linear part
    let minus_near = quad::integrate_real(-1.0, 0.0, |s| (nu(s) + s * nm) / (s + 1.0));
    let minus_far = quad::integrate_real(0.0, 1.0, |s| nu(s) / (s + 1.0));
    let plus_near = quad::integrate_real(0.0, 1.0, |s| (nu(s) - s * np) / (s - 1.0));
    let plus_far = quad::integrate_real(-1.0, 0.0, |s| nu(s) / (s - 1.0));
    // delta0^- = exp{-i int_{-1}^0 (nu + s nu0^-)/(s+1) - i int_0^1 nu/(s+1) + i nu0^-}
    let dm = C64::from_polar(1.0, -minus_near - minus_far + nm);
    // delta0^+ = exp{-i int_0^1 (nu - s nu0^+)/(s-1) - i int_{-1}^0 nu/(s-1) - i nu0^+}
    let dp = C64::from_polar(1.0, -plus_near - plus_far - np);
    Ok((dm, dp))
}

/// Stationary-phase limit of lim zeta [M^(0)]_12 for the model problem:
///   e^{-i tau + i nu0^- ln tau} tau^{-1/2} A^- + e^{i tau - i nu0^+ ln tau} tau^{-1/2} A^+,
/// with A^- = sqrt(2pi) e^{pi nu0^-/2} e^{-i pi/4} / (rho(-1) (delta0^-)^2 Gamma(i nu0^-)),
///      A^+ = sqrt(2pi) e^{pi nu0^+/2} e^{-3i pi/4} / (rho(+1) (delta0^+)^2 Gamma(-i nu0^+)).
/// A term with rho(-+1) = 0 is dropped.
pub fn q_as(rho_minus: C64, rho_plus: C64, c: &AsymptoticCoefficients, tau: f64) -> Result<C64> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("tau = {tau} must be positive")));
    }
    let (am, ap) = stationary_amplitudes(rho_minus, rho_plus, c);
    let lt = tau.ln();
    let em = C64::from_polar(1.0, -tau + c.nu0_minus * lt);
    let ep = C64::from_polar(1.0, tau - c.nu0_plus * lt);
    Ok((em * am + ep * ap) / tau.sqrt())
}

fn stationary_amplitudes(rho_minus: C64, rho_plus: C64, c: &AsymptoticCoefficients) -> (C64, C64) {
    let root = (2.0 * PI).sqrt();
    let am = if rho_minus == C64::new(0.0, 0.0) {
        C64::new(0.0, 0.0)
    } else {
        root * (PI * c.nu0_minus / 2.0).exp() * C64::from_polar(1.0, -PI / 4.0) * rgamma(I * c.nu0_minus)
            / (rho_minus * c.delta0_minus * c.delta0_minus)
    };
    let ap = if rho_plus == C64::new(0.0, 0.0) {
        C64::new(0.0, 0.0)
    } else {
        root * (PI * c.nu0_plus / 2.0).exp() * C64::from_polar(1.0, -0.75 * PI) * rgamma(-I * c.nu0_plus)
            / (rho_plus * c.delta0_plus * c.delta0_plus)
    };
    (am, ap)
}

/// z0 = sqrt((1 - speed)/(1 + speed)).
pub fn z0_of_speed(speed: f64) -> Result<f64> {
    if !(speed > -1.0 && speed < 1.0) {
        return Err(Error::Domain(format!("speed {speed} outside (-1, 1)")));
    }
    Ok(((1.0 - speed) / (1.0 + speed)).sqrt())
}

/// The profiles (f_-, f_+) at x/t = speed from r-hat:
///   |f_+-|^2 = +-kappa-hat(+-z0),
///   arg f_+- = -+pi/4 + arg(-+r-hat(+-z0)) + arg Gamma(-+i kappa-hat(+-z0))
///              -+ 2 int_0^{+-z0} (kappa-hat(s) -+ (s/z0) kappa-hat(+-z0))/(s -+ z0) ds
///              +- 2 int_0^{-+z0} kappa-hat(s)/(s -+ z0) ds
///              -+ 2 kappa-hat(+-z0) + int_{-z0}^{z0} kappa-hat(s)/s ds.
pub fn f_pm(r_hat: &SampledComplexFunction, speed: f64) -> Result<(C64, C64)> {
    f_pm_with(&ReflectionFn::sampled(r_hat)?, speed)
}

/// `f_pm` for any representation of r-hat.
pub fn f_pm_with(r_hat: &ReflectionFn, speed: f64) -> Result<(C64, C64)> {
    let z0 = z0_of_speed(speed)?;
    rho_pair(r_hat, z0, Side::Z)?;
    let k = |s: f64| r_hat.k(s);
    let center = kappa_over_s_range(&k, -z0, z0);
    let mut out = [C64::new(0.0, 0.0); 2];
    for (slot, sg) in [(0, -1.0), (1, 1.0)] {
        let p = sg * z0;
        let kp = r_hat.kappa(p)?;
        let modulus = checked_modulus(sg * kp)?;
        if modulus == 0.0 {
            continue;
        }
        let near = quad::integrate_real(0.0, p, |s| (k(s) - sg * (s / z0) * kp) / (s - p));
        let far = quad::integrate_real(0.0, -p, |s| k(s) / (s - p));
        let arg = -sg * PI / 4.0 + (-sg * r_hat.at(p)).arg() + ln_gamma(-sg * I * kp).im - sg * 2.0 * near
            + sg * 2.0 * far
            - sg * 2.0 * kp
            + center;
        out[slot] = C64::from_polar(modulus, arg);
    }
    Ok((out[0], out[1]))
}

fn kappa_over_s_range<F: Fn(f64) -> f64>(k: &F, a: f64, b: f64) -> f64 {
    let f = |s: f64| if s == 0.0 { 0.0 } else { k(s) / s };
    quad::integrate_real(a, 0.0, f) + quad::integrate_real(0.0, b, f)
}

fn checked_modulus(m2: f64) -> Result<f64> {
    if m2 < -1e-12 {
        return Err(Error::InvalidData(format!("negative |f|^2 = {m2:e}: inconsistent reflection data")));
    }
    Ok(m2.max(0.0).sqrt())
}

/// The same profiles from r along w0 = 1/z0, through the factors d_-, d_+:
///   |f_+-|^2 = +-kappa(+-w0),
///   arg f_+- = -+pi/4 + arg(-r(+-w0)) - arg (d_- d_+)(+-w0) + arg Gamma(-+i kappa(+-w0))
///              -+ 2 int_0^{+-w0} (kappa(s) -+ (s/w0) kappa(+-w0))/(s -+ w0) ds
///              +- 2 int_0^{-+w0} kappa(s)/(s -+ w0) ds
///              -+ 2 kappa(+-w0) + int_{-w0}^{w0} kappa(s)/s ds - int kappa(s)/s ds.
pub fn f_pm_from_r(r: &SampledComplexFunction, speed: f64) -> Result<(C64, C64)> {
    f_pm_from_r_with(&ReflectionFn::sampled(r)?, speed)
}

/// `f_pm_from_r` for any representation of r.
pub fn f_pm_from_r_with(r: &ReflectionFn, speed: f64) -> Result<(C64, C64)> {
    let w0 = 1.0 / z0_of_speed(speed)?;
    rho_pair(r, w0, Side::W)?;
    let k = |s: f64| r.k(s);
    let center = kappa_over_s_range(&k, -w0, w0) - r.kappa_over_s();
    let mut out = [C64::new(0.0, 0.0); 2];
    for (slot, sg) in [(0, -1.0), (1, 1.0)] {
        let p = sg * w0;
        let kp = r.kappa(p)?;
        let modulus = checked_modulus(sg * kp)?;
        if modulus == 0.0 {
            continue;
        }
        let near = quad::integrate_real(0.0, p, |s| (k(s) - sg * (s / w0) * kp) / (s - p));
        let far = quad::integrate_real(0.0, -p, |s| k(s) / (s - p));
        let arg = -sg * PI / 4.0 + (-r.at(p)).arg() - r.dd(p).arg() + ln_gamma(-sg * I * kp).im - sg * 2.0 * near
            + sg * 2.0 * far
            - sg * 2.0 * kp
            + center;
        out[slot] = C64::from_polar(modulus, arg);
    }
    Ok((out[0], out[1]))
}

/// (f_-, f_+) assembled from the model-problem limit by substituting the
/// stationary-point data into q_as. `side` selects r (W) or r-hat (Z) as `data`.
pub fn f_pm_from_q_as(data: &ReflectionFn, speed: f64, side: Side) -> Result<(C64, C64)> {
    let z0 = z0_of_speed(speed)?;
    let scale = match side {
        Side::Z => z0,
        Side::W => 1.0 / z0,
    };
    let pair = rho_pair(data, scale, side)?;
    let c = pair.coefficients()?;
    let (am, ap) = stationary_amplitudes(pair.rho(-1.0), pair.rho(1.0), &c);
    let root = scale.sqrt();
    let inv0 = c.delta_at_zero.conj();
    Ok(match side {
        // v ~ z0 delta(0)^{-1} conj(q)
        Side::Z => (root * inv0 * am.conj(), -root * inv0 * ap.conj()),
        // u ~ w0 delta(0)^{-1} d(0) conj(q)
        Side::W => {
            let d0 = data.d_at_zero();
            (root * inv0 * d0 * am.conj(), root * inv0 * d0 * ap.conj())
        }
    })
}

/// Leading-order fields at (t, x), t > |x|:
///   u_as = (t-x)^{-1/2} [e^{i tau + i|f_-|^2 ln tau} f_- + e^{-i tau + i|f_+|^2 ln tau} f_+],
///   v_as = (t+x)^{-1/2} [e^{i tau + i|f_-|^2 ln tau} f_- - e^{-i tau + i|f_+|^2 ln tau} f_+].
pub fn predict_fields(r_hat: &SampledComplexFunction, t: f64, x: f64) -> Result<(C64, C64)> {
    let cc = cone_coords(t, x)?;
    let (fm, fp) = f_pm(r_hat, x / t)?;
    Ok(fields_from_profiles(fm, fp, t, x, cc.tau))
}

pub fn fields_from_profiles(fm: C64, fp: C64, t: f64, x: f64, tau: f64) -> (C64, C64) {
    let lt = tau.ln();
    let em = C64::from_polar(1.0, tau + fm.norm_sqr() * lt) * fm;
    let ep = C64::from_polar(1.0, -tau + fp.norm_sqr() * lt) * fp;
    ((em + ep) / (t - x).sqrt(), (em - ep) / (t + x).sqrt())
}

/// Prediction sweep as CSV: t,x,tau,re_u_as,im_u_as,re_v_as,im_v_as.
pub fn prediction_csv(r_hat: &SampledComplexFunction, points: &[(f64, f64)]) -> Result<String> {
    let mut out = String::from("t,x,tau,re_u_as,im_u_as,re_v_as,im_v_as\n");
    for &(t, x) in points {
        let tau = cone_coords(t, x)?.tau;
        let (u, v) = predict_fields(r_hat, t, x)?;
        out.push_str(&format!("{t},{x},{tau},{},{},{},{}\n", u.re, u.im, v.re, v.im));
    }
    Ok(out)
}

/// delta(zeta) (-(zeta+1))^{-i nu0^-}, which tends to delta0^- as zeta -> -1.
pub fn delta_normalized_minus(nu: &dyn Fn(f64) -> f64, zeta: C64) -> Result<C64> {
    Ok(delta_fn(nu, zeta)? * principal_pow(-(zeta + 1.0), -I * nu(-1.0))?)
}

/// delta(zeta) (zeta-1)^{i nu0^+}, which tends to delta0^+ as zeta -> 1.
pub fn delta_normalized_plus(nu: &dyn Fn(f64) -> f64, zeta: C64) -> Result<C64> {
    Ok(delta_fn(nu, zeta)? * principal_pow(zeta - 1.0, I * nu(1.0))?)
}
