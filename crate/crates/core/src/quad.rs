//! Composite Gauss-Legendre quadrature.

use num_complex::Complex64 as C64;
use std::sync::OnceLock;

/// Nodes and weights of the n-point rule on [-1, 1] (Newton on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(16))
}

pub const PANELS: usize = 20;

/// Panels x 16-point Gauss-Legendre on [a, b].
pub fn integrate_panels<F: Fn(f64) -> C64>(a: f64, b: f64, panels: usize, f: F) -> C64 {
    let (x, w) = gl16();
    let h = (b - a) / panels as f64;
    let mut s = C64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for k in 0..x.len() {
            s += w[k] * f(mid + 0.5 * h * x[k]);
        }
    }
    s * 0.5 * h
}

/// The default rule: 20 panels x 16 nodes.
pub fn integrate<F: Fn(f64) -> C64>(a: f64, b: f64, f: F) -> C64 {
    integrate_panels(a, b, PANELS, f)
}

pub fn integrate_real<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    integrate(a, b, |s| C64::new(f(s), 0.0)).re
}

/// Nodes geometrically graded towards `a`, for integrands with weak
/// (e.g. log or square-root) behaviour at the left end.
pub fn integrate_graded<F: Fn(f64) -> C64>(a: f64, b: f64, levels: usize, f: F) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    let mut hi = b;
    for _ in 0..levels {
        let lo = a + 0.5 * (hi - a);
        s += integrate_panels(lo, hi, 1, &f);
        hi = lo;
    }
    s + integrate_panels(a, hi, 1, &f)
}
