use std::f64::consts::PI;

use mtm_lab::scattering::*;
use mtm_lab::solitons::{n_soliton, one_soliton_eval, one_soliton_params, OneSolitonParams};
use mtm_lab::{FieldState, C64};

const I: C64 = C64::new(0.0, 1.0);

fn gaussian(dx: f64) -> FieldState {
    scaled_gaussian(dx, 1.0)
}

fn scaled_gaussian(dx: f64, s: f64) -> FieldState {
    FieldState::on_interval(0.0, 20.0, dx, |x| {
        let g = (-x * x).exp();
        (C64::new(0.3 * s * g, 0.1 * s * x * g), C64::new(0.2 * s * (-(x - 0.5) * (x - 0.5)).exp(), 0.0))
    })
}

fn soliton(l: C64, c: C64) -> (DiscreteSpectrum, FieldState) {
    let d = DiscreteSpectrum::new(vec![l], vec![c]).unwrap();
    let f = n_soliton(&d, 0.0, -30.0, 0.05, 1201).unwrap();
    (d, f)
}

#[test]
fn zero_potential() {
    let f = FieldState::on_interval(0.0, 5.0, 0.1, |_| (C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
    let (a, b) = transition_w(&f, C64::new(0.7, 0.0)).unwrap();
    assert_eq!((a, b), (C64::new(1.0, 0.0), C64::new(0.0, 0.0)));
    let r = reflection(&f, -12.0, 12.0, 64).unwrap();
    assert!(r.values.iter().all(|v| v.norm() == 0.0));
    assert!(find_eigenvalues(&f, SearchBox::default()).unwrap().is_empty());
    assert!(norming_constants(&f, &[I]).is_err());
    assert!(transition_w(&f, C64::new(0.0, 0.0)).is_err());
}

#[test]
fn unitarity() {
    let f = gaussian(0.05);
    let sc = Scatterer::new(&f).unwrap();
    for k in 0..240 {
        let w = -12.0 + 0.1 * k as f64 + 0.0377;
        let (a, b) = sc.transition_w(C64::new(w, 0.0)).unwrap();
        assert!((a.norm_sqr() + w * b.norm_sqr() - 1.0).abs() <= 1e-6, "w = {w}");
    }
}

#[test]
fn far_field_limit() {
    // a(w) = exp(-iQ/4) (1 + O(|u|^2/w)), Q the charge; small data meet 1e-4 at |w| = 12
    let sc = Scatterer::new(&scaled_gaussian(0.05, 0.1)).unwrap();
    let phase = C64::from_polar(1.0, sc.charge() / 4.0);
    for w in [-12.0, 12.0] {
        let a = sc.transition_w(C64::new(w, 0.0)).unwrap().0;
        assert!((a * phase - 1.0).norm() <= 1e-4);
    }
}

#[test]
fn hat_side_matches_inversion() {
    let f = gaussian(0.05);
    let sc = Scatterer::new(&f).unwrap();
    let rh = sc.reflection_z(-12.0, 12.0, 2048, 1e-6).unwrap();
    let mut worst: f64 = 0.0;
    for k in (0..rh.len()).step_by(3) {
        let z = rh.node(k);
        if z.abs() < 1.0 / 12.0 {
            continue;
        }
        let r = sc.reflection_at(Side::W, 1.0 / z).unwrap();
        worst = worst.max((rh.values[k] - r / z).norm());
    }
    assert!(worst <= 1e-6, "{worst:e}");
    // w r(w) stays bounded as w -> 0
    let r = sc.reflection_w(-0.2, 0.2, 41, 1e-6).unwrap();
    let wr = (0..r.len()).map(|k| (r.node(k) * r.values[k]).norm()).fold(0.0, f64::max);
    assert!(wr < 1.0);
}

#[test]
fn soliton_is_reflectionless() {
    let l = C64::from_polar(1.0, 0.75 * PI);
    let (d, f) = soliton(l, C64::new(1.0, 0.0));
    let sc = Scatterer::new(&f).unwrap();
    let r = sc.reflection_w(-12.0, 12.0, 2048, 1e-6).unwrap();
    let bmax = (0..r.len())
        .map(|k| {
            let w = r.node(k);
            sc.transition_w(C64::new(w, 0.0)).map(|(_, b)| b.norm()).unwrap_or(0.0)
        })
        .step_by(16)
        .fold(0.0, f64::max);
    assert!(bmax <= 1e-6, "{bmax:e}");
    assert!(sc.a(d.w(0)).unwrap().norm() < 1e-7);
    // exact transmission: a(w) = e^{-iQ/4} (w - w1)/(w - conj w1), with Q = 2 pi here
    let w = C64::new(3.0, 0.0);
    let exact = -I * (w - I) / (w + I);
    assert!((sc.transition_w(w).unwrap().0 - exact).norm() < 1e-7);
}

#[test]
fn soliton_eigenvalue_and_norming() {
    for (l, c) in
        [(C64::from_polar(1.0, 0.75 * PI), C64::new(1.0, 0.0)), (C64::from_polar(0.9, 0.65 * PI), C64::new(0.4, -0.3))]
    {
        let (_, f) = soliton(l, c);
        let ls = find_eigenvalues(&f, SearchBox::default()).unwrap();
        assert_eq!(ls.len(), 1);
        assert!((ls[0] - l).norm() <= 1e-8, "{}", (ls[0] - l).norm());
        let ws: Vec<C64> = ls.iter().map(|l| l.powi(-2)).collect();
        let nc = norming_constants(&f, &ws).unwrap();
        assert!((nc[0].big - c).norm() / c.norm() <= 1e-4);
        // the z-side constant, from an independent integration
        assert!(nc[0].mismatch <= 1e-6);
        let s = DiscreteSpectrum::new(ls, vec![nc[0].big]).unwrap();
        assert_eq!(s.c_hat(0), 2.0 * nc[0].big);
    }
}

#[test]
fn two_solitons_counted() {
    let d = DiscreteSpectrum::new(
        vec![C64::from_polar(0.8, 0.7 * PI), C64::from_polar(1.3, 0.6 * PI)],
        vec![C64::new(1.0, 0.0), C64::new(0.5, 0.5)],
    )
    .unwrap();
    let f = n_soliton(&d, 0.0, -30.0, 0.05, 1201).unwrap();
    let mut ls = find_eigenvalues(&f, SearchBox::default()).unwrap();
    ls.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    assert_eq!(ls.len(), 2);
    for (got, want) in ls.iter().zip(&d.eigenvalues) {
        assert!((got - want).norm() <= 1e-8);
    }
    let ws: Vec<C64> = ls.iter().map(|l| l.powi(-2)).collect();
    let nc = norming_constants(&f, &ws).unwrap();
    for (n, c) in nc.iter().zip(&d.norming) {
        assert!((n.big - c).norm() / c.norm() <= 1e-4);
    }
}

#[test]
fn phase_covariance() {
    let alpha = 0.7;
    let e = C64::from_polar(1.0, alpha);
    let l = C64::from_polar(0.9, 0.65 * PI);
    let (_, f) = soliton(l, C64::new(0.4, -0.3));
    let mut g = f.clone();
    g.u.iter_mut().chain(g.v.iter_mut()).for_each(|z| *z *= e);
    let cfg = ScatterConfig { n_grid: 256, ..Default::default() };
    let s0 = scattering_data(&f, &cfg).unwrap();
    let s1 = scattering_data(&g, &cfg).unwrap();
    for k in 0..s0.r.len() {
        assert!((s1.r.values[k] - e * s0.r.values[k]).norm() <= 1e-8);
        assert!((s1.r_hat.values[k] - e * s0.r_hat.values[k]).norm() <= 1e-8);
    }
    assert!((s1.spectrum.eigenvalues[0] - s0.spectrum.eigenvalues[0]).norm() <= 1e-8);
    assert!((s1.spectrum.norming[0] - e * s0.spectrum.norming[0]).norm() <= 1e-8);
}

/// Norming constant of the original (untransformed) spectral problem
///   psi_x = [ (i/4)(|u|^2-|v|^2) s3 - (i lam/2)[[0,vb],[v,0]] + (i/2lam)[[0,ub],[u,0]]
///             + (i/4)(lam^2 - lam^-2) s3 ] psi,
/// C = gamma / alpha'(lam), integrated directly on the closed-form soliton.
fn original_problem_norming(p: &OneSolitonParams, lam: C64) -> C64 {
    let (x0, x1, h) = (-25.0, 25.0, 0.005);
    let n = ((x1 - x0) / h) as usize;
    let mid = n / 2;
    let rhs = |l: C64, x: f64, y: [C64; 2], left: bool| {
        let (u, v) = one_soliton_eval(p, 0.0, x);
        let k = 0.25 * (l * l - (l * l).inv());
        let d = 0.25 * I * (u.norm_sqr() - v.norm_sqr());
        let p12 = -0.5 * I * l * v.conj() + 0.5 * I / l * u.conj();
        let p21 = -0.5 * I * l * v + 0.5 * I / l * u;
        if left {
            // psi = e^{ikx} y
            [d * y[0] + p12 * y[1], p21 * y[0] - (2.0 * I * k + d) * y[1]]
        } else {
            // psi = e^{-ikx} y
            [(2.0 * I * k + d) * y[0] + p12 * y[1], p21 * y[0] - d * y[1]]
        }
    };
    let run = |l: C64, from: usize, to: usize, y0: [C64; 2], left: bool| {
        let mut y = y0;
        let s = if to > from { h } else { -h };
        let mut x = x0 + from as f64 * h;
        for _ in 0..from.abs_diff(to) {
            let f = |x, y| rhs(l, x, y, left);
            let k1 = f(x, y);
            let k2 = f(x + s / 2.0, [y[0] + s / 2.0 * k1[0], y[1] + s / 2.0 * k1[1]]);
            let k3 = f(x + s / 2.0, [y[0] + s / 2.0 * k2[0], y[1] + s / 2.0 * k2[1]]);
            let k4 = f(x + s, [y[0] + s * k3[0], y[1] + s * k3[1]]);
            for i in 0..2 {
                y[i] += s / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            x += s;
        }
        y
    };
    let one = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let alpha = |l: C64| run(l, 0, n, one, true)[0];
    let nodes = 16;
    let rad = 0.05 * lam.norm();
    let mut da = C64::new(0.0, 0.0);
    for j in 0..nodes {
        let e = C64::from_polar(1.0, 2.0 * PI * j as f64 / nodes as f64);
        da += alpha(lam + rad * e) / e;
    }
    da /= nodes as f64 * rad;
    let y = run(lam, 0, mid, one, true);
    let q = run(lam, n, mid, [C64::new(0.0, 0.0), C64::new(1.0, 0.0)], false);
    let k = 0.25 * (lam * lam - (lam * lam).inv());
    let x = x0 + mid as f64 * h;
    let g = (q[0].conj() * y[0] + q[1].conj() * y[1]) / (q[0].norm_sqr() + q[1].norm_sqr());
    g * (-2.0 * I * k * x).exp() / da
}

#[test]
fn norming_convention_matches_untransformed_problem() {
    let l = C64::from_polar(0.9, 0.65 * PI);
    let c = C64::new(0.4, -0.3);
    let p = one_soliton_params(l, c).unwrap();
    let oracle = original_problem_norming(&p, l);
    assert!((oracle - c).norm() / c.norm() < 1e-6, "{oracle}");
}
