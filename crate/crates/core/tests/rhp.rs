use std::f64::consts::PI;

use mtm_lab::rhp::*;
use mtm_lab::scattering::*;
use mtm_lab::{FieldState, SampledComplexFunction, C64};

const I: C64 = C64::new(0.0, 1.0);

fn lagrange(xs: &[f64], ys: &[C64], x: f64) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let l: f64 = xs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &xj)| (x - xj) / (xi - xj)).product();
        s += yi * l;
    }
    s
}

/// boundary value from the trapezoid rule at eps = 5h..12h, extrapolated to 0
fn limit_oracle(f: &SampledComplexFunction, s: f64, sign: f64) -> C64 {
    let es: Vec<f64> = (5..13).map(|k| sign * k as f64 * f.h).collect();
    let vs: Vec<C64> = es.iter().map(|&e| cauchy_transform(f, C64::new(s, e)).unwrap()).collect();
    lagrange(&es, &vs, 0.0)
}

fn gaussian(s: f64) -> C64 {
    C64::new((-s * s).exp(), 0.5 * s * (-(s - 0.3) * (s - 0.3)).exp())
}

fn small_fields(scale: f64) -> FieldState {
    FieldState::on_interval(0.0, 12.0, 0.05, |x| {
        let g = (-x * x).exp();
        let u = C64::new(0.06 * g, 0.03 * x * g) * scale;
        let v = C64::new(0.0, 0.04 * (-(x - 0.5) * (x - 0.5)).exp()) * scale;
        (u, v)
    })
}

#[test]
fn plemelj_and_limits() {
    let f = SampledComplexFunction::sample(-16.0, 16.0, 2049, gaussian);
    let p = cauchy_boundary(&f, BoundarySide::Plus);
    let m = cauchy_boundary(&f, BoundarySide::Minus);
    for k in 0..f.len() {
        assert!((p.values[k] - m.values[k] - f.values[k]).norm() <= 1e-10);
    }
    let mut worst: f64 = 0.0;
    for k in (900..1150).step_by(7) {
        let s = f.node(k);
        worst = worst.max((limit_oracle(&f, s, 1.0) - p.values[k]).norm());
        worst = worst.max((limit_oracle(&f, s, -1.0) - m.values[k]).norm());
    }
    assert!(worst <= 1e-6, "{worst:e}");
}

#[test]
fn cauchy_transform_values() {
    let z = SampledComplexFunction::zeros(-5.0, 5.0, 101);
    assert_eq!(cauchy_transform(&z, C64::new(0.1, 0.2)).unwrap(), C64::new(0.0, 0.0));
    assert!(cauchy_transform(&z, C64::new(0.1, 0.0)).is_err());

    // f = 1/(s - 2i) is analytic in the lower half plane and decays: C[f](-i) = -f(-i)
    let f = SampledComplexFunction::sample(-2000.0, 2000.0, 400_001, |s| (C64::new(s, 0.0) - 2.0 * I).inv());
    let got = cauchy_transform(&f, -I).unwrap();
    assert!((got - (-(-I - 2.0 * I).inv())).norm() <= 1e-3, "{got}");

    let g = SampledComplexFunction::sample(-16.0, 16.0, 2049, |s| C64::new((-s * s).exp(), 0.0));
    let mass: C64 = g.values.iter().sum::<C64>() * g.h;
    for zeta in [C64::new(1e3, 1.0), C64::new(0.0, 1e3), C64::new(-700.0, -700.0)] {
        let lhs = zeta * cauchy_transform(&g, zeta).unwrap();
        assert!((lhs + mass / (2.0 * PI * I)).norm() <= 1e-6);
    }

    // the near-axis rule is continuous with the trapezoid rule
    let h = g.h;
    let inside = cauchy_transform(&g, C64::new(0.37, 5.0 * h * (1.0 - 1e-12))).unwrap();
    let outside = cauchy_transform(&g, C64::new(0.37, 5.0 * h)).unwrap();
    assert!((inside - outside).norm() <= 1e-8, "{:e}", (inside - outside).norm());
}

fn data(scale: f64) -> ScatteringData {
    scattering_data(&small_fields(scale), &ScatterConfig::default()).unwrap()
}

fn solved(j: &JumpProblem) -> SmallNormSolution {
    let cfg = RhpConfig::default();
    solve_small_norm(j, &HilbertPlan::new(cfg.nodes), &cfg.solver).unwrap()
}

/// max |M+ - M-(1 + R)| at 100 pseudo-random nodes, with M+- from the
/// trapezoid rule off the axis extrapolated to the boundary. Nodes with
/// |s| < 0.5 are skipped: r(s) = r-hat(1/s)/s varies on the scale s^2 there,
/// below what the extrapolation window resolves.
fn jump_residual(j: &JumpProblem, sol: &SmallNormSolution) -> f64 {
    let d = [[sol.density(0, 0), sol.density(0, 1)], [sol.density(1, 0), sol.density(1, 1)]];
    let mut worst: f64 = 0.0;
    let mut k = 1234usize;
    let mut count = 0;
    while count < 100 {
        k = (k * 1103 + 12345) % 3000 + 548;
        let s = j.node(k);
        if s.abs() < 0.5 {
            continue;
        }
        count += 1;
        let m = |sign: f64| {
            let mut m = [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
            for (a, row) in d.iter().enumerate() {
                for (b, f) in row.iter().enumerate() {
                    m[a][b] += limit_oracle(f, s, sign);
                }
            }
            m
        };
        let (mp, mm) = (m(1.0), m(-1.0));
        let r = j.r[k];
        for a in 0..2 {
            for b in 0..2 {
                let want = mm[a][b] + mm[a][0] * r[0][b] + mm[a][1] * r[1][b];
                worst = worst.max((mp[a][b] - want).norm());
            }
        }
    }
    worst
}

#[test]
fn jump_is_satisfied() {
    let s = data(1.0);
    let cfg = RhpConfig::default();
    let jw = jump_w(&s.r, 0.3, -0.7, &cfg);
    let jz = jump_z(&s.r_hat, 0.3, -0.7, &cfg);
    for j in [jw, jz] {
        assert!(j.det_defect() <= 1e-10);
        let res = jump_residual(&j, &solved(&j));
        assert!(res <= 1e-8, "{res:e}");
    }
}

#[test]
fn moment_is_linear_in_small_data() {
    let ratios: Vec<f64> = [0.25, 0.5, 1.0, 2.0]
        .iter()
        .map(|&c| {
            let j = jump_w(&data(c).r, 0.3, -0.7, &RhpConfig::default());
            let sol = solved(&j);
            sol.moment.iter().flatten().map(|m| m.norm()).fold(0.0, f64::max) / j.l1_norm()
        })
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(hi <= 1.0 && hi / lo <= 1.5, "{ratios:?}");
}

#[test]
fn zero_and_soliton_data() {
    let zero = ScatteringData {
        r: SampledComplexFunction::zeros(-12.0, 12.0, 64),
        r_hat: SampledComplexFunction::zeros(-12.0, 12.0, 64),
        spectrum: DiscreteSpectrum::new(vec![], vec![]).unwrap(),
    };
    let f = reconstruct_fields(&zero, 1.0, -2.0, 0.5, 9, &RhpConfig::default()).unwrap();
    assert!(f.u.iter().chain(&f.v).all(|z| z.norm() == 0.0));

    let d = DiscreteSpectrum::new(vec![C64::from_polar(0.9, 0.65 * PI)], vec![C64::new(0.4, -0.3)]).unwrap();
    let sol = ScatteringData { spectrum: d.clone(), ..zero.clone() };
    let f = reconstruct_fields(&sol, 0.5, -3.0, 0.25, 25, &RhpConfig::default()).unwrap();
    let g = mtm_lab::solitons::n_soliton(&d, 0.5, -3.0, 0.25, 25).unwrap();
    for k in 0..25 {
        assert!((f.u[k] - g.u[k]).norm() <= 1e-10 && (f.v[k] - g.v[k]).norm() <= 1e-10);
    }

    let mut mixed = sol;
    mixed.r.values[10] = C64::new(1e-3, 0.0);
    assert!(reconstruct_fields(&mixed, 0.0, 0.0, 0.1, 2, &RhpConfig::default()).is_err());
}

#[test]
fn round_trip_gaussian() {
    let f = FieldState::on_interval(0.0, 12.0, 0.05, |x| {
        let g = 0.05 * (-x * x).exp();
        (C64::new(g, 0.0), C64::new(g, 0.0))
    });
    let s = scattering_data(&f, &ScatterConfig::default()).unwrap();
    let k0 = f.index_of(-4.0).unwrap();
    let g = reconstruct_fields(&s, 0.0, f.x(k0), f.dx * 4.0, 41, &RhpConfig::default()).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..g.len() {
        let i = k0 + 4 * k;
        worst = worst.max((g.u[k] - f.u[i]).norm()).max((g.v[k] - f.v[i]).norm());
    }
    assert!(worst <= 1e-3, "{worst:e}");
}

#[test]
fn asymmetric_round_trip_and_covariance() {
    let f = small_fields(1.0);
    let s = scattering_data(&f, &ScatterConfig::default()).unwrap();
    let cfg = RhpConfig::default();
    let plan = HilbertPlan::new(cfg.nodes);
    let e = C64::from_polar(1.0, 1.1);
    let mut rot = s.clone();
    rot.r.values.iter_mut().chain(rot.r_hat.values.iter_mut()).for_each(|z| *z *= e);
    for x in [-1.5, -0.2, 0.5, 1.25] {
        let (u, v) = reconstruct_point(&s, 0.0, x, &plan, &cfg).unwrap();
        let k = f.index_of(x).unwrap();
        assert!((u - f.u[k]).norm() <= 1e-4 && (v - f.v[k]).norm() <= 1e-4);
        let (ur, vr) = reconstruct_point(&rot, 0.0, x, &plan, &cfg).unwrap();
        assert!((ur - e * u).norm() <= 1e-10 && (vr - e * v).norm() <= 1e-10);
    }
}

#[test]
fn commutes_with_time_evolution() {
    let s = scattering_data(&small_fields(1.0), &ScatterConfig { n_grid: 8192, ..Default::default() }).unwrap();
    let cfg = RhpConfig::default();
    let plan = HilbertPlan::new(cfg.nodes);
    let t = 0.5;
    let st = evolve_scattering(&s, t);
    for x in [-1.0, 0.0, 0.8] {
        let a = reconstruct_point(&s, t, x, &plan, &cfg).unwrap();
        let b = reconstruct_point(&st, 0.0, x, &plan, &cfg).unwrap();
        assert!((a.0 - b.0).norm() <= 1e-6 && (a.1 - b.1).norm() <= 1e-6, "{a:?} {b:?}");
    }
}
