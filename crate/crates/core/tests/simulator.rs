use std::f64::consts::{PI, TAU};

use mtm_lab::scattering::DiscreteSpectrum;
use mtm_lab::simulator::*;
use mtm_lab::solitons::{n_soliton, one_soliton};
use mtm_lab::{FieldState, C64};
use proptest::prelude::*;

fn bump(amp: f64, phase: f64, half: f64, dx: f64) -> FieldState {
    FieldState::on_interval(0.0, half, dx, |x| {
        let g = amp * (-x * x).exp();
        (C64::new(g, 0.3 * x * g), C64::from_polar(g, phase + 0.5 * x))
    })
}

fn sup_diff(a: &FieldState, b: &FieldState) -> f64 {
    (0..a.len()).map(|k| (a.u[k] - b.u[k]).norm().max((a.v[k] - b.v[k]).norm())).fold(0.0, f64::max)
}

#[test]
fn tracks_a_soliton_at_second_order() {
    let l = -(0.8f64).sqrt() * C64::from_polar(1.0, -0.31 * PI);
    let c = C64::new(1.0, 0.0);
    let d = DiscreteSpectrum::new(vec![l], vec![c]).unwrap();
    let t = 2.0;
    let half = default_half_width(12.0, t);
    let mut errs = vec![];
    for dx in [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0] {
        let n = (2.0 * half / dx).round() as usize + 1;
        let f0 = n_soliton(&d, 0.0, -half, dx, n).unwrap();
        let (f, r) = evolve(&f0, t).unwrap();
        assert!(r.relative_drift() <= 1e-12);
        let mut e: f64 = 0.0;
        for k in 0..f.len() {
            let (u, v) = one_soliton(l, c, t, f.x(k)).unwrap();
            e = e.max((f.u[k] - u).norm()).max((f.v[k] - v).norm());
        }
        errs.push(e);
    }
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.9..2.2).contains(&order), "{errs:?}");
    }
}

#[test]
fn charge_drift_over_many_steps() {
    let t = 2000.0 / 64.0;
    let f = bump(0.8, 0.4, default_half_width(6.0, t), 1.0 / 64.0);
    let (_, r) = evolve(&f, t).unwrap();
    assert!(r.boundary_max <= BOUNDARY_WARN);
    assert_eq!(r.steps, 2000);
    assert!(r.relative_drift() <= 1e-10, "{:e}", r.relative_drift());
}

#[test]
fn reflection_symmetry() {
    // (u, v)(x) -> (v, u)(-x) maps solutions to solutions
    let dx = 1.0 / 32.0;
    let f = bump(0.5, 1.0, 10.0, dx);
    let n = f.len();
    let g = FieldState::new(
        0.0,
        f.x_start,
        dx,
        (0..n).map(|k| f.v[n - 1 - k]).collect(),
        (0..n).map(|k| f.u[n - 1 - k]).collect(),
    )
    .unwrap();
    let (ft, _) = evolve(&f, 1.0).unwrap();
    let (gt, _) = evolve(&g, 1.0).unwrap();
    for k in 0..n {
        assert!((gt.u[k] - ft.v[n - 1 - k]).norm() <= 1e-13 && (gt.v[k] - ft.u[n - 1 - k]).norm() <= 1e-13);
    }
}

#[test]
fn snapshots_match_separate_runs() {
    let f = bump(0.4, 0.0, 12.0, 0.0625);
    let snaps = evolve_snapshots(&f, &[0.5, 1.0, 2.0]).unwrap();
    for s in &snaps {
        let (g, _) = evolve(&f, s.t).unwrap();
        assert!(sup_diff(s, &g) <= 1e-13);
    }
}

#[test]
fn times_off_the_step_are_rejected() {
    let f = bump(0.1, 0.0, 5.0, 0.1);
    assert!(evolve(&f, 0.05).is_err());
    assert!(evolve(&f, -1.0).is_err());
    assert_eq!(step_count(&f, 1.0).unwrap(), 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn charge_is_conserved(amp in 0.01f64..1.0, phase in 0.0f64..TAU, steps in 1usize..200) {
        let dx = 1.0 / 32.0;
        let f = bump(amp, phase, 12.0, dx);
        let (g, r) = evolve(&f, steps as f64 * dx).unwrap();
        prop_assert!(r.relative_drift() <= 1e-12);
        prop_assert!((charge(&g) - charge(&f)).abs() <= 1e-12 * charge(&f));
    }

    #[test]
    fn phase_rotation_commutes(amp in 0.05f64..0.8, theta in 0.0f64..TAU) {
        let dx = 1.0 / 16.0;
        let f = bump(amp, 0.3, 10.0, dx);
        let e = C64::from_polar(1.0, theta);
        let rot = |s: &FieldState| FieldState::new(s.t, s.x_start, s.dx, s.u.iter().map(|z| e * z).collect(), s.v.iter().map(|z| e * z).collect()).unwrap();
        let (a, _) = evolve(&rot(&f), 1.0).unwrap();
        let (b, _) = evolve(&f, 1.0).unwrap();
        prop_assert!(sup_diff(&a, &rot(&b)) <= 1e-13);
    }
}
