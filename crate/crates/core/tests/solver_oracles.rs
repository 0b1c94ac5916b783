use std::f64::consts::PI;

use proptest::prelude::*;
use sweep_core::diagnostics::{feasibility_report, normal_cone_check};
use sweep_core::fbm::{sample_fbm, FbmSpec};
use sweep_core::solvers::{
    catching_up, euler_catching_up, picard_rough, picard_young, skorokhod_decompose, PicardOptions,
};
use sweep_core::{ConvexSet, Field, Grid, Halfspace, Motion, MovingConvexSet, RoughLift, SamplePath};

fn half_line() -> MovingConvexSet {
    MovingConvexSet::fixed(ConvexSet::cuboid(vec![0.0], vec![f64::INFINITY]).unwrap(), vec![1.0], 1.0).unwrap()
}

fn project_ball(center: [f64; 2], p: [f64; 2]) -> [f64; 2] {
    let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
    let r = (dx * dx + dy * dy).sqrt();
    if r <= 1.0 {
        p
    } else {
        [center[0] + dx / r, center[1] + dy / r]
    }
}

#[test]
fn moving_ball_matches_hand_projections() {
    let m = MovingConvexSet::new(
        ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap(),
        Motion::Linear { velocity: vec![1.0, 0.0] },
        vec![0.0, 0.0],
        1.0,
    )
    .unwrap();
    // On [0, 1] the ball never leaves (1, 0) behind; on [0, 4] it drags it.
    let short = catching_up(&m, &[1.0, 0.0], &Grid::uniform(1.0, 4).unwrap()).unwrap();
    assert!(short.x.points().all(|p| p == [1.0, 0.0]));
    let long = catching_up(&m, &[1.0, 0.0], &Grid::uniform(4.0, 4).unwrap()).unwrap();
    let expected = [[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]];
    for (k, e) in expected.iter().enumerate() {
        assert!((long.x.at(k)[0] - e[0]).abs() < 1e-15 && long.x.at(k)[1].abs() < 1e-15);
    }
}

#[test]
fn diagonal_ball_motion_matches_recursion() {
    let m = MovingConvexSet::new(
        ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap(),
        Motion::Linear { velocity: vec![0.8, -0.6] },
        vec![0.0, 0.0],
        1.0,
    )
    .unwrap();
    let grid = Grid::uniform(4.0, 4).unwrap();
    let run = catching_up(&m, &[0.0, 1.0], &grid).unwrap();
    let mut y = [0.0, 1.0];
    for k in 1..=4 {
        let t = k as f64;
        y = project_ball([0.8 * t, -0.6 * t], y);
        assert!((run.x.at(k)[0] - y[0]).abs() < 1e-14 && (run.x.at(k)[1] - y[1]).abs() < 1e-14);
    }
}

#[test]
fn half_line_skorokhod_is_exact() {
    let grid = Grid::uniform(1.0, 100).unwrap();
    let h = SamplePath::from_fn(grid.clone(), 1, |t, o| o[0] = -t);
    let run = skorokhod_decompose(&half_line(), &[0.5], &h).unwrap();
    for (k, &t) in grid.times().iter().enumerate() {
        assert_eq!(run.y.at(k)[0], f64::max(0.5, t));
        assert_eq!(run.x.at(k)[0], run.h.at(k)[0] + run.y.at(k)[0]);
    }
}

#[test]
fn interior_perturbation_is_not_reflected() {
    let m = MovingConvexSet::fixed(ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap(), vec![0.0, 0.0], 1.0).unwrap();
    let grid = Grid::uniform(1.0, 200).unwrap();
    let h = SamplePath::from_fn(grid, 2, |t, o| {
        o[0] = 0.5 * (2.0 * PI * t).sin();
        o[1] = 0.4 * (1.0 - (6.0 * t).cos());
    });
    let run = skorokhod_decompose(&m, &[0.0, 0.0], &h).unwrap();
    assert!(run.y.values().iter().all(|&v| v == 0.0));
    assert_eq!(run.x, h);
}

#[test]
fn picard_young_matches_fine_euler_oracle() {
    let m = half_line();
    let f = Field::cosine(1, 1, vec![0.2], vec![1.0], 0.0).unwrap();
    let z = SamplePath::from_fn(Grid::uniform(1.0, 512).unwrap(), 1, |t, o| o[0] = t);
    let run = picard_young(&m, &[0.0], &f, &z, &PicardOptions::default()).unwrap();
    assert!(run.converged, "gap {} after {}", run.last_gap, run.iterations);
    let fine_n = 1 << 16;
    let oracle = euler_catching_up(&m, &[0.0], &f, &SamplePath::zeros(Grid::uniform(1.0, fine_n).unwrap(), 1)).unwrap();
    let restricted = oracle.x.subsample(fine_n / 512).unwrap();
    assert!(run.x.sup_distance(&restricted).unwrap() <= 5e-3);
}

#[test]
fn picard_with_zero_field_is_skorokhod_without_perturbation() {
    let m = MovingConvexSet::new(
        ConvexSet::cuboid(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap(),
        Motion::Oscillating { amplitude: vec![1.0, 0.5], frequency: 0.7 },
        vec![0.5, 1.0],
        0.5,
    )
    .unwrap();
    let grid = Grid::uniform(1.0, 128).unwrap();
    let z = SamplePath::from_fn(grid.clone(), 3, |t, o| o.copy_from_slice(&[t, t.sin(), t * t]));
    let base = skorokhod_decompose(&m, &[0.9, 1.9], &SamplePath::zeros(grid, 2)).unwrap();
    let zero = Field::zero(2, 3);
    let young = picard_young(&m, &[0.9, 1.9], &zero, &z, &PicardOptions::default()).unwrap();
    let rough = picard_rough(&m, &[0.9, 1.9], &zero, &RoughLift::piecewise_linear(z), &PicardOptions::default()).unwrap();
    assert_eq!(young.x, base.x);
    assert_eq!(rough.x, base.x);
    assert_eq!(young.y, base.y);
    assert_eq!(young.iterations, 1);
}

#[test]
fn picard_rough_on_fbm_converges_and_refines() {
    let m = MovingConvexSet::fixed(ConvexSet::cuboid(vec![0.0], vec![1.0]).unwrap(), vec![0.5], 0.5).unwrap();
    let f = Field::affine(1, 1, vec![0.1], vec![0.1]).unwrap();
    let fine = sample_fbm(&FbmSpec::new(0.4, 1.0, 4096, 1, 20240611).unwrap()).unwrap();
    let mut gaps = Vec::new();
    let mut prev: Option<SamplePath> = None;
    for n in [1024usize, 2048, 4096] {
        let z = fine.subsample(4096 / n).unwrap();
        let run = picard_rough(&m, &[0.5], &f, &RoughLift::piecewise_linear(z), &PicardOptions::default()).unwrap();
        assert!(run.converged, "n = {n}: gap {}", run.last_gap);
        assert!(run.identity_holds());
        assert!(feasibility_report(&run, &m).unwrap().max_violation <= m.projection().tol);
        assert!(normal_cone_check(&run, &m).satisfied);
        if let Some(p) = prev {
            gaps.push(p.sup_distance(&run.x.subsample(2).unwrap()).unwrap());
        }
        prev = Some(run.x);
    }
    assert!(gaps[1] < gaps[0], "{gaps:?}");
}

fn moving_set(kind: usize) -> MovingConvexSet {
    let motion = Motion::Oscillating { amplitude: vec![0.4, -0.3], frequency: 1.5 };
    match kind {
        0 => MovingConvexSet::new(ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap(), motion, vec![0.0, 0.0], 0.8).unwrap(),
        1 => MovingConvexSet::new(ConvexSet::cuboid(vec![-1.0, -0.5], vec![1.0, 0.5]).unwrap(), motion, vec![0.0, 0.0], 0.4)
            .unwrap(),
        _ => {
            let tri = ConvexSet::polytope(vec![
                Halfspace::new(vec![1.0, 1.0], 1.0).unwrap(),
                Halfspace::new(vec![-1.0, 0.0], 0.0).unwrap(),
                Halfspace::new(vec![0.0, -1.0], 0.0).unwrap(),
            ])
            .unwrap();
            MovingConvexSet::new(tri, motion, vec![0.25, 0.25], 0.1).unwrap()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn half_line_formula_for_random_perturbations(steps in proptest::collection::vec(-0.2..0.2f64, 64), a in 0.0..1.0f64) {
        let mut values = vec![0.0];
        for s in &steps {
            values.push(values.last().unwrap() + s);
        }
        let h = SamplePath::new(Grid::uniform(1.0, 64).unwrap(), 1, values.clone()).unwrap();
        let run = skorokhod_decompose(&half_line(), &[a], &h).unwrap();
        let mut w = a;
        for k in 0..=64 {
            w = w.max(-values[k]);
            prop_assert_eq!(run.y.at(k)[0], w);
        }
    }

    #[test]
    fn runs_stay_feasible(kind in 0usize..3, amp in 0.0..0.6f64, freq in 0.5..4.0f64) {
        let m = moving_set(kind);
        let a = m.gamma(0.0);
        let grid = Grid::uniform(1.0, 96).unwrap();
        let h = SamplePath::from_fn(grid, 2, |t, o| {
            o[0] = amp * (2.0 * PI * freq * t).sin();
            o[1] = -amp * (1.0 - (PI * freq * t).cos());
        });
        let run = skorokhod_decompose(&m, &a, &h).unwrap();
        prop_assert!(run.identity_holds());
        prop_assert!(feasibility_report(&run, &m).unwrap().max_violation <= m.projection().tol);
        prop_assert!(normal_cone_check(&run, &m).satisfied);
    }
}
