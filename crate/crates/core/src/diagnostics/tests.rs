use super::*;
use crate::field::Field;
use crate::geometry::{ConvexSet, Motion};
use crate::path::Grid;
use crate::solvers::{catching_up, euler_catching_up, picard_rough, picard_young, skorokhod_decompose, PicardInit, PicardOptions};
use crate::rough::RoughLift;

fn half_line(lower: f64) -> MovingConvexSet {
    MovingConvexSet::fixed(ConvexSet::cuboid(vec![lower], vec![f64::INFINITY]).unwrap(), vec![lower + 1.0], 1.0).unwrap()
}

fn rising_half_line() -> MovingConvexSet {
    let base = ConvexSet::cuboid(vec![0.0], vec![f64::INFINITY]).unwrap();
    MovingConvexSet::new(base, Motion::Linear { velocity: vec![1.0] }, vec![1.0], 1.0).unwrap()
}

fn unit_interval() -> MovingConvexSet {
    MovingConvexSet::fixed(ConvexSet::cuboid(vec![0.0], vec![1.0]).unwrap(), vec![0.5], 0.5).unwrap()
}

#[test]
fn feasibility_examples() {
    let disc = MovingConvexSet::new(
        ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap(),
        Motion::Oscillating { amplitude: vec![0.5, 0.0], frequency: 1.0 },
        vec![0.0, 0.0],
        0.5,
    )
    .unwrap();
    let grid = Grid::uniform(1.0, 100).unwrap();
    let mut run = catching_up(&disc, &[0.9, 0.0], &grid).unwrap();
    assert!(feasibility_report(&run, &disc).unwrap().max_violation <= disc.projection().tol);

    let fixed = MovingConvexSet::fixed(ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap(), vec![0.0, 0.0], 0.5).unwrap();
    run = catching_up(&fixed, &[0.0, 0.0], &grid).unwrap();
    let shifted: Vec<f64> = run.x.values().iter().enumerate().map(|(i, v)| if i % 2 == 0 { v + 10.0 } else { *v }).collect();
    run.x = SamplePath::new(grid.clone(), 2, shifted).unwrap();
    assert!((feasibility_report(&run, &fixed).unwrap().max_violation - 9.0).abs() < 1e-12);

    let h = SamplePath::from_fn(grid, 1, |t, o| o[0] = (6.0 * t).sin() - t);
    let run = skorokhod_decompose(&half_line(0.0), &[0.5], &h).unwrap();
    assert_eq!(feasibility_report(&run, &half_line(0.0)).unwrap().max_violation, 0.0);
}

#[test]
fn variation_of_monotone_run() {
    let grid = Grid::uniform(1.0, 64).unwrap();
    let m = rising_half_line();
    let run = catching_up(&m, &[0.0], &grid).unwrap();
    let params = variation_params(&m, &run).unwrap();
    let report = variation_bound_check(&run, &params, VariationBound::Windows { gamma_sup: gamma_sup(&m, &run) }).unwrap();
    assert_eq!(report.y_var, 1.0);
    assert!(report.satisfied, "{report:?}");
}

#[test]
fn variation_of_resting_run_is_zero() {
    let m = unit_interval();
    let run = catching_up(&m, &[0.3], &Grid::uniform(1.0, 8).unwrap()).unwrap();
    let params = variation_params(&m, &run).unwrap();
    let report = variation_bound_check(&run, &params, VariationBound::Oscillation { diam_sup: m.diameter_sup() }).unwrap();
    assert_eq!(report.y_var, 0.0);
    assert!(report.satisfied);
}

#[test]
fn variation_of_half_line_oracle() {
    let horizon = 2.0;
    let grid = Grid::uniform(horizon, 128).unwrap();
    let h = SamplePath::from_fn(grid, 1, |t, o| o[0] = -t);
    let m = half_line(0.0);
    let run = skorokhod_decompose(&m, &[0.0], &h).unwrap();
    let params = variation_params(&m, &run).unwrap();
    let report = variation_bound_check(&run, &params, VariationBound::Windows { gamma_sup: 1.0 }).unwrap();
    assert!((report.y_var - horizon).abs() < 1e-15);
    assert_eq!(report.satisfied, report.bound >= horizon);
    assert!(report.satisfied);
}

#[test]
fn window_dissection_respects_the_ball_and_oscillation() {
    let grid = Grid::uniform(1.0, 200).unwrap();
    let m = rising_half_line();
    let h = SamplePath::from_fn(grid.clone(), 1, |t, o| o[0] = 0.3 * (10.0 * t).sin());
    let d = window_dissection(&m, &h, 0.5).unwrap();
    let times = grid.times();
    for w in d.breakpoints.windows(2) {
        let g = m.gamma(times[w[0]]);
        for u in w[0]..=w[1] {
            assert!(m.at(times[u]).margin(&g) >= 0.5);
            assert!((h.at(u)[0] - h.at(w[0])[0]).abs() <= 0.25);
        }
    }
    assert_eq!(*d.breakpoints.last().unwrap(), 200);
    assert!(window_dissection(&m, &h, 2.0).is_none());
}

#[test]
fn normal_cone_holds_on_catching_up() {
    let m = MovingConvexSet::new(
        ConvexSet::cuboid(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
        Motion::Oscillating { amplitude: vec![0.6, 0.3], frequency: 1.0 },
        vec![0.5, 0.5],
        0.4,
    )
    .unwrap();
    let run = catching_up(&m, &[0.9, 0.1], &Grid::uniform(1.0, 256).unwrap()).unwrap();
    let report = normal_cone_check(&run, &m);
    assert!(report.satisfied, "{report:?}");
    assert!(report.probes > report.windows);
}

#[test]
fn normal_cone_detects_a_wrong_reflection() {
    let grid = Grid::uniform(1.0, 16).unwrap();
    let m = half_line(0.0);
    let mut run = catching_up(&m, &[1.0], &grid).unwrap();
    // Y pushed outward while the set stays put.
    run.y = SamplePath::from_fn(grid, 1, |t, o| o[0] = 1.0 + t);
    run.x = run.y.clone();
    assert!(!normal_cone_check(&run, &m).satisfied);
}

fn picard_pair(init_b: PicardInit) -> (MovingConvexSet, Field, SamplePath, crate::solvers::SweepingRun, crate::solvers::SweepingRun) {
    let m = half_line(0.0);
    let grid = Grid::uniform(1.0, 256).unwrap();
    let z = SamplePath::from_fn(grid, 1, |t, o| o[0] = 0.5 * (4.0 * t).sin() - t);
    let f = Field::cosine(1, 1, vec![0.2], vec![1.0], 0.0).unwrap();
    let a = picard_young(&m, &[0.3], &f, &z, &PicardOptions::default()).unwrap();
    let b = picard_young(&m, &[0.3], &f, &z, &PicardOptions { init: init_b, ..PicardOptions::default() }).unwrap();
    (m, f, z, a, b)
}

#[test]
fn uniqueness_functional_examples() {
    let (_, _, _, a, b) = picard_pair(PicardInit::Constant);
    let same = uniqueness_functional_young(&a, &a, WindowSampling::All).unwrap();
    assert_eq!(same.max_value, 0.0);

    let mut shifted = a.clone();
    let yv: Vec<f64> = a.y.values().iter().map(|v| v + 3.0).collect();
    shifted.y = SamplePath::new(a.grid().clone(), 1, yv).unwrap();
    assert_eq!(uniqueness_functional_young(&a, &shifted, WindowSampling::Dyadic).unwrap().max_value, 0.0);

    assert!(a.converged && b.converged);
    assert!(a.x.sup_distance(&b.x).unwrap() < 1e-6);
    let report = uniqueness_functional_young(&a, &b, WindowSampling::All).unwrap();
    assert!(report.max_value <= 1e-6, "{report:?}");
    assert!(report.consistent);
}

#[test]
fn rough_functional_reduces_to_young_for_zero_field() {
    let (_, _, z, a, b) = picard_pair(PicardInit::Constant);
    let zero = Field::zero(1, 1);
    for sampling in [WindowSampling::Dyadic, WindowSampling::All] {
        let young = uniqueness_functional_young(&a, &b, sampling).unwrap();
        let rough = uniqueness_functional_rough(&a, &b, &zero, &z, sampling).unwrap();
        assert_eq!(young, rough);
    }
    let same = uniqueness_functional_rough(&a, &a, &zero, &z, WindowSampling::All).unwrap();
    assert_eq!(same.max_value, 0.0);
}

/// Direct evaluation of the rough pairing for one window.
fn rough_pairing_direct(a: &crate::solvers::SweepingRun, b: &crate::solvers::SweepingRun, f: &Field, z: &SamplePath, u: usize, v: usize) -> f64 {
    let mut fa = [0.0];
    let mut fb = [0.0];
    f.eval(a.x.at(u), &mut fa);
    f.eval(b.x.at(u), &mut fb);
    let mut total = 0.0;
    for k in u..v {
        let dz = z.at(k)[0] - z.at(u)[0];
        let ra = (a.x.at(k)[0] - a.x.at(u)[0]) - fa[0] * dz;
        let rb = (b.x.at(k)[0] - b.x.at(u)[0]) - fb[0] * dz;
        let dy = (a.y.at(k + 1)[0] - a.y.at(k)[0]) - (b.y.at(k + 1)[0] - b.y.at(k)[0]);
        total += (ra - rb) * dy;
    }
    total
}

#[test]
fn rough_functional_matches_direct_sum() {
    let m = unit_interval();
    let grid = Grid::uniform(1.0, 64).unwrap();
    let z = SamplePath::from_fn(grid, 1, |t, o| o[0] = (9.0 * t).sin());
    let f = Field::cosine(1, 1, vec![0.7], vec![2.0], 0.1).unwrap();
    let a = skorokhod_decompose(&m, &[0.2], &SamplePath::from_fn(z.grid().clone(), 1, |t, o| o[0] = (9.0 * t).sin())).unwrap();
    let b = catching_up(&m, &[0.6], z.grid()).unwrap();
    let report = uniqueness_functional_rough(&a, &b, &f, &z, WindowSampling::All).unwrap();
    let mut best = f64::NEG_INFINITY;
    for u in 0..64 {
        for v in u + 1..=64 {
            best = best.max(rough_pairing_direct(&a, &b, &f, &z, u, v));
        }
    }
    assert!((report.max_value - best).abs() < 1e-12 * (1.0 + best.abs()), "{} vs {best}", report.max_value);
}

#[test]
fn converged_rough_runs_agree() {
    let m = unit_interval();
    let grid = Grid::uniform(1.0, 256).unwrap();
    let z = SamplePath::from_fn(grid, 1, |t, o| o[0] = 0.4 * (7.0 * t).sin() + 0.2 * (23.0 * t).cos() - 0.2);
    let f = Field::affine(1, 1, vec![0.1], vec![0.1]).unwrap();
    let lift = RoughLift::piecewise_linear(z.clone());
    let a = picard_rough(&m, &[0.5], &f, &lift, &PicardOptions::default()).unwrap();
    let b = picard_rough(&m, &[0.5], &f, &lift, &PicardOptions { init: PicardInit::Constant, ..PicardOptions::default() }).unwrap();
    assert!(a.converged && b.converged);
    let report = uniqueness_functional_rough(&a, &b, &f, &z, WindowSampling::Dyadic).unwrap();
    assert!(report.max_value.abs() <= 1e-6);
}

#[test]
fn ladder_validation() {
    assert_eq!(check_ladder(&[256, 512, 1000]), Err(Error::NonNestedLadder));
    assert_eq!(check_ladder(&[]), Err(Error::NonNestedLadder));
    assert!(check_ladder(&[256, 256, 768]).is_ok());
}

#[test]
fn trivial_ladder_has_zero_gaps() {
    let m = unit_interval();
    let report = convergence_study(&[16, 32, 64, 128], 1.0, |n| {
        let w = SamplePath::zeros(Grid::uniform(1.0, n).unwrap(), 1);
        euler_catching_up(&m, &[0.4], &Field::zero(1, 1), &w)
    })
    .unwrap();
    assert_eq!(report.sup_gaps, vec![0.0; 3]);
    assert_eq!(report.grid_sizes, vec![16, 32, 64]);
    assert_eq!(report.empirical_order, None);
}

#[test]
fn repeated_size_has_zero_gap() {
    let m = unit_interval();
    let drift = Field::cosine(1, 1, vec![0.5], vec![3.0], 0.0).unwrap();
    let report = convergence_study(&[64, 64], 1.0, |n| {
        let w = SamplePath::from_fn(Grid::uniform(1.0, n).unwrap(), 1, |t, o| o[0] = (5.0 * t).sin());
        euler_catching_up(&m, &[0.4], &drift, &w)
    })
    .unwrap();
    assert_eq!(report.sup_gaps, vec![0.0]);
}

#[test]
fn single_member_ladder_is_empty() {
    let m = unit_interval();
    let report = convergence_study(&[64], 1.0, |n| catching_up(&m, &[0.4], &Grid::uniform(1.0, n).unwrap())).unwrap();
    assert!(report.sup_gaps.is_empty() && report.grid_sizes.is_empty());
}

#[test]
fn reflected_drift_ladder_contracts() {
    let m = half_line(0.0);
    let drift = Field::cosine(1, 1, vec![0.2], vec![1.0], 0.0).unwrap();
    let report = convergence_study(&[256, 512, 1024, 2048, 4096], theory_order(1.0, 1.0), |n| {
        euler_catching_up(&m, &[0.0], &drift, &SamplePath::zeros(Grid::uniform(1.0, n).unwrap(), 1))
    })
    .unwrap();
    for r in report.ratios.iter().flatten() {
        assert!(*r <= 0.75, "{report:?}");
    }
    assert!(report.sup_gaps.windows(2).all(|w| w[1] < w[0]));
    assert!(report.empirical_order.unwrap() > 0.9);
}

#[test]
fn euler_half_line_gap_is_bounded_by_modulus() {
    let lip = 4.0 * core::f64::consts::PI + 0.3;
    let h = |t: f64| (4.0 * core::f64::consts::PI * t).sin() - 0.3 * t;
    let a = 0.5;
    for n in [64usize, 256, 1024] {
        let grid = Grid::uniform(1.0, n).unwrap();
        let w = SamplePath::from_fn(grid, 1, |t, o| o[0] = h(t));
        let run = euler_catching_up(&half_line(0.0), &[a], &Field::zero(1, 1), &w).unwrap();
        let mut running = a;
        let mut gap: f64 = 0.0;
        for j in 0..=2 * n {
            running = running.max(-h(j as f64 / (2 * n) as f64));
            if j % 2 == 0 {
                gap = gap.max((run.y.at(j / 2)[0] - running).abs());
            }
        }
        assert!(gap <= lip / n as f64, "n = {n}: {gap}");
    }
}

#[test]
fn theory_order_is_the_minimum() {
    assert_eq!(theory_order(1.0, 1.0), 1.0);
    assert!((theory_order(1.0, 1.01 / 0.7) - 0.7 / 1.01).abs() < 1e-15);
    assert_eq!(theory_order(0.5, 1.0), 0.5);
}
