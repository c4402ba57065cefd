mod common;

use polyflow::geometry::io::SampledFrames;
use polyflow::oracle::{final_state, integrate_observe, ForcedSystem};
use polyflow::spectral::{basis_polygon_planar, dft};
use polyflow::yau::{greens_solve_moving_target, solve, Closure, MovingTarget, YauProblem};
use polyflow::{Error, FlowSolution, Polygon};

use common::{lambda, pentagon, random_polygon, rk4_gap, rng};

#[test]
fn figure_three_target() {
    let target = basis_polygon_planar(5, 1).unwrap().scaled(5.0);
    let sol = solve(&YauProblem::new(pentagon(), target.clone(), 1, 4.0).unwrap()).unwrap();
    assert!(sol.distance_to_target(25.0).unwrap() < 1e-6);

    let x1 = basis_polygon_planar(5, 1).unwrap().scaled(3.0);
    let prob = YauProblem::new(pentagon(), target, 1, 4.0).unwrap().with_waypoint(x1.clone(), 1.2);
    let sol = solve(&prob).unwrap();
    assert!(sol.evaluate(1.2).unwrap().sup_distance(&x1).unwrap() < 1e-9);
}

#[test]
fn singular_waypoint_is_reported() {
    let y = Polygon::zeros(4, 2).unwrap();
    let x0 = Polygon::from_vertices(&[[1.0, 0.2], [-0.1, 1.0], [-0.9, 0.0], [0.1, -1.1]]).unwrap();
    let t1 = std::f64::consts::PI / (-lambda(4, 1, 1)).sqrt();
    let x1 = basis_polygon_planar(4, 1).unwrap();
    let prob = YauProblem::new(x0, y, 1, 0.0).unwrap().allowing_non_convergent().with_waypoint(x1, t1);
    assert!(matches!(solve(&prob), Err(Error::SingularBoundary { .. })));
}

#[test]
fn constant_target_agrees_with_fixed_solver() {
    let mut r = rng(17);
    for (n, m, beta) in [(5, 1, 4.0), (6, 2, 1.0), (4, 1, 2.0 * 2f64.sqrt())] {
        let x0 = random_polygon(&mut r, n, 2);
        let y = random_polygon(&mut r, n, 2);
        let fixed = solve(&YauProblem::new(x0.clone(), y.clone(), m, beta).unwrap()).unwrap();
        let v0 = fixed.velocity(0.0).unwrap();
        let mv = greens_solve_moving_target(&x0, MovingTarget::constant(y), m, beta, Closure::InitialVelocity(v0), 1e-3).unwrap();
        for t in [0.5, 1.5, 3.0] {
            assert!(mv.evaluate(t).unwrap().sup_distance(&fixed.evaluate(t).unwrap()).unwrap() < 1e-8);
        }
    }
}

#[test]
fn zero_target_is_homogeneous_flow() {
    let mut r = rng(18);
    let x0 = random_polygon(&mut r, 6, 2);
    let v0 = random_polygon(&mut r, 6, 2);
    let zero = Polygon::zeros(6, 2).unwrap();
    let mv = greens_solve_moving_target(&x0, MovingTarget::constant(zero), 2, 1.0, Closure::InitialVelocity(v0.clone()), 1e-3).unwrap();
    let hom = FlowSolution::solve_ivp(&x0, &v0, 2, 1.0).unwrap();
    for t in [0.2, 2.0] {
        assert!(mv.evaluate(t).unwrap().sup_distance(&hom.evaluate(t).unwrap()).unwrap() < 1e-12);
    }
}

#[test]
fn drifting_target_matches_rk4_and_reports_distance() {
    let mut r = rng(19);
    let (x0, ya, yb) = (random_polygon(&mut r, 5, 2), random_polygon(&mut r, 5, 2), random_polygon(&mut r, 5, 2));
    let v0 = Polygon::zeros(5, 2).unwrap();
    let drift = {
        let (ya, yb) = (ya.clone(), yb.clone());
        move |t: f64| &ya + &(&yb - &ya).scaled(-(-t).exp_m1())
    };
    let mv = greens_solve_moving_target(&x0, MovingTarget::closed_form(drift.clone()), 1, 4.0, Closure::InitialVelocity(v0.clone()), 1e-3)
        .unwrap();
    let sys = ForcedSystem::moving_target(5, 2, 1, 4.0, Box::new(drift));
    assert!(rk4_gap(&sys, &x0, &v0, 3.0, 1e-4, 2000, |t| mv.evaluate(t).unwrap()) < 1e-6);
    let series = mv.distance_series(&[1.0, 5.0, 10.0]).unwrap();
    assert_eq!(series.len(), 3);
    assert!(series[2].1 < series[0].1);
}

#[test]
fn moving_target_two_point_hits_waypoint() {
    let mut r = rng(20);
    let (x0, y, x1) = (random_polygon(&mut r, 6, 2), random_polygon(&mut r, 6, 2), random_polygon(&mut r, 6, 2));
    let moving = {
        let y = y.clone();
        move |t: f64| y.scaled((0.5 * t).cos())
    };
    let closure = Closure::TwoPoint { x1: x1.clone(), t1: 1.2 };
    let mv = greens_solve_moving_target(&x0, MovingTarget::closed_form(moving), 2, 1.0, closure, 1e-3).unwrap();
    assert!(mv.evaluate(0.0).unwrap().sup_distance(&x0).unwrap() < 1e-12);
    assert!(mv.evaluate(1.2).unwrap().sup_distance(&x1).unwrap() < 1e-9);
}

#[test]
fn sampled_target_matches_its_interpolant() {
    // piecewise-linear frames: the quadrature sees the same target as the oracle
    let mut r = rng(22);
    let frames: Vec<Polygon> = (0..7).map(|_| random_polygon(&mut r, 4, 2)).collect();
    let sampled = SampledFrames { dt: 0.5, frames: frames.clone() };
    let x0 = random_polygon(&mut r, 4, 2);
    let v0 = Polygon::zeros(4, 2).unwrap();
    let target = MovingTarget::Sampled(sampled);
    let interp = {
        let frames = frames.clone();
        move |t: f64| {
            let pos = (t / 0.5).clamp(0.0, 6.0);
            let i = (pos.floor() as usize).min(5);
            let s = pos - i as f64;
            &frames[i].scaled(1.0 - s) + &frames[i + 1].scaled(s)
        }
    };
    let mv = greens_solve_moving_target(&x0, target, 1, 1.0, Closure::InitialVelocity(v0.clone()), 1e-3).unwrap();
    let sys = ForcedSystem::moving_target(4, 2, 1, 1.0, Box::new(interp));
    // kinks in the target limit Simpson to second order across frame boundaries
    assert!(rk4_gap(&sys, &x0, &v0, 3.0, 1e-4, 2500, |t| mv.evaluate(t).unwrap()) < 1e-6);
}

#[test]
fn undamped_target_flow_needs_opt_in() {
    let prob = YauProblem::new(pentagon(), pentagon().scaled(2.0), 1, 0.0).unwrap();
    assert!(matches!(solve(&prob), Err(Error::NonConvergentMode { .. })));
    let sol = solve(&prob.allowing_non_convergent()).unwrap();
    assert!(sol.limit().is_none());
}

#[test]
fn rk4_stays_in_mode_span() {
    let x0 = basis_polygon_planar(7, 2).unwrap();
    let v0 = Polygon::zeros(7, 2).unwrap();
    let sys = ForcedSystem::homogeneous(7, 2, 2, 1.0);
    let mut worst: f64 = 0.0;
    integrate_observe(&sys, &x0, &v0, 3.0, 1e-3, |_, x, _| {
        let s = dft(&x.to_complex()?);
        let outside: f64 = (0..7).filter(|k| *k != 2).map(|k| s.get(k).norm_sqr()).sum();
        worst = worst.max(outside.sqrt());
        Ok(())
    })
    .unwrap();
    assert!(worst < 1e-8);
}

#[test]
fn rk4_energy_drift() {
    let mut r = rng(23);
    let (n, m) = (6, 2);
    let x0 = random_polygon(&mut r, n, 2);
    let v0 = random_polygon(&mut r, n, 2);
    let energy = |x: &Polygon, v: &Polygon| {
        let s = dft(&x.to_complex().unwrap());
        let kinetic: f64 = v.as_flat().iter().map(|c| c * c).sum();
        kinetic + (0..n).map(|k| lambda(n, m, k).abs() * s.get(k).norm_sqr() * n as f64).sum::<f64>()
    };
    let e0 = energy(&x0, &v0);
    let sys = ForcedSystem::homogeneous(n, 2, m, 0.0);
    let mut worst: f64 = 0.0;
    integrate_observe(&sys, &x0, &v0, 3.0, 1e-4, |_, x, v| {
        worst = worst.max((energy(x, v) - e0).abs() / e0);
        Ok(())
    })
    .unwrap();
    assert!(worst < 1e-6, "drift {worst:e}");
    let (x3, v3) = final_state(&sys, &x0, &v0, 3.0, 1e-4).unwrap();
    assert!(x3.is_finite() && v3.is_finite());
}
