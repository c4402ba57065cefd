//! Difference flow `X'' + beta X' = (-1)^{m+1} M^m (X - Y)` toward a target `Y`.
//!
//! For a fixed target the difference `Z = X - Y` solves the homogeneous
//! flow, so the closed-form engine applies directly.

mod greens;

pub use greens::{
    greens_solve_moving_target, greens_solve_moving_target_in, Closure, GreensKernel, MovingTarget, MovingTargetSolution, DEFAULT_QUADRATURE_STEP,
};

use crate::error::{Error, Result};
use crate::flow::{FlowSolution, OverdampedForm, Representation};
use crate::geometry::Polygon;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, PartialEq)]
pub struct YauProblem {
    pub x0: Polygon,
    pub target: Polygon,
    pub m: u32,
    pub beta: f64,
    /// Free constants as a polygon spectrum; zero when absent. Overdamped
    /// modes read them in the fast-anchored form, so zero constants leave
    /// each such mode decaying at its faster rate.
    pub free: Option<Polygon>,
    /// Replace the translation constant so the limit is the target itself.
    pub exact_limit: bool,
    /// Intermediate states `(X1, t1)`; at most one is supported.
    pub waypoints: Vec<(Polygon, f64)>,
    /// Permit `beta = 0`, which oscillates about the target forever.
    pub allow_non_convergent: bool,
}

impl YauProblem {
    pub fn new(x0: Polygon, target: Polygon, m: u32, beta: f64) -> Result<Self> {
        x0.check_same_shape(&target)?;
        Ok(YauProblem {
            x0,
            target,
            m,
            beta,
            free: None,
            exact_limit: true,
            waypoints: Vec::new(),
            allow_non_convergent: false,
        })
    }

    pub fn with_free_constants(mut self, free: Polygon) -> Self {
        self.free = Some(free);
        self
    }

    pub fn with_exact_limit(mut self, exact: bool) -> Self {
        self.exact_limit = exact;
        self
    }

    pub fn with_waypoint(mut self, x1: Polygon, t1: f64) -> Self {
        self.waypoints.push((x1, t1));
        self
    }

    pub fn allowing_non_convergent(mut self) -> Self {
        self.allow_non_convergent = true;
        self
    }

    fn check(&self) -> Result<()> {
        self.x0.check_same_shape(&self.target)?;
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::Domain(format!("damping must be finite and >= 0, got {}", self.beta)));
        }
        if self.beta == 0.0 && !self.allow_non_convergent {
            return Err(Error::NonConvergentMode { beta: self.beta });
        }
        Ok(())
    }
}

/// `X(t) = Y + Z(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct YauSolution {
    pub target: Polygon,
    pub difference: FlowSolution,
}

impl YauSolution {
    pub fn evaluate(&self, t: f64) -> Result<Polygon> {
        Ok(&self.difference.evaluate(t)? + &self.target)
    }

    pub fn velocity(&self, t: f64) -> Result<Polygon> {
        self.difference.velocity(t)
    }

    pub fn distance_to_target(&self, t: f64) -> Result<f64> {
        Ok(self.difference.evaluate(t)?.sup_norm())
    }

    /// Limit as `t -> inf`: the target shifted by the residual translation.
    pub fn limit(&self) -> Option<Polygon> {
        let shift = self.difference.limit_point()?;
        let shift = Polygon::point(self.target.n(), &shift).ok()?;
        Some(&self.target + &shift)
    }

    pub fn sample(&self, times: &[f64]) -> Result<Trajectory> {
        let frames = times.iter().map(|t| self.evaluate(*t)).collect::<Result<Vec<_>>>()?;
        Trajectory::from_samples(times.to_vec(), frames)
    }
}

/// Flow to a fixed target. With `exact_limit` the translation constant is
/// `-beta` times the initial centroid offset, so the limit is `Y` itself.
pub fn solve_fixed_target(prob: &YauProblem) -> Result<YauSolution> {
    prob.check()?;
    let z0 = &prob.x0 - &prob.target;
    let mut free = match &prob.free {
        Some(f) => {
            z0.check_same_shape(f)?;
            f.clone()
        }
        None => Polygon::zeros(z0.n(), z0.dim())?,
    };
    if prob.exact_limit {
        let offset: Vec<f64> = free.centroid().iter().zip(z0.centroid()).map(|(f, z)| -prob.beta * z - f).collect();
        free = &free + &Polygon::point(z0.n(), &offset)?;
    }
    Ok(YauSolution {
        target: prob.target.clone(),
        difference: FlowSolution::from_constants_with_form(
            &z0,
            &free,
            prob.m,
            prob.beta,
            Representation::Auto,
            OverdampedForm::FastAnchored,
        )?,
    })
}

/// Flow to a fixed target passing through the single waypoint `(X1, t1)`.
pub fn solve_with_waypoint(prob: &YauProblem) -> Result<YauSolution> {
    prob.check()?;
    let (x1, t1) = match prob.waypoints.as_slice() {
        [w] => w,
        [] => return Err(Error::Domain("no waypoint given".into())),
        many => return Err(Error::TooManyWaypoints(many.len())),
    };
    x1.check_same_shape(&prob.target)?;
    let z0 = &prob.x0 - &prob.target;
    let z1 = x1 - &prob.target;
    Ok(YauSolution {
        target: prob.target.clone(),
        difference: FlowSolution::solve_two_point(&z0, &z1, *t1, prob.m, prob.beta)?,
    })
}

/// Dispatches on the number of waypoints.
pub fn solve(prob: &YauProblem) -> Result<YauSolution> {
    match prob.waypoints.len() {
        0 => solve_fixed_target(prob),
        1 => solve_with_waypoint(prob),
        k => Err(Error::TooManyWaypoints(k)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::basis_polygon_planar;

    fn pentagon() -> Polygon {
        Polygon::from_vertices(&[[1.0, 0.1], [0.2, 0.9], [-0.8, 0.6], [-0.7, -0.5], [0.4, -0.8]]).unwrap()
    }

    fn target() -> Polygon {
        basis_polygon_planar(5, 1).unwrap().scaled(5.0)
    }

    #[test]
    fn converges_to_target() {
        let prob = YauProblem::new(pentagon(), target(), 1, 4.0).unwrap();
        let sol = solve(&prob).unwrap();
        assert!(sol.evaluate(0.0).unwrap().sup_distance(&pentagon()).unwrap() < 1e-13);
        assert!(sol.distance_to_target(25.0).unwrap() < 1e-6);
    }

    #[test]
    fn target_is_stationary() {
        let prob = YauProblem::new(target(), target(), 2, 1.0).unwrap();
        let sol = solve(&prob).unwrap();
        for t in [0.5, 3.0, 10.0] {
            assert!(sol.evaluate(t).unwrap().sup_distance(&target()).unwrap() < 1e-13);
        }
    }

    #[test]
    fn without_exact_limit_lands_on_a_translate() {
        let shifted = &pentagon() + &Polygon::point(5, &[3.0, -1.0]).unwrap();
        let prob = YauProblem::new(shifted, target(), 1, 4.0).unwrap().with_exact_limit(false);
        let sol = solve(&prob).unwrap();
        let limit = sol.limit().unwrap();
        let offset = &limit - &target();
        let c = pentagon().centroid();
        assert!((offset.vertex(0)[0] - (c[0] + 3.0)).abs() < 1e-12);
        assert!(sol.evaluate(40.0).unwrap().sup_distance(&limit).unwrap() < 1e-9);
    }

    #[test]
    fn waypoint_rules() {
        let x1 = basis_polygon_planar(5, 1).unwrap().scaled(3.0);
        let prob = YauProblem::new(pentagon(), target(), 1, 4.0).unwrap().with_waypoint(x1.clone(), 1.2);
        let sol = solve(&prob).unwrap();
        assert!(sol.evaluate(1.2).unwrap().sup_distance(&x1).unwrap() < 1e-9);
        // the waypoint fixes the translation, so the limit is a translate of the target
        let limit = sol.limit().unwrap();
        let far: Vec<f64> =
            [10.0, 20.0, 40.0, 60.0].iter().map(|t| sol.evaluate(*t).unwrap().sup_distance(&limit).unwrap()).collect();
        assert!(far.windows(2).all(|w| w[1] < w[0]), "{far:?}");
        assert!(far[3] < 1e-6);
        let prob = prob.with_waypoint(x1, 2.0);
        assert_eq!(solve(&prob), Err(Error::TooManyWaypoints(2)));
    }

    #[test]
    fn undamped_requires_opt_in() {
        let prob = YauProblem::new(pentagon(), target(), 1, 0.0).unwrap();
        assert!(matches!(solve(&prob), Err(Error::NonConvergentMode { .. })));
        assert!(solve(&prob.allowing_non_convergent()).is_ok());
    }
}
