//! Closed forms against the RK4 integrator over a fixed parameter sweep.

use polyflow::oracle::{integrate_observe, ForcedSystem};
use polyflow::spectral::eigenvalue;
use polyflow::yau::{greens_solve_moving_target, solve, Closure, MovingTarget, YauProblem};
use polyflow::{FlowSolution, Polygon};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::VerifyArgs;
use crate::failure::{CliError, CliResult};

pub const SEED_ENV: &str = "POLYFLOW_SEED";
const BASE_DT: f64 = 1e-4;
const BASE_TOL: f64 = 1e-6;
const QUADRATURE_STEP: f64 = 1e-3;

/// Tolerance at step `dt`, loosened with the fourth-order error of RK4.
pub fn threshold(dt: f64) -> f64 {
    BASE_TOL * (dt / BASE_DT).powi(4).max(1.0)
}

fn seed(flag: u64) -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(flag),
    }
}

fn random_polygon(rng: &mut ChaCha8Rng, n: usize) -> Polygon {
    let coords = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Polygon::from_flat(n, 2, coords).expect("2n coordinates")
}

/// Worst sup-norm gap, compared at roughly `spacing` intervals and at the end.
fn gap(
    sys: &ForcedSystem,
    x0: &Polygon,
    v0: &Polygon,
    t_end: f64,
    dt: f64,
    spacing: f64,
    closed: impl Fn(f64) -> polyflow::Result<Polygon>,
) -> CliResult<f64> {
    let every = ((spacing / dt).round() as usize).max(1);
    let steps = ((t_end / dt) - 1e-9).ceil() as usize;
    let (mut i, mut worst) = (0usize, 0.0f64);
    integrate_observe(sys, x0, v0, t_end, dt, |t, x, _| {
        if i % every == 0 || i == steps {
            worst = worst.max(x.sup_distance(&closed(t)?)?);
        }
        i += 1;
        Ok(())
    })?;
    Ok(worst)
}

pub fn run(a: &VerifyArgs) -> CliResult<()> {
    if !(a.dt > 0.0 && a.dt.is_finite()) || !(a.t_end > 0.0 && a.t_end.is_finite()) {
        return Err(CliError::Usage("--dt and --t-end must be positive".into()));
    }
    let seed = seed(a.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (dt, t_end) = (a.dt, a.t_end);

    let mut flow: f64 = 0.0;
    for n in [5, 6, 8] {
        for m in 1..=3 {
            let critical = 2.0 * (-eigenvalue(n, m, 1)?).sqrt();
            for beta in [0.0, 1.0, 4.0, critical] {
                let (x0, v0) = (random_polygon(&mut rng, n), random_polygon(&mut rng, n));
                let sol = FlowSolution::solve_ivp(&x0, &v0, m, beta)?;
                let sys = ForcedSystem::homogeneous(n, 2, m, beta);
                flow = flow.max(gap(&sys, &x0, &v0, t_end, dt, 0.01, |t| sol.evaluate(t))?);
            }
        }
    }

    let (mut fixed, mut moving): (f64, f64) = (0.0, 0.0);
    for n in [4, 5, 6] {
        for m in 1..=2 {
            for beta in [1.0, 4.0] {
                let (x0, y) = (random_polygon(&mut rng, n), random_polygon(&mut rng, n));
                let sol = solve(&YauProblem::new(x0.clone(), y.clone(), m, beta)?)?;
                let v0 = sol.velocity(0.0)?;
                let sys = ForcedSystem::fixed_target(y.clone(), m, beta);
                fixed = fixed.max(gap(&sys, &x0, &v0, t_end, dt, 0.01, |t| sol.evaluate(t))?);

                let yb = random_polygon(&mut rng, n);
                let drift = move |t: f64| &y + &(&yb - &y).scaled(-(-t).exp_m1());
                let mv = greens_solve_moving_target(
                    &x0,
                    MovingTarget::closed_form(drift.clone()),
                    m,
                    beta,
                    Closure::InitialVelocity(v0.clone()),
                    QUADRATURE_STEP,
                )?;
                let sys = ForcedSystem::moving_target(n, 2, m, beta, Box::new(drift));
                moving = moving.max(gap(&sys, &x0, &v0, t_end, dt, 0.1, |t| mv.evaluate(t))?);
            }
        }
    }

    let tol = threshold(dt);
    println!("seed: {seed}");
    println!("dt: {dt:e}");
    println!("t_end: {t_end}");
    println!("threshold: {tol:e}");
    let rows = [("flow", flow), ("yau fixed target", fixed), ("yau moving target", moving)];
    for (name, v) in rows {
        println!("{name}: max discrepancy {v:.6e} {}", if v < tol { "PASS" } else { "FAIL" });
    }
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    if worst < tol {
        println!("verify: PASS");
        Ok(())
    } else {
        println!("verify: FAIL");
        Err(CliError::Failed(format!("max discrepancy {worst:e} exceeds {tol:e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_scales_with_fourth_power() {
        assert_eq!(threshold(1e-4), 1e-6);
        assert_eq!(threshold(1e-5), 1e-6);
        assert!((threshold(1e-2) / 1e2 - 1.0).abs() < 1e-12);
    }
}
