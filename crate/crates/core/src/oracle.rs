//! Fixed-step RK4 reference integrator for the second-order flow systems.
//!
//! The operator is applied with stencil sweeps only, never in mode space,
//! so results are independent of the closed-form engine.

use crate::error::{mismatch, Error, Result};
use crate::geometry::Polygon;
use crate::spectral::CirculantOperator;
use crate::trajectory::Trajectory;

pub type PolygonFn = Box<dyn Fn(f64) -> Polygon + Send + Sync>;

/// Time-dependent contribution to the acceleration.
pub enum Forcing {
    None,
    /// `X'' + beta X' = L (X - Y(t))`.
    Target(PolygonFn),
    /// `X'' + beta X' = L X + F(t)`.
    Additive(PolygonFn),
}

impl std::fmt::Debug for Forcing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Forcing::None => "None",
            Forcing::Target(_) => "Target(..)",
            Forcing::Additive(_) => "Additive(..)",
        })
    }
}

/// `X'' + beta X' = (-1)^{m+1} M^m X` plus optional forcing.
#[derive(Debug)]
pub struct ForcedSystem {
    pub n: usize,
    pub p: usize,
    pub m: u32,
    pub beta: f64,
    pub forcing: Forcing,
}

impl ForcedSystem {
    pub fn homogeneous(n: usize, p: usize, m: u32, beta: f64) -> Self {
        ForcedSystem { n, p, m, beta, forcing: Forcing::None }
    }

    /// Flow toward a fixed target `y`.
    pub fn fixed_target(y: Polygon, m: u32, beta: f64) -> Self {
        let (n, p) = (y.n(), y.dim());
        ForcedSystem { n, p, m, beta, forcing: Forcing::Target(Box::new(move |_| y.clone())) }
    }

    pub fn moving_target(n: usize, p: usize, m: u32, beta: f64, y: PolygonFn) -> Self {
        ForcedSystem { n, p, m, beta, forcing: Forcing::Target(y) }
    }
}

struct Workspace {
    op: CirculantOperator,
    p: usize,
    shifted: Vec<f64>,
    scratch: Vec<f64>,
    lx: Vec<f64>,
}

impl Workspace {
    /// Acceleration `a = L(x - y) - beta v (+ F)`.
    fn accel(&mut self, sys: &ForcedSystem, t: f64, x: &[f64], v: &[f64], a: &mut [f64]) -> Result<()> {
        match &sys.forcing {
            Forcing::Target(y) => {
                let y = y(t);
                check_shape(sys, &y)?;
                for ((s, xi), yi) in self.shifted.iter_mut().zip(x).zip(y.as_flat()) {
                    *s = xi - yi;
                }
                self.op.apply_flat(&self.shifted, self.p, &mut self.lx, &mut self.scratch);
            }
            _ => self.op.apply_flat(x, self.p, &mut self.lx, &mut self.scratch),
        }
        for ((ai, li), vi) in a.iter_mut().zip(&self.lx).zip(v) {
            *ai = li - sys.beta * vi;
        }
        if let Forcing::Additive(f) = &sys.forcing {
            let f = f(t);
            check_shape(sys, &f)?;
            for (ai, fi) in a.iter_mut().zip(f.as_flat()) {
                *ai += fi;
            }
        }
        Ok(())
    }
}

fn check_shape(sys: &ForcedSystem, x: &Polygon) -> Result<()> {
    if x.n() != sys.n || x.dim() != sys.p {
        return Err(mismatch(format!("{}x{} polygon", sys.n, sys.p), format!("{}x{}", x.n(), x.dim())));
    }
    Ok(())
}

/// Integrates from `t = 0` to `t_end` (backward when negative) with
/// `N = ceil(|t_end| / dt)` equal steps, calling `observe(t, x, v)` at the
/// start and after every step.
pub fn integrate_observe(
    sys: &ForcedSystem,
    x0: &Polygon,
    v0: &Polygon,
    t_end: f64,
    dt: f64,
    mut observe: impl FnMut(f64, &Polygon, &Polygon) -> Result<()>,
) -> Result<(Polygon, Polygon)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("step must be positive, got {dt}")));
    }
    if !t_end.is_finite() {
        return Err(Error::Domain(format!("end time must be finite, got {t_end}")));
    }
    check_shape(sys, x0)?;
    check_shape(sys, v0)?;
    let len = sys.n * sys.p;
    let steps = ((t_end.abs() / dt) - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };

    let mut ws = Workspace {
        op: CirculantOperator::new(sys.n, sys.m)?,
        p: sys.p,
        shifted: vec![0.0; len],
        scratch: vec![0.0; len],
        lx: vec![0.0; len],
    };
    let mut x = Polygon::from_flat(sys.n, sys.p, x0.as_flat().to_vec())?;
    let mut v = Polygon::from_flat(sys.n, sys.p, v0.as_flat().to_vec())?;
    let (mut k1a, mut k2a, mut k3a, mut k4a) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let (mut xt, mut vt) = (vec![0.0; len], vec![0.0; len]);
    let (mut k2x, mut k3x) = (vec![0.0; len], vec![0.0; len]);

    observe(0.0, &x, &v)?;
    for step in 0..steps {
        let t = step as f64 * h;
        let (xs, vs) = (x.as_flat(), v.as_flat());
        // stage 1: dx = v, dv = k1a
        ws.accel(sys, t, xs, vs, &mut k1a)?;
        for i in 0..len {
            xt[i] = xs[i] + 0.5 * h * vs[i];
            vt[i] = vs[i] + 0.5 * h * k1a[i];
        }
        k2x.copy_from_slice(&vt);
        ws.accel(sys, t + 0.5 * h, &xt, &vt, &mut k2a)?;
        for i in 0..len {
            xt[i] = xs[i] + 0.5 * h * k2x[i];
            vt[i] = vs[i] + 0.5 * h * k2a[i];
        }
        k3x.copy_from_slice(&vt);
        ws.accel(sys, t + 0.5 * h, &xt, &vt, &mut k3a)?;
        for i in 0..len {
            xt[i] = xs[i] + h * k3x[i];
            vt[i] = vs[i] + h * k3a[i];
        }
        ws.accel(sys, t + h, &xt, &vt, &mut k4a)?;
        let k4x = &vt;
        let xm = x.as_flat_mut();
        for i in 0..len {
            xm[i] += h / 6.0 * (v.as_flat()[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
        }
        let vm = v.as_flat_mut();
        for i in 0..len {
            vm[i] += h / 6.0 * (k1a[i] + 2.0 * k2a[i] + 2.0 * k3a[i] + k4a[i]);
        }
        let t_next = if step + 1 == steps { t_end } else { (step + 1) as f64 * h };
        if !(x.is_finite() && v.is_finite()) {
            return Err(Error::NonFinite { t: t_next });
        }
        observe(t_next, &x, &v)?;
    }
    Ok((x, v))
}

/// Integrates and records every step.
pub fn integrate(sys: &ForcedSystem, x0: &Polygon, v0: &Polygon, t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate_strided(sys, x0, v0, t_end, dt, 1)
}

/// Integrates and records every `stride`-th step plus the final state.
pub fn integrate_strided(
    sys: &ForcedSystem,
    x0: &Polygon,
    v0: &Polygon,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    let stride = stride.max(1);
    let mut traj = Trajectory::new();
    let mut count = 0usize;
    let mut last_t = 0.0;
    let (x, _) = integrate_observe(sys, x0, v0, t_end, dt, |t, x, _| {
        if count % stride == 0 {
            traj.push(t, x.clone())?;
        }
        count += 1;
        last_t = t;
        Ok(())
    })?;
    if traj.times.last() != Some(&last_t) {
        traj.push(last_t, x)?;
    }
    Ok(traj.with_meta("integrator", "rk4").with_meta("dt", dt))
}

/// Final `(X, V)` only.
pub fn final_state(sys: &ForcedSystem, x0: &Polygon, v0: &Polygon, t_end: f64, dt: f64) -> Result<(Polygon, Polygon)> {
    integrate_observe(sys, x0, v0, t_end, dt, |_, _, _| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{basis_polygon_planar, eigenvalue};

    #[test]
    fn zero_data_stays_zero() {
        let z = Polygon::zeros(5, 2).unwrap();
        let traj = integrate(&ForcedSystem::homogeneous(5, 2, 1, 1.0), &z, &z, 0.5, 0.01).unwrap();
        assert_eq!(traj.len(), 51);
        assert!(traj.frames.iter().all(|f| f.sup_norm() == 0.0));
    }

    #[test]
    fn single_mode_fourth_order() {
        let n = 6;
        let x0 = basis_polygon_planar(n, 1).unwrap();
        let v0 = Polygon::zeros(n, 2).unwrap();
        let sys = ForcedSystem::homogeneous(n, 2, 1, 0.0);
        let w = (-eigenvalue(n, 1, 1).unwrap()).sqrt();
        let t = 3.0;
        let exact = x0.scaled((w * t).cos());
        let e1 = final_state(&sys, &x0, &v0, t, 1e-2).unwrap().0.sup_distance(&exact).unwrap();
        let e2 = final_state(&sys, &x0, &v0, t, 5e-3).unwrap().0.sup_distance(&exact).unwrap();
        assert!(e1 / e2 >= 12.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn backward_steps_land_on_end_time() {
        let x0 = basis_polygon_planar(5, 2).unwrap();
        let v0 = Polygon::zeros(5, 2).unwrap();
        let traj = integrate(&ForcedSystem::homogeneous(5, 2, 2, 1.0), &x0, &v0, -0.35, 0.1).unwrap();
        assert_eq!(traj.times.len(), 5);
        assert_eq!(*traj.times.last().unwrap(), -0.35);
    }

    #[test]
    fn blow_up_reports_time() {
        let x0 = Polygon::zeros(4, 2).unwrap();
        let sys = ForcedSystem {
            n: 4,
            p: 2,
            m: 1,
            beta: 0.0,
            forcing: Forcing::Additive(Box::new(|t| {
                let v = if t > 0.25 { f64::INFINITY } else { 0.0 };
                Polygon::point(4, &[v, 0.0]).unwrap()
            })),
        };
        match final_state(&sys, &x0, &x0, 1.0, 0.1) {
            Err(Error::NonFinite { t }) => assert!(t > 0.25 && t <= 0.4),
            other => panic!("unexpected {other:?}"),
        }
    }
}
