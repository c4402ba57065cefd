//! Moving targets: each mode obeys `a'' + beta a' = lambda (a - y(t))`,
//! solved as a homogeneous part plus a Green's-function integral evaluated
//! by composite Simpson quadrature.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flow::{classify, DampingRegime, ModeCoefficient, ModeSolution, Representation};
use crate::geometry::io::SampledFrames;
use crate::geometry::{CodimBlock, Polygon};
use crate::spectral::EigenvalueTable;
use crate::trajectory::Trajectory;

pub const DEFAULT_QUADRATURE_STEP: f64 = 1e-3;

/// Homogeneous solution pair and Green's kernel of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensKernel {
    pub k: usize,
    pub regime: DampingRegime,
}

impl GreensKernel {
    pub fn new(k: usize, lambda: f64, beta: f64) -> Result<Self> {
        Ok(GreensKernel { k, regime: classify(lambda, beta)? })
    }

    /// Independent homogeneous solutions `(y1, y2)` and their derivatives.
    pub fn pair(&self, t: f64) -> ((f64, f64), (f64, f64)) {
        match self.regime {
            DampingRegime::ZeroModeUndamped => ((1.0, t), (0.0, 1.0)),
            DampingRegime::ZeroMode { beta } => {
                let e = (-beta * t).exp();
                ((1.0, e), (0.0, -beta * e))
            }
            DampingRegime::Overdamped { r_plus, r_minus } => {
                let (a, b) = ((r_minus * t).exp(), (r_plus * t).exp());
                ((a, b), (r_minus * a, r_plus * b))
            }
            DampingRegime::Critical { beta } => {
                let e = (-beta * t / 2.0).exp();
                ((e, t * e), (-beta / 2.0 * e, e * (1.0 - beta * t / 2.0)))
            }
            DampingRegime::Underdamped { beta, gamma } => {
                let e = (-beta * t / 2.0).exp();
                let (s, c) = (gamma * t).sin_cos();
                ((e * c, e * s), (e * (-beta / 2.0 * c - gamma * s), e * (-beta / 2.0 * s + gamma * c)))
            }
        }
    }

    /// `det W(t) = y1 y2' - y1' y2`.
    pub fn wronskian(&self, t: f64) -> f64 {
        let ((y1, y2), (d1, d2)) = self.pair(t);
        y1 * d2 - d1 * y2
    }

    /// Closed form of [`Self::wronskian`].
    pub fn wronskian_exact(&self, t: f64) -> f64 {
        match self.regime {
            DampingRegime::ZeroModeUndamped => 1.0,
            DampingRegime::ZeroMode { beta } => -beta * (-beta * t).exp(),
            DampingRegime::Overdamped { r_plus, r_minus } => (r_plus - r_minus) * ((r_plus + r_minus) * t).exp(),
            DampingRegime::Critical { beta } => (-beta * t).exp(),
            DampingRegime::Underdamped { beta, gamma } => gamma * (-beta * t).exp(),
        }
    }

    /// `G(x, t) = [y1(x) y2(t) - y1(t) y2(x)] / det W(x)`, which depends on `t - x` only.
    pub fn green(&self, x: f64, t: f64) -> f64 {
        let ((a1, a2), _) = self.pair(x);
        let ((b1, b2), _) = self.pair(t);
        (a1 * b2 - b1 * a2) / self.wronskian_exact(x)
    }

    /// `K(s) = G(0, s)`: the homogeneous solution with `K(0) = 0`, `K'(0) = 1`.
    pub fn kernel(&self, s: f64) -> f64 {
        let (_, g) = self.regime.multipliers(s);
        let (_, dg) = self.regime.multiplier_derivatives(0.0);
        g / dg
    }
}

/// A target polygon that moves in time.
#[derive(Clone)]
pub enum MovingTarget {
    /// Closed form; mode coefficients are taken from the polygon at each node.
    ClosedForm(Arc<dyn Fn(f64) -> Polygon + Send + Sync>),
    /// Uniformly sampled frames, interpolated linearly in mode space and
    /// held constant past the last frame.
    Sampled(SampledFrames),
}

impl std::fmt::Debug for MovingTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MovingTarget::ClosedForm(_) => f.write_str("ClosedForm(..)"),
            MovingTarget::Sampled(s) => write!(f, "Sampled({} frames, dt = {})", s.frames.len(), s.dt),
        }
    }
}

impl MovingTarget {
    pub fn closed_form(f: impl Fn(f64) -> Polygon + Send + Sync + 'static) -> Self {
        MovingTarget::ClosedForm(Arc::new(f))
    }

    pub fn constant(y: Polygon) -> Self {
        Self::closed_form(move |_| y.clone())
    }

    /// Target polygon at `t`.
    pub fn at(&self, t: f64) -> Result<Polygon> {
        match self {
            MovingTarget::ClosedForm(f) => Ok(f(t)),
            MovingTarget::Sampled(s) => {
                let (i, w) = frame_position(s, t)?;
                if w == 0.0 {
                    return Ok(s.frames[i].clone());
                }
                Ok(&s.frames[i].scaled(1.0 - w) + &s.frames[i + 1].scaled(w))
            }
        }
    }

    fn shape(&self) -> Result<(usize, usize)> {
        let y = self.at(0.0)?;
        Ok((y.n(), y.dim()))
    }
}

/// Frame index and interpolation weight toward the next frame.
fn frame_position(s: &SampledFrames, t: f64) -> Result<(usize, f64)> {
    if s.frames.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let pos = (t / s.dt).max(0.0);
    let last = s.frames.len() - 1;
    if pos >= last as f64 {
        return Ok((last, 0.0));
    }
    let i = pos.floor() as usize;
    Ok((i, pos - i as f64))
}

/// How the homogeneous constants of each mode are fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum Closure {
    /// Initial velocity `V0`.
    InitialVelocity(Polygon),
    /// State `X1` at time `t1 > 0`.
    TwoPoint { x1: Polygon, t1: f64 },
}

enum TargetCoeffs<C> {
    ClosedForm(Arc<dyn Fn(f64) -> Polygon + Send + Sync>),
    Sampled { dt: f64, coeffs: Vec<Vec<C>> },
}

struct Engine<C> {
    homogeneous: Vec<ModeSolution<C>>,
    kernels: Vec<GreensKernel>,
    target: TargetCoeffs<C>,
}

impl<C: ModeCoefficient> Engine<C> {
    fn target_coeffs(&self, t: f64) -> Result<Vec<C>> {
        match &self.target {
            TargetCoeffs::ClosedForm(f) => C::analyze(&f(t)),
            TargetCoeffs::Sampled { dt, coeffs } => {
                let pos = (t / dt).max(0.0);
                let last = coeffs.len() - 1;
                if pos >= last as f64 {
                    return Ok(coeffs[last].clone());
                }
                let i = pos.floor() as usize;
                let w = pos - i as f64;
                Ok(coeffs[i].iter().zip(&coeffs[i + 1]).map(|(a, b)| a.clone() * (1.0 - w) + b.clone() * w).collect())
            }
        }
    }

    /// `int_0^t K(t - x) (-lambda) y(x) dx` for every mode, by Simpson's rule.
    fn particular(&self, t: f64, h: f64) -> Result<Vec<C>> {
        if t < 0.0 {
            return Err(Error::Domain(format!("moving-target solutions run forward only, got t = {t}")));
        }
        let zero = self.homogeneous[0].c_init.zero_like();
        let mut acc = vec![zero; self.homogeneous.len()];
        if t == 0.0 {
            return Ok(acc);
        }
        if h > t / 16.0 {
            return Err(Error::QuadratureStep { h, t });
        }
        let mut intervals = (t / h).ceil() as usize;
        intervals += intervals % 2;
        let step = t / intervals as f64;
        for i in 0..=intervals {
            let x = i as f64 * step;
            let w = if i == 0 || i == intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let y = self.target_coeffs(x)?;
            for (k, (a, yk)) in acc.iter_mut().zip(y).enumerate() {
                let lambda = self.homogeneous[k].lambda;
                if lambda == 0.0 {
                    continue;
                }
                let factor = w * step / 3.0 * self.kernels[k].kernel(t - x) * -lambda;
                *a = a.clone() + yk * factor;
            }
        }
        Ok(acc)
    }

    fn evaluate(&self, n: usize, p: usize, t: f64, h: f64) -> Result<Polygon> {
        let part = self.particular(t, h)?;
        let coeffs: Vec<C> = self.homogeneous.iter().zip(part).map(|(s, u)| s.evaluate(t) + u).collect();
        C::synthesize(n, p, &coeffs)
    }
}

fn build_engine<C: ModeCoefficient>(
    x0: &Polygon,
    target: &MovingTarget,
    m: u32,
    beta: f64,
    closure: &Closure,
    h: f64,
) -> Result<Engine<C>> {
    let table = EigenvalueTable::new(x0.n(), m)?;
    let init = C::analyze(x0)?;
    let kernels = (0..init.len())
        .map(|k| GreensKernel::new(k, table.get(k), beta))
        .collect::<Result<Vec<_>>>()?;
    let target = match target {
        MovingTarget::ClosedForm(f) => TargetCoeffs::ClosedForm(f.clone()),
        MovingTarget::Sampled(s) => TargetCoeffs::Sampled {
            dt: s.dt,
            coeffs: s.frames.iter().map(|f| C::analyze(f)).collect::<Result<Vec<_>>>()?,
        },
    };
    let mut engine = Engine { homogeneous: Vec::new(), kernels, target };
    engine.homogeneous = match closure {
        Closure::InitialVelocity(v0) => {
            x0.check_same_shape(v0)?;
            init.into_iter()
                .zip(C::analyze(v0)?)
                .enumerate()
                .map(|(k, (c, v))| ModeSolution::from_velocity(k, table.get(k), beta, c, v))
                .collect::<Result<Vec<_>>>()?
        }
        Closure::TwoPoint { x1, t1 } => {
            x0.check_same_shape(x1)?;
            if !(*t1 > 0.0 && t1.is_finite()) {
                return Err(Error::Domain(format!("second time must be positive, got {t1}")));
            }
            // the particular part vanishes at t = 0 but not at t1
            let provisional: Vec<ModeSolution<C>> = init
                .iter()
                .enumerate()
                .map(|(k, c)| ModeSolution::new(k, table.get(k), beta, c.clone(), c.zero_like()))
                .collect::<Result<Vec<_>>>()?;
            engine.homogeneous = provisional;
            let part = engine.particular(*t1, h)?;
            init.into_iter()
                .zip(C::analyze(x1)?)
                .zip(part)
                .enumerate()
                .map(|(k, ((c, y), u))| ModeSolution::from_two_point(k, table.get(k), beta, c, y - u, *t1))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(engine)
}

enum Engines {
    Planar(Engine<Complex64>),
    Real(Engine<CodimBlock>),
}

/// Moving-target solution evaluable for `t >= 0`.
pub struct MovingTargetSolution {
    n: usize,
    p: usize,
    h: f64,
    target: MovingTarget,
    engine: Engines,
}

impl std::fmt::Debug for MovingTargetSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MovingTargetSolution")
            .field("n", &self.n)
            .field("p", &self.p)
            .field("h", &self.h)
            .field("target", &self.target)
            .finish_non_exhaustive()
    }
}

/// Solves the moving-target flow with quadrature step `h`.
pub fn greens_solve_moving_target(
    x0: &Polygon,
    target: MovingTarget,
    m: u32,
    beta: f64,
    closure: Closure,
    h: f64,
) -> Result<MovingTargetSolution> {
    greens_solve_moving_target_in(x0, target, m, beta, closure, h, Representation::Auto)
}

pub fn greens_solve_moving_target_in(
    x0: &Polygon,
    target: MovingTarget,
    m: u32,
    beta: f64,
    closure: Closure,
    h: f64,
    repr: Representation,
) -> Result<MovingTargetSolution> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::Domain(format!("damping must be finite and >= 0, got {beta}")));
    }
    if beta == 0.0 {
        return Err(Error::NonConvergentMode { beta });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("quadrature step must be positive, got {h}")));
    }
    let (n, p) = target.shape()?;
    if (n, p) != (x0.n(), x0.dim()) {
        return Err(crate::error::mismatch(format!("{}x{} target", x0.n(), x0.dim()), format!("{n}x{p}")));
    }
    let planar = match repr {
        Representation::Auto => p == 2,
        Representation::Complex => true,
        Representation::Real => false,
    };
    let engine = if planar {
        Engines::Planar(build_engine(x0, &target, m, beta, &closure, h)?)
    } else {
        Engines::Real(build_engine(x0, &target, m, beta, &closure, h)?)
    };
    Ok(MovingTargetSolution { n, p, h, target, engine })
}

impl MovingTargetSolution {
    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn target_at(&self, t: f64) -> Result<Polygon> {
        self.target.at(t)
    }

    pub fn evaluate(&self, t: f64) -> Result<Polygon> {
        match &self.engine {
            Engines::Planar(e) => e.evaluate(self.n, self.p, t, self.h),
            Engines::Real(e) => e.evaluate(self.n, self.p, t, self.h),
        }
    }

    /// `(t, ||X(t) - Y(t)||_inf)` at each time.
    pub fn distance_series(&self, times: &[f64]) -> Result<Vec<(f64, f64)>> {
        times
            .iter()
            .map(|t| Ok((*t, self.evaluate(*t)?.sup_distance(&self.target_at(*t)?)?)))
            .collect()
    }

    pub fn sample(&self, times: &[f64]) -> Result<Trajectory> {
        let frames = times.iter().map(|t| self.evaluate(*t)).collect::<Result<Vec<_>>>()?;
        Trajectory::from_samples(times.to_vec(), frames)
    }
}
