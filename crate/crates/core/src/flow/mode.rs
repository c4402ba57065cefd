//! Closed-form solutions of the scalar mode equation
//! `a'' + beta a' = lambda a` in every damping regime.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{decompose, reconstruct, CodimBlock, CodimSpectrum, Polygon};
use crate::spectral::{dft, idft, partner};

/// Relative width of the band around `lambda = -beta^2/4` treated as critical.
pub const CRITICAL_REL_TOL: f64 = 1e-9;
/// Normalised free-constant coefficient below which a two-point problem is singular.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Largest exponent accepted before evaluation reports a range error.
pub const MAX_EXPONENT: f64 = 700.0;

/// Behaviour of one mode, with the rates needed to evaluate it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DampingRegime {
    /// `lambda = 0`, `beta = 0`: linear drift.
    ZeroModeUndamped,
    /// `lambda = 0`, `beta > 0`: saturating exponential.
    ZeroMode { beta: f64 },
    /// `|lambda| < beta^2/4`: two real decay rates `r_minus < r_plus < 0`.
    Overdamped { r_plus: f64, r_minus: f64 },
    /// `lambda = -beta^2/4`: double rate `-beta/2`.
    Critical { beta: f64 },
    /// `|lambda| > beta^2/4`: envelope `exp(-beta t / 2)`, frequency `gamma`.
    Underdamped { beta: f64, gamma: f64 },
}

/// Selects the regime for eigenvalue `lambda <= 0` and damping `beta >= 0`.
pub fn classify(lambda: f64, beta: f64) -> Result<DampingRegime> {
    if !lambda.is_finite() || lambda > 0.0 {
        return Err(Error::Domain(format!("eigenvalue must be finite and <= 0, got {lambda}")));
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::Domain(format!("damping must be finite and >= 0, got {beta}")));
    }
    if lambda == 0.0 {
        return Ok(if beta == 0.0 {
            DampingRegime::ZeroModeUndamped
        } else {
            DampingRegime::ZeroMode { beta }
        });
    }
    let quarter = beta * beta / 4.0;
    if (lambda + quarter).abs() <= CRITICAL_REL_TOL * lambda.abs().max(quarter) {
        return Ok(DampingRegime::Critical { beta });
    }
    if -lambda < quarter {
        let root = (quarter + lambda).sqrt();
        let r_minus = -beta / 2.0 - root;
        // r_plus * r_minus = -lambda; avoids cancellation in -beta/2 + root
        let r_plus = -lambda / r_minus;
        Ok(DampingRegime::Overdamped { r_plus, r_minus })
    } else {
        Ok(DampingRegime::Underdamped { beta, gamma: (-lambda - quarter).sqrt() })
    }
}

impl DampingRegime {
    /// Multipliers `(h, g)` of the initial and free constants at time `t`,
    /// so that the mode value is `c_init h(t) + c_free g(t)`, with `h(0) = 1`, `g(0) = 0`.
    pub fn multipliers(&self, t: f64) -> (f64, f64) {
        self.scaled_multipliers(t, 0.0)
    }

    /// [`Self::multipliers`] times `exp(log_scale)`, folded into the exponents.
    pub fn scaled_multipliers(&self, t: f64, log_scale: f64) -> (f64, f64) {
        match *self {
            DampingRegime::ZeroModeUndamped => {
                let s = log_scale.exp();
                (s, t * s)
            }
            DampingRegime::ZeroMode { beta } => {
                let s = log_scale.exp();
                (s, -(-beta * t).exp_m1() / beta * s)
            }
            DampingRegime::Overdamped { r_plus, r_minus } => {
                let ep = (r_plus * t + log_scale).exp();
                let em = (r_minus * t + log_scale).exp();
                (ep, em - ep)
            }
            DampingRegime::Critical { beta } => {
                let e = (-beta * t / 2.0 + log_scale).exp();
                (e, t * e)
            }
            DampingRegime::Underdamped { beta, gamma } => {
                let e = (-beta * t / 2.0 + log_scale).exp();
                let (s, c) = (gamma * t).sin_cos();
                (e * c, e * s)
            }
        }
    }

    /// Time derivatives `(h'(t), g'(t))`.
    pub fn multiplier_derivatives(&self, t: f64) -> (f64, f64) {
        match *self {
            DampingRegime::ZeroModeUndamped => (0.0, 1.0),
            DampingRegime::ZeroMode { beta } => (0.0, (-beta * t).exp()),
            DampingRegime::Overdamped { r_plus, r_minus } => {
                let ep = (r_plus * t).exp();
                let em = (r_minus * t).exp();
                (r_plus * ep, r_minus * em - r_plus * ep)
            }
            DampingRegime::Critical { beta } => {
                let e = (-beta * t / 2.0).exp();
                (-beta / 2.0 * e, e * (1.0 - beta * t / 2.0))
            }
            DampingRegime::Underdamped { beta, gamma } => {
                let e = (-beta * t / 2.0).exp();
                let (s, c) = (gamma * t).sin_cos();
                (e * (-beta / 2.0 * c - gamma * s), e * (-beta / 2.0 * s + gamma * c))
            }
        }
    }

    /// Largest exponent argument used when evaluating at `t`.
    pub fn max_exponent(&self, t: f64) -> f64 {
        match *self {
            DampingRegime::ZeroModeUndamped => 0.0,
            DampingRegime::ZeroMode { beta } => -beta * t,
            DampingRegime::Overdamped { r_plus, r_minus } => (r_plus * t).max(r_minus * t),
            DampingRegime::Critical { beta } | DampingRegime::Underdamped { beta, .. } => -beta * t / 2.0,
        }
    }

    /// Slowest exponential rate present in the mode (0 for translation modes).
    pub fn slowest_rate(&self) -> f64 {
        match *self {
            DampingRegime::ZeroModeUndamped | DampingRegime::ZeroMode { .. } => 0.0,
            DampingRegime::Overdamped { r_plus, .. } => r_plus,
            DampingRegime::Critical { beta } | DampingRegime::Underdamped { beta, .. } => -beta / 2.0,
        }
    }

    /// Size of the decaying envelope at `t`, used to normalise the
    /// two-point singularity test.
    fn envelope(&self, t: f64) -> f64 {
        match *self {
            DampingRegime::ZeroModeUndamped | DampingRegime::ZeroMode { .. } => 1.0,
            DampingRegime::Overdamped { r_plus, .. } => (r_plus * t).exp(),
            DampingRegime::Critical { beta } | DampingRegime::Underdamped { beta, .. } => (-beta * t / 2.0).exp(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DampingRegime::ZeroModeUndamped => "zero-mode-undamped",
            DampingRegime::ZeroMode { .. } => "zero-mode",
            DampingRegime::Overdamped { .. } => "overdamped",
            DampingRegime::Critical { .. } => "critical",
            DampingRegime::Underdamped { .. } => "underdamped",
        }
    }
}

/// Coefficient of one mode: complex for planar polygons, a `2 x p` real
/// block for the cosine/sine basis. Each type also knows how to move a
/// polygon into and out of its own basis.
pub trait ModeCoefficient:
    Clone + std::fmt::Debug + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero_like(&self) -> Self;
    fn norm_sqr(&self) -> f64;
    /// Coefficients of `x`, one per mode of this basis.
    fn analyze(x: &Polygon) -> Result<Vec<Self>>;
    fn synthesize(n: usize, p: usize, coeffs: &[Self]) -> Result<Polygon>;
    /// Number of modes for an `n`-gon.
    fn mode_count(n: usize) -> usize;
    /// Mode indices sharing the eigenvalue of mode `k` (including `k`).
    fn pair(n: usize, k: usize) -> Vec<usize>;
}

impl ModeCoefficient for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn norm_sqr(&self) -> f64 {
        Complex64::norm_sqr(self)
    }

    fn analyze(x: &Polygon) -> Result<Vec<Self>> {
        Ok(dft(&x.to_complex()?).coeffs)
    }

    fn synthesize(_n: usize, _p: usize, coeffs: &[Self]) -> Result<Polygon> {
        Polygon::from_complex(&idft(&crate::spectral::ModeSpectrum { coeffs: coeffs.to_vec() }))
    }

    fn mode_count(n: usize) -> usize {
        n
    }

    fn pair(n: usize, k: usize) -> Vec<usize> {
        let q = partner(n, k);
        if q == k {
            vec![k]
        } else {
            vec![k.min(q), k.max(q)]
        }
    }
}

impl ModeCoefficient for CodimBlock {
    fn zero_like(&self) -> Self {
        CodimBlock::zeros(self.dim())
    }

    fn norm_sqr(&self) -> f64 {
        CodimBlock::norm_sqr(self)
    }

    fn analyze(x: &Polygon) -> Result<Vec<Self>> {
        Ok(decompose(x).blocks)
    }

    fn synthesize(n: usize, p: usize, coeffs: &[Self]) -> Result<Polygon> {
        reconstruct(&CodimSpectrum { n, p, blocks: coeffs.to_vec() })
    }

    fn mode_count(n: usize) -> usize {
        n / 2 + 1
    }

    fn pair(_n: usize, k: usize) -> Vec<usize> {
        vec![k]
    }
}

/// Closed-form time law of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution<C> {
    pub k: usize,
    pub lambda: f64,
    pub regime: DampingRegime,
    /// Value at `t = 0`.
    pub c_init: C,
    /// The free constant (`a_k`, or `b_ik` for sine rows).
    pub c_free: C,
}

impl<C: ModeCoefficient> ModeSolution<C> {
    pub fn new(k: usize, lambda: f64, beta: f64, c_init: C, c_free: C) -> Result<Self> {
        Ok(ModeSolution { k, lambda, regime: classify(lambda, beta)?, c_init, c_free })
    }

    /// Fixes the free constant from the initial velocity `v0`.
    pub fn from_velocity(k: usize, lambda: f64, beta: f64, c_init: C, v0: C) -> Result<Self> {
        let regime = classify(lambda, beta)?;
        let (dh, dg) = regime.multiplier_derivatives(0.0);
        let c_free = (v0 - c_init.clone() * dh) * (1.0 / dg);
        Ok(ModeSolution { k, lambda, regime, c_init, c_free })
    }

    /// Fixes the free constant so that the mode takes `c_target` at `t1`.
    ///
    /// When the free constant's multiplier vanishes at `t1` the problem is
    /// singular unless `c_target` is already reached, in which case the
    /// free constant is set to zero.
    pub fn from_two_point(k: usize, lambda: f64, beta: f64, c_init: C, c_target: C, t1: f64) -> Result<Self> {
        let regime = classify(lambda, beta)?;
        let (h, g) = regime.multipliers(t1);
        let residual = c_target.clone() - c_init.clone() * h;
        let c_free = if g.abs() < SINGULAR_TOL * regime.envelope(t1) {
            let scale = 1.0 + c_target.norm_sqr().sqrt() + c_init.norm_sqr().sqrt();
            if residual.norm_sqr().sqrt() > SINGULAR_TOL * scale {
                return Err(Error::SingularBoundary { mode: k, coefficient: g });
            }
            residual.zero_like()
        } else {
            residual * (1.0 / g)
        };
        Ok(ModeSolution { k, lambda, regime, c_init, c_free })
    }

    pub fn evaluate(&self, t: f64) -> C {
        let (h, g) = self.regime.multipliers(t);
        self.c_init.clone() * h + self.c_free.clone() * g
    }

    /// `exp(log_scale) * evaluate(t)`, without forming the scale factor.
    pub fn evaluate_scaled(&self, t: f64, log_scale: f64) -> C {
        let (h, g) = self.regime.scaled_multipliers(t, log_scale);
        self.c_init.clone() * h + self.c_free.clone() * g
    }

    pub fn derivative(&self, t: f64) -> C {
        let (dh, dg) = self.regime.multiplier_derivatives(t);
        self.c_init.clone() * dh + self.c_free.clone() * dg
    }
}

/// Free-function form of [`ModeSolution::evaluate`].
pub fn mode_evaluate<C: ModeCoefficient>(s: &ModeSolution<C>, t: f64) -> C {
    s.evaluate(t)
}
