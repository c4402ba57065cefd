//! Self-similar solutions: scalings, rotations, and the (point-only)
//! translations, plus a finite-difference residual check for any of them.

use num_complex::Complex64;

use crate::error::{mismatch, Error, Result};
use crate::geometry::{decompose, Polygon};
use crate::spectral::{basis_polygon, eigenvalue, CirculantOperator};

/// Probe times for [`verify_self_similar`].
pub const PROBE_TIMES: [f64; 3] = [0.1, 0.7, 1.3];
/// Finite-difference step for [`verify_self_similar`].
pub const FD_STEP: f64 = 1e-4;
/// Relative out-of-span norm that triggers [`Error::SpanViolation`].
pub const SPAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileBranch {
    /// `g = c t + 1` (`k = 0`, `beta = 0`).
    LinearZeroMode,
    /// `g = c/beta + (1 - c/beta) e^{-beta t}` (`k = 0`, `beta > 0`).
    ExpZeroMode,
    /// `g = e^{-beta t/2} (cos(gamma t) + c sin(gamma t))`.
    UnderdampedOsc { gamma: f64 },
    /// `g = e^{r+ t} + c (e^{r- t} - e^{r+ t})`.
    OverdampedExp { r_plus: f64, r_minus: f64 },
}

/// Time profile `g` with `X(t) = g(t) X0` for `X0` in the span of modes `k`, `n - k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingProfile {
    pub n: usize,
    pub k: usize,
    pub m: u32,
    pub beta: f64,
    pub c: f64,
    pub lambda: f64,
    pub branch: ProfileBranch,
}

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::Domain(format!("damping must be finite and >= 0, got {beta}")));
    }
    Ok(())
}

fn check_half_mode(n: usize, k: usize) -> Result<()> {
    if k > n / 2 {
        return Err(Error::Domain(format!("mode {k} out of range 0..={} for n = {n}", n / 2)));
    }
    Ok(())
}

/// Scaling profile for mode `k` of an `n`-gon; the branch follows from
/// `beta` versus `2 sqrt|lambda|`.
pub fn scaling_profile(n: usize, k: usize, m: u32, beta: f64, c: f64) -> Result<ScalingProfile> {
    check_beta(beta)?;
    check_half_mode(n, k)?;
    let lambda = eigenvalue(n, m, k)?;
    let quarter = beta * beta / 4.0;
    let branch = if k == 0 {
        if beta == 0.0 {
            ProfileBranch::LinearZeroMode
        } else {
            ProfileBranch::ExpZeroMode
        }
    } else if quarter >= -lambda {
        exp_branch(beta, lambda)
    } else {
        osc_branch(beta, lambda)
    };
    Ok(ScalingProfile { n, k, m, beta, c, lambda, branch })
}

fn exp_branch(beta: f64, lambda: f64) -> ProfileBranch {
    let root = (beta * beta / 4.0 + lambda).max(0.0).sqrt();
    ProfileBranch::OverdampedExp { r_plus: -beta / 2.0 + root, r_minus: -beta / 2.0 - root }
}

fn osc_branch(beta: f64, lambda: f64) -> ProfileBranch {
    ProfileBranch::UnderdampedOsc { gamma: (-lambda - beta * beta / 4.0).max(0.0).sqrt() }
}

impl ScalingProfile {
    /// Same profile evaluated with the other nonzero-mode formula; only
    /// meaningful near `beta = 2 sqrt|lambda|`, where both branches meet.
    pub fn with_alternate_branch(&self) -> Result<Self> {
        let branch = match self.branch {
            ProfileBranch::UnderdampedOsc { .. } => exp_branch(self.beta, self.lambda),
            ProfileBranch::OverdampedExp { .. } => osc_branch(self.beta, self.lambda),
            _ => return Err(Error::Domain("the zero mode has a single scaling branch".into())),
        };
        Ok(ScalingProfile { branch, ..*self })
    }

    pub fn g(&self, t: f64) -> f64 {
        let c = self.c;
        match self.branch {
            ProfileBranch::LinearZeroMode => c * t + 1.0,
            ProfileBranch::ExpZeroMode => {
                let b = self.beta;
                c / b + (1.0 - c / b) * (-b * t).exp()
            }
            ProfileBranch::UnderdampedOsc { gamma } => {
                (-self.beta * t / 2.0).exp() * ((gamma * t).cos() + c * (gamma * t).sin())
            }
            ProfileBranch::OverdampedExp { r_plus, r_minus } => {
                let ep = (r_plus * t).exp();
                ep + c * ((r_minus * t).exp() - ep)
            }
        }
    }
}

/// A rigid rotation at rate `sign * sqrt(-lambda_{m,k})` in the coordinate
/// plane `(plane.0, plane.1)` (0-based axes) of `R^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotator {
    pub n: usize,
    pub k: usize,
    pub m: u32,
    pub sign: i8,
    pub p: usize,
    pub plane: (usize, usize),
    /// Mixing constants of `P_k` and `P_{n-k}` (planar case).
    pub c1: Complex64,
    pub c2: Complex64,
    pub rate: f64,
    initial: Polygon,
}

fn rotator_checks(n: usize, k: usize, beta: f64, sign: i8) -> Result<()> {
    check_beta(beta)?;
    if beta > 0.0 {
        return Err(Error::NoSuchSolution(format!(
            "with damping {beta} > 0 the only rotating solution is the stationary point"
        )));
    }
    if k == 0 {
        return Err(Error::TrivialMode);
    }
    check_half_mode(n, k)?;
    if sign != 1 && sign != -1 {
        return Err(Error::Domain(format!("rotation sign must be +1 or -1, got {sign}")));
    }
    Ok(())
}

/// Planar rotator `(c1 P_k + c2 P_{n-k}) R(sign sqrt(-lambda) t)` with
/// `c1 = 1`, `c2 = 0`; see [`Rotator::with_mix`].
pub fn planar_rotator(n: usize, m: u32, beta: f64, k: usize, sign: i8) -> Result<Rotator> {
    rotator_checks(n, k, beta, sign)?;
    let rate = f64::from(sign) * (-eigenvalue(n, m, k)?).sqrt();
    let mut r = Rotator {
        n,
        k,
        m,
        sign,
        p: 2,
        plane: (0, 1),
        c1: Complex64::new(1.0, 0.0),
        c2: Complex64::new(0.0, 0.0),
        rate,
        initial: Polygon::zeros(n, 2)?,
    };
    r.initial = r.planar_initial()?;
    Ok(r)
}

/// Rotator in `R^p` whose initial polygon carries `c_k` on axis `plane.0`
/// and `s_k` on axis `plane.1`.
pub fn subplane_rotator(n: usize, m: u32, beta: f64, k: usize, plane: (usize, usize), p: usize, sign: i8) -> Result<Rotator> {
    rotator_checks(n, k, beta, sign)?;
    let (i, j) = plane;
    if !(i < j && j < p) {
        return Err(Error::Domain(format!("axes must satisfy 0 <= i < j < p = {p}, got ({i}, {j})")));
    }
    let rate = f64::from(sign) * (-eigenvalue(n, m, k)?).sqrt();
    let z = basis_polygon(n, k);
    let mut coords = vec![0.0; n * p];
    for (v, zv) in z.iter().enumerate() {
        coords[v * p + i] = zv.re;
        coords[v * p + j] = zv.im;
    }
    Ok(Rotator {
        n,
        k,
        m,
        sign,
        p,
        plane,
        c1: Complex64::new(1.0, 0.0),
        c2: Complex64::new(0.0, 0.0),
        rate,
        initial: Polygon::from_flat(n, p, coords)?,
    })
}

impl Rotator {
    fn planar_initial(&self) -> Result<Polygon> {
        let a = basis_polygon(self.n, self.k);
        let b = basis_polygon(self.n, (self.n - self.k) % self.n);
        let z: Vec<Complex64> = a.iter().zip(&b).map(|(u, v)| self.c1 * u + self.c2 * v).collect();
        Polygon::from_complex(&z)
    }

    /// Planar rotator with new mixing constants.
    pub fn with_mix(mut self, c1: Complex64, c2: Complex64) -> Result<Self> {
        if self.p != 2 {
            return Err(Error::Domain("mixing constants apply to planar rotators".into()));
        }
        self.c1 = c1;
        self.c2 = c2;
        self.initial = self.planar_initial()?;
        Ok(self)
    }

    pub fn initial(&self) -> &Polygon {
        &self.initial
    }

    /// Rotation angle `f(t)`.
    pub fn angle(&self, t: f64) -> f64 {
        self.rate * t
    }

    pub fn evaluate(&self, t: f64) -> Result<Polygon> {
        self.apply(&self.initial, t)
    }
}

/// Rotates every vertex by `theta` in the plane of axes `(i, j)`, using the
/// row-vector convention `x -> x R` with `R = [[cos, sin], [-sin, cos]]`.
pub fn rotate_in_plane(x: &Polygon, plane: (usize, usize), theta: f64) -> Result<Polygon> {
    let (i, j) = plane;
    let p = x.dim();
    if i >= p || j >= p || i == j {
        return Err(Error::Domain(format!("invalid rotation plane ({i}, {j}) for p = {p}")));
    }
    let (s, c) = theta.sin_cos();
    let mut coords = x.as_flat().to_vec();
    for v in coords.chunks_mut(p) {
        let (a, b) = (v[i], v[j]);
        v[i] = a * c - b * s;
        v[j] = a * s + b * c;
    }
    Polygon::from_flat(x.n(), p, coords)
}

/// Point path `h(t) d` for a translating point.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslatorPath {
    pub beta: f64,
    pub direction: Vec<f64>,
}

impl TranslatorPath {
    /// `t` for `beta = 0`, `(1 - e^{-beta t}) / beta` otherwise.
    pub fn h(&self, t: f64) -> f64 {
        if self.beta == 0.0 {
            t
        } else {
            -(-self.beta * t).exp_m1() / self.beta
        }
    }

    pub fn displacement(&self, t: f64) -> Vec<f64> {
        let h = self.h(t);
        self.direction.iter().map(|d| d * h).collect()
    }
}

pub const TRANSLATOR_STATEMENT: &str =
    "no nontrivial polygon evolves by pure translation; only single points translate";

#[derive(Debug, Clone, PartialEq)]
pub struct TranslatorReport {
    pub statement: &'static str,
    pub path: TranslatorPath,
}

/// The translation result for damping `beta`, with the point path along `direction`.
pub fn translator_check(beta: f64, direction: Vec<f64>) -> Result<TranslatorReport> {
    check_beta(beta)?;
    Ok(TranslatorReport { statement: TRANSLATOR_STATEMENT, path: TranslatorPath { beta, direction } })
}

/// Accepts `x0` as a translator only if it is a single point.
pub fn propose_translator(x0: &Polygon, direction: Vec<f64>, beta: f64) -> Result<TranslatorPath> {
    check_beta(beta)?;
    if direction.len() != x0.dim() {
        return Err(mismatch(format!("direction in R^{}", x0.dim()), direction.len()));
    }
    let scale = 1.0 + x0.sup_norm();
    if x0.diameter() > 1e-12 * scale {
        return Err(Error::NoSuchSolution(format!(
            "polygon with diameter {:e} is not a single point; {TRANSLATOR_STATEMENT}",
            x0.diameter()
        )));
    }
    Ok(TranslatorPath { beta, direction })
}

/// A motion `t -> X(t)` generated from an initial polygon.
pub trait SelfSimilarMotion {
    fn apply(&self, x0: &Polygon, t: f64) -> Result<Polygon>;
    fn order(&self) -> u32;
    fn damping(&self) -> f64;
    /// Mode whose pair must contain `x0`, if the motion requires one.
    fn mode(&self) -> Option<usize>;
}

impl SelfSimilarMotion for ScalingProfile {
    fn apply(&self, x0: &Polygon, t: f64) -> Result<Polygon> {
        Ok(x0.scaled(self.g(t)))
    }
    fn order(&self) -> u32 {
        self.m
    }
    fn damping(&self) -> f64 {
        self.beta
    }
    fn mode(&self) -> Option<usize> {
        Some(self.k)
    }
}

impl SelfSimilarMotion for Rotator {
    fn apply(&self, x0: &Polygon, t: f64) -> Result<Polygon> {
        rotate_in_plane(x0, self.plane, self.angle(t))
    }
    fn order(&self) -> u32 {
        self.m
    }
    fn damping(&self) -> f64 {
        0.0
    }
    fn mode(&self) -> Option<usize> {
        Some(self.k)
    }
}

/// Translation ansatz; carries its own operator order.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationAnsatz {
    pub path: TranslatorPath,
    pub m: u32,
}

impl SelfSimilarMotion for TranslationAnsatz {
    fn apply(&self, x0: &Polygon, t: f64) -> Result<Polygon> {
        let d = self.path.displacement(t);
        let shift = Polygon::point(x0.n(), &d)?;
        Ok(x0 + &shift)
    }
    fn order(&self) -> u32 {
        self.m
    }
    fn damping(&self) -> f64 {
        self.path.beta
    }
    fn mode(&self) -> Option<usize> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// `(t, ||X'' + beta X' - L X||_inf)` at each probe time.
    pub samples: Vec<(f64, f64)>,
    pub max: f64,
}

/// Fails with [`Error::SpanViolation`] when `x0` has relative norm above
/// [`SPAN_TOL`] outside modes `k`, `n - k`.
pub fn check_span(x0: &Polygon, k: usize) -> Result<()> {
    check_half_mode(x0.n(), k)?;
    let spec = decompose(x0);
    let total: f64 = (0..spec.blocks.len()).map(|j| spec.mass(j)).sum();
    let outside: f64 = (0..spec.blocks.len()).filter(|j| *j != k).map(|j| spec.mass(j)).sum();
    if total > 0.0 && (outside / total).sqrt() > SPAN_TOL {
        return Err(Error::SpanViolation { k, mass: outside });
    }
    Ok(())
}

/// Residual of the motion in the flow equation with its own damping.
pub fn verify_self_similar(x0: &Polygon, motion: &dyn SelfSimilarMotion) -> Result<ResidualReport> {
    verify_with_damping(x0, motion, motion.damping())
}

/// Residual of the motion in the flow equation with damping `beta`, from
/// fourth-order central differences in time.
pub fn verify_with_damping(x0: &Polygon, motion: &dyn SelfSimilarMotion, beta: f64) -> Result<ResidualReport> {
    if let Some(k) = motion.mode() {
        check_span(x0, k)?;
    }
    let op = CirculantOperator::new(x0.n(), motion.order())?;
    let h = FD_STEP;
    let mut samples = Vec::with_capacity(PROBE_TIMES.len());
    for &t in &PROBE_TIMES {
        let at = |s: f64| motion.apply(x0, t + s * h);
        let (m2, m1, c0, p1, p2) = (at(-2.0)?, at(-1.0)?, at(0.0)?, at(1.0)?, at(2.0)?);
        let lx = op.apply(&c0)?;
        let mut worst: f64 = 0.0;
        for i in 0..c0.as_flat().len() {
            let f = |x: &Polygon| x.as_flat()[i];
            let d1 = (-f(&p2) + 8.0 * f(&p1) - 8.0 * f(&m1) + f(&m2)) / (12.0 * h);
            let d2 = (-f(&p2) + 16.0 * f(&p1) - 30.0 * f(&c0) + 16.0 * f(&m1) - f(&m2)) / (12.0 * h * h);
            worst = worst.max((d2 + beta * d1 - lx.as_flat()[i]).abs());
        }
        samples.push((t, worst));
    }
    let max = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(ResidualReport { samples, max })
}
