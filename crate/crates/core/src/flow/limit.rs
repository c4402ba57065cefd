//! Dominant-mode selection and the rescaled limit shape for damped flows.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flow::mode::{DampingRegime, ModeCoefficient, ModeSolution};
use crate::flow::{FlowSolution, Modes};
use crate::geometry::{CodimBlock, CodimSpectrum, Polygon};
use crate::spectral::ModeSpectrum;

/// Relative mass a mode pair needs to count as present.
pub const DOMINANCE_THRESHOLD: f64 = 1e-12;
const POINT_MASS_FLOOR: f64 = 1e-26;

/// Anything with a per-pair coefficient mass.
pub trait ModalMass {
    fn vertex_count(&self) -> usize;
    /// Combined mass of modes `k` and `n - k`.
    fn pair_mass(&self, k: usize) -> f64;
}

impl ModalMass for ModeSpectrum {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    fn pair_mass(&self, k: usize) -> f64 {
        ModeSpectrum::pair_mass(self, k)
    }
}

impl ModalMass for CodimSpectrum {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn pair_mass(&self, k: usize) -> f64 {
        self.mass(k)
    }
}

fn solution_mass<C: ModeCoefficient>(modes: &[ModeSolution<C>], n: usize, k: usize) -> f64 {
    C::pair(n, k).into_iter().map(|j| modes[j].c_init.norm_sqr() + modes[j].c_free.norm_sqr()).sum()
}

/// Mass of the initial and free constants together.
impl ModalMass for FlowSolution {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn pair_mass(&self, k: usize) -> f64 {
        match &self.modes {
            Modes::Planar(v) => solution_mass(v, self.n, k),
            Modes::Real(v) => solution_mass(v, self.n, k),
        }
    }
}

/// Smallest `k` in `1..=n/2` whose pair mass exceeds `threshold` times the
/// total mass outside mode 0.
///
/// Mass at rounding level relative to the translation part counts as zero,
/// so a single point reports [`Error::AllModesZero`].
pub fn dominant_mode<S: ModalMass + ?Sized>(spec: &S, threshold: f64) -> Result<usize> {
    let n = spec.vertex_count();
    let masses: Vec<f64> = (1..=n / 2).map(|k| spec.pair_mass(k)).collect();
    let total: f64 = masses.iter().sum();
    if total <= POINT_MASS_FLOOR * (1.0 + spec.pair_mass(0)) {
        return Err(Error::AllModesZero);
    }
    masses
        .iter()
        .position(|m| *m > threshold * total)
        .map(|i| i + 1)
        .ok_or(Error::AllModesZero)
}

/// Limiting coefficients of the dominant mode pair.
#[derive(Debug, Clone, PartialEq)]
pub enum LimitBlock {
    /// Coefficients of `P_d` and `P_{n-d}` (equal index when self-paired).
    Planar { forward: Complex64, backward: Complex64 },
    Real(CodimBlock),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LimitKind {
    /// The rescaled polygon tends to `shape`, an affine image of a regular polygon.
    AffineOfRegularPolygon { d: usize, block: LimitBlock, shape: Polygon },
    /// The dominant mode is underdamped: the rescaled polygon keeps rotating.
    PersistentOscillation { d: usize },
    /// No nonzero rescaled limit exists under the scalings considered.
    LimitPoint { diagnostic: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub kind: LimitKind,
    /// Where every vertex ends up.
    pub limit_point: Vec<f64>,
    pub probe_time: f64,
    /// Sup-norm of the rescaled, recentred polygon outside the dominant span at `probe_time`.
    pub residual: f64,
    /// Sup-norm distance between the rescaled dominant part and `shape` at `probe_time`.
    pub shape_error: f64,
}

/// Logarithm of the rescaling factor for the dominant regime.
fn log_scale(regime: DampingRegime, t: f64) -> f64 {
    match regime {
        DampingRegime::Overdamped { r_plus, .. } => -r_plus * t,
        DampingRegime::Critical { beta } => beta * t / 2.0 - t.ln(),
        DampingRegime::Underdamped { beta, .. } => beta * t / 2.0,
        DampingRegime::ZeroMode { .. } | DampingRegime::ZeroModeUndamped => 0.0,
    }
}

/// `T = 20 / |gap|` clamped to `[10, 200]`.
fn probe_time(gap: f64) -> f64 {
    let t = if gap == 0.0 { f64::INFINITY } else { 20.0 / gap.abs() };
    t.clamp(10.0, 200.0)
}

struct Analysis<C> {
    d: usize,
    regime: DampingRegime,
    span: Vec<usize>,
    block: Option<Vec<C>>,
    probe_time: f64,
    residual: f64,
    shape: Option<Polygon>,
    shape_error: f64,
}

fn analyze<C: ModeCoefficient>(n: usize, p: usize, modes: &[ModeSolution<C>], d: usize) -> Result<Analysis<C>> {
    let span = C::pair(n, d);
    let regime = modes[d].regime;
    let total: f64 = (1..=n / 2).map(|k| solution_mass(modes, n, k)).sum();

    let slowest_other = (1..=n / 2)
        .filter(|k| *k != d && solution_mass(modes, n, *k) > DOMINANCE_THRESHOLD * total)
        .map(|k| modes[k].regime.slowest_rate())
        .fold(f64::NEG_INFINITY, f64::max);
    let gap = regime.slowest_rate() - slowest_other;
    let t = probe_time(gap);
    let log_g = log_scale(regime, t);

    let zero = modes[0].c_init.zero_like();
    let outside: Vec<C> = modes
        .iter()
        .enumerate()
        .map(|(k, s)| if k == 0 || span.contains(&k) { zero.clone() } else { s.evaluate_scaled(t, log_g) })
        .collect();
    let residual = C::synthesize(n, p, &outside)?.sup_norm();

    let limit_coeff = |s: &ModeSolution<C>| match regime {
        DampingRegime::Overdamped { .. } => Some(s.c_init.clone() - s.c_free.clone()),
        DampingRegime::Critical { .. } => Some(s.c_free.clone()),
        _ => None,
    };
    let block: Option<Vec<C>> = span.iter().map(|k| limit_coeff(&modes[*k])).collect();
    let (shape, shape_error) = match &block {
        Some(b) => {
            let restrict = |f: &dyn Fn(usize) -> C| -> Vec<C> {
                (0..modes.len()).map(|k| if span.contains(&k) { f(k) } else { zero.clone() }).collect()
            };
            let shape = C::synthesize(n, p, &restrict(&|k| b[span.iter().position(|j| *j == k).unwrap()].clone()))?;
            let scaled = C::synthesize(n, p, &restrict(&|k| modes[k].evaluate_scaled(t, log_g)))?;
            let err = shape.sup_distance(&scaled)?;
            (Some(shape), err)
        }
        None => (None, f64::NAN),
    };
    Ok(Analysis { d, regime, span, block, probe_time: t, residual, shape, shape_error })
}

/// Long-time shape of a damped flow after removing the translation and
/// rescaling by the decay of the dominant mode.
pub fn rescaled_limit(sol: &FlowSolution) -> Result<LimitReport> {
    if !(sol.beta() > 0.0) {
        return Err(Error::Domain(format!("rescaled limit requires damping > 0, got {}", sol.beta())));
    }
    let limit_point = sol.limit_point().expect("beta > 0");
    let d = match dominant_mode(sol, DOMINANCE_THRESHOLD) {
        Ok(d) => d,
        Err(Error::AllModesZero) => {
            return Ok(LimitReport {
                kind: LimitKind::LimitPoint { diagnostic: "all non-translation modes vanish".into() },
                limit_point,
                probe_time: 0.0,
                residual: 0.0,
                shape_error: 0.0,
            })
        }
        Err(e) => return Err(e),
    };
    let (n, p) = (sol.n(), sol.dim());
    let (kind, probe_time, residual, shape_error) = match sol.modes() {
        Modes::Planar(v) => {
            let a = analyze(n, p, v, d)?;
            let block = a.block.as_ref().map(|b| LimitBlock::Planar {
                forward: b[0],
                backward: if a.span.len() == 2 { b[1] } else { b[0] },
            });
            (classify_limit(&a, block, a.block.as_ref().map(|b| b.iter().map(|c| c.norm_sqr()).sum())), a.probe_time, a.residual, a.shape_error)
        }
        Modes::Real(v) => {
            let a = analyze(n, p, v, d)?;
            let block = a.block.as_ref().map(|b| LimitBlock::Real(b[0].clone()));
            (classify_limit(&a, block, a.block.as_ref().map(|b| b[0].norm_sqr())), a.probe_time, a.residual, a.shape_error)
        }
    };
    Ok(LimitReport { kind, limit_point, probe_time, residual, shape_error })
}

/// `X(t)` with the limit point removed, rescaled by the decay of the
/// dominant mode. Tends to the limit shape when one exists.
pub fn rescaled_frame(sol: &FlowSolution, t: f64) -> Result<Polygon> {
    if !(sol.beta() > 0.0) {
        return Err(Error::Domain(format!("rescaling requires damping > 0, got {}", sol.beta())));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("rescaled frames need t > 0, got {t}")));
    }
    let d = dominant_mode(sol, DOMINANCE_THRESHOLD)?;
    let log_g = log_scale(sol.regime(d), t);
    let (n, p) = (sol.n(), sol.dim());
    match sol.modes() {
        Modes::Planar(v) => without_translation(n, p, v, t, log_g),
        Modes::Real(v) => without_translation(n, p, v, t, log_g),
    }
}

fn without_translation<C: ModeCoefficient>(n: usize, p: usize, modes: &[ModeSolution<C>], t: f64, log_g: f64) -> Result<Polygon> {
    let coeffs: Vec<C> = modes
        .iter()
        .enumerate()
        .map(|(k, s)| if k == 0 { s.c_init.zero_like() } else { s.evaluate_scaled(t, log_g) })
        .collect();
    C::synthesize(n, p, &coeffs)
}

fn classify_limit<C>(a: &Analysis<C>, block: Option<LimitBlock>, block_mass: Option<f64>) -> LimitKind {
    match (a.regime, block, block_mass) {
        (DampingRegime::Underdamped { .. }, _, _) => LimitKind::PersistentOscillation { d: a.d },
        (_, Some(block), Some(mass)) if mass > 0.0 => LimitKind::AffineOfRegularPolygon {
            d: a.d,
            block,
            shape: a.shape.clone().expect("shape accompanies block"),
        },
        (DampingRegime::Critical { .. }, _, _) => LimitKind::LimitPoint {
            diagnostic: format!(
                "dominant mode {} is critically damped with zero free constants; the rescaled limit vanishes",
                a.d
            ),
        },
        (regime, _, _) => LimitKind::LimitPoint {
            diagnostic: format!("dominant mode {} ({}) has a vanishing limit block", a.d, regime.name()),
        },
    }
}
