//! Closed-form evolution of whole polygons, assembled mode by mode.

mod limit;
mod mode;

pub use limit::{dominant_mode, rescaled_frame, rescaled_limit, LimitBlock, LimitKind, LimitReport, ModalMass, DOMINANCE_THRESHOLD};
pub use mode::{
    classify, mode_evaluate, DampingRegime, ModeCoefficient, ModeSolution, CRITICAL_REL_TOL, MAX_EXPONENT,
    SINGULAR_TOL,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{CodimBlock, Polygon};
use crate::spectral::EigenvalueTable;

/// Which basis carries the modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Representation {
    /// Complex basis for planar polygons, cosine/sine basis otherwise.
    #[default]
    Auto,
    /// Complex basis `P_k`; planar polygons only.
    Complex,
    /// Real cosine/sine basis; any dimension.
    Real,
}

/// How free constants of overdamped modes are read. Other regimes have a
/// single form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverdampedForm {
    /// `c e^{r+ t} + a (e^{r- t} - e^{r+ t})`; the stored form.
    #[default]
    SlowAnchored,
    /// `c e^{r- t} + a (e^{r+ t} - e^{r- t})`, i.e. slow-form constant `c - a`.
    FastAnchored,
}

/// Per-mode solutions in one of the two bases.
#[derive(Debug, Clone, PartialEq)]
pub enum Modes {
    Planar(Vec<ModeSolution<Complex64>>),
    Real(Vec<ModeSolution<CodimBlock>>),
}

/// A full closed-form solution, evaluable at any real time.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution {
    n: usize,
    p: usize,
    m: u32,
    beta: f64,
    modes: Modes,
}

fn check_params(m: u32, beta: f64) -> Result<()> {
    if m < 1 {
        return Err(Error::Domain(format!("operator order must be >= 1, got {m}")));
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::Domain(format!("damping must be finite and >= 0, got {beta}")));
    }
    Ok(())
}

fn resolve(repr: Representation, p: usize) -> Result<bool> {
    match repr {
        Representation::Auto => Ok(p == 2),
        Representation::Complex if p == 2 => Ok(true),
        Representation::Complex => Err(Error::Domain(format!("complex representation needs p = 2, got p = {p}"))),
        Representation::Real => Ok(false),
    }
}

fn build<C: ModeCoefficient>(
    x0: &Polygon,
    other: &Polygon,
    m: u32,
    make: impl Fn(usize, f64, C, C) -> Result<ModeSolution<C>>,
) -> Result<Vec<ModeSolution<C>>> {
    let table = EigenvalueTable::new(x0.n(), m)?;
    let init = C::analyze(x0)?;
    let other = C::analyze(other)?;
    init.into_iter()
        .zip(other)
        .enumerate()
        .map(|(k, (c, o))| make(k, table.get(k), c, o))
        .collect()
}

fn synthesize_with<C: ModeCoefficient>(
    n: usize,
    p: usize,
    modes: &[ModeSolution<C>],
    f: impl Fn(&ModeSolution<C>) -> C,
) -> Result<Polygon> {
    let coeffs: Vec<C> = modes.iter().map(f).collect();
    C::synthesize(n, p, &coeffs)
}

impl FlowSolution {
    fn assemble(
        x0: &Polygon,
        other: &Polygon,
        m: u32,
        beta: f64,
        repr: Representation,
        planar: impl Fn(usize, f64, Complex64, Complex64) -> Result<ModeSolution<Complex64>>,
        real: impl Fn(usize, f64, CodimBlock, CodimBlock) -> Result<ModeSolution<CodimBlock>>,
    ) -> Result<Self> {
        check_params(m, beta)?;
        x0.check_same_shape(other)?;
        let modes = if resolve(repr, x0.dim())? {
            Modes::Planar(build(x0, other, m, planar)?)
        } else {
            Modes::Real(build(x0, other, m, real)?)
        };
        Ok(FlowSolution { n: x0.n(), p: x0.dim(), m, beta, modes })
    }

    /// Solution with free constants read off the spectrum of `free`.
    pub fn from_constants(x0: &Polygon, free: &Polygon, m: u32, beta: f64) -> Result<Self> {
        Self::from_constants_in(x0, free, m, beta, Representation::Auto)
    }

    pub fn from_constants_in(x0: &Polygon, free: &Polygon, m: u32, beta: f64, repr: Representation) -> Result<Self> {
        Self::from_constants_with_form(x0, free, m, beta, repr, OverdampedForm::SlowAnchored)
    }

    /// Free constants read in the given overdamped form.
    pub fn from_constants_with_form(
        x0: &Polygon,
        free: &Polygon,
        m: u32,
        beta: f64,
        repr: Representation,
        form: OverdampedForm,
    ) -> Result<Self> {
        fn make<C: ModeCoefficient>(k: usize, l: f64, beta: f64, c: C, a: C, form: OverdampedForm) -> Result<ModeSolution<C>> {
            let mut s = ModeSolution::new(k, l, beta, c, a)?;
            if form == OverdampedForm::FastAnchored && matches!(s.regime, DampingRegime::Overdamped { .. }) {
                s.c_free = s.c_init.clone() - s.c_free;
            }
            Ok(s)
        }
        Self::assemble(
            x0,
            free,
            m,
            beta,
            repr,
            |k, l, c, a| make(k, l, beta, c, a, form),
            |k, l, c, a| make(k, l, beta, c, a, form),
        )
    }

    /// Initial value problem: position `x0` and velocity `v0` at `t = 0`.
    pub fn solve_ivp(x0: &Polygon, v0: &Polygon, m: u32, beta: f64) -> Result<Self> {
        Self::solve_ivp_in(x0, v0, m, beta, Representation::Auto)
    }

    pub fn solve_ivp_in(x0: &Polygon, v0: &Polygon, m: u32, beta: f64, repr: Representation) -> Result<Self> {
        Self::assemble(
            x0,
            v0,
            m,
            beta,
            repr,
            |k, l, c, v| ModeSolution::from_velocity(k, l, beta, c, v),
            |k, l, c, v| ModeSolution::from_velocity(k, l, beta, c, v),
        )
    }

    /// Boundary value problem: `x0` at `t = 0` and `x1` at `t = t1 > 0`.
    pub fn solve_two_point(x0: &Polygon, x1: &Polygon, t1: f64, m: u32, beta: f64) -> Result<Self> {
        Self::solve_two_point_in(x0, x1, t1, m, beta, Representation::Auto)
    }

    pub fn solve_two_point_in(
        x0: &Polygon,
        x1: &Polygon,
        t1: f64,
        m: u32,
        beta: f64,
        repr: Representation,
    ) -> Result<Self> {
        if !(t1 > 0.0 && t1.is_finite()) {
            return Err(Error::Domain(format!("second time must be positive, got {t1}")));
        }
        Self::assemble(
            x0,
            x1,
            m,
            beta,
            repr,
            |k, l, c, y| ModeSolution::from_two_point(k, l, beta, c, y, t1),
            |k, l, c, y| ModeSolution::from_two_point(k, l, beta, c, y, t1),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn modes(&self) -> &Modes {
        &self.modes
    }

    pub fn is_planar(&self) -> bool {
        matches!(self.modes, Modes::Planar(_))
    }

    /// Regime of mode `k` (indexing the active basis).
    pub fn regime(&self, k: usize) -> DampingRegime {
        match &self.modes {
            Modes::Planar(v) => v[k].regime,
            Modes::Real(v) => v[k].regime,
        }
    }

    /// Largest exponent argument over all modes at `t`.
    pub fn max_exponent(&self, t: f64) -> f64 {
        let regimes: Vec<DampingRegime> = match &self.modes {
            Modes::Planar(v) => v.iter().map(|s| s.regime).collect(),
            Modes::Real(v) => v.iter().map(|s| s.regime).collect(),
        };
        regimes.iter().map(|r| r.max_exponent(t)).fold(f64::NEG_INFINITY, f64::max)
    }

    fn check_range(&self, t: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("time must be finite, got {t}")));
        }
        let exponent = self.max_exponent(t);
        if exponent > MAX_EXPONENT {
            return Err(Error::Range { t, exponent });
        }
        Ok(())
    }

    /// `X(t)`.
    pub fn evaluate(&self, t: f64) -> Result<Polygon> {
        self.check_range(t)?;
        match &self.modes {
            Modes::Planar(v) => synthesize_with(self.n, self.p, v, |s| s.evaluate(t)),
            Modes::Real(v) => synthesize_with(self.n, self.p, v, |s| s.evaluate(t)),
        }
    }

    /// `X'(t)`.
    pub fn velocity(&self, t: f64) -> Result<Polygon> {
        self.check_range(t)?;
        match &self.modes {
            Modes::Planar(v) => synthesize_with(self.n, self.p, v, |s| s.derivative(t)),
            Modes::Real(v) => synthesize_with(self.n, self.p, v, |s| s.derivative(t)),
        }
    }

    /// Centroid at time `t`, carried by mode 0 alone.
    pub fn centroid(&self, t: f64) -> Result<Vec<f64>> {
        self.check_range(t)?;
        Ok(match &self.modes {
            Modes::Planar(v) => {
                let z = v[0].evaluate(t);
                vec![z.re, z.im]
            }
            Modes::Real(v) => v[0].evaluate(t).cos_row,
        })
    }

    /// The point every vertex converges to when `beta > 0`.
    pub fn limit_point(&self) -> Option<Vec<f64>> {
        if self.beta <= 0.0 {
            return None;
        }
        let b = self.beta;
        Some(match &self.modes {
            Modes::Planar(v) => {
                let z = v[0].c_init + v[0].c_free / b;
                vec![z.re, z.im]
            }
            Modes::Real(v) => v[0].c_init.cos_row.iter().zip(&v[0].c_free.cos_row).map(|(c, a)| c + a / b).collect(),
        })
    }

    /// Polygon whose spectrum holds the free constants.
    pub fn free_constants(&self) -> Result<Polygon> {
        match &self.modes {
            Modes::Planar(v) => synthesize_with(self.n, self.p, v, |s| s.c_free),
            Modes::Real(v) => synthesize_with(self.n, self.p, v, |s| s.c_free.clone()),
        }
    }

    /// Samples `X(t)` at each time.
    pub fn sample(&self, times: &[f64]) -> Result<Vec<Polygon>> {
        times.iter().map(|t| self.evaluate(*t)).collect()
    }
}
