use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use polyflow::flow::{classify, rescaled_frame, rescaled_limit, DampingRegime, LimitKind};
use polyflow::geometry::io::{fmt_f64, read_frames, read_poly, write_poly};
use polyflow::geometry::{reconcile_vertex_counts, ReconcileStrategy};
use polyflow::selfsimilar::{
    planar_rotator, propose_translator, scaling_profile, subplane_rotator, translator_check, verify_self_similar,
    ResidualReport, SelfSimilarMotion, TranslationAnsatz,
};
use polyflow::spectral::{basis_polygon_planar, eigenvalue};

use polyflow::yau::{greens_solve_moving_target, solve, Closure, MovingTarget, YauProblem};
use polyflow::{Error, FlowSolution, Polygon, Trajectory};

use crate::args::{
    ClosureMode, EigenArgs, EvolveArgs, Reconcile, RenderArgs, Sampling, SelfsimArgs, SelfsimKind, YauArgs,
};
use crate::failure::{CliError, CliResult};
use crate::svg::{render_svg, Style};

/// Self-similar residuals above this fail the command.
const RESIDUAL_TOL: f64 = 1e-6;

pub fn eigen(a: &EigenArgs) -> CliResult<()> {
    let mut out = String::new();
    match a.beta {
        None => {
            let _ = writeln!(out, "{:>3} {:>24}", "k", "lambda");
        }
        Some(_) => {
            let _ = writeln!(out, "{:>3} {:>24} {:>19} {:>24} {:>24}", "k", "lambda", "regime", "r_plus", "r_minus");
        }
    }
    for k in 0..a.n.max(1) {
        let lambda = eigenvalue(a.n, a.m, k)?;
        let _ = write!(out, "{k:>3} {:>24}", fmt_f64(lambda));
        if let Some(beta) = a.beta {
            let regime = classify(lambda, beta)?;
            let (rp, rm) = rates(regime);
            let _ = write!(out, " {:>19} {:>24} {:>24}", regime.name(), rp, rm);
        }
        out.push('\n');
    }
    print!("{out}");
    Ok(())
}

/// Real parts of the two characteristic roots; complex pairs print as
/// `re+gamma i` / `re-gamma i`.
fn rates(regime: DampingRegime) -> (String, String) {
    match regime {
        DampingRegime::ZeroModeUndamped => (fmt_f64(0.0), fmt_f64(0.0)),
        DampingRegime::ZeroMode { beta } => (fmt_f64(0.0), fmt_f64(-beta)),
        DampingRegime::Overdamped { r_plus, r_minus } => (fmt_f64(r_plus), fmt_f64(r_minus)),
        DampingRegime::Critical { beta } => (fmt_f64(-beta / 2.0), fmt_f64(-beta / 2.0)),
        DampingRegime::Underdamped { beta, gamma } => {
            let re = fmt_f64(-beta / 2.0);
            (format!("{re}+{gamma:.6e}i"), format!("{re}-{gamma:.6e}i"))
        }
    }
}

/// `samples` uniform times on `[0, t_end]` with `extra` inserted exactly.
pub fn sample_times(t_end: f64, samples: usize, extra: Option<f64>) -> CliResult<Vec<f64>> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(CliError::Usage(format!("--t-end must be positive, got {t_end}")));
    }
    if samples < 2 {
        return Err(CliError::Usage(format!("--samples must be at least 2, got {samples}")));
    }
    let last = (samples - 1) as f64;
    let mut times: Vec<f64> = (0..samples).map(|i| if i + 1 == samples { t_end } else { t_end * i as f64 / last }).collect();
    if let Some(t) = extra {
        if !times.contains(&t) {
            times.push(t);
            times.sort_by(f64::total_cmp);
        }
    }
    Ok(times)
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Core(Error::Io(format!("{}: {e}", p.display())))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(traj: &Trajectory, sampling: &Sampling, style: Style) -> CliResult<()> {
    write_out(sampling.output.as_deref(), &traj.to_csv()?)?;
    if let Some(svg) = &sampling.svg {
        write_out(Some(svg), &render_svg(traj, &style)?)?;
    }
    Ok(())
}

fn read(path: &Path) -> CliResult<Polygon> {
    read_poly(path).map_err(|e| with_path(e, path))
}

/// Prefixes io and parse errors with the offending file.
fn with_path(e: Error, path: &Path) -> CliError {
    CliError::Core(match e {
        Error::Parse { line, message } => Error::Parse { line, message: format!("{}: {message}", path.display()) },
        Error::Io(m) => Error::Io(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn evolve(a: &EvolveArgs) -> CliResult<()> {
    let x0 = read(&a.input)?;
    let mut waypoint = None;
    let sol = match a.closure {
        ClosureMode::ZeroVelocity => FlowSolution::solve_ivp(&x0, &Polygon::zeros(x0.n(), x0.dim())?, a.m, a.beta)?,
        ClosureMode::ZeroConstants => FlowSolution::from_constants(&x0, &Polygon::zeros(x0.n(), x0.dim())?, a.m, a.beta)?,
        ClosureMode::TwoPoint => {
            let (Some(t1), Some(path)) = (a.at, &a.through) else {
                return Err(CliError::Usage("--closure two-point needs --at and --through".into()));
            };
            waypoint = Some(t1);
            FlowSolution::solve_two_point(&x0, &read(path)?, t1, a.m, a.beta)?
        }
        ClosureMode::Explicit => match (&a.constants, &a.velocity) {
            (Some(c), None) => FlowSolution::from_constants(&x0, &read(c)?, a.m, a.beta)?,
            (None, Some(v)) => FlowSolution::solve_ivp(&x0, &read(v)?, a.m, a.beta)?,
            _ => return Err(CliError::Usage("--closure explicit needs exactly one of --constants, --velocity".into())),
        },
    };
    if a.closure != ClosureMode::Explicit && (a.constants.is_some() || a.velocity.is_some()) {
        return Err(CliError::Usage("--constants and --velocity need --closure explicit".into()));
    }
    if a.closure != ClosureMode::TwoPoint && (a.at.is_some() || a.through.is_some()) {
        return Err(CliError::Usage("--at and --through need --closure two-point".into()));
    }

    let times = sample_times(a.sampling.t_end, a.sampling.samples, waypoint)?;
    let mut traj = if a.rescale {
        let report = limit_report(&sol)?;
        match &a.report {
            Some(p) => write_out(Some(p), &report)?,
            None => eprint!("{report}"),
        }
        // the rescaling is singular at t = 0
        let kept: Vec<f64> = times.into_iter().filter(|t| *t > 0.0).collect();
        let frames = kept.iter().map(|t| rescaled_frame(&sol, *t)).collect::<polyflow::Result<Vec<_>>>()?;
        Trajectory::from_samples(kept, frames)?.with_meta("rescaled", "true")
    } else {
        Trajectory::from_samples(times.clone(), sol.sample(&times)?)?
    };
    traj = traj.with_meta("m", a.m).with_meta("beta", a.beta);
    if let Some(t1) = waypoint {
        traj = traj.with_meta("waypoint_t", t1);
    }
    emit(&traj, &a.sampling, Style { waypoint_time: waypoint, ..Style::default() })
}

fn limit_report(sol: &FlowSolution) -> CliResult<String> {
    let r = rescaled_limit(sol)?;
    let mut s = String::new();
    let point: Vec<String> = r.limit_point.iter().map(|x| fmt_f64(*x)).collect();
    match &r.kind {
        LimitKind::AffineOfRegularPolygon { d, shape, .. } => {
            let _ = writeln!(s, "kind: affine-regular\ndominant_mode: {d}");
            let _ = writeln!(s, "limit_point: {}", point.join(" "));
            let _ = writeln!(s, "probe_time: {}\nresidual: {:e}\nshape_error: {:e}", r.probe_time, r.residual, r.shape_error);
            let _ = write!(s, "shape:\n{}", write_poly(shape));
        }
        LimitKind::PersistentOscillation { d } => {
            let _ = writeln!(s, "kind: persistent-oscillation\ndominant_mode: {d}");
            let _ = writeln!(s, "limit_point: {}", point.join(" "));
            let _ = writeln!(s, "probe_time: {}\nresidual: {:e}", r.probe_time, r.residual);
        }
        LimitKind::LimitPoint { diagnostic } => {
            let _ = writeln!(s, "kind: limit-point\ndiagnostic: {diagnostic}");
            let _ = writeln!(s, "limit_point: {}", point.join(" "));
        }
    }
    Ok(s)
}

pub fn yau(a: &YauArgs) -> CliResult<()> {
    let x0 = read(&a.input)?;
    let waypoint = match (&a.waypoint, a.at) {
        (Some(p), Some(t1)) => Some((read(p)?, t1)),
        _ => None,
    };
    let times = sample_times(a.sampling.t_end, a.sampling.samples, waypoint.as_ref().map(|w| w.1))?;

    let (traj, distances, target) = if let Some(path) = &a.moving {
        let frames = read_frames(path).map_err(|e| with_path(e, path))?;
        let target = frames.frames.first().cloned();
        let closure = match &waypoint {
            Some((x1, t1)) => Closure::TwoPoint { x1: x1.clone(), t1: *t1 },
            None => Closure::InitialVelocity(Polygon::zeros(x0.n(), x0.dim())?),
        };
        let sol = greens_solve_moving_target(&x0, MovingTarget::Sampled(frames), a.m, a.beta, closure, a.step)?;
        (sol.sample(&times)?, sol.distance_series(&times)?, target)
    } else {
        let target = read(a.target.as_deref().expect("clap requires target or moving"))?;
        let (x0, target) = match (x0.n() == target.n(), a.reconcile) {
            (true, _) => (x0, target),
            (false, Some(r)) => reconcile_vertex_counts(&x0, &target, strategy(r))?,
            (false, None) => {
                return Err(CliError::Core(Error::InvalidStrategy(format!(
                    "source has {} vertices and target {}; pass --reconcile duplicate|subdivide",
                    x0.n(),
                    target.n()
                ))))
            }
        };
        let mut prob = YauProblem::new(x0, target.clone(), a.m, a.beta)?.with_exact_limit(!a.no_exact_limit);
        if a.allow_non_convergent {
            prob = prob.allowing_non_convergent();
        }
        if let Some((x1, t1)) = &waypoint {
            prob = prob.with_waypoint(x1.clone(), *t1);
        }
        let sol = solve(&prob)?;
        let d = times.iter().map(|t| Ok((*t, sol.distance_to_target(*t)?))).collect::<polyflow::Result<Vec<_>>>()?;
        (sol.sample(&times)?, d, Some(target))
    };

    let mut traj = traj.with_meta("m", a.m).with_meta("beta", a.beta);
    if let Some((_, t1)) = &waypoint {
        traj = traj.with_meta("waypoint_t", t1);
    }
    if let Some(p) = &a.distance {
        let mut s = String::from("t,distance\n");
        for (t, d) in &distances {
            let _ = writeln!(s, "{},{}", fmt_f64(*t), fmt_f64(*d));
        }
        write_out(Some(p), &s)?;
    }
    if let Some((t, d)) = distances.last() {
        eprintln!("distance to target at t={t}: {d:e}");
    }
    emit(&traj, &a.sampling, Style { waypoint_time: waypoint.map(|w| w.1), target, ..Style::default() })
}

fn strategy(r: Reconcile) -> ReconcileStrategy {
    match r {
        Reconcile::Duplicate => ReconcileStrategy::Duplicate,
        Reconcile::Subdivide => ReconcileStrategy::Subdivide,
    }
}

pub fn selfsim(a: &SelfsimArgs) -> CliResult<()> {
    match a.kind {
        SelfsimKind::Scale => {
            let profile = scaling_profile(a.n, a.k, a.m, a.beta, a.c)?;
            let x0 = match &a.input {
                Some(p) => read(p)?,
                None => basis_polygon_planar(a.n, a.k)?,
            };
            finish_selfsim(a, &x0, &profile, "scaling")
        }
        SelfsimKind::Rotate => {
            let rot = match a.plane {
                None => planar_rotator(a.n, a.m, a.beta, a.k, a.sign)?,
                Some(plane) => subplane_rotator(a.n, a.m, a.beta, a.k, plane, a.dim, a.sign)?,
            };
            let x0 = rot.initial().clone();
            finish_selfsim(a, &x0, &rot, "rotation")
        }
        SelfsimKind::Translate => {
            let direction = parse_direction(&a.direction)?;
            let report = translator_check(a.beta, direction.clone())?;
            println!("{}", report.statement);
            if a.beta == 0.0 {
                println!("point path: q(t) = q(0) + t d");
            } else {
                println!("point path: q(t) = q(0) + (1 - exp(-{} t)) / {} d", a.beta, a.beta);
            }
            let Some(path) = &a.input else { return Ok(()) };
            let x0 = read(path)?;
            let path = propose_translator(&x0, direction, a.beta)?;
            finish_selfsim(a, &x0, &TranslationAnsatz { path, m: a.m }, "translation")
        }
    }
}

fn finish_selfsim(a: &SelfsimArgs, x0: &Polygon, motion: &dyn SelfSimilarMotion, label: &str) -> CliResult<()> {
    let report = verify_self_similar(x0, motion)?;
    print!("{}", residual_text(label, &report));
    if a.output.is_some() {
        let times = sample_times(a.t_end, a.samples, None)?;
        let frames = times.iter().map(|t| motion.apply(x0, *t)).collect::<polyflow::Result<Vec<_>>>()?;
        let traj = Trajectory::from_samples(times, frames)?.with_meta("selfsim", label);
        write_out(a.output.as_deref(), &traj.to_csv()?)?;
    }
    if report.max >= RESIDUAL_TOL {
        return Err(CliError::Failed(format!("{label} residual {:e} exceeds {RESIDUAL_TOL:e}", report.max)));
    }
    Ok(())
}

fn residual_text(label: &str, r: &ResidualReport) -> String {
    let mut s = String::new();
    for (t, res) in &r.samples {
        let _ = writeln!(s, "{label} residual at t={t}: {res:e}");
    }
    let _ = writeln!(s, "{label} residual max: {:e}", r.max);
    s
}

fn parse_direction(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad direction component {t:?}"))))
        .collect()
}

pub fn render(a: &RenderArgs) -> CliResult<()> {
    let text = fs::read_to_string(&a.input).map_err(|e| CliError::Core(Error::Io(format!("{}: {e}", a.input.display()))))?;
    let traj = Trajectory::parse_csv(&text).map_err(|e| with_path(e, &a.input))?;
    let waypoint_time = match a.waypoint_time {
        Some(t) => Some(t),
        None => match traj.metadata.get("waypoint_t") {
            Some(v) => Some(v.parse().map_err(|_| CliError::Usage(format!("bad waypoint_t metadata {v:?}")))?),
            None => None,
        },
    };
    let target = a.target.as_deref().map(read).transpose()?;
    let style = Style { project: a.project, waypoint_time, target };
    write_out(Some(&a.output), &render_svg(&traj, &style)?)
}
