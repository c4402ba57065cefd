//! Superimposed frames as a standalone SVG document.

use std::fmt::Write as _;

use polyflow::{Error, Polygon, Result, Trajectory};

const MARGIN: f64 = 0.05;

const STYLE: &str = ".initial{stroke:#000;stroke-width:2}\
.frame{stroke:#3465a4;stroke-width:1;stroke-opacity:.7}\
.waypoint{stroke:#cc0000;stroke-width:2}\
.target{stroke:#4e9a06;stroke-width:2;stroke-dasharray:4 3}\
path{fill:none;vector-effect:non-scaling-stroke}";

#[derive(Debug, Clone, Default)]
pub struct Style {
    /// 0-based axes to draw; `(0, 1)` when absent.
    pub project: Option<(usize, usize)>,
    pub waypoint_time: Option<f64>,
    pub target: Option<Polygon>,
}

/// Frame classes in order: `initial` for frame 0, `waypoint` for the frame
/// at the waypoint time, `frame` otherwise.
pub fn frame_classes(traj: &Trajectory, waypoint: Option<f64>) -> Vec<&'static str> {
    traj.times
        .iter()
        .enumerate()
        .map(|(i, t)| match waypoint {
            _ if i == 0 => "initial",
            Some(w) if (t - w).abs() <= 1e-12 * (1.0 + w.abs()) => "waypoint",
            _ => "frame",
        })
        .collect()
}

/// Screen coordinates of the projected vertices, with y pointing down.
fn screen(x: &Polygon, (i, j): (usize, usize)) -> Result<Vec<(f64, f64)>> {
    let q = x.project(&[i, j])?;
    Ok(q.vertices().map(|v| (v[0], -v[1])).collect())
}

fn path(class: &str, t: Option<f64>, pts: &[(f64, f64)]) -> String {
    let mut d = String::new();
    for (k, (x, y)) in pts.iter().enumerate() {
        let _ = write!(d, "{}{x:.6},{y:.6} ", if k == 0 { "M" } else { "L" });
    }
    d.push('Z');
    match t {
        Some(t) => format!("<path class=\"{class}\" data-t=\"{t}\" d=\"{d}\"/>\n"),
        None => format!("<path class=\"{class}\" d=\"{d}\"/>\n"),
    }
}

pub fn render_svg(traj: &Trajectory, style: &Style) -> Result<String> {
    let first = traj.first()?;
    let axes = style.project.unwrap_or((0, 1));
    if axes.0 >= first.dim() || axes.1 >= first.dim() {
        return Err(Error::Domain(format!(
            "projection axes {},{} exceed dimension {}",
            axes.0 + 1,
            axes.1 + 1,
            first.dim()
        )));
    }
    let base = screen(first, axes)?;
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (x, y) in &base {
        x0 = x0.min(*x);
        y0 = y0.min(*y);
        x1 = x1.max(*x);
        y1 = y1.max(*y);
    }
    let size = (x1 - x0).max(y1 - y0);
    let size = if size > 0.0 { size } else { 1.0 };
    let m = MARGIN * size;
    let (vx, vy, vw, vh) = (x0 - m, y0 - m, (x1 - x0) + 2.0 * m, (y1 - y0) + 2.0 * m);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{vx:.6} {vy:.6} {vw:.6} {vh:.6}\" width=\"600\" height=\"{:.0}\">",
        600.0 * vh / vw
    );
    let _ = writeln!(out, "<style>{STYLE}</style>");
    let classes = frame_classes(traj, style.waypoint_time);
    // initial frame last so it sits on top
    let order = (1..traj.len()).chain(std::iter::once(0));
    for i in order {
        out.push_str(&path(classes[i], Some(traj.times[i]), &screen(&traj.frames[i], axes)?));
    }
    if let Some(target) = &style.target {
        out.push_str(&path("target", None, &screen(target, axes)?));
    }
    out.push_str("</svg>\n");
    Ok(out)
}
