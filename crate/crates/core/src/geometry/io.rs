//! The `.poly` text format.
//!
//! ```text
//! # optional comment lines start with '#'
//! poly <n> <p>
//! x_0 y_0 ...
//! ...            (n vertex lines of p floats)
//! ```
//!
//! A frame sequence (moving target) adds `frames <count> <dt>` right after
//! the `poly` header and then holds `count` consecutive vertex blocks.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Polygon;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A time-sampled sequence of polygons with uniform spacing `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFrames {
    pub dt: f64,
    pub frames: Vec<Polygon>,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate() }
    }

    /// Next non-comment, non-blank line with its 1-based line number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            return Some((i + 1, t));
        }
        None
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_header(lines: &mut Lines) -> Result<(usize, usize, usize)> {
    let (ln, header) = lines.next_content().ok_or_else(|| parse_err(0, "missing 'poly <n> <p>' header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "poly" {
        return Err(parse_err(ln, format!("expected 'poly <n> <p>', found {header:?}")));
    }
    let n = fields[1].parse::<usize>().map_err(|e| parse_err(ln, format!("bad vertex count: {e}")))?;
    let p = fields[2].parse::<usize>().map_err(|e| parse_err(ln, format!("bad dimension: {e}")))?;
    if n < 3 {
        return Err(parse_err(ln, format!("polygon needs at least 3 vertices, got {n}")));
    }
    if p < 2 {
        return Err(parse_err(ln, format!("dimension must be at least 2, got {p}")));
    }
    Ok((ln, n, p))
}

fn parse_vertex_line(ln: usize, line: &str, p: usize, out: &mut Vec<f64>) -> Result<()> {
    let before = out.len();
    for tok in line.split_whitespace() {
        let v = tok
            .parse::<f64>()
            .map_err(|_| parse_err(ln, format!("invalid number {tok:?}")))?;
        if !v.is_finite() {
            return Err(parse_err(ln, format!("non-finite coordinate {tok:?}")));
        }
        out.push(v);
    }
    let got = out.len() - before;
    if got != p {
        return Err(parse_err(ln, format!("expected {p} coordinates, found {got}")));
    }
    Ok(())
}

fn parse_block(lines: &mut Lines, n: usize, p: usize, last_line: &mut usize) -> Result<Polygon> {
    let mut coords = Vec::with_capacity(n * p);
    for _ in 0..n {
        let (ln, line) = lines
            .next_content()
            .ok_or_else(|| parse_err(*last_line + 1, format!("expected {n} vertex lines")))?;
        *last_line = ln;
        if line.starts_with("poly") || line.starts_with("frames") {
            return Err(parse_err(ln, "unexpected header inside vertex block"));
        }
        parse_vertex_line(ln, line, p, &mut coords)?;
    }
    Polygon::from_flat(n, p, coords)
}

fn expect_end(lines: &mut Lines) -> Result<()> {
    match lines.next_content() {
        Some((ln, _)) => Err(parse_err(ln, "unexpected trailing content")),
        None => Ok(()),
    }
}

pub fn parse_poly(text: &str) -> Result<Polygon> {
    let mut lines = Lines::new(text);
    let (mut last, n, p) = parse_header(&mut lines)?;
    let poly = parse_block(&mut lines, n, p, &mut last)?;
    expect_end(&mut lines)?;
    Ok(poly)
}

pub fn write_poly(x: &Polygon) -> String {
    let mut s = format!("poly {} {}\n", x.n(), x.dim());
    write_block(&mut s, x);
    s
}

fn write_block(s: &mut String, x: &Polygon) {
    for v in x.vertices() {
        let line: Vec<String> = v.iter().map(|c| fmt_f64(*c)).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
}

pub fn parse_frames(text: &str) -> Result<SampledFrames> {
    let mut lines = Lines::new(text);
    let (mut last, n, p) = parse_header(&mut lines)?;
    let (ln, line) = lines
        .next_content()
        .ok_or_else(|| parse_err(last + 1, "missing 'frames <count> <dt>' line"))?;
    last = ln;
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "frames" {
        return Err(parse_err(ln, format!("expected 'frames <count> <dt>', found {line:?}")));
    }
    let count = fields[1].parse::<usize>().map_err(|e| parse_err(ln, format!("bad frame count: {e}")))?;
    let dt = fields[2].parse::<f64>().map_err(|e| parse_err(ln, format!("bad dt: {e}")))?;
    if count == 0 {
        return Err(parse_err(ln, "frame count must be positive"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(parse_err(ln, format!("dt must be positive, got {dt}")));
    }
    let frames = (0..count)
        .map(|_| parse_block(&mut lines, n, p, &mut last))
        .collect::<Result<Vec<_>>>()?;
    expect_end(&mut lines)?;
    Ok(SampledFrames { dt, frames })
}

pub fn write_frames(frames: &SampledFrames) -> Result<String> {
    let first = frames.frames.first().ok_or(Error::EmptyTrajectory)?;
    let mut s = format!("poly {} {}\nframes {} {}\n", first.n(), first.dim(), frames.frames.len(), fmt_f64(frames.dt));
    for f in &frames.frames {
        first.check_same_shape(f)?;
        write_block(&mut s, f);
    }
    Ok(s)
}

pub fn read_poly(path: impl AsRef<Path>) -> Result<Polygon> {
    parse_poly(&std::fs::read_to_string(path)?)
}

pub fn read_frames(path: impl AsRef<Path>) -> Result<SampledFrames> {
    parse_frames(&std::fs::read_to_string(path)?)
}
