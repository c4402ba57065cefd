//! Time-sampled polygon sequences and their CSV form.
//!
//! CSV layout: optional `# key: value` metadata lines, then a header
//! `t,v0_x,v0_y,...,v1_x,...` and one row per sample.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{mismatch, Error, Result};
use crate::geometry::io::fmt_f64;
use crate::geometry::Polygon;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub frames: Vec<Polygon>,
    pub metadata: BTreeMap<String, String>,
}

/// `x`, `y`, `z`, then `x4`, `x5`, ...
pub fn axis_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        _ => format!("x{}", i + 1),
    }
}

fn axis_index(name: &str) -> Option<usize> {
    match name {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        _ => name.strip_prefix('x')?.parse::<usize>().ok().filter(|i| *i >= 4).map(|i| i - 1),
    }
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples(times: Vec<f64>, frames: Vec<Polygon>) -> Result<Self> {
        if times.len() != frames.len() {
            return Err(mismatch(format!("{} frames", times.len()), frames.len()));
        }
        let mut t = Trajectory::new();
        for (time, frame) in times.into_iter().zip(frames) {
            t.push(time, frame)?;
        }
        Ok(t)
    }

    pub fn push(&mut self, t: f64, frame: Polygon) -> Result<()> {
        if let Some(first) = self.frames.first() {
            first.check_same_shape(&frame)?;
        }
        self.times.push(t);
        self.frames.push(frame);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn first(&self) -> Result<&Polygon> {
        self.frames.first().ok_or(Error::EmptyTrajectory)
    }

    pub fn last(&self) -> Result<&Polygon> {
        self.frames.last().ok_or(Error::EmptyTrajectory)
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    /// Index of the sample whose time is nearest `t`.
    pub fn nearest(&self, t: f64) -> Option<usize> {
        (0..self.times.len()).min_by(|a, b| (self.times[*a] - t).abs().total_cmp(&(self.times[*b] - t).abs()))
    }

    pub fn to_csv(&self) -> Result<String> {
        let first = self.first()?;
        let mut s = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let mut header = vec!["t".to_string()];
        for j in 0..first.n() {
            for i in 0..first.dim() {
                header.push(format!("v{j}_{}", axis_name(i)));
            }
        }
        let _ = writeln!(s, "{}", header.join(","));
        for (t, f) in self.times.iter().zip(&self.frames) {
            let mut row = vec![fmt_f64(*t)];
            row.extend(f.as_flat().iter().map(|x| fmt_f64(*x)));
            let _ = writeln!(s, "{}", row.join(","));
        }
        Ok(s)
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut traj = Trajectory::new();
        let mut shape: Option<(usize, usize)> = None;
        for (i, line) in text.lines().enumerate() {
            let ln = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.split_once(':') {
                    traj.metadata.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            match shape {
                None => shape = Some(parse_header(ln, &fields)?),
                Some((n, p)) => {
                    if fields.len() != 1 + n * p {
                        return Err(Error::Parse {
                            line: ln,
                            message: format!("expected {} fields, found {}", 1 + n * p, fields.len()),
                        });
                    }
                    let values = fields
                        .iter()
                        .map(|f| {
                            f.parse::<f64>()
                                .map_err(|_| Error::Parse { line: ln, message: format!("invalid number {f:?}") })
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    traj.push(values[0], Polygon::from_flat(n, p, values[1..].to_vec())?)?;
                }
            }
        }
        if traj.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        Ok(traj)
    }
}

fn parse_header(ln: usize, fields: &[&str]) -> Result<(usize, usize)> {
    let bad = |m: String| Error::Parse { line: ln, message: m };
    if fields.first() != Some(&"t") {
        return Err(bad("header must start with 't'".into()));
    }
    let mut cells = Vec::new();
    for f in &fields[1..] {
        let parsed = f
            .strip_prefix('v')
            .and_then(|r| r.split_once('_'))
            .and_then(|(j, a)| Some((j.parse::<usize>().ok()?, axis_index(a)?)));
        cells.push(parsed.ok_or_else(|| bad(format!("bad column name {f:?}")))?);
    }
    let p = cells.iter().map(|c| c.1).max().map_or(0, |m| m + 1);
    if p == 0 || cells.len() % p != 0 {
        return Err(bad("inconsistent column layout".into()));
    }
    let n = cells.len() / p;
    for (idx, (j, a)) in cells.iter().enumerate() {
        if (*j, *a) != (idx / p, idx % p) {
            return Err(bad(format!("column {} out of order", fields[idx + 1])));
        }
    }
    Ok((n, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip() {
        let a = Polygon::from_vertices(&[[0.0, 0.5, 1.0], [1.0 / 3.0, 0.0, 2.0], [0.0, 1.0, -1.0]]).unwrap();
        let traj = Trajectory::from_samples(vec![0.0, 0.1], vec![a.clone(), a.scaled(0.5)])
            .unwrap()
            .with_meta("beta", 4);
        let text = traj.to_csv().unwrap();
        assert!(text.contains("t,v0_x,v0_y,v0_z,v1_x"));
        assert_eq!(Trajectory::parse_csv(&text).unwrap(), traj);
    }

    #[test]
    fn high_dimension_names() {
        assert_eq!(axis_name(3), "x4");
        assert_eq!(axis_index("x4"), Some(3));
        assert_eq!(axis_index("x2"), None);
    }

    #[test]
    fn rejects_bad_rows() {
        let text = "t,v0_x,v0_y,v1_x,v1_y,v2_x,v2_y\n0,1,2,3,4,5\n";
        assert!(matches!(Trajectory::parse_csv(text), Err(Error::Parse { line: 2, .. })));
        assert_eq!(Trajectory::new().to_csv(), Err(Error::EmptyTrajectory));
    }
}
