use std::str::FromStr;

use crate::error::{mismatch, Error, Result};
use crate::geometry::{distance, Polygon};

/// How the polygon with fewer vertices is padded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReconcileStrategy {
    /// Repeat existing vertices, spread evenly, earliest indices first.
    Duplicate,
    /// Insert evenly spaced points along the longest edges.
    Subdivide,
}

impl FromStr for ReconcileStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "duplicate" => Ok(ReconcileStrategy::Duplicate),
            "subdivide" => Ok(ReconcileStrategy::Subdivide),
            other => Err(Error::InvalidStrategy(format!(
                "unknown reconcile strategy {other:?} (expected duplicate or subdivide)"
            ))),
        }
    }
}

/// Pads the polygon with fewer vertices up to the larger count; the other
/// polygon is returned unchanged. Both outputs trace the same point sets
/// as their inputs.
pub fn reconcile_vertex_counts(
    x: &Polygon,
    y: &Polygon,
    strategy: ReconcileStrategy,
) -> Result<(Polygon, Polygon)> {
    if x.dim() != y.dim() {
        return Err(mismatch(format!("polygons in R^{}", x.dim()), format!("R^{}", y.dim())));
    }
    let target = x.n().max(y.n());
    let pad = |poly: &Polygon| match strategy {
        ReconcileStrategy::Duplicate => duplicate(poly, target),
        ReconcileStrategy::Subdivide => subdivide(poly, target),
    };
    Ok((pad(x)?, pad(y)?))
}

fn duplicate(poly: &Polygon, target: usize) -> Result<Polygon> {
    let n = poly.n();
    let extra = target - n;
    let (base, rem) = (extra / n, extra % n);
    let mut coords = Vec::with_capacity(target * poly.dim());
    for j in 0..n {
        let copies = 1 + base + usize::from(j < rem);
        for _ in 0..copies {
            coords.extend_from_slice(poly.vertex(j));
        }
    }
    Polygon::from_flat(target, poly.dim(), coords)
}

fn subdivide(poly: &Polygon, target: usize) -> Result<Polygon> {
    let n = poly.n();
    let lengths: Vec<f64> = (0..n).map(|e| distance(poly.vertex(e), poly.vertex(e + 1))).collect();
    let mut inserts = vec![0usize; n];
    for _ in n..target {
        // longest current sub-segment; strict comparison keeps the lowest index on ties
        let mut best = 0;
        for e in 1..n {
            if lengths[e] / (inserts[e] + 1) as f64 > lengths[best] / (inserts[best] + 1) as f64 {
                best = e;
            }
        }
        inserts[best] += 1;
    }
    let p = poly.dim();
    let mut coords = Vec::with_capacity(target * p);
    for e in 0..n {
        let (a, b) = (poly.vertex(e), poly.vertex(e + 1));
        coords.extend_from_slice(a);
        let pieces = (inserts[e] + 1) as f64;
        for i in 1..=inserts[e] {
            let s = i as f64 / pieces;
            coords.extend(a.iter().zip(b).map(|(u, v)| u + s * (v - u)));
        }
    }
    Polygon::from_flat(target, p, coords)
}
