//! Polygon data model, affine maps, the real cosine/sine mode
//! decomposition for polygons in `R^p`, vertex-count reconciliation and
//! the `.poly` text format.

mod codim;
pub mod io;
mod reconcile;

pub use codim::{decompose, reconstruct, CodimBlock, CodimSpectrum};
pub use reconcile::{reconcile_vertex_counts, ReconcileStrategy};

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{mismatch, Error, Result};

/// A closed polygon with `n >= 3` vertices in `R^p` (`p >= 2`).
///
/// Vertices are stored row-major; vertex indices are taken modulo `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    n: usize,
    p: usize,
    coords: Vec<f64>,
}

impl Polygon {
    pub const MIN_VERTICES: usize = 3;
    pub const MIN_DIM: usize = 2;

    /// Builds a polygon from a row-major `n x p` coordinate buffer.
    pub fn from_flat(n: usize, p: usize, coords: Vec<f64>) -> Result<Self> {
        if n < Self::MIN_VERTICES {
            return Err(Error::Domain(format!("polygon needs at least 3 vertices, got {n}")));
        }
        if p < Self::MIN_DIM {
            return Err(Error::Domain(format!("vertex dimension must be at least 2, got {p}")));
        }
        if coords.len() != n * p {
            return Err(mismatch(format!("{} coordinates", n * p), coords.len()));
        }
        Ok(Polygon { n, p, coords })
    }

    pub fn from_vertices<V: AsRef<[f64]>>(vertices: &[V]) -> Result<Self> {
        let n = vertices.len();
        let p = vertices.first().map_or(0, |v| v.as_ref().len());
        let mut coords = Vec::with_capacity(n * p);
        for (j, v) in vertices.iter().enumerate() {
            let v = v.as_ref();
            if v.len() != p {
                return Err(mismatch(format!("vertex {j} of dimension {p}"), v.len()));
            }
            coords.extend_from_slice(v);
        }
        Self::from_flat(n, p, coords)
    }

    pub fn zeros(n: usize, p: usize) -> Result<Self> {
        Self::from_flat(n, p, vec![0.0; n * p])
    }

    /// `n` copies of one point.
    pub fn point(n: usize, q: &[f64]) -> Result<Self> {
        Self::from_flat(n, q.len(), q.repeat(n))
    }

    /// Planar polygon from its complex encoding `X_j = x_j + i y_j`.
    pub fn from_complex(z: &[Complex64]) -> Result<Self> {
        let coords = z.iter().flat_map(|c| [c.re, c.im]).collect();
        Self::from_flat(z.len(), 2, coords)
    }

    /// Complex encoding of a planar polygon.
    pub fn to_complex(&self) -> Result<Vec<Complex64>> {
        if self.p != 2 {
            return Err(mismatch("planar polygon (p = 2)", format!("p = {}", self.p)));
        }
        Ok(self
            .coords
            .chunks_exact(2)
            .map(|v| Complex64::new(v[0], v[1]))
            .collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn as_flat_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.coords
    }

    pub fn vertex(&self, j: usize) -> &[f64] {
        let j = j % self.n;
        &self.coords[j * self.p..(j + 1) * self.p]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.p)
    }

    /// Column `i` as a vector in `R^n`.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.vertices().map(|v| v[i]).collect()
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let p = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(mismatch("columns of equal length", "ragged columns"));
        }
        let mut coords = Vec::with_capacity(n * p);
        for j in 0..n {
            coords.extend(columns.iter().map(|c| c[j]));
        }
        Self::from_flat(n, p, coords)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.p];
        for v in self.vertices() {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi;
            }
        }
        let inv = 1.0 / self.n as f64;
        c.iter_mut().for_each(|ci| *ci *= inv);
        c
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                d = d.max(distance(self.vertex(a), self.vertex(b)));
            }
        }
        d
    }

    pub fn sup_norm(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `max_j |X_j - Y_j|_inf` over all coordinates.
    pub fn sup_distance(&self, other: &Polygon) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn check_same_shape(&self, other: &Polygon) -> Result<()> {
        if self.n != other.n || self.p != other.p {
            return Err(mismatch(
                format!("{}x{} polygon", self.n, self.p),
                format!("{}x{} polygon", other.n, other.p),
            ));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|x| x.is_finite())
    }

    pub fn scaled(&self, s: f64) -> Polygon {
        Polygon {
            n: self.n,
            p: self.p,
            coords: self.coords.iter().map(|x| x * s).collect(),
        }
    }

    /// Keeps only coordinates `axes` of every vertex.
    pub fn project(&self, axes: &[usize]) -> Result<Polygon> {
        if let Some(&bad) = axes.iter().find(|&&a| a >= self.p) {
            return Err(Error::Domain(format!("axis {bad} out of range for p = {}", self.p)));
        }
        let coords = self
            .vertices()
            .flat_map(|v| axes.iter().map(move |&a| v[a]))
            .collect();
        Polygon::from_flat(self.n, axes.len(), coords)
    }

    /// Embeds into `R^q` (`q >= p`), padding with zero coordinates.
    pub fn embed(&self, q: usize) -> Result<Polygon> {
        if q < self.p {
            return Err(mismatch(format!("target dimension >= {}", self.p), q));
        }
        let coords = self
            .vertices()
            .flat_map(|v| v.iter().copied().chain(std::iter::repeat(0.0).take(q - self.p)))
            .collect();
        Polygon::from_flat(self.n, q, coords)
    }

    fn zip_with(&self, other: &Polygon, f: impl Fn(f64, f64) -> f64) -> Polygon {
        assert!(
            self.n == other.n && self.p == other.p,
            "polygon shape mismatch: {}x{} vs {}x{}",
            self.n,
            self.p,
            other.n,
            other.p
        );
        Polygon {
            n: self.n,
            p: self.p,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl Add for &Polygon {
    type Output = Polygon;
    fn add(self, rhs: &Polygon) -> Polygon {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Polygon {
    type Output = Polygon;
    fn sub(self, rhs: &Polygon) -> Polygon {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &Polygon {
    type Output = Polygon;
    fn mul(self, s: f64) -> Polygon {
        self.scaled(s)
    }
}

/// `X_j -> X_j E + a` with `E` a `p x p` matrix acting on row vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    p: usize,
    linear: Vec<f64>,
    translation: Vec<f64>,
}

impl AffineMap {
    /// `linear` is row-major `p x p`.
    pub fn new(linear: Vec<f64>, translation: Vec<f64>) -> Result<Self> {
        let p = translation.len();
        if linear.len() != p * p {
            return Err(mismatch(format!("{p}x{p} linear part"), format!("{} entries", linear.len())));
        }
        Ok(AffineMap { p, linear, translation })
    }

    pub fn identity(p: usize) -> Self {
        let mut linear = vec![0.0; p * p];
        (0..p).for_each(|i| linear[i * p + i] = 1.0);
        AffineMap { p, linear, translation: vec![0.0; p] }
    }

    pub fn translation(a: Vec<f64>) -> Self {
        let mut map = Self::identity(a.len());
        map.translation = a;
        map
    }

    /// Counter-clockwise rotation of the plane by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        // row-vector convention: (x, y) E = (x c - y s, x s + y c)
        AffineMap { p: 2, linear: vec![c, s, -s, c], translation: vec![0.0, 0.0] }
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn linear_entry(&self, row: usize, col: usize) -> f64 {
        self.linear[row * self.p + col]
    }

    /// The same map with zero translation.
    pub fn linear_part(&self) -> AffineMap {
        AffineMap { p: self.p, linear: self.linear.clone(), translation: vec![0.0; self.p] }
    }

    pub fn apply_point(&self, x: &[f64]) -> Vec<f64> {
        (0..self.p)
            .map(|c| {
                self.translation[c]
                    + x.iter().enumerate().map(|(r, xr)| xr * self.linear[r * self.p + c]).sum::<f64>()
            })
            .collect()
    }

    pub fn apply(&self, x: &Polygon) -> Result<Polygon> {
        if x.dim() != self.p {
            return Err(mismatch(format!("polygon in R^{}", self.p), format!("R^{}", x.dim())));
        }
        let coords = x.vertices().flat_map(|v| self.apply_point(v)).collect();
        Polygon::from_flat(x.n(), self.p, coords)
    }
}

/// Free-function form of [`AffineMap::apply`].
pub fn apply_affine(map: &AffineMap, x: &Polygon) -> Result<Polygon> {
    map.apply(x)
}
