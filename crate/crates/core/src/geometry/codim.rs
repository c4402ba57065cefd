use std::ops::{Add, Mul, Sub};

use crate::error::{mismatch, Result};
use crate::geometry::Polygon;
use crate::spectral::real_basis;

/// Coefficients of one real mode `k`: the polygon contribution is
/// `c_k * cos_row + s_k * sin_row`, each row holding one entry per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct CodimBlock {
    pub cos_row: Vec<f64>,
    pub sin_row: Vec<f64>,
}

impl CodimBlock {
    pub fn zeros(p: usize) -> Self {
        CodimBlock { cos_row: vec![0.0; p], sin_row: vec![0.0; p] }
    }

    pub fn dim(&self) -> usize {
        self.cos_row.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.cos_row.iter().chain(&self.sin_row).map(|x| x * x).sum()
    }

    fn zip_with(&self, other: &CodimBlock, f: impl Fn(f64, f64) -> f64) -> CodimBlock {
        CodimBlock {
            cos_row: self.cos_row.iter().zip(&other.cos_row).map(|(a, b)| f(*a, *b)).collect(),
            sin_row: self.sin_row.iter().zip(&other.sin_row).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

impl Add for CodimBlock {
    type Output = CodimBlock;
    fn add(self, rhs: CodimBlock) -> CodimBlock {
        self.zip_with(&rhs, |a, b| a + b)
    }
}

impl Sub for CodimBlock {
    type Output = CodimBlock;
    fn sub(self, rhs: CodimBlock) -> CodimBlock {
        self.zip_with(&rhs, |a, b| a - b)
    }
}

impl Mul<f64> for CodimBlock {
    type Output = CodimBlock;
    fn mul(self, s: f64) -> CodimBlock {
        CodimBlock {
            cos_row: self.cos_row.into_iter().map(|a| a * s).collect(),
            sin_row: self.sin_row.into_iter().map(|a| a * s).collect(),
        }
    }
}

/// Real mode decomposition of a polygon in `R^p`, one block per
/// `k = 0, ..., n/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodimSpectrum {
    pub n: usize,
    pub p: usize,
    pub blocks: Vec<CodimBlock>,
}

impl CodimSpectrum {
    pub fn block(&self, k: usize) -> &CodimBlock {
        &self.blocks[k]
    }

    pub fn mass(&self, k: usize) -> f64 {
        self.blocks[k].norm_sqr()
    }
}

/// `(|c_k|^2, |s_k|^2)`: `n` for the constant mode and for the even-`n`
/// alternating cosine, `n/2` otherwise; zero for the vanishing sines.
fn basis_norms(n: usize, k: usize) -> (f64, f64) {
    let nf = n as f64;
    if k == 0 || 2 * k == n {
        (nf, 0.0)
    } else {
        (nf / 2.0, nf / 2.0)
    }
}

/// Orthogonal projection of each coordinate column onto `{c_k, s_k}`.
pub fn decompose(x: &Polygon) -> CodimSpectrum {
    let (n, p) = (x.n(), x.dim());
    let columns: Vec<Vec<f64>> = (0..p).map(|i| x.column(i)).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let blocks = (0..=n / 2)
        .map(|k| {
            let (ck, sk) = real_basis(n, k).expect("k <= n/2 and n >= 3");
            let (nc, ns) = basis_norms(n, k);
            CodimBlock {
                cos_row: columns.iter().map(|col| dot(col, &ck) / nc).collect(),
                sin_row: columns
                    .iter()
                    .map(|col| if ns > 0.0 { dot(col, &sk) / ns } else { 0.0 })
                    .collect(),
            }
        })
        .collect();
    CodimSpectrum { n, p, blocks }
}

/// `X = sum_k (c_k s_k) [cos_row; sin_row]`.
pub fn reconstruct(s: &CodimSpectrum) -> Result<Polygon> {
    let (n, p) = (s.n, s.p);
    if s.blocks.len() != n / 2 + 1 {
        return Err(mismatch(format!("{} blocks", n / 2 + 1), s.blocks.len()));
    }
    let mut coords = vec![0.0; n * p];
    for (k, b) in s.blocks.iter().enumerate() {
        if b.dim() != p {
            return Err(mismatch(format!("block rows of length {p}"), b.dim()));
        }
        let (ck, sk) = real_basis(n, k)?;
        for j in 0..n {
            for i in 0..p {
                coords[j * p + i] += ck[j] * b.cos_row[i] + sk[j] * b.sin_row[i];
            }
        }
    }
    Polygon::from_flat(n, p, coords)
}
