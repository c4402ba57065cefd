//! The circulant second-difference operator `M`, its signed powers
//! `(-1)^{m+1} M^m`, their eigenvalues, the Fourier basis polygons `P_k`
//! and the discrete Fourier transform between vertex space and mode space.
//!
//! `M` is never stored densely. It is applied either by `m` sweeps of the
//! three-point stencil `N_j = X_{j+1} - 2 X_j + X_{j-1}` or diagonally in
//! mode space, and the two paths are checked against each other.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{mismatch, Error, Result};
use crate::geometry::Polygon;

/// Relative tolerance used when comparing exact closed forms in mode space.
pub const REL_TOL: f64 = 1e-12;
/// Absolute floor paired with [`REL_TOL`].
pub const ABS_FLOOR: f64 = 1e-14;

/// `|a - b| <= REL_TOL * max(|a|, |b|) + ABS_FLOOR`.
pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()) + ABS_FLOOR
}

fn check_order(n: usize, m: u32) -> Result<()> {
    if n < 3 {
        return Err(Error::Domain(format!("vertex count must be at least 3, got {n}")));
    }
    if m < 1 {
        return Err(Error::Domain("operator order m must be at least 1".into()));
    }
    Ok(())
}

fn check_mode(n: usize, k: usize) -> Result<()> {
    if k >= n {
        return Err(Error::Domain(format!("mode index {k} out of range for n = {n}")));
    }
    Ok(())
}

/// Index of the mode paired with `k` (same eigenvalue, opposite orientation).
pub fn partner(n: usize, k: usize) -> usize {
    (n - k % n) % n
}

/// `lambda_{m,k} = -4^m sin^{2m}(pi k / n)`, the eigenvalue of
/// `(-1)^{m+1} M^m` on `P_k`. Exactly zero for `k = 0`, and computed from
/// `min(k, n - k)` so that paired modes agree bit for bit.
pub fn eigenvalue(n: usize, m: u32, k: usize) -> Result<f64> {
    check_order(n, m)?;
    check_mode(n, k)?;
    let k = k.min(n - k);
    if k == 0 {
        return Ok(0.0);
    }
    let s = (PI * k as f64 / n as f64).sin();
    Ok(-(4.0 * s * s).powi(m as i32))
}

/// All eigenvalues `lambda_{m,0}, ..., lambda_{m,n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueTable {
    pub n: usize,
    pub m: u32,
    pub values: Vec<f64>,
}

impl EigenvalueTable {
    pub fn new(n: usize, m: u32) -> Result<Self> {
        let values = (0..n).map(|k| eigenvalue(n, m, k)).collect::<Result<_>>()?;
        Ok(EigenvalueTable { n, m, values })
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }
}

/// `omega^e` with `omega = exp(2 pi i / n)`, exact on the axes and exactly
/// conjugate-symmetric (`omega^{n-e} = conj(omega^e)`).
pub fn root_of_unity(n: usize, e: usize) -> Complex64 {
    let e = e % n;
    if e == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * e == n {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * e == n {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * e == 3 * n {
        return Complex64::new(0.0, -1.0);
    }
    if 2 * e > n {
        return root_of_unity(n, n - e).conj();
    }
    let (s, c) = (2.0 * PI * e as f64 / n as f64).sin_cos();
    Complex64::new(c, s)
}

/// `P_k = (1, omega^k, omega^{2k}, ..., omega^{(n-1)k})`.
pub fn basis_polygon(n: usize, k: usize) -> Vec<Complex64> {
    (0..n).map(|j| root_of_unity(n, j * k % n)).collect()
}

/// `P_k` as a planar polygon `(c_k, s_k)`.
pub fn basis_polygon_planar(n: usize, k: usize) -> Result<Polygon> {
    Polygon::from_complex(&basis_polygon(n, k))
}

/// Cosine and sine vectors `c_k[j] = cos(2 pi jk/n)`, `s_k[j] = sin(2 pi jk/n)`,
/// the real and imaginary parts of `P_k`, for `0 <= k <= n/2`.
pub fn real_basis(n: usize, k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 3 {
        return Err(Error::Domain(format!("vertex count must be at least 3, got {n}")));
    }
    if k > n / 2 {
        return Err(Error::Domain(format!("real basis index {k} exceeds n/2 = {}", n / 2)));
    }
    let pk = basis_polygon(n, k);
    Ok((pk.iter().map(|z| z.re).collect(), pk.iter().map(|z| z.im).collect()))
}

/// Coefficients `alpha_k` of a planar polygon in the basis `{P_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    pub coeffs: Vec<Complex64>,
}

impl ModeSpectrum {
    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.coeffs[k]
    }

    /// `|alpha_k|^2 + |alpha_{n-k}|^2` (just `|alpha_k|^2` when `k` is self-paired).
    pub fn pair_mass(&self, k: usize) -> f64 {
        let n = self.n();
        let q = partner(n, k);
        let mut mass = self.coeffs[k].norm_sqr();
        if q != k {
            mass += self.coeffs[q].norm_sqr();
        }
        mass
    }
}

/// `alpha_k = (1/n) <X, P_k>`, by direct `O(n^2)` summation.
pub fn dft(x: &[Complex64]) -> ModeSpectrum {
    let n = x.len();
    let inv = 1.0 / n as f64;
    let coeffs = (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, xj)| xj * root_of_unity(n, j * k % n).conj())
                .sum::<Complex64>()
                * inv
        })
        .collect();
    ModeSpectrum { coeffs }
}

/// `X = sum_k alpha_k P_k`.
pub fn idft(s: &ModeSpectrum) -> Vec<Complex64> {
    let n = s.n();
    (0..n)
        .map(|j| {
            s.coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| a * root_of_unity(n, j * k % n))
                .sum()
        })
        .collect()
}

/// Spectrum of a planar polygon.
pub fn planar_spectrum(x: &Polygon) -> Result<ModeSpectrum> {
    Ok(dft(&x.to_complex()?))
}

/// The operator `(-1)^{m+1} M^m` on `n`-gons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CirculantOperator {
    n: usize,
    m: u32,
}

impl CirculantOperator {
    pub fn new(n: usize, m: u32) -> Result<Self> {
        check_order(n, m)?;
        Ok(CirculantOperator { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    /// `(-1)^{m+1}`.
    pub fn sign(&self) -> f64 {
        if self.m % 2 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        eigenvalue(self.n, self.m, k)
    }

    fn check(&self, x: &Polygon) -> Result<()> {
        if x.n() != self.n {
            return Err(mismatch(format!("{}-gon", self.n), format!("{}-gon", x.n())));
        }
        Ok(())
    }

    /// Applies the operator by `m` stencil sweeps.
    pub fn apply(&self, x: &Polygon) -> Result<Polygon> {
        self.check(x)?;
        let p = x.dim();
        let mut out = vec![0.0; x.as_flat().len()];
        let mut scratch = vec![0.0; out.len()];
        self.apply_flat(x.as_flat(), p, &mut out, &mut scratch);
        Polygon::from_flat(self.n, p, out)
    }

    /// Stencil application on a raw row-major `n x p` buffer. `out` and
    /// `scratch` must have the same length as `src`.
    pub fn apply_flat(&self, src: &[f64], p: usize, out: &mut [f64], scratch: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(src.len(), n * p);
        out.copy_from_slice(src);
        for _ in 0..self.m {
            scratch.copy_from_slice(out);
            for j in 0..n {
                let prev = (j + n - 1) % n;
                let next = (j + 1) % n;
                for c in 0..p {
                    out[j * p + c] =
                        scratch[next * p + c] - 2.0 * scratch[j * p + c] + scratch[prev * p + c];
                }
            }
        }
        if self.m % 2 == 0 {
            out.iter_mut().for_each(|v| *v = -*v);
        }
    }

    /// Applies the operator diagonally in mode space: each coordinate
    /// column is transformed, scaled by `lambda_{m,k}` and transformed back.
    pub fn apply_spectral(&self, x: &Polygon) -> Result<Polygon> {
        self.check(x)?;
        let table = EigenvalueTable::new(self.n, self.m)?;
        let columns = (0..x.dim())
            .map(|i| {
                let col: Vec<Complex64> =
                    x.column(i).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
                let mut s = dft(&col);
                for (k, a) in s.coeffs.iter_mut().enumerate() {
                    *a *= table.get(k);
                }
                idft(&s).into_iter().map(|z| z.re).collect()
            })
            .collect::<Vec<Vec<f64>>>();
        Polygon::from_columns(&columns)
    }
}

/// Free-function form of [`CirculantOperator::apply`].
pub fn apply_operator(op: &CirculantOperator, x: &Polygon) -> Result<Polygon> {
    op.apply(x)
}
