//! Dense real symmetric matrices and their spectral calculus.
//!
//! Everything downstream (instances, mirror descent, entropy nets) works with
//! [`SymMatrix`]. Spectral functions go through a full eigendecomposition; at
//! the sizes this crate targets (m up to a few hundred) that is cheaper than
//! being clever.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Absolute symmetry tolerance, scaled by `max(1, ‖A‖_F)`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues at or below this are treated as zero in `0·log 0` terms.
pub const EIG_CUTOFF: f64 = 1e-12;

/// A Schatten / ℓp exponent in `[1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INF: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("exponent must lie in [1, inf], got {p}")));
        }
        Ok(Exponent(p))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_inf(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, with `1/∞ = 0`.
    #[inline]
    pub fn recip(self) -> f64 {
        if self.is_inf() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// Hölder conjugate `p* = p/(p-1)`.
    pub fn conjugate(self) -> Exponent {
        if self.is_inf() {
            Exponent(1.0)
        } else if self.0 == 1.0 {
            Exponent::INF
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" | "op" => Ok(Exponent::INF),
            "fro" | "f" => Ok(Exponent::TWO),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent `{s}`")))?;
                Exponent::new(p)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_inf() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(p) => Exponent::new(p).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Dense m×m real symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    data: DMatrix<f64>,
}

/// Eigenvalues sorted descending with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ f(λⱼ) vⱼvⱼᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let m = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let fl = f(lam);
            scaled.column_mut(j).scale_mut(fl);
        }
        let mut out = &scaled * self.eigenvectors.transpose();
        // Symmetrize away rounding so the result passes the symmetry check.
        for i in 0..m {
            for j in (i + 1)..m {
                let v = 0.5 * (out[(i, j)] + out[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        SymMatrix { data: out }
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.map(|x| x)
    }

    pub fn eigenvector(&self, j: usize) -> DVector<f64> {
        self.eigenvectors.column(j).into_owned()
    }
}

impl SymMatrix {
    /// Wraps a square matrix after checking symmetry within
    /// `1e-12 · max(1, ‖A‖_F)`. The stored matrix is exactly symmetrized.
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = data.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        for i in 0..rows {
            for j in 0..cols {
                if !data[(i, j)].is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
            }
        }
        let tol = SYMMETRY_TOL * data.norm().max(1.0);
        let mut data = data;
        for i in 0..rows {
            for j in (i + 1)..rows {
                let diff = (data[(i, j)] - data[(j, i)]).abs();
                if diff > tol {
                    return Err(Error::NotSymmetric { i, j, diff, tol });
                }
                let v = 0.5 * (data[(i, j)] + data[(j, i)]);
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        Ok(SymMatrix { data })
    }

    pub fn from_row_major(m: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != m * m {
            return Err(Error::DimMismatch { expected: m * m, got: entries.len() });
        }
        Self::new(DMatrix::from_row_slice(m, m, entries))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let mut flat = Vec::with_capacity(m * m);
        for r in rows {
            if r.len() != m {
                return Err(Error::NotSquare { rows: m, cols: r.len() });
            }
            flat.extend_from_slice(r);
        }
        Self::from_row_major(m, &flat)
    }

    pub fn zeros(m: usize) -> Self {
        SymMatrix { data: DMatrix::zeros(m, m) }
    }

    pub fn identity(m: usize) -> Self {
        SymMatrix { data: DMatrix::identity(m, m) }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        SymMatrix { data: DMatrix::from_diagonal(&DVector::from_column_slice(d)) }
    }

    /// `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        let v = DVector::from_column_slice(v);
        SymMatrix { data: &v * v.transpose() }
    }

    /// Block-diagonal assembly of equally sized or ragged square blocks.
    pub fn block_diagonal(blocks: &[SymMatrix]) -> Self {
        let m: usize = blocks.iter().map(|b| b.dim()).sum();
        let mut data = DMatrix::zeros(m, m);
        let mut off = 0;
        for b in blocks {
            let h = b.dim();
            data.view_mut((off, off), (h, h)).copy_from(&b.data);
            off += h;
        }
        SymMatrix { data }
    }

    /// The `k`-th diagonal block of size `h`.
    pub fn diagonal_block(&self, k: usize, h: usize) -> SymMatrix {
        let off = k * h;
        SymMatrix { data: self.data.view((off, off), (h, h)).into_owned() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let m = self.dim();
        (0..m).map(|i| (0..m).map(|j| self.data[(i, j)]).collect()).collect()
    }

    pub fn trace(&self) -> f64 {
        self.data.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix { data: &self.data * c }
    }

    /// `self += c · other`.
    pub fn axpy(&mut self, c: f64, other: &SymMatrix) {
        for (d, &o) in self.data.iter_mut().zip(other.data.iter()) {
            *d += c * o;
        }
    }

    /// `Σ cᵢ Mᵢ` over matrices of common dimension `m`.
    pub fn linear_combination<'a>(
        m: usize,
        terms: impl IntoIterator<Item = (f64, &'a SymMatrix)>,
    ) -> SymMatrix {
        let mut acc = SymMatrix::zeros(m);
        for (c, a) in terms {
            if c != 0.0 {
                acc.axpy(c, a);
            }
        }
        acc
    }

    pub fn eig(&self) -> Spectrum {
        sym_eig(self)
    }

    /// Eigenvalues only, sorted descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.data.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    pub fn op_norm(&self) -> f64 {
        schatten_of_eigenvalues(&self.eigenvalues(), Exponent::INF)
    }

    pub fn schatten_norm(&self, p: Exponent) -> f64 {
        if p == Exponent::TWO {
            return self.frobenius_norm();
        }
        schatten_of_eigenvalues(&self.eigenvalues(), p)
    }

    pub fn spectral_fn(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        self.eig().map(f)
    }

    pub fn exp(&self) -> SymMatrix {
        self.spectral_fn(f64::exp)
    }

    /// Matrix logarithm; requires positive definiteness.
    pub fn log(&self) -> Result<SymMatrix> {
        let spec = self.eig();
        let min = spec.eigenvalues.last().copied().unwrap_or(1.0);
        if min <= 0.0 {
            return Err(Error::Domain(format!(
                "log of a matrix that is not positive definite (min eigenvalue {min:e})"
            )));
        }
        Ok(spec.map(f64::ln))
    }

    /// Signed power `Σ sign(λⱼ)|λⱼ|^α vⱼvⱼᵀ`.
    pub fn signed_power(&self, alpha: f64) -> SymMatrix {
        self.spectral_fn(|l| signed_pow(l, alpha))
    }

    /// PSD with unit trace, within `tol`.
    pub fn is_spectraplex(&self, tol: f64) -> bool {
        (self.trace() - 1.0).abs() <= tol && self.min_eigenvalue() >= -tol
    }
}

#[inline]
pub(crate) fn signed_pow(x: f64, alpha: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(alpha)
    }
}

/// `(Σ|λⱼ|^p)^{1/p}`, or `max|λⱼ|` for `p = ∞`.
pub fn schatten_of_eigenvalues(eigs: &[f64], p: Exponent) -> f64 {
    if p.is_inf() {
        return eigs.iter().fold(0.0_f64, |acc, &l| acc.max(l.abs()));
    }
    let pv = p.value();
    // Scale by the largest magnitude to avoid overflow for large p.
    let top = eigs.iter().fold(0.0_f64, |acc, &l| acc.max(l.abs()));
    if top == 0.0 {
        return 0.0;
    }
    let s: f64 = eigs.iter().map(|&l| (l.abs() / top).powf(pv)).sum();
    top * s.powf(1.0 / pv)
}

/// Symmetric eigendecomposition, eigenvalues descending.
pub fn sym_eig(a: &SymMatrix) -> Spectrum {
    let se = a.data.clone().symmetric_eigen();
    let m = a.dim();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].total_cmp(&se.eigenvalues[i]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::zeros(m, m);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Spectrum { eigenvalues, eigenvectors }
}

pub fn schatten_norm(a: &SymMatrix, p: Exponent) -> f64 {
    a.schatten_norm(p)
}

/// `tr(AᵀB) = Σᵢⱼ AᵢⱼBᵢⱼ`.
pub fn frob_inner(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(a.data.dot(&b.data))
}

/// `tr(X log X)` with `0·log 0 := 0`.
pub fn neg_entropy(x: &SymMatrix) -> f64 {
    x.eigenvalues()
        .into_iter()
        .filter(|&l| l > EIG_CUTOFF)
        .map(|l| l * l.ln())
        .sum()
}

/// Quantum relative entropy `S(X‖Y) = tr(X(log X − log Y))`.
///
/// `X` must lie in the spectraplex and `Y` must be positive definite.
pub fn quantum_rel_entropy(x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimMismatch { expected: x.dim(), got: y.dim() });
    }
    if !x.is_spectraplex(1e-8) {
        return Err(Error::Domain("first argument is not in the spectraplex".into()));
    }
    let ys = y.eig();
    let ymin = ys.eigenvalues.last().copied().unwrap_or(1.0);
    if ymin <= EIG_CUTOFF {
        // Distinguish an honest support violation from a merely singular Y.
        let mut null_mass = 0.0;
        for (j, &l) in ys.eigenvalues.iter().enumerate() {
            if l <= EIG_CUTOFF {
                let v = ys.eigenvector(j);
                null_mass += (v.transpose() * x.as_matrix() * &v)[(0, 0)];
            }
        }
        if null_mass > EIG_CUTOFF {
            return Err(Error::Domain(format!(
                "support of X is not contained in support of Y (mass {null_mass:e} on null space)"
            )));
        }
        return Err(Error::Domain(format!(
            "second argument is not positive definite (min eigenvalue {ymin:e})"
        )));
    }
    let log_y = ys.map(f64::ln);
    let cross = x.as_matrix().dot(log_y.as_matrix());
    Ok((neg_entropy(x) - cross).max(0.0))
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix { data: &self.data + &rhs.data }
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix { data: &self.data - &rhs.data }
    }
}

impl Mul<f64> for &SymMatrix {
    type Output = SymMatrix;
    fn mul(self, rhs: f64) -> SymMatrix {
        self.scale(rhs)
    }
}

impl Neg for &SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        self.scale(-1.0)
    }
}
