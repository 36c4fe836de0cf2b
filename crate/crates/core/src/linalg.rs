//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here is row-major and dense. Dimensions in this crate stay in
//! the low hundreds (paths x detector states x location), so no sparse path
//! exists.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::{PSD_GATE, SPECTRAL_CUTOFF};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A column vector of complex amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![ZERO; dim])
    }

    /// The `index`-th computational basis vector.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &ComplexVector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.entries.iter().map(|z| z * factor).collect())
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self::new(self.entries.iter().map(|z| z * factor).collect())
    }

    /// Returns `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale_real(1.0 / n))
    }

    /// Kronecker product `|self> (x) |other>`.
    pub fn kron(&self, other: &ComplexVector) -> Self {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                out.push(a * b);
            }
        }
        Self::new(out)
    }

    /// The projector-like outer product `|self><other|`.
    pub fn outer(&self, other: &ComplexVector) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |i, j| {
            self.entries[i] * other.entries[j].conj()
        })
    }

    /// Rotates the global phase so the largest-magnitude entry is real and
    /// positive. Ties resolve to the lowest index.
    pub fn with_canonical_phase(&self) -> Self {
        let mut best = 0;
        let mut best_mag = -1.0;
        for (i, z) in self.entries.iter().enumerate() {
            // small slack so that numerically equal magnitudes pick the first index
            if z.norm() > best_mag + 1e-12 {
                best = i;
                best_mag = z.norm();
            }
        }
        if best_mag <= 0.0 {
            return self.clone();
        }
        let z = self.entries[best];
        self.scale(z.conj() / z.norm())
    }

    pub fn distance(&self, other: &ComplexVector) -> f64 {
        (self - other).norm()
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.entries[i]
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        ComplexVector::new(self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        ComplexVector::new(self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect())
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if rows * cols != entries.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::new(r, c, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[ComplexVector]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, ComplexVector::dim);
        if columns.iter().any(|c| c.dim() != rows) {
            return Err(Error::DimensionMismatch("columns of unequal length".into()));
        }
        Self::new(rows, cols, (0..rows * cols).map(|k| columns[k % cols][k / cols]).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal().into_iter().sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|z| z * factor).collect() }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        ComplexVector::new(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
                .collect(),
        )
    }

    /// `max |A - A^dag|` entry-wise; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Deviation of `self^dag self` from the identity, in Frobenius norm.
    pub fn unitarity_deviation(&self) -> f64 {
        (&(&self.adjoint() * self) - &Self::identity(self.cols)).frobenius_norm()
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.entries[i * rhs.cols + j] += a * rhs.entries[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Kronecker product `a (x) b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    ComplexMatrix::from_fn(rows, cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    })
}

/// Reduced operator on the subsystems listed in `keep`.
///
/// `dims` lists subsystem dimensions with the first subsystem most
/// significant in the row-major index. Kept subsystems retain their
/// relative order regardless of the order in `keep`.
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "partial trace needs a square matrix, got {}x{}",
            rho.rows, rho.cols
        )));
    }
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != rho.rows {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} do not multiply to {}",
            rho.rows
        )));
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() || kept[k] {
            return Err(Error::DimensionMismatch(format!("bad keep index set {keep:?}")));
        }
        kept[k] = true;
    }

    // Split every full index into (kept index, traced index).
    let kept_dim: usize = dims.iter().zip(&kept).filter(|(_, &k)| k).map(|(d, _)| d).product();
    let mut split = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let (mut k_idx, mut k_stride) = (0, 1);
        let (mut t_idx, mut t_stride) = (0, 1);
        for (s, &d) in dims.iter().enumerate().rev() {
            let digit = rem % d;
            rem /= d;
            if kept[s] {
                k_idx += digit * k_stride;
                k_stride *= d;
            } else {
                t_idx += digit * t_stride;
                t_stride *= d;
            }
        }
        split.push((k_idx, t_idx));
    }

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for (j, &(kj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out[(ki, kj)] += rho[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Only the lower triangle of `m` is read.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, Vec<ComplexVector>)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("eigen-decomposition needs a square matrix".into()));
    }
    let eig = SymmetricEigen::new(m.to_nalgebra());
    let mut pairs: Vec<(f64, ComplexVector)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let v = ComplexVector::new(eig.eigenvectors.column(k).iter().copied().collect());
            (w, v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let (values, _) = hermitian_eigen(m)?;
    Ok(values.first().copied().unwrap_or(0.0))
}

/// Gram matrix of detector states: entry `(i, j)` is `<d_i|d_j>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    overlaps: ComplexMatrix,
}

impl GramMatrix {
    /// Validates Hermiticity, unit diagonal and positive semi-definiteness.
    pub fn new(overlaps: ComplexMatrix) -> Result<Self> {
        if !overlaps.is_square() {
            return Err(Error::DimensionMismatch("Gram matrix must be square".into()));
        }
        let herm = overlaps.hermitian_deviation();
        if herm > PSD_GATE {
            return Err(Error::InvalidConfig(format!(
                "Gram matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        if let Some(i) = (0..overlaps.rows).find(|&i| (overlaps[(i, i)] - ONE).norm() > PSD_GATE) {
            return Err(Error::InvalidConfig(format!(
                "Gram diagonal entry {i} is {} (detector states must be normalized)",
                overlaps[(i, i)]
            )));
        }
        let min_eigenvalue = min_eigenvalue(&overlaps)?;
        if min_eigenvalue < -PSD_GATE {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        Ok(Self { overlaps })
    }

    /// Gram matrix of explicit vectors, normalizing each.
    pub fn from_vectors(vectors: &[ComplexVector]) -> Result<Self> {
        let normalized: Vec<ComplexVector> = vectors
            .iter()
            .map(|v| v.normalized().ok_or_else(|| Error::InvalidConfig("zero detector vector".into())))
            .collect::<Result<_>>()?;
        let n = normalized.len();
        Self::new(ComplexMatrix::from_fn(n, n, |i, j| normalized[i].inner(&normalized[j])))
    }

    pub fn identity(dim: usize) -> Self {
        Self { overlaps: ComplexMatrix::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.overlaps.rows
    }

    /// `<d_i|d_j>`.
    pub fn overlap(&self, i: usize, j: usize) -> Complex64 {
        self.overlaps[(i, j)]
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.overlaps
    }
}

/// Explicit vectors `v_i` with `<v_i|v_j> = g[i][j]`.
///
/// Uses an outer-product Cholesky factorization with diagonal pivoting, so
/// rank-deficient Gram matrices embed into their minimal subspace. The
/// vectors are zero-padded to `g.dim()` coordinates. With a unit diagonal
/// the first pivot is index 0, so `v_0` is always the first basis vector.
pub fn gram_embed(g: &GramMatrix) -> Result<Vec<ComplexVector>> {
    let m = g.dim();
    let min_eigenvalue = min_eigenvalue(g.matrix())?;
    if min_eigenvalue < -PSD_GATE {
        return Err(Error::NotPsd { min_eigenvalue });
    }

    let mut residual = g.matrix().clone();
    let mut factor = ComplexMatrix::zeros(m, m);
    let mut used = vec![false; m];
    for col in 0..m {
        let mut pivot = None;
        let mut best = f64::NEG_INFINITY;
        for i in (0..m).filter(|&i| !used[i]) {
            let d = residual[(i, i)].re;
            if d > best + 1e-15 {
                best = d;
                pivot = Some(i);
            }
        }
        let Some(p) = pivot else { break };
        if best <= SPECTRAL_CUTOFF {
            break;
        }
        used[p] = true;
        let root = best.sqrt();
        for i in 0..m {
            factor[(i, col)] = if i == p {
                Complex64::new(root, 0.0)
            } else if used[i] {
                ZERO
            } else {
                residual[(i, p)] / root
            };
        }
        for i in (0..m).filter(|&i| !used[i]) {
            for j in (0..m).filter(|&j| !used[j]) {
                let update = factor[(i, col)] * factor[(j, col)].conj();
                residual[(i, j)] -= update;
            }
        }
    }

    // g = L L^dag, so taking v_i = conj(row i of L) gives <v_i|v_j> = g[i][j].
    Ok((0..m)
        .map(|i| ComplexVector::new((0..m).map(|k| factor[(i, k)].conj()).collect()))
        .collect())
}

/// Modified Gram-Schmidt (two passes) on the given vectors.
///
/// Vectors that are numerically dependent on earlier ones are dropped.
pub fn orthonormalize(vectors: &[ComplexVector]) -> Vec<ComplexVector> {
    let mut basis: Vec<ComplexVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.inner(&w);
                w = &w - &b.scale(c);
            }
        }
        if w.norm() > 1e-10 * v.norm().max(1.0) {
            basis.push(w.normalized().expect("nonzero by check"));
        }
    }
    basis
}

/// One term `r_k |phi_k><phi_k|` of a spectral decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTerm {
    pub weight: f64,
    pub vector: ComplexVector,
}

/// Spectral decomposition of a density matrix.
///
/// Terms with weight below the spectral cutoff are dropped; weights come out
/// in descending order and each eigenvector carries the canonical phase of
/// [`ComplexVector::with_canonical_phase`].
pub fn spectral_decompose(rho: &ComplexMatrix) -> Result<Vec<SpectralTerm>> {
    let check = is_density_matrix(rho, PSD_GATE);
    if !check.is_valid() {
        return Err(Error::NotDensityMatrix(check.to_string()));
    }
    let (values, vectors) = hermitian_eigen(rho)?;
    let mut terms: Vec<SpectralTerm> = values
        .into_iter()
        .zip(vectors)
        .filter(|(w, _)| *w > SPECTRAL_CUTOFF)
        .map(|(weight, v)| SpectralTerm { weight, vector: v.with_canonical_phase() })
        .collect();
    terms.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    Ok(terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityFailure {
    NotSquare,
    NotHermitian,
    TraceNotOne,
    NegativeEigenvalue,
}

impl fmt::Display for DensityFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NotSquare => "not square",
            Self::NotHermitian => "not Hermitian",
            Self::TraceNotOne => "trace differs from 1",
            Self::NegativeEigenvalue => "negative eigenvalue",
        })
    }
}

/// Outcome of [`is_density_matrix`] with the measured quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCheck {
    pub hermitian_deviation: f64,
    pub trace: Complex64,
    pub min_eigenvalue: f64,
    pub failures: Vec<DensityFailure>,
}

impl DensityCheck {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for DensityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid density matrix");
        }
        let names: Vec<String> = self.failures.iter().map(ToString::to_string).collect();
        write!(
            f,
            "{} (hermitian deviation {:e}, trace {}, min eigenvalue {:e})",
            names.join(", "),
            self.hermitian_deviation,
            self.trace,
            self.min_eigenvalue
        )
    }
}

/// Checks Hermiticity, unit trace and positivity, each within `tol`.
pub fn is_density_matrix(rho: &ComplexMatrix, tol: f64) -> DensityCheck {
    if !rho.is_square() {
        return DensityCheck {
            hermitian_deviation: f64::INFINITY,
            trace: ZERO,
            min_eigenvalue: f64::NAN,
            failures: vec![DensityFailure::NotSquare],
        };
    }
    let mut failures = Vec::new();
    let hermitian_deviation = rho.hermitian_deviation();
    if hermitian_deviation > tol {
        failures.push(DensityFailure::NotHermitian);
    }
    let trace = rho.trace();
    if (trace - ONE).norm() > tol {
        failures.push(DensityFailure::TraceNotOne);
    }
    // Eigenvalues of the Hermitian part; meaningful even if the check above failed.
    let herm = (&rho.clone() + &rho.adjoint()).scale_real(0.5);
    let min_eigenvalue = min_eigenvalue(&herm).unwrap_or(f64::NAN);
    if min_eigenvalue.is_nan() || min_eigenvalue < -tol {
        failures.push(DensityFailure::NegativeEigenvalue);
    }
    DensityCheck { hermitian_deviation, trace, min_eigenvalue, failures }
}
