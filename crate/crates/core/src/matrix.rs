//! Dense complex matrices and the Hermitian eigensolver everything else is
//! built on.
//!
//! Matrices are small (dimension up to a few dozen) and stored row-major as
//! `Vec<Complex64>`. Hermitian spectra are computed with cyclic complex
//! Jacobi rotations, which converge unconditionally and leave the
//! eigenvectors orthonormal to machine precision.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Default tolerance for `‖H − H†‖_max`.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Default tolerance for eigenvalue-based predicates (PSD checks, kernels).
pub const EIG_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::MalformedMatrix("dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::MalformedMatrix(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::MalformedMatrix(format!("non-finite entry at index {pos}")));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::MalformedMatrix("ragged rows".into()));
        }
        Self::from_vec(n, m, rows.iter().flatten().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |r, c| if r == c { C64::new(values[r], 0.0) } else { ZERO })
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
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

    /// Dimension of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖A − A†‖_max`
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// `(A + A†)/2`
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5)
    }

    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |r, c| self[(r / r2, c / c2)] * other[(r % r2, c % c2)])
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `A ρ A†`
    pub fn sandwich(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        &(self * rho) * &self.adjoint()
    }

    /// Real-valued `Tr[A B]` for Hermitian arguments.
    pub fn trace_product_re(&self, other: &ComplexMatrix) -> f64 {
        debug_assert_eq!(self.cols, other.rows);
        let mut acc = 0.0;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += (self[(i, k)] * other[(k, i)]).re;
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
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
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// On-disk matrix encoding: `{"dim": n, "entries": [[re, im], ...]}` in
/// row-major order. Non-square matrices (Kraus operators) use
/// `{"rows": m, "cols": n, "entries": ...}` instead of `dim`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cols: Option<usize>,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn into_matrix(self) -> Result<ComplexMatrix> {
        let (rows, cols) = match (self.dim, self.rows, self.cols) {
            (Some(d), None, None) => (d, d),
            (None, Some(r), Some(c)) => (r, c),
            (Some(d), Some(r), Some(c)) if r == d && c == d => (d, d),
            _ => return Err(Error::MalformedMatrix("need either `dim` or both `rows` and `cols`".into())),
        };
        ComplexMatrix::from_vec(rows, cols, self.entries.iter().map(|&[re, im]| C64::new(re, im)).collect())
    }

    pub fn from_matrix(m: &ComplexMatrix, kind: Option<&str>) -> Self {
        let square = m.is_square();
        MatrixFile {
            kind: kind.map(str::to_owned),
            dim: square.then_some(m.rows),
            rows: (!square).then_some(m.rows),
            cols: (!square).then_some(m.cols),
            entries: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile::from_matrix(self, None).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        MatrixFile::deserialize(d)?.into_matrix().map_err(serde::de::Error::custom)
    }
}

/// A square matrix with `H = H†` up to the construction tolerance.
///
/// The stored matrix is exactly Hermitian: the anti-Hermitian residue
/// allowed by the tolerance is projected away on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tol(matrix, HERMITICITY_TOL)
    }

    pub fn with_tol(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian operator must be square, got {}x{}",
                matrix.rows, matrix.cols
            )));
        }
        let asymmetry = matrix.hermiticity_deviation();
        if asymmetry > tol {
            return Err(Error::NonHermitian { asymmetry, tol });
        }
        Ok(HermitianOperator { matrix: matrix.hermitian_part() })
    }

    /// Wraps a matrix the caller has built Hermitian by construction.
    pub(crate) fn from_hermitian_unchecked(matrix: ComplexMatrix) -> Self {
        HermitianOperator { matrix: matrix.hermitian_part() }
    }

    pub fn diag(values: &[f64]) -> Self {
        HermitianOperator { matrix: ComplexMatrix::diag(values) }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator { matrix: ComplexMatrix::identity(dim) }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `self − s·other`
    pub fn sub_scaled(&self, other: &HermitianOperator, s: f64) -> HermitianOperator {
        HermitianOperator { matrix: &self.matrix - &other.matrix.scale_real(s) }
    }

    pub fn eig(&self) -> Result<Spectrum> {
        eig_hermitian(self)
    }

    /// Applies `f` to the eigenvalues.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
        Ok(self.eig()?.reconstruct_with(f))
    }
}

/// Ascending eigenvalues with the matching orthonormal eigenvectors as
/// columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `Σ_k f(λ_k) |v_k⟩⟨v_k|`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let m = ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n).filter(|&k| weights[k] != 0.0).map(|k| v[(r, k)] * v[(c, k)].conj() * weights[k]).sum()
        });
        HermitianOperator::from_hermitian_unchecked(m)
    }

    /// Projector onto the span of eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projector(&self, keep: impl Fn(f64) -> bool) -> HermitianOperator {
        self.reconstruct_with(|l| if keep(l) { 1.0 } else { 0.0 })
    }
}

/// Eigendecomposition of a Hermitian operator by cyclic Jacobi rotations.
pub fn eig_hermitian(h: &HermitianOperator) -> Result<Spectrum> {
    let n = h.dim();
    let mut a = h.matrix.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = 1e-15 * scale;

    let mut converged = n < 2 || scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 || mag <= f64::EPSILON * 1e-3 * scale {
                    continue;
                }
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[(r, c)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        converged = off <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// One rotation zeroing `a[p][q]`: `a ← U† a U`, `v ← v U` with
/// `U = diag(1, e^{−iφ}) · R(θ)` on the `(p, q)` plane.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.rows;
    let apq = a[(p, q)];
    let mag = apq.norm();
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = 0.5 * (2.0 * mag).atan2(aqq - app);
    let (s, c) = theta.sin_cos();
    let ph = phase.conj();
    // U restricted to (p, q): [[c, s], [-s·ph, c·ph]]
    let u00 = C64::new(c, 0.0);
    let u01 = C64::new(s, 0.0);
    let u10 = ph * (-s);
    let u11 = ph * c;

    // a ← a U (columns)
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * u00 + arq * u10;
        a[(r, q)] = arp * u01 + arq * u11;
    }
    // a ← U† a (rows)
    for col in 0..n {
        let apc = a[(p, col)];
        let aqc = a[(q, col)];
        a[(p, col)] = u00.conj() * apc + u10.conj() * aqc;
        a[(q, col)] = u01.conj() * apc + u11.conj() * aqc;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * u00 + vrq * u10;
        v[(r, q)] = vrp * u01 + vrq * u11;
    }
}

/// `(H)_+` and its trace.
pub fn positive_part(h: &HermitianOperator) -> Result<(HermitianOperator, f64)> {
    let spec = eig_hermitian(h)?;
    let trace_plus = spec.eigenvalues.iter().filter(|&&l| l > 0.0).sum::<f64>();
    Ok((spec.reconstruct_with(|l| l.max(0.0)), trace_plus))
}

/// `Tr[(H)_+]` without building the operator.
pub fn trace_positive_part(h: &HermitianOperator) -> Result<f64> {
    Ok(eig_hermitian(h)?.eigenvalues.iter().filter(|&&l| l > 0.0).sum())
}

pub fn min_eigenvalue(h: &HermitianOperator) -> Result<f64> {
    Ok(eig_hermitian(h)?.eigenvalues[0])
}

pub fn max_eigenvalue(h: &HermitianOperator) -> Result<f64> {
    Ok(*eig_hermitian(h)?.eigenvalues.last().expect("non-empty spectrum"))
}

/// Singular values (ascending) and matching right singular vectors of an
/// arbitrary complex matrix, by one-sided Jacobi orthogonalisation.
///
/// Works on the columns of `A` directly, so small singular values keep
/// their absolute accuracy (no squaring through `A†A`).
pub(crate) fn right_singular_pairs(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let (m, n) = (a.rows, a.cols);
    let mut u = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for r in 0..m {
                    alpha += u[(r, i)].norm_sqr();
                    beta += u[(r, j)].norm_sqr();
                    gamma += u[(r, i)].conj() * u[(r, j)];
                }
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g <= 1e-300 {
                    continue;
                }
                rotated = true;
                // Diagonalise the 2x2 Gram block [[alpha, gamma], [gamma*, beta]].
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let sign = if zeta < 0.0 { -1.0 } else { 1.0 };
                let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..m {
                    let ui = u[(r, i)];
                    let uj = u[(r, j)];
                    u[(r, i)] = ui * c - uj * phase.conj() * s;
                    u[(r, j)] = ui * phase * s + uj * c;
                }
                for r in 0..n {
                    let vi = v[(r, i)];
                    let vj = v[(r, j)];
                    v[(r, i)] = vi * c - vj * phase.conj() * s;
                    v[(r, j)] = vi * phase * s + vj * c;
                }
            }
        }
        sweeps += 1;
        if !rotated {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
    }
    let norms: Vec<f64> = (0..n).map(|c| (0..m).map(|r| u[(r, c)].norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[x].total_cmp(&norms[y]));
    let values = order.iter().map(|&k| norms[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}
