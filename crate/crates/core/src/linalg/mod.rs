//! Dense complex linear algebra: validated matrices, lines and frames,
//! eigendecomposition behind a semisimplicity gate, polar decomposition and
//! the metrics used to compare lines and frames.

use std::cmp::Ordering;
use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

mod schur;

/// Default semisimplicity tolerance for [`eig_decompose`].
pub const DEFAULT_EIG_TOL: f64 = 1e-9;
/// Default spanning tolerance for frames (smallest singular value of the
/// column matrix of unit directions).
pub const DEFAULT_FRAME_TOL: f64 = 1e-10;
/// Pairwise inner-product bound for orthogonal frames.
pub const ORTHO_TOL: f64 = 1e-10;
/// Coordinates below this modulus are skipped when fixing a line's phase.
const PHASE_PIVOT_TOL: f64 = 1e-12;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A dense `n x n` complex matrix with `n >= 2` and finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::invalid(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
        }
        if m.nrows() < 2 {
            return Err(Error::invalid("matrix dimension must be at least 2"));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        Ok(ComplexMatrix(m))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("ragged or non-square rows"));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Real-entry convenience constructor, row-major.
    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::invalid("entry count does not match n*n"));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| c(entries[i * n + j], 0.0)))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(values: &[Complex64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn frobenius(&self) -> f64 {
        self.0.norm()
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix(self.0.transpose())
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn is_normal(&self, tol: f64) -> bool {
        let a = &self.0;
        let comm = a.adjoint() * a - a * a.adjoint();
        comm.norm() <= tol * a.norm_squared().max(1.0)
    }

    /// Eigenvalues without the semisimplicity gate, unordered.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        schur::eigenvalues(&self.0)
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<Complex64>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

/// A one-dimensional subspace of `C^n`, stored as a unit direction whose first
/// nonzero coordinate is real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    dir: DVector<Complex64>,
}

impl Line {
    pub fn new(v: DVector<Complex64>) -> Result<Self> {
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("line direction has non-finite entries"));
        }
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("line direction is zero"));
        }
        let mut dir = v / c(norm, 0.0);
        if let Some(pivot) = dir.iter().find(|z| z.norm() > PHASE_PIVOT_TOL).copied() {
            let phase = pivot.conj() / pivot.norm();
            dir *= phase;
        }
        Ok(Line { dir })
    }

    pub fn from_slice(v: &[Complex64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(v))
    }

    pub fn axis(n: usize, i: usize) -> Self {
        let mut dir = DVector::zeros(n);
        dir[i] = c(1.0, 0.0);
        Line { dir }
    }

    pub fn direction(&self) -> &DVector<Complex64> {
        &self.dir
    }

    pub fn dim(&self) -> usize {
        self.dir.len()
    }

    /// Deterministic ordering of canonical directions: earlier pivot first,
    /// then larger pivot modulus, then entrywise `(re, im)`.
    pub(crate) fn canonical_cmp(&self, other: &Line) -> Ordering {
        let pivot = |l: &Line| l.dir.iter().position(|z| z.norm() > 1e-10).unwrap_or(usize::MAX);
        let (pa, pb) = (pivot(self), pivot(other));
        pa.cmp(&pb)
            .then_with(|| {
                if pa == usize::MAX {
                    Ordering::Equal
                } else {
                    other.dir[pa].norm().total_cmp(&self.dir[pa].norm())
                }
            })
            .then_with(|| {
                for (a, b) in self.dir.iter().zip(other.dir.iter()) {
                    let o = a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                Ordering::Equal
            })
    }
}

/// Sine of the principal angle between two lines, `sqrt(1 - |<a, b>|^2)`.
pub fn line_distance(a: &Line, b: &Line) -> f64 {
    // norm of the rejection of b from a; stays accurate for small angles
    let proj = &a.dir * a.dir.dotc(&b.dir);
    (&b.dir - proj).norm().min(1.0)
}

/// An ordered, spanning n-tuple of lines in `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    lines: Vec<Line>,
}

impl Frame {
    pub fn new(lines: Vec<Line>) -> Result<Self> {
        Self::with_tolerance(lines, DEFAULT_FRAME_TOL)
    }

    pub fn with_tolerance(lines: Vec<Line>, tol: f64) -> Result<Self> {
        let n = lines.len();
        if n < 2 {
            return Err(Error::invalid("a frame needs at least 2 lines"));
        }
        if let Some(l) = lines.iter().find(|l| l.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, actual: l.dim() });
        }
        let frame = Frame { lines };
        let sv = singular_values(&frame.column_matrix());
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if smin <= tol {
            let smax = sv.iter().copied().fold(0.0, f64::max);
            return Err(Error::Degenerate { condition: smax / smin });
        }
        Ok(frame)
    }

    /// Frame spanned by the columns of `v`, in column order.
    pub fn from_columns(v: &DMatrix<Complex64>) -> Result<Self> {
        let lines = (0..v.ncols())
            .map(|j| Line::new(v.column(j).into_owned()))
            .collect::<Result<Vec<_>>>()?;
        Frame::new(lines)
    }

    pub fn standard(n: usize) -> Self {
        Frame { lines: (0..n).map(|i| Line::axis(n, i)).collect() }
    }

    pub fn n(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn line(&self, i: usize) -> &Line {
        &self.lines[i]
    }

    /// The `n x n` matrix whose columns are the unit directions.
    pub fn column_matrix(&self) -> DMatrix<Complex64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| self.lines[j].dir[i])
    }

    pub fn condition(&self) -> f64 {
        condition_number(&self.column_matrix())
    }

    pub(crate) fn from_lines_unchecked(lines: Vec<Line>) -> Self {
        Frame { lines }
    }
}

/// A frame whose lines are pairwise orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoFrame(Frame);

impl OrthoFrame {
    pub fn new(frame: Frame) -> Result<Self> {
        let n = frame.n();
        for i in 0..n {
            for j in (i + 1)..n {
                let ip = frame.lines[i].dir.dotc(&frame.lines[j].dir).norm();
                if ip > ORTHO_TOL {
                    return Err(Error::invalid(format!(
                        "lines {i} and {j} are not orthogonal (|<d_i, d_j>| = {ip:.3e})"
                    )));
                }
            }
        }
        Ok(OrthoFrame(frame))
    }

    pub fn frame(&self) -> &Frame {
        &self.0
    }

    pub fn into_frame(self) -> Frame {
        self.0
    }
}

impl Deref for OrthoFrame {
    type Target = Frame;

    fn deref(&self) -> &Frame {
        &self.0
    }
}

/// Largest line-by-line distance between two frames, without matching.
pub fn frame_distance(f: &Frame, g: &Frame) -> Result<f64> {
    if f.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), actual: g.n() });
    }
    Ok(f.lines.iter().zip(&g.lines).map(|(a, b)| line_distance(a, b)).fold(0.0, f64::max))
}

/// `||AB - BA||_F`.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), actual: b.n() });
    }
    let (a, b) = (a.as_matrix(), b.as_matrix());
    Ok((a * b - b * a).norm())
}

/// Ordered tuple of eigenvalues; repeats allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumVector(Vec<Complex64>);

impl SpectrumVector {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("spectrum has non-finite entries"));
        }
        Ok(SpectrumVector(values))
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub(crate) fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = singular_values(m);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

pub(crate) fn inverse(m: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    m.clone().lu().try_inverse()
}

/// Smallest singular value must exceed `1e-12 * ||M||_2`.
pub(crate) fn check_invertible(m: &DMatrix<Complex64>) -> Result<()> {
    let sv = singular_values(m);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if smax == 0.0 || smin <= 1e-12 * smax {
        return Err(Error::Singular { sigma_min: smin });
    }
    Ok(())
}

fn cmp_lex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Diagonalizes `m` as `V diag(lambda) V^-1`.
///
/// Eigenvalues come from a complex Schur form; eigenvectors from back
/// substitution on the triangular factor. Schur diagonal entries closer than
/// `0.1 * tol * ||M||_F` are treated as one repeated eigenvalue: they share
/// the cluster mean and their eigenvectors take no component along each
/// other, which is exact for diagonalizable clusters and leaves a visible
/// residual for defective ones. The decomposition is rejected when the
/// eigenvector matrix has condition number above `1/tol` or the
/// reconstruction residual exceeds `tol * ||M||_F`.
///
/// Output is sorted by `(re, im)` of the eigenvalue; exact ties (repeated
/// eigenvalues) are ordered by canonical eigenvector order.
pub fn eig_decompose(m: &ComplexMatrix, tol: f64) -> Result<(Frame, SpectrumVector)> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::invalid("tolerance must lie in (0, 1)"));
    }
    let n = m.n();
    let scale = m.frobenius();
    if scale == 0.0 {
        return Ok((Frame::standard(n), SpectrumVector(vec![c(0.0, 0.0); n])));
    }
    let schur::Schur { q, t } = schur::schur(m.as_matrix())?;
    let diag: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();

    // single-linkage clustering of the Schur diagonal
    let cluster_tol = 0.1 * tol * scale;
    let mut cluster: Vec<usize> = (0..n).collect();
    fn root(cl: &mut [usize], mut i: usize) -> usize {
        while cl[i] != i {
            cl[i] = cl[cl[i]];
            i = cl[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (diag[i] - diag[j]).norm() <= cluster_tol {
                let (ri, rj) = (root(&mut cluster, i), root(&mut cluster, j));
                if ri != rj {
                    cluster[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let ids: Vec<usize> = (0..n).map(|i| root(&mut cluster, i)).collect();
    let values: Vec<Complex64> = (0..n)
        .map(|i| {
            let members: Vec<_> = (0..n).filter(|&j| ids[j] == ids[i]).collect();
            members.iter().map(|&j| diag[j]).sum::<Complex64>() / members.len() as f64
        })
        .collect();

    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        y[(k, k)] = c(1.0, 0.0);
        for j in (0..k).rev() {
            if ids[j] == ids[k] {
                continue;
            }
            let mut acc = c(0.0, 0.0);
            for l in (j + 1)..=k {
                acc += t[(j, l)] * y[(l, k)];
            }
            y[(j, k)] = -acc / (t[(j, j)] - diag[k]);
        }
    }
    let v = q * y;
    let lines = (0..n)
        .map(|j| Line::new(v.column(j).into_owned()))
        .collect::<Result<Vec<_>>>()?;
    let frame = Frame::from_lines_unchecked(lines);
    let vn = frame.column_matrix();

    let condition = condition_number(&vn);
    if !condition.is_finite() || condition > 1.0 / tol {
        return Err(Error::NotSemisimple { condition, residual: f64::NAN });
    }
    let vinv = inverse(&vn).ok_or(Error::NotSemisimple { condition, residual: f64::NAN })?;
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(&values));
    let residual = (m.as_matrix() - &vn * d * vinv).norm();
    if !(residual <= tol * scale) {
        return Err(Error::NotSemisimple { condition, residual });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        cmp_lex(&values[a], &values[b]).then_with(|| frame.lines[a].canonical_cmp(&frame.lines[b]))
    });
    let lines = order.iter().map(|&i| frame.lines[i].clone()).collect();
    let spectrum = order.iter().map(|&i| values[i]).collect();
    Ok((Frame::from_lines_unchecked(lines), SpectrumVector(spectrum)))
}

/// Left polar decomposition `M = S U` with `S` Hermitian positive definite and
/// `U` unitary, by scaled Newton iteration on the unitary factor.
pub fn polar_decompose(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    check_invertible(m.as_matrix())?;
    let n = m.n();
    let mut x = m.as_matrix().clone();
    let mut converged = false;
    for _ in 0..100 {
        let xinv = inverse(&x).ok_or(Error::Singular { sigma_min: 0.0 })?;
        // Frobenius-norm scaling, dropped once close to convergence
        let gamma = (xinv.norm() / x.norm()).sqrt();
        let next = (&x * c(gamma, 0.0) + xinv.adjoint() * c(1.0 / gamma, 0.0)) * c(0.5, 0.0);
        let delta = (&next - &x).norm();
        x = next;
        if delta <= 1e-14 * x.norm() * (n as f64).sqrt() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence("polar Newton iteration"));
    }
    // polish the unitary factor once without scaling
    let xinv = inverse(&x).ok_or(Error::Singular { sigma_min: 0.0 })?;
    let u = (&x + xinv.adjoint()) * c(0.5, 0.0);
    let s = m.as_matrix() * u.adjoint();
    let s = (&s + s.adjoint()) * c(0.5, 0.0);
    Ok((ComplexMatrix(s), ComplexMatrix(u)))
}
