//! Complex Schur factorization `M = Q T Q*` by Hessenberg reduction followed by
//! implicit single-shift QR sweeps with Wilkinson shifts.

use nalgebra::{linalg::Hessenberg, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

pub(crate) struct Schur {
    pub q: DMatrix<Complex64>,
    pub t: DMatrix<Complex64>,
}

/// Plane rotation `[[c, s], [-conj(s), c]]` with real `c`.
#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    /// Rotation sending `(x, y)` to `(r, 0)`.
    fn zeroing(x: Complex64, y: Complex64) -> Self {
        let ax = x.norm();
        let ay = y.norm();
        if ay == 0.0 {
            return Givens { c: 1.0, s: Complex64::new(0.0, 0.0) };
        }
        if ax == 0.0 {
            return Givens { c: 0.0, s: y.conj() / ay };
        }
        let r = ax.hypot(ay);
        Givens { c: ax / r, s: (x / ax) * y.conj() / r }
    }

    fn rotate_rows(&self, m: &mut DMatrix<Complex64>, p: usize, q: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let a = m[(p, j)];
            let b = m[(q, j)];
            m[(p, j)] = a * self.c + self.s * b;
            m[(q, j)] = -self.s.conj() * a + b * self.c;
        }
    }

    /// Right multiplication by the adjoint rotation.
    fn rotate_cols(&self, m: &mut DMatrix<Complex64>, p: usize, q: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let a = m[(i, p)];
            let b = m[(i, q)];
            m[(i, p)] = a * self.c + b * self.s.conj();
            m[(i, q)] = -a * self.s + b * self.c;
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    // eigenvalue of [[a, b], [c, d]] closest to d
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

pub(crate) fn schur(m: &DMatrix<Complex64>) -> Result<Schur> {
    let n = m.nrows();
    if n == 1 {
        return Ok(Schur { q: DMatrix::identity(1, 1), t: m.clone() });
    }
    let (mut q, mut t) = Hessenberg::new(m.clone()).unpack();
    for j in 0..n {
        for i in (j + 2)..n {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }

    let eps = f64::EPSILON;
    let tiny = f64::MIN_POSITIVE / eps;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;

    while hi > 0 {
        // find the active window [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let scale = t[(lo, lo)].norm() + t[(lo - 1, lo - 1)].norm();
            if sub <= eps * scale || sub <= tiny {
                t[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if total > MAX_SWEEPS_PER_EIGENVALUE * n {
            return Err(Error::NoConvergence("complex Schur iteration"));
        }

        let shift = if iter % 11 == 0 {
            // exceptional shift to break cycles
            t[(hi, hi)] + Complex64::new(t[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            wilkinson_shift(
                t[(hi - 1, hi - 1)],
                t[(hi - 1, hi)],
                t[(hi, hi - 1)],
                t[(hi, hi)],
            )
        };

        let mut x = t[(lo, lo)] - shift;
        let mut y = t[(lo + 1, lo)];
        for k in lo..hi {
            let g = Givens::zeroing(x, y);
            let first_col = if k > lo { k - 1 } else { k };
            g.rotate_rows(&mut t, k, k + 1, first_col..n);
            let last_row = (k + 2).min(hi);
            g.rotate_cols(&mut t, k, k + 1, 0..last_row + 1);
            g.rotate_cols(&mut q, k, k + 1, 0..n);
            if k > lo {
                t[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
            }
            if k + 1 < hi {
                x = t[(k + 1, k)];
                y = t[(k + 2, k)];
            }
        }
    }

    for j in 0..n {
        for i in (j + 1)..n {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(Schur { q, t })
}

/// Eigenvalues (unordered) from the Schur diagonal.
pub(crate) fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let s = schur(m)?;
    Ok((0..m.nrows()).map(|i| s.t[(i, i)]).collect())
}
