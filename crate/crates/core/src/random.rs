//! Seeded generators for random matrices, frames and unitaries.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, Frame, Line, OrthoFrame};

/// Per-task generator: the same `(seed, stream)` pair always yields the same
/// sequence, independent of scheduling.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

pub fn random_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::new(gaussian_matrix(n, rng)).expect("gaussian matrix is finite")
}

/// Haar-distributed unitary (QR of a Gaussian matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let qr = gaussian_matrix(n, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Frame spanned by Gaussian directions, redrawn until well conditioned.
pub fn random_frame<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Frame {
    loop {
        let g = gaussian_matrix(n, rng);
        if let Ok(f) = Frame::from_columns(&g) {
            if f.condition() < 1e3 {
                return f;
            }
        }
    }
}

pub fn random_ortho_frame<R: Rng + ?Sized>(n: usize, rng: &mut R) -> OrthoFrame {
    let u = random_unitary(n, rng);
    let lines = (0..n).map(|j| Line::new(u.column(j).into_owned()).expect("unit column")).collect();
    OrthoFrame::new(Frame::new(lines).expect("unitary columns span")).expect("unitary columns are orthogonal")
}
