//! Semisimple operators `(l | lambda)`, spectral domains, operator classes and
//! the preserver families: conjugation, transpose conjugation, and the
//! exotic eversion preserver with two independent computation routes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::config_space::PointCloud;
use crate::error::{Error, Result};
use crate::frames::evert;
use crate::linalg::{
    c, check_invertible, eig_decompose, inverse, polar_decompose, ComplexMatrix, Frame,
    DEFAULT_EIG_TOL, DEFAULT_FRAME_TOL,
};

pub use crate::linalg::SpectrumVector;

/// Default membership tolerance of a [`SpectralDomain`].
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-6;
/// Relative eigenvalue gap below which the two exotic routes are not
/// compared.
pub const DEFAULT_ROUTE_GAP: f64 = 0.05;

/// The semisimple operator with eigenvalue `spectrum[i]` along `frame[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemisimpleOp {
    frame: Frame,
    spectrum: SpectrumVector,
}

impl SemisimpleOp {
    pub fn new(frame: Frame, spectrum: SpectrumVector) -> Result<Self> {
        if frame.n() != spectrum.len() {
            return Err(Error::DimensionMismatch { expected: frame.n(), actual: spectrum.len() });
        }
        Ok(SemisimpleOp { frame, spectrum })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn spectrum(&self) -> &SpectrumVector {
        &self.spectrum
    }

    pub fn n(&self) -> usize {
        self.frame.n()
    }

    /// `V diag(lambda) V^-1` for the column matrix `V` of the frame.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let v = self.frame.column_matrix();
        let condition = self.frame.condition();
        if !condition.is_finite() || condition > 1.0 / DEFAULT_FRAME_TOL {
            return Err(Error::Degenerate { condition });
        }
        let vinv = inverse(&v).ok_or(Error::Degenerate { condition })?;
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(self.spectrum.values()));
        ComplexMatrix::new(v * d * vinv)
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        Self::from_matrix_with_tolerance(m, DEFAULT_EIG_TOL)
    }

    pub fn from_matrix_with_tolerance(m: &ComplexMatrix, tol: f64) -> Result<Self> {
        let (frame, spectrum) = eig_decompose(m, tol)?;
        Ok(SemisimpleOp { frame, spectrum })
    }

    /// `(l | lambda) -> (l | f(lambda))`; `f` returns `None` where undefined.
    pub fn functional_calculus<F>(&self, f: F) -> Result<SemisimpleOp>
    where
        F: Fn(Complex64) -> Option<Complex64>,
    {
        let values = self
            .spectrum
            .values()
            .iter()
            .map(|&z| match f(z) {
                Some(w) if w.re.is_finite() && w.im.is_finite() => Ok(w),
                _ => Err(Error::Undefined(format!("{z}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SemisimpleOp { frame: self.frame.clone(), spectrum: SpectrumVector::new(values)? })
    }
}

/// `Phi(l | lambda) = (l' | lambda)` with `l'` the everted frame.
pub fn exotic_evert(t: &SemisimpleOp) -> Result<SemisimpleOp> {
    Ok(SemisimpleOp { frame: evert(&t.frame)?, spectrum: t.spectrum.clone() })
}

/// `Ad_S N -> Ad_{S^-1} N`: polar-decompose the eigenvector matrix
/// `V = S U`, set `N = U diag(lambda) U*`, return `S^-1 N S`.
pub fn exotic_polar(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (frame, spectrum) = eig_decompose(m, DEFAULT_EIG_TOL)?;
    let v = ComplexMatrix::new(frame.column_matrix())?;
    let (s, u) = polar_decompose(&v)?;
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(spectrum.values()));
    let normal = u.as_matrix() * d * u.as_matrix().adjoint();
    let s_inv = inverse(s.as_matrix()).ok_or(Error::Singular { sigma_min: 0.0 })?;
    ComplexMatrix::new(s_inv * normal * s.as_matrix())
}

/// Region `X` of the complex plane containing admissible spectra.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainShape {
    Circle { center: Complex64, radius: f64 },
    /// Closed segment from `start` to `end`.
    Interval { start: Complex64, end: Complex64 },
    Disk { center: Complex64, radius: f64 },
    Cloud(PointCloud),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDomain {
    pub shape: DomainShape,
    pub tolerance: f64,
}

impl SpectralDomain {
    pub fn new(shape: DomainShape, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::invalid("membership tolerance must be positive"));
        }
        match &shape {
            DomainShape::Circle { radius, .. } | DomainShape::Disk { radius, .. } if !(*radius > 0.0) => {
                return Err(Error::invalid("radius must be positive"));
            }
            DomainShape::Interval { start, end } if start == end => {
                return Err(Error::invalid("interval endpoints coincide"));
            }
            DomainShape::Cloud(cloud) if cloud.points().is_empty() => {
                return Err(Error::invalid("point cloud is empty"));
            }
            _ => {}
        }
        Ok(SpectralDomain { shape, tolerance })
    }

    pub fn unit_circle() -> Self {
        Self::new(DomainShape::Circle { center: c(0., 0.), radius: 1.0 }, DEFAULT_MEMBERSHIP_TOL).unwrap()
    }

    pub fn unit_disk() -> Self {
        Self::new(DomainShape::Disk { center: c(0., 0.), radius: 1.0 }, DEFAULT_MEMBERSHIP_TOL).unwrap()
    }

    /// The real segment `[a, b]`.
    pub fn real_interval(a: f64, b: f64) -> Self {
        Self::new(DomainShape::Interval { start: c(a, 0.), end: c(b, 0.) }, DEFAULT_MEMBERSHIP_TOL).unwrap()
    }

    pub fn cloud(cloud: PointCloud) -> Result<Self> {
        Self::new(DomainShape::Cloud(cloud), DEFAULT_MEMBERSHIP_TOL)
    }

    pub fn kind(&self) -> &'static str {
        match self.shape {
            DomainShape::Circle { .. } => "circle",
            DomainShape::Interval { .. } => "interval",
            DomainShape::Disk { .. } => "disk",
            DomainShape::Cloud(_) => "custom-cloud",
        }
    }

    /// Euclidean distance from `z` to the domain.
    pub fn distance(&self, z: Complex64) -> f64 {
        match &self.shape {
            DomainShape::Circle { center, radius } => ((z - center).norm() - radius).abs(),
            DomainShape::Disk { center, radius } => ((z - center).norm() - radius).max(0.0),
            DomainShape::Interval { start, end } => {
                let d = end - start;
                let s = ((z - start) * d.conj()).re / d.norm_sqr();
                let p = start + d * s.clamp(0.0, 1.0);
                (z - p).norm()
            }
            DomainShape::Cloud(cloud) => {
                cloud.points().iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.distance(z) <= self.tolerance
    }

    /// One point drawn from the domain (uniform in arclength or area; a
    /// uniformly chosen cloud point).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        match &self.shape {
            DomainShape::Circle { center, radius } => {
                let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                center + Complex64::from_polar(*radius, t)
            }
            DomainShape::Disk { center, radius } => {
                let r = radius * rng.random::<f64>().sqrt();
                let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                center + Complex64::from_polar(r, t)
            }
            DomainShape::Interval { start, end } => {
                let s: f64 = rng.random();
                start + (end - start) * s
            }
            DomainShape::Cloud(cloud) => cloud.points()[rng.random_range(0..cloud.points().len())],
        }
    }

    /// `n` points of the domain with pairwise distance at least `min_gap`,
    /// or `None` after a bounded number of attempts.
    pub fn sample_distinct<R: Rng + ?Sized>(&self, n: usize, min_gap: f64, rng: &mut R) -> Option<Vec<Complex64>> {
        for _ in 0..1000 {
            let mut pts: Vec<Complex64> = Vec::with_capacity(n);
            for _ in 0..(50 * n) {
                let z = self.sample(rng);
                if pts.iter().all(|p| (p - z).norm() >= min_gap) {
                    pts.push(z);
                    if pts.len() == n {
                        return Some(pts);
                    }
                }
            }
        }
        None
    }
}

/// Strongest operator class of a matrix relative to a spectral domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorClass {
    Normal,
    Semisimple,
    General,
    Outside,
}

impl OperatorClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            OperatorClass::Normal => "normal",
            OperatorClass::Semisimple => "semisimple",
            OperatorClass::General => "general",
            OperatorClass::Outside => "outside",
        }
    }
}

/// Classifies `m`: `Outside` if some eigenvalue lies farther than `tol` from
/// `x`, otherwise the strongest of normal / semisimple / general.
pub fn membership_class(m: &ComplexMatrix, x: &SpectralDomain, tol: f64) -> Result<OperatorClass> {
    let eigs = m.eigenvalues()?;
    if eigs.iter().any(|&z| x.distance(z) > tol) {
        return Ok(OperatorClass::Outside);
    }
    if m.is_normal(DEFAULT_EIG_TOL) {
        return Ok(OperatorClass::Normal);
    }
    match eig_decompose(m, DEFAULT_EIG_TOL) {
        Ok(_) => Ok(OperatorClass::Semisimple),
        Err(Error::NotSemisimple { .. }) => Ok(OperatorClass::General),
        Err(e) => Err(e),
    }
}

/// A map on `M_n(C)` tested for commutativity and spectrum preservation.
pub trait Preserver: Send + Sync {
    fn name(&self) -> String;
    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix>;
}

/// `S -> T S T^-1`.
#[derive(Debug, Clone)]
pub struct Conjugation {
    t: DMatrix<Complex64>,
    t_inv: DMatrix<Complex64>,
}

pub fn conjugation_preserver(t: &ComplexMatrix) -> Result<Conjugation> {
    check_invertible(t.as_matrix())?;
    let t_inv = inverse(t.as_matrix()).ok_or(Error::Singular { sigma_min: 0.0 })?;
    Ok(Conjugation { t: t.as_matrix().clone(), t_inv })
}

impl Preserver for Conjugation {
    fn name(&self) -> String {
        "conjugation".into()
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.n() != self.t.nrows() {
            return Err(Error::DimensionMismatch { expected: self.t.nrows(), actual: m.n() });
        }
        ComplexMatrix::new(&self.t * m.as_matrix() * &self.t_inv)
    }
}

/// `S -> T S^t T^-1`, transpose in the standard basis.
#[derive(Debug, Clone)]
pub struct TransposeConjugation(Conjugation);

pub fn transpose_conjugation_preserver(t: &ComplexMatrix) -> Result<TransposeConjugation> {
    Ok(TransposeConjugation(conjugation_preserver(t)?))
}

impl Preserver for TransposeConjugation {
    fn name(&self) -> String {
        "transpose-conjugation".into()
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.0.apply(&m.transpose())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExoticRoute {
    /// Evert the eigenframe, keep the spectrum.
    Eversion,
    /// `Ad_S N -> Ad_{S^-1} N` through the polar factor of the eigenbasis.
    Polar,
}

/// The exotic preserver on semisimple matrices.
#[derive(Debug, Clone, Copy)]
pub struct Exotic(pub ExoticRoute);

impl Preserver for Exotic {
    fn name(&self) -> String {
        match self.0 {
            ExoticRoute::Eversion => "exotic".into(),
            ExoticRoute::Polar => "exotic-polar".into(),
        }
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        match self.0 {
            ExoticRoute::Eversion => exotic_evert(&SemisimpleOp::from_matrix(m)?)?.to_matrix(),
            ExoticRoute::Polar => exotic_polar(m),
        }
    }
}

/// Bottleneck distance between two eigenvalue multisets: the smallest `d`
/// admitting a bijection moving every value by at most `d`.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let dist: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let mut candidates: Vec<f64> = dist.iter().flatten().copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let perfect = |thr: f64| -> bool {
        // Kuhn's augmenting paths on the threshold graph
        fn augment(u: usize, thr: f64, dist: &[Vec<f64>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
            for v in 0..dist.len() {
                if dist[u][v] <= thr && !seen[v] {
                    seen[v] = true;
                    if owner[v].is_none_or(|w| augment(w, thr, dist, seen, owner)) {
                        owner[v] = Some(u);
                        return true;
                    }
                }
            }
            false
        }
        let mut owner = vec![None; n];
        (0..n).all(|u| augment(u, thr, &dist, &mut vec![false; n], &mut owner))
    };

    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}
