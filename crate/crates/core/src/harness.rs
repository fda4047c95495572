//! Property harness: commuting-pair generators, the CS-preserver check,
//! eigenvalue-collision path probes and the scenario runner.

use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::config_space::{hypothesis_report_with_evidence, PointCloud, RegimeReport, ReportOptions};
use crate::divided_diff::ProbeReport;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{c, commutator_norm, ComplexMatrix};
use crate::operators::{
    conjugation_preserver, spectrum_distance, transpose_conjugation_preserver, Exotic, ExoticRoute, Preserver,
    SpectralDomain,
};
use crate::random::{random_frame, random_matrix, random_ortho_frame, rng_for};
use crate::wire::{pair, MatrixJson, Pair};

/// Default tolerance on spectrum drift and image commutators.
pub const DEFAULT_CS_TOL: f64 = 1e-8;
/// Eigenvalues closer than this are averaged before spectra are compared,
/// which makes the comparison insensitive to the `sqrt(eps)` splitting of
/// defective eigenvalues.
pub const EIGEN_CLUSTER_RADIUS: f64 = 1e-4;
/// Image difference below which a path is declared convergent.
pub const CONVERGENCE_STEP: f64 = 1e-6;
/// Norm growth over the last two decades of a ladder declared divergent.
pub const DIVERGENCE_GROWTH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Circle,
    Interval,
    Disk,
    Custom,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Circle => "circle",
            Scenario::Interval => "interval",
            Scenario::Disk => "disk",
            Scenario::Custom => "custom",
        }
    }

    /// Continuous domain of a reference scenario.
    pub fn domain(&self) -> Option<SpectralDomain> {
        match self {
            Scenario::Circle => Some(SpectralDomain::unit_circle()),
            Scenario::Interval => Some(SpectralDomain::real_interval(-1.0, 1.0)),
            Scenario::Disk => Some(SpectralDomain::unit_disk()),
            Scenario::Custom => None,
        }
    }

    /// Reference cloud at the default resolution.
    pub fn cloud(&self) -> Option<PointCloud> {
        match self {
            Scenario::Circle => PointCloud::circle(48).ok(),
            Scenario::Interval => PointCloud::interval(40).ok(),
            Scenario::Disk => PointCloud::disk(60).ok(),
            Scenario::Custom => None,
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(Scenario::Circle),
            "interval" => Ok(Scenario::Interval),
            "disk" => Ok(Scenario::Disk),
            "custom" => Ok(Scenario::Custom),
            _ => Err(Error::invalid(format!("unknown scenario `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameSource {
    /// Standard basis: both matrices diagonal.
    Standard,
    /// One random well-conditioned frame shared by both matrices.
    Random,
    /// One random orthonormal frame shared by both matrices (normal pair).
    Orthonormal,
    /// Two independent random frames; generally not commuting.
    Distinct,
}

impl FromStr for FrameSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(FrameSource::Standard),
            "random" => Ok(FrameSource::Random),
            "orthonormal" => Ok(FrameSource::Orthonormal),
            "distinct" => Ok(FrameSource::Distinct),
            _ => Err(Error::invalid(format!("unknown frame source `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputClass {
    Normal,
    Semisimple,
    /// Non-semisimple: a 2x2 Jordan block over a repeated eigenvalue.
    General,
}

impl InputClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            InputClass::Normal => "normal",
            InputClass::Semisimple => "semisimple",
            InputClass::General => "general",
        }
    }
}

impl FromStr for InputClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(InputClass::Normal),
            "semisimple" => Ok(InputClass::Semisimple),
            "general" => Ok(InputClass::General),
            _ => Err(Error::invalid(format!("unknown operator class `{s}`"))),
        }
    }
}

fn spectrum_gap(x: &SpectralDomain, n: usize) -> f64 {
    match x.kind() {
        "custom-cloud" => 1e-12,
        _ => 0.1_f64.min(1.0 / n as f64),
    }
}

fn draw_spectrum<R: Rng + ?Sized>(x: &SpectralDomain, n: usize, rng: &mut R) -> Result<Vec<Complex64>> {
    x.sample_distinct(n, spectrum_gap(x, n), rng)
        .ok_or_else(|| Error::Sampler(format!("cannot draw {n} distinct spectral values from the {} domain", x.kind())))
}

fn similar(v: &DMatrix<Complex64>, core: &DMatrix<Complex64>) -> Result<ComplexMatrix> {
    let v_inv = v.clone().try_inverse().ok_or(Error::Singular { sigma_min: 0.0 })?;
    ComplexMatrix::new(v * core * v_inv)
}

/// Two commuting matrices with spectra drawn from `x`, diagonal in a shared
/// frame (or, for [`FrameSource::Distinct`], in two independent frames).
pub fn random_commuting_pair(
    source: FrameSource,
    x: &SpectralDomain,
    n: usize,
    seed: u64,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let mut rng = rng_for(seed, 0);
    let (va, vb) = match source {
        FrameSource::Standard => (DMatrix::identity(n, n), DMatrix::identity(n, n)),
        FrameSource::Random => {
            let v = random_frame(n, &mut rng).column_matrix();
            (v.clone(), v)
        }
        FrameSource::Orthonormal => {
            let v = random_ortho_frame(n, &mut rng).column_matrix();
            (v.clone(), v)
        }
        FrameSource::Distinct => (random_frame(n, &mut rng).column_matrix(), random_frame(n, &mut rng).column_matrix()),
    };
    let da = DMatrix::from_diagonal(&draw_spectrum(x, n, &mut rng)?.into());
    let db = DMatrix::from_diagonal(&draw_spectrum(x, n, &mut rng)?.into());
    Ok((similar(&va, &da)?, similar(&vb, &db)?))
}

/// Commuting pair of the given class. The general class shares a 2x2 Jordan
/// block structure: both matrices repeat their first eigenvalue and carry a
/// nilpotent part on the same coordinates, so they commute.
pub fn commuting_pair_of_class<R: Rng + ?Sized>(
    class: InputClass,
    x: &SpectralDomain,
    n: usize,
    rng: &mut R,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let v = match class {
        InputClass::Normal => random_ortho_frame(n, rng).column_matrix(),
        _ => random_frame(n, rng).column_matrix(),
    };
    let mut cores = Vec::with_capacity(2);
    for _ in 0..2 {
        let mut spec = draw_spectrum(x, n, rng)?;
        let mut core = DMatrix::zeros(n, n);
        if class == InputClass::General {
            spec[1] = spec[0];
            core[(0, 1)] = Complex64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU));
        }
        for (i, z) in spec.into_iter().enumerate() {
            core[(i, i)] = z;
        }
        cores.push(core);
    }
    Ok((similar(&v, &cores[0])?, similar(&v, &cores[1])?))
}

/// Eigenvalues with clusters closer than [`EIGEN_CLUSTER_RADIUS`] replaced by
/// their mean (single linkage), multiplicities kept.
pub fn clustered_eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let eigs = m.eigenvalues()?;
    let n = eigs.len();
    let mut group: Vec<usize> = (0..n).collect();
    fn root(g: &mut [usize], mut i: usize) -> usize {
        while g[i] != i {
            g[i] = g[g[i]];
            i = g[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (eigs[i] - eigs[j]).norm() <= EIGEN_CLUSTER_RADIUS {
                let (a, b) = (root(&mut group, i), root(&mut group, j));
                group[a.max(b)] = a.min(b);
            }
        }
    }
    let mut sums = vec![(c(0.0, 0.0), 0usize); n];
    for i in 0..n {
        let r = root(&mut group, i);
        sums[r].0 += eigs[i];
        sums[r].1 += 1;
    }
    Ok((0..n).map(|i| {
        let (s, k) = sums[root(&mut group, i)];
        s / k as f64
    })
    .collect())
}

/// Maps the CS check knows by name, including the negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapName {
    Identity,
    /// `T -> T + I`; breaks spectra.
    Shift,
    Conjugation,
    TransposeConjugation,
    Exotic,
    ExoticPolar,
    /// `M -> P(M) M^t P(M)^-1` with `P(M)` a cyclic shift chosen from `M`
    /// itself; keeps spectra, breaks commutativity.
    InconsistentShuffle,
}

impl MapName {
    pub const ALL: [MapName; 7] = [
        MapName::Identity,
        MapName::Shift,
        MapName::Conjugation,
        MapName::TransposeConjugation,
        MapName::Exotic,
        MapName::ExoticPolar,
        MapName::InconsistentShuffle,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MapName::Identity => "identity",
            MapName::Shift => "shift",
            MapName::Conjugation => "conjugation",
            MapName::TransposeConjugation => "transpose-conjugation",
            MapName::Exotic => "exotic",
            MapName::ExoticPolar => "exotic-polar",
            MapName::InconsistentShuffle => "inconsistent-shuffle",
        }
    }
}

impl FromStr for MapName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MapName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown map `{s}`")))
    }
}

struct IdentityMap;

impl Preserver for IdentityMap {
    fn name(&self) -> String {
        "identity".into()
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(m.clone())
    }
}

struct ShiftMap;

impl Preserver for ShiftMap {
    fn name(&self) -> String {
        "shift".into()
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        ComplexMatrix::new(m.as_matrix() + DMatrix::identity(m.n(), m.n()))
    }
}

struct InconsistentShuffle;

impl Preserver for InconsistentShuffle {
    fn name(&self) -> String {
        "inconsistent-shuffle".into()
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = m.n();
        let shift = (0..n)
            .max_by(|&i, &j| m[(i, i)].norm().total_cmp(&m[(j, j)].norm()).then(j.cmp(&i)))
            .unwrap_or(0);
        let s = |i: usize| (i + shift) % n;
        ComplexMatrix::new(DMatrix::from_fn(n, n, |i, j| m[(s(j), s(i))]))
    }
}

/// Instantiates a named map; conjugating matrices are drawn from `seed`.
pub fn named_map(name: MapName, n: usize, seed: u64) -> Result<Box<dyn Preserver>> {
    let mut rng = rng_for(seed, u64::MAX);
    let t = loop {
        let t = random_matrix(n, &mut rng);
        if crate::linalg::condition_number(t.as_matrix()) < 1e2 {
            break t;
        }
    };
    Ok(match name {
        MapName::Identity => Box::new(IdentityMap),
        MapName::Shift => Box::new(ShiftMap),
        MapName::Conjugation => Box::new(conjugation_preserver(&t)?),
        MapName::TransposeConjugation => Box::new(transpose_conjugation_preserver(&t)?),
        MapName::Exotic => Box::new(Exotic(ExoticRoute::Eversion)),
        MapName::ExoticPolar => Box::new(Exotic(ExoticRoute::Polar)),
        MapName::InconsistentShuffle => Box::new(InconsistentShuffle),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsCheckConfig {
    pub map: MapName,
    pub domain: SpectralDomain,
    pub class: InputClass,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub exec: Exec,
}

impl CsCheckConfig {
    pub fn new(map: MapName, domain: SpectralDomain, class: InputClass, n: usize) -> Self {
        CsCheckConfig { map, domain, class, n, trials: 200, seed: 0, tol: DEFAULT_CS_TOL, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub input_commutator: f64,
    /// Larger bottleneck distance between input and image spectra of the pair.
    pub spectrum_drift: Option<f64>,
    /// Frobenius norm of the commutator of the two images.
    pub image_commutator: Option<f64>,
    /// Set when the map does not apply to a generated input.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsCheckReport {
    pub map: &'static str,
    pub domain: &'static str,
    pub class: &'static str,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_spectrum_drift: f64,
    pub max_commutator_norm: f64,
    pub applicable: usize,
    pub inapplicable: usize,
    pub pass: bool,
    pub records: Vec<TrialRecord>,
}

impl CsCheckReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,input_commutator,spectrum_drift,image_commutator,error\n");
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.trial,
                r.input_commutator,
                opt(r.spectrum_drift),
                opt(r.image_commutator),
                r.error.as_deref().unwrap_or("").replace(',', ";")
            ));
        }
        out
    }
}

fn run_trial(map: &dyn Preserver, cfg: &CsCheckConfig, trial: usize) -> TrialRecord {
    let mut rng = rng_for(cfg.seed, 1 + trial as u64);
    let mut record = TrialRecord { trial, input_commutator: f64::NAN, spectrum_drift: None, image_commutator: None, error: None };
    let outcome = (|| -> Result<(f64, f64, f64)> {
        let (a, b) = commuting_pair_of_class(cfg.class, &cfg.domain, cfg.n, &mut rng)?;
        let input = commutator_norm(&a, &b)?;
        let (fa, fb) = (map.apply(&a)?, map.apply(&b)?);
        let drift_a = spectrum_distance(&clustered_eigenvalues(&a)?, &clustered_eigenvalues(&fa)?);
        let drift_b = spectrum_distance(&clustered_eigenvalues(&b)?, &clustered_eigenvalues(&fb)?);
        Ok((input, drift_a.max(drift_b), commutator_norm(&fa, &fb)?))
    })();
    match outcome {
        Ok((input, drift, comm)) => {
            record.input_commutator = input;
            record.spectrum_drift = Some(drift);
            record.image_commutator = Some(comm);
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Applies the map to `trials` commuting pairs of the configured class and
/// records spectrum drift and image commutators. Inputs the map cannot take
/// are recorded, not fatal. Passes when at least one trial applied and both
/// maxima are within `tol`.
pub fn cs_preserver_check(cfg: &CsCheckConfig) -> Result<CsCheckReport> {
    if cfg.trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    if cfg.n < 2 {
        return Err(Error::invalid("n must be at least 2"));
    }
    let map = named_map(cfg.map, cfg.n, cfg.seed)?;
    let records = cfg.exec.map(cfg.trials, |t| run_trial(map.as_ref(), cfg, t));
    let max_of = |f: fn(&TrialRecord) -> Option<f64>| records.iter().filter_map(f).fold(0.0, f64::max);
    let max_spectrum_drift = max_of(|r| r.spectrum_drift);
    let max_commutator_norm = max_of(|r| r.image_commutator);
    let applicable = records.iter().filter(|r| r.error.is_none()).count();
    Ok(CsCheckReport {
        map: cfg.map.as_str(),
        domain: cfg.domain.kind(),
        class: cfg.class.as_str(),
        n: cfg.n,
        trials: cfg.trials,
        seed: cfg.seed,
        tolerance: cfg.tol,
        max_spectrum_drift,
        max_commutator_norm,
        applicable,
        inapplicable: cfg.trials - applicable,
        pass: applicable > 0 && max_spectrum_drift <= cfg.tol && max_commutator_norm <= cfg.tol,
        records,
    })
}

/// Fixed path families `T(t)` whose eigenvalues collide at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollisionFamily {
    /// `[[0, 1], [0, t]]`.
    Jordan2,
    /// Upper bidiagonal, diagonal `(-t, i t, t)`: three eigenvalues meeting
    /// at 0 from non-collinear directions.
    Jordan3Disk,
    /// Upper bidiagonal, diagonal `(e^{-it} - 1, 0, e^{it} - 1)`: collision
    /// along the unit circle translated to pass through 0 (the preservers
    /// commute with adding scalars, and the translated form keeps the small
    /// eigenvalue gaps exact).
    Jordan3Circle,
    /// Upper bidiagonal, diagonal `(-t, 0, t)`: collision along the real line.
    Jordan3Interval,
}

impl CollisionFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            CollisionFamily::Jordan2 => "jordan2",
            CollisionFamily::Jordan3Disk => "jordan3-disk",
            CollisionFamily::Jordan3Circle => "jordan3-circle",
            CollisionFamily::Jordan3Interval => "jordan3-interval",
        }
    }

    pub fn for_scenario(s: Scenario) -> Option<Self> {
        match s {
            Scenario::Circle => Some(CollisionFamily::Jordan3Circle),
            Scenario::Interval => Some(CollisionFamily::Jordan3Interval),
            Scenario::Disk => Some(CollisionFamily::Jordan3Disk),
            Scenario::Custom => None,
        }
    }

    pub fn matrix(&self, t: Complex64) -> ComplexMatrix {
        let bidiagonal = |d: [Complex64; 3]| {
            let mut m = DMatrix::zeros(3, 3);
            for i in 0..3 {
                m[(i, i)] = d[i];
            }
            m[(0, 1)] = c(1.0, 0.0);
            m[(1, 2)] = c(1.0, 0.0);
            m
        };
        let m = match self {
            CollisionFamily::Jordan2 => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), t]),
            CollisionFamily::Jordan3Disk => bidiagonal([-t, Complex64::i() * t, t]),
            CollisionFamily::Jordan3Circle => {
                // e^{is} - 1 = 2i sin(s/2) e^{is/2}, without cancellation
                let em1 = |s: Complex64| Complex64::i() * 2.0 * (s / 2.0).sin() * (Complex64::i() * s / 2.0).exp();
                bidiagonal([em1(-t), c(0.0, 0.0), em1(t)])
            }
            CollisionFamily::Jordan3Interval => bidiagonal([-t, c(0.0, 0.0), t]),
        };
        ComplexMatrix::new(m).expect("finite path matrix")
    }

    /// `|t|` ladder: decades down to `1e-7` for `jordan2`, half decades down
    /// to `1e-4` for the 3x3 families (whose eigenvector condition grows like
    /// `1/|t|^2`).
    pub fn default_ladder(&self) -> Vec<f64> {
        match self {
            CollisionFamily::Jordan2 => (1..=7).map(|k| 10f64.powi(-k)).collect(),
            _ => (2..=8).map(|k| 10f64.powf(-(k as f64) / 2.0)).collect(),
        }
    }
}

impl FromStr for CollisionFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            CollisionFamily::Jordan2,
            CollisionFamily::Jordan3Disk,
            CollisionFamily::Jordan3Circle,
            CollisionFamily::Jordan3Interval,
        ]
        .into_iter()
        .find(|f| f.as_str() == s)
        .ok_or_else(|| Error::invalid(format!("unknown path family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diagnosis {
    Converges,
    BoundedOscillates,
    Diverges,
}

impl Diagnosis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Diagnosis::Converges => "converges",
            Diagnosis::BoundedOscillates => "bounded-oscillates",
            Diagnosis::Diverges => "diverges",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionConfig {
    pub family: CollisionFamily,
    pub map: MapName,
    /// Ray angles `theta`; the path is `t = r e^{i theta}`.
    pub rays: Vec<f64>,
    /// Extra uniformly random ray angles drawn from `seed`.
    pub random_rays: usize,
    /// Strictly decreasing `|t|` values.
    pub ladder: Vec<f64>,
    pub seed: u64,
}

impl CollisionConfig {
    pub fn new(family: CollisionFamily) -> Self {
        CollisionConfig { family, map: MapName::Exotic, rays: vec![0.0], random_rays: 0, ladder: family.default_ladder(), seed: 0 }
    }

    pub fn with_rays(mut self, rays: Vec<f64>) -> Self {
        self.rays = rays;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathRecord {
    pub angle: f64,
    pub t: Vec<Pair>,
    /// Frobenius norms of the images.
    pub norms: Vec<f64>,
    /// Frobenius distance between consecutive images.
    pub steps: Vec<f64>,
    pub images: Vec<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionReport {
    pub family: &'static str,
    pub map: &'static str,
    pub ladder: Vec<f64>,
    pub paths: Vec<PathRecord>,
    pub diagnosis: Diagnosis,
    /// Least-squares slope of `log ||image||` against `log(1/|t|)`, largest
    /// over paths.
    pub growth_exponent: f64,
    /// Common last image when the diagnosis is `converges`.
    pub limit: Option<MatrixJson>,
}

impl CollisionReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("angle,t_re,t_im,norm\n");
        for p in &self.paths {
            for (t, norm) in p.t.iter().zip(&p.norms) {
                out.push_str(&format!("{},{},{},{}\n", p.angle, t[0], t[1], norm));
            }
        }
        out
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

/// Follows the named map along `T(r e^{i theta})` for each ray and diagnoses
/// the behavior as `t -> 0`: `diverges` if some path's norm grows at least
/// tenfold over the ladder's last two decades; `converges` if every path's
/// last step is below `1e-6` and all paths end at the same image; otherwise
/// `bounded-oscillates`.
pub fn collision_path_probe(cfg: &CollisionConfig) -> Result<CollisionReport> {
    if cfg.ladder.len() < 2 {
        return Err(Error::invalid("the t ladder needs at least two values"));
    }
    if cfg.ladder.iter().any(|r| !(*r > 0.0)) || cfg.ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("the t ladder must be positive and strictly decreasing"));
    }
    let mut rays = cfg.rays.clone();
    let mut rng = rng_for(cfg.seed, 0);
    rays.extend((0..cfg.random_rays).map(|_| rng.random_range(0.0..std::f64::consts::TAU)));
    if rays.is_empty() {
        return Err(Error::invalid("no rays to probe"));
    }
    let size = cfg.family.matrix(c(1.0, 0.0)).n();
    let map = named_map(cfg.map, size, cfg.seed)?;

    let mut paths = Vec::with_capacity(rays.len());
    let mut last_images: Vec<DMatrix<Complex64>> = Vec::new();
    for &angle in &rays {
        let mut record = PathRecord { angle, t: vec![], norms: vec![], steps: vec![], images: vec![] };
        let mut prev: Option<DMatrix<Complex64>> = None;
        for &r in &cfg.ladder {
            let t = Complex64::from_polar(r, angle);
            let image = map.apply(&cfg.family.matrix(t))?;
            if let Some(p) = &prev {
                record.steps.push((image.as_matrix() - p).norm());
            }
            record.t.push(pair(t));
            record.norms.push(image.frobenius());
            record.images.push(MatrixJson::from(&image));
            prev = Some(image.into_inner());
        }
        last_images.extend(prev);
        paths.push(record);
    }

    let last_r = *cfg.ladder.last().unwrap();
    let anchor = cfg
        .ladder
        .iter()
        .rposition(|&r| r >= 100.0 * last_r * (1.0 - 1e-9))
        .unwrap_or(0);
    let diverges = paths.iter().any(|p| p.norms[p.norms.len() - 1] >= DIVERGENCE_GROWTH * p.norms[anchor]);
    let settled = paths.iter().all(|p| p.steps.last().is_some_and(|&s| s < CONVERGENCE_STEP));
    let agree = last_images.windows(2).all(|w| (&w[0] - &w[1]).norm() < CONVERGENCE_STEP);
    let diagnosis = if diverges {
        Diagnosis::Diverges
    } else if settled && agree {
        Diagnosis::Converges
    } else {
        Diagnosis::BoundedOscillates
    };
    let xs: Vec<f64> = cfg.ladder.iter().map(|r| -r.log10()).collect();
    let growth_exponent = paths
        .iter()
        .map(|p| slope(&xs, &p.norms.iter().map(|v| v.log10()).collect::<Vec<_>>()))
        .fold(f64::NEG_INFINITY, f64::max);
    let limit = (diagnosis == Diagnosis::Converges).then(|| paths[0].images.last().cloned()).flatten();
    Ok(CollisionReport {
        family: cfg.family.as_str(),
        map: cfg.map.as_str(),
        ladder: cfg.ladder.clone(),
        paths,
        diagnosis,
        growth_exponent,
        limit,
    })
}

/// The default two-ray `jordan2` probe: `theta = 0` and `theta = pi/2`.
pub fn two_ray_jordan2() -> CollisionConfig {
    CollisionConfig::new(CollisionFamily::Jordan2).with_rays(vec![0.0, FRAC_PI_2])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    /// Required for [`Scenario::Custom`].
    pub cloud: Option<PointCloud>,
    /// Overrides the scenario's domain; custom scenarios default to the cloud.
    pub domain: Option<SpectralDomain>,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub exec: Exec,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario, n: usize) -> Self {
        ExperimentConfig { scenario, cloud: None, domain: None, n, trials: 200, seed: 0, tol: DEFAULT_CS_TOL, exec: Exec::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("n must be at least 2"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if self.scenario == Scenario::Custom && self.cloud.is_none() {
            return Err(Error::invalid("the custom scenario needs a point cloud"));
        }
        Ok(())
    }

    pub fn resolved_cloud(&self) -> Result<PointCloud> {
        self.cloud
            .clone()
            .or_else(|| self.scenario.cloud())
            .ok_or_else(|| Error::invalid("no point cloud for scenario"))
    }

    pub fn resolved_domain(&self) -> Result<SpectralDomain> {
        match (&self.domain, self.scenario.domain()) {
            (Some(d), _) => Ok(d.clone()),
            (None, Some(d)) => Ok(d),
            (None, None) => SpectralDomain::cloud(self.resolved_cloud()?),
        }
    }
}

/// CS-check outcome without per-trial records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsCheckSummary {
    pub map: &'static str,
    pub class: &'static str,
    pub max_spectrum_drift: f64,
    pub max_commutator_norm: f64,
    pub applicable: usize,
    pub inapplicable: usize,
    pub pass: bool,
    /// Whether the map is expected to pass (false for negative controls).
    pub expected_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: &'static str,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub regime: Option<RegimeReport>,
    pub probes: Vec<ProbeReport>,
    pub cs_checks: Vec<CsCheckSummary>,
    pub collisions: Vec<CollisionReport>,
    pub failures: Vec<String>,
    pub passed: bool,
}

impl ScenarioReport {
    /// Plot-ready probe table: one row per (center, radius).
    pub fn probes_csv(&self) -> String {
        let mut out = String::from("center_re,center_im,radius,sup,oscillation\n");
        for p in &self.probes {
            for i in 0..p.radii.len() {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    p.center.re, p.center.im, p.radii[i], p.sup_values[i], p.oscillation_values[i]
                ));
            }
        }
        out
    }

    /// Plot-ready collision table: one row per (family, ray, t).
    pub fn collisions_csv(&self) -> String {
        let mut out = String::from("family,angle,t_re,t_im,norm\n");
        for c in &self.collisions {
            for p in &c.paths {
                for (t, norm) in p.t.iter().zip(&p.norms) {
                    out.push_str(&format!("{},{},{},{},{}\n", c.family, p.angle, t[0], t[1], norm));
                }
            }
        }
        out
    }
}

/// Runs a scenario's bundle: the regime report with its probe evidence, CS
/// checks of the preserver families on every operator class, the negative
/// controls, and the collision probes. Constituent failures are collected in
/// `failures`; configuration problems are returned as errors.
pub fn run_scenario(cfg: &ExperimentConfig) -> Result<ScenarioReport> {
    cfg.validate()?;
    let cloud = cfg.resolved_cloud()?;
    let domain = cfg.resolved_domain()?;
    let mut failures = Vec::new();

    let options = ReportOptions { exec: cfg.exec, ..ReportOptions::default() }.with_seed(cfg.seed);
    let (regime, probes) = match hypothesis_report_with_evidence(&cloud, &domain, cfg.n, &options) {
        Ok((report, verdict)) => {
            let probes = verdict.map(|v| v.evidence.into_iter().map(|e| e.report).collect()).unwrap_or_default();
            (Some(report), probes)
        }
        Err(e @ Error::BudgetExceeded { .. }) => return Err(e),
        Err(e) => {
            failures.push(format!("regime report: {e}"));
            (None, Vec::new())
        }
    };
    if let Some(r) = &regime {
        if !r.perfect {
            failures.push(format!("set is not perfect: {} isolated points", r.isolated_points.len()));
        }
    }

    let mut plan: Vec<(MapName, InputClass, bool)> = Vec::new();
    for class in [InputClass::Normal, InputClass::Semisimple, InputClass::General] {
        plan.push((MapName::Conjugation, class, true));
        plan.push((MapName::TransposeConjugation, class, true));
    }
    for class in [InputClass::Normal, InputClass::Semisimple] {
        plan.push((MapName::Exotic, class, true));
        plan.push((MapName::ExoticPolar, class, true));
    }
    plan.push((MapName::Shift, InputClass::Semisimple, false));
    plan.push((MapName::InconsistentShuffle, InputClass::Semisimple, false));

    let mut cs_checks = Vec::with_capacity(plan.len());
    for (i, (map, class, expected_pass)) in plan.into_iter().enumerate() {
        let check = CsCheckConfig {
            map,
            domain: domain.clone(),
            class,
            n: cfg.n,
            trials: cfg.trials,
            seed: cfg.seed.wrapping_add(i as u64),
            tol: cfg.tol,
            exec: cfg.exec,
        };
        let r = cs_preserver_check(&check)?;
        if r.pass != expected_pass {
            failures.push(if expected_pass {
                format!("cs-check {} on {} inputs failed", r.map, r.class)
            } else {
                format!("negative control {} passed", r.map)
            });
        }
        cs_checks.push(CsCheckSummary {
            map: r.map,
            class: r.class,
            max_spectrum_drift: r.max_spectrum_drift,
            max_commutator_norm: r.max_commutator_norm,
            applicable: r.applicable,
            inapplicable: r.inapplicable,
            pass: r.pass,
            expected_pass,
        });
    }

    let mut collisions = Vec::new();
    let real_ray = collision_path_probe(&CollisionConfig { seed: cfg.seed, ..CollisionConfig::new(CollisionFamily::Jordan2) })?;
    if real_ray.diagnosis != Diagnosis::Converges {
        failures.push(format!("jordan2 real ray: {}", real_ray.diagnosis.as_str()));
    }
    collisions.push(real_ray);
    let two_rays = collision_path_probe(&CollisionConfig { seed: cfg.seed, ..two_ray_jordan2() })?;
    if two_rays.diagnosis != Diagnosis::BoundedOscillates {
        failures.push(format!("jordan2 two rays: {}", two_rays.diagnosis.as_str()));
    }
    collisions.push(two_rays);
    if let Some(family) = CollisionFamily::for_scenario(cfg.scenario) {
        collisions.push(collision_path_probe(&CollisionConfig { seed: cfg.seed, ..CollisionConfig::new(family) })?);
    }

    Ok(ScenarioReport {
        scenario: cfg.scenario.as_str(),
        n: cfg.n,
        trials: cfg.trials,
        seed: cfg.seed,
        tolerance: cfg.tol,
        regime,
        probes,
        cs_checks,
        collisions,
        passed: failures.is_empty(),
        failures,
    })
}
