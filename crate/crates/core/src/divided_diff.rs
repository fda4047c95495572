//! The difference operator, its iterates (divided differences), and sampling
//! probes for local boundedness and limits of `Delta^k f` near diagonal
//! tuples of a spectral domain.
//!
//! The probes gather evidence; they cannot prove membership in a regularity
//! class. Every verdict they produce is heuristic.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::operators::{DomainShape, SpectralDomain};
use crate::random::rng_for;

/// A tuple of pairwise-distinct complex points.
#[derive(Debug, Clone, PartialEq)]
pub struct TuplePoint(Vec<Complex64>);

impl TuplePoint {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("empty tuple"));
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(Error::CoincidentPoints(i, j));
                }
            }
        }
        Ok(TuplePoint(points))
    }

    pub fn points(&self) -> &[Complex64] {
        &self.0
    }

    /// Order of the divided difference this tuple supports (`len - 1`).
    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn min_separation(&self) -> f64 {
        let p = &self.0;
        let mut best = f64::INFINITY;
        for i in 0..p.len() {
            for j in (i + 1)..p.len() {
                best = best.min((p[i] - p[j]).norm());
            }
        }
        best
    }
}

/// One application of the difference operator to a symmetric function of
/// `len - 1` variables:
/// `(f(z_1..z_k) - f(z_0..z_{k-1})) / (z_k - z_0)`.
pub fn delta<F>(f: F, t: &TuplePoint) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Complex64,
{
    let p = t.points();
    let k = p.len() - 1;
    if k == 0 {
        return Err(Error::invalid("the difference operator needs at least two points"));
    }
    let denom = p[k] - p[0];
    if denom.norm() == 0.0 {
        return Err(Error::CoincidentPoints(0, k));
    }
    Ok((f(&p[1..]) - f(&p[..k])) / denom)
}

/// Orders points along their dominant direction (argument relative to the
/// tuple's mean direction), which keeps the extreme points at the ends of the
/// Newton table.
fn newton_order(points: &[Complex64]) -> Vec<Complex64> {
    let mean: Complex64 = points.iter().sum::<Complex64>() / points.len() as f64;
    let axis = if mean.norm() > 0.0 { mean.conj() / mean.norm() } else { Complex64::new(1.0, 0.0) };
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| {
        (a * axis)
            .arg()
            .total_cmp(&(b * axis).arg())
            .then(a.norm().total_cmp(&b.norm()))
    });
    sorted
}

/// Newton table on ordered points, with a running bound on the rounding
/// error that treats each function value as carrying one unit of roundoff.
fn newton(z: &[Complex64], mut d: Vec<Complex64>) -> (Complex64, f64) {
    const U: f64 = f64::EPSILON;
    let mut e: Vec<f64> = d.iter().map(|v| U * v.norm()).collect();
    let k = z.len() - 1;
    for level in 1..=k {
        for i in (level..=k).rev() {
            let h = (z[i] - z[i - level]).norm();
            d[i] = (d[i] - d[i - 1]) / (z[i] - z[i - level]);
            e[i] = (e[i] + e[i - 1]) / h + 2.0 * U * d[i].norm();
        }
    }
    (d[k], e[k])
}

/// `Delta^k f` at a `(k+1)`-tuple, from the Newton divided-difference table.
pub fn iterated_delta<F>(f: F, t: &TuplePoint) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    iterated_delta_with_bound(f, t).0
}

/// [`iterated_delta`] together with a first-order bound on its rounding error.
pub fn iterated_delta_with_bound<F>(f: F, t: &TuplePoint) -> (Complex64, f64)
where
    F: Fn(Complex64) -> Complex64,
{
    let z = newton_order(t.points());
    let d = z.iter().map(|&x| f(x)).collect();
    newton(&z, d)
}

/// Closed form of `Delta^k conj` on the unit circle, where `conj(z) = 1/z`:
/// `(-1)^k / prod z_i`.
pub fn circle_conj_oracle(points: &[Complex64], k: usize) -> Result<Complex64> {
    if points.len() != k + 1 {
        return Err(Error::DimensionMismatch { expected: k + 1, actual: points.len() });
    }
    if let Some(z) = points.iter().find(|z| (z.norm() - 1.0).abs() > 1e-10) {
        return Err(Error::OffCircle { re: z.re, im: z.im });
    }
    let prod: Complex64 = points.iter().product();
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(Complex64::new(sign, 0.0) / prod)
}

/// Sampling parameters shared by the boundedness and limit probes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    /// Strictly decreasing radii.
    pub radii: Vec<f64>,
    pub samples_per_radius: usize,
    pub seed: u64,
    /// Tuples whose points come closer than `separation_floor * radius` are
    /// discarded to keep quotients in double-precision range.
    pub separation_floor: f64,
    /// Oscillation below which a limit is called plausible.
    pub oscillation_limit: f64,
    /// Tuples whose rounding-error bound exceeds `noise_fraction *
    /// oscillation_limit * max(1, |value|)` are discarded.
    pub noise_fraction: f64,
    pub exec: Exec,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            radii: default_radii(),
            samples_per_radius: 128,
            seed: 0,
            separation_floor: 1e-8,
            oscillation_limit: 1e-3,
            noise_fraction: 1e-2,
            exec: Exec::default(),
        }
    }
}

/// `1e-1, 1e-2, ..., 1e-5`.
pub fn default_radii() -> Vec<f64> {
    (1..=5).map(|e| 10f64.powi(-e)).collect()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ProbeReport {
    pub center: Complex64,
    pub k: usize,
    pub radii: Vec<f64>,
    /// Per radius, the largest `|Delta^k f|` over sampled tuples.
    pub sup_values: Vec<f64>,
    /// Per radius, the diameter of the set of sampled `Delta^k f` values.
    pub oscillation_values: Vec<f64>,
    pub sample_counts: Vec<usize>,
    /// Set by [`limit_probe`]: oscillation at the smallest radius below the
    /// configured limit.
    pub limit_plausible: Option<bool>,
    /// The ladder was cut by rounding before its smallest radius and the
    /// limit flag rests on extrapolating the oscillation trend.
    pub extrapolated: bool,
}

impl ProbeReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,sup,oscillation\n");
        for i in 0..self.radii.len() {
            out.push_str(&format!("{},{},{}\n", self.radii[i], self.sup_values[i], self.oscillation_values[i]));
        }
        out
    }
}

/// Normalized sample shapes, mapped onto the domain at every radius.
enum Shape {
    /// Offsets in `[-1, 1]` along a one-dimensional domain.
    Line(Vec<f64>),
    /// Offsets in the closed unit disk.
    Planar(Vec<Complex64>),
}

fn draw_shape<R: Rng>(x: &SpectralDomain, k: usize, rng: &mut R) -> Shape {
    match x.shape {
        DomainShape::Circle { .. } | DomainShape::Interval { .. } => {
            Shape::Line((0..=k).map(|_| rng.random_range(-1.0..=1.0)).collect())
        }
        _ => Shape::Planar(
            (0..=k)
                .map(|_| {
                    let r = rng.random::<f64>().sqrt();
                    Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
                })
                .collect(),
        ),
    }
}

/// Evenly spread offsets: equispaced along a curve, on a half circle in the
/// plane. On the disk this is the family `z + r(-1, i, 1)` for `k = 2`.
fn adversarial_shape(x: &SpectralDomain, k: usize) -> Option<Shape> {
    match x.shape {
        DomainShape::Circle { .. } | DomainShape::Interval { .. } => {
            Some(Shape::Line((0..=k).map(|j| if k == 0 { 0.0 } else { 2.0 * j as f64 / k as f64 - 1.0 }).collect()))
        }
        DomainShape::Disk { .. } => Some(Shape::Planar(
            (0..=k)
                .map(|j| {
                    let t = if k == 0 { 0.0 } else { 1.0 - j as f64 / k as f64 };
                    Complex64::from_polar(1.0, std::f64::consts::PI * t)
                })
                .collect(),
        )),
        DomainShape::Cloud(_) => None,
    }
}

/// Places a normalized shape within distance `r` of `z` on the domain. Near
/// an interval end the window is cut to the interval; near the disk boundary
/// offsets are turned inward and then projected onto the disk, which never
/// increases their distance to `z`.
fn realize(x: &SpectralDomain, z: Complex64, r: f64, shape: &Shape) -> Option<Vec<Complex64>> {
    let pts: Vec<Complex64> = match (&x.shape, shape) {
        (DomainShape::Circle { center, radius }, Shape::Line(s)) => {
            let phi = (z - center).arg();
            let half = 2.0 * (r / (2.0 * radius)).min(1.0).asin();
            s.iter().map(|t| center + Complex64::from_polar(*radius, phi + t * half)).collect()
        }
        (DomainShape::Interval { start, end }, Shape::Line(s)) => {
            let d = end - start;
            let t0 = ((z - start) * d.conj()).re / d.norm_sqr();
            let half = r / d.norm();
            let (lo, hi) = ((t0 - half).max(0.0), (t0 + half).min(1.0));
            s.iter().map(|t| start + d * (lo + 0.5 * (t + 1.0) * (hi - lo))).collect()
        }
        (DomainShape::Disk { center, radius }, Shape::Planar(w)) => {
            let off = z - center;
            let normal = if off.norm() > 0.0 { off / off.norm() } else { Complex64::new(1.0, 0.0) };
            // the half-circle shape bulges along i, so i * normal points it inward
            let rot = Complex64::i() * normal;
            w.iter()
                .map(|w| {
                    let mut p = z + rot * w * r;
                    if (p - center).norm() > *radius {
                        p = z - rot * w * r;
                    }
                    let q = p - center;
                    if q.norm() > *radius {
                        p = center + q * (radius / q.norm());
                    }
                    p
                })
                .collect()
        }
        (_, Shape::Planar(w)) => w.iter().map(|w| z + w * r).collect(),
        _ => return None,
    };
    if pts.iter().all(|&p| x.contains(p)) {
        Some(pts)
    } else {
        None
    }
}

fn diameter(values: &[Complex64]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            best = best.max((values[i] - values[j]).norm());
        }
    }
    best
}

fn validate_ladder(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::invalid("empty radius ladder"));
    }
    if radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("radii must be positive and strictly decreasing"));
    }
    Ok(())
}

fn run_probe<F>(f: &F, x: &SpectralDomain, z: Complex64, k: usize, cfg: &ProbeConfig) -> Result<ProbeReport>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    validate_ladder(&cfg.radii)?;
    if cfg.samples_per_radius == 0 {
        return Err(Error::invalid("samples_per_radius must be positive"));
    }
    if !x.contains(z) {
        return Err(Error::Sampler(format!("center {z} is not a point of the domain")));
    }
    let cloud_pool = match &x.shape {
        DomainShape::Cloud(cloud) => {
            let has_neighbor = cloud.points().iter().any(|p| *p != z && (p - z).norm() <= cloud.epsilon());
            if !has_neighbor {
                return Err(Error::Sampler(format!("center {z} is isolated at cloud resolution")));
            }
            Some(cloud.points().to_vec())
        }
        _ => None,
    };

    let mut shape_rng = rng_for(cfg.seed, 0);
    let mut shapes: Vec<Shape> = adversarial_shape(x, k).into_iter().collect();
    shapes.extend((0..cfg.samples_per_radius).map(|_| draw_shape(x, k, &mut shape_rng)));

    let mut report = ProbeReport {
        center: z,
        k,
        radii: Vec::new(),
        sup_values: Vec::new(),
        oscillation_values: Vec::new(),
        sample_counts: Vec::new(),
        limit_plausible: None,
        extrapolated: false,
    };
    for (ri, &r) in cfg.radii.iter().enumerate() {
        let tuples: Vec<Vec<Complex64>> = match &cloud_pool {
            Some(pool) => {
                let near: Vec<Complex64> = pool.iter().copied().filter(|p| (p - z).norm() <= r).collect();
                if near.len() < k + 1 {
                    Vec::new()
                } else {
                    let mut rng = rng_for(cfg.seed, 1 + ri as u64);
                    (0..cfg.samples_per_radius)
                        .map(|_| rand::seq::index::sample(&mut rng, near.len(), k + 1).iter().map(|i| near[i]).collect())
                        .collect()
                }
            }
            None => shapes.iter().filter_map(|s| realize(x, z, r, s)).collect(),
        };
        let noise_gate = cfg.noise_fraction * cfg.oscillation_limit;
        let values: Vec<Option<Complex64>> = cfg.exec.map(tuples.len(), |i| {
            let t = TuplePoint::new(tuples[i].clone()).ok()?;
            if t.min_separation() < cfg.separation_floor * r {
                return None;
            }
            let (v, err) = iterated_delta_with_bound(f, &t);
            let finite = v.re.is_finite() && v.im.is_finite();
            (finite && err <= noise_gate * v.norm().max(1.0)).then_some(v)
        });
        let values: Vec<Complex64> = values.into_iter().flatten().collect();
        if values.is_empty() {
            if ri == 0 {
                return Err(Error::Sampler(format!(
                    "cannot draw {} distinct domain points within {r} of {z}",
                    k + 1
                )));
            }
            // cloud resolution reached; the ladder stops here
            break;
        }
        report.radii.push(r);
        report.sup_values.push(values.iter().map(|v| v.norm()).fold(0.0, f64::max));
        report.oscillation_values.push(diameter(&values));
        report.sample_counts.push(values.len());
    }
    Ok(report)
}

/// Records `sup |Delta^k f|` over sampled tuples of distinct domain points
/// within each radius of `(z, ..., z)`. Deterministic in `cfg.seed`.
pub fn boundedness_probe<F>(f: F, x: &SpectralDomain, z: Complex64, k: usize, cfg: &ProbeConfig) -> Result<ProbeReport>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    run_probe(&f, x, z, k, cfg)
}

/// As [`boundedness_probe`], additionally flagging whether the oscillation at
/// the smallest radius fell below `cfg.oscillation_limit`.
///
/// When rounding noise cut the ladder short, the oscillation is extrapolated
/// to the configured smallest radius along its slope over the last two
/// steps, provided both steps shrink it at least like `r^(1/2)`.
pub fn limit_probe<F>(f: F, x: &SpectralDomain, z: Complex64, k: usize, cfg: &ProbeConfig) -> Result<ProbeReport>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let mut report = run_probe(&f, x, z, k, cfg)?;
    let last = report.oscillation_values.last().copied().unwrap_or(f64::INFINITY);
    let mut plausible = last < cfg.oscillation_limit;
    let (radii, osc) = (&report.radii, &report.oscillation_values);
    let m = radii.len();
    let target = *cfg.radii.last().unwrap_or(&0.0);
    if !plausible && m >= 3 && radii[m - 1] > target {
        let slope = |i: usize| (osc[i - 1] / osc[i]).log10() / (radii[i - 1] / radii[i]).log10();
        let s = slope(m - 1).min(slope(m - 2));
        if s >= 0.5 {
            let projected = last * (target / radii[m - 1]).powf(s);
            plausible = projected < cfg.oscillation_limit;
            report.extrapolated = true;
        }
    }
    report.limit_plausible = Some(plausible);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regularity {
    /// `Delta^k conj` not locally bounded near some diagonal tuple.
    NotB,
    /// Locally bounded, without limits at some diagonal tuple.
    BNotC,
    /// Finite limits at every probed diagonal tuple.
    C,
}

impl Regularity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regularity::NotB => "not_B",
            Regularity::BNotC => "B_not_C",
            Regularity::C => "C",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictThresholds {
    /// Growth of `sup` per radius decade counted as blow-up.
    pub growth_per_decade: f64,
    /// Decades of sustained growth required for `not_B`.
    pub min_growth_decades: f64,
    /// Relative slack on the growth comparison, absorbing rounding when the
    /// growth is exactly the threshold rate.
    pub growth_slack: f64,
    pub probe: ProbeConfig,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        VerdictThresholds { growth_per_decade: 10.0, min_growth_decades: 3.0, growth_slack: 1e-6, probe: ProbeConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterEvidence {
    pub report: ProbeReport,
    /// Longest run (in decades) of radius steps meeting the growth rate.
    pub growth_decades: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityVerdict {
    pub verdict: Regularity,
    pub k: usize,
    pub evidence: Vec<CenterEvidence>,
}

/// Longest contiguous stretch of the ladder over which `sup` grows at least
/// `growth_per_decade` per decade, measured in decades.
pub fn growth_run_decades(report: &ProbeReport, th: &VerdictThresholds) -> f64 {
    let rate = th.growth_per_decade.log10() * (1.0 - th.growth_slack);
    let mut best = 0.0f64;
    let mut run = 0.0f64;
    for i in 1..report.radii.len() {
        let decades = (report.radii[i - 1] / report.radii[i]).log10();
        let growth = (report.sup_values[i] / report.sup_values[i - 1]).log10();
        if growth >= rate * decades {
            run += decades;
            best = best.max(run);
        } else {
            run = 0.0;
        }
    }
    best
}

/// Diagonal centers probed for each domain kind.
pub fn probe_centers(x: &SpectralDomain) -> Vec<Complex64> {
    match &x.shape {
        DomainShape::Circle { center, radius } => [0.0, 1.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI, 4.0]
            .iter()
            .map(|&t| center + Complex64::from_polar(*radius, t))
            .collect(),
        DomainShape::Interval { start, end } => {
            [0.0, 0.3, 0.5, 1.0].iter().map(|&s| start + (end - start) * s).collect()
        }
        DomainShape::Disk { center, radius } => vec![
            *center,
            center + Complex64::new(0.5 * radius, 0.0),
            center + Complex64::new(0.0, -0.3 * radius),
            center + Complex64::new(*radius, 0.0),
        ],
        DomainShape::Cloud(cloud) => {
            let nb = cloud.neighbor_lists();
            let clustered: Vec<Complex64> =
                cloud.points().iter().zip(&nb).filter(|(_, n)| !n.is_empty()).map(|(p, _)| *p).collect();
            let step = (clustered.len() / 5).max(1);
            clustered.into_iter().step_by(step).take(5).collect()
        }
    }
}

/// Heuristic regularity class of complex conjugation on `x` at order
/// `k = n - 1`: blow-up of `sup` over at least `min_growth_decades` decades
/// at any center gives `not_B`; otherwise vanishing oscillation at the
/// smallest radius at every center gives `C`; otherwise `B_not_C`.
pub fn regularity_verdict(x: &SpectralDomain, n: usize, th: &VerdictThresholds) -> Result<RegularityVerdict> {
    if n < 2 {
        return Err(Error::invalid("regularity verdict needs n >= 2"));
    }
    let k = n - 1;
    let centers = probe_centers(x);
    if centers.is_empty() {
        return Err(Error::Sampler("no cluster points to probe".into()));
    }
    let mut evidence = Vec::new();
    for z in centers {
        let report = limit_probe(|w: Complex64| w.conj(), x, z, k, &th.probe)?;
        let growth_decades = growth_run_decades(&report, th);
        evidence.push(CenterEvidence { report, growth_decades });
    }
    let verdict = if evidence.iter().any(|e| e.growth_decades >= th.min_growth_decades - 1e-9) {
        Regularity::NotB
    } else if evidence.iter().all(|e| e.report.limit_plausible == Some(true)) {
        Regularity::C
    } else {
        Regularity::BNotC
    };
    Ok(RegularityVerdict { verdict, k, evidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng_for;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tp(p: &[Complex64]) -> TuplePoint {
        TuplePoint::new(p.to_vec()).unwrap()
    }

    /// Direct recursion on the definition, exponential in k.
    fn raw_delta<F: Fn(Complex64) -> Complex64 + Copy>(f: F, p: &[Complex64]) -> Complex64 {
        if p.len() == 1 {
            return f(p[0]);
        }
        let k = p.len() - 1;
        (raw_delta(f, &p[1..]) - raw_delta(f, &p[..k])) / (p[k] - p[0])
    }

    #[test]
    fn single_step_examples() {
        let id1 = |p: &[Complex64]| p[0];
        assert_eq!(delta(id1, &tp(&[c(0.3, 1.), c(2., -1.)])).unwrap(), c(1., 0.));
        assert_eq!(delta(|_: &[Complex64]| c(5., 2.), &tp(&[c(0., 0.), c(1., 1.)])).unwrap(), c(0., 0.));
        let conj1 = |p: &[Complex64]| p[0].conj();
        let v = delta(conj1, &tp(&[c(0., 0.), c(1., 1.)])).unwrap();
        assert!((v - c(0., -1.)).norm() < 1e-15);
        assert!(matches!(TuplePoint::new(vec![c(1., 0.), c(1., 0.)]), Err(Error::CoincidentPoints(0, 1))));
    }

    #[test]
    fn iterated_examples() {
        let t = tp(&[c(0.1, 0.2), c(-0.5, 1.0), c(2.0, -0.3)]);
        assert!(iterated_delta(|z| z, &t).norm() < 1e-15);
        let circle = tp(&[c(1., 0.), c(0., 1.), c(-1., 0.)]);
        let v = iterated_delta(|z: Complex64| z.conj(), &circle);
        assert!((v - c(0., 1.)).norm() < 1e-15);
        assert!((circle_conj_oracle(circle.points(), 2).unwrap() - c(0., 1.)).norm() < 1e-15);
        let real = tp(&[c(0.1, 0.), c(0.7, 0.), c(-0.4, 0.)]);
        assert!(iterated_delta(|z: Complex64| z.conj(), &real).norm() <= 1e-10);
    }

    #[test]
    fn oracle_examples() {
        let v = circle_conj_oracle(&[c(1., 0.), c(-1., 0.)], 1).unwrap();
        assert_eq!(v, c(1., 0.));
        assert!(matches!(circle_conj_oracle(&[c(1., 0.), c(0.5, 0.)], 1), Err(Error::OffCircle { .. })));
        assert!(circle_conj_oracle(&[c(1., 0.)], 1).is_err());
    }

    #[test]
    fn newton_table_matches_raw_recursion_and_oracle() {
        let mut rng = rng_for(99, 0);
        for _ in 0..500 {
            let k = rng.random_range(1..=5);
            let pts: Vec<Complex64> =
                (0..=k).map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))).collect();
            let t = tp(&pts);
            let newton = iterated_delta(|z: Complex64| z.conj(), &t);
            let raw = raw_delta(|z: Complex64| z.conj(), &pts);
            let oracle = circle_conj_oracle(&pts, k).unwrap();
            // the raw recursion is itself the check on the closed form
            assert!((raw - oracle).norm() <= 1e-6 * oracle.norm().max(1.0) || t.min_separation() < 1e-2);
            assert!((newton - oracle).norm() <= 1e-9, "k={k} err={}", (newton - oracle).norm());
        }
    }

    #[test]
    fn polynomial_identities() {
        let mut rng = rng_for(5, 0);
        for _ in 0..200 {
            let k = rng.random_range(1..=6);
            let pts: Vec<Complex64> = (0..=k).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let t = tp(&pts);
            if t.min_separation() < 0.2 {
                continue;
            }
            let coeffs: Vec<Complex64> = (0..k).map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
            let p = |z: Complex64| coeffs.iter().rev().fold(c(0., 0.), |acc, a| acc * z + a);
            let (low, bound) = iterated_delta_with_bound(p, &t);
            assert!(low.norm() <= 1e-9, "k={k} {low}");
            assert!(low.norm() <= bound);
            let top = iterated_delta(|z| z.powu(k as u32), &t);
            assert!((top - c(1., 0.)).norm() <= 1e-9);
        }
    }

    #[test]
    fn circle_probe_bounded_by_one() {
        let x = SpectralDomain::unit_circle();
        let r = boundedness_probe(|z: Complex64| z.conj(), &x, c(1., 0.), 2, &ProbeConfig::default()).unwrap();
        assert_eq!(r.radii.len(), 5);
        assert!(r.sup_values.iter().all(|&s| s <= 1.0 + 1e-5), "{:?}", r.sup_values);
    }

    #[test]
    fn interval_probe_vanishes() {
        let x = SpectralDomain::real_interval(-1.0, 1.0);
        let r = boundedness_probe(|z: Complex64| z.conj(), &x, c(0., 0.), 2, &ProbeConfig::default()).unwrap();
        assert!(r.sup_values.iter().all(|&s| s <= 1e-10));
    }

    #[test]
    fn disk_probe_blows_up_like_inverse_radius() {
        let x = SpectralDomain::unit_disk();
        let r = boundedness_probe(|z: Complex64| z.conj(), &x, c(0., 0.), 2, &ProbeConfig::default()).unwrap();
        for (s, rad) in r.sup_values.iter().zip(&r.radii) {
            assert!(*s >= (1.0 / rad) * (1.0 - 1e-12), "sup {s} at r = {rad}");
        }
        // the witness family itself
        for rad in [1e-1, 1e-3] {
            let w = tp(&[c(-rad, 0.), c(0., rad), c(rad, 0.)]);
            let v = iterated_delta(|z: Complex64| z.conj(), &w);
            assert!((v - c(0., 1.0 / rad)).norm() <= 1e-9 / rad);
        }
    }

    #[test]
    fn limit_probe_examples() {
        let cfg = ProbeConfig::default();
        let circle = limit_probe(|z: Complex64| z.conj(), &SpectralDomain::unit_circle(), c(1., 0.), 2, &cfg).unwrap();
        assert_eq!(circle.limit_plausible, Some(true));
        assert!(circle.oscillation_values.windows(2).all(|w| w[1] < w[0]));

        let disk = limit_probe(|z: Complex64| z.conj(), &SpectralDomain::unit_disk(), c(0., 0.), 1, &cfg).unwrap();
        assert_eq!(disk.limit_plausible, Some(false));
        assert!(disk.sup_values.iter().all(|&s| (s - 1.0).abs() < 1e-12));
        assert!(disk.oscillation_values.iter().all(|&o| o > 1.9 && o <= 2.0 + 1e-12));

        let id = limit_probe(|z| z, &SpectralDomain::unit_disk(), c(0.2, 0.1), 1, &cfg).unwrap();
        assert!(id.oscillation_values.iter().all(|&o| o < 1e-9));
    }

    #[test]
    fn probes_are_deterministic() {
        let x = SpectralDomain::unit_disk();
        let mut cfg = ProbeConfig { seed: 17, ..ProbeConfig::default() };
        let a = boundedness_probe(|z: Complex64| z.conj(), &x, c(0.1, 0.2), 3, &cfg).unwrap();
        cfg.exec = Exec::Sequential;
        let b = boundedness_probe(|z: Complex64| z.conj(), &x, c(0.1, 0.2), 3, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn probe_errors() {
        let x = SpectralDomain::unit_circle();
        let bad = ProbeConfig { radii: vec![0.1, 0.2], ..ProbeConfig::default() };
        assert!(boundedness_probe(|z: Complex64| z.conj(), &x, c(1., 0.), 2, &bad).is_err());
        assert!(matches!(
            boundedness_probe(|z: Complex64| z.conj(), &x, c(0., 0.), 2, &ProbeConfig::default()),
            Err(Error::Sampler(_))
        ));
    }

    #[test]
    fn verdict_trichotomy() {
        let th = VerdictThresholds::default();
        assert_eq!(regularity_verdict(&SpectralDomain::unit_circle(), 3, &th).unwrap().verdict, Regularity::C);
        assert_eq!(regularity_verdict(&SpectralDomain::real_interval(-1., 1.), 3, &th).unwrap().verdict, Regularity::C);
        assert_eq!(regularity_verdict(&SpectralDomain::unit_disk(), 3, &th).unwrap().verdict, Regularity::NotB);
        assert_eq!(regularity_verdict(&SpectralDomain::unit_disk(), 2, &th).unwrap().verdict, Regularity::BNotC);
        assert_eq!(regularity_verdict(&SpectralDomain::unit_circle(), 4, &th).unwrap().verdict, Regularity::C);
        assert_eq!(regularity_verdict(&SpectralDomain::unit_disk(), 4, &th).unwrap().verdict, Regularity::NotB);
        assert_eq!(regularity_verdict(&SpectralDomain::real_interval(-1., 1.), 4, &th).unwrap().verdict, Regularity::C);
    }
}
