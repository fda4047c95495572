//! Discrete model of the configuration space of distinct n-tuples over a
//! sampled spectral set: components, the symmetric-group action on them,
//! coincidence graphs and the hypothesis report.

use num_complex::Complex64;

use crate::error::{Error, Result};

mod action;
mod complex;
mod graph;
mod report;

pub use action::{check_action_consistency, sn_action_on_components, ComponentAction};
pub use complex::{build_config_complex, components, ComponentDecomposition, ConfigComplex, DEFAULT_NODE_BUDGET};
pub use graph::{cn_graph, cn_graphs, has_n_cycle, CnGraph};
pub use report::{hypothesis_report, hypothesis_report_with_evidence, AdmissibleFamilies, PreserverFamily, RegimeReport, ReportOptions};

/// Finite sample of a spectral set with a connectivity radius `epsilon` and a
/// collision threshold `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Complex64>,
    epsilon: f64,
    delta: f64,
}

impl PointCloud {
    pub fn new(points: Vec<Complex64>, epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !(delta > 0.0) {
            return Err(Error::invalid("epsilon and delta must be positive"));
        }
        if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("cloud has non-finite points"));
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(Error::CoincidentPoints(i, j));
                }
            }
        }
        Ok(PointCloud { points, epsilon, delta })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.points.clone(), self.epsilon, delta)
    }

    /// Indices of the other points within `epsilon` of each point, ascending.
    pub fn neighbor_lists(&self) -> Vec<Vec<u32>> {
        let m = self.points.len();
        (0..m)
            .map(|i| {
                (0..m)
                    .filter(|&j| j != i && (self.points[i] - self.points[j]).norm() <= self.epsilon)
                    .map(|j| j as u32)
                    .collect()
            })
            .collect()
    }

    /// `m` equally spaced points on the unit circle; `epsilon = delta = 1.5`
    /// chord spacings.
    pub fn circle(m: usize) -> Result<Self> {
        let pts: Vec<Complex64> = (0..m)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / m as f64))
            .collect();
        let spacing = 2.0 * (std::f64::consts::PI / m as f64).sin();
        Self::new(pts, 1.5 * spacing, 1.5 * spacing)
    }

    /// `m` equally spaced points on `[-1, 1]`.
    pub fn interval(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("interval cloud needs at least 2 points"));
        }
        let spacing = 2.0 / (m - 1) as f64;
        let pts = (0..m).map(|k| Complex64::new(-1.0 + spacing * k as f64, 0.0)).collect();
        Self::new(pts, 1.5 * spacing, 1.5 * spacing)
    }

    /// `m` points of the closed unit disk on a sunflower (Vogel) spiral, a
    /// deterministic near-uniform blue-noise sample; spacing is the mean
    /// nearest-neighbour distance.
    pub fn disk(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("disk cloud needs at least 2 points"));
        }
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let pts: Vec<Complex64> = (0..m)
            .map(|k| Complex64::from_polar(((k as f64 + 0.5) / m as f64).sqrt(), golden * k as f64))
            .collect();
        let spacing = pts
            .iter()
            .enumerate()
            .map(|(i, p)| {
                pts.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, q)| (p - q).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .sum::<f64>()
            / m as f64;
        Self::new(pts, 1.5 * spacing, 1.5 * spacing)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perfectness {
    pub perfect: bool,
    /// Points with no other point within `epsilon`.
    pub offenders: Vec<usize>,
}

/// Discrete cluster-point test: every point needs another within `epsilon`.
pub fn perfectness_check(cloud: &PointCloud) -> Perfectness {
    let offenders: Vec<usize> = cloud
        .neighbor_lists()
        .iter()
        .enumerate()
        .filter(|(_, nb)| nb.is_empty())
        .map(|(i, _)| i)
        .collect();
    Perfectness { perfect: offenders.is_empty() && !cloud.is_empty(), offenders }
}
