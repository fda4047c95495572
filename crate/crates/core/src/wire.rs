//! JSON wire formats. Complex numbers are `[re, im]` pairs; permutations and
//! partitions are 1-based.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config_space::PointCloud;
use crate::error::{Error, Result};
use crate::frames::{Partition, Permutation};
use crate::linalg::{ComplexMatrix, Frame, Line, SpectrumVector};
use crate::operators::{DomainShape, SemisimpleOp, SpectralDomain, DEFAULT_MEMBERSHIP_TOL};

pub type Pair = [f64; 2];

pub fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let n = m.n();
        let rows = |f: fn(&Complex64) -> f64| (0..n).map(|i| (0..n).map(|j| f(&m[(i, j)])).collect()).collect();
        MatrixJson { n, re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

impl TryFrom<&MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        let shape_ok = j.re.len() == j.n
            && j.im.len() == j.n
            && j.re.iter().chain(&j.im).all(|row| row.len() == j.n);
        if !shape_ok {
            return Err(Error::invalid(format!("matrix JSON is not {0}x{0}", j.n)));
        }
        ComplexMatrix::new(DMatrix::from_fn(j.n, j.n, |r, c| Complex64::new(j.re[r][c], j.im[r][c])))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameJson {
    pub n: usize,
    /// Unit direction of each line.
    pub lines: Vec<Vec<Pair>>,
}

impl From<&Frame> for FrameJson {
    fn from(f: &Frame) -> Self {
        FrameJson { n: f.n(), lines: f.lines().iter().map(|l| l.direction().iter().map(|&z| pair(z)).collect()).collect() }
    }
}

impl TryFrom<&FrameJson> for Frame {
    type Error = Error;

    fn try_from(j: &FrameJson) -> Result<Self> {
        if j.lines.len() != j.n || j.lines.iter().any(|l| l.len() != j.n) {
            return Err(Error::invalid(format!("frame JSON needs {0} lines in C^{0}", j.n)));
        }
        let lines = j
            .lines
            .iter()
            .map(|l| Line::from_slice(&l.iter().map(|&p| complex(p)).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        Frame::new(lines)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationJson {
    pub images: Vec<usize>,
}

impl From<&Permutation> for PermutationJson {
    fn from(p: &Permutation) -> Self {
        PermutationJson { images: p.one_based() }
    }
}

impl TryFrom<&PermutationJson> for Permutation {
    type Error = Error;

    fn try_from(j: &PermutationJson) -> Result<Self> {
        Permutation::from_one_based(&j.images)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionJson {
    pub blocks: Vec<Vec<usize>>,
}

impl From<&Partition> for PartitionJson {
    fn from(p: &Partition) -> Self {
        PartitionJson { blocks: p.blocks().iter().map(|b| b.iter().map(|i| i + 1).collect()).collect() }
    }
}

impl TryFrom<&PartitionJson> for Partition {
    type Error = Error;

    fn try_from(j: &PartitionJson) -> Result<Self> {
        let n = j.blocks.iter().map(Vec::len).sum();
        Partition::from_one_based(n, &j.blocks)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub frame: FrameJson,
    pub spectrum: Vec<Pair>,
}

impl From<&SemisimpleOp> for OperatorJson {
    fn from(op: &SemisimpleOp) -> Self {
        OperatorJson { frame: op.frame().into(), spectrum: op.spectrum().values().iter().map(|&z| pair(z)).collect() }
    }
}

impl TryFrom<&OperatorJson> for SemisimpleOp {
    type Error = Error;

    fn try_from(j: &OperatorJson) -> Result<Self> {
        let frame = Frame::try_from(&j.frame)?;
        SemisimpleOp::new(frame, SpectrumVector::new(j.spectrum.iter().map(|&p| complex(p)).collect())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudJson {
    pub points: Vec<Pair>,
    pub epsilon: f64,
    pub delta: f64,
}

impl From<&PointCloud> for CloudJson {
    fn from(c: &PointCloud) -> Self {
        CloudJson { points: c.points().iter().map(|&z| pair(z)).collect(), epsilon: c.epsilon(), delta: c.delta() }
    }
}

impl TryFrom<&CloudJson> for PointCloud {
    type Error = Error;

    fn try_from(j: &CloudJson) -> Result<Self> {
        PointCloud::new(j.points.iter().map(|&p| complex(p)).collect(), j.epsilon, j.delta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainJson {
    Circle {
        center: Pair,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    Disk {
        center: Pair,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    Interval {
        start: Pair,
        end: Pair,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    Cloud {
        cloud: CloudJson,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
}

impl From<&SpectralDomain> for DomainJson {
    fn from(d: &SpectralDomain) -> Self {
        let tolerance = (d.tolerance != DEFAULT_MEMBERSHIP_TOL).then_some(d.tolerance);
        match &d.shape {
            DomainShape::Circle { center, radius } => DomainJson::Circle { center: pair(*center), radius: *radius, tolerance },
            DomainShape::Disk { center, radius } => DomainJson::Disk { center: pair(*center), radius: *radius, tolerance },
            DomainShape::Interval { start, end } => DomainJson::Interval { start: pair(*start), end: pair(*end), tolerance },
            DomainShape::Cloud(cloud) => DomainJson::Cloud { cloud: cloud.into(), tolerance },
        }
    }
}

impl TryFrom<&DomainJson> for SpectralDomain {
    type Error = Error;

    fn try_from(j: &DomainJson) -> Result<Self> {
        let (shape, tol) = match j {
            DomainJson::Circle { center, radius, tolerance } => {
                (DomainShape::Circle { center: complex(*center), radius: *radius }, tolerance)
            }
            DomainJson::Disk { center, radius, tolerance } => {
                (DomainShape::Disk { center: complex(*center), radius: *radius }, tolerance)
            }
            DomainJson::Interval { start, end, tolerance } => {
                (DomainShape::Interval { start: complex(*start), end: complex(*end) }, tolerance)
            }
            DomainJson::Cloud { cloud, tolerance } => (DomainShape::Cloud(PointCloud::try_from(cloud)?), tolerance),
        };
        SpectralDomain::new(shape, tol.unwrap_or(DEFAULT_MEMBERSHIP_TOL))
    }
}
