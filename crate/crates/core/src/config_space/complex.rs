//! Product complex over ordered tuples of distinct cloud points, and its
//! connected components via a lock-free union-find.
//!
//! Nodes are ranked in lexicographic order of their index tuples, so node ids
//! run over `0..m!/(m-n)!` and "smallest node" means lexicographically first
//! tuple.

use std::sync::atomic::{AtomicU32, Ordering};

use super::PointCloud;
use crate::error::{Error, Result};
use crate::exec::Exec;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Adjacency is implicit: two tuples are adjacent when they differ in exactly
/// one coordinate and the two point values there are within `epsilon`.
#[derive(Debug, Clone)]
pub struct ConfigComplex {
    cloud: PointCloud,
    n: usize,
    node_count: u64,
    neighbors: Vec<Vec<u32>>,
    /// `suffix[i]`: number of ways to complete a prefix of length `i + 1`.
    suffix: Vec<u64>,
}

fn falling(m: u128, k: usize) -> u128 {
    (0..k as u128).map(|i| m.saturating_sub(i)).product()
}

pub fn build_config_complex(cloud: &PointCloud, n: usize, budget: u64) -> Result<ConfigComplex> {
    if n < 2 {
        return Err(Error::invalid("configuration spaces need n >= 2"));
    }
    let m = cloud.len();
    let nodes = falling(m as u128, n);
    if nodes > budget as u128 || nodes > u32::MAX as u128 {
        return Err(Error::BudgetExceeded { nodes, budget });
    }
    let suffix = (0..n).map(|i| falling((m as u128).saturating_sub(i as u128 + 1), n - i - 1) as u64).collect();
    Ok(ConfigComplex {
        cloud: cloud.clone(),
        n,
        node_count: nodes as u64,
        neighbors: cloud.neighbor_lists(),
        suffix,
    })
}

impl ConfigComplex {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> u64 {
        self.node_count
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    /// Lexicographic rank of a tuple of distinct indices.
    pub fn rank(&self, tuple: &[u32]) -> u64 {
        debug_assert_eq!(tuple.len(), self.n);
        let mut r = 0u64;
        for i in 0..self.n {
            let smaller_used = tuple[..i].iter().filter(|&&p| p < tuple[i]).count() as u64;
            r += (tuple[i] as u64 - smaller_used) * self.suffix[i];
        }
        r
    }

    pub fn unrank(&self, mut r: u64, out: &mut [u32]) {
        let mut used: Vec<u32> = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let digit = r / self.suffix[i];
            r %= self.suffix[i];
            let mut x = digit as u32;
            // used is kept sorted; skip over taken values
            for &u in &used {
                if u <= x {
                    x += 1;
                }
            }
            out[i] = x;
            let pos = used.partition_point(|&u| u < x);
            used.insert(pos, x);
        }
    }

    pub fn tuple(&self, node: u64) -> Vec<u32> {
        let mut t = vec![0; self.n];
        self.unrank(node, &mut t);
        t
    }

    pub fn points_of(&self, node: u64) -> Vec<num_complex::Complex64> {
        self.tuple(node).iter().map(|&i| self.cloud.points()[i as usize]).collect()
    }

    /// Calls `f` with every neighbour of the tuple (one-coordinate moves).
    pub fn for_each_neighbor(&self, tuple: &[u32], mut f: impl FnMut(u64)) {
        let mut work = tuple.to_vec();
        for i in 0..self.n {
            let orig = tuple[i];
            for &q in &self.neighbors[orig as usize] {
                if tuple.contains(&q) {
                    continue;
                }
                work[i] = q;
                f(self.rank(&work));
            }
            work[i] = orig;
        }
    }

    pub fn neighbors(&self, node: u64) -> Vec<u64> {
        let mut out = Vec::new();
        self.for_each_neighbor(&self.tuple(node), |v| out.push(v));
        out
    }
}

/// Connected components, labelled `0..count` in order of their smallest node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecomposition {
    labels: Vec<u32>,
    representatives: Vec<u64>,
}

impl ComponentDecomposition {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    pub fn label(&self, node: u64) -> u32 {
        self.labels[node as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Smallest node of each component.
    pub fn representatives(&self) -> &[u64] {
        &self.representatives
    }

    pub fn sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.count()];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }
}

// Parent pointers only ever move to smaller indices, so each root is the
// minimum of its set and the final labelling does not depend on scheduling.
fn find(parent: &[AtomicU32], mut x: u32) -> u32 {
    loop {
        let p = parent[x as usize].load(Ordering::Acquire);
        if p == x {
            return x;
        }
        let gp = parent[p as usize].load(Ordering::Acquire);
        if gp != p {
            let _ = parent[x as usize].compare_exchange(p, gp, Ordering::AcqRel, Ordering::Acquire);
        }
        x = gp;
    }
}

fn union(parent: &[AtomicU32], a: u32, b: u32) {
    let (mut a, mut b) = (a, b);
    loop {
        a = find(parent, a);
        b = find(parent, b);
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if parent[hi as usize]
            .compare_exchange(hi, lo, Ordering::AcqRel, Ordering::Acquire)
            .is_ok()
        {
            return;
        }
    }
}

const CHUNK: usize = 4096;

pub fn components(complex: &ConfigComplex, exec: Exec) -> ComponentDecomposition {
    let total = complex.node_count as usize;
    let parent: Vec<AtomicU32> = (0..total as u32).map(AtomicU32::new).collect();
    let chunks = total.div_ceil(CHUNK);
    exec.for_each(chunks, |c| {
        let mut tuple = vec![0u32; complex.n];
        let lo = c * CHUNK;
        for node in lo..(lo + CHUNK).min(total) {
            complex.unrank(node as u64, &mut tuple);
            complex.for_each_neighbor(&tuple, |v| {
                // each edge is seen from both ends; link once
                if (v as usize) < node {
                    union(&parent, node as u32, v as u32);
                }
            });
        }
    });

    let roots: Vec<u32> = exec
        .map(chunks, |c| {
            let lo = c * CHUNK;
            (lo..(lo + CHUNK).min(total)).map(|x| find(&parent, x as u32)).collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();

    let mut id_of_root = vec![u32::MAX; total];
    let mut representatives = Vec::new();
    for (node, &r) in roots.iter().enumerate() {
        if r as usize == node {
            id_of_root[node] = representatives.len() as u32;
            representatives.push(node as u64);
        }
    }
    let labels = roots.iter().map(|&r| id_of_root[r as usize]).collect();
    ComponentDecomposition { labels, representatives }
}
