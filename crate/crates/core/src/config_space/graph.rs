//! Coincidence graphs of components: `{i, j}` is an edge of `Gamma(C)` when
//! some tuple of `C` has its `i`-th and `j`-th points within `delta`. A
//! tuple with coincident `i, j` entries lies in the closure of both `C` and
//! `C <| (i j)`; this is the resolution-level shadow of that condition.

use std::collections::BTreeSet;

use super::{ComponentDecomposition, ConfigComplex};
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Largest vertex count accepted by [`has_n_cycle`].
pub const MAX_CYCLE_SEARCH: usize = 8;
const MAX_GRAPH_N: usize = 11;

/// Simple undirected graph on `0..n`; edges stored as `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnGraph {
    pub n: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl CnGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i == j || i >= n || j >= n {
                return Err(Error::invalid(format!("bad edge ({i}, {j}) for {n} vertices")));
            }
            set.insert((i.min(j), i.max(j)));
        }
        Ok(CnGraph { n, edges: set })
    }

    pub fn complete(n: usize) -> Self {
        CnGraph { n, edges: (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect() }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(i, j)| i == v || j == v).count()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..self.n {
                if !seen[w] && self.has_edge(v, w) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// A single cycle through all vertices.
    pub fn is_cycle(&self) -> bool {
        self.n >= 3 && self.edges.len() == self.n && (0..self.n).all(|v| self.degree(v) == 2) && self.is_connected()
    }

    /// A simple path through all vertices.
    pub fn is_path(&self) -> bool {
        self.edges.len() + 1 == self.n && (0..self.n).all(|v| self.degree(v) <= 2) && self.is_connected()
    }
}

fn pair_bit(n: usize, i: usize, j: usize) -> u64 {
    // row-major index of (i, j), i < j
    1u64 << (i * n - i * (i + 1) / 2 + (j - i - 1))
}

/// Coincidence graphs of every component, in component order.
pub fn cn_graphs(complex: &ConfigComplex, decomp: &ComponentDecomposition, exec: Exec) -> Result<Vec<CnGraph>> {
    let n = complex.n();
    if n > MAX_GRAPH_N {
        return Err(Error::GraphTooLarge(n));
    }
    let delta = complex.cloud().delta();
    let pts = complex.cloud().points();
    let count = decomp.count();
    let masks = exec.fold_chunks(
        complex.node_count() as usize,
        1 << 14,
        vec![0u64; count],
        |mut acc, node| {
            let t = complex.tuple(node as u64);
            let mut bits = 0u64;
            for i in 0..n {
                for j in (i + 1)..n {
                    if (pts[t[i] as usize] - pts[t[j] as usize]).norm() <= delta {
                        bits |= pair_bit(n, i, j);
                    }
                }
            }
            acc[decomp.label(node as u64) as usize] |= bits;
            acc
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x |= y;
            }
            a
        },
    );
    Ok(masks
        .into_iter()
        .map(|mask| CnGraph {
            n,
            edges: (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .filter(|&(i, j)| mask & pair_bit(n, i, j) != 0)
                .collect(),
        })
        .collect())
}

pub fn cn_graph(complex: &ConfigComplex, decomp: &ComponentDecomposition, component: usize, exec: Exec) -> Result<CnGraph> {
    if component >= decomp.count() {
        return Err(Error::invalid(format!("no component {component}")));
    }
    Ok(cn_graphs(complex, decomp, exec)?.swap_remove(component))
}

/// Exact Hamiltonian-cycle search by backtracking.
pub fn has_n_cycle(g: &CnGraph) -> Result<bool> {
    if g.n > MAX_CYCLE_SEARCH {
        return Err(Error::GraphTooLarge(g.n));
    }
    if g.n < 3 {
        return Ok(false);
    }
    fn extend(g: &CnGraph, path: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let last = *path.last().unwrap();
        if path.len() == g.n {
            return g.has_edge(last, path[0]);
        }
        for v in 1..g.n {
            if !used[v] && g.has_edge(last, v) {
                used[v] = true;
                path.push(v);
                if extend(g, path, used) {
                    return true;
                }
                path.pop();
                used[v] = false;
            }
        }
        false
    }
    let mut used = vec![false; g.n];
    used[0] = true;
    Ok(extend(g, &mut vec![0], &mut used))
}
