//! Right action of the symmetric group on connected components,
//! `C <| theta` = component of `x <| theta` for any `x` in `C`.

use rand::Rng;

use super::{ComponentDecomposition, ConfigComplex};
use crate::error::{Error, Result};
use crate::frames::Permutation;
use crate::random::rng_for;

/// Largest `n` for which every permutation is checked against the
/// representatives directly.
const DIRECT_CHECK_MAX_N: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentAction {
    pub n: usize,
    /// `table[c][k]` = component of `C_c <| (k k+1)`.
    pub table: Vec<Vec<u32>>,
    pub transitive: bool,
    pub orbit_count: usize,
    /// Isotropy subgroup of each component, permutations in lexicographic order.
    pub isotropy: Vec<Vec<Permutation>>,
    pub free: bool,
}

impl ComponentAction {
    /// Image of a component under an arbitrary permutation via the generator table.
    pub fn act(&self, component: u32, theta: &Permutation) -> u32 {
        theta
            .adjacent_word()
            .iter()
            .fold(component, |c, &k| self.table[c as usize][k])
    }
}

fn image_of(complex: &ConfigComplex, decomp: &ComponentDecomposition, node: u64, theta: &Permutation) -> u32 {
    let moved = theta.act(&complex.tuple(node));
    decomp.label(complex.rank(&moved))
}

pub fn sn_action_on_components(complex: &ConfigComplex, decomp: &ComponentDecomposition) -> Result<ComponentAction> {
    let n = complex.n();
    let count = decomp.count();
    let gens: Vec<Permutation> = (0..n - 1).map(|k| Permutation::transposition(n, k, k + 1)).collect();
    let table: Vec<Vec<u32>> = decomp
        .representatives()
        .iter()
        .map(|&rep| gens.iter().map(|g| image_of(complex, decomp, rep, g)).collect())
        .collect();

    // Coxeter relations of the adjacent transpositions
    let apply = |c: u32, word: &[usize]| word.iter().fold(c, |c, &k| table[c as usize][k]);
    for c in 0..count as u32 {
        for k in 0..n - 1 {
            if apply(c, &[k, k]) != c {
                return Err(Error::ModelResolution(format!("s{k}^2 moves component {c}")));
            }
            if k + 2 < n && apply(c, &[k, k + 1, k, k + 1, k, k + 1]) != c {
                return Err(Error::ModelResolution(format!("braid relation fails at s{k} on component {c}")));
            }
            for j in (k + 2)..n - 1 {
                if apply(c, &[k, j, k, j]) != c {
                    return Err(Error::ModelResolution(format!("s{k}, s{j} do not commute on component {c}")));
                }
            }
        }
    }

    let mut seen = vec![false; count];
    let mut orbit_count = 0;
    for start in 0..count {
        if seen[start] {
            continue;
        }
        orbit_count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(c) = stack.pop() {
            for &d in &table[c] {
                if !seen[d as usize] {
                    seen[d as usize] = true;
                    stack.push(d as usize);
                }
            }
        }
    }

    let mut action = ComponentAction {
        n,
        table,
        transitive: orbit_count == 1,
        orbit_count,
        isotropy: Vec::new(),
        free: true,
    };
    let perms = Permutation::all(n);
    for (c, &rep) in decomp.representatives().iter().enumerate() {
        let mut stab = Vec::new();
        for theta in &perms {
            let via_table = action.act(c as u32, theta);
            if n <= DIRECT_CHECK_MAX_N {
                let direct = image_of(complex, decomp, rep, theta);
                if direct != via_table {
                    return Err(Error::ModelResolution(format!(
                        "component {c}: permutation {:?} lands in {direct} directly but {via_table} via generators",
                        theta.one_based()
                    )));
                }
            }
            if via_table == c as u32 {
                stab.push(theta.clone());
            }
        }
        if stab.len() > 1 {
            action.free = false;
        }
        action.isotropy.push(stab);
    }
    Ok(action)
}

/// Checks on `samples` random nodes that acting by each generator agrees
/// with the component-level table. Returns the number of mismatches.
pub fn check_action_consistency(
    complex: &ConfigComplex,
    decomp: &ComponentDecomposition,
    action: &ComponentAction,
    samples: usize,
    seed: u64,
) -> usize {
    let mut rng = rng_for(seed, 0);
    let n = complex.n();
    let mut bad = 0;
    for _ in 0..samples {
        let node = rng.random_range(0..complex.node_count());
        let c = decomp.label(node);
        for k in 0..n - 1 {
            let g = Permutation::transposition(n, k, k + 1);
            if image_of(complex, decomp, node, &g) != action.table[c as usize][k] {
                bad += 1;
            }
        }
    }
    bad
}
