//! Geometry of line tuples: eversion, linear and conjugate-linear images, the
//! right action of the symmetric group, and block-span ("linking") relations.
//!
//! # Right-action convention
//!
//! A permutation `theta` acts on the right by reindexing,
//! `(F <| theta)_i = F_{theta(i)}`. Unwinding twice,
//!
//! ```text
//! ((F <| theta) <| theta')_i = (F <| theta)_{theta'(i)} = F_{theta(theta'(i))}
//! ```
//!
//! so `(F <| theta) <| theta' = F <| (theta . theta')` with `.` the usual
//! composition (apply `theta'` first). [`Permutation::compose`] implements
//! exactly that product. Acting by the 3-cycle `1 -> 2 -> 3 -> 1` therefore
//! sends `(a, b, c)` to `(b, c, a)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{check_invertible, inverse, singular_values, ComplexMatrix, Frame, Line, DEFAULT_FRAME_TOL};

/// A bijection of `{0..n-1}`; `images[i]` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::invalid(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// From 1-based images, as in the JSON format.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::invalid("1-based permutation contains 0"));
        }
        Self::new(images.iter().map(|&i| i - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// The transposition of `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, j);
        Permutation { images }
    }

    /// The cycle `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn rotation(n: usize) -> Self {
        Permutation { images: (0..n).map(|i| (i + 1) % n).collect() }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i + 1).collect()
    }

    /// `self . other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.n(), other.n(), "composing permutations of different degree");
        Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Order of the permutation as a group element.
    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.compose(self);
            k += 1;
        }
        k
    }

    /// Reindexes any tuple by the right action, `out[i] = xs[theta(i)]`.
    pub fn act<T: Clone>(&self, xs: &[T]) -> Vec<T> {
        self.images.iter().map(|&j| xs[j].clone()).collect()
    }

    /// All `n!` permutations in lexicographic order of their images.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation { images: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }

    /// A word in adjacent transpositions `s_k = (k k+1)` whose product (in
    /// the order listed) equals `self`.
    pub fn adjacent_word(&self) -> Vec<usize> {
        // bubble sort the image list; each swap at k multiplies on the right by s_k
        let mut cur = self.images.clone();
        let mut swaps = Vec::new();
        let n = cur.len();
        for pass in 0..n {
            for k in 0..n.saturating_sub(1 + pass) {
                if cur[k] > cur[k + 1] {
                    cur.swap(k, k + 1);
                    swaps.push(k);
                }
            }
        }
        // self . s_{k1} . s_{k2} ... = id, so self = s_{km} ... s_{k1}
        swaps.reverse();
        swaps
    }
}

/// Disjoint blocks covering `{0..n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::invalid("partition has an empty block"));
            }
            for &i in b {
                if i >= n || seen[i] {
                    return Err(Error::invalid(format!("{blocks:?} is not a partition of 0..{n}")));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid(format!("{blocks:?} does not cover 0..{n}")));
        }
        Ok(Partition { blocks })
    }

    pub fn from_one_based(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        if blocks.iter().flatten().any(|&i| i == 0) {
            return Err(Error::invalid("1-based partition contains 0"));
        }
        Self::new(n, blocks.iter().map(|b| b.iter().map(|&i| i - 1).collect()).collect())
    }

    pub fn singletons(n: usize) -> Self {
        Partition { blocks: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn whole(n: usize) -> Self {
        Partition { blocks: vec![(0..n).collect()] }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

/// Replaces every line by the orthogonal complement of the span of the
/// others: the columns of `(V^-1)^*` for the column matrix `V`.
pub fn evert(f: &Frame) -> Result<Frame> {
    evert_with_tolerance(f, DEFAULT_FRAME_TOL)
}

pub fn evert_with_tolerance(f: &Frame, tol: f64) -> Result<Frame> {
    let v = f.column_matrix();
    let condition = f.condition();
    if !condition.is_finite() || condition > 1.0 / tol {
        return Err(Error::Degenerate { condition });
    }
    let w = inverse(&v).ok_or(Error::Degenerate { condition })?.adjoint();
    let lines = (0..f.n())
        .map(|j| Line::new(w.column(j).into_owned()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Frame::from_lines_unchecked(lines))
}

/// `(l_i) -> (T l_i)`, conjugating each direction entrywise first when
/// `conjugate` is set (the conjugate-linear case).
pub fn apply_linear(t: &ComplexMatrix, f: &Frame, conjugate: bool) -> Result<Frame> {
    if t.n() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), actual: t.n() });
    }
    check_invertible(t.as_matrix())?;
    let lines = f
        .lines()
        .iter()
        .map(|l| {
            let d = if conjugate { l.direction().conjugate() } else { l.direction().clone() };
            Line::new(t.as_matrix() * d)
        })
        .collect::<Result<Vec<_>>>()?;
    Frame::with_tolerance(lines, 0.0)
}

/// `(F <| theta)_i = F_{theta(i)}`.
pub fn act_permutation(f: &Frame, theta: &Permutation) -> Result<Frame> {
    if theta.n() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), actual: theta.n() });
    }
    Ok(Frame::from_lines_unchecked(theta.act(f.lines())))
}

fn orthonormal_basis(cols: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    cols.clone().qr().q()
}

/// Sine of the largest principal angle between the column spans of `a` and
/// `b` (both of full column rank). Returns 1 when the dimensions differ.
pub fn largest_principal_angle_sine(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    let qa = orthonormal_basis(a);
    let qb = orthonormal_basis(b);
    // || (I - Qa Qa*) Qb ||_2 is accurate for small angles
    let resid = &qb - &qa * (qa.adjoint() * &qb);
    singular_values(&resid).into_iter().fold(0.0, f64::max).min(1.0)
}

/// Whether the block spans of `f` and `g` agree for every block of `pi`,
/// up to a largest principal angle of `tol`.
pub fn pi_linked(f: &Frame, g: &Frame, pi: &Partition, tol: f64) -> Result<bool> {
    if f.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), actual: g.n() });
    }
    if pi.n() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), actual: pi.n() });
    }
    let n = f.n();
    let block_cols = |fr: &Frame, block: &[usize]| {
        DMatrix::from_fn(n, block.len(), |i, j| fr.line(block[j]).direction()[i])
    };
    Ok(pi
        .blocks()
        .iter()
        .all(|b| largest_principal_angle_sine(&block_cols(f, b), &block_cols(g, b)) <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, frame_distance, line_distance};
    use crate::random::{random_frame, random_ortho_frame, random_unitary};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line(v: &[(f64, f64)]) -> Line {
        Line::from_slice(&v.iter().map(|&(r, i)| c(r, i)).collect::<Vec<_>>()).unwrap()
    }

    fn frame(lines: &[&[(f64, f64)]]) -> Frame {
        Frame::new(lines.iter().map(|l| line(l)).collect()).unwrap()
    }

    #[test]
    fn evert_standard_is_fixed() {
        let f = Frame::standard(4);
        assert_eq!(frame_distance(&evert(&f).unwrap(), &f).unwrap(), 0.0);
    }

    #[test]
    fn evert_two_lines_by_hand() {
        let f = frame(&[&[(1., 0.), (0., 0.)], &[(1., 0.), (1., 0.)]]);
        let e = evert(&f).unwrap();
        assert!(line_distance(e.line(0), &line(&[(1., 0.), (-1., 0.)])) < 1e-15);
        assert!(line_distance(e.line(1), &line(&[(0., 0.), (1., 0.)])) < 1e-15);
    }

    #[test]
    fn evert_rejects_near_degenerate() {
        let f = Frame::with_tolerance(
            vec![line(&[(1., 0.), (0., 0.)]), line(&[(1., 0.), (1e-12, 0.)])],
            0.0,
        )
        .unwrap();
        assert!(matches!(evert(&f), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn evert_properties_on_random_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 2..=6 {
            for _ in 0..20 {
                let f = random_frame(n, &mut rng);
                let e = evert(&f).unwrap();
                assert!(frame_distance(&evert(&e).unwrap(), &f).unwrap() <= 1e-9);
                for i in 0..n {
                    for j in 0..n {
                        let ip = e.line(i).direction().dotc(f.line(j).direction()).norm();
                        if i == j {
                            assert!(ip > 1e-6);
                        } else {
                            assert!(ip <= 1e-10, "biorthogonality {ip}");
                        }
                    }
                }
                let o = random_ortho_frame(n, &mut rng);
                assert!(frame_distance(&evert(&o).unwrap(), &o).unwrap() <= 1e-9);

                let theta = Permutation::all(n)[n % 2 + 1].clone();
                let lhs = evert(&act_permutation(&f, &theta).unwrap()).unwrap();
                let rhs = act_permutation(&e, &theta).unwrap();
                assert!(frame_distance(&lhs, &rhs).unwrap() <= 1e-9);

                let u = ComplexMatrix::new(random_unitary(n, &mut rng)).unwrap();
                let lhs = evert(&apply_linear(&u, &f, false).unwrap()).unwrap();
                let rhs = apply_linear(&u, &e, false).unwrap();
                assert!(frame_distance(&lhs, &rhs).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn apply_linear_examples() {
        let f = frame(&[&[(1., 0.), (0., 0.)], &[(1., 0.), (1., 0.)]]);
        let id = ComplexMatrix::identity(2);
        assert!(frame_distance(&apply_linear(&id, &f, false).unwrap(), &f).unwrap() < 1e-15);
        let t = ComplexMatrix::from_real(2, &[1., 0., 0., 2.]).unwrap();
        let img = apply_linear(&t, &f, false).unwrap();
        assert!(line_distance(img.line(1), &line(&[(1., 0.), (2., 0.)])) < 1e-15);
        assert!(line_distance(img.line(0), f.line(0)) < 1e-15);

        let g = frame(&[&[(1., 0.), (0., 1.)], &[(1., 0.), (0., 0.)]]);
        let conj = apply_linear(&id, &g, true).unwrap();
        assert!(line_distance(conj.line(0), &line(&[(1., 0.), (0., -1.)])) < 1e-15);

        let sing = ComplexMatrix::from_real(2, &[1., 1., 1., 1.]).unwrap();
        assert!(matches!(apply_linear(&sing, &f, false), Err(Error::Singular { .. })));
    }

    #[test]
    fn three_cycle_unwinds_to_bca() {
        let a = line(&[(1., 0.), (0., 0.), (0., 0.)]);
        let b = line(&[(1., 0.), (1., 0.), (0., 0.)]);
        let cc = line(&[(1., 0.), (1., 0.), (1., 0.)]);
        let f = Frame::new(vec![a.clone(), b.clone(), cc.clone()]).unwrap();
        let cycle = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        let g = act_permutation(&f, &cycle).unwrap();
        assert_eq!(g.lines(), &[b, cc, a]);
        assert_eq!(act_permutation(&f, &Permutation::identity(3)).unwrap(), f);
        assert!(act_permutation(&f, &Permutation::identity(2)).is_err());
    }

    #[test]
    fn pi_linked_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_frame(3, &mut rng);
        assert!(pi_linked(&f, &f, &Partition::singletons(3), 1e-9).unwrap());
        let theta = Permutation::transposition(3, 0, 2);
        let g = act_permutation(&f, &theta).unwrap();
        assert!(!pi_linked(&f, &g, &Partition::singletons(3), 1e-9).unwrap());
        let e = evert(&f).unwrap();
        assert!(pi_linked(&f, &e, &Partition::whole(3), 1e-9).unwrap());
        // the swapped pair lives in the same 2-block
        let p = Partition::new(3, vec![vec![0, 2], vec![1]]).unwrap();
        assert!(pi_linked(&f, &g, &p, 1e-9).unwrap());
    }

    #[test]
    fn permutation_helpers() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        assert_eq!(Permutation::all(4).len(), 24);
        assert_eq!(Permutation::rotation(4).order(), 4);
        assert!(Partition::new(3, vec![vec![0], vec![1]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        for p in Permutation::all(4) {
            let word = p.adjacent_word();
            let prod = word
                .iter()
                .fold(Permutation::identity(4), |acc, &k| acc.compose(&Permutation::transposition(4, k, k + 1)));
            assert_eq!(prod, p);
            assert_eq!(p.compose(&p.inverse()), Permutation::identity(4));
        }
    }

    fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn right_action_law(seed in any::<u64>(), n in 2usize..7, k in 0usize..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_frame(n, &mut rng);
            let all = Permutation::all(n);
            let theta = &all[k % all.len()];
            let theta2 = &all[(k * 7 + 3) % all.len()];
            let lhs = act_permutation(&act_permutation(&f, theta).unwrap(), theta2).unwrap();
            let rhs = act_permutation(&f, &theta.compose(theta2)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn word_reproduces_permutation(p in (2usize..7).prop_flat_map(perm_strategy)) {
            let n = p.n();
            let prod = p.adjacent_word().iter().fold(Permutation::identity(n), |acc, &k| {
                acc.compose(&Permutation::transposition(n, k, k + 1))
            });
            prop_assert_eq!(prod, p);
        }
    }
}
