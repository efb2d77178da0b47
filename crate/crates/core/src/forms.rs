//! Bilinear forms over GF(2) and their isotropy index.
//!
//! The index of a form is the largest dimension of a subspace `W` with
//! `B(w, w') = 0` for every ordered pair in `W x W`. It is bounded above by
//! `n - ceil(rank / 2)` and, for symmetric forms, known exactly from the
//! rank and whether the form is alternating.

use serde::Serialize;
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVec, Gf2Error};

pub const DEFAULT_MAX_N: usize = 20;
const BRUTE_MAX_N: usize = 8;
const MASK_MAX_N: usize = 64;
/// Work units (search nodes plus candidate batches) before a bounded
/// search gives up.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("form is not symmetric")]
    NotSymmetric,
    #[error("dimension {n} exceeds search limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error(transparent)]
    Matrix(#[from] Gf2Error),
}

/// A bilinear form on GF(2)^n given by its Gram matrix, with
/// `B(e_i, e_j) = gram[i][j]` (the left argument indexes rows).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BilinearForm {
    gram: BitMatrix,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct SymmetricClassification {
    pub rank: usize,
    /// Number of hyperbolic (metabolic) planes.
    pub r0: usize,
    /// Number of leftover `<1>` summands, 0 or 1.
    pub delta: usize,
    pub zeros: usize,
    pub alternating: bool,
    pub nu: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct NuBounds {
    pub lower: usize,
    pub upper: usize,
    pub exact: Option<usize>,
}

impl BilinearForm {
    pub fn new(gram: BitMatrix) -> Result<Self, FormError> {
        if !gram.is_square() {
            return Err(Gf2Error::NonSquare {
                rows: gram.rows(),
                cols: gram.cols(),
            }
            .into());
        }
        Ok(BilinearForm { gram })
    }

    pub fn zero(n: usize) -> Self {
        BilinearForm {
            gram: BitMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &BitMatrix {
        &self.gram
    }

    pub fn into_gram(self) -> BitMatrix {
        self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rank()
    }

    pub fn eval(&self, x: &BitVec, y: &BitVec) -> bool {
        x.dot(&self.gram.mul_vec(y))
    }

    /// `B^sym(x, y) = B(x, y) + B(y, x)`.
    pub fn symmetrize(&self) -> BilinearForm {
        BilinearForm {
            gram: self
                .gram
                .add(&self.gram.transpose())
                .expect("square matrix plus its transpose"),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.gram.is_symmetric()
    }

    /// Symmetric with zero diagonal, which over GF(2) is the same as
    /// `B(x, x) = 0` for all `x`.
    pub fn is_alternating(&self) -> bool {
        self.is_symmetric() && (0..self.dim()).all(|i| !self.gram.get(i, i))
    }

    /// `{x : B(V, x) = 0}`, the kernel of the Gram matrix.
    pub fn right_radical(&self) -> Vec<BitVec> {
        self.gram.kernel_basis()
    }

    pub fn left_radical(&self) -> Vec<BitVec> {
        self.gram.transpose().kernel_basis()
    }

    pub fn congruent(&self, basis_change: &BitMatrix) -> Result<BilinearForm, FormError> {
        Ok(BilinearForm {
            gram: self.gram.congruence(basis_change)?,
        })
    }

    pub fn classify_symmetric(&self) -> Result<SymmetricClassification, FormError> {
        if !self.is_symmetric() {
            return Err(FormError::NotSymmetric);
        }
        let n = self.dim();
        let rank = self.rank();
        let alternating = self.is_alternating();
        // Alternating forms have even rank, so delta = rank mod 2 covers
        // both shapes.
        let delta = rank % 2;
        let r0 = (rank - delta) / 2;
        Ok(SymmetricClassification {
            rank,
            r0,
            delta,
            zeros: n - rank,
            alternating,
            nu: n - r0 - delta,
        })
    }

    /// Upper bound `n - ceil(rk/2)` and lower bound
    /// `n - floor(rk(B^sym)/2) - floor(rk(B)/2)` clamped to the upper bound;
    /// symmetric forms get their exact index as lower bound.
    pub fn nu_bounds(&self) -> NuBounds {
        let n = self.dim();
        let rank = self.rank();
        let upper = n - rank.div_ceil(2);
        let lower = if let Ok(c) = self.classify_symmetric() {
            c.nu
        } else {
            let rank_sym = self.symmetrize().rank();
            n.saturating_sub(rank_sym / 2 + rank / 2).min(upper)
        };
        NuBounds {
            lower,
            upper,
            exact: None,
        }
    }

    /// Bounds with the exact index filled in when `n <= max_n` and the
    /// search finishes within [`DEFAULT_SEARCH_BUDGET`].
    pub fn nu_bounds_with_exact(&self, max_n: usize) -> NuBounds {
        let mut b = self.nu_bounds();
        if let Ok(Some(nu)) = self.nu_exact_within(max_n, Some(DEFAULT_SEARCH_BUDGET)) {
            b.exact = Some(nu);
            b.lower = nu;
            b.upper = nu;
        }
        b
    }

    /// Exact isotropy index by depth-first search over reduced echelon bases.
    pub fn nu_exact(&self, max_n: usize) -> Result<usize, FormError> {
        Ok(self
            .nu_exact_within(max_n, None)?
            .expect("unbounded search always finishes"))
    }

    /// Like [`nu_exact`](Self::nu_exact) but gives up, returning `None`,
    /// after `budget` candidate vectors.
    pub fn nu_exact_within(
        &self,
        max_n: usize,
        budget: Option<u64>,
    ) -> Result<Option<usize>, FormError> {
        let n = self.dim();
        let limit = max_n.min(MASK_MAX_N);
        if n > limit {
            return Err(FormError::TooLarge { n, max: limit });
        }
        if let Ok(c) = self.classify_symmetric() {
            return Ok(Some(c.nu));
        }
        // The two-sided radical lies in some maximal isotropic subspace, so
        // it splits off.
        let (radical, core) = self.split_radical();
        let upper = core.nu_bounds().upper;
        let mut search = IsotropySearch::new(&core.gram, upper, budget);
        search.run();
        Ok((!search.exhausted).then_some(radical + search.best))
    }

    /// Dimension of `{x : B(V, x) = B(x, V) = 0}` and the form induced on
    /// the quotient by it.
    fn split_radical(&self) -> (usize, BilinearForm) {
        let n = self.dim();
        let mut stacked = self.gram.row_masks();
        stacked.extend(self.gram.transpose().row_masks());
        let radical = BitMatrix::from_masks(&stacked, n).kernel_basis();
        if radical.is_empty() {
            return (0, self.clone());
        }
        // Complete the radical to a basis, radical vectors last.
        let mut columns: Vec<BitVec> = Vec::with_capacity(n);
        let mut span = radical.clone();
        for i in 0..n {
            let mut e = BitVec::zeros(n);
            e.set(i, true);
            span.push(e.clone());
            if BitMatrix::from_columns(&span, n).rank() == span.len() {
                columns.push(e);
            } else {
                span.pop();
            }
        }
        let k = columns.len();
        columns.extend(radical);
        let e = BitMatrix::from_columns(&columns, n);
        let g = self
            .gram
            .congruence(&e)
            .expect("completed basis is invertible");
        (
            n - k,
            BilinearForm {
                gram: g.leading_block(k),
            },
        )
    }

    /// Exhaustive index over every subspace of GF(2)^n, `n <= 8`.
    pub fn nu_brute(&self) -> Result<usize, FormError> {
        let n = self.dim();
        if n > BRUTE_MAX_N {
            return Err(FormError::TooLarge {
                n,
                max: BRUTE_MAX_N,
            });
        }
        let g = self.gram.row_masks();
        let eval = |x: u64, y: u64| {
            let mut acc = 0u32;
            for (i, &row) in g.iter().enumerate() {
                if x >> i & 1 == 1 {
                    acc ^= (row & y).count_ones();
                }
            }
            acc & 1 == 1
        };
        for k in (1..=n).rev() {
            let mut found = false;
            for_each_rref(n, k, &mut |rows| {
                found = rows.iter().all(|&x| rows.iter().all(|&y| !eval(x, y)));
                !found
            });
            if found {
                return Ok(k);
            }
        }
        Ok(0)
    }
}

/// Calls `visit` with every `k x n` reduced row echelon matrix (rows as
/// bitmasks, pivot = lowest set bit) until it returns false.
fn for_each_rref(n: usize, k: usize, visit: &mut dyn FnMut(&[u64]) -> bool) {
    fn pivots(n: usize, k: usize, start: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        for p in start..n {
            acc.push(p);
            pivots(n, k, p + 1, acc, out);
            acc.pop();
        }
    }
    let mut sets = Vec::new();
    pivots(n, k, 0, &mut Vec::new(), &mut sets);
    for set in sets {
        let pivot_mask: u64 = set.iter().map(|&p| 1u64 << p).sum();
        // Free positions for each row: after its pivot, not a pivot column.
        let free: Vec<Vec<usize>> = set
            .iter()
            .map(|&p| (p + 1..n).filter(|j| pivot_mask >> j & 1 == 0).collect())
            .collect();
        let total: usize = free.iter().map(Vec::len).sum();
        let mut rows = vec![0u64; k];
        for assignment in 0u64..(1u64 << total) {
            let mut bit = 0;
            for (i, f) in free.iter().enumerate() {
                let mut r = 1u64 << set[i];
                for &j in f {
                    if assignment >> bit & 1 == 1 {
                        r |= 1 << j;
                    }
                    bit += 1;
                }
                rows[i] = r;
            }
            if !visit(&rows) {
                return;
            }
        }
    }
}

#[inline]
fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// Depth-first search for a maximal totally isotropic subspace.
///
/// Vectors are bitmasks. `left[i]` is row `i` of the Gram matrix and
/// `right[j]` its column `j`, so `B(x, y) = parity(L(x) & y)` with
/// `L(x) = xor of left[i] over i in x`, and similarly for `R`.
struct IsotropySearch {
    n: usize,
    left: Vec<u64>,
    right: Vec<u64>,
    target: usize,
    best: usize,
    budget: Option<u64>,
    exhausted: bool,
}

impl IsotropySearch {
    fn new(gram: &BitMatrix, target: usize, budget: Option<u64>) -> Self {
        let n = gram.rows();
        IsotropySearch {
            n,
            left: gram.row_masks(),
            right: gram.transpose().row_masks(),
            target,
            best: 0,
            budget,
            exhausted: false,
        }
    }

    /// Charges `cost` against the budget; false once it is used up.
    fn spend(&mut self, cost: u64) -> bool {
        if let Some(left) = self.budget.as_mut() {
            if *left < cost {
                self.exhausted = true;
                return false;
            }
            *left -= cost;
        }
        true
    }

    fn done(&self) -> bool {
        self.best >= self.target || self.exhausted
    }

    fn apply(table: &[u64], x: u64) -> u64 {
        let mut acc = 0;
        let mut bits = x;
        while bits != 0 {
            acc ^= table[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        acc
    }

    fn run(&mut self) {
        let mut basis = Vec::new();
        let mut constraints = Vec::new();
        self.extend(&mut basis, &mut constraints, 0);
    }

    /// `constraints` are linear functionals every new vector must kill;
    /// `floor` is the first bit position new vectors may use.
    fn extend(&mut self, basis: &mut Vec<u64>, constraints: &mut Vec<u64>, floor: usize) {
        let k = basis.len();
        if k > self.best {
            self.best = k;
        }
        if self.done() || floor >= self.n || !self.spend(1) {
            return;
        }
        let window = !0u64 << floor & low_bits(self.n);
        let space = solve_kernel(constraints, window);
        if space.is_empty() {
            return;
        }
        let left_of: Vec<u64> = space.iter().map(|&s| Self::apply(&self.left, s)).collect();
        let m = space.len();
        // gram[a] has bit b set when B(space[a], space[b]) = 1.
        let gram: Vec<u64> = left_of
            .iter()
            .map(|&l| {
                space
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (b, &sb)| acc | (parity(l & sb) as u64) << b)
            })
            .collect();

        let used: u64 = basis.iter().fold(0, |a, &b| a | b);
        // Vectors with pivot space[i]'s lowest bit are space[i] plus a
        // combination of the later basis vectors.
        for i in 0..m {
            let tail = m - i;
            let tail_rank = mask_rank(gram[i..].iter().map(|&r| r >> i).collect());
            if k + tail - tail_rank.div_ceil(2) <= self.best {
                return;
            }
            let pivot = space[i].trailing_zeros() as usize;
            if used >> pivot & 1 == 1 {
                continue;
            }
            if !self.spend((1u64 << (tail - 1)) / 16) {
                return;
            }
            let mut v = space[i];
            let mut lv = left_of[i];
            for step in 0u64..(1u64 << (tail - 1)) {
                if step > 0 {
                    let flip = i + 1 + step.trailing_zeros() as usize;
                    v ^= space[flip];
                    lv ^= left_of[flip];
                }
                if parity(lv & v) {
                    continue;
                }
                basis.push(v);
                constraints.push(lv);
                constraints.push(Self::apply(&self.right, v));
                self.extend(basis, constraints, pivot + 1);
                constraints.truncate(constraints.len() - 2);
                basis.pop();
                if self.done() {
                    return;
                }
            }
        }
    }
}

#[inline]
fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn mask_rank(mut rows: Vec<u64>) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let r = rows[i];
        if r == 0 {
            continue;
        }
        rank += 1;
        let low = r & r.wrapping_neg();
        for row in rows.iter_mut().skip(i + 1) {
            if *row & low != 0 {
                *row ^= r;
            }
        }
    }
    rank
}

/// Basis of `{v : supp(v) ⊆ window, parity(c & v) = 0 for every c}`.
fn solve_kernel(constraints: &[u64], window: u64) -> Vec<u64> {
    // Reduce constraints restricted to the window; pivot on lowest bit.
    let mut rows: Vec<u64> = Vec::new();
    for &c in constraints {
        let mut r = c & window;
        for &p in &rows {
            let low = p & p.wrapping_neg();
            if r & low != 0 {
                r ^= p;
            }
        }
        if r != 0 {
            let low = r & r.wrapping_neg();
            for p in rows.iter_mut() {
                if *p & low != 0 {
                    *p ^= r;
                }
            }
            rows.push(r);
        }
    }
    let pivot_mask: u64 = rows
        .iter()
        .map(|&r| r & r.wrapping_neg())
        .fold(0, |a, b| a | b);
    let mut basis = Vec::new();
    let mut free = window & !pivot_mask;
    while free != 0 {
        let j = free.trailing_zeros();
        free &= free - 1;
        let mut v = 1u64 << j;
        for &r in &rows {
            if r >> j & 1 == 1 {
                v |= r & r.wrapping_neg();
            }
        }
        basis.push(v);
    }
    reduced_echelon(basis)
}

/// Fully reduced echelon form with pivot = lowest set bit, sorted by pivot.
fn reduced_echelon(vs: Vec<u64>) -> Vec<u64> {
    let mut rows: Vec<u64> = Vec::with_capacity(vs.len());
    for mut r in vs {
        for &p in &rows {
            if r & p & p.wrapping_neg() != 0 {
                r ^= p;
            }
        }
        if r == 0 {
            continue;
        }
        let low = r & r.wrapping_neg();
        for p in rows.iter_mut() {
            if *p & low != 0 {
                *p ^= r;
            }
        }
        rows.push(r);
    }
    rows.sort_by_key(|r| r.trailing_zeros());
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn form(rows: &[&[u8]]) -> BilinearForm {
        BilinearForm::new(BitMatrix::from_rows(rows).unwrap()).unwrap()
    }

    fn sample4() -> BilinearForm {
        form(&[&[1, 1, 1, 0], &[1, 1, 1, 1], &[0, 1, 1, 1], &[0, 1, 1, 0]])
    }

    fn hyperbolic(m: usize) -> BilinearForm {
        let mut g = BitMatrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            g.set(2 * i, 2 * i + 1, true);
            g.set(2 * i + 1, 2 * i, true);
        }
        BilinearForm::new(g).unwrap()
    }

    fn random_form(rng: &mut impl Rng, n: usize) -> BilinearForm {
        let mut g = BitMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g.set(i, j, rng.gen());
            }
        }
        BilinearForm::new(g).unwrap()
    }

    #[test]
    fn symmetrize_examples() {
        assert!(BilinearForm::new(BitMatrix::identity(3))
            .unwrap()
            .symmetrize()
            .gram()
            .is_zero());
        let f = form(&[&[0, 1], &[0, 0]]);
        assert_eq!(f.symmetrize(), form(&[&[0, 1], &[1, 0]]));
        assert!(f.symmetrize().symmetrize().gram().is_zero());
    }

    #[test]
    fn symmetry_flags() {
        let id = BilinearForm::new(BitMatrix::identity(2)).unwrap();
        assert!(id.is_symmetric() && !id.is_alternating());
        let plan = form(&[&[0, 1], &[1, 0]]);
        assert!(plan.is_symmetric() && plan.is_alternating());
        let upper = form(&[&[0, 1], &[0, 0]]);
        assert!(!upper.is_symmetric() && !upper.is_alternating());
    }

    #[test]
    fn classify_examples() {
        let c = form(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]])
            .classify_symmetric()
            .unwrap();
        assert_eq!((c.rank, c.r0, c.delta, c.nu), (2, 1, 0, 2));
        assert!(!c.alternating);

        let c = hyperbolic(1).classify_symmetric().unwrap();
        assert_eq!((c.rank, c.r0, c.delta, c.nu), (2, 1, 0, 1));
        assert!(c.alternating);

        let c = BilinearForm::new(BitMatrix::identity(5))
            .unwrap()
            .classify_symmetric()
            .unwrap();
        assert_eq!((c.rank, c.r0, c.delta, c.nu), (5, 2, 1, 2));

        assert_eq!(
            form(&[&[0, 1], &[0, 0]]).classify_symmetric(),
            Err(FormError::NotSymmetric)
        );
    }

    #[test]
    fn bounds_examples() {
        let b = BilinearForm::zero(4).nu_bounds();
        assert_eq!((b.lower, b.upper), (4, 4));
        let b = BilinearForm::new(BitMatrix::identity(5))
            .unwrap()
            .nu_bounds();
        assert_eq!((b.lower, b.upper), (2, 2));
        assert_eq!(sample4().nu_bounds().upper, 2);
        assert_eq!(sample4().nu_bounds().exact, None);
    }

    #[test]
    fn exact_examples() {
        assert_eq!(sample4().nu_exact(DEFAULT_MAX_N).unwrap(), 2);
        assert_eq!(hyperbolic(3).nu_exact(DEFAULT_MAX_N).unwrap(), 3);
        assert_eq!(
            BilinearForm::new(BitMatrix::identity(5))
                .unwrap()
                .nu_exact(DEFAULT_MAX_N)
                .unwrap(),
            2
        );
        assert_eq!(BilinearForm::zero(0).nu_exact(DEFAULT_MAX_N).unwrap(), 0);
        assert_eq!(
            BilinearForm::zero(21).nu_exact(DEFAULT_MAX_N),
            Err(FormError::TooLarge { n: 21, max: 20 })
        );
        assert_eq!(BilinearForm::zero(21).nu_exact(30).unwrap(), 21);
    }

    #[test]
    fn brute_examples() {
        assert_eq!(BilinearForm::zero(3).nu_brute().unwrap(), 3);
        assert_eq!(form(&[&[1, 1], &[1, 0]]).nu_brute().unwrap(), 1);
        assert_eq!(sample4().nu_brute().unwrap(), 2);
        assert!(matches!(
            BilinearForm::zero(9).nu_brute(),
            Err(FormError::TooLarge { .. })
        ));
    }

    #[test]
    fn rref_enumeration_counts_subspaces() {
        // Gaussian binomials [4 choose k]_2: 1, 15, 35, 15, 1.
        let counts: Vec<usize> = (0..=4)
            .map(|k| {
                let mut c = 0;
                for_each_rref(4, k, &mut |_| {
                    c += 1;
                    true
                });
                c
            })
            .collect();
        assert_eq!(counts, vec![1, 15, 35, 15, 1]);
    }

    #[test]
    fn radical_dimension() {
        let f = sample4();
        assert_eq!(f.rank() + f.right_radical().len(), f.dim());
        let r = &f.right_radical()[0];
        for i in 0..4 {
            let mut e = BitVec::zeros(4);
            e.set(i, true);
            assert!(!f.eval(&e, r));
        }
    }

    #[test]
    fn exact_matches_brute_on_random_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(1..=7);
            let f = random_form(&mut rng, n);
            let brute = f.nu_brute().unwrap();
            assert_eq!(f.nu_exact(DEFAULT_MAX_N).unwrap(), brute, "{f:?}");
            let b = f.nu_bounds();
            assert!(b.lower <= brute && brute <= b.upper, "{f:?} {b:?}");
        }
    }

    #[test]
    fn coarse_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=8);
            let f = random_form(&mut rng, n);
            let nu = f.nu_exact(DEFAULT_MAX_N).unwrap();
            let bound = n as i64 - (3 * f.rank() as i64 + 1) / 2;
            assert!(nu as i64 >= bound);
        }
    }

    #[test]
    fn exact_on_larger_forms() {
        // Orthogonal sum of hyperbolic planes and <1> blocks plus a radical.
        let mut g = BitMatrix::zeros(18, 18);
        for i in 0..6 {
            g.set(2 * i, 2 * i + 1, true);
            g.set(2 * i + 1, 2 * i, true);
        }
        for i in 12..15 {
            g.set(i, i, true);
        }
        let f = BilinearForm::new(g).unwrap();
        let expected = f.classify_symmetric().unwrap().nu;
        assert_eq!(expected, 18 - 6 - 2);
        assert_eq!(f.nu_exact(DEFAULT_MAX_N).unwrap(), expected);
    }

    #[test]
    fn radical_splits_off() {
        let b = sample4();
        let mut g = BitMatrix::zeros(18, 18);
        for i in 0..4 {
            for j in 0..4 {
                g.set(i + 7, j + 7, b.gram().get(i, j));
            }
        }
        let f = BilinearForm::new(g).unwrap();
        assert!(!f.is_symmetric());
        assert_eq!(f.nu_exact(DEFAULT_MAX_N).unwrap(), 14 + 2);
        assert_eq!(f.nu_bounds_with_exact(DEFAULT_MAX_N).exact, Some(16));
    }

    #[test]
    fn bounded_search_gives_up() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_form(&mut rng, 16);
        assert_eq!(f.nu_exact_within(DEFAULT_MAX_N, Some(10)).unwrap(), None);
        let small = random_form(&mut rng, 8);
        assert_eq!(
            small
                .nu_exact_within(DEFAULT_MAX_N, Some(DEFAULT_SEARCH_BUDGET))
                .unwrap(),
            Some(small.nu_brute().unwrap())
        );
        let b = f.nu_bounds_with_exact(DEFAULT_MAX_N);
        assert!(b.lower <= b.upper);
    }

    proptest! {
        #[test]
        fn symmetrization_is_alternating(bits in proptest::collection::vec(any::<bool>(), 0..=100)) {
            let n = (bits.len() as f64).sqrt() as usize;
            let mut g = BitMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    g.set(i, j, bits[i * n + j]);
                }
            }
            let f = BilinearForm::new(g).unwrap();
            prop_assert!(f.symmetrize().is_alternating());
        }
    }
}
