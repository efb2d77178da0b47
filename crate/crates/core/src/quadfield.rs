//! Invariants of an imaginary quadratic field `Q(sqrt(d))`.
//!
//! The Kummer radical `V` of the maximal 2-elementary unramified extension
//! is spanned by the signed primes `p*` of the odd ramified primes, minus
//! one of them when 2 is unramified. The bilinear form on `V` is given in
//! that basis by additive Legendre symbols; the Redei matrix extends it to
//! every ramified prime and yields the 4-rank of the class group.

use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, jacobi, kronecker, star_of};
use crate::forms::{BilinearForm, NuBounds, DEFAULT_MAX_N};
use crate::gf2::{BitMatrix, BitVec, Gf2Error};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("radicand {0} is not negative")]
    NotNegative(i128),
    #[error("radicand {0} is not squarefree")]
    NotSquarefree(i128),
    #[error("{0} does not lie in the Kummer radical of the field")]
    BasisNotInRadical(i128),
    #[error("expected {expected} basis elements, got {got}")]
    BasisSize { expected: usize, got: usize },
    #[error("basis elements are linearly dependent")]
    SingularBasis,
}

/// Which of the small 2-rank criteria for the absence of uniform
/// quotients apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CorollaryCase {
    /// 2-rank 5 with a nondegenerate form.
    #[serde(rename = "i")]
    RankFiveNondegenerate,
    /// 2-rank 4 with form rank at least 3.
    #[serde(rename = "ii")]
    RankFourFormRankThree,
    /// 2-rank 3 with a nonzero form.
    #[serde(rename = "iii")]
    RankThreeNonzero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    /// Largest dimension of a uniform quotient not ruled out.
    pub max_uniform_dim: usize,
    pub conjecture2_decided: bool,
    pub corollary_tags: Vec<CorollaryCase>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldRecord {
    /// Squarefree negative radicand.
    pub d: i128,
    /// Fundamental discriminant.
    pub disc: i128,
    pub odd_ramified: Vec<u128>,
    /// 2-part of the discriminant: 1, -4, 8 or -8.
    pub p0_star: i128,
    /// 2-rank of the class group.
    pub n: usize,
    /// Signed primes spanning the Kummer radical, in Gram-matrix order.
    pub basis: Vec<i128>,
    /// Ramified primes in Redei-matrix order: the basis primes, then the
    /// dropped prime or 2.
    pub redei_primes: Vec<u128>,
    pub gram: BilinearForm,
    pub redei: BitMatrix,
    pub rank_gram: usize,
    pub rank_redei: usize,
    pub four_rank: usize,
    pub nu: NuBounds,
    pub symmetric: bool,
    pub case_a: bool,
    pub cs_pair: Option<(u128, u128)>,
    pub verdict: Verdict,
}

/// JSON view of a field record.
#[derive(Serialize)]
pub struct FieldReport<'a> {
    pub d: i128,
    pub disc: i128,
    pub odd_ramified: &'a [u128],
    pub p0_star: i128,
    pub n: usize,
    pub basis: &'a [i128],
    pub redei_primes: &'a [u128],
    pub gram: Vec<Vec<u8>>,
    pub redei: Vec<Vec<u8>>,
    pub rank_gram: usize,
    pub rank_redei: usize,
    pub four_rank: usize,
    pub nu: NuBounds,
    pub nu_is_exact: bool,
    pub symmetric: bool,
    pub case_a: bool,
    pub cs_pair: Option<(u128, u128)>,
    pub verdict: &'a Verdict,
}

#[inline]
fn additive(symbol: i8) -> bool {
    symbol == -1
}

fn fundamental_disc(d: i128) -> i128 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

/// Builds the full record for a squarefree `d < 0`.
pub fn build_field(d: i128) -> Result<FieldRecord, FieldError> {
    if d >= 0 {
        return Err(FieldError::NotNegative(d));
    }
    let f = arith::factor(d).expect("nonzero");
    if !f.is_squarefree() {
        return Err(FieldError::NotSquarefree(d));
    }
    let odd: Vec<u128> = f.primes().filter(|&p| p != 2).collect();
    Ok(build_from_odd_primes(d, odd))
}

/// Builds the record when the odd primes of `d` are already known
/// (increasing, and `d` squarefree).
pub(crate) fn build_from_odd_primes(d: i128, odd_ramified: Vec<u128>) -> FieldRecord {
    let disc = fundamental_disc(d);
    let case_a = disc == d;
    let star_product: i128 = odd_ramified.iter().map(|&p| star_of(p)).product();
    let p0_star = disc / star_product;

    let basis_primes: Vec<u128>;
    let mut redei_primes: Vec<u128>;
    if case_a {
        // -d is 3 mod 4, so an odd number of its primes are 3 mod 4.
        let dropped = *odd_ramified
            .iter()
            .rev()
            .find(|&&p| p % 4 == 3)
            .expect("d = 1 mod 4 and negative has a prime 3 mod 4");
        basis_primes = odd_ramified
            .iter()
            .copied()
            .filter(|&p| p != dropped)
            .collect();
        redei_primes = basis_primes.clone();
        redei_primes.push(dropped);
    } else {
        basis_primes = odd_ramified.clone();
        redei_primes = basis_primes.clone();
        redei_primes.push(2);
    }
    let n = basis_primes.len();
    let basis: Vec<i128> = basis_primes.iter().map(|&p| star_of(p)).collect();

    let gram = gram_from_basis(d, &basis_primes);
    let redei = redei_from_primes(d, disc, p0_star, &redei_primes);
    let rank_gram = gram.rank();
    let rank_redei = redei.rank();
    let four_rank = n
        .checked_sub(rank_redei)
        .expect("Redei matrix rank is at most the 2-rank");

    let nu = gram.nu_bounds_with_exact(DEFAULT_MAX_N);
    let threes = odd_ramified.iter().filter(|&&p| p % 4 == 3).count();
    let symmetric = threes <= 1;
    let cs_pair = find_cs_pair(&odd_ramified);
    let verdict = verdict_from(n, rank_gram, four_rank, &nu);

    FieldRecord {
        d,
        disc,
        odd_ramified,
        p0_star,
        n,
        basis,
        redei_primes,
        gram,
        redei,
        rank_gram,
        rank_redei,
        four_rank,
        nu,
        symmetric,
        case_a,
        cs_pair,
        verdict,
    }
}

/// Gram matrix of the form in the star basis: off the diagonal
/// `(p_i* / p_j)`, on it `(d / p_i* / p_i)`, written additively.
fn gram_from_basis(d: i128, basis_primes: &[u128]) -> BilinearForm {
    let n = basis_primes.len();
    let mut g = BitMatrix::zeros(n, n);
    for (i, &pi) in basis_primes.iter().enumerate() {
        let si = star_of(pi);
        for (j, &pj) in basis_primes.iter().enumerate() {
            let symbol = if i == j {
                jacobi(d / si, pi)
            } else {
                jacobi(si, pj)
            };
            g.set(i, j, additive(symbol));
        }
    }
    BilinearForm::new(g).expect("square")
}

fn redei_from_primes(d: i128, disc: i128, p0_star: i128, primes: &[u128]) -> BitMatrix {
    let k = primes.len();
    let star = |q: u128| if q == 2 { p0_star } else { star_of(q) };
    let mut m = BitMatrix::zeros(k, k);
    for (i, &qi) in primes.iter().enumerate() {
        for (j, &qj) in primes.iter().enumerate() {
            let symbol = match (i == j, qj == 2) {
                (true, true) => kronecker(disc / p0_star, 2),
                (true, false) => jacobi(d / star(qi), qi),
                (false, true) => kronecker(star(qi), 2),
                (false, false) => jacobi(star(qi), qj),
            };
            m.set(i, j, additive(symbol));
        }
    }
    m
}

fn find_cs_pair(odd: &[u128]) -> Option<(u128, u128)> {
    odd.iter().find_map(|&p| {
        let sp = star_of(p);
        odd.iter()
            .find(|&&q| q != p && jacobi(sp, q) == -1)
            .map(|&q| (p, q))
    })
}

fn verdict_from(n: usize, rank_gram: usize, four_rank: usize, nu: &NuBounds) -> Verdict {
    let redei_bound = (n + 1 + four_rank) / 2;
    let max_uniform_dim = nu
        .exact
        .unwrap_or(usize::MAX)
        .min(nu.upper)
        .min(redei_bound);
    let mut corollary_tags = Vec::new();
    if n == 5 && rank_gram == 5 {
        corollary_tags.push(CorollaryCase::RankFiveNondegenerate);
    }
    if n == 4 && rank_gram >= 3 {
        corollary_tags.push(CorollaryCase::RankFourFormRankThree);
    }
    if n == 3 && rank_gram > 0 {
        corollary_tags.push(CorollaryCase::RankThreeNonzero);
    }
    Verdict {
        max_uniform_dim,
        // A nontrivial uniform quotient has dimension at least 3.
        conjecture2_decided: max_uniform_dim <= 2,
        corollary_tags,
    }
}

/// Recomputes the Gram matrix from the record's basis.
pub fn gram_matrix(rec: &FieldRecord) -> BilinearForm {
    let primes: Vec<u128> = rec.basis.iter().map(|s| s.unsigned_abs()).collect();
    gram_from_basis(rec.d, &primes)
}

pub fn redei_matrix(rec: &FieldRecord) -> BitMatrix {
    redei_from_primes(rec.d, rec.disc, rec.p0_star, &rec.redei_primes)
}

pub fn four_rank(rec: &FieldRecord) -> usize {
    rec.n - redei_matrix(rec).rank()
}

pub fn fm_verdict(rec: &FieldRecord) -> Verdict {
    verdict_from(rec.n, rec.rank_gram, rec.four_rank, &rec.nu)
}

impl FieldRecord {
    pub fn nu_is_exact(&self) -> bool {
        self.nu.exact.is_some()
    }

    pub fn gram_is_symmetric(&self) -> bool {
        self.gram.is_symmetric()
    }

    /// The rows of the Redei matrix sum to the zero vector.
    pub fn redei_rows_sum_to_zero(&self) -> bool {
        self.redei.row_sum().is_zero()
    }

    /// Every row of the Redei matrix sums to zero (columns add up to 0).
    pub fn redei_columns_sum_to_zero(&self) -> bool {
        self.redei.column_sum().is_zero()
    }

    /// Coordinates of the square class of `a` in the star basis.
    ///
    /// `a` lies in `V` when, modulo rational squares, it is a product of
    /// basis stars times a power of `d` (which is a square in the field).
    pub fn radical_coordinates(&self, a: i128) -> Result<BitVec, FieldError> {
        let fa = arith::factor(a).map_err(|_| FieldError::BasisNotInRadical(a))?;
        if !fa.is_squarefree() {
            return Err(FieldError::NotSquarefree(a));
        }
        // Coordinates of Q*/Q*^2 restricted to the sign, 2 and the odd
        // ramified primes.
        let slots = 2 + self.odd_ramified.len();
        let slot_of = |p: u128| -> Option<usize> {
            if p == 2 {
                Some(1)
            } else {
                self.odd_ramified
                    .iter()
                    .position(|&q| q == p)
                    .map(|i| 2 + i)
            }
        };
        let encode = |x: i128| -> Option<BitVec> {
            let mut v = BitVec::zeros(slots);
            v.set(0, x < 0);
            for p in arith::factor(x).ok()?.primes() {
                v.set(slot_of(p)?, true);
            }
            Some(v)
        };
        let target = encode(a).ok_or(FieldError::BasisNotInRadical(a))?;
        let mut columns: Vec<BitVec> = self
            .basis
            .iter()
            .map(|&s| encode(s).expect("star of a ramified prime"))
            .collect();
        columns.push(encode(self.d).expect("radicand"));
        let system = BitMatrix::from_columns(&columns, slots);
        let sol = system
            .solve(&target)
            .ok_or(FieldError::BasisNotInRadical(a))?;
        Ok(BitVec::from_bits(
            &sol.iter().take(self.n).collect::<Vec<_>>(),
        ))
    }

    /// Gram matrix of the form in a user-supplied basis of `V`.
    pub fn gram_in_basis(&self, elements: &[i128]) -> Result<BilinearForm, FieldError> {
        if elements.len() != self.n {
            return Err(FieldError::BasisSize {
                expected: self.n,
                got: elements.len(),
            });
        }
        let columns = elements
            .iter()
            .map(|&a| self.radical_coordinates(a))
            .collect::<Result<Vec<_>, _>>()?;
        let e = BitMatrix::from_columns(&columns, self.n);
        self.gram.congruent(&e).map_err(|err| match err {
            crate::forms::FormError::Matrix(Gf2Error::SingularBasis) => FieldError::SingularBasis,
            other => panic!("unexpected basis change failure: {other}"),
        })
    }

    pub fn report(&self) -> FieldReport<'_> {
        FieldReport {
            d: self.d,
            disc: self.disc,
            odd_ramified: &self.odd_ramified,
            p0_star: self.p0_star,
            n: self.n,
            basis: &self.basis,
            redei_primes: &self.redei_primes,
            gram: self.gram.gram().to_rows(),
            redei: self.redei.to_rows(),
            rank_gram: self.rank_gram,
            rank_redei: self.rank_redei,
            four_rank: self.four_rank,
            nu: self.nu,
            nu_is_exact: self.nu_is_exact(),
            symmetric: self.symmetric,
            case_a: self.case_a,
            cs_pair: self.cs_pair,
            verdict: &self.verdict,
        }
    }
}
