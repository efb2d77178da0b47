//! Class groups of imaginary quadratic discriminants from reduced binary
//! quadratic forms.
//!
//! This is deliberately naive: enumerate the reduced forms, compose with
//! the textbook formulas, and read off the group structure from how many
//! elements each prime power kills. It serves as ground truth for the
//! genus-theory 2-rank and the Redei 4-rank.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::arith;

pub const MAX_ABS_DISC: i64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassGroupError {
    #[error("{0} is not a negative fundamental discriminant")]
    BadDiscriminant(i64),
    #[error("forms have different discriminants ({0} and {1})")]
    DiscMismatch(i64, i64),
    #[error("|disc| = {0} exceeds the oracle limit {MAX_ABS_DISC}")]
    TooLarge(i64),
}

/// Positive definite binary quadratic form `ax^2 + bxy + cy^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupStructure {
    pub order: u64,
    /// Invariant factors, each dividing the next.
    pub invariant_factors: Vec<u64>,
}

impl GroupStructure {
    pub fn two_rank(&self) -> usize {
        self.invariant_factors
            .iter()
            .filter(|&&f| f % 2 == 0)
            .count()
    }

    pub fn four_rank(&self) -> usize {
        self.invariant_factors
            .iter()
            .filter(|&&f| f % 4 == 0)
            .count()
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Returns `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn is_fundamental(disc: i64) -> bool {
    if disc >= 0 {
        return false;
    }
    match disc.rem_euclid(4) {
        1 => arith::is_squarefree(disc as i128),
        0 => {
            let m = disc / 4;
            matches!(m.rem_euclid(4), 2 | 3) && arith::is_squarefree(m as i128)
        }
        _ => false,
    }
}

fn check_disc(disc: i64) -> Result<(), ClassGroupError> {
    if !is_fundamental(disc) {
        return Err(ClassGroupError::BadDiscriminant(disc));
    }
    if disc.abs() > MAX_ABS_DISC {
        return Err(ClassGroupError::TooLarge(disc));
    }
    Ok(())
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Identity element: `(1, 0, -D/4)` or `(1, 1, (1-D)/4)`.
    pub fn principal(disc: i64) -> Self {
        if disc.rem_euclid(4) == 0 {
            QuadForm::new(1, 0, -disc / 4)
        } else {
            QuadForm::new(1, 1, (1 - disc) / 4)
        }
    }

    pub fn inverse(&self) -> Self {
        QuadForm::new(self.a, -self.b, self.c).reduce()
    }

    pub fn is_reduced(&self) -> bool {
        let QuadForm { a, b, c } = *self;
        b.abs() <= a && a <= c && ((b.abs() != a && a != c) || b >= 0)
    }

    /// Reduced representative of the proper equivalence class.
    pub fn reduce(self) -> Self {
        let QuadForm {
            mut a,
            mut b,
            mut c,
        } = self;
        debug_assert!(a > 0);
        loop {
            // Bring b into (-a, a].
            if b <= -a || b > a {
                let two_a = 2 * a;
                let mut k = (a - b).div_euclid(two_a);
                // b + 2ak in (-a, a]
                if b + two_a * k <= -a {
                    k += 1;
                }
                let b_new = b + two_a * k;
                c += k * (b + a * k);
                b = b_new;
            }
            if a > c {
                (a, b, c) = (c, -b, a);
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return QuadForm::new(a, b, c);
        }
    }

    /// Gauss composition of two primitive forms of the same discriminant.
    pub fn compose(&self, other: &QuadForm) -> Result<QuadForm, ClassGroupError> {
        let disc = self.disc();
        if other.disc() != disc {
            return Err(ClassGroupError::DiscMismatch(disc, other.disc()));
        }
        let (a1, b1) = (self.a, self.b);
        let (a2, b2) = (other.a, other.b);
        let beta = (b1 + b2) / 2;
        // g = u a1 + v a2 + w beta
        let (h, x, y) = ext_gcd(a1, a2);
        let (g, s, w) = ext_gcd(h, beta);
        let (u, v) = (s * x, s * y);
        let a3 = a1 / g * (a2 / g);
        let two_a3 = 2 * a3;
        let num = (u as i128) * (a1 as i128) * (b2 as i128)
            + (v as i128) * (a2 as i128) * (b1 as i128)
            + (w as i128) * ((b1 as i128) * (b2 as i128) + disc as i128) / 2;
        let b3 = (num / g as i128).rem_euclid(two_a3 as i128) as i64;
        let c3 = (b3 as i128 * b3 as i128 - disc as i128) / (4 * a3 as i128);
        Ok(QuadForm::new(a3, b3, c3 as i64).reduce())
    }

    pub fn pow(&self, mut e: u64) -> QuadForm {
        let disc = self.disc();
        let mut acc = QuadForm::principal(disc);
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base).expect("same discriminant");
            }
            base = base.compose(&base).expect("same discriminant");
            e >>= 1;
        }
        acc
    }
}

/// All reduced primitive forms of a negative fundamental discriminant.
pub fn reduced_forms(disc: i64) -> Result<Vec<QuadForm>, ClassGroupError> {
    if !is_fundamental(disc) {
        return Err(ClassGroupError::BadDiscriminant(disc));
    }
    let abs = -disc;
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= abs {
        let mut b = -a + 1;
        while b <= a {
            let num = b * b - disc;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                let f = QuadForm::new(a, b, c);
                if c >= a && f.is_reduced() && gcd(gcd(a, b), c) == 1 {
                    out.push(f);
                }
            }
            b += 1;
        }
        a += 1;
    }
    Ok(out)
}

/// Invariant factors of the class group.
///
/// For every prime `p` dividing the class number and every `k`, count the
/// elements killed by `p^k`; the jumps in `log_p` of these counts give the
/// number of cyclic factors of order at least `p^k`.
pub fn group_structure(disc: i64) -> Result<GroupStructure, ClassGroupError> {
    check_disc(disc)?;
    let forms = reduced_forms(disc)?;
    let h = forms.len() as u64;
    let principal = QuadForm::principal(disc);
    let fh = arith::factor(h as i128).expect("h >= 1");

    // cyclic p-parts, per prime: list of exponents (largest first).
    let mut per_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &(p, e) in &fh.factors {
        let p = p as u64;
        let mut logs = vec![0u32];
        let mut pk = 1u64;
        for _ in 1..=e {
            pk *= p;
            let killed = forms.iter().filter(|f| f.pow(pk) == principal).count() as u64;
            logs.push(ilog(killed, p));
        }
        // at_least[k] = number of cyclic factors of order >= p^k
        let at_least: Vec<u32> = (1..logs.len()).map(|k| logs[k] - logs[k - 1]).collect();
        let mut exps = Vec::new();
        for (k, &cnt) in at_least.iter().enumerate() {
            let next = at_least.get(k + 1).copied().unwrap_or(0);
            for _ in 0..(cnt - next) {
                exps.push(k as u32 + 1);
            }
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        per_prime.insert(p, exps);
    }

    let rank = per_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut factors = vec![1u64; rank];
    // Largest factor last: factors[rank - 1 - i] collects the i-th largest
    // p-power of every prime.
    for (&p, exps) in &per_prime {
        for (i, &e) in exps.iter().enumerate() {
            factors[rank - 1 - i] *= p.pow(e);
        }
    }
    let structure = GroupStructure {
        order: h,
        invariant_factors: factors,
    };
    debug_assert_eq!(structure.invariant_factors.iter().product::<u64>(), h);
    Ok(structure)
}

fn ilog(mut x: u64, p: u64) -> u32 {
    let mut k = 0;
    while x > 1 {
        debug_assert_eq!(x % p, 0);
        x /= p;
        k += 1;
    }
    k
}

pub fn two_rank(disc: i64) -> Result<usize, ClassGroupError> {
    Ok(group_structure(disc)?.two_rank())
}

pub fn four_rank(disc: i64) -> Result<usize, ClassGroupError> {
    Ok(group_structure(disc)?.four_rank())
}

/// JSON view for the oracle CLI.
#[derive(Serialize)]
pub struct OracleReport {
    pub disc: i64,
    pub h: u64,
    pub invariant_factors: Vec<u64>,
    pub two_rank: usize,
    pub four_rank: usize,
}

pub fn oracle_report(disc: i64) -> Result<OracleReport, ClassGroupError> {
    let s = group_structure(disc)?;
    Ok(OracleReport {
        disc,
        h: s.order,
        two_rank: s.two_rank(),
        four_rank: s.four_rank(),
        invariant_factors: s.invariant_factors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_form_examples() {
        assert_eq!(reduced_forms(-4).unwrap(), vec![QuadForm::new(1, 0, 1)]);
        assert_eq!(
            reduced_forms(-23).unwrap(),
            vec![
                QuadForm::new(1, 1, 6),
                QuadForm::new(2, -1, 3),
                QuadForm::new(2, 1, 3)
            ]
        );
        assert_eq!(reduced_forms(-3).unwrap().len(), 1);
        assert_eq!(
            reduced_forms(-12),
            Err(ClassGroupError::BadDiscriminant(-12))
        );
        assert_eq!(reduced_forms(5), Err(ClassGroupError::BadDiscriminant(5)));
    }

    #[test]
    fn known_class_numbers() {
        // Class numbers of Q(sqrt(-d)) from standard tables.
        let table = [
            (-3, 1),
            (-4, 1),
            (-7, 1),
            (-8, 1),
            (-15, 2),
            (-20, 2),
            (-23, 3),
            (-84, 4),
            (-163, 1),
            (-420, 8),
            (-5460, 16),
        ];
        for (disc, h) in table {
            assert_eq!(reduced_forms(disc).unwrap().len(), h, "{disc}");
        }
    }

    #[test]
    fn compose_examples() {
        let p = QuadForm::principal(-23);
        let g = QuadForm::new(2, 1, 3);
        assert_eq!(p.compose(&g).unwrap(), g);
        assert_eq!(g.compose(&g).unwrap(), QuadForm::new(2, -1, 3));
        assert_eq!(
            g.compose(&QuadForm::new(1, 0, 1)),
            Err(ClassGroupError::DiscMismatch(-23, -4))
        );
        for f in reduced_forms(-5460).unwrap() {
            assert_eq!(f.compose(&f.inverse()).unwrap(), QuadForm::principal(-5460));
        }
    }

    #[test]
    fn group_laws_full_table() {
        for disc in [-5460i64, -3299, -9748, -3896] {
            let forms = reduced_forms(disc).unwrap();
            for f in &forms {
                for g in &forms {
                    let fg = f.compose(g).unwrap();
                    assert!(fg.is_reduced());
                    assert_eq!(fg, g.compose(f).unwrap());
                    for k in forms.iter().step_by(7) {
                        assert_eq!(
                            fg.compose(k).unwrap(),
                            f.compose(&g.compose(k).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn structure_examples() {
        let s = group_structure(-23).unwrap();
        assert_eq!(s.invariant_factors, vec![3]);
        assert_eq!((s.two_rank(), s.four_rank()), (0, 0));

        let s = group_structure(-84).unwrap();
        assert_eq!(s.invariant_factors, vec![2, 2]);
        assert_eq!(s.two_rank(), 2);

        let s = group_structure(-5460).unwrap();
        assert_eq!(s.invariant_factors, vec![2, 2, 2, 2]);
        assert_eq!((s.two_rank(), s.four_rank()), (4, 0));

        // Q(sqrt(-17)): h = 4, cyclic.
        let s = group_structure(-68).unwrap();
        assert_eq!(s.invariant_factors, vec![4]);
        assert_eq!(s.four_rank(), 1);

        assert_eq!(
            group_structure(-4_000_004),
            Err(ClassGroupError::TooLarge(-4_000_004))
        );
    }

    #[test]
    fn structure_is_consistent() {
        for disc in (-3000i64..-2).filter(|&d| is_fundamental(d)) {
            let s = group_structure(disc).unwrap();
            assert_eq!(s.invariant_factors.iter().product::<u64>(), s.order);
            for w in s.invariant_factors.windows(2) {
                assert_eq!(w[1] % w[0], 0, "{disc}: {:?}", s.invariant_factors);
            }
        }
    }
}
