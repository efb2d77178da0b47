//! Limit densities of 4-ranks and the lower bounds they imply for the
//! proportion of fields without large uniform quotients.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::quadfield::FieldRecord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DensityError {
    #[error("no fields with 2-rank {0} in the sample")]
    EmptyBucket(usize),
}

/// `prod_{k >= 1} (1 - 2^-k)`, truncated at k = 64.
pub fn infinite_product() -> f64 {
    (1..=64).map(|k| 1.0 - 0.5f64.powi(k)).product()
}

fn finite_product(r: u32) -> f64 {
    (1..=r as i32).map(|k| 1.0 - 0.5f64.powi(k)).product()
}

/// Limit density of imaginary quadratic fields with 4-rank `r`:
/// `2^(-r^2) * prod_{k>=1}(1 - 2^-k) / (prod_{k=1}^r (1 - 2^-k))^2`.
pub fn gerth_limit(r: u32) -> f64 {
    let fp = finite_product(r);
    0.5f64.powi((r * r) as i32) * infinite_product() / (fp * fp)
}

/// `sum_{r=0}^{2i-2} gerth_limit(r)`: density of fields with no uniform
/// quotient of dimension above `i + n/2`.
pub fn fm_bracket_bound(i: u32) -> f64 {
    assert!(i >= 1, "bracket index starts at 1");
    (0..=2 * i - 2).map(gerth_limit).sum()
}

/// Published lower bounds for `FM_n^(d)`, the density of fields of 2-rank
/// `n` with no uniform quotient of dimension `d` or more.
pub const PUBLISHED_FM_ND: [(usize, usize, f64); 9] = [
    (3, 3, 0.992187),
    (4, 3, 0.874268),
    (4, 4, 0.999695),
    (5, 3, 0.331299),
    (5, 4, 0.990624),
    (5, 5, 0.9999943),
    (6, 4, 0.867183),
    (6, 5, 0.999255),
    (6, 6, 1.0 - 5.2e-8),
];

/// Where the finite-`n` densities `d_{n,r}` come from.
pub enum DnrSource<'a> {
    /// The published partial sums.
    Fixture,
    /// Explicit densities, e.g. empirical proportions.
    Map(&'a BTreeMap<usize, f64>),
}

/// `sum_{r=0}^{2d-n-1} d_{n,r}`; zero when the range is empty. `None` when
/// a fixture is requested for a pair that was never published.
pub fn fm_nd_bound(n: usize, d: usize, source: &DnrSource<'_>) -> Option<f64> {
    if 2 * d < n + 1 {
        return Some(0.0);
    }
    let top = 2 * d - n - 1;
    match source {
        DnrSource::Fixture => PUBLISHED_FM_ND
            .iter()
            .find(|&&(fn_, fd, _)| fn_ == n && fd == d)
            .map(|&(_, _, v)| v),
        DnrSource::Map(m) => Some((0..=top).filter_map(|r| m.get(&r)).sum()),
    }
}

/// Empirical 4-rank distribution among fields of 2-rank `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalDnr {
    pub n: usize,
    pub total: u64,
    pub counts: BTreeMap<usize, u64>,
    pub proportions: BTreeMap<usize, f64>,
}

impl EmpiricalDnr {
    pub fn from_counts(n: usize, counts: BTreeMap<usize, u64>) -> Result<Self, DensityError> {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(DensityError::EmptyBucket(n));
        }
        let proportions = counts
            .iter()
            .map(|(&r, &c)| (r, c as f64 / total as f64))
            .collect();
        Ok(EmpiricalDnr {
            n,
            total,
            counts,
            proportions,
        })
    }

    /// Proportion with 4-rank at most `r`, computed from integer counts.
    pub fn cumulative(&self, r: usize) -> f64 {
        let hits: u64 = self.counts.range(..=r).map(|(_, &c)| c).sum();
        hits as f64 / self.total as f64
    }
}

pub fn empirical_dnr<'a, I>(
    records: I,
    n: usize,
    case_a_only: bool,
) -> Result<EmpiricalDnr, DensityError>
where
    I: IntoIterator<Item = &'a FieldRecord>,
{
    let mut counts = BTreeMap::new();
    for rec in records {
        if rec.n == n && (!case_a_only || rec.case_a) {
            *counts.entry(rec.four_rank).or_insert(0u64) += 1;
        }
    }
    EmpiricalDnr::from_counts(n, counts)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub quantity: String,
    pub value: f64,
    pub provenance: &'static str,
}

/// Table behind the `density bounds` command.
pub fn bounds_table() -> Vec<BoundRow> {
    let mut rows = Vec::new();
    for r in 0..=4 {
        rows.push(BoundRow {
            quantity: format!("d_inf,{r}"),
            value: gerth_limit(r),
            provenance: "computed",
        });
    }
    for i in 1..=3 {
        rows.push(BoundRow {
            quantity: format!("FM^[{i}]"),
            value: fm_bracket_bound(i),
            provenance: "computed",
        });
    }
    for &(n, d, v) in &PUBLISHED_FM_ND {
        rows.push(BoundRow {
            quantity: format!("FM_{n}^({d})"),
            value: v,
            provenance: "published",
        });
    }
    rows
}
