//! Surveys over all imaginary quadratic fields up to a discriminant bound.
//!
//! Radicands are produced by a segmented sieve that factors every integer
//! of a window at once. Windows are processed in parallel and their partial
//! aggregates merged in window order, so results do not depend on the
//! number of workers or the window size.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::density::{self, DnrSource, EmpiricalDnr, PUBLISHED_FM_ND};
use crate::quadfield::{build_from_odd_primes, FieldRecord};

pub const DEFAULT_CHUNK: u64 = 1 << 15;
/// Bracket indices `i` tracked in `fm_bracket`.
pub const BRACKETS: std::ops::RangeInclusive<u32> = 1..=3;

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error("discriminant bound must be at least 3, got {0}")]
    BoundTooSmall(u64),
    #[error("could not build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug)]
pub struct SurveyConfig {
    /// Bound on `|disc|`, or on `|d|` with `by_radicand`.
    pub max_disc: u64,
    pub n_filter: Option<usize>,
    pub case_a_only: bool,
    pub by_radicand: bool,
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
    pub chunk_size: u64,
    pub collect_rows: bool,
}

impl SurveyConfig {
    pub fn new(max_disc: u64) -> Self {
        SurveyConfig {
            max_disc,
            n_filter: None,
            case_a_only: false,
            by_radicand: false,
            jobs: None,
            chunk_size: DEFAULT_CHUNK,
            collect_rows: false,
        }
    }

    /// Largest `|d|` that can pass the bound.
    fn max_radicand(&self) -> u64 {
        self.max_disc
    }

    fn admits(&self, m: u64) -> bool {
        if self.by_radicand {
            return m <= self.max_disc;
        }
        // d = -m is 1 mod 4 exactly when m is 3 mod 4; otherwise disc = 4d.
        if m % 4 == 3 {
            m <= self.max_disc
        } else {
            m <= self.max_disc / 4
        }
    }

    fn selects(&self, rec: &FieldRecord) -> bool {
        self.n_filter.is_none_or(|n| rec.n == n) && (!self.case_a_only || rec.case_a)
    }
}

/// Primes up to `limit` by the sieve of Eratosthenes.
fn primes_up_to(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    crate::arith::isqrt_u128(n as u128) as u64
}

const MAX_DISTINCT: usize = 16;

#[derive(Clone, Copy)]
struct SmallFactors {
    len: u8,
    primes: [u64; MAX_DISTINCT],
}

impl SmallFactors {
    const EMPTY: SmallFactors = SmallFactors {
        len: 0,
        primes: [0; MAX_DISTINCT],
    };

    fn push(&mut self, p: u64) {
        self.primes[self.len as usize] = p;
        self.len += 1;
    }

    fn as_slice(&self) -> &[u64] {
        &self.primes[..self.len as usize]
    }
}

/// Factors every integer in `[lo, hi)` with the base primes; returns the
/// prime lists of the squarefree ones, in increasing order of the integer.
fn squarefree_window(lo: u64, hi: u64, base: &[u64]) -> Vec<(u64, SmallFactors)> {
    let len = (hi - lo) as usize;
    let mut rem: Vec<u64> = (lo..hi).collect();
    let mut squarefree = vec![true; len];
    let mut factors = vec![SmallFactors::EMPTY; len];
    let bound = isqrt(hi.saturating_sub(1));
    for &p in base.iter().take_while(|&&p| p <= bound) {
        let first = lo.div_ceil(p) * p;
        let mut m = first;
        while m < hi {
            let i = (m - lo) as usize;
            rem[i] /= p;
            if rem[i].is_multiple_of(p) {
                squarefree[i] = false;
            } else {
                factors[i].push(p);
            }
            m += p;
        }
    }
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        if !squarefree[i] || lo + i as u64 == 0 {
            continue;
        }
        let mut f = factors[i];
        if rem[i] > 1 {
            f.push(rem[i]);
        }
        out.push((lo + i as u64, f));
    }
    out
}

/// Every squarefree `d < 0` passing the bound, ordered by `|d|`.
pub fn squarefree_radicands(x: u64, by_radicand: bool) -> Vec<i128> {
    let mut cfg = SurveyConfig::new(x);
    cfg.by_radicand = by_radicand;
    let base = primes_up_to(isqrt(cfg.max_radicand()) + 1);
    let mut out = Vec::new();
    let mut lo = 1;
    while lo <= cfg.max_radicand() {
        let hi = (lo + cfg.chunk_size).min(cfg.max_radicand() + 1);
        for (m, _) in squarefree_window(lo, hi, &base) {
            if cfg.admits(m) {
                out.push(-(m as i128));
            }
        }
        lo = hi;
    }
    out
}

/// Parallel fold over every selected field record.
///
/// Partial results are merged in window order with `merge`, which must be
/// associative for the result to be independent of the chunking.
pub fn fold_fields<T, I, F, M>(
    cfg: &SurveyConfig,
    identity: I,
    fold: F,
    merge: M,
) -> Result<T, SurveyError>
where
    T: Send,
    I: Fn() -> T + Sync,
    F: Fn(T, &FieldRecord) -> T + Sync,
    M: Fn(T, T) -> T,
{
    if cfg.max_disc < 3 {
        return Err(SurveyError::BoundTooSmall(cfg.max_disc));
    }
    let top = cfg.max_radicand();
    let base = primes_up_to(isqrt(top) + 1);
    let chunk = cfg.chunk_size.max(1);
    let windows: Vec<(u64, u64)> = (0..top.div_ceil(chunk))
        .map(|k| (1 + k * chunk, (1 + (k + 1) * chunk).min(top + 1)))
        .collect();

    let work = || {
        windows
            .par_iter()
            .map(|&(lo, hi)| {
                let mut acc = identity();
                for (m, f) in squarefree_window(lo, hi, &base) {
                    if !cfg.admits(m) {
                        continue;
                    }
                    let odd: Vec<u128> = f
                        .as_slice()
                        .iter()
                        .filter(|&&p| p != 2)
                        .map(|&p| p as u128)
                        .collect();
                    let rec = build_from_odd_primes(-(m as i128), odd);
                    if cfg.selects(&rec) {
                        acc = fold(acc, &rec);
                    }
                }
                acc
            })
            .collect::<Vec<T>>()
    };
    let parts = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()?
            .install(work),
        None => work(),
    };
    Ok(parts.into_iter().fold(identity(), merge))
}

type Nested = BTreeMap<usize, BTreeMap<usize, u64>>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SurveyAggregate {
    pub x_bound: u64,
    pub total: u64,
    pub by_n: BTreeMap<usize, u64>,
    /// 2-rank -> 4-rank -> count.
    pub by_n_r: Nested,
    /// Fields where the verdict rules out every nontrivial uniform quotient.
    pub fm_n: BTreeMap<usize, u64>,
    /// 2-rank -> d -> fields with no uniform quotient of dimension > d.
    pub fm_n_d: Nested,
    /// i -> fields with no uniform quotient of dimension > i + n/2.
    pub fm_bracket: BTreeMap<u32, u64>,
    pub case_a: u64,
}

impl SurveyAggregate {
    pub fn new(x_bound: u64) -> Self {
        SurveyAggregate {
            x_bound,
            ..Default::default()
        }
    }

    pub fn add(&mut self, rec: &FieldRecord) {
        let n = rec.n;
        let dim = rec.verdict.max_uniform_dim;
        self.total += 1;
        *self.by_n.entry(n).or_default() += 1;
        *self
            .by_n_r
            .entry(n)
            .or_default()
            .entry(rec.four_rank)
            .or_default() += 1;
        let fm = self.fm_n.entry(n).or_default();
        if rec.verdict.conjecture2_decided {
            *fm += 1;
        }
        let row = self.fm_n_d.entry(n).or_default();
        for d in 0..=n.max(3) {
            let slot = row.entry(d).or_default();
            if dim <= d {
                *slot += 1;
            }
        }
        for i in BRACKETS {
            let slot = self.fm_bracket.entry(i).or_default();
            // dim <= i + n/2, compared in halves.
            if 2 * dim <= 2 * i as usize + n {
                *slot += 1;
            }
        }
        if rec.case_a {
            self.case_a += 1;
        }
    }

    pub fn merge(mut self, other: SurveyAggregate) -> SurveyAggregate {
        fn add_nested(a: &mut Nested, b: Nested) {
            for (k, inner) in b {
                let row = a.entry(k).or_default();
                for (j, c) in inner {
                    *row.entry(j).or_default() += c;
                }
            }
        }
        self.total += other.total;
        for (k, c) in other.by_n {
            *self.by_n.entry(k).or_default() += c;
        }
        for (k, c) in other.fm_n {
            *self.fm_n.entry(k).or_default() += c;
        }
        for (k, c) in other.fm_bracket {
            *self.fm_bracket.entry(k).or_default() += c;
        }
        add_nested(&mut self.by_n_r, other.by_n_r);
        add_nested(&mut self.fm_n_d, other.fm_n_d);
        self.case_a += other.case_a;
        self
    }

    pub fn empirical_dnr(&self, n: usize) -> Result<EmpiricalDnr, density::DensityError> {
        EmpiricalDnr::from_counts(n, self.by_n_r.get(&n).cloned().unwrap_or_default())
    }

    pub fn fm_bracket_ratio(&self, i: u32) -> f64 {
        self.fm_bracket.get(&i).copied().unwrap_or(0) as f64 / self.total as f64
    }

    pub fn comparisons(&self) -> Comparisons {
        let mut dnr = Vec::new();
        for &n in self.by_n.keys() {
            if let Ok(e) = self.empirical_dnr(n) {
                dnr.push(e);
            }
        }
        let mut fm_nd = Vec::new();
        for &(n, d, fixture) in &PUBLISHED_FM_ND {
            let Some(&count) = self.by_n.get(&n) else {
                continue;
            };
            // The published bound for "no quotient of dimension d or more"
            // corresponds to max_uniform_dim <= d - 1.
            let hits = self
                .fm_n_d
                .get(&n)
                .and_then(|row| row.get(&(d - 1)))
                .copied()
                .unwrap_or(0);
            let empirical_dnr = self.empirical_dnr(n).ok();
            fm_nd.push(FmNdComparison {
                n,
                d,
                empirical: hits as f64 / count as f64,
                empirical_dnr_sum: empirical_dnr
                    .and_then(|e| density::fm_nd_bound(n, d, &DnrSource::Map(&e.proportions))),
                fixture,
            });
        }
        let fm_bracket = BRACKETS
            .map(|i| BracketComparison {
                i,
                empirical: self.fm_bracket_ratio(i),
                limit_bound: density::fm_bracket_bound(i),
            })
            .collect();
        let mut all_r: BTreeMap<usize, u64> = BTreeMap::new();
        for row in self.by_n_r.values() {
            for (&r, &c) in row {
                *all_r.entry(r).or_default() += c;
            }
        }
        let d_inf = (0..=4usize)
            .map(|r| LimitComparison {
                r,
                empirical: all_r.get(&r).copied().unwrap_or(0) as f64 / self.total.max(1) as f64,
                limit: density::gerth_limit(r as u32),
            })
            .collect();
        Comparisons {
            dnr,
            fm_nd,
            fm_bracket,
            d_inf,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FmNdComparison {
    pub n: usize,
    pub d: usize,
    pub empirical: f64,
    pub empirical_dnr_sum: Option<f64>,
    pub fixture: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketComparison {
    pub i: u32,
    pub empirical: f64,
    pub limit_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitComparison {
    pub r: usize,
    pub empirical: f64,
    pub limit: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparisons {
    pub dnr: Vec<EmpiricalDnr>,
    pub fm_nd: Vec<FmNdComparison>,
    pub fm_bracket: Vec<BracketComparison>,
    pub d_inf: Vec<LimitComparison>,
}

pub const CSV_HEADER: [&str; 15] = [
    "d",
    "disc",
    "n",
    "case_a",
    "symmetric",
    "rank_gram",
    "rank_redei",
    "four_rank",
    "nu_lower",
    "nu_upper",
    "nu_exact",
    "nu_is_exact",
    "max_uniform_dim",
    "conjecture2_decided",
    "cs_pair",
];

fn csv_row(rec: &FieldRecord) -> [String; 15] {
    [
        rec.d.to_string(),
        rec.disc.to_string(),
        rec.n.to_string(),
        rec.case_a.to_string(),
        rec.symmetric.to_string(),
        rec.rank_gram.to_string(),
        rec.rank_redei.to_string(),
        rec.four_rank.to_string(),
        rec.nu.lower.to_string(),
        rec.nu.upper.to_string(),
        rec.nu.exact.map(|v| v.to_string()).unwrap_or_default(),
        rec.nu_is_exact().to_string(),
        rec.verdict.max_uniform_dim.to_string(),
        rec.verdict.conjecture2_decided.to_string(),
        rec.cs_pair
            .map(|(p, q)| format!("{p};{q}"))
            .unwrap_or_default(),
    ]
}

pub struct SurveyOutcome {
    pub aggregate: SurveyAggregate,
    /// CSV body (no header) when rows were collected.
    pub rows_csv: Option<Vec<u8>>,
}

struct Partial {
    agg: SurveyAggregate,
    rows: Option<Vec<u8>>,
}

fn append_row(buf: &mut Vec<u8>, rec: &FieldRecord) -> Result<(), SurveyError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .buffer_capacity(256)
        .from_writer(buf);
    w.write_record(csv_row(rec))?;
    w.flush()?;
    Ok(())
}

pub fn run_survey(cfg: &SurveyConfig) -> Result<SurveyOutcome, SurveyError> {
    let identity = || Partial {
        agg: SurveyAggregate::new(cfg.max_disc),
        rows: cfg.collect_rows.then(Vec::new),
    };
    let fold = |mut p: Partial, rec: &FieldRecord| {
        p.agg.add(rec);
        if let Some(buf) = p.rows.as_mut() {
            append_row(buf, rec).expect("write to memory");
        }
        p
    };
    let merge = |a: Partial, b: Partial| {
        let rows = match (a.rows, b.rows) {
            (Some(mut ra), Some(rb)) => {
                ra.extend(rb);
                Some(ra)
            }
            _ => None,
        };
        Partial {
            agg: a.agg.merge(b.agg),
            rows,
        }
    };
    let total = fold_fields(cfg, identity, fold, merge)?;
    Ok(SurveyOutcome {
        aggregate: total.agg,
        rows_csv: total.rows,
    })
}

#[derive(Serialize)]
struct AggregateJson<'a> {
    #[serde(flatten)]
    aggregate: &'a SurveyAggregate,
    comparisons: Comparisons,
}

pub fn aggregate_json(agg: &SurveyAggregate) -> Result<String, SurveyError> {
    Ok(serde_json::to_string_pretty(&AggregateJson {
        aggregate: agg,
        comparisons: agg.comparisons(),
    })?)
}

pub fn csv_document(rows: &[u8]) -> Result<Vec<u8>, SurveyError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    out.extend_from_slice(rows);
    Ok(out)
}

/// Writes `fields.csv` (when rows were collected) and `aggregate.json`.
pub fn emit(outcome: &SurveyOutcome, dir: &Path) -> Result<Vec<PathBuf>, SurveyError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if let Some(rows) = &outcome.rows_csv {
        let path = dir.join("fields.csv");
        fs::write(&path, csv_document(rows)?)?;
        written.push(path);
    }
    let path = dir.join("aggregate.json");
    let mut json = aggregate_json(&outcome.aggregate)?;
    json.push('\n');
    fs::write(&path, json)?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith;

    #[test]
    fn radicands_up_to_twenty() {
        assert_eq!(
            squarefree_radicands(20, false),
            vec![-1, -2, -3, -5, -7, -11, -15, -19]
        );
        for d in squarefree_radicands(2000, false) {
            assert!(arith::is_squarefree(d));
            let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
            assert!(disc.abs() <= 2000);
        }
    }

    #[test]
    fn radicand_count_matches_trial_division() {
        let x = 200_000u64;
        let by_sieve = squarefree_radicands(x, false).len();
        let by_trial = (1..=x)
            .filter(|&m| {
                let disc = if m % 4 == 3 { m } else { 4 * m };
                disc <= x && arith::is_squarefree(m as i128)
            })
            .count();
        assert_eq!(by_sieve, by_trial);
        let by_radicand = squarefree_radicands(1000, true);
        assert_eq!(
            by_radicand.len(),
            (1..=1000).filter(|&m| arith::is_squarefree(m)).count()
        );
    }

    #[test]
    fn window_factorizations_are_complete() {
        let base = primes_up_to(400);
        for (m, f) in squarefree_window(100_000, 160_000, &base) {
            let expected: Vec<u64> = arith::factor(m as i128)
                .unwrap()
                .primes()
                .map(|p| p as u64)
                .collect();
            assert_eq!(f.as_slice(), expected.as_slice(), "{m}");
        }
    }

    #[test]
    fn smallest_survey() {
        let mut cfg = SurveyConfig::new(3);
        cfg.collect_rows = true;
        let out = run_survey(&cfg).unwrap();
        assert_eq!(out.aggregate.total, 1);
        let csv = String::from_utf8(csv_document(out.rows_csv.as_ref().unwrap()).unwrap()).unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.lines().nth(1).unwrap().starts_with("-3,-3,0,true,"));
        assert!(matches!(
            run_survey(&SurveyConfig::new(2)),
            Err(SurveyError::BoundTooSmall(2))
        ));
    }

    #[test]
    fn field_1365_is_counted() {
        let mut cfg = SurveyConfig::new(5460);
        cfg.n_filter = Some(4);
        cfg.collect_rows = true;
        let out = run_survey(&cfg).unwrap();
        let csv = String::from_utf8(out.rows_csv.unwrap()).unwrap();
        let row = csv.lines().find(|l| l.starts_with("-1365,")).unwrap();
        assert_eq!(row, "-1365,-5460,4,false,false,3,4,0,2,2,2,true,2,true,3;5");
        assert!(out.aggregate.fm_n[&4] >= 1);
        assert_eq!(out.aggregate.by_n.keys().collect::<Vec<_>>(), vec![&4]);
    }

    #[test]
    fn aggregate_invariants() {
        let mut cfg = SurveyConfig::new(100_000);
        cfg.collect_rows = true;
        let out = run_survey(&cfg).unwrap();
        let agg = &out.aggregate;
        assert_eq!(agg.by_n.values().sum::<u64>(), agg.total);
        for (n, row) in &agg.by_n_r {
            assert_eq!(row.values().sum::<u64>(), agg.by_n[n]);
            assert!(agg.fm_n[n] <= agg.by_n[n]);
            assert_eq!(agg.fm_n[n], agg.fm_n_d[n][&2]);
            let bound = (agg.x_bound as f64).log2() + 2.0;
            assert!((*n as f64) <= bound);
        }
        let brackets: Vec<u64> = agg.fm_bracket.values().copied().collect();
        assert!(brackets.windows(2).all(|w| w[0] <= w[1]));
        let rows = out.rows_csv.unwrap();
        assert_eq!(
            rows.iter().filter(|&&b| b == b'\n').count() as u64,
            agg.total
        );
    }

    #[test]
    fn chunking_does_not_change_results() {
        let run = |chunk: u64, jobs: usize| {
            let mut cfg = SurveyConfig::new(100_000);
            cfg.chunk_size = chunk;
            cfg.jobs = Some(jobs);
            cfg.collect_rows = true;
            let out = run_survey(&cfg).unwrap();
            (out.aggregate, out.rows_csv.unwrap())
        };
        let reference = run(10_000, 1);
        assert_eq!(run(97, 4), reference);
        assert_eq!(run(1, 2), reference);
    }

    #[test]
    fn emit_writes_csv_and_json() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = SurveyConfig::new(1000);
        cfg.collect_rows = true;
        let out = run_survey(&cfg).unwrap();
        let written = emit(&out, &dir.path().join("nested")).unwrap();
        assert_eq!(written.len(), 2);
        let csv = fs::read_to_string(&written[0]).unwrap();
        assert_eq!(csv.lines().count() as u64, out.aggregate.total + 1);
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&written[1]).unwrap()).unwrap();
        assert_eq!(json["total"], out.aggregate.total);
        assert_eq!(json["comparisons"]["fm_bracket"].as_array().unwrap().len(), 3);

        cfg.collect_rows = false;
        let bare = run_survey(&cfg).unwrap();
        assert_eq!(bare.aggregate, out.aggregate);
        let written = emit(&bare, dir.path()).unwrap();
        assert_eq!(written, vec![dir.path().join("aggregate.json")]);
    }
}
