use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use isotropy::arith;
use isotropy::classgroup;
use isotropy::density;
use isotropy::density::EmpiricalDnr;
use isotropy::forms::{BilinearForm, NuBounds, DEFAULT_MAX_N};
use isotropy::gf2::BitMatrix;
use isotropy::quadfield::{build_field, FieldReport};
use isotropy::survey::{self, SurveyConfig};

#[derive(Parser)]
#[command(
    name = "isotropy",
    version,
    about = "Isotropy of F2 bilinear forms and uniform quotients of imaginary quadratic fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bilinear forms given by a Gram matrix file.
    #[command(subcommand)]
    Form(FormCmd),
    /// Imaginary quadratic fields.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Independent class group computations.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Limit densities and empirical 4-rank distributions.
    #[command(subcommand)]
    Density(DensityCmd),
    /// Survey every field up to a discriminant bound.
    Survey(SurveyArgs),
}

#[derive(Subcommand)]
enum FormCmd {
    Analyze { file: PathBuf },
}

#[derive(Subcommand)]
enum FieldCmd {
    Analyze {
        #[arg(allow_hyphen_values = true)]
        d: i128,
        /// Comma separated elements of the radical to use as basis.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        basis: Option<Vec<i128>>,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Accepts a squarefree radicand or a fundamental discriminant.
    Classgroup {
        #[arg(allow_hyphen_values = true)]
        d: i64,
    },
}

#[derive(Subcommand)]
enum DensityCmd {
    Bounds,
    Empirical(FilterArgs),
}

#[derive(Args, Clone)]
struct FilterArgs {
    #[arg(long)]
    max_disc: u64,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    case_a: bool,
    #[arg(long)]
    by_radicand: bool,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SurveyArgs {
    #[command(flatten)]
    filter: FilterArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl FilterArgs {
    fn config(&self) -> SurveyConfig {
        let mut cfg = SurveyConfig::new(self.max_disc);
        cfg.n_filter = self.n;
        cfg.case_a_only = self.case_a;
        cfg.by_radicand = self.by_radicand;
        cfg.jobs = self.jobs;
        cfg
    }
}

#[derive(Serialize)]
struct FormReport {
    n: usize,
    rank: usize,
    rank_sym: usize,
    symmetric: bool,
    alternating: bool,
    right_radical_dim: usize,
    nu_lower: usize,
    nu_upper: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu_exact: Option<usize>,
}

fn form_analyze(file: &PathBuf) -> Result<FormReport> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let gram: BitMatrix = text.parse().context("parsing matrix")?;
    let form = BilinearForm::new(gram)?;
    let NuBounds {
        lower,
        upper,
        exact,
    } = form.nu_bounds_with_exact(DEFAULT_MAX_N);
    Ok(FormReport {
        n: form.dim(),
        rank: form.rank(),
        rank_sym: form.symmetrize().rank(),
        symmetric: form.is_symmetric(),
        alternating: form.is_alternating(),
        right_radical_dim: form.right_radical().len(),
        nu_lower: lower,
        nu_upper: upper,
        nu_exact: exact,
    })
}

#[derive(Serialize)]
struct UserBasis<'a> {
    basis: &'a [i128],
    gram: Vec<Vec<u8>>,
    rank: usize,
}

#[derive(Serialize)]
struct FieldOutput<'a> {
    #[serde(flatten)]
    record: FieldReport<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    user_basis: Option<UserBasis<'a>>,
}

fn field_analyze(d: i128, basis: Option<&[i128]>) -> Result<String> {
    let rec = build_field(d)?;
    let user_basis = match basis {
        Some(elements) => {
            let g = rec.gram_in_basis(elements)?;
            Some(UserBasis {
                basis: elements,
                gram: g.gram().to_rows(),
                rank: g.rank(),
            })
        }
        None => None,
    };
    let out = FieldOutput {
        record: rec.report(),
        user_basis,
    };
    Ok(serde_json::to_string_pretty(&out)?)
}

fn oracle_disc(d: i64) -> Result<i64> {
    if d >= 0 {
        bail!("expected a negative radicand or discriminant, got {d}");
    }
    if arith::is_squarefree(d as i128) {
        return Ok(if d.rem_euclid(4) == 1 { d } else { 4 * d });
    }
    if classgroup::is_fundamental(d) {
        return Ok(d);
    }
    bail!("{d} is neither squarefree nor a fundamental discriminant")
}

#[derive(Serialize)]
struct EmpiricalEntry {
    estimate: EmpiricalDnr,
    /// Limit density for each 4-rank present in `estimate`.
    limit: Vec<(usize, f64)>,
}

#[derive(Serialize)]
struct EmpiricalOutput {
    x_bound: u64,
    total: u64,
    case_a_only: bool,
    by_n: Vec<EmpiricalEntry>,
}

fn density_empirical(filter: &FilterArgs) -> Result<EmpiricalOutput> {
    let agg = survey::run_survey(&filter.config())?.aggregate;
    let mut by_n = Vec::new();
    for &n in agg.by_n.keys() {
        let estimate = agg.empirical_dnr(n)?;
        let limit = estimate
            .counts
            .keys()
            .map(|&r| (r, density::gerth_limit(r as u32)))
            .collect();
        by_n.push(EmpiricalEntry { estimate, limit });
    }
    Ok(EmpiricalOutput {
        x_bound: agg.x_bound,
        total: agg.total,
        case_a_only: filter.case_a,
        by_n,
    })
}

fn pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn run(cli: Cli) -> Result<()> {
    let text = match cli.command {
        Command::Form(FormCmd::Analyze { file }) => pretty(&form_analyze(&file)?)?,
        Command::Field(FieldCmd::Analyze { d, basis }) => field_analyze(d, basis.as_deref())?,
        Command::Oracle(OracleCmd::Classgroup { d }) => {
            pretty(&classgroup::oracle_report(oracle_disc(d)?)?)?
        }
        Command::Density(DensityCmd::Bounds) => {
            let mut table = String::new();
            for row in density::bounds_table() {
                table.push_str(&format!(
                    "{:<12} {:>14.9} {}\n",
                    row.quantity, row.value, row.provenance
                ));
            }
            table.pop();
            table
        }
        Command::Density(DensityCmd::Empirical(filter)) => pretty(&density_empirical(&filter)?)?,
        Command::Survey(args) => {
            let mut cfg = args.filter.config();
            cfg.collect_rows = args.out.is_some();
            let outcome = survey::run_survey(&cfg)?;
            match args.out {
                Some(dir) => {
                    for path in survey::emit(&outcome, &dir)? {
                        eprintln!("wrote {}", path.display());
                    }
                    return Ok(());
                }
                None => survey::aggregate_json(&outcome.aggregate)?,
            }
        }
    };
    let mut stdout = io::stdout().lock();
    match writeln!(stdout, "{text}").and_then(|_| stdout.flush()) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
