use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use sympart::arith::{MultiPoly, VarContext};
use sympart::identities::{Engine, IdentityError, IdentityId, Params, Side, VerificationReport};
use sympart::partitions::{
    cell_stats, enumerate_partitions, weight_product, ContentKind, Partition, WeightFactor,
};
use sympart::symfunc::{LrCache, SymRing};

/// Exact verifier for partition generating-function identities.
#[derive(Parser, Debug)]
#[command(name = "sympart", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory holding the Littlewood-Richardson cache.
    #[arg(long, global = true, env = "SYMPART_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check an identity (or `all`) exactly to a given q-order.
    Verify {
        target: Target,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Print one side of an identity as a truncated series.
    Expand {
        identity: IdentityId,
        /// `lhs` or `rhs`; may also be given as `--side`.
        side: Option<Side>,
        #[arg(long = "side", conflicts_with = "side")]
        side_flag: Option<Side>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Per-cell statistics of a partition, or weights of all partitions of a size.
    Stats {
        #[arg(long, conflicts_with = "size", required_unless_present = "size")]
        partition: Option<Partition>,
        #[arg(long)]
        size: Option<usize>,
        /// Content used in the weight product.
        #[arg(long, value_enum, default_value_t = Weights::Csp, requires = "size")]
        weights: Weights,
        /// `symbolic` or an integer value for t.
        #[arg(long, default_value = "symbolic", requires = "size")]
        t: TValue,
    },
    /// Inspect or manage the Littlewood-Richardson cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug)]
enum CacheAction {
    /// Print the cache file location.
    Path,
    /// Print the number of cached coefficients.
    Stats,
    /// Compute every coefficient with |λ| ≤ size and save it.
    Warm {
        #[arg(long)]
        size: usize,
    },
    /// Delete the cache file.
    Clear,
}

#[derive(Args, Debug, Clone, Default)]
struct ParamArgs {
    /// Truncation order N in q.
    #[arg(long)]
    order: Option<usize>,
    /// p-weight cutoff W (defaults to N).
    #[arg(long)]
    pweight: Option<usize>,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Optional cap on the total auxiliary degree (Cauchy identity).
    #[arg(long)]
    aux_degree: Option<usize>,
}

impl ParamArgs {
    fn params(&self) -> Params {
        Params {
            order: self.order,
            pweight: self.pweight,
            n: self.n,
            m: self.m,
            aux_degree: self.aux_degree,
            ..Params::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Weights {
    C,
    Csp,
    Co,
}

#[derive(Debug, Clone)]
enum Target {
    All,
    One(IdentityId),
}

impl FromStr for Target {
    type Err = IdentityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            Ok(Target::All)
        } else {
            s.parse().map(Target::One)
        }
    }
}

#[derive(Debug, Clone)]
enum TValue {
    Symbolic,
    Value(i64),
}

impl FromStr for TValue {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "symbolic" {
            return Ok(TValue::Symbolic);
        }
        s.parse()
            .map(TValue::Value)
            .map_err(|_| format!("expected `symbolic` or an integer, got {s:?}"))
    }
}

/// Exit status for runtime failures that stem from the arguments.
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .expect("thread pool");
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn cache_file(cli: &Cli) -> PathBuf {
    let dir = cli.cache_dir.clone().unwrap_or_else(|| {
        let base = std::env::var_os("XDG_CACHE_HOME")
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
            .unwrap_or_else(std::env::temp_dir);
        base.join("sympart")
    });
    dir.join("lr.txt")
}

fn run(cli: &Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let cache = Arc::new(LrCache::with_file(cache_file(cli)));
    match &cli.command {
        Command::Verify { target, params } => {
            let engine = Engine::new(cache.clone());
            let ids: Vec<IdentityId> = match target {
                Target::All => IdentityId::ALL.to_vec(),
                Target::One(id) => vec![*id],
            };
            let base = params.params();
            let reports: Vec<VerificationReport> = ids
                .par_iter()
                .map(|&id| {
                    let mut p = base.clone();
                    if matches!(target, Target::All) {
                        // `--order` caps each identity's default order.
                        p.order = Some(
                            base.order
                                .map_or(id.default_order(), |o| o.min(id.default_order())),
                        );
                        p.pweight = base.pweight.map(|w| w.max(p.order.unwrap()));
                    }
                    engine.verify(id, &p)
                })
                .collect::<Result<_, _>>()?;
            cache.save()?;
            print_reports(&reports, cli.format);
            let ok = reports.iter().all(VerificationReport::is_equal);
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Expand {
            identity,
            side,
            side_flag,
            params,
        } => {
            let side = side
                .or(*side_flag)
                .ok_or("missing side: give `lhs` or `rhs`")?;
            let series = Engine::new(cache.clone()).expand(*identity, side, &params.params())?;
            cache.save()?;
            match cli.format {
                Format::Table => println!("{series}"),
                Format::Json => println!(
                    "{}",
                    json!({ "identity": identity.as_str(), "series": series.to_string() })
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats {
            partition,
            size,
            weights,
            t,
        } => {
            match (partition, size) {
                (Some(p), _) => print_cell_stats(p, cli.format),
                (None, Some(n)) => print_weights(*n, *weights, t, cli.format)?,
                (None, None) => unreachable!("clap requires one of the two"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cache { action } => {
            match action {
                CacheAction::Path => println!("{}", cache.path().expect("file-backed").display()),
                CacheAction::Stats => println!("{} entries", cache.len()?),
                CacheAction::Warm { size } => {
                    let ring = SymRing::with_cache(*size, cache.clone());
                    let mut count = 0usize;
                    for n in 0..=*size {
                        for lambda in enumerate_partitions(n) {
                            for k in 0..=n {
                                for mu in enumerate_partitions(k) {
                                    for nu in enumerate_partitions(n - k) {
                                        ring.lr_coefficient(&lambda, &mu, &nu)?;
                                        count += 1;
                                    }
                                }
                            }
                        }
                    }
                    cache.save()?;
                    println!("{count} triples, {} cached", cache.len()?);
                }
                CacheAction::Clear => {
                    cache.clear()?;
                    println!("cleared");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn outcome_text(r: &VerificationReport) -> String {
    match r.to_json()["outcome"].clone() {
        Value::String(s) => s,
        other => format!("mismatch at q^{}", other["q_power"]),
    }
}

fn print_reports(reports: &[VerificationReport], format: Format) {
    match format {
        Format::Json => {
            for r in reports {
                println!("{}", r.to_json_string());
            }
        }
        Format::Table => {
            let rows: Vec<[String; 4]> = reports
                .iter()
                .map(|r| {
                    [
                        r.identity.to_string(),
                        r.params.to_string(),
                        outcome_text(r),
                        format!("{} ms", r.millis),
                    ]
                })
                .collect();
            print_table(&["identity", "params", "outcome", "time"], &rows);
            for r in reports {
                if let Value::Object(o) = &r.to_json()["outcome"] {
                    println!("{}: lhs = {}, rhs = {}", r.identity, o["lhs"], o["rhs"]);
                }
            }
        }
    }
}

fn print_table<const K: usize>(header: &[&str; K], rows: &[[String; K]]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        println!("{}", padded.join("  ").trim_end());
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
}

fn print_cell_stats(lambda: &Partition, format: Format) {
    let cells = cell_stats(lambda);
    match format {
        Format::Json => {
            let rows: Vec<Value> = cells
                .iter()
                .map(|c| {
                    json!({"row": c.row, "col": c.col, "hook": c.hook, "c": c.content,
                           "c_sp": c.symplectic, "c_o": c.orthogonal})
                })
                .collect();
            println!("{}", Value::Array(rows));
        }
        Format::Table => {
            let rows: Vec<[String; 6]> = cells
                .iter()
                .map(|c| {
                    [
                        c.row.to_string(),
                        c.col.to_string(),
                        c.hook.to_string(),
                        c.content.to_string(),
                        c.symplectic.to_string(),
                        c.orthogonal.to_string(),
                    ]
                })
                .collect();
            print_table(&["row", "col", "hook", "c", "c_sp", "c_o"], &rows);
        }
    }
}

fn print_weights(
    n: usize,
    weights: Weights,
    t: &TValue,
    format: Format,
) -> Result<(), Box<dyn std::error::Error>> {
    let kind = match weights {
        Weights::C => ContentKind::Ordinary,
        Weights::Csp => ContentKind::Symplectic,
        Weights::Co => ContentKind::Orthogonal,
    };
    let shift = match t {
        TValue::Symbolic => VarContext::new(&["t"]).var("t")?,
        TValue::Value(v) => MultiPoly::from_int(&VarContext::new::<&str>(&[]), *v),
    };
    let factor = WeightFactor::new(kind, shift);
    let mut rows = Vec::new();
    for lambda in enumerate_partitions(n) {
        let w = weight_product(&lambda, std::slice::from_ref(&factor))?;
        rows.push([lambda.to_string(), w.to_string()]);
    }
    match format {
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|[p, w]| json!({"partition": p, "weight": w}))
                .collect();
            println!("{}", Value::Array(v));
        }
        Format::Table => print_table(&["partition", "weight"], &rows),
    }
    Ok(())
}
