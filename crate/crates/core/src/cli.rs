//! Command-line entry point.
//!
//! Exit codes: 0 success, 2 validation failure (a supplied set is not an
//! m-ovoid, or an identity check fails), 1 usage or configuration errors.

use crate::bounds::{
    best_bound, bound_bds_h4, bound_bklp, bound_main, bound_main_asymptotic, bound_q7,
    bound_small_improv, emit_tables, RadicalBound,
};
use crate::config::Config;
use crate::exact::theta;
use crate::gf::{factor_prime_power, Field};
use crate::ovoid::{
    check_aid1, check_aid2, check_counting_identity, check_le1, check_main_inequality,
    check_point_sums, validate_m_ovoid, validate_weighted_m_ovoid, IdentityReport,
    WeightFunction,
};
use crate::polar::{generator_count, polar_point_count, PolarSpace, SpaceKind};
use crate::projgeom::Subspace;
use crate::search::{nonexistence_sweep, search_m_ovoids, SearchInstance, SearchOptions};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "movoid",
    about = "Finite classical polar spaces: m-ovoid validation, bounds, and search",
    version
)]
struct Cli {
    /// Worker count; only 1 is bit-reproducible and currently supported.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SpaceArgs {
    /// Polar space kind: Q- (elliptic), W (symplectic), H (Hermitian).
    #[arg(long)]
    space: String,
    /// Field order (Hermitian: the ambient square order).
    #[arg(long)]
    q: u64,
    /// Rank.
    #[arg(long)]
    r: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Print parameters and counts of a polar space.
    Info(SpaceArgs),
    /// Evaluate lower bounds on m.
    Bounds {
        #[command(flatten)]
        space: SpaceArgs,
        /// bklp | small | bds-h4 | main | q7 | asymptotic | all
        #[arg(long, default_value = "all")]
        theorem: String,
        /// table | json | csv
        #[arg(long, default_value = "table")]
        format: String,
    },
    /// Emit the four bound comparison tables as CSV.
    Tables {
        /// 3 (W), 4 (Q-), 5 (H), 6 (rank-3 Q-), or all.
        #[arg(long, default_value = "all")]
        which: String,
    },
    /// Validate a point set from a .pts file as an m-ovoid.
    VerifyOvoid {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        m: u64,
        /// Input .pts file.
        #[arg(long)]
        input: String,
        /// Run the pointwise (weighted) characterization instead of the
        /// per-generator count.
        #[arg(long, default_value_t = false)]
        weighted: bool,
    },
    /// Evaluate counting identities and inequalities on an ovoid.
    CheckIdentities {
        #[command(flatten)]
        space: SpaceArgs,
        /// Input .pts file holding the ovoid.
        #[arg(long)]
        ovoid: String,
        #[arg(long)]
        m: u64,
        /// le1 | counting | point-sums | aid1 | aid2 | eqnew | all
        #[arg(long, default_value = "all")]
        identity: String,
        /// Subspace rows "c0,c1,...;c0,c1,..." (defaults per identity).
        #[arg(long)]
        pi: Option<String>,
    },
    /// Backtracking search for m-ovoids.
    Search {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 1)]
        max_solutions: usize,
        /// Disable fixing the smallest polar point into O.
        #[arg(long, default_value_t = false)]
        no_symmetry: bool,
        /// Node budget (default also via MOVOID_NODE_BUDGET).
        #[arg(long)]
        budget: Option<u64>,
        /// Deterministic branch-order permutation; 0 keeps in-first order.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the first solution to this .pts file.
        #[arg(long)]
        emit: Option<String>,
    },
    /// Search a range of m values and cross-check against the bounds.
    Sweep {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        m_from: u64,
        #[arg(long)]
        m_to: u64,
        #[arg(long)]
        budget: Option<u64>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

macro_rules! impl_usage_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Failure {
                Failure::usage(e.to_string())
            }
        }
    )*};
}
impl_usage_from!(
    crate::gf::GfError,
    crate::projgeom::ProjError,
    crate::polar::PolarError,
    crate::ovoid::OvoidError,
    crate::bounds::BoundsError,
    crate::search::SearchError,
    std::io::Error,
    serde_json::Error
);

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, Failure> {
    if cli.jobs == 0 {
        return Err(Failure::usage("--jobs must be at least 1"));
    }
    let cfg = Config::from_env();
    match cli.command {
        Command::Info(s) => cmd_info(&s, &cfg),
        Command::Bounds {
            space,
            theorem,
            format,
        } => cmd_bounds(&space, &theorem, &format),
        Command::Tables { which } => cmd_tables(&which),
        Command::VerifyOvoid {
            space,
            m,
            input,
            weighted,
        } => cmd_verify(&space, m, &input, weighted, &cfg),
        Command::CheckIdentities {
            space,
            ovoid,
            m,
            identity,
            pi,
        } => cmd_identities(&space, &ovoid, m, &identity, pi.as_deref(), &cfg),
        Command::Search {
            space,
            m,
            max_solutions,
            no_symmetry,
            budget,
            seed,
            emit,
        } => cmd_search(&space, m, max_solutions, no_symmetry, budget, seed, emit, &cfg),
        Command::Sweep {
            space,
            m_from,
            m_to,
            budget,
        } => cmd_sweep(&space, m_from, m_to, budget, &cfg),
    }
}

fn parse_kind(s: &str) -> Result<SpaceKind, Failure> {
    SpaceKind::parse(s)
        .ok_or_else(|| Failure::usage(format!("unknown space kind {s:?}; use Q-, W, or H")))
}

fn build_space(args: &SpaceArgs, cfg: &Config) -> Result<Arc<PolarSpace>, Failure> {
    let kind = parse_kind(&args.space)?;
    let (p, k) = factor_prime_power(args.q)
        .ok_or_else(|| Failure::usage(format!("{} is not a prime power", args.q)))?;
    let field = Arc::new(Field::with_cap(p, k, cfg.max_field_order)?);
    Ok(Arc::new(PolarSpace::build_with(kind, args.r, field, cfg)?))
}

#[derive(Serialize)]
struct InfoReport {
    space: String,
    kind: String,
    r: u32,
    q: u64,
    e: String,
    ambient_dim: usize,
    ambient_points: String,
    polar_points: String,
    generators: String,
    points_per_generator: String,
}

fn cmd_info(args: &SpaceArgs, _cfg: &Config) -> Result<i32, Failure> {
    let kind = parse_kind(&args.space)?;
    if factor_prime_power(args.q).is_none() {
        return Err(Failure::usage(format!("{} is not a prime power", args.q)));
    }
    let n = kind.ambient_dim(args.r);
    let report = InfoReport {
        space: kind.name(args.r, args.q),
        kind: args.space.clone(),
        r: args.r,
        q: args.q,
        e: kind.e_str().to_string(),
        ambient_dim: n,
        ambient_points: theta(n as i64, args.q).to_string(),
        polar_points: polar_point_count(kind, args.r, args.q)?.to_string(),
        generators: generator_count(kind, args.r, args.q)?.to_string(),
        points_per_generator: theta(args.r as i64 - 1, args.q).to_string(),
    };
    println!("{}", serde_json::to_string_pretty(&report).map_err(Failure::from)?);
    Ok(0)
}

fn one_bound(
    theorem: &str,
    kind: SpaceKind,
    r: u32,
    q: u64,
) -> Result<Option<RadicalBound>, Failure> {
    let b = match theorem {
        "bklp" => Some(bound_bklp(kind, r, q)?),
        "small" => Some(bound_small_improv(kind, r, q)?),
        "bds-h4" => {
            if kind == SpaceKind::Hermitian && r == 2 {
                Some(bound_bds_h4(q)?)
            } else {
                None
            }
        }
        "main" => Some(bound_main(kind, r, q)?),
        "asymptotic" => Some(bound_main_asymptotic(kind, r, q)?),
        "q7" => {
            if kind == SpaceKind::Elliptic && r == 3 && q > 2 {
                Some(bound_q7(q)?)
            } else {
                None
            }
        }
        other => {
            return Err(Failure::usage(format!(
                "unknown theorem {other:?}; use bklp|small|bds-h4|main|q7|asymptotic|all"
            )))
        }
    };
    Ok(b)
}

fn cmd_bounds(args: &SpaceArgs, theorem: &str, format: &str) -> Result<i32, Failure> {
    let kind = parse_kind(&args.space)?;
    let report = if theorem == "all" {
        best_bound(kind, args.r, args.q)?
    } else {
        let b = one_bound(theorem, kind, args.r, args.q)?.ok_or_else(|| {
            Failure::usage(format!(
                "theorem {theorem:?} does not apply to {}",
                kind.name(args.r, args.q)
            ))
        })?;
        let mut full = best_bound(kind, args.r, args.q)?;
        full.bounds = vec![b.entry()];
        full
    };
    match format {
        "json" => println!("{}", serde_json::to_string_pretty(&report)?),
        "csv" => {
            println!("theorem,a,r,d,threshold,applicable,reason");
            for b in &report.bounds {
                println!(
                    "{},{},{},{},{},{},{}",
                    b.theorem,
                    b.a.as_deref().unwrap_or(""),
                    b.r.as_deref().unwrap_or(""),
                    b.d.as_deref().unwrap_or(""),
                    b.threshold.as_deref().unwrap_or(""),
                    b.applicable,
                    b.reason.as_deref().unwrap_or("")
                );
            }
        }
        "table" => {
            println!("{} (e = {})", report.space, report.e);
            for b in &report.bounds {
                match (&b.threshold, &b.reason) {
                    (Some(t), _) => println!("  {:<12} m >= {}", b.theorem, t),
                    (None, Some(why)) => println!("  {:<12} not applicable: {}", b.theorem, why),
                    (None, None) => {}
                }
            }
            println!("  best: m >= {} ({})", report.best.threshold, report.best.theorem);
            for n in &report.notes {
                println!("  note: {n}");
            }
        }
        other => return Err(Failure::usage(format!("unknown format {other:?}"))),
    }
    Ok(0)
}

fn cmd_tables(which: &str) -> Result<i32, Failure> {
    let tables = emit_tables()?;
    let pick: Vec<usize> = match which {
        "all" => vec![0, 1, 2, 3],
        "3" => vec![0],
        "4" => vec![1],
        "5" => vec![2],
        "6" => vec![3],
        other => {
            return Err(Failure::usage(format!(
                "unknown table {other:?}; use 3|4|5|6|all"
            )))
        }
    };
    for (i, idx) in pick.iter().enumerate() {
        let t = &tables[*idx];
        if i > 0 {
            println!();
        }
        println!("# {}", t.title);
        println!(
            "{},{},{}_sci,{},{}_sci",
            t.columns[0], t.columns[1], t.columns[1], t.columns[2], t.columns[2]
        );
        for row in &t.rows {
            println!(
                "{},{},{},{},{}",
                row.param, row.first, row.first_sci, row.second, row.second_sci
            );
        }
    }
    Ok(0)
}

fn load_ovoid(
    space: &Arc<PolarSpace>,
    path: &str,
) -> Result<WeightFunction, Failure> {
    let body = std::fs::read_to_string(path)?;
    let points = space.geometry().parse_pts(path, &body)?;
    Ok(WeightFunction::from_point_set(Arc::clone(space), &points)?)
}

fn cmd_verify(
    args: &SpaceArgs,
    m: u64,
    input: &str,
    weighted: bool,
    cfg: &Config,
) -> Result<i32, Failure> {
    let space = build_space(args, cfg)?;
    let w = load_ovoid(&space, input)?;
    let cert = if weighted {
        validate_weighted_m_ovoid(&w, m)
    } else {
        validate_m_ovoid(&w, m)?
    };
    println!("{}", serde_json::to_string_pretty(&cert)?);
    if cert.valid {
        Ok(0)
    } else {
        Ok(2)
    }
}

fn parse_pi(space: &PolarSpace, s: &str) -> Result<Subspace, Failure> {
    let n = space.ambient_dim();
    let mut rows = Vec::new();
    for part in s.split(';') {
        let row: Result<Vec<u32>, _> = part.split(',').map(|c| c.trim().parse::<u32>()).collect();
        let row = row.map_err(|e| Failure::usage(format!("bad subspace coordinate: {e}")))?;
        if row.len() != n + 1 {
            return Err(Failure::usage(format!(
                "subspace row has {} coordinates, ambient space needs {}",
                row.len(),
                n + 1
            )));
        }
        rows.push(row);
    }
    Ok(Subspace::from_rows(space.field(), n, rows))
}

fn cmd_identities(
    args: &SpaceArgs,
    ovoid: &str,
    m: u64,
    identity: &str,
    pi: Option<&str>,
    cfg: &Config,
) -> Result<i32, Failure> {
    let space = build_space(args, cfg)?;
    let w = load_ovoid(&space, ovoid)?;
    let cert = validate_m_ovoid(&w, m)?;
    if !cert.valid {
        eprintln!(
            "error: input is not a {m}-ovoid: {}",
            cert.witness.as_deref().unwrap_or("unknown violation")
        );
        return Ok(2);
    }
    let pi = pi.map(|s| parse_pi(&space, s)).transpose()?;
    let geom = space.geometry();
    let default_point = || {
        let p = w
            .support()
            .first()
            .copied()
            .unwrap_or_else(|| space.points()[0]);
        (p, geom.point_subspace(p))
    };
    let rich = || crate::ovoid::find_rich_subspace(&w, m).map_err(Failure::from);

    let mut reports: Vec<IdentityReport> = Vec::new();
    let wanted: Vec<&str> = if identity == "all" {
        vec!["le1", "counting", "point-sums", "aid1", "aid2", "eqnew"]
    } else {
        vec![identity]
    };
    for id in wanted {
        match id {
            "le1" => {
                let sub = pi.clone().unwrap_or_else(|| default_point().1);
                reports.push(check_le1(&w, m, &sub));
            }
            "counting" => {
                let sub = pi.clone().unwrap_or_else(|| default_point().1);
                reports.push(check_counting_identity(&w, m, &sub, cfg)?);
            }
            "point-sums" => {
                let p0 = match &pi {
                    Some(sub) if sub.dim() == 0 => geom
                        .index_of(&sub.rows()[0])
                        .ok_or_else(|| Failure::usage("pi is not a point".to_string()))?,
                    Some(_) => {
                        return Err(Failure::usage(
                            "point-sums takes a 0-dimensional pi".to_string(),
                        ))
                    }
                    None => default_point().0,
                };
                reports.extend(check_point_sums(&w, m, p0)?);
            }
            "aid1" => {
                let sub = match &pi {
                    Some(sub) => sub.clone(),
                    None => rich()?,
                };
                reports.push(check_aid1(&w, &sub, cfg)?);
            }
            "aid2" => {
                let sub = match &pi {
                    Some(sub) => sub.clone(),
                    None => rich()?,
                };
                reports.push(check_aid2(&w, m, &sub)?);
            }
            "eqnew" => {
                let sub = match &pi {
                    Some(sub) => sub.clone(),
                    None => rich()?,
                };
                reports.push(check_main_inequality(&w, m, &sub)?);
            }
            other => {
                return Err(Failure::usage(format!(
                    "unknown identity {other:?}; use le1|counting|point-sums|aid1|aid2|eqnew|all"
                )))
            }
        }
    }
    println!("{}", serde_json::to_string_pretty(&reports)?);
    if reports.iter().all(|r| r.pass) {
        Ok(0)
    } else {
        Ok(2)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    args: &SpaceArgs,
    m: u64,
    max_solutions: usize,
    no_symmetry: bool,
    budget: Option<u64>,
    seed: u64,
    emit: Option<String>,
    cfg: &Config,
) -> Result<i32, Failure> {
    let space = build_space(args, cfg)?;
    let opts = SearchOptions {
        max_solutions,
        symmetry: !no_symmetry,
        node_budget: budget.unwrap_or(cfg.node_budget),
        seed,
    };
    let inst = SearchInstance::new(Arc::clone(&space), m, opts)?;
    let outcome = search_m_ovoids(&inst);
    if let (Some(path), Some(sol)) = (&emit, outcome.solutions.first()) {
        std::fs::write(path, space.geometry().format_pts(sol))?;
    }
    println!("{}", serde_json::to_string_pretty(&outcome)?);
    Ok(0)
}

fn cmd_sweep(
    args: &SpaceArgs,
    m_from: u64,
    m_to: u64,
    budget: Option<u64>,
    cfg: &Config,
) -> Result<i32, Failure> {
    if m_from > m_to {
        return Err(Failure::usage("--m-from must not exceed --m-to"));
    }
    let space = build_space(args, cfg)?;
    let opts = SearchOptions {
        node_budget: budget.unwrap_or(cfg.node_budget),
        ..SearchOptions::default()
    };
    let ms: Vec<u64> = (m_from..=m_to).collect();
    let outcomes = nonexistence_sweep(&space, &ms, &opts)?;
    println!("{}", serde_json::to_string_pretty(&outcomes)?);
    Ok(0)
}
