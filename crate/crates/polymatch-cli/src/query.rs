//! The three query commands. Match records are emitted as JSONL on stdout,
//! sorted by (residual, match id) for byte-stable reruns; `--stats` adds
//! per-query candidate counts on stderr.

use std::io::Write;

use clap::Args;
use polymatch::{AffineMap, MatchResult, Polygon, PolygonIndex};
use serde::Serialize;

use crate::io::{self, CliError};

#[derive(Serialize)]
struct TransformOut {
    alpha: [f64; 2],
    beta: [f64; 2],
    gamma: [f64; 2],
}

impl TransformOut {
    fn from_match(m: &MatchResult) -> Self {
        let (alpha, beta, gamma) = m.transform.coefficients();
        TransformOut {
            alpha: [alpha.re, alpha.im],
            beta: [beta.re, beta.im],
            gamma: [gamma.re, gamma.im],
        }
    }
}

#[derive(Serialize)]
struct MatchOut<'a> {
    query_id: &'a str,
    match_id: &'a str,
    shift: usize,
    transform: TransformOut,
    residual: f64,
}

#[derive(Serialize)]
struct PairOut<'a> {
    query_id: [&'a str; 2],
    match_id: [&'a str; 2],
    shift: [usize; 2],
    transform: TransformOut,
    residual: f64,
}

#[derive(Serialize)]
struct StatsOut<'a> {
    query_id: &'a str,
    candidates: usize,
    verified: usize,
    cell_probes: usize,
}

fn check_n(index: &PolygonIndex, polygon: &Polygon) -> Result<(), CliError> {
    if polygon.len() != index.n() {
        return Err(CliError::incompat(format!(
            "query {:?} has {} vertices, index holds n={}",
            polygon.id(),
            polygon.len(),
            index.n()
        )));
    }
    Ok(())
}

fn emit_matches(
    out: &mut impl Write,
    query_id: &str,
    mut matches: Vec<MatchResult>,
) -> Result<(), CliError> {
    matches.sort_by(|a, b| {
        a.residual
            .total_cmp(&b.residual)
            .then_with(|| a.candidate_id.cmp(&b.candidate_id))
    });
    for m in &matches {
        let record = MatchOut {
            query_id,
            match_id: &m.candidate_id,
            shift: m.shift,
            transform: TransformOut::from_match(m),
            residual: m.residual,
        };
        writeln!(
            out,
            "{}",
            serde_json::to_string(&record).map_err(|e| CliError::input(e.to_string()))?
        )?;
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct QuerySimArgs {
    #[arg(long)]
    pub index: String,
    /// Query polygons (JSONL, `-` for stdin)
    #[arg(long)]
    pub query: String,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Report candidate counts per query on stderr
    #[arg(long)]
    pub stats: bool,
}

pub fn run_sim(args: &QuerySimArgs) -> Result<(), CliError> {
    let index = io::load_index(&args.index)?;
    let queries = io::read_polygons(&args.query)?;
    let mut out = io::writer("-")?;
    for w in &queries {
        check_n(&index, w)?;
        let result = index
            .query_similarity(w, args.tol)
            .map_err(|e| CliError::input(e.to_string()))?;
        if args.stats {
            let stats = StatsOut {
                query_id: w.id(),
                candidates: result.ids.len(),
                verified: result.verified.len(),
                cell_probes: result.cell_probes,
            };
            eprintln!("{}", serde_json::to_string(&stats).unwrap());
        }
        emit_matches(&mut out, w.id(), result.verified)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct QueryAffineArgs {
    #[arg(long)]
    pub index: String,
    #[arg(long)]
    pub query: String,
    /// Known transform coefficient, as `re,im`
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub beta: String,
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub gamma: String,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub stats: bool,
}

pub fn run_affine(args: &QueryAffineArgs) -> Result<(), CliError> {
    let alpha = io::parse_complex("--alpha", &args.alpha)?;
    let beta = io::parse_complex("--beta", &args.beta)?;
    let gamma = io::parse_complex("--gamma", &args.gamma)?;
    let f = AffineMap::new(alpha, beta, gamma)
        .map_err(|e| CliError::domain(format!("transform: {e}")))?;
    let index = io::load_index(&args.index)?;
    let queries = io::read_polygons(&args.query)?;
    let mut out = io::writer("-")?;
    for w in &queries {
        check_n(&index, w)?;
        let result = index
            .query_known_affine(w, &f, args.tol)
            .map_err(|e| match e {
                polymatch::IndexError::InvalidAffine => CliError::domain(e.to_string()),
                other => CliError::input(other.to_string()),
            })?;
        if args.stats {
            let stats = StatsOut {
                query_id: w.id(),
                candidates: result.ids.len(),
                verified: result.verified.len(),
                cell_probes: result.cell_probes,
            };
            eprintln!("{}", serde_json::to_string(&stats).unwrap());
        }
        emit_matches(&mut out, w.id(), result.verified)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct QueryPairArgs {
    #[arg(long)]
    pub index: String,
    /// First query polygons; paired line-by-line with `--query2`
    #[arg(long)]
    pub query: String,
    #[arg(long)]
    pub query2: String,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub stats: bool,
}

pub fn run_pair(args: &QueryPairArgs) -> Result<(), CliError> {
    let index = io::load_index(&args.index)?;
    let first = io::read_polygons(&args.query)?;
    let second = io::read_polygons(&args.query2)?;
    if first.len() != second.len() {
        return Err(CliError::input(format!(
            "{} has {} records but {} has {}",
            args.query,
            first.len(),
            args.query2,
            second.len()
        )));
    }
    let mut out = io::writer("-")?;
    for (w, w2) in first.iter().zip(&second) {
        check_n(&index, w)?;
        check_n(&index, w2)?;
        let result = index
            .query_pair(w, w2, args.tol)
            .map_err(|e| CliError::input(e.to_string()))?;
        if args.stats {
            let stats = StatsOut {
                query_id: w.id(),
                candidates: result.id_pairs.len(),
                verified: result.verified.len(),
                cell_probes: 0,
            };
            eprintln!("{}", serde_json::to_string(&stats).unwrap());
        }
        let mut pairs = result.verified;
        pairs.sort_by(|a, b| {
            let ra = a.first.residual.max(a.second.residual);
            let rb = b.first.residual.max(b.second.residual);
            ra.total_cmp(&rb)
                .then_with(|| a.first.candidate_id.cmp(&b.first.candidate_id))
                .then_with(|| a.second.candidate_id.cmp(&b.second.candidate_id))
        });
        for p in &pairs {
            let record = PairOut {
                query_id: [w.id(), w2.id()],
                match_id: [&p.first.candidate_id, &p.second.candidate_id],
                shift: [p.first.shift, p.second.shift],
                transform: TransformOut::from_match(&p.first),
                residual: p.first.residual.max(p.second.residual),
            };
            writeln!(
                out,
                "{}",
                serde_json::to_string(&record).map_err(|e| CliError::input(e.to_string()))?
            )?;
        }
    }
    out.flush()?;
    Ok(())
}
