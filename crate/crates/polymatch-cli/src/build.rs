//! `polymatch build`: ingest a JSONL collection, build the signature index
//! and persist it as a versioned JSON container.

use std::collections::BTreeMap;
use std::io::Write;

use clap::Args;
use polymatch::{IndexError, PolygonIndex};
use serde::Serialize;

use crate::io::{self, CliError};

#[derive(Args, Debug)]
pub struct BuildArgs {
    /// Input collection (JSONL, `-` for stdin)
    #[arg(long)]
    pub input: String,
    /// Expected vertex count; inferred from the first record when omitted
    #[arg(long)]
    pub n: Option<usize>,
    /// Signature indices, comma separated (each in [1, n-1])
    #[arg(long, default_value = "1")]
    pub j: String,
    /// Quantization cell size for signature hashing
    #[arg(long, default_value_t = polymatch::DEFAULT_CELL_SIZE)]
    pub cell: f64,
    /// Output index file (`-` for stdout)
    #[arg(long)]
    pub output: String,
}

#[derive(Serialize)]
struct BuildSummary {
    m: usize,
    n: usize,
    j_set: Vec<usize>,
    cell_size: f64,
    /// per-j map from bucket size to number of buckets of that size
    histogram: BTreeMap<String, BTreeMap<usize, usize>>,
}

pub fn run(args: &BuildArgs) -> Result<(), CliError> {
    let j_set = io::parse_j_set(&args.j)?;
    let records = io::read_records(&args.input)?;
    let mut polygons = Vec::with_capacity(records.len());
    for (line, record) in &records {
        let polygon = io::record_to_polygon(&args.input, *line, record)?;
        if let Some(n) = args.n {
            if polygon.len() != n {
                return Err(CliError::schema(format!(
                    "{} line {line}: {} vertices, expected n={n}",
                    args.input,
                    polygon.len()
                )));
            }
        }
        polygons.push(polygon);
    }

    let index = PolygonIndex::build(polygons, &j_set, args.cell).map_err(|e| match e {
        IndexError::MixedSizes { .. } => CliError::schema(e.to_string()),
        other => CliError::input(other.to_string()),
    })?;

    let dump = index.dump();
    let mut out = io::writer(&args.output)?;
    serde_json::to_writer(&mut out, &dump).map_err(|e| CliError::input(e.to_string()))?;
    out.write_all(b"\n")?;
    out.flush()?;

    // the summary would interleave with the index when both share stdout
    if args.output != "-" {
        let histogram = index
            .occupancy_histogram()
            .into_iter()
            .map(|(j, hist)| (j.to_string(), hist.into_iter().collect()))
            .collect();
        let summary = BuildSummary {
            m: index.len(),
            n: index.n(),
            j_set: index.j_set().to_vec(),
            cell_size: index.cell_size(),
            histogram,
        };
        println!(
            "{}",
            serde_json::to_string(&summary).map_err(|e| CliError::input(e.to_string()))?
        );
    }
    Ok(())
}
