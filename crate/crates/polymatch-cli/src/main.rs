//! Polygon matching from the command line: build and persist signature
//! indexes over JSONL collections, run similarity / known-affine / pair
//! queries, generate synthetic datasets with planted matches, and report
//! triangle noise bounds.

mod build;
mod gen;
mod io;
mod noise;
mod query;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "polymatch",
    version,
    about = "Affine-invariant polygon matching and indexing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a signature index from a JSONL collection
    Build(build::BuildArgs),
    /// Find indexed polygons equal to each query up to a similarity
    QuerySim(query::QuerySimArgs),
    /// Find indexed polygons mapped onto each query by a known affine map
    QueryAffine(query::QueryAffineArgs),
    /// Find indexed pairs mapped onto a query pair by one unknown affine map
    QueryPair(query::QueryPairArgs),
    /// Generate a synthetic collection with optional planted matches
    Gen(gen::GenArgs),
    /// Report τ-ellipse and φ-disk tolerances for a noisy triangle
    NoiseBound(noise::NoiseBoundArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(args) => build::run(args),
        Command::QuerySim(args) => query::run_sim(args),
        Command::QueryAffine(args) => query::run_affine(args),
        Command::QueryPair(args) => query::run_pair(args),
        Command::Gen(args) => gen::run(args),
        Command::NoiseBound(args) => noise::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}
