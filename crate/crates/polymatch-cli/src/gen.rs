//! `polymatch gen`: deterministic synthetic collections with optional
//! planted matches and a ground-truth sidecar.
//!
//! Plant specs:
//! * `similarity:K` — K random-shift similarity images of random bases,
//! * `affine:K` — K affine images (aligned enumeration, half reversing),
//! * `affine-noise:r=R:K` — K noisy copies; for triangles the noise samples
//!   the equilateral polydisc pushed through the base's coefficient map (the
//!   model the φ-disk report covers), otherwise per-vertex discs of radius R.

use std::io::Write;

use clap::Args;
use polymatch::{Complex, Polygon, PolygonRecord, SimilarityMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::io::{self, CliError};

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Number of random polygons
    #[arg(long)]
    pub count: usize,
    /// Vertices per polygon
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Plant spec, repeatable (see command docs)
    #[arg(long)]
    pub plant: Vec<String>,
    /// Collection output (JSONL, `-` for stdout)
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Planted-query output; defaults to `<out>.plants.jsonl`
    #[arg(long)]
    pub plants_out: Option<String>,
    /// Ground-truth sidecar; defaults to `<out>.truth.jsonl`
    #[arg(long)]
    pub truth_out: Option<String>,
}

#[derive(Serialize)]
struct TruthRecord {
    planted_id: String,
    base_id: String,
    kind: String,
    shift: usize,
    alpha: [f64; 2],
    beta: [f64; 2],
    gamma: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<String>,
}

enum PlantKind {
    Similarity,
    Affine,
    AffineNoise(f64),
}

fn parse_plants(specs: &[String]) -> Result<Vec<(PlantKind, usize)>, CliError> {
    let mut out = Vec::new();
    for spec in specs {
        let parts: Vec<&str> = spec.split(':').collect();
        let bad = || CliError::input(format!("--plant {spec:?}: unrecognized spec"));
        match parts.as_slice() {
            ["similarity", k] => out.push((PlantKind::Similarity, k.parse().map_err(|_| bad())?)),
            ["affine", k] => out.push((PlantKind::Affine, k.parse().map_err(|_| bad())?)),
            ["affine-noise", r_part, k] => {
                let r_text = r_part.strip_prefix("r=").ok_or_else(bad)?;
                let r: f64 = r_text.parse().map_err(|_| bad())?;
                out.push((PlantKind::AffineNoise(r), k.parse().map_err(|_| bad())?));
            }
            _ => return Err(bad()),
        }
    }
    Ok(out)
}

fn square_point(rng: &mut ChaCha8Rng) -> Complex {
    Complex::new(rng.gen::<f64>(), rng.gen::<f64>())
}

fn random_pose(rng: &mut ChaCha8Rng) -> SimilarityMap {
    let alpha = Complex::from_polar(
        10f64.powf(rng.gen_range(-0.3..0.3)),
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    let gamma = Complex::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    SimilarityMap::new(alpha, gamma).expect("alpha nonzero")
}

fn random_affine(rng: &mut ChaCha8Rng, reversing: bool) -> polymatch::AffineMap {
    let alpha = Complex::from_polar(
        10f64.powf(rng.gen_range(-0.5..0.5)),
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    let ratio = if reversing {
        rng.gen_range(1.15..2.5)
    } else {
        rng.gen_range(0.0..0.85)
    };
    let beta = Complex::from_polar(
        alpha.norm() * ratio,
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    let gamma = Complex::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    polymatch::AffineMap::new(alpha, beta, gamma).expect("ratio bounded away from 1")
}

fn record_of(id: &str, vertices: &[Complex]) -> PolygonRecord {
    PolygonRecord {
        id: id.to_string(),
        vertices: vertices.iter().map(|z| [z.re, z.im]).collect(),
    }
}

pub fn run(args: &GenArgs) -> Result<(), CliError> {
    if args.count < 1 {
        return Err(CliError::input("--count must be at least 1"));
    }
    if args.n < 3 {
        return Err(CliError::input("--n must be at least 3"));
    }
    let plants = parse_plants(&args.plant)?;
    let want_plants = plants.iter().any(|(_, k)| *k > 0);
    let (plants_path, truth_path) = if want_plants {
        let derive = |suffix: &str, explicit: &Option<String>| -> Result<String, CliError> {
            if let Some(path) = explicit {
                Ok(path.clone())
            } else if args.out == "-" {
                Err(CliError::input(
                    "--plants-out/--truth-out are required when --out is a standard stream",
                ))
            } else {
                Ok(format!("{}.{suffix}.jsonl", args.out))
            }
        };
        (
            Some(derive("plants", &args.plants_out)?),
            Some(derive("truth", &args.truth_out)?),
        )
    } else {
        (None, None)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let bases: Vec<Polygon> = (0..args.count)
        .map(|i| {
            let vertices: Vec<Complex> = (0..args.n).map(|_| square_point(&mut rng)).collect();
            Polygon::new(format!("p{i}"), vertices).expect("unit-square vertices are valid")
        })
        .collect();

    let mut out = io::writer(&args.out)?;
    for base in &bases {
        writeln!(
            out,
            "{}",
            serde_json::to_string(&record_of(base.id(), base.vertices())).unwrap()
        )?;
    }
    out.flush()?;

    if let (Some(plants_path), Some(truth_path)) = (plants_path, truth_path) {
        let mut plants_file = io::writer(&plants_path)?;
        let mut truth_file = io::writer(&truth_path)?;
        let mut planted_idx = 0usize;
        for (kind, count) in &plants {
            for _ in 0..*count {
                let base = &bases[rng.gen_range(0..bases.len())];
                let id = format!("q{planted_idx}");
                planted_idx += 1;
                let truth = match kind {
                    PlantKind::Similarity => {
                        let shift = rng.gen_range(0..args.n);
                        let s = random_pose(&mut rng);
                        let w = s.apply_polygon(&base.shifted(shift));
                        writeln!(
                            plants_file,
                            "{}",
                            serde_json::to_string(&record_of(&id, w.vertices())).unwrap()
                        )?;
                        TruthRecord {
                            planted_id: id,
                            base_id: base.id().to_string(),
                            kind: "similarity".into(),
                            shift,
                            alpha: [s.alpha.re, s.alpha.im],
                            beta: [0.0, 0.0],
                            gamma: [s.gamma.re, s.gamma.im],
                            r: None,
                            model: None,
                        }
                    }
                    PlantKind::Affine => {
                        let f = random_affine(&mut rng, planted_idx.is_multiple_of(2));
                        let w = f.apply_polygon(base);
                        writeln!(
                            plants_file,
                            "{}",
                            serde_json::to_string(&record_of(&id, w.vertices())).unwrap()
                        )?;
                        TruthRecord {
                            planted_id: id,
                            base_id: base.id().to_string(),
                            kind: "affine".into(),
                            shift: 0,
                            alpha: [f.alpha.re, f.alpha.im],
                            beta: [f.beta.re, f.beta.im],
                            gamma: [f.gamma.re, f.gamma.im],
                            r: None,
                            model: None,
                        }
                    }
                    PlantKind::AffineNoise(r) => {
                        plant_affine_noise(&mut rng, &bases, &id, *r, &mut plants_file)?
                    }
                };
                writeln!(truth_file, "{}", serde_json::to_string(&truth).unwrap())?;
            }
        }
        plants_file.flush()?;
        truth_file.flush()?;
    }
    Ok(())
}

/// Noisy plant. Triangles sample the polydisc model the φ-disk report
/// covers; larger n falls back to per-vertex discs (empirical only).
fn plant_affine_noise(
    rng: &mut ChaCha8Rng,
    bases: &[Polygon],
    id: &str,
    r: f64,
    plants_file: &mut Box<dyn Write>,
) -> Result<TruthRecord, CliError> {
    let n = bases[0].len();
    let pose = random_pose(rng);
    if n == 3 {
        let pd = polymatch::Polydisc::new(r)
            .map_err(|e| CliError::domain(format!("affine-noise plant: {e}")))?;
        // pick a positively oriented base so the noise region is defined
        let base = (0..200)
            .map(|_| &bases[rng.gen_range(0..bases.len())])
            .find(|b| {
                polymatch::orientation(b.vertex(0), b.vertex(1), b.vertex(2))
                    == polymatch::Orientation::Positive
            })
            .ok_or_else(|| CliError::domain("no positively oriented base triangle found"))?;
        let l = polymatch::invariants::root_of_unity(3, 1);
        let (z1, z2, z3) = (base.vertex(0), base.vertex(1), base.vertex(2));
        let big_a = (l * l * z1 + l * z2 + z3) / 3.0;
        let big_b = (l * z1 + l * l * z2 + z3) / 3.0;
        let centroid = (z1 + z2 + z3) / 3.0;
        let us = pd.sample(rng);
        let vertices: Vec<Complex> = us
            .iter()
            .map(|u| pose.apply(big_a * u + big_b * u.conj() + centroid))
            .collect();
        writeln!(
            plants_file,
            "{}",
            serde_json::to_string(&record_of(id, &vertices)).unwrap()
        )?;
        Ok(TruthRecord {
            planted_id: id.to_string(),
            base_id: base.id().to_string(),
            kind: "affine-noise".into(),
            shift: 0,
            alpha: [pose.alpha.re, pose.alpha.im],
            beta: [0.0, 0.0],
            gamma: [pose.gamma.re, pose.gamma.im],
            r: Some(r),
            model: Some("polydisc".into()),
        })
    } else {
        let base = &bases[rng.gen_range(0..bases.len())];
        let vertices: Vec<Complex> = base
            .vertices()
            .iter()
            .map(|&z| {
                let noise = polymatch::noise::sample_disc(rng, r);
                pose.apply(z + noise)
            })
            .collect();
        writeln!(
            plants_file,
            "{}",
            serde_json::to_string(&record_of(id, &vertices)).unwrap()
        )?;
        Ok(TruthRecord {
            planted_id: id.to_string(),
            base_id: base.id().to_string(),
            kind: "affine-noise".into(),
            shift: 0,
            alpha: [pose.alpha.re, pose.alpha.im],
            beta: [0.0, 0.0],
            gamma: [pose.gamma.re, pose.gamma.im],
            r: Some(r),
            model: Some("vertex-disc".into()),
        })
    }
}
