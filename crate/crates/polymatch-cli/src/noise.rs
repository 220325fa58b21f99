//! `polymatch noise-bound`: per-triangle matching tolerances under bounded
//! vertex perturbation, reported as one JSON object.

use clap::Args;
use polymatch::{equilateral_bound, noise_region, Complex};
use serde::Serialize;

use crate::io::CliError;

#[derive(Args, Debug)]
pub struct NoiseBoundArgs {
    /// Triangle as `x1,y1,x2,y2,x3,y3` (positively oriented)
    #[arg(long, allow_hyphen_values = true)]
    pub triangle: String,
    /// Vertex perturbation radius, in (0, sqrt(3)/6)
    #[arg(long)]
    pub r: f64,
    /// Boundary samples for the φ-disk cover (min 16)
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
}

#[derive(Serialize)]
struct EllipseOut {
    center: [f64; 2],
    major_axis: f64,
    minor_axis: f64,
    angle: f64,
}

#[derive(Serialize)]
struct DiskOut {
    center: [f64; 2],
    radius: f64,
}

#[derive(Serialize)]
struct NoiseBoundOut {
    r: f64,
    samples: usize,
    equilateral_bound: f64,
    tau_ellipse: EllipseOut,
    phi_disk: DiskOut,
}

pub fn run(args: &NoiseBoundArgs) -> Result<(), CliError> {
    let coords: Vec<f64> = args
        .triangle
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|e| CliError::input(format!("--triangle: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if coords.len() != 6 {
        return Err(CliError::input(format!(
            "--triangle: expected 6 coordinates, got {}",
            coords.len()
        )));
    }
    let z1 = Complex::new(coords[0], coords[1]);
    let z2 = Complex::new(coords[2], coords[3]);
    let z3 = Complex::new(coords[4], coords[5]);

    let bound = equilateral_bound(args.r).map_err(|e| CliError::domain(e.to_string()))?;
    let region = noise_region(z1, z2, z3, args.r, args.samples)
        .map_err(|e| CliError::domain(e.to_string()))?;

    let out = NoiseBoundOut {
        r: args.r,
        samples: args.samples,
        equilateral_bound: bound,
        tau_ellipse: EllipseOut {
            center: [region.tau_ellipse.center.re, region.tau_ellipse.center.im],
            major_axis: region.tau_ellipse.major_axis,
            minor_axis: region.tau_ellipse.minor_axis,
            angle: region.tau_ellipse.angle,
        },
        phi_disk: DiskOut {
            center: [
                region.phi_bound_disk.center.re,
                region.phi_bound_disk.center.im,
            ],
            radius: region.phi_bound_disk.radius,
        },
    };
    println!(
        "{}",
        serde_json::to_string(&out).map_err(|e| CliError::input(e.to_string()))?
    );
    Ok(())
}
