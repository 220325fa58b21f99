//! Noise regions for triangle matching under bounded vertex perturbation.
//!
//! A triangle's similarity class is represented by `τ = (z₃−z₁)/(z₂−z₁)`,
//! and `φ = M∘τ` with the Möbius map `M(τ) = (λ²+τ)/(λ+τ)`, `λ = e^{2πi/3}`.
//! Perturbing each vertex of the equilateral triangle `(λ, λ², 1)` inside a
//! disc of radius `r` (the polydisc `U_r`) moves `φ` at most to a
//! closed-form modulus bound; pushing `U_r` through the affine map onto an
//! arbitrary positively oriented triangle turns the vertex discs into
//! ellipses and the τ bound into an ellipse in the τ plane, whose M image
//! is covered conservatively by a sampled enclosing disk.

mod disk;

pub use disk::{smallest_enclosing_disk, Disk};

use num_complex::Complex64 as Complex;
use rand::Rng;
use thiserror::Error;

use crate::geometry::{orientation, Orientation, Polygon, RiemannPoint};
use crate::invariants::{chordal, phi_nj, root_of_unity, InvariantValue};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("base vertices z1 and z2 coincide")]
    CoincidentBase,
    #[error("triangle is degenerate (collinear vertices)")]
    DegenerateTriangle,
    #[error("triangle is negatively oriented")]
    NegativelyOriented,
    #[error("perturbation radius {0} outside (0, sqrt(3)/6)")]
    ROutOfRange(f64),
    #[error("need at least 16 boundary samples, got {0}")]
    TooFewSamples(usize),
    #[error("Möbius image of the region is unbounded")]
    UnboundedImage,
    #[error("j={j} outside [1, n-1] for n={n}")]
    BadJ { j: usize, n: usize },
}

fn lambda() -> Complex {
    root_of_unity(3, 1)
}

fn sqrt3() -> f64 {
    3.0f64.sqrt()
}

/// Upper limit (exclusive) for the perturbation radius, `√3/6`.
pub fn max_radius() -> f64 {
    sqrt3() / 6.0
}

fn check_radius(r: f64) -> Result<(), NoiseError> {
    if r.is_finite() && r > 0.0 && r < max_radius() {
        Ok(())
    } else {
        Err(NoiseError::ROutOfRange(r))
    }
}

/// `√(9 − 20√3·r + 12r²)`; nonnegative on the admissible radius range.
fn s_term(r: f64) -> f64 {
    (9.0 - 20.0 * sqrt3() * r + 12.0 * r * r).sqrt()
}

/// Shape parameter `τ = (z₃−z₁)/(z₂−z₁)` of the similarity class
/// representative `(0, 1, τ)`.
pub fn tau(z1: Complex, z2: Complex, z3: Complex) -> Result<RiemannPoint, NoiseError> {
    if z1 == z2 {
        return Err(NoiseError::CoincidentBase);
    }
    Ok(RiemannPoint::Finite((z3 - z1) / (z2 - z1)))
}

/// `M(τ) = (λ²+τ)/(λ+τ)` on the extended plane: `M(∞) = 1`, `M(−λ) = ∞`.
/// Conjugates the shape parameter into the φ invariant: `φ = M∘τ`.
pub fn moebius_m(t: RiemannPoint) -> RiemannPoint {
    let l = lambda();
    match t {
        RiemannPoint::Infinity => RiemannPoint::Finite(Complex::new(1.0, 0.0)),
        RiemannPoint::Finite(t) => {
            let den = l + t;
            if den.norm_sqr() == 0.0 {
                RiemannPoint::Infinity
            } else {
                RiemannPoint::Finite((l * l + t) / den)
            }
        }
    }
}

/// Inverse of [`moebius_m`]: `M⁻¹(ξ) = (λ² − λξ)/(ξ − 1)`, `M⁻¹(1) = ∞`,
/// `M⁻¹(∞) = −λ`.
pub fn moebius_m_inverse(xi: RiemannPoint) -> RiemannPoint {
    let l = lambda();
    match xi {
        RiemannPoint::Infinity => RiemannPoint::Finite(-l),
        RiemannPoint::Finite(x) => {
            let den = x - Complex::new(1.0, 0.0);
            if den.norm_sqr() == 0.0 {
                RiemannPoint::Infinity
            } else {
                RiemannPoint::Finite((l * l - l * x) / den)
            }
        }
    }
}

/// Order-3 map `R(τ) = 1/(1−τ)` realizing cyclic relabelling of the
/// triangle vertices; fixed point `−λ²`, and `M∘R∘M⁻¹` is multiplication
/// by `λ`.
pub fn rotation_r(t: RiemannPoint) -> RiemannPoint {
    match t {
        RiemannPoint::Infinity => RiemannPoint::Finite(Complex::new(0.0, 0.0)),
        RiemannPoint::Finite(t) => {
            let den = Complex::new(1.0, 0.0) - t;
            if den.norm_sqr() == 0.0 {
                RiemannPoint::Infinity
            } else {
                RiemannPoint::Finite(den.inv())
            }
        }
    }
}

/// Consistency predicate: `φ(z1,z2,z3)` and `M(τ(z1,z2,z3))` agree within
/// 1e−10 in the chordal metric.
pub fn phi_equals_m_of_tau(z1: Complex, z2: Complex, z3: Complex) -> Result<bool, NoiseError> {
    if orientation(z1, z2, z3) == Orientation::Degenerate {
        return Err(NoiseError::DegenerateTriangle);
    }
    let polygon = Polygon::new("tau-check", vec![z1, z2, z3]).expect("three finite vertices");
    let phi = phi_nj(&polygon, 1).expect("j=1 is valid for n=3");
    let m = InvariantValue::from(moebius_m(tau(z1, z2, z3)?));
    let (Some(a), Some(b)) = (phi.to_sphere(), m.to_sphere()) else {
        return Ok(false);
    };
    Ok(chordal(a, b) <= 1e-10)
}

/// Polydisc of radius-`r` perturbations of the equilateral triangle:
/// vertex `k` ranges over the open disc of radius `r` around `(λ, λ², 1)[k]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polydisc {
    r: f64,
}

impl Polydisc {
    pub fn new(r: f64) -> Result<Self, NoiseError> {
        check_radius(r)?;
        Ok(Polydisc { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn centers() -> [Complex; 3] {
        let l = lambda();
        [l, l * l, Complex::new(1.0, 0.0)]
    }

    /// One uniform sample per disc, by rejection from the bounding square.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [Complex; 3] {
        Polydisc::centers().map(|c| c + sample_disc(rng, self.r))
    }
}

/// Uniform point of the open disc of radius `r` around the origin.
pub fn sample_disc<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Complex {
    loop {
        let x: f64 = rng.gen_range(-1.0..1.0);
        let y: f64 = rng.gen_range(-1.0..1.0);
        if x * x + y * y < 1.0 {
            return Complex::new(r * x, r * y);
        }
    }
}

/// Closed-form bound on `|φ|` over the polydisc `U_r`:
///
/// ```text
/// √( (9−4√3r+12r² − (3+2√3r)·S) / (9−4√3r+12r² + (3+2√3r)·S) ),
/// S = √(9−20√3r+12r²).
/// ```
pub fn equilateral_bound(r: f64) -> Result<f64, NoiseError> {
    check_radius(r)?;
    let s = s_term(r);
    let a = 9.0 - 4.0 * sqrt3() * r + 12.0 * r * r;
    let c = 3.0 + 2.0 * sqrt3() * r;
    Ok(((a - c * s) / (a + c * s)).sqrt())
}

/// Leading expansion of [`equilateral_bound`]: `(8√3/9)·r + (32/27)·r²`.
pub fn taylor_bound(r: f64) -> f64 {
    (8.0 * sqrt3() / 9.0) * r + (32.0 / 27.0) * r * r
}

/// Apollonius data bounding the edge-length ratios of `U_r` triangles:
/// each ratio lies strictly between `K1 = (√3−2r)/(√3+2r)` and `K2 = 1/K1`;
/// `x1..x4` are the real-axis diameter endpoints of the two excluded
/// circles for the ratio `|τ−1|/|τ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApolloniusCircles {
    pub k1: f64,
    pub k2: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

pub fn apollonius_circles(r: f64) -> Result<ApolloniusCircles, NoiseError> {
    check_radius(r)?;
    let s3 = sqrt3();
    let k1 = (s3 - 2.0 * r) / (s3 + 2.0 * r);
    Ok(ApolloniusCircles {
        k1,
        k2: 1.0 / k1,
        x1: (2.0 * r - s3) / (4.0 * r),
        x2: (s3 - 2.0 * r) / (2.0 * s3),
        x3: (s3 + 2.0 * r) / (2.0 * s3),
        x4: (s3 + 2.0 * r) / (4.0 * r),
    })
}

/// The circle through the hexagon vertices `ζ`, `R(ζ)`, `R²(ζ)` that
/// bounds the τ values of `U_r` triangles; `M` maps it onto the
/// origin-centered circle of radius [`equilateral_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexagonCircle {
    pub zeta: Complex,
    pub xi: Complex,
    pub center: Complex,
    pub radius: f64,
}

pub fn hexagon_circle(r: f64) -> Result<HexagonCircle, NoiseError> {
    check_radius(r)?;
    let s3 = sqrt3();
    let s = s_term(r);
    let zeta = Complex::new(0.5, s / (2.0 * (s3 + 2.0 * r)));
    let xi = Complex::new(0.5, 3.0 * (s3 + 2.0 * r) / (2.0 * s));
    Ok(HexagonCircle {
        zeta,
        xi,
        center: (zeta + xi) / 2.0,
        radius: 8.0 * s3 * r / ((s3 + 2.0 * r) * s),
    })
}

/// Polar coefficients of the affine map taking the equilateral triangle to
/// `(z1, z2, z3)`: `a·e^{iφ1} = (λ²z1+λz2+z3)/3`, `b·e^{iφ2} = (λz1+λ²z2+z3)/3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleCoefficients {
    pub a: f64,
    pub phi1: f64,
    pub b: f64,
    pub phi2: f64,
}

pub fn triangle_noise_coefficients(
    z1: Complex,
    z2: Complex,
    z3: Complex,
) -> Result<TriangleCoefficients, NoiseError> {
    match orientation(z1, z2, z3) {
        Orientation::Degenerate => return Err(NoiseError::DegenerateTriangle),
        Orientation::Negative => return Err(NoiseError::NegativelyOriented),
        Orientation::Positive => {}
    }
    let l = lambda();
    let big_a = (l * l * z1 + l * z2 + z3) / 3.0;
    let big_b = (l * z1 + l * l * z2 + z3) / 3.0;
    let b = big_b.norm();
    Ok(TriangleCoefficients {
        a: big_a.norm(),
        phi1: big_a.arg(),
        b,
        phi2: if b == 0.0 { 0.0 } else { big_b.arg() },
    })
}

/// Open ellipse `E_center(major, minor, angle)`: axis fields are full
/// lengths, `angle` is the major-axis inclination normalized to `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub center: Complex,
    pub major_axis: f64,
    pub minor_axis: f64,
    pub angle: f64,
}

impl Ellipse {
    pub fn new(center: Complex, major_axis: f64, minor_axis: f64, angle: f64) -> Self {
        debug_assert!(major_axis >= minor_axis && minor_axis >= 0.0);
        Ellipse {
            center,
            major_axis,
            minor_axis,
            angle: angle.rem_euclid(std::f64::consts::PI),
        }
    }

    /// Membership with both semi-axes inflated by `pad` (degenerate
    /// segment ellipses are tested with a thickness tolerance that way).
    pub fn contains_padded(&self, p: Complex, pad: f64) -> bool {
        let d = (p - self.center) * Complex::from_polar(1.0, -self.angle);
        let sa = self.major_axis / 2.0 + pad;
        let sb = self.minor_axis / 2.0 + pad;
        if sa <= 0.0 || sb <= 0.0 {
            return false;
        }
        let qx = d.re / sa;
        let qy = d.im / sb;
        qx * qx + qy * qy <= 1.0
    }

    pub fn contains(&self, p: Complex) -> bool {
        self.contains_padded(p, 0.0)
    }

    /// Boundary point at parameter `t` (major-axis direction at `t = 0`).
    pub fn boundary_point(&self, t: f64) -> Complex {
        let local = Complex::new(
            self.major_axis / 2.0 * t.cos(),
            self.minor_axis / 2.0 * t.sin(),
        );
        self.center + local * Complex::from_polar(1.0, self.angle)
    }
}

/// The three vertex ellipses (region `V`): images of the `U_r` discs under
/// the equilateral-to-triangle map, `E_{z_j}(2r(a+b), 2r|a−b|, (φ1+φ2)/2)`.
pub fn vertex_ellipses(
    z1: Complex,
    z2: Complex,
    z3: Complex,
    r: f64,
) -> Result<[Ellipse; 3], NoiseError> {
    check_radius(r)?;
    let co = triangle_noise_coefficients(z1, z2, z3)?;
    let major = 2.0 * r * (co.a + co.b);
    let minor = 2.0 * r * (co.a - co.b).abs();
    let angle = (co.phi1 + co.phi2) / 2.0;
    Ok([z1, z2, z3].map(|z| Ellipse::new(z, major, minor, angle)))
}

/// Ellipse in the τ plane assigned to triangles with vertices in the
/// region `V` of [`vertex_ellipses`]:
/// `E_w(2√3ρ(a+b)/|z2−z1|, 2√3ρ|a−b|/|z2−z1|, (φ1+φ2)/2 − arg(z2−z1))`
/// with `ρ` the hexagon-circle radius and
/// `w = 1/2 − √3(z1+z2−2z3)(9+12r²−4√3r) / (6(z2−z1)(√3+2r)·S)`.
/// The center converges to `τ(z1,z2,z3)` as `r → 0`.
pub fn tau_region(z1: Complex, z2: Complex, z3: Complex, r: f64) -> Result<Ellipse, NoiseError> {
    check_radius(r)?;
    let co = triangle_noise_coefficients(z1, z2, z3)?;
    let s3 = sqrt3();
    let s = s_term(r);
    let rho = hexagon_circle(r)?.radius;
    let base = z2 - z1;
    let w = Complex::new(0.5, 0.0)
        - s3 * (z1 + z2 - 2.0 * z3) * (9.0 + 12.0 * r * r - 4.0 * s3 * r)
            / (6.0 * base * (s3 + 2.0 * r) * s);
    let scale = 2.0 * s3 * rho / base.norm();
    Ok(Ellipse::new(
        w,
        scale * (co.a + co.b),
        scale * (co.a - co.b).abs(),
        (co.phi1 + co.phi2) / 2.0 - base.arg(),
    ))
}

/// Conservative disk covering the Möbius image of the [`tau_region`]
/// ellipse: the boundary is sampled uniformly in parameter, mapped through
/// `M`, and the smallest enclosing disk of the images is inflated by the
/// maximum adjacent-sample gap. Möbius maps send the ellipse to a quartic
/// curve with no closed form, so the cover is sampled rather than exact.
pub fn phi_noise_disk(
    z1: Complex,
    z2: Complex,
    z3: Complex,
    r: f64,
    samples: usize,
) -> Result<Disk, NoiseError> {
    if samples < 16 {
        return Err(NoiseError::TooFewSamples(samples));
    }
    let ellipse = tau_region(z1, z2, z3, r)?;
    let mut images = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = std::f64::consts::TAU * i as f64 / samples as f64;
        match moebius_m(RiemannPoint::Finite(ellipse.boundary_point(t))) {
            RiemannPoint::Finite(z) => images.push(z),
            RiemannPoint::Infinity => return Err(NoiseError::UnboundedImage),
        }
    }
    let mut gap = 0.0f64;
    for i in 0..samples {
        gap = gap.max((images[(i + 1) % samples] - images[i]).norm());
    }
    let disk = smallest_enclosing_disk(&images);
    Ok(Disk {
        center: disk.center,
        radius: disk.radius + gap,
    })
}

/// Monte-Carlo estimate of the `φ_{n,j}` spread of a polygon under
/// independent per-vertex disc noise of radius `r`: the smallest disk
/// enclosing the sampled invariant values. Purely empirical — it covers the
/// drawn samples only and carries no guarantee, unlike the closed-form
/// triangle regions. Draws whose invariant is undefined are skipped; an
/// infinite invariant aborts (no disk covers the spread).
pub fn empirical_phi_disk<R: Rng + ?Sized>(
    polygon: &Polygon,
    j: usize,
    r: f64,
    samples: usize,
    rng: &mut R,
) -> Result<Disk, NoiseError> {
    if samples < 16 {
        return Err(NoiseError::TooFewSamples(samples));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(NoiseError::ROutOfRange(r));
    }
    let n = polygon.len();
    if j < 1 || j > n - 1 {
        return Err(NoiseError::BadJ { j, n });
    }
    let mut noisy = polygon.vertices().to_vec();
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        for (dst, src) in noisy.iter_mut().zip(polygon.vertices()) {
            *dst = src + sample_disc(rng, r);
        }
        match crate::invariants::phi_nj_points(&noisy, j)
            .expect("j validated against the polygon size")
        {
            InvariantValue::Finite(z) => values.push(z),
            InvariantValue::Infinity => return Err(NoiseError::UnboundedImage),
            InvariantValue::Undefined => {}
        }
    }
    if values.is_empty() {
        return Err(NoiseError::UnboundedImage);
    }
    Ok(smallest_enclosing_disk(&values))
}

/// Combined per-triangle noise region: the τ-plane ellipse and the
/// conservative φ-plane disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseRegion {
    pub tau_ellipse: Ellipse,
    pub phi_bound_disk: Disk,
}

pub fn noise_region(
    z1: Complex,
    z2: Complex,
    z3: Complex,
    r: f64,
    samples: usize,
) -> Result<NoiseRegion, NoiseError> {
    Ok(NoiseRegion {
        tau_ellipse: tau_region(z1, z2, z3, r)?,
        phi_bound_disk: phi_noise_disk(z1, z2, z3, r, samples)?,
    })
}
