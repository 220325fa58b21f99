//! Exact match verification between equal-size polygons.
//!
//! The verifiers resolve the cyclic shift by trying all n enumerations of
//! the candidate, solving the transform from a small set of well-separated
//! anchor vertices, and checking every vertex against a relative tolerance.
//! This is the O(n) check used as the final step after index candidates are
//! retrieved.

use num_complex::Complex64 as Complex;
use thiserror::Error;

use crate::geometry::{
    diameter_pair, solve_affine, solve_similarity, AffineMap, Polygon, SimilarityMap,
};

/// Consecutive anchor triples must span at least this normalized area
/// (`2·|signed area| / diameter²`) to be used for affine solving.
const MIN_TRIPLE_AREA: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchError {
    #[error("polygons differ in size: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("candidate has no non-collinear consecutive vertex triple")]
    AllTriplesCollinear,
}

/// Transform recovered by a verifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatchTransform {
    Similarity(SimilarityMap),
    Affine(AffineMap),
}

impl MatchTransform {
    pub fn apply(&self, z: Complex) -> Complex {
        match self {
            MatchTransform::Similarity(s) => s.apply(z),
            MatchTransform::Affine(f) => f.apply(z),
        }
    }

    /// Coefficients `(α, β, γ)` of the transform in affine form.
    pub fn coefficients(&self) -> (Complex, Complex, Complex) {
        match self {
            MatchTransform::Similarity(s) => (s.alpha, Complex::new(0.0, 0.0), s.gamma),
            MatchTransform::Affine(f) => (f.alpha, f.beta, f.gamma),
        }
    }
}

/// A verified correspondence `W ≈ transform(shift_ℓ(Z))`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub candidate_id: String,
    /// Vertex offset applied to the candidate: `W[k]` corresponds to
    /// `Z[(k + shift) mod n]`.
    pub shift: usize,
    pub transform: MatchTransform,
    /// Max vertex deviation relative to `diameter(W)`.
    pub residual: f64,
}

fn residual_scale(w: &Polygon) -> f64 {
    let d = w.diameter();
    if d > 0.0 {
        d
    } else {
        1.0
    }
}

fn shift_residual(
    w: &Polygon,
    z: &Polygon,
    shift: usize,
    scale: f64,
    apply: impl Fn(Complex) -> Complex,
) -> f64 {
    let n = w.len();
    let mut worst = 0.0f64;
    for k in 0..n {
        let dev = (w.vertex(k) - apply(z.vertex(k + shift))).norm();
        worst = worst.max(dev);
    }
    worst / scale
}

fn better(best: &Option<(f64, usize)>, residual: f64, shift: usize) -> bool {
    match best {
        None => true,
        // minimal residual, then minimal shift index
        Some((r, s)) => residual < *r || (residual == *r && shift < *s),
    }
}

/// Finds a similarity `s` and shift `ℓ` with `W ≈ s(shift_ℓ(Z))` within
/// `tol · diameter(W)` per vertex, or `None`. The solve anchors are the two
/// vertices of `Z` realizing its diameter.
pub fn verify_similarity(
    w: &Polygon,
    z: &Polygon,
    tol: f64,
) -> Result<Option<MatchResult>, MatchError> {
    let n = w.len();
    if z.len() != n {
        return Err(MatchError::SizeMismatch {
            left: w.len(),
            right: z.len(),
        });
    }
    let (i1, i2) = diameter_pair(z.vertices());
    if z.vertex(i1) == z.vertex(i2) {
        return Ok(None); // all vertices coincide; no similarity can be solved
    }
    let scale = residual_scale(w);
    let mut best: Option<(f64, usize)> = None;
    let mut best_map = None;
    for shift in 0..n {
        // Z[i] sits at position (i - shift) mod n of the shifted enumeration.
        let k1 = (i1 + n - shift) % n;
        let k2 = (i2 + n - shift) % n;
        let Ok(s) = solve_similarity([(z.vertex(i1), w.vertex(k1)), (z.vertex(i2), w.vertex(k2))])
        else {
            continue;
        };
        let residual = shift_residual(w, z, shift, scale, |p| s.apply(p));
        if residual <= tol && better(&best, residual, shift) {
            best = Some((residual, shift));
            best_map = Some(s);
        }
    }
    Ok(best.map(|(residual, shift)| MatchResult {
        candidate_id: z.id().to_string(),
        shift,
        transform: MatchTransform::Similarity(best_map.unwrap()),
        residual,
    }))
}

/// Position of the first consecutive triple (in the shifted enumeration of
/// `z`) whose normalized area clears [`MIN_TRIPLE_AREA`].
fn anchor_triple(z: &Polygon, shift: usize, diam: f64) -> Option<[usize; 3]> {
    let n = z.len();
    for t in 0..n {
        let idx = [(t + shift) % n, (t + 1 + shift) % n, (t + 2 + shift) % n];
        let a = z.vertex(idx[0]);
        let b = z.vertex(idx[1]);
        let c = z.vertex(idx[2]);
        let area2 = ((b - a).conj() * (c - a)).im.abs();
        if area2 > MIN_TRIPLE_AREA * diam * diam {
            return Some(idx);
        }
    }
    None
}

/// Finds an affine `f` and shift `ℓ` with `W ≈ f(shift_ℓ(Z))`, solving `f`
/// from the first non-collinear consecutive triple of the shifted candidate.
pub fn verify_affine(
    w: &Polygon,
    z: &Polygon,
    tol: f64,
) -> Result<Option<MatchResult>, MatchError> {
    let n = w.len();
    if z.len() != n {
        return Err(MatchError::SizeMismatch {
            left: w.len(),
            right: z.len(),
        });
    }
    let diam_z = z.diameter();
    if anchor_triple(z, 0, diam_z).is_none() {
        return Err(MatchError::AllTriplesCollinear);
    }
    let scale = residual_scale(w);
    let mut best: Option<(f64, usize)> = None;
    let mut best_map = None;
    for shift in 0..n {
        let Some(idx) = anchor_triple(z, shift, diam_z) else {
            continue;
        };
        let pairs = [
            (z.vertex(idx[0]), w.vertex((idx[0] + n - shift) % n)),
            (z.vertex(idx[1]), w.vertex((idx[1] + n - shift) % n)),
            (z.vertex(idx[2]), w.vertex((idx[2] + n - shift) % n)),
        ];
        let Ok(f) = solve_affine(pairs) else { continue };
        let residual = shift_residual(w, z, shift, scale, |p| f.apply(p));
        if residual <= tol && better(&best, residual, shift) {
            best = Some((residual, shift));
            best_map = Some(f);
        }
    }
    Ok(best.map(|(residual, shift)| MatchResult {
        candidate_id: z.id().to_string(),
        shift,
        transform: MatchTransform::Affine(best_map.unwrap()),
        residual,
    }))
}

/// Checks `W ≈ f(shift_ℓ(Z))` over all shifts for a known `f`; no solving.
pub fn verify_known_affine(
    w: &Polygon,
    z: &Polygon,
    f: &AffineMap,
    tol: f64,
) -> Result<Option<MatchResult>, MatchError> {
    let n = w.len();
    if z.len() != n {
        return Err(MatchError::SizeMismatch {
            left: w.len(),
            right: z.len(),
        });
    }
    let scale = residual_scale(w);
    let mut best: Option<(f64, usize)> = None;
    for shift in 0..n {
        let residual = shift_residual(w, z, shift, scale, |p| f.apply(p));
        if residual <= tol && better(&best, residual, shift) {
            best = Some((residual, shift));
        }
    }
    Ok(best.map(|(residual, shift)| MatchResult {
        candidate_id: z.id().to_string(),
        shift,
        transform: MatchTransform::Affine(*f),
        residual,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn poly(id: &str, vertices: Vec<Complex>) -> Polygon {
        Polygon::new(id, vertices).unwrap()
    }

    #[test]
    fn identity_match() {
        let z = poly("z", vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        let m = verify_similarity(&z, &z, 1e-9).unwrap().unwrap();
        assert_eq!(m.shift, 0);
        assert_eq!(m.residual, 0.0);
        let m = verify_affine(&z, &z, 1e-9).unwrap().unwrap();
        assert_eq!(m.shift, 0);
        assert_eq!(m.residual, 0.0);
        let m = verify_known_affine(&z, &z, &AffineMap::identity(), 1e-9)
            .unwrap()
            .unwrap();
        assert_eq!(m.shift, 0);
        assert_eq!(m.residual, 0.0);
    }

    #[test]
    fn similarity_with_planted_shift() {
        // W = shift_1(2·Z + 3): shift 1, α = 2, γ = 3.
        let z = poly("z", vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        let s = SimilarityMap::new(c(2.0, 0.0), c(3.0, 0.0)).unwrap();
        let w = s.apply_polygon(&z).shifted(1);
        let m = verify_similarity(&w, &z, 1e-12).unwrap().unwrap();
        assert_eq!(m.shift, 1);
        let MatchTransform::Similarity(rec) = m.transform else {
            panic!()
        };
        assert!((rec.alpha - c(2.0, 0.0)).norm() < 1e-12);
        assert!((rec.gamma - c(3.0, 0.0)).norm() < 1e-12);
        assert!(m.residual <= 1e-12);
    }

    #[test]
    fn dissimilar_triangles_do_not_match() {
        let z = poly("z", vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        let w = poly("w", vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 2.0)]);
        assert!(verify_similarity(&w, &z, 1e-6).unwrap().is_none());
    }

    #[test]
    fn affine_square_with_shift() {
        // The square (0, 1, i, 1+i) maps onto its own shift-2 enumeration via
        // the reflection z̄ + i, so the planted shift is not unique and the
        // tie-break may report shift 0 with the composed transform. The match
        // must still reproduce W from Z exactly.
        let z = poly(
            "z",
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)],
        );
        let f = AffineMap::new(c(1.0, 0.0), c(0.5, 0.0), c(0.0, 1.0)).unwrap();
        let w = f.apply_polygon(&z).shifted(2);
        let m = verify_affine(&w, &z, 1e-10).unwrap().unwrap();
        assert!(m.residual <= 1e-10);
        let n = z.len();
        for k in 0..n {
            let dev = (w.vertex(k) - m.transform.apply(z.vertex(k + m.shift))).norm();
            assert!(dev <= 1e-10 * w.diameter());
        }
        // the planted solution itself passes at its own shift
        let planted = verify_known_affine(&w, &z, &f, 1e-10).unwrap().unwrap();
        assert_eq!(planted.shift, 2);
    }

    #[test]
    fn affine_asymmetric_quad_recovers_planted_shift() {
        let z = poly(
            "z",
            vec![c(0.0, 0.0), c(1.0, 0.0), c(1.4, 0.9), c(-0.3, 1.2)],
        );
        let f = AffineMap::new(c(1.0, 0.0), c(0.5, 0.0), c(0.0, 1.0)).unwrap();
        let w = f.apply_polygon(&z).shifted(2);
        let m = verify_affine(&w, &z, 1e-10).unwrap().unwrap();
        assert_eq!(m.shift, 2);
        let MatchTransform::Affine(rec) = m.transform else {
            panic!()
        };
        assert!((rec.alpha - f.alpha).norm() < 1e-10);
        assert!((rec.beta - f.beta).norm() < 1e-10);
        assert!((rec.gamma - f.gamma).norm() < 1e-10);
        assert!(m.residual <= 1e-10);
    }

    #[test]
    fn reflection_is_found_with_reversing_map() {
        // Pure conjugation has α = 0, β = 1: |β| > |α|.
        let z = poly("z", vec![c(0.1, 0.2), c(1.3, -0.4), c(-0.5, 0.8)]);
        let f = AffineMap::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let w = f.apply_polygon(&z);
        let m = verify_affine(&w, &z, 1e-10).unwrap().unwrap();
        let MatchTransform::Affine(rec) = m.transform else {
            panic!()
        };
        assert!(rec.beta.norm() > rec.alpha.norm());
    }

    #[test]
    fn known_affine_with_shift_and_noise_rejection() {
        let z = poly(
            "z",
            (0..8)
                .map(|k| c((k as f64 * 0.7).cos(), (k as f64 * 1.3).sin()))
                .collect(),
        );
        let f = AffineMap::new(c(1.2, 0.3), c(0.2, -0.1), c(0.5, 0.5)).unwrap();
        let w = f.apply_polygon(&z).shifted(3);
        let m = verify_known_affine(&w, &z, &f, 1e-10).unwrap().unwrap();
        assert_eq!(m.shift, 3);

        // noise of 2·tol·diameter must push the residual over tolerance
        let tol = 1e-6;
        let d = w.diameter();
        let noisy = Polygon::new(
            "noisy",
            w.vertices()
                .iter()
                .map(|&v| v + c(2.0 * tol * d, 0.0))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(verify_known_affine(&noisy, &z, &f, tol).unwrap().is_none());
    }

    #[test]
    fn size_mismatch_rejected() {
        let z = poly("z", vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        let w = poly(
            "w",
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)],
        );
        assert!(matches!(
            verify_similarity(&w, &z, 1e-6),
            Err(MatchError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn fully_collinear_candidate_is_an_error() {
        let z = poly(
            "z",
            vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)],
        );
        let w = poly(
            "w",
            vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)],
        );
        assert_eq!(
            verify_affine(&w, &z, 1e-6),
            Err(MatchError::AllTriplesCollinear)
        );
    }

    #[test]
    fn anchor_triple_skips_collinear_runs() {
        // First three vertices are collinear; the scan must move past them.
        let z = poly(
            "z",
            vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)],
        );
        let w = z.clone();
        let m = verify_affine(&w, &z, 1e-9).unwrap().unwrap();
        assert_eq!(m.shift, 0);
    }
}
