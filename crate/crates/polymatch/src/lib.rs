//! Affine-invariant polygon matching and indexing on the complex plane.
//!
//! Polygons are ordered vertex lists identified with complex numbers. The
//! crate computes similarity invariants `φ_{n,j}` and their shift-invariant
//! powers (signatures), indexes a collection for constant-probe similarity
//! queries, answers known-affine and polygon-pair queries through
//! pseudo-hyperbolic geometry, and produces rigorous noise regions for
//! triangle matching under bounded vertex perturbation.
//!
//! ```
//! use polymatch::{Complex, Polygon, PolygonIndex, SimilarityMap, DEFAULT_CELL_SIZE};
//!
//! let collection = vec![
//!     Polygon::new(
//!         "a",
//!         vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)],
//!     )
//!     .unwrap(),
//!     Polygon::new(
//!         "b",
//!         vec![Complex::new(0.0, 0.0), Complex::new(2.0, 0.0), Complex::new(0.3, 1.4)],
//!     )
//!     .unwrap(),
//! ];
//! let index = PolygonIndex::build(collection, &[1], DEFAULT_CELL_SIZE).unwrap();
//!
//! // a rotated, scaled, translated and cyclically re-enumerated copy of "a"
//! let pose = SimilarityMap::new(Complex::new(0.0, 2.0), Complex::new(5.0, -1.0)).unwrap();
//! let query = pose.apply_polygon(&index.get("a").unwrap().shifted(1));
//!
//! let hits = index.query_similarity(&query, 1e-6).unwrap();
//! assert_eq!(hits.verified[0].candidate_id, "a");
//! assert_eq!(hits.verified[0].shift, 1);
//! ```

pub mod geometry;
pub mod index;
pub mod invariants;
pub mod matcher;
pub mod noise;

/// Double-precision complex number used for all plane coordinates.
pub type Complex = num_complex::Complex64;

pub use geometry::{
    diameter, is_collinear, orientation, solve_affine, solve_similarity, AffineMap, GeometryError,
    Orientation, Polygon, RiemannPoint, SimilarityMap,
};
pub use index::{
    pseudo_hyperbolic_circle, ApollonianQueryCircle, CandidateSet, IndexDump, IndexError,
    PairCandidateSet, PairMatch, PolygonIndex, PolygonRecord, DEFAULT_CELL_SIZE,
};
pub use invariants::{
    affine_ratio, chordal, chordal_invariant, phi_nj, phi_perm, pseudo_hyperbolic_distance,
    signature, Chart, InvariantError, InvariantValue, Signature, SignatureValue, SpherePoint,
};
pub use matcher::{
    verify_affine, verify_known_affine, verify_similarity, MatchError, MatchResult, MatchTransform,
};
pub use noise::{
    apollonius_circles, empirical_phi_disk, equilateral_bound, hexagon_circle, moebius_m,
    moebius_m_inverse, noise_region, phi_equals_m_of_tau, phi_noise_disk, rotation_r,
    smallest_enclosing_disk, tau, tau_region, taylor_bound, triangle_noise_coefficients,
    vertex_ellipses, ApolloniusCircles, Disk, Ellipse, HexagonCircle, NoiseError, NoiseRegion,
    Polydisc, TriangleCoefficients,
};
