//! Complex-plane primitives: points, polygons, affine and similarity maps.
//!
//! Points `(x, y)` are identified with complex numbers `z = x + iy`. An
//! affine transformation of the plane is written `f(z) = αz + βz̄ + γ` with
//! complex parameters and determinant `|α|² − |β|²`; a similarity is the
//! `β = 0` special case.

use num_complex::Complex64 as Complex;
use thiserror::Error;

/// Default scale-relative tolerance for the collinearity predicate.
pub const DEFAULT_COLLINEAR_TOL: f64 = 1e-12;

/// Relative determinant threshold below which an affine map is rejected as
/// numerically singular.
pub const AFFINE_SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("source points coincide")]
    CoincidentPoints,
    #[error("source points are collinear")]
    CollinearSource,
    #[error("affine map is singular or numerically near-singular")]
    NearSingular,
    #[error("similarity map must have nonzero alpha")]
    ZeroAlpha,
}

/// A point of the extended plane `ℂ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RiemannPoint {
    Finite(Complex),
    Infinity,
}

impl RiemannPoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, RiemannPoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex> {
        match self {
            RiemannPoint::Finite(z) => Some(*z),
            RiemannPoint::Infinity => None,
        }
    }
}

impl From<Complex> for RiemannPoint {
    fn from(z: Complex) -> Self {
        RiemannPoint::Finite(z)
    }
}

/// An identified, ordered (cyclic) list of vertices. Self-intersection is
/// allowed; only finiteness and `n ≥ 3` are enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    id: String,
    vertices: Vec<Complex>,
}

impl Polygon {
    pub fn new(id: impl Into<String>, vertices: Vec<Complex>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if vertices
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(GeometryError::NonFinite);
        }
        Ok(Polygon {
            id: id.into(),
            vertices,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertices(&self) -> &[Complex] {
        &self.vertices
    }

    /// Vertex by cyclic index.
    pub fn vertex(&self, k: usize) -> Complex {
        self.vertices[k % self.vertices.len()]
    }

    /// Re-enumeration starting at vertex `shift`, preserving cyclic order.
    pub fn shifted(&self, shift: usize) -> Polygon {
        let n = self.vertices.len();
        let s = shift % n;
        let mut vertices = Vec::with_capacity(n);
        vertices.extend_from_slice(&self.vertices[s..]);
        vertices.extend_from_slice(&self.vertices[..s]);
        Polygon {
            id: format!("{}.s{}", self.id, s),
            vertices,
        }
    }

    /// Largest pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices)
    }
}

/// Largest pairwise distance of a point set.
pub fn diameter(points: &[Complex]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max((a - b).norm());
        }
    }
    best
}

/// Indices of a vertex pair realizing the diameter.
pub fn diameter_pair(points: &[Complex]) -> (usize, usize) {
    let mut best = (0, 1);
    let mut best_d = -1.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = (points[i] - points[j]).norm();
            if d > best_d {
                best_d = d;
                best = (i, j);
            }
        }
    }
    best
}

/// Orientation-preserving or reversing planar map `z ↦ αz + βz̄ + γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub alpha: Complex,
    pub beta: Complex,
    pub gamma: Complex,
}

impl AffineMap {
    /// Validates finiteness and rejects relatively near-singular parameters:
    /// `| |α|²−|β|² | ≥ AFFINE_SINGULAR_TOL · (|α|²+|β|²)` must hold.
    pub fn new(alpha: Complex, beta: Complex, gamma: Complex) -> Result<Self, GeometryError> {
        for z in [alpha, beta, gamma] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(GeometryError::NonFinite);
            }
        }
        let a2 = alpha.norm_sqr();
        let b2 = beta.norm_sqr();
        if (a2 - b2).abs() < AFFINE_SINGULAR_TOL * (a2 + b2) || a2 + b2 == 0.0 {
            return Err(GeometryError::NearSingular);
        }
        Ok(AffineMap { alpha, beta, gamma })
    }

    pub fn identity() -> Self {
        AffineMap {
            alpha: Complex::new(1.0, 0.0),
            beta: Complex::new(0.0, 0.0),
            gamma: Complex::new(0.0, 0.0),
        }
    }

    /// Determinant `|α|² − |β|²` of the underlying real 2×2 linear part.
    pub fn det(&self) -> f64 {
        self.alpha.norm_sqr() - self.beta.norm_sqr()
    }

    pub fn is_orientation_preserving(&self) -> bool {
        self.det() > 0.0
    }

    pub fn apply(&self, z: Complex) -> Complex {
        self.alpha * z + self.beta * z.conj() + self.gamma
    }

    /// Vertex-wise image with a derived id.
    pub fn apply_polygon(&self, polygon: &Polygon) -> Polygon {
        Polygon {
            id: format!("{}.aff", polygon.id),
            vertices: polygon.vertices.iter().map(|&z| self.apply(z)).collect(),
        }
    }

    /// Inverse map; always valid when `self` is, since the relative
    /// determinant ratio is preserved under inversion.
    pub fn inverse(&self) -> AffineMap {
        let d = self.det();
        let alpha = self.alpha.conj() / d;
        let beta = -self.beta / d;
        let gamma = -(alpha * self.gamma + beta * self.gamma.conj());
        AffineMap { alpha, beta, gamma }
    }
}

/// Rotation + scaling + translation: `z ↦ αz + γ` with `α ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityMap {
    pub alpha: Complex,
    pub gamma: Complex,
}

impl SimilarityMap {
    pub fn new(alpha: Complex, gamma: Complex) -> Result<Self, GeometryError> {
        for z in [alpha, gamma] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(GeometryError::NonFinite);
            }
        }
        if alpha.norm_sqr() == 0.0 {
            return Err(GeometryError::ZeroAlpha);
        }
        Ok(SimilarityMap { alpha, gamma })
    }

    pub fn identity() -> Self {
        SimilarityMap {
            alpha: Complex::new(1.0, 0.0),
            gamma: Complex::new(0.0, 0.0),
        }
    }

    pub fn apply(&self, z: Complex) -> Complex {
        self.alpha * z + self.gamma
    }

    pub fn apply_polygon(&self, polygon: &Polygon) -> Polygon {
        Polygon {
            id: format!("{}.sim", polygon.id),
            vertices: polygon.vertices.iter().map(|&z| self.apply(z)).collect(),
        }
    }

    pub fn to_affine(&self) -> AffineMap {
        AffineMap {
            alpha: self.alpha,
            beta: Complex::new(0.0, 0.0),
            gamma: self.gamma,
        }
    }
}

/// Solves `w = αz + γ` from two correspondences `(z_k → w_k)`.
pub fn solve_similarity(pairs: [(Complex, Complex); 2]) -> Result<SimilarityMap, GeometryError> {
    let [(z1, w1), (z2, w2)] = pairs;
    if z1 == z2 {
        return Err(GeometryError::CoincidentPoints);
    }
    let alpha = (w2 - w1) / (z2 - z1);
    let gamma = w1 - alpha * z1;
    SimilarityMap::new(alpha, gamma)
}

/// Solves `w = αz + βz̄ + γ` from three correspondences `(z_k → w_k)`.
///
/// The complex system splits into two independent real 3×3 systems sharing
/// the matrix `[x_k  y_k  1]`: one for `(Re α + Re β, Im β − Im α, Re γ)`
/// against `Re w`, one for `(Im α + Im β, Re α − Re β, Im γ)` against `Im w`.
pub fn solve_affine(pairs: [(Complex, Complex); 3]) -> Result<AffineMap, GeometryError> {
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs_re = [0.0f64; 3];
    let mut rhs_im = [0.0f64; 3];
    for (row, (z, w)) in pairs.iter().enumerate() {
        m[row] = [z.re, z.im, 1.0];
        rhs_re[row] = w.re;
        rhs_im[row] = w.im;
    }
    let [u, v] = solve3(m, [rhs_re, rhs_im]).ok_or(GeometryError::CollinearSource)?;
    let alpha = Complex::new((u[0] + v[1]) / 2.0, (v[0] - u[1]) / 2.0);
    let beta = Complex::new((u[0] - v[1]) / 2.0, (v[0] + u[1]) / 2.0);
    let gamma = Complex::new(u[2], v[2]);
    AffineMap::new(alpha, beta, gamma)
}

/// Direct 3×3 elimination with partial pivoting, two right-hand sides.
/// Returns `None` when the matrix is singular to working precision.
#[allow(clippy::needless_range_loop)]
fn solve3(mut m: [[f64; 3]; 3], mut rhs: [[f64; 3]; 2]) -> Option<[[f64; 3]; 2]> {
    let scale: f64 = m.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    let mut perm = [0usize, 1, 2];
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&a, &b| m[perm[a]][col].abs().total_cmp(&m[perm[b]][col].abs()))
            .unwrap();
        perm.swap(col, pivot_row);
        let p = m[perm[col]][col];
        if p.abs() <= 1e-14 * scale {
            return None;
        }
        for row in col + 1..3 {
            let factor = m[perm[row]][col] / p;
            for k in col..3 {
                m[perm[row]][k] -= factor * m[perm[col]][k];
            }
            for r in rhs.iter_mut() {
                r[perm[row]] -= factor * r[perm[col]];
            }
        }
    }
    let mut out = [[0.0f64; 3]; 2];
    for (s, r) in rhs.iter().enumerate() {
        for col in (0..3).rev() {
            let mut acc = r[perm[col]];
            for k in col + 1..3 {
                acc -= m[perm[col]][k] * out[s][k];
            }
            out[s][col] = acc / m[perm[col]][col];
        }
    }
    Some(out)
}

/// Scale-invariant collinearity test: true when
/// `2·|signed area| ≤ tol · diameter²`.
pub fn is_collinear(z1: Complex, z2: Complex, z3: Complex, tol: f64) -> bool {
    let cross = ((z2 - z1).conj() * (z3 - z1)).im;
    let diam = diameter(&[z1, z2, z3]);
    cross.abs() <= tol * diam * diam
}

/// Sign of the triangle `(z1, z2, z3)`, i.e. of `Im((z3−z1)/(z2−z1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
    Degenerate,
}

pub fn orientation(z1: Complex, z2: Complex, z3: Complex) -> Orientation {
    if is_collinear(z1, z2, z3, DEFAULT_COLLINEAR_TOL) {
        return Orientation::Degenerate;
    }
    if ((z2 - z1).conj() * (z3 - z1)).im > 0.0 {
        Orientation::Positive
    } else {
        Orientation::Negative
    }
}
