//! Similarity and affine invariants of n-gons.
//!
//! For an n-gon `(z_1, …, z_n)` and `1 ≤ j ≤ n−1`,
//!
//! ```text
//! φ_{n,j}(Z) = Σ_k λ_n^{jk} z_k / Σ_k λ_n^{−jk} z_k ,   λ_n = e^{2πi/n},
//! ```
//!
//! is invariant under similarity transformations, and `φ_{n,j}(Z)^n` is
//! additionally invariant under cyclic shifts of the enumeration, which makes
//! it usable as a hash key. Between a polygon and its image under an affine
//! map `f(z) = αz + βz̄ + γ`, the pseudo-hyperbolic distance of the two φ
//! values equals `|β|/|α|` independently of the polygon.

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{AffineMap, Polygon, RiemannPoint};

/// Numerator/denominator sums are declared zero below this fraction of
/// `Σ_k |z_k|`; both vanishing puts the polygon on the null set where φ is
/// undefined.
pub const VANISH_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("j must lie in [1, n-1], got j={j} for n={n}")]
    BadJ { j: usize, n: usize },
    #[error("permutation must be a bijection on 1..=n")]
    BadPermutation,
    #[error("operand is undefined (null-set polygon)")]
    UndefinedOperand,
    #[error("affine ratio needs alpha != 0")]
    ZeroAlpha,
}

/// `λ_n^k` for any integer exponent, reduced mod n before evaluation.
pub fn root_of_unity(n: usize, k: i64) -> Complex {
    let m = k.rem_euclid(n as i64) as f64;
    Complex::from_polar(1.0, std::f64::consts::TAU * m / n as f64)
}

/// Value of an invariant on the extended plane, with a marker for the
/// measure-zero null set where both defining sums vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InvariantValue {
    Finite(Complex),
    Infinity,
    Undefined,
}

impl InvariantValue {
    pub fn is_undefined(&self) -> bool {
        matches!(self, InvariantValue::Undefined)
    }

    pub fn finite(&self) -> Option<Complex> {
        match self {
            InvariantValue::Finite(z) => Some(*z),
            _ => None,
        }
    }

    pub fn to_sphere(&self) -> Option<SpherePoint> {
        match self {
            InvariantValue::Finite(z) => Some(SpherePoint::from_complex(*z)),
            InvariantValue::Infinity => Some(SpherePoint::infinity()),
            InvariantValue::Undefined => None,
        }
    }
}

impl From<RiemannPoint> for InvariantValue {
    fn from(p: RiemannPoint) -> Self {
        match p {
            RiemannPoint::Finite(z) => InvariantValue::Finite(z),
            RiemannPoint::Infinity => InvariantValue::Infinity,
        }
    }
}

/// Coordinate chart of a [`SpherePoint`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chart {
    /// Stores the value itself (used when `|value| ≤ 1`).
    Direct,
    /// Stores the reciprocal (used when `|value| > 1`; ∞ is coordinate 0).
    Reciprocal,
}

/// Lossless point of the Riemann sphere in one of two charts; the stored
/// coordinate always has modulus ≤ 1, so powers never overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub chart: Chart,
    pub coord: Complex,
}

impl SpherePoint {
    pub fn from_complex(z: Complex) -> Self {
        if z.norm_sqr() <= 1.0 {
            SpherePoint {
                chart: Chart::Direct,
                coord: z,
            }
        } else {
            SpherePoint {
                chart: Chart::Reciprocal,
                coord: z.inv(),
            }
        }
    }

    pub fn infinity() -> Self {
        SpherePoint {
            chart: Chart::Reciprocal,
            coord: Complex::new(0.0, 0.0),
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.chart == Chart::Reciprocal && self.coord.norm_sqr() == 0.0
    }

    /// Same point in the opposite chart. Undefined for ∞ (reciprocal zero).
    pub fn flipped(&self) -> SpherePoint {
        let chart = match self.chart {
            Chart::Direct => Chart::Reciprocal,
            Chart::Reciprocal => Chart::Direct,
        };
        SpherePoint {
            chart,
            coord: self.coord.inv(),
        }
    }

    pub fn to_invariant(&self) -> InvariantValue {
        match self.chart {
            Chart::Direct => InvariantValue::Finite(self.coord),
            Chart::Reciprocal if self.is_infinity() => InvariantValue::Infinity,
            Chart::Reciprocal => InvariantValue::Finite(self.coord.inv()),
        }
    }
}

/// Chordal metric on the Riemann sphere, `|a−b| / √((1+|a|²)(1+|b|²))`,
/// evaluated stably from chart coordinates (it is invariant under `z ↦ 1/z`,
/// so cross-chart operands reduce to `|ab − 1|` over the same normalizer).
pub fn chordal(a: SpherePoint, b: SpherePoint) -> f64 {
    let denom = ((1.0 + a.coord.norm_sqr()) * (1.0 + b.coord.norm_sqr())).sqrt();
    if a.chart == b.chart {
        (a.coord - b.coord).norm() / denom
    } else {
        (a.coord * b.coord - Complex::new(1.0, 0.0)).norm() / denom
    }
}

/// Chordal metric on invariant values; errors when either is undefined.
pub fn chordal_invariant(a: InvariantValue, b: InvariantValue) -> Result<f64, InvariantError> {
    match (a.to_sphere(), b.to_sphere()) {
        (Some(x), Some(y)) => Ok(chordal(x, y)),
        _ => Err(InvariantError::UndefinedOperand),
    }
}

fn ratio_value(num: Complex, den: Complex, scale: f64) -> InvariantValue {
    let eps = VANISH_TOL * scale;
    let num_zero = num.norm() <= eps;
    let den_zero = den.norm() <= eps;
    match (num_zero, den_zero) {
        (true, true) => InvariantValue::Undefined,
        (false, true) => InvariantValue::Infinity,
        (true, false) => InvariantValue::Finite(Complex::new(0.0, 0.0)),
        (false, false) => InvariantValue::Finite(num / den),
    }
}

/// The similarity invariant `φ_{n,j}` with vertices enumerated from k = 1.
///
/// For even `n` and `j = n/2` the weights `λ^{jk} = (−1)^k` are real, both
/// sums coincide and the invariant is identically 1 (or undefined when the
/// alternating sum vanishes); that case is evaluated exactly rather than as
/// a ratio of two independently rounded sums.
pub fn phi_nj(polygon: &Polygon, j: usize) -> Result<InvariantValue, InvariantError> {
    phi_nj_points(polygon.vertices(), j)
}

/// [`phi_nj`] on a raw vertex slice (`n = vertices.len()`, at least 3).
pub fn phi_nj_points(vertices: &[Complex], j: usize) -> Result<InvariantValue, InvariantError> {
    let n = vertices.len();
    if n < 3 || j < 1 || j > n - 1 {
        return Err(InvariantError::BadJ { j, n });
    }
    if n.is_multiple_of(2) && j == n / 2 {
        let mut sum = Complex::new(0.0, 0.0);
        let mut scale = 0.0;
        for (k, &z) in vertices.iter().enumerate() {
            sum += if (k + 1).is_multiple_of(2) { z } else { -z };
            scale += z.norm();
        }
        return Ok(if sum.norm() <= VANISH_TOL * scale {
            InvariantValue::Undefined
        } else {
            InvariantValue::Finite(Complex::new(1.0, 0.0))
        });
    }
    let mut num = Complex::new(0.0, 0.0);
    let mut den = Complex::new(0.0, 0.0);
    let mut scale = 0.0;
    for (k, &z) in vertices.iter().enumerate() {
        let w = root_of_unity(n, (j * (k + 1)) as i64);
        num += w * z;
        den += w.conj() * z;
        scale += z.norm();
    }
    Ok(ratio_value(num, den, scale))
}

/// The permutation variant `φ_p` with weights `λ_n^{p(k)}`; `p` must be a
/// bijection on `{1, …, n}`.
pub fn phi_perm(polygon: &Polygon, perm: &[usize]) -> Result<InvariantValue, InvariantError> {
    let n = polygon.len();
    if perm.len() != n {
        return Err(InvariantError::BadPermutation);
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p < 1 || p > n || seen[p - 1] {
            return Err(InvariantError::BadPermutation);
        }
        seen[p - 1] = true;
    }
    let mut num = Complex::new(0.0, 0.0);
    let mut den = Complex::new(0.0, 0.0);
    let mut scale = 0.0;
    for (&z, &p) in polygon.vertices().iter().zip(perm) {
        let w = root_of_unity(n, p as i64);
        num += w * z;
        den += w.conj() * z;
        scale += z.norm();
    }
    Ok(ratio_value(num, den, scale))
}

/// Shift-invariant signature value `φ_{n,j}(Z)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignatureValue {
    Point(SpherePoint),
    Undefined,
}

/// The index key `(j, φ_{n,j}(Z)^n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Signature {
    pub j: usize,
    pub n: usize,
    pub value: SignatureValue,
}

/// Computes `φ_{n,j}(Z)^n`, choosing the chart before exponentiation so the
/// power is taken on a coordinate of modulus ≤ 1 (exponentiation by
/// squaring; no overflow for any n).
pub fn signature(polygon: &Polygon, j: usize) -> Result<Signature, InvariantError> {
    let n = polygon.len();
    let value = match phi_nj(polygon, j)? {
        InvariantValue::Undefined => SignatureValue::Undefined,
        InvariantValue::Infinity => SignatureValue::Point(SpherePoint::infinity()),
        InvariantValue::Finite(z) => {
            let base = SpherePoint::from_complex(z);
            SignatureValue::Point(SpherePoint {
                chart: base.chart,
                coord: base.coord.powu(n as u32),
            })
        }
    };
    Ok(Signature { j, n, value })
}

/// Pseudo-hyperbolic distance `|b−a| / |1 − conj(a)·b|` on the extended
/// plane: `d(a, ∞) = 1/|a|`, coincident operands give 0, a vanishing
/// denominator with nonvanishing numerator gives `+∞`.
pub fn pseudo_hyperbolic_distance(
    a: InvariantValue,
    b: InvariantValue,
) -> Result<f64, InvariantError> {
    use InvariantValue::*;
    match (a, b) {
        (Undefined, _) | (_, Undefined) => Err(InvariantError::UndefinedOperand),
        (Infinity, Infinity) => Ok(0.0),
        (Infinity, Finite(z)) | (Finite(z), Infinity) => {
            let m = z.norm();
            Ok(if m == 0.0 { f64::INFINITY } else { 1.0 / m })
        }
        (Finite(x), Finite(y)) => {
            let num = (y - x).norm();
            if num == 0.0 {
                return Ok(0.0);
            }
            let den = (Complex::new(1.0, 0.0) - x.conj() * y).norm();
            Ok(if den == 0.0 { f64::INFINITY } else { num / den })
        }
    }
}

/// The affine invariant `|β|/|α|` of Eq-type `f(z) = αz + βz̄ + γ`.
pub fn affine_ratio(f: &AffineMap) -> Result<f64, InvariantError> {
    let a = f.alpha.norm();
    if a == 0.0 {
        return Err(InvariantError::ZeroAlpha);
    }
    Ok(f.beta.norm() / a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn lam3() -> Complex {
        root_of_unity(3, 1)
    }

    fn poly(vertices: Vec<Complex>) -> Polygon {
        Polygon::new("t", vertices).unwrap()
    }

    #[test]
    fn phi_of_equilateral_is_zero() {
        let l = lam3();
        let z = poly(vec![l, l * l, c(1.0, 0.0)]);
        assert_eq!(phi_nj(&z, 1).unwrap(), InvariantValue::Finite(c(0.0, 0.0)));
    }

    #[test]
    fn phi_infinity_when_denominator_vanishes() {
        let l = lam3();
        let z = poly(vec![c(1.0, 0.0), l * l, l]);
        assert_eq!(phi_nj(&z, 1).unwrap(), InvariantValue::Infinity);
    }

    #[test]
    fn phi_square_numerator_cancels() {
        let z = poly(vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]);
        assert_eq!(phi_nj(&z, 1).unwrap(), InvariantValue::Finite(c(0.0, 0.0)));
    }

    #[test]
    fn phi_half_index_is_identically_one() {
        // j = n/2 weights are (−1)^k: the two sums coincide and φ ≡ 1.
        let z = poly(vec![c(0.3, 0.1), c(1.0, -0.4), c(-0.2, 0.9), c(0.5, 0.5)]);
        assert_eq!(phi_nj(&z, 2).unwrap(), InvariantValue::Finite(c(1.0, 0.0)));
        // vanishing alternating sum puts the polygon on the null set
        let z = poly(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 1.0)]);
        assert_eq!(phi_nj(&z, 2).unwrap(), InvariantValue::Undefined);
    }

    #[test]
    fn phi_bad_j_rejected() {
        let z = poly(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(phi_nj(&z, 0), Err(InvariantError::BadJ { j: 0, n: 3 }));
        assert_eq!(phi_nj(&z, 3), Err(InvariantError::BadJ { j: 3, n: 3 }));
    }

    #[test]
    fn phi_perm_identity_matches_phi_nj() {
        let z = poly(vec![c(0.3, 0.1), c(1.0, -0.4), c(-0.2, 0.9), c(0.5, 0.5)]);
        let by_perm = phi_perm(&z, &[1, 2, 3, 4]).unwrap();
        let by_j = phi_nj(&z, 1).unwrap();
        assert_eq!(by_perm, by_j);
    }

    #[test]
    fn phi_perm_rejects_non_bijections() {
        let z = poly(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(
            phi_perm(&z, &[1, 1, 2]),
            Err(InvariantError::BadPermutation)
        );
        assert_eq!(
            phi_perm(&z, &[0, 1, 2]),
            Err(InvariantError::BadPermutation)
        );
        assert_eq!(phi_perm(&z, &[1, 2]), Err(InvariantError::BadPermutation));
    }

    #[test]
    fn signature_of_right_triangle_matches_direct_evaluation() {
        // φ(0,1,i) = (λ²+i)/(λ+i); the signature is its cube.
        let z = poly(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        let phi = phi_nj(&z, 1).unwrap().finite().unwrap();
        let l = lam3();
        let expect = (l * l + c(0.0, 1.0)) / (l + c(0.0, 1.0));
        assert!((phi - expect).norm() < 1e-15);
        // frozen numeric value of the cube
        let sig = signature(&z, 1).unwrap();
        let SignatureValue::Point(sp) = sig.value else {
            panic!()
        };
        assert_eq!(sp.chart, Chart::Direct);
        assert!((sp.coord - c(-0.019237886466840548, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn signature_of_equilateral_is_zero() {
        let l = lam3();
        let z = poly(vec![l, l * l, c(1.0, 0.0)]);
        let sig = signature(&z, 1).unwrap();
        let SignatureValue::Point(sp) = sig.value else {
            panic!()
        };
        assert_eq!(sp.chart, Chart::Direct);
        assert_eq!(sp.coord, c(0.0, 0.0));
    }

    #[test]
    fn signature_equal_across_shifts() {
        let z = poly(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        let a = signature(&z, 1).unwrap();
        let b = signature(&z.shifted(1), 1).unwrap();
        let (SignatureValue::Point(x), SignatureValue::Point(y)) = (a.value, b.value) else {
            panic!()
        };
        assert!(chordal(x, y) < 1e-15);
    }

    #[test]
    fn signature_large_phi_uses_reciprocal_chart() {
        // Nearly-vanishing denominator: |φ| is huge, the stored coordinate
        // must stay inside the unit disk.
        let l = lam3();
        let z = poly(vec![c(1.0, 0.0), l * l + c(1e-8, 0.0), l]);
        let sig = signature(&z, 1).unwrap();
        let SignatureValue::Point(sp) = sig.value else {
            panic!()
        };
        assert_eq!(sp.chart, Chart::Reciprocal);
        assert!(sp.coord.norm() <= 1.0);
    }

    #[test]
    fn pseudo_hyperbolic_examples() {
        let a = InvariantValue::Finite(c(0.3, 0.1));
        assert_eq!(pseudo_hyperbolic_distance(a, a).unwrap(), 0.0);
        let d = pseudo_hyperbolic_distance(
            InvariantValue::Finite(c(0.0, 0.0)),
            InvariantValue::Finite(c(0.5, 0.0)),
        )
        .unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        let d = pseudo_hyperbolic_distance(
            InvariantValue::Finite(c(2.0, 0.0)),
            InvariantValue::Infinity,
        )
        .unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        assert_eq!(
            pseudo_hyperbolic_distance(InvariantValue::Undefined, a),
            Err(InvariantError::UndefinedOperand)
        );
    }

    #[test]
    fn affine_ratio_examples() {
        let sim = AffineMap::new(c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(affine_ratio(&sim).unwrap(), 0.0);
        let f = AffineMap::new(c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((affine_ratio(&f).unwrap() - 0.5).abs() < 1e-15);
        let f = AffineMap::new(c(1.0, 1.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((affine_ratio(&f).unwrap() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn chordal_handles_infinity_and_charts() {
        let inf = SpherePoint::infinity();
        let zero = SpherePoint::from_complex(c(0.0, 0.0));
        assert!((chordal(inf, zero) - 1.0).abs() < 1e-15);
        assert_eq!(chordal(inf, inf), 0.0);
        // same point expressed in both charts
        let z = c(0.8, 0.3);
        let direct = SpherePoint {
            chart: Chart::Direct,
            coord: z,
        };
        let recip = SpherePoint {
            chart: Chart::Reciprocal,
            coord: z.inv(),
        };
        assert!(chordal(direct, recip) < 1e-15);
    }

    #[test]
    fn undefined_on_null_set() {
        // All-zero polygon has both sums zero.
        let z = poly(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(phi_nj(&z, 1).unwrap(), InvariantValue::Undefined);
        assert!(matches!(
            signature(&z, 1).unwrap().value,
            SignatureValue::Undefined
        ));
    }
}
