//! Shared generators for the integration suites. Everything is seeded so
//! failures reproduce exactly.

#![allow(dead_code)]

use polymatch::{AffineMap, Complex, Polygon, SimilarityMap};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Uniform point of the unit square.
pub fn square_point<R: Rng>(rng: &mut R) -> Complex {
    Complex::new(rng.gen::<f64>(), rng.gen::<f64>())
}

/// Random polygon with vertices uniform in the unit square.
pub fn random_polygon<R: Rng>(rng: &mut R, id: &str, n: usize) -> Polygon {
    let vertices = (0..n).map(|_| square_point(rng)).collect();
    Polygon::new(id, vertices).expect("random vertices are valid")
}

/// Similarity with `|α|` log-uniform in `[1e-3, 1e3]` and a translation in
/// `[-5, 5]²`.
pub fn random_similarity<R: Rng>(rng: &mut R) -> SimilarityMap {
    let log_scale = rng.gen_range(-3.0..3.0);
    let alpha = Complex::from_polar(
        10f64.powf(log_scale),
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    let gamma = Complex::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
    SimilarityMap::new(alpha, gamma).expect("alpha is nonzero")
}

/// Valid affine map; `reversing` controls the sign of the determinant.
pub fn random_affine<R: Rng>(rng: &mut R, reversing: bool) -> AffineMap {
    let alpha = Complex::from_polar(
        10f64.powf(rng.gen_range(-1.0..1.0)),
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    // keep |β|/|α| away from 1 so the determinant is well-conditioned
    let ratio = if reversing {
        rng.gen_range(1.15..3.0)
    } else {
        rng.gen_range(0.0..0.85)
    };
    let beta = Complex::from_polar(
        alpha.norm() * ratio,
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    let gamma = Complex::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
    AffineMap::new(alpha, beta, gamma).expect("ratio bounded away from 1")
}

/// Positively oriented triangle with vertices in the unit square.
pub fn random_positive_triangle<R: Rng>(rng: &mut R) -> (Complex, Complex, Complex) {
    loop {
        let (z1, z2, z3) = (square_point(rng), square_point(rng), square_point(rng));
        if polymatch::orientation(z1, z2, z3) == polymatch::Orientation::Positive {
            return (z1, z2, z3);
        }
    }
}

/// Non-collinear triple for affine solving.
pub fn random_noncollinear_triple<R: Rng>(rng: &mut R) -> [Complex; 3] {
    loop {
        let t = [square_point(rng), square_point(rng), square_point(rng)];
        if !polymatch::is_collinear(t[0], t[1], t[2], 1e-6) {
            return t;
        }
    }
}

fn root(n: usize, k: i64) -> Complex {
    polymatch::invariants::root_of_unity(n, k)
}

/// Builds a polygon whose φ_{n,1} equals `target` exactly, by solving the
/// last vertex (its weight is λⁿ = 1 in both sums).
pub fn polygon_with_phi<R: Rng>(rng: &mut R, id: &str, n: usize, target: Complex) -> Polygon {
    use polymatch::{phi_nj, InvariantValue};
    loop {
        let mut vertices: Vec<Complex> = (0..n - 1).map(|_| square_point(rng)).collect();
        let mut num = Complex::new(0.0, 0.0);
        let mut den = Complex::new(0.0, 0.0);
        for (k, z) in vertices.iter().enumerate() {
            let w = root(n, (k + 1) as i64);
            num += w * z;
            den += w.conj() * z;
        }
        let one = Complex::new(1.0, 0.0);
        if (one - target).norm() < 1e-9 {
            panic!("target too close to the fixed point 1");
        }
        let last = (target * den - num) / (one - target);
        if !last.re.is_finite() || !last.im.is_finite() {
            continue;
        }
        vertices.push(last);
        let polygon = Polygon::new(id, vertices).unwrap();
        match phi_nj(&polygon, 1).unwrap() {
            InvariantValue::Finite(phi)
                if (phi - target).norm() <= 1e-9 * (1.0 + target.norm()) =>
            {
                return polygon;
            }
            _ => continue, // solved vertex hit a vanishing-sum tolerance; retry
        }
    }
}

/// Polygon whose φ_{n,1} denominator vanishes exactly (signature = ∞).
pub fn polygon_with_infinite_phi<R: Rng>(rng: &mut R, id: &str, n: usize) -> Polygon {
    use polymatch::{phi_nj, InvariantValue};
    loop {
        let mut vertices: Vec<Complex> = (0..n - 1).map(|_| square_point(rng)).collect();
        let mut den = Complex::new(0.0, 0.0);
        for (k, z) in vertices.iter().enumerate() {
            den += root(n, -((k + 1) as i64)) * z;
        }
        vertices.push(-den);
        let polygon = Polygon::new(id, vertices).unwrap();
        if phi_nj(&polygon, 1).unwrap() == InvariantValue::Infinity {
            return polygon;
        }
    }
}

/// n = 4 polygon on the null set: both sums vanish (φ undefined).
pub fn polygon_on_null_set<R: Rng>(rng: &mut R, id: &str) -> Polygon {
    use polymatch::{phi_nj, InvariantValue};
    let i = Complex::new(0.0, 1.0);
    let (z1, z2) = (square_point(rng), square_point(rng));
    let n0 = i * z1 - z2;
    let d0 = -i * z1 - z2;
    let z3 = (n0 - d0) / (2.0 * i);
    let z4 = -d0 - i * z3;
    let polygon = Polygon::new(id, vec![z1, z2, z3, z4]).unwrap();
    assert_eq!(phi_nj(&polygon, 1).unwrap(), InvariantValue::Undefined);
    polygon
}
