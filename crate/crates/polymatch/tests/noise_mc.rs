//! Monte-Carlo and identity checks for the triangle noise machinery. All
//! sampling is seeded; the direct sum formulas used here are independent of
//! the library's evaluation paths.

mod common;

use common::*;
use polymatch::{
    apollonius_circles, equilateral_bound, hexagon_circle, moebius_m, moebius_m_inverse,
    phi_equals_m_of_tau, phi_noise_disk, rotation_r, tau, tau_region, taylor_bound,
    triangle_noise_coefficients, verify_similarity, vertex_ellipses, AffineMap, Complex, Polydisc,
    Polygon, RiemannPoint,
};
use rand::Rng;

fn lam() -> Complex {
    polymatch::invariants::root_of_unity(3, 1)
}

/// φ of a triangle via the raw weighted sums (independent of `phi_nj`).
fn phi3_direct(z1: Complex, z2: Complex, z3: Complex) -> Complex {
    let l = lam();
    (l * z1 + l * l * z2 + z3) / (l * l * z1 + l * z2 + z3)
}

/// The affine map taking the equilateral triangle to `(z1, z2, z3)`.
fn equilateral_map(z1: Complex, z2: Complex, z3: Complex) -> (Complex, Complex, Complex) {
    let l = lam();
    (
        (l * l * z1 + l * z2 + z3) / 3.0,
        (l * z1 + l * l * z2 + z3) / 3.0,
        (z1 + z2 + z3) / 3.0,
    )
}

#[test]
fn equilateral_bound_holds_over_polydisc_samples() {
    let mut rng = rng(301);
    for r in [0.01, 0.05, 0.1, 0.2] {
        let pd = Polydisc::new(r).unwrap();
        let bound = equilateral_bound(r).unwrap();
        let mut max_phi = 0.0f64;
        for _ in 0..100_000 {
            let [u1, u2, u3] = pd.sample(&mut rng);
            max_phi = max_phi.max(phi3_direct(u1, u2, u3).norm());
        }
        assert!(
            max_phi <= bound,
            "r={r}: max |phi| {max_phi} exceeds bound {bound}"
        );
    }
}

#[test]
fn taylor_remainder_is_cubic() {
    // |bound − taylor| ≤ C·r³ with C frozen from a fit over the range
    // (observed C ∈ [2.18, 2.66]).
    let mut r = 1e-4;
    while r <= 1e-2 {
        let diff = (equilateral_bound(r).unwrap() - taylor_bound(r)).abs();
        assert!(diff <= 2.7 * r * r * r, "r={r}: remainder {diff}");
        r *= 1.3;
    }
}

#[test]
fn apollonius_bounds_hold_for_all_edge_ratios() {
    let mut rng = rng(302);
    for r in [0.05, 0.1] {
        let pd = Polydisc::new(r).unwrap();
        let ap = apollonius_circles(r).unwrap();
        for _ in 0..10_000 {
            let [u1, u2, u3] = pd.sample(&mut rng);
            let t = tau(u1, u2, u3).unwrap().finite().unwrap();
            let one = Complex::new(1.0, 0.0);
            for ratio in [(t - one).norm() / t.norm(), t.norm(), (t - one).norm()] {
                assert!(
                    ap.k1 < ratio && ratio < ap.k2,
                    "r={r}: ratio {ratio} outside bounds"
                );
            }
        }
    }
}

#[test]
fn hexagon_circle_image_is_origin_centered() {
    for r in [0.01, 0.05, 0.1] {
        let h = hexagon_circle(r).unwrap();
        let bound = equilateral_bound(r).unwrap();
        for i in 0..64 {
            let t = std::f64::consts::TAU * i as f64 / 64.0;
            let p = h.center + Complex::from_polar(h.radius, t);
            let img = moebius_m(RiemannPoint::Finite(p)).finite().unwrap();
            assert!(
                (img.norm() - bound).abs() <= 1e-10,
                "r={r}: |M| = {}",
                img.norm()
            );
        }
    }
}

#[test]
fn hexagon_circle_contains_polydisc_tau_values() {
    let mut rng = rng(303);
    for r in [0.05, 0.1] {
        let pd = Polydisc::new(r).unwrap();
        let h = hexagon_circle(r).unwrap();
        let mut worst = 0.0f64;
        for _ in 0..100_000 {
            let [u1, u2, u3] = pd.sample(&mut rng);
            let t = tau(u1, u2, u3).unwrap().finite().unwrap();
            worst = worst.max((t - h.center).norm());
        }
        assert!(worst <= h.radius, "r={r}: tau escapes the bounding circle");
    }
}

#[test]
fn coefficients_match_solved_equilateral_map() {
    // a and b are the moduli of the map solved from the correspondence
    // (λ → z1, λ² → z2, 1 → z3)
    let mut rng = rng(313);
    let l = lam();
    for case in 0..200 {
        let (z1, z2, z3) = random_positive_triangle(&mut rng);
        let co = triangle_noise_coefficients(z1, z2, z3).unwrap();
        let f =
            polymatch::solve_affine([(l, z1), (l * l, z2), (Complex::new(1.0, 0.0), z3)]).unwrap();
        let scale = f.alpha.norm() + f.beta.norm();
        assert!(
            (co.a - f.alpha.norm()).abs() <= 1e-12 * scale,
            "case {case}"
        );
        assert!((co.b - f.beta.norm()).abs() <= 1e-12 * scale, "case {case}");
        assert!(
            (co.phi1 - f.alpha.arg()).abs() <= 1e-9,
            "case {case}: phase {} vs {}",
            co.phi1,
            f.alpha.arg()
        );
    }
}

#[test]
fn vertex_ellipses_contain_mapped_polydisc_vertices() {
    let mut rng = rng(304);
    for r in [0.01, 0.05] {
        for case in 0..10 {
            let (z1, z2, z3) = random_positive_triangle(&mut rng);
            let ellipses = vertex_ellipses(z1, z2, z3, r).unwrap();
            let (a, b, c0) = equilateral_map(z1, z2, z3);
            let pd = Polydisc::new(r).unwrap();
            for _ in 0..10_000 {
                let us = pd.sample(&mut rng);
                for (u, e) in us.iter().zip(&ellipses) {
                    let v = a * u + b * u.conj() + c0;
                    assert!(
                        e.contains_padded(v, 1e-12),
                        "r={r} case {case}: image vertex escapes its ellipse"
                    );
                }
            }
        }
    }
}

#[test]
fn phi_equals_m_of_tau_on_random_triangles() {
    let mut rng = rng(305);
    let mut checked = 0;
    while checked < 10_000 {
        let z1 = square_point(&mut rng);
        let z2 = square_point(&mut rng);
        let z3 = square_point(&mut rng);
        match phi_equals_m_of_tau(z1, z2, z3) {
            Ok(ok) => {
                assert!(ok, "identity failed at ({z1}, {z2}, {z3})");
                checked += 1;
            }
            Err(_) => continue, // degenerate draw
        }
    }
}

#[test]
fn rotation_conjugates_to_multiplication_by_lambda() {
    let mut rng = rng(306);
    let l = lam();
    for _ in 0..100 {
        let t = Complex::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let r3 = rotation_r(rotation_r(rotation_r(RiemannPoint::Finite(t))));
        assert!((r3.finite().unwrap() - t).norm() <= 1e-12 * (1.0 + t.norm()));
        let lhs = moebius_m(rotation_r(RiemannPoint::Finite(t)))
            .finite()
            .unwrap();
        let rhs = l * moebius_m(RiemannPoint::Finite(t)).finite().unwrap();
        assert!((lhs - rhs).norm() <= 1e-12);
        let back = moebius_m_inverse(moebius_m(RiemannPoint::Finite(t)))
            .finite()
            .unwrap();
        assert!((back - t).norm() <= 1e-12 * (1.0 + t.norm()));
    }
}

#[test]
fn cyclic_relabellings_are_similar_triangles() {
    let mut rng = rng(307);
    for case in 0..100 {
        let t = Complex::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.05..2.0));
        let rt = rotation_r(RiemannPoint::Finite(t)).finite().unwrap();
        let rrt = rotation_r(RiemannPoint::Finite(rt)).finite().unwrap();
        let zero = Complex::new(0.0, 0.0);
        let one = Complex::new(1.0, 0.0);
        let tri_a = Polygon::new("a", vec![zero, one, t]).unwrap();
        let tri_b = Polygon::new("b", vec![rt, zero, one]).unwrap();
        let tri_c = Polygon::new("c", vec![one, rrt, zero]).unwrap();
        for (w, z) in [(&tri_a, &tri_b), (&tri_b, &tri_c), (&tri_a, &tri_c)] {
            let m = verify_similarity(w, z, 1e-9).unwrap();
            assert!(
                m.is_some(),
                "case {case}: relabelled triangles must be similar"
            );
        }
    }
}

#[test]
fn vertex_action_reduces_to_shape_parameter_action() {
    // For f = g₂∘g₁ built from the equilateral map of (z1, z2, z3), the
    // triangle (f(0), f(1), f(τ)) is similar to (0, 1, h(τ)) with
    // h(τ) = (α_f τ + β_f τ̄)/(α_f + β_f).
    let mut rng = rng(308);
    let l = lam();
    for case in 0..100 {
        let (z1, z2, z3) = random_positive_triangle(&mut rng);
        let (a, b, c0) = equilateral_map(z1, z2, z3);
        let rot = l * l - l;
        let alpha_f = a * rot;
        let beta_f = -b * rot;
        let gamma_f = a * l + b * l * l + c0;
        let f = AffineMap::new(alpha_f, beta_f, gamma_f).unwrap();
        // sanity: f fixes the normalized base points onto z1, z2
        assert!((f.apply(Complex::new(0.0, 0.0)) - z1).norm() < 1e-12);
        assert!((f.apply(Complex::new(1.0, 0.0)) - z2).norm() < 1e-12);

        let t = Complex::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.05..2.0));
        let h = (alpha_f * t + beta_f * t.conj()) / (alpha_f + beta_f);
        let image = Polygon::new(
            "img",
            vec![
                f.apply(Complex::new(0.0, 0.0)),
                f.apply(Complex::new(1.0, 0.0)),
                f.apply(t),
            ],
        )
        .unwrap();
        let normalized = Polygon::new(
            "norm",
            vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), h],
        )
        .unwrap();
        let m = verify_similarity(&image, &normalized, 1e-9).unwrap();
        assert!(m.is_some(), "case {case}: h-reduction must hold");
    }
}

#[test]
fn tau_region_contains_equilateral_perturbations() {
    let mut rng = rng(309);
    let l = lam();
    for r in [0.01, 0.05, 0.1] {
        let ellipse = tau_region(l, l * l, Complex::new(1.0, 0.0), r).unwrap();
        let pd = Polydisc::new(r).unwrap();
        for _ in 0..100_000 {
            let [u1, u2, u3] = pd.sample(&mut rng);
            let t = tau(u1, u2, u3).unwrap().finite().unwrap();
            assert!(
                ellipse.contains_padded(t, 1e-12),
                "r={r}: tau escapes the region"
            );
        }
    }
}

#[test]
fn phi_disk_of_equilateral_tracks_the_exact_bound() {
    let l = lam();
    let r = 0.05;
    let disk = phi_noise_disk(l, l * l, Complex::new(1.0, 0.0), r, 256).unwrap();
    let bound = equilateral_bound(r).unwrap();
    // contains the exact image circle of radius `bound` around the origin
    for i in 0..64 {
        let t = std::f64::consts::TAU * i as f64 / 64.0;
        assert!(disk.contains(Complex::from_polar(bound, t), 0.0));
    }
    assert!(disk.radius >= bound);
    assert!(
        disk.radius < 1.05 * bound,
        "radius {} vs bound {bound}",
        disk.radius
    );

    // sampled noisy values stay inside
    let mut rng = rng(310);
    let pd = Polydisc::new(r).unwrap();
    for _ in 0..100_000 {
        let [u1, u2, u3] = pd.sample(&mut rng);
        let phi = phi3_direct(u1, u2, u3);
        assert!(disk.contains(phi, 0.0));
    }
}

#[test]
fn phi_disk_radius_converges_with_sample_count() {
    let mut rng = rng(311);
    let (z1, z2, z3) = random_positive_triangle(&mut rng);
    let r = 0.03;
    let coarse = phi_noise_disk(z1, z2, z3, r, 64).unwrap();
    let mid = phi_noise_disk(z1, z2, z3, r, 1024).unwrap();
    let fine = phi_noise_disk(z1, z2, z3, r, 4096).unwrap();
    // the gap inflation shrinks with the sample count
    assert!(mid.radius <= coarse.radius);
    assert!(fine.radius <= mid.radius);
    assert!(
        (mid.radius - fine.radius).abs() <= 0.01 * fine.radius,
        "1024 vs 4096 samples: {} vs {}",
        mid.radius,
        fine.radius
    );
}

#[test]
fn empirical_disk_is_consistent_with_the_exact_triangle_bound() {
    // Per-vertex disc noise on the equilateral triangle is exactly the
    // polydisc model, so every sampled φ obeys the closed-form bound.
    let l = lam();
    let r = 0.05;
    let equilateral = Polygon::new("e", vec![l, l * l, Complex::new(1.0, 0.0)]).unwrap();
    let mut r1 = rng(314);
    let disk = polymatch::empirical_phi_disk(&equilateral, 1, r, 20_000, &mut r1).unwrap();
    let bound = polymatch::equilateral_bound(r).unwrap();
    assert!(disk.center.norm() + disk.radius <= bound * (1.0 + 1e-12));

    // deterministic under a fixed seed
    let mut r2 = rng(314);
    assert_eq!(
        disk,
        polymatch::empirical_phi_disk(&equilateral, 1, r, 20_000, &mut r2).unwrap()
    );
}

#[test]
fn empirical_disk_covers_the_unperturbed_invariant_and_scales_with_noise() {
    let mut rng_gen = rng(315);
    let polygon = random_polygon(&mut rng_gen, "p", 6);
    let phi = polymatch::phi_nj(&polygon, 1).unwrap().finite().unwrap();
    let mut radii = Vec::new();
    for r in [1e-4, 1e-3, 1e-2] {
        let mut r_mc = rng(316);
        let disk = polymatch::empirical_phi_disk(&polygon, 1, r, 5_000, &mut r_mc).unwrap();
        assert!(
            disk.contains(phi, 1e-12),
            "r={r}: unperturbed value escapes"
        );
        radii.push(disk.radius);
    }
    assert!(
        radii[0] < radii[1] && radii[1] < radii[2],
        "spread must grow with noise: {radii:?}"
    );

    // guards
    let mut r_mc = rng(317);
    assert_eq!(
        polymatch::empirical_phi_disk(&polygon, 1, 0.01, 8, &mut r_mc),
        Err(polymatch::NoiseError::TooFewSamples(8))
    );
    assert_eq!(
        polymatch::empirical_phi_disk(&polygon, 6, 0.01, 64, &mut r_mc),
        Err(polymatch::NoiseError::BadJ { j: 6, n: 6 })
    );
    assert_eq!(
        polymatch::empirical_phi_disk(&polygon, 1, -1.0, 64, &mut r_mc),
        Err(polymatch::NoiseError::ROutOfRange(-1.0))
    );
}

#[test]
fn noise_region_bundles_consistent_components() {
    let mut rng = rng(312);
    let (z1, z2, z3) = random_positive_triangle(&mut rng);
    let region = polymatch::noise_region(z1, z2, z3, 0.02, 128).unwrap();
    let ellipse = tau_region(z1, z2, z3, 0.02).unwrap();
    assert_eq!(region.tau_ellipse, ellipse);
    // the disk covers the M image of the ellipse boundary samples
    for i in 0..128 {
        let t = std::f64::consts::TAU * i as f64 / 128.0;
        let img = moebius_m(RiemannPoint::Finite(ellipse.boundary_point(t)))
            .finite()
            .unwrap();
        assert!(region.phi_bound_disk.contains(img, 1e-12));
    }
    // coefficient sanity on the same triangle
    let co = triangle_noise_coefficients(z1, z2, z3).unwrap();
    assert!(co.a > co.b, "positively oriented triangles have a > b");
}
