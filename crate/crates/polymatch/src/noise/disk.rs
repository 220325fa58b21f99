//! Smallest enclosing disk of a planar point set (incremental Welzl).

use num_complex::Complex64 as Complex;

/// A closed disk in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Complex,
    pub radius: f64,
}

impl Disk {
    pub fn contains(&self, p: Complex, pad: f64) -> bool {
        (p - self.center).norm() <= self.radius + pad
    }
}

const EPS: f64 = 1e-12;

fn disk_two(a: Complex, b: Complex) -> Disk {
    let center = (a + b) / 2.0;
    Disk {
        center,
        radius: (a - center).norm(),
    }
}

fn circumdisk(a: Complex, b: Complex, c: Complex) -> Option<Disk> {
    let d = 2.0 * ((b - a).conj() * (c - a)).im;
    if d.abs() < EPS * (a.norm() + b.norm() + c.norm() + 1.0) {
        return None;
    }
    let bs = (b - a).norm_sqr();
    let cs = (c - a).norm_sqr();
    let ux = ((c - a).im * bs - (b - a).im * cs) / d;
    let uy = ((b - a).re * cs - (c - a).re * bs) / d;
    let center = a + Complex::new(ux, uy);
    Some(Disk {
        center,
        radius: (a - center).norm(),
    })
}

fn in_disk(d: &Disk, p: Complex) -> bool {
    d.contains(p, EPS * (1.0 + d.radius))
}

/// Exact (up to roundoff) smallest enclosing disk, deterministic in the
/// input order. Expected near-linear for typical inputs; inputs here are a
/// few thousand points at most.
pub fn smallest_enclosing_disk(points: &[Complex]) -> Disk {
    assert!(!points.is_empty(), "need at least one point");
    let mut d = Disk {
        center: points[0],
        radius: 0.0,
    };
    for (i, &p) in points.iter().enumerate() {
        if in_disk(&d, p) {
            continue;
        }
        d = Disk {
            center: p,
            radius: 0.0,
        };
        for (j, &q) in points[..i].iter().enumerate() {
            if in_disk(&d, q) {
                continue;
            }
            d = disk_two(p, q);
            for &s in &points[..j] {
                if in_disk(&d, s) {
                    continue;
                }
                d = circumdisk(p, q, s).unwrap_or_else(|| {
                    // collinear support: widest two-point disk wins
                    let mut best = disk_two(p, q);
                    for cand in [disk_two(p, s), disk_two(q, s)] {
                        if cand.radius > best.radius {
                            best = cand;
                        }
                    }
                    best
                });
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn two_point_diameter() {
        let d = smallest_enclosing_disk(&[c(-1.0, 0.0), c(1.0, 0.0)]);
        assert!((d.center.norm()) < 1e-12);
        assert!((d.radius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn points_on_circle() {
        let pts: Vec<Complex> = (0..64)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 64.0;
                c(0.5, -0.25) + Complex::from_polar(2.0, t)
            })
            .collect();
        let d = smallest_enclosing_disk(&pts);
        assert!((d.center - c(0.5, -0.25)).norm() < 1e-9);
        assert!((d.radius - 2.0).abs() < 1e-9);
        for &p in &pts {
            assert!(d.contains(p, 1e-9));
        }
    }

    #[test]
    fn interior_points_do_not_grow_disk() {
        let mut pts = vec![c(-1.0, 0.0), c(1.0, 0.0)];
        pts.extend((0..20).map(|k| c(0.05 * k as f64 - 0.5, 0.001 * k as f64)));
        let d = smallest_enclosing_disk(&pts);
        assert!((d.radius - 1.0).abs() < 1e-9);
    }
}
