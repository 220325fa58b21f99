//! Planar point index over finite φ values with an annulus query: report
//! every stored point whose pseudo-hyperbolic distance to a query center
//! lies in `[k − tol, k + tol]`.
//!
//! The tree is a static balanced kd-tree kept as a reordered node array:
//! the node of a range `[lo, hi)` sits at its midpoint, children are the
//! two sub-ranges. Subtrees are pruned with interval bounds on
//! `|ξ−ζ| / |1−ζ̄ξ|` over the subtree's bounding rectangle; reported points
//! always pass the exact predicate, so pruning slack cannot change results.

use num_complex::Complex64 as Complex;

use crate::invariants::{pseudo_hyperbolic_distance, InvariantValue};

/// Pseudo-hyperbolic annulus center: a finite φ value or the point at
/// infinity (`d(ξ, ∞) = 1/|ξ|`).
#[derive(Debug, Clone, Copy)]
pub(crate) enum PhiCenter {
    Finite(Complex),
    Infinity,
}

impl PhiCenter {
    fn to_invariant(self) -> InvariantValue {
        match self {
            PhiCenter::Finite(z) => InvariantValue::Finite(z),
            PhiCenter::Infinity => InvariantValue::Infinity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PlanarNode {
    pub point: Complex,
    pub slot: u32,
}

/// Collections below this size skip tree construction and use a linear scan.
pub(crate) const SCAN_THRESHOLD: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum PlanarIndex {
    Tree(Vec<PlanarNode>),
    Scan(Vec<PlanarNode>),
}

impl PlanarIndex {
    pub fn build(mut nodes: Vec<PlanarNode>) -> Self {
        if nodes.len() < SCAN_THRESHOLD {
            nodes.sort_by_key(|n| n.slot);
            return PlanarIndex::Scan(nodes);
        }
        build_range(&mut nodes, 0);
        PlanarIndex::Tree(nodes)
    }

    /// Reconstructs from a dumped node array without re-sorting; the array
    /// already encodes the tree layout. Returns `None` when a claimed tree
    /// layout violates the splitting invariant (queries would miss points).
    pub fn from_layout(kind_is_tree: bool, nodes: Vec<PlanarNode>) -> Option<Self> {
        if kind_is_tree {
            if !layout_is_valid(&nodes, 0) {
                return None;
            }
            Some(PlanarIndex::Tree(nodes))
        } else {
            Some(PlanarIndex::Scan(nodes))
        }
    }

    pub fn nodes(&self) -> &[PlanarNode] {
        match self {
            PlanarIndex::Tree(n) | PlanarIndex::Scan(n) => n,
        }
    }

    pub fn is_tree(&self) -> bool {
        matches!(self, PlanarIndex::Tree(_))
    }

    /// Slots of all points with `|d(point, center) − k| ≤ tol`.
    pub fn annulus_slots(&self, center: PhiCenter, k: f64, tol: f64) -> Vec<u32> {
        let mut out = Vec::new();
        let query = Annulus {
            center,
            inv: center.to_invariant(),
            k,
            tol,
        };
        match self {
            PlanarIndex::Scan(nodes) => {
                for node in nodes {
                    if query.accepts(node.point) {
                        out.push(node.slot);
                    }
                }
            }
            PlanarIndex::Tree(nodes) => {
                let rect = Rect {
                    min: [f64::NEG_INFINITY; 2],
                    max: [f64::INFINITY; 2],
                };
                collect_range(nodes, 0, rect, &query, &mut out);
            }
        }
        out.sort_unstable();
        out
    }
}

fn node_key(node: &PlanarNode, axis: usize) -> (f64, f64, u32) {
    let (a, b) = if axis == 0 {
        (node.point.re, node.point.im)
    } else {
        (node.point.im, node.point.re)
    };
    (a, b, node.slot)
}

fn build_range(nodes: &mut [PlanarNode], axis: usize) {
    if nodes.len() <= 1 {
        return;
    }
    let mid = nodes.len() / 2;
    nodes.select_nth_unstable_by(mid, |x, y| {
        let (a1, b1, s1) = node_key(x, axis);
        let (a2, b2, s2) = node_key(y, axis);
        a1.total_cmp(&a2).then(b1.total_cmp(&b2)).then(s1.cmp(&s2))
    });
    let (left, rest) = nodes.split_at_mut(mid);
    build_range(left, axis ^ 1);
    build_range(&mut rest[1..], axis ^ 1);
}

fn layout_is_valid(nodes: &[PlanarNode], axis: usize) -> bool {
    if nodes.len() <= 1 {
        return true;
    }
    let mid = nodes.len() / 2;
    let split = if axis == 0 {
        nodes[mid].point.re
    } else {
        nodes[mid].point.im
    };
    let coord = |n: &PlanarNode| if axis == 0 { n.point.re } else { n.point.im };
    nodes[..mid].iter().all(|n| coord(n) <= split)
        && nodes[mid + 1..].iter().all(|n| coord(n) >= split)
        && layout_is_valid(&nodes[..mid], axis ^ 1)
        && layout_is_valid(&nodes[mid + 1..], axis ^ 1)
}

#[derive(Clone, Copy)]
struct Rect {
    min: [f64; 2],
    max: [f64; 2],
}

impl Rect {
    fn min_dist(&self, p: Complex) -> f64 {
        let dx = (p.re - p.re.clamp(self.min[0], self.max[0])).abs();
        let dy = (p.im - p.im.clamp(self.min[1], self.max[1])).abs();
        (dx * dx + dy * dy).sqrt()
    }

    fn max_dist(&self, p: Complex) -> f64 {
        let dx = (p.re - self.min[0]).abs().max((p.re - self.max[0]).abs());
        let dy = (p.im - self.min[1]).abs().max((p.im - self.max[1]).abs());
        (dx * dx + dy * dy).sqrt()
    }
}

struct Annulus {
    center: PhiCenter,
    inv: InvariantValue,
    k: f64,
    tol: f64,
}

impl Annulus {
    fn accepts(&self, point: Complex) -> bool {
        // Same function the linear-scan oracle uses, so results agree exactly.
        match pseudo_hyperbolic_distance(InvariantValue::Finite(point), self.inv) {
            Ok(d) => (d - self.k).abs() <= self.tol,
            Err(_) => false,
        }
    }

    /// Conservative `[lower, upper]` for the distance over a rectangle.
    fn bounds(&self, rect: &Rect) -> (f64, f64) {
        let (num_min, num_max, den_min, den_max) = match self.center {
            PhiCenter::Infinity => {
                let zero = Complex::new(0.0, 0.0);
                (1.0, 1.0, rect.min_dist(zero), rect.max_dist(zero))
            }
            PhiCenter::Finite(zeta) => {
                let num_min = rect.min_dist(zeta);
                let num_max = rect.max_dist(zeta);
                let m = zeta.norm();
                if m == 0.0 {
                    (num_min, num_max, 1.0, 1.0)
                } else {
                    // |1 − ζ̄ξ| = |ζ|·|ξ − 1/ζ̄|
                    let pole = zeta / zeta.norm_sqr();
                    (
                        num_min,
                        num_max,
                        m * rect.min_dist(pole),
                        m * rect.max_dist(pole),
                    )
                }
            }
        };
        let lower = if den_max > 0.0 {
            num_min / den_max
        } else if num_min == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let upper = if den_min > 0.0 {
            num_max / den_min
        } else {
            f64::INFINITY
        };
        (lower, upper)
    }

    fn may_intersect(&self, rect: &Rect) -> bool {
        let margin = 1e-12 * (1.0 + self.k);
        let (lower, upper) = self.bounds(rect);
        lower <= self.k + self.tol + margin && upper >= self.k - self.tol - margin
    }
}

fn collect_range(
    nodes: &[PlanarNode],
    axis: usize,
    rect: Rect,
    query: &Annulus,
    out: &mut Vec<u32>,
) {
    if nodes.is_empty() || !query.may_intersect(&rect) {
        return;
    }
    let mid = nodes.len() / 2;
    let node = &nodes[mid];
    if query.accepts(node.point) {
        out.push(node.slot);
    }
    let split = if axis == 0 {
        node.point.re
    } else {
        node.point.im
    };
    let mut left_rect = rect;
    left_rect.max[axis] = split;
    let mut right_rect = rect;
    right_rect.min[axis] = split;
    collect_range(&nodes[..mid], axis ^ 1, left_rect, query, out);
    collect_range(&nodes[mid + 1..], axis ^ 1, right_rect, query, out);
}
