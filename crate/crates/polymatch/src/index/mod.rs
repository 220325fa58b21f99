//! Signature index over a fixed-size polygon collection and the three
//! sublinear matching queries built on it.
//!
//! * `query_similarity` — unknown similarity transform; looks up the
//!   shift-invariant signature `φ_{n,j}(W)^n` in a quantized hash table with
//!   a fixed 3×3 cell probe, independent of the collection size.
//! * `query_known_affine` — known affine transform; retrieves stored φ
//!   values at pseudo-hyperbolic distance `|β/α|` from `φ(W)` (an Apollonius
//!   annulus) through a planar kd-tree.
//! * `query_pair` — unknown affine transform applied to a pair of queries;
//!   intersects the two pseudo-hyperbolic distance profiles by quantized
//!   1-D hashing.
//!
//! Every candidate passes through exact verification; the index is immutable
//! after build and safe for concurrent readers.

mod dump;
mod kdtree;

pub use dump::{
    CellDump, IndexDump, PlanarDump, PlanarNodeDump, PolygonRecord, TableDump, FORMAT_VERSION,
};

use std::collections::{HashMap, HashSet};

use num_complex::Complex64 as Complex;
use thiserror::Error;

use crate::geometry::{AffineMap, GeometryError, Polygon, RiemannPoint};
use crate::invariants::{
    affine_ratio, chordal, phi_nj, pseudo_hyperbolic_distance, signature, Chart, InvariantError,
    InvariantValue, SignatureValue, SpherePoint,
};
use crate::matcher::{
    verify_affine, verify_known_affine, verify_similarity, MatchError, MatchResult, MatchTransform,
};
use kdtree::{PhiCenter, PlanarIndex, PlanarNode};

/// Default quantization cell size for signature hashing.
pub const DEFAULT_CELL_SIZE: f64 = 1e-6;

/// Signatures whose chart coordinate has modulus within `4·cell` of the
/// chart boundary are additionally stored under their opposite-chart cell,
/// so a query probing only its own chart cannot miss a neighbor that landed
/// on the other side of `|φⁿ| = 1`.
const CHART_BAND_CELLS: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("collection is empty")]
    EmptyCollection,
    #[error("j set is empty")]
    EmptyJSet,
    #[error("polygon {id} has {found} vertices, index is built for n={expected}")]
    MixedSizes {
        expected: usize,
        found: usize,
        id: String,
    },
    #[error("j={j} outside [1, {}] for n={n}", n - 1)]
    BadJ { j: usize, n: usize },
    #[error("j={0} is not part of this index's j set")]
    JNotIndexed(usize),
    #[error("duplicate polygon id {0:?}")]
    DuplicateId(String),
    #[error("cell size must be positive and finite, got {0}")]
    BadCellSize(f64),
    #[error("query has {found} vertices, index holds n={expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("affine map unusable for candidate generation (alpha = 0)")]
    InvalidAffine,
    #[error("at least two j values are required for multi-signature filtering")]
    NeedsMultipleJ,
    #[error("unsupported index format version {0}")]
    UnsupportedVersion(u32),
    #[error("index integrity check failed: {0}")]
    Integrity(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Match(#[from] MatchError),
}

/// Euclidean form of the locus `{ξ : |ξ−ζ| = k·|1−ζ̄ξ|}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApollonianQueryCircle {
    Circle {
        center: Complex,
        radius: f64,
    },
    /// Degenerate case `k²|ζ|² = 1`: the locus is a straight line.
    Line,
}

/// The Apollonius circle of pseudo-hyperbolic radius `k` around `ζ`:
/// center `(1−k²)ζ / (1−k²|ζ|²)`, radius `k·|1−|ζ|²| / |1−k²|ζ|²|`.
/// For `ζ = ∞` the locus is the origin-centered circle `|ξ| = 1/k`.
pub fn pseudo_hyperbolic_circle(zeta: RiemannPoint, k: f64) -> ApollonianQueryCircle {
    match zeta {
        RiemannPoint::Infinity => ApollonianQueryCircle::Circle {
            center: Complex::new(0.0, 0.0),
            radius: if k > 0.0 { 1.0 / k } else { f64::INFINITY },
        },
        RiemannPoint::Finite(z) => {
            let t = 1.0 - k * k * z.norm_sqr();
            if t == 0.0 {
                return ApollonianQueryCircle::Line;
            }
            ApollonianQueryCircle::Circle {
                center: z * (1.0 - k * k) / t,
                radius: (k * (1.0 - z.norm_sqr()).abs() / t.abs()).abs(),
            }
        }
    }
}

/// Raw candidates plus verified matches of a single-polygon query.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub ids: Vec<String>,
    pub verified: Vec<MatchResult>,
    /// Quantized hash cells inspected to produce the candidates (0 for
    /// queries that go through the planar index instead).
    pub cell_probes: usize,
}

/// A verified pair correspondence sharing one affine transform.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMatch {
    pub first: MatchResult,
    pub second: MatchResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairCandidateSet {
    pub id_pairs: Vec<(String, String)>,
    pub verified: Vec<PairMatch>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct CellKey {
    chart: Chart,
    ix: i64,
    iy: i64,
}

fn quantize(point: SpherePoint, cell: f64) -> CellKey {
    CellKey {
        chart: point.chart,
        ix: (point.coord.re / cell).floor() as i64,
        iy: (point.coord.im / cell).floor() as i64,
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
struct SignatureTable {
    j: usize,
    cells: HashMap<CellKey, Vec<u32>>,
    infinity: Vec<u32>,
    undefined: Vec<u32>,
}

impl SignatureTable {
    fn insert(&mut self, slot: u32, value: SignatureValue, cell: f64) {
        match value {
            SignatureValue::Undefined => self.undefined.push(slot),
            SignatureValue::Point(sp) if sp.is_infinity() => self.infinity.push(slot),
            SignatureValue::Point(sp) => {
                self.cells.entry(quantize(sp, cell)).or_default().push(slot);
                if sp.coord.norm() >= 1.0 - CHART_BAND_CELLS * cell {
                    self.cells
                        .entry(quantize(sp.flipped(), cell))
                        .or_default()
                        .push(slot);
                }
            }
        }
    }
}

/// Immutable signature index over `m` polygons of a common vertex count.
#[derive(Debug, Clone)]
pub struct PolygonIndex {
    n: usize,
    j_set: Vec<usize>,
    cell_size: f64,
    polygons: Vec<Polygon>,
    /// φ_{n,j₀} per slot, cached for the planar and pair queries.
    phi_primary: Vec<InvariantValue>,
    tables: Vec<SignatureTable>,
    planar: PlanarIndex,
}

impl PolygonIndex {
    /// Builds hash tables for every `j` in `j_set` and a planar index over
    /// the finite primary φ values. Cost is O(m·n·|j_set|).
    pub fn build(
        collection: Vec<Polygon>,
        j_set: &[usize],
        cell_size: f64,
    ) -> Result<Self, IndexError> {
        if collection.is_empty() {
            return Err(IndexError::EmptyCollection);
        }
        if j_set.is_empty() {
            return Err(IndexError::EmptyJSet);
        }
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(IndexError::BadCellSize(cell_size));
        }
        let n = collection[0].len();
        for j in j_set {
            if *j < 1 || *j > n - 1 {
                return Err(IndexError::BadJ { j: *j, n });
            }
        }
        let mut seen = HashSet::new();
        for polygon in &collection {
            if polygon.len() != n {
                return Err(IndexError::MixedSizes {
                    expected: n,
                    found: polygon.len(),
                    id: polygon.id().to_string(),
                });
            }
            if !seen.insert(polygon.id().to_string()) {
                return Err(IndexError::DuplicateId(polygon.id().to_string()));
            }
        }

        let mut tables: Vec<SignatureTable> = j_set
            .iter()
            .map(|&j| SignatureTable {
                j,
                ..SignatureTable::default()
            })
            .collect();
        for (slot, polygon) in collection.iter().enumerate() {
            for (ti, &j) in j_set.iter().enumerate() {
                let sig = signature(polygon, j)?;
                tables[ti].insert(slot as u32, sig.value, cell_size);
            }
        }

        let j0 = j_set[0];
        let mut phi_primary = Vec::with_capacity(collection.len());
        let mut nodes = Vec::new();
        for (slot, polygon) in collection.iter().enumerate() {
            let phi = phi_nj(polygon, j0)?;
            if let InvariantValue::Finite(z) = phi {
                nodes.push(PlanarNode {
                    point: z,
                    slot: slot as u32,
                });
            }
            phi_primary.push(phi);
        }

        Ok(PolygonIndex {
            n,
            j_set: j_set.to_vec(),
            cell_size,
            polygons: collection,
            phi_primary,
            tables,
            planar: PlanarIndex::build(nodes),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j_set(&self) -> &[usize] {
        &self.j_set
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn len(&self) -> usize {
        self.polygons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn get(&self, id: &str) -> Option<&Polygon> {
        self.polygons.iter().find(|p| p.id() == id)
    }

    /// Bucket occupancy histogram per j: map from bucket size to the number
    /// of buckets of that size (special buckets excluded).
    pub fn occupancy_histogram(&self) -> Vec<(usize, HashMap<usize, usize>)> {
        self.tables
            .iter()
            .map(|t| {
                let mut hist = HashMap::new();
                for slots in t.cells.values() {
                    *hist.entry(slots.len()).or_insert(0) += 1;
                }
                (t.j, hist)
            })
            .collect()
    }

    fn check_size(&self, w: &Polygon) -> Result<(), IndexError> {
        if w.len() != self.n {
            return Err(IndexError::SizeMismatch {
                expected: self.n,
                found: w.len(),
            });
        }
        Ok(())
    }

    fn table(&self, j: usize) -> Result<&SignatureTable, IndexError> {
        self.tables
            .iter()
            .find(|t| t.j == j)
            .ok_or(IndexError::JNotIndexed(j))
    }

    /// Candidate slots for one j: contents of the 3×3 cell neighborhood of
    /// the query signature (plus the infinity bucket when that neighborhood
    /// covers the reciprocal-chart origin), or the undefined bucket for
    /// null-set queries. Returns `(sorted deduped slots, cell probes)`.
    fn hash_candidate_slots(&self, w: &Polygon, j: usize) -> Result<(Vec<u32>, usize), IndexError> {
        let table = self.table(j)?;
        let sig = signature(w, j)?;
        let mut slots: Vec<u32>;
        let mut probes = 0usize;
        match sig.value {
            SignatureValue::Undefined => {
                slots = table.undefined.clone();
            }
            SignatureValue::Point(sp) => {
                slots = Vec::new();
                let center = quantize(sp, self.cell_size);
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        probes += 1;
                        let key = CellKey {
                            chart: center.chart,
                            ix: center.ix.saturating_add(dx),
                            iy: center.iy.saturating_add(dy),
                        };
                        if let Some(found) = table.cells.get(&key) {
                            slots.extend_from_slice(found);
                        }
                    }
                }
                let covers_origin = (center.ix.saturating_sub(1)..=center.ix.saturating_add(1))
                    .contains(&0)
                    && (center.iy.saturating_sub(1)..=center.iy.saturating_add(1)).contains(&0);
                if center.chart == Chart::Reciprocal && covers_origin {
                    slots.extend_from_slice(&table.infinity);
                }
            }
        }
        slots.sort_unstable();
        slots.dedup();
        Ok((slots, probes))
    }

    /// Ids of the signature-hash candidates for one specific `j`.
    pub fn signature_candidates(&self, w: &Polygon, j: usize) -> Result<Vec<String>, IndexError> {
        self.check_size(w)?;
        let (slots, _) = self.hash_candidate_slots(w, j)?;
        Ok(self.ids_of(&slots))
    }

    fn ids_of(&self, slots: &[u32]) -> Vec<String> {
        slots
            .iter()
            .map(|&s| self.polygons[s as usize].id().to_string())
            .collect()
    }

    /// All stored polygons equal to `W` up to a similarity and a cyclic
    /// shift. Candidates come from the primary-j signature hash (constant
    /// probe count); each is verified exactly at tolerance `tol`.
    pub fn query_similarity(&self, w: &Polygon, tol: f64) -> Result<CandidateSet, IndexError> {
        self.check_size(w)?;
        let (slots, cell_probes) = self.hash_candidate_slots(w, self.j_set[0])?;
        let mut verified = Vec::new();
        for &slot in &slots {
            if let Some(m) = verify_similarity(w, &self.polygons[slot as usize], tol)? {
                verified.push(m);
            }
        }
        Ok(CandidateSet {
            ids: self.ids_of(&slots),
            verified,
            cell_probes,
        })
    }

    /// Intersection of the per-j signature candidates over the whole j set,
    /// then similarity verification. Requires `|j_set| ≥ 2`.
    pub fn multi_signature_filter(
        &self,
        w: &Polygon,
        tol: f64,
    ) -> Result<CandidateSet, IndexError> {
        if self.j_set.len() < 2 {
            return Err(IndexError::NeedsMultipleJ);
        }
        self.check_size(w)?;
        let mut cell_probes = 0usize;
        let mut intersection: Option<Vec<u32>> = None;
        for &j in &self.j_set {
            let (slots, probes) = self.hash_candidate_slots(w, j)?;
            cell_probes += probes;
            intersection = Some(match intersection {
                None => slots,
                Some(current) => intersect_sorted(&current, &slots),
            });
        }
        let slots = intersection.unwrap_or_default();
        let mut verified = Vec::new();
        for &slot in &slots {
            if let Some(m) = verify_similarity(w, &self.polygons[slot as usize], tol)? {
                verified.push(m);
            }
        }
        Ok(CandidateSet {
            ids: self.ids_of(&slots),
            verified,
            cell_probes,
        })
    }

    /// All stored `Z` with `W = f(Z)` for the known map `f`. Candidates are
    /// the stored φ values whose pseudo-hyperbolic distance to `φ(W)` is
    /// within `tol` of `|β/α|` (an annulus around the Apollonius circle),
    /// retrieved through the planar index; verification replays `f`.
    pub fn query_known_affine(
        &self,
        w: &Polygon,
        f: &AffineMap,
        tol: f64,
    ) -> Result<CandidateSet, IndexError> {
        self.check_size(w)?;
        let k = affine_ratio(f).map_err(|_| IndexError::InvalidAffine)?;
        let zeta = phi_nj(w, self.j_set[0])?;
        let slots = match zeta {
            // A null-set query can only match null-set polygons.
            InvariantValue::Undefined => self.table(self.j_set[0])?.undefined.clone(),
            InvariantValue::Infinity => {
                let mut slots = self.planar.annulus_slots(PhiCenter::Infinity, k, tol);
                if k.abs() <= tol {
                    slots.extend_from_slice(&self.table(self.j_set[0])?.infinity);
                }
                slots.sort_unstable();
                slots
            }
            InvariantValue::Finite(z) => {
                let mut slots = self.planar.annulus_slots(PhiCenter::Finite(z), k, tol);
                let d_inf = pseudo_hyperbolic_distance(InvariantValue::Infinity, zeta)?;
                if (d_inf - k).abs() <= tol {
                    slots.extend_from_slice(&self.table(self.j_set[0])?.infinity);
                }
                slots.sort_unstable();
                slots
            }
        };
        let mut verified = Vec::new();
        for &slot in &slots {
            if let Some(m) = verify_known_affine(w, &self.polygons[slot as usize], f, tol)? {
                verified.push(m);
            }
        }
        Ok(CandidateSet {
            ids: self.ids_of(&slots),
            verified,
            cell_probes: 0,
        })
    }

    /// All stored pairs `(Z, Z′)` with `W = f(Z)` and `W′ = f(Z′)` for one
    /// unknown affine `f`. For every slot the pseudo-hyperbolic distances
    /// `η = d(φ(Z), φ(W))` and `η′ = d(φ(Z), φ(W′))` are computed; pairs
    /// with `|η_ℓ − η′_{ℓ′}| ≤ tol` are found by quantized 1-D hashing of
    /// the η′ values with a 3-cell probe. Verification solves `f` from the
    /// first component and replays it on the second.
    pub fn query_pair(
        &self,
        w: &Polygon,
        w2: &Polygon,
        tol: f64,
    ) -> Result<PairCandidateSet, IndexError> {
        self.check_size(w)?;
        self.check_size(w2)?;
        let zeta = phi_nj(w, self.j_set[0])?;
        let zeta2 = phi_nj(w2, self.j_set[0])?;

        let pairs: Vec<(u32, u32)> = match (zeta, zeta2) {
            // Null-set queries pin their own side to the undefined bucket and
            // leave the other side unconstrained.
            (InvariantValue::Undefined, _) | (_, InvariantValue::Undefined) => {
                let undefined = &self.table(self.j_set[0])?.undefined;
                let all: Vec<u32> = (0..self.polygons.len() as u32).collect();
                let left: &[u32] = if zeta.is_undefined() { undefined } else { &all };
                let right: &[u32] = if zeta2.is_undefined() {
                    undefined
                } else {
                    &all
                };
                left.iter()
                    .flat_map(|&a| right.iter().map(move |&b| (a, b)))
                    .collect()
            }
            _ => {
                let eta = self.distance_profile(zeta)?;
                let eta2 = self.distance_profile(zeta2)?;
                pair_slots_by_eta(&eta, &eta2, tol)
            }
        };

        let mut id_pairs = Vec::with_capacity(pairs.len());
        let mut verified = Vec::new();
        for &(a, b) in &pairs {
            let za = &self.polygons[a as usize];
            let zb = &self.polygons[b as usize];
            id_pairs.push((za.id().to_string(), zb.id().to_string()));
            let first = match verify_affine(w, za, tol) {
                Ok(Some(m)) => m,
                Ok(None) | Err(MatchError::AllTriplesCollinear) => continue,
                Err(e) => return Err(e.into()),
            };
            let MatchTransform::Affine(f) = first.transform else {
                unreachable!()
            };
            if let Some(second) = verify_known_affine(w2, zb, &f, tol)? {
                verified.push(PairMatch { first, second });
            }
        }
        Ok(PairCandidateSet { id_pairs, verified })
    }

    /// η_ℓ = d(φ(Z_ℓ), ζ) per slot; `None` where φ(Z_ℓ) is undefined.
    fn distance_profile(&self, zeta: InvariantValue) -> Result<Vec<Option<f64>>, IndexError> {
        self.phi_primary
            .iter()
            .map(|&phi| match phi {
                InvariantValue::Undefined => Ok(None),
                other => Ok(Some(pseudo_hyperbolic_distance(other, zeta)?)),
            })
            .collect()
    }

    pub fn dump(&self) -> IndexDump {
        let tables = self
            .tables
            .iter()
            .map(|t| {
                let mut cells: Vec<CellDump> = t
                    .cells
                    .iter()
                    .map(|(key, slots)| {
                        let mut slots = slots.clone();
                        slots.sort_unstable();
                        CellDump {
                            chart: key.chart,
                            ix: key.ix,
                            iy: key.iy,
                            slots,
                        }
                    })
                    .collect();
                cells.sort_by_key(|c| (c.chart, c.ix, c.iy));
                TableDump {
                    j: t.j,
                    cells,
                    infinity: t.infinity.clone(),
                    undefined: t.undefined.clone(),
                }
            })
            .collect();
        IndexDump {
            format_version: FORMAT_VERSION,
            n: self.n,
            j_set: self.j_set.clone(),
            cell_size: self.cell_size,
            polygons: self
                .polygons
                .iter()
                .map(PolygonRecord::from_polygon)
                .collect(),
            tables,
            planar: PlanarDump {
                kind: if self.planar.is_tree() {
                    "kdtree"
                } else {
                    "scan"
                }
                .to_string(),
                nodes: self
                    .planar
                    .nodes()
                    .iter()
                    .map(|n| PlanarNodeDump {
                        phi: [n.point.re, n.point.im],
                        slot: n.slot,
                    })
                    .collect(),
            },
        }
    }

    /// Reconstructs an index from its dump and cross-checks a 1% sample of
    /// signatures and φ values against recomputation from the stored
    /// polygons (within 1e−12 on the sphere).
    pub fn from_dump(dump: IndexDump) -> Result<Self, IndexError> {
        if dump.format_version != FORMAT_VERSION {
            return Err(IndexError::UnsupportedVersion(dump.format_version));
        }
        if dump.j_set.is_empty() {
            return Err(IndexError::EmptyJSet);
        }
        if !(dump.cell_size.is_finite() && dump.cell_size > 0.0) {
            return Err(IndexError::BadCellSize(dump.cell_size));
        }
        let mut polygons = Vec::with_capacity(dump.polygons.len());
        let mut seen = HashSet::new();
        for record in &dump.polygons {
            let polygon = record.to_polygon()?;
            if polygon.len() != dump.n {
                return Err(IndexError::MixedSizes {
                    expected: dump.n,
                    found: polygon.len(),
                    id: polygon.id().to_string(),
                });
            }
            if !seen.insert(polygon.id().to_string()) {
                return Err(IndexError::DuplicateId(polygon.id().to_string()));
            }
            polygons.push(polygon);
        }
        if polygons.is_empty() {
            return Err(IndexError::EmptyCollection);
        }
        let m = polygons.len();
        for j in &dump.j_set {
            if *j < 1 || *j > dump.n - 1 {
                return Err(IndexError::BadJ { j: *j, n: dump.n });
            }
        }

        let mut tables = Vec::with_capacity(dump.tables.len());
        if dump.tables.len() != dump.j_set.len() {
            return Err(IndexError::Integrity(
                "table count differs from j set".into(),
            ));
        }
        for (table_dump, &j) in dump.tables.iter().zip(&dump.j_set) {
            if table_dump.j != j {
                return Err(IndexError::Integrity(
                    "table order differs from j set".into(),
                ));
            }
            let mut cells = HashMap::with_capacity(table_dump.cells.len());
            for cell in &table_dump.cells {
                check_slots(&cell.slots, m)?;
                let key = CellKey {
                    chart: cell.chart,
                    ix: cell.ix,
                    iy: cell.iy,
                };
                if cells.insert(key, cell.slots.clone()).is_some() {
                    return Err(IndexError::Integrity("duplicate cell in dump".into()));
                }
            }
            check_slots(&table_dump.infinity, m)?;
            check_slots(&table_dump.undefined, m)?;
            tables.push(SignatureTable {
                j,
                cells,
                infinity: table_dump.infinity.clone(),
                undefined: table_dump.undefined.clone(),
            });
        }

        let is_tree = match dump.planar.kind.as_str() {
            "kdtree" => true,
            "scan" => false,
            other => {
                return Err(IndexError::Integrity(format!(
                    "unknown planar kind {other:?}"
                )))
            }
        };
        let nodes: Vec<PlanarNode> = dump
            .planar
            .nodes
            .iter()
            .map(|n| PlanarNode {
                point: Complex::new(n.phi[0], n.phi[1]),
                slot: n.slot,
            })
            .collect();
        for node in &nodes {
            if node.slot as usize >= m {
                return Err(IndexError::Integrity("planar slot out of range".into()));
            }
        }

        let j0 = dump.j_set[0];
        let mut phi_primary = Vec::with_capacity(m);
        for polygon in &polygons {
            phi_primary.push(phi_nj(polygon, j0)?);
        }

        let planar = PlanarIndex::from_layout(is_tree, nodes)
            .ok_or_else(|| IndexError::Integrity("planar tree layout is inconsistent".into()))?;
        let index = PolygonIndex {
            n: dump.n,
            j_set: dump.j_set,
            cell_size: dump.cell_size,
            polygons,
            phi_primary,
            tables,
            planar,
        };
        index.integrity_sample()?;
        Ok(index)
    }

    /// Recomputes signatures and φ for every 100th polygon and checks them
    /// against the loaded tables and planar payload.
    fn integrity_sample(&self) -> Result<(), IndexError> {
        for slot in (0..self.polygons.len()).step_by(100) {
            let polygon = &self.polygons[slot];
            for table in &self.tables {
                let sig = signature(polygon, table.j)?;
                let ok = match sig.value {
                    SignatureValue::Undefined => table.undefined.contains(&(slot as u32)),
                    SignatureValue::Point(sp) if sp.is_infinity() => {
                        table.infinity.contains(&(slot as u32))
                    }
                    SignatureValue::Point(sp) => table
                        .cells
                        .get(&quantize(sp, self.cell_size))
                        .is_some_and(|slots| slots.contains(&(slot as u32))),
                };
                if !ok {
                    return Err(IndexError::Integrity(format!(
                        "polygon {:?} not found under its recomputed signature for j={}",
                        polygon.id(),
                        table.j
                    )));
                }
            }
            let phi = phi_nj(polygon, self.j_set[0])?;
            if let InvariantValue::Finite(z) = phi {
                let stored = self
                    .planar
                    .nodes()
                    .iter()
                    .find(|n| n.slot == slot as u32)
                    .ok_or_else(|| IndexError::Integrity("missing planar node".into()))?;
                let dev = chordal(
                    SpherePoint::from_complex(stored.point),
                    SpherePoint::from_complex(z),
                );
                if dev > 1e-12 {
                    return Err(IndexError::Integrity(format!(
                        "stored φ for {:?} deviates from recomputation by {dev:.3e}",
                        polygon.id()
                    )));
                }
            }
        }
        Ok(())
    }
}

fn check_slots(slots: &[u32], m: usize) -> Result<(), IndexError> {
    if slots.iter().any(|&s| s as usize >= m) {
        return Err(IndexError::Integrity("slot out of range".into()));
    }
    Ok(())
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Pairs `(ℓ, ℓ′)` with `|η_ℓ − η′_{ℓ′}| ≤ tol`, by hashing the η′ values
/// into 1-D cells of width `tol` and probing the 3 neighboring cells.
fn pair_slots_by_eta(eta: &[Option<f64>], eta2: &[Option<f64>], tol: f64) -> Vec<(u32, u32)> {
    let mut bins: HashMap<i64, Vec<u32>> = HashMap::new();
    let mut infinite: Vec<u32> = Vec::new();
    for (slot, value) in eta2.iter().enumerate() {
        match value {
            None => {}
            Some(v) if v.is_infinite() => infinite.push(slot as u32),
            Some(v) => bins
                .entry((v / tol).floor() as i64)
                .or_default()
                .push(slot as u32),
        }
    }
    let mut pairs = Vec::new();
    for (slot, value) in eta.iter().enumerate() {
        match value {
            None => {}
            Some(v) if v.is_infinite() => {
                pairs.extend(infinite.iter().map(|&b| (slot as u32, b)));
            }
            Some(v) => {
                let cell = (v / tol).floor() as i64;
                for probe in [cell.saturating_sub(1), cell, cell.saturating_add(1)] {
                    if let Some(members) = bins.get(&probe) {
                        for &b in members {
                            if (v - eta2[b as usize].unwrap()).abs() <= tol {
                                pairs.push((slot as u32, b));
                            }
                        }
                    }
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}
