//! Version-tagged structural dump of a [`PolygonIndex`](super::PolygonIndex).
//!
//! The dump carries every field of the index — stored polygons, per-j
//! quantized signature tables and the planar index payload — in a
//! deterministic order, so serializing it twice yields identical bytes and
//! reloading reproduces identical query results. Signatures remain
//! re-derivable from the stored polygons; loading cross-checks a sample.

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use crate::geometry::{GeometryError, Polygon};
use crate::invariants::Chart;

pub const FORMAT_VERSION: u32 = 1;

/// Wire form of one polygon: an id and `[x, y]` vertex pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonRecord {
    pub id: String,
    pub vertices: Vec<[f64; 2]>,
}

impl PolygonRecord {
    pub fn from_polygon(polygon: &Polygon) -> Self {
        PolygonRecord {
            id: polygon.id().to_string(),
            vertices: polygon.vertices().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_polygon(&self) -> Result<Polygon, GeometryError> {
        let vertices = self
            .vertices
            .iter()
            .map(|&[x, y]| Complex::new(x, y))
            .collect();
        Polygon::new(self.id.clone(), vertices)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDump {
    pub chart: Chart,
    pub ix: i64,
    pub iy: i64,
    pub slots: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDump {
    pub j: usize,
    pub cells: Vec<CellDump>,
    pub infinity: Vec<u32>,
    pub undefined: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarNodeDump {
    pub phi: [f64; 2],
    pub slot: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarDump {
    /// `"kdtree"` (array encodes the balanced tree layout) or `"scan"`.
    pub kind: String,
    pub nodes: Vec<PlanarNodeDump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexDump {
    pub format_version: u32,
    pub n: usize,
    pub j_set: Vec<usize>,
    pub cell_size: f64,
    pub polygons: Vec<PolygonRecord>,
    pub tables: Vec<TableDump>,
    pub planar: PlanarDump,
}
