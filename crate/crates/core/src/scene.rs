//! Scene description: building landscape, grid geometry, transmitters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Cell;

/// A continuous point in cell coordinates: `x` runs along columns,
/// `y` along rows. The center of cell `(r, c)` is `(c + 0.5, r + 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// Log-distance path loss coefficients `r = theta - epsilon * log10(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdplParams {
    pub theta: f64,
    pub epsilon: f64,
}

/// A transmitter: continuous position in cell coordinates, transmit power,
/// and optional pre-fitted path loss coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transmitter {
    pub position: Point,
    pub power_dbm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ldpl: Option<LdplParams>,
}

/// Landscape and radio geometry of the mapped area.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    rows: usize,
    cols: usize,
    buildings: Vec<bool>,
    pub cell_size_m: f64,
    pub transmitters: Vec<Transmitter>,
}

impl Scene {
    pub fn new(
        rows: usize,
        cols: usize,
        buildings: Vec<bool>,
        cell_size_m: f64,
        transmitters: Vec<Transmitter>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyGrid { rows, cols });
        }
        if buildings.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: buildings.len() / cols.max(1),
                cols,
            });
        }
        if !(cell_size_m > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "cell size must be positive, got {cell_size_m}"
            )));
        }
        for (i, tx) in transmitters.iter().enumerate() {
            if !(tx.position.x >= 0.0
                && tx.position.x <= cols as f64
                && tx.position.y >= 0.0
                && tx.position.y <= rows as f64)
            {
                return Err(Error::InvalidScenario(format!(
                    "transmitter {i} at ({}, {}) outside {rows}x{cols} grid",
                    tx.position.x, tx.position.y
                )));
            }
        }
        Ok(Scene {
            rows,
            cols,
            buildings,
            cell_size_m,
            transmitters,
        })
    }

    /// Scene with no buildings.
    pub fn open(rows: usize, cols: usize, cell_size_m: f64, transmitters: Vec<Transmitter>) -> Result<Self> {
        Self::new(rows, cols, vec![false; rows * cols], cell_size_m, transmitters)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_building(&self, cell: Cell) -> bool {
        debug_assert!(cell.row < self.rows && cell.col < self.cols);
        self.buildings[cell.row * self.cols + cell.col]
    }

    pub fn set_building(&mut self, cell: Cell, value: bool) {
        let idx = cell.row * self.cols + cell.col;
        self.buildings[idx] = value;
    }

    pub fn buildings(&self) -> &[bool] {
        &self.buildings
    }

    /// Landscape as 0/1 values, row-major. Input signal for segmentation and
    /// the landscape term of exemplar similarity.
    pub fn landscape_values(&self) -> Vec<f64> {
        self.buildings.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    pub fn tx(&self, index: usize) -> &Transmitter {
        &self.transmitters[index]
    }

    pub fn tx_count(&self) -> usize {
        self.transmitters.len()
    }

    /// Distance in meters from transmitter `tx_index` to the center of `cell`,
    /// clamped below at half a cell.
    pub fn tx_distance_m(&self, tx_index: usize, cell: Cell) -> f64 {
        let (x, y) = cell.center();
        let d_cells = self.transmitters[tx_index].position.distance(Point::new(x, y));
        (d_cells * self.cell_size_m).max(0.5 * self.cell_size_m)
    }

    pub fn require_transmitters(&self) -> Result<()> {
        if self.transmitters.is_empty() {
            return Err(Error::InvalidScenario(
                "propagation-aware methods need at least one transmitter".into(),
            ));
        }
        Ok(())
    }
}

/// Serialized form of [`Scene`]: buildings as strings of `0`/`1` per row.
#[derive(Debug, Serialize, Deserialize)]
pub struct SceneDoc {
    pub rows: usize,
    pub cols: usize,
    pub cell_size_m: f64,
    pub buildings: Vec<String>,
    pub transmitters: Vec<Transmitter>,
}

impl Scene {
    pub fn to_doc(&self) -> SceneDoc {
        let buildings = (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| if self.buildings[r * self.cols + c] { '1' } else { '0' })
                    .collect()
            })
            .collect();
        SceneDoc {
            rows: self.rows,
            cols: self.cols,
            cell_size_m: self.cell_size_m,
            buildings,
            transmitters: self.transmitters.clone(),
        }
    }

    pub fn from_doc(doc: SceneDoc) -> Result<Self> {
        if doc.buildings.len() != doc.rows {
            return Err(Error::InvalidScenario(format!(
                "expected {} building rows, got {}",
                doc.rows,
                doc.buildings.len()
            )));
        }
        let mut buildings = Vec::with_capacity(doc.rows * doc.cols);
        for (r, line) in doc.buildings.iter().enumerate() {
            if line.chars().count() != doc.cols {
                return Err(Error::InvalidScenario(format!(
                    "building row {r} has {} cells, expected {}",
                    line.chars().count(),
                    doc.cols
                )));
            }
            for ch in line.chars() {
                match ch {
                    '0' => buildings.push(false),
                    '1' => buildings.push(true),
                    other => {
                        return Err(Error::InvalidScenario(format!(
                            "building row {r}: invalid char {other:?}"
                        )))
                    }
                }
            }
        }
        Scene::new(doc.rows, doc.cols, buildings, doc.cell_size_m, doc.transmitters)
    }
}
