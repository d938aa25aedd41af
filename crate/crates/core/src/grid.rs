//! Grid data model shared by all reconstruction algorithms: scalar grids,
//! observed/missing region masks, and patch windows.

use crate::error::{Error, Result};

/// Sentinel stored in cells that have no value yet. Reads of such cells
/// through [`ScalarGrid::observed_value`] fail rather than leaking the
/// placeholder into arithmetic.
pub const SENTINEL: f64 = f64::MIN;

/// A grid cell address, `row` in `0..rows`, `col` in `0..cols`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }

    /// Continuous coordinates of the cell center, x along columns, y along rows.
    pub fn center(&self) -> (f64, f64) {
        (self.col as f64 + 0.5, self.row as f64 + 0.5)
    }
}

/// Unit tag carried by a [`ScalarGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Dbm,
    Normalized,
    Unitless,
}

impl Units {
    pub fn as_str(&self) -> &'static str {
        match self {
            Units::Dbm => "dBm",
            Units::Normalized => "normalized",
            Units::Unitless => "unitless",
        }
    }

    pub fn parse(s: &str) -> Option<Units> {
        match s {
            "dBm" => Some(Units::Dbm),
            "normalized" => Some(Units::Normalized),
            "unitless" => Some(Units::Unitless),
            _ => None,
        }
    }
}

/// Row-major grid of real values. Carrier for radiomaps, depth maps,
/// templates, and perturbations.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    units: Units,
}

impl ScalarGrid {
    pub fn new(rows: usize, cols: usize, fill: f64, units: Units) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyGrid { rows, cols });
        }
        Ok(ScalarGrid {
            rows,
            cols,
            data: vec![fill; rows * cols],
            units,
        })
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<f64>, units: Units) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyGrid { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: data.len() / cols.max(1),
                cols,
            });
        }
        Ok(ScalarGrid {
            rows,
            cols,
            data,
            units,
        })
    }

    /// Grid with every cell set to the sentinel.
    pub fn sentinel_grid(rows: usize, cols: usize, units: Units) -> Result<Self> {
        Self::new(rows, cols, SENTINEL, units)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn set_units(&mut self, units: Units) {
        self.units = units;
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn index(&self, cell: Cell) -> usize {
        debug_assert!(cell.row < self.rows && cell.col < self.cols);
        cell.row * self.cols + cell.col
    }

    #[inline]
    pub fn in_bounds(&self, row: isize, col: isize) -> bool {
        row >= 0 && col >= 0 && (row as usize) < self.rows && (col as usize) < self.cols
    }

    #[inline]
    pub fn get(&self, cell: Cell) -> f64 {
        self.data[self.index(cell)]
    }

    #[inline]
    pub fn set(&mut self, cell: Cell, value: f64) {
        let idx = self.index(cell);
        self.data[idx] = value;
    }

    #[inline]
    pub fn is_sentinel(&self, cell: Cell) -> bool {
        self.get(cell) == SENTINEL
    }

    /// Value of a cell that the mask claims is observed. Reading a missing
    /// cell is an error: placeholders must never enter computations.
    pub fn observed_value(&self, mask: &RegionMask, cell: Cell) -> Result<f64> {
        if !mask.is_observed(cell) {
            return Err(Error::UnreconstructedRead {
                row: cell.row,
                col: cell.col,
            });
        }
        Ok(self.get(cell))
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let cols = self.cols;
        (0..self.rows).flat_map(move |r| (0..cols).map(move |c| Cell::new(r, c)))
    }

    /// Check dims against expected counts.
    pub fn same_dims(&self, rows: usize, cols: usize) -> Result<()> {
        if self.rows != rows || self.cols != cols {
            return Err(Error::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    /// Verify every cell holds a finite, non-sentinel value.
    pub fn check_finite(&self) -> Result<()> {
        for cell in self.cells() {
            let v = self.get(cell);
            if !v.is_finite() || v == SENTINEL {
                return Err(Error::NonFinite {
                    row: cell.row,
                    col: cell.col,
                });
            }
        }
        Ok(())
    }
}

/// Boolean grid splitting the map into observed cells and the
/// missing region to reconstruct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionMask {
    rows: usize,
    cols: usize,
    observed: Vec<bool>,
}

impl RegionMask {
    pub fn new(rows: usize, cols: usize, observed: Vec<bool>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyGrid { rows, cols });
        }
        if observed.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: observed.len() / cols.max(1),
                cols,
            });
        }
        Ok(RegionMask {
            rows,
            cols,
            observed,
        })
    }

    pub fn all_observed(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![true; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn index(&self, cell: Cell) -> usize {
        debug_assert!(cell.row < self.rows && cell.col < self.cols);
        cell.row * self.cols + cell.col
    }

    #[inline]
    pub fn in_bounds(&self, row: isize, col: isize) -> bool {
        row >= 0 && col >= 0 && (row as usize) < self.rows && (col as usize) < self.cols
    }

    #[inline]
    pub fn is_observed(&self, cell: Cell) -> bool {
        self.observed[self.index(cell)]
    }

    #[inline]
    pub fn is_missing(&self, cell: Cell) -> bool {
        !self.is_observed(cell)
    }

    pub fn set_observed(&mut self, cell: Cell, value: bool) {
        let idx = self.index(cell);
        self.observed[idx] = value;
    }

    pub fn observed_count(&self) -> usize {
        self.observed.iter().filter(|&&o| o).count()
    }

    pub fn missing_count(&self) -> usize {
        self.observed.len() - self.observed_count()
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let cols = self.cols;
        (0..self.rows).flat_map(move |r| (0..cols).map(move |c| Cell::new(r, c)))
    }

    pub fn missing_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells().filter(move |&c| self.is_missing(c))
    }

    pub fn observed_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells().filter(move |&c| self.is_observed(c))
    }

    /// Validity for inpainting inputs: both regions non-empty.
    pub fn check_inpaintable(&self) -> Result<()> {
        if self.observed_count() == 0 {
            return Err(Error::EmptyObserved);
        }
        if self.missing_count() == 0 {
            return Err(Error::EmptyMissing);
        }
        Ok(())
    }

    fn matches_grid(&self, grid: &ScalarGrid) -> Result<()> {
        grid.same_dims(self.rows, self.cols)
    }
}

/// Missing-side boundary: the missing cells with at least one observed
/// 8-neighbor, in row-major order. Empty iff the missing region is empty.
pub fn boundary(mask: &RegionMask) -> Vec<Cell> {
    let mut front = Vec::new();
    for cell in mask.cells() {
        if mask.is_observed(cell) {
            continue;
        }
        let r = cell.row as isize;
        let c = cell.col as isize;
        let mut touches = false;
        'scan: for dr in -1..=1 {
            for dc in -1..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                if mask.in_bounds(r + dr, c + dc)
                    && mask.is_observed(Cell::new((r + dr) as usize, (c + dc) as usize))
                {
                    touches = true;
                    break 'scan;
                }
            }
        }
        if touches {
            front.push(cell);
        }
    }
    front
}

/// One cell of a patch window: its map position, its value, and whether the
/// mask marks it observed.
#[derive(Debug, Clone, Copy)]
pub struct PatchCell {
    /// Offset within the window, row-major `0..n*n`.
    pub offset: usize,
    pub cell: Cell,
    pub value: f64,
    pub observed: bool,
}

/// An `n x n` window centered on a cell, clipped to the grid bounds.
/// Out-of-bounds offsets are recorded as invalid rather than silently dropped.
#[derive(Debug, Clone)]
pub struct Patch {
    pub center: Cell,
    pub size: usize,
    /// `size*size` entries; `None` marks an out-of-bounds offset.
    entries: Vec<Option<PatchCell>>,
}

impl Patch {
    pub fn half(&self) -> usize {
        self.size / 2
    }

    /// In-bounds cells of the window.
    pub fn valid_cells(&self) -> impl Iterator<Item = &PatchCell> {
        self.entries.iter().flatten()
    }

    pub fn entry(&self, offset: usize) -> Option<&PatchCell> {
        self.entries[offset].as_ref()
    }

    pub fn observed_count(&self) -> usize {
        self.valid_cells().filter(|pc| pc.observed).count()
    }

    pub fn missing_count(&self) -> usize {
        self.valid_cells().filter(|pc| !pc.observed).count()
    }
}

/// Extract the `n x n` window centered at `center` with per-cell observed flags.
pub fn extract_patch(
    grid: &ScalarGrid,
    mask: &RegionMask,
    center: Cell,
    n: usize,
) -> Result<Patch> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidPatchSize(n));
    }
    mask.matches_grid(grid)?;
    if center.row >= grid.rows() || center.col >= grid.cols() {
        return Err(Error::OutOfBounds {
            row: center.row,
            col: center.col,
            rows: grid.rows(),
            cols: grid.cols(),
        });
    }
    let h = (n / 2) as isize;
    let mut entries = Vec::with_capacity(n * n);
    let mut offset = 0;
    for dr in -h..=h {
        for dc in -h..=h {
            let r = center.row as isize + dr;
            let c = center.col as isize + dc;
            if grid.in_bounds(r, c) {
                let cell = Cell::new(r as usize, c as usize);
                entries.push(Some(PatchCell {
                    offset,
                    cell,
                    value: grid.get(cell),
                    observed: mask.is_observed(cell),
                }));
            } else {
                entries.push(None);
            }
            offset += 1;
        }
    }
    Ok(Patch {
        center,
        size: n,
        entries,
    })
}

/// Inverse parameters of a min-max normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormParams {
    pub min: f64,
    pub span: f64,
    pub original_units: Units,
}

/// Min-max normalize the observed cells to `[0, 1]`; missing cells keep the
/// sentinel. Fails on a constant observed region.
pub fn normalize(grid: &ScalarGrid, mask: &RegionMask) -> Result<(ScalarGrid, NormParams)> {
    grid.same_dims(mask.rows(), mask.cols())?;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for cell in mask.observed_cells() {
        let v = grid.get(cell);
        min = min.min(v);
        max = max.max(v);
    }
    if !min.is_finite() {
        return Err(Error::EmptyObserved);
    }
    let span = max - min;
    if span == 0.0 {
        return Err(Error::DegenerateScale);
    }
    let mut out = grid.clone();
    out.set_units(Units::Normalized);
    for cell in grid.cells() {
        if mask.is_observed(cell) {
            out.set(cell, (grid.get(cell) - min) / span);
        } else {
            out.set(cell, SENTINEL);
        }
    }
    Ok((
        out,
        NormParams {
            min,
            span,
            original_units: grid.units(),
        },
    ))
}

/// Undo [`normalize`]. Sentinel cells stay sentinel.
pub fn denormalize(grid: &ScalarGrid, params: &NormParams) -> ScalarGrid {
    let mut out = grid.clone();
    out.set_units(params.original_units);
    for cell in grid.cells() {
        let v = grid.get(cell);
        if v != SENTINEL {
            out.set(cell, v * params.span + params.min);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_with_block(
        rows: usize,
        cols: usize,
        r0: usize,
        c0: usize,
        h: usize,
        w: usize,
    ) -> RegionMask {
        let mut m = RegionMask::all_observed(rows, cols).unwrap();
        for r in r0..r0 + h {
            for c in c0..c0 + w {
                m.set_observed(Cell::new(r, c), false);
            }
        }
        m
    }

    #[test]
    fn boundary_of_full_observed_mask_is_empty() {
        let m = RegionMask::all_observed(5, 5).unwrap();
        assert!(boundary(&m).is_empty());
    }

    #[test]
    fn boundary_of_single_missing_cell() {
        let m = mask_with_block(5, 5, 2, 2, 1, 1);
        assert_eq!(boundary(&m), vec![Cell::new(2, 2)]);
    }

    #[test]
    fn boundary_of_centered_block_is_its_perimeter() {
        // 8x8 mask, missing 4x4 block at (2,2): front = 12 perimeter cells.
        let m = mask_with_block(8, 8, 2, 2, 4, 4);
        let got = boundary(&m);
        let mut expected = Vec::new();
        for r in 2..6 {
            for c in 2..6 {
                if r == 2 || r == 5 || c == 2 || c == 5 {
                    expected.push(Cell::new(r, c));
                }
            }
        }
        assert_eq!(got.len(), 12);
        assert_eq!(got, expected);
        assert!(!got.contains(&Cell::new(3, 3)));
    }

    #[test]
    fn boundary_cells_are_missing_and_touch_observed() {
        let m = mask_with_block(16, 16, 4, 5, 6, 7);
        for cell in boundary(&m) {
            assert!(m.is_missing(cell));
            let mut touches = false;
            for dr in -1isize..=1 {
                for dc in -1isize..=1 {
                    let (r, c) = (cell.row as isize + dr, cell.col as isize + dc);
                    if (dr != 0 || dc != 0) && m.in_bounds(r, c) {
                        touches |= m.is_observed(Cell::new(r as usize, c as usize));
                    }
                }
            }
            assert!(touches);
        }
    }

    #[test]
    fn extract_patch_rejects_even_size() {
        let g = ScalarGrid::new(5, 5, 0.0, Units::Unitless).unwrap();
        let m = RegionMask::all_observed(5, 5).unwrap();
        assert!(matches!(
            extract_patch(&g, &m, Cell::new(2, 2), 4),
            Err(Error::InvalidPatchSize(4))
        ));
    }

    #[test]
    fn corner_patch_clips_to_four_cells() {
        let g = ScalarGrid::new(5, 5, 1.0, Units::Unitless).unwrap();
        let m = RegionMask::all_observed(5, 5).unwrap();
        let p = extract_patch(&g, &m, Cell::new(0, 0), 3).unwrap();
        assert_eq!(p.valid_cells().count(), 4);
        assert_eq!(p.observed_count(), 4);
    }

    #[test]
    fn interior_patch_fully_observed() {
        let g = ScalarGrid::new(7, 7, 1.0, Units::Unitless).unwrap();
        let m = RegionMask::all_observed(7, 7).unwrap();
        let p = extract_patch(&g, &m, Cell::new(3, 3), 3).unwrap();
        assert_eq!(p.observed_count(), 9);
        assert_eq!(p.missing_count(), 0);
    }

    #[test]
    fn patch_observed_count_matches_cell_scan() {
        let g = ScalarGrid::new(9, 9, 2.5, Units::Unitless).unwrap();
        let m = mask_with_block(9, 9, 3, 3, 4, 4);
        let center = Cell::new(3, 3);
        let p = extract_patch(&g, &m, center, 5).unwrap();
        let mut count = 0;
        for dr in -2isize..=2 {
            for dc in -2isize..=2 {
                let (r, c) = (center.row as isize + dr, center.col as isize + dc);
                if m.in_bounds(r, c) && m.is_observed(Cell::new(r as usize, c as usize)) {
                    count += 1;
                }
            }
        }
        assert_eq!(p.observed_count(), count);
    }

    #[test]
    fn normalize_maps_to_unit_interval_with_exact_params() {
        let data: Vec<f64> = (0..=10).map(|v| v as f64).collect();
        let g = ScalarGrid::from_data(1, 11, data, Units::Dbm).unwrap();
        let m = RegionMask::all_observed(1, 11).unwrap();
        let (n, p) = normalize(&g, &m).unwrap();
        assert_eq!(p.min, 0.0);
        assert_eq!(p.span, 10.0);
        assert_eq!(n.get(Cell::new(0, 0)), 0.0);
        assert_eq!(n.get(Cell::new(0, 10)), 1.0);
        assert_eq!(n.get(Cell::new(0, 5)), 0.5);
    }

    #[test]
    fn normalize_roundtrip_is_identity_on_observed() {
        let data = vec![-93.25, -41.0, 3.75, -60.5, -77.125, -12.0];
        let g = ScalarGrid::from_data(2, 3, data.clone(), Units::Dbm).unwrap();
        let m = RegionMask::all_observed(2, 3).unwrap();
        let (n, p) = normalize(&g, &m).unwrap();
        let back = denormalize(&n, &p);
        for (cell, orig) in g.cells().zip(data) {
            let rel = (back.get(cell) - orig).abs() / orig.abs().max(1.0);
            assert!(rel < 1e-12);
        }
        assert_eq!(back.units(), Units::Dbm);
    }

    #[test]
    fn normalize_ignores_missing_placeholders() {
        let mut g = ScalarGrid::new(4, 4, 5.0, Units::Dbm).unwrap();
        g.set(Cell::new(0, 0), 1.0);
        g.set(Cell::new(3, 3), 9.0);
        let mut m = RegionMask::all_observed(4, 4).unwrap();
        m.set_observed(Cell::new(1, 1), false);
        g.set(Cell::new(1, 1), 1e9);
        let (_, p) = normalize(&g, &m).unwrap();
        // Oracle: scan restricted to observed cells.
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for cell in m.observed_cells() {
            lo = lo.min(g.get(cell));
            hi = hi.max(g.get(cell));
        }
        assert_eq!(p.min, lo);
        assert_eq!(p.span, hi - lo);
        assert_eq!(p.min, 1.0);
        assert_eq!(p.span, 8.0);
    }

    #[test]
    fn normalize_rejects_constant_grid() {
        let g = ScalarGrid::new(3, 3, 7.0, Units::Dbm).unwrap();
        let m = RegionMask::all_observed(3, 3).unwrap();
        assert!(matches!(normalize(&g, &m), Err(Error::DegenerateScale)));
    }

    #[test]
    fn observed_value_rejects_missing_cells() {
        let g = ScalarGrid::new(3, 3, 0.0, Units::Dbm).unwrap();
        let mut m = RegionMask::all_observed(3, 3).unwrap();
        m.set_observed(Cell::new(1, 1), false);
        assert!(g.observed_value(&m, Cell::new(0, 0)).is_ok());
        assert!(matches!(
            g.observed_value(&m, Cell::new(1, 1)),
            Err(Error::UnreconstructedRead { row: 1, col: 1 })
        ));
    }
}
