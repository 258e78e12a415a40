//! Uniform-grid spatial index with counting-sort bucket storage.
//!
//! Cells are `cell_size`-wide squares; a point lands in the bucket at
//! `floor(coordinate / cell_size)` componentwise. Buckets are stored
//! CSR-style (offsets plus a flat id array) over the occupied bounding
//! box, so construction is O(n) with no per-bucket allocation and query
//! results never depend on hash iteration order.

use super::{Point2, PppSample};
use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone)]
pub struct GridIndex {
    cell_size: f64,
    n_points: u32,
    min_cell: (i64, i64),
    dims: (u32, u32),
    offsets: Vec<u32>,
    ids: Vec<u32>,
}

impl GridIndex {
    /// Index `points` with the given cell size. The cell size should match
    /// the interaction radius of the calling computation so neighborhood
    /// scans touch O(1) expected points per cell.
    pub fn build(points: &[Point2], cell_size: f64) -> Result<GridIndex> {
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(Error::parameter(format!(
                "grid cell size must be positive and finite, got {cell_size}"
            )));
        }
        if points.is_empty() {
            return Ok(GridIndex {
                cell_size,
                n_points: 0,
                min_cell: (0, 0),
                dims: (0, 0),
                offsets: vec![0],
                ids: Vec::new(),
            });
        }
        let cells: Vec<(i64, i64)> = points
            .iter()
            .map(|p| ((p.x / cell_size).floor() as i64, (p.y / cell_size).floor() as i64))
            .collect();
        let min_cx = cells.iter().map(|c| c.0).min().unwrap();
        let max_cx = cells.iter().map(|c| c.0).max().unwrap();
        let min_cy = cells.iter().map(|c| c.1).min().unwrap();
        let max_cy = cells.iter().map(|c| c.1).max().unwrap();
        let nx = (max_cx - min_cx + 1) as u64;
        let ny = (max_cy - min_cy + 1) as u64;
        if nx.saturating_mul(ny) > (1u64 << 28) {
            return Err(Error::parameter(format!(
                "grid of {nx} x {ny} cells is too fine for the data extent; increase cell size"
            )));
        }
        let n_cells = (nx * ny) as usize;
        let mut counts = vec![0u32; n_cells + 1];
        let flat = |c: (i64, i64)| -> usize {
            ((c.1 - min_cy) as usize) * nx as usize + (c.0 - min_cx) as usize
        };
        for c in &cells {
            counts[flat(*c) + 1] += 1;
        }
        for i in 0..n_cells {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut cursor = counts;
        let mut ids = vec![0u32; points.len()];
        for (id, c) in cells.iter().enumerate() {
            let slot = cursor[flat(*c)] as usize;
            ids[slot] = id as u32;
            cursor[flat(*c)] += 1;
        }
        Ok(GridIndex {
            cell_size,
            n_points: points.len() as u32,
            min_cell: (min_cx, min_cy),
            dims: (nx as u32, ny as u32),
            offsets,
            ids,
        })
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn len(&self) -> usize {
        self.n_points as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    /// Point ids stored in the bucket at integer cell coordinates.
    pub fn bucket(&self, cell: (i64, i64)) -> &[u32] {
        if self.n_points == 0 {
            return &[];
        }
        let (cx, cy) = cell;
        if cx < self.min_cell.0
            || cy < self.min_cell.1
            || cx >= self.min_cell.0 + self.dims.0 as i64
            || cy >= self.min_cell.1 + self.dims.1 as i64
        {
            return &[];
        }
        let idx =
            ((cy - self.min_cell.1) as usize) * self.dims.0 as usize + (cx - self.min_cell.0) as usize;
        let lo = self.offsets[idx] as usize;
        let hi = self.offsets[idx + 1] as usize;
        &self.ids[lo..hi]
    }

    fn cell_of(&self, p: Point2) -> (i64, i64) {
        (
            (p.x / self.cell_size).floor() as i64,
            (p.y / self.cell_size).floor() as i64,
        )
    }

    /// Nearest squared distance from `query` to an indexed point, or +inf
    /// when the index is empty. Expanding-ring search; exact.
    pub fn nearest_dist_sq(&self, query: Point2, points: &[Point2]) -> f64 {
        if self.n_points == 0 {
            return f64::INFINITY;
        }
        let (qx, qy) = self.cell_of(query);
        // Farthest occupied cell bounds the search.
        let max_ring = {
            let dx = (qx - self.min_cell.0)
                .abs()
                .max((self.min_cell.0 + self.dims.0 as i64 - 1 - qx).abs());
            let dy = (qy - self.min_cell.1)
                .abs()
                .max((self.min_cell.1 + self.dims.1 as i64 - 1 - qy).abs());
            dx.max(dy)
        };
        let mut best = f64::INFINITY;
        for k in 0..=max_ring {
            if k > 0 {
                // Ring k cells hold no point closer than (k-1) * cell_size.
                let reach = (k - 1) as f64 * self.cell_size;
                if best <= reach * reach {
                    break;
                }
            }
            self.for_ring(qx, qy, k, |ids| {
                for &id in ids {
                    let d2 = query.dist_sq(points[id as usize]);
                    if d2 < best {
                        best = d2;
                    }
                }
            });
        }
        best
    }

    /// Visit every point in a cell intersecting the closed disc of the
    /// given radius about `query`. Callers apply their own exact predicate
    /// to each candidate; no candidate within the radius is missed.
    pub fn for_each_in_disc_cells(&self, query: Point2, radius: f64, mut visit: impl FnMut(u32)) {
        if self.n_points == 0 || !(radius >= 0.0) {
            return;
        }
        if !radius.is_finite() {
            for &id in &self.ids {
                visit(id);
            }
            return;
        }
        let lo_x = ((query.x - radius) / self.cell_size).floor() as i64;
        let hi_x = ((query.x + radius) / self.cell_size).floor() as i64;
        let lo_y = ((query.y - radius) / self.cell_size).floor() as i64;
        let hi_y = ((query.y + radius) / self.cell_size).floor() as i64;
        for cy in lo_y.max(self.min_cell.1)..=hi_y.min(self.min_cell.1 + self.dims.1 as i64 - 1) {
            for cx in lo_x.max(self.min_cell.0)..=hi_x.min(self.min_cell.0 + self.dims.0 as i64 - 1)
            {
                for &id in self.bucket((cx, cy)) {
                    visit(id);
                }
            }
        }
    }

    /// Expanding-ring scan from `query`. Before ring `k >= 1` is visited,
    /// `should_stop` is consulted with the minimum distance any unseen
    /// point can still have; returning true ends the scan.
    pub fn scan_expanding(
        &self,
        query: Point2,
        mut should_stop: impl FnMut(f64) -> bool,
        mut visit: impl FnMut(u32),
    ) {
        if self.n_points == 0 {
            return;
        }
        let (qx, qy) = self.cell_of(query);
        let max_ring = {
            let dx = (qx - self.min_cell.0)
                .abs()
                .max((self.min_cell.0 + self.dims.0 as i64 - 1 - qx).abs());
            let dy = (qy - self.min_cell.1)
                .abs()
                .max((self.min_cell.1 + self.dims.1 as i64 - 1 - qy).abs());
            dx.max(dy)
        };
        for k in 0..=max_ring {
            if k > 0 && should_stop((k - 1) as f64 * self.cell_size) {
                break;
            }
            self.for_ring(qx, qy, k, |ids| {
                for &id in ids {
                    visit(id);
                }
            });
        }
    }

    fn for_ring(&self, cx: i64, cy: i64, k: i64, mut visit: impl FnMut(&[u32])) {
        let x_min = self.min_cell.0;
        let y_min = self.min_cell.1;
        let x_max = x_min + self.dims.0 as i64 - 1;
        let y_max = y_min + self.dims.1 as i64 - 1;
        if k == 0 {
            visit(self.bucket((cx, cy)));
            return;
        }
        for y in [cy - k, cy + k] {
            if y < y_min || y > y_max {
                continue;
            }
            for x in (cx - k).max(x_min)..=(cx + k).min(x_max) {
                visit(self.bucket((x, y)));
            }
        }
        for x in [cx - k, cx + k] {
            if x < x_min || x > x_max {
                continue;
            }
            for y in (cy - k + 1).max(y_min)..=(cy + k - 1).min(y_max) {
                visit(self.bucket((x, y)));
            }
        }
    }
}

/// Minimum Euclidean distance from `query` to any point of `sample`;
/// +inf when the sample is empty. Exact match with a brute-force scan.
pub fn nearest_distance(query: Point2, sample: &PppSample, index: &GridIndex) -> Result<f64> {
    if index.len() != sample.points.len() {
        return Err(Error::internal(format!(
            "index holds {} points but sample has {}",
            index.len(),
            sample.points.len()
        )));
    }
    Ok(index.nearest_dist_sq(query, &sample.points).sqrt())
}
