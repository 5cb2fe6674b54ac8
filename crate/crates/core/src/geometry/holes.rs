use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::env::{CellState, CoarseField};
use crate::geom::{Point, Rect};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoleParams {
    pub k: usize,
    /// Upper constant in the chemical-diameter window `[n/2, C n]`.
    pub diameter_const: f64,
}

impl HoleParams {
    pub fn new(k: usize) -> Self {
        HoleParams { k, diameter_const: 4.0 }
    }
}

/// Holes and the three bullets of the good-percolation event, on the cells of
/// a coarse field whose centres lie in the box. Open cells are the A-red ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleReport {
    pub i0: i64,
    pub j0: i64,
    pub nx: usize,
    pub ny: usize,
    /// Box half-width in cell units.
    pub n_cells: f64,
    pub cluster_size: usize,
    /// Per box cell, row-major: index into `hole_sizes`, or `None` inside the cluster.
    pub hole_id: Vec<Option<usize>>,
    pub hole_sizes: Vec<usize>,
    pub chemical_diameter: Option<u32>,
    pub diameter_ok: bool,
    pub proximity_ok: bool,
    pub holes_ok: bool,
}

impl HoleReport {
    pub fn max_hole(&self) -> usize {
        self.hole_sizes.iter().copied().max().unwrap_or(0)
    }

    pub fn event_holds(&self) -> bool {
        self.diameter_ok && self.proximity_ok && self.holes_ok
    }

    pub fn csv_header() -> &'static str {
        "hole,size"
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::csv_header());
        for (i, s) in self.hole_sizes.iter().enumerate() {
            out.push_str(&format!("{i},{s}\n"));
        }
        out
    }
}

const FOUR: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const EIGHT: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

pub fn hole_analysis(field: &CoarseField, bx: &Rect, params: &HoleParams) -> HoleReport {
    let s = field.s;
    let ci0 = ((bx.x_min() / s) - 1e-9).ceil() as i64;
    let ci1 = ((bx.x_max() / s) + 1e-9).floor() as i64;
    let cj0 = ((bx.y_min() / s) - 1e-9).ceil() as i64;
    let cj1 = ((bx.y_max() / s) + 1e-9).floor() as i64;
    let nx = (ci1 - ci0 + 1).max(0) as usize;
    let ny = (cj1 - cj0 + 1).max(0) as usize;
    let n_cells = bx.half_w.min(bx.half_h) / s;
    let cells = nx * ny;
    let open: Vec<bool> = (0..cells)
        .map(|k| {
            let (i, j) = (ci0 + (k % nx) as i64, cj0 + (k / nx) as i64);
            field.state(i, j) == Some(CellState::ARed)
        })
        .collect();
    let step = |k: usize, (di, dj): (i64, i64)| -> Option<usize> {
        let (x, y) = ((k % nx) as i64 + di, (k / nx) as i64 + dj);
        (x >= 0 && y >= 0 && (x as usize) < nx && (y as usize) < ny).then(|| y as usize * nx + x as usize)
    };

    // largest 4-connected open cluster
    let mut label = vec![usize::MAX; cells];
    let mut best: Option<(usize, usize)> = None;
    let mut next = 0;
    for s0 in 0..cells {
        if !open[s0] || label[s0] != usize::MAX {
            continue;
        }
        let mut size = 0;
        let mut stack = vec![s0];
        label[s0] = next;
        while let Some(v) = stack.pop() {
            size += 1;
            for d in FOUR {
                if let Some(w) = step(v, d) {
                    if open[w] && label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
        }
        if best.is_none_or(|(_, b)| size > b) {
            best = Some((next, size));
        }
        next += 1;
    }
    let in_cluster: Vec<bool> = (0..cells).map(|k| best.is_some_and(|(l, _)| label[k] == l)).collect();
    let cluster_size = best.map_or(0, |(_, s)| s);

    // holes: 8-connected components of the rest
    let mut hole_id = vec![None; cells];
    let mut hole_sizes = Vec::new();
    for s0 in 0..cells {
        if in_cluster[s0] || hole_id[s0].is_some() {
            continue;
        }
        let id = hole_sizes.len();
        let mut size = 0;
        let mut stack = vec![s0];
        hole_id[s0] = Some(id);
        while let Some(v) = stack.pop() {
            size += 1;
            for d in EIGHT {
                if let Some(w) = step(v, d) {
                    if !in_cluster[w] && hole_id[w].is_none() {
                        hole_id[w] = Some(id);
                        stack.push(w);
                    }
                }
            }
        }
        hole_sizes.push(size);
    }

    // chemical diameter by BFS from every cluster cell
    let chemical_diameter = (cluster_size > 0).then(|| {
        let mut diam = 0;
        let mut dist = vec![u32::MAX; cells];
        let mut queue = VecDeque::new();
        for src in (0..cells).filter(|&k| in_cluster[k]) {
            dist.iter_mut().for_each(|d| *d = u32::MAX);
            dist[src] = 0;
            queue.push_back(src);
            while let Some(v) = queue.pop_front() {
                diam = diam.max(dist[v]);
                for d in FOUR {
                    if let Some(w) = step(v, d) {
                        if in_cluster[w] && dist[w] == u32::MAX {
                            dist[w] = dist[v] + 1;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        diam
    });
    let diameter_ok = chemical_diameter
        .is_some_and(|d| f64::from(d) >= n_cells / 2.0 && f64::from(d) <= params.diameter_const * n_cells);

    // every cell within sup-distance k of the cluster, via prefix sums
    let mut pre = vec![0u32; (nx + 1) * (ny + 1)];
    for y in 0..ny {
        for x in 0..nx {
            pre[(y + 1) * (nx + 1) + x + 1] =
                u32::from(in_cluster[y * nx + x]) + pre[y * (nx + 1) + x + 1] + pre[(y + 1) * (nx + 1) + x]
                    - pre[y * (nx + 1) + x];
        }
    }
    let k = params.k;
    let proximity_ok = (0..cells).all(|c| {
        let (x, y) = (c % nx, c / nx);
        let (xa, xb) = (x.saturating_sub(k), (x + k + 1).min(nx));
        let (ya, yb) = (y.saturating_sub(k), (y + k + 1).min(ny));
        pre[yb * (nx + 1) + xb] + pre[ya * (nx + 1) + xa] > pre[ya * (nx + 1) + xb] + pre[yb * (nx + 1) + xa]
    });
    let holes_ok = hole_sizes.iter().all(|&h| h <= k * k);

    HoleReport {
        i0: ci0,
        j0: cj0,
        nx,
        ny,
        n_cells,
        cluster_size,
        hole_id,
        hole_sizes,
        chemical_diameter,
        diameter_ok,
        proximity_ok,
        holes_ok,
    }
}

/// Cell-centred box covering cells `-n..=n` in both directions.
pub fn cell_box(s: f64, n: usize) -> Rect {
    Rect::square(Point::ORIGIN, s * n as f64)
}
