use serde::{Deserialize, Serialize};

use crate::geom::{Point, Rect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellState {
    NotRed,
    /// Every sub-box is occupied but some holds more than `A·s²` points.
    Red,
    /// Every sub-box holds between 1 and `A·s²` points.
    ARed,
}

impl CellState {
    pub fn is_red(self) -> bool {
        self != CellState::NotRed
    }
}

/// Cell states on the grid `sℤ²`: cell `(i, j)` is the box of half-side `s`
/// centred at `(s·i, s·j)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoarseField {
    pub s: f64,
    pub a: f64,
    pub i0: i64,
    pub j0: i64,
    pub nx: usize,
    pub ny: usize,
    pub states: Vec<CellState>,
}

pub const SUB_PER_SIDE: i64 = 20;

impl CoarseField {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index(&self, i: i64, j: i64) -> Option<usize> {
        let (di, dj) = (i - self.i0, j - self.j0);
        (di >= 0 && dj >= 0 && (di as usize) < self.nx && (dj as usize) < self.ny)
            .then(|| dj as usize * self.nx + di as usize)
    }

    pub fn state(&self, i: i64, j: i64) -> Option<CellState> {
        self.index(i, j).map(|k| self.states[k])
    }

    pub fn cell_coords(&self, k: usize) -> (i64, i64) {
        (self.i0 + (k % self.nx) as i64, self.j0 + (k / self.nx) as i64)
    }

    pub fn cell_rect(&self, i: i64, j: i64) -> Rect {
        Rect::square(Point::new(self.s * i as f64, self.s * j as f64), self.s)
    }

    pub fn red_density(&self) -> Option<f64> {
        (!self.states.is_empty())
            .then(|| self.states.iter().filter(|c| c.is_red()).count() as f64 / self.states.len() as f64)
    }

    pub fn a_red_density(&self) -> Option<f64> {
        (!self.states.is_empty())
            .then(|| self.states.iter().filter(|&&c| c == CellState::ARed).count() as f64 / self.states.len() as f64)
    }

    /// Pearson correlation of the red indicator between cells at offset `(di, dj)`.
    /// `None` when there are no pairs or either marginal is constant.
    pub fn red_correlation(&self, di: i64, dj: i64) -> Option<f64> {
        let (mut n, mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for k in 0..self.states.len() {
            let (i, j) = self.cell_coords(k);
            if let Some(other) = self.state(i + di, j + dj) {
                let x = f64::from(u8::from(self.states[k].is_red()));
                let y = f64::from(u8::from(other.is_red()));
                n += 1.0;
                sx += x;
                sy += y;
                sxx += x * x;
                syy += y * y;
                sxy += x * y;
            }
        }
        if n == 0.0 {
            return None;
        }
        let vx = sxx / n - (sx / n).powi(2);
        let vy = syy / n - (sy / n).powi(2);
        if vx <= 0.0 || vy <= 0.0 {
            return None;
        }
        Some((sxy / n - sx * sy / (n * n)) / (vx * vy).sqrt())
    }

    /// Mean of the correlations at offsets (3,0) and (0,3), cells at graph
    /// distance greater than 2.
    pub fn far_correlation(&self) -> Option<f64> {
        match (self.red_correlation(3, 0), self.red_correlation(0, 3)) {
            (Some(a), Some(b)) => Some(0.5 * (a + b)),
            (a, b) => a.or(b),
        }
    }
}

/// Classify every cell meeting the bounding box of `points`. An empty point
/// list gives an empty field.
pub fn coarse_grain_red_boxes(points: &[Point], s: f64, a: f64) -> CoarseField {
    if points.is_empty() {
        return coarse_grain_in(points, None, s, a);
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let hw = (0.5 * (x1 - x0)).max(f64::MIN_POSITIVE);
    let hh = (0.5 * (y1 - y0)).max(f64::MIN_POSITIVE);
    let window = Rect::new(Point::new(0.5 * (x0 + x1), 0.5 * (y0 + y1)), hw, hh);
    coarse_grain_in(points, Some(window), s, a)
}

/// Classify every cell of `sℤ²` whose box meets `window`.
///
/// # Panics
/// If `s` is not positive.
pub fn coarse_grain_in(points: &[Point], window: Option<Rect>, s: f64, a: f64) -> CoarseField {
    assert!(s > 0.0, "cell size must be positive");
    let Some(w) = window else {
        return CoarseField { s, a, i0: 0, j0: 0, nx: 0, ny: 0, states: Vec::new() };
    };
    let i0 = ((w.x_min() - s) / s).ceil() as i64;
    let i1 = ((w.x_max() + s) / s).floor() as i64;
    let j0 = ((w.y_min() - s) / s).ceil() as i64;
    let j1 = ((w.y_max() + s) / s).floor() as i64;
    let nx = (i1 - i0 + 1) as usize;
    let ny = (j1 - j0 + 1) as usize;

    // fine grid of pitch s/10; cell (i, j) owns fine indices [10i-10, 10i+10)
    let half = SUB_PER_SIDE / 2;
    let h = s / half as f64;
    let (f0x, f0y) = (half * i0 - half, half * j0 - half);
    let fnx = (half * (nx as i64 - 1) + SUB_PER_SIDE) as usize;
    let fny = (half * (ny as i64 - 1) + SUB_PER_SIDE) as usize;
    let mut counts = vec![0u32; fnx * fny];
    for p in points {
        let fx = (p.x / h).floor() as i64 - f0x;
        let fy = (p.y / h).floor() as i64 - f0y;
        if fx >= 0 && fy >= 0 && (fx as usize) < fnx && (fy as usize) < fny {
            counts[fy as usize * fnx + fx as usize] += 1;
        }
    }
    let cap = a * s * s;
    let mut states = Vec::with_capacity(nx * ny);
    for cj in 0..ny {
        for ci in 0..nx {
            let (bx, by) = (ci * half as usize, cj * half as usize);
            let mut occupied = true;
            let mut within = true;
            for sy in 0..SUB_PER_SIDE as usize {
                for sx in 0..SUB_PER_SIDE as usize {
                    let c = counts[(by + sy) * fnx + bx + sx];
                    occupied &= c >= 1;
                    within &= f64::from(c) <= cap;
                }
            }
            states.push(match (occupied, within) {
                (false, _) => CellState::NotRed,
                (true, false) => CellState::Red,
                (true, true) => CellState::ARed,
            });
        }
    }
    CoarseField { s, a, i0, j0, nx, ny, states }
}
