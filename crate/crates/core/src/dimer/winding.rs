use crate::geom::Point;

use super::DimerError;

/// Signed angle from direction `a` to direction `b`, in `(-π, π]`.
pub fn turn_angle(a: Point, b: Point) -> f64 {
    a.cross(b).atan2(a.dot(b))
}

/// Intrinsic winding: the sum of signed turning angles at the interior
/// vertices of the polyline.
pub fn winding_of_path(path: &[Point]) -> Result<f64, DimerError> {
    if path.len() < 2 {
        return Err(DimerError::ShortPath(path.len()));
    }
    let mut dirs = Vec::with_capacity(path.len() - 1);
    for (index, w) in path.windows(2).enumerate() {
        let d = w[1].sub(w[0]);
        if d.x == 0.0 && d.y == 0.0 {
            return Err(DimerError::ZeroLength { index });
        }
        dirs.push(d);
    }
    Ok(dirs.windows(2).map(|d| turn_angle(d[0], d[1])).sum())
}
