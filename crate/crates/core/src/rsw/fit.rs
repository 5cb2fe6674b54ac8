use serde::{Deserialize, Serialize};

use super::RswError;

/// Fit of `P_fail(n) ≈ d · exp(−c n^α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub alpha: f64,
    pub c: f64,
    pub d: f64,
    /// Sum of squared residuals in the linearized coordinates.
    pub residual: f64,
    pub rows_used: usize,
}

fn linear_fit(xy: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let icpt = my - slope * mx;
    let ssr = xy.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum();
    (slope, icpt, ssr)
}

/// Least squares on `ln(−ln(P/d))` against `ln n`, with `d` profiled over
/// `(max P, 1]`. Rows are `(n, P_fail)`; only rows with `0 < P < 1` are used.
pub fn fit_stretched_exponential(rows: &[(f64, f64)]) -> Result<TailFit, RswError> {
    let informative: Vec<(f64, f64)> = rows.iter().copied().filter(|&(n, p)| n > 0.0 && p > 0.0 && p < 1.0).collect();
    let mut distinct: Vec<f64> = informative.iter().map(|r| r.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if informative.len() < 3 || distinct.len() < 2 {
        return Err(RswError::Underdetermined { informative: informative.len() });
    }
    let pmax = informative.iter().map(|r| r.1).fold(0.0, f64::max);
    let eval = |d: f64| {
        let xy: Vec<(f64, f64)> = informative.iter().map(|&(n, p)| (n.ln(), (-(p / d).ln()).ln())).collect();
        linear_fit(&xy)
    };
    // coarse grid in log(d - pmax), then golden-section refinement
    let span = 1.0 - pmax;
    let to_d = |u: f64| pmax + span * u.exp();
    let (lo_u, hi_u) = (-30.0f64, 0.0f64);
    let steps = 600;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=steps {
        let u = lo_u + (hi_u - lo_u) * k as f64 / steps as f64;
        let ssr = eval(to_d(u)).2;
        if ssr < best.0 {
            best = (ssr, u);
        }
    }
    let h = (hi_u - lo_u) / steps as f64;
    let (mut a, mut b) = ((best.1 - h).max(lo_u), (best.1 + h).min(hi_u));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let (x1, x2) = (b - phi * (b - a), a + phi * (b - a));
        if eval(to_d(x1)).2 < eval(to_d(x2)).2 {
            b = x2;
        } else {
            a = x1;
        }
    }
    let u = 0.5 * (a + b);
    let u = if eval(to_d(u)).2 <= best.0 { u } else { best.1 };
    let d = to_d(u);
    let (alpha, icpt, residual) = eval(d);
    Ok(TailFit { alpha, c: icpt.exp(), d, residual, rows_used: informative.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_synthetic_recovery() {
        let rows: Vec<(f64, f64)> =
            [4.0, 9.0, 16.0, 25.0, 36.0].iter().map(|&n: &f64| (n, (-0.5 * n.sqrt()).exp())).collect();
        let f = fit_stretched_exponential(&rows).unwrap();
        assert!((f.alpha - 0.5).abs() < 0.02, "{f:?}");
        assert!(f.d > 0.9);
    }

    #[test]
    fn zero_rows_underdetermined() {
        let rows = [(8.0, 0.0), (16.0, 0.0), (32.0, 0.0)];
        assert_eq!(fit_stretched_exponential(&rows).unwrap_err(), RswError::Underdetermined { informative: 0 });
    }
}
