use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geom::{Point, Rect};
use crate::stats::mean_var;

use super::height::HeightField;
use super::temperley::TemperleyanGraph;
use super::DimerError;

/// Smallest ensemble accepted by [`estimate_height_moments`].
pub const MIN_ENSEMBLE: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TestFunction {
    /// `amp · sin(π(x−x₀)/w) · sin(π(y−y₀)/h)` on the rectangle, zero outside.
    Sine { domain: Rect, amp: f64 },
    /// `amp · exp(1 − 1/(1 − |p−c|²/ρ²))` inside the disc of radius ρ.
    Bump { center: Point, radius: f64, amp: f64 },
}

impl TestFunction {
    pub fn eval(&self, p: Point) -> f64 {
        match *self {
            TestFunction::Sine { domain, amp } => {
                if !domain.contains(p) {
                    return 0.0;
                }
                let u = (p.x - domain.x_min()) / (2.0 * domain.half_w);
                let v = (p.y - domain.y_min()) / (2.0 * domain.half_h);
                amp * (PI * u).sin() * (PI * v).sin()
            }
            TestFunction::Bump { center, radius, amp } => {
                let q = p.sub(center);
                let s = q.dot(q) / (radius * radius);
                if s >= 1.0 {
                    0.0
                } else {
                    amp * (1.0 - 1.0 / (1.0 - s)).exp()
                }
            }
        }
    }

    /// Closed rectangle containing the support.
    pub fn support(&self) -> Rect {
        match *self {
            TestFunction::Sine { domain, .. } => domain,
            TestFunction::Bump { center, radius, .. } => Rect::square(center, radius),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TestFunction::Sine { .. } => "sine",
            TestFunction::Bump { .. } => "bump",
        }
    }
}

/// Moments of `∫ h̄ φ` over an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub phi: TestFunction,
    pub mesh: f64,
    pub ensemble: usize,
    /// Per-member centred integrals.
    pub integrals: Vec<f64>,
    pub mean: f64,
    /// Sample variance (denominator `n − 1`).
    pub variance: f64,
    /// Standard error of `mean`, including the centring ensemble when one is used.
    pub std_err: f64,
    /// Whether the centring used an independent ensemble.
    pub independent_centring: bool,
}

impl MomentReport {
    pub const CSV_HEADER: &'static str = "phi,mesh,ensemble,mean,variance,std_err,independent_centring";

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{:.12e},{:.12e},{:.12e},{}",
            self.phi.label(),
            self.mesh,
            self.ensemble,
            self.mean,
            self.variance,
            self.std_err,
            self.independent_centring
        )
    }
}

/// Variance comparison between two meshes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoMeshRow {
    pub mesh_coarse: f64,
    pub mesh_fine: f64,
    pub var_coarse: f64,
    pub var_fine: f64,
    pub ratio: f64,
}

impl TwoMeshRow {
    pub fn new(coarse: &MomentReport, fine: &MomentReport) -> Self {
        TwoMeshRow {
            mesh_coarse: coarse.mesh,
            mesh_fine: fine.mesh,
            var_coarse: coarse.variance,
            var_fine: fine.variance,
            ratio: fine.variance / coarse.variance,
        }
    }
}

fn raw_integral(f: &HeightField, tg: &TemperleyanGraph, weights: &[f64]) -> Result<f64, DimerError> {
    if f.h.len() != tg.face_count() {
        return Err(DimerError::Mismatch);
    }
    Ok(f.h.iter().zip(weights).map(|(h, w)| h * w).sum())
}

/// Face-area quadrature of `∫ h̄ φ` for each member, `h̄ = h − E h`.
///
/// `E h` is estimated from `centring` when given (an independent ensemble on
/// the same graph), otherwise from `fields` itself, in which case the mean of
/// the centred integrals is zero by construction.
pub fn estimate_height_moments(
    fields: &[HeightField],
    centring: Option<&[HeightField]>,
    phi: &TestFunction,
    tg: &TemperleyanGraph,
    domain: &Rect,
) -> Result<MomentReport, DimerError> {
    if fields.len() < MIN_ENSEMBLE {
        return Err(DimerError::EnsembleTooSmall { got: fields.len(), min: MIN_ENSEMBLE });
    }
    if !domain.contains_rect(&phi.support()) {
        return Err(DimerError::SupportOutside);
    }
    let weights: Vec<f64> = (0..tg.face_count()).map(|f| tg.face_area(f) * phi.eval(tg.face_centroid(f))).collect();
    let own = fields.iter().map(|f| raw_integral(f, tg, &weights)).collect::<Result<Vec<_>, _>>()?;
    let (own_mean, _) = mean_var(&own);
    let (centre, centre_var_of_mean) = match centring {
        Some(c) if !c.is_empty() => {
            let xs = c.iter().map(|f| raw_integral(f, tg, &weights)).collect::<Result<Vec<_>, _>>()?;
            let (m, v) = mean_var(&xs);
            (m, v / xs.len() as f64)
        }
        _ => (own_mean, 0.0),
    };
    let integrals: Vec<f64> = own.iter().map(|x| x - centre).collect();
    let (mean, variance) = mean_var(&integrals);
    let std_err = (variance / integrals.len() as f64 + centre_var_of_mean).sqrt();
    Ok(MomentReport {
        phi: *phi,
        mesh: fields[0].mesh,
        ensemble: fields.len(),
        integrals,
        mean,
        variance,
        std_err,
        independent_centring: centring.is_some_and(|c| !c.is_empty()),
    })
}

/// `2·∬ φ G_D φ` for the Dirichlet Green's function of a rectangle, by the
/// sine eigen-series truncated at `terms` modes per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GffTarget {
    pub variance: f64,
    /// Upper bound on the truncated part of `variance`.
    pub tail_bound: f64,
    pub terms: usize,
}

/// Coefficients `c_mn = ∫ φ e_mn` use a `quad × quad` midpoint rule; the tail
/// bound is `2(‖φ‖² − Σ c²)/λ_min` with `λ_min` the smallest omitted eigenvalue.
pub fn gff_target_variance(phi: &TestFunction, domain: &Rect, terms: usize, quad: usize) -> GffTarget {
    let (a, b) = (2.0 * domain.half_w, 2.0 * domain.half_h);
    let (hx, hy) = (a / quad as f64, b / quad as f64);
    let xs: Vec<f64> = (0..quad).map(|i| (i as f64 + 0.5) * hx).collect();
    let ys: Vec<f64> = (0..quad).map(|j| (j as f64 + 0.5) * hy).collect();
    let vals: Vec<Vec<f64>> = ys
        .iter()
        .map(|&y| xs.iter().map(|&x| phi.eval(Point::new(domain.x_min() + x, domain.y_min() + y))).collect())
        .collect();
    let norm2: f64 = vals.iter().flatten().map(|v| v * v).sum::<f64>() * hx * hy;
    let norm = 2.0 / (a * b).sqrt();
    // partial transform along x: part[m][j] = Σ_i φ(x_i, y_j) sin(mπx_i/a) hx
    let part: Vec<Vec<f64>> = (1..=terms)
        .map(|m| {
            let s: Vec<f64> = xs.iter().map(|&x| (m as f64 * PI * x / a).sin()).collect();
            vals.iter().map(|row| row.iter().zip(&s).map(|(v, s)| v * s).sum::<f64>() * hx).collect()
        })
        .collect();
    let mut sum = 0.0;
    let mut captured = 0.0;
    for n in 1..=terms {
        let s: Vec<f64> = ys.iter().map(|&y| (n as f64 * PI * y / b).sin()).collect();
        for (m, row) in part.iter().enumerate() {
            let c = norm * row.iter().zip(&s).map(|(p, s)| p * s).sum::<f64>() * hy;
            let lambda = PI * PI * (((m + 1) as f64 / a).powi(2) + (n as f64 / b).powi(2));
            sum += c * c / lambda;
            captured += c * c;
        }
    }
    let lambda_min = PI * PI * (((terms + 1) as f64 / a.max(b)).powi(2));
    let tail = 2.0 * (norm2 - captured).max(0.0) / lambda_min;
    GffTarget { variance: 2.0 * sum, tail_bound: tail, terms }
}
