use super::RswError;

/// Cutoff scale `δ · [ln(C / (ε δ²))]^{1/α}`.
pub fn compute_r0(delta: f64, eps: f64, c: f64, alpha: f64) -> Result<f64, RswError> {
    if !(delta > 0.0 && eps > 0.0 && c > 0.0) {
        return Err(RswError::Domain(format!("need delta, eps, C > 0 (got {delta}, {eps}, {c})")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(RswError::Domain(format!("alpha = {alpha} outside (0, 1]")));
    }
    let arg = c / (eps * delta * delta);
    if !(arg > 1.0) {
        return Err(RswError::Domain(format!("log argument C/(eps delta^2) = {arg} must exceed 1")));
    }
    Ok(delta * arg.ln().powf(1.0 / alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_log_returns_delta() {
        let (delta, eps) = (0.05, 0.3);
        let c = std::f64::consts::E * eps * delta * delta;
        for alpha in [0.2, 0.5, 1.0] {
            assert!((compute_r0(delta, eps, c, alpha).unwrap() - delta).abs() < 1e-15);
        }
    }

    #[test]
    fn direct_value() {
        let r = compute_r0(0.01, 0.1, 1.0, 1.0).unwrap();
        assert!((r - 0.01 * 1e5f64.ln()).abs() < 1e-15);
        assert!((r - 0.11513).abs() < 1e-5);
    }

    #[test]
    fn domain_errors() {
        assert!(compute_r0(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(compute_r0(0.1, 0.1, 1.0, 0.0).is_err());
        assert!(compute_r0(0.1, 0.1, 1.0, 1.5).is_err());
    }

    #[test]
    fn alpha_ordering_flips_below_unit_log() {
        // log argument 2: ln 2 < 1, so a smaller alpha gives a smaller cutoff
        let (delta, eps) = (0.1, 0.5);
        let c = 2.0 * eps * delta * delta;
        assert!(compute_r0(delta, eps, c, 0.5).unwrap() < compute_r0(delta, eps, c, 1.0).unwrap());
        let c = 100.0 * eps * delta * delta;
        assert!(compute_r0(delta, eps, c, 0.5).unwrap() > compute_r0(delta, eps, c, 1.0).unwrap());
    }
}
