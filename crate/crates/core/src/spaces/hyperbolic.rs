use super::Polar;

/// Geodesic distance in the hyperbolic plane between points given in polar
/// coordinates about the basepoint.
///
/// Uses `cosh d = cosh r₁ cosh r₂ − sinh r₁ sinh r₂ cos Δθ`, rewritten as
/// `cosh d − 1 = 2 sinh²((r₁−r₂)/2) + 2 sinh r₁ sinh r₂ sin²(Δθ/2)` so that
/// short distances keep full relative precision.
pub fn hyperbolic_distance(a: Polar, b: Polar) -> f64 {
    let half_dr = 0.5 * (a.r - b.r);
    let half_dt = 0.5 * (a.theta - b.theta);
    let radial = half_dr.sinh();
    let angular = half_dt.sin();
    let y = 2.0 * radial * radial + 2.0 * a.r.sinh() * b.r.sinh() * angular * angular;
    // acosh(1 + y) = ln(1 + y + sqrt(y (y + 2)))
    (y + y.sqrt() * (y + 2.0).sqrt()).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_textbook_formula() {
        let a = Polar { r: 1.3, theta: 0.2 };
        let b = Polar { r: 0.4, theta: 2.9 };
        let c = a.r.cosh() * b.r.cosh() - a.r.sinh() * b.r.sinh() * (a.theta - b.theta).cos();
        assert!((hyperbolic_distance(a, b) - c.acosh()).abs() < 1e-12);
    }

    #[test]
    fn radial_and_antipodal() {
        let a = Polar { r: 2.0, theta: 1.0 };
        let b = Polar { r: 5.5, theta: 1.0 };
        assert!((hyperbolic_distance(a, b) - 3.5).abs() < 1e-12);
        let c = Polar { r: 3.0, theta: 1.0 + std::f64::consts::PI };
        assert!((hyperbolic_distance(a, c) - 5.0).abs() < 1e-12);
        assert_eq!(hyperbolic_distance(a, a), 0.0);
    }

    #[test]
    fn far_points_do_not_overflow() {
        let a = Polar { r: 300.0, theta: 0.0 };
        let b = Polar { r: 300.0, theta: 2.0 };
        let expected = 600.0 + 2.0 * 1f64.sin().ln();
        assert!((hyperbolic_distance(a, b) - expected).abs() < 1e-9);
    }
}
