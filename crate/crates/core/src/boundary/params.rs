use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ε′ for which the chain construction yields a distance.
pub const MAX_EPSILON_PRIME: f64 = std::f64::consts::SQRT_2 - 1.0;

/// Parameters of the two boundary metrics: the visual parameter ε, the
/// hyperbolicity constant δ it is paired with, and the Moran scale A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub epsilon: f64,
    pub delta: f64,
    #[serde(rename = "A")]
    pub moran_scale: f64,
}

impl MetricParams {
    pub fn new(epsilon: f64, delta: f64, moran_scale: f64) -> Result<Self> {
        let p = MetricParams { epsilon, delta, moran_scale };
        p.validate()?;
        Ok(p)
    }

    /// Parameters for Moran-only work on spaces without a δ.
    pub fn moran(moran_scale: f64) -> Result<Self> {
        Self::new(1.0, 0.0, moran_scale)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidParams(format!("epsilon {} must be positive", self.epsilon)));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::InvalidParams(format!("delta {} must be nonnegative", self.delta)));
        }
        if !(self.moran_scale.is_finite() && self.moran_scale > 0.0) {
            return Err(Error::InvalidParams(format!("A {} must be positive", self.moran_scale)));
        }
        let ep = self.epsilon_prime();
        if ep > MAX_EPSILON_PRIME {
            return Err(Error::InvalidParams(format!(
                "epsilon' = e^(epsilon*delta) - 1 = {ep:.6} exceeds sqrt(2) - 1; d_epsilon is not a distance"
            )));
        }
        Ok(())
    }

    /// `ε′ = e^{εδ} − 1`, always recomputed from ε and δ.
    pub fn epsilon_prime(&self) -> f64 {
        (self.epsilon * self.delta).exp_m1()
    }
}

/// Constants of the two-sided comparison between the visual and Moran metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichConstants {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    #[serde(rename = "B")]
    pub big_b: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub s: f64,
}

/// `a = 1/ε`, `b = A/2`, `k = 2δ + s − ln(1 − 2ε′)/ε`,
/// `B = (1 − 2ε′) e^{−ε(R − A/2 + 2δ + s)}`.
pub fn sandwich_constants(params: &MetricParams, r: f64, s: f64) -> Result<SandwichConstants> {
    params.validate()?;
    if !(r > 0.0 && s > 0.0) {
        return Err(Error::InvalidParams(format!("R = {r} and s = {s} must be positive")));
    }
    let ep = params.epsilon_prime();
    let slack = 1.0 - 2.0 * ep;
    if slack <= 0.0 {
        return Err(Error::InvalidParams(format!("epsilon' = {ep} >= 1/2, ln(1 - 2 epsilon') undefined")));
    }
    let (eps, delta, a_scale) = (params.epsilon, params.delta, params.moran_scale);
    Ok(SandwichConstants {
        a: 1.0 / eps,
        b: a_scale / 2.0,
        k: 2.0 * delta + s - slack.ln() / eps,
        big_b: slack * (-eps * (r - a_scale / 2.0 + 2.0 * delta + s)).exp(),
        r,
        s,
    })
}

/// `x ↦ 1/(−a ln x + b − shift)`; `shift = 0` is the lower comparison
/// function f₁ and `shift = k` the upper one f₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonFn {
    pub a: f64,
    pub b: f64,
    pub shift: f64,
}

impl ComparisonFn {
    pub fn lower(c: &SandwichConstants) -> Self {
        ComparisonFn { a: c.a, b: c.b, shift: 0.0 }
    }

    pub fn upper(c: &SandwichConstants) -> Self {
        ComparisonFn { a: c.a, b: c.b, shift: c.k }
    }

    pub fn denominator(&self, x: f64) -> f64 {
        -self.a * x.ln() + self.b - self.shift
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Domain { value: x, reason: "need 0 < x < 1".into() });
        }
        let den = self.denominator(x);
        if den <= 0.0 {
            return Err(Error::Domain { value: x, reason: format!("pole: denominator {den} <= 0") });
        }
        Ok(1.0 / den)
    }
}

/// `(f₁(d_v), f₂(d_v))`, the lower and upper bounds for the Moran distance of
/// a pair at visual distance `d_v`.
pub fn comparison_bounds(consts: &SandwichConstants, d_v: f64) -> Result<(f64, f64)> {
    Ok((ComparisonFn::lower(consts).eval(d_v)?, ComparisonFn::upper(consts).eval(d_v)?))
}
