use serde::{Deserialize, Serialize};

use crate::boundary::MetricParams;
use crate::error::{Error, Result};
use crate::spaces::{build_space, SpaceKind, SpaceSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PullbackConfig {
    #[serde(rename = "A")]
    pub a: f64,
    /// Boundedness multiplier of the apartment covers; must exceed 1.
    pub c: f64,
    pub l_values: Vec<f64>,
    /// Lebesgue number `ε_L` entering `D = R·r/ε_L`.
    pub lebesgue_eps: f64,
    pub tree: SpaceSpec,
    pub tree_net_depth: u32,
    pub product: SpaceSpec,
    pub product_net_depth: u32,
    pub product_alpha_grid: usize,
    /// Product apartment covers: `L` values paired with `c`.
    pub product_l_values: Vec<f64>,
    /// Random segments for the preimage-component bound.
    pub segments: usize,
}

impl Default for PullbackConfig {
    fn default() -> Self {
        PullbackConfig {
            a: 1.0,
            c: 1.5,
            l_values: vec![2.0, 1.0, 0.5],
            lebesgue_eps: 0.5,
            tree: SpaceSpec::tree(3, 8),
            tree_net_depth: 4,
            product: SpaceSpec::product(SpaceSpec::tree(2, 16), SpaceSpec::tree(2, 16)),
            product_net_depth: 2,
            product_alpha_grid: 2,
            product_l_values: vec![1.8, 1.5, 1.0],
            segments: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnulusConfig {
    #[serde(rename = "A")]
    pub a: f64,
    pub width: f64,
    pub c: f64,
    pub plane_d: Vec<f64>,
    pub tree_d: Vec<f64>,
    pub tree_branching: u32,
}

impl Default for AnnulusConfig {
    fn default() -> Self {
        AnnulusConfig {
            a: 1.0,
            width: 10.0,
            c: 0.5,
            plane_d: vec![10.0, 20.0, 40.0, 80.0, 100.0],
            tree_d: vec![10.0, 20.0, 40.0, 80.0],
            tree_branching: 2,
        }
    }
}

/// Everything the verification suite and the experiments read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Random pairs, triples or configurations drawn per sampled check.
    pub samples: usize,
    pub tolerance: f64,
    /// Visual parameter used on the tree.
    pub epsilon: f64,
    /// Visual parameter used on the hyperbolic plane.
    pub h2_epsilon: f64,
    #[serde(rename = "A")]
    pub moran_scale: f64,
    pub s: f64,
    /// Grid step for the `R` estimate.
    pub r_step: f64,
    pub tree: SpaceSpec,
    pub tree_net_depth: u32,
    pub hyperbolic: SpaceSpec,
    pub h2_net: usize,
    pub circle_net: usize,
    pub product: SpaceSpec,
    pub product_net_depth: u32,
    pub product_alpha_grid: usize,
    /// Profile scales as multiples of the net spacing, descending.
    pub profile_scale_factors: Vec<f64>,
    pub max_order: usize,
    pub merge_factor: f64,
    pub pullback: PullbackConfig,
    pub annulus: AnnulusConfig,
    pub a_prime: f64,
    pub triples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 20_240_601,
            samples: 200,
            tolerance: 1e-9,
            epsilon: 0.5,
            h2_epsilon: 0.3,
            moran_scale: 1.0,
            s: 1.0,
            r_step: 0.125,
            tree: SpaceSpec::tree(3, 8),
            tree_net_depth: 4,
            hyperbolic: SpaceSpec::hyperbolic_plane(),
            h2_net: 48,
            circle_net: 64,
            product: SpaceSpec::product(SpaceSpec::tree(3, 16), SpaceSpec::tree(3, 16)),
            product_net_depth: 1,
            product_alpha_grid: 8,
            profile_scale_factors: vec![3.0, 2.0, 1.5],
            max_order: 3,
            merge_factor: 3.0,
            pullback: PullbackConfig::default(),
            annulus: AnnulusConfig::default(),
            a_prime: 2.0,
            triples: 100,
        }
    }
}

fn expect_kind(spec: &SpaceSpec, kind: SpaceKind, field: &str) -> Result<()> {
    build_space(spec).map_err(|e| Error::Config(format!("{field}: {e}")))?;
    if spec.kind != kind {
        return Err(Error::Config(format!("{field} must be a {}, got {}", kind.name(), spec.kind.name())));
    }
    Ok(())
}

fn tree_product(spec: &SpaceSpec, field: &str) -> Result<()> {
    expect_kind(spec, SpaceKind::Product, field)?;
    let factors = spec.factors.as_deref().unwrap_or_default();
    if factors.iter().any(|f| f.kind != SpaceKind::Tree) {
        return Err(Error::Config(format!("{field} must be a product of two trees")));
    }
    Ok(())
}

impl ExperimentConfig {
    /// Visual-metric parameters for the tree (δ = 0).
    pub fn tree_params(&self) -> Result<MetricParams> {
        MetricParams::new(self.epsilon, 0.0, self.moran_scale)
    }

    /// Visual-metric parameters for the hyperbolic plane.
    pub fn h2_params(&self) -> Result<MetricParams> {
        let delta = build_space(&self.hyperbolic)?.require_delta()?;
        MetricParams::new(self.h2_epsilon, delta, self.moran_scale)
    }

    /// Rejects configurations before any check runs.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tolerance", self.tolerance),
            ("A", self.moran_scale),
            ("s", self.s),
            ("r_step", self.r_step),
            ("a_prime", self.a_prime),
            ("merge_factor", self.merge_factor),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} = {v} must be positive")));
            }
        }
        if self.samples == 0 || self.triples == 0 || self.max_order == 0 {
            return Err(Error::Config("samples, triples and max_order must be positive".into()));
        }
        expect_kind(&self.tree, SpaceKind::Tree, "tree")?;
        expect_kind(&self.hyperbolic, SpaceKind::HyperbolicPlane, "hyperbolic")?;
        tree_product(&self.product, "product")?;
        let visual = |r: Result<MetricParams>, which: &str| {
            r.map_err(|e| Error::Config(format!("{which} visual parameters rejected (the visual metric is a distance only for epsilon' <= sqrt(2) - 1): {e}")))
        };
        visual(self.tree_params(), "tree")?;
        visual(self.h2_params(), "hyperbolic plane")?;
        if self.profile_scale_factors.is_empty()
            || self.profile_scale_factors.iter().any(|&f| !(f >= 1.0))
            || self.profile_scale_factors.windows(2).any(|w| w[1] > w[0])
        {
            return Err(Error::Config("profile_scale_factors must be descending and at least 1".into()));
        }
        let p = &self.pullback;
        if !(p.c > 1.0) {
            return Err(Error::Config(format!("pullback c = {} must exceed 1", p.c)));
        }
        if !(p.a > 0.0 && p.lebesgue_eps > 0.0) || p.l_values.iter().chain(&p.product_l_values).any(|&l| !(l > 0.0)) {
            return Err(Error::Config("pullback A, lebesgue_eps and L values must be positive".into()));
        }
        expect_kind(&p.tree, SpaceKind::Tree, "pullback.tree")?;
        tree_product(&p.product, "pullback.product")?;
        let an = &self.annulus;
        if !(an.a > 0.0 && an.width > 0.0 && an.c > 0.0 && an.c <= 1.0) || an.tree_branching < 2 {
            return Err(Error::Config("annulus needs A, width > 0, 0 < c <= 1 and branching >= 2".into()));
        }
        for ds in [&an.plane_d, &an.tree_d] {
            if ds.is_empty() || ds.windows(2).any(|w| w[1] <= w[0]) || ds.iter().any(|&d| !(d > 0.0)) {
                return Err(Error::Config("annulus D values must be positive and ascending".into()));
            }
        }
        Ok(())
    }
}
