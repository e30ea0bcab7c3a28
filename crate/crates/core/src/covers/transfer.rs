use serde::{Deserialize, Serialize};

use super::CoverStats;
use crate::boundary::{ComparisonFn, SandwichConstants};
use crate::error::{Error, Result};

/// Outcome of transferring a visual-metric capacity bound to Moran's metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    /// Visual capacity, capped at 1.
    pub c: f64,
    /// Visual mesh.
    pub lambda: f64,
    pub k: f64,
    /// `c / (1 + k)`, the bound the Moran capacity must beat.
    pub required_capacity: f64,
    pub mesh_moran: f64,
    pub f2_lambda: f64,
    pub lebesgue_moran: f64,
    pub f1_c_lambda: f64,
    pub c_f1_lambda: f64,
    pub capacity_moran: f64,
    pub mesh_ok: bool,
    pub lebesgue_ok: bool,
    pub concavity_ok: bool,
    pub capacity_ok: bool,
}

impl TransferReport {
    pub fn passed(&self) -> bool {
        self.mesh_ok && self.lebesgue_ok && self.concavity_ok && self.capacity_ok
    }
}

/// Compares the Moran re-measurement `stats_m` of a cover with its visual
/// statistics `stats_v`: `mesh_M ≤ f₂(λ)`, `ℒ_M ≥ f₁(cλ) ≥ c·f₁(λ)` and
/// `capacity_M > c/(1+k)`, where `λ` is the visual mesh and `c` the visual
/// capacity capped at 1.
///
/// Fails with `Precondition` unless `λ ≤ min(e⁻², B)` and `f₂(λ) < 1`.
pub fn capacity_transfer_check(stats_v: &CoverStats, stats_m: &CoverStats, consts: &SandwichConstants) -> Result<TransferReport> {
    let lambda = stats_v.mesh;
    let cap = (-2f64).exp().min(consts.big_b);
    if !(lambda > 0.0 && lambda <= cap) {
        return Err(Error::Precondition(format!("visual mesh {lambda} must lie in (0, min(e^-2, B) = {cap}]")));
    }
    let f1 = ComparisonFn::lower(consts);
    let f2 = ComparisonFn::upper(consts);
    let f2_lambda = f2.eval(lambda)?;
    if f2_lambda >= 1.0 {
        return Err(Error::Precondition(format!("f2(lambda) = {f2_lambda} must be below 1")));
    }
    let c = stats_v.capacity.min(1.0);
    let f1_c_lambda = f1.eval(c * lambda)?;
    let c_f1_lambda = c * f1.eval(lambda)?;
    let required_capacity = c / (1.0 + consts.k);
    Ok(TransferReport {
        c,
        lambda,
        k: consts.k,
        required_capacity,
        mesh_moran: stats_m.mesh,
        f2_lambda,
        lebesgue_moran: stats_m.lebesgue,
        f1_c_lambda,
        c_f1_lambda,
        capacity_moran: stats_m.capacity,
        mesh_ok: stats_m.mesh <= f2_lambda + 1e-9,
        lebesgue_ok: stats_m.lebesgue >= f1_c_lambda - 1e-9,
        concavity_ok: f1_c_lambda >= c_f1_lambda - 1e-12,
        capacity_ok: stats_m.capacity > required_capacity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(mesh: f64, lebesgue: f64) -> CoverStats {
        CoverStats {
            lambda: None,
            mesh,
            lebesgue,
            order: 1,
            capacity: lebesgue / mesh,
            min_family_separation: vec![],
            empty_complement: false,
            net_spacing: 0.0,
        }
    }

    #[test]
    fn tree_bound_is_one_half() {
        let consts = SandwichConstants { a: 2.0, b: 0.5, k: 1.0, big_b: 0.06, r: 5.0, s: 1.0 };
        // e^{-ε·6} and e^{-ε·5} for ε = 1/2
        let v = stats((-3f64).exp(), (-2.5f64).exp());
        let m = stats(1.0 / 6.5, 1.0 / 5.5);
        let r = capacity_transfer_check(&v, &m, &consts).unwrap();
        assert_eq!(r.c, 1.0);
        assert_eq!(r.required_capacity, 0.5);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn degenerate_sandwich_requires_c() {
        let consts = SandwichConstants { a: 2.0, b: 0.5, k: 0.0, big_b: 0.06, r: 5.0, s: 1.0 };
        let r = capacity_transfer_check(&stats(0.01, 0.005), &stats(0.1, 0.1), &consts).unwrap();
        assert_eq!(r.required_capacity, r.c);
    }

    #[test]
    fn coarse_mesh_is_a_precondition_failure() {
        let consts = SandwichConstants { a: 2.0, b: 0.5, k: 1.0, big_b: 0.06, r: 5.0, s: 1.0 };
        let r = capacity_transfer_check(&stats(0.1, 0.1), &stats(0.1, 0.1), &consts);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
