use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::SQRT_2;

use super::annulus::annulus_cover_experiment;
use super::config::ExperimentConfig;
use super::quasisymmetry::quasisymmetry_distortion;
use super::report::{CheckBuilder, VerificationReport};
use super::sampling::{random_boundary_point, random_time};
use super::witnesses::{alternating_pair_cover, class_cover, clustered_circle, line_ends_cover};
use crate::boundary::{
    estimate_r, gromov_product_boundary, moran_metric, ray_product_at, sandwich_constants, ComparisonFn, MetricParams,
    SandwichConstants, VisualNetMetric, DEFAULT_MORAN_TOL,
};
use crate::buildings::{
    preimage_components, pullback_bounds_check, pullback_cover, ApartmentRegion, BuildingBounds, BuildingHandle,
};
use crate::covers::{
    capacity_transfer_check, cdim_profile, cover_stats, cylinder_classes, greedy_colored_cover, multiplicities,
    DistanceMatrix, GreedyOptions, MetricKind,
};
use crate::error::{Error, Result};
use crate::spaces::{build_space, BoundaryPoint, NetResolution, Point, Space, SpaceSpec};

type Runner = fn(&ExperimentConfig, &mut ChaCha8Rng, &mut CheckBuilder) -> Result<()>;

/// Parameter cap for sampled rays on unbounded spaces.
const SAMPLE_T: f64 = 20.0;
/// Label depth of sampled tree ends.
const SAMPLE_DEPTH: u32 = 12;
/// Limit time for boundary Gromov products on the hyperbolic plane.
const LIMIT_T: f64 = 60.0;

const CHECKS: &[(&str, &str, Runner)] = &[
    ("spaces.metric_axioms", "distance is a metric on every model space", metric_axioms),
    ("spaces.unit_speed", "rays from the basepoint have unit speed", unit_speed),
    ("spaces.convexity_ratio", "d(γ(s),γ′(s)) ≤ (s/t)·d(γ(t),γ′(t)); equality in flat spaces", convexity_ratio),
    ("spaces.monotone_displacement", "displacement and Gromov product of ray pairs are non-decreasing", monotone_displacement),
    ("boundary.epsilon_prime", "ε′ = e^{εδ} − 1 ≤ √2 − 1", epsilon_prime),
    ("boundary.moran_metric_axioms", "Moran's metric is symmetric and satisfies the triangle inequality", moran_axioms),
    ("boundary.moran_closed_forms", "bisection matches the tree, plane and hyperbolic closed forms", moran_closed_forms),
    ("boundary.visual_tree_exact", "on trees the chain infimum equals ρ_ε", visual_tree_exact),
    ("boundary.visual_certificate", "(1 − 2ε′)ρ_ε ≤ d_ε ≤ ρ_ε", visual_certificate),
    ("boundary.sandwich_tree", "f₁(d_v) ≤ d_M ≤ f₂(d_v) when d_v ≤ B, with equality on trees", sandwich_tree),
    ("boundary.sandwich_hyperbolic", "f₁(d_v) ≤ d_M ≤ f₂(d_v) when d_v ≤ B", sandwich_hyperbolic),
    ("boundary.comparison_concavity", "f = 1/(−a ln x + b) is concave on (0, e⁻²) with f(cx) ≥ cf(x)", comparison_concavity),
    ("boundary.ray_product_window", "(ξ|η) − 2δ − s ≤ R₁ − ½d(γ(R₁),γ′(R₁)) ≤ (ξ|η) for R₁ ≥ R", ray_product_window),
    ("covers.greedy_separation", "greedy families are L-separated", greedy_separation),
    ("covers.order_recount", "order equals the brute-force maximum multiplicity", order_recount),
    ("covers.capacity_transfer", "Moran capacity exceeds c/(1 + k)", capacity_transfer),
    ("covers.cdim_tree", "tree boundaries need one family at every scale", cdim_tree),
    ("covers.cdim_circle", "the plane boundary needs two families", cdim_circle),
    ("covers.cdim_product", "products of two trees need two families", cdim_product),
    ("covers.profile_refinement", "refining a tree net never increases the families needed", profile_refinement),
    ("buildings.retraction_contracting", "ρ is 1-Lipschitz and preserves distance from p", retraction_contracting),
    ("buildings.retraction_rays", "ρ maps rays from p to unit-speed rays", retraction_rays),
    ("buildings.component_bound", "preimage components have diameter ≤ 2R + 2D + M", component_bound),
    ("buildings.pullback_tree", "pulled-back tree covers meet the separation and boundedness bounds", pullback_tree),
    ("buildings.pullback_product", "pulled-back product covers meet the separation and boundedness bounds", pullback_product),
    ("experiments.annulus_plane", "plane annulus covers have bounded mesh and Lebesgue number A", annulus_plane),
    ("experiments.annulus_tree", "tree annulus pieces grow at least linearly in D", annulus_tree),
    ("experiments.quasisymmetry_tree", "d_{A′} = 1/(1/d_A + (A′ − A)/2) on trees", quasisymmetry_tree),
    ("experiments.quasisymmetry_diagonal", "equal scales give identical ratios", quasisymmetry_diagonal),
];

/// Runs every check with its own random stream derived from the seed. A
/// check whose evaluation errors is reported as failed with the error text.
pub fn run_verification_suite(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(i, &(name, anchor, run))| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            let mut b = CheckBuilder::new(name, anchor, cfg.tolerance);
            match run(cfg, &mut rng, &mut b) {
                Ok(()) => b.finish(),
                Err(e) => CheckBuilder::errored(name, anchor, cfg.tolerance, e),
            }
        })
        .collect();
    Ok(VerificationReport::new(cfg.seed, checks))
}

/// Names of all checks, in execution order.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

fn model_spaces(cfg: &ExperimentConfig) -> Result<Vec<(&'static str, Space)>> {
    Ok(vec![
        ("tree", build_space(&cfg.tree)?),
        ("line", build_space(&SpaceSpec::line())?),
        ("plane", build_space(&SpaceSpec::plane())?),
        ("hyperbolic", build_space(&cfg.hyperbolic)?),
        ("product", build_space(&cfg.product)?),
    ])
}

fn random_point(space: &Space, rng: &mut ChaCha8Rng) -> Result<Point> {
    let xi = random_boundary_point(space, rng, SAMPLE_DEPTH);
    let t = random_time(space, rng, &xi, SAMPLE_T);
    space.ray_eval(&xi, t)
}

fn metric_axioms(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    for (name, sp) in model_spaces(cfg)? {
        let (mut excess, mut asym, mut self_d) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
        for _ in 0..cfg.samples {
            let [p, q, r] = [(); 3].map(|_| random_point(&sp, rng));
            let (p, q, r) = (p?, q?, r?);
            let (pq, qr, pr) = (sp.distance(&p, &q)?, sp.distance(&q, &r)?, sp.distance(&p, &r)?);
            excess = excess.max(pr - pq - qr);
            asym = asym.max((pq - sp.distance(&q, &p)?).abs());
            self_d = self_d.max(sp.distance(&p, &p)?);
        }
        b.at_most(&format!("{name}.triangle_excess"), excess, 0.0);
        b.equal(&format!("{name}.asymmetry"), asym, 0.0);
        b.equal(&format!("{name}.self_distance"), self_d, 0.0);
    }
    Ok(())
}

fn unit_speed(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    for (name, sp) in model_spaces(cfg)? {
        let mut worst = 0.0f64;
        for _ in 0..cfg.samples {
            let xi = random_boundary_point(&sp, rng, SAMPLE_DEPTH);
            let (s, t) = (random_time(&sp, rng, &xi, SAMPLE_T), random_time(&sp, rng, &xi, SAMPLE_T));
            let d = sp.distance(&sp.ray_eval(&xi, s)?, &sp.ray_eval(&xi, t)?)?;
            worst = worst.max((d - (s - t).abs()).abs());
        }
        b.at_most(&format!("{name}.speed_error"), worst, 0.0);
    }
    Ok(())
}

fn convexity_ratio(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    for (name, sp) in model_spaces(cfg)? {
        let (mut excess, mut gap) = (f64::NEG_INFINITY, 0.0f64);
        for _ in 0..cfg.samples {
            let xi = random_boundary_point(&sp, rng, SAMPLE_DEPTH);
            let eta = random_boundary_point(&sp, rng, SAMPLE_DEPTH);
            let h = sp.ray_horizon(&xi).min(sp.ray_horizon(&eta)).min(SAMPLE_T);
            let t = rng.gen_range(0.0..h);
            let s = rng.gen_range(0.0..=1.0) * t;
            if t == 0.0 {
                continue;
            }
            let diff = sp.displacement(&xi, &eta, s)? - s / t * sp.displacement(&xi, &eta, t)?;
            excess = excess.max(diff);
            gap = gap.max(diff.abs());
        }
        b.at_most(&format!("{name}.ratio_excess"), excess, 0.0);
        if name == "plane" || name == "line" {
            b.equal(&format!("{name}.ratio_gap"), gap, 0.0);
        }
    }
    Ok(())
}

fn monotone_displacement(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    for (name, sp) in model_spaces(cfg)?.into_iter().filter(|(n, _)| matches!(*n, "tree" | "line" | "hyperbolic")) {
        let (mut drop_d, mut drop_g) = (0.0f64, 0.0f64);
        for _ in 0..cfg.samples / 4 + 1 {
            let xi = random_boundary_point(&sp, rng, SAMPLE_DEPTH);
            let eta = random_boundary_point(&sp, rng, SAMPLE_DEPTH);
            let h = sp.horizon().min(SAMPLE_T);
            let (mut prev_d, mut prev_g) = (0.0, 0.0);
            for i in 1..=64 {
                let t = h * i as f64 / 64.0;
                let (d, g) = (sp.displacement(&xi, &eta, t)?, ray_product_at(&sp, &xi, &eta, t)?);
                drop_d = drop_d.max(prev_d - d);
                drop_g = drop_g.max(prev_g - g);
                (prev_d, prev_g) = (d, g);
            }
        }
        b.at_most(&format!("{name}.displacement_drop"), drop_d, 0.0);
        b.at_most(&format!("{name}.product_drop"), drop_g, 0.0);
    }
    Ok(())
}

fn epsilon_prime(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    for (name, p) in [("tree", cfg.tree_params()?), ("hyperbolic", cfg.h2_params()?)] {
        b.equal_within(&format!("{name}.epsilon_prime"), p.epsilon_prime(), (p.epsilon * p.delta).exp() - 1.0, 1e-15);
        b.at_most(&format!("{name}.epsilon_prime_cap"), p.epsilon_prime(), SQRT_2 - 1.0);
    }
    Ok(())
}

fn moran_axioms(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let a = cfg.moran_scale;
    for (name, sp) in model_spaces(cfg)?.into_iter().filter(|(n, _)| *n != "line") {
        let (mut excess, mut asym, mut undecided) = (f64::NEG_INFINITY, 0.0f64, 0usize);
        for _ in 0..cfg.samples {
            let [x, y, z] = [(); 3].map(|_| random_boundary_point(&sp, rng, SAMPLE_DEPTH));
            let d = |p: &BoundaryPoint, q: &BoundaryPoint| moran_metric(&sp, a, p, q, DEFAULT_MORAN_TOL);
            let vals = (|| Ok::<_, Error>((d(&x, &y)?, d(&y, &z)?, d(&x, &z)?, d(&y, &x)?)))();
            match vals {
                Ok((xy, yz, xz, yx)) => {
                    excess = excess.max(xz - xy - yz);
                    asym = asym.max((xy - yx).abs());
                }
                Err(Error::HorizonUndecidable { .. }) => undecided += 1,
                Err(e) => return Err(e),
            }
        }
        b.at_most(&format!("{name}.triangle_excess"), excess, 0.0);
        b.equal_within(&format!("{name}.asymmetry"), asym, 0.0, 0.0);
        b.info(&format!("{name}.undecidable_triples"), undecided as f64);
    }
    Ok(())
}

/// Crossing time of hyperbolic rays at angle `dt`: `sinh t = sinh(A/2)/sin(dt/2)`.
pub fn hyperbolic_moran_oracle(a: f64, dt: f64) -> f64 {
    1.0 / ((0.5 * a).sinh() / (0.5 * dt).sin().abs()).asinh()
}

fn moran_closed_forms(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let a = cfg.moran_scale;
    let tree = build_space(&cfg.tree)?;
    let t = tree.as_tree().ok_or(Error::PointMismatch("tree"))?;
    let edge = crate::spaces::tree::to_f64(t.edge_length);
    let (mut err_tree, mut err_plane, mut err_h2) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..cfg.samples {
        let (x, y) = (random_boundary_point(&tree, rng, SAMPLE_DEPTH), random_boundary_point(&tree, rng, SAMPLE_DEPTH));
        if let (BoundaryPoint::Tree(p), BoundaryPoint::Tree(q)) = (&x, &y) {
            if let Some(k) = p.divergence_index(q) {
                let oracle = 1.0 / (k as f64 * edge + a / 2.0);
                err_tree = err_tree.max((moran_metric(&tree, a, &x, &y, DEFAULT_MORAN_TOL)? - oracle).abs());
            }
        }
    }
    let plane = build_space(&SpaceSpec::plane())?;
    let h2 = build_space(&cfg.hyperbolic)?;
    for _ in 0..cfg.samples {
        let (u, v) = (rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(0.0..std::f64::consts::TAU));
        if (u - v).abs() < 1e-6 {
            continue;
        }
        let (x, y) = (BoundaryPoint::angle(u), BoundaryPoint::angle(v));
        let plane_oracle = 2.0 * (0.5 * (u - v)).sin().abs() / a;
        err_plane = err_plane.max((moran_metric(&plane, a, &x, &y, DEFAULT_MORAN_TOL)? - plane_oracle).abs());
        err_h2 = err_h2.max((moran_metric(&h2, a, &x, &y, DEFAULT_MORAN_TOL)? - hyperbolic_moran_oracle(a, u - v)).abs());
    }
    b.at_most("tree.error", err_tree, 0.0);
    b.at_most("plane.error", err_plane, 0.0);
    b.at_most("hyperbolic.error", err_h2, 0.0);
    Ok(())
}

fn tree_net(spec: &SpaceSpec, depth: u32) -> Result<(Space, Vec<BoundaryPoint>)> {
    let sp = build_space(spec)?;
    let net = sp.boundary_net(&NetResolution::Depth(depth))?;
    Ok((sp, net))
}

fn visual_tree_exact(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let (sp, net) = tree_net(&cfg.tree, cfg.tree_net_depth)?;
    let vm = VisualNetMetric::new(&sp, &cfg.tree_params()?, &net)?;
    let worst = vm.dist.iter().zip(&vm.rho).map(|(d, r)| (d - r).abs()).fold(0.0, f64::max);
    b.equal_within("max_chain_gain", worst, 0.0, 1e-12);
    b.info("net_points", net.len() as f64);
    Ok(())
}

fn visual_certificate(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let h2 = build_space(&cfg.hyperbolic)?;
    let net = h2.boundary_net(&NetResolution::Angles(cfg.h2_net))?;
    let params = cfg.h2_params()?;
    let vm = VisualNetMetric::new(&h2, &params, &net)?;
    b.at_most("certificate_violation", vm.certificate_violation(), 0.0);
    let single = crate::boundary::visual_metric(&h2, &params, &net, &net[1], &net[net.len() / 2])?;
    b.equal("single_source_vs_all_pairs", single, vm.get(1, net.len() / 2));
    b.info("epsilon_prime", params.epsilon_prime());
    Ok(())
}

/// Counts and worst violations of the two-sided comparison over the pairs
/// with `d_v ≤ B`.
struct SandwichStats {
    pairs: usize,
    lower: f64,
    upper: f64,
    equality: f64,
}

fn sandwich_stats(sp: &Space, vm: &VisualNetMetric, consts: &SandwichConstants, a: f64, net: &[BoundaryPoint]) -> Result<SandwichStats> {
    let (f1, f2) = (ComparisonFn::lower(consts), ComparisonFn::upper(consts));
    let mut st = SandwichStats { pairs: 0, lower: f64::NEG_INFINITY, upper: f64::NEG_INFINITY, equality: 0.0 };
    for i in 0..net.len() {
        for j in i + 1..net.len() {
            let dv = vm.get(i, j);
            if !(dv > 0.0 && dv <= consts.big_b) {
                continue;
            }
            let dm = moran_metric(sp, a, &net[i], &net[j], DEFAULT_MORAN_TOL)?;
            let (lo, hi) = (f1.eval(dv)?, f2.eval(dv)?);
            st.pairs += 1;
            st.lower = st.lower.max(lo - dm);
            st.upper = st.upper.max(dm - hi);
            st.equality = st.equality.max((dm - lo).abs());
        }
    }
    Ok(st)
}

/// `R` and the comparison constants for a tree net.
pub fn tree_constants(sp: &Space, net: &[BoundaryPoint], params: &MetricParams, s: f64, step: f64) -> Result<SandwichConstants> {
    sandwich_constants(params, estimate_r(sp, net, s, step)?, s)
}

fn sandwich_tree(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let (sp, net) = tree_net(&cfg.tree, cfg.tree_net_depth)?;
    let params = cfg.tree_params()?;
    let consts = tree_constants(&sp, &net, &params, cfg.s, cfg.r_step)?;
    let vm = VisualNetMetric::new(&sp, &params, &net)?;
    let st = sandwich_stats(&sp, &vm, &consts, params.moran_scale, &net)?;
    b.info("R", consts.r).info("B", consts.big_b);
    b.at_least("pairs_below_B", st.pairs as f64, 1.0);
    b.at_most("lower_violation", st.lower, 0.0);
    b.at_most("upper_violation", st.upper, 0.0);
    b.equal_within("equality_gap", st.equality, 0.0, 1e-12);
    Ok(())
}

/// The hyperbolic-plane net of the comparison checks: the reference circle
/// net, on which `R` is estimated, plus tight clusters around every sixth
/// reference angle so that some pairs have `d_v ≤ B`.
pub fn hyperbolic_sandwich_net(reference: &[BoundaryPoint]) -> Vec<BoundaryPoint> {
    let mut net = reference.to_vec();
    for (k, p) in reference.iter().enumerate().step_by(6) {
        if let BoundaryPoint::Angle(theta) = p {
            for j in 3..=8 {
                net.push(BoundaryPoint::angle(theta + 10f64.powi(-j) * (1.0 + k as f64 / 100.0)));
            }
        }
    }
    net
}

fn h2_constants(cfg: &ExperimentConfig, h2: &Space, params: &MetricParams) -> Result<SandwichConstants> {
    let reference = h2.boundary_net(&NetResolution::Angles(cfg.h2_net))?;
    sandwich_constants(params, estimate_r(h2, &reference, cfg.s, cfg.r_step)?, cfg.s)
}

fn sandwich_hyperbolic(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let h2 = build_space(&cfg.hyperbolic)?;
    let params = cfg.h2_params()?;
    let consts = h2_constants(cfg, &h2, &params)?;
    let net = hyperbolic_sandwich_net(&h2.boundary_net(&NetResolution::Angles(cfg.h2_net))?);
    let vm = VisualNetMetric::new(&h2, &params, &net)?;
    let st = sandwich_stats(&h2, &vm, &consts, params.moran_scale, &net)?;
    b.info("R", consts.r).info("B", consts.big_b);
    b.at_least("pairs_below_B", st.pairs as f64, 1.0);
    b.at_most("lower_violation", st.lower, 0.0);
    b.at_most("upper_violation", st.upper, 0.0);
    Ok(())
}

/// Worst values of `x²f″(x)`, `f(cx) − cf(x)` and `f(cx) + f((1−c)x) − f(x)`
/// over a log-spaced grid of `points` values in `(10⁻⁶, e⁻²)` and
/// `c ∈ {0.1, …, 0.9}`.
pub fn concavity_margins(f: &ComparisonFn, points: usize) -> Result<(f64, f64, f64)> {
    let (lo, hi) = (1e-6f64.ln(), -2.0);
    let (mut curv, mut scale, mut split) = (f64::NEG_INFINITY, f64::INFINITY, f64::INFINITY);
    for i in 0..points {
        let x = (lo + (hi - lo) * (i as f64 + 0.5) / points as f64).exp();
        let h = 1e-3 * x;
        let second = (f.eval(x + h)? - 2.0 * f.eval(x)? + f.eval(x - h)?) / (h * h);
        curv = curv.max(second * x * x);
        let fx = f.eval(x)?;
        for c in (1..=9).map(|k| k as f64 / 10.0) {
            scale = scale.min(f.eval(c * x)? - c * fx);
            split = split.min(f.eval(c * x)? + f.eval((1.0 - c) * x)? - fx);
        }
    }
    Ok((curv, scale, split))
}

fn comparison_concavity(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let (sp, net) = tree_net(&cfg.tree, cfg.tree_net_depth)?;
    let tree_c = tree_constants(&sp, &net, &cfg.tree_params()?, cfg.s, cfg.r_step)?;
    let h2 = build_space(&cfg.hyperbolic)?;
    let h2_c = h2_constants(cfg, &h2, &cfg.h2_params()?)?;
    for (name, c) in [("tree", tree_c), ("hyperbolic", h2_c)] {
        let (curv, scale, split) = concavity_margins(&ComparisonFn::lower(&c), 10_000)?;
        b.holds(&format!("{name}.second_derivative_negative"), curv < 0.0);
        b.info(&format!("{name}.max_scaled_second_derivative"), curv);
        b.at_least(&format!("{name}.scaling_margin"), scale, 0.0);
        b.at_least(&format!("{name}.splitting_margin"), split, 0.0);
    }
    Ok(())
}

fn window_margins(sp: &Space, net: &[BoundaryPoint], s: f64, step: f64, b: &mut CheckBuilder, name: &str) -> Result<()> {
    let delta = sp.require_delta()?;
    let r = estimate_r(sp, net, s, step)?;
    let t_max = LIMIT_T.min(sp.horizon());
    let (mut below, mut above) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for i in 0..net.len() {
        for j in i + 1..net.len() {
            let Some(gp) = gromov_product_boundary(sp, &net[i], &net[j], t_max, 1e-9)?.value.finite() else {
                continue;
            };
            for k in 0..8 {
                let r1 = r + k as f64 * step;
                if r1 > t_max {
                    break;
                }
                let mid = ray_product_at(sp, &net[i], &net[j], r1)?;
                below = below.max(gp - 2.0 * delta - s - mid);
                above = above.max(mid - gp);
            }
        }
    }
    b.info(&format!("{name}.R"), r);
    b.at_most(&format!("{name}.lower_violation"), below, 0.0);
    b.at_most(&format!("{name}.upper_violation"), above, 0.0);
    Ok(())
}

fn ray_product_window(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let (sp, net) = tree_net(&cfg.tree, cfg.tree_net_depth)?;
    window_margins(&sp, &net, cfg.s, cfg.r_step, b, "tree")?;
    let h2 = build_space(&cfg.hyperbolic)?;
    let net = h2.boundary_net(&NetResolution::Angles(cfg.h2_net))?;
    window_margins(&h2, &net, cfg.s, cfg.r_step, b, "hyperbolic")
}

fn circle(cfg: &ExperimentConfig) -> Result<(Space, Vec<BoundaryPoint>)> {
    let plane = build_space(&SpaceSpec::plane())?;
    let net = plane.boundary_net(&NetResolution::Angles(cfg.circle_net))?;
    Ok((plane, net))
}

fn greedy_separation(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let params = MetricParams::moran(cfg.moran_scale)?;
    let (sp, net) = tree_net(&cfg.tree, cfg.tree_net_depth)?;
    let dm = DistanceMatrix::moran(&sp, cfg.moran_scale, &net)?;
    let (plane, cnet) = circle(cfg)?;
    let cdm = DistanceMatrix::moran(&plane, cfg.moran_scale, &cnet)?;
    for (name, dm, net, colors) in [("tree", &dm, &net, 1), ("circle", &cdm, &cnet, 2)] {
        let l = cfg.profile_scale_factors[0] * dm.spacing();
        let opts = GreedyOptions { absorption: None, max_merge_diameter: Some(cfg.merge_factor * l) };
        let cover = greedy_colored_cover(dm, &params, net, l, colors, &opts)?;
        let st = cover_stats(dm, &cover, Some(l))?;
        let sep = st.min_family_separation.iter().copied().fold(f64::INFINITY, f64::min);
        b.at_least(&format!("{name}.separation"), sep, l);
        b.info(&format!("{name}.mesh"), st.mesh);
    }
    Ok(())
}

fn order_recount(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let params = MetricParams::moran(cfg.moran_scale)?;
    let (plane, net) = circle(cfg)?;
    let dm = DistanceMatrix::moran(&plane, cfg.moran_scale, &net)?;
    let l = cfg.profile_scale_factors[0] * dm.spacing();
    let opts = GreedyOptions { absorption: None, max_merge_diameter: Some(cfg.merge_factor * l) };
    let cover = greedy_colored_cover(&dm, &params, &net, l, 2, &opts)?;
    let recount = (0..net.len()).map(|i| cover.elements.iter().filter(|e| e.members.contains(&i)).count()).max().unwrap_or(0);
    let st = cover_stats(&dm, &cover, Some(l))?;
    b.equal("order", st.order as f64, recount as f64);
    b.equal("multiplicity_max", *multiplicities(&cover).iter().max().unwrap_or(&0) as f64, recount as f64);
    Ok(())
}

fn capacity_transfer(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let depth = 5;
    let (sp, net) = tree_net(&cfg.tree, depth)?;
    let params = cfg.tree_params()?;
    let consts = tree_constants(&sp, &net, &params, cfg.s, cfg.r_step)?;
    let cover = class_cover(MetricKind::Visual, params, net.clone(), &cylinder_classes(&net, depth as usize - 1)?)?;
    let mut cases = vec![("tree", sp, cover, consts)];
    let h2 = build_space(&cfg.hyperbolic)?;
    let h2p = cfg.h2_params()?;
    let h2c = h2_constants(cfg, &h2, &h2p)?;
    let width = 2.0 * (0.5 * h2c.big_b.min((-2f64).exp())).powf(1.0 / h2p.epsilon).asin();
    let (cnet, groups) = clustered_circle(6, 3, width);
    cases.push(("hyperbolic", h2, class_cover(MetricKind::Visual, h2p, cnet, &groups)?, h2c));
    for (name, sp, cover, consts) in cases {
        let vis = DistanceMatrix::visual(&sp, &cover.params, &cover.net)?;
        let mor = DistanceMatrix::moran(&sp, cover.params.moran_scale, &cover.net)?;
        let moran_cover = crate::covers::Cover { metric_kind: MetricKind::Moran, ..cover.clone() };
        let rep = capacity_transfer_check(&cover_stats(&vis, &cover, None)?, &cover_stats(&mor, &moran_cover, None)?, &consts)?;
        b.holds(&format!("{name}.mesh_bound"), rep.mesh_ok);
        b.holds(&format!("{name}.lebesgue_bound"), rep.lebesgue_ok && rep.concavity_ok);
        b.at_least(&format!("{name}.capacity_margin"), rep.capacity_moran - rep.required_capacity, 0.0);
        b.info(&format!("{name}.lambda"), rep.lambda);
    }
    Ok(())
}

fn profile_estimate(
    b: &mut CheckBuilder,
    name: &str,
    cfg: &ExperimentConfig,
    sp: &Space,
    net: &[BoundaryPoint],
    expected: usize,
) -> Result<Vec<Option<usize>>> {
    let dm = DistanceMatrix::moran(sp, cfg.moran_scale, net)?;
    let scales: Vec<f64> = cfg.profile_scale_factors.iter().map(|f| f * dm.spacing()).collect();
    let prof = cdim_profile(&dm, &MetricParams::moran(cfg.moran_scale)?, net, &scales, cfg.max_order, Some(cfg.merge_factor))?;
    b.equal(&format!("{name}.estimate"), prof.estimate.map_or(f64::INFINITY, |e| e as f64), expected as f64);
    for e in &prof.entries {
        b.info(&format!("{name}.families@{:.4}", e.lambda), e.families.map_or(f64::INFINITY, |f| f as f64));
    }
    Ok(prof.entries.iter().map(|e| e.families).collect())
}

fn cdim_tree(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let (sp, net) = tree_net(&cfg.tree, cfg.tree_net_depth)?;
    profile_estimate(b, "tree", cfg, &sp, &net, 0).map(drop)
}

fn cdim_circle(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let (plane, net) = circle(cfg)?;
    profile_estimate(b, "circle", cfg, &plane, &net, 1).map(drop)
}

pub fn product_net(depth: u32, alpha_grid: usize) -> NetResolution {
    NetResolution::Product {
        first: Box::new(NetResolution::Depth(depth)),
        second: Box::new(NetResolution::Depth(depth)),
        alpha_grid,
    }
}

fn cdim_product(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let sp = build_space(&cfg.product)?;
    let net = sp.boundary_net(&product_net(cfg.product_net_depth, cfg.product_alpha_grid))?;
    profile_estimate(b, "product", cfg, &sp, &net, 1).map(drop)
}

fn profile_refinement(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let sp = build_space(&cfg.tree)?;
    let coarse_depth = cfg.tree_net_depth.saturating_sub(1).max(1);
    let coarse = sp.boundary_net(&NetResolution::Depth(coarse_depth))?;
    let fine = sp.boundary_net(&NetResolution::Depth(cfg.tree_net_depth))?;
    let params = MetricParams::moran(cfg.moran_scale)?;
    let dm_c = DistanceMatrix::moran(&sp, cfg.moran_scale, &coarse)?;
    let dm_f = DistanceMatrix::moran(&sp, cfg.moran_scale, &fine)?;
    let scales: Vec<f64> = cfg.profile_scale_factors.iter().map(|f| f * dm_c.spacing()).collect();
    let pc = cdim_profile(&dm_c, &params, &coarse, &scales, cfg.max_order, None)?;
    let pf = cdim_profile(&dm_f, &params, &fine, &scales, cfg.max_order, None)?;
    for (c, f) in pc.entries.iter().zip(&pf.entries) {
        let fam = |x: Option<usize>| x.map_or(f64::INFINITY, |v| v as f64);
        b.at_most(&format!("families@{:.4}", c.lambda), fam(f.families), fam(c.families));
    }
    Ok(())
}

fn buildings(cfg: &ExperimentConfig) -> Result<Vec<(&'static str, BuildingHandle)>> {
    Ok(vec![
        ("tree", BuildingHandle::from_spec(&cfg.pullback.tree)?),
        ("product", BuildingHandle::from_spec(&cfg.pullback.product)?),
    ])
}

fn retraction_contracting(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    for (name, bh) in buildings(cfg)? {
        let sp = &bh.space;
        let p = sp.basepoint();
        let (mut stretch, mut radial, mut moved) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
        for _ in 0..cfg.samples {
            let (x, y) = (random_point(sp, rng)?, random_point(sp, rng)?);
            let (rx, ry) = (bh.apartment_retraction(&x)?, bh.apartment_retraction(&y)?);
            stretch = stretch.max(sp.distance(&rx, &ry)? - sp.distance(&x, &y)?);
            radial = radial.max((sp.distance(&p, &rx)? - sp.distance(&p, &x)?).abs());
            let on = bh.apartment_retraction(&rx)?;
            moved = moved.max(sp.distance(&on, &rx)?);
        }
        b.at_most(&format!("{name}.stretch"), stretch, 0.0);
        b.equal(&format!("{name}.radial_change"), radial, 0.0);
        b.equal(&format!("{name}.apartment_displacement"), moved, 0.0);
    }
    Ok(())
}

fn retraction_rays(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    for (name, bh) in buildings(cfg)? {
        let sp = &bh.space;
        let mut worst = 0.0f64;
        for _ in 0..cfg.samples {
            let xi = random_boundary_point(sp, rng, SAMPLE_DEPTH);
            let (s, t) = (random_time(sp, rng, &xi, SAMPLE_T), random_time(sp, rng, &xi, SAMPLE_T));
            let rs = bh.apartment_retraction(&sp.ray_eval(&xi, s)?)?;
            let rt = bh.apartment_retraction(&sp.ray_eval(&xi, t)?)?;
            worst = worst.max((sp.distance(&rs, &rt)? - (s - t).abs()).abs());
        }
        b.at_most(&format!("{name}.speed_error"), worst, 0.0);
    }
    Ok(())
}

/// Preimage-component bound on `count` random (tree, segment)
/// configurations: branching 2–4, truncation depth 3–8, segment endpoints on
/// the half-integer grid. Returns the worst `diameter − bound` and the best
/// fitting `S = (diameter − M)/R` over segments of positive length.
pub fn component_bound_trial(rng: &mut ChaCha8Rng, count: usize, lebesgue_eps: f64) -> Result<(f64, f64, usize)> {
    let (mut worst, mut best_s, mut comps) = (f64::NEG_INFINITY, 0.0f64, 0usize);
    for _ in 0..count {
        let depth = rng.gen_range(3..=8u32);
        let branching = if depth > 6 { rng.gen_range(2..=3u32) } else { rng.gen_range(2..=4u32) };
        let bh = BuildingHandle::from_spec(&SpaceSpec::tree(branching, depth))?;
        let m = bh.chamber_diameter();
        let half = 2 * depth as i32;
        let (u, v) = (rng.gen_range(-half..=half) as f64 / 2.0, rng.gen_range(-half..=half) as f64 / 2.0);
        let (lo, hi) = (u.min(v), u.max(v));
        let bounds = BuildingBounds::new(m, 2.0 * m, lebesgue_eps, hi - lo, 2.0, 1.0)?;
        for c in preimage_components(&bh, &ApartmentRegion::Intervals(vec![(lo, hi)]), 0.5)? {
            worst = worst.max(c.diameter - bounds.component_bound());
            if hi > lo {
                best_s = best_s.max((c.diameter - m) / (hi - lo));
            }
            comps += 1;
        }
    }
    Ok((worst, best_s, comps))
}

fn component_bound(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let (worst, best_s, comps) = component_bound_trial(rng, cfg.pullback.segments, cfg.pullback.lebesgue_eps)?;
    b.at_most("diameter_minus_bound", worst, 0.0);
    b.info("best_fit_S", best_s).info("components", comps as f64);
    b.info("M", 1.0).info("r", 2.0).info("lebesgue_eps", cfg.pullback.lebesgue_eps);
    Ok(())
}

fn record_pullback(b: &mut CheckBuilder, tag: &str, rep: &crate::buildings::PullbackReport) {
    b.at_least(&format!("{tag}.v_separation"), rep.v_separation, rep.v_separation_bound);
    b.at_most(&format!("{tag}.w_diameter"), rep.w_diameter, rep.w_diameter_bound);
    b.at_least(&format!("{tag}.moran_separation"), rep.moran_separation, rep.moran_separation_bound);
    b.at_most(&format!("{tag}.moran_diameter"), rep.moran_diameter, rep.moran_diameter_bound);
    b.equal(&format!("{tag}.families"), rep.families as f64, rep.apartment_families as f64);
}

/// Pulls `apartment_cover` back for every `L` and records the bound checks.
pub fn pullback_campaign(
    bh: &BuildingHandle,
    net: &[BoundaryPoint],
    apartment_cover: &crate::covers::Cover,
    l_values: &[f64],
    c: f64,
    a: f64,
    lebesgue_eps: f64,
) -> Result<Vec<(f64, crate::buildings::PullbackReport)>> {
    let moran = DistanceMatrix::moran(&bh.space, a, net)?;
    let bounds = BuildingBounds::for_pullback(bh, 2.0 * bh.chamber_diameter(), lebesgue_eps, c, a)?;
    l_values
        .iter()
        .map(|&l| {
            let pulled = pullback_cover(bh, apartment_cover, l, c, a, net)?;
            Ok((l, pullback_bounds_check(bh, &pulled, l, c, a, &bounds, &moran)?))
        })
        .collect()
}

fn pullback_tree(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let p = &cfg.pullback;
    let bh = BuildingHandle::from_spec(&p.tree)?;
    let net = bh.space.boundary_net(&NetResolution::Depth(p.tree_net_depth))?;
    let cover = line_ends_cover(bh.apartment_net(0)?, p.a)?;
    for (l, rep) in pullback_campaign(&bh, &net, &cover, &p.l_values, p.c, p.a, p.lebesgue_eps)? {
        record_pullback(b, &format!("L={l}"), &rep);
    }
    Ok(())
}

fn pullback_product(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let p = &cfg.pullback;
    let bh = BuildingHandle::from_spec(&p.product)?;
    let net = bh.space.boundary_net(&product_net(p.product_net_depth, p.product_alpha_grid))?;
    let cover = alternating_pair_cover(bh.apartment_net(4 * p.product_alpha_grid)?, p.a)?;
    for (l, rep) in pullback_campaign(&bh, &net, &cover, &p.product_l_values, p.c, p.a, p.lebesgue_eps)? {
        record_pullback(b, &format!("L={l}"), &rep);
    }
    Ok(())
}

fn annulus_plane(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let an = &cfg.annulus;
    let table = annulus_cover_experiment(&build_space(&SpaceSpec::plane())?, an.a, an.width, &an.plane_d, an.c)?;
    b.at_most("mesh_spread", table.mesh_spread(), 1.05);
    for r in &table.rows {
        b.equal_within(&format!("D={}.lebesgue", r.d), r.lebesgue, 2.0 * an.c * an.a, 1e-12);
        b.equal(&format!("D={}.M", r.d), r.m, 2.0 * an.a * (r.d + an.width) / r.d);
    }
    Ok(())
}

fn annulus_tree(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let an = &cfg.annulus;
    let depth = (an.tree_d.last().copied().unwrap_or(0.0) + an.width).ceil() as u32 + 1;
    let tree = build_space(&SpaceSpec::tree(an.tree_branching, depth))?;
    let table = annulus_cover_experiment(&tree, an.a, an.width, &an.tree_d, an.c)?;
    b.at_least("M_slope", table.m_slope(), 0.5);
    for r in &table.rows {
        b.info(&format!("D={}.M", r.d), r.m);
    }
    Ok(())
}

fn quasisymmetry_tree(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let tree = build_space(&cfg.tree)?;
    let (a, ap) = (cfg.moran_scale, cfg.a_prime);
    let rows = quasisymmetry_distortion(&tree, a, ap, cfg.triples, cfg.seed)?;
    let worst = rows
        .iter()
        .flat_map(|s| [(s.d_xa, s.d_xa_prime), (s.d_xb, s.d_xb_prime)])
        .map(|(d, dp)| (dp - 1.0 / (1.0 / d + (ap - a) / 2.0)).abs())
        .fold(0.0, f64::max);
    b.at_most("closed_form_error", worst, 0.0);
    Ok(())
}

fn quasisymmetry_diagonal(cfg: &ExperimentConfig, _: &mut ChaCha8Rng, b: &mut CheckBuilder) -> Result<()> {
    let plane = build_space(&SpaceSpec::plane())?;
    let rows = quasisymmetry_distortion(&plane, cfg.moran_scale, cfg.moran_scale, cfg.triples, cfg.seed)?;
    let worst = rows.iter().map(|s| (s.ratio - s.ratio_prime).abs()).fold(0.0, f64::max);
    b.equal_within("off_diagonal", worst, 0.0, 0.0);
    b.holds("finite_ratios", rows.iter().all(|s| s.ratio.is_finite() && s.ratio > 0.0));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_plentiful() {
        let mut names = check_names();
        assert!(names.len() >= 20);
        names.sort();
        names.dedup();
        assert_eq!(names.len(), CHECKS.len());
    }

    #[test]
    fn hyperbolic_oracle_antipodal() {
        assert!((hyperbolic_moran_oracle(1.0, std::f64::consts::PI) - 2.0).abs() < 1e-12);
    }
}
