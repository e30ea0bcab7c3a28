//! The `cat0lab` command line.
//!
//! Exit codes: 0 on success, 1 when a verification or bound check fails, 2
//! on usage, configuration or evaluation errors.
//!
//! Boundary points are written as
//! * tree ends: dot-separated labels followed by a zero tail, `0.2.1`, or
//!   with an explicit period in parentheses, `0.2(1.0)`;
//! * line ends: `+` or `-`;
//! * plane and hyperbolic-plane directions: an angle in radians;
//! * product directions: `first;second@alpha`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::boundary::{moran_metric, visual_metric, MetricParams, DEFAULT_MORAN_TOL};
use crate::buildings::{BuildingBounds, BuildingHandle};
use crate::covers::{cover_stats, greedy_colored_cover, DistanceMatrix, GreedyOptions, MetricKind};
use crate::experiments::suite::{product_net, pullback_campaign};
use crate::experiments::witnesses::{alternating_pair_cover, line_ends_cover};
use crate::experiments::{
    annulus_cover_experiment, quasisymmetry_distortion, run_verification_suite, ExperimentConfig, Status, SCHEMA_VERSION,
};
use crate::spaces::{build_space, BoundaryPoint, NetResolution, ProductEnd, Sign, Space, SpaceKind, SpaceSpec, TreeEnd};

#[derive(Debug, Parser)]
#[command(name = "cat0lab", version, about = "Boundary metrics, covers and building pullbacks for model CAT(0) spaces")]
struct Cli {
    /// Experiment configuration (JSON); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Configuration override, applied after the file is parsed.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Moran,
    Visual,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Describe a space document.
    SpaceInfo {
        /// Space spec file, or inline JSON.
        #[arg(long)]
        space: String,
    },
    /// Distance between two boundary points.
    Metric {
        /// Space spec file, or inline JSON.
        #[arg(long)]
        space: String,
        #[arg(long, value_enum, default_value = "moran")]
        kind: KindArg,
        /// Two boundary points separated by a comma.
        #[arg(long)]
        pair: String,
        /// Net used by the visual metric's chain infimum.
        #[arg(long)]
        net: Option<String>,
        /// Visual parameter; defaults to the configured one.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Greedy colored cover of a boundary net, with its statistics.
    Cover {
        /// Space spec file, or inline JSON.
        #[arg(long)]
        space: String,
        #[arg(long, value_enum, default_value = "moran")]
        kind: KindArg,
        /// Separation L.
        #[arg(long)]
        l: f64,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long)]
        net: Option<String>,
        /// Allow merges up to this multiple of L.
        #[arg(long)]
        merge: Option<f64>,
        /// Visual parameter; defaults to the configured one.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Pull the standard apartment cover back to the building.
    Pullback {
        /// Space spec file, or inline JSON.
        #[arg(long)]
        space: String,
        #[arg(long, value_delimiter = ',')]
        l: Vec<f64>,
        #[arg(long)]
        net: Option<String>,
    },
    /// Run the verification suite.
    Verify,
    #[command(subcommand)]
    Experiment(ExperimentVerb),
}

#[derive(Debug, Subcommand)]
enum ExperimentVerb {
    /// Annulus cover statistics as a function of the radius D.
    Annulus {
        /// Space spec file, or inline JSON.
        #[arg(long)]
        space: String,
        /// Comma-separated radii.
        #[arg(long = "D", value_delimiter = ',')]
        d: Vec<f64>,
        /// Annulus width.
        #[arg(long)]
        width: Option<f64>,
        /// Sphere covers get Lebesgue number 2c/D.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Distance ratios of random triples under two Moran scales.
    Quasisymmetry {
        /// Space spec file, or inline JSON.
        #[arg(long)]
        space: String,
        /// Second Moran scale.
        #[arg(long)]
        a_prime: Option<f64>,
        /// Number of random triples.
        #[arg(long)]
        triples: Option<usize>,
    },
}

#[derive(Debug)]
enum Failure {
    Checks(String),
    Usage(String),
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Usage(format!("error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses `argv` (program name first), runs the verb and returns the exit code.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(Failure::Checks(msg)) => {
            eprintln!("{msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("{msg}");
            2
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = load_config(cli.config.as_deref(), &cli.overrides)?;
    let out = cli.out.as_deref();
    match cli.verb {
        Verb::SpaceInfo { space } => {
            require_json(cli.format, "space-info")?;
            let (spec, sp) = load_space(&space)?;
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "spec": spec,
                "kind": sp.kind(),
                "delta": sp.delta(),
                "horizon": sp.horizon(),
                "geodesics_extend_uniquely": sp.geodesics_extend_uniquely(),
                "basepoint": sp.basepoint(),
            });
            emit(out, pretty(&doc)?)
        }
        Verb::Metric { space, kind, pair, net, epsilon } => {
            let (_, sp) = load_space(&space)?;
            let (a, b) = pair.split_once(',').ok_or_else(|| usage(format!("--pair expects two points, got {pair:?}")))?;
            let (a, b) = (parse_point(&sp, a)?, parse_point(&sp, b)?);
            let value = match kind {
                KindArg::Moran => moran_metric(&sp, cfg.moran_scale, &a, &b, DEFAULT_MORAN_TOL)?,
                KindArg::Visual => {
                    let mut points = resolve_net(&sp, net.as_deref(), &cfg)?;
                    for p in [&a, &b] {
                        if !points.iter().any(|q| sp.same_direction(p, q)) {
                            points.push(p.clone());
                        }
                    }
                    visual_metric(&sp, &visual_params(&sp, &cfg, epsilon)?, &points, &a, &b)?
                }
            };
            match cli.format {
                Some(Format::Json) => emit(
                    out,
                    pretty(&json!({ "schema_version": SCHEMA_VERSION, "kind": metric_kind(kind), "value": value }))?,
                ),
                Some(Format::Csv) => emit(out, format!("kind,value\n{},{value}\n", kind_name(kind))),
                None => emit(out, format!("{}\n", short_number(value))),
            }
        }
        Verb::Cover { space, kind, l, colors, net, merge, epsilon } => {
            require_json(cli.format, "cover")?;
            let (_, sp) = load_space(&space)?;
            let points = resolve_net(&sp, net.as_deref(), &cfg)?;
            let params = match kind {
                KindArg::Moran => MetricParams::moran(cfg.moran_scale)?,
                KindArg::Visual => visual_params(&sp, &cfg, epsilon)?,
            };
            let dm = DistanceMatrix::for_kind(&sp, metric_kind(kind), &params, &points)?;
            let opts = GreedyOptions { absorption: None, max_merge_diameter: merge.map(|f| f * l) };
            let cover = greedy_colored_cover(&dm, &params, &points, l, colors, &opts)?;
            let stats = cover_stats(&dm, &cover, Some(l))?;
            emit(out, pretty(&json!({ "schema_version": SCHEMA_VERSION, "cover": cover, "stats": stats }))?)
        }
        Verb::Pullback { space, l, net } => {
            require_json(cli.format, "pullback")?;
            let (spec, _) = load_space(&space)?;
            let bh = BuildingHandle::from_spec(&spec)?;
            let p = &cfg.pullback;
            let (apartment_cover, default_l) = match bh.rank() {
                1 => (line_ends_cover(bh.apartment_net(0)?, p.a)?, &p.l_values),
                _ => (alternating_pair_cover(bh.apartment_net(4 * p.product_alpha_grid)?, p.a)?, &p.product_l_values),
            };
            let l_values = if l.is_empty() { default_l.clone() } else { l };
            let points = match net {
                Some(text) => parse_net(&bh.space, &text)?,
                None if bh.rank() == 1 => bh.space.boundary_net(&NetResolution::Depth(p.tree_net_depth))?,
                None => bh.space.boundary_net(&product_net(p.product_net_depth, p.product_alpha_grid))?,
            };
            let bounds = BuildingBounds::for_pullback(&bh, 2.0 * bh.chamber_diameter(), p.lebesgue_eps, p.c, p.a)?;
            let reports = pullback_campaign(&bh, &points, &apartment_cover, &l_values, p.c, p.a, p.lebesgue_eps)?;
            let passed = reports.iter().all(|(_, r)| r.passed());
            let reports: Vec<_> = reports.into_iter().map(|(_, r)| r).collect();
            let doc = json!({ "schema_version": SCHEMA_VERSION, "bounds": bounds, "reports": reports, "passed": passed });
            emit(out, pretty(&doc)?)?;
            if passed {
                Ok(())
            } else {
                Err(Failure::Checks("pullback bounds violated".into()))
            }
        }
        Verb::Verify => {
            let report = run_verification_suite(&cfg)?;
            let text = match cli.format {
                Some(Format::Csv) => {
                    let mut s = String::from("name,status\n");
                    for c in &report.checks {
                        s.push_str(&format!("{},{}\n", c.name, serde_json::to_value(c.status).map_err(json_err)?.as_str().unwrap_or("")));
                    }
                    s
                }
                _ => pretty(&report)?,
            };
            emit(out, text)?;
            if report.all_passed() {
                Ok(())
            } else {
                let failed: Vec<_> = report.checks.iter().filter(|c| c.status != Status::Pass).map(|c| c.name.as_str()).collect();
                Err(Failure::Checks(format!("failed checks: {}", failed.join(", "))))
            }
        }
        Verb::Experiment(ExperimentVerb::Annulus { space, d, width, c }) => {
            let (_, sp) = load_space(&space)?;
            let an = &cfg.annulus;
            let d = if !d.is_empty() {
                d
            } else if sp.kind() == SpaceKind::Tree {
                an.tree_d.clone()
            } else {
                an.plane_d.clone()
            };
            let table = annulus_cover_experiment(&sp, an.a, width.unwrap_or(an.width), &d, c.unwrap_or(an.c))?;
            match cli.format {
                Some(Format::Json) => emit(out, pretty(&json!({ "schema_version": SCHEMA_VERSION, "table": table }))?),
                _ => emit(out, table.to_csv()),
            }
        }
        Verb::Experiment(ExperimentVerb::Quasisymmetry { space, a_prime, triples }) => {
            let (_, sp) = load_space(&space)?;
            let rows = quasisymmetry_distortion(
                &sp,
                cfg.moran_scale,
                a_prime.unwrap_or(cfg.a_prime),
                triples.unwrap_or(cfg.triples),
                cfg.seed,
            )?;
            match cli.format {
                Some(Format::Csv) => {
                    let mut s = String::from("d_xa,d_xb,d_xa_prime,d_xb_prime,ratio,ratio_prime\n");
                    for r in &rows {
                        s.push_str(&format!(
                            "{},{},{},{},{},{}\n",
                            r.d_xa, r.d_xb, r.d_xa_prime, r.d_xb_prime, r.ratio, r.ratio_prime
                        ));
                    }
                    emit(out, s)
                }
                _ => emit(out, pretty(&json!({ "schema_version": SCHEMA_VERSION, "samples": rows }))?),
            }
        }
    }
}

fn json_err(e: serde_json::Error) -> Failure {
    usage(format!("error: cannot serialize output: {e}"))
}

fn pretty<T: Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(json_err)
}

fn emit(out: Option<&Path>, text: String) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("error: cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn require_json(format: Option<Format>, verb: &str) -> CliResult<()> {
    match format {
        Some(Format::Csv) => Err(usage(format!("error: {verb} has no CSV output"))),
        _ => Ok(()),
    }
}

fn metric_kind(k: KindArg) -> MetricKind {
    match k {
        KindArg::Moran => MetricKind::Moran,
        KindArg::Visual => MetricKind::Visual,
    }
}

fn kind_name(k: KindArg) -> &'static str {
    match k {
        KindArg::Moran => "moran",
        KindArg::Visual => "visual",
    }
}

/// Twelve significant digits with trailing zeros removed.
fn short_number(v: f64) -> String {
    if !v.is_finite() || v == 0.0 {
        return format!("{v}");
    }
    let digits = (11 - v.abs().log10().floor() as i32).max(0) as usize;
    let s = format!("{v:.digits$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Reads the configuration (or the defaults), applies `key=value`
/// overrides and validates the result. The file itself is never written.
fn load_config(path: Option<&Path>, overrides: &[String]) -> CliResult<ExperimentConfig> {
    let mut doc = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("error: cannot read config {}: {e}", p.display())))?;
            serde_json::from_str::<Value>(&text)
                .map_err(|e| usage(format!("error: config {} is not valid JSON: {e}", p.display())))?
        }
        None => serde_json::to_value(ExperimentConfig::default()).map_err(json_err)?,
    };
    for ov in overrides {
        apply_override(&mut doc, ov)?;
    }
    let cfg: ExperimentConfig =
        serde_json::from_value(doc).map_err(|e| usage(format!("error: config schema violation: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

fn apply_override(doc: &mut Value, ov: &str) -> CliResult<()> {
    let (key, raw) = ov.split_once('=').ok_or_else(|| usage(format!("error: override {ov:?} is not KEY=VALUE")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| usage(format!("error: override key {key:?} does not name a config field")))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Err(usage(format!("error: empty override key in {ov:?}")))
}

/// A space from a spec file, or from inline JSON when the argument starts
/// with `{`.
fn load_space(arg: &str) -> CliResult<(SpaceSpec, Space)> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| usage(format!("error: cannot read space {arg}: {e}")))?
    };
    let spec: SpaceSpec =
        serde_json::from_str(&text).map_err(|e| usage(format!("error: space schema violation in {arg}: {e}")))?;
    let space = build_space(&spec)?;
    Ok((spec, space))
}

fn visual_params(sp: &Space, cfg: &ExperimentConfig, epsilon: Option<f64>) -> CliResult<MetricParams> {
    let delta = sp.require_delta()?;
    let eps = epsilon.unwrap_or(if sp.kind() == SpaceKind::Tree { cfg.epsilon } else { cfg.h2_epsilon });
    Ok(MetricParams::new(eps, delta, cfg.moran_scale)?)
}

fn default_resolution(sp: &Space, cfg: &ExperimentConfig) -> NetResolution {
    match sp {
        Space::Tree(_) => NetResolution::Depth(cfg.tree_net_depth),
        Space::Line { .. } => NetResolution::Signs,
        Space::Plane { .. } => NetResolution::Angles(cfg.circle_net),
        Space::Hyperbolic { .. } => NetResolution::Angles(cfg.h2_net),
        Space::Product(a, b) => NetResolution::Product {
            first: Box::new(factor_resolution(a, cfg.product_net_depth as usize)),
            second: Box::new(factor_resolution(b, cfg.product_net_depth as usize)),
            alpha_grid: cfg.product_alpha_grid,
        },
    }
}

fn factor_resolution(sp: &Space, k: usize) -> NetResolution {
    match sp {
        Space::Tree(_) => NetResolution::Depth(k as u32),
        Space::Line { .. } => NetResolution::Signs,
        _ => NetResolution::Angles(k.max(1)),
    }
}

fn resolve_net(sp: &Space, text: Option<&str>, cfg: &ExperimentConfig) -> CliResult<Vec<BoundaryPoint>> {
    match text {
        Some(t) => parse_net(sp, t),
        None => Ok(sp.boundary_net(&default_resolution(sp, cfg))?),
    }
}

/// Net syntax: a tree depth, a number of angles, `signs` for the line, and
/// `k:g` for products (factor resolution `k`, `g` values of α).
fn parse_net(sp: &Space, text: &str) -> CliResult<Vec<BoundaryPoint>> {
    let bad = || usage(format!("error: cannot parse net {text:?} for a {}", sp.kind().name()));
    let res = match sp {
        Space::Line { .. } => NetResolution::Signs,
        Space::Product(a, b) => {
            let (k, g) = text.split_once(':').ok_or_else(bad)?;
            let k: usize = k.trim().parse().map_err(|_| bad())?;
            NetResolution::Product {
                first: Box::new(factor_resolution(a, k)),
                second: Box::new(factor_resolution(b, k)),
                alpha_grid: g.trim().parse().map_err(|_| bad())?,
            }
        }
        Space::Tree(_) => NetResolution::Depth(text.trim().parse().map_err(|_| bad())?),
        _ => NetResolution::Angles(text.trim().parse().map_err(|_| bad())?),
    };
    Ok(sp.boundary_net(&res)?)
}

/// Parses a boundary point in the syntax of the module documentation.
fn parse_point(sp: &Space, text: &str) -> CliResult<BoundaryPoint> {
    let text = text.trim();
    let bad = |why: &str| usage(format!("error: cannot parse boundary point {text:?} for a {}: {why}", sp.kind().name()));
    match sp {
        Space::Tree(_) => {
            let labels = |s: &str| -> CliResult<Vec<u32>> {
                s.split('.')
                    .filter(|p| !p.is_empty())
                    .map(|p| p.trim().parse::<u32>().map_err(|_| bad("labels must be non-negative integers")))
                    .collect()
            };
            let (pre, period) = match text.split_once('(') {
                Some((pre, rest)) => {
                    let inner = rest.strip_suffix(')').ok_or_else(|| bad("unclosed period"))?;
                    (labels(pre)?, labels(inner)?)
                }
                None => (labels(text)?, vec![0]),
            };
            Ok(BoundaryPoint::Tree(TreeEnd::new(pre, period)?))
        }
        Space::Line { .. } => match text {
            "+" => Ok(BoundaryPoint::Line(Sign::Plus)),
            "-" => Ok(BoundaryPoint::Line(Sign::Minus)),
            _ => Err(bad("expected + or -")),
        },
        Space::Plane { .. } | Space::Hyperbolic { .. } => {
            let theta: f64 = text.parse().map_err(|_| bad("expected an angle"))?;
            if !theta.is_finite() {
                return Err(bad("angle must be finite"));
            }
            Ok(BoundaryPoint::angle(theta))
        }
        Space::Product(a, b) => {
            let (ends, alpha) = text.rsplit_once('@').ok_or_else(|| bad("expected first;second@alpha"))?;
            let (first, second) = ends.split_once(';').ok_or_else(|| bad("expected first;second@alpha"))?;
            let alpha: f64 = alpha.trim().parse().map_err(|_| bad("alpha must be a number"))?;
            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&alpha) {
                return Err(bad("alpha must lie in [0, pi/2]"));
            }
            Ok(BoundaryPoint::Product(Box::new(ProductEnd {
                first: parse_point(a, first)?,
                second: parse_point(b, second)?,
                alpha,
            })))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_numbers() {
        assert_eq!(short_number(0.39999999999999997), "0.4");
        assert_eq!(short_number(1.0), "1");
        assert_eq!(short_number(1234.5), "1234.5");
        assert_eq!(short_number(0.0), "0");
    }

    #[test]
    fn tree_point_syntax() {
        let sp = build_space(&SpaceSpec::tree(3, 8)).unwrap();
        let p = parse_point(&sp, "0.2(1.0)").unwrap();
        assert_eq!(p, BoundaryPoint::Tree(TreeEnd::new(vec![0, 2], vec![1, 0]).unwrap()));
        assert_eq!(parse_point(&sp, "0.0.1").unwrap(), BoundaryPoint::Tree(TreeEnd::with_zero_tail(vec![0, 0, 1])));
        assert!(parse_point(&sp, "0.x").is_err());
    }

    #[test]
    fn overrides_nest() {
        let cfg = load_config(None, &["seed=7".into(), "pullback.c=2.5".into()]).ok().unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.pullback.c, 2.5);
        assert!(load_config(None, &["no_such_key=1".into()]).is_err());
    }
}
