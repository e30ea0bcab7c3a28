//! Boundary metrics: Gromov products, the visual metric `d_ε`, Moran's
//! metric `d_A`, and the constants relating the two.

pub mod gromov;
pub mod moran;
pub mod params;
pub mod radius;
pub mod visual;

pub use gromov::{gromov_product, gromov_product_boundary, ray_product_at, rho_eps, BoundaryProduct, GromovValue};
pub use moran::{moran_crossing_time, moran_metric, DEFAULT_MORAN_TOL};
pub use params::{comparison_bounds, sandwich_constants, ComparisonFn, MetricParams, SandwichConstants};
pub use radius::estimate_r;
pub use visual::{net_index, visual_metric, VisualNetMetric};
