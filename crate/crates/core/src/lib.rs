//! Computational laboratory for boundaries of CAT(0) spaces.
//!
//! The crate provides pointed model spaces ([`spaces`]), the visual and
//! Moran boundary metrics together with the constants comparing them
//! ([`boundary`]), cover analytics for capacity dimension ([`covers`]),
//! tree and product-of-tree buildings with their apartment retraction and
//! cover pullback ([`buildings`]), and the experiment and verification
//! drivers behind the `cat0lab` binary ([`experiments`], [`cli`]).

pub mod bisection;
pub mod boundary;
pub mod buildings;
pub mod cli;
pub mod covers;
pub mod error;
pub mod experiments;
pub mod serde_ext;
pub mod spaces;

pub use error::{Error, Result};
