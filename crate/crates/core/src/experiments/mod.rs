//! Experiment drivers, configuration and the verification suite.

pub mod annulus;
pub mod config;
pub mod quasisymmetry;
pub mod report;
pub mod sampling;
pub mod suite;
pub mod witnesses;

pub use annulus::{annulus_cover_experiment, AnnulusRow, AnnulusTable};
pub use config::{AnnulusConfig, ExperimentConfig, PullbackConfig};
pub use quasisymmetry::{quasisymmetry_distortion, DistortionSample};
pub use report::{Check, CheckBuilder, Measurement, Relation, Status, VerificationReport, SCHEMA_VERSION};
pub use suite::{check_names, run_verification_suite};
