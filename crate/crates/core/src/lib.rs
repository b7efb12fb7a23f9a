//! Detection metrics for spoofing countermeasures evaluated together with
//! automatic speaker verification.
//!
//! The crate reads per-trial score files, computes miss and false-alarm
//! rates, equal error rates and NIST detection costs, and evaluates the
//! tandem detection cost of a countermeasure (CM) placed in front of, behind,
//! or alongside a speaker verifier (ASV). Interchangeable algorithms (EER
//! estimators, tandem architectures) live in name-keyed registries.

pub mod cost_model;
pub mod error;
pub mod error_rates;
pub mod registry;
pub mod synthetic;
pub mod tdcf;
pub mod trial_data;

pub use error::{Error, Result};
