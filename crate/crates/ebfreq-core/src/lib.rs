//! Empirical-Bayes allele frequency estimation.
//!
//! Allele frequencies in a target sample are re-estimated by conditioning a
//! beta-binomial prior on the observed frequencies in one or more booster
//! samples. The prior family is fitted by maximum likelihood over the whole
//! marker collection, so the amount of strength borrowed from each booster is
//! determined by the data rather than by a pooling decision made up front.
//!
//! The crate is `no_std`-compatible (`alloc` is required); enable the `libm`
//! feature when building without `std`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("ebfreq-core needs either the `std` or the `libm` feature");

pub mod betabinom;
pub mod bspline;
pub mod dataset;
pub mod error;
pub mod estimate;
pub mod evaluate;
pub mod fit;
pub mod model;
pub mod sim;
pub mod special;

mod kahan;

pub use betabinom::{log_betabinom_pmf, BetaParams, CountPair};
pub use dataset::{DatasetMeta, MarkerDataset, MarkerRecord};
pub use error::{Error, Result};
pub use estimate::EstimateRecord;
pub use evaluate::{EstimatorColumn, EvalReport};
pub use fit::{FitResult, ParametricFamily};
pub use model::{BoosterProfile, PriorModel};
pub use sim::{SimConfig, SimMode, TruthRecord};
