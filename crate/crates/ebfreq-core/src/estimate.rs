//! Per-marker frequency estimates under a fitted model, with MLE and pooled
//! baselines.

use crate::betabinom::BetaParams;
use crate::dataset::{MarkerDataset, MarkerRecord};
use crate::error::{Error, Result};
use crate::model::PriorModel;

use alloc::string::String;
use alloc::vec::Vec;

/// All estimates for one marker.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRecord {
    pub id: String,
    /// Posterior-mean frequency, strictly inside (0, 1).
    pub q_eb: f64,
    /// Posterior variance proxy for `q_eb`.
    pub var_eb: f64,
    /// The empirical prior the posterior was conditioned on.
    pub prior: BetaParams,
    /// Target-only maximum likelihood estimate `y / n`.
    pub q_mle: f64,
    /// MLE on the pooled target plus booster counts.
    pub q_pooled: f64,
}

impl EstimateRecord {
    /// `a + b` of the prior: how many pseudo-alleles the boosters contributed.
    #[inline]
    pub fn local_affinity(&self) -> f64 {
        self.prior.nu()
    }
}

/// Target-only MLE `y / n`.
pub fn estimate_mle(record: &MarkerRecord) -> f64 {
    record.target().freq()
}

/// MLE over the target and all booster counts pooled together.
pub fn estimate_pooled(record: &MarkerRecord) -> Result<f64> {
    if record.boosters().is_empty() {
        return Err(Error::at_marker(
            record.id(),
            Error::InvalidDataset(String::from("pooling needs at least one booster")),
        ));
    }
    let mut successes = f64::from(record.target().successes());
    let mut trials = f64::from(record.target().trials());
    for c in record.boosters() {
        successes += f64::from(c.successes());
        trials += f64::from(c.trials());
    }
    Ok(successes / trials)
}

/// Empirical-Bayes estimate for one marker: evaluate the prior at the
/// marker's booster profile, condition on the target counts, and report the
/// posterior mean and variance proxy.
pub fn estimate_eb(model: &PriorModel, record: &MarkerRecord) -> Result<EstimateRecord> {
    let wrap = |e| Error::at_marker(record.id(), e);
    let profile = record.profile().map_err(wrap)?;
    let prior = model.eval(&profile).map_err(wrap)?;
    let posterior = prior.posterior(record.target());
    Ok(EstimateRecord {
        id: String::from(record.id()),
        q_eb: posterior.mean(),
        var_eb: posterior.variance_proxy(),
        prior,
        q_mle: estimate_mle(record),
        q_pooled: estimate_pooled(record)?,
    })
}

/// [`estimate_eb`] over a whole dataset, preserving record order. Failures
/// are collected per marker rather than stopping at the first.
pub fn estimate_all(model: &PriorModel, data: &MarkerDataset) -> Result<Vec<EstimateRecord>> {
    let mut out = Vec::with_capacity(data.len());
    let mut failures = Vec::new();
    for rec in data.records() {
        match estimate_eb(model, rec) {
            Ok(e) => out.push(e),
            Err(e) => failures.push(e),
        }
    }
    if failures.is_empty() {
        Ok(out)
    } else if failures.len() == 1 {
        Err(failures.pop().expect("one failure"))
    } else {
        Err(Error::Aggregate(failures))
    }
}
