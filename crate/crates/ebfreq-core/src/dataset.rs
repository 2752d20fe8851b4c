//! Marker count tables: one target sample plus `K` booster samples.

use crate::betabinom::CountPair;
use crate::error::{Error, Result};
use crate::model::BoosterProfile;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// Allele counts for one marker.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerRecord {
    id: String,
    target: CountPair,
    boosters: Vec<CountPair>,
}

impl MarkerRecord {
    pub fn new(id: impl Into<String>, target: CountPair, boosters: Vec<CountPair>) -> Self {
        Self { id: id.into(), target, boosters }
    }

    #[inline]
    pub fn id(&self) -> &str {
        &self.id
    }

    #[inline]
    pub fn target(&self) -> CountPair {
        self.target
    }

    #[inline]
    pub fn boosters(&self) -> &[CountPair] {
        &self.boosters
    }

    /// Observed booster frequencies, one per booster sample.
    pub fn profile(&self) -> Result<BoosterProfile> {
        BoosterProfile::new(self.boosters.iter().map(CountPair::freq).collect())
    }
}

/// Descriptive metadata carried alongside the counts.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMeta {
    /// Free-form provenance label.
    pub source: String,
    /// Whether the A allele was assigned by the alphabetical orientation rule.
    pub oriented: bool,
    /// Sample names: target first, then one per booster.
    pub sample_labels: Vec<String>,
}

impl DatasetMeta {
    /// Generic labels (`target`, `booster1`, ...) for `k` boosters.
    pub fn generic(source: impl Into<String>, k: usize) -> Self {
        let mut sample_labels = Vec::with_capacity(k + 1);
        sample_labels.push(String::from("target"));
        for i in 1..=k {
            sample_labels.push(format!("booster{i}"));
        }
        Self { source: source.into(), oriented: false, sample_labels }
    }
}

/// A validated collection of marker records sharing one booster layout.
/// `k` may be zero (a bare target table, e.g. a validation sample); fitting
/// and estimation require `k >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerDataset {
    records: Vec<MarkerRecord>,
    k: usize,
    meta: DatasetMeta,
}

impl MarkerDataset {
    pub fn new(records: Vec<MarkerRecord>, k: usize, meta: DatasetMeta) -> Result<Self> {
        if meta.sample_labels.len() != k + 1 {
            return Err(Error::InvalidDataset(format!(
                "{} sample labels for {} samples",
                meta.sample_labels.len(),
                k + 1
            )));
        }
        let mut seen = BTreeSet::new();
        for rec in &records {
            if rec.id.is_empty() {
                return Err(Error::InvalidDataset(String::from("empty marker id")));
            }
            if rec.boosters.len() != k {
                return Err(Error::at_marker(
                    &rec.id,
                    Error::DimensionMismatch { expected: k, found: rec.boosters.len() },
                ));
            }
            if !seen.insert(rec.id.clone()) {
                return Err(Error::DuplicateMarkerId { id: rec.id.clone() });
            }
        }
        Ok(Self { records, k, meta })
    }

    #[inline]
    pub fn records(&self) -> &[MarkerRecord] {
        &self.records
    }

    /// Booster samples per marker.
    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn meta(&self) -> &DatasetMeta {
        &self.meta
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.records.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}
