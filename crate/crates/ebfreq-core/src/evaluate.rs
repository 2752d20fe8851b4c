//! Scoring estimate tables against a perfect or an imperfect gold standard.
//!
//! Against held-out validation counts, the naive mean squared difference is
//! biased upward by the validation sample's own binomial noise; the unbiased
//! correction subtracts the plug-in estimate `qv (1 - qv) / (n_val - 1)` of
//! that noise per marker.

use crate::betabinom::CountPair;
use crate::error::{Error, Result};
use crate::estimate::EstimateRecord;
use crate::kahan::KahanSum;
use crate::sim::TruthRecord;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Which estimate column of an [`EstimateRecord`] to score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorColumn {
    Mle,
    Pooled,
    Eb,
}

impl EstimatorColumn {
    pub fn value(&self, rec: &EstimateRecord) -> f64 {
        match self {
            EstimatorColumn::Mle => rec.q_mle,
            EstimatorColumn::Pooled => rec.q_pooled,
            EstimatorColumn::Eb => rec.q_eb,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorColumn::Mle => "mle",
            EstimatorColumn::Pooled => "pooled",
            EstimatorColumn::Eb => "eb",
        }
    }
}

/// One bin of a frequency profile. `bias_sq` and `variance` need replicated
/// estimates and stay `None` in single-run reports; empty bins report
/// `count = 0` with no statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileBin {
    pub center: f64,
    pub count: usize,
    pub mse: Option<f64>,
    pub bias_sq: Option<f64>,
    pub variance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Truth,
    Validation,
}

/// Mean-squared-error report.
///
/// In validation mode `mse_corrected = mse_raw - correction_term`; the
/// corrected value may go negative on tiny samples, which is reported as-is
/// (flooring it would bias averages over replicates). In truth mode the
/// correction is zero. Replicate variance uses the population convention
/// (divide by the replicate count), under which `mse = bias_sq + variance`
/// holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub mode: EvalMode,
    pub n_markers: usize,
    pub mse_raw: f64,
    pub correction_term: f64,
    pub mse_corrected: f64,
    pub profile: Vec<ProfileBin>,
}

fn check_alignment<'t, T>(
    estimates: &[EstimateRecord],
    other: &'t [T],
    id_of: impl Fn(&'t T) -> &'t str,
) -> Result<()> {
    if estimates.len() != other.len() {
        return Err(Error::LengthMismatch { left: estimates.len(), right: other.len() });
    }
    for (index, (e, t)) in estimates.iter().zip(other).enumerate() {
        if e.id != id_of(t) {
            return Err(Error::IdMismatch {
                index,
                left: e.id.clone(),
                right: String::from(id_of(t)),
            });
        }
    }
    Ok(())
}

#[inline]
fn bin_index(q: f64, n_bins: usize) -> usize {
    ((q * n_bins as f64) as usize).min(n_bins - 1)
}

/// MSE against simulation truth, with a per-bin single-run error profile
/// binned by the true frequency.
pub fn mse_vs_truth(
    estimates: &[EstimateRecord],
    truth: &[TruthRecord],
    column: EstimatorColumn,
    n_bins: usize,
) -> Result<EvalReport> {
    if n_bins == 0 {
        return Err(Error::InvalidConfig(String::from("need at least one profile bin")));
    }
    check_alignment(estimates, truth, |t| t.id.as_str())?;

    let mut total = KahanSum::new();
    let mut bin_sums = vec![KahanSum::new(); n_bins];
    let mut bin_counts = vec![0usize; n_bins];
    for (e, t) in estimates.iter().zip(truth) {
        let err = column.value(e) - t.q;
        let sq = err * err;
        total.add(sq);
        let b = bin_index(t.q, n_bins);
        bin_sums[b].add(sq);
        bin_counts[b] += 1;
    }
    let n = estimates.len();
    let mse_raw = if n == 0 { 0.0 } else { total.value() / n as f64 };

    let profile = (0..n_bins)
        .map(|b| ProfileBin {
            center: (b as f64 + 0.5) / n_bins as f64,
            count: bin_counts[b],
            mse: (bin_counts[b] > 0).then(|| bin_sums[b].value() / bin_counts[b] as f64),
            bias_sq: None,
            variance: None,
        })
        .collect();

    Ok(EvalReport {
        mode: EvalMode::Truth,
        n_markers: n,
        mse_raw,
        correction_term: 0.0,
        mse_corrected: mse_raw,
        profile,
    })
}

/// Validation counts for one marker: an independent sample from the same
/// population as the target.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationCounts {
    pub id: String,
    pub counts: CountPair,
}

/// Bias-corrected MSE against an imperfect gold standard. Every validation
/// sample needs at least two alleles (the unbiased variance estimate divides
/// by `n_val - 1`).
pub fn mse_vs_validation(
    estimates: &[EstimateRecord],
    validation: &[ValidationCounts],
    column: EstimatorColumn,
) -> Result<EvalReport> {
    check_alignment(estimates, validation, |v| v.id.as_str())?;

    let mut raw = KahanSum::new();
    let mut corr = KahanSum::new();
    for (e, v) in estimates.iter().zip(validation) {
        let n_val = f64::from(v.counts.trials());
        if v.counts.trials() < 2 {
            return Err(Error::at_marker(
                &v.id,
                Error::Domain(String::from("validation sample needs at least 2 alleles")),
            ));
        }
        let qv = v.counts.freq();
        let err = column.value(e) - qv;
        raw.add(err * err);
        corr.add(qv * (1.0 - qv) / (n_val - 1.0));
    }
    let n = estimates.len();
    let (mse_raw, correction_term) = if n == 0 {
        (0.0, 0.0)
    } else {
        (raw.value() / n as f64, corr.value() / n as f64)
    };

    Ok(EvalReport {
        mode: EvalMode::Validation,
        n_markers: n,
        mse_raw,
        correction_term,
        mse_corrected: mse_raw - correction_term,
        profile: Vec::new(),
    })
}

/// Bias/variance decomposition over replicated estimates of the same truth,
/// binned by the true frequency.
///
/// Per marker: `bias_sq = (mean_r estimate - q)^2`, `variance` is the
/// population variance over replicates, and `mse = bias_sq + variance`
/// (exact under that convention). Bins average the per-marker quantities.
pub fn bias_variance_profile(
    replicates: &[Vec<EstimateRecord>],
    truth: &[TruthRecord],
    column: EstimatorColumn,
    n_bins: usize,
) -> Result<Vec<ProfileBin>> {
    if replicates.len() < 2 {
        return Err(Error::NotEnoughReplicates { found: replicates.len() });
    }
    if n_bins == 0 {
        return Err(Error::InvalidConfig(String::from("need at least one profile bin")));
    }
    for rep in replicates {
        check_alignment(rep, truth, |t| t.id.as_str())?;
    }

    let r = replicates.len() as f64;
    let mut bias_sums = vec![KahanSum::new(); n_bins];
    let mut var_sums = vec![KahanSum::new(); n_bins];
    let mut counts = vec![0usize; n_bins];

    for (i, t) in truth.iter().enumerate() {
        let mut mean = KahanSum::new();
        for rep in replicates {
            mean.add(column.value(&rep[i]));
        }
        let mean = mean.value() / r;
        let mut var = KahanSum::new();
        for rep in replicates {
            let d = column.value(&rep[i]) - mean;
            var.add(d * d);
        }
        let b = bin_index(t.q, n_bins);
        bias_sums[b].add((mean - t.q) * (mean - t.q));
        var_sums[b].add(var.value() / r);
        counts[b] += 1;
    }

    Ok((0..n_bins)
        .map(|b| {
            let center = (b as f64 + 0.5) / n_bins as f64;
            if counts[b] == 0 {
                return ProfileBin { center, count: 0, mse: None, bias_sq: None, variance: None };
            }
            let c = counts[b] as f64;
            let bias_sq = bias_sums[b].value() / c;
            let variance = var_sums[b].value() / c;
            ProfileBin {
                center,
                count: counts[b],
                mse: Some(bias_sq + variance),
                bias_sq: Some(bias_sq),
                variance: Some(variance),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::betabinom::BetaParams;
    use approx::assert_relative_eq;

    fn est(id: &str, q: f64) -> EstimateRecord {
        EstimateRecord {
            id: String::from(id),
            q_eb: q,
            var_eb: 0.01,
            prior: BetaParams::new(1.0, 1.0).unwrap(),
            q_mle: q,
            q_pooled: q,
        }
    }

    fn truth(id: &str, q: f64) -> TruthRecord {
        TruthRecord { id: String::from(id), p: vec![q], q }
    }

    #[test]
    fn perfect_estimates_have_zero_mse() {
        let estimates: Vec<_> = (0..50).map(|i| est(&format!("m{i}"), 0.3)).collect();
        let truths: Vec<_> = (0..50).map(|i| truth(&format!("m{i}"), 0.3)).collect();
        let rep = mse_vs_truth(&estimates, &truths, EstimatorColumn::Eb, 20).unwrap();
        assert_eq!(rep.mse_raw, 0.0);
        assert_eq!(rep.mse_corrected, 0.0);
        assert_eq!(rep.correction_term, 0.0);
    }

    #[test]
    fn constant_offset_gives_squared_offset() {
        let estimates: Vec<_> = (0..40).map(|i| est(&format!("m{i}"), 0.5)).collect();
        let truths: Vec<_> = (0..40).map(|i| truth(&format!("m{i}"), 0.4)).collect();
        let rep = mse_vs_truth(&estimates, &truths, EstimatorColumn::Eb, 20).unwrap();
        assert_relative_eq!(rep.mse_raw, 0.01, max_relative = 1e-12);
    }

    #[test]
    fn id_mismatch_is_reported() {
        let estimates = vec![est("a", 0.5), est("b", 0.5)];
        let truths = vec![truth("a", 0.5), truth("c", 0.5)];
        let err = mse_vs_truth(&estimates, &truths, EstimatorColumn::Eb, 20).unwrap_err();
        assert!(matches!(err, Error::IdMismatch { index: 1, .. }));
    }

    #[test]
    fn degenerate_validation_frequencies_need_no_correction() {
        let estimates = vec![est("a", 0.0), est("b", 1.0)];
        let validation = vec![
            ValidationCounts { id: String::from("a"), counts: CountPair::new(0, 8).unwrap() },
            ValidationCounts { id: String::from("b"), counts: CountPair::new(8, 8).unwrap() },
        ];
        let rep = mse_vs_validation(&estimates, &validation, EstimatorColumn::Eb).unwrap();
        assert_eq!(rep.correction_term, 0.0);
        assert_eq!(rep.mse_corrected, rep.mse_raw);
    }

    #[test]
    fn tiny_validation_sample_can_go_negative() {
        // estimate 0.5 matches the validation MLE exactly, so the raw term is
        // zero and the correction pushes the corrected value to -0.25
        let estimates = vec![est("a", 0.5)];
        let validation = vec![ValidationCounts {
            id: String::from("a"),
            counts: CountPair::new(1, 2).unwrap(),
        }];
        let rep = mse_vs_validation(&estimates, &validation, EstimatorColumn::Eb).unwrap();
        assert_eq!(rep.mse_raw, 0.0);
        assert_relative_eq!(rep.correction_term, 0.25, max_relative = 1e-12);
        assert_relative_eq!(rep.mse_corrected, -0.25, max_relative = 1e-12);
    }

    #[test]
    fn single_allele_validation_is_rejected() {
        let estimates = vec![est("a", 0.5)];
        let validation = vec![ValidationCounts {
            id: String::from("a"),
            counts: CountPair::new(1, 1).unwrap(),
        }];
        assert!(mse_vs_validation(&estimates, &validation, EstimatorColumn::Eb).is_err());
    }

    #[test]
    fn profile_needs_two_replicates() {
        let reps = vec![vec![est("a", 0.5)]];
        let truths = vec![truth("a", 0.5)];
        let err = bias_variance_profile(&reps, &truths, EstimatorColumn::Eb, 10).unwrap_err();
        assert!(matches!(err, Error::NotEnoughReplicates { found: 1 }));
    }

    #[test]
    fn exact_estimates_give_all_zero_profile() {
        let ids: Vec<String> = (0..30).map(|i| format!("m{i}")).collect();
        let truths: Vec<_> = ids.iter().enumerate().map(|(i, id)| truth(id, i as f64 / 30.0)).collect();
        let reps: Vec<Vec<_>> = (0..3)
            .map(|_| truths.iter().map(|t| est(&t.id, t.q)).collect())
            .collect();
        let profile = bias_variance_profile(&reps, &truths, EstimatorColumn::Eb, 10).unwrap();
        for bin in &profile {
            if bin.count > 0 {
                assert_eq!(bin.mse, Some(0.0));
                assert_eq!(bin.bias_sq, Some(0.0));
                assert_eq!(bin.variance, Some(0.0));
            }
        }
    }

    #[test]
    fn decomposition_identity_holds_exactly() {
        // mse computed directly from squared errors must match bias^2 + var
        // (population convention) up to float noise
        let ids: Vec<String> = (0..64).map(|i| format!("m{i}")).collect();
        let truths: Vec<_> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| truth(id, (i as f64 + 0.5) / 64.0))
            .collect();
        // deterministic pseudo-noise
        let noise = |i: usize, r: usize| ((i * 31 + r * 17) % 13) as f64 / 100.0 - 0.06;
        let reps: Vec<Vec<_>> = (0..5)
            .map(|r| {
                truths
                    .iter()
                    .enumerate()
                    .map(|(i, t)| est(&t.id, (t.q + noise(i, r)).clamp(0.0, 1.0)))
                    .collect::<Vec<_>>()
            })
            .collect();
        let profile = bias_variance_profile(&reps, &truths, EstimatorColumn::Eb, 8).unwrap();

        // direct per-bin mse over all replicates
        for (b, bin) in profile.iter().enumerate() {
            if bin.count == 0 {
                continue;
            }
            let mut direct = KahanSum::new();
            let mut cnt = 0usize;
            for (i, t) in truths.iter().enumerate() {
                if bin_index(t.q, 8) == b {
                    for rep in &reps {
                        let d = rep[i].q_eb - t.q;
                        direct.add(d * d);
                    }
                    cnt += 1;
                }
            }
            let direct = direct.value() / (cnt as f64 * reps.len() as f64);
            assert_relative_eq!(bin.mse.unwrap(), direct, max_relative = 1e-12, epsilon = 1e-15);
            assert_relative_eq!(
                bin.mse.unwrap(),
                bin.bias_sq.unwrap() + bin.variance.unwrap(),
                max_relative = 1e-15
            );
        }
    }
}
