//! Maximum-likelihood fitting of every prior-model family.

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

mod bfgs;
mod objective;

pub use objective::NllObjective;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::betabinom::CountPair;
use crate::dataset::MarkerDataset;
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::model::{PriorModel, WindowBin, WindowedModel};

use bfgs::{minimize, BfgsOptions, BfgsOutcome};
use objective::{aggregate_counts, softplus, softplus_inv, Objective, PARAM_FLOOR};

/// Which closed-form prior family to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParametricFamily {
    Eb1,
    Eb2,
}

/// Outcome of a fit. `converged` reflects the optimizer's own criteria
/// (relative objective change below 1e-10 and transformed-coordinate
/// gradient norm below 1e-6; for windowed fits, success in every window).
#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: PriorModel,
    pub neg_log_lik: f64,
    pub iterations: u32,
    pub converged: bool,
    /// Euclidean gradient norm at the optimum in transformed coordinates;
    /// absent for windowed fits.
    pub gradient_norm: Option<f64>,
    /// Human-readable flags (non-converged windows, parameters at the floor).
    pub notes: Vec<String>,
}

/// Negative log-likelihood of `model` over `data`, summed in record order
/// with compensated accumulation.
pub fn neg_log_likelihood(model: &PriorModel, data: &MarkerDataset) -> Result<f64> {
    if model.k() != data.k() {
        return Err(Error::DimensionMismatch { expected: model.k(), found: data.k() });
    }
    let mut acc = KahanSum::new();
    for rec in data.records() {
        let profile = rec.profile().map_err(|e| Error::at_marker(rec.id(), e))?;
        let prior = model.eval(&profile).map_err(|e| Error::at_marker(rec.id(), e))?;
        let term = crate::betabinom::ln_pmf_raw(
            f64::from(rec.target().trials()),
            f64::from(rec.target().successes()),
            prior.a(),
            prior.b(),
        );
        acc.add(-term);
    }
    Ok(acc.value())
}

/// Best-of-`starts` minimization; ties on the objective break toward the
/// lexicographically smallest decoded coefficient vector.
fn multistart(obj: &NllObjective, starts: &[Vec<f64>]) -> BfgsOutcome {
    let opts = BfgsOptions::default();
    let mut best: Option<(BfgsOutcome, Vec<f64>)> = None;
    for start in starts {
        let out = minimize(obj, start, &opts);
        let decoded: Vec<f64> = out.x.iter().map(|&u| softplus(u)).collect();
        let better = match &best {
            None => true,
            Some((b, bdec)) => {
                out.value < b.value || (out.value == b.value && decoded < *bdec)
            }
        };
        if better {
            best = Some((out, decoded));
        }
    }
    best.expect("at least one start").0
}

/// Mean booster trial count for each booster sample.
fn mean_booster_trials(data: &MarkerDataset) -> Vec<f64> {
    let k = data.k();
    let mut sums = vec![0.0; k];
    for rec in data.records() {
        for (s, c) in sums.iter_mut().zip(rec.boosters()) {
            *s += f64::from(c.trials());
        }
    }
    let n = data.len() as f64;
    sums.iter_mut().for_each(|s| *s /= n);
    sums
}

/// Deterministic multi-start seeds spanning weak to pooling-strength priors.
fn parametric_starts(data: &MarkerDataset, family: ParametricFamily) -> Vec<Vec<f64>> {
    let trials = mean_booster_trials(data);
    let mut starts = Vec::new();
    for &(beta0, scale) in &[(0.5, 0.5), (0.1, 0.05), (1.0, 1.0)] {
        let mut u = vec![softplus_inv(beta0)];
        for &t in &trials {
            u.push(softplus_inv((scale * t).max(1e-3)));
        }
        if family == ParametricFamily::Eb2 {
            let beta1 = (scale * trials[0]).max(1e-3);
            // start with zero indicator corrections: a(0) = beta0, b(0) = beta0 + beta1
            u.push(softplus_inv(beta0));
            u.push(softplus_inv(beta0 + beta1));
        }
        starts.push(u);
    }
    starts
}

/// Fit EB1 or EB2 by quasi-Newton ascent with analytic gradients.
pub fn fit_parametric(data: &MarkerDataset, family: ParametricFamily) -> Result<FitResult> {
    let obj = NllObjective::parametric(data, family)?;
    let best = multistart(&obj, &parametric_starts(data, family));
    let model = obj.build_model(&best.x)?;
    let neg_log_lik = neg_log_likelihood(&model, data)?;
    Ok(FitResult {
        model,
        neg_log_lik,
        iterations: best.iterations as u32,
        converged: best.converged,
        gradient_norm: Some(best.grad_norm),
        notes: Vec::new(),
    })
}

/// Fit the symmetric spline model, initialized from a fitted EB1 model
/// projected onto the basis through the Greville abscissae (the projection is
/// exact, so the spline search starts at the EB1 optimum).
pub fn fit_spline(data: &MarkerDataset, n_basis: usize) -> Result<FitResult> {
    let eb1 = fit_parametric(data, ParametricFamily::Eb1)?;
    let (beta0, betas) = match &eb1.model {
        PriorModel::Eb1(m) => (m.beta0(), m.betas().to_vec()),
        _ => unreachable!(),
    };

    let obj = NllObjective::spline(data, n_basis)?;
    let basis = crate::bspline::CubicBspline::new(n_basis)?;
    let xi = basis.greville();
    let k = data.k();
    let kf = k as f64;

    let mut theta = Vec::with_capacity(n_basis * k);
    for beta_k in &betas {
        for &x in &xi {
            theta.push((beta0 / kf + beta_k * x).max(1e-6));
        }
    }
    let starts: Vec<Vec<f64>> = [1.0, 0.5, 2.0]
        .iter()
        .map(|&c| theta.iter().map(|&t| softplus_inv(t * c)).collect())
        .collect();

    let best = multistart(&obj, &starts);
    let model = obj.build_model(&best.x)?;
    let neg_log_lik = neg_log_likelihood(&model, data)?;
    Ok(FitResult {
        model,
        neg_log_lik,
        iterations: best.iterations as u32,
        converged: best.converged,
        gradient_norm: Some(best.grad_norm),
        notes: Vec::new(),
    })
}

struct RawBin {
    lo: u32,
    hi: u32,
    targets: Vec<CountPair>,
}

/// Fit per-count empirical priors. Booster counts are binned exactly (or in
/// windows of half-width `delta` when given); windows smaller than `min_bin`
/// markers are merged into their nearest neighbor before fitting.
pub fn fit_windowed(data: &MarkerDataset, min_bin: usize, delta: Option<f64>) -> Result<FitResult> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if data.k() != 1 {
        return Err(Error::InvalidConfig(format!(
            "windowed fitting needs exactly one booster sample, dataset has {}",
            data.k()
        )));
    }
    let n_x = data.records()[0].boosters()[0].trials();
    if data.records().iter().any(|r| r.boosters()[0].trials() != n_x) {
        return Err(Error::InvalidDataset(String::from(
            "windowed fitting needs a constant booster trial count",
        )));
    }
    if let Some(d) = delta {
        if !(d > 0.0 && d < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "window half-width must lie in (0, 0.5), got {d}"
            )));
        }
    }

    // Group by booster count (or window index) into sorted raw bins.
    let mut keyed: alloc::collections::BTreeMap<u32, RawBin> = alloc::collections::BTreeMap::new();
    for rec in data.records() {
        let x = rec.boosters()[0].successes();
        let key = match delta {
            None => x,
            Some(d) => {
                let p = f64::from(x) / f64::from(n_x);
                ((p / (2.0 * d)).floor() as u32).min(u32::MAX - 1)
            }
        };
        let bin = keyed.entry(key).or_insert(RawBin { lo: x, hi: x, targets: Vec::new() });
        bin.lo = bin.lo.min(x);
        bin.hi = bin.hi.max(x);
        bin.targets.push(rec.target());
    }
    let mut bins: Vec<RawBin> = keyed.into_values().collect();

    // Merge undersized bins into their nearest neighbor (by count gap).
    while bins.len() > 1 {
        let (idx, smallest) = bins
            .iter()
            .enumerate()
            .min_by_key(|(i, b)| (b.targets.len(), *i))
            .map(|(i, b)| (i, b.targets.len()))
            .expect("bins nonempty");
        if smallest >= min_bin {
            break;
        }
        let into = if idx == 0 {
            1
        } else if idx == bins.len() - 1 {
            idx - 1
        } else {
            let left_gap = bins[idx].lo - bins[idx - 1].hi;
            let right_gap = bins[idx + 1].lo - bins[idx].hi;
            if left_gap <= right_gap {
                idx - 1
            } else {
                idx + 1
            }
        };
        let taken = bins.remove(idx);
        let target = if into > idx { into - 1 } else { into };
        bins[target].lo = bins[target].lo.min(taken.lo);
        bins[target].hi = bins[target].hi.max(taken.hi);
        bins[target].targets.extend(taken.targets);
    }

    let opts = BfgsOptions::default();
    let mut fitted = Vec::with_capacity(bins.len());
    let mut notes = Vec::new();
    let mut iterations = 0u32;
    let mut all_converged = true;

    for bin in &bins {
        let groups = aggregate_counts(bin.targets.iter().map(|&t| (t, Vec::new())));
        let obj = NllObjective::window(groups);

        let mut out = minimize(&obj, &moment_start(&bin.targets), &opts);
        if !out.converged {
            let retry = minimize(&obj, &[0.0, 0.0], &opts);
            if retry.value < out.value || (retry.converged && !out.converged) {
                out = retry;
            }
        }
        iterations += out.iterations as u32;
        let a = out.x[0].exp().max(PARAM_FLOOR);
        let b = out.x[1].exp().max(PARAM_FLOOR);
        if !out.converged {
            all_converged = false;
            notes.push(format!(
                "window [{}, {}]: optimizer did not converge over {} markers",
                bin.lo,
                bin.hi,
                bin.targets.len()
            ));
        }
        if a <= 1e-6 || b <= 1e-6 {
            notes.push(format!(
                "window [{}, {}]: maximum sits at the parameter floor (a = {a:.3e}, b = {b:.3e})",
                bin.lo, bin.hi
            ));
        }
        fitted.push(WindowBin {
            lo: bin.lo,
            hi: bin.hi,
            params: crate::betabinom::BetaParams::new(a, b)?,
            markers: bin.targets.len(),
        });
    }

    let model = PriorModel::Windowed(WindowedModel::new(n_x, delta, fitted)?);
    let neg_log_lik = neg_log_likelihood(&model, data)?;
    Ok(FitResult {
        model,
        neg_log_lik,
        iterations,
        converged: all_converged,
        gradient_norm: None,
        notes,
    })
}

/// Method-of-moments start for one window, in `(ln a, ln b)`.
fn moment_start(targets: &[CountPair]) -> [f64; 2] {
    let m = targets.len() as f64;
    let mut sum_y = 0.0;
    let mut sum_n = 0.0;
    let mut nbar = 0.0;
    for t in targets {
        sum_y += f64::from(t.successes());
        sum_n += f64::from(t.trials());
        nbar += f64::from(t.trials());
    }
    nbar /= m;
    let mu = (sum_y / sum_n).clamp(1e-3, 1.0 - 1e-3);
    let mut var = 0.0;
    for t in targets {
        var += (t.freq() - mu) * (t.freq() - mu);
    }
    var /= m;

    // Var(y/n) = mu (1-mu)/n * (1 + (n-1)/(nu+1)), solved for nu.
    let ratio = var * nbar / (mu * (1.0 - mu)) - 1.0;
    let nu = if ratio > 0.0 && nbar > 1.0 {
        ((nbar - 1.0) / ratio - 1.0).clamp(0.01, 1e7)
    } else {
        4.0 * nbar
    };
    [(mu * nu).ln(), ((1.0 - mu) * nu).ln()]
}
