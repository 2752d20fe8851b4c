//! Negative log-likelihood objectives over transformed coordinates.
//!
//! Records are collapsed into weighted groups keyed by the exact count tuple
//! (identical tuples contribute identical likelihood terms), which cuts the
//! cost of one likelihood sweep from the marker count down to the number of
//! distinct tuples. Group order comes from a BTreeMap, so sums are
//! order-deterministic, and every accumulator is compensated.

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::betabinom::CountPair;
use crate::bspline::CubicBspline;
use crate::dataset::MarkerDataset;
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::model::{Eb1Model, Eb2Model, PriorModel, SplineModel};
use crate::special::{digamma, ln_binom};

use super::ParametricFamily;

/// Pseudo-counts are floored here during optimization so the log-gamma
/// family never sees a zero; the floor is far below any value the data can
/// support.
pub(crate) const PARAM_FLOOR: f64 = 1e-8;

/// Smooth positivity transform used for every fitted coefficient.
#[inline]
pub(crate) fn softplus(u: f64) -> f64 {
    if u > 30.0 {
        u
    } else if u < -30.0 {
        u.exp()
    } else {
        u.exp().ln_1p()
    }
}

/// Derivative of [`softplus`].
#[inline]
pub(crate) fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Inverse of [`softplus`] for positive inputs.
#[inline]
pub(crate) fn softplus_inv(y: f64) -> f64 {
    if y > 30.0 {
        y
    } else {
        y.exp_m1().ln()
    }
}

/// Minimization target: callers may ask for the gradient alongside the value.
/// The value must not depend on whether the gradient was requested.
pub(crate) trait Objective {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64], grad: Option<&mut [f64]>) -> f64;
}

/// One weighted likelihood term: `w` markers share the same target counts and
/// booster counts.
#[derive(Debug, Clone)]
pub(crate) struct Group {
    pub w: f64,
    pub y: f64,
    pub n: f64,
    pub ln_choose: f64,
    pub profile: Vec<f64>,
    basis_p: Vec<f64>,
    basis_q: Vec<f64>,
}

/// Collapse a dataset (or any record subset) into weighted groups in a
/// deterministic order.
pub(crate) fn aggregate_counts(
    records: impl Iterator<Item = (CountPair, Vec<CountPair>)>,
) -> Vec<Group> {
    let mut map: BTreeMap<(u32, u32, Vec<(u32, u32)>), u32> = BTreeMap::new();
    for (target, boosters) in records {
        let key = (
            target.successes(),
            target.trials(),
            boosters.iter().map(|c| (c.successes(), c.trials())).collect(),
        );
        *map.entry(key).or_insert(0) += 1;
    }
    map.into_iter()
        .map(|((y, n, xs), w)| Group {
            w: f64::from(w),
            y: f64::from(y),
            n: f64::from(n),
            ln_choose: ln_binom(f64::from(n), f64::from(y)),
            profile: xs
                .iter()
                .map(|&(x, nx)| f64::from(x) / f64::from(nx))
                .collect(),
            basis_p: Vec::new(),
            basis_q: Vec::new(),
        })
        .collect()
}

enum Kind {
    Eb1 { k: usize },
    Eb2,
    Spline { basis: CubicBspline, k: usize },
    /// Free `(ln a, ln b)` pair for one window of the windowed model.
    LogAb,
}

/// Negative log-likelihood of a model family over a fixed dataset, seen as a
/// function of unconstrained coordinates (softplus for coefficients,
/// log for the windowed pair).
pub struct NllObjective {
    groups: Vec<Group>,
    kind: Kind,
    dim: usize,
}

impl NllObjective {
    /// Objective for EB1/EB2 over `u` with `beta_i = softplus(u_i)`.
    /// EB2 uses coordinates `(beta0, beta1, a(0), b(0))`, all positive, from
    /// which the signed indicator coefficients are recovered after the fit.
    pub fn parametric(data: &MarkerDataset, family: ParametricFamily) -> Result<Self> {
        let groups = Self::dataset_groups(data)?;
        match family {
            ParametricFamily::Eb1 => Ok(Self {
                groups,
                kind: Kind::Eb1 { k: data.k() },
                dim: 1 + data.k(),
            }),
            ParametricFamily::Eb2 => {
                if data.k() != 1 {
                    return Err(Error::InvalidConfig(String::from(
                        "eb2 is defined for a single booster sample",
                    )));
                }
                Ok(Self { groups, kind: Kind::Eb2, dim: 4 })
            }
        }
    }

    /// Objective for the symmetric spline with `theta_jk = softplus(u_jk)`.
    pub fn spline(data: &MarkerDataset, n_basis: usize) -> Result<Self> {
        let basis = CubicBspline::new(n_basis)?;
        let mut groups = Self::dataset_groups(data)?;
        let k = data.k();
        let mut row = vec![0.0; n_basis];
        for grp in &mut groups {
            grp.basis_p = vec![0.0; n_basis * k];
            grp.basis_q = vec![0.0; n_basis * k];
            for (kk, &p) in grp.profile.iter().enumerate() {
                basis.eval_into(p, &mut row)?;
                grp.basis_p[kk * n_basis..(kk + 1) * n_basis].copy_from_slice(&row);
                basis.eval_into(1.0 - p, &mut row)?;
                grp.basis_q[kk * n_basis..(kk + 1) * n_basis].copy_from_slice(&row);
            }
        }
        Ok(Self { dim: n_basis * k, groups, kind: Kind::Spline { basis, k } })
    }

    /// Objective for a single window: two coordinates `(ln a, ln b)`.
    pub(crate) fn window(groups: Vec<Group>) -> Self {
        Self { groups, kind: Kind::LogAb, dim: 2 }
    }

    fn dataset_groups(data: &MarkerDataset) -> Result<Vec<Group>> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if data.k() == 0 {
            return Err(Error::InvalidDataset(String::from(
                "fitting needs at least one booster sample",
            )));
        }
        Ok(aggregate_counts(
            data.records().iter().map(|r| (r.target(), r.boosters().to_vec())),
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Objective value at `u`.
    pub fn value(&self, u: &[f64]) -> f64 {
        self.eval(u, None)
    }

    /// Objective value and analytic gradient at `u`.
    pub fn value_and_grad(&self, u: &[f64], grad: &mut [f64]) -> f64 {
        self.eval(u, Some(grad))
    }

    /// Decode optimizer coordinates into the natural coefficients.
    fn decode(&self, u: &[f64], beta: &mut [f64], dchain: &mut [f64]) {
        match self.kind {
            Kind::LogAb => {
                for i in 0..self.dim {
                    beta[i] = u[i].exp();
                    dchain[i] = beta[i];
                }
            }
            _ => {
                for i in 0..self.dim {
                    beta[i] = softplus(u[i]);
                    dchain[i] = sigmoid(u[i]);
                }
            }
        }
    }

    /// Raw `(a, b)` for one group under coefficients `beta`.
    fn group_ab(&self, grp: &Group, beta: &[f64]) -> (f64, f64) {
        match &self.kind {
            Kind::Eb1 { k } => {
                let mut a = beta[0];
                let mut b = beta[0];
                for j in 0..*k {
                    let p = grp.profile[j];
                    a += beta[1 + j] * p;
                    b += beta[1 + j] * (1.0 - p);
                }
                (a, b)
            }
            Kind::Eb2 => {
                let p = grp.profile[0];
                if p == 0.0 {
                    (beta[2], beta[3])
                } else if p == 1.0 {
                    (beta[3], beta[2])
                } else {
                    (beta[0] + beta[1] * p, beta[0] + beta[1] * (1.0 - p))
                }
            }
            Kind::Spline { .. } => {
                let dot = |bas: &[f64]| bas.iter().zip(beta).map(|(x, t)| x * t).sum::<f64>();
                (dot(&grp.basis_p), dot(&grp.basis_q))
            }
            Kind::LogAb => (beta[0], beta[1]),
        }
    }

    /// Build the fitted model from optimizer coordinates.
    pub(crate) fn build_model(&self, u: &[f64]) -> Result<PriorModel> {
        match &self.kind {
            Kind::Eb1 { k } => {
                let beta0 = softplus(u[0]);
                let betas = (0..*k).map(|j| softplus(u[1 + j])).collect();
                Ok(PriorModel::Eb1(Eb1Model::new(beta0, betas)?))
            }
            Kind::Eb2 => {
                let beta0 = softplus(u[0]);
                let beta1 = softplus(u[1]);
                let beta2 = softplus(u[2]) - beta0;
                let beta3 = softplus(u[3]) - beta0 - beta1;
                Ok(PriorModel::Eb2(Eb2Model::new(beta0, beta1, beta2, beta3)?))
            }
            Kind::Spline { basis, k } => {
                let n = basis.n_basis();
                let thetas = (0..*k)
                    .map(|kk| (0..n).map(|j| softplus(u[kk * n + j])).collect())
                    .collect();
                Ok(PriorModel::Spline(SplineModel::symmetric(n, thetas)?))
            }
            Kind::LogAb => Err(Error::InvalidModel(String::from(
                "window coordinates do not form a standalone model",
            ))),
        }
    }
}

impl Objective for NllObjective {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, u: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let mut beta = vec![0.0; self.dim];
        let mut dchain = vec![0.0; self.dim];
        self.decode(u, &mut beta, &mut dchain);

        let mut f = KahanSum::new();
        let want_grad = grad.is_some();
        let mut gacc = if want_grad { vec![KahanSum::new(); self.dim] } else { Vec::new() };

        for grp in &self.groups {
            let (a_raw, b_raw) = self.group_ab(grp, &beta);
            let a = a_raw.max(PARAM_FLOOR);
            let b = b_raw.max(PARAM_FLOOR);

            let term = -(crate::betabinom::ln_pmf_with_choose(grp.n, grp.y, a, b, grp.ln_choose));
            f.add(grp.w * term);

            if want_grad {
                let psi_ab = digamma(a + b);
                let psi_abn = digamma(a + b + grp.n);
                // d(-ln pmf)/da and /db; zero when the floor is active.
                let ga = if a_raw < PARAM_FLOOR {
                    0.0
                } else {
                    -(digamma(a + grp.y) - psi_abn - digamma(a) + psi_ab) * grp.w
                };
                let gb = if b_raw < PARAM_FLOOR {
                    0.0
                } else {
                    -(digamma(b + grp.n - grp.y) - psi_abn - digamma(b) + psi_ab) * grp.w
                };
                match &self.kind {
                    Kind::Eb1 { k } => {
                        gacc[0].add((ga + gb) * dchain[0]);
                        for j in 0..*k {
                            let p = grp.profile[j];
                            gacc[1 + j].add((ga * p + gb * (1.0 - p)) * dchain[1 + j]);
                        }
                    }
                    Kind::Eb2 => {
                        let p = grp.profile[0];
                        if p == 0.0 {
                            gacc[2].add(ga * dchain[2]);
                            gacc[3].add(gb * dchain[3]);
                        } else if p == 1.0 {
                            gacc[3].add(ga * dchain[3]);
                            gacc[2].add(gb * dchain[2]);
                        } else {
                            gacc[0].add((ga + gb) * dchain[0]);
                            gacc[1].add((ga * p + gb * (1.0 - p)) * dchain[1]);
                        }
                    }
                    Kind::Spline { .. } => {
                        for m in 0..self.dim {
                            gacc[m].add((ga * grp.basis_p[m] + gb * grp.basis_q[m]) * dchain[m]);
                        }
                    }
                    Kind::LogAb => {
                        gacc[0].add(ga * dchain[0]);
                        gacc[1].add(gb * dchain[1]);
                    }
                }
            }
        }

        if let Some(g) = grad {
            for (slot, acc) in g.iter_mut().zip(&gacc) {
                *slot = acc.value();
            }
        }
        f.value()
    }
}
