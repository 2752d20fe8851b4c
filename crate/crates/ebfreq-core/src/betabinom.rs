//! Beta pseudo-count pairs, allele count pairs, and the beta-binomial density.
//!
//! Everything is kept in log space; the density for a marker with tens of
//! thousands of alleles would overflow in linear space.

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::special::{ln_beta_raw, ln_binom};

use alloc::format;

/// A Beta prior or posterior, stored as the pseudo-counts `(a, b)` for the
/// two alleles. Both are strictly positive by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    a: f64,
    b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() || !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidBetaParams { a, b });
        }
        Ok(Self { a, b })
    }

    /// Pseudo-counts for the A allele.
    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Pseudo-counts for the other allele.
    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Total pseudo-counts `a + b`; as a prior this is the local affinity.
    #[inline]
    pub fn nu(&self) -> f64 {
        self.a + self.b
    }

    /// Distribution mean `a / (a + b)`, always in (0, 1).
    #[inline]
    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    /// `mean (1 - mean) / (nu + 1)`: the Beta variance, used as the expected
    /// squared error of the posterior mean.
    #[inline]
    pub fn variance_proxy(&self) -> f64 {
        let m = self.mean();
        m * (1.0 - m) / (self.nu() + 1.0)
    }

    /// Conjugate update: add the observed counts to the pseudo-counts.
    #[inline]
    pub fn posterior(&self, obs: CountPair) -> BetaParams {
        BetaParams {
            a: self.a + f64::from(obs.successes),
            b: self.b + f64::from(obs.trials - obs.successes),
        }
    }
}

/// Observed allele counts for one sample at one marker: `successes` copies of
/// the A allele out of `trials` observed alleles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CountPair {
    successes: u32,
    trials: u32,
}

impl CountPair {
    pub fn new(successes: u32, trials: u32) -> Result<Self> {
        if trials == 0 || successes > trials {
            return Err(Error::InvalidCounts { successes, trials });
        }
        Ok(Self { successes, trials })
    }

    #[inline]
    pub fn successes(&self) -> u32 {
        self.successes
    }

    #[inline]
    pub fn trials(&self) -> u32 {
        self.trials
    }

    /// Observed frequency of the A allele.
    #[inline]
    pub fn freq(&self) -> f64 {
        f64::from(self.successes) / f64::from(self.trials)
    }
}

/// Log of the beta-binomial probability of seeing `x` successes in `n`
/// trials when the success probability is Beta-distributed with `params`:
/// `ln[ B(a+x, b+n-x) / B(a,b) * C(n,x) ]`.
pub fn log_betabinom_pmf(n: u32, params: BetaParams, x: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain(format!("trial count must be positive, got {n}")));
    }
    if x > n {
        return Err(Error::Domain(format!("x = {x} outside the support [0, {n}]")));
    }
    Ok(ln_pmf_raw(f64::from(n), f64::from(x), params.a, params.b))
}

/// Unchecked log pmf on raw floats; callers guarantee `0 <= x <= n` and
/// positive `(a, b)`.
#[inline]
pub(crate) fn ln_pmf_raw(n: f64, x: f64, a: f64, b: f64) -> f64 {
    ln_beta_raw(a + x, b + n - x) - ln_beta_raw(a, b) + ln_binom(n, x)
}

/// Log pmf with the combinatorial term already known (it does not depend on
/// `(a, b)`, so fitting code computes it once per marker).
#[inline]
pub(crate) fn ln_pmf_with_choose(n: f64, x: f64, a: f64, b: f64, ln_choose: f64) -> f64 {
    ln_beta_raw(a + x, b + n - x) - ln_beta_raw(a, b) + ln_choose
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // (n, a, b, x, ln pmf) from a 60-digit evaluation of the density.
    const PMF_UNIT_SPOTS: &[(u32, f64, f64, u32, f64)] = &[
        (90, 11.3, 22.41, 30, -3.075560432192915),
        (1000, 0.5, 3.25, 999, -20.36187457254281),
        (7, 2.0, 3.0, 0, -2.2155737160044158),
        (150, 0.001, 0.001, 150, -0.6987292399149246),
    ];

    fn bp(a: f64, b: f64) -> BetaParams {
        BetaParams::new(a, b).unwrap()
    }

    #[test]
    fn uniform_prior_trivial_cases() {
        // Beta(1,1)-binomial is uniform over {0, .., n}.
        let p = bp(1.0, 1.0);
        assert_relative_eq!(
            log_betabinom_pmf(1, p, 0).unwrap(),
            0.5f64.ln(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            log_betabinom_pmf(2, p, 1).unwrap(),
            (1.0f64 / 3.0).ln(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn matches_high_precision_spots() {
        for &(n, a, b, x, want) in PMF_UNIT_SPOTS {
            let got = log_betabinom_pmf(n, bp(a, b), x).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn rejects_out_of_support() {
        let p = bp(2.0, 3.0);
        assert!(log_betabinom_pmf(10, p, 11).is_err());
        assert!(log_betabinom_pmf(0, p, 0).is_err());
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(BetaParams::new(0.0, 1.0).is_err());
        assert!(BetaParams::new(1.0, -3.0).is_err());
        assert!(BetaParams::new(f64::NAN, 1.0).is_err());
        assert!(BetaParams::new(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn posterior_update_is_additive() {
        let post = bp(2.0, 5.0).posterior(CountPair::new(3, 10).unwrap());
        assert_eq!((post.a(), post.b()), (5.0, 12.0));

        let post = bp(0.1, 0.1).posterior(CountPair::new(4, 4).unwrap());
        assert_eq!((post.a(), post.b()), (4.1, 0.1));
    }

    #[test]
    fn zero_trials_is_rejected() {
        assert!(CountPair::new(0, 0).is_err());
        assert!(CountPair::new(3, 2).is_err());
    }

    #[test]
    fn posterior_mean_and_variance() {
        let p = bp(5.0, 12.0);
        assert_relative_eq!(p.mean(), 5.0 / 17.0, max_relative = 1e-15);
        assert_relative_eq!(
            p.variance_proxy(),
            (5.0 / 17.0) * (12.0 / 17.0) / 18.0,
            max_relative = 1e-15
        );
        assert_eq!(bp(3.7, 3.7).mean(), 0.5);
        assert_relative_eq!(bp(1.0, 1.0).variance_proxy(), 1.0 / 12.0, max_relative = 1e-15);
        // variance decreases in nu at fixed mean
        assert!(bp(10.0, 10.0).variance_proxy() < bp(2.0, 2.0).variance_proxy());
    }

    #[test]
    fn posterior_mean_matches_closed_form() {
        // (y + a) / (n + a + b) recomputed the straight-line way.
        let prior = bp(0.038 + 36.88 * 0.4, 0.038 + 36.88 * 0.6);
        let obs = CountPair::new(11, 30).unwrap();
        let post = prior.posterior(obs);
        let direct = (11.0 + prior.a()) / (30.0 + prior.a() + prior.b());
        assert_eq!(post.mean(), direct);
    }

    #[test]
    fn normalizes_for_large_n() {
        // exp of the log pmf sums to 1 over the support.
        for &(a, b) in &[(0.5, 0.5), (11.3, 22.41), (1e-3, 5.0), (1e4, 2.0)] {
            let n = 1000;
            let p = bp(a, b);
            let mut total = 0.0;
            for x in 0..=n {
                total += log_betabinom_pmf(n, p, x).unwrap().exp();
            }
            assert!(
                (total - 1.0).abs() < 1e-10,
                "sum for ({a}, {b}) was {total}"
            );
        }
    }

    #[test]
    fn binomial_limit() {
        // As a + b grows with a/(a+b) fixed, the pmf approaches Binom(n, p).
        let n = 30u32;
        let p = 0.3;
        let nu = 1e7;
        let params = bp(p * nu, (1.0 - p) * nu);
        let mut tv = 0.0;
        for x in 0..=n {
            let bb = log_betabinom_pmf(n, params, x).unwrap().exp();
            let nf = f64::from(n);
            let xf = f64::from(x);
            let binom = (crate::special::ln_binom(nf, xf)
                + xf * p.ln()
                + (nf - xf) * (1.0 - p).ln())
            .exp();
            tv += (bb - binom).abs();
        }
        assert!(tv / 2.0 < 1e-4, "total variation {tv}");
    }
}
