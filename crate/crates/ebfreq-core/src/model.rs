//! Conditional-prior families: windowed, EB1, EB2 and the spline model.
//!
//! A fitted model maps the observed booster frequencies of a marker to the
//! Beta pseudo-counts `(a, b)` of its empirical prior. Models are immutable
//! after construction and evaluation is pure.

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::betabinom::BetaParams;
use crate::bspline::CubicBspline;
use crate::error::{Error, Result};

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Observed booster frequencies for one marker, one entry per booster sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BoosterProfile(Vec<f64>);

impl BoosterProfile {
    pub fn new(freqs: Vec<f64>) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::Domain(String::from(
                "a booster profile needs at least one frequency",
            )));
        }
        for &p in &freqs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain(format!("booster frequency {p} outside [0, 1]")));
            }
        }
        Ok(Self(freqs))
    }

    #[inline]
    pub fn freqs(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// The elementwise complement `1 - p`, used by symmetry checks.
    pub fn complement(&self) -> BoosterProfile {
        BoosterProfile(self.0.iter().map(|p| 1.0 - p).collect())
    }
}

/// Linear model: `a = beta0 + sum_k beta_k p_k`, `b = beta0 + sum_k beta_k (1 - p_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eb1Model {
    beta0: f64,
    betas: Vec<f64>,
}

impl Eb1Model {
    pub fn new(beta0: f64, betas: Vec<f64>) -> Result<Self> {
        if !beta0.is_finite() || beta0 < 0.0 {
            return Err(Error::InvalidModel(format!("beta0 must be >= 0, got {beta0}")));
        }
        if betas.is_empty() {
            return Err(Error::InvalidModel(String::from("need at least one booster coefficient")));
        }
        for &b in &betas {
            if !b.is_finite() || b < 0.0 {
                return Err(Error::InvalidModel(format!("booster coefficient must be >= 0, got {b}")));
            }
        }
        Ok(Self { beta0, betas })
    }

    #[inline]
    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    #[inline]
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
}

/// Single-booster linear model with indicator corrections at the observed
/// frequency endpoints:
/// `a = beta0 + beta1 p + beta2 1{p=0} + beta3 1{p=1}` and mirrored for `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eb2Model {
    beta0: f64,
    beta1: f64,
    beta2: f64,
    beta3: f64,
}

impl Eb2Model {
    /// `beta2` and `beta3` may be negative as long as the endpoint
    /// pseudo-counts `beta0 + beta2` and `beta0 + beta1 + beta3` stay positive.
    pub fn new(beta0: f64, beta1: f64, beta2: f64, beta3: f64) -> Result<Self> {
        for (name, v) in [("beta0", beta0), ("beta1", beta1), ("beta2", beta2), ("beta3", beta3)] {
            if !v.is_finite() {
                return Err(Error::InvalidModel(format!("{name} must be finite, got {v}")));
            }
        }
        if beta0 < 0.0 || beta1 < 0.0 {
            return Err(Error::InvalidModel(format!(
                "beta0 and beta1 must be >= 0, got ({beta0}, {beta1})"
            )));
        }
        if beta0 + beta2 <= 0.0 || beta0 + beta1 + beta3 <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "endpoint pseudo-counts must stay positive: a(0) = {}, b(0) = {}",
                beta0 + beta2,
                beta0 + beta1 + beta3
            )));
        }
        Ok(Self { beta0, beta1, beta2, beta3 })
    }

    #[inline]
    pub fn coefficients(&self) -> (f64, f64, f64, f64) {
        (self.beta0, self.beta1, self.beta2, self.beta3)
    }
}

/// B-spline expansion: `a = sum_k sum_j N_j(p_k) theta_jk` and
/// `b = sum_k sum_j N_j(1 - p_k) gamma_jk`; the symmetric form shares
/// `gamma = theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineModel {
    basis: CubicBspline,
    thetas: Vec<Vec<f64>>,
    gammas: Option<Vec<Vec<f64>>>,
}

impl SplineModel {
    /// Symmetric spline (`a(p) = b(1-p)` by construction).
    pub fn symmetric(n_basis: usize, thetas: Vec<Vec<f64>>) -> Result<Self> {
        let basis = CubicBspline::new(n_basis)?;
        Self::check_coefs(n_basis, &thetas, "theta")?;
        Ok(Self { basis, thetas, gammas: None })
    }

    /// Asymmetric spline with independent coefficient vectors for `b`.
    pub fn asymmetric(n_basis: usize, thetas: Vec<Vec<f64>>, gammas: Vec<Vec<f64>>) -> Result<Self> {
        let basis = CubicBspline::new(n_basis)?;
        Self::check_coefs(n_basis, &thetas, "theta")?;
        Self::check_coefs(n_basis, &gammas, "gamma")?;
        if gammas.len() != thetas.len() {
            return Err(Error::InvalidModel(format!(
                "theta has {} boosters but gamma has {}",
                thetas.len(),
                gammas.len()
            )));
        }
        Ok(Self { basis, thetas, gammas: Some(gammas) })
    }

    fn check_coefs(n_basis: usize, coefs: &[Vec<f64>], name: &str) -> Result<()> {
        if coefs.is_empty() {
            return Err(Error::InvalidModel(format!("{name} needs at least one booster vector")));
        }
        for v in coefs {
            if v.len() != n_basis {
                return Err(Error::InvalidModel(format!(
                    "{name} vector has length {}, expected {n_basis}",
                    v.len()
                )));
            }
            for &c in v {
                if !c.is_finite() || c <= 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "{name} coefficients must be positive, got {c}"
                    )));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn n_basis(&self) -> usize {
        self.basis.n_basis()
    }

    #[inline]
    pub fn is_symmetric(&self) -> bool {
        self.gammas.is_none()
    }

    #[inline]
    pub fn thetas(&self) -> &[Vec<f64>] {
        &self.thetas
    }

    #[inline]
    pub fn gammas(&self) -> Option<&[Vec<f64>]> {
        self.gammas.as_deref()
    }

    fn eval(&self, freqs: &[f64]) -> Result<(f64, f64)> {
        let n = self.basis.n_basis();
        let mut buf = vec![0.0; n];
        let gammas = self.gammas.as_ref().unwrap_or(&self.thetas);
        let mut a = 0.0;
        let mut b = 0.0;
        for (k, &p) in freqs.iter().enumerate() {
            self.basis.eval_into(p, &mut buf)?;
            a += dot(&buf, &self.thetas[k]);
            self.basis.eval_into(1.0 - p, &mut buf)?;
            b += dot(&buf, &gammas[k]);
        }
        Ok((a, b))
    }
}

#[inline]
fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// One window of a windowed model: the booster counts `lo..=hi` share a
/// maximum-likelihood Beta prior.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowBin {
    pub lo: u32,
    pub hi: u32,
    pub params: BetaParams,
    /// Markers the window was fitted on.
    pub markers: usize,
}

/// Per-count empirical priors for a single booster with a fixed trial count.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedModel {
    n_x: u32,
    delta: Option<f64>,
    bins: Vec<WindowBin>,
}

impl WindowedModel {
    pub fn new(n_x: u32, delta: Option<f64>, bins: Vec<WindowBin>) -> Result<Self> {
        if n_x == 0 {
            return Err(Error::InvalidModel(String::from("booster trial count must be positive")));
        }
        if bins.is_empty() {
            return Err(Error::InvalidModel(String::from("windowed model needs at least one bin")));
        }
        let mut prev_hi: Option<u32> = None;
        for bin in &bins {
            if bin.lo > bin.hi || bin.hi > n_x {
                return Err(Error::InvalidModel(format!(
                    "bin [{}, {}] outside the count range 0..={n_x}",
                    bin.lo, bin.hi
                )));
            }
            if let Some(h) = prev_hi {
                if bin.lo <= h {
                    return Err(Error::InvalidModel(format!(
                        "bins overlap or are unsorted near count {}",
                        bin.lo
                    )));
                }
            }
            prev_hi = Some(bin.hi);
        }
        Ok(Self { n_x, delta, bins })
    }

    #[inline]
    pub fn n_x(&self) -> u32 {
        self.n_x
    }

    #[inline]
    pub fn delta(&self) -> Option<f64> {
        self.delta
    }

    #[inline]
    pub fn bins(&self) -> &[WindowBin] {
        &self.bins
    }

    fn lookup(&self, p: f64) -> Result<BetaParams> {
        let count = (p * f64::from(self.n_x)).round() as u32;
        self.bins
            .iter()
            .find(|b| b.lo <= count && count <= b.hi)
            .map(|b| b.params)
            .ok_or(Error::BinMiss { count })
    }
}

/// A fitted conditional-prior family.
#[derive(Debug, Clone, PartialEq)]
pub enum PriorModel {
    Windowed(WindowedModel),
    Eb1(Eb1Model),
    Eb2(Eb2Model),
    Spline(SplineModel),
}

impl PriorModel {
    /// Number of booster samples the model conditions on.
    pub fn k(&self) -> usize {
        match self {
            PriorModel::Windowed(_) | PriorModel::Eb2(_) => 1,
            PriorModel::Eb1(m) => m.betas.len(),
            PriorModel::Spline(m) => m.thetas.len(),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            PriorModel::Windowed(_) => "windowed",
            PriorModel::Eb1(_) => "eb1",
            PriorModel::Eb2(_) => "eb2",
            PriorModel::Spline(_) => "spline",
        }
    }

    /// The prior `(a(p), b(p))` at a booster profile.
    pub fn eval(&self, profile: &BoosterProfile) -> Result<BetaParams> {
        if profile.k() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                found: profile.k(),
            });
        }
        let freqs = profile.freqs();
        let (a, b) = match self {
            PriorModel::Windowed(m) => {
                let params = m.lookup(freqs[0])?;
                (params.a(), params.b())
            }
            PriorModel::Eb1(m) => {
                let mut a = m.beta0;
                let mut b = m.beta0;
                for (&beta, &p) in m.betas.iter().zip(freqs) {
                    a += beta * p;
                    b += beta * (1.0 - p);
                }
                (a, b)
            }
            PriorModel::Eb2(m) => {
                let p = freqs[0];
                let mut a = m.beta0 + m.beta1 * p;
                let mut b = m.beta0 + m.beta1 * (1.0 - p);
                if p == 0.0 {
                    a += m.beta2;
                    b += m.beta3;
                }
                if p == 1.0 {
                    a += m.beta3;
                    b += m.beta2;
                }
                (a, b)
            }
            PriorModel::Spline(m) => m.eval(freqs)?,
        };
        BetaParams::new(a, b).map_err(|_| Error::NonPositivePrior { a, b })
    }

    /// Global affinity: the effective number of alleles the boosters
    /// contribute to each posterior.
    ///
    /// Windowed: median of `a + b` over windows. EB1: `2 beta0 + sum_k beta_k`.
    /// EB2: `2 beta0 + beta1` (the interior value; the endpoint indicators
    /// carry no measure). Spline: `integral of a(p) + b(p) over [0, 1]` by
    /// 1024-interval composite Simpson, applied per booster and summed.
    pub fn affinity(&self) -> f64 {
        match self {
            PriorModel::Windowed(m) => {
                let mut nus: Vec<f64> = m.bins.iter().map(|b| b.params.nu()).collect();
                nus.sort_by(|x, y| x.partial_cmp(y).expect("affinities are finite"));
                let n = nus.len();
                if n % 2 == 1 {
                    nus[n / 2]
                } else {
                    0.5 * (nus[n / 2 - 1] + nus[n / 2])
                }
            }
            PriorModel::Eb1(m) => 2.0 * m.beta0 + m.betas.iter().sum::<f64>(),
            PriorModel::Eb2(m) => 2.0 * m.beta0 + m.beta1,
            PriorModel::Spline(_) => {
                let k = self.k();
                self.simpson_affinity(k)
            }
        }
    }

    /// True when [`affinity`](Self::affinity) goes beyond the single-booster
    /// definitions (multi-booster models and EB2 use extended conventions).
    pub fn affinity_extended(&self) -> bool {
        match self {
            PriorModel::Windowed(_) => false,
            PriorModel::Eb1(m) => m.betas.len() > 1,
            PriorModel::Eb2(_) => true,
            PriorModel::Spline(m) => m.thetas.len() > 1,
        }
    }

    /// `a(p) + b(p)` at one profile.
    pub fn local_affinity(&self, profile: &BoosterProfile) -> Result<f64> {
        self.eval(profile).map(|p| p.nu())
    }

    fn simpson_affinity(&self, k: usize) -> f64 {
        // Composite Simpson on the diagonal profile (p, ..., p); for the
        // additive spline this equals the sum of per-booster integrals.
        const INTERVALS: usize = 1024;
        let h = 1.0 / INTERVALS as f64;
        let at = |p: f64| -> f64 {
            let profile = BoosterProfile::new(vec![p; k]).expect("diagonal profile is valid");
            self.eval(&profile).expect("spline positivity").nu()
        };
        let mut acc = at(0.0) + at(1.0);
        for i in 1..INTERVALS {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * at(i as f64 * h);
        }
        acc * h / 3.0
    }
}
