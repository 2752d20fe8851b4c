//! Cubic B-spline basis on a clamped uniform knot vector over [0, 1].

use crate::error::{Error, Result};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

const DEGREE: usize = 3;

/// A fixed cubic basis: `n_basis` functions on knots
/// `0, 0, 0, 0, 1/(N-3), ..., (N-4)/(N-3), 1, 1, 1, 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicBspline {
    n_basis: usize,
    knots: Vec<f64>,
}

impl CubicBspline {
    pub fn new(n_basis: usize) -> Result<Self> {
        if n_basis < DEGREE + 1 {
            return Err(Error::InvalidModel(format!(
                "cubic basis needs at least {} functions, got {n_basis}",
                DEGREE + 1
            )));
        }
        let segments = (n_basis - DEGREE) as f64;
        let mut knots = vec![0.0; n_basis + DEGREE + 1];
        for (i, t) in knots.iter_mut().enumerate() {
            *t = if i <= DEGREE {
                0.0
            } else if i >= n_basis {
                1.0
            } else {
                (i - DEGREE) as f64 / segments
            };
        }
        Ok(Self { n_basis, knots })
    }

    #[inline]
    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    /// All basis values at `p`. Entries are nonnegative and sum to one.
    pub fn eval(&self, p: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n_basis];
        self.eval_into(p, &mut out)?;
        Ok(out)
    }

    /// Like [`eval`](Self::eval) but writing into a caller-provided slice of
    /// length `n_basis`.
    pub fn eval_into(&self, p: f64, out: &mut [f64]) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("spline argument {p} outside [0, 1]")));
        }
        assert_eq!(out.len(), self.n_basis);
        out.fill(0.0);

        let t = &self.knots;
        // Knot span containing p; the uniform guess is then nudged so that
        // t[span] <= p < t[span+1] (with p = 1 landing in the last span).
        let segments = (self.n_basis - DEGREE) as f64;
        let mut span = DEGREE + (p * segments) as usize;
        span = span.min(self.n_basis - 1);
        while span > DEGREE && p < t[span] {
            span -= 1;
        }
        while span < self.n_basis - 1 && p >= t[span + 1] {
            span += 1;
        }

        // Cox-de Boor triangle for the DEGREE+1 basis functions alive on the span.
        let mut vals = [0.0f64; DEGREE + 1];
        let mut left = [0.0f64; DEGREE + 1];
        let mut right = [0.0f64; DEGREE + 1];
        vals[0] = 1.0;
        for j in 1..=DEGREE {
            left[j] = p - t[span + 1 - j];
            right[j] = t[span + j] - p;
            let mut saved = 0.0;
            for r in 0..j {
                let tmp = vals[r] / (right[r + 1] + left[j - r]);
                vals[r] = saved + right[r + 1] * tmp;
                saved = left[j - r] * tmp;
            }
            vals[j] = saved;
        }

        out[span - DEGREE..=span].copy_from_slice(&vals);
        Ok(())
    }

    /// Greville abscissae: the points where the basis reproduces a linear
    /// function, `xi_j = (t[j+1] + t[j+2] + t[j+3]) / 3`. Coefficients
    /// `c + d * xi_j` represent `c + d p` exactly.
    pub fn greville(&self) -> Vec<f64> {
        (0..self.n_basis)
            .map(|j| (self.knots[j + 1] + self.knots[j + 2] + self.knots[j + 3]) / 3.0)
            .collect()
    }

    /// Exact integrals of each basis function over [0, 1]:
    /// `(t[j+4] - t[j]) / 4`.
    pub(crate) fn basis_integrals(&self) -> Vec<f64> {
        (0..self.n_basis)
            .map(|j| (self.knots[j + DEGREE + 1] - self.knots[j]) / 4.0)
            .collect()
    }
}

/// Cubic B-spline basis values at `p` for an `n_basis`-function clamped
/// uniform basis on [0, 1].
pub fn bspline_basis(n_basis: usize, p: f64) -> Result<Vec<f64>> {
    CubicBspline::new(n_basis)?.eval(p)
}
