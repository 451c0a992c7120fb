//! Synthetic data for subset selection and knot placement.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::regress::DesignMatrix;

const AR_BURN_IN: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSimSpec {
    pub n: usize,
    pub p: usize,
    pub s0: usize,
    pub sigma: f64,
    pub magnitudes_range: (f64, f64),
    /// AR(1) coefficient of the errors; `None` gives iid errors.
    pub rho: Option<f64>,
}

impl Default for SubsetSimSpec {
    fn default() -> Self {
        Self { n: 100, p: 50, s0: 25, sigma: 1.5, magnitudes_range: (0.5, 2.0), rho: None }
    }
}

impl SubsetSimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.p < 1 {
            return Err(Error::InvalidConfig("n and p must be >= 1".into()));
        }
        if self.s0 > self.p {
            return Err(Error::InvalidConfig("s0 must not exceed p".into()));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidConfig("sigma must be finite and >= 0".into()));
        }
        let (lo, hi) = self.magnitudes_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidConfig("magnitudes_range must satisfy lo <= hi".into()));
        }
        if let Some(rho) = self.rho {
            if !(rho.abs() < 1.0) {
                return Err(Error::InvalidConfig("rho must lie in (-1, 1)".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSimResult {
    pub x: DesignMatrix,
    pub y: Vec<f64>,
    pub beta_true: Vec<f64>,
    /// Sorted active predictor indices (0-based).
    pub true_idx: Vec<usize>,
    pub errors: Vec<f64>,
}

/// Errors with marginal sd `sigma`: iid, or AR(1) with innovation sd
/// `sigma * sqrt(1 - rho^2)` after a burn-in.
pub fn sim_errors<R: Rng + ?Sized>(n: usize, sigma: f64, rho: Option<f64>, rng: &mut R) -> Vec<f64> {
    let draw = |rng: &mut R, sd: f64| sd * rng.sample::<f64, _>(StandardNormal);
    match rho {
        None => (0..n).map(|_| draw(rng, sigma)).collect(),
        Some(rho) => {
            let sd = sigma * libm::sqrt(1.0 - rho * rho);
            let mut e = 0.0;
            let mut out = Vec::with_capacity(n);
            for t in 0..n + AR_BURN_IN {
                e = rho * e + draw(rng, sd);
                if t >= AR_BURN_IN {
                    out.push(e);
                }
            }
            out
        }
    }
}

/// Standard-normal predictors, a random sparse coefficient vector and
/// `y = X beta + e`.
pub fn sim_subset_data<R: Rng + ?Sized>(spec: &SubsetSimSpec, rng: &mut R) -> Result<SubsetSimResult> {
    spec.validate()?;
    let (n, p) = (spec.n, spec.p);
    let data: Vec<f64> = (0..n * p).map(|_| rng.sample(StandardNormal)).collect();
    let x = DesignMatrix::from_col_major(n, p, data)?;
    let mut true_idx = rand::seq::index::sample(rng, p, spec.s0).into_vec();
    true_idx.sort_unstable();
    let signs: Vec<f64> = (0..spec.s0).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    let (lo, hi) = spec.magnitudes_range;
    let mags: Vec<f64> = if lo < hi {
        let u = Uniform::new(lo, hi).map_err(|_| Error::InvalidConfig("bad magnitudes_range".into()))?;
        (0..spec.s0).map(|_| u.sample(rng)).collect()
    } else {
        alloc::vec![lo; spec.s0]
    };
    let mut beta_true = alloc::vec![0.0; p];
    for (k, &j) in true_idx.iter().enumerate() {
        beta_true[j] = mags[k] * signs[k];
    }
    let errors = sim_errors(n, spec.sigma, spec.rho, rng);
    let y = x.mul_vec(&beta_true).iter().zip(&errors).map(|(m, e)| m + e).collect();
    Ok(SubsetSimResult { x, y, beta_true, true_idx, errors })
}

#[derive(Debug, Clone, PartialEq)]
pub enum KnotMean {
    /// Continuous piecewise-linear: `slopes[k]` applies between `breaks[k-1]`
    /// and `breaks[k]`; value `intercept` at the left end of the range.
    PiecewiseLinear { intercept: f64, slopes: Vec<f64>, breaks: Vec<f64> },
    /// `sin(4u) + 2 exp(-30 (u - 1/2)^2)` with `u` the position rescaled to [0, 1].
    Smooth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnotSimSpec {
    pub n: usize,
    pub x_range: (f64, f64),
    pub mean: KnotMean,
    pub sigma: f64,
}

impl KnotSimSpec {
    /// `x = 1, ..., n` with the given piecewise-linear mean.
    pub fn piecewise(n: usize, intercept: f64, slopes: Vec<f64>, breaks: Vec<f64>, sigma: f64) -> Self {
        Self { n, x_range: (1.0, n as f64), mean: KnotMean::PiecewiseLinear { intercept, slopes, breaks }, sigma }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.x_range;
        if self.n < 2 || !(lo < hi) {
            return Err(Error::InvalidConfig("need n >= 2 and x_lo < x_hi".into()));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidConfig("sigma must be finite and >= 0".into()));
        }
        if let KnotMean::PiecewiseLinear { slopes, breaks, .. } = &self.mean {
            if slopes.len() != breaks.len() + 1 {
                return Err(Error::InvalidConfig("need one more slope than breaks".into()));
            }
            if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|&b| !(b > lo && b < hi)) {
                return Err(Error::InvalidConfig("breaks must be increasing and inside the x range".into()));
            }
        }
        Ok(())
    }

    pub fn mean_at(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        match &self.mean {
            KnotMean::PiecewiseLinear { intercept, slopes, breaks } => {
                let mut v = intercept + slopes[0] * (x - lo);
                for (k, &b) in breaks.iter().enumerate() {
                    v += (slopes[k + 1] - slopes[k]) * (x - b).max(0.0);
                }
                v
            }
            KnotMean::Smooth => {
                let u = (x - lo) / (hi - lo);
                libm::sin(4.0 * u) + 2.0 * libm::exp(-30.0 * (u - 0.5) * (u - 0.5))
            }
        }
    }

    /// Equispaced design points.
    pub fn design_points(&self) -> Vec<f64> {
        let (lo, hi) = self.x_range;
        let step = (hi - lo) / (self.n - 1) as f64;
        (0..self.n).map(|i| if i + 1 == self.n { hi } else { lo + step * i as f64 }).collect()
    }

    /// Max minus min of the noiseless mean over the design points.
    pub fn signal_range(&self) -> f64 {
        let m: Vec<f64> = self.design_points().iter().map(|&x| self.mean_at(x)).collect();
        m.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - m.iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnotSimResult {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub mean: Vec<f64>,
    /// True break locations (empty for the smooth mean).
    pub breaks: Vec<f64>,
}

pub fn sim_knot_data<R: Rng + ?Sized>(spec: &KnotSimSpec, rng: &mut R) -> Result<KnotSimResult> {
    spec.validate()?;
    let x = spec.design_points();
    let mean: Vec<f64> = x.iter().map(|&v| spec.mean_at(v)).collect();
    let noise = Normal::new(0.0, spec.sigma).map_err(|_| Error::InvalidConfig("invalid sigma".into()))?;
    let y = mean.iter().map(|m| m + noise.sample(rng)).collect();
    let breaks = match &spec.mean {
        KnotMean::PiecewiseLinear { breaks, .. } => breaks.clone(),
        KnotMean::Smooth => Vec::new(),
    };
    Ok(KnotSimResult { x, y, mean, breaks })
}
