//! Fitness functions: spline-knot information criteria, subset BIC, and an
//! adapter for user-supplied objectives.

use alloc::vec::Vec;
use core::fmt::Display;
use core::marker::PhantomData;

use crate::chromosome::{build_grid, is_feasible, BinaryChromosome, FeasibilityParams, Grid, KnotChromosome};
use crate::error::{Error, Result};
use crate::ga::{Direction, Objective};
use crate::regress::{glm_fit, least_squares, DesignMatrix, FitResult, GlmFamily, IcKind};
use crate::spline::{KnotSet, SplineSpec};

/// Data and settings for scoring knot configurations.
#[derive(Debug, Clone)]
pub struct KnotObjectiveContext {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub grid: Grid,
    pub spec: SplineSpec,
    pub ic_kind: IcKind,
    pub fp: FeasibilityParams,
}

impl KnotObjectiveContext {
    /// `spec.boundary` should normally be `(min x, max x)`; see [`Self::boundary`].
    pub fn new(x: Vec<f64>, y: Vec<f64>, spec: SplineSpec, ic_kind: IcKind, d_min: f64) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidResponse("response values must be finite".into()));
        }
        let grid = build_grid(&x)?;
        let fp = FeasibilityParams::new(grid.values.clone(), d_min)?;
        Ok(Self { x, y, grid, spec, ic_kind, fp })
    }

    /// Range of the design values, the usual spline boundary.
    pub fn boundary(x: &[f64]) -> (f64, f64) {
        x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn with_m_max(mut self, m_max: Option<usize>) -> Self {
        self.fp.m_max = m_max;
        self
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Least-squares fit at the chromosome's knots.
    pub fn fit(&self, c: &KnotChromosome) -> Result<KnotFit> {
        if !is_feasible(c, &self.fp) {
            return Err(Error::Infeasible("knot configuration violates spacing or boundary".into()));
        }
        self.fit_values(c.knot_values(&self.grid.values))
    }

    /// Least-squares fit at arbitrary interior knot values.
    pub fn fit_values(&self, knots: Vec<f64>) -> Result<KnotFit> {
        let knots = KnotSet::new(knots, self.spec.boundary)?;
        let design = self.spec.design(&self.x, &knots)?;
        let fit = least_squares(&design, &self.y)?.with_ic(self.n(), self.ic_kind, GlmFamily::GaussianIdentity)?;
        Ok(KnotFit { knots, fit })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnotFit {
    pub knots: KnotSet,
    pub fit: FitResult,
}

impl KnotFit {
    /// Fitted spline evaluated at `x`.
    pub fn predict(&self, spec: &SplineSpec, x: &[f64]) -> Result<Vec<f64>> {
        Ok(spec.design(x, &self.knots)?.mul_vec(&self.fit.coefficients))
    }
}

/// Information criterion of the spline fit; `+inf` for infeasible or
/// unfittable configurations.
pub fn knot_ic(c: &KnotChromosome, ctx: &KnotObjectiveContext) -> f64 {
    match ctx.fit(c) {
        Ok(f) => f.fit.ic_value.unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

/// Criterion at arbitrary knot values, with no spacing requirement.
pub fn ic_at_knots(knots: &[f64], ctx: &KnotObjectiveContext) -> f64 {
    match ctx.fit_values(knots.to_vec()) {
        Ok(f) => f.fit.ic_value.unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

impl Objective<KnotChromosome> for KnotObjectiveContext {
    fn evaluate(&self, c: &KnotChromosome) -> f64 {
        knot_ic(c, self)
    }
}

/// Type-7 sample quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `k` knots at the sample quantiles `1/(k+1), ..., k/(k+1)` of `x`.
pub fn equal_quantile_knots(x: &[f64], k: usize) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    (1..=k).map(|i| quantile_sorted(&sorted, i as f64 / (k + 1) as f64)).collect()
}

/// Data and settings for scoring predictor subsets.
#[derive(Debug, Clone)]
pub struct SubsetObjectiveContext {
    pub y: Vec<f64>,
    pub x: DesignMatrix,
    pub family: GlmFamily,
    pub fit_intercept: bool,
}

impl SubsetObjectiveContext {
    pub fn new(y: Vec<f64>, x: DesignMatrix, family: GlmFamily, fit_intercept: bool) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.rows(), found: y.len() });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidResponse("response values must be finite".into()));
        }
        // glm_fit validates the response support; probe it on the null design
        let ones = DesignMatrix::from_col_major(y.len(), 1, alloc::vec![1.0; y.len()])?;
        if let Err(e @ Error::InvalidResponse(_)) = glm_fit(&ones, &y, family) {
            return Err(e);
        }
        Ok(Self { y, x, family, fit_intercept })
    }

    pub fn p(&self) -> usize {
        self.x.cols()
    }

    /// Fit of the selected predictors; `r` counts only selected columns.
    pub fn refit(&self, z: &BinaryChromosome) -> Result<FitResult> {
        if z.len() != self.p() {
            return Err(Error::DimensionMismatch { expected: self.p(), found: z.len() });
        }
        let cols = z.selected();
        let r = cols.len();
        let n = self.y.len();
        let mut fit = if cols.is_empty() && !self.fit_intercept {
            let mu = alloc::vec![self.family.mean(0.0); n];
            FitResult {
                coefficients: Vec::new(),
                rss_or_deviance: self.family.deviance(&self.y, &mu),
                free_params: 0,
                ic_value: None,
                ic_kind: None,
            }
        } else {
            glm_fit(&self.x.select_columns(&cols, self.fit_intercept)?, &self.y, self.family)?
        };
        fit.free_params = r;
        fit.with_ic(n, IcKind::Bic, self.family)
    }
}

/// Negative BIC of the selected subset; `-inf` when the fit fails.
pub fn subset_bic(z: &BinaryChromosome, ctx: &SubsetObjectiveContext) -> f64 {
    match ctx.refit(z) {
        Ok(f) => f.ic_value.map_or(f64::NEG_INFINITY, |v| -v),
        Err(_) => f64::NEG_INFINITY,
    }
}

impl Objective<BinaryChromosome> for SubsetObjectiveContext {
    fn evaluate(&self, z: &BinaryChromosome) -> f64 {
        subset_bic(z, self)
    }

    fn direction(&self) -> Direction {
        Direction::Maximize
    }
}

/// Wraps `f(chromosome, extras)` as an [`Objective`].
///
/// Errors and non-finite values score as the losing value for the chosen
/// direction; errors are logged at warn level.
pub struct CustomObjective<C, T, F> {
    f: F,
    extras: T,
    direction: Direction,
    _chromosome: PhantomData<fn(&C)>,
}

impl<C, T, F, E> CustomObjective<C, T, F>
where
    F: Fn(&C, &T) -> core::result::Result<f64, E>,
    E: Display,
{
    pub fn new(f: F, extras: T, direction: Direction) -> Self {
        Self { f, extras, direction, _chromosome: PhantomData }
    }

    pub fn extras(&self) -> &T {
        &self.extras
    }
}

impl<C, T, F, E> Objective<C> for CustomObjective<C, T, F>
where
    F: Fn(&C, &T) -> core::result::Result<f64, E>,
    E: Display,
{
    fn evaluate(&self, c: &C) -> f64 {
        match (self.f)(c, &self.extras) {
            Ok(v) if v.is_finite() => v,
            Ok(_) => self.direction.losing(),
            Err(e) => {
                log::warn!("custom objective failed: {e}");
                self.direction.losing()
            }
        }
    }

    fn direction(&self) -> Direction {
        self.direction
    }
}
