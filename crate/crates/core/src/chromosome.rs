//! Chromosome encodings and knot feasibility.
//!
//! Knot chromosomes hold 0-based indices into the sorted unique grid of
//! design values. A configuration is feasible when indices are strictly
//! increasing, consecutive knots are more than `d_min` apart in x-units and
//! the outer knots are more than `d_min` inside the grid ends.

use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};

/// Sorted unique design values and the position of each raw observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub values: Vec<f64>,
    /// `values[index_map[i]] == x[i]`.
    pub index_map: Vec<usize>,
}

pub fn build_grid(x: &[f64]) -> Result<Grid> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Infeasible("design values must be finite".into()));
    }
    let mut values = x.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    if values.len() < 2 {
        return Err(Error::Infeasible("design needs at least two distinct x values".into()));
    }
    let index_map = x.iter().map(|v| values.partition_point(|g| g < v)).collect();
    Ok(Grid { values, index_map })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct KnotChromosome {
    tau: Vec<usize>,
}

impl KnotChromosome {
    /// Wraps indices as given; feasibility is checked separately.
    pub fn new(tau: Vec<usize>) -> Self {
        Self { tau }
    }

    pub fn m(&self) -> usize {
        self.tau.len()
    }

    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    /// Knot locations in x-units.
    pub fn knot_values(&self, grid: &[f64]) -> Vec<f64> {
        self.tau.iter().map(|&i| grid[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinaryChromosome {
    bits: Vec<bool>,
}

impl BinaryChromosome {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(p: usize) -> Self {
        Self { bits: alloc::vec![false; p] }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Indices of included predictors.
    pub fn selected(&self) -> Vec<usize> {
        self.bits.iter().enumerate().filter_map(|(i, b)| b.then_some(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityParams {
    pub d_min: f64,
    pub grid: Vec<f64>,
    pub m_max: Option<usize>,
}

impl FeasibilityParams {
    /// Parameters with the default knot-count cap.
    pub fn new(grid: Vec<f64>, d_min: f64) -> Result<Self> {
        if !(d_min >= 0.0) || !d_min.is_finite() {
            return Err(Error::InvalidConfig("d_min must be a finite value >= 0".into()));
        }
        if grid.len() < 2 || grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidConfig("grid must be strictly increasing with >= 2 points".into()));
        }
        let m_max = Some(default_m_max(&grid, d_min));
        Ok(Self { d_min, grid, m_max })
    }

    pub fn with_m_max(mut self, m_max: Option<usize>) -> Self {
        self.m_max = m_max;
        self
    }

    /// Cap used by varying-m sampling: `m_max` if set, else the default.
    pub fn effective_m_max(&self) -> usize {
        self.m_max.unwrap_or_else(|| default_m_max(&self.grid, self.d_min))
    }

    /// Contiguous range of grid indices that satisfy both boundary conditions.
    pub fn candidates(&self) -> Range<usize> {
        let lo = self.grid[0] + self.d_min;
        let hi = self.grid[self.grid.len() - 1] - self.d_min;
        let start = self.grid.partition_point(|&g| g <= lo);
        let end = self.grid.partition_point(|&g| g < hi);
        start..end.max(start)
    }
}

/// `floor((x_hi - x_lo) / d_min) - 1` for positive spacing, else `floor(n_u / 2)`.
pub fn default_m_max(grid: &[f64], d_min: f64) -> usize {
    if d_min > 0.0 {
        let span = grid[grid.len() - 1] - grid[0];
        (libm::floor(span / d_min) as usize).saturating_sub(1)
    } else {
        grid.len() / 2
    }
}

pub fn is_feasible(c: &KnotChromosome, fp: &FeasibilityParams) -> bool {
    let tau = c.tau();
    let g = &fp.grid;
    if let Some(cap) = fp.m_max {
        if tau.len() > cap {
            return false;
        }
    }
    if tau.iter().any(|&i| i >= g.len()) {
        return false;
    }
    let (Some(&first), Some(&last)) = (tau.first(), tau.last()) else {
        return true;
    };
    if !(g[first] > g[0] + fp.d_min) || !(g[last] < g[g.len() - 1] - fp.d_min) {
        return false;
    }
    tau.windows(2).all(|w| w[0] < w[1] && g[w[1]] - g[w[0]] > fp.d_min)
}

/// True when `c` is already present in `population`.
pub fn duplicate_of<'a, C, I>(c: &C, population: I) -> bool
where
    C: PartialEq + 'a,
    I: IntoIterator<Item = &'a C>,
{
    population.into_iter().any(|other| other == c)
}
