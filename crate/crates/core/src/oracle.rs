//! Brute-force reference solvers for small instances.

use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::chromosome::{is_feasible, BinaryChromosome, KnotChromosome};
use crate::error::{Error, Result};
use crate::objective::{knot_ic, subset_bic, KnotObjectiveContext, SubsetObjectiveContext};

/// Largest number of knot configurations the knot search will consider.
pub const KNOT_SEARCH_LIMIT: u128 = 10_000_000;
/// Largest predictor count for the subset search.
pub const SUBSET_SEARCH_MAX_P: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<C> {
    pub best_score: f64,
    /// Every configuration attaining `best_score`, in enumeration order.
    pub best_configurations: Vec<C>,
    pub evaluated_count: u64,
}

struct Best<C> {
    score: f64,
    configs: Vec<C>,
    count: u64,
}

impl<C> Best<C> {
    fn offer(&mut self, score: f64, c: impl FnOnce() -> C, better: impl Fn(f64, f64) -> bool) {
        self.count += 1;
        if self.configs.is_empty() || better(score, self.score) {
            self.score = score;
            self.configs.clear();
            self.configs.push(c());
        } else if score == self.score {
            self.configs.push(c());
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Every feasible configuration with `m` in `m_range`, scored by [`knot_ic`].
/// Enumeration is lexicographic in the index tuple, shorter tuples first.
pub fn exhaustive_knot_search(ctx: &KnotObjectiveContext, m_range: RangeInclusive<usize>) -> Result<OracleResult<KnotChromosome>> {
    let n_u = ctx.grid.values.len() as u128;
    let total = m_range.clone().fold(0u128, |acc, m| acc.saturating_add(binomial(n_u, m as u128)));
    if total > KNOT_SEARCH_LIMIT {
        return Err(Error::TooLarge { candidates: total, limit: KNOT_SEARCH_LIMIT });
    }
    let mut best = Best { score: f64::INFINITY, configs: Vec::new(), count: 0 };
    let cand = ctx.fp.candidates();
    let g = &ctx.fp.grid;
    let mut stack = Vec::new();
    for m in m_range {
        // depth-first over increasing indices with spacing pruning
        fn walk(
            m: usize,
            from: usize,
            end: usize,
            stack: &mut Vec<usize>,
            g: &[f64],
            d_min: f64,
            visit: &mut dyn FnMut(&[usize]),
        ) {
            if stack.len() == m {
                visit(stack);
                return;
            }
            for i in from..end {
                if end - i < m - stack.len() {
                    break;
                }
                if let Some(&last) = stack.last() {
                    if !(g[i] - g[last] > d_min) {
                        continue;
                    }
                }
                stack.push(i);
                walk(m, i + 1, end, stack, g, d_min, visit);
                stack.pop();
            }
        }
        let mut visit = |tau: &[usize]| {
            let c = KnotChromosome::new(tau.to_vec());
            if is_feasible(&c, &ctx.fp) {
                let score = knot_ic(&c, ctx);
                best.offer(score, || c, |a, b| a < b);
            }
        };
        walk(m, cand.start, cand.end, &mut stack, g, ctx.fp.d_min, &mut visit);
    }
    if best.configs.is_empty() {
        return Err(Error::InfeasibleProblem("no feasible knot configuration in the requested range".into()));
    }
    Ok(OracleResult { best_score: best.score, best_configurations: best.configs, evaluated_count: best.count })
}

/// All `2^p` subsets scored by [`subset_bic`]; bit 0 is the most significant
/// position in the enumeration order.
pub fn exhaustive_subset_search(ctx: &SubsetObjectiveContext) -> Result<OracleResult<BinaryChromosome>> {
    let p = ctx.p();
    if p > SUBSET_SEARCH_MAX_P {
        return Err(Error::TooLarge { candidates: 1u128 << p.min(127), limit: 1u128 << SUBSET_SEARCH_MAX_P });
    }
    let mut best = Best { score: f64::NEG_INFINITY, configs: Vec::new(), count: 0 };
    for mask in 0u64..(1u64 << p) {
        let z = BinaryChromosome::new((0..p).map(|j| mask >> (p - 1 - j) & 1 == 1).collect());
        let score = subset_bic(&z, ctx);
        best.offer(score, || z, |a, b| a > b);
    }
    Ok(OracleResult { best_score: best.score, best_configurations: best.configs, evaluated_count: best.count })
}
