//! Steady-state genetic algorithm.
//!
//! One child at a time is bred from two linear-rank-selected parents,
//! mutated, and accepted only if it beats the current worst member and is not
//! a duplicate. The engine is generic over the chromosome kind through
//! [`Operators`] and over the score through [`Objective`].
//!
//! Internally everything is a *cost* (smaller is better); objectives that
//! maximize are negated by [`Direction`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use rand::Rng;

use crate::chromosome::{is_feasible, BinaryChromosome, FeasibilityParams, KnotChromosome};
use crate::error::{Error, Result};
use crate::rng::EngineStreams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Minimize,
    Maximize,
}

impl Direction {
    /// Converts a native score into an engine cost.
    pub fn cost(self, value: f64) -> f64 {
        match self {
            Direction::Minimize => value,
            Direction::Maximize => -value,
        }
    }

    /// The worst possible native score.
    pub fn losing(self) -> f64 {
        match self {
            Direction::Minimize => f64::INFINITY,
            Direction::Maximize => f64::NEG_INFINITY,
        }
    }

    pub fn is_better(self, a: f64, b: f64) -> bool {
        self.cost(a) < self.cost(b)
    }
}

/// A scalar score of a chromosome.
pub trait Objective<C> {
    fn evaluate(&self, chromosome: &C) -> f64;

    fn direction(&self) -> Direction {
        Direction::Minimize
    }
}

impl<C, T: Objective<C> + ?Sized> Objective<C> for &T {
    fn evaluate(&self, chromosome: &C) -> f64 {
        (**self).evaluate(chromosome)
    }

    fn direction(&self) -> Direction {
        (**self).direction()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub pop_size: usize,
    pub p_crossover: f64,
    pub p_mutation: f64,
    pub max_gen: usize,
    /// Stop after this many consecutive generations without an accepted child.
    pub stall_limit: usize,
    /// Restart budget for samplers and crossover construction.
    pub restart_cap: usize,
    /// Children tried per steady-state step before giving up.
    pub step_retries: usize,
    pub seed: u64,
    /// Memoized evaluations kept before the cache is flushed; 0 disables it.
    pub cache_limit: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            pop_size: 200,
            p_crossover: 0.9,
            p_mutation: 0.3,
            max_gen: 10_000,
            stall_limit: 20,
            restart_cap: 100,
            step_retries: 100,
            seed: 0,
            cache_limit: 1 << 20,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if self.pop_size < 3 {
            return Err(Error::InvalidConfig("pop_size must be >= 3".into()));
        }
        if !prob(self.p_crossover) || !prob(self.p_mutation) {
            return Err(Error::InvalidConfig("probabilities must lie in [0, 1]".into()));
        }
        if self.max_gen < 1 || self.restart_cap < 1 || self.step_retries < 1 || self.stall_limit < 1 {
            return Err(Error::InvalidConfig(
                "max_gen, stall_limit, restart_cap and step_retries must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnotMode {
    Fixed(usize),
    Varying,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual<C> {
    pub chromosome: C,
    /// Native objective value; never NaN.
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace<C> {
    /// Best native score after each generation.
    pub best_fitness: Vec<f64>,
    /// Accepted replacements in each generation.
    pub accepted: Vec<usize>,
    pub best: Individual<C>,
    pub initial_best: f64,
    pub generations: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub accepted: usize,
}

/// Per-generation callback, e.g. progress output or an invariant audit.
pub trait Observer<C> {
    fn on_generation(&mut self, stats: &GenerationStats, members: &[Individual<C>]);
}

pub struct NoObserver;

impl<C> Observer<C> for NoObserver {
    fn on_generation(&mut self, _: &GenerationStats, _: &[Individual<C>]) {}
}

impl<C, F: FnMut(&GenerationStats, &[Individual<C>])> Observer<C> for F {
    fn on_generation(&mut self, stats: &GenerationStats, members: &[Individual<C>]) {
        self(stats, members)
    }
}

/// Sampling, crossover and mutation for one chromosome kind.
pub trait Operators {
    type Chromosome: Clone + Ord;

    /// One draw from the initial sampler.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Self::Chromosome>;

    fn crossover<R: Rng + ?Sized>(
        &self,
        mom: &Self::Chromosome,
        dad: &Self::Chromosome,
        rng: &mut R,
    ) -> Self::Chromosome;

    fn mutate<R: Rng + ?Sized>(&self, child: Self::Chromosome, rng: &mut R) -> Self::Chromosome;

    /// Structural validity, used by audits.
    fn is_valid(&self, c: &Self::Chromosome) -> bool;
}

// ---------------------------------------------------------------------------
// Knot operators

fn sorted_sample<R: Rng + ?Sized>(rng: &mut R, len: usize, amount: usize, offset: usize) -> Vec<usize> {
    let mut idx = rand::seq::index::sample(rng, len, amount).into_vec();
    idx.sort_unstable();
    idx.iter_mut().for_each(|i| *i += offset);
    idx
}

/// Uniform draw over feasible `m`-knot configurations by rejection.
///
/// Indices are drawn among grid points that already satisfy the boundary
/// conditions; a draw violating spacing is discarded whole.
pub fn sample_fixed_m<R: Rng + ?Sized>(
    fp: &FeasibilityParams,
    m: usize,
    restart_cap: usize,
    rng: &mut R,
) -> Result<KnotChromosome> {
    if m == 0 {
        return Ok(KnotChromosome::default());
    }
    let cand = fp.candidates();
    if cand.len() < m {
        return Err(Error::InfeasibleProblem(alloc::format!(
            "only {} grid points satisfy the boundary conditions, {m} knots requested",
            cand.len()
        )));
    }
    for _ in 0..restart_cap {
        let c = KnotChromosome::new(sorted_sample(rng, cand.len(), m, cand.start));
        if is_feasible(&c, fp) {
            return Ok(c);
        }
    }
    Err(Error::InfeasibleProblem(alloc::format!(
        "no feasible {m}-knot configuration found in {restart_cap} draws (min spacing {})",
        fp.d_min
    )))
}

/// Draws `m` uniformly on `0..=m_max`, then a fixed-m configuration; a failed
/// fixed-m draw restarts from the choice of `m`.
pub fn sample_varying_m<R: Rng + ?Sized>(
    fp: &FeasibilityParams,
    restart_cap: usize,
    rng: &mut R,
) -> Result<KnotChromosome> {
    let m_max = fp.effective_m_max();
    for _ in 0..restart_cap {
        let m = rng.random_range(0..=m_max);
        if let Ok(c) = sample_fixed_m(fp, m, restart_cap, rng) {
            return Ok(c);
        }
    }
    Err(Error::InfeasibleProblem(alloc::format!(
        "no feasible configuration with at most {m_max} knots found in {restart_cap} attempts"
    )))
}

/// Table entries above which the counting sampler stops adding depth.
const SAMPLER_TABLE_LIMIT: usize = 1 << 22;

/// Exact uniform sampler over feasible knot configurations.
///
/// `ways[k][i]` counts the feasible placements of `k` knots among candidate
/// positions `i..`; a configuration is then built left to right, taking
/// position `i` with probability `ways[k-1][next(i)] / ways[k][i]`. The law
/// equals that of [`sample_fixed_m`] (uniform over the feasible set); it
/// just never rejects. Depths the table does not cover, or counts that
/// overflow `f64`, fall back to rejection.
#[derive(Debug, Clone)]
pub struct KnotSampler {
    fp: FeasibilityParams,
    restart_cap: usize,
    start: usize,
    next: Vec<usize>,
    ways: Vec<Vec<f64>>,
    /// Largest knot count with any feasible placement.
    max_feasible: usize,
}

impl KnotSampler {
    pub fn new(fp: FeasibilityParams, restart_cap: usize) -> Self {
        let cand = fp.candidates();
        let len = cand.len();
        let g = &fp.grid;
        // next[i]: first candidate (relative index) strictly more than d_min past i
        let mut next = alloc::vec![len; len + 1];
        let mut j = 0;
        for i in 0..len {
            j = j.max(i + 1);
            while j < len && !(g[cand.start + j] - g[cand.start + i] > fp.d_min) {
                j += 1;
            }
            next[i] = j;
        }
        let mut greedy = 0;
        let mut i = 0;
        while i < len {
            greedy += 1;
            i = next[i];
        }
        let depth = greedy.min(SAMPLER_TABLE_LIMIT / (len + 1)).max(1);
        let mut ways = alloc::vec![alloc::vec![1.0; len + 1]];
        for k in 1..=depth {
            let prev = &ways[k - 1];
            let mut row = alloc::vec![0.0; len + 1];
            for i in (0..len).rev() {
                row[i] = row[i + 1] + prev[next[i]];
            }
            ways.push(row);
        }
        Self { fp, restart_cap, start: cand.start, next, ways, max_feasible: greedy }
    }

    pub fn params(&self) -> &FeasibilityParams {
        &self.fp
    }

    pub fn restart_cap(&self) -> usize {
        self.restart_cap
    }

    /// Number of feasible `m`-knot configurations, if tabulated.
    pub fn count(&self, m: usize) -> Option<f64> {
        self.ways.get(m).map(|row| row[0]).filter(|c| c.is_finite())
    }

    pub fn sample_fixed<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<KnotChromosome> {
        if self.fp.m_max.is_some_and(|cap| m > cap) {
            return Err(Error::InfeasibleProblem(alloc::format!(
                "{m} knots exceed the knot-count cap {}",
                self.fp.effective_m_max()
            )));
        }
        let Some(total) = self.count(m) else {
            return sample_fixed_m(&self.fp, m, self.restart_cap, rng);
        };
        if total == 0.0 {
            return Err(Error::InfeasibleProblem(alloc::format!(
                "no {m}-knot configuration keeps knots more than {} apart and inside the boundary",
                self.fp.d_min
            )));
        }
        let mut tau = Vec::with_capacity(m);
        let (mut i, mut k) = (0, m);
        while k > 0 {
            let take = self.ways[k - 1][self.next[i]] / self.ways[k][i];
            if take >= 1.0 || self.ways[k][i + 1] == 0.0 || rng.random::<f64>() < take {
                tau.push(self.start + i);
                i = self.next[i];
                k -= 1;
            } else {
                i += 1;
            }
        }
        Ok(KnotChromosome::new(tau))
    }

    /// Largest `m` with at least one feasible configuration.
    pub fn max_feasible_m(&self) -> usize {
        self.max_feasible
    }

    /// `m` uniform over the sizes in `0..=m_max` that admit a configuration,
    /// then a uniform configuration of that size.
    pub fn sample_varying<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<KnotChromosome> {
        let m_max = self.fp.effective_m_max().min(self.max_feasible);
        for _ in 0..self.restart_cap {
            let m = rng.random_range(0..=m_max);
            if let Ok(c) = self.sample_fixed(m, rng) {
                return Ok(c);
            }
        }
        Err(Error::InfeasibleProblem(alloc::format!(
            "no feasible configuration with at most {m_max} knots found in {} attempts",
            self.restart_cap
        )))
    }

    pub fn sample<R: Rng + ?Sized>(&self, mode: KnotMode, rng: &mut R) -> Result<KnotChromosome> {
        match mode {
            KnotMode::Fixed(m) => self.sample_fixed(m, rng),
            KnotMode::Varying => self.sample_varying(rng),
        }
    }
}

/// Sequential constraint-preserving crossover for equal-length parents.
pub fn crossover_fixed_m<R: Rng + ?Sized>(
    mom: &KnotChromosome,
    dad: &KnotChromosome,
    sampler: &KnotSampler,
    rng: &mut R,
) -> KnotChromosome {
    let (fp, restart_cap) = (sampler.params(), sampler.restart_cap());
    let m = mom.m();
    debug_assert_eq!(m, dad.m());
    let (tm, td, g) = (mom.tau(), dad.tau(), &fp.grid);
    if m > 0 {
        'attempt: for _ in 0..restart_cap {
            let mut child = Vec::with_capacity(m);
            child.push(if rng.random_bool(0.5) { td[0] } else { tm[0] });
            for i in 1..m {
                let prev = g[child[i - 1]];
                let mom_ok = g[tm[i]] - prev > fp.d_min;
                let dad_ok = g[td[i]] - prev > fp.d_min;
                let next = match (dad_ok, mom_ok) {
                    (true, true) => {
                        if rng.random_bool(0.5) {
                            td[i]
                        } else {
                            tm[i]
                        }
                    }
                    (true, false) => td[i],
                    (false, true) => tm[i],
                    (false, false) => continue 'attempt,
                };
                child.push(next);
            }
            let child = KnotChromosome::new(child);
            if child != *mom && child != *dad && is_feasible(&child, fp) {
                return child;
            }
        }
    }
    sampler.sample_fixed(m, rng).unwrap_or_else(|_| mom.clone())
}

/// Merge-and-thin crossover for parents of any length.
///
/// Each index of the sorted union survives with probability 1/2; a
/// left-to-right pass then drops knots that break spacing, boundary or the
/// knot-count cap.
pub fn crossover_varying_m<R: Rng + ?Sized>(
    mom: &KnotChromosome,
    dad: &KnotChromosome,
    sampler: &KnotSampler,
    rng: &mut R,
) -> KnotChromosome {
    let (fp, restart_cap) = (sampler.params(), sampler.restart_cap());
    let mut union: Vec<usize> = mom.tau().iter().chain(dad.tau()).copied().collect();
    union.sort_unstable();
    union.dedup();
    let cand = fp.candidates();
    let cap = fp.m_max.unwrap_or(usize::MAX);
    let g = &fp.grid;
    for _ in 0..restart_cap {
        let mut child: Vec<usize> = Vec::with_capacity(union.len());
        for &idx in &union {
            if !rng.random_bool(0.5) {
                continue;
            }
            let spaced = child.last().is_none_or(|&last| g[idx] - g[last] > fp.d_min);
            if cand.contains(&idx) && spaced && child.len() < cap {
                child.push(idx);
            }
        }
        let child = KnotChromosome::new(child);
        if child != *mom && child != *dad && is_feasible(&child, fp) {
            return child;
        }
    }
    sampler.sample_varying(rng).unwrap_or_else(|_| mom.clone())
}

/// With probability `p_mutation`, replace the child by a fresh sampler draw.
pub fn mutate_knots<R: Rng + ?Sized>(
    child: KnotChromosome,
    mode: KnotMode,
    sampler: &KnotSampler,
    p_mutation: f64,
    rng: &mut R,
) -> KnotChromosome {
    if !rng.random_bool(p_mutation) {
        return child;
    }
    sampler.sample(mode, rng).unwrap_or(child)
}

#[derive(Debug, Clone)]
pub struct KnotOperators {
    pub sampler: KnotSampler,
    pub mode: KnotMode,
    pub p_mutation: f64,
}

impl KnotOperators {
    pub fn new(fp: FeasibilityParams, mode: KnotMode, cfg: &GaConfig) -> Self {
        Self { sampler: KnotSampler::new(fp, cfg.restart_cap), mode, p_mutation: cfg.p_mutation }
    }

    pub fn params(&self) -> &FeasibilityParams {
        self.sampler.params()
    }
}

impl Operators for KnotOperators {
    type Chromosome = KnotChromosome;

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<KnotChromosome> {
        self.sampler.sample(self.mode, rng)
    }

    fn crossover<R: Rng + ?Sized>(&self, mom: &KnotChromosome, dad: &KnotChromosome, rng: &mut R) -> KnotChromosome {
        match self.mode {
            KnotMode::Fixed(_) => crossover_fixed_m(mom, dad, &self.sampler, rng),
            KnotMode::Varying => crossover_varying_m(mom, dad, &self.sampler, rng),
        }
    }

    fn mutate<R: Rng + ?Sized>(&self, child: KnotChromosome, rng: &mut R) -> KnotChromosome {
        mutate_knots(child, self.mode, &self.sampler, self.p_mutation, rng)
    }

    fn is_valid(&self, c: &KnotChromosome) -> bool {
        let length_ok = match self.mode {
            KnotMode::Fixed(m) => c.m() == m,
            KnotMode::Varying => true,
        };
        length_ok && is_feasible(c, self.params())
    }
}

// ---------------------------------------------------------------------------
// Binary operators

/// Bit-string operators: uniform random initialization, single-point
/// crossover, and a single random bit flip with probability `p_mutation`.
#[derive(Debug, Clone)]
pub struct BinaryOperators {
    pub p: usize,
    pub p_mutation: f64,
}

impl Operators for BinaryOperators {
    type Chromosome = BinaryChromosome;

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BinaryChromosome> {
        Ok(BinaryChromosome::new((0..self.p).map(|_| rng.random_bool(0.5)).collect()))
    }

    fn crossover<R: Rng + ?Sized>(&self, mom: &BinaryChromosome, dad: &BinaryChromosome, rng: &mut R) -> BinaryChromosome {
        if self.p < 2 {
            return mom.clone();
        }
        let cut = rng.random_range(1..self.p);
        let bits = mom.bits()[..cut].iter().chain(&dad.bits()[cut..]).copied().collect();
        BinaryChromosome::new(bits)
    }

    fn mutate<R: Rng + ?Sized>(&self, mut child: BinaryChromosome, rng: &mut R) -> BinaryChromosome {
        if self.p > 0 && rng.random_bool(self.p_mutation) {
            let j = rng.random_range(0..self.p);
            child.bits_mut()[j] ^= true;
        }
        child
    }

    fn is_valid(&self, c: &BinaryChromosome) -> bool {
        c.len() == self.p
    }
}

// ---------------------------------------------------------------------------
// Selection

/// Linear-rank probabilities `2k / ((n-1) n)`, rank 0 for the largest cost.
/// Tied costs share the mean of the ranks they span.
pub fn rank_probabilities(costs: &[f64]) -> Vec<f64> {
    let n = costs.len();
    let mut probs = alloc::vec![0.0; n];
    if n < 2 {
        probs.iter_mut().for_each(|p| *p = 1.0);
        return probs;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| costs[b].total_cmp(&costs[a]).then(a.cmp(&b)));
    let denom = ((n - 1) * n) as f64;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && costs[order[end]] == costs[order[start]] {
            end += 1;
        }
        let mean_rank = (start + end - 1) as f64 / 2.0;
        for &i in &order[start..end] {
            probs[i] = 2.0 * mean_rank / denom;
        }
        start = end;
    }
    probs
}

#[derive(Debug, Clone)]
pub struct RankTable {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl RankTable {
    pub fn new(costs: &[f64]) -> Self {
        let probs = rank_probabilities(costs);
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { probs, cumulative }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    fn locate(&self, u: f64, skip: Option<usize>) -> usize {
        let idx = self.cumulative.partition_point(|&c| c <= u);
        if idx < self.probs.len() && Some(idx) != skip && self.probs[idx] > 0.0 {
            return idx;
        }
        // Rounding at the top end: take the last admissible index.
        (0..self.probs.len())
            .rev()
            .find(|&i| Some(i) != skip && self.probs[i] > 0.0)
            .unwrap_or_else(|| if skip == Some(0) { 1 } else { 0 })
    }

    /// First parent drawn by rank; second drawn by rank from the remaining
    /// members with the weights renormalized. Returns `(first, second)`.
    pub fn select_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let n = self.probs.len();
        let first = self.locate(rng.random::<f64>() * self.total(), None);
        let rest = self.total() - self.probs[first];
        let second = if rest <= 0.0 {
            let j = rng.random_range(0..n - 1);
            if j >= first {
                j + 1
            } else {
                j
            }
        } else {
            let mut u = rng.random::<f64>() * rest;
            let first_start = self.cumulative[first] - self.probs[first];
            if u >= first_start {
                u += self.probs[first];
            }
            self.locate(u, Some(first))
        };
        (first, second)
    }
}

/// Draws `(first, second)` parent indices for a population with the given costs.
pub fn rank_select_parents<R: Rng + ?Sized>(costs: &[f64], rng: &mut R) -> (usize, usize) {
    RankTable::new(costs).select_pair(rng)
}

// ---------------------------------------------------------------------------
// Engine

/// `pop_size` distinct chromosomes from the operator sampler.
pub fn init_population<O: Operators, R: Rng + ?Sized>(
    ops: &O,
    pop_size: usize,
    restart_cap: usize,
    rng: &mut R,
) -> Result<Vec<O::Chromosome>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(pop_size);
    let mut duplicates = 0usize;
    let dup_budget = pop_size.saturating_mul(restart_cap);
    while out.len() < pop_size {
        let c = ops.sample(rng)?;
        if seen.insert(c.clone()) {
            out.push(c);
        } else {
            duplicates += 1;
            if duplicates > dup_budget {
                return Err(Error::InfeasibleProblem(alloc::format!(
                    "could not draw {pop_size} distinct feasible chromosomes (found {})",
                    out.len()
                )));
            }
        }
    }
    Ok(out)
}

/// A single evolving population.
pub struct Engine<'a, O: Operators, F> {
    ops: &'a O,
    objective: &'a F,
    cfg: GaConfig,
    direction: Direction,
    members: Vec<Individual<O::Chromosome>>,
    present: BTreeSet<O::Chromosome>,
    ranks: RankTable,
    worst: usize,
    streams: EngineStreams,
    cache: BTreeMap<O::Chromosome, f64>,
    best_trace: Vec<f64>,
    accepted_trace: Vec<usize>,
    initial_best: f64,
    stall: usize,
}

impl<'a, O, F> Engine<'a, O, F>
where
    O: Operators,
    F: Objective<O::Chromosome>,
{
    /// Draws and scores the initial population using streams seeded by `cfg.seed`.
    pub fn new(ops: &'a O, objective: &'a F, cfg: &GaConfig) -> Result<Self> {
        cfg.validate()?;
        let mut streams = EngineStreams::new(cfg.seed);
        let chromosomes = init_population(ops, cfg.pop_size, cfg.restart_cap, &mut streams.init)?;
        let mut engine = Self {
            ops,
            objective,
            cfg: cfg.clone(),
            direction: objective.direction(),
            members: Vec::with_capacity(cfg.pop_size),
            present: BTreeSet::new(),
            ranks: RankTable::new(&[]),
            worst: 0,
            streams,
            cache: BTreeMap::new(),
            best_trace: Vec::new(),
            accepted_trace: Vec::new(),
            initial_best: 0.0,
            stall: 0,
        };
        for c in chromosomes {
            let fitness = engine.evaluate(&c);
            engine.present.insert(c.clone());
            engine.members.push(Individual { chromosome: c, fitness });
        }
        engine.refresh();
        engine.initial_best = engine.best().fitness;
        Ok(engine)
    }

    fn evaluate(&mut self, c: &O::Chromosome) -> f64 {
        if let Some(&v) = self.cache.get(c) {
            return v;
        }
        let raw = self.objective.evaluate(c);
        let v = if raw.is_nan() { self.direction.losing() } else { raw };
        if self.cfg.cache_limit > 0 {
            if self.cache.len() >= self.cfg.cache_limit {
                self.cache.clear();
            }
            self.cache.insert(c.clone(), v);
        }
        v
    }

    fn cost(&self, i: usize) -> f64 {
        self.direction.cost(self.members[i].fitness)
    }

    fn refresh(&mut self) {
        let costs: Vec<f64> = (0..self.members.len()).map(|i| self.cost(i)).collect();
        self.ranks = RankTable::new(&costs);
        // earliest index among the worst
        let mut worst = 0;
        for (i, &c) in costs.iter().enumerate() {
            if c.total_cmp(&costs[worst]).is_gt() {
                worst = i;
            }
        }
        self.worst = worst;
    }

    pub fn members(&self) -> &[Individual<O::Chromosome>] {
        &self.members
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn generation(&self) -> usize {
        self.best_trace.len()
    }

    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for i in 1..self.members.len() {
            if self.cost(i) < self.cost(best) {
                best = i;
            }
        }
        best
    }

    pub fn best(&self) -> &Individual<O::Chromosome> {
        &self.members[self.best_index()]
    }

    pub fn contains(&self, c: &O::Chromosome) -> bool {
        self.present.contains(c)
    }

    /// True once `max_gen` generations ran or the stall limit was hit.
    pub fn is_finished(&self) -> bool {
        self.generation() >= self.cfg.max_gen || self.stall >= self.cfg.stall_limit
    }

    /// Overwrites member `index`; refused (returns false) if `ind` duplicates
    /// another member.
    pub fn replace_member(&mut self, index: usize, ind: Individual<O::Chromosome>) -> bool {
        if self.members[index].chromosome == ind.chromosome {
            return true;
        }
        if self.present.contains(&ind.chromosome) {
            return false;
        }
        let old = core::mem::replace(&mut self.members[index], ind);
        self.present.remove(&old.chromosome);
        self.present.insert(self.members[index].chromosome.clone());
        self.refresh();
        true
    }

    /// Breeds children until one is accepted or `step_retries` are used up.
    pub fn steady_state_step(&mut self) -> bool {
        for _ in 0..self.cfg.step_retries {
            let (first, second) = self.ranks.select_pair(&mut self.streams.selection);
            let (father, mother) = (&self.members[first], &self.members[second]);
            let child = if self.streams.crossover.random_bool(self.cfg.p_crossover) {
                self.ops.crossover(&mother.chromosome, &father.chromosome, &mut self.streams.crossover)
            } else if self.direction.cost(mother.fitness) < self.direction.cost(father.fitness) {
                mother.chromosome.clone()
            } else {
                father.chromosome.clone()
            };
            let child = self.ops.mutate(child, &mut self.streams.mutation);
            let fitness = self.evaluate(&child);
            if self.direction.cost(fitness) < self.cost(self.worst) && !self.present.contains(&child) {
                let worst = self.worst;
                let old = core::mem::replace(&mut self.members[worst], Individual { chromosome: child, fitness });
                self.present.remove(&old.chromosome);
                self.present.insert(self.members[worst].chromosome.clone());
                self.refresh();
                return true;
            }
        }
        false
    }

    /// One generation of `pop_size` steps; returns the accepted count.
    pub fn generation_step<Obs: Observer<O::Chromosome> + ?Sized>(&mut self, observer: &mut Obs) -> usize {
        let accepted = (0..self.cfg.pop_size).filter(|_| self.steady_state_step()).count();
        let best = self.best().fitness;
        self.best_trace.push(best);
        self.accepted_trace.push(accepted);
        self.stall = if accepted == 0 { self.stall + 1 } else { 0 };
        let stats = GenerationStats { generation: self.generation(), best_fitness: best, accepted };
        observer.on_generation(&stats, &self.members);
        accepted
    }

    /// Runs up to `generations` more generations, stopping early when finished.
    pub fn advance<Obs: Observer<O::Chromosome> + ?Sized>(&mut self, generations: usize, observer: &mut Obs) {
        for _ in 0..generations {
            if self.is_finished() {
                break;
            }
            self.generation_step(observer);
        }
    }

    pub fn initial_best(&self) -> f64 {
        self.initial_best
    }

    pub fn best_fitness_trace(&self) -> &[f64] {
        &self.best_trace
    }

    pub fn accepted_trace(&self) -> &[usize] {
        &self.accepted_trace
    }

    pub fn trace(&self) -> RunTrace<O::Chromosome> {
        RunTrace {
            best_fitness: self.best_trace.clone(),
            accepted: self.accepted_trace.clone(),
            best: self.best().clone(),
            initial_best: self.initial_best,
            generations: self.generation(),
            direction: self.direction,
        }
    }
}

/// Full single-population run.
pub fn run<O, F>(ops: &O, objective: &F, cfg: &GaConfig) -> Result<RunTrace<O::Chromosome>>
where
    O: Operators,
    F: Objective<O::Chromosome>,
{
    run_observed(ops, objective, cfg, &mut NoObserver)
}

pub fn run_observed<O, F, Obs>(ops: &O, objective: &F, cfg: &GaConfig, observer: &mut Obs) -> Result<RunTrace<O::Chromosome>>
where
    O: Operators,
    F: Objective<O::Chromosome>,
    Obs: Observer<O::Chromosome> + ?Sized,
{
    let mut engine = Engine::new(ops, objective, cfg)?;
    engine.advance(cfg.max_gen, observer);
    Ok(engine.trace())
}
