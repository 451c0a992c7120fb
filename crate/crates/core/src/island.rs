//! Island model: equal-sized populations evolving independently, with a
//! random bidirectional exchange of members every `migration_interval`
//! generations.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ga::{Engine, GaConfig, GenerationStats, Individual, NoObserver, Objective, Operators, RunTrace};
use crate::rng::{derive_seed, stream_rng, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct IslandConfig {
    pub n_islands: usize,
    /// Population size of every island.
    pub island_pop: usize,
    pub migration_interval: usize,
    /// Number of migration events before the run stops.
    pub max_mig: usize,
    pub migrants_per_event: usize,
}

impl Default for IslandConfig {
    fn default() -> Self {
        Self { n_islands: 4, island_pop: 50, migration_interval: 5, max_mig: 100, migrants_per_event: 1 }
    }
}

impl IslandConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_islands < 2 {
            return Err(Error::InvalidConfig("n_islands must be >= 2".into()));
        }
        if self.island_pop < 3 {
            return Err(Error::InvalidConfig("island_pop must be >= 3".into()));
        }
        if self.migration_interval < 1 {
            return Err(Error::InvalidConfig("migration_interval must be >= 1".into()));
        }
        if self.migrants_per_event < 1 || self.migrants_per_event >= self.island_pop {
            return Err(Error::InvalidConfig("migrants_per_event must lie in 1..island_pop".into()));
        }
        Ok(())
    }

    /// Engine configuration of island `index`.
    pub fn island_config(&self, ga: &GaConfig, index: usize) -> GaConfig {
        GaConfig { pop_size: self.island_pop, seed: derive_seed(ga.seed, index as u64), ..ga.clone() }
    }
}

/// Advances every island by up to `generations` generations between
/// migration barriers.
pub trait IslandExecutor {
    fn advance_all<O, F>(&self, engines: &mut [Engine<'_, O, F>], generations: usize)
    where
        O: Operators + Sync,
        O::Chromosome: Send + Sync,
        F: Objective<O::Chromosome> + Sync;
}

/// Runs islands one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl IslandExecutor for Sequential {
    fn advance_all<O, F>(&self, engines: &mut [Engine<'_, O, F>], generations: usize)
    where
        O: Operators + Sync,
        O::Chromosome: Send + Sync,
        F: Objective<O::Chromosome> + Sync,
    {
        for e in engines {
            e.advance(generations, &mut NoObserver);
        }
    }
}

/// Indices of the `k` best members, best first (earliest index on ties).
fn top_k<C>(members: &[Individual<C>], k: usize, cost: impl Fn(f64) -> f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| cost(members[a].fitness).total_cmp(&cost(members[b].fitness)).then(a.cmp(&b)));
    order.truncate(k);
    order
}

/// Swaps the `k` best members of `src` with random non-best members of `dst`.
/// An incoming duplicate is refused and the resident kept.
pub fn migrate<O, F, R>(src: &mut Engine<'_, O, F>, dst: &mut Engine<'_, O, F>, k: usize, rng: &mut R)
where
    O: Operators,
    F: Objective<O::Chromosome>,
    R: Rng + ?Sized,
{
    let dir = src.direction();
    let leaving = top_k(src.members(), k, |f| dir.cost(f));
    let dst_best = dst.best_index();
    let n = dst.members().len();
    let slots: Vec<usize> = rand::seq::index::sample(rng, n - 1, k)
        .into_iter()
        .map(|j| if j >= dst_best { j + 1 } else { j })
        .collect();
    for (&from, &to) in leaving.iter().zip(&slots) {
        let incoming = src.members()[from].clone();
        let outgoing = dst.members()[to].clone();
        dst.replace_member(to, incoming);
        src.replace_member(from, outgoing);
    }
}

/// Global best per generation over islands; an island that has stopped
/// contributes its current best.
fn global_best<O, F>(engines: &[Engine<'_, O, F>], generation: usize) -> f64
where
    O: Operators,
    F: Objective<O::Chromosome>,
{
    let dir = engines[0].direction();
    engines
        .iter()
        .map(|e| e.best_fitness_trace().get(generation).copied().unwrap_or(e.best().fitness))
        .fold(dir.losing(), |acc, v| if dir.is_better(v, acc) { v } else { acc })
}

pub fn run_islands<O, F, X>(ops: &O, objective: &F, ga: &GaConfig, isl: &IslandConfig, executor: &X) -> Result<RunTrace<O::Chromosome>>
where
    O: Operators + Sync,
    O::Chromosome: Send + Sync,
    F: Objective<O::Chromosome> + Sync,
    X: IslandExecutor,
{
    run_islands_observed(ops, objective, ga, isl, executor, &mut |_: &GenerationStats| {})
}

/// Island run reporting each global generation to `on_generation`.
pub fn run_islands_observed<O, F, X>(
    ops: &O,
    objective: &F,
    ga: &GaConfig,
    isl: &IslandConfig,
    executor: &X,
    on_generation: &mut dyn FnMut(&GenerationStats),
) -> Result<RunTrace<O::Chromosome>>
where
    O: Operators + Sync,
    O::Chromosome: Send + Sync,
    F: Objective<O::Chromosome> + Sync,
    X: IslandExecutor,
{
    isl.validate()?;
    ga.validate()?;
    let mut engines = (0..isl.n_islands)
        .map(|i| Engine::new(ops, objective, &isl.island_config(ga, i)))
        .collect::<Result<Vec<_>>>()?;
    let dir = objective.direction();
    let mut rng = stream_rng(ga.seed, Stream::Migration);
    let mut best_trace = Vec::new();
    let mut accepted = Vec::new();
    let mut migrations = 0;
    loop {
        executor.advance_all(&mut engines, isl.migration_interval);
        let horizon = engines.iter().map(|e| e.generation()).max().unwrap_or(0);
        for g in best_trace.len()..horizon {
            let best = global_best(&engines, g);
            let acc: usize = engines.iter().map(|e| e.accepted_trace().get(g).copied().unwrap_or(0)).sum();
            best_trace.push(best);
            accepted.push(acc);
            on_generation(&GenerationStats { generation: g + 1, best_fitness: best, accepted: acc });
        }
        if engines.iter().all(|e| e.is_finished()) || migrations >= isl.max_mig {
            break;
        }
        let src = rng.random_range(0..isl.n_islands);
        let mut dst = rng.random_range(0..isl.n_islands - 1);
        if dst >= src {
            dst += 1;
        }
        let (a, b) = if src < dst {
            let (lo, hi) = engines.split_at_mut(dst);
            (&mut lo[src], &mut hi[0])
        } else {
            let (lo, hi) = engines.split_at_mut(src);
            (&mut hi[0], &mut lo[dst])
        };
        migrate(a, b, isl.migrants_per_event, &mut rng);
        migrations += 1;
    }
    let mut best_island = 0;
    for i in 1..engines.len() {
        if dir.is_better(engines[i].best().fitness, engines[best_island].best().fitness) {
            best_island = i;
        }
    }
    let initial_best = engines
        .iter()
        .map(|e| e.initial_best())
        .fold(dir.losing(), |acc, v| if dir.is_better(v, acc) { v } else { acc });
    Ok(RunTrace {
        generations: best_trace.len(),
        best_fitness: best_trace,
        accepted,
        best: engines[best_island].best().clone(),
        initial_best,
        direction: dir,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chromosome::{is_feasible, FeasibilityParams, KnotChromosome};
    use crate::ga::{run, KnotMode, KnotOperators};
    use alloc::collections::BTreeSet;

    struct Dist;
    impl Objective<KnotChromosome> for Dist {
        fn evaluate(&self, c: &KnotChromosome) -> f64 {
            c.tau().iter().enumerate().map(|(i, &t)| libm::fabs(t as f64 - 10.0 * (i + 1) as f64)).sum()
        }
    }

    fn setup(seed: u64) -> (KnotOperators, GaConfig) {
        let fp = FeasibilityParams::new((1..=50).map(f64::from).collect(), 2.0).unwrap().with_m_max(None);
        let cfg = GaConfig { pop_size: 10, max_gen: 20, stall_limit: 5, seed, ..GaConfig::default() };
        (KnotOperators::new(fp, KnotMode::Fixed(3), &cfg), cfg)
    }

    #[test]
    fn no_migration_matches_independent_runs() {
        let (ops, cfg) = setup(5);
        let isl = IslandConfig { n_islands: 2, island_pop: 10, migration_interval: 1000, ..IslandConfig::default() };
        let global = run_islands(&ops, &Dist, &cfg, &isl, &Sequential).unwrap();
        let singles: Vec<_> = (0..2).map(|i| run(&ops, &Dist, &isl.island_config(&cfg, i)).unwrap()).collect();
        let best = singles.iter().map(|t| t.best.fitness).fold(f64::INFINITY, f64::min);
        assert_eq!(global.best.fitness, best);
        let len = singles.iter().map(|t| t.generations).max().unwrap();
        assert_eq!(global.generations, len);
        for g in 0..len {
            let expect = singles
                .iter()
                .map(|t| t.best_fitness.get(g).copied().unwrap_or(t.best.fitness))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(global.best_fitness[g], expect);
        }
    }

    #[test]
    fn migration_keeps_islands_sound() {
        let (ops, cfg) = setup(11);
        let isl = IslandConfig { n_islands: 3, island_pop: 10, migration_interval: 1, max_mig: 30, migrants_per_event: 2 };
        let mut engines: Vec<_> = (0..3).map(|i| Engine::new(&ops, &Dist, &isl.island_config(&cfg, i)).unwrap()).collect();
        let mut rng = stream_rng(1, Stream::Migration);
        for round in 0..30 {
            Sequential.advance_all(&mut engines, 1);
            let before = engines.iter().map(|e| e.best().fitness).fold(f64::INFINITY, f64::min);
            let (lo, hi) = engines.split_at_mut(round % 2 + 1);
            migrate(&mut lo[0], &mut hi[0], 2, &mut rng);
            let after = engines.iter().map(|e| e.best().fitness).fold(f64::INFINITY, f64::min);
            assert_eq!(before, after, "global best survives a swap");
            for e in &engines {
                assert_eq!(e.members().len(), 10);
                let set: BTreeSet<_> = e.members().iter().map(|m| m.chromosome.clone()).collect();
                assert_eq!(set.len(), 10);
                assert!(e.members().iter().all(|m| is_feasible(&m.chromosome, ops.params())));
            }
        }
    }

    #[test]
    fn global_trace_is_monotone_and_deterministic() {
        let (ops, cfg) = setup(3);
        let isl = IslandConfig { n_islands: 4, island_pop: 10, migration_interval: 2, max_mig: 8, migrants_per_event: 1 };
        let a = run_islands(&ops, &Dist, &cfg, &isl, &Sequential).unwrap();
        let b = run_islands(&ops, &Dist, &cfg, &isl, &Sequential).unwrap();
        assert_eq!(a, b);
        assert!(a.best_fitness.windows(2).all(|w| w[1] <= w[0]));
        assert!(a.best_fitness.last().copied().unwrap() >= a.best.fitness);
    }

    #[test]
    fn config_validation() {
        assert!(IslandConfig { n_islands: 1, ..IslandConfig::default() }.validate().is_err());
        assert!(IslandConfig { island_pop: 2, ..IslandConfig::default() }.validate().is_err());
        assert!(IslandConfig { migration_interval: 0, ..IslandConfig::default() }.validate().is_err());
        assert!(IslandConfig::default().validate().is_ok());
    }
}
