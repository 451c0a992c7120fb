//! Island executor that evolves islands on scoped worker threads.

use gareg::ga::{Engine, NoObserver, Objective, Operators};
use gareg::island::IslandExecutor;

#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    pub workers: usize,
}

impl IslandExecutor for Threaded {
    fn advance_all<O, F>(&self, engines: &mut [Engine<'_, O, F>], generations: usize)
    where
        O: Operators + Sync,
        O::Chromosome: Send + Sync,
        F: Objective<O::Chromosome> + Sync,
    {
        if self.workers <= 1 || engines.len() <= 1 {
            for e in engines {
                e.advance(generations, &mut NoObserver);
            }
            return;
        }
        let chunk = engines.len().div_ceil(self.workers);
        std::thread::scope(|s| {
            for part in engines.chunks_mut(chunk) {
                s.spawn(move || {
                    for e in part {
                        e.advance(generations, &mut NoObserver);
                    }
                });
            }
        });
    }
}
