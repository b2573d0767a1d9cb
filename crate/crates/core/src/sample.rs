//! Seeded random instances: events, terms and conditional probabilities.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::event::{Event, WorldSpace};
use crate::probability::ConditionalProbability;
use crate::rational::{int, Rational};
use crate::term::CondTerm;

/// Largest integer weight drawn before normalization.
const MAX_WEIGHT: i64 = 9;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn event(&mut self, space: &WorldSpace) -> Event {
        let bits = if space.len() == 64 { self.rng.gen() } else { self.rng.gen_range(0..1u64 << space.len()) };
        space.from_bits(bits).expect("within width")
    }

    pub fn nonempty_event(&mut self, space: &WorldSpace) -> Event {
        loop {
            let e = self.event(space);
            if !e.is_bottom() {
                return e;
            }
        }
    }

    /// A nonempty event contained in `within` (which must be nonempty).
    pub fn nonempty_subevent(&mut self, within: &Event, space: &WorldSpace) -> Event {
        loop {
            let e = self.event(space).conj(within).expect("same space");
            if !e.is_bottom() {
                return e;
            }
        }
    }

    pub fn basic(&mut self, space: &WorldSpace) -> CondTerm {
        let a = self.event(space);
        let b = self.nonempty_event(space);
        CondTerm::basic(a, b).expect("nonempty antecedent")
    }

    /// A random term of depth at most `depth`. Leaves are mostly basic
    /// conditionals, sometimes repeated from earlier leaves of the same term.
    pub fn term(&mut self, space: &WorldSpace, depth: usize) -> CondTerm {
        let mut pool = Vec::new();
        self.term_from(space, depth, &mut pool)
    }

    fn term_from(&mut self, space: &WorldSpace, depth: usize, pool: &mut Vec<CondTerm>) -> CondTerm {
        if depth == 0 || self.rng.gen_ratio(1, 4) {
            if !pool.is_empty() && self.rng.gen_ratio(1, 4) {
                return pool.choose(&mut self.rng).expect("nonempty").clone();
            }
            let leaf = match self.rng.gen_range(0..40) {
                0 => CondTerm::One,
                1 => CondTerm::Zero,
                _ => self.basic(space),
            };
            pool.push(leaf.clone());
            return leaf;
        }
        match self.rng.gen_range(0..5) {
            0 => self.term_from(space, depth - 1, pool).not(),
            1 | 2 => {
                let l = self.term_from(space, depth - 1, pool);
                l.and(self.term_from(space, depth - 1, pool))
            }
            _ => {
                let l = self.term_from(space, depth - 1, pool);
                l.or(self.term_from(space, depth - 1, pool))
            }
        }
    }

    fn weights(&mut self, count: usize) -> Vec<Rational> {
        let raw: Vec<i64> = (0..count).map(|_| self.rng.gen_range(1..=MAX_WEIGHT)).collect();
        let total: i64 = raw.iter().sum();
        raw.into_iter().map(|w| int(w) / int(total)).collect()
    }

    /// A positive probability with random rational weights.
    pub fn positive_cp(&mut self, space: &WorldSpace) -> ConditionalProbability {
        let w = self.weights(space.len());
        ConditionalProbability::positive(space, w).expect("valid weights")
    }

    /// A layered conditional probability with between 1 and `max_layers` layers.
    pub fn layered_cp(&mut self, space: &WorldSpace, max_layers: usize) -> ConditionalProbability {
        let n = space.len();
        let layers = self.rng.gen_range(1..=max_layers.clamp(1, n));
        let mut worlds: Vec<usize> = (0..n).collect();
        worlds.shuffle(&mut self.rng);
        // split the shuffled worlds into `layers` nonempty runs
        let mut cuts: Vec<usize> = (1..n).collect();
        cuts.shuffle(&mut self.rng);
        let mut cuts: Vec<usize> = cuts.into_iter().take(layers - 1).collect();
        cuts.sort_unstable();
        let mut bounds = vec![0];
        bounds.extend(cuts);
        bounds.push(n);
        let runs = bounds
            .windows(2)
            .map(|w| {
                let run = &worlds[w[0]..w[1]];
                let weights = self.weights(run.len());
                run.iter().copied().zip(weights).collect()
            })
            .collect();
        ConditionalProbability::new(space, runs).expect("valid layers")
    }
}
