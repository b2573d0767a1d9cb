//! Test-only reference implementations.
//!
//! The oracle recomputes random quantities straight from the recursive
//! definition: no memo table, its own reduct, and conditional weights read off
//! raw layer vectors.

#![allow(dead_code)]

use num_traits::{One, Zero};
use trievent::event::{Event, WorldSpace};
use trievent::probability::ConditionalProbability;
use trievent::rational::Rational;
use trievent::term::CondTerm;

pub struct Oracle {
    n: usize,
    /// One weight vector per layer, zero outside the layer's support.
    layers: Vec<Vec<Rational>>,
}

impl Oracle {
    pub fn new(n: usize, layers: Vec<Vec<Rational>>) -> Self {
        assert!(layers.iter().all(|l| l.len() == n));
        Oracle { n, layers }
    }

    pub fn from_cp(cp: &ConditionalProbability) -> Self {
        let layers = cp.layers().iter().map(|l| l.weights().to_vec()).collect();
        Oracle::new(cp.space().len(), layers)
    }

    /// `P(w | b)` for every world.
    pub fn weights_given(&self, b: u64) -> Vec<Rational> {
        for layer in &self.layers {
            let mass: Rational = (0..self.n).filter(|w| b >> w & 1 == 1).map(|w| layer[w].clone()).sum();
            if !mass.is_zero() {
                return (0..self.n)
                    .map(|w| if b >> w & 1 == 1 { &layer[w] / &mass } else { Rational::zero() })
                    .collect();
            }
        }
        panic!("no layer charges the conditioning event");
    }

    pub fn cond_prob(&self, a: u64, b: u64) -> Rational {
        let p = self.weights_given(b);
        (0..self.n).filter(|w| a >> w & 1 == 1).map(|w| p[w].clone()).sum()
    }

    pub fn expect_given(&self, x: &[Rational], b: u64) -> Rational {
        self.weights_given(b).iter().zip(x).map(|(p, v)| p * v).sum()
    }

    /// Direct recursion on the definition of `X_t`.
    pub fn x(&self, t: &CondTerm) -> Vec<Rational> {
        match t {
            CondTerm::One => vec![Rational::one(); self.n],
            CondTerm::Zero => vec![Rational::zero(); self.n],
            _ => {
                let b = antecedents(t, self.n);
                let mut x = vec![Rational::zero(); self.n];
                for w in (0..self.n).filter(|w| b >> w & 1 == 1) {
                    x[w] = self.prevision(&reduct(t, w));
                }
                let off = self.expect_given(&x, b);
                for w in (0..self.n).filter(|w| b >> w & 1 == 0) {
                    x[w] = off.clone();
                }
                x
            }
        }
    }

    pub fn prevision(&self, t: &CondTerm) -> Rational {
        self.expect_given(&self.x(t), antecedents(t, self.n))
    }
}

/// Union of the antecedents of the leaves, or every world for constants.
pub fn antecedents(t: &CondTerm, n: usize) -> u64 {
    fn walk(t: &CondTerm, acc: &mut Option<u64>) {
        match t {
            CondTerm::Zero | CondTerm::One => {}
            CondTerm::Basic(c) => *acc = Some(acc.unwrap_or(0) | c.antecedent().bits()),
            CondTerm::Not(x) => walk(x, acc),
            CondTerm::And(x, y) | CondTerm::Or(x, y) => {
                walk(x, acc);
                walk(y, acc);
            }
        }
    }
    let mut acc = None;
    walk(t, &mut acc);
    acc.unwrap_or(if n == 64 { u64::MAX } else { (1u64 << n) - 1 })
}

/// Reduct at `w`: decided leaves become constants, then constants are absorbed.
pub fn reduct(t: &CondTerm, w: usize) -> CondTerm {
    use CondTerm::*;
    match t {
        Zero | One => t.clone(),
        Basic(c) => match c.value_at(w) {
            Some(true) => One,
            Some(false) => Zero,
            None => t.clone(),
        },
        Not(x) => match reduct(x, w) {
            One => Zero,
            Zero => One,
            r => Not(Box::new(r)),
        },
        And(x, y) => match (reduct(x, w), reduct(y, w)) {
            (Zero, _) | (_, Zero) => Zero,
            (One, r) | (r, One) => r,
            (l, r) => And(Box::new(l), Box::new(r)),
        },
        Or(x, y) => match (reduct(x, w), reduct(y, w)) {
            (One, _) | (_, One) => One,
            (Zero, r) | (r, Zero) => r,
            (l, r) => Or(Box::new(l), Box::new(r)),
        },
    }
}

pub fn bits(space: &WorldSpace, b: u64) -> Event {
    space.from_bits(b).unwrap()
}

pub fn basic(space: &WorldSpace, a: u64, b: u64) -> CondTerm {
    CondTerm::basic(bits(space, a), bits(space, b)).unwrap()
}

/// All terms of depth at most `depth` over the given leaves.
pub fn all_terms(leaves: &[CondTerm], depth: usize) -> Vec<CondTerm> {
    let mut terms = leaves.to_vec();
    for _ in 0..depth {
        let prev = terms.clone();
        terms = prev.clone();
        terms.extend(prev.iter().map(|t| t.clone().not()));
        for l in &prev {
            for r in &prev {
                terms.push(l.clone().and(r.clone()));
                terms.push(l.clone().or(r.clone()));
            }
        }
    }
    terms
}
