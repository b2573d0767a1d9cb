//! Conditional random quantities of compound conditionals and their previsions.
//!
//! For a term `t` the random quantity `X_t` takes, at each world `w` where
//! some antecedent of `t` holds, the conditional prevision of the reduct
//! `t^w` given that reduct's antecedent disjunction. Off the antecedents the
//! value is the conditional prevision of `X_t` itself, which only depends on
//! the values inside the antecedents. The reduct at such a world has strictly
//! fewer basic-conditional occurrences, so the recursion terminates.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::event::{Event, SpaceId, WorldSpace};
use crate::probability::{ConditionalProbability, ProbabilityError};
use crate::rational::Rational;
use crate::term::CondTerm;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrevisionError {
    #[error(transparent)]
    Probability(#[from] ProbabilityError),
    #[error("term or quantity belongs to a different world space")]
    SpaceMismatch,
}

/// A world-indexed vector of rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RandomQuantity {
    space: SpaceId,
    values: Vec<Rational>,
}

impl RandomQuantity {
    pub fn new(space: &WorldSpace, values: Vec<Rational>) -> Self {
        assert_eq!(values.len(), space.len(), "one value per world");
        RandomQuantity { space: space.id(), values }
    }

    pub fn constant(space: &WorldSpace, value: Rational) -> Self {
        Self::new(space, vec![value; space.len()])
    }

    /// Indicator of an event: 1 on its worlds, 0 elsewhere.
    pub fn indicator(space: &WorldSpace, e: &Event) -> Self {
        let values = (0..space.len())
            .map(|w| if e.has(w) { Rational::one() } else { Rational::zero() })
            .collect();
        Self::new(space, values)
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, world: usize) -> &Rational {
        &self.values[world]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn zip(&self, other: &RandomQuantity, f: impl Fn(&Rational, &Rational) -> Rational) -> RandomQuantity {
        assert_eq!(self.space, other.space, "quantities over different spaces");
        RandomQuantity {
            space: self.space,
            values: self.values.iter().zip(&other.values).map(|(x, y)| f(x, y)).collect(),
        }
    }

    pub fn plus(&self, other: &RandomQuantity) -> RandomQuantity {
        self.zip(other, |x, y| x + y)
    }

    pub fn minus(&self, other: &RandomQuantity) -> RandomQuantity {
        self.zip(other, |x, y| x - y)
    }

    /// `1 - X`
    pub fn complement(&self) -> RandomQuantity {
        RandomQuantity { space: self.space, values: self.values.iter().map(|x| Rational::one() - x).collect() }
    }

    pub fn is_constant(&self, c: &Rational) -> bool {
        self.values.iter().all(|x| x == c)
    }

    pub fn in_unit_interval(&self) -> bool {
        self.values.iter().all(|x| !x.is_negative() && *x <= Rational::one())
    }
}

#[derive(Debug)]
struct Entry {
    quantity: RandomQuantity,
    prevision: Rational,
}

/// Evaluates terms against a fixed conditional probability.
///
/// Results are cached by the structure of the (constant-normalized) term.
/// The cache only grows and the value stored for a term never depends on
/// evaluation order, so the engine can be shared between threads.
#[derive(Debug)]
pub struct PrevisionEngine {
    cp: ConditionalProbability,
    memo: RwLock<HashMap<CondTerm, Arc<Entry>>>,
    weights: RwLock<HashMap<u64, Arc<Vec<Rational>>>>,
}

impl PrevisionEngine {
    pub fn new(cp: ConditionalProbability) -> Self {
        PrevisionEngine { cp, memo: RwLock::new(HashMap::new()), weights: RwLock::new(HashMap::new()) }
    }

    pub fn cp(&self) -> &ConditionalProbability {
        &self.cp
    }

    pub fn space(&self) -> &WorldSpace {
        self.cp.space()
    }

    /// Number of cached terms.
    pub fn cached(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }

    fn weights_given(&self, b: &Event) -> Result<Arc<Vec<Rational>>, PrevisionError> {
        if let Some(w) = self.weights.read().expect("weights lock").get(&b.bits()) {
            return Ok(w.clone());
        }
        let w = Arc::new(self.cp.conditional_weights(b)?);
        self.weights.write().expect("weights lock").insert(b.bits(), w.clone());
        Ok(w)
    }

    fn check_quantity(&self, x: &RandomQuantity) -> Result<(), PrevisionError> {
        if x.space == self.space().id() {
            Ok(())
        } else {
            Err(PrevisionError::SpaceMismatch)
        }
    }

    fn check_term(&self, t: &CondTerm) -> Result<(), PrevisionError> {
        let id = self.space().id();
        if t.cond_set().iter().all(|c| c.consequent().space() == id && c.antecedent().space() == id) {
            Ok(())
        } else {
            Err(PrevisionError::SpaceMismatch)
        }
    }

    /// `Σ_w X(w)·P(w|b)`.
    pub fn conditional_prevision(&self, x: &RandomQuantity, b: &Event) -> Result<Rational, PrevisionError> {
        self.check_quantity(x)?;
        let weights = self.weights_given(b)?;
        Ok(dot(&x.values, &weights))
    }

    /// `Σ_w X(w)·P(w|⊤)`.
    pub fn unconditional_prevision(&self, x: &RandomQuantity) -> Result<Rational, PrevisionError> {
        self.conditional_prevision(x, &self.space().top())
    }

    /// `X|h`: keeps `X` on `h` and puts the conditional prevision of `X` given `h` elsewhere.
    pub fn conditionalize(&self, x: &RandomQuantity, h: &Event) -> Result<RandomQuantity, PrevisionError> {
        let z = self.conditional_prevision(x, h)?;
        let values = x
            .values
            .iter()
            .enumerate()
            .map(|(w, v)| if h.has(w) { v.clone() } else { z.clone() })
            .collect();
        Ok(RandomQuantity { space: x.space, values })
    }

    /// The random quantity `X_t`.
    pub fn random_quantity(&self, t: &CondTerm) -> Result<RandomQuantity, PrevisionError> {
        self.check_term(t)?;
        Ok(self.entry(&t.clone().simplify())?.quantity.clone())
    }

    /// `P*(t)`: the prevision of `X_t` conditional on the antecedent disjunction of `t`.
    pub fn prevision(&self, t: &CondTerm) -> Result<Rational, PrevisionError> {
        self.check_term(t)?;
        Ok(self.entry(&t.clone().simplify())?.prevision.clone())
    }

    /// Both `X_t` and `P*(t)`.
    pub fn evaluate(&self, t: &CondTerm) -> Result<(RandomQuantity, Rational), PrevisionError> {
        self.check_term(t)?;
        let e = self.entry(&t.clone().simplify())?;
        Ok((e.quantity.clone(), e.prevision.clone()))
    }

    /// `t` must already be constant-normalized.
    fn entry(&self, t: &CondTerm) -> Result<Arc<Entry>, PrevisionError> {
        if let Some(e) = self.memo.read().expect("memo lock").get(t) {
            return Ok(e.clone());
        }
        let space = self.space();
        let entry = match t {
            CondTerm::One => Entry { quantity: RandomQuantity::constant(space, Rational::one()), prevision: Rational::one() },
            CondTerm::Zero => {
                Entry { quantity: RandomQuantity::constant(space, Rational::zero()), prevision: Rational::zero() }
            }
            _ => {
                let b = t.antecedent_disjunction(space);
                let mut values: Vec<Option<Rational>> = vec![None; space.len()];
                for w in b.worlds() {
                    let reduct = t.reduce(w);
                    debug_assert!(reduct.basic_occurrences() < t.basic_occurrences());
                    values[w] = Some(self.entry(&reduct)?.prevision.clone());
                }
                let weights = self.weights_given(&b)?;
                // weights vanish off b, so the unknown values do not contribute
                let prevision = values
                    .iter()
                    .zip(weights.iter())
                    .filter_map(|(v, p)| v.as_ref().map(|v| v * p))
                    .fold(Rational::zero(), |acc, x| acc + x);
                let values = values.into_iter().map(|v| v.unwrap_or_else(|| prevision.clone())).collect();
                Entry { quantity: RandomQuantity { space: space.id(), values }, prevision }
            }
        };
        let entry = Arc::new(entry);
        self.memo.write().expect("memo lock").entry(t.clone()).or_insert_with(|| entry.clone());
        Ok(entry)
    }
}

fn dot(values: &[Rational], weights: &[Rational]) -> Rational {
    values
        .iter()
        .zip(weights)
        .filter(|(_, p)| !p.is_zero())
        .fold(Rational::zero(), |acc, (x, p)| acc + x * p)
}
